import json

import pytest
from fastapi.testclient import TestClient

from tourbot.service import ServiceConfig, create_app

from conftest import MAP_PATH


@pytest.fixture()
def client():
    config = ServiceConfig(default_clock="manual")
    app = create_app(config)
    with TestClient(app) as c:
        yield c


def create_session(client, **overrides) -> str:
    body = {"config": overrides} if overrides else {}
    response = client.post("/sessions", json=body)
    assert response.status_code == 200
    return response.json()["session_id"]


def parse_sse(text: str) -> list[tuple[str, dict]]:
    messages = []
    for block in text.split("\n\n"):
        event_name, data = None, None
        for line in block.splitlines():
            if line.startswith("event: "):
                event_name = line[len("event: "):]
            elif line.startswith("data: "):
                data = json.loads(line[len("data: "):])
        if event_name is not None and data is not None:
            messages.append((event_name, data))
    return messages


def stream_events(client, session_id, since=0):
    response = client.get(
        f"/sessions/{session_id}/stream",
        params={"since": since, "follow": "false"},
    )
    assert response.status_code == 200
    return parse_sse(response.text)


# -- lifecycle and commands ----------------------------------------------------


def test_create_returns_start_pose_and_summary(client):
    response = client.post("/sessions", json={})
    body = response.json()
    assert body["session_id"].startswith("s-")
    assert body["start_pose"] == {"x": 0.75, "y": 0.75, "theta": 0.0}
    assert body["map_summary"]["exhibits"] == 11
    assert body["map_summary"]["areas"] == ["Minerals", "Fossils", "Meteorites"]


def test_create_then_utterance_then_snapshot_shows_goal(client):
    sid = create_session(client)
    response = client.post(
        f"/sessions/{sid}/utterance", json={"text": "go to exhibit 4"}
    )
    assert response.status_code == 200
    snap = client.get(f"/sessions/{sid}/snapshot").json()
    assert snap["mode"] == "autonomous"
    assert snap["goal_exhibit_id"] == 4
    assert snap["plan"]  # waypoint polyline for the console


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope/snapshot").status_code == 404
    assert (
        client.post("/sessions/nope/utterance", json={"text": "hi"}).status_code
        == 404
    )


def test_utterance_to_closed_session_is_409(client):
    sid = create_session(client)
    assert client.delete(f"/sessions/{sid}").status_code == 200
    response = client.post(f"/sessions/{sid}/utterance", json={"text": "hi"})
    assert response.status_code == 409


def test_double_delete_is_409(client):
    sid = create_session(client)
    client.delete(f"/sessions/{sid}")
    assert client.delete(f"/sessions/{sid}").status_code == 409


def test_malformed_body_names_field(client):
    sid = create_session(client)
    response = client.post(f"/sessions/{sid}/utterance", json={"wrong": "hi"})
    assert response.status_code == 422
    detail = json.dumps(response.json())
    assert "text" in detail
    response = client.post(f"/sessions/{sid}/command", json={"cmd": "fly"})
    assert response.status_code == 422
    assert "cmd" in json.dumps(response.json())


def test_blank_utterance_rejected_naming_field(client):
    sid = create_session(client)
    response = client.post(f"/sessions/{sid}/utterance", json={"text": "   "})
    assert response.status_code == 422
    assert "text" in json.dumps(response.json())


def test_command_moves_robot(client):
    sid = create_session(client)
    before = client.get(f"/sessions/{sid}/snapshot").json()["pose"]
    client.post(f"/sessions/{sid}/command", json={"cmd": "forward"})
    after = client.get(f"/sessions/{sid}/snapshot").json()["pose"]
    assert after["x"] == pytest.approx(before["x"] + 0.5)


def test_manual_advance_drives_arrival(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "go to exhibit 4"})
    client.post(f"/sessions/{sid}/advance", json={"dt": 120.0})
    snap = client.get(f"/sessions/{sid}/snapshot").json()
    assert snap["visited"] == [4]
    assert snap["mode"] == "idle"


def test_advance_rejected_on_wall_clock_session(client):
    sid = create_session(client, clock="wall")
    response = client.post(f"/sessions/{sid}/advance", json={"dt": 1.0})
    assert response.status_code == 409
    client.delete(f"/sessions/{sid}")


def test_suggestion_response_accept_draws_plan(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/advance", json={"dt": 45.0})
    snap = client.get(f"/sessions/{sid}/snapshot").json()
    assert snap["pending_suggestion"] == 1
    client.post(
        f"/sessions/{sid}/suggestion_response", json={"response": "accept"}
    )
    snap = client.get(f"/sessions/{sid}/snapshot").json()
    assert snap["mode"] == "autonomous"
    assert snap["goal_exhibit_id"] == 1
    assert len(snap["plan"]) >= 1


def test_get_map_serves_document(client):
    response = client.get("/map")
    assert response.status_code == 200
    assert response.text == MAP_PATH.read_text(encoding="utf-8")
    doc = response.json()
    assert len(doc["exhibits"]) == 11


def test_session_config_overrides_apply(client):
    sid = create_session(client, silence_threshold=10.0)
    client.post(f"/sessions/{sid}/advance", json={"dt": 10.0})
    log = client.get(f"/sessions/{sid}/log").text
    assert '"cause": "proactive"' in log


# -- stream ------------------------------------------------------------------------


def test_stream_events_equal_stored_log(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "go to exhibit 4"})
    client.post(f"/sessions/{sid}/advance", json={"dt": 120.0})
    messages = stream_events(client, sid)
    streamed = [m[1]["event"] for m in messages if m[0] == "transcript"]
    log_lines = [
        json.loads(line)
        for line in client.get(f"/sessions/{sid}/log").text.splitlines()
        if line.strip()
    ]
    assert streamed == log_lines
    indices = [m[1]["index"] for m in messages if m[0] == "transcript"]
    assert indices == list(range(len(streamed)))


def test_stream_resume_has_no_duplicates_or_gaps(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "turn left"})
    first = [
        m[1] for m in stream_events(client, sid) if "index" in m[1]
    ]
    cut = len(first) // 2 or 1
    client.post(f"/sessions/{sid}/utterance", json={"text": "turn right"})
    resumed = [
        m[1]
        for m in stream_events(client, sid, since=cut)
        if "index" in m[1]
    ]
    assert [m["index"] for m in resumed][0] == cut
    full = [m[1] for m in stream_events(client, sid) if "index" in m[1]]
    assert first[:cut] + resumed == full


def test_two_subscribers_see_identical_streams(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "go to exhibit 4"})
    client.post(f"/sessions/{sid}/advance", json={"dt": 60.0})
    a = stream_events(client, sid)
    b = stream_events(client, sid)
    assert [m for m in a if m[0] == "transcript"] == [
        m for m in b if m[0] == "transcript"
    ]


def test_stream_pose_message_present(client):
    sid = create_session(client)
    messages = stream_events(client, sid)
    poses = [m[1] for m in messages if m[0] == "pose"]
    assert poses
    assert poses[0]["pose"] == {"x": 0.75, "y": 0.75, "theta": 0.0}
    assert poses[0]["mode"] == "idle"


def test_follow_stream_ends_with_marker_when_session_closes(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "turn left"})
    client.delete(f"/sessions/{sid}")
    response = client.get(
        f"/sessions/{sid}/stream", params={"since": 0, "follow": "true"}
    )
    messages = parse_sse(response.text)
    assert messages[-1][0] == "end"
    assert any(m[0] == "transcript" for m in messages)


def test_arrival_event_precedes_arrival_speech_on_stream(client):
    sid = create_session(client)
    client.post(f"/sessions/{sid}/utterance", json={"text": "go to exhibit 4"})
    client.post(f"/sessions/{sid}/advance", json={"dt": 120.0})
    events = [
        m[1]["event"] for m in stream_events(client, sid) if m[0] == "transcript"
    ]
    kinds = [e["kind"] for e in events]
    arrived_at = kinds.index("arrived")
    assert kinds[arrived_at + 1] == "robot_speech"
    assert events[arrived_at + 1]["payload"]["cause"] == "arrival"
