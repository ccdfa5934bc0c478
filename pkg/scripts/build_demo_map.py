#!/usr/bin/env python3
"""Regenerate the bundled demo museum map (src/tourbot/data/museum11.map).

The demo floor is a 30x20 grid at 0.5 m resolution: three halls joined by
doorways, a handful of display cases, 11 exhibits, and a curated tour order.
Run from the repository root after editing the layout below.
"""

from __future__ import annotations

import json
import math
import sys
from collections import deque
from pathlib import Path

WIDTH, HEIGHT = 30, 20
RESOLUTION = 0.5
ORIGIN = (0.0, 0.0)

# Interior walls split the floor into three halls; two-cell doorways connect them.
WALL_COLS = (10, 20)
DOOR_ROWS = (9, 10)

# Display cases: occupied cells the exhibits face.
CASES = [
    (3, 4), (3, 5),          # granite / galena wall cases
    (6, 12), (7, 12),        # mineral island case
    (12, 6), (16, 6),        # fossil slab cases
    (13, 13), (17, 13),      # trackway + molar cases
    (24, 5), (24, 12),       # meteorite pedestals
    (27, 9),                 # tektite corner case
]


def cell_center(col: int, row: int) -> tuple[float, float]:
    return (ORIGIN[0] + (col + 0.5) * RESOLUTION, ORIGIN[1] + (row + 0.5) * RESOLUTION)


def build_rows() -> list[str]:
    grid = [["." for _ in range(WIDTH)] for _ in range(HEIGHT)]
    for col in range(WIDTH):
        grid[0][col] = "#"
        grid[HEIGHT - 1][col] = "#"
    for row in range(HEIGHT):
        grid[row][0] = "#"
        grid[row][WIDTH - 1] = "#"
    for col in WALL_COLS:
        for row in range(1, HEIGHT - 1):
            if row not in DOOR_ROWS:
                grid[row][col] = "#"
    for col, row in CASES:
        grid[row][col] = "#"
    return ["".join(r) for r in grid]


def area_for(col: int) -> str:
    if col <= 10:
        return "minerals"
    if col <= 20:
        return "fossils"
    return "meteorites"


def exhibit(num, name, area_id, cell, theta, intro, dialogue, **extra):
    x, y = cell_center(*cell)
    entry = {
        "id": num,
        "name": name,
        "area_id": area_id,
        "viewing_pose": {"x": x, "y": y, "theta": theta},
        "intro": intro,
        "sample_dialogue": [
            {"speaker": speaker, "text": text} for speaker, text in dialogue
        ],
    }
    entry.update(extra)
    return entry


EXHIBITS = [
    exhibit(
        1, "Red Granite", "minerals", (4, 4), math.pi,
        "This case holds a polished slab of red granite, an igneous rock that "
        "cooled slowly from magma deep underground. The slab is roughly 1.75 "
        "billion years old and was quarried in central Wisconsin.",
        [
            ("guide", "What kind of rock do you think this red granite is?"),
            ("visitor", "It looks igneous to me."),
            ("guide", "Right, it crystallized from magma, which is why you can "
                      "see the interlocking mineral grains."),
        ],
        history="Red granite became the official state rock of Wisconsin in 1971, "
                "and quarries near Wausau supplied building stone across the Midwest.",
        activities="Look closely for the three minerals that color the slab: pink "
                   "feldspar, glassy quartz, and dark flecks of hornblende.",
    ),
    exhibit(
        3, "Galena & Lead Ores", "minerals", (4, 5), math.pi,
        "These heavy gray cubes are galena, the main ore of lead. Galena forms "
        "in a wide range of hydrothermal veins and often grows alongside "
        "sphalerite and calcite in the region's old mining districts.",
        [
            ("guide", "Try to guess why miners prized this dull gray mineral."),
            ("visitor", "Is it some kind of metal ore?"),
            ("guide", "Exactly, galena is rich in lead and sometimes carries "
                      "silver as a bonus."),
        ],
        history="Lead mining in the Upper Mississippi Valley boomed in the 1830s, "
                "long before the gold rushes out west.",
        misc="Galena crystallizes in cubes; a fresh break flashes a bright "
             "metallic luster.",
    ),
    exhibit(
        4, "Yellow Minerals", "minerals", (6, 11), math.pi / 2,
        "A spectrum of yellow minerals fills this case, from powdery sulfur to "
        "brassy pyrite. Pyrite is nicknamed fool's gold because its glitter has "
        "tricked prospectors for centuries.",
        [
            ("guide", "Can you spot the mineral in this case that people call "
                      "fool's gold?"),
            ("visitor", "That would be the pyrite, right?"),
            ("guide", "Correct, and unlike real gold it is hard, brittle, and "
                      "grows in sharp cubes."),
        ],
        activities="Compare the metallic shine of pyrite with the earthy glow of "
                   "sulfur in the same case.",
    ),
    exhibit(
        5, "Quartz Varieties", "minerals", (7, 11), math.pi / 2,
        "Quartz is the most common mineral at the surface of the Earth, and "
        "this case shows how varied it can be: clear rock crystal, purple "
        "amethyst, smoky quartz, and banded agate.",
        [
            ("guide", "All of these crystals are the same mineral. Any idea "
                      "what gives amethyst its purple color?"),
            ("visitor", "Some kind of impurity?"),
            ("guide", "Traces of iron plus natural radiation tint the crystal "
                      "purple."),
        ],
        misc="Quartz rates 7 on the Mohs hardness scale, hard enough to "
             "scratch window glass.",
    ),
    exhibit(
        7, "Trace Fossils", "fossils", (12, 5), math.pi / 2,
        "Trace fossils record behavior rather than bodies: burrows, tracks, "
        "and feeding trails pressed into ancient seafloor mud. The slab here "
        "preserves worm burrows from a shallow tropical sea.",
        [
            ("guide", "Nothing in this slab is a bone or a shell. What do you "
                      "think made these winding marks?"),
            ("visitor", "Maybe worms digging through the mud?"),
            ("guide", "Good eye, burrowing animals churned this seabed half a "
                      "billion years ago."),
        ],
        activities="Trace the longest burrow with your eyes and guess which way "
                   "the animal was feeding.",
    ),
    exhibit(
        9, "Trilobites", "fossils", (16, 5), math.pi / 2,
        "Trilobites were armored sea creatures that thrived for almost 300 "
        "million years before vanishing in the great Permian extinction. The "
        "specimens here range from pea-sized juveniles to a palm-sized adult.",
        [
            ("guide", "These are trilobites, early relatives of insects and "
                      "crabs. Notice anything about their eyes?"),
            ("visitor", "They look like they are made of little tiles."),
            ("guide", "Those are compound eyes with calcite lenses, some of the "
                      "first complex eyes on Earth."),
        ],
        history="The state fossil of Wisconsin is the trilobite Calymene "
                "celebra, found in local dolostone quarries.",
    ),
    exhibit(
        10, "Dinosaur Trackway", "fossils", (13, 12), math.pi / 2,
        "This cast of a dinosaur trackway shows three-toed footprints left by "
        "a theropod walking across a muddy floodplain. Stride length lets "
        "scientists estimate how fast the animal was moving.",
        [
            ("guide", "From the spacing of these footprints, do you think the "
                      "dinosaur was walking or running?"),
            ("visitor", "The steps look pretty far apart, so maybe running?"),
            ("guide", "It was striding briskly, about as fast as a jogging "
                      "human."),
        ],
    ),
    exhibit(
        13, "Mastodon Molars", "fossils", (17, 12), math.pi / 2,
        "These massive ridged teeth belonged to a mastodon, an ice-age cousin "
        "of elephants that browsed spruce forests here until about 10,000 "
        "years ago. Each molar is the size of a loaf of bread.",
        [
            ("guide", "Feel free to guess: which mineral makes our teeth and "
                      "bones, including these molars, so hard?"),
            ("visitor", "Is it apatite?"),
            ("guide", "Yes, calcium phosphate in the form of apatite, the same "
                      "mineral in your own teeth."),
        ],
        history="Farmers plowing fields in the Midwest still turn up mastodon "
                "teeth and tusks every few years.",
    ),
    exhibit(
        17, "Iron Meteorites", "meteorites", (24, 4), math.pi / 2,
        "This pedestal carries an iron meteorite, a fragment of the shattered "
        "core of an ancient planetesimal. Cut and etched, it reveals a "
        "crosshatch of nickel-iron crystals that can only grow in space.",
        [
            ("guide", "This chunk of metal fell from the sky. Why do you think "
                      "it never rusted away?"),
            ("visitor", "Maybe the nickel protects it?"),
            ("guide", "Partly, and it also spent most of its life in the vacuum "
                      "of space where there is no water at all."),
        ],
        misc="The etched pattern is called a Widmanstatten texture; it takes "
             "millions of years of slow cooling to form.",
    ),
    exhibit(
        21, "Stony Meteorites", "meteorites", (24, 11), math.pi / 2,
        "Stony meteorites are the most common visitors from space. The ones "
        "here are chondrites, packed with round droplets that condensed from "
        "the cloud of dust that built the solar system.",
        [
            ("guide", "Those little spheres inside the stone are older than "
                      "the Earth itself. What would you ask a rock like that?"),
            ("visitor", "Where it came from, I suppose."),
            ("guide", "It drifted in the asteroid belt for four and a half "
                      "billion years before landing here."),
        ],
        activities="Compare the dark fusion crust on the outside with the pale "
                   "interior exposed by the cut face.",
    ),
    exhibit(
        23, "Impactites & Tektites", "meteorites", (26, 9), 0.0,
        "When a large meteorite strikes, the blast melts and splashes the "
        "target rock. This corner case shows impactites and tektites, glassy "
        "droplets flung hundreds of kilometers from ancient craters.",
        [
            ("guide", "These glassy blobs are not volcanic. Can you picture "
                      "what event made them?"),
            ("visitor", "A meteorite impact melting the ground?"),
            ("guide", "Exactly, the splash froze in flight into these "
                      "teardrop shapes."),
        ],
    ),
]

TOUR_ORDER = [1, 3, 4, 5, 7, 9, 10, 13, 17, 21, 23]


def build_document() -> dict:
    rows = build_rows()
    areas = {"minerals": [], "fossils": [], "meteorites": []}
    for row in range(HEIGHT):
        for col in range(WIDTH):
            if rows[row][col] == ".":
                areas[area_for(col)].append([col, row])
    names = {"minerals": "Minerals", "fossils": "Fossils", "meteorites": "Meteorites"}
    return {
        "grid": {
            "resolution": RESOLUTION,
            "origin": list(ORIGIN),
            "width": WIDTH,
            "height": HEIGHT,
            "rows": rows,
        },
        "areas": [
            {"id": aid, "name": names[aid], "cells": cells}
            for aid, cells in areas.items()
        ],
        "exhibits": EXHIBITS,
        "tour_order": TOUR_ORDER,
    }


def check_connectivity(rows: list[str]) -> None:
    free = {
        (c, r) for r in range(HEIGHT) for c in range(WIDTH) if rows[r][c] == "."
    }
    start = min(free, key=lambda cr: (cr[1], cr[0]))
    seen = {start}
    queue = deque([start])
    while queue:
        c, r = queue.popleft()
        for nc, nr in ((c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)):
            if (nc, nr) in free and (nc, nr) not in seen:
                seen.add((nc, nr))
                queue.append((nc, nr))
    if seen != free:
        sys.exit(f"floor is not connected: {len(free - seen)} unreachable cells")


def main() -> None:
    doc = build_document()
    check_connectivity(doc["grid"]["rows"])
    out = Path(__file__).resolve().parents[1] / "src" / "tourbot" / "data" / "museum11.map"
    out.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(EXHIBITS)} exhibits, {len(doc['areas'])} areas)")


if __name__ == "__main__":
    main()
