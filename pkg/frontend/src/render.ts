// Canvas renderer for the museum floor: occupancy cells tinted by area,
// exhibit markers (filled once visited), the robot with a heading arrow, and
// the planned path polyline. World y grows upward, canvas y grows downward,
// so rows are flipped when drawing.

import { ConsoleState } from "./state.js";
import { MapDoc } from "./types.js";

const AREA_TINTS = ["#dbeafe", "#dcfce7", "#fef3c7", "#fae8ff", "#e0f2fe"];
const WALL = "#334155";
const FLOOR_FALLBACK = "#f8fafc";

export interface Viewport {
  cellPx: number;
  heightPx: number;
}

export function viewportFor(map: MapDoc, maxWidthPx: number): Viewport {
  const cellPx = Math.max(4, Math.floor(maxWidthPx / map.grid.width));
  return { cellPx, heightPx: cellPx * map.grid.height };
}

function worldToCanvas(
  map: MapDoc,
  view: Viewport,
  x: number,
  y: number,
): [number, number] {
  const { resolution, origin } = map.grid;
  const px = ((x - origin[0]) / resolution) * view.cellPx;
  const py = view.heightPx - ((y - origin[1]) / resolution) * view.cellPx;
  return [px, py];
}

export function areaTint(map: MapDoc, areaId: string): string {
  const idx = map.areas.findIndex((a) => a.id === areaId);
  return idx >= 0 ? AREA_TINTS[idx % AREA_TINTS.length] : FLOOR_FALLBACK;
}

export function drawConsole(
  ctx: CanvasRenderingContext2D,
  state: ConsoleState,
  view: Viewport,
): void {
  const map = state.map;
  if (!map) {
    return;
  }
  const { width, height, rows } = map.grid;
  const cell = view.cellPx;
  ctx.clearRect(0, 0, width * cell, view.heightPx);

  const tintByCell = new Map<string, string>();
  for (const area of map.areas) {
    const tint = areaTint(map, area.id);
    for (const [c, r] of area.cells) {
      tintByCell.set(`${c},${r}`, tint);
    }
  }
  for (let r = 0; r < height; r++) {
    for (let c = 0; c < width; c++) {
      const free = rows[r][c] === ".";
      ctx.fillStyle = free
        ? tintByCell.get(`${c},${r}`) ?? FLOOR_FALLBACK
        : WALL;
      ctx.fillRect(c * cell, view.heightPx - (r + 1) * cell, cell, cell);
    }
  }

  if (state.plan.length > 0 && state.pose) {
    ctx.strokeStyle = "#2563eb";
    ctx.lineWidth = Math.max(2, cell / 5);
    ctx.beginPath();
    const [sx, sy] = worldToCanvas(map, view, state.pose.x, state.pose.y);
    ctx.moveTo(sx, sy);
    for (const [wx, wy] of state.plan) {
      const [px, py] = worldToCanvas(map, view, wx, wy);
      ctx.lineTo(px, py);
    }
    ctx.stroke();
  }

  for (const exhibit of map.exhibits) {
    const visited = state.visited.includes(exhibit.id);
    const [px, py] = worldToCanvas(
      map, view, exhibit.viewing_pose.x, exhibit.viewing_pose.y,
    );
    ctx.beginPath();
    ctx.arc(px, py, cell * 0.42, 0, Math.PI * 2);
    ctx.fillStyle = visited ? "#16a34a" : "#ffffff";
    ctx.fill();
    ctx.strokeStyle = "#16a34a";
    ctx.lineWidth = 2;
    ctx.stroke();
    ctx.fillStyle = visited ? "#ffffff" : "#111827";
    ctx.font = `${Math.max(8, cell * 0.6)}px sans-serif`;
    ctx.textAlign = "center";
    ctx.textBaseline = "middle";
    ctx.fillText(String(exhibit.id), px, py);
  }

  if (state.pose) {
    const { x, y, theta } = state.pose;
    const [px, py] = worldToCanvas(map, view, x, y);
    const r = cell * 0.55;
    ctx.beginPath();
    ctx.arc(px, py, r, 0, Math.PI * 2);
    ctx.fillStyle = state.mode === "autonomous" ? "#f97316" : "#dc2626";
    ctx.fill();
    // heading arrow; canvas y is flipped, so the angle negates
    ctx.strokeStyle = "#111827";
    ctx.lineWidth = Math.max(2, cell / 5);
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + Math.cos(-theta) * r * 1.8, py + Math.sin(-theta) * r * 1.8);
    ctx.stroke();
  }
}
