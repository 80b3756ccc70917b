import { clear, svgEl } from "./dom";
import type { EncodeResponse, RectClauseJson } from "./types";

const CLASS_COLORS = ["#2166ac", "#b2182b", "#1b7837", "#b8860b", "#762a83"];

export interface PaneGeometry {
  width: number;
  height: number;
  scale: number; // pixels per data unit
  planeStep: number; // data-units between plane anchors (matches the service)
  originX: number; // screen x of world (0, 0)
  originY: number; // screen y of world (0, 0); world y grows upward
}

export const DEFAULT_GEOMETRY: PaneGeometry = {
  width: 960,
  height: 260,
  scale: 170,
  planeStep: 1.2,
  originX: 20,
  originY: 220,
};

/** World data coordinates (plane shifts included) to screen. */
export function worldToScreen(
  x: number,
  y: number,
  geom: PaneGeometry,
): { x: number; y: number } {
  return { x: geom.originX + x * geom.scale, y: geom.originY - y * geom.scale };
}

export function screenToWorld(
  sx: number,
  sy: number,
  geom: PaneGeometry,
): { x: number; y: number } {
  return { x: (sx - geom.originX) / geom.scale, y: (geom.originY - sy) / geom.scale };
}

/** Plane-local rectangle coordinates to world (planes sit at (1.2k, 0)). */
export function planeToWorld(
  plane: number,
  x: number,
  y: number,
  geom: PaneGeometry,
): { x: number; y: number } {
  return { x: plane * geom.planeStep + x, y };
}

export function worldToPlane(
  plane: number,
  x: number,
  y: number,
  geom: PaneGeometry,
): { x: number; y: number } {
  return { x: x - plane * geom.planeStep, y };
}

export function planeAt(worldX: number, geom: PaneGeometry): number {
  return Math.max(0, Math.floor(worldX / geom.planeStep));
}

/** Draw the service-provided pair-plane graphs plus rectangle clauses.
 * Geometry only: every number shown elsewhere comes from the service. */
export function drawPanes(
  host: HTMLElement,
  graphs: EncodeResponse,
  clauses: RectClauseJson[],
  geom: PaneGeometry = DEFAULT_GEOMETRY,
): SVGElement {
  clear(host);
  const planeCount = graphs.graphs[0]?.plane_index.length ?? 0;
  const svg = svgEl("svg", {
    width: String(geom.width),
    height: String(geom.height),
    viewBox: `0 0 ${geom.width} ${geom.height}`,
    "data-role": "panes",
  });
  for (let plane = 0; plane < planeCount; plane += 1) {
    const tl = worldToScreen(plane * geom.planeStep, 1, geom);
    svg.append(
      svgEl("rect", {
        x: String(tl.x),
        y: String(tl.y),
        width: String(geom.scale),
        height: String(geom.scale),
        fill: "none",
        stroke: "#bbbbbb",
        "data-plane": String(plane),
      }),
    );
  }
  const classes = [...new Set(graphs.labels)].sort();
  graphs.graphs.forEach((graph, row) => {
    const color =
      CLASS_COLORS[classes.indexOf(graphs.labels[row]) % CLASS_COLORS.length];
    const points = graph.nodes
      .map(([x, y]) => {
        const p = worldToScreen(x, y, geom);
        return `${p.x},${p.y}`;
      })
      .join(" ");
    svg.append(
      svgEl("polyline", {
        points,
        fill: "none",
        stroke: color,
        "stroke-width": "1",
        opacity: "0.6",
        "data-row": String(row),
      }),
    );
  });
  for (const [index, clause] of clauses.entries()) {
    const [xLo, xHi, yLo, yHi] = clause.rect;
    const world = planeToWorld(clause.plane, xLo, yHi, geom);
    const tl = worldToScreen(world.x, world.y, geom);
    svg.append(
      svgEl("rect", {
        x: String(tl.x),
        y: String(tl.y),
        width: String((xHi - xLo) * geom.scale),
        height: String((yHi - yLo) * geom.scale),
        fill: "none",
        stroke: "#6a0dad",
        "stroke-width": "2",
        "stroke-dasharray": clause.membership === "outside" ? "6 3" : "",
        "data-clause": String(index),
      }),
    );
  }
  host.append(svg);
  return svg;
}
