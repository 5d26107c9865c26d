/** SVG path generation for annular sectors (no chart library needed). */

import { Sector } from "./model.js";

const EPS = 1e-6;

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  // angle 0 at 12 o'clock, clockwise
  const a = angle - Math.PI / 2;
  return [cx + r * Math.cos(a), cy + r * Math.sin(a)];
}

function fmt(x: number): string {
  return x.toFixed(3);
}

/** Annular-sector path between radii r0 < r1 from startAngle to endAngle. */
export function arcPath(
  cx: number,
  cy: number,
  r0: number,
  r1: number,
  startAngle: number,
  endAngle: number,
): string {
  const span = endAngle - startAngle;
  if (span >= 2 * Math.PI - EPS) {
    // full ring: two half-arcs per radius, otherwise the arc collapses
    const mid = startAngle + span / 2;
    const [ax, ay] = polar(cx, cy, r1, startAngle);
    const [bx, by] = polar(cx, cy, r1, mid);
    const [cx0, cy0] = polar(cx, cy, r0, startAngle);
    const [dx, dy] = polar(cx, cy, r0, mid);
    return [
      `M ${fmt(ax)} ${fmt(ay)}`,
      `A ${fmt(r1)} ${fmt(r1)} 0 1 1 ${fmt(bx)} ${fmt(by)}`,
      `A ${fmt(r1)} ${fmt(r1)} 0 1 1 ${fmt(ax)} ${fmt(ay)}`,
      `M ${fmt(cx0)} ${fmt(cy0)}`,
      `A ${fmt(r0)} ${fmt(r0)} 0 1 0 ${fmt(dx)} ${fmt(dy)}`,
      `A ${fmt(r0)} ${fmt(r0)} 0 1 0 ${fmt(cx0)} ${fmt(cy0)}`,
      "Z",
    ].join(" ");
  }
  const large = span > Math.PI ? 1 : 0;
  const [x0, y0] = polar(cx, cy, r1, startAngle);
  const [x1, y1] = polar(cx, cy, r1, endAngle);
  const [x2, y2] = polar(cx, cy, r0, endAngle);
  const [x3, y3] = polar(cx, cy, r0, startAngle);
  return [
    `M ${fmt(x0)} ${fmt(y0)}`,
    `A ${fmt(r1)} ${fmt(r1)} 0 ${large} 1 ${fmt(x1)} ${fmt(y1)}`,
    `L ${fmt(x2)} ${fmt(y2)}`,
    `A ${fmt(r0)} ${fmt(r0)} 0 ${large} 0 ${fmt(x3)} ${fmt(y3)}`,
    "Z",
  ].join(" ");
}

export interface RingGeometry {
  cx: number;
  cy: number;
  innerRadius: number;
  ringWidth: number;
}

export const DEFAULT_GEOMETRY: RingGeometry = {
  cx: 180,
  cy: 180,
  innerRadius: 52,
  ringWidth: 58,
};

export interface SectorShape extends Sector {
  d: string;
  hue: number;
}

/** Hue assignment: ring-0 sectors spread around the wheel; descendants inherit. */
export function sectorShapes(
  sectors: Sector[],
  geo: RingGeometry = DEFAULT_GEOMETRY,
): SectorShape[] {
  const topHue = new Map<string, number>();
  const tops = sectors.filter((s) => s.ring === 0);
  tops.forEach((s, i) => topHue.set(s.path, (360 * i) / Math.max(tops.length, 1)));
  return sectors.map((s) => {
    const r0 = geo.innerRadius + s.ring * geo.ringWidth;
    const r1 = r0 + geo.ringWidth - 2;
    const hue = topHue.get(findTop(s.path, topHue)) ?? 0;
    return { ...s, d: arcPath(geo.cx, geo.cy, r0, r1, s.startAngle, s.endAngle), hue };
  });
}

function findTop(path: string, topHue: Map<string, number>): string {
  let p = path;
  while (p && !topHue.has(p)) {
    const cut = p.lastIndexOf("-");
    p = cut === -1 ? "" : p.slice(0, cut);
  }
  return p;
}
