import { describe, expect, it } from "vitest";

import { sunburstSectors } from "../src/model.js";
import { arcPath, sectorShapes } from "../src/sunburst.js";
import { TreeNode } from "../src/types.js";

function node(path: string, docs: number, children: TreeNode[] = []): TreeNode {
  return {
    path,
    keywords_top5: [["w", 1]],
    keywords_top10: [["w", 1]],
    doc_count: docs,
    coherence: null,
    k_star: null,
    flags: [],
    articles: [],
    children,
  };
}

describe("arcPath", () => {
  it("produces a closed annular sector", () => {
    const d = arcPath(100, 100, 40, 80, 0, Math.PI / 2);
    expect(d.startsWith("M ")).toBe(true);
    expect(d).toContain("A ");
    expect(d.endsWith("Z")).toBe(true);
    // starts at the outer radius directly above the center
    expect(d.startsWith("M 100.000 20.000")).toBe(true);
  });

  it("uses the large-arc flag beyond half a turn", () => {
    const small = arcPath(0, 0, 10, 20, 0, Math.PI / 4);
    const large = arcPath(0, 0, 10, 20, 0, 1.5 * Math.PI);
    expect(small).toContain(" 0 0 1 ");
    expect(large).toContain(" 0 1 1 ");
  });

  it("handles a full circle without collapsing", () => {
    const d = arcPath(0, 0, 10, 20, 0, 2 * Math.PI);
    expect((d.match(/A /g) ?? []).length).toBe(4); // two half-arcs per radius
  });
});

describe("sectorShapes", () => {
  it("assigns one path per sector and inherits hues down the ring", () => {
    const sectors = sunburstSectors([
      node("1", 2, [node("1-1", 1), node("1-2", 1)]),
      node("2", 2),
    ]);
    const shapes = sectorShapes(sectors);
    expect(shapes.length).toBe(4);
    const hue1 = shapes.find((s) => s.path === "1")!.hue;
    expect(shapes.find((s) => s.path === "1-1")!.hue).toBe(hue1);
    expect(shapes.find((s) => s.path === "2")!.hue).not.toBe(hue1);
    for (const s of shapes) {
      expect(s.d.length).toBeGreaterThan(10);
    }
  });
});
