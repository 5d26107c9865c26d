import { describe, expect, it } from "vitest";

import { initialState, Navigator } from "../src/state.js";
import { ROOT_PATH } from "../src/types.js";

describe("Navigator", () => {
  it("starts at the root with empty filter", () => {
    expect(initialState()).toEqual({ path: ROOT_PATH, filter: "", heatmapCell: null });
  });

  it("entering and leaving a node restores the prior view state exactly", () => {
    const nav = new Navigator();
    nav.setFilter("magma");
    nav.selectHeatmapCell([2, 3]);
    const before = { ...nav.current };
    nav.enter("7");
    nav.enter("7-1");
    expect(nav.current.path).toBe("7-1");
    expect(nav.current.filter).toBe("magma"); // filter carried along
    nav.back();
    nav.back();
    expect(nav.current).toEqual(before);
  });

  it("back at the root is a no-op", () => {
    const nav = new Navigator();
    const state = nav.back();
    expect(state).toEqual(initialState());
  });

  it("filter edits inside a node are undone by leaving it", () => {
    const nav = new Navigator();
    nav.enter("3");
    nav.setFilter("larva");
    nav.back();
    expect(nav.current.filter).toBe("");
    expect(nav.current.path).toBe(ROOT_PATH);
  });

  it("depth tracks the stack", () => {
    const nav = new Navigator();
    expect(nav.depth).toBe(0);
    nav.enter("1");
    nav.enter("1-2");
    expect(nav.depth).toBe(2);
    nav.back();
    expect(nav.depth).toBe(1);
  });
});
