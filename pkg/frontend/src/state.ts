/** Navigation state with lossless back-tracking.
 *
 * Entering a node pushes the current view state; leaving restores it
 * exactly (path, keyword filter, heatmap selection).
 */

import { ROOT_PATH } from "./types.js";

export interface ViewState {
  path: string;
  filter: string;
  heatmapCell: [number, number] | null;
}

export function initialState(): ViewState {
  return { path: ROOT_PATH, filter: "", heatmapCell: null };
}

export class Navigator {
  private stack: ViewState[] = [];
  current: ViewState = initialState();

  enter(path: string): ViewState {
    this.stack.push({ ...this.current });
    this.current = { ...this.current, path };
    return this.current;
  }

  back(): ViewState {
    const prev = this.stack.pop();
    if (prev) this.current = prev;
    return this.current;
  }

  get depth(): number {
    return this.stack.length;
  }

  setFilter(filter: string): ViewState {
    this.current = { ...this.current, filter };
    return this.current;
  }

  selectHeatmapCell(cell: [number, number] | null): ViewState {
    this.current = { ...this.current, heatmapCell: cell };
    return this.current;
  }
}
