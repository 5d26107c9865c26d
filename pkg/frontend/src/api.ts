/** Data access: the /api endpoints when served, static JSON files otherwise. */

import { HeatmapData, TreeExport } from "./types.js";

async function fetchJson<T>(url: string): Promise<T | null> {
  try {
    const resp = await fetch(url);
    if (!resp.ok) return null;
    return (await resp.json()) as T;
  } catch {
    return null;
  }
}

export async function loadTree(): Promise<TreeExport> {
  const tree =
    (await fetchJson<TreeExport>("/api/tree")) ??
    (await fetchJson<TreeExport>("./tree.json"));
  if (!tree) {
    throw new Error("no tree export reachable (tried /api/tree and ./tree.json)");
  }
  if (tree.schema_version !== 1) {
    throw new Error(`unsupported export schema_version ${tree.schema_version}`);
  }
  return tree;
}

export async function loadHeatmap(): Promise<HeatmapData | null> {
  return (
    (await fetchJson<HeatmapData>("/api/heatmap")) ??
    (await fetchJson<HeatmapData>("./heatmap.json"))
  );
}
