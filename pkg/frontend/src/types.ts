/** Shapes of the export files served by the pipeline (schema_version 1). */

export type KeywordPair = [string, number];

export interface ArticleRef {
  id: string;
  title: string;
  source: string;
}

export interface TreeNode {
  path: string;
  keywords_top5: KeywordPair[];
  keywords_top10: KeywordPair[];
  doc_count: number;
  coherence: number | null;
  k_star: number | null;
  flags: string[];
  articles: ArticleRef[];
  children: TreeNode[];
}

export interface TreeExport {
  schema_version: number;
  corpus: { n: number; d: number; excluded: string[] };
  config: Record<string, unknown>;
  per_layer_k: Record<string, Record<string, number>>;
  warnings: string[];
  nodes: TreeNode[];
}

export interface HeatmapData {
  paths: string[];
  distances: number[][];
  similarities: number[][];
  d_min: number;
  d_max: number;
  transform: string;
}

/** Path of the synthetic root that holds the layer-1 topics. */
export const ROOT_PATH = "";
