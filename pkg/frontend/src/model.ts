/** Pure view-model layer: everything the DOM renders is computed here.
 *
 * No counts are recomputed client-side; sector sizes, document counts and
 * keyword lists all come straight from the export.
 */

import {
  ArticleRef,
  KeywordPair,
  ROOT_PATH,
  TreeExport,
  TreeNode,
} from "./types.js";

const TAU = 2 * Math.PI;

export function indexByPath(tree: TreeExport): Map<string, TreeNode> {
  const map = new Map<string, TreeNode>();
  const stack = [...tree.nodes];
  while (stack.length) {
    const node = stack.shift()!;
    map.set(node.path, node);
    stack.push(...node.children);
  }
  return map;
}

export function parentPath(path: string): string {
  const cut = path.lastIndexOf("-");
  return cut === -1 ? ROOT_PATH : path.slice(0, cut);
}

/** Prefix chain from the root to the node: ["", "7", "7-1"]. */
export function breadcrumbs(path: string): string[] {
  if (path === ROOT_PATH) return [ROOT_PATH];
  const parts = path.split("-");
  const trail = [ROOT_PATH];
  for (let i = 1; i <= parts.length; i++) {
    trail.push(parts.slice(0, i).join("-"));
  }
  return trail;
}

export interface Sector {
  path: string;
  label: string;
  docCount: number;
  fraction: number;
  startAngle: number;
  endAngle: number;
  ring: number; // 0 = children of the focus node, 1 = grandchildren
  hasChildren: boolean;
}

/**
 * Angular layout for the focus node's child ring (and a nested outer ring of
 * grandchildren inside each child's span). Areas are proportional to the
 * export's document counts; an all-zero ring falls back to equal sectors.
 */
export function sunburstSectors(children: TreeNode[]): Sector[] {
  const total = children.reduce((s, c) => s + c.doc_count, 0);
  const sectors: Sector[] = [];
  let angle = 0;
  for (const child of children) {
    const fraction = total > 0 ? child.doc_count / total : 1 / children.length;
    const span = fraction * TAU;
    sectors.push({
      path: child.path,
      label: child.keywords_top5.slice(0, 3).map(([w]) => w).join(", "),
      docCount: child.doc_count,
      fraction,
      startAngle: angle,
      endAngle: angle + span,
      ring: 0,
      hasChildren: child.children.length > 0,
    });
    const subTotal = child.children.reduce((s, c) => s + c.doc_count, 0);
    let subAngle = angle;
    for (const grand of child.children) {
      const subFraction =
        subTotal > 0 ? grand.doc_count / subTotal : 1 / child.children.length;
      const subSpan = subFraction * span;
      sectors.push({
        path: grand.path,
        label: grand.keywords_top5.slice(0, 3).map(([w]) => w).join(", "),
        docCount: grand.doc_count,
        fraction: subFraction * fraction,
        startAngle: subAngle,
        endAngle: subAngle + subSpan,
        ring: 1,
        hasChildren: grand.children.length > 0,
      });
      subAngle += subSpan;
    }
    angle += span;
  }
  return sectors;
}

export type NodeView =
  | {
      kind: "node";
      path: string;
      title: string;
      breadcrumbs: string[];
      keywords: KeywordPair[];
      docCount: number;
      coherence: number | null;
      flags: string[];
      isLeaf: boolean;
      emptyState: boolean;
      sectors: Sector[];
      articles: ArticleRef[] | null;
    }
  | { kind: "error"; path: string; message: string; homePath: string };

export function renderNode(tree: TreeExport, path: string): NodeView {
  if (path === ROOT_PATH) {
    return {
      kind: "node",
      path: ROOT_PATH,
      title: "All topics",
      breadcrumbs: [ROOT_PATH],
      keywords: [],
      docCount: tree.corpus.n,
      coherence: null,
      flags: [],
      isLeaf: tree.nodes.length === 0,
      emptyState: tree.nodes.length === 0,
      sectors: sunburstSectors(tree.nodes),
      articles: null,
    };
  }
  const node = indexByPath(tree).get(path);
  if (!node) {
    return {
      kind: "error",
      path,
      message: `No topic at path "${path}".`,
      homePath: ROOT_PATH,
    };
  }
  const isLeaf = node.children.length === 0;
  return {
    kind: "node",
    path,
    title: `Topic ${path}`,
    breadcrumbs: breadcrumbs(path),
    keywords: node.keywords_top5,
    docCount: node.doc_count,
    coherence: node.coherence,
    flags: node.flags,
    isLeaf,
    emptyState: node.doc_count === 0,
    sectors: isLeaf ? [] : sunburstSectors(node.children),
    articles: isLeaf ? node.articles : null,
  };
}

export interface KeywordHit {
  path: string;
  keyword: string;
  isLeaf: boolean;
}

/** Case-insensitive substring match over every node's top-10 keywords. */
export function filterKeywords(tree: TreeExport, query: string): KeywordHit[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return [];
  const hits: KeywordHit[] = [];
  for (const [path, node] of indexByPath(tree)) {
    const match = node.keywords_top10.find(([w]) =>
      w.toLowerCase().includes(needle),
    );
    if (match) {
      hits.push({ path, keyword: match[0], isLeaf: node.children.length === 0 });
    }
  }
  return hits;
}
