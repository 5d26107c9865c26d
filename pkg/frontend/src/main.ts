/** DOM shell: wires the pure view-model to SVG and HTML.
 *
 * Clicking a sector descends into that topic; clicking the center disc (or
 * the back button) ascends, restoring the previous view state exactly.
 */

import { loadHeatmap, loadTree } from "./api.js";
import { filterKeywords, NodeView, renderNode } from "./model.js";
import { Navigator } from "./state.js";
import { DEFAULT_GEOMETRY, sectorShapes } from "./sunburst.js";
import { HeatmapData, ROOT_PATH, TreeExport } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

class App {
  private nav = new Navigator();

  constructor(
    private tree: TreeExport,
    private heat: HeatmapData | null,
    private root: HTMLElement,
  ) {}

  go(path: string): void {
    this.nav.enter(path);
    this.render();
  }

  backTo(path: string): void {
    while (this.nav.depth > 0 && this.nav.current.path !== path) {
      this.nav.back();
    }
    if (this.nav.current.path !== path) this.nav.enter(path);
    this.render();
  }

  render(): void {
    const view = renderNode(this.tree, this.nav.current.path);
    this.root.replaceChildren();
    this.root.appendChild(this.renderHeader(view));
    const layout = el("div", "layout");
    if (view.kind === "node" && !view.isLeaf) {
      layout.appendChild(this.renderSunburst(view));
    }
    layout.appendChild(this.renderDetails(view));
    this.root.appendChild(layout);
    if (this.heat) this.root.appendChild(this.renderHeatmap(this.heat));
  }

  private renderHeader(view: NodeView): HTMLElement {
    const header = el("header");
    const crumbs = el("nav", "breadcrumbs");
    const trail = view.kind === "node" ? view.breadcrumbs : [ROOT_PATH];
    trail.forEach((crumbPath, i) => {
      if (i > 0) crumbs.appendChild(el("span", "sep", "/"));
      const label = crumbPath === ROOT_PATH ? "all topics" : crumbPath;
      if (crumbPath === this.nav.current.path) {
        crumbs.appendChild(el("span", "crumb current", label));
      } else {
        const link = el("a", "crumb", label);
        link.href = "#";
        link.onclick = (e) => {
          e.preventDefault();
          this.backTo(crumbPath);
        };
        crumbs.appendChild(link);
      }
    });
    header.appendChild(crumbs);

    const search = el("div", "search");
    const input = el("input") as HTMLInputElement;
    input.type = "search";
    input.placeholder = "filter topics by keyword";
    input.value = this.nav.current.filter;
    input.oninput = () => {
      this.nav.setFilter(input.value);
      results.replaceChildren(...this.renderHits(input.value));
    };
    const results = el("ul", "hits");
    results.replaceChildren(...this.renderHits(this.nav.current.filter));
    search.appendChild(input);
    search.appendChild(results);
    header.appendChild(search);
    return header;
  }

  private renderHits(query: string): HTMLElement[] {
    return filterKeywords(this.tree, query).map((hit) => {
      const li = el("li");
      const link = el("a", "hit", `${hit.path} (${hit.keyword})`);
      link.href = "#";
      link.onclick = (e) => {
        e.preventDefault();
        this.go(hit.path);
      };
      li.appendChild(link);
      return li;
    });
  }

  private renderSunburst(view: NodeView & { kind: "node" }): HTMLElement {
    const wrap = el("div", "sunburst");
    const svg = document.createElementNS(SVG_NS, "svg");
    const geo = DEFAULT_GEOMETRY;
    svg.setAttribute("viewBox", `0 0 ${geo.cx * 2} ${geo.cy * 2}`);
    svg.setAttribute("role", "img");

    for (const shape of sectorShapes(view.sectors, geo)) {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", shape.d);
      const light = shape.ring === 0 ? 62 : 74;
      path.setAttribute("fill", `hsl(${shape.hue} 55% ${light}%)`);
      path.setAttribute("class", "sector");
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${shape.path}: ${shape.label} (${shape.docCount} articles)`;
      path.appendChild(title);
      path.addEventListener("click", () => this.go(shape.path));
      svg.appendChild(path);
    }

    const center = document.createElementNS(SVG_NS, "circle");
    center.setAttribute("cx", String(geo.cx));
    center.setAttribute("cy", String(geo.cy));
    center.setAttribute("r", String(geo.innerRadius - 6));
    center.setAttribute("class", "center");
    const centerTitle = document.createElementNS(SVG_NS, "title");
    centerTitle.textContent = view.path === ROOT_PATH ? "all topics" : "go up";
    center.appendChild(centerTitle);
    center.addEventListener("click", () => {
      if (this.nav.current.path !== ROOT_PATH) {
        this.nav.back();
        this.render();
      }
    });
    svg.appendChild(center);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(geo.cx));
    label.setAttribute("y", String(geo.cy));
    label.setAttribute("class", "center-label");
    label.textContent = view.path === ROOT_PATH ? "all" : view.path;
    svg.appendChild(label);

    wrap.appendChild(svg);
    return wrap;
  }

  private renderDetails(view: NodeView): HTMLElement {
    const box = el("section", "details");
    if (view.kind === "error") {
      box.appendChild(el("h2", "", "Unknown topic"));
      box.appendChild(el("p", "error", view.message));
      const home = el("a", "", "back to all topics");
      home.href = "#";
      home.onclick = (e) => {
        e.preventDefault();
        this.backTo(view.homePath);
      };
      box.appendChild(home);
      return box;
    }
    box.appendChild(el("h2", "", view.title));
    const meta = el("p", "meta",
      `${view.docCount} articles` +
      (view.coherence !== null ? ` · coherence ${view.coherence.toFixed(2)}` : "") +
      (view.flags.length ? ` · flags: ${view.flags.join(", ")}` : ""));
    box.appendChild(meta);

    if (view.keywords.length) {
      const kw = el("ul", "keywords");
      for (const [word, weight] of view.keywords) {
        kw.appendChild(el("li", "", `${word} (${weight.toFixed(3)})`));
      }
      box.appendChild(kw);
    }

    if (view.emptyState) {
      box.appendChild(el("p", "empty", "No articles are assigned to this topic."));
    } else if (view.articles) {
      const list = el("ol", "articles");
      for (const art of view.articles) {
        const li = el("li");
        li.appendChild(el("span", "title", art.title || art.id));
        li.appendChild(el("span", "source", ` — ${art.source} (${art.id})`));
        list.appendChild(li);
      }
      box.appendChild(list);
    }
    return box;
  }

  private renderHeatmap(heat: HeatmapData): HTMLElement {
    const box = el("section", "heatmap");
    box.appendChild(el("h2", "", "Topic similarity"));
    box.appendChild(el("p", "meta",
      "light = similar, dark = dissimilar; topics ordered shallow to deep"));
    const n = heat.paths.length;
    const table = el("table");
    const head = el("tr");
    head.appendChild(el("th"));
    heat.paths.forEach((p) => head.appendChild(el("th", "", p)));
    table.appendChild(head);
    for (let i = 0; i < n; i++) {
      const row = el("tr");
      row.appendChild(el("th", "", heat.paths[i]));
      for (let j = 0; j < n; j++) {
        const sim = heat.similarities[i][j];
        const cell = el("td");
        cell.style.background = `hsl(28 80% ${20 + 70 * sim}%)`;
        const selected = this.nav.current.heatmapCell;
        if (selected && selected[0] === i && selected[1] === j) {
          cell.classList.add("selected");
        }
        cell.title =
          `${heat.paths[i]} vs ${heat.paths[j]}: ` +
          `distance ${heat.distances[i][j].toFixed(3)}, similarity ${sim.toFixed(3)}`;
        cell.onclick = () => {
          this.nav.selectHeatmapCell([i, j]);
          this.render();
        };
        row.appendChild(cell);
      }
      table.appendChild(row);
    }
    box.appendChild(table);
    const selected = this.nav.current.heatmapCell;
    if (selected) {
      const [i, j] = selected;
      box.appendChild(el("p", "cell-info",
        `${heat.paths[i]} vs ${heat.paths[j]}: distance ` +
        `${heat.distances[i][j].toFixed(4)} (similarity ${heat.similarities[i][j].toFixed(4)})`));
    }
    return box;
  }
}

async function start(): Promise<void> {
  const root = document.getElementById("app")!;
  try {
    const [tree, heat] = await Promise.all([loadTree(), loadHeatmap()]);
    new App(tree, heat, root).render();
  } catch (err) {
    root.replaceChildren(
      el("p", "error", `Failed to load the topic tree: ${String(err)}`),
    );
  }
}

start();
