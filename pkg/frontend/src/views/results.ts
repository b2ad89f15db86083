/** Results page: list/tiles/map/trends views over one search response,
 * a facet sidebar, and the histogram timeline with a brushable period.
 *
 * Everything shown is taken verbatim from the search response; clicks
 * only ever rewrite the view state (which re-issues the query).
 */

import { cloudScale, el, fmtClock, fmtDate, svgEl } from "../dom.js";
import type { ResultView, ViewState } from "../state.js";
import type { Hit, SearchResponse, XlingualResponse } from "../types.js";
import { renderCloud } from "./welcome.js";

export interface ResultsHandlers {
  onFacet(facet: string): void;
  onFacetRemove(facet: string): void;
  onBrush(from: string | null, to: string | null): void;
  onView(view: ResultView): void;
  onOpen(hit: Hit): void;
  onPage(page: number): void;
  onQuery(text: string): void;
  /** Map clicks AND the place into the query itself, so the place's own
   * words come back highlighted in the refined snippets. */
  onQueryRefine(term: string): void;
}

const FACET_PREFIX: Record<string, string> = {
  person: "person",
  location: "location",
  organization: "org",
  event: "event",
};

export function renderResults(
  container: HTMLElement,
  state: ViewState,
  data: SearchResponse | XlingualResponse,
  handlers: ResultsHandlers
): void {
  const page = el("div", { class: "results" });

  if ("translated_query" in data) {
    page.append(
      el("div", { class: "xlingual-note" }, [
        el("span", { class: `flag flag-${data.src}`, text: data.src }),
        " → ",
        el("span", { class: `flag flag-${data.tgt}`, text: data.tgt }),
        ` translated query: `,
        el("b", { text: data.translated_query }),
      ])
    );
  }

  const tabs = el("div", { class: "view-tabs" });
  const views: ResultView[] = ["list", "tiles", "map", "trends"];
  for (const view of views) {
    const tab = el("button", {
      class: view === state.view ? "tab active" : "tab",
      text: view,
      "data-view": view,
    });
    tab.addEventListener("click", () => handlers.onView(view));
    tabs.append(tab);
  }
  page.append(tabs);

  page.append(renderActiveFilters(state, handlers));
  page.append(renderHistogram(data, state, handlers));

  const body = el("div", { class: "results-body" });
  const main = el("div", { class: "results-main" });
  const total = el("p", { class: "total", text: `${data.total} matching segments` });
  main.append(total);

  if (data.total === 0) {
    main.append(el("p", { class: "empty-state", text: "Nothing matches this query." }));
  } else if (state.view === "map") {
    main.append(renderMap(data, handlers));
  } else if (state.view === "trends") {
    main.append(renderFacetTrends(data, handlers));
  } else {
    main.append(renderHitList(data.hits, state.view, handlers));
    main.append(renderPager(state, data, handlers));
  }

  body.append(main);
  body.append(renderFacetSidebar(data, handlers));
  page.append(body);
  container.append(page);
}

function renderActiveFilters(state: ViewState, handlers: ResultsHandlers): HTMLElement {
  const bar = el("div", { class: "active-filters" });
  for (const facet of state.facets) {
    const chip = el("span", { class: "chip", text: facet });
    const remove = el("button", { class: "chip-x", text: "×", title: "remove filter" });
    remove.addEventListener("click", () => handlers.onFacetRemove(facet));
    chip.append(remove);
    bar.append(chip);
  }
  if (state.from || state.to) {
    const chip = el("span", {
      class: "chip period-chip",
      text: `${state.from ?? "…"} → ${state.to ?? "…"}`,
    });
    const remove = el("button", { class: "chip-x", text: "×", title: "clear period" });
    remove.addEventListener("click", () => handlers.onBrush(null, null));
    chip.append(remove);
    bar.append(chip);
  }
  return bar;
}

export function renderHitList(
  hits: Hit[],
  view: ResultView,
  handlers: ResultsHandlers
): HTMLElement {
  const list = el("div", { class: view === "tiles" ? "hit-tiles" : "hit-list" });
  for (const hit of hits) {
    const card = el("article", { class: "hit", "data-doc": hit.doc_id, "data-seg": String(hit.seg_index) });
    const header = el("header", {}, [
      el("a", {
        class: "hit-title",
        href: "#",
        text: `${hit.doc_id} · segment ${hit.seg_index + 1}`,
      }),
      el("span", { class: "badge time-badge", text: fmtClock(hit.time_range[0]) }),
      el("span", { class: "hit-date", text: fmtDate(hit.air_date) }),
    ]);
    header.querySelector("a")!.addEventListener("click", (ev) => {
      ev.preventDefault();
      handlers.onOpen(hit);
    });
    card.append(header);
    if (hit.snippet) {
      card.append(renderSnippet(hit.snippet.words, hit.snippet.highlights));
      if (hit.snippet.back_translation) {
        card.append(
          el("p", { class: "back-translation", text: hit.snippet.back_translation })
        );
      }
    }
    card.append(renderMentionStrip(hit));
    list.append(card);
  }
  return list;
}

export function renderSnippet(words: string[], highlights: number[]): HTMLElement {
  const p = el("p", { class: "snippet" });
  const marked = new Set(highlights);
  words.forEach((word, i) => {
    if (i > 0) p.append(" ");
    if (marked.has(i)) {
      p.append(el("mark", { text: word }));
    } else {
      p.append(word);
    }
  });
  return p;
}

/** Pincushion strip: one needle per query-term mention, placed by time code. */
export function renderMentionStrip(hit: Hit): HTMLElement {
  const strip = el("div", { class: "mention-strip", title: "query mentions in this segment" });
  const [start, end] = hit.time_range;
  const span = Math.max(1, end - start);
  for (const term of hit.matched_terms) {
    for (const pos of term.positions) {
      const needle = el("i", {
        class: "mention-needle",
        title: `${term.term} @ ${fmtClock(pos.start_ms)}`,
        "data-term": term.term,
      });
      const frac = Math.min(1, Math.max(0, (pos.start_ms - start) / span));
      needle.style.left = `${(frac * 100).toFixed(2)}%`;
      strip.append(needle);
    }
  }
  return strip;
}

function renderPager(
  state: ViewState,
  data: SearchResponse,
  handlers: ResultsHandlers
): HTMLElement {
  const pager = el("div", { class: "pager" });
  const pages = Math.ceil(data.total / 10);
  if (state.page > 0) {
    const prev = el("button", { class: "page-prev", text: "‹ previous" });
    prev.addEventListener("click", () => handlers.onPage(state.page - 1));
    pager.append(prev);
  }
  pager.append(el("span", { class: "page-no", text: `page ${state.page + 1} / ${Math.max(1, pages)}` }));
  if (state.page + 1 < pages) {
    const next = el("button", { class: "page-next", text: "next ›" });
    next.addEventListener("click", () => handlers.onPage(state.page + 1));
    pager.append(next);
  }
  return pager;
}

function renderFacetSidebar(data: SearchResponse, handlers: ResultsHandlers): HTMLElement {
  const sidebar = el("aside", { class: "facets" });
  for (const [facetType, rows] of Object.entries(data.facets)) {
    if (!rows.length) continue;
    const section = el("section", { class: `facet-group facet-${facetType}` }, [
      el("h3", { text: facetType }),
    ]);
    for (const row of rows.slice(0, 8)) {
      const link = el("a", {
        class: "facet-row",
        href: "#",
        "data-facet": `${FACET_PREFIX[facetType]}:${row.value}`,
      }, [
        el("span", { class: "facet-value", text: row.value }),
        el("span", { class: "facet-count", text: String(row.count) }),
      ]);
      link.addEventListener("click", (ev) => {
        ev.preventDefault();
        handlers.onFacet(`${FACET_PREFIX[facetType]}:${row.value}`);
      });
      section.append(link);
    }
    sidebar.append(section);
  }
  return sidebar;
}

export function renderHistogram(
  data: SearchResponse,
  state: ViewState,
  handlers: ResultsHandlers
): HTMLElement {
  const wrap = el("div", { class: "histogram" });
  if (!data.histogram.length) return wrap;
  const days = data.histogram.map((row) => row.day);
  const max = Math.max(...data.histogram.map((row) => row.count));
  const barWidth = 100 / data.histogram.length;

  const svg = svgEl("svg", { viewBox: "0 0 100 24", preserveAspectRatio: "none", class: "histogram-svg" });
  data.histogram.forEach((row, i) => {
    const height = (row.count / max) * 20;
    const bar = svgEl("rect", {
      x: String(i * barWidth + barWidth * 0.1),
      y: String(22 - height),
      width: String(barWidth * 0.8),
      height: String(height),
      class: "hist-bar",
      "data-day": row.day,
    });
    bar.append(svgEl("title"));
    bar.querySelector("title")!.textContent = `${row.day}: ${row.count}`;
    svg.append(bar);
  });

  // click-drag brush over the bars restricts the period
  let anchor: number | null = null;
  const dayAt = (ev: MouseEvent): number => {
    const rect = (svg as unknown as HTMLElement).getBoundingClientRect();
    const frac = rect.width ? (ev.clientX - rect.left) / rect.width : 0;
    return Math.min(days.length - 1, Math.max(0, Math.floor(frac * days.length)));
  };
  svg.addEventListener("mousedown", (ev) => {
    anchor = dayAt(ev as MouseEvent);
  });
  svg.addEventListener("mouseup", (ev) => {
    if (anchor === null) return;
    const release = dayAt(ev as MouseEvent);
    const [lo, hi] = anchor <= release ? [anchor, release] : [release, anchor];
    anchor = null;
    handlers.onBrush(days[lo], days[hi]);
  });

  wrap.append(svg);
  wrap.append(
    el("div", { class: "hist-range" }, [
      el("span", { text: days[0] }),
      el("span", { text: days[days.length - 1] }),
    ])
  );
  return wrap;
}

/** Equirectangular scatter of the located facets; click refines on a place. */
export function renderMap(data: SearchResponse, handlers: ResultsHandlers): HTMLElement {
  const wrap = el("div", { class: "map-view" });
  if (!data.geo.length) {
    wrap.append(el("p", { class: "empty-state", text: "No located places in these results." }));
    return wrap;
  }
  const svg = svgEl("svg", { viewBox: "0 0 360 180", class: "map-svg" });
  svg.append(svgEl("rect", { x: "0", y: "0", width: "360", height: "180", class: "map-sea" }));
  for (let lon = -150; lon <= 150; lon += 30) {
    svg.append(svgEl("line", { x1: String(lon + 180), y1: "0", x2: String(lon + 180), y2: "180", class: "graticule" }));
  }
  for (let lat = -60; lat <= 60; lat += 30) {
    svg.append(svgEl("line", { x1: "0", y1: String(90 - lat), x2: "360", y2: String(90 - lat), class: "graticule" }));
  }
  const maxCount = Math.max(...data.geo.map((g) => g.count));
  for (const place of data.geo) {
    const x = place.lon + 180;
    const y = 90 - place.lat;
    const r = 3 + (place.count / maxCount) * 9;
    const dot = svgEl("circle", {
      cx: String(x),
      cy: String(y),
      r: String(r),
      class: "map-dot",
      "data-place": place.value,
    });
    dot.append(svgEl("title"));
    dot.querySelector("title")!.textContent = `${place.value} (${place.count})`;
    dot.addEventListener("click", () => handlers.onQueryRefine(place.value));
    svg.append(dot);
    const label = svgEl("text", {
      x: String(x + r + 1),
      y: String(y + 2),
      class: "map-label",
    });
    label.textContent = place.value;
    svg.append(label);
  }
  wrap.append(svg);
  return wrap;
}

function renderFacetTrends(data: SearchResponse, handlers: ResultsHandlers): HTMLElement {
  const wrap = el("div", { class: "trends-view" });
  for (const [facetType, rows] of Object.entries(data.facets)) {
    if (!rows.length) continue;
    wrap.append(el("h3", { text: facetType }));
    wrap.append(renderCloud(rows, (value) => handlers.onQuery(value)));
  }
  return wrap;
}
