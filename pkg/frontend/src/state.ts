/** View state and its URL encoding.
 *
 * Every view the app can show is a pure function of a ViewState, and the
 * full state round-trips through the location hash, so any URL reproduces
 * the same view (deep links, reload, back/forward).
 */

export type ResultView = "list" | "tiles" | "map" | "trends";

export interface ViewState {
  query: string;
  lang: string | null;
  view: ResultView;
  from: string | null; // YYYY-MM-DD, inclusive
  to: string | null;
  facets: string[]; // "type:Canonical" refinements, mirrored into /search
  page: number;
  doc: string | null; // player page document
  seg: number | null;
  src: string | null; // cross-lingual pair; null means same-language search
  tgt: string | null;
}

export const PAGE_SIZE = 10;

export function defaultState(): ViewState {
  return {
    query: "",
    lang: null,
    view: "list",
    from: null,
    to: null,
    facets: [],
    page: 0,
    doc: null,
    seg: null,
    src: null,
    tgt: null,
  };
}

/** Clamp invariants: a period must satisfy from <= to. */
export function normalize(state: ViewState): ViewState {
  const out = { ...state, facets: [...state.facets] };
  if (out.from && out.to && out.from > out.to) {
    const tmp = out.from;
    out.from = out.to;
    out.to = tmp;
  }
  if (out.page < 0) out.page = 0;
  return out;
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  const s = normalize(state);
  if (s.query) params.set("q", s.query);
  if (s.lang) params.set("lang", s.lang);
  if (s.view !== "list") params.set("view", s.view);
  if (s.from) params.set("from", s.from);
  if (s.to) params.set("to", s.to);
  for (const facet of s.facets) params.append("facet", facet);
  if (s.page) params.set("page", String(s.page));
  if (s.doc !== null) params.set("doc", s.doc);
  if (s.seg !== null) params.set("seg", String(s.seg));
  if (s.src) params.set("src", s.src);
  if (s.tgt) params.set("tgt", s.tgt);
  return params.toString();
}

export function decodeState(encoded: string): ViewState {
  const params = new URLSearchParams(encoded.replace(/^#/, ""));
  const state = defaultState();
  state.query = params.get("q") ?? "";
  state.lang = params.get("lang");
  const view = params.get("view");
  if (view === "tiles" || view === "map" || view === "trends") state.view = view;
  state.from = params.get("from");
  state.to = params.get("to");
  state.facets = params.getAll("facet");
  state.page = Number(params.get("page") ?? "0") || 0;
  state.doc = params.get("doc");
  const seg = params.get("seg");
  state.seg = seg === null ? null : Number(seg);
  state.src = params.get("src");
  state.tgt = params.get("tgt");
  return normalize(state);
}

/** The /search (or /search/xlingual) request a state stands for.
 *
 * Facet refinements always mirror into the request, which is what makes
 * facet chips, the map, and the URL agree with the result list.
 */
export function searchParams(state: ViewState): URLSearchParams {
  const s = normalize(state);
  const params = new URLSearchParams();
  params.set("q", s.query);
  if (s.src && s.tgt && s.src !== s.tgt) {
    params.set("src", s.src);
    params.set("tgt", s.tgt);
    params.set("back", "1");
  } else if (s.lang) {
    params.set("lang", s.lang);
  }
  if (s.from) params.set("from", s.from);
  if (s.to) params.set("to", s.to);
  for (const facet of s.facets) params.append("facets", facet);
  if (s.page) params.set("offset", String(s.page * PAGE_SIZE));
  params.set("limit", String(PAGE_SIZE));
  return params;
}

export function isXlingual(state: ViewState): boolean {
  return Boolean(state.src && state.tgt && state.src !== state.tgt);
}

export function withFacet(state: ViewState, facet: string): ViewState {
  if (state.facets.includes(facet)) return state;
  return normalize({ ...state, facets: [...state.facets, facet], page: 0 });
}

export function withoutFacet(state: ViewState, facet: string): ViewState {
  return normalize({
    ...state,
    facets: state.facets.filter((f) => f !== facet),
    page: 0,
  });
}

export function withPeriod(
  state: ViewState,
  from: string | null,
  to: string | null
): ViewState {
  return normalize({ ...state, from, to, page: 0 });
}
