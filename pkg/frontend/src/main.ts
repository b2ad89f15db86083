/** Application controller: URL hash <-> ViewState <-> rendered view.
 *
 * Every state change rewrites the hash; the hash listener re-renders, so
 * back/forward and deep links come for free. In-flight responses carry a
 * revision number and stale ones are dropped (last write wins).
 */

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import {
  decodeState,
  defaultState,
  encodeState,
  isXlingual,
  searchParams,
  ViewState,
  withFacet,
  withoutFacet,
  withPeriod,
} from "./state.js";
import type { Hit, SearchResponse } from "./types.js";
import { renderPlayer } from "./views/player.js";
import { renderResults } from "./views/results.js";
import { renderWelcome } from "./views/welcome.js";

const LANGS = ["en", "fr", "es", "zh", "nl", "ru", "ar"];

export class App {
  readonly api: ApiClient;
  private root: HTMLElement;
  private revision = 0;
  private trendDays = 7;
  private trendType = "event";
  private lastHits: Hit[] = [];
  state: ViewState = defaultState();

  constructor(root: HTMLElement, api: ApiClient) {
    this.root = root;
    this.api = api;
    window.addEventListener("hashchange", () => {
      void this.renderFromHash();
    });
  }

  start(): Promise<void> {
    return this.renderFromHash();
  }

  /** Push a new state into the URL; rendering follows from the hash change. */
  navigate(state: ViewState): void {
    this.state = state;
    const encoded = encodeState(state);
    if (window.location.hash.replace(/^#/, "") === encoded) {
      void this.render();
    } else {
      window.location.hash = encoded;
    }
  }

  async renderFromHash(): Promise<void> {
    this.state = decodeState(window.location.hash);
    await this.render();
  }

  private async render(): Promise<void> {
    const revision = ++this.revision;
    const state = this.state;
    const container = el("div", { class: "page" });
    try {
      if (state.doc !== null) {
        await this.renderPlayerPage(container, state);
      } else if (state.query) {
        await this.renderResultsPage(container, state);
      } else {
        await this.renderWelcomePage(container);
      }
    } catch (err) {
      container.append(this.renderError(err));
    }
    if (revision !== this.revision) return; // a newer render superseded this one
    clear(this.root);
    this.root.append(this.renderChrome(state));
    this.root.append(container);
  }

  private async renderWelcomePage(container: HTMLElement): Promise<void> {
    const to = new Date();
    const from = new Date(to.getTime() - this.trendDays * 86_400_000);
    const trends = await this.api.trends(
      from.toISOString().slice(0, 10),
      to.toISOString().slice(0, 10),
      this.trendType
    );
    renderWelcome(container, trends, this.trendDays, {
      onQuery: (text) => this.navigate({ ...defaultState(), query: text, lang: this.state.lang }),
      onPeriod: (days) => {
        this.trendDays = days;
        void this.render();
      },
      onTypeChange: (facetType) => {
        this.trendType = facetType;
        void this.render();
      },
    });
  }

  private async renderResultsPage(container: HTMLElement, state: ViewState): Promise<void> {
    const params = searchParams(state);
    const data: SearchResponse = isXlingual(state)
      ? await this.api.searchXlingual(params)
      : await this.api.search(params);
    this.lastHits = data.hits;
    renderResults(container, state, data, {
      onFacet: (facet) => this.navigate(withFacet(state, facet)),
      onFacetRemove: (facet) => this.navigate(withoutFacet(state, facet)),
      onBrush: (from, to) => this.navigate(withPeriod(state, from, to)),
      onView: (view) => this.navigate({ ...state, view }),
      onOpen: (hit) => this.navigate({ ...state, doc: hit.doc_id, seg: hit.seg_index }),
      onPage: (page) => this.navigate({ ...state, page }),
      onQuery: (text) => this.navigate({ ...state, query: text, facets: [], page: 0 }),
      onQueryRefine: (term) =>
        this.navigate({
          ...state,
          query: `${state.query} "${term.toLowerCase()}"`.trim(),
          view: "list", // show the refined contextual snippets
          page: 0,
        }),
    });
  }

  private async renderPlayerPage(container: HTMLElement, state: ViewState): Promise<void> {
    const doc = await this.api.doc(state.doc!);
    let hits = this.lastHits;
    if (!hits.length && state.query) {
      const params = searchParams({ ...state, doc: null, seg: null });
      const data = isXlingual(state)
        ? await this.api.searchXlingual(params)
        : await this.api.search(params);
      hits = data.hits;
      this.lastHits = hits;
    }
    renderPlayer(container, doc, state.seg ?? 0, hits, {
      onSegment: (segIndex) => this.navigate({ ...state, seg: segIndex }),
      onBack: () => this.navigate({ ...state, doc: null, seg: null }),
    });
  }

  private renderChrome(state: ViewState): HTMLElement {
    const bar = el("header", { class: "topbar" });
    const home = el("a", { class: "brand", href: "#", text: "segment news search" });
    home.addEventListener("click", (ev) => {
      ev.preventDefault();
      this.navigate(defaultState());
    });
    bar.append(home);
    bar.append(this.renderSearchBox(state));
    bar.append(this.renderLanguageControls(state));
    return bar;
  }

  private renderSearchBox(state: ViewState): HTMLElement {
    const wrap = el("div", { class: "searchbox" });
    const input = el("input", {
      type: "search",
      placeholder: "search news segments…",
      value: state.query,
      class: "search-input",
    });
    const dropdown = el("ul", { class: "autocomplete hidden" });

    let completionRevision = 0;
    input.addEventListener("input", () => {
      const prefix = lastWord(input.value);
      const revision = ++completionRevision;
      if (prefix.length < 2) {
        dropdown.classList.add("hidden");
        return;
      }
      void this.api.suggest(prefix).then((resp) => {
        if (revision !== completionRevision) return;
        dropdown.textContent = "";
        for (const suggestion of resp.suggestions) {
          const item = el("li", { class: "suggestion", text: suggestion.value });
          item.addEventListener("mousedown", () => {
            input.value = replaceLastWord(input.value, `"${suggestion.value}"`);
            dropdown.classList.add("hidden");
            submit();
          });
          dropdown.append(item);
        }
        dropdown.classList.toggle("hidden", resp.suggestions.length === 0);
      });
    });

    const submit = () => {
      dropdown.classList.add("hidden");
      this.navigate({
        ...this.state,
        query: input.value.trim(),
        facets: [],
        page: 0,
        doc: null,
        seg: null,
      });
    };
    input.addEventListener("keydown", (ev) => {
      if ((ev as KeyboardEvent).key === "Enter") submit();
    });
    const button = el("button", { class: "search-go", text: "search" });
    button.addEventListener("click", submit);

    wrap.append(input, button, dropdown);
    return wrap;
  }

  private renderLanguageControls(state: ViewState): HTMLElement {
    const wrap = el("div", { class: "lang-controls" });
    const docLang = el("select", { class: "lang-select", title: "broadcast language" });
    docLang.append(el("option", { value: "", text: "all languages" }));
    for (const code of LANGS) {
      const option = el("option", { value: code, text: code });
      if (state.lang === code) option.setAttribute("selected", "selected");
      docLang.append(option);
    }
    docLang.addEventListener("change", () => {
      this.navigate({ ...this.state, lang: docLang.value || null, src: null, tgt: null });
    });

    const xlingual = el("select", { class: "xlingual-select", title: "search across languages" });
    xlingual.append(el("option", { value: "", text: "same language" }));
    for (const tgt of LANGS) {
      const src = state.lang ?? "en";
      if (tgt === src) continue;
      const option = el("option", { value: tgt, text: `${src} → ${tgt}` });
      if (state.tgt === tgt && isXlingual(state)) option.setAttribute("selected", "selected");
      xlingual.append(option);
    }
    xlingual.addEventListener("change", () => {
      const src = this.state.lang ?? "en";
      this.navigate(
        xlingual.value
          ? { ...this.state, src, tgt: xlingual.value, page: 0 }
          : { ...this.state, src: null, tgt: null, page: 0 }
      );
    });

    wrap.append(docLang, xlingual);
    return wrap;
  }

  private renderError(err: unknown): HTMLElement {
    if (err instanceof ApiError && err.status === 400 && err.offset !== undefined) {
      return el("div", { class: "error banner" }, [
        el("p", { text: `query error at position ${err.offset}: ${err.message}` }),
      ]);
    }
    const box = el("div", { class: "error banner" }, [
      el("p", { text: `service error: ${err instanceof Error ? err.message : String(err)}` }),
    ]);
    const retry = el("button", { class: "retry", text: "retry" });
    retry.addEventListener("click", () => void this.render());
    box.append(retry);
    return box;
  }
}

function lastWord(text: string): string {
  const parts = text.split(/\s+/);
  return parts[parts.length - 1] ?? "";
}

function replaceLastWord(text: string, replacement: string): string {
  const idx = text.search(/\S+$/);
  return idx < 0 ? replacement : text.slice(0, idx) + replacement;
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const app = new App(root, new ApiClient(""));
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
