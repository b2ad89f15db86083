/** End-to-end walkthroughs of the three flagship scenarios, driving the
 * real App against responses recorded from the live service. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/main.js";
import { decodeState, defaultState, encodeState, ViewState } from "../src/state.js";
import { fixtureFetch, flush } from "./helpers.js";

let root: HTMLElement;
let app: App;

function newApp(): App {
  root = document.createElement("div");
  document.body.append(root);
  return new App(root, new ApiClient("", fixtureFetch()));
}

async function open(state: ViewState): Promise<void> {
  window.location.hash = encodeState(state);
  await app.renderFromHash();
  await flush();
}

beforeEach(() => {
  window.location.hash = "";
  app = newApp();
});

afterEach(() => {
  document.body.textContent = "";
  vi.useRealTimers();
});

describe("welcome page trends", () => {
  it("August 2010 renders Ramadan as the dominant event", async () => {
    vi.useFakeTimers();
    vi.setSystemTime(new Date("2010-08-31T12:00:00Z"));
    app = newApp();
    (app as unknown as { trendDays: number }).trendDays = 31;
    await app.renderFromHash();
    await vi.advanceTimersByTimeAsync(20);

    const words = [...root.querySelectorAll<HTMLElement>(".cloud-word")];
    expect(words.length).toBeGreaterThan(0);
    const largest = words.reduce((a, b) =>
      parseFloat(a.style.fontSize) >= parseFloat(b.style.fontSize) ? a : b
    );
    expect(largest.textContent).toBe("Ramadan");
    expect(root.querySelector(".pie-slice[data-value='Ramadan']")).toBeTruthy();
  });

  it("late October renders Halloween first and clicking it runs the query", async () => {
    vi.useFakeTimers();
    vi.setSystemTime(new Date("2010-10-31T12:00:00Z"));
    app = newApp();
    (app as unknown as { trendDays: number }).trendDays = 7;
    await app.renderFromHash();
    await vi.advanceTimersByTimeAsync(20);

    const words = [...root.querySelectorAll<HTMLElement>(".cloud-word")];
    const largest = words.reduce((a, b) =>
      parseFloat(a.style.fontSize) >= parseFloat(b.style.fontSize) ? a : b
    );
    expect(largest.textContent).toBe("Halloween");

    largest.click();
    await vi.advanceTimersByTimeAsync(30);
    expect(decodeState(window.location.hash).query).toBe("Halloween");
    expect(root.querySelector(".total")!.textContent).toMatch(/^3 matching/);
    expect(root.querySelectorAll(".hit").length).toBe(3);
  });
});

describe("map refinement", () => {
  it("clicking Iraq on the Afghanistan map highlights both words", async () => {
    await open({ ...defaultState(), query: "afghanistan", view: "map" });

    const dot = root.querySelector<SVGElement>(".map-dot[data-place='Iraq']");
    expect(dot).toBeTruthy();
    dot!.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush(30);

    const state = decodeState(window.location.hash);
    expect(state.query).toBe('afghanistan "iraq"');

    await app.renderFromHash(); // belt and braces: render the refined state
    await flush();
    const marks = [...root.querySelectorAll("mark")].map((m) => m.textContent);
    expect(marks.some((m) => /afghanistan/i.test(m ?? ""))).toBe(true);
    expect(marks.some((m) => /iraq/i.test(m ?? ""))).toBe(true);
  });

  it("sidebar facet refinement adds a removable filter chip", async () => {
    await open({ ...defaultState(), query: "afghanistan" });
    const before = root.querySelector(".total")!.textContent;

    const row = root.querySelector<HTMLElement>(".facet-row[data-facet='location:Iraq']");
    expect(row).toBeTruthy();
    row!.click();
    await flush(30);
    await app.renderFromHash();
    await flush();
    expect(decodeState(window.location.hash).facets).toEqual(["location:Iraq"]);
    expect(root.querySelector(".chip")).toBeTruthy();

    const remove = root.querySelector<HTMLElement>(".chip-x");
    remove!.click();
    await flush(30);
    await app.renderFromHash();
    await flush();
    expect(decodeState(window.location.hash).facets).toEqual([]);
    expect(root.querySelector(".total")!.textContent).toBe(before);
  });
});

describe("player page", () => {
  const playerState: ViewState = {
    ...defaultState(),
    query: '"tony curtis"',
    doc: "cbs-evening",
    seg: 2,
  };

  it("opens the matched last segment with markers and keyword tooltips", async () => {
    await open(playerState);

    const bars = [...root.querySelectorAll<HTMLElement>(".segment-bar")];
    expect(bars.length).toBe(3);
    expect(bars[2].classList.contains("active")).toBe(true);
    expect(bars[2].classList.contains("matched")).toBe(true);
    expect(bars[0].classList.contains("matched")).toBe(false);

    // hovering the first segment reveals its own keywords (storm story)
    expect(bars[0].querySelector(".keyword-tooltip")!.textContent).toContain("storm");

    // entities of the open segment on the right panel
    const names = [...root.querySelectorAll(".entity-name")].map((n) => n.textContent);
    expect(names).toContain("Tony Curtis");
    expect(names).toContain("Jamie Lee Curtis");

    // the media element starts at the segment, markers sit on the timeline
    const media = root.querySelector<HTMLMediaElement>("video, audio")!;
    const seg2Start = 0; // filled below from the bar data
    expect(media).toBeTruthy();
    const markers = [...root.querySelectorAll<HTMLElement>(".mention-marker")];
    expect(markers.length).toBeGreaterThan(0);
    expect(markers.every((m) => m.dataset.term === "tony curtis")).toBe(true);
    void seg2Start;
  });

  it("marker click shows the service's 30-word snippet", async () => {
    await open(playerState);
    const marker = root.querySelector<HTMLElement>(".mention-marker")!;
    marker.click();
    await flush();
    const popup = root.querySelector(".marker-snippet")!;
    expect(popup.classList.contains("hidden")).toBe(false);
    const words = popup.querySelectorAll(".snippet mark, .snippet");
    expect(words.length).toBeGreaterThan(0);
    expect(popup.textContent!.split(/\s+/).filter(Boolean).length).toBeLessThanOrEqual(31);
  });

  it("clicking another segment seeks and re-roots the state", async () => {
    await open(playerState);
    const media = root.querySelector<HTMLMediaElement>("video, audio")!;
    const firstBar = root.querySelector<HTMLElement>(".segment-bar[data-seg='0']")!;
    firstBar.click();
    await flush(30);
    expect(decodeState(window.location.hash).seg).toBe(0);
    expect(media.currentTime).toBe(0);
  });
});

describe("deep links", () => {
  const queries = ["afghanistan", "storm", "halloween", "ramadan", '"tony curtis"'];
  const views = ["list", "tiles", "map", "trends"] as const;
  const scripted: ViewState[] = queries.flatMap((query) =>
    views.map((view) => ({ ...defaultState(), query, view }))
  );

  it("reloading any of 20 scripted states reproduces hit counts and filters", async () => {
    expect(scripted.length).toBe(20);
    for (const state of scripted) {
      await open(state);
      const total = root.querySelector(".total")!.textContent;
      const chips = root.querySelectorAll(".chip").length;
      const activeTab = root.querySelector(".tab.active")!.textContent;

      // fresh app instance, same URL: the "reload"
      document.body.textContent = "";
      app = newApp();
      await open(decodeState(encodeState(state)));
      expect(root.querySelector(".total")!.textContent).toBe(total);
      expect(root.querySelectorAll(".chip").length).toBe(chips);
      expect(root.querySelector(".tab.active")!.textContent).toBe(activeTab);
    }
  });

  it("xlingual deep link renders translated results", async () => {
    await open({ ...defaultState(), query: "afghanistan", src: "en", tgt: "ar" });
    expect(root.querySelector(".xlingual-note")!.textContent).toContain("أفغانستان");
    expect(root.querySelectorAll(".hit").length).toBeGreaterThan(0);
    expect(root.querySelector(".back-translation")).toBeTruthy();
  });
});
