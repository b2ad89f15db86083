import { describe, expect, it } from "vitest";

import {
  decodeState,
  defaultState,
  encodeState,
  normalize,
  searchParams,
  ViewState,
  withFacet,
  withoutFacet,
} from "../src/state.js";

/** Twenty scripted view states covering every field combination the UI uses. */
const SCRIPTED: ViewState[] = [
  defaultState(),
  { ...defaultState(), query: "afghanistan" },
  { ...defaultState(), query: "ron paul barack obama", view: "tiles" },
  { ...defaultState(), query: "afghanistan", view: "map" },
  { ...defaultState(), query: "halloween", view: "trends" },
  { ...defaultState(), query: "storm", from: "2010-10-01", to: "2010-10-31" },
  { ...defaultState(), query: "obama", facets: ["location:Iraq"] },
  { ...defaultState(), query: "obama", facets: ["location:Iraq", "person:Barack Obama"] },
  { ...defaultState(), query: '"tony curtis"' },
  { ...defaultState(), query: "ramadan", lang: "en" },
  { ...defaultState(), query: "أفغانستان", lang: "ar" },
  { ...defaultState(), query: "afghanistan", src: "en", tgt: "ar" },
  { ...defaultState(), query: "war", page: 3 },
  { ...defaultState(), query: "tony", doc: "cbs-evening", seg: 2 },
  { ...defaultState(), doc: "cbs-evening", seg: 0 },
  { ...defaultState(), query: "a OR b", facets: ["event:Halloween"], view: "map", page: 1 },
  { ...defaultState(), query: "storm warning", from: "2010-08-01", to: "2010-08-31", lang: "en" },
  { ...defaultState(), query: "x", facets: ["org:CBS"], src: "en", tgt: "fr" },
  { ...defaultState(), query: "date:[2010-08-01 TO 2010-08-31] storm" },
  { ...defaultState(), query: "flood -storm", view: "tiles", page: 2, facets: ["location:New Jersey"] },
];

describe("view-state URL round-trip", () => {
  it("encodes and decodes all twenty scripted states identically", () => {
    expect(SCRIPTED).toHaveLength(20);
    for (const state of SCRIPTED) {
      const again = decodeState(encodeState(state));
      expect(again).toEqual(normalize(state));
    }
  });

  it("decoding is idempotent", () => {
    for (const state of SCRIPTED) {
      const once = decodeState(encodeState(state));
      expect(decodeState(encodeState(once))).toEqual(once);
    }
  });

  it("hash prefix is tolerated", () => {
    const state = { ...defaultState(), query: "storm" };
    expect(decodeState("#" + encodeState(state))).toEqual(state);
  });
});

describe("state invariants", () => {
  it("period is reordered so from <= to", () => {
    const state = normalize({ ...defaultState(), from: "2010-12-01", to: "2010-01-01" });
    expect(state.from).toBe("2010-01-01");
    expect(state.to).toBe("2010-12-01");
  });

  it("facet filters mirror into the search request", () => {
    const state = withFacet(
      { ...defaultState(), query: "afghanistan" },
      "location:Iraq"
    );
    const params = searchParams(state);
    expect(params.getAll("facets")).toEqual(["location:Iraq"]);
    expect(params.get("q")).toBe("afghanistan");
  });

  it("adding a facet twice keeps one copy; removing restores the original", () => {
    const base = { ...defaultState(), query: "x" };
    const once = withFacet(base, "location:Iraq");
    const twice = withFacet(once, "location:Iraq");
    expect(twice.facets).toEqual(["location:Iraq"]);
    expect(withoutFacet(twice, "location:Iraq").facets).toEqual([]);
  });

  it("cross-lingual states request the xlingual route parameters", () => {
    const state = { ...defaultState(), query: "afghanistan", src: "en", tgt: "ar" };
    const params = searchParams(state);
    expect(params.get("src")).toBe("en");
    expect(params.get("tgt")).toBe("ar");
    expect(params.get("back")).toBe("1");
  });

  it("pagination maps to offset", () => {
    const params = searchParams({ ...defaultState(), query: "x", page: 2 });
    expect(params.get("offset")).toBe("20");
    expect(params.get("limit")).toBe("10");
  });
});
