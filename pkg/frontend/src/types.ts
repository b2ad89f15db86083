/** Response payload types, mirror of the server's published JSON Schemas. */

export interface FacetRow {
  value: string;
  count: number;
}

export interface GeoRow {
  value: string;
  lat: number;
  lon: number;
  count: number;
}

export interface HistogramRow {
  day: string; // YYYY-MM-DD
  count: number;
}

export interface Snippet {
  text: string;
  words: string[];
  highlights: number[];
  window_start: number;
  start_ms: number;
  back_translation?: string;
}

export interface MatchedTerm {
  term: string;
  positions: { position: number; start_ms: number }[];
}

export interface Hit {
  doc_id: string;
  seg_index: number;
  score: number;
  air_date: string;
  media_url: string;
  time_range: [number, number];
  matched_terms: MatchedTerm[];
  snippet: Snippet | null;
}

export interface Facets {
  person: FacetRow[];
  location: FacetRow[];
  organization: FacetRow[];
  event: FacetRow[];
}

export interface SearchResponse {
  total: number;
  hits: Hit[];
  facets: Facets;
  geo: GeoRow[];
  histogram: HistogramRow[];
}

export interface XlingualResponse extends SearchResponse {
  query: string;
  translated_query: string;
  src: string;
  tgt: string;
}

export interface TrendsResponse {
  type: string;
  from: string;
  to: string;
  trends: FacetRow[];
}

export interface SuggestResponse {
  prefix: string;
  suggestions: FacetRow[];
}

export interface EntityPayload {
  canonical: string;
  type: "person" | "location" | "organization" | "event";
  surface: string;
  start_ms: number;
  lat: number | null;
  lon: number | null;
}

export interface SegmentPayload {
  doc_id: string;
  seg_index: number;
  air_date: string;
  source: string;
  language: string;
  time_range: [number, number];
  word_count: number;
  keywords: { lemma: string; score: number }[];
  entities: EntityPayload[];
  words?: { surface: string; start_ms: number }[];
}

export interface DocPayload {
  doc_id: string;
  media_url: string;
  air_date: string;
  source: string;
  language: string;
  segments: SegmentPayload[];
}
