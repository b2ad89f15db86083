/** Typed client for the search service.
 *
 * The UI computes nothing itself: facets, trends, histograms, and
 * snippets all arrive from these endpoints. Injectable fetch keeps the
 * client testable against recorded responses.
 */

import type {
  DocPayload,
  SearchResponse,
  SegmentPayload,
  SuggestResponse,
  TrendsResponse,
  XlingualResponse,
} from "./types.js";

export type FetchLike = (url: string) => Promise<Response>;

export class ApiError extends Error {
  status: number;
  offset?: number;

  constructor(status: number, message: string, offset?: number) {
    super(message);
    this.status = status;
    this.offset = offset;
  }
}

export class ApiClient {
  private baseUrl: string;
  private fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = (url) => fetch(url)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async getJson<T>(path: string, params?: URLSearchParams): Promise<T> {
    const qs = params ? `?${params.toString()}` : "";
    const resp = await this.fetchFn(`${this.baseUrl}${path}${qs}`);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`, body.offset);
    }
    return body as T;
  }

  search(params: URLSearchParams): Promise<SearchResponse> {
    return this.getJson<SearchResponse>("/search", params);
  }

  searchXlingual(params: URLSearchParams): Promise<XlingualResponse> {
    return this.getJson<XlingualResponse>("/search/xlingual", params);
  }

  trends(from: string, to: string, type: string, n = 20): Promise<TrendsResponse> {
    const params = new URLSearchParams({ from, to, type, n: String(n) });
    return this.getJson<TrendsResponse>("/trends", params);
  }

  suggest(prefix: string, n = 8): Promise<SuggestResponse> {
    const params = new URLSearchParams({ prefix, n: String(n) });
    return this.getJson<SuggestResponse>("/suggest", params);
  }

  doc(docId: string): Promise<DocPayload> {
    return this.getJson<DocPayload>(`/doc/${encodeURIComponent(docId)}`);
  }

  segment(docId: string, segIndex: number): Promise<SegmentPayload> {
    return this.getJson<SegmentPayload>(
      `/doc/${encodeURIComponent(docId)}/seg/${segIndex}`
    );
  }
}
