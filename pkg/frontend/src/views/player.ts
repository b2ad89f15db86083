/** Player page: the broadcast with its story segments.
 *
 * The media element starts at the opened segment; a bar strip shows all
 * segments with a progression line, hovering a bar reveals its keywords,
 * the side panel lists the current segment's entities, and query-mention
 * markers open the API's 30-word snippets.
 */

import { el, fmtClock, fmtDate } from "../dom.js";
import type { DocPayload, Hit, SegmentPayload } from "../types.js";
import { renderSnippet } from "./results.js";

export interface PlayerHandlers {
  onSegment(segIndex: number): void;
  onBack(): void;
}

export function renderPlayer(
  container: HTMLElement,
  doc: DocPayload,
  segIndex: number,
  queryHits: Hit[],
  handlers: PlayerHandlers
): void {
  const page = el("div", { class: "player" });
  const back = el("button", { class: "back", text: "‹ results" });
  back.addEventListener("click", () => handlers.onBack());
  page.append(back);
  page.append(
    el("h2", {}, [
      el("span", { text: doc.doc_id }),
      el("span", { class: "hit-date", text: ` · ${doc.source} · ${fmtDate(doc.air_date)}` }),
    ])
  );

  const current = doc.segments[segIndex] ?? doc.segments[0];
  const docEnd = doc.segments.length
    ? doc.segments[doc.segments.length - 1].time_range[1]
    : 0;

  const layout = el("div", { class: "player-layout" });
  const left = el("div", { class: "player-main" });

  const media = createMedia(doc, current);
  left.append(media.element);
  left.append(renderSegmentBars(doc, segIndex, docEnd, queryHits, media, handlers));

  const markers = renderMentionMarkers(current, queryHits, docEnd, media);
  if (markers) left.append(markers);

  layout.append(left);
  layout.append(renderEntityPanel(current));
  page.append(layout);
  container.append(page);
}

interface MediaHandle {
  element: HTMLElement;
  seek(ms: number): void;
}

function createMedia(doc: DocPayload, current: SegmentPayload): MediaHandle {
  if (!doc.media_url) {
    // transcript-only mode keeps the same navigation without playback
    const placeholder = el("div", {
      class: "media media-missing",
      text: "media unavailable — transcript-only mode",
    });
    return { element: placeholder, seek: () => undefined };
  }
  const isVideo = /\.(mp4|webm|mov)(\?|$)/.test(doc.media_url);
  const media = document.createElement(isVideo ? "video" : "audio");
  media.className = "media";
  media.setAttribute("controls", "controls");
  media.src = doc.media_url;
  media.currentTime = current.time_range[0] / 1000;
  return {
    element: media,
    seek: (ms) => {
      media.currentTime = ms / 1000;
    },
  };
}

function renderSegmentBars(
  doc: DocPayload,
  activeIndex: number,
  docEnd: number,
  queryHits: Hit[],
  media: MediaHandle,
  handlers: PlayerHandlers
): HTMLElement {
  const strip = el("div", { class: "segment-strip" });
  const matchedSegments = new Set(
    queryHits.filter((h) => h.doc_id === doc.doc_id).map((h) => h.seg_index)
  );
  const span = Math.max(1, docEnd);
  for (const seg of doc.segments) {
    const bar = el("div", {
      class: [
        "segment-bar",
        seg.seg_index === activeIndex ? "active" : "",
        matchedSegments.has(seg.seg_index) ? "matched" : "",
      ].join(" ").trim(),
      "data-seg": String(seg.seg_index),
      title: seg.keywords.map((k) => k.lemma).join(", ") || `segment ${seg.seg_index + 1}`,
    });
    bar.style.left = `${((seg.time_range[0] / span) * 100).toFixed(2)}%`;
    bar.style.width = `${(((seg.time_range[1] - seg.time_range[0]) / span) * 100).toFixed(2)}%`;

    const tooltip = el("span", { class: "keyword-tooltip" });
    for (const kw of seg.keywords) {
      tooltip.append(el("b", { class: "keyword", text: kw.lemma }));
    }
    bar.append(tooltip);

    bar.addEventListener("click", () => {
      media.seek(seg.time_range[0]);
      handlers.onSegment(seg.seg_index);
    });
    strip.append(bar);
  }
  const progression = el("div", { class: "progression-line" });
  strip.append(progression);
  return strip;
}

function renderMentionMarkers(
  current: SegmentPayload,
  queryHits: Hit[],
  docEnd: number,
  media: MediaHandle
): HTMLElement | null {
  const hit = queryHits.find(
    (h) => h.doc_id === current.doc_id && h.seg_index === current.seg_index
  );
  if (!hit || !hit.matched_terms.length) return null;
  const lane = el("div", { class: "marker-lane" });
  const span = Math.max(1, docEnd);
  const popup = el("div", { class: "marker-snippet hidden" });
  for (const term of hit.matched_terms) {
    for (const pos of term.positions) {
      const marker = el("button", {
        class: "mention-marker",
        title: `${term.term} @ ${fmtClock(pos.start_ms)}`,
        "data-term": term.term,
      });
      marker.style.left = `${((pos.start_ms / span) * 100).toFixed(2)}%`;
      marker.addEventListener("click", () => {
        media.seek(pos.start_ms);
        popup.textContent = "";
        if (hit.snippet) {
          popup.append(renderSnippet(hit.snippet.words, hit.snippet.highlights));
        }
        popup.classList.remove("hidden");
      });
      lane.append(marker);
    }
  }
  lane.append(popup);
  return lane;
}

function renderEntityPanel(seg: SegmentPayload): HTMLElement {
  const panel = el("aside", { class: "entity-panel" }, [
    el("h3", { text: `segment ${seg.seg_index + 1}` }),
  ]);
  const keywords = el("p", { class: "segment-keywords" });
  for (const kw of seg.keywords) {
    keywords.append(el("b", { class: "keyword", text: kw.lemma }));
  }
  panel.append(keywords);
  const list = el("ul", { class: "entity-list" });
  for (const entity of seg.entities) {
    list.append(
      el("li", { class: `entity entity-${entity.type}` }, [
        el("span", { class: "entity-name", text: entity.canonical }),
        el("span", { class: "entity-type", text: entity.type }),
      ])
    );
  }
  if (!seg.entities.length) {
    list.append(el("li", { class: "entity-none", text: "no named entities" }));
  }
  panel.append(list);
  return panel;
}
