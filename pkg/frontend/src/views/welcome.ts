/** Welcome page: what is in the news right now, before any query.
 *
 * Top entities for a selectable period render as a tag cloud and a pie
 * chart; clicking a word or slice runs it as a query.
 */

import { cloudScale, el, svgEl } from "../dom.js";
import type { FacetRow, TrendsResponse } from "../types.js";

export interface WelcomeHandlers {
  onQuery(text: string): void;
  onPeriod(days: number): void;
  onTypeChange(facetType: string): void;
}

const PIE_COLORS = ["#4878a8", "#e49444", "#5aa25a", "#c65c5c", "#8a70b8", "#bfa43e", "#5b9aa9", "#a97f5b"];
const FACET_TYPES = ["event", "person", "location", "organization"];

export function renderWelcome(
  container: HTMLElement,
  trends: TrendsResponse,
  selectedDays: number,
  handlers: WelcomeHandlers
): void {
  const page = el("div", { class: "welcome" });

  const periods: [string, number][] = [["day", 1], ["week", 7], ["month", 31]];
  const selector = el("div", { class: "period-selector" });
  for (const [label, days] of periods) {
    const button = el("button", {
      class: days === selectedDays ? "period active" : "period",
      text: label,
    });
    button.addEventListener("click", () => handlers.onPeriod(days));
    selector.append(button);
  }
  const typeSelect = el("select", { class: "trend-type" });
  for (const facetType of FACET_TYPES) {
    const option = el("option", { value: facetType, text: facetType });
    if (facetType === trends.type) option.setAttribute("selected", "selected");
    typeSelect.append(option);
  }
  typeSelect.addEventListener("change", () => handlers.onTypeChange(typeSelect.value));
  page.append(el("div", { class: "welcome-controls" }, [selector, typeSelect]));

  if (!trends.trends.length) {
    page.append(el("p", { class: "empty-state", text: "No broadcasts in this period yet." }));
  } else {
    page.append(renderCloud(trends.trends, handlers.onQuery));
    page.append(renderPie(trends.trends, handlers.onQuery));
  }
  container.append(page);
}

export function renderCloud(
  rows: FacetRow[],
  onQuery: (text: string) => void
): HTMLElement {
  const cloud = el("div", { class: "tag-cloud" });
  const scale = cloudScale(rows.map((r) => r.count));
  const shuffled = [...rows].sort((a, b) => a.value.localeCompare(b.value));
  for (const row of shuffled) {
    const word = el("a", {
      class: "cloud-word",
      href: "#",
      text: row.value,
      title: `${row.count} mentions`,
    });
    word.style.fontSize = `${scale(row.count).toFixed(1)}px`;
    word.dataset.count = String(row.count);
    word.addEventListener("click", (ev) => {
      ev.preventDefault();
      onQuery(row.value);
    });
    cloud.append(word);
  }
  return cloud;
}

export function renderPie(
  rows: FacetRow[],
  onQuery: (text: string) => void
): HTMLElement {
  const wrap = el("div", { class: "pie-wrap" });
  const svg = svgEl("svg", { viewBox: "-1.1 -1.1 2.2 2.2", class: "pie" });
  const total = rows.reduce((acc, r) => acc + r.count, 0);
  let angle = -Math.PI / 2;
  rows.forEach((row, i) => {
    const span = (row.count / total) * 2 * Math.PI;
    const x0 = Math.cos(angle);
    const y0 = Math.sin(angle);
    const x1 = Math.cos(angle + span);
    const y1 = Math.sin(angle + span);
    const large = span > Math.PI ? 1 : 0;
    const path = svgEl("path", {
      d: rows.length === 1
        ? "M 1 0 A 1 1 0 1 1 -1 0 A 1 1 0 1 1 1 0"
        : `M 0 0 L ${x0} ${y0} A 1 1 0 ${large} 1 ${x1} ${y1} Z`,
      fill: PIE_COLORS[i % PIE_COLORS.length],
      class: "pie-slice",
      "data-value": row.value,
    });
    path.append(svgEl("title"));
    path.querySelector("title")!.textContent = `${row.value}: ${row.count}`;
    path.addEventListener("click", () => onQuery(row.value));
    svg.append(path);
    angle += span;
  });
  wrap.append(svg);
  return wrap;
}
