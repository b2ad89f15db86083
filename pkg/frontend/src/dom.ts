/** Minimal DOM construction helpers. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = []
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "text") {
      node.textContent = value;
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.textContent = "";
  return node;
}

export function fmtDate(iso: string): string {
  return iso.slice(0, 10);
}

export function fmtClock(ms: number): string {
  const total = Math.floor(ms / 1000);
  const m = Math.floor(total / 60);
  const s = total % 60;
  return `${m}:${String(s).padStart(2, "0")}`;
}

/** Linear font scale for tag clouds: smallest count -> min px, largest -> max px. */
export function cloudScale(counts: number[], minPx = 13, maxPx = 38): (count: number) => number {
  if (!counts.length) return () => minPx;
  const lo = Math.min(...counts);
  const hi = Math.max(...counts);
  if (hi === lo) return () => (minPx + maxPx) / 2;
  return (count) => minPx + ((count - lo) / (hi - lo)) * (maxPx - minPx);
}
