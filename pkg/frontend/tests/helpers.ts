/** Test plumbing: a fetch stub serving responses recorded from the real
 * service over its demo corpus, keyed by canonicalized URL. */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import type { FetchLike } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export const recorded: Record<string, unknown> = JSON.parse(
  readFileSync(join(here, "fixtures", "recorded.json"), "utf-8")
);

export function canonical(url: string): string {
  const parsed = new URL(url, "http://fixture.test");
  const pairs: string[] = [];
  parsed.searchParams.forEach((value, key) => {
    if (key === "limit" || key === "offset" || key === "n") return; // paging defaults
    pairs.push(`${key}=${value}`);
  });
  pairs.sort();
  return pairs.length ? `${parsed.pathname}?${pairs.join("&")}` : parsed.pathname;
}

const table = new Map<string, unknown>();
for (const [key, value] of Object.entries(recorded)) {
  table.set(canonical(key), value);
}

export interface RequestLog {
  urls: string[];
}

export function fixtureFetch(log?: RequestLog): FetchLike {
  return async (url: string) => {
    log?.urls.push(url);
    const body = table.get(canonical(url));
    if (body === undefined) {
      return new Response(JSON.stringify({ error: `no fixture for ${canonical(url)}` }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
}

export function flush(ms = 5): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
