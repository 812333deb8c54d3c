/**
 * List sidebar.
 *
 * Definition, formula, and usage lists all share one presentation: an
 * excerpt per item with the selected entity's mentions emphasised, and
 * a click jumps the reader to the source passage.
 */

import type { ListItem, ListPayload } from "./types";
import { h, type VNode } from "./vdom";

export interface ExcerptSegment {
  text: string;
  highlighted: boolean;
}

/** Split an excerpt into plain and highlighted runs, in order. */
export function segmentExcerpt(
  text: string,
  highlights: [number, number][],
): ExcerptSegment[] {
  const sorted = [...highlights]
    .filter(([start, end]) => end > start)
    .sort((a, b) => a[0] - b[0]);
  const segments: ExcerptSegment[] = [];
  let cursor = 0;
  for (const [start, end] of sorted) {
    const from = Math.max(cursor, Math.min(start, text.length));
    const to = Math.min(Math.max(end, from), text.length);
    if (from > cursor) {
      segments.push({ text: text.slice(cursor, from), highlighted: false });
    }
    if (to > from) {
      segments.push({ text: text.slice(from, to), highlighted: true });
    }
    cursor = Math.max(cursor, to);
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), highlighted: false });
  }
  return segments;
}

function renderItem(item: ListItem, index: number, onJump: (item: ListItem) => void): VNode {
  const segments = segmentExcerpt(item.text, item.highlights).map((segment) =>
    segment.highlighted
      ? h("mark", { class: "sidebar-hit" }, [segment.text])
      : h("span", {}, [segment.text]),
  );
  const meta =
    item.page === null ? [] : [h("span", { class: "sidebar-page" }, [`p. ${item.page + 1}`])];
  return h(
    "li",
    { class: "sidebar-item", "data-source": item.source, "data-index": String(index) },
    [h("blockquote", { class: "sidebar-excerpt" }, segments), ...meta],
    { on: { click: () => onJump(item) } },
  );
}

export function renderSidebar(
  payload: ListPayload,
  onJump: (item: ListItem) => void,
  onClose: () => void,
): VNode {
  return h("aside", { class: "sidebar", "data-kind": payload.kind }, [
    h("header", { class: "sidebar-header" }, [
      h("span", { class: "sidebar-title" }, [`${payload.kind} (${payload.items.length})`]),
      h("button", { class: "sidebar-close", "aria-label": "Close" }, ["×"], {
        on: { click: () => onClose() },
      }),
    ]),
    h(
      "ul",
      { class: "sidebar-list" },
      payload.items.map((item, index) => renderItem(item, index, onJump)),
    ),
  ]);
}
