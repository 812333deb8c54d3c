/**
 * Paper glossary.
 *
 * A compact front matter listing every defined symbol and term in order
 * of first appearance, each entry linking back to the point where it is
 * introduced. A paper with nothing defined gets no glossary at all.
 */

import type { GlossaryEntry, GlossaryPayload } from "./types";
import { h, type VNode } from "./vdom";

function renderEntry(
  entry: GlossaryEntry,
  onJump: (entry: GlossaryEntry) => void,
): VNode {
  const definitions = entry.definitions.map((record) =>
    h("span", { class: "glossary-definiens", "data-kind": record.kind }, [
      record.definiens,
    ]),
  );
  return h(
    "li",
    {
      class: "glossary-entry",
      "data-entity": entry.entity,
      "data-position": String(entry.first_position),
    },
    [
      h("button", { class: "glossary-term", "data-kind": entry.kind }, [entry.tex], {
        on: { click: () => onJump(entry) },
      }),
      ...definitions,
    ],
  );
}

/** Render the glossary, or nothing when there are no entries. */
export function renderGlossary(
  payload: GlossaryPayload,
  onJump: (entry: GlossaryEntry) => void,
): VNode | null {
  if (payload.entries.length === 0) {
    return null;
  }
  return h("section", { class: "glossary" }, [
    h("h2", { class: "glossary-heading" }, ["Glossary"]),
    h(
      "ol",
      { class: "glossary-list" },
      payload.entries.map((entry) => renderEntry(entry, onJump)),
    ),
  ]);
}
