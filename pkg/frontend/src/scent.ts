/**
 * Definition-scent underlines.
 *
 * The service flags the occurrences that warrant a hint (roughly: the
 * symbol or term is defined somewhere, and this occurrence is not
 * itself inside a defining sentence). The overlay draws a dotted
 * underline beneath every box of every flagged occurrence, in one
 * fixed color, and draws nothing at all when the reader turns the
 * hints off.
 */

import { toFracRect, toPixels, type PageViewport } from "./geometry";
import type { Entity, PageBox } from "./types";
import { h, type VNode } from "./vdom";

export const SCENT_COLOR = "#1a6faf";

export interface ScentUnderline {
  entity: string;
  occurrence: string;
  box: PageBox;
}

export function scentUnderlines(
  entities: Entity[],
  enabled: boolean,
): ScentUnderline[] {
  if (!enabled) {
    return [];
  }
  const out: ScentUnderline[] = [];
  for (const entity of entities) {
    for (const occurrence of entity.occurrences) {
      if (!occurrence.underline) {
        continue;
      }
      for (const box of occurrence.boxes) {
        out.push({ entity: entity.id, occurrence: occurrence.id, box });
      }
    }
  }
  return out;
}

export function renderScentLayer(
  underlines: ScentUnderline[],
  pages: PageViewport[],
  onClick: (entity: string, occurrence: string) => void,
): VNode {
  const children = underlines.flatMap((u) => {
    const vp = pages[u.box.page];
    if (vp === undefined) {
      return [];
    }
    const rect = toPixels(toFracRect(u.box), vp);
    return [
      h(
        "div",
        {
          class: "scent-underline",
          "data-entity": u.entity,
          "data-occurrence": u.occurrence,
        },
        [],
        {
          style: {
            position: "absolute",
            left: `${rect.x}px`,
            top: `${rect.y}px`,
            width: `${rect.width}px`,
            height: `${rect.height}px`,
            "border-bottom": `1.5px dotted ${SCENT_COLOR}`,
            cursor: "pointer",
          },
          on: { click: () => onClick(u.entity, u.occurrence) },
        },
      ),
    ];
  });
  return h("div", { class: "scent-layer" }, children);
}
