/**
 * Equation diagram rendering.
 *
 * The service plans the whole layout: label boxes above and below the
 * equation and a straight leader line from each label to its symbol.
 * The overlay draws exactly that plan, adds a hover affordance that
 * saturates the hovered pair, and treats a label click as a request to
 * open that symbol's definition tooltip.
 */

import { fracPoint, toFracRect, toPixels, type PageViewport } from "./geometry";
import type { DiagramPayload } from "./types";
import { h, type VNode } from "./vdom";

export interface DiagramHandlers {
  onHover: (entity: string | null) => void;
  onSelect: (entity: string, record: string) => void;
}

export function renderDiagram(
  plan: DiagramPayload,
  vp: PageViewport,
  handlers: DiagramHandlers,
): VNode {
  const labels = plan.labels.map((label) => {
    const rect = toPixels(toFracRect(label.box), vp);
    return h(
      "div",
      {
        class: `diagram-label diagram-${label.side}`,
        "data-entity": label.entity,
        "data-record": label.record,
        "data-row": String(label.row),
      },
      [label.text],
      {
        style: {
          position: "absolute",
          left: `${rect.x}px`,
          top: `${rect.y}px`,
          width: `${rect.width}px`,
          height: `${rect.height}px`,
        },
        on: {
          mouseenter: () => handlers.onHover(label.entity),
          mouseleave: () => handlers.onHover(null),
          click: () => handlers.onSelect(label.entity, label.record),
        },
      },
    );
  });

  const leaders = plan.leaders.map((leader) => {
    const from = fracPoint(leader.from, vp);
    const to = fracPoint(leader.to, vp);
    return h("line", {
      class: "diagram-leader",
      "data-entity": leader.entity,
      x1: from.x.toFixed(2),
      y1: from.y.toFixed(2),
      x2: to.x.toFixed(2),
      y2: to.y.toFixed(2),
    });
  });

  return h(
    "div",
    { class: "diagram-layer", "data-equation": plan.equation },
    [
      h(
        "svg",
        {
          class: "diagram-leader-lines",
          width: String(vp.width),
          height: String(vp.height),
        },
        leaders,
      ),
      ...labels,
    ],
  );
}
