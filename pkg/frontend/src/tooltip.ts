/**
 * Definition tooltip layout and rendering.
 *
 * The tooltip is deliberately small: it sits directly below the
 * occurrence that was clicked, never grows wider than half the page,
 * and never taller than four text lines, so it reads as a gloss rather
 * than a panel. Near the page edges it clamps horizontally and flips
 * above the occurrence instead of running off the bottom.
 */

import type { PixelRect } from "./geometry";
import type { DefinitionView } from "./types";
import { h, type VNode } from "./vdom";

export interface TooltipConfig {
  /** Total height budget, counted in text lines (chrome row included). */
  maxLines: number;
  lineHeightPx: number;
  charWidthPx: number;
  paddingXPx: number;
  paddingYPx: number;
  /** Vertical gap between the occurrence box and the tooltip. */
  gapPx: number;
  minWidthPx: number;
}

export const TOOLTIP_DEFAULTS: TooltipConfig = {
  maxLines: 4,
  lineHeightPx: 18,
  charWidthPx: 7.2,
  paddingXPx: 10,
  paddingYPx: 6,
  gapPx: 4,
  minWidthPx: 180,
};

export interface TooltipLayout {
  rect: PixelRect;
  /** Body lines after wrapping and truncation. */
  lines: string[];
  /** True when the body text did not fit the line budget. */
  clipped: boolean;
  /** True when the tooltip opens above the occurrence. */
  flipped: boolean;
}

/** Greedy word wrap; words longer than the budget are hard-split. */
export function wrapText(text: string, maxChars: number): string[] {
  const budget = Math.max(1, maxChars);
  const lines: string[] = [];
  let line = "";
  for (const word of text.split(/\s+/).filter((w) => w.length > 0)) {
    let piece = word;
    while (piece.length > budget) {
      if (line.length > 0) {
        lines.push(line);
        line = "";
      }
      lines.push(piece.slice(0, budget));
      piece = piece.slice(budget);
    }
    if (line.length === 0) {
      line = piece;
    } else if (line.length + 1 + piece.length <= budget) {
      line = `${line} ${piece}`;
    } else {
      lines.push(line);
      line = piece;
    }
  }
  if (line.length > 0) {
    lines.push(line);
  }
  return lines.length > 0 ? lines : [""];
}

export function layoutTooltip(
  text: string,
  anchor: PixelRect,
  page: PixelRect,
  config: TooltipConfig = TOOLTIP_DEFAULTS,
): TooltipLayout {
  const widthCap = page.width / 2;
  const natural = text.length * config.charWidthPx + 2 * config.paddingXPx;
  const width = Math.min(widthCap, Math.max(config.minWidthPx, natural));

  const charBudget = Math.floor(
    (width - 2 * config.paddingXPx) / config.charWidthPx,
  );
  const wrapped = wrapText(text, charBudget);
  // One line of the budget is reserved for the action row.
  const bodyBudget = config.maxLines - 1;
  const lines = wrapped.slice(0, bodyBudget);
  const clipped = wrapped.length > bodyBudget;
  const height =
    (lines.length + 1) * config.lineHeightPx + 2 * config.paddingYPx;

  const x = Math.min(
    Math.max(anchor.x, page.x),
    page.x + page.width - width,
  );
  let y = anchor.y + anchor.height + config.gapPx;
  const flipped = y + height > page.y + page.height;
  if (flipped) {
    y = anchor.y - config.gapPx - height;
  }
  return { rect: { x, y, width, height }, lines, clipped, flipped };
}

export interface TooltipHandlers {
  onClose: () => void;
  onContext: () => void;
  onList: (kind: "definitions" | "formulae" | "usages") => void;
}

/** The text a tooltip shows for a view, layout and render agree on it. */
export function bodyText(view: DefinitionView): string {
  if (view.status === "defined_here") {
    return "Defined here.";
  }
  if (view.status === "none" || view.record === null) {
    return "No definition found.";
  }
  return view.forward ? `(defined below) ${view.record.definiens}` : view.record.definiens;
}

const LIST_KINDS = ["definitions", "formulae", "usages"] as const;

export function renderTooltip(
  view: DefinitionView,
  layout: TooltipLayout,
  handlers: TooltipHandlers,
): VNode {
  const buttons = LIST_KINDS.map((kind) => {
    const count = view.counts[kind];
    const attrs: Record<string, string> = {
      class: `tooltip-list-button tooltip-list-${kind}`,
      "data-kind": kind,
      "data-count": String(count),
    };
    if (count === 0) {
      attrs.disabled = "disabled";
    }
    return h("button", attrs, [`${kind} (${count})`], {
      on: count === 0 ? {} : { click: () => handlers.onList(kind) },
    });
  });

  const actions: VNode[] = [...buttons];
  const link = view.context_link;
  if (link !== null && link.page !== null && view.status === "definition") {
    actions.push(
      h(
        "a",
        { class: "tooltip-context-link", "data-page": String(link.page) },
        [`page ${link.page + 1}`],
        { on: { click: () => handlers.onContext() } },
      ),
    );
  }
  actions.push(
    h("button", { class: "tooltip-close", "aria-label": "Close" }, ["×"], {
      on: { click: () => handlers.onClose() },
    }),
  );

  return h(
    "div",
    {
      class: `tooltip tooltip-${view.status}`,
      role: "tooltip",
      "data-entity": view.entity,
    },
    [
      h(
        "div",
        { class: "tooltip-body" },
        layout.lines.map((line, i) =>
          h("div", { class: "tooltip-line", "data-line": String(i) }, [line]),
        ),
      ),
      h("div", { class: "tooltip-actions" }, actions),
    ],
    {
      style: {
        position: "absolute",
        left: `${layout.rect.x}px`,
        top: `${layout.rect.y}px`,
        width: `${layout.rect.width}px`,
        height: `${layout.rect.height}px`,
      },
    },
  );
}
