import { describe, expect, it } from "vitest";

import type { PixelRect } from "../src/geometry";
import {
  bodyText,
  layoutTooltip,
  renderTooltip,
  TOOLTIP_DEFAULTS,
  wrapText,
} from "../src/tooltip";
import type { DefinitionView, Manifest } from "../src/types";
import { collectText, findByClass } from "../src/vdom";
import { loadFixture } from "./helpers";

interface ViewsFixture {
  entity: string;
  positions: Record<string, number>;
  views: Record<string, DefinitionView>;
}

const manifest = loadFixture<Manifest>("manifest.json");
const viewsFixture = loadFixture<ViewsFixture>("definition_views.json");

const PAGE: PixelRect = { x: 0, y: 0, width: 816, height: 1056 };

function anchorsFor(page: PixelRect): PixelRect[] {
  return [
    { x: page.x + 60, y: page.y + 80, width: 30, height: 14 },
    { x: page.x + page.width - 40, y: page.y + 200, width: 24, height: 12 },
    { x: page.x + 8, y: page.y + 400, width: 18, height: 12 },
    { x: page.x + 300, y: page.y + page.height - 20, width: 30, height: 14 },
    { x: page.x + page.width / 2, y: page.y + page.height / 2, width: 40, height: 16 },
  ];
}

describe("wrapText", () => {
  it("never emits a line over budget", () => {
    const lines = wrapText("a contiguous run of source tokens mapped to boxes", 12);
    expect(lines.every((line) => line.length <= 12)).toBe(true);
    expect(lines.join(" ")).toBe(
      "a contiguous run of source tokens mapped to boxes",
    );
  });

  it("hard-splits words longer than the budget", () => {
    const lines = wrapText("supercalifragilistic", 6);
    expect(lines.every((line) => line.length <= 6)).toBe(true);
    expect(lines.join("")).toBe("supercalifragilistic");
  });
});

describe("layout constraints across every definition in the manifest", () => {
  const texts: string[] = [];
  for (const records of Object.values(manifest.definitions)) {
    for (const record of records) {
      texts.push(record.definiens);
      texts.push(`(defined below) ${record.definiens}`);
    }
  }
  texts.push("Defined here.", "No definition found.");

  it("collected definition texts from the manifest", () => {
    expect(texts.length).toBeGreaterThan(10);
  });

  it("width never exceeds half the page", () => {
    for (const text of texts) {
      for (const anchor of anchorsFor(PAGE)) {
        const layout = layoutTooltip(text, anchor, PAGE);
        expect(layout.rect.width).toBeLessThanOrEqual(PAGE.width / 2 + 1e-9);
      }
    }
  });

  it("height never exceeds the four-line budget", () => {
    const cap =
      TOOLTIP_DEFAULTS.maxLines * TOOLTIP_DEFAULTS.lineHeightPx +
      2 * TOOLTIP_DEFAULTS.paddingYPx;
    for (const text of texts) {
      for (const anchor of anchorsFor(PAGE)) {
        const layout = layoutTooltip(text, anchor, PAGE);
        expect(layout.rect.height).toBeLessThanOrEqual(cap + 1e-9);
        expect(layout.lines.length).toBeLessThanOrEqual(
          TOOLTIP_DEFAULTS.maxLines - 1,
        );
      }
    }
  });

  it("stays inside the page horizontally at every anchor", () => {
    for (const text of texts) {
      for (const anchor of anchorsFor(PAGE)) {
        const { rect } = layoutTooltip(text, anchor, PAGE);
        expect(rect.x).toBeGreaterThanOrEqual(PAGE.x - 1e-9);
        expect(rect.x + rect.width).toBeLessThanOrEqual(
          PAGE.x + PAGE.width + 1e-9,
        );
      }
    }
  });

  it("sits below the occurrence, flipping above only near the bottom", () => {
    for (const text of texts) {
      const high = anchorsFor(PAGE)[0];
      const below = layoutTooltip(text, high, PAGE);
      expect(below.flipped).toBe(false);
      expect(below.rect.y).toBeGreaterThanOrEqual(high.y + high.height);

      const low = anchorsFor(PAGE)[3];
      const above = layoutTooltip(text, low, PAGE);
      expect(above.flipped).toBe(true);
      expect(above.rect.y + above.rect.height).toBeLessThanOrEqual(low.y);
      expect(above.rect.y).toBeGreaterThanOrEqual(PAGE.y - 1e-9);
    }
  });

  it("holds at other page scales too", () => {
    const small: PixelRect = { x: 15, y: 30, width: 408, height: 528 };
    const large: PixelRect = { x: 0, y: 0, width: 1632, height: 2112 };
    for (const page of [small, large]) {
      for (const text of texts) {
        for (const anchor of anchorsFor(page)) {
          const { rect } = layoutTooltip(text, anchor, page);
          expect(rect.width).toBeLessThanOrEqual(page.width / 2 + 1e-9);
          expect(rect.x).toBeGreaterThanOrEqual(page.x - 1e-9);
          expect(rect.x + rect.width).toBeLessThanOrEqual(
            page.x + page.width + 1e-9,
          );
        }
      }
    }
  });
});

describe("renderTooltip against captured views", () => {
  const anchor: PixelRect = { x: 200, y: 300, width: 30, height: 14 };

  function renderView(view: DefinitionView) {
    const calls: string[] = [];
    const layout = layoutTooltip(bodyText(view), anchor, PAGE);
    const node = renderTooltip(view, layout, {
      onClose: () => calls.push("close"),
      onContext: () => calls.push("context"),
      onList: (kind) => calls.push(`list:${kind}`),
    });
    return { node, layout, calls };
  }

  it("shows the definiens for a plain definition view", () => {
    const view = viewsFixture.views.between;
    expect(view.status).toBe("definition");
    const { node } = renderView(view);
    expect(collectText(node)).toContain(view.record?.definiens);
  });

  it("marks a forward reference as defined below", () => {
    const view = viewsFixture.views.before;
    expect(view.forward).toBe(true);
    const { node } = renderView(view);
    expect(collectText(node)).toContain("defined below");
  });

  it("says defined here inside the defining sentence", () => {
    const view = viewsFixture.views.inside;
    expect(view.status).toBe("defined_here");
    const { node } = renderView(view);
    expect(collectText(node)).toContain("Defined here.");
  });

  it("links the definition context by page number", () => {
    const view = viewsFixture.views.between;
    const { node, calls } = renderView(view);
    const links = findByClass(node, "tooltip-context-link");
    expect(links).toHaveLength(1);
    const pageIndex = view.context_link?.page ?? -1;
    expect(collectText(links[0])).toBe(`page ${pageIndex + 1}`);
    links[0].on.click?.({});
    expect(calls).toContain("context");
  });

  it("renders all three list buttons with counts, disabled at zero", () => {
    for (const view of Object.values(viewsFixture.views)) {
      const { node } = renderView(view);
      const buttons = findByClass(node, "tooltip-list-button");
      expect(buttons).toHaveLength(3);
      for (const button of buttons) {
        const kind = button.attrs["data-kind"] as keyof typeof view.counts;
        const count = view.counts[kind];
        expect(button.attrs["data-count"]).toBe(String(count));
        expect(collectText(button)).toBe(`${kind} (${count})`);
        if (count === 0) {
          expect(button.attrs.disabled).toBe("disabled");
          expect(button.on.click).toBeUndefined();
        } else {
          expect(button.attrs.disabled).toBeUndefined();
          expect(button.on.click).toBeDefined();
        }
      }
    }
  });

  it("wires list buttons to the sidebar handler", () => {
    const view = viewsFixture.views.between;
    const { node, calls } = renderView(view);
    for (const button of findByClass(node, "tooltip-list-button")) {
      button.on.click?.({});
    }
    const expected = (["definitions", "formulae", "usages"] as const)
      .filter((kind) => view.counts[kind] > 0)
      .map((kind) => `list:${kind}`);
    expect(calls).toEqual(expected);
  });

  it("always offers a close control", () => {
    for (const view of Object.values(viewsFixture.views)) {
      const { node, calls } = renderView(view);
      const close = findByClass(node, "tooltip-close");
      expect(close).toHaveLength(1);
      close[0].on.click?.({});
      expect(calls).toContain("close");
    }
  });
});
