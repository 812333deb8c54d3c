/**
 * Decluttered reading.
 *
 * While active, everything except the selected entity's occurrences and
 * the sentences that use it is dimmed behind a mask. The service says
 * what to keep; the overlay computes the complement per page and draws
 * it as translucent rectangles, then lets the reader step through the
 * visible matches with next/previous controls.
 */

import { maskRects, toPixels, type FracRect, type PageViewport } from "./geometry";
import type { DeclutterPayload, Entity, PageBox } from "./types";
import { h, type VNode } from "./vdom";

export function keptBoxesByPage(payload: DeclutterPayload): Map<number, PageBox[]> {
  const byPage = new Map<number, PageBox[]>();
  for (const region of payload.regions) {
    byPage.set(region.page, region.boxes);
  }
  return byPage;
}

/** Mask rectangles (page fractions) for one page of kept boxes. */
export function maskForPage(kept: PageBox[]): FracRect[] {
  return maskRects(kept);
}

export interface MatchTarget {
  occurrence: string;
  box: PageBox;
}

/** Occurrence anchors in reading order, one per occurrence. */
export function matchTargets(entity: Entity): MatchTarget[] {
  const targets: MatchTarget[] = [];
  for (const occurrence of entity.occurrences) {
    const box = occurrence.boxes[0];
    if (box !== undefined) {
      targets.push({ occurrence: occurrence.id, box });
    }
  }
  targets.sort((a, b) => {
    if (a.box.page !== b.box.page) {
      return a.box.page - b.box.page;
    }
    if (a.box.top !== b.box.top) {
      return a.box.top - b.box.top;
    }
    return a.box.left - b.box.left;
  });
  return targets;
}

/** Cyclic cursor over the matches, driven by the arrow controls. */
export class MatchNavigator {
  private readonly targets: MatchTarget[];
  private index: number;

  constructor(targets: MatchTarget[]) {
    this.targets = targets;
    this.index = targets.length > 0 ? 0 : -1;
  }

  get count(): number {
    return this.targets.length;
  }

  get position(): number {
    return this.index;
  }

  get current(): MatchTarget | null {
    return this.index >= 0 ? this.targets[this.index] : null;
  }

  next(): MatchTarget | null {
    if (this.targets.length === 0) {
      return null;
    }
    this.index = (this.index + 1) % this.targets.length;
    return this.targets[this.index];
  }

  prev(): MatchTarget | null {
    if (this.targets.length === 0) {
      return null;
    }
    this.index = (this.index - 1 + this.targets.length) % this.targets.length;
    return this.targets[this.index];
  }
}

export function renderDeclutterMask(
  payload: DeclutterPayload,
  pages: PageViewport[],
): VNode {
  const children: VNode[] = [];
  pages.forEach((vp, pageIndex) => {
    const kept =
      payload.regions.find((region) => region.page === pageIndex)?.boxes ?? [];
    for (const rect of maskRects(kept)) {
      const px = toPixels(rect, vp);
      children.push(
        h("div", { class: "declutter-mask", "data-page": String(pageIndex) }, [], {
          style: {
            position: "absolute",
            left: `${px.x}px`,
            top: `${px.y}px`,
            width: `${px.width}px`,
            height: `${px.height}px`,
            background: "rgba(255, 255, 255, 0.88)",
            "pointer-events": "none",
          },
        }),
      );
    }
  });
  return h("div", { class: "declutter-layer" }, children);
}

export function renderDeclutterBar(
  navigator: MatchNavigator,
  handlers: { onNext: () => void; onPrev: () => void; onClose: () => void },
): VNode {
  const shown = navigator.count === 0 ? 0 : navigator.position + 1;
  return h("div", { class: "declutter-bar", role: "toolbar" }, [
    h("button", { class: "declutter-prev", "aria-label": "Previous match" }, ["↑"], {
      on: { click: () => handlers.onPrev() },
    }),
    h("span", { class: "declutter-count" }, [`${shown} / ${navigator.count}`]),
    h("button", { class: "declutter-next", "aria-label": "Next match" }, ["↓"], {
      on: { click: () => handlers.onNext() },
    }),
    h("button", { class: "declutter-close", "aria-label": "Exit" }, ["×"], {
      on: { click: () => handlers.onClose() },
    }),
  ]);
}
