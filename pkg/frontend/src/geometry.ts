/**
 * Page-fraction geometry.
 *
 * Service payloads measure everything as fractions of the page, so the
 * overlay does its spatial reasoning in the unit square and converts to
 * pixels only when positioning elements against a rendered page.
 *
 * Rectangles here store their four edges rather than width and height.
 * Subtraction then only ever copies coordinates (via min and max), so
 * pieces that share an edge share it exactly and the decluttering mask
 * is disjoint down to the last bit, with no reconstruction drift.
 */

import type { PageBox } from "./types";

/** An axis-aligned rectangle in page fractions, stored by its edges. */
export interface FracRect {
  left: number;
  top: number;
  right: number;
  bottom: number;
}

/** A rectangle in viewport pixels. */
export interface PixelRect {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Where a rendered page sits in the viewport, in pixels. */
export interface PageViewport {
  originX: number;
  originY: number;
  width: number;
  height: number;
}

export const UNIT_RECT: FracRect = { left: 0, top: 0, right: 1, bottom: 1 };

export function toFracRect(box: PageBox): FracRect {
  return {
    left: box.left,
    top: box.top,
    right: box.left + box.width,
    bottom: box.top + box.height,
  };
}

export function toPixels(rect: FracRect, vp: PageViewport): PixelRect {
  return {
    x: vp.originX + rect.left * vp.width,
    y: vp.originY + rect.top * vp.height,
    width: (rect.right - rect.left) * vp.width,
    height: (rect.bottom - rect.top) * vp.height,
  };
}

export function fracPoint(
  point: [number, number],
  vp: PageViewport,
): { x: number; y: number } {
  return {
    x: vp.originX + point[0] * vp.width,
    y: vp.originY + point[1] * vp.height,
  };
}

export function rectContains(rect: FracRect, x: number, y: number): boolean {
  return x >= rect.left && x <= rect.right && y >= rect.top && y <= rect.bottom;
}

export function rectArea(rect: FracRect): number {
  return (rect.right - rect.left) * (rect.bottom - rect.top);
}

/**
 * Subtract `cut` from `rect`, returning up to four disjoint remainders.
 *
 * The split is guillotine style: full-width bands above and below the
 * cut, then side pieces at the cut's own vertical extent. Every output
 * edge is one of the input edges, copied unchanged.
 */
export function subtractRect(rect: FracRect, cut: FracRect): FracRect[] {
  const left = Math.max(rect.left, cut.left);
  const top = Math.max(rect.top, cut.top);
  const right = Math.min(rect.right, cut.right);
  const bottom = Math.min(rect.bottom, cut.bottom);
  if (left >= right || top >= bottom) {
    return [rect];
  }
  const out: FracRect[] = [];
  if (top > rect.top) {
    out.push({ left: rect.left, top: rect.top, right: rect.right, bottom: top });
  }
  if (bottom < rect.bottom) {
    out.push({ left: rect.left, top: bottom, right: rect.right, bottom: rect.bottom });
  }
  if (left > rect.left) {
    out.push({ left: rect.left, top, right: left, bottom });
  }
  if (right < rect.right) {
    out.push({ left: right, top, right: rect.right, bottom });
  }
  return out;
}

/**
 * The complement of the kept boxes within the unit page, as disjoint
 * rectangles. This is the dimming mask for decluttered reading: every
 * point of the page is either inside a kept box or inside exactly one
 * mask rectangle.
 */
export function maskRects(kept: PageBox[]): FracRect[] {
  let free: FracRect[] = [UNIT_RECT];
  for (const box of kept) {
    const cut = toFracRect(box);
    const next: FracRect[] = [];
    for (const rect of free) {
      next.push(...subtractRect(rect, cut));
    }
    free = next;
  }
  return free;
}

/** Scroll offset that brings a page-fraction box near the viewport top. */
export function scrollTargetFor(
  box: PageBox,
  pages: PageViewport[],
  marginPx = 24,
): { x: number; y: number } {
  const vp = pages[box.page];
  if (vp === undefined) {
    return { x: 0, y: 0 };
  }
  return {
    x: 0,
    y: Math.max(0, vp.originY + box.top * vp.height - marginPx),
  };
}
