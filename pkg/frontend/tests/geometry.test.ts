import { describe, expect, it } from "vitest";

import {
  maskRects,
  rectArea,
  subtractRect,
  toFracRect,
  toPixels,
  UNIT_RECT,
  type FracRect,
} from "../src/geometry";
import type { PageBox } from "../src/types";

/**
 * Independent union-area oracle: coordinate compression into a grid of
 * cells, a cell counts when any rectangle covers its center.
 */
function unionArea(rects: FracRect[]): number {
  const xs = [...new Set(rects.flatMap((r) => [r.left, r.right]))].sort(
    (a, b) => a - b,
  );
  const ys = [...new Set(rects.flatMap((r) => [r.top, r.bottom]))].sort(
    (a, b) => a - b,
  );
  let area = 0;
  for (let i = 0; i + 1 < xs.length; i += 1) {
    for (let j = 0; j + 1 < ys.length; j += 1) {
      const cx = (xs[i] + xs[i + 1]) / 2;
      const cy = (ys[j] + ys[j + 1]) / 2;
      const covered = rects.some(
        (r) => cx > r.left && cx < r.right && cy > r.top && cy < r.bottom,
      );
      if (covered) {
        area += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
      }
    }
  }
  return area;
}

function overlaps(a: FracRect, b: FracRect): boolean {
  return a.left < b.right && b.left < a.right && a.top < b.bottom && b.top < a.bottom;
}

/* Deterministic pseudo-random boxes, same stream every run. */
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

function randomBoxes(rand: () => number, n: number): PageBox[] {
  const boxes: PageBox[] = [];
  for (let i = 0; i < n; i += 1) {
    const left = rand() * 0.9;
    const top = rand() * 0.9;
    boxes.push({
      page: 0,
      left,
      top,
      width: Math.min(0.02 + rand() * 0.3, 1 - left),
      height: Math.min(0.01 + rand() * 0.2, 1 - top),
    });
  }
  return boxes;
}

describe("subtractRect", () => {
  it("returns the rect untouched when there is no intersection", () => {
    const rect: FracRect = { left: 0, top: 0, right: 0.4, bottom: 0.4 };
    const cut: FracRect = { left: 0.5, top: 0.5, right: 0.7, bottom: 0.7 };
    expect(subtractRect(rect, cut)).toEqual([rect]);
  });

  it("returns nothing when the cut swallows the rect", () => {
    const rect: FracRect = { left: 0.2, top: 0.2, right: 0.3, bottom: 0.3 };
    expect(subtractRect(rect, UNIT_RECT)).toEqual([]);
  });

  it("splits an interior cut into four disjoint pieces", () => {
    const cut: FracRect = { left: 0.3, top: 0.3, right: 0.5, bottom: 0.5 };
    const pieces = subtractRect(UNIT_RECT, cut);
    expect(pieces).toHaveLength(4);
    for (let i = 0; i < pieces.length; i += 1) {
      expect(overlaps(pieces[i], cut)).toBe(false);
      for (let j = i + 1; j < pieces.length; j += 1) {
        expect(overlaps(pieces[i], pieces[j])).toBe(false);
      }
    }
    const total = pieces.reduce((acc, p) => acc + rectArea(p), 0);
    expect(total).toBeCloseTo(1 - rectArea(cut), 12);
  });
});

describe("maskRects", () => {
  it("covers the full page when nothing is kept", () => {
    expect(maskRects([])).toEqual([UNIT_RECT]);
  });

  it("partitions the page complement on random kept sets", () => {
    const rand = lcg(20260822);
    for (let trial = 0; trial < 50; trial += 1) {
      const kept = randomBoxes(rand, 1 + Math.floor(rand() * 8));
      const mask = maskRects(kept);
      const keptRects = kept.map(toFracRect);

      // Exact disjointness: the subtraction copies edges, so touching
      // pieces share the identical float and strict overlap is false.
      for (let i = 0; i < mask.length; i += 1) {
        for (let j = i + 1; j < mask.length; j += 1) {
          expect(overlaps(mask[i], mask[j])).toBe(false);
        }
        for (const box of keptRects) {
          expect(overlaps(mask[i], box)).toBe(false);
        }
      }

      const keptArea = unionArea(keptRects);
      const maskArea = mask.reduce((acc, r) => acc + rectArea(r), 0);
      expect(maskArea + keptArea).toBeCloseTo(1, 9);
    }
  });
});

describe("toPixels", () => {
  it("scales fractions into the page viewport", () => {
    const rect = toPixels(
      { left: 0.25, top: 0.5, right: 0.5, bottom: 0.75 },
      { originX: 100, originY: 40, width: 800, height: 1000 },
    );
    expect(rect).toEqual({ x: 300, y: 540, width: 200, height: 250 });
  });

  it("round-trips a page box through the fraction form", () => {
    const box: PageBox = { page: 0, left: 0.1, top: 0.2, width: 0.3, height: 0.4 };
    const rect = toFracRect(box);
    expect(rect.right).toBeCloseTo(0.4, 12);
    expect(rect.bottom).toBeCloseTo(0.6, 12);
    const px = toPixels(rect, { originX: 0, originY: 0, width: 1000, height: 500 });
    expect(px.x).toBeCloseTo(100, 9);
    expect(px.width).toBeCloseTo(300, 9);
    expect(px.height).toBeCloseTo(200, 9);
  });
});
