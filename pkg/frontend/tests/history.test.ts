import { describe, expect, it } from "vitest";

import { jumpToContext, NavigationHistory } from "../src/history";

describe("NavigationHistory", () => {
  it("returns entries last-in first-out", () => {
    const history = new NavigationHistory();
    history.push({ scroll: { x: 0, y: 100 }, reopen: null });
    history.push({ scroll: { x: 0, y: 250 }, reopen: null });
    expect(history.depth).toBe(2);
    expect(history.back()?.scroll.y).toBe(250);
    expect(history.back()?.scroll.y).toBe(100);
    expect(history.back()).toBeNull();
  });

  it("stores copies, not references", () => {
    const history = new NavigationHistory();
    const scroll = { x: 3, y: 7 };
    history.push({ scroll, reopen: { entity: "s1", occurrence: "s1.o1" } });
    scroll.y = 9999;
    expect(history.back()?.scroll).toEqual({ x: 3, y: 7 });
  });
});

describe("jumpToContext", () => {
  it("restores the exact departure position and tooltip after back", () => {
    const history = new NavigationHistory();
    const departure = { x: 12.5, y: 3481.25 };
    const tooltip = { entity: "s3", occurrence: "s3.o2" };

    const applied = jumpToContext(history, departure, tooltip, { x: 0, y: 512 });
    expect(applied).toEqual({ x: 0, y: 512 });

    const entry = history.back();
    expect(entry).not.toBeNull();
    expect(entry?.scroll).toEqual(departure);
    expect(entry?.reopen).toEqual(tooltip);
  });

  it("round-trips through a chain of jumps", () => {
    const history = new NavigationHistory();
    const stops = [
      { x: 0, y: 0 },
      { x: 0, y: 880.5 },
      { x: 0, y: 1761.75 },
    ];
    let position = stops[0];
    position = jumpToContext(history, position, null, stops[1]);
    position = jumpToContext(history, position, { entity: "t1", occurrence: "t1.o1" }, stops[2]);
    expect(position).toEqual(stops[2]);

    const first = history.back();
    expect(first?.scroll).toEqual(stops[1]);
    expect(first?.reopen).toEqual({ entity: "t1", occurrence: "t1.o1" });
    const second = history.back();
    expect(second?.scroll).toEqual(stops[0]);
    expect(second?.reopen).toBeNull();
    expect(history.depth).toBe(0);
  });
});
