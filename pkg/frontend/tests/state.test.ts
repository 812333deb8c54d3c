import { describe, expect, it } from "vitest";

import {
  closeFeature,
  deselect,
  escape,
  initialState,
  openDiagram,
  openGlossary,
  openSidebar,
  openTooltip,
  select,
  toggleDeclutter,
  toggleScent,
} from "../src/state";

describe("selection", () => {
  it("swaps the find bar to symbol mode while something is selected", () => {
    let s = initialState();
    expect(s.findBar).toBe("default");
    s = select(s, "s3", "s3.o1");
    expect(s.findBar).toBe("symbol");
    s = deselect(s);
    expect(s.findBar).toBe("default");
    expect(s.selection).toBeNull();
  });

  it("bumps the generation on every selection change", () => {
    let s = initialState();
    const g0 = s.generation;
    s = select(s, "s3");
    const g1 = s.generation;
    s = select(s, "s4");
    const g2 = s.generation;
    s = deselect(s);
    expect(g1).toBeGreaterThan(g0);
    expect(g2).toBeGreaterThan(g1);
    expect(s.generation).toBeGreaterThan(g2);
  });

  it("keeps the generation when the tooltip moves within one entity", () => {
    let s = select(initialState(), "s3", "s3.o1");
    const g = s.generation;
    s = openTooltip(s, "s3", "s3.o2");
    expect(s.generation).toBe(g);
    s = openTooltip(s, "s4", "s4.o1");
    expect(s.generation).toBeGreaterThan(g);
  });
});

describe("tooltip", () => {
  it("keeps at most one tooltip open", () => {
    let s = openTooltip(initialState(), "s3", "s3.o1");
    s = openTooltip(s, "s6", "s6.o2");
    expect(s.feature).toEqual({ kind: "tooltip", entity: "s6", occurrence: "s6.o2" });
  });

  it("closes on escape", () => {
    const s = escape(openTooltip(initialState(), "s3", "s3.o1"));
    expect(s.feature.kind).toBe("none");
  });
});

describe("declutter", () => {
  it("requires a selection", () => {
    const s = toggleDeclutter(initialState());
    expect(s.feature.kind).toBe("none");
  });

  it("activates for the selected entity and toggles back off", () => {
    let s = select(initialState(), "s3", "s3.o1");
    s = toggleDeclutter(s);
    expect(s.feature).toEqual({ kind: "declutter", entity: "s3" });
    s = toggleDeclutter(s);
    expect(s.feature.kind).toBe("none");
  });

  it("closes on escape", () => {
    let s = toggleDeclutter(select(initialState(), "s3", null));
    s = escape(s);
    expect(s.feature.kind).toBe("none");
    expect(s.selection).not.toBeNull();
  });
});

describe("other features", () => {
  it("escape leaves panels with their own close controls alone", () => {
    const sidebar = openSidebar(select(initialState(), "s3", null), "s3", "usages");
    expect(escape(sidebar).feature.kind).toBe("sidebar");
    const glossary = openGlossary(initialState());
    expect(escape(glossary).feature.kind).toBe("glossary");
  });

  it("features replace each other instead of stacking", () => {
    let s = openDiagram(initialState(), "q3");
    expect(s.feature).toEqual({ kind: "diagram", equation: "q3" });
    s = openGlossary(s);
    expect(s.feature.kind).toBe("glossary");
    s = closeFeature(s);
    expect(s.feature.kind).toBe("none");
  });

  it("selecting closes whatever feature was open", () => {
    let s = openGlossary(initialState());
    s = select(s, "s3", "s3.o1");
    expect(s.feature.kind).toBe("none");
  });
});

describe("scent toggle", () => {
  it("flips the flag and nothing else", () => {
    const before = select(initialState(), "s3", null);
    const after = toggleScent(before);
    expect(after.scentEnabled).toBe(false);
    expect(toggleScent(after).scentEnabled).toBe(true);
    expect(after.selection).toEqual(before.selection);
    expect(after.feature).toEqual(before.feature);
  });
});
