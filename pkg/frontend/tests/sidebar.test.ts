import { describe, expect, it } from "vitest";

import { segmentExcerpt, renderSidebar } from "../src/sidebar";
import type { ListPayload } from "../src/types";
import { collectText, findByClass } from "../src/vdom";
import { loadFixture } from "./helpers";

const definitionList = loadFixture<ListPayload>("lists_k_definitions.json");
const usageList = loadFixture<ListPayload>("lists_k_usages.json");
const formulaList = loadFixture<ListPayload>("lists_k_formulae.json");

describe("segmentExcerpt", () => {
  it("reconstructs the excerpt and isolates the highlighted spans", () => {
    for (const item of [...definitionList.items, ...usageList.items]) {
      const segments = segmentExcerpt(item.text, item.highlights);
      expect(segments.map((s) => s.text).join("")).toBe(item.text);
      const highlighted = segments
        .filter((s) => s.highlighted)
        .map((s) => s.text);
      expect(highlighted).toEqual(
        item.highlights.map(([start, end]) => item.text.slice(start, end)),
      );
    }
  });

  it("tolerates unsorted and touching spans", () => {
    const segments = segmentExcerpt("abcdef", [
      [4, 6],
      [0, 2],
      [2, 3],
    ]);
    expect(segments.map((s) => s.text).join("")).toBe("abcdef");
    expect(segments.filter((s) => s.highlighted).map((s) => s.text)).toEqual([
      "ab",
      "c",
      "ef",
    ]);
  });

  it("clamps out-of-range spans instead of throwing", () => {
    const segments = segmentExcerpt("short", [[3, 99]]);
    expect(segments.map((s) => s.text).join("")).toBe("short");
    expect(segments.find((s) => s.highlighted)?.text).toBe("rt");
  });

  it("handles no highlights at all", () => {
    expect(segmentExcerpt("plain text", [])).toEqual([
      { text: "plain text", highlighted: false },
    ]);
  });
});

describe("renderSidebar", () => {
  it("lists every item with its highlights marked", () => {
    const tree = renderSidebar(usageList, () => undefined, () => undefined);
    const items = findByClass(tree, "sidebar-item");
    expect(items).toHaveLength(usageList.items.length);

    usageList.items.forEach((item, index) => {
      const node = items.find((n) => n.attrs["data-index"] === String(index));
      expect(node).toBeDefined();
      expect(node!.attrs["data-source"]).toBe(item.source);
      const excerpt = findByClass(node!, "sidebar-excerpt")[0];
      expect(collectText(excerpt)).toBe(item.text);
      const marks = findByClass(node!, "sidebar-hit");
      expect(marks.map((m) => collectText(m))).toEqual(
        item.highlights.map(([start, end]) => item.text.slice(start, end)),
      );
    });
  });

  it("shows the section kind and count in the header", () => {
    const tree = renderSidebar(definitionList, () => undefined, () => undefined);
    const title = findByClass(tree, "sidebar-title")[0];
    expect(collectText(title)).toBe(
      `${definitionList.kind} (${definitionList.items.length})`,
    );
  });

  it("renders an empty list without items", () => {
    expect(formulaList.items).toHaveLength(0);
    const tree = renderSidebar(formulaList, () => undefined, () => undefined);
    expect(findByClass(tree, "sidebar-item")).toHaveLength(0);
  });

  it("reports jumps and close clicks", () => {
    const jumped: string[] = [];
    let closed = 0;
    const tree = renderSidebar(
      usageList,
      (item) => jumped.push(item.source),
      () => {
        closed += 1;
      },
    );
    findByClass(tree, "sidebar-item")[0].on.click?.({});
    findByClass(tree, "sidebar-close")[0].on.click?.({});
    expect(jumped).toEqual([usageList.items[0].source]);
    expect(closed).toBe(1);
  });
});
