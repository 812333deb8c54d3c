import { describe, expect, it } from "vitest";

import { hitCandidates, selectAt } from "../src/select";
import type { EntitiesPayload, Entity, PageBox } from "../src/types";
import { loadFixture } from "./helpers";

const entities = loadFixture<EntitiesPayload>("entities.json").entities;

function byId(id: string): Entity {
  const entity = entities.find((e) => e.id === id);
  expect(entity).toBeDefined();
  return entity!;
}

function center(box: PageBox): [number, number] {
  return [box.left + box.width / 2, box.top + box.height / 2];
}

/** A composite whose child has its own boxed occurrence inside it. */
function compositeCase(): { parent: Entity; child: Entity; point: [number, number]; page: number } {
  for (const parent of entities) {
    if (parent.children.length === 0) {
      continue;
    }
    for (const childId of parent.children) {
      const child = entities.find((e) => e.id === childId);
      if (child === undefined) {
        continue;
      }
      for (const occurrence of child.occurrences) {
        for (const box of occurrence.boxes) {
          const [x, y] = center(box);
          const covered = parent.occurrences.some((po) =>
            po.boxes.some(
              (pb) =>
                pb.page === box.page &&
                x >= pb.left &&
                x <= pb.left + pb.width &&
                y >= pb.top &&
                y <= pb.top + pb.height,
            ),
          );
          if (covered) {
            return { parent, child, point: [x, y], page: box.page };
          }
        }
      }
    }
  }
  throw new Error("fixture has no nested composite with boxed children");
}

describe("hitCandidates", () => {
  it("finds both the composite and its child under a nested point", () => {
    const { parent, child, point, page } = compositeCase();
    const ids = hitCandidates(entities, page, point[0], point[1]).map(
      (c) => c.entity.id,
    );
    expect(ids).toContain(parent.id);
    expect(ids).toContain(child.id);
  });

  it("finds nothing in the page margin", () => {
    expect(hitCandidates(entities, 0, 0.001, 0.001)).toEqual([]);
  });
});

describe("selectAt", () => {
  it("selects the outermost entity on the first click", () => {
    const { parent, point, page } = compositeCase();
    const hit = selectAt(entities, page, point[0], point[1], null);
    expect(hit).not.toBeNull();
    expect(hit!.entity).toBe(parent.id);
  });

  it("refines into the child on a second click at the same point", () => {
    const { parent, child, point, page } = compositeCase();
    const first = selectAt(entities, page, point[0], point[1], null);
    const second = selectAt(entities, page, point[0], point[1], first!.entity);
    expect(first!.entity).toBe(parent.id);
    expect(second!.entity).toBe(child.id);
  });

  it("restarts at the outermost entity when the click leaves the selection", () => {
    const { parent, point, page } = compositeCase();
    const other = entities.find(
      (e) =>
        e.id !== parent.id &&
        !parent.children.includes(e.id) &&
        e.occurrences.some((o) => o.boxes.length > 0),
    );
    expect(other).toBeDefined();
    const hit = selectAt(entities, page, point[0], point[1], other!.id);
    expect(hit!.entity).toBe(parent.id);
  });

  it("returns null on empty paper so the caller can deselect", () => {
    expect(selectAt(entities, 0, 0.001, 0.001, "s3")).toBeNull();
  });

  it("resolves a plain symbol directly", () => {
    const plain = entities.find(
      (e) =>
        e.children.length === 0 &&
        e.occurrences.some((o) => o.boxes.length > 0) &&
        !entities.some((p) => p.children.includes(e.id)),
    );
    expect(plain).toBeDefined();
    const box = plain!.occurrences.find((o) => o.boxes.length > 0)!.boxes[0];
    const [x, y] = center(box);
    const hit = selectAt(entities, box.page, x, y, null);
    expect(hit).not.toBeNull();
  });
});

describe("occurrence reporting", () => {
  it("returns the occurrence whose box was clicked", () => {
    const { parent, point, page } = compositeCase();
    const hit = selectAt(entities, page, point[0], point[1], null);
    const occurrence = byId(parent.id).occurrences.find(
      (o) => o.id === hit!.occurrence,
    );
    expect(occurrence).toBeDefined();
    expect(
      occurrence!.boxes.some(
        (b) =>
          b.page === page &&
          point[0] >= b.left &&
          point[0] <= b.left + b.width &&
          point[1] >= b.top &&
          point[1] <= b.top + b.height,
      ),
    ).toBe(true);
  });
});
