/**
 * Click-to-select hit testing.
 *
 * A first click on a composite expression selects the outermost entity
 * whose box contains the point; clicking again refines the selection to
 * the child under the cursor, so a subscript or accent can be reached
 * with two clicks. Clicking empty paper clears the selection.
 */

import type { Entity, Occurrence, PageBox } from "./types";

export interface HitCandidate {
  entity: Entity;
  occurrence: Occurrence;
  box: PageBox;
}

function boxContains(box: PageBox, page: number, x: number, y: number): boolean {
  return (
    box.page === page &&
    x >= box.left &&
    x <= box.left + box.width &&
    y >= box.top &&
    y <= box.top + box.height
  );
}

/** Every (entity, occurrence, box) triple whose box contains the point. */
export function hitCandidates(
  entities: Entity[],
  page: number,
  x: number,
  y: number,
): HitCandidate[] {
  const out: HitCandidate[] = [];
  for (const entity of entities) {
    for (const occurrence of entity.occurrences) {
      for (const box of occurrence.boxes) {
        if (boxContains(box, page, x, y)) {
          out.push({ entity, occurrence, box });
          break;
        }
      }
    }
  }
  return out;
}

function parentMap(entities: Entity[]): Map<string, string> {
  const parents = new Map<string, string>();
  for (const entity of entities) {
    for (const child of entity.children) {
      parents.set(child, entity.id);
    }
  }
  return parents;
}

function outermost(
  candidates: HitCandidate[],
  parents: Map<string, string>,
): HitCandidate | null {
  const present = new Set(candidates.map((c) => c.entity.id));
  const top = candidates.filter((candidate) => {
    let cursor = parents.get(candidate.entity.id);
    while (cursor !== undefined) {
      if (present.has(cursor)) {
        return false;
      }
      cursor = parents.get(cursor);
    }
    return true;
  });
  if (top.length === 0) {
    return null;
  }
  top.sort(
    (a, b) =>
      a.box.width * a.box.height - b.box.width * b.box.height ||
      a.entity.id.localeCompare(b.entity.id),
  );
  return top[0];
}

export interface SelectionResult {
  entity: string;
  occurrence: string;
}

/**
 * Resolve a click at page-fraction (x, y) into a selection, refining
 * into the current selection's children when the click lands inside
 * the already-selected entity.
 */
export function selectAt(
  entities: Entity[],
  page: number,
  x: number,
  y: number,
  current: string | null,
): SelectionResult | null {
  const candidates = hitCandidates(entities, page, x, y);
  if (candidates.length === 0) {
    return null;
  }
  const parents = parentMap(entities);

  if (current !== null) {
    const selected = entities.find((e) => e.id === current);
    const stillHit = candidates.some((c) => c.entity.id === current);
    if (selected !== undefined && stillHit) {
      const child = candidates.find((c) =>
        selected.children.includes(c.entity.id),
      );
      if (child !== undefined) {
        return { entity: child.entity.id, occurrence: child.occurrence.id };
      }
    }
  }

  const choice = outermost(candidates, parents);
  if (choice === null) {
    return null;
  }
  return { entity: choice.entity.id, occurrence: choice.occurrence.id };
}
