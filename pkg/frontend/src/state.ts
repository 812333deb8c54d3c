/**
 * Overlay interface state.
 *
 * The state is a plain immutable value updated by pure transitions, so
 * every interaction rule here can be exercised without a browser. Two
 * invariants hold by construction: at most one feature panel is open at
 * a time (opening a tooltip closes any other tooltip), and decluttered
 * reading is only ever active while an entity is selected.
 */

export type Feature =
  | { kind: "none" }
  | { kind: "tooltip"; entity: string; occurrence: string }
  | { kind: "declutter"; entity: string }
  | { kind: "diagram"; equation: string }
  | { kind: "sidebar"; entity: string; list: "definitions" | "formulae" | "usages" }
  | { kind: "glossary" };

export interface Selection {
  entity: string;
  occurrence: string | null;
}

export type FindBarMode = "default" | "symbol";

export interface OverlayState {
  selection: Selection | null;
  feature: Feature;
  /** Bumped on every selection change; stale async work checks it. */
  generation: number;
  scentEnabled: boolean;
  findBar: FindBarMode;
}

export function initialState(): OverlayState {
  return {
    selection: null,
    feature: { kind: "none" },
    generation: 0,
    scentEnabled: true,
    findBar: "default",
  };
}

/**
 * Select an entity. The find bar swaps to symbol mode and any feature
 * tied to the previous selection closes.
 */
export function select(
  state: OverlayState,
  entity: string,
  occurrence: string | null = null,
): OverlayState {
  return {
    ...state,
    selection: { entity, occurrence },
    feature: { kind: "none" },
    generation: state.generation + 1,
    findBar: "symbol",
  };
}

/** Clear the selection and restore the default find bar. */
export function deselect(state: OverlayState): OverlayState {
  return {
    ...state,
    selection: null,
    feature: { kind: "none" },
    generation: state.generation + 1,
    findBar: "default",
  };
}

export function openTooltip(
  state: OverlayState,
  entity: string,
  occurrence: string,
): OverlayState {
  const sameEntity = state.selection?.entity === entity;
  return {
    ...state,
    selection: { entity, occurrence },
    feature: { kind: "tooltip", entity, occurrence },
    generation: sameEntity ? state.generation : state.generation + 1,
    findBar: "symbol",
  };
}

export function closeFeature(state: OverlayState): OverlayState {
  if (state.feature.kind === "none") {
    return state;
  }
  return { ...state, feature: { kind: "none" } };
}

/**
 * Toggle decluttered reading for the selected entity. Without a
 * selection there is nothing to keep, so the request is a no-op.
 */
export function toggleDeclutter(state: OverlayState): OverlayState {
  if (state.feature.kind === "declutter") {
    return { ...state, feature: { kind: "none" } };
  }
  if (state.selection === null) {
    return state;
  }
  return {
    ...state,
    feature: { kind: "declutter", entity: state.selection.entity },
  };
}

export function openDiagram(state: OverlayState, equation: string): OverlayState {
  return { ...state, feature: { kind: "diagram", equation } };
}

export function openSidebar(
  state: OverlayState,
  entity: string,
  list: "definitions" | "formulae" | "usages",
): OverlayState {
  return { ...state, feature: { kind: "sidebar", entity, list } };
}

export function openGlossary(state: OverlayState): OverlayState {
  return { ...state, feature: { kind: "glossary" } };
}

export function toggleScent(state: OverlayState): OverlayState {
  return { ...state, scentEnabled: !state.scentEnabled };
}

/** Escape dismisses the tooltip or the declutter mask, nothing else. */
export function escape(state: OverlayState): OverlayState {
  if (state.feature.kind === "tooltip" || state.feature.kind === "declutter") {
    return { ...state, feature: { kind: "none" } };
  }
  return state;
}
