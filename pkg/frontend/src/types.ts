/**
 * Payload shapes served by the annotation service.
 *
 * Every geometric quantity is a page fraction: `left` and `width` are
 * divided by the page width, `top` and `height` by the page height.
 * The overlay converts to pixels only at render time, so the same
 * payload works at any zoom level.
 */

export interface PageBox {
  page: number;
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface SourceSpan {
  file: string;
  start: number;
  end: number;
}

export interface EntityCounts {
  definitions: number;
  formulae: number;
  usages: number;
}

export interface Occurrence {
  id: string;
  position: number;
  sentence: string | null;
  equation: string | null;
  record: string | null;
  boxes: PageBox[];
  multibox: boolean;
  underline: boolean;
}

export interface Entity {
  id: string;
  key: string;
  kind: string;
  tex: string;
  localized: boolean;
  children: string[];
  counts: EntityCounts;
  occurrences: Occurrence[];
}

export interface EntitiesPayload {
  paper: string;
  entities: Entity[];
}

export interface DefinitionRecord {
  entity: string;
  definiens: string;
  kind: string;
  source: string;
  position: number;
}

export interface ContextLink {
  sentence: string | null;
  equation: string | null;
  page: number | null;
}

export type DefinitionStatus = "definition" | "defined_here" | "none";

export interface DefinitionView {
  paper: string;
  entity: string;
  position: number;
  status: DefinitionStatus;
  record: DefinitionRecord | null;
  forward: boolean;
  context_link: ContextLink | null;
  counts: EntityCounts;
}

export interface ListItem {
  source: string;
  kind: string;
  page: number | null;
  text: string;
  highlights: [number, number][];
  definiens?: string;
}

export type ListKind = "definitions" | "formulae" | "usages";

export interface ListPayload {
  paper: string;
  entity: string;
  kind: string;
  items: ListItem[];
}

export interface DeclutterRegion {
  page: number;
  boxes: PageBox[];
}

export interface DeclutterPayload {
  paper: string;
  entity: string;
  localized: boolean;
  regions: DeclutterRegion[];
}

export interface DiagramLabel {
  entity: string;
  record: string;
  side: "top" | "bottom";
  row: number;
  anchor: number;
  text: string;
  box: PageBox;
}

export interface DiagramLeader {
  entity: string;
  from: [number, number];
  to: [number, number];
}

export interface DiagramPayload {
  paper: string;
  equation: string;
  page: number;
  labels: DiagramLabel[];
  leaders: DiagramLeader[];
}

export interface GlossaryEntry {
  entity: string;
  key: string;
  kind: string;
  tex: string;
  first_position: number;
  definitions: DefinitionRecord[];
}

export interface GlossaryPayload {
  paper: string;
  entries: GlossaryEntry[];
}

/* Manifest shapes, for overlays that read the build artifact directly. */

export interface ManifestSentence {
  id: string;
  kind: string;
  text: string;
  span: SourceSpan;
  math_refs: string[];
  boxes: PageBox[];
}

export interface SymbolRecord {
  id: string;
  key: string;
  kind: string;
  tex: string;
  parent: string | null;
  children: string[];
  spans: [number, number][];
  boxes: PageBox[];
}

export interface ManifestEquation {
  id: string;
  body: string;
  display: boolean;
  span: SourceSpan;
  body_span: SourceSpan;
  boxes: PageBox[];
  symbols: SymbolRecord[];
}

export interface Manifest {
  version: number;
  paper: { id: string; pages: number };
  sentences: ManifestSentence[];
  equations: ManifestEquation[];
  entities: Entity[];
  definitions: Record<string, DefinitionRecord[]>;
  usages: Record<string, { occurrences: number; sentences: string[] }>;
}
