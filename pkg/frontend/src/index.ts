/**
 * Browser bootstrap.
 *
 * Expects a host page with one element per rendered paper page marked
 * `data-reader-page="N"` and a positioned container `#reader-overlay`
 * to draw into. Which paper to load, and from where, comes from the
 * query string: `?paper=<id>&service=<base-url>`.
 */

import { configFromQuery, ReaderClient, SelectionGate } from "./api";
import { renderDeclutterBar, renderDeclutterMask, matchTargets, MatchNavigator } from "./declutter";
import { renderDiagram } from "./diagram";
import { scrollTargetFor, type PageViewport } from "./geometry";
import { renderGlossary } from "./glossary";
import { jumpToContext, NavigationHistory } from "./history";
import { renderScentLayer, scentUnderlines } from "./scent";
import { selectAt } from "./select";
import { renderSidebar } from "./sidebar";
import * as state from "./state";
import { bodyText, layoutTooltip, renderTooltip } from "./tooltip";
import type { Entity, PageBox } from "./types";
import { h, mount, type VNode } from "./vdom";

function pageViewports(doc: Document): PageViewport[] {
  const nodes = Array.from(
    doc.querySelectorAll<HTMLElement>("[data-reader-page]"),
  );
  nodes.sort(
    (a, b) =>
      Number(a.dataset.readerPage ?? 0) - Number(b.dataset.readerPage ?? 0),
  );
  return nodes.map((node) => ({
    originX: node.offsetLeft,
    originY: node.offsetTop,
    width: node.offsetWidth,
    height: node.offsetHeight,
  }));
}

function showToast(doc: Document, message: string): void {
  const toast = doc.createElement("div");
  toast.className = "reader-toast";
  toast.textContent = message;
  doc.body.appendChild(toast);
  setTimeout(() => toast.remove(), 2500);
}

export async function boot(win: Window & typeof globalThis): Promise<void> {
  const doc = win.document;
  const overlayRoot = doc.getElementById("reader-overlay");
  if (overlayRoot === null) {
    return;
  }
  const client = new ReaderClient(configFromQuery(win.location.search));
  const gate = new SelectionGate();
  const history = new NavigationHistory();
  const pages = pageViewports(doc);

  let entities: Entity[] = [];
  let current = state.initialState();
  let featureTree: VNode | null = null;
  let navigator = new MatchNavigator([]);

  const entityById = (id: string): Entity | undefined =>
    entities.find((e) => e.id === id);

  function redraw(): void {
    overlayRoot!.replaceChildren();
    const scent = renderScentLayer(
      scentUnderlines(entities, current.scentEnabled),
      pages,
      (entity, occurrence) => void openTooltip(entity, occurrence),
    );
    overlayRoot!.appendChild(mount(scent, doc));
    if (featureTree !== null) {
      overlayRoot!.appendChild(mount(featureTree, doc));
    }
  }

  function scrollTo(target: { x: number; y: number }): void {
    win.scrollTo(target.x, target.y);
  }

  function anchorRect(box: PageBox) {
    const vp = pages[box.page] ?? pages[0];
    return {
      x: vp.originX + box.left * vp.width,
      y: vp.originY + box.top * vp.height,
      width: box.width * vp.width,
      height: box.height * vp.height,
    };
  }

  async function openTooltip(entityId: string, occurrenceId: string): Promise<void> {
    const entity = entityById(entityId);
    const occurrence = entity?.occurrences.find((o) => o.id === occurrenceId);
    if (entity === undefined || occurrence === undefined) {
      return;
    }
    current = state.openTooltip(current, entityId, occurrenceId);
    const token = gate.begin();
    const view = await gate.settle(
      token,
      client.definition(entityId, occurrence.position),
    );
    if (view === null || current.feature.kind !== "tooltip") {
      return;
    }
    const box = occurrence.boxes[0];
    if (box === undefined) {
      return;
    }
    const vp = pages[box.page] ?? pages[0];
    const pageRect = { x: vp.originX, y: vp.originY, width: vp.width, height: vp.height };
    const layout = layoutTooltip(bodyText(view), anchorRect(box), pageRect);
    featureTree = renderTooltip(view, layout, {
      onClose: () => {
        current = state.closeFeature(current);
        featureTree = null;
        redraw();
      },
      onContext: () => {
        const link = view.context_link;
        const sentenceBox =
          link === null || link.page === null
            ? undefined
            : { page: link.page, left: 0, top: 0, width: 1, height: 0 };
        if (sentenceBox === undefined) {
          showToast(doc, "This definition could not be located on the page.");
          return;
        }
        const target = scrollTargetFor(sentenceBox, pages);
        scrollTo(
          jumpToContext(
            history,
            { x: win.scrollX, y: win.scrollY },
            { entity: entityId, occurrence: occurrenceId },
            target,
          ),
        );
      },
      onList: (kind) => void openSidebar(entityId, kind),
    });
    redraw();
  }

  async function openSidebar(
    entityId: string,
    kind: "definitions" | "formulae" | "usages",
  ): Promise<void> {
    const token = gate.begin();
    const payload = await gate.settle(token, client.list(entityId, kind));
    if (payload === null) {
      return;
    }
    current = state.openSidebar(current, entityId, kind);
    featureTree = renderSidebar(
      payload,
      (item) => {
        if (item.page === null) {
          showToast(doc, "This passage has no position on the page.");
          return;
        }
        scrollTo(
          scrollTargetFor(
            { page: item.page, left: 0, top: 0, width: 1, height: 0 },
            pages,
          ),
        );
      },
      () => {
        current = state.closeFeature(current);
        featureTree = null;
        redraw();
      },
    );
    redraw();
  }

  async function toggleDeclutter(): Promise<void> {
    const before = current;
    current = state.toggleDeclutter(current);
    if (current.feature.kind !== "declutter") {
      if (before.feature.kind === "declutter") {
        featureTree = null;
        redraw();
      }
      return;
    }
    const entityId = current.feature.entity;
    const entity = entityById(entityId);
    const token = gate.begin();
    const payload = await gate.settle(token, client.declutter(entityId));
    if (payload === null || current.feature.kind !== "declutter") {
      return;
    }
    navigator = new MatchNavigator(entity === undefined ? [] : matchTargets(entity));
    const mask = renderDeclutterMask(payload, pages);
    const bar = renderDeclutterBar(navigator, {
      onNext: () => {
        const target = navigator.next();
        if (target !== null) {
          scrollTo(scrollTargetFor(target.box, pages));
        }
      },
      onPrev: () => {
        const target = navigator.prev();
        if (target !== null) {
          scrollTo(scrollTargetFor(target.box, pages));
        }
      },
      onClose: () => {
        current = state.closeFeature(current);
        featureTree = null;
        redraw();
      },
    });
    featureTree = h("div", { class: "declutter" }, [mask, bar]);
    redraw();
  }

  async function openDiagram(equationId: string): Promise<void> {
    const token = gate.begin();
    const plan = await gate.settle(token, client.diagram(equationId));
    if (plan === null) {
      return;
    }
    current = state.openDiagram(current, equationId);
    const vp = pages[plan.page] ?? pages[0];
    featureTree = renderDiagram(plan, vp, {
      onHover: (entityId) => {
        overlayRoot!
          .querySelectorAll(".diagram-label.saturated, .diagram-leader.saturated")
          .forEach((el) => el.classList.remove("saturated"));
        if (entityId !== null) {
          overlayRoot!
            .querySelectorAll(`[data-entity="${entityId}"]`)
            .forEach((el) => el.classList.add("saturated"));
        }
      },
      onSelect: (entityId) => {
        const entity = entityById(entityId);
        const occurrence = entity?.occurrences.find(
          (o) => o.equation === equationId,
        );
        if (occurrence !== undefined) {
          void openTooltip(entityId, occurrence.id);
        }
      },
    });
    redraw();
  }

  async function openGlossary(): Promise<void> {
    const token = gate.begin();
    const payload = await gate.settle(token, client.glossary());
    if (payload === null) {
      return;
    }
    current = state.openGlossary(current);
    featureTree = renderGlossary(payload, (entry) => {
      const entity = entityById(entry.entity);
      const box = entity?.occurrences[0]?.boxes[0];
      if (box === undefined) {
        showToast(doc, "This entry could not be located on the page.");
        return;
      }
      scrollTo(scrollTargetFor(box, pages));
    });
    redraw();
  }

  doc.addEventListener("click", (event) => {
    const mouse = event as MouseEvent;
    const hitPage = pages.findIndex(
      (vp) =>
        mouse.pageX >= vp.originX &&
        mouse.pageX <= vp.originX + vp.width &&
        mouse.pageY >= vp.originY &&
        mouse.pageY <= vp.originY + vp.height,
    );
    if (hitPage < 0) {
      return;
    }
    const vp = pages[hitPage];
    const x = (mouse.pageX - vp.originX) / vp.width;
    const y = (mouse.pageY - vp.originY) / vp.height;
    const hit = selectAt(entities, hitPage, x, y, current.selection?.entity ?? null);
    if (hit === null) {
      current = state.deselect(current);
      featureTree = null;
      redraw();
      return;
    }
    void openTooltip(hit.entity, hit.occurrence);
  });

  doc.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    if (key === "Escape") {
      current = state.escape(current);
      featureTree = null;
      redraw();
    } else if (current.feature.kind === "declutter" && key === "ArrowDown") {
      const target = navigator.next();
      if (target !== null) {
        scrollTo(scrollTargetFor(target.box, pages));
      }
    } else if (current.feature.kind === "declutter" && key === "ArrowUp") {
      const target = navigator.prev();
      if (target !== null) {
        scrollTo(scrollTargetFor(target.box, pages));
      }
    } else if (key === "Backspace" && current.feature.kind === "none") {
      const entry = history.back();
      if (entry !== null) {
        scrollTo(entry.scroll);
        if (entry.reopen !== null) {
          void openTooltip(entry.reopen.entity, entry.reopen.occurrence);
        }
      }
    }
  });

  doc.getElementById("reader-declutter")?.addEventListener("click", () => {
    void toggleDeclutter();
  });
  doc.getElementById("reader-glossary")?.addEventListener("click", () => {
    void openGlossary();
  });
  doc.getElementById("reader-scent")?.addEventListener("click", () => {
    current = state.toggleScent(current);
    redraw();
  });
  doc.querySelectorAll<HTMLElement>("[data-reader-equation]").forEach((el) => {
    el.addEventListener("dblclick", () => {
      const id = el.dataset.readerEquation;
      if (id !== undefined) {
        void openDiagram(id);
      }
    });
  });

  const payload = await client.entities();
  entities = payload.entities;
  redraw();
}

declare global {
  interface Window {
    paperglossBoot?: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.paperglossBoot = boot;
  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", () => void boot(window));
  } else {
    void boot(window);
  }
}
