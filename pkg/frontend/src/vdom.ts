/**
 * A minimal virtual-node layer.
 *
 * Render functions in this package build plain trees of `VNode` objects
 * instead of touching the DOM, which keeps them runnable (and testable)
 * outside a browser. `mount` turns a tree into real elements when a
 * document is available.
 */

export type EventHandler = (event: unknown) => void;

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  style: Record<string, string>;
  on: Record<string, EventHandler>;
  children: (VNode | string)[];
}

export interface NodeOptions {
  style?: Record<string, string>;
  on?: Record<string, EventHandler>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: (VNode | string)[] = [],
  options: NodeOptions = {},
): VNode {
  return {
    tag,
    attrs,
    style: options.style ?? {},
    on: options.on ?? {},
    children,
  };
}

/** Depth-first list of every node matching the predicate, root included. */
export function findAll(
  root: VNode,
  match: (node: VNode) => boolean,
): VNode[] {
  const out: VNode[] = [];
  const stack: VNode[] = [root];
  while (stack.length > 0) {
    const node = stack.pop() as VNode;
    if (match(node)) {
      out.push(node);
    }
    for (let i = node.children.length - 1; i >= 0; i -= 1) {
      const child = node.children[i];
      if (typeof child !== "string") {
        stack.push(child);
      }
    }
  }
  return out;
}

export function findByClass(root: VNode, name: string): VNode[] {
  return findAll(root, (node) =>
    (node.attrs.class ?? "").split(/\s+/).includes(name),
  );
}

/** Concatenated text content of a subtree, in document order. */
export function collectText(node: VNode | string): string {
  if (typeof node === "string") {
    return node;
  }
  return node.children.map(collectText).join("");
}

export function mount(node: VNode, doc: Document): HTMLElement {
  const el = doc.createElement(node.tag);
  for (const [name, value] of Object.entries(node.attrs)) {
    el.setAttribute(name, value);
  }
  for (const [prop, value] of Object.entries(node.style)) {
    el.style.setProperty(prop, value);
  }
  for (const [event, handler] of Object.entries(node.on)) {
    el.addEventListener(event, handler);
  }
  for (const child of node.children) {
    if (typeof child === "string") {
      el.appendChild(doc.createTextNode(child));
    } else {
      el.appendChild(mount(child, doc));
    }
  }
  return el;
}
