/**
 * In-overlay navigation history.
 *
 * Jumping to a definition context pushes the reader's current scroll
 * position (and the tooltip that triggered the jump) onto a stack; the
 * back control pops it, restoring the exact position and reopening the
 * tooltip so the reading thread is not lost.
 */

export interface ScrollPosition {
  x: number;
  y: number;
}

export interface ReopenTooltip {
  entity: string;
  occurrence: string;
}

export interface HistoryEntry {
  scroll: ScrollPosition;
  reopen: ReopenTooltip | null;
}

export class NavigationHistory {
  private readonly stack: HistoryEntry[] = [];

  get depth(): number {
    return this.stack.length;
  }

  push(entry: HistoryEntry): void {
    this.stack.push({
      scroll: { ...entry.scroll },
      reopen: entry.reopen === null ? null : { ...entry.reopen },
    });
  }

  back(): HistoryEntry | null {
    const entry = this.stack.pop();
    return entry ?? null;
  }
}

/**
 * Record the departure point and hand back the scroll target. The
 * caller applies the returned position; `history.back()` later returns
 * the recorded entry verbatim.
 */
export function jumpToContext(
  history: NavigationHistory,
  current: ScrollPosition,
  tooltip: ReopenTooltip | null,
  target: ScrollPosition,
): ScrollPosition {
  history.push({ scroll: current, reopen: tooltip });
  return { ...target };
}
