"""Equation diagram layout: label selection, side balance, spacing, leaders.

The layout works entirely in page fractions.  Symbols with an available
definition (selected position-sensitively at the equation's location)
each get one label; labels split evenly between the top and bottom of
the equation, preferring the nearer side, and are spread horizontally
by an exact 1-D displacement minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .manifest import PaperManifest, select_definition


class UnlocalizedEquation(Exception):
    pass


@dataclass(frozen=True)
class DiagramConfig:
    label_height: float = 0.02
    char_width: float = 0.0065
    pad: float = 0.006
    # Fixed clearance between the equation's bounding box and the
    # nearest label row.
    margin: float = 0.012
    min_gap: float = 0.004
    row_gap: float = 0.004
    max_chars: int = 28
    left_bound: float = 0.04
    right_bound: float = 0.96


DEFAULT_CONFIG = DiagramConfig()


@dataclass
class LabelPlacement:
    entity: str
    record: str  # symbol record id inside the equation
    side: str  # top | bottom
    row: int
    anchor: float
    text: str
    box: dict  # page-fraction rectangle

    def to_json(self) -> dict:
        return {
            "entity": self.entity,
            "record": self.record,
            "side": self.side,
            "row": self.row,
            "anchor": self.anchor,
            "text": self.text,
            "box": self.box,
        }


@dataclass
class LeaderLine:
    entity: str
    start: tuple[float, float]  # on the label box edge
    end: tuple[float, float]  # symbol box center

    def to_json(self) -> dict:
        return {
            "entity": self.entity,
            "from": [round(v, 6) for v in self.start],
            "to": [round(v, 6) for v in self.end],
        }


@dataclass
class DiagramPlan:
    equation: str
    page: int
    labels: list[LabelPlacement] = field(default_factory=list)
    leaders: list[LeaderLine] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "equation": self.equation,
            "page": self.page,
            "labels": [l.to_json() for l in self.labels],
            "leaders": [l.to_json() for l in self.leaders],
        }


# --- spacing ---------------------------------------------------------------


def _pava(values: list[float]) -> list[float]:
    """Isotonic (non-decreasing) least-squares fit by pooling violators."""
    blocks: list[list[float]] = []
    for v in values:
        blocks.append([v, 1.0])
        while len(blocks) > 1 and blocks[-2][0] / blocks[-2][1] >= blocks[-1][0] / blocks[-1][1]:
            s, c = blocks.pop()
            blocks[-1][0] += s
            blocks[-1][1] += c
    out: list[float] = []
    for s, c in blocks:
        out.extend([s / c] * int(c))
    return out


def space_labels(
    anchors: list[float],
    widths: list[float],
    lo: float = 0.0,
    hi: float = 1.0,
    min_gap: float = 0.0,
) -> list[float]:
    """Overlap-free label centers minimizing total squared displacement.

    Inputs must be sorted by anchor.  The spacing constraint between
    neighbors i and i+1 is (w_i + w_{i+1})/2 + min_gap; subtracting the
    cumulative offsets turns the problem into bounded isotonic
    regression, solved exactly by pool-adjacent-violators plus clipping
    to the running bound envelopes.
    """
    n = len(anchors)
    if n == 0:
        return []
    if len(widths) != n:
        raise ValueError("anchors and widths differ in length")
    if any(anchors[i] > anchors[i + 1] for i in range(n - 1)):
        raise ValueError("anchors must be sorted")
    needed = sum(widths) + min_gap * (n - 1)
    if needed > hi - lo + 1e-12:
        raise OverflowError(
            f"labels need {needed:.4f} of width but only {hi - lo:.4f} available"
        )

    offsets = [0.0]
    for i in range(1, n):
        offsets.append(offsets[-1] + (widths[i - 1] + widths[i]) / 2 + min_gap)

    targets = [anchors[i] - offsets[i] for i in range(n)]
    lower = [lo + widths[i] / 2 - offsets[i] for i in range(n)]
    upper = [hi - widths[i] / 2 - offsets[i] for i in range(n)]
    run_lower = []
    acc = float("-inf")
    for v in lower:
        acc = max(acc, v)
        run_lower.append(acc)
    run_upper = [0.0] * n
    acc = float("inf")
    for i in range(n - 1, -1, -1):
        acc = min(acc, upper[i])
        run_upper[i] = acc

    fit = _pava(targets)
    clipped = [min(max(fit[i], run_lower[i]), run_upper[i]) for i in range(n)]
    return [clipped[i] + offsets[i] for i in range(n)]


# --- planning --------------------------------------------------------------


def _truncate(text: str, budget: int) -> str:
    if len(text) <= budget:
        return text
    return text[: budget - 1].rstrip() + "…"


def _box_center(box: dict) -> tuple[float, float]:
    return (box["left"] + box["width"] / 2, box["top"] + box["height"] / 2)


def _pack_rows(items: list[dict], budget: float, min_gap: float) -> list[list[dict]]:
    """Greedy fill, in anchor order; a label that no longer fits opens
    the next row."""
    rows: list[list[dict]] = [[]]
    used = 0.0
    for item in items:
        extra = item["width"] + (min_gap if rows[-1] else 0.0)
        if rows[-1] and used + extra > budget:
            rows.append([])
            used = 0.0
            extra = item["width"]
        rows[-1].append(item)
        used += extra
    return [r for r in rows if r]


def plan_diagram(
    manifest: PaperManifest,
    equation_id: str,
    position: int | None = None,
    config: DiagramConfig = DEFAULT_CONFIG,
) -> DiagramPlan:
    equation = manifest.equations.get(equation_id)
    if equation is None:
        raise KeyError(equation_id)
    eq_boxes = equation.get("boxes", [])
    if not eq_boxes:
        raise UnlocalizedEquation(equation_id)
    if position is None:
        position = equation["span"]["start"]

    page = eq_boxes[0]["page"]
    page_boxes = [b for b in eq_boxes if b["page"] == page]
    eq_top = min(b["top"] for b in page_boxes)
    eq_bottom = max(b["top"] + b["height"] for b in page_boxes)
    eq_center_y = (eq_top + eq_bottom) / 2

    candidates = []
    seen_keys = set()
    for record in equation.get("symbols", []):
        key = record["key"]
        if key in seen_keys:
            continue
        boxes = [b for b in record.get("boxes", []) if b["page"] == page]
        if not boxes:
            continue
        entity = manifest.entity_by_key.get(f"symbol:{key}")
        if entity is None:
            continue
        view = select_definition(manifest, entity["id"], position)
        if view.record is None:
            continue
        seen_keys.add(key)
        cx, cy = _box_center(boxes[0])
        text = _truncate(view.record["definiens"], config.max_chars)
        candidates.append(
            {
                "entity": entity["id"],
                "record": record["id"],
                "anchor": cx,
                "center": (cx, cy),
                "text": text,
                "width": len(text) * config.char_width + 2 * config.pad,
                "score": cy - eq_center_y,
            }
        )

    plan = DiagramPlan(equation=equation_id, page=page)
    return layout_labels(plan, candidates, eq_top, eq_bottom, config)


def layout_labels(
    plan: DiagramPlan,
    candidates: list[dict],
    eq_top: float,
    eq_bottom: float,
    config: DiagramConfig = DEFAULT_CONFIG,
) -> DiagramPlan:
    """Side split, row packing, spacing, and leaders for one candidate set.

    Each candidate dict carries entity, record, anchor, center, text,
    width, and score (signed vertical offset from the equation center).
    Labels and leaders are appended to the plan in place.
    """
    if not candidates:
        return plan
    page = plan.page

    # Even split; the odd label goes with its preference when possible.
    n = len(candidates)
    by_score = sorted(candidates, key=lambda c: (c["score"], c["anchor"], c["entity"]))
    prefer_top = sum(1 for c in candidates if c["score"] <= 0)
    top_count = max(n // 2, min((n + 1) // 2, prefer_top))
    top = by_score[:top_count]
    bottom = by_score[top_count:]

    budget = config.right_bound - config.left_bound
    for side, members in (("top", top), ("bottom", bottom)):
        members = sorted(members, key=lambda c: (c["anchor"], c["entity"]))
        for row_idx, row in enumerate(_pack_rows(members, budget, config.min_gap)):
            centers = space_labels(
                [c["anchor"] for c in row],
                [c["width"] for c in row],
                config.left_bound,
                config.right_bound,
                config.min_gap,
            )
            if side == "top":
                box_top = (
                    eq_top
                    - config.margin
                    - (row_idx + 1) * config.label_height
                    - row_idx * config.row_gap
                )
            else:
                box_top = (
                    eq_bottom
                    + config.margin
                    + row_idx * (config.label_height + config.row_gap)
                )
            box_top = min(max(box_top, 0.0), 1.0 - config.label_height)
            for c, center in zip(row, centers):
                box = {
                    "page": page,
                    "left": round(center - c["width"] / 2, 6),
                    "top": round(box_top, 6),
                    "width": round(c["width"], 6),
                    "height": config.label_height,
                }
                plan.labels.append(
                    LabelPlacement(
                        entity=c["entity"],
                        record=c["record"],
                        side=side,
                        row=row_idx,
                        anchor=round(c["anchor"], 6),
                        text=c["text"],
                        box=box,
                    )
                )
                if side == "top":
                    start = (center, box_top + config.label_height)
                else:
                    start = (center, box_top)
                plan.leaders.append(
                    LeaderLine(entity=c["entity"], start=start, end=c["center"])
                )
    return plan
