"""Hand-rolled PDF 1.4 writer: uncompressed rect-fill content streams only."""

from __future__ import annotations

from .layout import PAGE_H, PAGE_W, LayoutResult


def _content_stream(inks) -> bytes:
    ops: list[str] = []
    current = None
    for ink in inks:
        if ink.color != current:
            r, g, b = ink.color
            ops.append(f"{r / 255:.4f} {g / 255:.4f} {b / 255:.4f} rg")
            current = ink.color
        # PDF origin is bottom-left; ink.y is the top edge from the page top
        y_pdf = PAGE_H - ink.y - ink.h
        ops.append(f"{ink.x:.2f} {y_pdf:.2f} {ink.w:.2f} {ink.h:.2f} re f")
    return ("\n".join(ops) + "\n").encode("ascii") if ops else b""


def write_pdf(result: LayoutResult) -> bytes:
    per_page: dict[int, list] = {p: [] for p in range(result.pages)}
    for ink in result.inks:
        per_page[ink.page].append(ink)

    objects: list[bytes] = []  # 1-indexed object bodies, in object-number order
    page_ids = []
    content_ids = []
    next_id = 3
    for p in range(result.pages):
        page_ids.append(next_id)
        content_ids.append(next_id + 1)
        next_id += 2

    kids = " ".join(f"{pid} 0 R" for pid in page_ids)
    objects.append(b"<< /Type /Catalog /Pages 2 0 R >>")
    objects.append(
        f"<< /Type /Pages /Kids [{kids}] /Count {result.pages} >>".encode()
    )
    for p in range(result.pages):
        objects.append(
            (
                f"<< /Type /Page /Parent 2 0 R "
                f"/MediaBox [0 0 {PAGE_W:.0f} {PAGE_H:.0f}] "
                f"/Resources << >> /Contents {content_ids[p]} 0 R >>"
            ).encode()
        )
        stream = _content_stream(per_page[p])
        objects.append(
            f"<< /Length {len(stream)} >>\nstream\n".encode()
            + stream
            + b"endstream"
        )

    out = bytearray(b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n")
    offsets = [0]
    for num, body in enumerate(objects, start=1):
        offsets.append(len(out))
        out += f"{num} 0 obj\n".encode() + body + b"\nendobj\n"
    xref_at = len(out)
    out += f"xref\n0 {len(objects) + 1}\n".encode()
    out += b"0000000000 65535 f \n"
    for off in offsets[1:]:
        out += f"{off:010d} 00000 n \n".encode()
    out += (
        f"trailer\n<< /Size {len(objects) + 1} /Root 1 0 R >>\n"
        f"startxref\n{xref_at}\n%%EOF\n"
    ).encode()
    return bytes(out)
