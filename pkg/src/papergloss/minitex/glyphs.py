"""Glyph ink geometry on a 6pt monospace cell.

Rectangles are (x0, top, x1, bottom) in points relative to the glyph origin
at the baseline; negative y is above the baseline.  Every printable char gets
ink; the default is a 4x7 block with 1pt side bearings, which leaves a 2pt
gap between adjacent cells so neighboring glyphs never fuse into one blob.

"i" and "j" are drawn as a dot over a stem with a 1pt blank band between
them, so a single letter deliberately produces two connected components.
"""

ADVANCE = 6.0
ASCENT = 7.0

_BLOCK = ((1.0, -7.0, 5.0, 0.0),)

_SPECIAL = {
    " ": (),
    "i": ((2.0, -7.0, 4.0, -5.5), (2.0, -4.5, 4.0, 0.0)),
    "j": ((2.0, -7.0, 4.0, -5.5), (2.0, -4.5, 4.0, 0.0)),
    ".": ((2.0, -1.5, 4.0, 0.0),),
    ",": ((2.0, -1.5, 4.0, 0.5),),
    ":": ((2.0, -5.0, 4.0, -3.5), (2.0, -1.5, 4.0, 0.0)),
    ";": ((2.0, -5.0, 4.0, -3.5), (2.0, -1.5, 4.0, 0.5)),
    "-": ((1.0, -4.0, 5.0, -3.0),),
    "=": ((1.0, -4.5, 5.0, -3.5), (1.0, -2.5, 5.0, -1.5)),
    "+": ((1.0, -4.0, 5.0, -3.0), (2.5, -5.5, 3.5, -1.5)),
    "'": ((2.5, -7.0, 3.5, -5.0),),
    "`": ((2.5, -7.0, 3.5, -5.0),),
    "_": ((1.0, -0.5, 5.0, 0.5),),
    "~": ((1.0, -4.5, 5.0, -3.5),),
}


def glyph_ink(ch: str):
    if ch in _SPECIAL:
        return _SPECIAL[ch]
    if ch.isspace():
        return ()
    return _BLOCK
