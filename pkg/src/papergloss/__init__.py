"""Analysis pipeline and annotation service for TeX-sourced papers.

The pipeline scans TeX sources for equations and sentences, parses math
into symbol trees, finds pixel positions of everything via a
colorize/compile/rasterize/diff pass, extracts definitions, and bundles
the result into a position-indexed manifest that a read-only HTTP service
exposes to reader clients.
"""

__version__ = "0.1.0"
