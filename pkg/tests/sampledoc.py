"""Shared in-memory sample paper for manifest/serve/diagram tests.

Runs the real scan/parse/extract chain over a small source and attaches
synthetic (but valid) boxes, so tests exercise manifest assembly and
queries without paying for rasterization.
"""

from papergloss.defextract import (
    analyze_equation,
    extract_abbreviations,
    extract_defining_formulae,
    extract_symbol_definitions,
    find_term_occurrences,
    index_usages,
    term_occurrence_id,
    term_surfaces_from_definitions,
)
from papergloss.geometry import Box
from papergloss.manifest import build_manifest
from papergloss.texscan import detect_equations, segment_sentences

SAMPLE_TEX = r"""\documentclass{article}
\begin{document}
We model the data with a mixture of $k$ components together with $w$.
Here $k$ is the mixture component index for assignment.
The cache stores the head value $V_h := W v$ for reuse.
Later sections reuse semantic role labeling (SRL) ideas.
Now $k$ is the number of clusters in the partition.
A final sentence uses $k$ and plain SRL text once more.
The decoder $D$ is the output network for tokens.
The input $x$ is the token embedding row.
The bias $b$ is the offset vector in each layer.
\begin{equation}
y = D x + b
\end{equation}
We write heads as $V_h^{(j)} := W v$ once more.
The index $h$ is the head slot in each block.
The index $j$ is the layer tag for heads.
The total $b + b$ grows quickly.
\end{document}
"""


def direct_record_targets(analyses):
    """Record ids localized directly (leaves and accents); the rest compose."""
    out = []
    for analysis in analyses.values():
        for record in analysis.records:
            if record.kind in ("simple", "accent"):
                out.append(record.id)
    return out


def synthetic_boxes(target_ids):
    """One small valid box per target, spread deterministically over page 0."""
    located = {}
    for i, tid in enumerate(sorted(target_ids)):
        row, col = divmod(i, 10)
        located[tid] = [
            Box(0, 0.02 + col * 0.095, 0.2 + row * 0.045, 0.08, 0.02)
        ]
    return located


def build_sample(tweak_located=None):
    source = SAMPLE_TEX
    equations = detect_equations(source)
    sentences = segment_sentences(source, equations)
    analyses = {eq.id: analyze_equation(eq) for eq in equations}
    definitions = (
        extract_abbreviations(sentences)
        + extract_symbol_definitions(sentences, analyses)
        + extract_defining_formulae(analyses)
    )
    surfaces = term_surfaces_from_definitions(definitions)
    term_occurrences = find_term_occurrences(source, sentences, equations, surfaces)
    usages = index_usages(sentences, analyses, surfaces)

    targets = [s.id for s in sentences] + [eq.id for eq in equations]
    targets += direct_record_targets(analyses)
    for surface, spans in term_occurrences.items():
        targets += [term_occurrence_id(surface, i) for i in range(len(spans))]
    located = synthetic_boxes(targets)
    if tweak_located:
        tweak_located(located)

    manifest = build_manifest(
        paper_id="sample",
        pages=1,
        sentences=sentences,
        equations=equations,
        analyses=analyses,
        definitions=definitions,
        usages=usages,
        located=located,
        term_occurrences=term_occurrences,
    )
    return manifest, {
        "source": source,
        "sentences": sentences,
        "equations": equations,
        "analyses": analyses,
        "definitions": definitions,
        "usages": usages,
        "located": located,
        "term_occurrences": term_occurrences,
    }
