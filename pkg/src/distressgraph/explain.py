"""Layered explanations for edges.

Each edge gets a bundle combining five signals: annotation-aware perspective
text (linguistic, cultural, clinical), leave-one-token-out similarity
attribution, matched idiom rules, nearest validated examples, and a
contrastive note against the runner-up candidate.  Bundles serialize into
the graph document; reports render them as plain text or HTML with fixed
formatting, so identical inputs give identical bytes.
"""

from __future__ import annotations

import html
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .alignment import CandidateEdge, contains_phrase
from .annotation import CulturalMarker, SemanticCategory, Severity, TemporalProfile
from .embedding import EmbeddingStore, HashedBagEmbedder, cosine, tokenize
from .errors import ValidationError
from .graph import (
    ConceptNode,
    Edge,
    EdgeStatus,
    EdgeType,
    ExpressionNode,
    OntologyGraph,
)

NON_DIAGNOSTIC_CAVEAT = "not diagnostic in isolation"


@dataclass(frozen=True)
class ExplanationRule:
    """Pattern-triggered template feeding one perspective paragraph."""

    rule_id: str
    pattern: str
    language: str
    template: str
    perspective: str

    def check(self) -> None:
        if not self.pattern.strip():
            raise ValidationError(f"rule {self.rule_id}: empty pattern")
        if self.perspective not in ("linguistic", "cultural", "clinical"):
            raise ValidationError(
                f"rule {self.rule_id}: unknown perspective {self.perspective!r}"
            )
        try:
            self.template.format(pattern=self.pattern, text="", gloss="", label="")
        except (KeyError, IndexError) as exc:
            raise ValidationError(
                f"rule {self.rule_id}: unresolvable template placeholder {exc}"
            ) from exc

    @classmethod
    def from_dict(cls, data: dict) -> "ExplanationRule":
        try:
            rule = cls(
                rule_id=str(data["rule_id"]),
                pattern=str(data["pattern"]),
                language=str(data["language"]).strip().lower(),
                template=str(data["template"]),
                perspective=str(data["perspective"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad explanation rule: {exc}") from exc
        rule.check()
        return rule

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "pattern": self.pattern,
            "language": self.language,
            "template": self.template,
            "perspective": self.perspective,
        }


@dataclass(frozen=True)
class ContrastiveRecord:
    runner_up_dst: str
    score_delta: float
    text: str

    def to_dict(self) -> dict:
        return {
            "runner_up_dst": self.runner_up_dst,
            "score_delta": self.score_delta,
            "text": self.text,
        }


@dataclass(frozen=True)
class ExplanationBundle:
    edge_id: str
    linguistic: str
    cultural: str
    clinical: str
    token_contributions: tuple[tuple[str, float], ...]
    matched_rules: tuple[str, ...]
    nearest_examples: tuple[tuple[str, float], ...]
    contrastive: Optional[ContrastiveRecord]
    confidence: float
    provenance_refs: tuple[str, ...]
    incomplete: bool = False

    def to_dict(self) -> dict:
        return {
            "edge_id": self.edge_id,
            "linguistic": self.linguistic,
            "cultural": self.cultural,
            "clinical": self.clinical,
            "token_contributions": [[t, s] for t, s in self.token_contributions],
            "matched_rules": list(self.matched_rules),
            "nearest_examples": [[e, s] for e, s in self.nearest_examples],
            "contrastive": self.contrastive.to_dict() if self.contrastive else None,
            "confidence": self.confidence,
            "provenance_refs": list(self.provenance_refs),
            "incomplete": self.incomplete,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExplanationBundle":
        try:
            contrastive = data.get("contrastive")
            return cls(
                edge_id=str(data["edge_id"]),
                linguistic=str(data["linguistic"]),
                cultural=str(data["cultural"]),
                clinical=str(data["clinical"]),
                token_contributions=tuple(
                    (str(t), float(s)) for t, s in data.get("token_contributions", [])
                ),
                matched_rules=tuple(str(r) for r in data.get("matched_rules", [])),
                nearest_examples=tuple(
                    (str(e), float(s)) for e, s in data.get("nearest_examples", [])
                ),
                contrastive=ContrastiveRecord(
                    runner_up_dst=str(contrastive["runner_up_dst"]),
                    score_delta=float(contrastive["score_delta"]),
                    text=str(contrastive["text"]),
                )
                if contrastive
                else None,
                confidence=float(data["confidence"]),
                provenance_refs=tuple(str(p) for p in data.get("provenance_refs", [])),
                incomplete=bool(data.get("incomplete", False)),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad explanation bundle: {exc}") from exc


# ----------------------------------------------------------------------
# Strategy 1: token attribution
# ----------------------------------------------------------------------

def token_contributions(
    src_text: str,
    counterpart_text: str,
    embedder: HashedBagEmbedder,
) -> list[tuple[str, float]]:
    """Leave-one-token-out attribution against a counterpart text.

    score(i) = sim(full, counterpart) - sim(full minus occurrence i,
    counterpart), with similarity 0 when removal empties the text.  Raw
    cosine is used so a token's score is exactly its similarity influence.
    """
    tokens = tokenize(src_text)
    if not tokens:
        return []
    counterpart_vec = embedder.embed(counterpart_text)
    full = cosine(embedder.embed(src_text), counterpart_vec)
    out = []
    for i, token in enumerate(tokens):
        reduced = tokens[:i] + tokens[i + 1:]
        if reduced:
            reduced_sim = cosine(embedder.embed(" ".join(reduced)), counterpart_vec)
        else:
            reduced_sim = 0.0
        out.append((token, full - reduced_sim))
    return out


# ----------------------------------------------------------------------
# Strategy 2: rule matching
# ----------------------------------------------------------------------

def match_rules(
    node: ExpressionNode, rules: Sequence[ExplanationRule]
) -> list[ExplanationRule]:
    """Rules whose pattern occurs in the node's text, in rule order."""
    return [
        rule
        for rule in rules
        if rule.language == node.language
        and contains_phrase(node.surface_text, rule.pattern)
    ]


# ----------------------------------------------------------------------
# Strategy 3: nearest validated examples
# ----------------------------------------------------------------------

def nearest_validated_examples(
    graph: OntologyGraph,
    store: EmbeddingStore,
    provider_id: str,
    edge: Edge,
    k: int = 3,
) -> list[tuple[str, float]]:
    """Top-k Accepted edges by src-embedding similarity to this edge's src."""
    if k < 1:
        return []
    own = store.get(edge.src, provider_id)
    if own is None:
        return []
    accepted = [
        e
        for e in graph.edges()
        if e.status is EdgeStatus.ACCEPTED and e.id != edge.id
    ]
    scored = []
    own_unit = own / np.linalg.norm(own)
    for other in accepted:
        vec = store.get(other.src, provider_id)
        if vec is None:
            continue
        sim = float(np.clip(np.dot(own_unit, vec / np.linalg.norm(vec)), -1.0, 1.0))
        scored.append((other.id, sim))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


# ----------------------------------------------------------------------
# Strategy 4: contrastive
# ----------------------------------------------------------------------

def contrastive(chosen: CandidateEdge, runner_up: CandidateEdge) -> ContrastiveRecord:
    """Why the chosen candidate outranked the runner-up."""
    if chosen.src != runner_up.src:
        raise ValidationError(
            f"contrastive candidates disagree on src: {chosen.src} vs {runner_up.src}"
        )
    delta = chosen.score - runner_up.score
    if delta < 0:
        raise ValidationError(
            f"chosen score {chosen.score} below runner-up {runner_up.score}"
        )
    if delta == 0:
        text = (
            f"Candidates {chosen.dst} and {runner_up.dst} scored identically "
            f"({chosen.score:.6f}); the tie was broken by review, not by the model."
        )
    else:
        text = (
            f"{chosen.dst} was preferred over {runner_up.dst} by a score margin "
            f"of {delta:.6f} ({chosen.score:.6f} vs {runner_up.score:.6f})."
        )
    return ContrastiveRecord(runner_up_dst=runner_up.dst, score_delta=delta, text=text)


# ----------------------------------------------------------------------
# Strategy 5: annotation-aware perspectives
# ----------------------------------------------------------------------

_CATEGORY_PHRASES = {
    SemanticCategory.EMOTION: "an emotional state",
    SemanticCategory.SOMATIC_COMPLAINT: "a somatic complaint",
    SemanticCategory.BEHAVIOR: "a behavioral pattern",
    SemanticCategory.OTHER: "an uncategorized experience",
}

_MARKER_PHRASES = {
    CulturalMarker.IDIOMATIC: "idiomatic",
    CulturalMarker.METAPHORICAL: "metaphorical",
    CulturalMarker.BELIEF_SYSTEM_REFERENCE: "rooted in a belief system",
    CulturalMarker.CODE_MIXED: "code-mixed",
}


def _top_tokens(contribs: Sequence[tuple[str, float]], n: int = 3) -> list[str]:
    ranked = sorted(contribs, key=lambda item: (-item[1], item[0]))
    return [t for t, s in ranked[:n] if s > 0]


def _linguistic_perspective(
    src: ExpressionNode,
    counterpart_label: str,
    contribs: Sequence[tuple[str, float]],
    rule_texts: Sequence[str],
) -> str:
    parts = []
    gloss = f' (gloss: "{src.gloss}")' if src.gloss else ""
    markers = [
        _MARKER_PHRASES[m]
        for m in sorted(src.annotation.cultural_markers, key=lambda m: m.value)
        if m in (CulturalMarker.IDIOMATIC, CulturalMarker.METAPHORICAL, CulturalMarker.CODE_MIXED)
    ]
    usage = " and ".join(markers) if markers else "plain"
    parts.append(
        f'The {src.language} expression "{src.surface_text}"{gloss} shows '
        f"{usage} usage."
    )
    top = _top_tokens(contribs)
    if top:
        quoted = ", ".join(f'"{t}"' for t in top)
        parts.append(
            f"Tokens contributing most to the link with {counterpart_label}: {quoted}."
        )
    parts.extend(rule_texts)
    return " ".join(parts)


def _cultural_perspective(
    src: ExpressionNode, counterpart_label: str, rule_texts: Sequence[str]
) -> str:
    parts = []
    markers = sorted(m.value for m in src.annotation.cultural_markers)
    if markers:
        parts.append(
            "The expression carries cultural markers "
            f"({', '.join(markers)}) and frames distress in everyday idiom "
            "rather than clinical vocabulary."
        )
    else:
        parts.append(
            "No specific cultural markers are annotated; the phrasing is "
            "everyday language rather than clinical vocabulary."
        )
    parts.append(
        f"Reading it against {counterpart_label} should preserve the local "
        "framing instead of replacing it."
    )
    parts.extend(rule_texts)
    return " ".join(parts)


def _clinical_perspective(
    src: ExpressionNode,
    counterpart: Optional[ConceptNode],
    rule_texts: Sequence[str],
) -> str:
    ann = src.annotation
    parts = [f"The annotation reads this as {_CATEGORY_PHRASES[ann.semantic_category]}."]
    if ann.severity is not Severity.UNKNOWN:
        parts.append(f"Severity is annotated as {ann.severity.value}.")
    if ann.temporal is not TemporalProfile.UNKNOWN:
        parts.append(f"The temporal profile is {ann.temporal.value}.")
    if counterpart is not None:
        parts.append(
            f"It may correspond to {counterpart.label} "
            f"({counterpart.framework.value} {counterpart.code}) if persistent, "
            f"but it is {NON_DIAGNOSTIC_CAVEAT}."
        )
    else:
        parts.append(
            "This link relates expressions without asserting any diagnostic "
            f"category; the phrasing alone is {NON_DIAGNOSTIC_CAVEAT}."
        )
    parts.extend(rule_texts)
    return " ".join(parts)


# ----------------------------------------------------------------------
# Bundle assembly
# ----------------------------------------------------------------------

def build_bundle(
    graph: OntologyGraph,
    store: EmbeddingStore,
    embedder: HashedBagEmbedder,
    edge: Edge,
    alternatives: Optional[Sequence[CandidateEdge]] = None,
    rules: Sequence[ExplanationRule] = (),
    k_examples: int = 3,
) -> ExplanationBundle:
    """Assemble the full explanation bundle for one edge."""
    src = graph.expression(edge.src)
    dst = graph.node(edge.dst)
    if isinstance(dst, ConceptNode):
        counterpart_text = dst.label
        counterpart_label = f'concept "{dst.label}"'
        concept = dst
    else:
        counterpart_text = dst.surface_text
        counterpart_label = f'expression "{dst.surface_text}"'
        concept = None

    contribs = token_contributions(src.surface_text, counterpart_text, embedder)
    matched = match_rules(src, rules)
    by_perspective: dict[str, list[str]] = {"linguistic": [], "cultural": [], "clinical": []}
    for rule in matched:
        by_perspective[rule.perspective].append(
            rule.template.format(
                pattern=rule.pattern,
                text=src.surface_text,
                gloss=src.gloss or "",
                label=concept.label if concept else counterpart_text,
            )
        )

    contrastive_record = None
    if alternatives and len(alternatives) >= 2:
        ranked = sorted(alternatives, key=lambda c: (-c.score, c.dst))
        chosen = next((c for c in ranked if c.dst == edge.dst), None)
        if chosen is not None:
            runner = next((c for c in ranked if c.dst != chosen.dst), None)
            if runner is not None and chosen.score >= runner.score:
                contrastive_record = contrastive(chosen, runner)

    confidence = (
        edge.combined_confidence
        if edge.combined_confidence is not None
        else edge.model_confidence
    )
    refs = [f"edge:{edge.id}:{edge.provenance.source_kind.value}:{edge.provenance.source_id}"]
    refs.append(
        f"node:{src.id}:{src.provenance.source_kind.value}:{src.provenance.source_id}"
    )
    if isinstance(dst, ExpressionNode):
        refs.append(
            f"node:{dst.id}:{dst.provenance.source_kind.value}:{dst.provenance.source_id}"
        )

    return ExplanationBundle(
        edge_id=edge.id,
        linguistic=_linguistic_perspective(
            src, counterpart_label, contribs, by_perspective["linguistic"]
        ),
        cultural=_cultural_perspective(src, counterpart_label, by_perspective["cultural"]),
        clinical=_clinical_perspective(src, concept, by_perspective["clinical"]),
        token_contributions=tuple(contribs),
        matched_rules=tuple(r.rule_id for r in matched),
        nearest_examples=tuple(
            nearest_validated_examples(graph, store, embedder.provider_id, edge, k_examples)
        ),
        contrastive=contrastive_record,
        confidence=confidence,
        provenance_refs=tuple(refs),
        incomplete=not src.annotation.is_informative(),
    )


# ----------------------------------------------------------------------
# Report rendering
# ----------------------------------------------------------------------

def _confidence_lines(edge: Edge) -> list[str]:
    lines = [f"model confidence:     {edge.model_confidence:.6f}"]
    if edge.validator_agreement is not None:
        lines.append(f"validator agreement:  {edge.validator_agreement:.6f}")
    if edge.combined_confidence is not None:
        lines.append(f"combined confidence:  {edge.combined_confidence:.6f}")
    return lines


def _parallel_siblings(graph: OntologyGraph, edge: Edge) -> list[Edge]:
    if not edge.parallel_group:
        return []
    return [
        e
        for e in graph.edges()
        if e.parallel_group == edge.parallel_group and e.id != edge.id
    ]


def render_report(
    graph: OntologyGraph, edge: Edge, bundle: ExplanationBundle
) -> str:
    """Plain-text report; identical inputs render identical bytes."""
    src = graph.expression(edge.src)
    dst = graph.node(edge.dst)
    dst_label = (
        f'{dst.label} ({dst.framework.value} {dst.code})'
        if isinstance(dst, ConceptNode)
        else f'"{dst.surface_text}" [{dst.language}]'
    )
    lines = []
    push = lines.append
    push(f"Edge report: {edge.id}")
    push("=" * 72)
    push("")
    push("Expression")
    push("-" * 72)
    push(f'  "{src.surface_text}" [{src.language}] ({src.status.value})')
    if src.gloss:
        push(f"  gloss: {src.gloss}")
    push("")
    push("Mapping")
    push("-" * 72)
    push(f"  {edge.edge_type.value}: {edge.src} -> {edge.dst} ({dst_label})")
    push(f"  status: {edge.status.value}")
    push(f"  rationale: {edge.rationale}")
    if edge.revision_of:
        push(f"  revision of: {edge.revision_of}")
    if edge.adjudication_note:
        push(f"  adjudication: {edge.adjudication_note}")
    push("")
    push("Linguistic perspective")
    push("-" * 72)
    push(f"  {bundle.linguistic}")
    push("")
    push("Cultural perspective")
    push("-" * 72)
    push(f"  {bundle.cultural}")
    push("")
    push("Clinical perspective")
    push("-" * 72)
    push(f"  {bundle.clinical}")
    push("")
    push("Confidence")
    push("-" * 72)
    for line in _confidence_lines(edge):
        push(f"  {line}")
    push(f"  bundle confidence:    {bundle.confidence:.6f}")
    push("")
    push("Token contributions")
    push("-" * 72)
    if bundle.token_contributions:
        for token, score in bundle.token_contributions:
            push(f"  {token}: {score:+.6f}")
    else:
        push("  (none)")
    push("")
    push("Provenance")
    push("-" * 72)
    for ref in bundle.provenance_refs:
        push(f"  {ref}")
    push("")
    push("Alternatives")
    push("-" * 72)
    if bundle.contrastive:
        push(f"  {bundle.contrastive.text}")
    if bundle.nearest_examples:
        push("  Nearest validated examples:")
        for edge_id, sim in bundle.nearest_examples:
            push(f"    {edge_id}: similarity {sim:.6f}")
    siblings = _parallel_siblings(graph, edge)
    if edge.parallel_group:
        push(f"  Parallel group {edge.parallel_group}:")
        own_reason = edge.parallel_reason or "(no reason recorded)"
        push(f"    {edge.id} (this edge): {own_reason}")
        for sib in siblings:
            push(f"    {sib.id}: {sib.parallel_reason or '(no reason recorded)'}")
    if not bundle.contrastive and not bundle.nearest_examples and not edge.parallel_group:
        push("  (none)")
    if bundle.matched_rules:
        push("")
        push("Matched rules")
        push("-" * 72)
        for rule_id in bundle.matched_rules:
            push(f"  {rule_id}")
    if bundle.incomplete:
        push("")
        push("Note: annotation metadata is sparse; this bundle is flagged incomplete.")
    push("")
    return "\n".join(lines)


def render_report_html(
    graph: OntologyGraph, edge: Edge, bundle: ExplanationBundle
) -> str:
    """HTML rendering of the same report content."""
    src = graph.expression(edge.src)
    dst = graph.node(edge.dst)
    dst_label = (
        f"{dst.label} ({dst.framework.value} {dst.code})"
        if isinstance(dst, ConceptNode)
        else f'"{dst.surface_text}" [{dst.language}]'
    )
    esc = html.escape
    rows = []
    push = rows.append
    push("<!DOCTYPE html>")
    push('<html lang="en"><head><meta charset="utf-8">')
    push(f"<title>Edge report: {esc(edge.id)}</title>")
    push(
        "<style>body{font-family:sans-serif;max-width:48rem;margin:2rem auto;"
        "padding:0 1rem}h2{border-bottom:1px solid #ccc;padding-bottom:.2rem}"
        "table{border-collapse:collapse}td,th{border:1px solid #ccc;"
        "padding:.25rem .5rem;text-align:left}.caveat{color:#7a3030}</style>"
    )
    push("</head><body>")
    push(f"<h1>Edge report: {esc(edge.id)}</h1>")
    push("<h2>Expression</h2>")
    push(
        f"<p><strong>{esc(src.surface_text)}</strong> [{esc(src.language)}] "
        f"({esc(src.status.value)})</p>"
    )
    if src.gloss:
        push(f"<p>gloss: {esc(src.gloss)}</p>")
    push("<h2>Mapping</h2>")
    push(
        f"<p>{esc(edge.edge_type.value)}: {esc(edge.src)} &rarr; {esc(edge.dst)} "
        f"({esc(dst_label)})<br>status: {esc(edge.status.value)}<br>"
        f"rationale: {esc(edge.rationale)}</p>"
    )
    if edge.adjudication_note:
        push(f"<p>adjudication: {esc(edge.adjudication_note)}</p>")
    for title, text in (
        ("Linguistic perspective", bundle.linguistic),
        ("Cultural perspective", bundle.cultural),
        ("Clinical perspective", bundle.clinical),
    ):
        push(f"<h2>{title}</h2>")
        css = ' class="caveat"' if NON_DIAGNOSTIC_CAVEAT in text else ""
        push(f"<p{css}>{esc(text)}</p>")
    push("<h2>Confidence</h2><table>")
    push(
        f"<tr><th>model</th><td>{edge.model_confidence:.6f}</td></tr>"
    )
    if edge.validator_agreement is not None:
        push(f"<tr><th>validator agreement</th><td>{edge.validator_agreement:.6f}</td></tr>")
    if edge.combined_confidence is not None:
        push(f"<tr><th>combined</th><td>{edge.combined_confidence:.6f}</td></tr>")
    push("</table>")
    push("<h2>Token contributions</h2>")
    if bundle.token_contributions:
        push("<table><tr><th>token</th><th>score</th></tr>")
        for token, score in bundle.token_contributions:
            push(f"<tr><td>{esc(token)}</td><td>{score:+.6f}</td></tr>")
        push("</table>")
    else:
        push("<p>(none)</p>")
    push("<h2>Provenance</h2><ul>")
    for ref in bundle.provenance_refs:
        push(f"<li>{esc(ref)}</li>")
    push("</ul>")
    push("<h2>Alternatives</h2>")
    if bundle.contrastive:
        push(f"<p>{esc(bundle.contrastive.text)}</p>")
    if bundle.nearest_examples:
        push("<ul>")
        for edge_id, sim in bundle.nearest_examples:
            push(f"<li>{esc(edge_id)}: similarity {sim:.6f}</li>")
        push("</ul>")
    if edge.parallel_group:
        push(f"<p>Parallel group {esc(edge.parallel_group)}:</p><ul>")
        push(
            f"<li>{esc(edge.id)} (this edge): "
            f"{esc(edge.parallel_reason or '(no reason recorded)')}</li>"
        )
        for sib in _parallel_siblings(graph, edge):
            push(
                f"<li>{esc(sib.id)}: "
                f"{esc(sib.parallel_reason or '(no reason recorded)')}</li>"
            )
        push("</ul>")
    if not bundle.contrastive and not bundle.nearest_examples and not edge.parallel_group:
        push("<p>(none)</p>")
    if bundle.incomplete:
        push("<p><em>Annotation metadata is sparse; this bundle is flagged incomplete.</em></p>")
    push("</body></html>")
    return "\n".join(rows)


# Starter rule file for the bundled demo data.
DEFAULT_RULES: list[dict] = [
    {
        "rule_id": "idiom-mind-burden-hi-roman",
        "pattern": "man ka bhoj",
        "language": "hi",
        "template": (
            'The idiom "{pattern}" construes distress as a weight carried by '
            "the mind, a common metaphor in North Indian speech."
        ),
        "perspective": "linguistic",
    },
    {
        "rule_id": "idiom-mind-burden-hi-deva",
        "pattern": "मन का बोझ",
        "language": "hi",
        "template": (
            'The idiom "{pattern}" construes distress as a weight carried by '
            "the mind, a common metaphor in North Indian speech."
        ),
        "perspective": "linguistic",
    },
    {
        "rule_id": "idiom-heavy-heart-hi",
        "pattern": "dil bhari hai",
        "language": "hi",
        "template": (
            'Heaviness of the heart ("{pattern}") expresses sadness somatically, '
            "locating emotion in the body rather than naming it."
        ),
        "perspective": "cultural",
    },
    {
        "rule_id": "anhedonia-framing-hi",
        "pattern": "khushi mehsoos nahi hoti",
        "language": "hi",
        "template": (
            'The contrast in "{text}" between outward sufficiency and absent '
            "happiness is a recognized way of voicing anhedonia without "
            "clinical vocabulary."
        ),
        "perspective": "clinical",
    },
    {
        "rule_id": "code-mixed-stress-hi",
        "pattern": "stress",
        "language": "hi",
        "template": (
            'The English loanword "{pattern}" inside a Hindi sentence is '
            "code-mixing typical of urban speech; it may soften or generalize "
            "the complaint."
        ),
        "perspective": "cultural",
    },
    {
        "rule_id": "idiom-mind-burden-kn",
        "pattern": "ಮನಸ್ಸಿಗೆ ಭಾರ",
        "language": "kn",
        "template": (
            'The idiom "{pattern}" construes distress as weight on the mind, '
            "paralleling the Hindi mind-burden idiom."
        ),
        "perspective": "linguistic",
    },
    {
        "rule_id": "idiom-mind-burden-mr",
        "pattern": "मनावर ओझं",
        "language": "mr",
        "template": (
            'The idiom "{pattern}" construes distress as a burden on the mind, '
            "paralleling the Hindi mind-burden idiom."
        ),
        "perspective": "linguistic",
    },
]


def default_rules() -> list[ExplanationRule]:
    return [ExplanationRule.from_dict(d) for d in DEFAULT_RULES]


def load_rules(path) -> list[ExplanationRule]:
    import json

    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValidationError("rule file must be a JSON array")
    return [ExplanationRule.from_dict(d) for d in data]


__all__ = [
    "ContrastiveRecord",
    "DEFAULT_RULES",
    "ExplanationBundle",
    "ExplanationRule",
    "NON_DIAGNOSTIC_CAVEAT",
    "build_bundle",
    "contrastive",
    "default_rules",
    "load_rules",
    "match_rules",
    "nearest_validated_examples",
    "render_report",
    "render_report_html",
    "token_contributions",
]
