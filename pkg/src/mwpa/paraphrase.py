"""Paraphrasing-family augmentation: primary-stage question paraphrases, problem
reordering with filler templates, and round-trip translation behind quantity
placeholders."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from . import corpus, textlab, textnorm
from .providers import ParaphraseProvider, TranslationProvider

log = logging.getLogger(__name__)

ROUTES = {
    "en_ru_en": (("en", "ru"), ("ru", "en")),
    "en_de_fr_en": (("en", "de"), ("de", "fr"), ("fr", "en")),
}

PLACEHOLDER_PREFIX = "QTY"


class CandidateRejected(ValueError):
    """Candidate failed a hard gate (unchanged text or lost quantities)."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


class PlaceholderCorruptionError(CandidateRejected):
    """A protected quantity placeholder went missing or was duplicated in translation."""

    def __init__(self, detail: str):
        super().__init__("placeholder_corruption", detail)


@dataclass
class Candidate:
    """One augmented problem text; score fields are filled by selection."""

    parent_id: str
    method: str
    body: tuple[str, ...]
    question: str
    quantities: tuple[corpus.Quantity, ...]
    stage_trace: tuple[str, ...] = ()
    similarity: Optional[float] = None
    normalized_loss: Optional[float] = None
    score: Optional[float] = None

    @property
    def text(self) -> str:
        parts = list(self.body)
        if self.question:
            parts.append(self.question)
        return " ".join(parts)

    @property
    def sentences(self) -> tuple[str, ...]:
        return self.body + ((self.question,) if self.question else ())

    def quantity_values(self) -> tuple[Fraction, ...]:
        return tuple(sorted(q.value for q in self.quantities))


def make_candidate(
    parent: corpus.Problem, method: str, text: str, stage_trace: tuple[str, ...] = ()
) -> Candidate:
    """Build a Candidate from raw text, re-extracting quantities and re-splitting
    the body/question boundary."""
    normalized = textnorm.normalize(text)
    if normalized.endswith("?"):
        sentences = textnorm.sentence_strings(normalized)
        body, question = tuple(sentences[:-1]), sentences[-1]
    else:
        body_list, question = corpus.split_body_question(normalized)
        body = tuple(body_list)
    return Candidate(
        parent_id=parent.id,
        method=method,
        body=body,
        question=question,
        quantities=tuple(corpus.extract_quantities(normalized)),
        stage_trace=stage_trace,
    )


def _value_multiset(text: str) -> Counter:
    return Counter(
        textnorm.number_value(t) for t in textnorm.tokenize(text) if textnorm.is_number_token(t)
    )


def check_quantity_gate(parent_text: str, candidate_text: str) -> bool:
    """Hard gate: the candidate's quantity value multiset must equal the parent's."""
    return _value_multiset(parent_text) == _value_multiset(candidate_text)


def primary_stage(
    p: corpus.Problem, n: int, provider: ParaphraseProvider
) -> list[corpus.Problem]:
    """Generate up to n base candidates, each the problem with a paraphrased question.

    Paraphrases that drop or change question-resident numbers, or that equal the
    original question, are discarded. On provider failure an empty list is
    returned with a warning so the secondary stage can run on the original.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not p.question:
        raise textlab.QuestionNotFoundError(f"problem {p.id} has no question to paraphrase")
    try:
        raw = provider.generate(p.question, n)
    except Exception as exc:
        log.warning("paraphrase provider failed for %s: %s", p.id, exc)
        return []
    base: list[corpus.Problem] = []
    seen = {p.question}
    for out in raw:
        question = textnorm.normalize(out)
        if not question or question in seen:
            continue
        if _value_multiset(question) != _value_multiset(p.question):
            continue
        seen.add(question)
        text = " ".join(p.body + (question,))
        base.append(
            replace(p, question=question, quantities=tuple(corpus.extract_quantities(text)))
        )
        if len(base) >= n:
            break
    return base


def _strip_terminal(tokens: list[str]) -> list[str]:
    if tokens and tokens[-1] in textnorm.SENTENCE_TERMINATORS:
        return tokens[:-1]
    return tokens


def _lower(tokens: list[str]) -> list[str]:
    return [t.lower() for t in tokens]


def _resolve_question_pronouns(p: corpus.Problem) -> list[str]:
    """Pronouns in the question that would become forward references once the
    question is fronted get replaced by their unique compatible antecedent."""
    annotated = textlab.annotate(p.text)
    resolved = textlab.resolve_pronouns(annotated).split()
    question_sentence = len(p.sentences) - 1
    out = []
    for (tok, si), new in zip(annotated.tokens, resolved):
        if si == question_sentence:
            out.append(new)
    return out


def reorder_problem(p: corpus.Problem) -> Candidate:
    """Front the question using the paper-style filler templates.

    A '?'-terminated question keeps its original order inside "If ... then ... ?";
    a question with no '?' (typical after primary-stage paraphrasing) is fronted
    with "... given that ..." and a closing period. Everything except the leading
    token is lowercased.
    """
    if not p.body:
        raise ValueError(f"problem {p.id} has no body sentences to reorder")
    if not p.question:
        raise textlab.QuestionNotFoundError(f"problem {p.id} has no question")
    body_clauses = [_lower(_strip_terminal(s.split())) for s in p.body]
    joined: list[str] = []
    for i, clause in enumerate(body_clauses):
        if i:
            joined.append("and")
        joined.extend(clause)
    q_tokens = p.question.split()
    if q_tokens[-1] == "?":
        core = _lower(_strip_terminal(q_tokens))
        if core and core[-1] == "then":
            core = core[:-1]
        tokens = ["If"] + joined + ["then"] + core + ["?"]
    else:
        core = _resolve_question_pronouns(p) or q_tokens
        core = _lower(core)
        core[0] = core[0][0].upper() + core[0][1:]
        tokens = core + ["given", "that"] + joined + ["."]
    text = " ".join(tokens)
    candidate = make_candidate(p, "problem_reorder", text, stage_trace=("problem_reorder",))
    if not check_quantity_gate(p.text, candidate.text):
        raise CandidateRejected("quantity_mismatch", f"reorder of {p.id}")
    return candidate


@dataclass(frozen=True)
class ProtectionMap:
    pairs: tuple[tuple[str, str], ...]  # (placeholder, original surface)

    def restore(self, text: str) -> str:
        tokens = text.split()
        surfaces = dict(self.pairs)
        return " ".join(surfaces.get(t, t) for t in tokens)

    def verify(self, text: str) -> None:
        """Raise PlaceholderCorruptionError unless every placeholder occurs exactly once."""
        counts = Counter(t for t in text.split() if t.startswith(PLACEHOLDER_PREFIX))
        for placeholder, _ in self.pairs:
            if counts.get(placeholder, 0) != 1:
                raise PlaceholderCorruptionError(
                    f"{placeholder} occurs {counts.get(placeholder, 0)} times"
                )
        extras = set(counts) - {ph for ph, _ in self.pairs}
        if extras:
            raise PlaceholderCorruptionError(f"unexpected placeholders {sorted(extras)}")


def protect_quantities(text: str) -> tuple[str, ProtectionMap]:
    """Replace each numeral with an ordered QTY<i> placeholder; restore() inverts."""
    tokens = textnorm.tokenize(text)
    pairs: list[tuple[str, str]] = []
    out: list[str] = []
    for tok in tokens:
        if textnorm.is_number_token(tok):
            placeholder = f"{PLACEHOLDER_PREFIX}{len(pairs)}"
            if placeholder in tokens:
                raise ValueError(f"text already contains placeholder token {placeholder}")
            pairs.append((placeholder, tok))
            out.append(placeholder)
        else:
            out.append(tok)
    return " ".join(out), ProtectionMap(tuple(pairs))


def round_trip(
    p: corpus.Problem,
    route: str,
    provider: TranslationProvider,
    stage_trace: tuple[str, ...] = (),
) -> Candidate:
    """Translate hop-by-hop through a pivot route with quantities protected.

    Raises PlaceholderCorruptionError when a placeholder is lost or duplicated,
    CandidateRejected("unchanged") for an identity round trip, and lets provider
    errors propagate for the pipeline to count.
    """
    hops = ROUTES.get(route)
    if hops is None:
        raise ValueError(f"unknown route {route!r} (expected one of {sorted(ROUTES)})")
    protected, pmap = protect_quantities(p.text)
    text = protected
    for src, tgt in hops:
        text = provider.translate(text, src, tgt)
    pmap.verify(text)
    restored = textnorm.normalize(pmap.restore(text))
    if restored == p.text:
        raise CandidateRejected("unchanged", f"round trip {route} left {p.id} unchanged")
    candidate = make_candidate(
        p, "round_trip", restored, stage_trace=stage_trace + (f"round_trip:{route}",)
    )
    if not check_quantity_gate(p.text, candidate.text):
        raise CandidateRejected("quantity_mismatch", f"round trip {route} on {p.id}")
    return candidate
