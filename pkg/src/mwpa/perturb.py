"""Label-preserving test-set perturbations used to probe solver shortcut behavior:
word deletion, question dropping/fronting, sentence shuffling, word reordering."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import NamedTuple

from . import corpus, textnorm

KINDS = ("word_delete", "question_drop", "question_reorder", "sentence_shuffle", "word_reorder")

_RESHUFFLE_TRIES = 100


class PerturbSkip(ValueError):
    """The perturbation cannot apply to this problem (recorded in the manifest)."""


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str
    rate: float = 0.10  # word_delete only
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown perturbation kind {self.kind!r} (expected one of {KINDS})")
        if self.kind == "word_delete" and not 0 < self.rate < 1:
            raise ValueError("word_delete rate must be in (0, 1)")


class PerturbManifest(NamedTuple):
    kind: str
    rate: float
    seed: int
    input_count: int
    output_count: int
    skips: list[tuple[str, str]]  # (problem id, reason)


def _rng(spec: PerturbationSpec, problem_id: str) -> random.Random:
    return random.Random(f"{spec.seed}:{problem_id}:{spec.kind}")


def _rebuild(p: corpus.Problem, body: list[str], question: str) -> corpus.Problem:
    text = " ".join(body + ([question] if question else []))
    return replace(
        p,
        body=tuple(body),
        question=question,
        quantities=tuple(corpus.extract_quantities(text)),
    )


def _word_delete(p: corpus.Problem, spec: PerturbationSpec) -> corpus.Problem:
    tokens = p.text.split()
    n_remove = int(spec.rate * len(tokens))
    removable = [i for i, t in enumerate(tokens) if not textnorm.is_number_token(t)]
    if n_remove == 0:
        return p
    if len(removable) < n_remove:
        raise PerturbSkip(f"only {len(removable)} non-numeral tokens, need {n_remove}")
    drop = set(_rng(spec, p.id).sample(removable, n_remove))
    kept = [t for i, t in enumerate(tokens) if i not in drop]
    body, question = corpus.split_body_question(" ".join(kept))
    return _rebuild(p, body, question)


def _question_drop(p: corpus.Problem, spec: PerturbationSpec) -> corpus.Problem:
    if not p.question:
        raise PerturbSkip("no question to drop")
    if not p.body:
        raise PerturbSkip("dropping the question would leave no text")
    return _rebuild(p, list(p.body), "")


def _question_reorder(p: corpus.Problem, spec: PerturbationSpec) -> corpus.Problem:
    # question fronted verbatim, no filler phrases (contrast with reorder_problem)
    if not p.question:
        raise PerturbSkip("no question to front")
    if not p.body:
        raise PerturbSkip("nothing to reorder around")
    return _rebuild(p, [p.question] + list(p.body), "")


def _sentence_shuffle(p: corpus.Problem, spec: PerturbationSpec) -> corpus.Problem:
    if len(p.body) < 2:
        raise ValueError(f"{p.id}: sentence_shuffle needs at least 2 body sentences")
    rng = _rng(spec, p.id)
    body = list(p.body)
    for _ in range(_RESHUFFLE_TRIES):
        rng.shuffle(body)
        if body != list(p.body):
            return _rebuild(p, body, p.question)
    raise PerturbSkip("all body sentences identical; no non-identity permutation")


def _word_reorder(p: corpus.Problem, spec: PerturbationSpec) -> corpus.Problem:
    rng = _rng(spec, p.id)
    new_sentences: list[str] = []
    for sentence in p.sentences:
        tokens = sentence.split()
        terminator = []
        core = tokens
        if core and core[-1] in textnorm.SENTENCE_TERMINATORS:
            terminator = [core[-1]]
            core = core[:-1]
        if len(set(core)) < 2:
            new_sentences.append(sentence)
            continue
        shuffled = list(core)
        for _ in range(_RESHUFFLE_TRIES):
            rng.shuffle(shuffled)
            if shuffled != core:
                break
        new_sentences.append(" ".join(shuffled + terminator))
    if new_sentences == list(p.sentences):
        raise PerturbSkip("no sentence admits a non-identity word order")
    question = new_sentences[-1] if p.question else ""
    body = new_sentences[:-1] if p.question else new_sentences
    return _rebuild(p, body, question)


_PERTURBERS = {
    "word_delete": _word_delete,
    "question_drop": _question_drop,
    "question_reorder": _question_reorder,
    "sentence_shuffle": _sentence_shuffle,
    "word_reorder": _word_reorder,
}


def perturb_problem(p: corpus.Problem, spec: PerturbationSpec) -> corpus.Problem:
    """Apply one perturbation; equation and answer carry over unchanged since the
    probe measures whether solvers still answer a distorted problem."""
    return _PERTURBERS[spec.kind](p, spec)


def perturb_corpus(
    problems: list[corpus.Problem], spec: PerturbationSpec
) -> tuple[list[corpus.Problem], PerturbManifest]:
    """Perturb every problem, skipping (and recording) the inapplicable ones."""
    out: list[corpus.Problem] = []
    skips: list[tuple[str, str]] = []
    for p in sorted(problems, key=lambda q: q.id):
        try:
            out.append(perturb_problem(p, spec))
        except (PerturbSkip, ValueError) as exc:
            skips.append((p.id, str(exc)))
    manifest = PerturbManifest(
        kind=spec.kind,
        rate=spec.rate,
        seed=spec.seed,
        input_count=len(problems),
        output_count=len(out),
        skips=skips,
    )
    return out, manifest
