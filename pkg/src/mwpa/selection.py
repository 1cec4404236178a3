"""Candidate selection: score each candidate by similarity times relative loss
increase over its parent, then keep the argmax."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from . import corpus
from .paraphrase import Candidate
from .providers import SimilarityProvider, SolverLossProvider

EPSILON = 1e-9


class NoCandidatesError(ValueError):
    """No candidate survived the gates; the problem is emitted unaugmented."""


@dataclass
class ScoredSet:
    parent_id: str
    method: str  # method-family label, or "all" for pooled selection
    candidates: list[Candidate]
    chosen_index: Optional[int] = None


class SelectionDecision(NamedTuple):
    parent_id: str
    method: str
    n_candidates: int
    chosen_index: Optional[int]
    similarity: Optional[float]
    normalized_loss: Optional[float]
    score: Optional[float]


def normalized_loss(loss_c: float, loss_p: float) -> float:
    """Relative loss increase (loss_c - loss_p) / loss_p, with an epsilon floor on
    the denominator so a zero parent loss stays finite."""
    return (loss_c - loss_p) / max(loss_p, EPSILON)


def select_best(
    p: corpus.Problem,
    candidates: list[Candidate],
    sim: SimilarityProvider,
    loss: SolverLossProvider,
) -> Candidate:
    """Fill each candidate's score fields and return the argmax.

    The candidate's loss is evaluated against the parent's gold equation (labels
    are copied verbatim, never regenerated). Ties break toward higher
    similarity, then the lower candidate index.
    """
    if not candidates:
        raise NoCandidatesError(f"no candidates for {p.id}")
    equation_text = p.equation.source_text
    parent_loss = loss.loss(p.text, equation_text)
    best_index = 0
    for j, c in enumerate(candidates):
        c.similarity = sim.similarity(c.text, p.text)
        c.normalized_loss = normalized_loss(loss.loss(c.text, equation_text), parent_loss)
        c.score = c.similarity * c.normalized_loss
        best = candidates[best_index]
        if c.score > best.score or (c.score == best.score and c.similarity > best.similarity):
            best_index = j
    return candidates[best_index]


def batch_select(
    groups: list[tuple[corpus.Problem, str, list[Candidate]]],
    sim: SimilarityProvider,
    loss: SolverLossProvider,
) -> tuple[list[ScoredSet], list[SelectionDecision]]:
    """Run select_best over (parent, method-family, candidates) groups in order,
    recording one decision per group (including empty no-candidate groups)."""
    scored: list[ScoredSet] = []
    decisions: list[SelectionDecision] = []
    for parent, method, candidates in groups:
        sset = ScoredSet(parent_id=parent.id, method=method, candidates=candidates)
        if candidates:
            chosen = select_best(parent, candidates, sim, loss)
            sset.chosen_index = candidates.index(chosen)
            decisions.append(
                SelectionDecision(
                    parent_id=parent.id,
                    method=method,
                    n_candidates=len(candidates),
                    chosen_index=sset.chosen_index,
                    similarity=chosen.similarity,
                    normalized_loss=chosen.normalized_loss,
                    score=chosen.score,
                )
            )
        else:
            decisions.append(
                SelectionDecision(parent.id, method, 0, None, None, None, None)
            )
        scored.append(sset)
    return scored, decisions
