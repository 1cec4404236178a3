"""End-to-end augmentation: primary stage, secondary methods, hard validation
gates, per-family candidate selection, accounting, and the rating workflow
around human evaluation batches."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from . import corpus, paraphrase, selection, substitution, textlab
from .paraphrase import Candidate, CandidateRejected
from .providers import ProviderError, ProviderSet
from .substitution import SubstitutionConfig

log = logging.getLogger(__name__)

FAMILIES = ("paraphrasing", "substitution")


@dataclass
class PipelineConfig:
    base_candidates: int = 7
    methods: tuple[str, ...] = corpus.METHODS
    substitution: SubstitutionConfig = field(default_factory=SubstitutionConfig)
    routes: tuple[str, ...] = ("en_ru_en", "en_de_fr_en")
    seed: int = 0
    combine_mode: str = "per_family"  # "per_family" | "union"
    apply_secondary_to_bases: bool = True

    def __post_init__(self):
        if self.base_candidates < 1:
            raise ValueError("base_candidates must be >= 1")
        unknown = set(self.methods) - set(corpus.METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.combine_mode not in ("per_family", "union"):
            raise ValueError(f"unknown combine_mode {self.combine_mode!r}")
        for route in self.routes:
            if route not in paraphrase.ROUTES:
                raise ValueError(f"unknown route {route!r}")


_CONFIG_KEYS = {
    "base_candidates": int,
    "methods": "list",
    "routes": "list",
    "seed": int,
    "combine_mode": str,
    "apply_secondary_to_bases": "bool",
    "top_k": int,
    "max_masks": int,
    "mask_window": int,
    "replacement_rate": float,
}


def parse_config(text: str) -> PipelineConfig:
    """Parse the key/value config format (one `key = value` per line, '#' comments)."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        kind = _CONFIG_KEYS[key]
        if kind == "list":
            values[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif kind == "bool":
            if value.lower() not in ("true", "false"):
                raise ValueError(f"config line {lineno}: {key} must be true or false")
            values[key] = value.lower() == "true"
        else:
            values[key] = kind(value)
    seed = int(values.get("seed", 0))
    sub = SubstitutionConfig(
        top_k=int(values.pop("top_k", 10)),
        max_masks=int(values.pop("max_masks", 3)),
        mask_window=int(values.pop("mask_window", 5)),
        replacement_rate=float(values.pop("replacement_rate", 0.15)),
        seed=seed,
    )
    return PipelineConfig(substitution=sub, **values)  # type: ignore[arg-type]


def load_config(path: str | Path) -> PipelineConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ValidationReport:
    numbers_preserved: bool
    alignment_ok: bool
    differs_from_parent: bool
    nonempty: bool
    question_present: bool

    @property
    def passed(self) -> bool:
        return (
            self.numbers_preserved
            and self.alignment_ok
            and self.differs_from_parent
            and self.nonempty
            and self.question_present
        )

    def flags(self) -> dict[str, bool]:
        return {
            "numbers_preserved": self.numbers_preserved,
            "alignment_ok": self.alignment_ok,
            "differs_from_parent": self.differs_from_parent,
            "nonempty": self.nonempty,
            "question_present": self.question_present,
            "pass": self.passed,
        }


def validate_candidate(parent: corpus.Problem, c: Candidate) -> ValidationReport:
    """Mechanical gates only; semantic similarity is a scoring signal, not a gate."""
    nonempty = bool(c.text.strip())
    differs = c.text != parent.text
    numbers = paraphrase.check_quantity_gate(parent.text, c.text)
    try:
        corpus.eqmod.align_quantities(parent.equation, c.quantities)
        alignment_ok = True
    except corpus.eqmod.AlignmentError:
        alignment_ok = False
    question_present = corpus.question_index(list(c.sentences)) is not None
    return ValidationReport(
        numbers_preserved=numbers,
        alignment_ok=alignment_ok,
        differs_from_parent=differs,
        nonempty=nonempty,
        question_present=question_present,
    )


@dataclass
class AugmentResult:
    problems: list[corpus.Problem]
    decisions: list[selection.SelectionDecision]
    counters: Counter
    stats: dict
    provider_failed: bool = False


def _family(method: str) -> str:
    return corpus.METHOD_FAMILIES[method]


def _candidate_to_problem(parent: corpus.Problem, c: Candidate, family: str) -> corpus.Problem:
    tag = corpus.AugmentationTag(
        parent_id=parent.id, method=c.method, stage_trace=c.stage_trace
    )
    return corpus.Problem(
        id=f"{parent.id}__{family}",
        body=c.body,
        question=c.question,
        quantities=c.quantities,
        equation=parent.equation,
        answer=parent.answer,
        source="augmented",
        provenance=tag,
    )


def _generate_for_method(
    method: str,
    source: corpus.Problem,
    trace_prefix: tuple[str, ...],
    cfg: PipelineConfig,
    providers: ProviderSet,
    counters: Counter,
) -> list[Candidate]:
    if method == "problem_reorder":
        candidate = paraphrase.reorder_problem(source)
        candidate.stage_trace = trace_prefix + candidate.stage_trace
        return [candidate]
    if method == "round_trip":
        out = []
        for route in cfg.routes:
            try:
                out.append(
                    paraphrase.round_trip(source, route, providers.translator, trace_prefix)
                )
            except CandidateRejected as exc:
                counters[f"rejected.{method}.{exc.reason}"] += 1
        return out
    sub_cfg = replace(cfg.substitution, seed=cfg.seed)
    if method == "fill_mask":
        return substitution.fill_mask_augment(source, sub_cfg, providers.mask_fill, trace_prefix)
    if method == "synonym":
        return substitution.synonym_augment(source, sub_cfg, providers.embedding, trace_prefix)
    if method == "entity":
        return substitution.entity_augment(source, seed=cfg.seed, stage_trace=trace_prefix)
    raise ValueError(f"unknown method {method!r}")


def augment_dataset(
    problems: list[corpus.Problem],
    cfg: PipelineConfig,
    providers: Optional[ProviderSet] = None,
) -> AugmentResult:
    """Run the two-stage pipeline over a corpus.

    Per problem: primary-stage question paraphrases feed every enabled secondary
    method (alongside the original), gated candidates are pooled per method
    family (or into one pool for combine_mode=union), and one selection per pool
    joins the output next to the originals. Provider outages skip the affected
    method for that problem and are counted, never fatal.
    """
    if providers is None:
        providers = ProviderSet()
    counters: Counter = Counter()
    provider_failed = False
    output: list[corpus.Problem] = []
    groups: list[tuple[corpus.Problem, str, list[Candidate]]] = []

    for p in problems:
        output.append(p)
        if not cfg.methods:
            continue
        try:
            base = paraphrase.primary_stage(p, cfg.base_candidates, providers.paraphraser)
        except textlab.QuestionNotFoundError:
            base = []
            counters["primary.no_question"] += 1
        counters["primary.base_candidates"] += len(base)
        sources: list[tuple[tuple[str, ...], corpus.Problem]] = [((), p)]
        if cfg.apply_secondary_to_bases:
            sources += [((f"primary:{i}",), b) for i, b in enumerate(base)]
        pools: dict[str, list[Candidate]] = {f: [] for f in FAMILIES}
        for method in corpus.METHODS:
            if method not in cfg.methods:
                continue
            for trace_prefix, source in sources:
                try:
                    raw = _generate_for_method(
                        method, source, trace_prefix, cfg, providers, counters
                    )
                except CandidateRejected as exc:
                    counters[f"rejected.{method}.{exc.reason}"] += 1
                    continue
                except ProviderError as exc:
                    log.warning("%s provider failed on %s: %s", method, p.id, exc)
                    counters[f"provider_failure.{method}"] += 1
                    provider_failed = True
                    break  # skip this method for this problem
                except (ValueError, textlab.QuestionNotFoundError):
                    counters[f"skipped.{method}"] += 1
                    continue
                counters[f"generated.{method}"] += len(raw)
                for c in raw:
                    if validate_candidate(p, c).passed:
                        pools[_family(method)].append(c)
                    else:
                        counters[f"gated_out.{method}"] += 1
        # dedupe identical texts within the parent, first occurrence wins
        for family in FAMILIES:
            seen: set[str] = set()
            unique = []
            for c in pools[family]:
                if c.text in seen:
                    counters["duplicates_removed"] += 1
                else:
                    seen.add(c.text)
                    unique.append(c)
            pools[family] = unique
        if cfg.combine_mode == "union":
            pooled = pools["paraphrasing"] + pools["substitution"]
            groups.append((p, "all", pooled))
        else:
            enabled_families = {_family(m) for m in cfg.methods}
            for family in FAMILIES:
                if family in enabled_families:
                    groups.append((p, family, pools[family]))

    scored, decisions = selection.batch_select(groups, providers.similarity, providers.loss)
    selected: dict[str, list[corpus.Problem]] = {}
    for sset in scored:
        if sset.chosen_index is None:
            counters[f"no_candidate.{sset.method}"] += 1
            continue
        chosen = sset.candidates[sset.chosen_index]
        counters[f"selected.{sset.method}"] += 1
        parent = next(p for p in problems if p.id == sset.parent_id)
        selected.setdefault(sset.parent_id, []).append(
            _candidate_to_problem(parent, chosen, sset.method)
        )
    final: list[corpus.Problem] = []
    for p in problems:
        final.append(p)
        final.extend(selected.get(p.id, []))
    out_stats = corpus.corpus_stats(final)
    stats = {
        "input_count": len(problems),
        "output_count": len(final),
        "growth_ratio": (len(final) / len(problems)) if problems else 0.0,
        "vocabulary_size": out_stats.vocabulary_size,
        "selections": sum(v for k, v in counters.items() if k.startswith("selected.")),
        "counters": dict(sorted(counters.items())),
    }
    return AugmentResult(
        problems=final,
        decisions=decisions,
        counters=counters,
        stats=stats,
        provider_failed=provider_failed,
    )


def write_selection_report(decisions: Iterable[selection.SelectionDecision], path: str | Path) -> None:
    """JSONL, one decision per line: parent, method, pool size, choice, S, L, score."""
    with Path(path).open("w", encoding="utf-8") as fout:
        for d in decisions:
            fout.write(
                json.dumps(
                    {
                        "parent_id": d.parent_id,
                        "method": d.method,
                        "n_candidates": d.n_candidates,
                        "chosen_index": d.chosen_index,
                        "S": d.similarity,
                        "L": d.normalized_loss,
                        "score": d.score,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


# --- human evaluation -------------------------------------------------------


@dataclass(frozen=True)
class RatingRecord:
    candidate_id: str  # blind id from the evaluation batch
    evaluator_id: str
    equation_preserved: bool
    numbers_preserved: bool
    semantic_similarity: float  # 0..1
    grammaticality: int  # 1..5
    timestamp: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.semantic_similarity <= 1.0:
            raise ValueError("semantic_similarity must be in [0, 1]")
        if not 1 <= int(self.grammaticality) <= 5 or int(self.grammaticality) != self.grammaticality:
            raise ValueError("grammaticality must be an integer in 1..5")

    def to_record(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "evaluator_id": self.evaluator_id,
            "equation_preserved": self.equation_preserved,
            "numbers_preserved": self.numbers_preserved,
            "semantic_similarity": self.semantic_similarity,
            "grammaticality": self.grammaticality,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "RatingRecord":
        return cls(
            candidate_id=str(rec["candidate_id"]),
            evaluator_id=str(rec["evaluator_id"]),
            equation_preserved=bool(rec["equation_preserved"]),
            numbers_preserved=bool(rec["numbers_preserved"]),
            semantic_similarity=float(rec["semantic_similarity"]),
            grammaticality=int(rec["grammaticality"]),
            timestamp=float(rec.get("timestamp", 0.0)),
        )


def _blind_id(seed: int, candidate_id: str) -> str:
    return hashlib.sha256(f"blind:{seed}:{candidate_id}".encode()).hexdigest()[:12]


def export_eval_batch(
    problems: list[corpus.Problem], fraction: float, seed: int
) -> list[dict]:
    """Deterministic shuffled sample of (original, augmented) pairs with blind ids.

    The method family travels in the record for later summarization but is never
    shown to evaluators.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    originals = {p.id: p for p in problems if p.provenance is None}
    pairs = []
    for p in problems:
        if p.provenance is None:
            continue
        parent = originals.get(p.provenance.parent_id)
        if parent is None:
            continue
        pairs.append(
            {
                "blind_id": _blind_id(seed, p.id),
                "original": parent.text,
                "augmented": p.text,
                "candidate_id": p.id,
                "method": p.provenance.method,
                "method_family": corpus.METHOD_FAMILIES[p.provenance.method],
            }
        )
    import random

    rng = random.Random(f"eval-batch:{seed}")
    count = min(len(pairs), round(fraction * len(pairs)))
    sampled = rng.sample(pairs, count)
    rng.shuffle(sampled)
    return sampled


def save_eval_batch(batch: list[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fout:
        for rec in batch:
            fout.write(json.dumps(rec, sort_keys=True) + "\n")


def load_eval_batch(path: str | Path) -> list[dict]:
    with Path(path).open(encoding="utf-8") as fin:
        return [json.loads(line) for line in fin if line.strip()]


def append_rating(record: RatingRecord, path: str | Path) -> None:
    """Append one self-contained JSONL line and flush; crash-safe for prior records."""
    with Path(path).open("a", encoding="utf-8") as fout:
        fout.write(json.dumps(record.to_record(), sort_keys=True) + "\n")
        fout.flush()


def load_ratings(path: str | Path) -> list[RatingRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fin:
        for line in fin:
            if line.strip():
                records.append(RatingRecord.from_record(json.loads(line)))
    return records


def summarize_ratings(
    records: list[RatingRecord], family_of: Optional[dict[str, str]] = None
) -> dict[str, dict[str, float | int]]:
    """Per method family: percent equation/numbers preserved, mean similarity and
    grammaticality. Means are taken over evaluators within a sample, then over
    samples. Without a family mapping everything lands in "all"."""
    by_family_sample: dict[str, dict[str, list[RatingRecord]]] = {}
    for rec in records:
        family = (family_of or {}).get(rec.candidate_id, "all")
        by_family_sample.setdefault(family, {}).setdefault(rec.candidate_id, []).append(rec)
    summary: dict[str, dict[str, float | int]] = {}
    for family in sorted(by_family_sample):
        samples = by_family_sample[family]
        eq, nums, sim, gram = [], [], [], []
        for sample_records in samples.values():
            n = len(sample_records)
            eq.append(sum(r.equation_preserved for r in sample_records) / n)
            nums.append(sum(r.numbers_preserved for r in sample_records) / n)
            sim.append(sum(r.semantic_similarity for r in sample_records) / n)
            gram.append(sum(r.grammaticality for r in sample_records) / n)
        k = len(samples)
        summary[family] = {
            "equation_preserved_pct": 100.0 * sum(eq) / k,
            "numbers_preserved_pct": 100.0 * sum(nums) / k,
            "semantic_similarity_mean": sum(sim) / k,
            "grammaticality_mean": sum(gram) / k,
            "n_samples": k,
            "n_ratings": sum(len(v) for v in samples.values()),
        }
    return summary


def now_timestamp() -> float:
    return time.time()


def growth_accounting_ok(result: AugmentResult) -> bool:
    """Output count must equal originals plus selection-report selections exactly."""
    selections = sum(1 for d in result.decisions if d.chosen_index is not None)
    originals = sum(1 for p in result.problems if p.provenance is None)
    return len(result.problems) == originals + selections
