"""Canonical MWP data model, MaWPS/ASDiv-style loaders, corpus statistics, CV splits."""

from __future__ import annotations

import json
import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Optional

from . import equation as eqmod
from . import textnorm

SOURCES = ("mawps", "asdiv", "augmented", "other")
METHODS = ("problem_reorder", "round_trip", "fill_mask", "synonym", "entity")
METHOD_FAMILIES = {
    "problem_reorder": "paraphrasing",
    "round_trip": "paraphrasing",
    "fill_mask": "substitution",
    "synonym": "substitution",
    "entity": "substitution",
}

QUESTION_CUES = ("how", "what", "find")


class CorpusFormatError(ValueError):
    """File-level failure: unreadable input or unknown/invalid container format."""


@dataclass(frozen=True)
class Quantity:
    surface: str
    value: Fraction
    position: tuple[int, int]  # (sentence index, token index within sentence)
    placeholder_id: int


@dataclass(frozen=True)
class AugmentationTag:
    parent_id: str
    method: str
    stage_trace: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown augmentation method {self.method!r}")


@dataclass(frozen=True)
class Problem:
    id: str
    body: tuple[str, ...]  # normalized sentence strings
    question: str  # normalized, "" when absent
    quantities: tuple[Quantity, ...]
    equation: eqmod.Equation
    answer: Fraction
    source: str = "other"
    provenance: Optional[AugmentationTag] = None

    @property
    def text(self) -> str:
        parts = list(self.body)
        if self.question:
            parts.append(self.question)
        return " ".join(parts)

    @property
    def sentences(self) -> tuple[str, ...]:
        return self.body + ((self.question,) if self.question else ())

    def align(self) -> eqmod.QuantityAlignment:
        return eqmod.align_quantities(self.equation, self.quantities)

    def quantity_values(self) -> tuple[Fraction, ...]:
        return tuple(sorted(q.value for q in self.quantities))


class CorpusStats(NamedTuple):
    problem_count: int
    vocabulary_size: int


class RejectedRecord(NamedTuple):
    record_id: str
    reason: str


class LoadResult(NamedTuple):
    problems: list[Problem]
    rejects: list[RejectedRecord]


def extract_quantities(text: str) -> list[Quantity]:
    """All numeral tokens of a normalized text, in order, with sequential placeholder ids."""
    quantities: list[Quantity] = []
    sentences = textnorm.split_sentences(textnorm.tokenize(text))
    for si, sentence in enumerate(sentences):
        for ti, tok in enumerate(sentence):
            if textnorm.is_number_token(tok):
                quantities.append(
                    Quantity(
                        surface=tok,
                        value=textnorm.number_value(tok),
                        position=(si, ti),
                        placeholder_id=len(quantities),
                    )
                )
    return quantities


def question_index(sentences: list[str]) -> Optional[int]:
    """Index of the last '?'-terminated sentence, else the last sentence with an
    interrogative cue word, else None."""
    for i in range(len(sentences) - 1, -1, -1):
        if sentences[i].rstrip().endswith("?"):
            return i
    for i in range(len(sentences) - 1, -1, -1):
        tokens = {t.casefold() for t in sentences[i].split()}
        if tokens & set(QUESTION_CUES):
            return i
    return None


def split_body_question(text: str) -> tuple[list[str], str]:
    """Split a full problem text into body sentences and the question sentence."""
    sentences = textnorm.sentence_strings(text)
    qi = question_index(sentences)
    if qi is None:
        return sentences, ""
    return sentences[:qi] + sentences[qi + 1 :], sentences[qi]


def problem_from_text(
    problem_id: str,
    text: str,
    equation_text: str,
    source: str,
    stated_answer: Optional[float] = None,
    provenance: Optional[AugmentationTag] = None,
) -> Problem:
    """Build and fully validate a Problem from raw text and an equation string.

    Raises ValueError (with reason) for anything that must send the record to
    the rejects list: equation parse/solve failures, stated-answer mismatch,
    alignment failure, empty text, missing question terminator.
    """
    normalized = textnorm.normalize(text)
    if not normalized:
        raise ValueError("empty problem text")
    body, question = split_body_question(normalized)
    if not body and not question:
        raise ValueError("no sentences found")
    eq = eqmod.parse_equation(equation_text)
    answer = eqmod.solve_linear(eq)
    if stated_answer is not None and abs(float(answer) - stated_answer) > 1e-6 * max(
        1.0, abs(stated_answer)
    ):
        raise ValueError(
            f"stated answer {stated_answer} disagrees with solved answer {float(answer)}"
        )
    quantities = tuple(extract_quantities(" ".join(body + [question]) if question else " ".join(body)))
    problem = Problem(
        id=problem_id,
        body=tuple(body),
        question=question,
        quantities=quantities,
        equation=eq,
        answer=answer,
        source=source,
        provenance=provenance,
    )
    eqmod.align_quantities(eq, quantities)  # raises AlignmentError on failure
    return problem


def _load_mawps(path: Path) -> LoadResult:
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(records, list):
        raise CorpusFormatError(f"{path}: expected a JSON array of records")
    problems, rejects = [], []
    for i, rec in enumerate(records):
        rec_id = str(rec.get("iIndex", f"row{i}")) if isinstance(rec, dict) else f"row{i}"
        try:
            if not isinstance(rec, dict):
                raise ValueError("record is not an object")
            text = rec["sQuestion"]
            equations = rec["lEquations"]
            solutions = rec.get("lSolutions") or [None]
            if not equations:
                raise ValueError("lEquations is empty")
            stated = float(solutions[0]) if solutions[0] is not None else None
            problems.append(
                problem_from_text(rec_id, text, equations[0], "mawps", stated_answer=stated)
            )
        except (KeyError, ValueError) as exc:
            reason = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
            rejects.append(RejectedRecord(rec_id, reason))
    return LoadResult(problems, rejects)


def _load_asdiv(path: Path) -> LoadResult:
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise CorpusFormatError(f"{path}: not valid XML: {exc}") from exc
    problems, rejects = [], []
    for i, node in enumerate(root.iter("Problem")):
        rec_id = node.get("ID", f"prob{i}")
        try:
            body = (node.findtext("Body") or "").strip()
            question = (node.findtext("Question") or "").strip()
            formula = (node.findtext("Formula") or "").strip()
            answer_text = (node.findtext("Answer") or "").strip()
            if not formula:
                raise ValueError("missing Formula")
            eq_text = formula
            if "x" not in formula.lower():
                # ASDiv writes "7+2=9"; relabel as X = <expression>
                eq_text = "X=" + formula.split("=", 1)[0]
            stated = None
            m = answer_text.split() if answer_text else []
            if m:
                try:
                    stated = float(m[0])
                except ValueError:
                    stated = None
            problems.append(
                problem_from_text(
                    rec_id, f"{body} {question}", eq_text, "asdiv", stated_answer=stated
                )
            )
        except ValueError as exc:
            rejects.append(RejectedRecord(rec_id, str(exc)))
    return LoadResult(problems, rejects)


def problem_to_record(p: Problem) -> dict:
    aug = None
    if p.provenance is not None:
        aug = {
            "parent_id": p.provenance.parent_id,
            "method": p.provenance.method,
            "stage_trace": list(p.provenance.stage_trace),
        }
    return {
        "id": p.id,
        "body": list(p.body),
        "question": p.question,
        "equation": p.equation.source_text,
        "answer": str(p.answer),
        "source": p.source,
        "augmentation": aug,
    }


def problem_from_record(rec: dict) -> Problem:
    provenance = None
    if rec.get("augmentation"):
        aug = rec["augmentation"]
        provenance = AugmentationTag(
            parent_id=aug["parent_id"],
            method=aug["method"],
            stage_trace=tuple(aug.get("stage_trace", ())),
        )
    body = tuple(textnorm.normalize(s) for s in rec["body"])
    question = textnorm.normalize(rec.get("question", ""))
    text = " ".join(body + ((question,) if question else ()))
    eq = eqmod.parse_equation(rec["equation"])
    answer = eqmod.solve_linear(eq)
    stated = Fraction(rec["answer"])
    if stated != answer:
        raise ValueError(f"stored answer {stated} disagrees with solved answer {answer}")
    source = rec.get("source", "other")
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}")
    quantities = tuple(extract_quantities(text))
    problem = Problem(
        id=str(rec["id"]),
        body=body,
        question=question,
        quantities=quantities,
        equation=eq,
        answer=answer,
        source=source,
        provenance=provenance,
    )
    eqmod.align_quantities(eq, quantities)
    return problem


def _load_jsonl(path: Path) -> LoadResult:
    problems, rejects = [], []
    with path.open(encoding="utf-8") as fin:
        for lineno, line in enumerate(fin, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                rejects.append(RejectedRecord(f"line{lineno}", f"bad JSON: {exc}"))
                continue
            rec_id = str(rec.get("id", f"line{lineno}"))
            try:
                problems.append(problem_from_record(rec))
            except (KeyError, ValueError) as exc:
                reason = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
                rejects.append(RejectedRecord(rec_id, reason))
    return LoadResult(problems, rejects)


_LOADERS = {
    "mawps_json": _load_mawps,
    "asdiv_xmlish": _load_asdiv,
    "canonical_jsonl": _load_jsonl,
}


def load_corpus(path: str | Path, format: str) -> LoadResult:
    """Load a corpus file; malformed records land in `rejects`, never abort the load."""
    if format not in _LOADERS:
        raise CorpusFormatError(f"unknown format {format!r} (expected one of {sorted(_LOADERS)})")
    path = Path(path)
    if not path.is_file():
        raise CorpusFormatError(f"no such file: {path}")
    return _LOADERS[format](path)


def save_jsonl(problems: Iterable[Problem], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fout:
        for p in problems:
            fout.write(json.dumps(problem_to_record(p), sort_keys=True) + "\n")


def corpus_stats(problems: list[Problem]) -> CorpusStats:
    vocab: set[str] = set()
    for p in problems:
        vocab.update(tok.casefold() for tok in p.text.split())
    return CorpusStats(problem_count=len(problems), vocabulary_size=len(vocab))


def kfold_split(
    problems: list[Problem], k: int, seed: int
) -> list[tuple[list[str], list[str]]]:
    """Deterministic k-fold split; augmented problems stay in their parent's fold."""
    if k < 2 or k > len(problems):
        raise ValueError(f"k={k} out of range for {len(problems)} problems")
    groups: dict[str, list[str]] = {}
    for p in problems:
        key = p.provenance.parent_id if p.provenance is not None else p.id
        groups.setdefault(key, []).append(p.id)
    keys = sorted(groups)
    random.Random(seed).shuffle(keys)
    # largest groups first so greedy fill stays balanced; ties keep shuffled order
    keys.sort(key=lambda key: -len(groups[key]))
    folds: list[list[str]] = [[] for _ in range(k)]
    for key in keys:
        smallest = min(range(k), key=lambda i: (len(folds[i]), i))
        folds[smallest].extend(groups[key])
    all_ids = [p.id for p in problems]
    result = []
    for i in range(k):
        test = set(folds[i])
        result.append(([pid for pid in all_ids if pid not in test], folds[i]))
    return result
