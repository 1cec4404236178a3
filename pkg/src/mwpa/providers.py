"""Model-capability interfaces with deterministic offline stubs.

Every capability the pipeline consumes (paraphrasing, translation, mask filling,
embedding neighbors, sentence similarity, solver loss) sits behind a narrow
interface. The bundled stubs are hermetic and seed-deterministic, so the whole
pipeline and its tests run without any external model. Remote implementations
speak the JSON protocol documented in the README.
"""

from __future__ import annotations

import hashlib
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Optional, Protocol

import requests

from . import textnorm

MASK = "[MASK]"
DEFAULT_TIMEOUT_MS = 10000
RETRY_ATTEMPTS = 3


class ProviderError(Exception):
    """Base for provider failures; pipeline skips the affected method, never aborts."""


class ProviderTimeout(ProviderError):
    pass


class ProviderHTTPError(ProviderError):
    pass


class ProviderMalformedResponse(ProviderError):
    pass


class ParaphraseProvider(Protocol):
    def generate(self, text: str, n: int) -> list[str]: ...


class TranslationProvider(Protocol):
    def translate(self, text: str, src: str, tgt: str) -> str: ...


class MaskFillProvider(Protocol):
    def fill(self, text: str, top_k: int) -> list[list[str]]: ...


class WordEmbeddingProvider(Protocol):
    def nearest(self, word: str, top_k: int) -> list[tuple[str, float]]: ...


class SimilarityProvider(Protocol):
    def similarity(self, a: str, b: str) -> float: ...


class SolverLossProvider(Protocol):
    def loss(self, text: str, equation_text: str) -> float: ...


def _stable_hash(*parts: str) -> int:
    digest = hashlib.sha256("\x1f".join(parts).encode("utf-8")).hexdigest()
    return int(digest[:16], 16)


def stub_similarity(a: str, b: str) -> float:
    """Token-multiset cosine over case-folded tokens; 1.0 for identical texts."""
    ca = Counter(t.casefold() for t in textnorm.tokenize(a))
    cb = Counter(t.casefold() for t in textnorm.tokenize(b))
    if ca == cb:
        return 1.0
    if not ca or not cb:
        return 0.0
    dot = sum(ca[t] * cb[t] for t in ca)
    norm = math.sqrt(sum(v * v for v in ca.values())) * math.sqrt(
        sum(v * v for v in cb.values())
    )
    return dot / norm


def stub_loss(text: str, equation_text: str) -> float:
    """Deterministic pseudo-random loss in [0, 1), keyed by (text, equation)."""
    return _stable_hash("loss", text, equation_text) / 2**64


class TokenCosineSimilarity:
    def similarity(self, a: str, b: str) -> float:
        return stub_similarity(a, b)


class HashLoss:
    def loss(self, text: str, equation_text: str) -> float:
        return stub_loss(text, equation_text)


@lru_cache(maxsize=1)
def synonym_table() -> dict[str, list[tuple[str, float, str]]]:
    """Bundled embedding-neighbor table: word -> [(neighbor, cosine, pos)] descending."""
    raw = resources.files("mwpa").joinpath("data/synonyms.tsv").read_text(encoding="utf-8")
    table: dict[str, list[tuple[str, float, str]]] = {}
    for line in raw.splitlines():
        if not line.strip():
            continue
        word, neighbor, cosine, pos = line.split("\t")
        table.setdefault(word.casefold(), []).append((neighbor, float(cosine), pos))
    for neighbors in table.values():
        neighbors.sort(key=lambda item: -item[1])
    return table


class LexiconEmbedding:
    """WordEmbeddingProvider over the bundled synonym table."""

    def nearest(self, word: str, top_k: int) -> list[tuple[str, float]]:
        neighbors = synonym_table().get(word.casefold(), [])
        out = [(n, c) for n, c, _ in neighbors if n.casefold() != word.casefold()]
        return out[:top_k]


class LexiconMaskFill:
    """MaskFillProvider proposing bundled-vocabulary words, ranked by a stable
    hash of the mask's token context. Never proposes numerals."""

    def __init__(self):
        table = synonym_table()
        vocab = {n for neighbors in table.values() for n, _, _ in neighbors}
        self._vocab = sorted(w for w in vocab if not textnorm.is_number_token(w))

    def fill(self, text: str, top_k: int) -> list[list[str]]:
        tokens = text.split()
        fills = []
        for i, tok in enumerate(tokens):
            if tok != MASK:
                continue
            left = tokens[i - 1] if i > 0 else ""
            right = tokens[i + 1] if i + 1 < len(tokens) else ""
            ranked = sorted(self._vocab, key=lambda w: _stable_hash("fill", left, right, w))
            fills.append(ranked[:top_k])
        return fills


class ScriptedMaskFill:
    """Test double returning a fixed fill list for every mask."""

    def __init__(self, fills: list[str]):
        self._fills = fills

    def fill(self, text: str, top_k: int) -> list[list[str]]:
        n_masks = text.split().count(MASK)
        return [list(self._fills[:top_k]) for _ in range(n_masks)]


class RuleParaphraser:
    """Deterministic question paraphraser composing small rewrite rules."""

    _PHRASES = [
        ("in total", "in all"),
        ("in all", "altogether"),
        ("How many", "What number of"),
        ("how many", "what number of"),
    ]

    def generate(self, text: str, n: int) -> list[str]:
        rules: list[Callable[[str], str]] = [
            self._swap_phrase(old, new) for old, new in self._PHRASES
        ]
        rules.append(self._drop_trailing_then)
        rules.append(self._strip_question_mark)
        rules.append(self._substitute_synonym(0))
        rules.append(self._substitute_synonym(1))
        variants: list[str] = []
        # single rules first, then pairs, in fixed order
        combos = [(i,) for i in range(len(rules))] + [
            (i, j) for i in range(len(rules)) for j in range(i + 1, len(rules))
        ]
        for combo in combos:
            out = text
            for k in combo:
                out = rules[k](out)
            out = " ".join(out.split())
            if out and out != text and out not in variants:
                variants.append(out)
            if len(variants) >= n:
                break
        return variants

    @staticmethod
    def _swap_phrase(old: str, new: str) -> Callable[[str], str]:
        return lambda text: text.replace(old, new)

    @staticmethod
    def _drop_trailing_then(text: str) -> str:
        tokens = text.split()
        if len(tokens) >= 2 and tokens[-1] == "?" and tokens[-2] == "then":
            return " ".join(tokens[:-2] + ["?"])
        return text

    @staticmethod
    def _strip_question_mark(text: str) -> str:
        tokens = text.split()
        if tokens and tokens[-1] == "?":
            return " ".join(tokens[:-1])
        return text

    @staticmethod
    def _substitute_synonym(rank: int) -> Callable[[str], str]:
        def rule(text: str) -> str:
            table = synonym_table()
            tokens = text.split()
            for i, tok in enumerate(tokens):
                neighbors = table.get(tok.casefold())
                if neighbors and len(neighbors) > rank:
                    replacement = neighbors[rank][0]
                    if tok[0].isupper():
                        replacement = replacement.capitalize()
                    return " ".join(tokens[:i] + [replacement] + tokens[i + 1 :])
            return text

        return rule


class IdentityTranslator:
    """Stub that returns its input; round trips through it change nothing."""

    def translate(self, text: str, src: str, tgt: str) -> str:
        return text


class RotatingTranslator:
    """Divergence stub: deterministically permutes clauses (or words, for
    single-clause sentences) on every hop. Keeps all tokens, so quantity
    placeholders survive."""

    def translate(self, text: str, src: str, tgt: str) -> str:
        sentences = textnorm.split_sentences(text.split())
        out: list[str] = []
        for sent in sentences:
            terminator = []
            core = sent
            if core and core[-1] in textnorm.SENTENCE_TERMINATORS:
                terminator = [core[-1]]
                core = core[:-1]
            clauses: list[list[str]] = [[]]
            for tok in core:
                if tok == ",":
                    clauses.append([])
                else:
                    clauses[-1].append(tok)
            clauses = [c for c in clauses if c]
            if len(clauses) >= 2:
                clauses = clauses[1:] + clauses[:1]
                rearranged = []
                for ci, clause in enumerate(clauses):
                    if ci:
                        rearranged.append(",")
                    rearranged.extend(clause)
            elif len(core) >= 2:
                rearranged = core[1:] + core[:1]
            else:
                rearranged = core
            out.extend(rearranged + terminator)
        return " ".join(out)


class DroppingTranslator:
    """Corruption stub: behaves like RotatingTranslator but deletes the first
    token carrying the given prefix on every hop."""

    def __init__(self, drop_prefix: str = "QTY"):
        self._inner = RotatingTranslator()
        self._prefix = drop_prefix

    def translate(self, text: str, src: str, tgt: str) -> str:
        tokens = text.split()
        for i, tok in enumerate(tokens):
            if tok.startswith(self._prefix):
                tokens = tokens[:i] + tokens[i + 1 :]
                break
        return self._inner.translate(" ".join(tokens), src, tgt)


class ScriptedParaphraser:
    """Test double returning a fixed list of paraphrases."""

    def __init__(self, outputs: list[str]):
        self._outputs = outputs

    def generate(self, text: str, n: int) -> list[str]:
        return list(self._outputs[:n])


def remote_provider_call(
    endpoint: str,
    payload: dict,
    timeout_ms: Optional[int] = None,
    attempts: int = RETRY_ATTEMPTS,
    backoff_s: float = 0.1,
) -> object:
    """POST JSON to a provider endpoint; 3 attempts with exponential backoff.

    Returns the decoded "result" field. Raises ProviderTimeout,
    ProviderHTTPError, or ProviderMalformedResponse.
    """
    if timeout_ms is None:
        timeout_ms = int(os.environ.get("MWPA_PROVIDER_TIMEOUT_MS", DEFAULT_TIMEOUT_MS))
    last_error: Optional[ProviderError] = None
    for attempt in range(attempts):
        if attempt:
            time.sleep(backoff_s * 2 ** (attempt - 1))
        try:
            response = requests.post(endpoint, json=payload, timeout=timeout_ms / 1000.0)
        except requests.Timeout:
            last_error = ProviderTimeout(f"{endpoint}: timed out after {timeout_ms} ms")
            continue
        except requests.RequestException as exc:
            last_error = ProviderHTTPError(f"{endpoint}: {exc}")
            continue
        if response.status_code != 200:
            last_error = ProviderHTTPError(f"{endpoint}: HTTP {response.status_code}")
            continue
        try:
            body = response.json()
        except ValueError:
            return _raise_malformed(endpoint, "body is not JSON")
        if not isinstance(body, dict) or "ok" not in body:
            return _raise_malformed(endpoint, "missing field 'ok'")
        if not body["ok"]:
            raise ProviderError(f"{endpoint}: provider error: {body.get('error', 'unknown')}")
        if "result" not in body:
            return _raise_malformed(endpoint, "missing field 'result'")
        return body["result"]
    raise last_error if last_error is not None else ProviderError(f"{endpoint}: no attempts")


def _raise_malformed(endpoint: str, detail: str) -> object:
    raise ProviderMalformedResponse(f"{endpoint}: malformed response: {detail}")


class RemoteParaphraser:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def generate(self, text: str, n: int) -> list[str]:
        result = remote_provider_call(f"{self.base_url}/paraphrase", {"text": text, "n": n})
        if not isinstance(result, list) or not all(isinstance(s, str) for s in result):
            _raise_malformed(self.base_url, "'result' must be a list of strings")
        return [s for s in result if s][:n]


class RemoteTranslator:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def translate(self, text: str, src: str, tgt: str) -> str:
        result = remote_provider_call(
            f"{self.base_url}/translate", {"text": text, "src": src, "tgt": tgt}
        )
        if not isinstance(result, str):
            _raise_malformed(self.base_url, "'result' must be a string")
        return result


class RemoteMaskFill:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def fill(self, text: str, top_k: int) -> list[list[str]]:
        result = remote_provider_call(f"{self.base_url}/fill", {"text": text, "top_k": top_k})
        if not isinstance(result, list):
            _raise_malformed(self.base_url, "'result' must be a list of per-mask lists")
        return [[str(w) for w in mask if not textnorm.is_number_token(str(w))][:top_k] for mask in result]


class RemoteEmbedding:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def nearest(self, word: str, top_k: int) -> list[tuple[str, float]]:
        result = remote_provider_call(
            f"{self.base_url}/nearest", {"word": word, "top_k": top_k}
        )
        if not isinstance(result, list):
            _raise_malformed(self.base_url, "'result' must be a list of [word, cosine]")
        return [(str(w), float(c)) for w, c in result][:top_k]


class RemoteSimilarity:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")
        self._probe()

    def _probe(self):
        # contract check on a fixed pair: self-similarity 1, symmetry within 1e-6
        a, b = "one small check", "a different probe pair"
        if abs(self.similarity(a, a) - 1.0) > 1e-6:
            raise ProviderError(f"{self.base_url}: similarity(t, t) != 1 on probe")
        if abs(self.similarity(a, b) - self.similarity(b, a)) > 1e-6:
            raise ProviderError(f"{self.base_url}: similarity not symmetric on probe")

    def similarity(self, a: str, b: str) -> float:
        result = remote_provider_call(f"{self.base_url}/similarity", {"a": a, "b": b})
        if not isinstance(result, (int, float)):
            _raise_malformed(self.base_url, "'result' must be a number")
        return float(result)


class RemoteLoss:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def loss(self, text: str, equation_text: str) -> float:
        result = remote_provider_call(
            f"{self.base_url}/loss", {"text": text, "equation": equation_text}
        )
        if not isinstance(result, (int, float)) or result < 0 or not math.isfinite(result):
            _raise_malformed(self.base_url, "'result' must be a finite non-negative number")
        return float(result)


@dataclass
class ProviderSet:
    """The resolved providers a pipeline run uses."""

    paraphraser: ParaphraseProvider = field(default_factory=RuleParaphraser)
    translator: TranslationProvider = field(default_factory=RotatingTranslator)
    mask_fill: MaskFillProvider = field(default_factory=LexiconMaskFill)
    embedding: WordEmbeddingProvider = field(default_factory=LexiconEmbedding)
    similarity: SimilarityProvider = field(default_factory=TokenCosineSimilarity)
    loss: SolverLossProvider = field(default_factory=HashLoss)


_REMOTE_FACTORIES = {
    "PARAPHRASE": ("paraphraser", RemoteParaphraser),
    "TRANSLATE": ("translator", RemoteTranslator),
    "FILL": ("mask_fill", RemoteMaskFill),
    "NEAREST": ("embedding", RemoteEmbedding),
    "SIMILARITY": ("similarity", RemoteSimilarity),
    "LOSS": ("loss", RemoteLoss),
}


def providers_from_env(environ: Optional[dict] = None) -> ProviderSet:
    """Stubs by default; MWPA_PROVIDER_<NAME>_URL switches a capability to remote."""
    env = os.environ if environ is None else environ
    resolved = ProviderSet()
    for name, (attr, factory) in _REMOTE_FACTORIES.items():
        url = env.get(f"MWPA_PROVIDER_{name}_URL")
        if url:
            setattr(resolved, attr, factory(url))
    return resolved
