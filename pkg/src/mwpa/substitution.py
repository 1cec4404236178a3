"""Substitution-family augmentation: fill-masking near quantities, embedding-neighbor
synonym replacement with POS agreement, and consistent named-entity replacement."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional

from . import corpus, textlab, textnorm
from .paraphrase import Candidate, CandidateRejected, check_quantity_gate, make_candidate
from .providers import MASK, MaskFillProvider, WordEmbeddingProvider

# caps keeping per-problem candidate pools small; edits stay local as in the
# light-touch reference examples
MAX_FILL_COMBINATIONS = 8
FILLS_PER_MASK = 3
ENTITY_VARIANTS = 3

CONTENT_POS = ("NOUN", "VERB", "ADJ", "ADV")


@dataclass(frozen=True)
class SubstitutionConfig:
    top_k: int = 10
    max_masks: int = 3
    mask_window: int = 5  # token distance from a NUM token counting as "nearby"
    replacement_rate: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not 0 < self.replacement_rate <= 1:
            raise ValueError("replacement_rate must be in (0, 1]")
        if self.mask_window < 1:
            raise ValueError("mask_window must be >= 1")


def _rng(seed: int, problem_id: str, stage: str) -> random.Random:
    return random.Random(f"{seed}:{problem_id}:{stage}")


def _match_case(original: str, replacement: str) -> str:
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def _gate_candidate(parent: corpus.Problem, candidate: Candidate) -> bool:
    return candidate.text != parent.text and check_quantity_gate(parent.text, candidate.text)


def fill_mask_augment(
    p: corpus.Problem,
    cfg: SubstitutionConfig,
    provider: MaskFillProvider,
    stage_trace: tuple[str, ...] = (),
) -> list[Candidate]:
    """Mask up to max_masks NOUN/ADJ tokens (preferring those near a NUM token,
    never NUM tokens or entity mentions), let the provider fill them, and emit
    one candidate per fill combination up to a cap."""
    annotated = textlab.annotate(p.text)
    tokens = list(annotated.token_strings)
    entity_idxs = annotated.entity_token_indexes()
    num_positions = [i for i, pos in enumerate(annotated.pos) if pos == "NUM"]
    stops = textlab.stopwords()

    def distance_to_num(i: int) -> int:
        if not num_positions:
            return len(tokens)
        return min(abs(i - j) for j in num_positions)

    eligible = [
        i
        for i, pos in enumerate(annotated.pos)
        if pos in ("NOUN", "ADJ")
        and i not in entity_idxs
        and tokens[i].casefold() not in stops
        and tokens[i].isalpha()
    ]
    if not eligible:
        return []
    ranked = sorted(
        eligible,
        key=lambda i: (0 if distance_to_num(i) <= cfg.mask_window else 1, distance_to_num(i), i),
    )
    mask_idxs = sorted(ranked[: cfg.max_masks])
    masked = list(tokens)
    for i in mask_idxs:
        masked[i] = MASK
    per_mask = provider.fill(" ".join(masked), cfg.top_k)
    options: list[list[str]] = []
    for slot, i in enumerate(mask_idxs):
        fills = per_mask[slot] if slot < len(per_mask) else []
        accepted = [
            f
            for f in fills
            if f
            and " " not in f
            and f.isalpha()
            and not textnorm.is_number_token(f)  # defensive: provider must not send numerals
            and f.casefold() != tokens[i].casefold()
        ]
        options.append(accepted[:FILLS_PER_MASK] or [tokens[i]])
    candidates: list[Candidate] = []
    seen: set[str] = set()
    combos = sorted(
        itertools.product(*(range(len(o)) for o in options)), key=lambda c: (sum(c), c)
    )
    for combo in combos:
        out = list(tokens)
        for slot, i in enumerate(mask_idxs):
            out[i] = _match_case(tokens[i], options[slot][combo[slot]])
        text = " ".join(out)
        if text in seen:
            continue
        seen.add(text)
        candidate = make_candidate(p, "fill_mask", text, stage_trace=stage_trace + ("fill_mask",))
        if _gate_candidate(p, candidate):
            candidates.append(candidate)
        if len(candidates) >= MAX_FILL_COMBINATIONS:
            break
    return candidates


def synonym_augment(
    p: corpus.Problem,
    cfg: SubstitutionConfig,
    provider: WordEmbeddingProvider,
    stage_trace: tuple[str, ...] = (),
) -> list[Candidate]:
    """Replace a seeded sample of non-stop-word keywords with embedding neighbors
    whose POS (re-tagged in context) matches; every occurrence of a keyword is
    replaced consistently."""
    annotated = textlab.annotate(p.text)
    tokens = list(annotated.token_strings)
    entity_idxs = annotated.entity_token_indexes()
    stops = textlab.stopwords()
    keywords: list[str] = []
    first_index: dict[str, int] = {}
    for i, (tok, pos) in enumerate(zip(tokens, annotated.pos)):
        folded = tok.casefold()
        if (
            pos in CONTENT_POS
            and i not in entity_idxs
            and tok.isalpha()
            and folded not in stops
            and folded not in first_index
        ):
            keywords.append(folded)
            first_index[folded] = i
    if not keywords:
        return []
    count = min(len(keywords), math.ceil(cfg.replacement_rate * len(keywords)))
    chosen = sorted(
        _rng(cfg.seed, p.id, "synonym").sample(keywords, count), key=lambda w: first_index[w]
    )

    def substitute_all(base: list[str], word: str, neighbor: str) -> list[str]:
        return [
            _match_case(t, neighbor) if t.casefold() == word else t for t in base
        ]

    survivors: dict[str, list[str]] = {}
    for word in chosen:
        accepted = []
        for neighbor, _cosine in provider.nearest(word, cfg.top_k):
            if (
                not neighbor
                or " " in neighbor
                or textnorm.is_number_token(neighbor)
                or neighbor.casefold() == word
                or not neighbor.isalpha()
            ):
                continue
            trial = substitute_all(tokens, word, neighbor)
            trial_pos = textlab.annotate(" ".join(trial)).pos
            i = first_index[word]
            if i < len(trial_pos) and trial_pos[i] == annotated.pos[i]:
                accepted.append(neighbor)
        if accepted:
            survivors[word] = accepted
    if not survivors:
        return []
    candidates: list[Candidate] = []
    seen: set[str] = set()
    for rank in range(cfg.top_k):
        out = list(tokens)
        for word, accepted in survivors.items():
            if rank < len(accepted):
                out = substitute_all(out, word, accepted[rank])
        text = " ".join(out)
        if text in seen:
            continue
        seen.add(text)
        candidate = make_candidate(p, "synonym", text, stage_trace=stage_trace + ("synonym",))
        if _gate_candidate(p, candidate):
            candidates.append(candidate)
    return candidates


def default_entity_lexicons() -> dict[str, list[str]]:
    return {
        "PERSON": textlab.person_names(),
        "PLACE": sorted(textlab.place_names()),
        "ORG": sorted(textlab.org_names()),
    }


def entity_augment(
    p: corpus.Problem,
    lexicons: Optional[dict[str, list[str]]] = None,
    seed: int = 0,
    stage_trace: tuple[str, ...] = (),
) -> list[Candidate]:
    """Replace each distinct entity with a sampled same-kind lexicon entry.

    The mapping is injective, all mentions of an entity change together, and a
    PERSON bound to a gendered pronoun only draws from the same-gender name
    list. An entity kind with an empty lexicon is left unchanged."""
    lexicons = lexicons if lexicons is not None else default_entity_lexicons()
    annotated = textlab.annotate(p.text)
    tokens = list(annotated.token_strings)
    genders = textlab.name_genders()

    entities: dict[tuple[str, str], list[textlab.EntitySpan]] = {}
    for span in annotated.entities:
        stem = textlab._possessive_stem(annotated.entity_surface(span)).casefold()
        entities.setdefault((stem, span.kind), []).append(span)
    if not entities:
        return []

    pronoun_gender: dict[str, str] = {}
    for chain in annotated.coref_chains:
        names = {
            textlab._possessive_stem(tokens[i]).casefold()
            for i in chain
            if annotated.pos[i] == "PROPN"
        }
        chain_pronouns = {tokens[i].casefold() for i in chain if annotated.pos[i] == "PRON"}
        for name in names:
            if chain_pronouns & textlab.MALE_PRONOUNS:
                pronoun_gender[name] = "m"
            elif chain_pronouns & textlab.FEMALE_PRONOUNS:
                pronoun_gender[name] = "f"

    original_surfaces = {stem for stem, _ in entities}
    candidates: list[Candidate] = []
    seen: set[str] = set()
    for variant in range(ENTITY_VARIANTS):
        rng = _rng(seed, p.id, f"entity:{variant}")
        used: set[str] = set()
        mapping: dict[tuple[str, str], str] = {}
        for key in sorted(entities):
            stem, kind = key
            pool = lexicons.get(kind, [])
            if kind == "PERSON" and stem in pronoun_gender:
                wanted = pronoun_gender[stem]
                pool = [n for n in pool if genders.get(n.casefold()) in (wanted, "u")]
            pool = [
                n
                for n in pool
                if n.casefold() not in used and n.casefold() not in original_surfaces
            ]
            if not pool:
                continue  # empty lexicon for this kind: leave the entity unchanged
            target = pool[rng.randrange(len(pool))]
            mapping[key] = target
            used.add(target.casefold())
        if not mapping:
            return []
        replacements: dict[int, tuple[int, str]] = {}  # span start -> (span end, new text)
        for key, spans in entities.items():
            if key not in mapping:
                continue
            for span in spans:
                surface = annotated.entity_surface(span)
                target = mapping[key]
                if surface.endswith(("'s", "’s")):
                    target = target + "'s"
                replacements[span.start] = (span.end, target)
        out: list[str] = []
        i = 0
        while i < len(tokens):
            if i in replacements:
                end, new_text = replacements[i]
                out.extend(new_text.split())
                i = end
            else:
                out.append(tokens[i])
                i += 1
        text = " ".join(out)
        if text in seen:
            continue
        seen.add(text)
        candidate = make_candidate(p, "entity", text, stage_trace=stage_trace + ("entity",))
        if _gate_candidate(p, candidate):
            candidates.append(candidate)
    return candidates
