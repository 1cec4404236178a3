"""Linguistic annotation for the augmentation methods: tokens, coarse POS tags,
lexicon-based named entities, conservative pronoun resolution, question detection.

The rule-based default backend is hermetic (bundled name/place/org lexicons) and
deterministic; statistical backends can plug in through AnnotatorBackend.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional, Protocol

from . import corpus, textnorm

POS_TAGS = ("NOUN", "PROPN", "VERB", "ADJ", "ADV", "PRON", "NUM", "DET", "ADP", "PUNCT", "OTHER")

PRONOUNS = frozenset(
    "i me my mine myself we us our ours ourselves you your yours yourself "
    "he him his himself she her hers herself it its itself they them their theirs themselves".split()
)
MALE_PRONOUNS = frozenset({"he", "him", "his", "himself"})
FEMALE_PRONOUNS = frozenset({"she", "her", "hers", "herself"})
# possessives rewritten as <name>'s; subjects/objects as <name>
POSSESSIVE_PRONOUNS = frozenset({"his", "her", "hers"})

DETERMINERS = frozenset(
    "the a an this that these those some any no every each all both another such "
    "many much few several more most other either neither".split()
)
ADPOSITIONS = frozenset(
    "in on at of for with from by to into onto over under above below between among "
    "through during before after behind beside near within without around across "
    "against along past toward towards up down off out inside outside per".split()
)
CONJUNCTIONS = frozenset("and or but nor so yet if then than because while when as".split())
INTERROGATIVES = frozenset("how what when where who whom whose why which".split())
AUXILIARIES = frozenset(
    "is are was were am be been being do does did has have had will would can could "
    "shall should may might must".split()
)

VERBS = frozenset(
    """go goes went gone going get gets got gotten getting make makes made making take
    takes took taken taking give gives gave given giving find finds found finding buy
    buys bought buying sell sells sold selling grow grows grew grown growing eat eats
    ate eaten eating want wants wanted wanting need needs needed needing plant plants
    planted planting pick picks picked picking place places placed placing put puts
    putting collect collects collected collecting count counts counted counting score
    scores scored scoring win wins won winning lose loses lost losing spend spends
    spent spending save saves saved saving earn earns earned earning pay pays paid
    paying borrow borrows borrowed borrowing lend lends lent lending return returns
    returned returning start starts started starting finish finishes finished
    finishing begin begins began begun beginning end ends ended ending see sees saw
    seen seeing say says said saying tell tells told telling ask asks asked asking
    know knows knew known knowing think thinks thought thinking come comes came coming
    leave leaves leaving keep keeps kept keeping let lets use uses used using
    work works worked working play plays played playing run runs ran running walk
    walks walked walking ride rides rode riding drive drives drove driven driving
    fly flies flew flown flying swim swims swam swimming catch catches caught catching
    throw throws threw thrown throwing read reads reading write writes wrote written
    writing live lives lived living visit visits visited visiting help helps helped
    helping carry carries carried carrying bring brings brought bringing send sends
    sent sending receive receives received receiving share shares shared sharing
    divide divides divided dividing split splits splitting add adds added adding
    remove removes removed removing fill fills filled filling empty emptied organize
    organizes organized organizing sort sorts sorted sorting stack stacks stacked
    stacking hold holds held holding contain contains contained containing weigh
    weighs weighed weighing measure measures measured measuring cost costs costing
    drink drinks drank drunk drinking cook cooks cooked cooking bake bakes baked
    baking wash washes washed washing clean cleans cleaned cleaning cut cuts cutting
    break breaks broke broken breaking fix fixes fixed fixing build builds built
    building open opens opened opening close closes closed closing watch watches
    watched watching wait waits waited waiting stay stays stayed staying become
    becomes became becoming seem seems seemed seeming remain remains remained
    remaining gather gathers gathered gathering unite unites united uniting""".split()
)

ADJECTIVES = frozenset(
    """red blue green yellow orange purple violet pink brown black white gray grey
    golden silver big small little large huge tiny tall short long wide narrow thick
    thin new old young fresh full empty whole equal same different extra left
    remaining total final first last next second third fourth fifth good bad nice
    pretty beautiful happy sad fast quick slow easy hard heavy light favorite
    chocolate mystery picture""".split()
)

ADVERBS = frozenset(
    """now then soon later early late here there away
    together altogether again still yet already just only also too very really almost
    exactly currently""".split()
)


class AnnotationError(Exception):
    """Backend failure; `partial` carries whatever annotation succeeded."""

    def __init__(self, message: str, partial: Optional["AnnotatedText"] = None):
        super().__init__(message)
        self.partial = partial


class QuestionNotFoundError(ValueError):
    pass


@dataclass(frozen=True)
class EntitySpan:
    start: int  # global token index, inclusive
    end: int  # exclusive
    kind: str  # PERSON | PLACE | ORG


@dataclass(frozen=True)
class AnnotatedText:
    tokens: tuple[tuple[str, int], ...]  # (token, sentence index)
    pos: tuple[str, ...]
    entities: tuple[EntitySpan, ...]
    coref_chains: tuple[frozenset[int], ...]
    question_index: Optional[int]

    @property
    def token_strings(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.tokens)

    def detokenize(self) -> str:
        return " ".join(self.token_strings)

    def entity_surface(self, span: EntitySpan) -> str:
        return " ".join(self.token_strings[span.start : span.end])

    def entity_token_indexes(self) -> set[int]:
        return {i for span in self.entities for i in range(span.start, span.end)}


class AnnotatorBackend(Protocol):
    capabilities: frozenset[str]  # subset of {"pos", "ner", "coref"}

    def annotate(self, text: str) -> AnnotatedText: ...


def _read_lexicon(name: str) -> frozenset[str]:
    data = resources.files("mwpa").joinpath(f"data/lexicons/{name}")
    return frozenset(
        line.strip() for line in data.read_text(encoding="utf-8").splitlines() if line.strip()
    )


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    return _read_lexicon("stopwords.txt")


@lru_cache(maxsize=1)
def name_genders() -> dict[str, str]:
    """First name (casefolded) -> 'f' | 'm' | 'u' (in both lists)."""
    female = {n.casefold() for n in _read_lexicon("names_female.txt")}
    male = {n.casefold() for n in _read_lexicon("names_male.txt")}
    genders = {n: "f" for n in female - male}
    genders.update({n: "m" for n in male - female})
    genders.update({n: "u" for n in female & male})
    return genders


def person_names(gender: Optional[str] = None) -> list[str]:
    """Sorted lexicon names, optionally restricted to one gender (unisex included)."""
    genders = name_genders()
    if gender is None:
        return sorted(n.capitalize() for n in genders)
    return sorted(n.capitalize() for n, g in genders.items() if g in (gender, "u"))


@lru_cache(maxsize=1)
def place_names() -> frozenset[str]:
    return _read_lexicon("places.txt")


@lru_cache(maxsize=1)
def org_names() -> frozenset[str]:
    return _read_lexicon("orgs.txt")


def _possessive_stem(token: str) -> str:
    for suffix in ("'s", "’s"):
        if token.endswith(suffix):
            return token[: -len(suffix)]
    return token


class RuleBasedBackend:
    """Hermetic annotator: closed-class lists + suffix heuristics for POS, bundled
    lexicons for NER, unique-gender-compatible-antecedent rule for pronouns."""

    capabilities = frozenset({"pos", "ner", "coref"})

    def __init__(self):
        self._genders = name_genders()
        self._places = {p.casefold() for p in place_names()}
        self._org_tokens = [tuple(o.split()) for o in sorted(org_names())]
        self._stopwords = stopwords()

    def annotate(self, text: str) -> AnnotatedText:
        sentences = textnorm.split_sentences(textnorm.tokenize(text))
        tokens: list[tuple[str, int]] = []
        sentence_starts: list[int] = []
        for si, sent in enumerate(sentences):
            sentence_starts.append(len(tokens))
            tokens.extend((tok, si) for tok in sent)
        entities = self._find_entities(tokens, set(sentence_starts))
        entity_kinds = {}
        for span in entities:
            for i in range(span.start, span.end):
                entity_kinds[i] = span.kind
        pos = tuple(
            self._tag(tok, i, entity_kinds, set(sentence_starts))
            for i, (tok, _) in enumerate(tokens)
        )
        chains = self._coref(tokens, entities)
        question = None
        for si, sent in enumerate(sentences):
            if sent and sent[-1] == "?":
                question = si
        return AnnotatedText(
            tokens=tuple(tokens),
            pos=pos,
            entities=tuple(entities),
            coref_chains=tuple(chains),
            question_index=question,
        )

    def _find_entities(
        self, tokens: list[tuple[str, int]], sentence_starts: set[int]
    ) -> list[EntitySpan]:
        spans: list[EntitySpan] = []
        i = 0
        n = len(tokens)
        while i < n:
            tok = tokens[i][0]
            stem = _possessive_stem(tok)
            if not stem or not stem[0].isupper():
                i += 1
                continue
            # sentence-initial capitalized function words are never entities
            if i in sentence_starts and stem.casefold() in self._stopwords:
                i += 1
                continue
            org = self._match_org(tokens, i)
            if org is not None:
                spans.append(EntitySpan(i, org, "ORG"))
                i = org
                continue
            folded = stem.casefold()
            # names like Boston or Austin double as places; a preceding
            # location preposition settles the reading
            prev = tokens[i - 1][0].casefold() if i > 0 else ""
            if folded in self._places and prev in ("to", "in", "at", "from", "near"):
                spans.append(EntitySpan(i, i + 1, "PLACE"))
                i += 1
                continue
            if folded in self._genders:
                end = i + 1
                # merge an immediately following capitalized given name ("Sally Ann")
                while end < n:
                    nxt = _possessive_stem(tokens[end][0])
                    if nxt and nxt[0].isupper() and nxt.casefold() in self._genders:
                        end += 1
                    else:
                        break
                spans.append(EntitySpan(i, end, "PERSON"))
                i = end
                continue
            if folded in self._places:
                spans.append(EntitySpan(i, i + 1, "PLACE"))
                i += 1
                continue
            # multi-token places like "United States" are not in the lexicon; single-token only
            i += 1
        return spans

    def _match_org(self, tokens: list[tuple[str, int]], i: int) -> Optional[int]:
        for parts in self._org_tokens:
            end = i + len(parts)
            if end <= len(tokens) and all(
                tokens[i + j][0] == parts[j] for j in range(len(parts))
            ):
                return end
        return None

    def _tag(
        self,
        token: str,
        index: int,
        entity_kinds: dict[int, str],
        sentence_starts: set[int],
    ) -> str:
        if textnorm.is_number_token(token):
            return "NUM"
        if not any(c.isalpha() for c in token):
            return "PUNCT"
        if token[0] in "'’":
            return "OTHER"  # detached clitic ('s, 'll)
        if index in entity_kinds:
            return "PROPN"
        folded = _possessive_stem(token).casefold()
        if folded in PRONOUNS:
            return "PRON"
        if folded in DETERMINERS:
            return "DET"
        if folded in ADPOSITIONS:
            return "ADP"
        if folded in AUXILIARIES or folded in VERBS:
            return "VERB"
        if folded in CONJUNCTIONS or folded in INTERROGATIVES:
            return "OTHER"
        if folded in ADVERBS:
            return "ADV"
        if folded in ADJECTIVES:
            return "ADJ"
        if folded.endswith("ly") and len(folded) > 4:
            return "ADV"
        if folded.endswith(("ous", "ful", "ive", "able", "ible", "ish")):
            return "ADJ"
        if folded.endswith(("ed", "ing")) and len(folded) > 4:
            return "VERB"
        if token[0].isupper() and index not in sentence_starts:
            return "PROPN"
        return "NOUN"

    def _coref(
        self, tokens: list[tuple[str, int]], entities: list[EntitySpan]
    ) -> list[frozenset[int]]:
        persons = [e for e in entities if e.kind == "PERSON"]
        mentions: dict[str, list[int]] = {}
        for span in persons:
            name = _possessive_stem(tokens[span.start][0]).casefold()
            mentions.setdefault(name, []).append(span.start)
        resolved: dict[str, set[int]] = {}
        for i, (tok, _) in enumerate(tokens):
            folded = tok.casefold()
            if folded in MALE_PRONOUNS:
                wanted = ("m", "u")
            elif folded in FEMALE_PRONOUNS:
                wanted = ("f", "u")
            else:
                continue
            candidates = {
                name
                for name, starts in mentions.items()
                if any(s < i for s in starts) and self._genders.get(name) in wanted
            }
            if len(candidates) == 1:
                resolved.setdefault(candidates.pop(), set()).add(i)
        chains = []
        for name, pron_idxs in sorted(resolved.items()):
            chains.append(frozenset(set(mentions[name]) | pron_idxs))
        return chains


@lru_cache(maxsize=1)
def default_backend() -> RuleBasedBackend:
    return RuleBasedBackend()


def annotate(text: str, backend: Optional[AnnotatorBackend] = None) -> AnnotatedText:
    """Annotate non-empty text; deterministic for a fixed backend."""
    if not text or not text.strip():
        raise ValueError("cannot annotate empty text")
    if backend is None:
        backend = default_backend()
    return backend.annotate(text)


def resolve_pronouns(annotated: AnnotatedText) -> str:
    """Replace resolvable gendered pronouns with their chain's leading PERSON mention;
    possessives become <name>'s. Unresolvable pronouns stay put."""
    tokens = list(annotated.token_strings)
    for chain in annotated.coref_chains:
        person_idxs = [i for i in chain if annotated.pos[i] == "PROPN"]
        if not person_idxs:
            continue
        lead = _possessive_stem(tokens[min(person_idxs)])
        for i in chain:
            folded = tokens[i].casefold()
            if folded in ("he", "she"):
                tokens[i] = lead
            elif folded in POSSESSIVE_PRONOUNS and _is_possessive_use(annotated, i):
                tokens[i] = lead + "'s"
            # object uses and reflexives stay (fluency over coverage)
    return " ".join(tokens)


def _is_possessive_use(annotated: AnnotatedText, i: int) -> bool:
    if annotated.token_strings[i].casefold() == "his":
        return True
    nxt = i + 1
    return nxt < len(annotated.pos) and annotated.pos[nxt] in ("NOUN", "PROPN", "ADJ", "NUM")


def find_question(p: corpus.Problem) -> int:
    """Index (into p.sentences) of the question sentence; cue-word fallback when no '?'."""
    sentences = list(p.sentences)
    if not sentences:
        raise QuestionNotFoundError(f"problem {p.id} has no sentences")
    qi = corpus.question_index(sentences)
    if qi is None:
        raise QuestionNotFoundError(f"problem {p.id} has no identifiable question")
    return qi
