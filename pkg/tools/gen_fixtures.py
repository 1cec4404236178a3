"""Deterministic generator for the bundled corpus fixtures.

Produces format-faithful stand-ins for the two benchmark corpora (the real
files are not redistributable): data/mawps_full.json (2,373 records),
data/asdiv_full.xml (1,213 records), 100-problem slices of each, and
data/goldens.json with frozen statistics. Every record is validated through
the loader path before it is written, so the files load with zero rejects.

Run from the repo root:  python tools/gen_fixtures.py
"""

from __future__ import annotations

import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import escape

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from mwpa import corpus, textlab  # noqa: E402

MAWPS_COUNT = 2373
ASDIV_COUNT = 1213
SLICE = 100

# problems quoted in the reference tables; they anchor the golden tests
SEED_PROBLEMS = [
    ("Nancy grew 8 potatoes . Sandy grew 5 potatoes . How many potatoes did they grow in total ?", "X=8+5"),
    ("Lucy has an aquarium with 5 fish . She wants to buy 1 more fish . How many fish would Lucy have then ?", "X=5+1"),
    ("The schools debate team had 4 boys and 6 girls on it . If they were split into groups of 2 , how many groups could they make ?", "X=(4+6)/2"),
    ("There are 8 walnut trees currently in the park . Park workers will plant 3 more walnut trees today . How many walnut trees will the park have when the workers are finished ?", "X=8+3"),
    ("Sally found 7 seashells , Tom found 12 seashells , and Jessica found 5 seashells on the beach . How many seashells did they find together ?", "X=7+12+5"),
    ("Katie 's team won their dodgeball game and scored 25 points total . If Katie scored 13 of the points and everyone else scored 4 points each , how many players were on her team ?", "X=(25-13)/4+1"),
    ("Ricardo was making baggies of cookies with 5 cookies in each bag . If he had 7 chocolate chip cookies and 3 oatmeal cookies , how many baggies could he make ?", "X=(7+3)/5"),
    ("For halloween Destiny bought 9 pieces of candy . She ate 3 pieces the first night and then her sister gave her 2 more pieces . How many pieces of candy does Destiny have now ?", "X=9-3+2"),
    ("Audrey needs 6 cartons of berries to make a berry cobbler . She already has 2 cartons of strawberries and 3 cartons of blueberries . How many more cartons of berries should Audrey buy ?", "X=6-2-3"),
    ("Gavin has 6 shirts . 3 are blue the rest are green . How many green shirts does Gavin have ?", "X=6-3"),
    ("There are 3 pencils in the drawer . Sara placed 7 more pencils in the drawer . How many pencils are there in all ?", "X=3+7"),
    ("A magician was selling magic card decks for 2 dollars each . If he started with 25 decks and by the end of the day he had 4 left , how much money did he earn ?", "X=(25-4)*2"),
    ("There are 18 pencils in the drawer and 6 pencils on the desk . Dan placed 4 pencils on the desk . How many pencils are there in total ?", "X=18+6+4"),
    ("Dan has 12 violet marbles , he gave Mary 4 of the marbles . How many violet marbles does he now have ?", "X=12-4"),
    ("Angela has 7 tickets . Annie gives Angela 5 more . How many tickets does Angela have in all ?", "X=7+5"),
    ("Maria had 5 bottles of water in her fridge . If she drank 1 of them and then bought 2 more , how many bottles would she have ?", "X=5-1+2"),
    ("Alyssa 's dog had puppies . She gave 2 to her friends . She now has 3 puppies . How many puppies did she have to start with ?", "X=2+3"),
    ("Rachel was organizing her book case making sure each of the shelves had exactly 3 books on it . If she had 4 shelves of mystery books and 2 shelves of picture books , how many books did she have total ?", "X=3*(4+2)"),
    ("A cell phone company has a total of 1000 customers across the world . If 740 of its customers live in the United States , how many of its customers live in other countries ?", "X=1000-740"),
    ("Daniel had some noodles . He gave 20 noodles to William . Now Daniel only has 11 noodles . How many noodles did Daniel have to begin with ?", "X=20+11"),
    ("Kimberly went to the store 6 times last month . She buys 9 peanuts each time she goes to the store . How many peanuts did Kimberly buy last month ?", "X=6*9"),
    ("Fred has 10 blue marbles . Fred has 2 times more blue marbles than Tim . How many blue marbles does Tim have ?", "X=10/2"),
    ("Beverly had 10 dimes in his bank . His sister Maria borrowed 2 of his dimes . How many dimes does Beverly have now ?", "X=10-2"),
    ("There are 5 rulers in the drawer . Tim took 3 rulers from the drawer . How many rulers are now in the drawer ?", "X=5-3"),
]

ITEMS = [
    ("apple", "apples"), ("orange", "oranges"), ("banana", "bananas"), ("peach", "peaches"),
    ("pear", "pears"), ("plum", "plums"), ("grape", "grapes"), ("cherry", "cherries"),
    ("lemon", "lemons"), ("melon", "melons"), ("strawberry", "strawberries"), ("blueberry", "blueberries"),
    ("raspberry", "raspberries"), ("carrot", "carrots"), ("potato", "potatoes"), ("tomato", "tomatoes"),
    ("cucumber", "cucumbers"), ("pumpkin", "pumpkins"), ("onion", "onions"), ("pepper", "peppers"),
    ("cookie", "cookies"), ("cupcake", "cupcakes"), ("muffin", "muffins"), ("brownie", "brownies"),
    ("donut", "donuts"), ("pretzel", "pretzels"), ("cracker", "crackers"), ("candy", "candies"),
    ("lollipop", "lollipops"), ("gumball", "gumballs"), ("marshmallow", "marshmallows"), ("waffle", "waffles"),
    ("pancake", "pancakes"), ("sandwich", "sandwiches"), ("pie", "pies"), ("bagel", "bagels"),
    ("book", "books"), ("pencil", "pencils"), ("pen", "pens"), ("crayon", "crayons"),
    ("marker", "markers"), ("eraser", "erasers"), ("notebook", "notebooks"), ("folder", "folders"),
    ("sticker", "stickers"), ("stamp", "stamps"), ("card", "cards"), ("ticket", "tickets"),
    ("coin", "coins"), ("marble", "marbles"), ("bead", "beads"), ("button", "buttons"),
    ("block", "blocks"), ("puzzle", "puzzles"), ("kite", "kites"), ("balloon", "balloons"),
    ("doll", "dolls"), ("toy", "toys"), ("robot", "robots"), ("truck", "trucks"),
    ("seashell", "seashells"), ("rock", "rocks"), ("stone", "stones"), ("pebble", "pebbles"),
    ("feather", "feathers"), ("acorn", "acorns"), ("pinecone", "pinecones"), ("leaf", "leaves"),
    ("flower", "flowers"), ("rose", "roses"), ("tulip", "tulips"), ("daisy", "daisies"),
    ("seed", "seeds"), ("plant", "plants"), ("sapling", "saplings"), ("fern", "ferns"),
    ("fish", "fish"), ("goldfish", "goldfish"), ("guppy", "guppies"), ("minnow", "minnows"),
    ("bird", "birds"), ("sparrow", "sparrows"), ("duck", "ducks"), ("goose", "geese"),
    ("chicken", "chickens"), ("hen", "hens"), ("rabbit", "rabbits"), ("hamster", "hamsters"),
    ("kitten", "kittens"), ("puppy", "puppies"), ("lamb", "lambs"), ("goat", "goats"),
    ("egg", "eggs"), ("bottle", "bottles"), ("cup", "cups"), ("plate", "plates"),
    ("bowl", "bowls"), ("spoon", "spoons"), ("fork", "forks"), ("napkin", "napkins"),
    ("shirt", "shirts"), ("sock", "socks"), ("shoe", "shoes"), ("hat", "hats"),
    ("glove", "gloves"), ("scarf", "scarves"), ("ribbon", "ribbons"), ("bracelet", "bracelets"),
    ("necklace", "necklaces"), ("ring", "rings"), ("photo", "photos"), ("poster", "posters"),
    ("magnet", "magnets"), ("candle", "candles"), ("basket", "baskets"), ("crate", "crates"),
    ("peanut", "peanuts"), ("walnut", "walnuts"), ("almond", "almonds"), ("cashew", "cashews"),
    ("raisin", "raisins"), ("noodle", "noodles"), ("dumpling", "dumplings"), ("meatball", "meatballs"),
]
CONTAINERS = ["drawer", "basket", "box", "jar", "shelf", "bin", "bucket", "bag", "closet", "cabinet", "crate", "pantry"]
PLACES = ["beach", "park", "garden", "yard", "farm", "playground", "library", "market", "fair", "orchard", "meadow", "forest"]
EVENTS = ["party", "picnic", "bake sale", "science fair", "school play", "carnival", "festival", "parade", "field trip", "game night"]
GROUP_PAIRS = [("boys", "girls"), ("adults", "children"), ("singers", "dancers"), ("cats", "dogs"), ("teachers", "students")]
GATHER_VERBS = [("picked", "pick"), ("found", "find"), ("collected", "collect"), ("grew", "grow"), ("gathered", "gather"), ("caught", "catch"), ("counted", "count"), ("won", "win"), ("made", "make"), ("bought", "buy")]
ORGS = ["debate team", "chess club", "choir", "scout troop", "art class", "soccer team", "reading group", "science club", "band", "swim team"]
SPEND_ITEMS = ["snacks", "stickers", "comics", "marbles", "ribbons", "crayons", "balloons", "trading cards", "erasers", "buttons"]

NAME_POOL_SIZE = 2177  # tuned so the full-size corpus vocabulary tracks the reference statistic


def _pronouns(name: str, genders: dict[str, str]) -> tuple[str, str]:
    g = genders.get(name.casefold(), "u")
    if g == "f":
        return "She", "her"
    if g == "m":
        return "He", "his"
    return "They", "their"


class Generator:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        genders = textlab.name_genders()
        pool = sorted(genders)
        self.rng.shuffle(pool)
        self.names = [n.capitalize() for n in pool[:NAME_POOL_SIZE]]
        self.genders = genders
        self._cursor = 0

    def name(self) -> str:
        # cycle rather than sample so the whole pool (and hence the vocabulary
        # size) is covered deterministically
        name = self.names[self._cursor % len(self.names)]
        self._cursor += 1
        return name

    def distinct_names(self, k: int) -> list[str]:
        return [self.name() for _ in range(k)]

    def number(self, lo=2, hi=60) -> int:
        return self.rng.randint(lo, hi)

    def item(self) -> tuple[str, str]:
        return self.rng.choice(ITEMS)

    def make(self) -> tuple[str, str]:
        template = self.rng.choice(
            [self.t_add2, self.t_add2, self.t_sub, self.t_sub, self.t_mul, self.t_div,
             self.t_inall, self.t_add3, self.t_need, self.t_spend, self.t_groups,
             self.t_sell, self.t_twostep, self.t_price]
        )
        return template()

    def t_add2(self):
        n1, n2 = self.distinct_names(2)
        a, b = self.number(), self.number()
        verb, base = self.rng.choice(GATHER_VERBS)
        _, items = self.item()
        text = (f"{n1} {verb} {a} {items} . {n2} {verb} {b} {items} . "
                f"How many {items} did they {base} in total ?")
        return text, f"X={a}+{b}"

    def t_add3(self):
        n1, n2, n3 = self.distinct_names(3)
        a, b, c = self.number(), self.number(), self.number()
        verb, base = self.rng.choice(GATHER_VERBS)
        _, items = self.item()
        place = self.rng.choice(PLACES)
        text = (f"{n1} {verb} {a} {items} , {n2} {verb} {b} {items} , and {n3} {verb} "
                f"{c} {items} at the {place} . How many {items} did they {base} together ?")
        return text, f"X={a}+{b}+{c}"

    def t_sub(self):
        n1, n2 = self.distinct_names(2)
        b = self.number(2, 40)
        a = b + self.number(1, 40)
        _, items = self.item()
        subject, _ = _pronouns(n1, self.genders)
        text = (f"{n1} had {a} {items} . {subject} gave {b} {items} to {n2} . "
                f"How many {items} does {n1} have now ?")
        return text, f"X={a}-{b}"

    def t_mul(self):
        name = self.name()
        a, b = self.number(2, 12), self.number(2, 12)
        _, items = self.item()
        container = self.rng.choice(CONTAINERS)
        text = (f"{name} filled {a} {container} packs with {b} {items} in each pack . "
                f"How many {items} did {name} pack in all ?")
        return text, f"X={a}*{b}"

    def t_div(self):
        name = self.name()
        b = self.number(2, 9)
        a = b * self.number(2, 12)
        _, items = self.item()
        text = (f"{name} has {a} {items} to share equally among {b} friends . "
                f"How many {items} does each friend get ?")
        return text, f"X={a}/{b}"

    def t_inall(self):
        name = self.name()
        a, b = self.number(), self.number()
        _, items = self.item()
        container = self.rng.choice(CONTAINERS)
        text = (f"There are {a} {items} in the {container} . {name} placed {b} more "
                f"{items} in the {container} . How many {items} are there in all ?")
        return text, f"X={a}+{b}"

    def t_need(self):
        name = self.name()
        b = self.number(2, 30)
        a = b + self.number(1, 30)
        _, items = self.item()
        event = self.rng.choice(EVENTS)
        subject, _ = _pronouns(name, self.genders)
        text = (f"{name} needs {a} {items} for the {event} . {subject} already has "
                f"{b} {items} . How many more {items} should {name} buy ?")
        return text, f"X={a}-{b}"

    def t_spend(self):
        name = self.name()
        b, c = self.number(2, 20), self.number(2, 20)
        a = b + c + self.number(1, 30)
        first = self.rng.choice(SPEND_ITEMS)
        second = self.rng.choice([s for s in SPEND_ITEMS if s != first])
        subject, _ = _pronouns(name, self.genders)
        text = (f"{name} had {a} dollars . {subject} spent {b} dollars on {first} and "
                f"{c} dollars on {second} . How many dollars does {name} have left ?")
        return text, f"X={a}-{b}-{c}"

    def t_groups(self):
        org = self.rng.choice(ORGS)
        g1, g2 = self.rng.choice(GROUP_PAIRS)
        c = self.number(2, 6)
        total = c * self.number(2, 8)
        a = self.number(1, total - 1)
        b = total - a
        text = (f"The {org} had {a} {g1} and {b} {g2} on it . If they were split into "
                f"groups of {c} , how many groups could they make ?")
        return text, f"X=({a}+{b})/{c}"

    def t_sell(self):
        name = self.name()
        a, b = self.number(2, 15), self.number(2, 9)
        _, items = self.item()
        text = (f"{name} sold {a} {items} for {b} dollars each at the market . "
                f"How much money did {name} earn ?")
        return text, f"X={a}*{b}"

    def t_twostep(self):
        name = self.name()
        a = self.number(10, 60)
        b = self.number(2, 9)
        c = self.number(2, 9)
        _, items = self.item()
        subject, _ = _pronouns(name, self.genders)
        verb, _ = self.rng.choice(GATHER_VERBS)
        text = (f"{name} {verb} {a} {items} . {subject} ate {b} of them and then "
                f"{verb} {c} more . How many {items} does {name} have now ?")
        return text, f"X={a}-{b}+{c}"

    def t_price(self):
        name = self.name()
        price = self.rng.choice(["1.5", "2.5", "0.5", "3.5"])
        a = self.number(2, 12)
        _, items = self.item()
        text = (f"{name} bought {a} {items} for {price} dollars each . "
                f"How much money did {name} spend ?")
        return text, f"X={a}*{price}"


def build_problems(count: int, seed: int, include_seeds: bool) -> list[tuple[str, str]]:
    out = list(SEED_PROBLEMS) if include_seeds else []
    gen = Generator(seed)
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > count * 20:
            raise RuntimeError("generator failed to converge")
        text, equation = gen.make()
        try:
            corpus.problem_from_text(f"gen{len(out)}", text, equation, "other")
        except ValueError as exc:
            raise RuntimeError(f"template produced invalid problem: {exc}\n{text}\n{equation}")
        out.append((text, equation))
    return out[:count]


def write_mawps(problems: list[tuple[str, str]], path: Path) -> None:
    records = []
    for i, (text, equation) in enumerate(problems, start=1):
        answer = corpus.eqmod.solve_linear(corpus.eqmod.parse_equation(equation))
        records.append(
            {
                "iIndex": i,
                "sQuestion": text,
                "lEquations": [equation],
                "lSolutions": [float(answer)],
            }
        )
    path.write_text(json.dumps(records, indent=1) + "\n", encoding="utf-8")


def _solution_type(equation: str) -> str:
    for op, label in (("+", "Addition"), ("-", "Subtraction"), ("*", "Multiplication"), ("/", "Common-Division")):
        if op in equation.split("=", 1)[1]:
            return label
    return "Other"


def write_asdiv(problems: list[tuple[str, str]], path: Path) -> None:
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', "<Machine-Reading-Corpus-File>", "  <ProblemSet>"]
    for i, (text, equation) in enumerate(problems, start=1):
        answer = corpus.eqmod.solve_linear(corpus.eqmod.parse_equation(equation))
        body, question = corpus.split_body_question(text)
        answer_str = str(answer.numerator) if answer.denominator == 1 else str(float(answer))
        expr = equation.split("=", 1)[1]
        unit = question.split()[2] if len(question.split()) > 2 else "items"
        lines.append(f'    <Problem ID="nluds-{i:04d}" Grade="{(i % 6) + 1}">')
        lines.append(f"      <Body>{escape(' '.join(body))}</Body>")
        lines.append(f"      <Question>{escape(question)}</Question>")
        lines.append(f"      <Solution-Type>{_solution_type(equation)}</Solution-Type>")
        lines.append(f"      <Answer>{answer_str} ({escape(unit)})</Answer>")
        lines.append(f"      <Formula>{escape(f'{expr}={answer_str}')}</Formula>")
        lines.append("    </Problem>")
    lines += ["  </ProblemSet>", "</Machine-Reading-Corpus-File>", ""]
    path.write_text("\n".join(lines), encoding="utf-8")


def main() -> None:
    data = ROOT / "data"
    data.mkdir(exist_ok=True)
    mawps = build_problems(MAWPS_COUNT, seed=20260810, include_seeds=True)
    asdiv = build_problems(ASDIV_COUNT, seed=911, include_seeds=False)

    write_mawps(mawps, data / "mawps_full.json")
    write_mawps(mawps[:SLICE], data / "mawps_100.json")
    write_asdiv(asdiv, data / "asdiv_full.xml")
    write_asdiv(asdiv[:SLICE], data / "asdiv_100.xml")

    goldens = {}
    for stem, fmt in (
        ("mawps_full", "mawps_json"),
        ("mawps_100", "mawps_json"),
        ("asdiv_full", "asdiv_xmlish"),
        ("asdiv_100", "asdiv_xmlish"),
    ):
        suffix = ".json" if fmt == "mawps_json" else ".xml"
        loaded = corpus.load_corpus(data / f"{stem}{suffix}", fmt)
        assert not loaded.rejects, f"{stem}: {loaded.rejects[:3]}"
        s = corpus.corpus_stats(loaded.problems)
        goldens[stem] = {"problems": s.problem_count, "vocabulary": s.vocabulary_size}
        print(f"{stem}: problems={s.problem_count} vocabulary={s.vocabulary_size}")
    (data / "goldens.json").write_text(json.dumps(goldens, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
