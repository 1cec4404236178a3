from __future__ import annotations

from pathlib import Path

import pytest

from mwpa import corpus

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def mawps_100():
    loaded = corpus.load_corpus(DATA / "mawps_100.json", "mawps_json")
    assert not loaded.rejects
    return loaded.problems


@pytest.fixture(scope="session")
def asdiv_100():
    loaded = corpus.load_corpus(DATA / "asdiv_100.xml", "asdiv_xmlish")
    assert not loaded.rejects
    return loaded.problems


@pytest.fixture
def nancy_problem():
    return corpus.problem_from_text(
        "t1",
        "Nancy grew 8 potatoes . Sandy grew 5 potatoes . How many potatoes did they grow in total ?",
        "X=8+5",
        "mawps",
    )


@pytest.fixture
def lucy_problem():
    return corpus.problem_from_text(
        "t3-lucy",
        "Lucy has an aquarium with 5 fish . She wants to buy 1 more fish . How many fish would Lucy have then ?",
        "X=5+1",
        "mawps",
    )


@pytest.fixture
def seashell_problem():
    return corpus.problem_from_text(
        "t3-shells",
        "Sally found 7 seashells , Tom found 12 seashells , and Jessica found 5 seashells on the beach . How many seashells did they find together ?",
        "X=7+12+5",
        "mawps",
    )


@pytest.fixture
def walnut_problem():
    return corpus.problem_from_text(
        "t3-walnut",
        "There are 8 walnut trees currently in the park . Park workers will plant 3 more walnut trees today . How many walnut trees will the park have when the workers are finished ?",
        "X=8+3",
        "mawps",
    )


@pytest.fixture
def katie_problem():
    return corpus.problem_from_text(
        "t3-katie",
        "Katie 's team won their dodgeball game and scored 25 points total . If Katie scored 13 of the points and everyone else scored 4 points each , how many players were on her team ?",
        "X=(25-13)/4+1",
        "mawps",
    )
