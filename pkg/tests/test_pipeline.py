from __future__ import annotations

import dataclasses
import json

import pytest

from mwpa import corpus, pipeline
from mwpa.paraphrase import Candidate, make_candidate
from mwpa.pipeline import (
    PipelineConfig,
    RatingRecord,
    augment_dataset,
    export_eval_batch,
    parse_config,
    summarize_ratings,
    validate_candidate,
)
from mwpa.providers import ProviderSet


@pytest.fixture(scope="module")
def small_corpus(mawps_100):
    return mawps_100[:20]


@pytest.fixture(scope="module")
def small_result(small_corpus):
    return augment_dataset(small_corpus, PipelineConfig(seed=7), ProviderSet())


class TestConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.base_candidates == 7
        assert set(cfg.methods) == set(corpus.METHODS)

    def test_parse_round_trip(self):
        text = """
        # augmentation settings
        base_candidates = 5
        methods = problem_reorder, synonym
        routes = en_ru_en
        seed = 13
        combine_mode = union
        replacement_rate = 0.3
        """
        cfg = parse_config(text)
        assert cfg.base_candidates == 5
        assert cfg.methods == ("problem_reorder", "synonym")
        assert cfg.combine_mode == "union"
        assert cfg.substitution.replacement_rate == 0.3
        assert cfg.substitution.seed == 13

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            parse_config("fancy_mode = on")

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(methods=("problem_reorder", "back_translate"))

    def test_unknown_route_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(routes=("en_fi_en",))


class TestValidateCandidate:
    def test_good_candidate_passes(self, walnut_problem):
        text = walnut_problem.text.replace("today", "soon")
        c = make_candidate(walnut_problem, "fill_mask", text)
        report = validate_candidate(walnut_problem, c)
        assert report.passed
        assert report.flags()["pass"]

    def test_missing_number_fails(self, lucy_problem):
        text = lucy_problem.text.replace("5", "some")
        c = make_candidate(lucy_problem, "round_trip", text)
        report = validate_candidate(lucy_problem, c)
        assert not report.numbers_preserved and not report.passed

    def test_identical_text_fails(self, lucy_problem):
        c = make_candidate(lucy_problem, "round_trip", lucy_problem.text)
        report = validate_candidate(lucy_problem, c)
        assert not report.differs_from_parent and not report.passed
        assert report.numbers_preserved

    def test_missing_question_fails(self, nancy_problem):
        c = make_candidate(nancy_problem, "round_trip", "Nancy grew 8 potatoes . Sandy grew 5 potatoes .")
        report = validate_candidate(nancy_problem, c)
        assert not report.question_present and not report.passed


class TestAugmentDataset:
    def test_no_methods_is_identity(self, small_corpus):
        cfg = PipelineConfig(methods=())
        result = augment_dataset(small_corpus, cfg, ProviderSet())
        assert result.problems == list(small_corpus)
        assert result.stats["output_count"] == len(small_corpus)

    def test_per_family_growth_bound(self, small_corpus, small_result):
        n = len(small_corpus)
        assert n <= small_result.stats["output_count"] <= 3 * n

    def test_every_emitted_candidate_passes_gates(self, small_corpus, small_result):
        parents = {p.id: p for p in small_corpus}
        checked = 0
        for p in small_result.problems:
            if p.provenance is None:
                continue
            parent = parents[p.provenance.parent_id]
            c = Candidate(
                parent_id=parent.id,
                method=p.provenance.method,
                body=p.body,
                question=p.question,
                quantities=p.quantities,
            )
            assert validate_candidate(parent, c).passed
            checked += 1
        assert checked > 0

    def test_equation_labels_copied_verbatim(self, small_corpus, small_result):
        parents = {p.id: p for p in small_corpus}
        for p in small_result.problems:
            if p.provenance is not None:
                parent = parents[p.provenance.parent_id]
                assert p.equation == parent.equation
                assert p.answer == parent.answer

    def test_accounting_identity(self, small_result):
        assert pipeline.growth_accounting_ok(small_result)
        selected = sum(
            v for k, v in small_result.counters.items() if k.startswith("selected.")
        )
        assert selected == sum(
            1 for d in small_result.decisions if d.chosen_index is not None
        )

    def test_union_mode_single_selection_per_parent(self, small_corpus):
        cfg = PipelineConfig(seed=7, combine_mode="union")
        result = augment_dataset(small_corpus, cfg, ProviderSet())
        augmented = [p for p in result.problems if p.provenance is not None]
        parents = {p.provenance.parent_id for p in augmented}
        assert len(augmented) == len(parents)

    def test_byte_identical_reruns(self, small_corpus, tmp_path):
        files = []
        for run in ("a", "b"):
            result = augment_dataset(small_corpus, PipelineConfig(seed=7), ProviderSet())
            out = tmp_path / f"{run}.jsonl"
            report = tmp_path / f"{run}_report.jsonl"
            corpus.save_jsonl(result.problems, out)
            pipeline.write_selection_report(result.decisions, report)
            files.append((out.read_bytes(), report.read_bytes()))
        assert files[0] == files[1]

    def test_provider_outage_degrades_not_aborts(self, small_corpus):
        from mwpa.providers import ProviderError

        class DeadTranslator:
            def translate(self, text, src, tgt):
                raise ProviderError("translation backend down")

        providers = ProviderSet(translator=DeadTranslator())
        result = augment_dataset(small_corpus, PipelineConfig(seed=7), providers)
        assert result.provider_failed
        assert result.counters["provider_failure.round_trip"] >= 1
        # substitution family still produced augmentations
        assert any(
            p.provenance is not None and p.provenance.method in ("fill_mask", "synonym", "entity")
            for p in result.problems
        )

    def test_output_ordering_parent_then_augmentations(self, small_corpus, small_result):
        ids = [p.id for p in small_result.problems]
        for parent in small_corpus:
            group = [i for i in ids if i == parent.id or i.startswith(f"{parent.id}__")]
            start = ids.index(parent.id)
            assert ids[start : start + len(group)] == sorted(group, key=lambda s: (s != parent.id, s))


class TestEvalExport:
    def test_fraction_counts(self, small_result):
        batch = export_eval_batch(small_result.problems, 0.4, seed=1)
        augmented = [p for p in small_result.problems if p.provenance is not None]
        assert len(batch) == round(0.4 * len(augmented))

    def test_full_fraction_shuffled(self, small_result):
        batch = export_eval_batch(small_result.problems, 1.0, seed=1)
        augmented = [p for p in small_result.problems if p.provenance is not None]
        assert len(batch) == len(augmented)
        assert [b["candidate_id"] for b in batch] != [p.id for p in augmented]

    def test_deterministic(self, small_result):
        a = export_eval_batch(small_result.problems, 0.4, seed=9)
        b = export_eval_batch(small_result.problems, 0.4, seed=9)
        assert a == b

    def test_pairs_reference_parents(self, small_result):
        batch = export_eval_batch(small_result.problems, 1.0, seed=2)
        parents = {p.id: p for p in small_result.problems if p.provenance is None}
        by_id = {p.id: p for p in small_result.problems}
        for rec in batch:
            cand = by_id[rec["candidate_id"]]
            assert rec["augmented"] == cand.text
            assert rec["original"] == parents[cand.provenance.parent_id].text

    def test_bad_fraction(self, small_result):
        with pytest.raises(ValueError):
            export_eval_batch(small_result.problems, 0.0, seed=0)


class TestRatings:
    def test_record_validation(self):
        with pytest.raises(ValueError):
            RatingRecord("c", "e", True, True, 1.4, 3)
        with pytest.raises(ValueError):
            RatingRecord("c", "e", True, True, 0.5, 6)

    def test_two_evaluator_mean(self):
        records = [
            RatingRecord("s1", "e1", True, True, 0.8, 3),
            RatingRecord("s1", "e2", True, True, 1.0, 5),
        ]
        summary = summarize_ratings(records)
        assert summary["all"]["grammaticality_mean"] == pytest.approx(4.0)
        assert summary["all"]["semantic_similarity_mean"] == pytest.approx(0.9)

    def test_sample_then_evaluator_mean_order(self):
        # one sample rated twice, another once: per-sample means first
        records = [
            RatingRecord("s1", "e1", True, True, 1.0, 5),
            RatingRecord("s1", "e2", False, True, 0.0, 1),
            RatingRecord("s2", "e1", True, False, 0.5, 4),
        ]
        summary = summarize_ratings(records)["all"]
        assert summary["equation_preserved_pct"] == pytest.approx(75.0)
        assert summary["numbers_preserved_pct"] == pytest.approx(50.0)
        assert summary["grammaticality_mean"] == pytest.approx((3 + 4) / 2)
        assert summary["n_samples"] == 2 and summary["n_ratings"] == 3

    def test_degenerate_all_perfect(self):
        records = [RatingRecord(f"s{i}", "e1", True, True, 1.0, 5) for i in range(4)]
        summary = summarize_ratings(records)["all"]
        assert summary["equation_preserved_pct"] == 100.0
        assert summary["numbers_preserved_pct"] == 100.0
        assert summary["semantic_similarity_mean"] == 1.0
        assert summary["grammaticality_mean"] == 5.0

    def test_empty_records(self):
        assert summarize_ratings([]) == {}

    def test_per_family_split(self):
        records = [
            RatingRecord("a", "e1", True, True, 1.0, 5),
            RatingRecord("b", "e1", False, False, 0.0, 1),
        ]
        summary = summarize_ratings(records, {"a": "paraphrasing", "b": "substitution"})
        assert summary["paraphrasing"]["equation_preserved_pct"] == 100.0
        assert summary["substitution"]["equation_preserved_pct"] == 0.0

    def test_round_trip_through_file(self, tmp_path):
        path = tmp_path / "ratings.jsonl"
        records = [
            RatingRecord("s1", "e1", True, False, 0.75, 4, timestamp=1.5),
            RatingRecord("s2", "e1", False, True, 0.25, 2, timestamp=2.5),
        ]
        for r in records:
            pipeline.append_rating(r, path)
        assert pipeline.load_ratings(path) == records
