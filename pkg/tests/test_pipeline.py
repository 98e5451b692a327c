import random
from collections import Counter

import pytest

from contrastkit.corpus import Dataset, Label, Provenance, serialize_dataset
from contrastkit.synthesis import (
    AnchorSet,
    JudgeVerdict,
    LlmClient,
    LlmEndpointConfig,
    MockTransport,
    consensus_filter,
    generate_contrast_set,
    select_anchors,
)

from .conftest import build_mock_table, make_example
from .test_anchors import candidates_for, ranking_entry


def clients_from_table(table: dict, panel_size: int = 2):
    transport = MockTransport(table)
    generator = LlmClient(
        LlmEndpointConfig(role="generator", model_id="mock-gen"),
        transport,
        sleeper=lambda _s: None,
    )
    judges = [
        LlmClient(
            LlmEndpointConfig(role="judge", model_id=f"mock-judge-{i + 1}"),
            transport,
            sleeper=lambda _s: None,
        )
        for i in range(panel_size)
    ]
    return generator, judges


def anchor_set_of(labels, ngram=("nobody", "is")):
    anchors = tuple(
        make_example(
            f"a{i:03d}",
            premise=f"Scene number {i} in a park.",
            hypothesis=f"People say {' '.join(ngram)} watching scene {i}.",
            label=label,
            artifact_ngram=ngram,
        )
        for i, label in enumerate(labels)
    )
    return AnchorSet(anchors=anchors, per_ngram_quota=len(anchors), ngram_list=((ngram, labels[0]),))


class TestConsensus:
    def test_unanimous_kept(self):
        verdicts = [JudgeVerdict("j1", True, "ok"), JudgeVerdict("j2", True, "ok")]
        assert consensus_filter(verdicts, panel_size=2)

    def test_any_false_discarded(self):
        verdicts = [JudgeVerdict("j1", True, "ok"), JudgeVerdict("j2", False, "bad")]
        assert not consensus_filter(verdicts, panel_size=2)

    def test_missing_verdict_discarded(self):
        verdicts = [JudgeVerdict("j1", True, "ok")]
        assert not consensus_filter(verdicts, panel_size=2)


class TestPipeline:
    def test_all_accept_yields_full_pairing(self):
        anchors = anchor_set_of(
            [Label.ENTAILMENT, Label.CONTRADICTION, Label.NEUTRAL, Label.NEUTRAL]
        )
        generator, judges = clients_from_table(build_mock_table(anchors))
        result = generate_contrast_set(anchors, generator, judges)
        assert len(result.pairs) == 4
        assert result.rejections == ()
        ds = result.to_dataset()
        assert len(ds) == 8
        for pair in result.pairs:
            assert pair.anchor.hypothesis == pair.counterfactual.hypothesis
            assert pair.anchor.label is not pair.counterfactual.label
            assert pair.counterfactual.provenance is Provenance.SYNTHESIZED
            assert pair.pair_id == pair.anchor.id + "#cf"
            assert pair.counterfactual.id == pair.pair_id
            assert len(pair.verdicts) == 2

    def test_single_judge_rejection_drops_pair(self):
        anchors = anchor_set_of(
            [Label.ENTAILMENT, Label.ENTAILMENT, Label.ENTAILMENT, Label.ENTAILMENT]
        )
        table = build_mock_table(anchors, reject_anchor_ids={"a002"})
        generator, judges = clients_from_table(table)
        result = generate_contrast_set(anchors, generator, judges)
        assert len(result.pairs) == 3
        assert len(result.rejections) == 1
        assert result.rejections[0].anchor_id == "a002"
        assert result.rejections[0].reason == "judge_rejected"
        assert "a002" not in {p.anchor.id for p in result.pairs}

    def test_no_perturbation_rejected_after_retry(self):
        anchors = anchor_set_of([Label.ENTAILMENT, Label.CONTRADICTION])
        table = build_mock_table(anchors, echo_anchor_ids={"a000"})
        generator, judges = clients_from_table(table)
        result = generate_contrast_set(anchors, generator, judges)
        assert len(result.pairs) == 1
        assert result.rejections[0].reason == "no_perturbation"

    def test_unreachable_judge_discards_precisely(self):
        anchors = anchor_set_of([Label.ENTAILMENT, Label.CONTRADICTION])
        table = build_mock_table(anchors, drop_judge_ids={"a001"})
        generator, judges = clients_from_table(table)
        result = generate_contrast_set(anchors, generator, judges)
        assert len(result.pairs) == 1
        assert result.rejections[0].reason == "judge_unreachable"

    def test_malformed_judge_counts_as_unreachable(self):
        anchors = anchor_set_of([Label.ENTAILMENT])
        table = build_mock_table(anchors, malformed_judge_ids={"a000"})
        generator, judges = clients_from_table(table)
        result = generate_contrast_set(anchors, generator, judges)
        assert result.pairs == ()
        assert result.rejections[0].reason == "judge_unreachable"

    def test_generation_transport_failure_logged(self):
        anchors = anchor_set_of([Label.ENTAILMENT])
        generator, judges = clients_from_table({})  # empty table: every call fails
        result = generate_contrast_set(anchors, generator, judges)
        assert result.pairs == ()
        assert result.rejections[0].reason == "generation_failed"

    def test_output_sorted_and_deterministic(self):
        labels = [random.Random(4).choice(list(Label)) for _ in range(24)]
        anchors = anchor_set_of(labels)
        table = build_mock_table(anchors)
        first = generate_contrast_set(*_spread(clients_from_table(table), anchors))
        second = generate_contrast_set(*_spread(clients_from_table(table), anchors))
        assert [p.pair_id for p in first.pairs] == sorted(p.pair_id for p in first.pairs)
        assert serialize_dataset(first.to_dataset()) == serialize_dataset(second.to_dataset())

    def test_neutral_targets_alternate_among_pairs(self):
        anchors = anchor_set_of([Label.NEUTRAL] * 9)
        generator, judges = clients_from_table(build_mock_table(anchors))
        result = generate_contrast_set(anchors, generator, judges)
        targets = Counter(p.counterfactual.label for p in result.pairs)
        assert abs(targets[Label.ENTAILMENT] - targets[Label.CONTRADICTION]) <= 1

    def test_panel_must_be_nonempty(self):
        anchors = anchor_set_of([Label.ENTAILMENT])
        generator, _ = clients_from_table(build_mock_table(anchors))
        with pytest.raises(ValueError):
            generate_contrast_set(anchors, generator, judges=[])


def _spread(clients, anchors):
    generator, judges = clients
    return anchors, generator, judges


class TestValidationScaleRun:
    def test_top10_sized_to_936_examples(self):
        # 8 n-grams with full 47-candidate pools + 2 with 46: 468 anchors.
        specs = []
        for g in range(10):
            count = 46 if g >= 8 else 47
            specs.append(((f"g{g}", "marker"), Label.CONTRADICTION, count))
        examples = []
        for tokens, label, count in specs:
            examples.extend(candidates_for(tokens, label, count, tokens[0]))
        ds = Dataset(name="val", examples=tuple(examples))
        rankings = [
            ranking_entry(tokens, label, 100.0 - i)
            for i, (tokens, label, _) in enumerate(specs)
        ]
        anchor_set = select_anchors(ds, rankings, k=10, m=47, seed=11)
        assert len(anchor_set) == 468
        generator, judges = clients_from_table(build_mock_table(anchor_set))
        result = generate_contrast_set(anchor_set, generator, judges)
        contrast = result.to_dataset()
        assert len(result.pairs) == 468
        assert len(contrast) == 936
