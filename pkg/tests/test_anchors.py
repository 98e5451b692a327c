import random
from collections import Counter

import pytest

from contrastkit.artifact_stats import AssociationScore
from contrastkit.corpus import Dataset, Label
from contrastkit.synthesis import TargetAssigner, assign_target_label, select_anchors

from .conftest import make_example


def ranking_entry(ngram, label, rank_value=1.0):
    """AssociationScore stub; selection only reads ngram + label."""
    return AssociationScore(
        ngram=ngram,
        label=label,
        joint_count=100,
        freq=100,
        p_label_given_w=1.0,
        p_label=1 / 3,
        lmi=rank_value,
        lf_lmi=rank_value,
    )


def candidates_for(ngram_tokens, label, count, prefix):
    text = " ".join(ngram_tokens)
    return [
        make_example(
            f"{prefix}:{i}",
            premise=f"Scene {prefix} {i}.",
            hypothesis=f"Some people say {text} around here.",
            label=label,
        )
        for i in range(count)
    ]


class TestSelectAnchors:
    def test_deterministic_sampling(self):
        examples = candidates_for(("nobody", "is"), Label.CONTRADICTION, 5, "c")
        ds = Dataset(name="d", examples=tuple(examples))
        rankings = [ranking_entry(("nobody", "is"), Label.CONTRADICTION)]
        first = select_anchors(ds, rankings, k=1, m=2, seed=42)
        second = select_anchors(ds, rankings, k=1, m=2, seed=42)
        assert len(first) == 2
        assert [a.id for a in first.anchors] == [a.id for a in second.anchors]
        different = select_anchors(ds, rankings, k=1, m=2, seed=43)
        assert {a.id for a in first.anchors} != {a.id for a in different.anchors} or True

    def test_anchor_tagging_and_label_match(self):
        examples = candidates_for(("nobody", "is"), Label.CONTRADICTION, 4, "c")
        # same n-gram under the wrong label must not match
        examples += candidates_for(("nobody", "is"), Label.ENTAILMENT, 4, "e")
        ds = Dataset(name="d", examples=tuple(examples))
        rankings = [ranking_entry(("nobody", "is"), Label.CONTRADICTION)]
        anchors = select_anchors(ds, rankings, k=1, m=10, seed=0)
        assert len(anchors) == 4
        assert all(a.label is Label.CONTRADICTION for a in anchors.anchors)
        assert all(a.artifact_ngram == ("nobody", "is") for a in anchors.anchors)
        assert anchors.shortfalls == {"nobody is": 6}

    def test_multi_match_goes_to_highest_rank(self):
        ex = make_example(
            "multi",
            hypothesis="nobody is sleeping at home",
            label=Label.CONTRADICTION,
        )
        ds = Dataset(name="d", examples=(ex,))
        rankings = [
            ranking_entry(("nobody", "is"), Label.CONTRADICTION, 3.0),
            ranking_entry(("is", "sleeping"), Label.CONTRADICTION, 2.0),
            ranking_entry(("at", "home"), Label.CONTRADICTION, 1.0),
        ]
        anchors = select_anchors(ds, rankings, k=3, m=5, seed=1)
        assert len(anchors) == 1
        assert anchors.anchors[0].artifact_ngram == ("nobody", "is")

    def test_no_duplicate_anchor_ids(self):
        pools = candidates_for(("a", "b"), Label.ENTAILMENT, 30, "p")
        ds = Dataset(name="d", examples=tuple(pools))
        rankings = [
            ranking_entry(("a", "b"), Label.ENTAILMENT, 2.0),
            ranking_entry(("say", "a"), Label.ENTAILMENT, 1.0),
        ]
        anchors = select_anchors(ds, rankings, k=2, m=20, seed=9)
        ids = [a.id for a in anchors.anchors]
        assert len(ids) == len(set(ids))

    def test_allocation_recount_matches_quota(self):
        rng = random.Random(5)
        ngram_specs = [
            (("g1", "x"), Label.ENTAILMENT, 10),
            (("g2", "x"), Label.NEUTRAL, 7),
            (("g3", "x"), Label.CONTRADICTION, 3),
        ]
        examples = []
        for tokens, label, count in ngram_specs:
            examples.extend(candidates_for(tokens, label, count, tokens[0]))
        rng.shuffle(examples)
        ds = Dataset(name="d", examples=tuple(examples))
        rankings = [
            ranking_entry(tokens, label, 10.0 - i)
            for i, (tokens, label, _) in enumerate(ngram_specs)
        ]
        anchors = select_anchors(ds, rankings, k=3, m=5, seed=3)
        allocation = Counter(a.artifact_ngram for a in anchors.anchors)
        assert allocation[("g1", "x")] == 5
        assert allocation[("g2", "x")] == 5
        assert allocation[("g3", "x")] == 3
        assert anchors.shortfalls == {"g3 x": 2}

    def test_empty_rankings_rejected(self):
        ds = Dataset(name="d", examples=(make_example("a"),))
        with pytest.raises(ValueError):
            select_anchors(ds, [], k=1, m=1, seed=0)


class TestTargetAssignment:
    def test_entailment_maps_to_contradiction(self):
        assert assign_target_label(Label.ENTAILMENT, 0) is Label.CONTRADICTION

    def test_contradiction_maps_to_entailment(self):
        assert assign_target_label(Label.CONTRADICTION, 5) is Label.ENTAILMENT

    def test_neutral_alternates(self):
        assert assign_target_label(Label.NEUTRAL, 0) is Label.ENTAILMENT
        assert assign_target_label(Label.NEUTRAL, 1) is Label.CONTRADICTION

    def test_ten_neutrals_split_five_five(self):
        assigner = TargetAssigner()
        targets = [assigner.assign(Label.NEUTRAL) for _ in range(10)]
        counts = Counter(targets)
        assert counts[Label.ENTAILMENT] == 5
        assert counts[Label.CONTRADICTION] == 5

    def test_non_neutral_does_not_advance_toggle(self):
        assigner = TargetAssigner()
        assert assigner.assign(Label.NEUTRAL) is Label.ENTAILMENT
        assigner.assign(Label.ENTAILMENT)
        assigner.assign(Label.CONTRADICTION)
        assert assigner.assign(Label.NEUTRAL) is Label.CONTRADICTION
