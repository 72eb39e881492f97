import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cskit.errors import EmptyCorpus, EmptyReferenceCorpus, IncompleteJudgments
from cskit.metrics import (
    AlignmentCounts,
    Judgment,
    agreement,
    cer,
    edit_distance,
    human_ser,
    ser,
    wer,
)


def levenshtein_oracle(a, b):
    """Plain cost-only DP, written independently of the counting version."""
    dp = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        prev_diag = dp[0]
        dp[0] = i
        for j in range(1, len(b) + 1):
            cur = dp[j]
            dp[j] = min(
                dp[j] + 1,
                dp[j - 1] + 1,
                prev_diag + (a[i - 1] != b[j - 1]),
            )
            prev_diag = cur
    return dp[-1]


class TestEditDistance:
    def test_identical(self):
        counts = edit_distance(list("abc"), list("abc"))
        assert counts == AlignmentCounts(0, 0, 0, 3)

    def test_kitten_sitting(self):
        counts = edit_distance(list("kitten"), list("sitting"))
        assert counts.distance == 3
        assert counts.distance == levenshtein_oracle("kitten", "sitting")

    def test_empty_ref(self):
        counts = edit_distance([], ["a", "b"])
        assert counts.insertions == 2 and counts.distance == 2

    def test_empty_hyp(self):
        counts = edit_distance(["a", "b"], [])
        assert counts.deletions == 2 and counts.hits == 0

    def test_prefers_substitutions_low(self):
        # "ab" -> "ba" costs 2 either as 2 subs or as 1 ins + 1 del
        counts = edit_distance(list("ab"), list("ba"))
        assert counts.distance == 2
        assert counts.substitutions == 0

    @given(
        st.lists(st.sampled_from("abc"), max_size=8),
        st.lists(st.sampled_from("abc"), max_size=8),
    )
    @settings(max_examples=300)
    def test_matches_oracle_and_counts_reconcile(self, a, b):
        counts = edit_distance(a, b)
        assert counts.distance == levenshtein_oracle(a, b)
        assert counts.hits + counts.substitutions + counts.deletions == len(a)
        assert counts.hits + counts.substitutions + counts.insertions == len(b)

    @given(
        st.lists(st.sampled_from("ab"), max_size=6),
        st.lists(st.sampled_from("ab"), max_size=6),
        st.lists(st.sampled_from("ab"), max_size=6),
    )
    @settings(max_examples=200)
    def test_symmetry_and_triangle(self, a, b, c):
        assert edit_distance(a, b).distance == edit_distance(b, a).distance
        assert (
            edit_distance(a, c).distance
            <= edit_distance(a, b).distance + edit_distance(b, c).distance
        )


class TestRates:
    def test_equal_is_zero(self):
        assert wer(["a b"], ["a b"]) == 0.0
        assert cer(["a b"], ["a b"]) == 0.0

    def test_wer_sub_plus_ins(self):
        assert wer(["a b c"], ["a x c d"]) == pytest.approx(200.0 / 3)

    def test_pooled_not_averaged(self):
        # 1 error over 1 word and 0 over 9: pooled 10%, macro-average 50%
        refs = ["w", "a b c d e f g h i"]
        hyps = ["x", "a b c d e f g h i"]
        assert wer(refs, hyps) == pytest.approx(10.0)

    def test_reorder_invariant(self):
        refs, hyps = ["a b", "c"], ["a x", "c"]
        assert wer(refs, hyps) == wer(refs[::-1], hyps[::-1])

    def test_cer_ignores_spaces_by_default(self):
        # identical letters, different segmentation
        assert cer(["ab c"], ["a bc"]) == 0.0
        assert cer(["ab c"], ["a bc"], keep_spaces=True) > 0.0

    def test_normalization_applied(self):
        assert wer(["Hello, World."], ["hello world"]) == 0.0

    def test_empty_reference_rejected(self):
        with pytest.raises(EmptyReferenceCorpus):
            wer([""], ["a"])

    def test_ser(self):
        refs = ["a", "b", "c", "d"]
        hyps = ["a", "b", "c", "x"]
        assert ser(refs, hyps) == 25.0
        assert ser(refs, refs) == 0.0

    def test_ser_empty(self):
        with pytest.raises(EmptyCorpus):
            ser([], [])


def _judgments(table):
    """table: {item: (accept_a, accept_b)}"""
    out = []
    for item, (a, b) in table.items():
        out.append(Judgment(item, "eva", a))
        out.append(Judgment(item, "evb", b))
    return out


class TestHumanEval:
    def test_human_ser(self):
        js = _judgments({
            "i1": (True, True),
            "i2": (True, True),
            "i3": (True, False),
            "i4": (False, False),
        })
        assert human_ser(js, ["i1", "i2", "i3", "i4"]) == 50.0

    def test_all_double_accept(self):
        js = _judgments({"i1": (True, True), "i2": (True, True)})
        assert human_ser(js, ["i1", "i2"]) == 0.0

    def test_agreement(self):
        js = _judgments({
            "i1": (True, True),
            "i2": (False, False),
            "i3": (True, False),
            "i4": (True, True),
        })
        assert agreement(js, ["i1", "i2", "i3", "i4"]) == 75.0

    def test_agreement_symmetric(self):
        js = _judgments({"i1": (True, False), "i2": (False, True)})
        flipped = [
            Judgment(j.item_id, {"eva": "evb", "evb": "eva"}[j.evaluator_id], j.accept)
            for j in js
        ]
        items = ["i1", "i2"]
        assert agreement(js, items) == agreement(flipped, items)

    def test_incomplete_rejected(self):
        js = [Judgment("i1", "eva", True)]
        with pytest.raises(IncompleteJudgments) as err:
            human_ser(js, ["i1", "i2"])
        assert err.value.items == ["i1", "i2"]
