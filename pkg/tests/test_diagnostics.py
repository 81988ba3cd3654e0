import pytest

from fairaudit.binary_metrics import GroupedConfusions, binary_metric, confusion_by_group
from fairaudit.core import AuditDataset, ConfusionMatrix, MetricId
from fairaudit.diagnostics import (
    IncompatibilityRule,
    diagnose,
    four_fifths_check,
    implied,
    incompatibility_report,
)
from fairaudit.errors import ZeroSelectionEverywhere
from fairaudit.fixtures import selection_dataset

from oracles import records_from_counts


def test_grant_base_rates(grant):
    d = diagnose(grant)
    assert d.base_rate_per_group["G1"] == pytest.approx(91 / 110)
    assert d.base_rate_per_group["G2"] == pytest.approx(19 / 110)
    assert not d.base_rates_equal
    assert d.perfect_prediction is False
    assert d.group_sizes == {"G1": 110, "G2": 110}


def test_symmetric_is_balanced(symmetric):
    d = diagnose(symmetric)
    assert d.base_rates_equal
    assert d.dataset_balanced


def test_skewed_not_balanced():
    recs = records_from_counts("A", 45, 0, 5, 0) + records_from_counts("B", 45, 0, 5, 0)
    d = diagnose(AuditDataset(tuple(recs)))
    assert d.positive_fraction == pytest.approx(0.9)
    assert not d.dataset_balanced
    assert d.perfect_prediction is True


def test_tolerance_is_respected():
    recs = records_from_counts("A", 5, 0, 5, 0) + records_from_counts("B", 4, 0, 6, 0)
    ds = AuditDataset(tuple(recs))
    assert not diagnose(ds).base_rates_equal
    assert diagnose(ds, base_rate_tolerance=0.1).base_rates_equal


class TestFourFifths:
    def test_berkeley_fails(self, berkeley):
        d = diagnose(berkeley)
        assert d.four_fifths_ratio == pytest.approx(346 / 443)
        assert round(d.four_fifths_ratio, 3) == 0.781
        assert d.four_fifths_pass is False

    def test_identical_rates(self):
        ratio, ok = four_fifths_check(confusion_by_group(selection_dataset({"A": 300, "B": 300})))
        assert ratio == 1 and ok

    def test_boundary_passes(self):
        ratio, ok = four_fifths_check(confusion_by_group(selection_dataset({"A": 500, "B": 400})))
        assert ratio == pytest.approx(0.8) and ok

    def test_nobody_selected(self):
        c = GroupedConfusions({"A": ConfusionMatrix(0, 0, 3, 2), "B": ConfusionMatrix(0, 0, 1, 1)})
        with pytest.raises(ZeroSelectionEverywhere):
            four_fifths_check(c)

    def test_matches_sp_disparity_ratio(self, berkeley, grant):
        for ds in (berkeley, grant):
            c = confusion_by_group(ds)
            assert four_fifths_check(c)[0] == pytest.approx(binary_metric("SP", c).disparity_ratio, abs=1e-12)

    def test_scores_only_skips_selection(self):
        from fairaudit.core import AuditRecord
        ds = AuditDataset((AuditRecord(true_outcome=1, group="A", score=0.3),
                           AuditRecord(true_outcome=0, group="B", score=0.6)))
        d = diagnose(ds)
        assert d.four_fifths_ratio is None and d.perfect_prediction is None


class TestIncompatibility:
    def test_eo_pp_unequal_rates(self, grant):
        warns = incompatibility_report(["EO", "PP"], diagnose(grant))
        citations = [w.citation for w in warns]
        assert citations.count("Chouldechova (2017)") == 1
        assert all(w.metrics == ("EO", "PP") for w in warns)

    def test_three_way(self, grant):
        warns = incompatibility_report(["SP", "EO", "PP"], diagnose(grant))
        cites = {w.citation for w in warns}
        assert "Garg et al. (2020)" in cites
        assert "Chouldechova (2017)" in cites
        assert "Hedden (2021)" in cites

    def test_single_metric_never_warns(self, grant):
        assert incompatibility_report(["EOP"], diagnose(grant)) == []
        for m in MetricId:
            assert incompatibility_report([m], diagnose(grant)) == []

    def test_equal_rates_and_perfect_prediction(self):
        recs = records_from_counts("A", 5, 0, 5, 0) + records_from_counts("B", 5, 0, 5, 0)
        d = diagnose(AuditDataset(tuple(recs)))
        assert incompatibility_report(["SP", "EO", "PP", "CAL", "BG_ACC"], d) == []

    def test_eo_carries_eop(self, grant):
        assert implied(["EO"]) == {MetricId.EO, MetricId.EOP}

    def test_rule_needs_two_metrics(self):
        with pytest.raises(ValueError):
            IncompatibilityRule(frozenset({MetricId.SP}), "unequal_base_rates", "x", "y")


def test_reordering_rows_changes_nothing(grant):
    flipped = AuditDataset(tuple(reversed(grant.records)))
    a, b = diagnose(grant), diagnose(flipped)
    assert a.base_rate_per_group == b.base_rate_per_group
    assert (a.four_fifths_ratio, a.base_rates_equal, a.dataset_balanced) == (
        b.four_fifths_ratio, b.base_rates_equal, b.dataset_balanced)
