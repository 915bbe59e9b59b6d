"""Verifier behavior: pass on theorems, hypothesis filtering, replayable failures."""

import pytest

from critnum.catalog import catalog_group
from critnum.groups import cyclic, dihedral, heisenberg
from critnum.sumsets import covers_group, exact_reach_mask, sumset
from critnum.verifiers import (
    verify_L2_1,
    verify_L2_2,
    verify_L2_3,
    verify_L2_4,
    verify_L2_5,
    verify_L2_6,
    verify_T1_3_small,
    verify_cd_fold,
    verify_ineq_2_3,
    verify_ineq_2_4,
)


def test_l21_exhaustive_small():
    for g in (cyclic(4), cyclic(6), dihedral(3)):
        report = verify_L2_1(g)
        assert report.mode == "exhaustive"
        assert report.failures == []
        assert report.cases_checked > 0


def test_l21_hypothesis_boundary_not_counted_as_failure():
    # |A| + |B| = |G| can fail to cover, but such pairs are outside the claim
    g = cyclic(4)
    a = g.subset([0, 2])
    assert set(sumset(g, a, a).indices()) == {0, 2}
    report = verify_L2_1(g)
    assert report.failures == []


def test_l21_sampled_deterministic():
    g = catalog_group("D6")
    r1 = verify_L2_1(g, mode="sampled", trials=200, seed=9)
    r2 = verify_L2_1(g, mode="sampled", trials=200, seed=9)
    assert r1.cases_checked == r2.cases_checked == 200
    assert r1.failures == r2.failures == []


def test_l22_z15_exhaustive():
    report = verify_L2_2(3, 5)
    assert report.cases_checked == 3432  # C(14, 7)
    assert report.failures == []


def test_l22_both_constructions():
    r = verify_L2_2(3, 5, which_group="product")
    assert r.failures == []
    with pytest.raises(ValueError):
        verify_L2_2(4, 5)
    with pytest.raises(ValueError):
        verify_L2_2(3, 5, which_group="other")


def test_l22_negative_probe_below_threshold():
    # one size smaller than the guaranteed threshold: a non-basis exists
    g = cyclic(15)
    witness = (1, 2, 3, 4, 13, 14)
    assert not covers_group(g, witness)
    assert len(witness) == 3 + 5 - 2


def test_l23_restricted_exhaustive():
    report = verify_L2_3(cyclic(9), max_set_size=3, max_b_size=4)
    assert report.failures == []
    assert report.cases_checked > 0


def test_l23_single_generator_example():
    g = cyclic(7)
    report = verify_L2_3(g, max_set_size=1, max_b_size=3)
    assert report.failures == []


def test_l23_sampled_counts_skips():
    g = catalog_group("Z9")
    report = verify_L2_3(g, mode="sampled", trials=300, seed=5)
    assert report.failures == []
    assert report.cases_checked + report.skipped == 300


def test_l24_z9_exhaustive_small_sizes():
    report = verify_L2_4(cyclic(9), 3, 4)
    assert report.failures == []
    assert report.cases_checked == 48  # C(4,3)*8 + C(4,4)*16


def test_l24_rejects_even_order():
    with pytest.raises(ValueError):
        verify_L2_4(cyclic(8))


def test_l24_case1_pattern():
    # a set of the shape {a, b, a+b} still has closure at least 6
    g = cyclic(7)
    a, b = 1, 2
    members = (a, b, g.op[a][b])
    assert exact_reach_mask(g, members).bit_count() >= 6


def test_l24_heisenberg_sampled():
    report = verify_L2_4(heisenberg(3), 3, 6, mode="sampled", trials=300, seed=11)
    assert report.failures == []


def test_l25_all_items_both_groups():
    for name in ("Z9", "Z3xZ3"):
        g = catalog_group(name)
        for item in ("i", "ii", "iii", "iv", "v"):
            report = verify_L2_5(g, item)
            assert report.failures == [], (name, item)


def test_l25_zero_sum_free_example():
    g = cyclic(9)
    reach = exact_reach_mask(g, (1, 2, 4))
    assert not reach & 1  # zero-sum free
    assert reach.bit_count() >= 6


def test_l25_requires_order_9():
    with pytest.raises(ValueError):
        verify_L2_5(cyclic(8), "i")
    with pytest.raises(ValueError):
        verify_L2_5(catalog_group("Z9"), "vi")


def test_l26_single_group_budgeted_partial():
    report = verify_L2_6(group="Z27", budget=100, jobs=1)
    assert report.complete is False
    assert report.failures == []


def test_l26_rejects_wrong_order():
    with pytest.raises(ValueError):
        verify_L2_6(group="Z9")


def test_ineq_2_3_exhaustive_z9_up_to_size_5():
    report = verify_ineq_2_3(cyclic(9), max_size=5)
    assert report.failures == []
    assert report.cases_checked > 0


def test_ineq_2_3_sampled_nonabelian():
    report = verify_ineq_2_3(catalog_group("D8"), mode="sampled", trials=400, seed=3)
    assert report.failures == []
    assert report.cases_checked == 400


def test_ineq_2_4_sampled_z27():
    report = verify_ineq_2_4(cyclic(27), trials=800, seed=3)
    assert report.failures == []
    assert report.cases_checked + report.skipped == 800
    assert report.cases_checked > 0  # some samples satisfy the side conditions


def test_ineq_2_4_skips_wide_closures():
    # tiny group: closures of sign-disjoint sets of size >= 2 exceed n/2
    report = verify_ineq_2_4(cyclic(9), trials=100, seed=1, min_size=2, max_size=3)
    assert report.cases_checked + report.skipped == 100
    assert report.failures == []


def test_ineq_2_4_rejects_even_order():
    with pytest.raises(ValueError):
        verify_ineq_2_4(cyclic(8))


def test_cd_fold_small_primes():
    report = verify_cd_fold((2, 3))
    assert report.failures == []
    assert report.cases_checked == 1 + 4  # 1^1 + 2^2


def test_cd_fold_rejects_nonprime_or_large():
    with pytest.raises(ValueError):
        verify_cd_fold((4,))
    with pytest.raises(ValueError):
        verify_cd_fold((17,))


def test_t13_small_passes_and_reports_exclusion():
    report = verify_T1_3_small(jobs=2)
    assert report.failures == []
    assert "A4" in (report.notes or "")
    assert report.cases_checked == 14


def test_report_json_shape():
    report = verify_cd_fold((2,))
    data = report.to_json()
    assert list(data)[:5] == ["lemma_id", "group_name", "mode", "cases_checked", "skipped"]
    assert data["failures"] == []
    assert report.passed
