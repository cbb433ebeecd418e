import json

import pytest

import stc


def test_assignment_and_subsets():
    assert stc.min_weight_assignment([[-2, 0], [0, -1]]) == [0, 1]
    assert stc.circular_shift([0, 1, 2]) == [2, 0, 1]
    assert stc.circular_shift([0, 1, 2], 3) == [0, 1, 2]
    members = stc.subset_members([0, 1, 2])
    assert len(members) == 3
    assert len(stc.partition_into_subsets(4)) == 6


def test_admissibility_and_decomposition():
    ok, margin = stc.is_admissible(2, [0.3, 0.3, 0.3, 0.3])
    assert ok and margin == pytest.approx(0.4)
    bv = stc.bv_decompose(2, [0.3, 0.3, 0.3, 0.3])
    assert sum(c for c, _ in bv["terms"]) == pytest.approx(0.6)
    assert bv["reconstruction"] == pytest.approx([0.3] * 4, abs=1e-9)
    with pytest.raises(stc.StcError):
        stc.bv_decompose(2, [0.9, 0.3, 0.1, 0.1])


def test_decisions():
    perm, mask = stc.msl_decide(2, [-2, 0, 0, -1], [0, 0, 0, 0])
    assert perm == [0, 1] and mask == [1, 1]
    perm, mask = stc.llf_ss_decide(2, [-1, -5, 2, 0], [0, 0, 0, 0], [0, 1])
    assert perm == [1, 0] and mask == [1, 0]


def test_switch_dp_never_idle_matches_myopic():
    targets = [[1, 0, 1, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 0, 1]]
    opt, myopic = stc.switch_dp(2, targets, allow_idle=False)
    assert opt == myopic


def test_simulation_summary():
    r = stc.simulate("uniform-iid", 4, 2000, 0.5, policy="MSL-SS", seed=3)
    assert r["max_dev"] <= 0
    assert not r["diverged"]
    assert len(r["services"]) == len(r["target_totals"]) == 16
    again = stc.simulate("uniform-iid", 4, 2000, 0.5, policy="MSL-SS", seed=3)
    assert again == r


def test_region_slice():
    cells = stc.dp_regions(1, 20, 15, [None], 0.5)
    assert len(cells) == 15
    assert {a for _, _, a in cells} <= {0, 1}


def test_verify_and_main():
    code, report = stc.verify("fast")
    assert code == 0
    assert json.loads(report)["passed"]
    code, out, err = stc.main(["run"])
    assert code == 2
