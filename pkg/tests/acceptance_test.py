from dataclasses import replace

import pytest

from qresilience.acceptance import CRITERIA, AcceptanceLimits, main, run_acceptance


def test_every_criterion_registered_once():
    ids = [criterion_id for criterion_id, _, _ in CRITERIA]
    assert ids == list(range(1, 15))


def test_fast_criteria_pass():
    results = run_acceptance(only={1, 3, 4, 5, 6, 7, 14})
    assert [r.id for r in results] == [1, 3, 4, 5, 6, 7, 14]
    failed = [(r.id, r.detail) for r in results if not r.passed]
    assert failed == []


def test_injected_tolerance_violation_is_named(capsys):
    limits = replace(AcceptanceLimits(), exact=-1.0)
    (result,) = run_acceptance(limits, only={2})
    assert not result.passed
    assert result.name == "lambda^n fragility law"
    assert main(limits, only={2}) == 1
    assert "[-] FAIL  2 lambda^n fragility law" in capsys.readouterr().out


def test_small_scale_statistical_criteria():
    limits = replace(AcceptanceLimits(), sampled_alpha=20_000, sampled_seeds=5, distributed_alpha=50)
    results = run_acceptance(limits, only={12, 13})
    assert all(r.passed for r in results), [r.detail for r in results]


@pytest.mark.slow
def test_full_suite_passes(capsys):
    assert main() == 0
    out = capsys.readouterr().out
    for criterion_id, name, _ in CRITERIA:
        assert out.count(f" {criterion_id:2d} {name} (") == 1
