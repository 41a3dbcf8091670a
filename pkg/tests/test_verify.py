"""Every registered invariant must pass on a fresh checkout."""

import pytest

from qetsim import verify


@pytest.fixture(scope="module")
def outcomes():
    return {o.check_id: o for o in verify.run_checks("all")}


def test_registry_covers_every_module():
    prefixes = {check_id.split("/")[0] for check_id in verify.available_checks()}
    assert prefixes == set(verify.MODULES)


@pytest.mark.parametrize("check_id", verify.available_checks())
def test_invariant(check_id, outcomes):
    outcome = outcomes[check_id]
    assert outcome.passed, f"{check_id}: {outcome.detail}"


def test_scope_filter():
    only = verify.run_checks("qet-protocol")
    assert only
    assert all(o.check_id.startswith("qet-protocol/") for o in only)


def test_unknown_scope_rejected():
    with pytest.raises(ValueError, match="scope"):
        verify.run_checks("nonsense")
