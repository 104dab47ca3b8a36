"""Acceptance suite: every criterion at its stated tolerance.

Each test prints its own `CRITERION nn [PASS|FAIL]` line.  The heavy
free-boundary runs are shared through a session context, so the whole module
costs roughly the three long simulations it contains.
"""
import pytest

from dnlfront.acceptance import CRITERIA, AcceptanceContext

_ctx = None


def _context(tmp_path_factory):
    global _ctx
    if _ctx is None:
        _ctx = AcceptanceContext(tmp_path_factory.mktemp("acceptance_artifacts"))
    return _ctx


def _run(index, tmp_path_factory):
    ctx = _context(tmp_path_factory)
    result = CRITERIA[index](ctx)
    status = "PASS" if result.passed else "FAIL"
    print(f"\nCRITERION {result.index:2d} [{status}] {result.title}: "
          f"{result.details} ({result.elapsed:.1f}s)")
    assert result.passed, f"criterion {index}: {result.details}"


@pytest.mark.parametrize("index", sorted(CRITERIA))
def test_criterion(index, tmp_path_factory):
    _run(index, tmp_path_factory)
