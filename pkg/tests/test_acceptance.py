"""Acceptance criteria 1-12 at the three reference parameter sets.

Run under pytest for assertions, or directly (``python3 tests/test_acceptance.py``)
for the PASS/FAIL table alone.  Each criterion is backed by one or more
verification suites; a criterion passes at a parameter set iff every case of
its suites passes.  The literal printed variants of criteria 8 and 12 are
listed separately: they are expected to fail and are reported, not hidden.
"""

import sys
import time
from functools import lru_cache

import pytest

from qjacobi.qcore import QContext
from qjacobi.verify import run_suite

PARAMS = [(0.5, 0.5), (0.7, 0.25), (0.5, -0.5)]

CRITERIA = {
    1: ("Wronskian constants", ("wronskian",)),
    2: ("eigen-equations", ("eigen",)),
    3: ("orthogonality of j", ("orthogonality",)),
    4: ("inversion and Plancherel", ("inversion",)),
    5: ("q-Macdonald transform and routes", ("macdonald",)),
    6: ("limit ratio and ray behaviour", ("limits",)),
    7: ("super-exponential decay of K", ("decay",)),
    8: ("polynomial triple agreement, generating function", ("polynomials",)),
    9: ("identities a) to f)", ("identities",)),
    10: ("quadrature orthonormality and moments", ("quadrature",)),
    11: ("Stieltjes transform cross-check", ("stieltjes", "measure")),
    12: ("Al-Salam-Ismail relation and parity", ("alsalam",)),
}

# (criterion, label, suite, diagnostic prefix, tolerance of the criterion)
PRINTED = [
    (8, "explicit sum with exponent m(m-1)", "polynomials", "explicit sum", 1e-7),
    (8, "printed a_{m,n}", "polynomials", "printed a_{m,n}", 1e-7),
    (8, "printed generating function, functional equation", "polynomials", "printed 2phi2", 1e-9),
    (12, "scaling q**(n-n**2) P(q**-(1+nu) x)", "alsalam", "printed scaling", 1e-8),
]


@lru_cache(maxsize=None)
def report(suite, q, nu):
    return run_suite(suite, QContext(q=q, nu=nu))


def criterion(k, q, nu):
    """``(ok, detail)`` for criterion ``k`` at ``(q, nu)``."""
    reps = [report(s, q, nu) for s in CRITERIA[k][1]]
    n_fail = sum(r.summary["fail"] for r in reps)
    n_cases = sum(len(r.cases) for r in reps)
    worst = max((r.worst() for r in reps), key=lambda c: c.residual / c.tolerance if c.tolerance else c.residual)
    detail = f"{n_cases - n_fail}/{n_cases} cases, worst {worst.residual:.2e} (tol {worst.tolerance:.0e})"
    return n_fail == 0 and n_cases > 0, detail


def printed_residual(suite, prefix, q, nu):
    diags = [d for d in report(suite, q, nu).diagnostics if d["what"].startswith(prefix)]
    assert diags, f"no diagnostic {prefix!r} in {suite}"
    return max(d["residual"] for d in diags)


def lines():
    out = []
    for k, (title, _) in CRITERIA.items():
        for q, nu in PARAMS:
            ok, detail = criterion(k, q, nu)
            out.append(f"{'PASS' if ok else 'FAIL'} criterion {k:2d} ({title}) q={q} nu={nu}: {detail}")
    for k, label, suite, prefix, tol in PRINTED:
        for q, nu in PARAMS:
            r = printed_residual(suite, prefix, q, nu)
            verdict = "PASS" if r < tol else "FAIL"
            out.append(f"{verdict} criterion {k:2d} literal [{label}] q={q} nu={nu}: residual {r:.2e} (tol {tol:.0e})")
    return out


@pytest.mark.parametrize("q,nu", PARAMS, ids=[f"q{q}_nu{nu}" for q, nu in PARAMS])
@pytest.mark.parametrize("k", list(CRITERIA))
def test_criterion(k, q, nu):
    ok, detail = criterion(k, q, nu)
    assert ok, detail


@pytest.mark.xfail(strict=True, reason="literal printed form; corrected form is the criterion above")
@pytest.mark.parametrize("q,nu", PARAMS, ids=[f"q{q}_nu{nu}" for q, nu in PARAMS])
@pytest.mark.parametrize("k,label,suite,prefix,tol", PRINTED, ids=[p[1] for p in PRINTED])
def test_printed_literal(k, label, suite, prefix, tol, q, nu):
    assert printed_residual(suite, prefix, q, nu) < tol


def test_stieltjes_closed_form_discrepancy_is_reported():
    # criterion 11 accepts a documented discrepancy of the printed closed form
    for q, nu in PARAMS:
        diags = report("stieltjes", q, nu).diagnostics
        assert any(d["what"] == "printed closed form" for d in diags)


def test_summary_table(capsys):
    t0 = time.perf_counter()
    table = lines()
    with capsys.disabled():
        print()
        print("\n".join(table))
    assert time.perf_counter() - t0 < 60


if __name__ == "__main__":
    t0 = time.perf_counter()
    print("\n".join(lines()))
    print(f"elapsed {time.perf_counter() - t0:.1f} s")
    sys.exit(0)
