import math

import pytest

from qjacobi.verify import SUITES, Case, VerifyReport, eigen_window, run_suite


def test_case_status():
    assert Case({}, 1.0, 1.0, 0.0, 0.0).status == "pass"
    assert Case({}, 1.0, 2.0, 0.5, 0.1).status == "fail"
    assert Case({}, 1.0, 2.0, math.nan, 1.0).status == "fail"
    assert Case({}, 0, 0, 9.0, 1.0, status="pass").status == "pass"


def test_report_summary_and_worst():
    rep = VerifyReport("x", 0.5, 0.5)
    assert not rep.ok and rep.worst() is None
    rep.cases += [Case({"i": 0}, 0, 0, 1e-9, 1e-8), Case({"i": 1}, 0, 0, 1e-7, 1e-6), Case({"i": 2}, 0, 0, 0.0, 0.0)]
    assert rep.ok and rep.exit_code_hint == 0
    assert rep.worst().inputs == {"i": 0}
    rep.cases.append(Case({"i": 3}, 0, 0, 1e-3, 0.0))
    assert rep.summary == {"pass": 3, "fail": 1} and rep.exit_code_hint == 1
    assert rep.worst().inputs == {"i": 3}
    d = rep.to_dict()
    assert d["summary"]["fail"] == 1 and len(d["cases"]) == 4


def test_suite_names():
    assert len(SUITES) == 13
    with pytest.raises(KeyError):
        run_suite("nope", None)


def test_cheap_suites_pass(ctx):
    for name in ("wronskian", "orthogonality", "limits", "decay", "alsalam"):
        assert run_suite(name, ctx).ok, name


def test_eigen_window(ctx):
    # 20 exponents whose largest keeps the 1/x**2 amplification within 1e6
    w = eigen_window(ctx)
    assert len(w) == 20
    assert ctx.q ** (-2 * w[-1]) <= 1e6 < ctx.q ** (-2 * (w[-1] + 1))
