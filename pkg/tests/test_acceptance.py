"""Acceptance criteria 1 to 10 at their pinned tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary,
and then asserts the same verdict.
"""
import subprocess
import sys
import time

import pytest

from conftest import ACCEPTANCE_LINES
from gbias.verifier import (
    EQUAL_SUITES,
    FIXED_POINT_SUITES,
    STEIN_SUITES,
    THEOREM_A_SUITES,
    TYPO_NOTE,
    VN_SUITES,
    WGN_SUITES,
    verify_fixed_point,
    verify_kernel_oracles,
    verify_operator_lemmas,
    verify_pn_relation,
    verify_stein_moments,
    verify_theorem_distinct,
    verify_theorem_equal,
    verify_theorem_general,
    verify_vn_formulas,
    verify_wgn_formulas,
)

SEED = 42
DISTINCT_SUITES = [a for a in THEOREM_A_SUITES if len(set(a)) == len(a) > 1]

pytestmark = pytest.mark.slow


def record(number, title, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    assert ok, ACCEPTANCE_LINES[number]


def worst(reports):
    return max(rep.max_rel_err for rep in reports)


def describe_failures(reports):
    bad = [rep.summary() for rep in reports if not rep.verdict]
    return "; ".join(bad) if bad else "all points pass"


def test_criterion_01_theorem_general():
    start = time.perf_counter()
    reports = [verify_theorem_general(a) for a in THEOREM_A_SUITES]
    elapsed = time.perf_counter() - start
    n1 = [rep for rep, a in zip(reports, THEOREM_A_SUITES) if len(a) == 1]
    ok = (all(rep.verdict for rep in reports) and all(rep.tolerance == 1e-12 for rep in n1)
          and all(rep.tolerance <= 1e-6 for rep in reports) and elapsed < 60.0)
    record(1, "general case", ok,
           f"max rel err {worst(reports):.2e}, n=1 max {worst(n1):.2e}, {elapsed:.1f} s; "
           f"{describe_failures(reports)}")


def test_criterion_02_theorem_distinct():
    reports = [verify_theorem_distinct(a, tol=1e-6) for a in DISTINCT_SUITES]
    ok = all(rep.verdict and TYPO_NOTE in rep.notes for rep in reports)
    record(2, "distinct case, three-way agreement", ok,
           f"{len(DISTINCT_SUITES)} suites, max rel err {worst(reports):.2e}; "
           f"{describe_failures(reports)}")


def test_criterion_03_theorem_equal():
    reports = [verify_theorem_equal(a, n, tol=1e-6) for a, n in EQUAL_SUITES]
    pn_points = sum(1 for rep in reports for p in rep.points
                    if p["compare"].startswith("pn_rhs"))
    ok = all(rep.verdict for rep in reports) and pn_points > 0
    record(3, "equal case and product normal form", ok,
           f"{len(reports)} suites, {pn_points} product normal points, "
           f"max rel err {worst(reports):.2e}; {describe_failures(reports)}")


def test_criterion_04_kernel_oracles():
    rep = verify_kernel_oracles(THEOREM_A_SUITES, tol=1e-8, norm_tol=1e-7, invariance_tol=1e-10)
    record(4, "kernel oracles, normalisation, abscissa invariance", rep.verdict,
           f"{len(rep.points)} points, max rel err {rep.max_rel_err:.2e}; "
           f"{describe_failures([rep])}")


def test_criterion_05_operator_lemmas():
    rep = verify_operator_lemmas(seed=SEED, tol=1e-8, n_functions=20)
    ns = {p["n"] for p in rep.points if isinstance(p, dict) and "n" in p}
    ok = rep.verdict and max(ns) <= 4
    record(5, "operator lemmas", ok,
           f"20 random functions, n in {sorted(ns)}, worst err {rep.max_rel_err:.2e}")


def test_criterion_06_stein():
    reports = [verify_stein_moments(r, max_m=6, n_samples=10**6, seed=SEED, tol=1e-10)
               for r in STEIN_SUITES]
    exact = all(v == 0.0 for rep in reports for p, v in zip(rep.points, rep.lhs)
                if p["check"] == "exact")
    ok = exact and all(rep.verdict for rep in reports)
    record(6, "Stein moment identities", ok,
           f"exact residuals zero: {exact}, float max rel err {worst(reports):.2e}, "
           f"Monte Carlo N=1e6; {describe_failures(reports)}")


def test_criterion_07_fixed_point():
    reports = [verify_fixed_point(r, n_samples=10**5, seed=SEED, alpha=0.01)
               for r in FIXED_POINT_SUITES]
    controls = [rep.lhs[-1] > rep.rhs[-1] for rep in reports]
    ok = all(rep.verdict for rep in reports) and all(controls)
    stats = ", ".join(f"{rep.lhs[0]:.4f}<{rep.rhs[0]:.4f}" for rep in reports)
    record(7, "fixed point, point mass control rejects", ok,
           f"KS {stats}; {describe_failures(reports)}")


def test_criterion_08_vn_and_wgn():
    vn = [verify_vn_formulas(r, tol=1e-8, n_samples=10**5, seed=SEED) for r in VN_SUITES]
    wgn = [verify_wgn_formulas(d, r, tol=1e-9, n_samples=10**5, seed=SEED)
           for d, r in WGN_SUITES]
    paths = [e for rep in wgn for p, e in zip(rep.points, rep.abs_err)
             if p.get("compare") == "cdf_incomplete_gamma~cdf_vn"]
    ok = all(rep.verdict for rep in vn + wgn) and paths and max(paths) <= 1e-9
    record(8, "V_n and gamma bias formulas", ok,
           f"V_n max rel err {worst(vn):.2e}, CDF path gap {max(paths):.2e}; "
           f"{describe_failures(vn + wgn)}")


def test_criterion_09_product_normal():
    reports = [verify_pn_relation(n, n_samples=10**5, seed=SEED) for n in (1, 2, 3)]
    stats = ", ".join(f"n={n}: {rep.lhs[0]:.4f}<{rep.rhs[0]:.4f}"
                      for n, rep in zip((1, 2, 3), reports))
    record(9, "product normal relation", all(rep.verdict for rep in reports), stats)


def test_criterion_10_reproducible(tmp_path):
    outs, times = [], []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        start = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "gbias.cli", "verify", "--suite", "all",
                               "--seed", "42", "--out", str(path)],
                              capture_output=True, text=True)
        times.append(time.perf_counter() - start)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and max(times) < 600.0
    record(10, "reproducible full suite", ok,
           f"byte-identical: {outs[0] == outs[1]}, {len(outs[0])} bytes, "
           f"runs {times[0]:.0f} s and {times[1]:.0f} s")
