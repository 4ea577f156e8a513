"""Acceptance gate: one check (and one printed PASS/FAIL line) per criterion."""

import json
import math
import time
from pathlib import Path

import mpmath
import numpy as np

from sharpreg.bandwidth import bandwidth, interval_at
from sharpreg.cli import main as cli_main
from sharpreg.design import Dataset, edge_quadratic_density, sample_design, uniform_density
from sharpreg.experiments import ExperimentConfig, calibrate_Dc, mc_coverage, mc_risk, rate_study
from sharpreg.local_poly import lpa_fit, reference_gram
from sharpreg.lower_bound import build_family, verify_membership
from sharpreg.optimal_recovery import make_family
from sharpreg.quadrature import integrate_pieces

from conftest import ROOT_SNR_SIGMA, SUPPORTED_S, record
from oracles import BRUTE_STEP, brute_bandwidth

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def load(name, **changes):
    cfg = ExperimentConfig.from_json(CONFIGS / name)
    return cfg.replace(**changes) if changes else cfg


def test_criterion_01_kernel_identities():
    t0 = time.perf_counter()
    worst_mass = worst_norm = 0.0
    for s in SUPPORTED_S:
        f = make_family(s)
        mass = integrate_pieces(f.kernel_at, f.knots)
        norm = math.sqrt(integrate_pieces(lambda t: f.phi_at(t) ** 2, f.knots))
        worst_mass = max(worst_mass, abs(mass - 1))
        worst_norm = max(worst_norm, abs(norm - 1))
    elapsed = time.perf_counter() - t0
    ok = worst_mass < 1e-8 and worst_norm < 1e-6 and elapsed < 1.0
    record("1", ok, f"max|int K - 1| = {worst_mass:.1e}, max| |phi|_2 - 1| = {worst_norm:.1e}, {elapsed:.2f} s")
    assert ok


def test_criterion_02_constants():
    f1 = make_family(1.0, 1.0, 1.0)
    errs = {"P1": abs(f1.P - 1.0), "c1": abs(f1.c - (2 / 3) ** (1 / 3))}
    dec = 0.0
    for s in (0.25, 0.5, 0.75, 1.0):
        f = make_family(s)
        bias = integrate_pieces(lambda t: f.kernel_at(t) * abs(t) ** s, f.knots)
        normK = math.sqrt(integrate_pieces(lambda t: f.kernel_at(t) ** 2, f.knots))
        dec = max(dec, abs(bias - (f.phi0 - normK)))
    with mpmath.workdps(60):
        r33 = mpmath.sqrt(33)
        q = (3 + r33 - mpmath.sqrt(26 + 6 * r33)) ** 2 / 16
        theta = 2 * (23 * q**2 - 14 * q + 23) * mpmath.sqrt(1 + q) / (30 * (1 - q ** mpmath.mpf(2.5)))
        P2 = (mpmath.mpf(2) / 5) ** (mpmath.mpf(2) / 5) * theta ** (-mpmath.mpf(2) / 5)
    f2 = make_family(2.0)
    s2 = max(abs(f2.q - float(q)), abs(f2.theta - float(theta)), abs(f2.P - float(P2)))
    ok = errs["P1"] < 1e-12 and errs["c1"] < 1e-12 and dec < 1e-8 and s2 < 1e-10
    record("2", ok, f"|P-1| = {errs['P1']:.1e}, |c-(2/3)^(1/3)| = {errs['c1']:.1e}, "
                    f"decomposition {dec:.1e}, s=2 radicals {s2:.1e}")
    assert ok


def test_criterion_03_bandwidth_oracle():
    r = np.random.default_rng(2024)
    fast_time = 0.0
    worst = 0.0
    for rep in range(100):
        n = int(r.integers(50, 2001))
        mu = uniform_density() if rep % 2 == 0 else edge_quadratic_density()
        xs = sample_design(mu, n, rep)
        d = Dataset.from_arrays(xs, np.zeros(n))
        s = float(r.choice(SUPPORTED_S))
        pts = r.random(20)
        t0 = time.perf_counter()
        fast = [bandwidth(d, float(x), s) for x in pts]
        fast_time += time.perf_counter() - t0
        for x, h in zip(pts, fast):
            worst = max(worst, abs(h - brute_bandwidth(xs, float(x), s)))
    ok = worst <= BRUTE_STEP + 1e-12 and fast_time < 10.0
    record("3", ok, f"max |H - H_brute| = {worst:.2e} over 2000 points, distance scan {fast_time:.2f} s")
    assert ok


def test_criterion_04_local_polynomial_exactness():
    r = np.random.default_rng(4)
    x = np.sort(r.random(50_000))
    t0 = time.perf_counter()
    worst, regularized = 0.0, 0
    for trial in range(100):
        k = trial % 2
        coef = r.normal(size=k + 1)
        d = Dataset.from_arrays(x, np.polynomial.polynomial.polyval(x, coef))
        a = float(r.random())
        I = interval_at(a, float(r.uniform(0.5, 1.0)))
        fit = lpa_fit(d, I, k)
        regularized += fit.regularized
        p = np.polynomial.Polynomial(coef)
        want = [p(a), p.deriv()(a)][: k + 1]
        worst = max(worst, float(np.max(np.abs(fit.theta_hat - want))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 5.0 and regularized == 0
    record("4", ok, f"max coefficient error {worst:.1e} on 100 intervals (k = 0, 1), "
                    f"{regularized} regularised, {elapsed:.2f} s")
    assert ok


def test_criterion_05_reference_gram():
    G1 = reference_gram(1).G
    lams = [reference_gram(k).lam for k in range(6)]
    ok = np.array_equal(G1, np.eye(2)) and min(lams) > 0
    record("5", ok, f"G(k=1) == I: {np.array_equal(G1, np.eye(2))}, min lambda(k=0..5) = {min(lams):.3e}")
    assert ok


def test_criterion_06_zero_noise_consistency():
    cfg = load("zero_noise_triangle.json")
    t0 = time.perf_counter()
    rep = mc_risk(cfg)
    elapsed = time.perf_counter() - t0
    med = [float(np.median(rep.column("risk_abs", n))) for n in cfg.n]
    ok = all(a > b for a, b in zip(med, med[1:])) and elapsed < 120 and cfg.replications == 20
    record("6", ok, "median sup risk " + " > ".join(f"{m:.4f}" for m in med)
           + f" at n = {cfg.n}, {elapsed:.1f} s")
    assert ok


_RATE = {}


def _rate_report():
    if "rep" not in _RATE:
        t0 = time.perf_counter()
        _RATE["rep"] = rate_study(load("rate_triangle_uniform.json"))
        _RATE["time"] = time.perf_counter() - t0
    return _RATE["rep"], _RATE["time"]


def test_criterion_07a_rate_slope():
    rep, elapsed = _rate_report()
    slope, se = rep.extra["slope"], rep.extra["slope_se"]
    ok = 0.18 <= slope <= 0.48 and elapsed < 900
    record("7a", ok, f"slope {slope:.3f} (se {se:.3f}, target 1/3), {elapsed:.1f} s")
    assert ok


def test_criterion_07b_normalised_risk_at_2_14():
    rep, _ = _rate_report()
    P = rep.meta["P"]
    med = float(np.median(rep.column("risk_norm", 2**14)))
    med_disc = float(np.median(rep.column("risk_norm_disc", 2**14)))
    ok = 0.5 * P <= med <= 1.8 * P
    record("7b", ok, f"median normalised sup risk {med / P:.3f} P (grid points only: {med_disc / P:.3f} P), "
                     "target [0.5 P, 1.8 P]")
    assert ok


def test_criterion_08_coverage():
    t0 = time.perf_counter()
    uni = load("coverage_triangle_uniform.json")
    cal = calibrate_Dc(uni)
    Dc = cal["Dc"]
    cov = mc_coverage(uni, Dc=Dc).summary_for(2000)
    edge = mc_coverage(load("coverage_triangle_edge.json"), Dc=Dc).summary_for(2000)
    elapsed = time.perf_counter() - t0
    ok = (cov["coverage"] >= 0.90 and edge["frac_mid_wider_than_edge"] >= 0.95
          and uni.replications == 300 and elapsed < 600)
    record("8", ok, f"Dc = {Dc:.4f}, coverage {cov['coverage']:.3f} over {cov['replicates']} reps; "
                    f"edge design mid wider than x=0.1 in {edge['frac_mid_wider_than_edge']:.3f}; {elapsed:.1f} s")
    assert ok


def test_criterion_09_lower_bound_family():
    t0 = time.perf_counter()
    fam = make_family(1.0, ROOT_SNR_SIGMA, 1.0)
    cube = build_family(fam, uniform_density(), 10_000)
    rep = verify_membership(cube, trials=50, seed=9)
    elapsed = time.perf_counter() - t0
    ok = rep.all_passed and rep.worst_ratio <= 1 + 1e-6 and rep.min_gap > 0 and elapsed < 30
    record("9", ok, f"{cube.M} bumps, worst Holder ratio {rep.worst_ratio:.6f}, "
                    f"min support gap {rep.min_gap:.4f}, {elapsed:.1f} s")
    assert ok


def test_criterion_10_determinism(tmp_path, capsys):
    cfg_path = tmp_path / "risk.json"
    cfg_path.write_text(json.dumps({"n": [512, 1024], "replications": 8, "Dc": 0.3}))
    runs = {}
    for tag, workers in (("a", 1), ("b", 1), ("c", 3)):
        for cmd in ("risk", "figures"):
            out = tmp_path / tag / cmd
            argv = [cmd, "--config", str(cfg_path), "--workers", str(workers), "--out-dir", str(out)]
            if cmd == "figures":
                argv += ["--n", "500"]
            assert cli_main(argv) == 0
            runs[(tag, cmd)] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    capsys.readouterr()
    same = all(runs[("a", c)] == runs[(t, c)] for t in ("b", "c") for c in ("risk", "figures"))
    nfiles = sum(len(runs[("a", c)]) for c in ("risk", "figures"))
    record("10", same, f"{nfiles} CSV/script outputs byte-identical across reruns and 1 vs 3 workers")
    assert same
