"""Acceptance gate: one test per criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
The final criterion repeats the report-producing steps of the others
and insists on byte-identical canonical output.
"""

import json
import math
import time

import numpy as np
import pytest

import entorder as eo
from entorder.cli import run
from entorder.convertibility import Verdict
from entorder.fileio import emit_report
from entorder.oscillation import TrendClass

DELTA = 1.0
K_RANGE = range(5)


def _report(capsys, argv):
    assert run(argv) == 0
    return capsys.readouterr().out


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def psi_files(workdir):
    """Ladder files at the full horizon, generated through the CLI."""
    t0 = time.perf_counter()
    paths = {}
    for k in K_RANGE:
        p = workdir / f"psi{k}.spec"
        assert run(["gen", "psi", "--k", str(k), "--n", "10000",
                    "--delta", "1.0", "-o", str(p)]) == 0
        paths[k] = p
    return paths, time.perf_counter() - t0


def produce_criterion_1(psi_files, capsys):
    paths, gen_seconds = psi_files
    t0 = time.perf_counter()
    reports = {}
    for k in K_RANGE:
        out = _report(capsys, ["validate", str(paths[k])])
        reports[k] = out
        rep = json.loads(out)
        assert rep["conditions"]["all_pass"] is True, f"k={k}: {rep['conditions']}"
    elapsed = gen_seconds + (time.perf_counter() - t0)
    return reports, elapsed


def test_criterion_1_vidal_validity(psi_files, capsys):
    reports, elapsed = produce_criterion_1(psi_files, capsys)
    assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"
    print(f"PASS criterion 1: ladder k=0..4 passes all four conditions over "
          f"n<=1e4 ({elapsed:.1f}s)")


def produce_criterion_2(psi_files, capsys):
    paths, _ = psi_files
    reports = {}
    for k in K_RANGE:
        for l in range(k):
            out = _report(capsys, ["certify", str(paths[k]), str(paths[l])])
            rep = json.loads(out)
            assert rep["found"] is True, (k, l)
            cert = rep["certificate"]
            for side in ("up_witnesses", "down_witnesses"):
                wit = cert[side]
                assert len(wit) >= 5, (k, l, side)
                vals = [v for _, v in wit]
                sign = 1.0 if side == "up_witnesses" else -1.0
                gaps = [sign * (b - a) for a, b in zip(vals, vals[1:])]
                assert all(g >= 1.0 - 1e-9 for g in gaps), (k, l, side, gaps)
            reports[(k, l)] = out
    return reports


def test_criterion_2_mutual_incomparability(psi_files, capsys):
    t0 = time.perf_counter()
    produce_criterion_2(psi_files, capsys)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"
    print(f"PASS criterion 2: all 10 ladder pairs certified with >=5 up and "
          f">=5 down witnesses at >=1 nat steps ({elapsed:.1f}s)")


def produce_criterion_3(workdir, capsys):
    a, b = workdir / "t06.spec", workdir / "t04.spec"
    assert run(["gen", "tmss", "--q", "0.6", "--n", "600", "-o", str(a)]) == 0
    assert run(["gen", "tmss", "--q", "0.4", "--n", "600", "-o", str(b)]) == 0
    out = _report(capsys, ["compare", str(a), str(b), "--mode", "slocc",
                           "--window", "0:500"])
    rep = json.loads(out)
    assert rep["verdict"] == "OneWayAtoB"
    assert rep["trend"]["reverse"] == "DivergesDown"
    return {"forward": out}


def test_criterion_3_squeezed_total_order(workdir, capsys):
    produce_criterion_3(workdir, capsys)
    print("PASS criterion 3: tmss(0.6) -> tmss(0.4) one-way over n<=500, "
          "reverse diverges down")


def _random_pairs(count, seed=20250810):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        ra, rb = rng.integers(1, 9), rng.integers(1, 9)
        wa = np.sort(rng.random(ra) + 1e-3)[::-1]
        wb = np.sort(rng.random(rb) + 1e-3)[::-1]
        yield wa / wa.sum(), wb / wb.sum()


def _brute_probability(wa, wb):
    n = max(len(wa), len(wb)) + 1
    pad = lambda w: np.pad(
        np.concatenate((np.cumsum(w[::-1])[::-1], [0.0])), (0, n - len(w) - 1)
    )
    ta, tb = pad(np.asarray(wa)), pad(np.asarray(wb))
    sup = tb > 0
    if np.any(ta[sup] == 0):
        return 0.0
    return min(1.0, float(np.min(ta[sup] / tb[sup])))


def produce_criterion_4():
    records = []
    for wa, wb in _random_pairs(1000):
        a, b = eo.build_spectrum(wa), eo.build_spectrum(wb)
        p = eo.max_probability(a, b)
        oracle = _brute_probability(wa, wb)
        assert abs(p - oracle) <= 1e-12
        assert (p == 1.0) == eo.locc_convertible(a, b)
        records.append(p)
    return emit_report({"probabilities": records})


def test_criterion_4_oracle_equivalence():
    t0 = time.perf_counter()
    produce_criterion_4()
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    print(f"PASS criterion 4: 1000 seeded pairs match the brute-force tail "
          f"oracle to 1e-12 with exact majorization agreement ({elapsed:.1f}s)")


def produce_criterion_5():
    # error measured against the derivative's local scale: p' and p''
    # cross zero on this grid, where a pointwise relative error is
    # undefined for any finite-difference scheme
    out = {}
    for r in (0.5, 1.0, 2.0):
        x = np.linspace(2.0, 1e4, 10000)
        p, p1, p2 = eo.eval_p(r, x)
        h1 = 1e-5 * np.maximum(1.0, x)
        fd1 = (eo.eval_p(r, x + h1)[0] - eo.eval_p(r, x - h1)[0]) / (2 * h1)
        err1 = np.max(np.abs(fd1 - p1) / np.maximum(np.abs(p1), p / x))
        h2 = 3e-4 * np.maximum(1.0, x)
        fd2 = (eo.eval_p(r, x + h2)[0] - 2 * p + eo.eval_p(r, x - h2)[0]) / h2**2
        err2 = np.max(np.abs(fd2 - p2) / np.maximum(np.abs(p2), p / x**2))
        assert err1 < 1e-6, (r, err1)
        assert err2 < 1e-6, (r, err2)
        out[str(r)] = [float(err1), float(err2)]
    return emit_report({"fd_errors": out})


def test_criterion_5_derivatives():
    produce_criterion_5()
    print("PASS criterion 5: profile derivatives match central differences "
          "below 1e-6 on 1e4 points, r in {0.5, 1, 2}")


def produce_criterion_6():
    psi = eo.tmss(math.exp(-DELTA / 2), 10000)

    def gen(r):
        return eo.xi_state(r, DELTA, 10000)

    est = eo.estimate_r_bounds(psi, gen, 1.0, 2.0, 21)
    grid = 0.05
    interior = [v for r, v in est.per_r if 1.0 < r < 2.0]
    assert all(v is Verdict.Incomparable for v in interior), est.per_r
    assert 1.0 <= est.r_minus < 1.0 + grid
    assert 2.0 - grid < est.r_plus <= 2.0
    return emit_report(est.to_dict())


def test_criterion_6_r_bounds():
    produce_criterion_6()
    print("PASS criterion 6: every interior r declared Incomparable; "
          "r_minus=1.0, r_plus=2.0 at grid 0.05")


def produce_criterion_7(psi_files):
    paths, _ = psi_files
    stats = {}
    for k in K_RANGE:
        st = eo.summary_stats(eo.read_spectrum(paths[k]))
        assert math.isfinite(st["mean_excitation"])
        assert st["excitation_tail_bound"] is not None
        assert st["excitation_tail_bound"] < 1e-9, (k, st)
        stats[str(k)] = st["mean_excitation"]
    t = eo.summary_stats(eo.tmss(0.5, 1000))
    assert abs(t["mean_excitation"] - 1.0 / 3.0) < 1e-9
    stats["tmss05"] = t["mean_excitation"]
    return emit_report({"mean_excitation": stats})


def test_criterion_7_bounded_energy(psi_files):
    produce_criterion_7(psi_files)
    print("PASS criterion 7: ladder members have finite excitation with "
          "certified tails < 1e-9; tmss(0.5) matches 1/3 to 1e-9")


def test_criterion_8_determinism(psi_files, workdir, capsys, tmp_path_factory):
    first = {
        "c1": produce_criterion_1(psi_files, capsys)[0],
        "c2": produce_criterion_2(psi_files, capsys),
        "c3": produce_criterion_3(workdir, capsys),
        "c4": produce_criterion_4(),
        "c5": produce_criterion_5(),
        "c6": produce_criterion_6(),
        "c7": produce_criterion_7(psi_files),
    }
    # regenerate the ladder files from scratch in a fresh directory
    other = tmp_path_factory.mktemp("repeat")
    repeat_paths = {}
    for k in K_RANGE:
        p = other / f"psi{k}.spec"
        assert run(["gen", "psi", "--k", str(k), "--n", "10000",
                    "--delta", "1.0", "-o", str(p)]) == 0
        assert p.read_bytes() == (psi_files[0][k]).read_bytes()
        repeat_paths[k] = p
    repeat_files = (repeat_paths, 0.0)
    second = {
        "c1": produce_criterion_1(repeat_files, capsys)[0],
        "c2": produce_criterion_2(repeat_files, capsys),
        "c3": produce_criterion_3(other, capsys),
        "c4": produce_criterion_4(),
        "c5": produce_criterion_5(),
        "c6": produce_criterion_6(),
        "c7": produce_criterion_7(repeat_files),
    }
    assert first == second
    print("PASS criterion 8: repeating criteria 1-7 reproduces byte-identical "
          "canonical reports")
