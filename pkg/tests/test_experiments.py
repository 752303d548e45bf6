import json
import math

import numpy as np
import pytest

from cyclespan import cli
from cyclespan.experiments import (
    SWEEP_HEADER,
    TRIAL_HEADER,
    AcceptanceError,
    SweepSpec,
    expected_dim,
    fit_sweep_csv,
    fit_threshold,
    n_workers,
    run_coupling,
    run_coupling_trial,
    run_sweep,
    run_trial,
    summarise_coupling,
    to_csv,
    trial_seed,
    verify_kn,
    wilson,
)
from cyclespan.graph import complete_graph, cycle_graph, gen_gnp, write_graph
from cyclespan.subspace import H_LIBRARY, cycle_pattern


class TestPlumbing:
    def test_wilson(self):
        lo, hi = wilson(0, 10)
        assert lo == 0 and 0.25 < hi < 0.35
        lo, hi = wilson(50, 100)
        assert lo == pytest.approx(1 - hi)
        assert wilson(0, 0) == (0.0, 1.0)

    def test_wilson_covers(self):
        rng = np.random.default_rng(3)
        hits = 0
        for _ in range(400):
            k = rng.binomial(60, 0.3)
            lo, hi = wilson(int(k), 60)
            hits += lo <= 0.3 <= hi
        assert hits / 400 > 0.9

    def test_trial_seed(self):
        assert trial_seed(1, 2, 3) == trial_seed(1, 2, 3)
        seeds = {trial_seed(0, i, j) for i in range(10) for j in range(10)}
        assert len(seeds) == 100
        assert trial_seed(0, 1, 2) != trial_seed(0, 2, 1)

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv("CYCLESPAN_WORKERS", "3")
        assert n_workers() == 3
        monkeypatch.setenv("CYCLESPAN_WORKERS", "0")
        with pytest.raises(ValueError):
            n_workers()

    def test_csv_header_fixed(self):
        text = to_csv([{"a": True, "b": 0.1 + 0.2, "c": 3}], ["a", "b", "c"])
        assert text == "a,b,c\n1,0.3,3\n"


class TestVerify:
    def test_cycles(self):
        rows = verify_kn(8)
        assert rows and all(r.passed for r in rows)
        assert {(r.pattern, r.n) for r in rows} >= {("C3", 3), ("C7", 7), ("C5", 8)}

    def test_expected(self):
        assert expected_dim(6, cycle_pattern(3)) == (10, "C")
        assert expected_dim(7, cycle_pattern(4)) == (14, "C&D")
        assert expected_dim(6, H_LIBRARY["K2"]) == (15, "E")

    def test_library_ranges(self):
        rows = verify_kn(7, kappas=(), library={"K4": H_LIBRARY["K4"]})
        assert [r.n for r in rows] == [6, 7]


class TestTrials:
    def test_p_zero(self):
        r = run_trial(20, 3, 0.0, 5)
        assert r.acyclic and r.in_T and not r.in_Q and r.F_weight == 0 and not r.error

    def test_complete(self):
        r = run_trial(10, 3, 1.0, 5)
        assert r.in_Q and r.in_T and r.F_weight == 0

    def test_error_recorded(self):
        r = run_trial(10, 3, 2.0, 5)
        assert r.error.startswith("ValueError")

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(10, 3, trials=0)
        with pytest.raises(ValueError):
            SweepSpec(10, 3, grid=(-1.0,))
        with pytest.raises(ValueError):
            SweepSpec(10, 3, mode="fast")


class TestSweep:
    SPEC = SweepSpec(30, 3, (0.0, 0.5, 1.0, 1.5, 3.0), 4, 7)

    def test_worker_count_invariant(self):
        a, ra = run_sweep(self.SPEC, workers=1)
        b, rb = run_sweep(self.SPEC, workers=2)
        assert to_csv(a, SWEEP_HEADER) == to_csv(b, SWEEP_HEADER)
        assert to_csv(ra, TRIAL_HEADER) == to_csv(rb, TRIAL_HEADER)

    def test_counts(self):
        summ, recs = run_sweep(self.SPEC, workers=1)
        assert len(recs) == 20
        assert summ[0].pr_q == 0 and summ[0].acyclic == 4
        assert summ[-1].pr_q == 1
        for s in summ:
            assert s.pr_q_lo <= s.pr_q <= s.pr_q_hi
            assert s.q_not_t <= s.q_count

    def test_heuristic_mode(self):
        spec = SweepSpec(25, 3, (0.6, 1.0), 3, 1, "heuristic")
        summ, recs = run_sweep(spec, workers=1)
        assert not any(r.error for r in recs)


class TestFit:
    def test_step(self):
        x0, s = fit_threshold([0.6, 0.8, 1.0, 1.2, 1.4], [0, 0, 0, 50, 50], [50] * 5)
        assert x0 == pytest.approx(1.1)
        assert s > 100

    def test_smooth(self):
        xs = np.linspace(0.5, 1.5, 11)
        pr = 1 / (1 + np.exp(-10 * (xs - 1.05)))
        k = np.round(pr * 10_000).astype(int)
        x0, s = fit_threshold(xs, k, [10_000] * 11)
        assert x0 == pytest.approx(1.05, abs=0.01)
        assert s == pytest.approx(10, rel=0.1)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            fit_threshold([1, 2, 3, 4], [0, 0, 0, 0], [5] * 4)
        with pytest.raises(ValueError):
            fit_threshold([1, 2], [0, 1], [1, 1])

    def test_csv(self):
        rows = [{"multiple": m, "q_count": k, "trials": 20, "errors": 0} for m, k in
                [(0.5, 0), (0.8, 3), (1.0, 10), (1.2, 17), (1.5, 20)]]
        x0, s = fit_sweep_csv(to_csv(rows, ["multiple", "q_count", "trials", "errors"]))
        assert x0 == pytest.approx(1.0, abs=0.02) and s > 0


class TestCoupling:
    def test_theta_one_half_cut(self):
        (r,) = run_coupling_trial(30, 3, 0.3, (1.0,), 11, rule="half-cut")
        assert r.F_weight > 0 and r.F0_weight == r.F_weight and r.ratio == 1.0

    def test_theta_one_minimizer(self):
        recs = run_coupling(25, 3, 0.25, (1.0,), 4, 2, workers=1)
        assert any(r.F_weight > 0 for r in recs)
        for r in recs:
            assert r.F0_weight == r.F_weight and r.F0_in_kperp_of_G0

    def test_empty_F(self):
        recs = run_coupling(12, 3, 1.0, (0.5,), 2, 1, workers=1)
        assert all(r.F_weight == 0 and r.F0_weight == 0 and math.isnan(r.ratio) for r in recs)
        s = summarise_coupling(recs)
        assert s.qualifying == 0 and math.isnan(s.band_fraction)

    def test_degrees_shrink(self):
        recs = run_coupling(40, 3, 0.3, (0.5,), 3, 4, rule="half-cut", workers=1)
        for r in recs:
            assert r.F0_weight <= r.F_weight

    def test_half_cut_restriction_stays_in_kperp(self):
        # a cut of G restricted to G0 is a cut of G0, hence always in the kappa-perp
        recs = run_coupling(30, 3, 0.5, (0.5,), 2, 0, rule="half-cut", workers=1)
        assert all(r.F0_in_kperp_of_G0 for r in recs)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            run_coupling(10, 3, 1.5, (0.5,), 1)
        with pytest.raises(ValueError):
            run_coupling_trial(10, 3, 0.5, (0.0,), 1)

    def test_acceptance_error_type(self):
        assert issubclass(AcceptanceError, AssertionError)


class TestCLI:
    def test_verify(self, capsys):
        assert cli.main(["verify-kn", "--nmax", "7"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "pattern,n,computed,expected,space,passed"

    def test_verify_json(self, capsys):
        assert cli.main(["verify-kn", "--nmax", "6", "--kappas", "3", "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert [r["n"] for r in rows] == [3, 4, 5, 6] and all(r["passed"] for r in rows)

    def test_usage_errors(self, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["sweep"])
        assert e.value.code == 2
        with pytest.raises(SystemExit) as e:
            cli.main(["nope"])
        assert e.value.code == 2
        with pytest.raises(SystemExit) as e:
            cli.main(["sweep", "--n", "10", "--grid", "a,b"])
        assert e.value.code == 2
        assert cli.main(["sweep", "--n", "10", "--trials", "0"]) == 2
        assert cli.main(["spectrum", "--graph-file", "/nonexistent/g.txt"]) == 2

    def test_sweep_and_fit(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        rec = tmp_path / "r.csv"
        argv = ["sweep", "--n", "30", "--grid", "0.3,0.6,1.0,1.5,2.5", "--trials", "6", "--seed", "2",
                "--out", str(out), "--records", str(rec)]
        assert cli.main(argv) == 0
        assert out.read_text().splitlines()[0] == ",".join(SWEEP_HEADER)
        assert len(rec.read_text().splitlines()) == 31
        assert cli.main(["fit", str(out)]) == 0
        head, vals = capsys.readouterr().out.strip().splitlines()
        assert head == "p_half_over_pstar,slope"
        assert 0.3 <= float(vals.split(",")[0]) <= 2.5

    def test_paths_and_spectrum(self, tmp_path, capsys):
        g = tmp_path / "k5.txt"
        write_graph(complete_graph(5), g)
        assert cli.main(["paths", "--graph-file", str(g), "--x", "0", "--y", "1", "--l", "2"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == ["x,y,l,tau,tau_truncated,sigma,sigma_certified", "0,1,2,3,0,3,1"]
        assert cli.main(["spectrum", "--graph-file", str(g), "--format", "json"]) == 0
        (row,) = json.loads(capsys.readouterr().out)
        assert row["lambda1"] == pytest.approx(4) and row["lambda_n"] == pytest.approx(-1)
        assert cli.main(["paths", "--graph-file", str(g), "--x", "0", "--y", "9", "--l", "2"]) == 2

    def test_couple(self, capsys):
        argv = ["couple", "--n", "30", "--p", "0.3", "--theta", "0.5,1.0", "--trials", "2", "--rule", "half-cut"]
        assert cli.main(argv) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 5

    def test_audit_small(self, capsys):
        argv = ["audit", "--n-list", "20", "--grid", "0.8,1.2", "--trials", "5", "--format", "json"]
        assert cli.main(argv) in (0, 1)
        rows = json.loads(capsys.readouterr().out)
        assert [r["n"] for r in rows] == [20, 20]

    def test_module_entry(self):
        import subprocess
        import sys

        r = subprocess.run([sys.executable, "-m", "cyclespan", "verify-kn", "--nmax", "5", "--kappas", "3,5"],
                           capture_output=True, text=True)
        assert r.returncode == 0 and "PASS" in r.stderr
