"""Experiment drivers: exact K_n verification, threshold sweeps, audits, coupling runs.

Every trial is reproducible from ``(master_seed, point_index, trial_index)``.
Trials run on a process pool sized by ``CYCLESPAN_WORKERS`` (default: all
available cores) and are folded back in (point, trial) order, so outputs do not
depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .bounds import pstar
from .graph import EdgeSubset, LabeledGraph, complete_graph, cut_vector, gen_coupled, gen_gnp, slice_graph
from .paths import sigma
from .subspace import (
    H_LIBRARY,
    HClass,
    HPattern,
    check_F,
    classify_h,
    cycle_pattern,
    enumerate_cycles,
    find_F,
    h_dim,
    in_Q,
    in_T,
    n_components,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "CYCLESPAN_WORKERS"
DEFAULT_GRID = (0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.4, 1.7)


class AcceptanceError(AssertionError):
    """A hard experimental invariant failed."""


# ---------------------------------------------------------------------------
# Plumbing
# ---------------------------------------------------------------------------


def n_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        w = int(raw)
        if w < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1")
        return w
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def trial_seed(master_seed: int, point: int, trial: int) -> int:
    """64-bit seed derived from (master, point, trial); order independent."""
    ss = np.random.SeedSequence([master_seed, point, trial])
    return int(ss.generate_state(1, np.uint64)[0])


def parallel_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """``list(map(fn, items))`` on a process pool; results keep input order."""
    items = list(items)
    w = n_workers() if workers is None else workers
    if w <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (8 * w))
    with ProcessPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def wilson(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    ph = k / n
    den = 1 + z * z / n
    centre = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return (max(0.0, centre - half), min(1.0, centre + half))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


def to_csv(rows: Iterable, header: Sequence[str]) -> str:
    """Render dataclass rows or dicts under a fixed header."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        d = r if isinstance(r, dict) else asdict(r)
        w.writerow([_fmt(d[h]) for h in header])
    return buf.getvalue()


def to_json(obj) -> str:
    def conv(o):
        if hasattr(o, "__dataclass_fields__"):
            return asdict(o)
        raise TypeError(type(o))

    return json.dumps(obj, default=conv, indent=2, sort_keys=True)


def header_of(cls) -> list[str]:
    return [f.name for f in fields(cls)]


# ---------------------------------------------------------------------------
# Exact verification on complete graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyRow:
    pattern: str
    n: int
    computed: int
    expected: int
    space: str
    passed: bool


def expected_dim(n: int, H: HPattern) -> tuple[int, str]:
    """Dimension of the natural space of H in K_n, by H's class."""
    e = comb(n, 2)
    return {
        HClass.FULL_CYCLE: (e - n + 1, "C"),
        HClass.EVEN_CYCLE: (e - n, "C&D"),
        HClass.FULL_EDGE: (e, "E"),
        HClass.EVEN_EDGE: (e - 1, "D"),
    }[classify_h(H)]


def verify_kn(
    n_max: int,
    kappas: Sequence[int] = (3, 5, 7),
    library: dict[str, HPattern] | None = None,
    n_min: int | None = None,
) -> list[VerifyRow]:
    """Compare dim of the H-space of K_n with the class formula.

    Odd cycles are checked from n = kappa (inclusive) to ``n_max``; library
    patterns from max(v_H + 2, 5).  ``n_min`` raises both lower ends.
    """
    rows: list[VerifyRow] = []
    jobs: list[tuple[str, HPattern, int]] = []
    for k in kappas:
        H = cycle_pattern(k)
        for n in range(max(k, n_min or 0), n_max + 1):
            jobs.append((f"C{k}", H, n))
    for name, H in (library or {}).items():
        for n in range(max(H.n_vertices + 2, 5, n_min or 0), n_max + 1):
            jobs.append((name, H, n))
    for name, H, n in jobs:
        got = h_dim(complete_graph(n), H)
        want, space = expected_dim(n, H)
        rows.append(VerifyRow(name, n, got, want, space, got == want))
    return rows


# ---------------------------------------------------------------------------
# Threshold sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    n: int
    kappa: int
    grid: tuple[float, ...] = DEFAULT_GRID
    trials: int = 200
    master_seed: int = 0
    mode: str = "exact"  # or "heuristic"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(g < 0 for g in self.grid):
            raise ValueError("grid multiples must be nonnegative")
        if self.mode not in ("exact", "heuristic"):
            raise ValueError("mode is 'exact' or 'heuristic'")


@dataclass
class TrialRecord:
    seed: int
    point: int
    trial: int
    n: int
    kappa: int
    p: float
    in_Q: bool
    in_T: bool
    F_weight: int
    F_certified: bool
    alpha: float
    acyclic: bool
    half_degree_ok: bool
    xyF_ok: bool
    error: str = ""
    wall_time_ms: float = 0.0


def witness_checks(G: LabeledGraph, kappa: int, F: EdgeSubset) -> tuple[bool, bool]:
    """(half-degree bound, |F| >= sigma(x, y) + 1 for every xy in F).

    A greedy packing only bounds sigma from below, so an uncertified packing
    counts as a failed check.
    """
    if F.weight == 0:
        return True, True
    chk = check_F(G, kappa, F)
    half = chk["half_degree"] and chk["in_kperp"] and chk["not_cut"]
    xy = True
    for x, y in F.pairs():
        st = sigma(G, x, y, kappa - 1)
        if not st.sigma_certified or F.weight < st.sigma + 1:
            xy = False
            break
    return half, xy


def run_trial(n: int, kappa: int, p: float, seed: int, point: int = 0, trial: int = 0,
              mode: str = "exact", need_F: bool = True) -> TrialRecord:
    t0 = time.perf_counter()
    rec = TrialRecord(seed, point, trial, n, kappa, p, False, False, 0, True, 0.0, False, True, True)
    try:
        G = gen_gnp(n, p, seed)
        rec.acyclic = G.m - G.n + n_components(G) == 0
        rec.in_Q = in_Q(G, kappa)
        rec.in_T = in_T(G, kappa)
        if need_F and not rec.in_T:
            kw = {} if mode == "exact" else {"weight_budget": 20_000, "coset_budget": 0}
            res = find_F(G, kappa, seed=seed, **kw)
            rec.F_weight = res.F.weight
            rec.F_certified = res.certified
            if rec.in_Q:
                rec.half_degree_ok, rec.xyF_ok = witness_checks(G, kappa, res.F)
        rec.alpha = 2 * rec.F_weight / (n * n * p) if p > 0 else 0.0
    except Exception as exc:  # recorded, never fatal to the sweep
        rec.error = f"{type(exc).__name__}: {exc}"
        log.debug("trial failed\n%s", traceback.format_exc())
    rec.wall_time_ms = (time.perf_counter() - t0) * 1000
    return rec


def _trial_job(args) -> TrialRecord:
    return run_trial(*args)


@dataclass
class PointSummary:
    point: int
    multiple: float
    p: float
    trials: int
    errors: int
    acyclic: int
    q_count: int
    t_count: int
    q_not_t: int
    uncertified: int
    witness_failures: int
    pr_q: float
    pr_q_lo: float
    pr_q_hi: float
    pr_t: float
    pr_t_lo: float
    pr_t_hi: float
    pr_qnt: float
    pr_qnt_lo: float
    pr_qnt_hi: float


SWEEP_HEADER = header_of(PointSummary)
TRIAL_HEADER = [h for h in header_of(TrialRecord) if h != "wall_time_ms"]


def summarise(point: int, multiple: float, p: float, recs: Sequence[TrialRecord]) -> PointSummary:
    ok = [r for r in recs if not r.error]
    k = len(ok)
    q = sum(r.in_Q for r in ok)
    t = sum(r.in_T for r in ok)
    qnt = sum(r.in_Q and not r.in_T for r in ok)
    assert q - qnt == sum(r.in_Q and r.in_T for r in ok)
    unc = sum((not r.in_T) and not r.F_certified for r in ok)
    wf = sum(not (r.half_degree_ok and r.xyF_ok) for r in ok)
    return PointSummary(
        point, multiple, p, len(recs), len(recs) - k, sum(r.acyclic for r in ok),
        q, t, qnt, unc, wf,
        q / k if k else 0.0, *wilson(q, k),
        t / k if k else 0.0, *wilson(t, k),
        qnt / k if k else 0.0, *wilson(qnt, k),
    )


def sweep_trials(spec: SweepSpec, need_F: bool = True, workers: int | None = None) -> list[TrialRecord]:
    ps = pstar(spec.kappa, spec.n)
    jobs = []
    for i, mult in enumerate(spec.grid):
        p = min(1.0, mult * ps)
        for j in range(spec.trials):
            jobs.append((spec.n, spec.kappa, p, trial_seed(spec.master_seed, i, j), i, j, spec.mode, need_F))
    return parallel_map(_trial_job, jobs, workers)


def run_sweep(spec: SweepSpec, need_F: bool = True, workers: int | None = None
              ) -> tuple[list[PointSummary], list[TrialRecord]]:
    """Per-point Q / T / (Q and not T) rates with Wilson intervals."""
    recs = sweep_trials(spec, need_F, workers)
    ps = pstar(spec.kappa, spec.n)
    out = []
    for i, mult in enumerate(spec.grid):
        pts = [r for r in recs if r.point == i]
        out.append(summarise(i, mult, min(1.0, mult * ps), pts))
    return out, recs


# ---------------------------------------------------------------------------
# Threshold fit
# ---------------------------------------------------------------------------


def fit_threshold(multiples: Sequence[float], successes: Sequence[int], trials: Sequence[int],
                  max_slope: float = 200.0) -> tuple[float, float]:
    """Binomial maximum-likelihood logistic fit of Pr(Q) against p/p*.

    Model: Pr = 1 / (1 + exp(-s (x - x0))).  Returns ``(x0, s)``; x0 is the
    crossing point as a multiple of p*.  The slope is capped at ``max_slope``
    so perfectly separated data still give a finite answer (the midpoint of
    the gap).
    """
    x = np.asarray(multiples, float)
    k = np.asarray(successes, float)
    n = np.asarray(trials, float)
    if len(x) < 4:
        raise ValueError("need at least 4 grid points")
    if np.any(n <= 0) or np.any(k < 0) or np.any(k > n):
        raise ValueError("bad counts")
    if k.sum() == 0 or k.sum() == n.sum():
        raise ValueError("degenerate data: all zeros or all ones")

    def nll(theta):
        x0, s = theta
        z = s * (x - x0)
        # log(sigmoid(z)) and log(1 - sigmoid(z)) in stable form
        return float(np.sum(k * np.logaddexp(0, -z) + (n - k) * np.logaddexp(0, z)))

    # perfectly separated data: the likelihood only increases with the slope
    # and is flat in x0 across the gap, so take the gap midpoint
    lo, hi = x[k < n].max(), x[k > 0].min()
    if lo < hi:
        return float(0.5 * (lo + hi)), float(max_slope)

    frac = k / n
    cross = x[np.argmin(np.abs(frac - 0.5))]
    best = None
    for s0 in (1.0, 10.0, 50.0):
        r = minimize(nll, [cross, s0], method="L-BFGS-B",
                     bounds=[(x.min() - 1, x.max() + 1), (-max_slope, max_slope)])
        if best is None or r.fun < best.fun:
            best = r
    x0, s = best.x
    return float(x0), float(s)


def fit_sweep_csv(text: str) -> tuple[float, float]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return fit_threshold(
        [float(r["multiple"]) for r in rows],
        [int(r["q_count"]) for r in rows],
        [int(r["trials"]) - int(r["errors"]) for r in rows],
    )


# ---------------------------------------------------------------------------
# Audit of Q and not T
# ---------------------------------------------------------------------------


@dataclass
class AuditReport:
    kappa: int
    points: list = field(default_factory=list)  # (n, PointSummary)
    max_rate: float = 0.0
    max_rate_ci: tuple = (0.0, 1.0)
    max_at: tuple = ()
    rare_trials: int = 0
    witness_failures: int = 0
    uncertified: int = 0
    errors: int = 0

    def passed(self, limit: float = 0.05) -> bool:
        return self.max_rate <= limit and self.witness_failures == 0 and self.errors == 0


def audit_main_theorem(n_list: Sequence[int], kappa: int, grid: Sequence[float] = DEFAULT_GRID,
                       trials: int = 400, master_seed: int = 0, workers: int | None = None) -> AuditReport:
    """Rate of (Q and not T) over the grid; each rare trial's witness F is checked."""
    rep = AuditReport(kappa)
    best = (-1.0, None)
    for n in n_list:
        spec = SweepSpec(n, kappa, tuple(grid), trials, master_seed, "exact")
        summ, recs = run_sweep(spec, need_F=True, workers=workers)
        for s in summ:
            rep.points.append((n, s))
            if s.pr_qnt > best[0]:
                best = (s.pr_qnt, (n, s.multiple), (s.pr_qnt_lo, s.pr_qnt_hi))
        rare = [r for r in recs if r.in_Q and not r.in_T and not r.error]
        rep.rare_trials += len(rare)
        rep.witness_failures += sum(not (r.F_certified and r.F_weight > 0 and r.half_degree_ok and r.xyF_ok)
                                    for r in rare)
        rep.uncertified += sum(not r.F_certified for r in rare)
        rep.errors += sum(bool(r.error) for r in recs)
    rep.max_rate, rep.max_at, rep.max_rate_ci = best[0], best[1], best[2]
    return rep


AUDIT_HEADER = ["n"] + SWEEP_HEADER


# ---------------------------------------------------------------------------
# Coupling
# ---------------------------------------------------------------------------


@dataclass
class CoupleRecord:
    seed: int
    trial: int
    n: int
    kappa: int
    p: float
    q: float
    theta: float
    rule: str
    F_weight: int
    F_certified: bool
    F0_weight: int
    alpha: float
    alpha0: float
    ratio: float  # |F0| / (theta |F|), nan when F is empty
    F0_in_kperp_of_G0: bool
    max_dF0: int
    max_dF_scaled: float
    error: str = ""


COUPLE_HEADER = header_of(CoupleRecord)


def _rule_F(G: LabeledGraph, kappa: int, rule: str, seed: int) -> tuple[EdgeSubset, bool]:
    if rule == "minimizer":
        r = find_F(G, kappa, seed=seed)
        return r.F, r.certified
    if rule == "half-cut":
        return cut_vector(G, range(G.n // 2)), True
    raise ValueError(f"unknown rule {rule!r}")


def run_coupling_trial(n: int, kappa: int, p: float, thetas: Sequence[float], seed: int, trial: int = 0,
                       rule: str = "minimizer") -> list[CoupleRecord]:
    """Couple G0 = G(n, theta p) below G = G(n, p) via shared labels and restrict F to G0."""
    s = gen_coupled(n, seed)
    G = slice_graph(s, p)
    out = []
    try:
        F, cert = _rule_F(G, kappa, rule, seed)
    except Exception as exc:
        return [CoupleRecord(seed, trial, n, kappa, p, th * p, th, rule, 0, False, 0, 0.0, 0.0, math.nan,
                             False, 0, 0.0, f"{type(exc).__name__}: {exc}") for th in thetas]
    dF = F.degrees()
    for th in thetas:
        if not 0 < th <= 1:
            raise ValueError("theta must lie in (0, 1]")
        q = th * p
        G0 = slice_graph(s, q)
        F0 = F.reindex(G0)
        # the coupling puts G0 inside G, so every edge of F0 is an edge of F
        assert all(G.has_edge(u, v) for u, v in G0.edges)
        bits = F0.bits
        ok = all((bits & m).bit_count() % 2 == 0 for m in enumerate_cycles(G0, kappa).bitmasks())
        dF0 = F0.degrees()
        out.append(CoupleRecord(
            seed, trial, n, kappa, p, q, th, rule, F.weight, cert, F0.weight,
            2 * F.weight / (n * n * p) if p > 0 else 0.0,
            2 * F0.weight / (n * n * q) if q > 0 else 0.0,
            F0.weight / (th * F.weight) if F.weight else math.nan,
            ok, max(dF0, default=0), th * max(dF, default=0),
        ))
    return out


def _couple_job(args) -> list[CoupleRecord]:
    return run_coupling_trial(*args)


def run_coupling(n: int, kappa: int, p: float, thetas: Sequence[float], trials: int, master_seed: int = 0,
                 rule: str = "minimizer", workers: int | None = None) -> list[CoupleRecord]:
    """Coupling records for every (trial, theta); raises if F0 ever leaves the kappa-perp of G0."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    jobs = [(n, kappa, p, tuple(thetas), trial_seed(master_seed, 0, j), j, rule) for j in range(trials)]
    recs = [r for batch in parallel_map(_couple_job, jobs, workers) for r in batch]
    bad = [r for r in recs if not r.error and not r.F0_in_kperp_of_G0]
    if bad:
        raise AcceptanceError(f"F0 not in the kappa-perp of G0 on {len(bad)} records, first: {bad[0]}")
    return recs


@dataclass(frozen=True)
class CouplingSummary:
    records: int
    qualifying: int  # certified, |F| >= min_F
    excluded_uncertified: int
    in_band: int
    band_fraction: float
    all_in_kperp: bool


def summarise_coupling(recs: Sequence[CoupleRecord], min_F: int = 200, band=(0.7, 1.3)) -> CouplingSummary:
    qual = [r for r in recs if not r.error and r.F_certified and r.F_weight >= max(1, min_F)]
    unc = sum(1 for r in recs if not r.error and not r.F_certified)
    inb = sum(band[0] <= r.ratio <= band[1] for r in qual)
    return CouplingSummary(len(recs), len(qual), unc, inb, inb / len(qual) if qual else math.nan,
                           all(r.F0_in_kperp_of_G0 for r in recs if not r.error))


__all__ = [
    "AUDIT_HEADER",
    "AcceptanceError",
    "AuditReport",
    "COUPLE_HEADER",
    "CoupleRecord",
    "CouplingSummary",
    "DEFAULT_GRID",
    "H_LIBRARY",
    "PointSummary",
    "SWEEP_HEADER",
    "SweepSpec",
    "TRIAL_HEADER",
    "TrialRecord",
    "VerifyRow",
    "WORKERS_ENV",
    "audit_main_theorem",
    "expected_dim",
    "fit_sweep_csv",
    "fit_threshold",
    "header_of",
    "n_workers",
    "parallel_map",
    "run_coupling",
    "run_coupling_trial",
    "run_sweep",
    "run_trial",
    "summarise",
    "summarise_coupling",
    "sweep_trials",
    "to_csv",
    "to_json",
    "trial_seed",
    "verify_kn",
    "wilson",
    "witness_checks",
]
