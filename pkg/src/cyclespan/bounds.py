"""Tail bounds, the threshold formula, path moments and adjacency spectra.

Bound evaluators return :class:`Bound` pairs (probability and its natural log)
so callers can work at exponents where ``exp`` underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .graph import LabeledGraph


class Bound(NamedTuple):
    prob: float
    log_prob: float

    @classmethod
    def from_log(cls, lp: float) -> "Bound":
        return cls(math.exp(lp), lp)


def phi(x: float) -> float:
    """(1+x) log(1+x) - x on [-1, inf), with phi(-1) = 1."""
    if x < -1:
        raise ValueError("phi is defined for x >= -1")
    if x == -1:
        return 1.0
    return (1 + x) * math.log1p(x) - x


@dataclass(frozen=True)
class ChernoffUpper:
    phi_form: Bound
    quadratic_form: Bound


def chernoff_upper(mu: float, t: float) -> ChernoffUpper:
    """Pr(X >= mu + t) for binomial X: exp[-mu phi(t/mu)] and exp[-t^2/(2(mu + t/3))]."""
    if mu <= 0 or t < 0:
        raise ValueError("need mu > 0 and t >= 0")
    return ChernoffUpper(
        Bound.from_log(-mu * phi(t / mu)),
        Bound.from_log(-(t * t) / (2 * (mu + t / 3))),
    )


def chernoff_lower(mu: float, t: float) -> ChernoffUpper:
    """Pr(X <= mu - t): exp[-mu phi(-t/mu)] and exp[-t^2/(2 mu)]."""
    if mu <= 0 or t < 0:
        raise ValueError("need mu > 0 and t >= 0")
    if t > mu:
        raise ValueError("lower tail needs t <= mu")
    return ChernoffUpper(
        Bound.from_log(-mu * phi(-t / mu)),
        Bound.from_log(-(t * t) / (2 * mu)),
    )


def chernoff_large(mu: float, K: float) -> Bound:
    """Pr(X > K mu) < exp[-K mu log(K/e)]; informative only for K > e."""
    if mu <= 0 or K <= 0:
        raise ValueError("need mu > 0 and K > 0")
    return Bound.from_log(-K * mu * (math.log(K) - 1))


@dataclass(frozen=True)
class TailParams:
    mu: float
    delta_bar: float
    t: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.delta_bar < self.mu:
            raise ValueError("delta_bar includes the diagonal, so delta_bar >= mu")
        if self.t < 0 or self.t > self.mu:
            raise ValueError("need 0 <= t <= mu")


def janson_lower(params: TailParams) -> ChernoffUpper:
    """Pr(X <= mu - t) <= exp[-phi(-t/mu) mu^2 / delta_bar] <= exp[-t^2 / (2 delta_bar)]."""
    mu, db, t = params.mu, params.delta_bar, params.t
    if mu == 0:
        return ChernoffUpper(Bound(1.0, 0.0), Bound(1.0, 0.0))
    return ChernoffUpper(
        Bound.from_log(-phi(-t / mu) * mu * mu / db),
        Bound.from_log(-(t * t) / (2 * db)),
    )


def pstar(kappa: int, n: float) -> float:
    """[(kappa/(kappa-1)) n^-(kappa-2) ln n]^(1/(kappa-1))."""
    if kappa < 3 or n < 2:
        raise ValueError("need kappa >= 3 and n >= 2")
    return (kappa / (kappa - 1) * n ** (-(kappa - 2)) * math.log(n)) ** (1 / (kappa - 1))


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


class PathMoments(NamedTuple):
    mu: float
    delta_bar: float
    Lambda: float


def path_moments(n: int, p: float, kappa: int) -> PathMoments:
    """Moments of the number of (kappa-1)-edge paths between a fixed pair in G(n,p).

    ``mu`` is exact, ``(n-2)_(kappa-2) p^(kappa-1)``.  ``delta_bar`` keeps the
    diagonal plus the leading overlap term, pairs of paths sharing exactly one
    end edge (absent for kappa = 3, where sharing an edge forces equality).
    """
    if kappa < 3:
        raise ValueError("kappa must be >= 3")
    mu = _falling(n - 2, kappa - 2) * p ** (kappa - 1)
    lam = float(n) ** (kappa - 2) * p ** (kappa - 1)
    if kappa == 3:
        db = mu
    else:
        db = mu * (1 + 2 * _falling(n - 3, kappa - 3) * p ** (kappa - 2))
    return PathMoments(mu, db, lam)


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumReport:
    lambda1: float
    lambda2: float
    lambda_n: float
    iterations: int
    residuals: tuple[float, float, float]
    converged: bool
    eigvec_ratio: float  # max/min entry of the leading eigenvector


def _adjacency(G: LabeledGraph):
    e = np.asarray(G.edges, dtype=np.int64).reshape(-1, 2)
    data = np.ones(2 * len(e))
    rows = np.r_[e[:, 0], e[:, 1]]
    cols = np.r_[e[:, 1], e[:, 0]]
    return sparse.csr_matrix((data, (rows, cols)), shape=(G.n, G.n))


def spectrum(G: LabeledGraph, tol: float = 1e-8, max_iter: int = 10_000, seed: int = 0) -> SpectrumReport:
    """Top, second and bottom adjacency eigenvalues.

    lambda1 comes from power iteration on ``A + Delta I`` (the shift makes the
    spectrum nonnegative so bipartite graphs converge).  lambda2 and lambda_n sit
    at the edge of a dense bulk where power iteration stalls, so they come from
    a dense symmetric solver (n <= 1000) or Lanczos (``eigsh``).
    Residuals ``||Av - lv|| / ||v||`` are reported for all three.
    """
    if G.m == 0:
        raise ValueError("spectrum needs a nonempty graph")
    A = _adjacency(G)
    n = G.n
    shift = float(max(G.degrees()))
    rng = np.random.default_rng(seed)
    v = rng.random(n) + 0.5
    v /= np.linalg.norm(v)
    lam = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = A @ v + shift * v
        lam = float(v @ w) - shift
        v = w / np.linalg.norm(w)
        res = np.linalg.norm(A @ v - lam * v)
        if res <= tol * max(1.0, abs(lam)):
            converged = True
            break
    v1 = v if v.sum() >= 0 else -v
    lam1 = float(v1 @ (A @ v1))
    r1 = float(np.linalg.norm(A @ v1 - lam1 * v1))

    if n <= 1000:
        vals, vecs = np.linalg.eigh(A.toarray())
        lam2, x2 = vals[-2], vecs[:, -2]
        lamn, xn = vals[0], vecs[:, 0]
    else:
        vals, vecs = eigsh(A, k=2, which="LA", tol=tol)
        lam2, x2 = vals[0], vecs[:, 0]
        vals, vecs = eigsh(A, k=1, which="SA", tol=tol)
        lamn, xn = vals[0], vecs[:, 0]
    lam2 = float(lam2)
    r2 = float(np.linalg.norm(A @ x2 - lam2 * x2) / np.linalg.norm(x2))
    rn = float(np.linalg.norm(A @ xn - lamn * xn) / np.linalg.norm(xn))
    ratio = float(v1.max() / v1.min()) if v1.min() > 0 else math.inf
    return SpectrumReport(lam1, lam2, float(lamn), it, (r1, r2, rn), converged, ratio)
