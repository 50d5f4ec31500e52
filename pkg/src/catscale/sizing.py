"""Operational superposition size from distinguishability decay.

The size of a two-component superposition, at a target guessing probability
p_g, is defined through the largest detector resolution sigma_max at which
the components can still be told apart with probability p_g.  Calibrating
against number-state pairs (whose guessing probability is
(1 + Erf(N/(2 sqrt2 sigma)))/2) converts that resolution into an equivalent
number-state separation:

    size = 2 sqrt(2) Erfinv(2 p_g - 1) * sigma_max.

sigma_max itself is found by bisection on the monotone curve
P(sigma) = guess_probability(pmf_a, pmf_b, sigma).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import erf, erfinv

from . import coarse, statekit

#: stand-in for sigma -> 0 when probing reachability of a target p_g
SIGMA_PROXY = 1e-3

#: relative width at which the sigma bisection stops
_REL_TOL = 1e-6

#: best guessing probability a displaced |+>/|-> pair admits as sigma -> 0
REACHABILITY_LIMIT_DSP = 0.5 * (1.0 + math.sqrt(2.0 / math.pi))


class ConvergenceError(RuntimeError):
    """The sigma bracket or bisection failed to converge."""


@dataclass
class SizeReport:
    """Result of a size analysis; serializes to the fixed JSON field set."""

    pg: float
    sigma_max: float
    size: float
    p_at_sigma0: float
    iterations: int
    family: str = ""

    def as_dict(self) -> dict:
        return {
            "pg": self.pg,
            "sigma_max": self.sigma_max,
            "size": self.size,
            "p_at_sigma0": self.p_at_sigma0,
            "iterations": self.iterations,
            "family": self.family,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _check_pg(p_g: float) -> float:
    p = float(p_g)
    if not 0.5 < p < 1.0:
        raise ValueError("p_g must lie strictly between 1/2 and 1")
    return p


def size_from_sigma(sigma_max: float, p_g: float) -> float:
    """Number-state-equivalent separation for a tolerated resolution."""
    p = _check_pg(p_g)
    if sigma_max < 0:
        raise ValueError("sigma_max must be >= 0")
    return float(2.0 * math.sqrt(2.0) * erfinv(2.0 * p - 1.0) * sigma_max)


def _p_of(pmf_a, pmf_b, sigma: float) -> float:
    return coarse.guess_probability(pmf_a, pmf_b, sigma).guess_probability


def _solve_sigma(pmf_a, pmf_b, p_g: float) -> Tuple[float, float, int]:
    """(sigma_max, p_at_sigma0, iterations); sigma_max = 0 flags 'p_g not
    reachable even by a noiseless counter'."""
    p = _check_pg(p_g)
    p0 = _p_of(pmf_a, pmf_b, SIGMA_PROXY)
    if p0 < p:
        return 0.0, p0, 0

    lo = SIGMA_PROXY
    mean_sep = abs(coarse._as_pmf(pmf_a).mean() - coarse._as_pmf(pmf_b).mean())
    hi = max(1.0, 4.0 * mean_sep)
    iters = 0
    while True:
        iters += 1
        if _p_of(pmf_a, pmf_b, hi) < p:
            break
        lo = hi
        hi *= 2.0
        if iters > 60:
            raise ConvergenceError(
                f"no sigma with P(sigma) < {p} found below {hi:.3e}")

    while hi - lo > _REL_TOL * 0.5 * (hi + lo):
        iters += 1
        if iters > 200:
            raise ConvergenceError("sigma bisection exceeded 200 iterations")
        mid = 0.5 * (lo + hi)
        if _p_of(pmf_a, pmf_b, mid) >= p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), p0, iters


def max_tolerable_sigma(pmf_a, pmf_b, p_g: float) -> float:
    """Largest resolution still allowing guessing probability p_g
    (0.0 when even a noiseless counter falls short)."""
    s, _, _ = _solve_sigma(pmf_a, pmf_b, p_g)
    return s


def size(pmf_a, pmf_b, p_g: float = 2.0 / 3.0, family: str = "") -> SizeReport:
    """Full size analysis of a component pair at target p_g."""
    s, p0, iters = _solve_sigma(pmf_a, pmf_b, p_g)
    sz = size_from_sigma(s, p_g) if s > 0.0 else 0.0
    return SizeReport(pg=float(p_g), sigma_max=s, size=sz, p_at_sigma0=p0,
                      iterations=iters, family=family)


# -------------------------- closed-form references -------------------------


def closed_form_size_1a(beta2: float, p_g: float) -> float:
    """Vacuum vs coherent |beta|^2 = beta2:  size = beta2 - 2 Erfinv(2p-1)^2
    (clamped at 0).  Accurate once the two blurred peaks are far apart,
    i.e. for beta2 of a few tens and up."""
    p = _check_pg(p_g)
    z = float(erfinv(2.0 * p - 1.0))
    return max(0.0, float(beta2) - 2.0 * z * z)


def limit_guess_1b(beta2: float) -> float:
    """alpha -> infinity guessing probability for {|a>, D(a)|b>} with
    |b|^2 = beta2:  (1 + Erf(|b|/sqrt2))/2, independent of the detector
    resolution scale."""
    if beta2 < 0:
        raise ValueError("beta2 must be >= 0")
    return float(0.5 * (1.0 + erf(math.sqrt(float(beta2)) / math.sqrt(2.0))))


def closed_form_size_2(alpha2: float, p_g: float) -> float:
    """Displaced |+>/|-> pair with photon number |alpha|^2 = alpha2:

        size = 2 |alpha| Erfinv(2p-1) sqrt( 4/(pi (2p-1)^2) - 2 ),

    which vanishes exactly at the noiseless reachability limit
    p = (1 + sqrt(2/pi))/2 ~ 0.899 and tends to 2 |alpha| as p -> 1/2.
    Returns 0 beyond the limit.
    """
    if alpha2 < 0:
        raise ValueError("alpha2 must be >= 0")
    p = _check_pg(p_g)
    delta = 2.0 * p - 1.0
    radicand = 4.0 / (math.pi * delta * delta) - 2.0
    if radicand <= 0.0:
        return 0.0
    return float(2.0 * math.sqrt(float(alpha2)) * erfinv(delta)
                 * math.sqrt(radicand))


def closed_form_size_3(n_spins: int, delta: float, p_g: float) -> float:
    """Binomial excitation pair (N spins, tilt delta, eps = sin delta):

        size = N eps sqrt( 1 - 2 Erfinv(2p-1)^2 (1 - eps^2) / (N eps^2) ),

    approaching the full separation N eps for large N.  Returns 0 when the
    radicand closes (p_g out of reach for the finite ensemble)."""
    p = _check_pg(p_g)
    n = float(n_spins)
    eps = math.sin(float(delta))
    z = float(erfinv(2.0 * p - 1.0))
    radicand = 1.0 - 2.0 * z * z * (1.0 - eps * eps) / (n * eps * eps)
    if radicand <= 0.0:
        return 0.0
    return float(n * eps * math.sqrt(radicand))


# ----------------------------- rotation search -----------------------------


@dataclass
class RotationResult:
    theta: float
    phi: float
    report: SizeReport
    skipped_points: int = 0


def _golden_max(f: Callable[[float], float], a: float, b: float,
                iterations: int = 18) -> Tuple[float, float]:
    """Golden-section maximization of f on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def optimize_rotation(state_a: statekit.FockAmplitudeVector,
                      state_d: statekit.FockAmplitudeVector,
                      p_g: float = 2.0 / 3.0,
                      grid_spec: Tuple[int, int] = (16, 8),
                      refine: bool = True,
                      family: str = "") -> RotationResult:
    """Largest size over two-branch rotations of a component pair.

    Scans theta in [0, pi/2] x phi in [0, 2 pi) on an (n_theta, n_phi)
    grid, then refines each angle by golden section around the best grid
    point.  Grid points where a rotated branch collapses (parallel
    components) are skipped and counted.  Ties prefer smaller theta, then
    smaller phi.
    """
    n_theta, n_phi = int(grid_spec[0]), int(grid_spec[1])
    if n_theta < 2 or n_phi < 1:
        raise ValueError("grid_spec must be at least (2, 1)")
    p = _check_pg(p_g)

    def size_at(theta: float, phi: float) -> Optional[SizeReport]:
        try:
            u, v = statekit.superpose(state_a, state_d, theta, phi)
        except ValueError:
            return None
        return size(statekit.photon_pmf(u), statekit.photon_pmf(v), p, family)

    thetas = np.linspace(0.0, math.pi / 2.0, n_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    best = None
    skipped = 0
    for th in thetas:
        for ph in phis:
            rep = size_at(float(th), float(ph))
            if rep is None:
                skipped += 1
                continue
            if best is None or rep.size > best[2].size:
                best = (float(th), float(ph), rep)
    if best is None:
        raise ConvergenceError("every rotation grid point was degenerate")

    th, ph, rep = best
    if refine and rep.size > 0.0:
        dt = math.pi / 2.0 / (n_theta - 1)
        lo, hi = max(0.0, th - dt), min(math.pi / 2.0, th + dt)

        def f_theta(t: float) -> float:
            r = size_at(t, ph)
            return -1.0 if r is None else r.size

        th_ref, val = _golden_max(f_theta, lo, hi)
        if val > rep.size:
            th = th_ref
        dp = 2.0 * math.pi / n_phi

        def f_phi(q: float) -> float:
            r = size_at(th, q % (2.0 * math.pi))
            return -1.0 if r is None else r.size

        ph_ref, val2 = _golden_max(f_phi, ph - dp, ph + dp)
        if val2 > rep.size:
            ph = ph_ref % (2.0 * math.pi)
        final = size_at(th, ph)
        if final is not None and final.size >= rep.size:
            rep = final
        else:
            th, ph = best[0], best[1]
            rep = best[2]
    return RotationResult(theta=th, phi=ph, report=rep, skipped_points=skipped)
