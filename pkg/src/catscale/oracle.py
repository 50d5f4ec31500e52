"""Independent cross-checks for the analytic pipeline.

Monte-Carlo simulation of the blurred-counter experiment (sample a
component, add Gaussian noise, guess by likelihood ratio), an
exponential-map construction of the displacement operator built on an
enlarged basis, exact multi-copy guessing for finite discrete alphabets,
and PMF tensor helpers.  None of these share code paths with the kernels
they check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.linalg import expm

from . import coarse, statekit
from .statekit import PhotonPMF

DEFAULT_MC_SEED = 1729

#: below this sigma the MC decision uses exact pointwise density evaluation;
#: above it, linear interpolation on a sigma/64 grid (error ~2e-5 relative,
#: far below binomial noise at any admissible sample count)
_INTERP_SIGMA = 0.05


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo experiment settings."""

    samples: int = 1_000_000
    seed: int = DEFAULT_MC_SEED
    rule: str = "likelihood-ratio"

    def __post_init__(self):
        if int(self.samples) < 10_000:
            raise ValueError("reported comparisons need >= 10^4 samples")
        if self.rule != "likelihood-ratio":
            raise ValueError(f"unknown decision rule {self.rule!r}")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass
class McResult:
    """Empirical guessing probability with its binomial standard error."""

    p_hat: float
    std_err: float
    samples: int
    seed: int


def _sample_counts(rng: np.random.Generator, pmf: PhotonPMF,
                   size: int) -> np.ndarray:
    cdf = np.cumsum(pmf.masses)
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(idx, pmf.cutoff)


def _densities_at(pmf: PhotonPMF, sigma: float, x: np.ndarray) -> np.ndarray:
    if sigma >= _INTERP_SIGMA:
        xs, vals = coarse.density_grid(pmf, sigma)
        return np.interp(x, xs, vals, left=0.0, right=0.0)
    lo, masses = pmf.trimmed_support(1e-18)
    from . import _kernels
    return _kernels.density_at_points(masses, lo, sigma, x)


def mc_guess_probability(pmf_a, pmf_b, sigma: float,
                         config: Optional[McConfig] = None) -> McResult:
    """Simulate the equal-prior discrimination experiment.

    Per shot: pick a component uniformly, draw a photon count from its PMF,
    blur with N(0, sigma^2), then guess the component whose blurred density
    is larger at the observed reading; exact density ties fall to a fair
    coin from the same random stream.  Stream order is fixed (component
    picks, counts A, counts B, noise, tie breaks) so a seed pins the run.
    """
    cfg = config or McConfig()
    a = coarse._as_pmf(pmf_a)
    b = coarse._as_pmf(pmf_b)
    s = float(sigma)
    if s < 0:
        raise ValueError("sigma must be >= 0")
    n = cfg.samples
    rng = np.random.default_rng(cfg.seed)
    which = rng.integers(0, 2, size=n)
    counts_a = _sample_counts(rng, a, n)
    counts_b = _sample_counts(rng, b, n)
    noise = rng.normal(0.0, 1.0, size=n)
    tie_u = rng.random(n)

    counts = np.where(which == 0, counts_a, counts_b)
    if s >= coarse.SIGMA_DISCRETE:
        x = counts + s * noise
        dens_a = _densities_at(a, s, x)
        dens_b = _densities_at(b, s, x)
    else:
        # counter resolves integers: likelihoods are the PMF masses
        c = max(a.cutoff, b.cutoff)
        dens_a = a.padded(c).masses[counts]
        dens_b = b.padded(c).masses[counts]

    guess = np.where(dens_a > dens_b, 0, 1)
    ties = dens_a == dens_b
    if ties.any():
        guess[ties] = (tie_u[ties] < 0.5).astype(guess.dtype)
    p_hat = float(np.mean(guess == which))
    # floored at one count of resolution: with zero observed misses the
    # Wald estimate collapses and sub-1/n deviations are meaningless
    std_err = max(math.sqrt(p_hat * (1.0 - p_hat) / n), 1.0 / n)
    return McResult(p_hat=p_hat, std_err=std_err, samples=n, seed=cfg.seed)


# ------------------------- dense displacement check ------------------------


def dense_displacement(alpha: complex, cutoff: int) -> np.ndarray:
    """D(alpha) = expm(alpha a^dag - conj(alpha} a) on a basis enlarged by
    50% and cropped back, so truncation artifacts stay off the returned
    block.  Independent of the recurrence kernel."""
    c = int(cutoff)
    if c < 0:
        raise ValueError("cutoff must be >= 0")
    big = int(math.ceil((c + 1) * 1.5))
    gen = np.zeros((big, big), dtype=np.complex128)
    al = complex(alpha)
    for m in range(big - 1):
        root = math.sqrt(m + 1.0)
        gen[m + 1, m] = al * root          # alpha a^dag
        gen[m, m + 1] = -np.conj(al) * root  # -conj(alpha) a
    return expm(gen)[:c + 1, :c + 1]


# ----------------------- discrete multi-copy guessing ----------------------


def coin_guess_probability(p_a: float, p_b: float, copies: int = 1) -> float:
    """Exact optimal guessing probability between two coins observed
    `copies` times: (1/2) sum over outcomes of max of the two product
    likelihoods (grouped by head count)."""
    pa, pb = float(p_a), float(p_b)
    if not (0.0 <= pa <= 1.0 and 0.0 <= pb <= 1.0):
        raise ValueError("coin biases must lie in [0, 1]")
    c = int(copies)
    if c < 1:
        raise ValueError("copies must be >= 1")
    total = 0.0
    for h in range(c + 1):
        weight = math.comb(c, h)
        la = pa ** h * (1.0 - pa) ** (c - h)
        lb = pb ** h * (1.0 - pb) ** (c - h)
        total += weight * max(la, lb)
    return 0.5 * total


def tensor_pmf(pmf_a, pmf_b) -> np.ndarray:
    """Joint distribution of independent draws, as an outer-product array."""
    a = np.asarray(pmf_a.masses if isinstance(pmf_a, PhotonPMF) else pmf_a,
                   dtype=np.float64)
    b = np.asarray(pmf_b.masses if isinstance(pmf_b, PhotonPMF) else pmf_b,
                   dtype=np.float64)
    return np.multiply.outer(a, b)


def tensor_power(pmf, copies: int) -> np.ndarray:
    """k-fold independent joint distribution (k-dimensional array)."""
    c = int(copies)
    if c < 1:
        raise ValueError("copies must be >= 1")
    base = np.asarray(pmf.masses if isinstance(pmf, PhotonPMF) else pmf,
                      dtype=np.float64)
    out = base
    for _ in range(c - 1):
        out = np.multiply.outer(out, base)
    return out


# ------------------------------ the check grid -----------------------------


def _fock_pair(m: int, n: int):
    c = max(m, n)
    a = np.zeros(c + 1)
    b = np.zeros(c + 1)
    a[m] = 1.0
    b[n] = 1.0
    return PhotonPMF(a), PhotonPMF(b)


def _family_pair(expr: str):
    pair = statekit.family_pair(statekit.StateFamilySpec.parse(expr))
    return pair.pmf_a, pair.pmf_b


#: (label, pair-builder, sigma): spans number pairs, both coherent families,
#: the displaced |+/-> pair, collective spins, and an indistinguishable pair
MC_GRID = (
    ("fock 0/10, s=5", lambda: _fock_pair(0, 10), 5.0),
    ("fock 0/1, s=1", lambda: _fock_pair(0, 1), 1.0),
    ("fock 5/25, s=8", lambda: _fock_pair(5, 25), 8.0),
    ("cat b2=40, s=20", lambda: _family_pair("cat:a2=0,b2=40"), 20.0),
    ("cat b2=40, s=46", lambda: _family_pair("cat:a2=0,b2=40"), 46.0),
    ("cat a2=400 b2=4, s=30", lambda: _family_pair("cat:a2=400,b2=4"), 30.0),
    ("dsp a2=100, s=5", lambda: _family_pair("dsp:a2=100"), 5.0),
    ("dsp a2=400, s=1", lambda: _family_pair("dsp:a2=400"), 1.0),
    ("dsp a2=400, s=10", lambda: _family_pair("dsp:a2=400"), 10.0),
    ("spins N=500 d=0.3, s=3", lambda: _family_pair("spins:N=500,delta=0.3"), 3.0),
    ("spins N=500 d=0.3, s=7", lambda: _family_pair("spins:N=500,delta=0.3"), 7.0),
    ("cpair b2=40, s=1", lambda: _family_pair("cpair:b2=40"), 1.0),
)


@dataclass
class McCheckRow:
    label: str
    sigma: float
    analytic: float
    p_hat: float
    std_err: float
    n_se: float
    passed: bool


def mc_check(config: Optional[McConfig] = None,
             tolerance_se: float = 3.0) -> List[McCheckRow]:
    """Run the fixed comparison grid: quadrature vs Monte-Carlo, flagging
    any case further than tolerance_se binomial standard errors."""
    cfg = config or McConfig()
    rows: List[McCheckRow] = []
    for label, build, sigma in MC_GRID:
        pa, pb = build()
        analytic = coarse.guess_probability(pa, pb, sigma).guess_probability
        mc = mc_guess_probability(pa, pb, sigma, cfg)
        n_se = abs(mc.p_hat - analytic) / mc.std_err
        rows.append(McCheckRow(label=label, sigma=sigma, analytic=analytic,
                               p_hat=mc.p_hat, std_err=mc.std_err, n_se=n_se,
                               passed=bool(n_se <= tolerance_se)))
    return rows
