"""Truncated Fock-space states and the state-family mini-grammar.

Provides amplitude vectors on a finite photon-number basis, coherent/Fock
constructors with tail-mass accounting, a displacement operation backed by
the kernel recurrence, two-branch superpositions, photon-number PMFs
(including the collective-spin excitation PMF), and parsing/construction of
named state families used by the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom, poisson

from . import _kernels

DEFAULT_TAIL_TOL = 1e-12

#: support trimming threshold for kernel calls (probability per side)
_TRIM_TOL = 1e-22


class CutoffError(ValueError):
    """Basis cutoff too small for the requested state."""


class TailMassError(ValueError):
    """Probability mass beyond the cutoff exceeds the allowed tolerance."""


class GrammarError(ValueError):
    """Malformed or out-of-range state-family expression."""


def default_cutoff(mean_photon: float) -> int:
    """Cutoff policy ceil(mu + 12*sqrt(mu) + 25): keeps the neglected tail of
    a Poisson-like distribution with mean mu below ~1e-12."""
    mu = max(0.0, float(mean_photon))
    return int(math.ceil(mu + 12.0 * math.sqrt(mu) + 25.0))


@dataclass(frozen=True, eq=False)
class FockAmplitudeVector:
    """Unit-norm amplitudes c_0..c_cutoff on the truncated number basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] < 1:
            raise ValueError("amplitudes must be a nonempty 1-d array")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"state norm {nrm!r} deviates from 1 beyond 1e-10")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "FockAmplitudeVector") -> complex:
        """<self|other> after zero-padding to the larger cutoff."""
        a, b = self.amplitudes, other.amplitudes
        n = min(a.shape[0], b.shape[0])
        return complex(np.vdot(a[:n], b[:n]))

    def mean_photon(self) -> float:
        p = np.abs(self.amplitudes) ** 2
        return float(np.dot(p, np.arange(p.shape[0])) / p.sum())


def normalized_state(raw_amplitudes) -> FockAmplitudeVector:
    """Normalize an arbitrary amplitude array into a FockAmplitudeVector."""
    amps = np.asarray(raw_amplitudes, dtype=np.complex128)
    nrm = np.linalg.norm(amps)
    if not np.isfinite(nrm) or nrm < 1e-10:
        raise ValueError("cannot normalize a (near-)zero or non-finite vector")
    return FockAmplitudeVector(amps / nrm)


@dataclass(frozen=True, eq=False)
class PhotonPMF:
    """Photon-number distribution p_0..p_cutoff, normalized to 1."""

    masses: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.masses, dtype=np.float64)
        if m.ndim != 1 or m.shape[0] < 1:
            raise ValueError("masses must be a nonempty 1-d array")
        if not np.all(np.isfinite(m)):
            raise ValueError("masses must be finite")
        if m.min() < -1e-12:
            raise ValueError("negative probability mass")
        m = np.clip(m, 0.0, None)
        s = m.sum()
        if abs(s - 1.0) > 1e-10:
            raise ValueError(f"PMF sums to {s!r}, not 1 within 1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @property
    def cutoff(self) -> int:
        return self.masses.shape[0] - 1

    def mean(self) -> float:
        return float(np.dot(self.masses, np.arange(self.masses.shape[0])))

    def padded(self, cutoff: int) -> "PhotonPMF":
        if cutoff < self.cutoff:
            raise CutoffError("cannot pad to a smaller cutoff")
        if cutoff == self.cutoff:
            return self
        m = np.zeros(cutoff + 1)
        m[:self.masses.shape[0]] = self.masses
        return PhotonPMF(m)

    def trimmed_support(self, tol: float = 1e-18):
        """(n_lo, masses[n_lo:n_hi+1]) dropping <= tol mass per side."""
        m = self.masses
        csum = np.cumsum(m)
        lo = int(np.searchsorted(csum, tol, side="right"))
        hi = int(np.searchsorted(csum, csum[-1] - tol, side="left"))
        hi = min(max(hi, lo), m.shape[0] - 1)
        return lo, m[lo:hi + 1]


def pmf_normalized(masses) -> PhotonPMF:
    """Clip tiny negatives and renormalize an almost-PMF array."""
    m = np.clip(np.asarray(masses, dtype=np.float64), 0.0, None)
    s = m.sum()
    if not np.isfinite(s) or s <= 0:
        raise ValueError("PMF mass must be positive and finite")
    return PhotonPMF(m / s)


def make_fock(number: int, cutoff: Optional[int] = None) -> FockAmplitudeVector:
    """Number state |number> on a basis of size cutoff+1."""
    n = int(number)
    if n < 0:
        raise ValueError("photon number must be >= 0")
    c = default_cutoff(n) if cutoff is None else int(cutoff)
    if c < n:
        raise CutoffError(f"cutoff {c} below photon number {n}")
    amps = np.zeros(c + 1, dtype=np.complex128)
    amps[n] = 1.0
    return FockAmplitudeVector(amps)


def make_coherent(alpha: complex, cutoff: Optional[int] = None,
                  tail_tol: float = DEFAULT_TAIL_TOL) -> FockAmplitudeVector:
    """Coherent state c_n = e^{-|a|^2/2} a^n/sqrt(n!), renormalized on the
    truncated basis.  Requires cutoff >= |a|^2 + 12|a| + 20 and neglected
    Poisson tail below tail_tol."""
    alpha = complex(alpha)
    mu = abs(alpha) ** 2
    c = default_cutoff(mu) if cutoff is None else int(cutoff)
    if c < mu + 12.0 * math.sqrt(mu) + 20.0:
        raise CutoffError(
            f"cutoff {c} below |alpha|^2 + 12|alpha| + 20 = "
            f"{mu + 12.0 * math.sqrt(mu) + 20.0:.1f}")
    if mu > 0:
        tail = float(poisson.sf(c, mu))
        if tail > tail_tol:
            raise TailMassError(f"tail mass {tail:.3e} above {tail_tol:.1e}")
    n = np.arange(c + 1, dtype=np.float64)
    if mu == 0.0:
        amps = np.zeros(c + 1, dtype=np.complex128)
        amps[0] = 1.0
        return FockAmplitudeVector(amps)
    logmag = -0.5 * mu + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0)
    amps = np.exp(logmag) * np.exp(1j * np.angle(alpha) * n)
    return normalized_state(amps)


def displace(state: FockAmplitudeVector, alpha: complex,
             tail_tol: float = 1e-8) -> FockAmplitudeVector:
    """Apply the displacement operator D(alpha) on the state's own basis.

    Columns of D are generated only over the trimmed input support.  If the
    displaced state leaks more than tail_tol of its norm past the cutoff,
    the operation refuses rather than silently truncating.
    """
    amps = state.amplitudes
    p = np.abs(amps) ** 2
    csum = np.cumsum(p)
    lo = int(np.searchsorted(csum, _TRIM_TOL, side="right"))
    hi = int(np.searchsorted(csum, csum[-1] - _TRIM_TOL, side="left"))
    hi = min(max(hi, lo), state.cutoff)
    W = _kernels.displacement_block(complex(alpha), state.cutoff, lo, hi)
    out = W @ amps[lo:hi + 1]
    kept = float(np.vdot(out, out).real)
    deficit = 1.0 - kept
    if deficit > tail_tol:
        raise TailMassError(
            f"displaced state loses {deficit:.3e} of its norm past cutoff "
            f"{state.cutoff}; enlarge the basis")
    return FockAmplitudeVector(out / math.sqrt(kept))


def superpose(state_a: FockAmplitudeVector, state_d: FockAmplitudeVector,
              theta: float, phi: float = 0.0):
    """Rotate a component pair (A, D) into

        A' = cos(theta) A + sin(theta) e^{i phi} D
        D' = cos(theta) e^{i phi} D - sin(theta) A

    both renormalized.  Raises for (near-)parallel inputs at angles where a
    branch collapses."""
    if state_a.cutoff != state_d.cutoff:
        raise ValueError("components must share one cutoff")
    ct, st = math.cos(theta), math.sin(theta)
    ep = complex(math.cos(phi), math.sin(phi))
    a, d = state_a.amplitudes, state_d.amplitudes
    u = ct * a + st * ep * d
    v = ct * ep * d - st * a
    try:
        return normalized_state(u), normalized_state(v)
    except ValueError as exc:
        raise ValueError(
            f"rotation theta={theta:.6g}, phi={phi:.6g} collapses a branch "
            f"(components too close to parallel)") from exc


def annihilation_expectation(state: FockAmplitudeVector) -> complex:
    """<a> = sum_n conj(c_n) c_{n+1} sqrt(n+1)."""
    c = state.amplitudes
    n = np.arange(1, c.shape[0], dtype=np.float64)
    return complex(np.sum(np.conj(c[:-1]) * c[1:] * np.sqrt(n)))


def states_equal_up_to_phase(s1: FockAmplitudeVector, s2: FockAmplitudeVector,
                             tol: float = 1e-8) -> bool:
    """Elementwise equality after removing one global phase."""
    if s1.amplitudes.shape != s2.amplitudes.shape:
        return False
    ov = s1.inner(s2)
    if abs(ov) < 1e-12:
        return False
    ph = ov / abs(ov)
    return bool(np.allclose(s1.amplitudes * ph, s2.amplitudes, atol=tol, rtol=0))


def photon_pmf(state: FockAmplitudeVector) -> PhotonPMF:
    """Photon-number distribution |c_n|^2 of a state."""
    return pmf_normalized(np.abs(state.amplitudes) ** 2)


def spin_excitation_pmf(n_spins: int, theta: float) -> PhotonPMF:
    """Excitation-count PMF of n_spins independent spins, each excited with
    probability sin^2(theta): Binomial(n_spins, sin^2 theta)."""
    n = int(n_spins)
    if n < 1:
        raise ValueError("need at least one spin")
    p = math.sin(theta) ** 2
    return pmf_normalized(binom.pmf(np.arange(n + 1), n, p))


# --------------------------------------------------------------------------
# State-family mini-grammar:  family:key=value,key=value
#
#   fock:M=3                    number state                (single)
#   coherent:a2=40              coherent, |alpha|^2 = a2    (single)
#   raw:file=PATH               amplitudes from a file      (single)
#   cat:a2=0,b2=40              { |alpha>, D(alpha)|beta> } (pair)
#   dsp:a2=400                  { D(alpha)|+>, D(alpha)|-> }(pair)
#   cpair:b2=40                 { |beta/2>, |-beta/2> }     (pair)
#   spins:N=500,delta=0.3       binomial excitation pair    (pair)
#
# Photonic pair families accept optional theta=...,phi=... applying the
# superpose() rotation to the two components.
# --------------------------------------------------------------------------

_FAMILY_PARAMS = {
    "fock": ({"M"}, set()),
    "coherent": ({"a2"}, set()),
    "raw": ({"file"}, set()),
    "cat": ({"a2", "b2"}, {"theta", "phi"}),
    "dsp": ({"a2"}, {"theta", "phi"}),
    "cpair": ({"b2"}, {"theta", "phi"}),
    "spins": ({"N", "delta"}, set()),
}

SINGLE_FAMILIES = ("fock", "coherent", "raw")
PAIR_FAMILIES = ("cat", "dsp", "cpair", "spins")


@dataclass(frozen=True)
class StateFamilySpec:
    """Parsed family expression: a family tag plus validated parameters."""

    family: str
    params: dict

    @classmethod
    def parse(cls, text: str) -> "StateFamilySpec":
        text = text.strip()
        if ":" not in text:
            raise GrammarError(f"expected family:key=value,... in {text!r}")
        family, _, body = text.partition(":")
        family = family.strip()
        if family not in _FAMILY_PARAMS:
            raise GrammarError(f"unknown family {family!r}")
        required, optional = _FAMILY_PARAMS[family]
        params: dict = {}
        for item in body.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise GrammarError(f"expected key=value, got {item!r}")
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in required and key not in optional:
                raise GrammarError(f"family {family!r} takes no parameter {key!r}")
            if key in params:
                raise GrammarError(f"duplicate parameter {key!r}")
            if key == "file":
                params[key] = val.strip()
            else:
                try:
                    params[key] = float(val)
                except ValueError:
                    raise GrammarError(f"non-numeric value for {key!r}: {val!r}")
        missing = required - set(params)
        if missing:
            raise GrammarError(
                f"family {family!r} missing parameter(s) {sorted(missing)}")
        cls._validate(family, params)
        return cls(family, params)

    @staticmethod
    def _validate(family: str, params: dict) -> None:
        def nonneg(key):
            if params[key] < 0:
                raise GrammarError(f"{key} must be >= 0")

        def integral(key):
            if params[key] != int(params[key]):
                raise GrammarError(f"{key} must be an integer")

        if family == "fock":
            nonneg("M"); integral("M")
        elif family == "coherent":
            nonneg("a2")
        elif family == "cat":
            nonneg("a2"); nonneg("b2")
        elif family == "dsp":
            nonneg("a2")
        elif family == "cpair":
            nonneg("b2")
        elif family == "spins":
            integral("N")
            if params["N"] < 1:
                raise GrammarError("N must be >= 1")
            if not 0.0 < params["delta"] < math.pi / 2:
                raise GrammarError("delta must lie in (0, pi/2)")

    @property
    def is_pair(self) -> bool:
        return self.family in PAIR_FAMILIES

    def label(self) -> str:
        body = ",".join(f"{k}={self.params[k]:g}" if k != "file"
                        else f"{k}={self.params[k]}"
                        for k in sorted(self.params))
        return f"{self.family}:{body}"


@dataclass
class FamilyPair:
    """Two components ready for distinguishability analysis."""

    pmf_a: PhotonPMF
    pmf_b: PhotonPMF
    label: str
    state_a: Optional[FockAmplitudeVector] = None
    state_d: Optional[FockAmplitudeVector] = None
    diagnostics: dict = field(default_factory=dict)


def load_raw_state(path: str, cutoff: Optional[int] = None) -> FockAmplitudeVector:
    """Amplitudes from a text file: one row per basis state, 're' or 're,im'."""
    rows = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    if rows.shape[1] == 1:
        amps = rows[:, 0].astype(np.complex128)
    elif rows.shape[1] == 2:
        amps = rows[:, 0] + 1j * rows[:, 1]
    else:
        raise GrammarError(f"raw state file {path!r} must have 1 or 2 columns")
    if cutoff is not None:
        if cutoff + 1 < amps.shape[0]:
            raise CutoffError("cutoff override below raw state length")
        amps = np.pad(amps, (0, cutoff + 1 - amps.shape[0]))
    return normalized_state(amps)


def family_state(spec: StateFamilySpec,
                 cutoff: Optional[int] = None) -> FockAmplitudeVector:
    """Build a single-state family member."""
    if spec.family == "fock":
        return make_fock(int(spec.params["M"]), cutoff)
    if spec.family == "coherent":
        return make_coherent(math.sqrt(spec.params["a2"]), cutoff)
    if spec.family == "raw":
        return load_raw_state(spec.params["file"], cutoff)
    raise GrammarError(f"{spec.family!r} is a pair family; it needs no --pair")


def _maybe_rotate(a, d, params):
    if "theta" in params or "phi" in params:
        theta = params.get("theta", 0.0)
        phi = params.get("phi", 0.0)
        return superpose(a, d, theta, phi)
    return a, d


def family_pair(spec: StateFamilySpec,
                cutoff: Optional[int] = None) -> FamilyPair:
    """Build both components of a pair family at a shared cutoff."""
    p = spec.params
    if spec.family == "spins":
        n, delta = int(p["N"]), p["delta"]
        pa = spin_excitation_pmf(n, math.pi / 4 - delta / 2)
        pb = spin_excitation_pmf(n, math.pi / 4 + delta / 2)
        if cutoff is not None:
            pa, pb = pa.padded(cutoff), pb.padded(cutoff)
        eps = math.sin(delta)
        return FamilyPair(pa, pb, spec.label(), diagnostics={
            "epsilon": eps, "mean_a": pa.mean(), "mean_b": pb.mean()})

    if spec.family == "cat":
        alpha, beta = math.sqrt(p["a2"]), math.sqrt(p["b2"])
        c = default_cutoff((alpha + beta) ** 2) if cutoff is None else cutoff
        a = make_coherent(alpha, c)
        d = displace(make_coherent(beta, c), alpha)
    elif spec.family == "dsp":
        alpha = math.sqrt(p["a2"])
        c = (default_cutoff(p["a2"] + alpha + 0.5) if cutoff is None else cutoff)
        plus, minus = superpose(make_fock(0, c), make_fock(1, c), math.pi / 4)
        a, d = displace(plus, alpha), displace(minus, alpha)
    elif spec.family == "cpair":
        beta = math.sqrt(p["b2"])
        c = default_cutoff(p["b2"] / 4.0) if cutoff is None else cutoff
        a = make_coherent(beta / 2.0, c)
        d = make_coherent(-beta / 2.0, c)
    else:
        raise GrammarError(f"{spec.family!r} is not a pair family")

    a, d = _maybe_rotate(a, d, p)
    overlap = abs(a.inner(d))
    return FamilyPair(photon_pmf(a), photon_pmf(d), spec.label(), a, d,
                      {"cutoff": a.cutoff, "overlap": overlap,
                       "mean_a": a.mean_photon(), "mean_b": d.mean_photon()})


def pair_from_specs(spec_a: StateFamilySpec, spec_b: StateFamilySpec,
                    cutoff: Optional[int] = None) -> FamilyPair:
    """Pair two single-state families (e.g. fock vs coherent)."""
    sa = family_state(spec_a, cutoff)
    sb = family_state(spec_b, cutoff)
    pa, pb = photon_pmf(sa), photon_pmf(sb)
    common = max(pa.cutoff, pb.cutoff)
    return FamilyPair(pa.padded(common), pb.padded(common),
                      f"{spec_a.label()}|{spec_b.label()}", sa, sb,
                      {"overlap": abs(sa.inner(sb)),
                       "mean_a": pa.mean(), "mean_b": pb.mean()})
