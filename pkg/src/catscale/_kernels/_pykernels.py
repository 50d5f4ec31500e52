"""Pure-NumPy kernels: reference semantics for the optional C backend.

Three hot operations live here:

* scatter_profile    -- accumulate a shared Gaussian profile at integer-spaced
                        centers onto a uniform grid (density synthesis),
* density_at_points  -- evaluate a Gaussian-smeared PMF at arbitrary points,
* displacement_block -- columns of the displacement operator <m|D(alpha)|n>
                        via a scaled three-term recurrence.

The C backend (_cykernels) implements the same call signatures with the same
arithmetic, so results agree to rounding.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

BACKEND_NAME = "python"

# Rescaling constants for the displacement recurrence (Miller-style carried
# exponent; matrix entries are bounded by 1, so the carried log-scale never
# exceeds ~log(RESCALE) above zero).
_RESCALE = 1e250
_INV_RESCALE = 1e-250
_LOG_RESCALE = float(np.log(_RESCALE))


def scatter_profile(masses, base0, k, prof, R, j0, L, out):
    """Add sum_i masses[i] * prof[j - (base_i - R)] into out for grid indices
    j in [j0, j0+L); center i sits at global index base_i = base0 + i*k.

    prof has length 2R+1 and holds the sampled Gaussian; all indices are in
    grid units (spacing 1/k).
    """
    masses = np.asarray(masses, dtype=np.float64)
    prof = np.asarray(prof, dtype=np.float64)
    jend = j0 + L
    for i in range(masses.shape[0]):
        m = masses[i]
        if m == 0.0:
            continue
        base = base0 + i * k
        lo = base - R
        hi = base + R + 1
        if lo < j0:
            lo = j0
        if hi > jend:
            hi = jend
        if lo >= hi:
            continue
        off = base - R
        out[lo - j0:hi - j0] += m * prof[lo - off:hi - off]
    return out


def density_at_points(masses, n_lo, sigma, xs):
    """Evaluate sum_n masses[n-n_lo] * N(x; n, sigma^2) at each point of xs.

    Contributions are cut at |x - n| > 12 sigma (relative error < 1e-31).
    """
    masses = np.asarray(masses, dtype=np.float64)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    out_sorted = np.zeros(xs.shape[0])
    order = np.argsort(xs, kind="stable")
    xs_sorted = xs[order]
    w = 12.0 * sigma
    inv2s2 = 1.0 / (2.0 * sigma * sigma)
    for i in range(masses.shape[0]):
        m = masses[i]
        if m == 0.0:
            continue
        c = float(n_lo + i)
        a = np.searchsorted(xs_sorted, c - w, side="left")
        b = np.searchsorted(xs_sorted, c + w, side="right")
        if a >= b:
            continue
        d = xs_sorted[a:b] - c
        out_sorted[a:b] += m * np.exp(-d * d * inv2s2)
    out = np.empty_like(out_sorted)
    out[order] = out_sorted
    out /= np.sqrt(2.0 * np.pi) * sigma
    return out


def displacement_block(alpha, cutoff, col_lo, col_hi):
    """Columns col_lo..col_hi of <m|D(alpha)|n> on the truncated Fock space.

    Entries with m >= n follow the diagonal recurrence

        f_k = (2k-1+d-x)/sqrt(k(k+d)) f_{k-1}
              - sqrt((k-1)(k+d-1)/(k(k+d))) f_{k-2},      x = |alpha|^2,

    where f_k = <k+d|D|k> up to the phase e^{i d arg(alpha)}; m < n entries
    come from <m|D(alpha)|n> = (-1)^{n-m} e^{-i(n-m)arg(alpha)} f_m^{(n-m)}.
    A carried exponent keeps the iteration in range for any alpha.
    """
    c = int(cutoff)
    if not (0 <= col_lo <= col_hi <= c):
        raise ValueError("column range must satisfy 0 <= col_lo <= col_hi <= cutoff")
    ncols = col_hi - col_lo + 1
    W = np.zeros((c + 1, ncols), dtype=np.complex128)
    alpha = complex(alpha)
    if alpha == 0:
        for n in range(col_lo, col_hi + 1):
            W[n, n - col_lo] = 1.0
        return W

    x = abs(alpha) ** 2
    la = np.log(abs(alpha))
    ph = float(np.angle(alpha))
    d = np.arange(c + 1, dtype=np.float64)
    phase_u = np.exp(1j * ph * d)
    phase_l = np.exp(-1j * ph * d)
    phase_l[1::2] *= -1.0

    S = -0.5 * x + d * la - 0.5 * gammaln(d + 1.0)
    ES = np.exp(S)
    fm1 = np.ones(c + 1)   # f_{k-1} mantissa, i.e. f_0 at the start
    fm2 = np.zeros(c + 1)  # f_{k-2} mantissa

    kmax = min(c, col_hi)
    for k in range(0, kmax + 1):
        if k > 0:
            kf = float(k)
            denom = np.sqrt(kf * (kf + d))
            c1 = (2.0 * kf - 1.0 + d - x) / denom
            c2 = np.sqrt((kf - 1.0) * (kf + d - 1.0)) / denom
            f = c1 * fm1 - c2 * fm2
            fm2 = fm1
            fm1 = f
            m = np.maximum(np.abs(fm1), np.abs(fm2))
            big = m > _RESCALE
            if big.any():
                fm1[big] *= _INV_RESCALE
                fm2[big] *= _INV_RESCALE
                S[big] += _LOG_RESCALE
                ES[big] = np.exp(S[big])
            small = (m < _INV_RESCALE) & (m > 0.0)
            if small.any():
                fm1[small] *= _RESCALE
                fm2[small] *= _RESCALE
                S[small] -= _LOG_RESCALE
                ES[small] = np.exp(S[small])
        vals = fm1 * ES
        if col_lo <= k <= col_hi:
            nr = c - k + 1
            W[k:, k - col_lo] = phase_u[:nr] * vals[:nr]
        dlo = max(1, col_lo - k)
        dhi = col_hi - k
        if dhi >= dlo:
            W[k, k + dlo - col_lo:k + dhi - col_lo + 1] = \
                phase_l[dlo:dhi + 1] * vals[dlo:dhi + 1]
    return W
