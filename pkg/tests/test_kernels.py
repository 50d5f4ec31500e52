"""Backend equivalence and correctness of the three hot kernels.

Oracles: a scaling-and-squaring matrix exponential for small displacements,
a 50-digit generalized-Laguerre closed form for large ones, and direct
dense formulas for the scatter/density kernels.
"""

import math

import numpy as np
import pytest

from catscale._kernels import _pykernels as pk
from catscale.oracle import dense_displacement

cy = pytest.importorskip("catscale._kernels._cykernels",
                         reason="compiled backend not built")

BACKENDS = [pk, cy]


def gaussian_profile(sigma, k):
    R = int(math.ceil(12.0 * sigma * k))
    t = (np.arange(2 * R + 1) - R) / float(k)
    prof = np.exp(-t * t / (2 * sigma * sigma)) / (math.sqrt(2 * math.pi) * sigma)
    return R, prof


def reference_scatter(masses, base0, k, prof, R, npts):
    out = np.zeros(npts)
    for i, m in enumerate(masses):
        if m == 0.0:
            continue
        c = base0 + i * k
        lo = max(c - R, 0)
        hi = min(c + R, npts - 1)
        out[lo:hi + 1] += m * prof[lo - (c - R):hi - (c - R) + 1]
    return out


class TestScatterProfile:
    def test_matches_dense_reference(self):
        rng = np.random.default_rng(0)
        masses = rng.random(40)
        masses /= masses.sum()
        sigma, k, pad = 1.7, 16, 14
        R, prof = gaussian_profile(sigma, k)
        npts = (39 + 2 * pad) * k + 1
        base0 = pad * k
        ref = reference_scatter(masses, base0, k, prof, R, npts)
        for mod in BACKENDS:
            out = np.zeros(npts)
            mod.scatter_profile(masses, base0, k, prof, R, 0, npts, out)
            np.testing.assert_allclose(out, ref, rtol=1e-13, atol=1e-300)

    def test_blocked_equals_whole(self):
        rng = np.random.default_rng(1)
        masses = rng.random(25)
        sigma, k, pad = 0.8, 32, 7
        R, prof = gaussian_profile(sigma, k)
        npts = (24 + 2 * pad) * k + 1
        base0 = pad * k
        for mod in BACKENDS:
            whole = np.zeros(npts)
            mod.scatter_profile(masses, base0, k, prof, R, 0, npts, whole)
            pieces = np.zeros(npts)
            step = 257
            for j0 in range(0, npts, step):
                L = min(step, npts - j0)
                buf = np.zeros(L)
                mod.scatter_profile(masses, base0, k, prof, R, j0, L, buf)
                pieces[j0:j0 + L] = buf
            np.testing.assert_array_equal(whole, pieces)

    def test_backend_parity(self):
        rng = np.random.default_rng(2)
        masses = rng.random(120)
        masses[rng.random(120) < 0.3] = 0.0
        sigma, k, pad = 3.0, 8, 24
        R, prof = gaussian_profile(sigma, k)
        npts = (119 + 2 * pad) * k + 1
        out_py = np.zeros(npts)
        out_cy = np.zeros(npts)
        pk.scatter_profile(masses, pad * k, k, prof, R, 0, npts, out_py)
        cy.scatter_profile(masses, pad * k, k, prof, R, 0, npts, out_cy)
        np.testing.assert_allclose(out_cy, out_py, rtol=1e-12, atol=1e-300)

    def test_accepts_readonly_input(self):
        masses = np.array([0.25, 0.75])
        masses.setflags(write=False)
        R, prof = gaussian_profile(0.5, 8)
        prof.setflags(write=False)
        npts = (1 + 8) * 8 + 1
        for mod in BACKENDS:
            out = np.zeros(npts)
            mod.scatter_profile(masses, 32, 8, prof, R, 0, npts, out)
            assert out.sum() > 0


class TestDensityAtPoints:
    def direct(self, masses, n_lo, sigma, xs):
        centers = n_lo + np.arange(len(masses))
        z = (xs[:, None] - centers[None, :]) / sigma
        g = np.where(np.abs(z) <= 12.0, np.exp(-0.5 * z * z), 0.0)
        return (g * masses[None, :]).sum(axis=1) / (math.sqrt(2 * math.pi) * sigma)

    @pytest.mark.parametrize("sigma", [0.02, 0.3, 2.5])
    def test_matches_direct_formula(self, sigma):
        rng = np.random.default_rng(3)
        masses = rng.random(30)
        masses /= masses.sum()
        xs = rng.uniform(-3.0, 33.0, size=400)
        ref = self.direct(masses, 5, sigma, xs)
        for mod in BACKENDS:
            got = mod.density_at_points(masses, 5, sigma, xs)
            np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-280)

    def test_unsorted_points_and_parity(self):
        rng = np.random.default_rng(4)
        masses = rng.random(60)
        masses /= masses.sum()
        xs = rng.uniform(-5.0, 70.0, size=1000)  # deliberately unsorted
        got_py = pk.density_at_points(masses, 0, 0.7, xs)
        got_cy = cy.density_at_points(masses, 0, 0.7, xs)
        np.testing.assert_allclose(got_cy, got_py, rtol=1e-12, atol=1e-280)
        order = np.argsort(xs)
        np.testing.assert_allclose(
            pk.density_at_points(masses, 0, 0.7, xs[order]), got_py[order],
            rtol=1e-13, atol=1e-300)

    def test_normalization_by_riemann_sum(self):
        rng = np.random.default_rng(5)
        masses = rng.random(10)
        masses /= masses.sum()
        h = 0.02
        xs = np.arange(-8.0, 17.0, h)
        for mod in BACKENDS:
            vals = mod.density_at_points(masses, 0, 1.1, xs)
            assert abs(vals.sum() * h - 1.0) < 1e-8


class TestDisplacementBlock:
    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0, 0.8 + 0.6j, -1.2 + 0.4j])
    def test_small_alpha_vs_matrix_exponential(self, alpha):
        cutoff = 40
        ref = dense_displacement(alpha, cutoff)
        for mod in BACKENDS:
            got = mod.displacement_block(alpha, cutoff, 0, cutoff)
            # top rows/columns suffer oracle truncation; compare the bulk
            np.testing.assert_allclose(got[:25, :25], ref[:25, :25],
                                       rtol=0, atol=5e-12)

    def test_alpha_zero_is_identity(self):
        for mod in BACKENDS:
            got = mod.displacement_block(0.0, 12, 0, 12)
            np.testing.assert_array_equal(got, np.eye(13, dtype=complex))

    def test_large_alpha_spot_values(self):
        # frozen from a 50-digit generalized-Laguerre evaluation
        spots = {
            (0, 0): 1.3838965267367375e-87,
            (400, 0): 0.14121954115855585,
            (399, 1): -0.0070609770579277925,
            (500, 40): 0.027404853927900898,
            (40, 500): 0.027404853927900898,
            (880, 600): -0.025532133289989112,
        }
        for mod in BACKENDS:
            got = mod.displacement_block(20.0, 900, 0, 900)
            for (m, n), val in spots.items():
                assert got[m, n].imag == 0.0
                assert abs(got[m, n].real - val) <= 2e-12 * abs(val)

    def test_complex_alpha_phases(self):
        # frozen from the same 50-digit closed form at alpha = 1.3 - 0.7j
        spots = {
            (5, 3): -0.14846953198618211 + 0.22517879017904282j,
            (3, 5): -0.14846953198618211 - 0.22517879017904282j,
            (30, 0): -1.5513876382174265e-12 - 1.9142548295299536e-12j,
        }
        for mod in BACKENDS:
            got = mod.displacement_block(1.3 - 0.7j, 40, 0, 40)
            for (m, n), val in spots.items():
                assert abs(got[m, n] - val) <= 1e-13 + 1e-12 * abs(val)

    def test_unitarity_on_safe_columns(self):
        # columns whose displaced distribution stays inside the row range
        alpha, cutoff = 3.0, 400
        for mod in BACKENDS:
            got = mod.displacement_block(alpha, cutoff, 0, 200)
            norms = np.sum(np.abs(got) ** 2, axis=0)
            np.testing.assert_allclose(norms, 1.0, atol=1e-10)

    def test_column_restriction_matches_full(self):
        alpha = 1.5 + 0.5j
        for mod in BACKENDS:
            full = mod.displacement_block(alpha, 80, 0, 80)
            part = mod.displacement_block(alpha, 80, 10, 20)
            np.testing.assert_allclose(part, full[:, 10:21], rtol=0, atol=1e-14)

    def test_backend_parity_moderate_alpha(self):
        got_py = pk.displacement_block(6.324555320336759, 600, 0, 600)
        got_cy = cy.displacement_block(6.324555320336759, 600, 0, 600)
        scale = np.abs(got_py).max()
        assert np.max(np.abs(got_py - got_cy)) <= 1e-12 * scale

    def test_deep_tail_stability(self):
        # the recurrence seed e^{-|alpha|^2/2} underflows to ~1e-782 here;
        # the carried exponent must keep every element finite and exact.
        # Frozen from an 80-digit Laguerre-recurrence evaluation:
        spots = {
            (7200, 3600): 0.0074402367428418716,
            (7100, 3600): -0.0089630542340440614,
            (6950, 3600): -0.0093940738415056511,
            (3650, 3600): 0.005219182877853424,
        }
        for mod in BACKENDS:
            got = mod.displacement_block(60.0, 7300, 3600, 3600)
            assert got.shape == (7301, 1)
            assert np.all(np.isfinite(got.view(np.float64)))
            for (m, n), val in spots.items():
                assert abs(got[m, 0].real - val) <= 5e-12 * abs(val)
                assert got[m, 0].imag == 0.0
