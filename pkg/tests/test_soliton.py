"""Admissible torus and the concave maximization of the functional."""

from fractions import Fraction as F

import mpmath
import pytest

from modfutaki import (CompleteIntersectionSpec, NoConvergence, check_critical,
                       derive_weights, admissible_torus, find_soliton)
from modfutaki.geometry import ValidationError

from conftest import CUBIC, FERMAT_CUBIC, QUADRICS


def colinear(u, v):
    ratios = {F(a) / F(b) for a, b in zip(u, v) if b != 0}
    return len(ratios) == 1 and all(b != 0 or a == 0 for a, b in zip(u, v))


def bisect_cubic_critical(precision=300):
    """Independent root of F' for the cubic-surface closed form."""
    with mpmath.workprec(precision):
        def fprime(t):
            return (mpmath.exp(-4 * t) * (4 * t + 2) / (48 * t ** 3)
                    + mpmath.exp(8 * t) * (2 - 8 * t) / (24 * t ** 3)
                    + mpmath.exp(4 * t) * (4 * t - 2) / (16 * t ** 3))

        lo, hi = mpmath.mpf(-2), mpmath.mpf("-0.01")
        assert fprime(lo) > 0 and fprime(hi) < 0
        for _ in range(precision):
            mid = (lo + hi) / 2
            if fprime(mid) > 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


class TestAdmissibleTorus:
    def test_cubic_line(self):
        torus = admissible_torus(CUBIC)
        assert torus.dimension == 1
        assert colinear(torus.basis[0], (F(-7), F(5), F(1), F(1)))

    def test_fermat_trivial(self):
        assert admissible_torus(FERMAT_CUBIC).dimension == 0

    def test_quadrics_plane_contains_golden_field(self):
        torus = admissible_torus(QUADRICS)
        assert torus.dimension == 2
        target = (F(-7), F(3), F(-2), F(5), F(1))
        # solve for coordinates in the basis by matching two free slots
        b1, b2 = torus.basis
        solved = False
        for i in range(5):
            for j in range(i + 1, 5):
                det = b1[i] * b2[j] - b1[j] * b2[i]
                if det == 0:
                    continue
                c1 = (target[i] * b2[j] - target[j] * b2[i]) / det
                c2 = (b1[i] * target[j] - b1[j] * target[i]) / det
                combo = tuple(c1 * x + c2 * y for x, y in zip(b1, b2))
                assert combo == target
                solved = True
                break
            if solved:
                break
        assert solved

    def test_basis_vectors_are_admissible(self):
        for ci in (CUBIC, QUADRICS):
            for vec in admissible_torus(ci).basis:
                assert sum(vec, F(0)) == 0
                derive_weights(ci, vec)  # must not raise

    def test_requires_supports(self):
        with pytest.raises(ValidationError):
            admissible_torus(CompleteIntersectionSpec.create(3, [3]))


class TestFindSoliton:
    def test_fermat_returns_trivial(self):
        result = find_soliton(FERMAT_CUBIC)
        assert result.trivial
        assert result.f_value == -1

    def test_cubic_critical_point(self):
        result = find_soliton(CUBIC, tol=1e-10, max_iter=60, precision_bits=256)
        assert not result.trivial
        assert result.gradient_norm < mpmath.mpf("1e-10")
        tstar = result.coefficients[0]
        assert tstar < 0
        reference = bisect_cubic_critical()
        assert abs(tstar - reference) < mpmath.mpf("1e-9")

    def test_invariant_under_basis_rescaling(self, monkeypatch):
        # the located eigenvalue vector does not depend on basis normalization
        import modfutaki.soliton as soliton_mod
        from modfutaki import AdmissibleTorus

        reference = find_soliton(CUBIC, tol=1e-12, precision_bits=256)
        original = admissible_torus(CUBIC)
        scaled = AdmissibleTorus(tuple(
            tuple(F(-5, 3) * x for x in vec) for vec in original.basis))
        monkeypatch.setattr(soliton_mod, "admissible_torus", lambda ci: scaled)
        rescaled = soliton_mod.find_soliton(CUBIC, tol=1e-12,
                                            precision_bits=256)
        with mpmath.workprec(320):
            for a, b in zip(reference.eigenvalues, rescaled.eigenvalues):
                assert abs(a - b) < mpmath.mpf("1e-11")

    def test_no_convergence_signalled(self):
        with pytest.raises(NoConvergence):
            find_soliton(CUBIC, tol=1e-10, max_iter=0)

    def test_quadrics_interior_maximum(self):
        result = find_soliton(QUADRICS, tol=1e-9, max_iter=80,
                              precision_bits=192)
        assert not result.trivial
        assert result.gradient_norm < mpmath.mpf("1e-9")
        assert result.f_value > -1  # strictly above the center value
        report = check_critical(QUADRICS, result.eigenvalues, tol=1e-8,
                                precision_bits=192)
        assert report.ok

    def test_quadrics_family_direction_bisection(self):
        # restricted to the line through diag(-7,3,-2,5,1), the functional has
        # the closed form -e^(-5t)/48t^2 - e^(7t)/24t^2 + e^(3t)/16t^2; its
        # derivative root must be a critical point of the line restriction
        from modfutaki import Dual, f_numeric
        from modfutaki.exactalg import _to_mpf

        with mpmath.workprec(300):
            def fprime(t):
                return (mpmath.exp(-5 * t) * (5 * t + 2) / (48 * t ** 3)
                        + mpmath.exp(7 * t) * (2 - 7 * t) / (24 * t ** 3)
                        + mpmath.exp(3 * t) * (3 * t - 2) / (16 * t ** 3))

            lo, hi = mpmath.mpf(-2), mpmath.mpf("-0.01")
            assert fprime(lo) > 0 and fprime(hi) < 0
            for _ in range(260):
                mid = (lo + hi) / 2
                if fprime(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            tstar = (lo + hi) / 2

            direction = (F(-7), F(3), F(-2), F(5), F(1))
            weights = (F(-4), F(6))
            lam = [Dual(tstar * _to_mpf(r), _to_mpf(r)) for r in direction]
            wts = [Dual(tstar * _to_mpf(a), _to_mpf(a)) for a in weights]
            slope = f_numeric(QUADRICS, lam, wts, 256).derivative
            assert abs(slope) < mpmath.mpf("1e-60")


class TestCheckCritical:
    def test_trivial_torus_passes_vacuously(self):
        report = check_critical(FERMAT_CUBIC, [0, 0, 0, 0])
        assert report.ok and report.values == ()

    def test_passes_at_solver_output(self):
        result = find_soliton(CUBIC, tol=1e-11, precision_bits=256)
        report = check_critical(CUBIC, result.eigenvalues, tol=1e-9,
                                precision_bits=256)
        assert report.ok

    def test_fails_off_the_maximizer(self):
        result = find_soliton(CUBIC, tol=1e-11, precision_bits=256)
        basis = admissible_torus(CUBIC).basis[0]
        perturbed = [x + mpmath.mpf("0.1") * float(b)
                     for x, b in zip(result.eigenvalues, basis)]
        report = check_critical(CUBIC, perturbed, tol=1e-3,
                                precision_bits=192)
        assert not report.ok
        assert max(abs(v) for v in report.values) > mpmath.mpf("1e-2")
