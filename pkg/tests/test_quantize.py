"""Finite-level trace oracle: section counts, character traces, convergence."""

import random
from fractions import Fraction as F
from itertools import product
from math import comb

import mpmath

from modfutaki import (CompleteIntersectionSpec, DiagonalField,
                       character_trace, convergence_report, f_function, fk,
                       nk)
from modfutaki.quantize import complete_homogeneous_all

from conftest import CUBIC, CUBIC_FIELD, QUADRICS, QUADRICS_FIELD


def brute_force_h(values, degree):
    """Sum over all monomials of the given total degree (test oracle)."""
    n = len(values)
    total = 0
    for exps in product(range(degree + 1), repeat=n):
        if sum(exps) != degree:
            continue
        term = 1
        for x, e in zip(values, exps):
            term *= x ** e
        total += term
    return total


class TestSectionCounts:
    def test_projective_plane(self):
        assert nk(CompleteIntersectionSpec.create(2, []), 1) == 10

    def test_cubic_level_one(self):
        assert nk(CUBIC, 1) == 4

    def test_hypersurface_direct_formula(self):
        for d in (2, 3):
            ci = CompleteIntersectionSpec.create(4, [d])
            n, m = 4, ci.fano_index
            for k in range(1, 11):
                direct = comb(n + k * m, n) - comb(n + k * m - d, n)
                assert nk(ci, k) == direct
                assert nk(ci, k) >= 0

    def test_leading_coefficient(self):
        # N_k (N-s)!/k^(N-s) approaches the anticanonical degree
        from math import factorial

        from modfutaki import anticanonical_degree
        for ci in (CUBIC, QUADRICS):
            n, s = ci.ambient_dim, ci.codim
            target = anticanonical_degree(ci)
            k = 200
            got = F(nk(ci, k) * factorial(n - s), k ** (n - s))
            assert abs(got - target) < F(1, 10) * target


class TestCharacterTrace:
    def test_degree_zero(self):
        assert character_trace([F(1), F(-1)], 0, F(1, 2), 128) == 1

    def test_negative_degree(self):
        assert character_trace([F(1), F(-1)], -3, F(1, 2), 128) == 0

    def test_zero_field_counts_monomials(self):
        for n, d in ((2, 4), (3, 5)):
            lam = [F(0)] * (n + 1)
            got = character_trace(lam, d, F(1, 3), 192)
            assert abs(got - comb(n + d, n)) < mpmath.mpf(2) ** -180

    def test_explicit_two_variable_case(self):
        # x = (2, 1/2): h_2 = 4 + 1 + 1/4
        with mpmath.workprec(200):
            u = mpmath.log(2)
            got = character_trace([F(1), F(-1)], 2, u, 160)
            assert abs(got - F(21, 4)) < mpmath.mpf(2) ** -140

    def test_newton_recurrence_vs_enumeration_exact(self):
        rng = random.Random(13)
        for _ in range(6):
            n = rng.randint(1, 3)
            d = rng.randint(1, 8)
            values = [F(rng.randint(-5, 5), rng.randint(1, 4))
                      for _ in range(n + 1)]
            assert complete_homogeneous_all(values, d)[d] == \
                brute_force_h(values, d)

    def test_newton_recurrence_as_polynomial_identity(self):
        # run the recurrence over formal indeterminates and compare exactly
        # against the sum of all degree-d monomials
        class Poly:
            def __init__(self, terms):
                self.terms = {k: v for k, v in terms.items() if v}

            def __add__(self, other):
                if isinstance(other, int):
                    other = Poly({(0,) * nvars: F(other)}) if other else Poly({})
                out = dict(self.terms)
                for k, v in other.terms.items():
                    out[k] = out.get(k, F(0)) + v
                return Poly(out)

            __radd__ = __add__

            def __mul__(self, other):
                if isinstance(other, (int, F)):
                    return Poly({k: v * other for k, v in self.terms.items()})
                out = {}
                for k1, v1 in self.terms.items():
                    for k2, v2 in other.terms.items():
                        k = tuple(a + b for a, b in zip(k1, k2))
                        out[k] = out.get(k, F(0)) + v1 * v2
                return Poly(out)

            def __truediv__(self, c):
                return Poly({k: v / c for k, v in self.terms.items()})

            def __eq__(self, other):
                return self.terms == other.terms

        for nvars, degree in ((2, 5), (3, 4), (4, 3)):
            xs = []
            for i in range(nvars):
                exp = [0] * nvars
                exp[i] = 1
                xs.append(Poly({tuple(exp): F(1)}))
            got = complete_homogeneous_all(xs, degree)[degree]
            expected = Poly({exps: F(1)
                             for exps in product(range(degree + 1), repeat=nvars)
                             if sum(exps) == degree})
            assert got == expected

    def test_positive_for_real_input(self):
        rng = random.Random(14)
        for _ in range(5):
            lam = [F(rng.randint(-4, 4)) for _ in range(4)]
            v = character_trace(lam, rng.randint(1, 6), F(1, 5), 128)
            assert v > 0


class TestQuantizedFunctional:
    def test_zero_field_exact_identity(self):
        for ci in (CUBIC, QUADRICS, CompleteIntersectionSpec.create(2, [])):
            zero = DiagonalField.zero(ci)
            for k in range(1, 65):
                assert fk(ci, zero, k, F(0)) == -k * nk(ci, k)

    def test_t_zero_exact_identity_with_nonzero_field(self):
        for k in (1, 7, 32):
            assert fk(CUBIC, CUBIC_FIELD, k, F(0)) == -k * nk(CUBIC, k)

    def test_projective_space_enumeration(self):
        # s = 0, level one: the trace is a plain monomial sum
        ci = CompleteIntersectionSpec.create(2, [])
        lam = (F(2), F(-1), F(-1))
        field = DiagonalField.create(lam, [])
        t = F(1, 3)
        got = fk(ci, field, 1, t, 256)
        with mpmath.workprec(300):
            total = mpmath.mpf(0)
            for exps in product(range(4), repeat=3):
                if sum(exps) != 3:
                    continue
                w = sum(e * x for e, x in zip(exps, lam)) * t
                total += mpmath.exp(mpmath.mpf(w.numerator) / w.denominator)
            assert abs(got + total) < mpmath.mpf(2) ** -220 * (1 + abs(total))

    def test_convergence_to_localization(self):
        for ci, field in ((CUBIC, CUBIC_FIELD), (QUADRICS, QUADRICS_FIELD)):
            for t in (F(1, 10), F(1, 4)):
                rows = convergence_report(ci, field, t, (8, 16, 32, 64), 256)
                errors = [row.error for row in rows]
                assert all(b < a for a, b in zip(errors, errors[1:]))

    def test_zero_field_error_column(self):
        rows = convergence_report(CUBIC, DiagonalField.zero(CUBIC),
                                  F(1, 4), (2, 4, 8), 192)
        for row in rows:
            assert row.error < mpmath.mpf(2) ** -150

    def test_precision_discipline(self):
        t = F(1, 4)
        k = 64
        dim = nk(CUBIC, k)
        with mpmath.workprec(700):
            a = fk(CUBIC, CUBIC_FIELD, k, t, 256) / (k * dim)
            b = fk(CUBIC, CUBIC_FIELD, k, t, 512) / (k * dim)
            assert abs(a - b) < mpmath.mpf("1e-30")
