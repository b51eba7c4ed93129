"""Finite-level oracle: section counts and character traces on the quantization.

Sections of the k-th anticanonical power restrict from projective space
through the alternating (Koszul) resolution of the intersection, so both the
dimension N_k and the trace of e^(V/k) reduce to sums over subsets of the
defining polynomials. Each summand is a complete homogeneous symmetric
polynomial in e^(r_i t/k) times a constant weight shift e^((k sum a + sum_S
a_p) t/k). The normalized trace F_k/(k N_k) converges to the exact functional
as k grows, which makes this an independent check of the localization value.

Sign bookkeeping of the shifts at finite k is pinned by two identities:
F_k(0) = -k N_k at every level, and convergence of F_k/(k N_k) to F(V) on the
worked golden examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import mpmath

from .exactalg import DEFAULT_PRECISION_BITS, _to_mpf
from .futaki import f_function
from .geometry import validate

_TRACE_GUARD_BITS = 64
_MAX_TRACE_RETRIES = 3


def _binom_dim(n, ambient_dim):
    """Monomial count C(n, N) with the convention 0 whenever n < N."""
    if n < ambient_dim:
        return 0
    return comb(n, ambient_dim)


def nk(ci, k):
    """dim H^0 of the k-th anticanonical power, by the alternating sum.

    N_k = sum over subsets S of {1..s} of (-1)^|S| C(N + k m - sum_S d_p, N).
    """
    ci.check()
    if k < 1:
        raise ValueError(f"the level k must be positive, got {k}")
    n, m = ci.ambient_dim, ci.fano_index
    total = 0
    for size in range(ci.codim + 1):
        for subset in combinations(range(ci.codim), size):
            deg = n + k * m - sum(ci.degrees[p] for p in subset)
            total += (-1) ** size * _binom_dim(deg, n)
    return total


def complete_homogeneous_all(values, max_degree):
    """h_0..h_max of the given values via the Newton power-sum recurrence.

    Generic in the coefficient ring (exact rationals, floats, or any ring
    with +, *, and division by integers): h_d = (1/d) sum_j p_j h_(d-j).
    """
    n = len(values)
    powers = list(values)
    psums = []
    for j in range(max_degree):
        psums.append(sum(powers[i] for i in range(n)))
        if j + 1 < max_degree:
            powers = [powers[i] * values[i] for i in range(n)]
    h = [None] * (max_degree + 1)
    h[0] = 1
    for d in range(1, max_degree + 1):
        acc = 0
        for j in range(1, d + 1):
            acc = acc + psums[j - 1] * h[d - j]
        h[d] = acc / d if not isinstance(acc, int) else Fraction(acc, d)
    return h


def character_trace(eigenvalues, degree, u, precision_bits=DEFAULT_PRECISION_BITS):
    """Trace of the torus element on degree-d monomials: h_d(e^(r_0 u)..e^(r_N u)).

    Zero for negative degree, one for degree zero; always positive for real
    inputs since every monomial contributes a positive exponential.
    """
    if degree < 0:
        return mpmath.mpf(0)
    if degree == 0:
        return mpmath.mpf(1)
    with mpmath.workprec(precision_bits + _TRACE_GUARD_BITS):
        uu = _to_mpf(u) if isinstance(u, Fraction) else mpmath.mpf(u)
        xs = [mpmath.exp(_to_mpf(Fraction(r)) * uu) for r in eigenvalues]
        value = complete_homogeneous_all(xs, degree)[degree]
    return value


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    nk: int
    ratio: object
    reference: object
    error: object


def fk(ci, field, k, t, precision_bits=DEFAULT_PRECISION_BITS):
    """Quantized functional F_k(V) at level k and parameter t.

    F_k = -k sum_S (-1)^|S| e^((k sum_j a_j + sum_S a_p) t/k)
                    h_(k m - sum_S d_p)(e^(r_i t/k)).

    When every exponent vanishes (t = 0 or the zero field) the sum is taken
    over exact integers, so F_k(0) + k N_k = 0 holds with zero error.
    """
    validate(ci, field)
    if k < 1:
        raise ValueError(f"the level k must be positive, got {k}")
    t = Fraction(t)
    n, s, m = ci.ambient_dim, ci.codim, ci.fano_index
    u = t / k
    weight_total = sum(field.weights, Fraction(0))
    exact = (t == 0) or field.is_zero()

    subsets = [subset for size in range(s + 1)
               for subset in combinations(range(s), size)]

    if exact:
        total = 0
        for subset in subsets:
            deg = k * m - sum(ci.degrees[p] for p in subset)
            total += (-1) ** len(subset) * _binom_dim(n + deg, n)
        with mpmath.workprec(max(precision_bits, abs(total).bit_length() + 16)):
            return mpmath.mpf(-k * total)

    guard = _TRACE_GUARD_BITS
    result = None
    for _ in range(_MAX_TRACE_RETRIES):
        with mpmath.workprec(precision_bits + guard):
            uu = _to_mpf(u)
            xs = [mpmath.exp(_to_mpf(r) * uu) for r in field.eigenvalues]
            h = complete_homogeneous_all(xs, k * m)
            pieces = []
            for subset in subsets:
                deg = k * m - sum(ci.degrees[p] for p in subset)
                if deg < 0:
                    continue
                shift = (k * weight_total
                         + sum((field.weights[p] for p in subset), Fraction(0))) * u
                pieces.append((-1) ** len(subset)
                              * mpmath.exp(_to_mpf(shift)) * h[deg])
            total = mpmath.fsum(pieces)
            result = -k * total
            top = max((abs(p) for p in pieces), default=mpmath.mpf(0))
            if total != 0 and top > 0:
                cancel = max(0, int(mpmath.log(top / abs(total), 2)) + 1)
            else:
                cancel = 0
        if cancel + 16 <= guard:
            return result
        guard = cancel + _TRACE_GUARD_BITS
    return result


def convergence_report(ci, field, t, k_list, precision_bits=DEFAULT_PRECISION_BITS):
    """Tabulate F_k/(k N_k) against the localization value of F at t."""
    validate(ci, field)
    t = Fraction(t)
    reference = f_function(ci, field).evaluate(t, precision_bits)
    rows = []
    for k in k_list:
        dim = nk(ci, k)
        with mpmath.workprec(precision_bits + _TRACE_GUARD_BITS):
            ratio = fk(ci, field, k, t, precision_bits) / (k * dim)
            error = abs(ratio - reference)
        rows.append(ConvergenceRow(k=k, nk=dim, ratio=ratio,
                                   reference=reference, error=error))
    return rows
