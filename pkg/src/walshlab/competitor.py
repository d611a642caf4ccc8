"""Bounded competitors and sign certificates via linear programming.

A bounded competitor is ``h != 0`` with zero degree-<=d spectrum and
``f + h`` in ``[-1, 1]``.  Writing ``h = -f u`` turns the box into
``0 <= u <= 2`` and the objective ``sum_x -f(x) h(x)`` into ``sum u``, so

    maximize  sum_x u(x)   s.t.  sum_x f(x) w_J(x) u(x) = 0  (|J| <= d),  0 <= u <= 2

has optimum 0 iff ``f`` is the only bounded function with its degree-<=d data.
By Farkas' lemma that happens iff some ``c`` in span{w_J : |J| <= d} satisfies
``f(x) sum_J c_J w_J(x) >= 1`` everywhere (a sign certificate).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .collision import constraint_rows
from .core import BooleanFunction, _check_degree, low_masks, spectrum, truncate
from .simplex import certify_basis, simplex_max

LP_MAX_P = 8
EXACT_MAX_P = 7


class LPVerificationError(RuntimeError):
    """A floating-point LP solution could not be confirmed in exact arithmetic."""


@dataclass(frozen=True)
class CompetitorWitness:
    p: int
    d: int
    h: tuple[Fraction, ...]
    objective: Fraction

    def serialize(self) -> str:
        return "".join(f"{v.numerator}/{v.denominator}\n" for v in self.h)


@dataclass(frozen=True)
class CompetitorResult:
    p: int
    d: int
    optimum: Fraction
    witness: CompetitorWitness | None
    exact_arithmetic: bool

    @property
    def unique(self) -> bool:
        return self.optimum == 0


@dataclass(frozen=True)
class SignCertificate:
    p: int
    d: int
    masks: tuple[int, ...]
    coeffs: tuple[Fraction, ...]
    margin: Fraction


def _check_size(f: BooleanFunction):
    if f.p > LP_MAX_P:
        raise ValueError(f"LP modules are limited to p <= {LP_MAX_P}, got p={f.p}")


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator)) if hasattr(v, "numerator") else Fraction(v)


def _exact_matvec(rows: np.ndarray, vec) -> list[Fraction]:
    # rows: integer matrix; vec: Fractions -> exact products
    den = 1
    for v in vec:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = np.array([int(v * den) for v in vec], dtype=object)
    prod = rows.astype(object) @ ints
    return [Fraction(int(x), den) for x in prod]


def competitor_objective(f: BooleanFunction, h) -> Fraction:
    return sum((-int(s) * v for s, v in zip(f.signs(), h)), Fraction(0))


def verify_competitor(f: BooleanFunction, d: int, h) -> bool:
    """Exact check: zero degree-<=d spectrum and ``f + h`` inside ``[-1, 1]``."""
    h = [Fraction(v) for v in h]
    if len(h) != f.n:
        return False
    for s, v in zip(f.signs(), h):
        if not -1 <= int(s) + v <= 1:
            return False
    a = constraint_rows(f, d)  # A[x, J] = f(x) w_J(x); h = -f u so A^T u = -(w^T h)
    w = a * f.signs()[:, None]
    return not any(_exact_matvec(w.T, h))


def _solve(c, A, b, ub, exact):
    """Exact optimum as ``(status, x)`` with Fractions; float runs are certified."""
    res = simplex_max(c, A, b, ub, exact=exact)
    if res.status != "optimal":
        return res.status, None
    if exact:
        return "optimal", [_frac(v) for v in res.x]
    cert = certify_basis(c, A, b, ub, res.basis, res.at_upper)
    if cert is None:
        raise LPVerificationError("floating simplex basis failed exact optimality verification")
    return "optimal", cert.x


def max_competitor(f: BooleanFunction, d: int, *, exact: bool | None = None) -> CompetitorResult:
    """Maximize ``sum -f h`` over bounded competitors ``h``.

    Rational pivots for ``p <= 7``.  At ``p = 8`` the simplex runs in doubles
    and its final basis is re-solved in exact rational arithmetic; the answer
    is accepted only if that basis is exactly primal and dual feasible.
    """
    _check_degree(f.p, d)
    _check_size(f)
    if exact is None:
        exact = f.p <= EXACT_MAX_P
    if d == f.p:
        # the full spectrum has trivial kernel
        return CompetitorResult(f.p, d, Fraction(0), None, True)
    at = np.ascontiguousarray(constraint_rows(f, d).T)
    n = f.n
    status, u = _solve([1] * n, at, [0] * at.shape[0], [2] * n, exact)
    if status != "optimal":
        raise LPVerificationError(f"competitor LP ended with status {status}")
    value = sum(u, Fraction(0))
    witness = None
    if value > 0:
        h = tuple(-int(s) * v for s, v in zip(f.signs(), u))
        if not verify_competitor(f, d, h):
            raise LPVerificationError("competitor witness failed exact verification")
        witness = CompetitorWitness(f.p, d, h, value)
    return CompetitorResult(f.p, d, value, witness, exact)


def _certificate_from(f, d, masks, coeffs) -> SignCertificate | None:
    a = constraint_rows(f, d)
    margins = _exact_matvec(a, coeffs)
    mu = min(margins)
    if mu <= 0:
        return None
    scaled = tuple(c / mu for c in coeffs)
    return SignCertificate(f.p, d, tuple(int(m) for m in masks), scaled, Fraction(1))


def sign_certificate(f: BooleanFunction, d: int, *, exact: bool | None = None) -> SignCertificate | None:
    """Find ``c`` over the degree-<=d masks with ``f(x) sum_J c_J w_J(x) >= 1`` for all x.

    The truncation ``q_d`` itself is tried first; it works whenever
    :func:`certify_unique` holds.  Otherwise a feasibility LP decides.  The
    returned coefficients are rescaled so the margin is exactly 1.
    """
    _check_degree(f.p, d)
    _check_size(f)
    if exact is None:
        exact = f.p <= EXACT_MAX_P
    masks = low_masks(f.p, d)
    tr = truncate(f, d)
    if int(np.abs(tr.residual_numerators).max()) < f.n:
        s = spectrum(f).coeffs[masks]
        cert = _certificate_from(f, d, masks, [Fraction(int(v)) for v in s])
        if cert is not None:
            return cert
    a = constraint_rows(f, d)  # N x K
    n, k = a.shape
    # variables: c+ (k), c- (k), surplus (n); rows: A c+ - A c- - s = 1
    big = np.hstack([a, -a, -np.eye(n, dtype=np.int64)])
    status, x = _solve([0] * (2 * k + n), big, [1] * n, None, exact)
    if status == "infeasible":
        if not exact and max_competitor(f, d).optimum == 0:
            raise LPVerificationError("floating sign-certificate LP reported infeasible but no competitor exists")
        return None
    if status != "optimal":
        raise LPVerificationError(f"sign-certificate LP ended with status {status}")
    cert = _certificate_from(f, d, masks, [x[i] - x[k + i] for i in range(k)])
    if cert is None:
        raise LPVerificationError("sign-certificate LP solution has nonpositive margin")
    return cert
