"""Uniqueness certificate and closed-form bounds for low-degree determinacy.

The certificate: if every residual of the degree-d truncation satisfies
``|r_d(x)| < 1`` then ``q_d`` has the sign of ``f`` everywhere and no bounded
``g != f`` shares the degree-<=d coefficients of ``f``.  In integer numerators
this is ``max_m |rho_m| < N``.

Probability bounds are kept in natural-log space throughout;
``(N+1)**K_d`` overflows a double for every interesting ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real

import numpy as np

from .core import BooleanFunction, _check_degree, _check_p, truncate


@dataclass(frozen=True)
class UniquenessCertificate:
    p: int
    d: int
    holds: bool
    max_residual_num: int
    argmax_point: int
    eta_hat: Fraction
    sign_agrees: bool

    @property
    def n(self) -> int:
        return 1 << self.p

    def verdict(self) -> str:
        head = "UNIQUE-CERTIFIED" if self.holds else "NOT UNIQUE-CERTIFIED"
        return f"{head}, max residual {self.max_residual_num}/{self.n}"


def certify_unique(f: BooleanFunction, d: int) -> UniquenessCertificate:
    """Run the sign-agreement test on the degree-d truncation of ``f``.

    ``holds`` is a sufficient condition for ``f`` being the only function
    ``g: {-1,1}^p -> [-1,1]`` with the same degree-<=d coefficients; it is not
    necessary.  A zero of the truncation gives ``|rho| = N`` and so fails the
    strict test automatically.
    """
    tr = truncate(f, d)
    rho = tr.residual_numerators
    absrho = np.abs(rho)
    m = int(np.argmax(absrho))
    mx = int(absrho[m])
    t = tr.trunc_numerators
    agrees = bool(np.all(np.sign(t) == f.signs()))
    return UniquenessCertificate(
        p=f.p,
        d=d,
        holds=mx < f.n,
        max_residual_num=mx,
        argmax_point=m,
        eta_hat=Fraction(mx, f.n),
        sign_agrees=agrees,
    )


def binomial_cumulative(p: int, d: int) -> tuple[int, int]:
    """``(K_d, M_d)``: number of masks of degree <= d and > d."""
    _check_p(p)
    _check_degree(p, d)
    k = sum(math.comb(p, j) for j in range(d + 1))
    return k, (1 << p) - k


def _positive(name, value):
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number")
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


def hoeffding_tail(p: int, t: float) -> float:
    """``exp(-2 t^2 / p)``, which bounds ``P(X <= p/2 - t)`` and ``P(X >= p/2 + t)`` for X ~ Bin(p, 1/2)."""
    _check_dimension(p)
    _positive("t", t)
    return math.exp(-2.0 * t * t / p)


def rademacher_tail(sq_norm: float, eta: float) -> float:
    """``2 exp(-eta^2 / (2 ||a||^2))`` bounding ``P(|sum a_i eps_i| > eta)``."""
    _positive("sq_norm", sq_norm)
    _positive("eta", eta)
    return 2.0 * math.exp(-eta * eta / (2.0 * sq_norm))


def _check_dimension(p):
    # formula-only operations accept any p >= 1; the truth-table cap does not apply
    if isinstance(p, bool) or not isinstance(p, Integral):
        raise TypeError(f"p must be an integer, got {p!r}")
    if p < 1:
        raise ValueError("p must be >= 1")


def _lower_threshold(p: int, omega: float) -> float:
    return p / 2 - math.sqrt(p / 2 * (math.log(p) + omega))


def _upper_threshold(p: int, eta: float) -> float:
    return p / 2 + math.sqrt(p / 2 * math.log(6 * p / (eta * eta)))


def thresholds(p: int, omega: float = 1.0, eta: float = 0.5) -> tuple[float, float]:
    """Degree thresholds ``(d_lower, d_upper)``.

    Below ``d_lower = p/2 - sqrt(p/2 (log p + omega))`` Boolean collisions are
    typical; above ``d_upper = p/2 + sqrt(p/2 log(6p / eta^2))`` uniqueness holds
    with probability at least ``1 - 2**-p``.
    """
    _check_dimension(p)
    if not omega >= 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    return _lower_threshold(p, omega), _upper_threshold(p, eta)


@dataclass(frozen=True)
class BoundsReport:
    p: int
    d: int
    eta: float
    omega: float
    K_d: int
    M_d: int
    residual_variance: float = field(init=False)
    log_nonuniqueness_bound: float = field(init=False)
    log_uniqueness_failure_bound: float = field(init=False)
    lower_threshold: float = field(init=False)
    upper_threshold: float = field(init=False)

    def __post_init__(self):
        n = 1 << self.p
        set_ = object.__setattr__
        set_(self, "residual_variance", self.M_d / n)
        set_(self, "log_nonuniqueness_bound", self.K_d * math.log(n + 1) - n * math.log(2))
        if self.M_d == 0:
            fail = -math.inf
        else:
            fail = math.log(2 * n) - self.eta * self.eta * n / (2 * self.M_d)
        set_(self, "log_uniqueness_failure_bound", fail)
        set_(self, "lower_threshold", _lower_threshold(self.p, self.omega))
        set_(self, "upper_threshold", _upper_threshold(self.p, self.eta))

    @property
    def nonuniqueness_vacuous(self) -> bool:
        return self.log_nonuniqueness_bound >= 0

    @property
    def uniqueness_failure_vacuous(self) -> bool:
        return self.log_uniqueness_failure_bound >= 0

    def items(self) -> list[tuple[str, object]]:
        return [
            ("p", self.p),
            ("d", self.d),
            ("eta", self.eta),
            ("omega", self.omega),
            ("K_d", self.K_d),
            ("M_d", self.M_d),
            ("Md_over_N", self.residual_variance),
            ("log_nonuniq_bound", self.log_nonuniqueness_bound),
            ("nonuniq_vacuous", self.nonuniqueness_vacuous),
            ("log_uniq_fail_bound", self.log_uniqueness_failure_bound),
            ("uniq_fail_vacuous", self.uniqueness_failure_vacuous),
            ("d_lower", self.lower_threshold),
            ("d_upper", self.upper_threshold),
        ]


def probability_bounds(p: int, d: int, eta: float = 1.0, omega: float = 1.0) -> BoundsReport:
    """Both finite-p bounds at ``(p, d)`` in log space.

    ``log_nonuniqueness_bound`` is ``log((N+1)**K_d / 2**N)``, an upper bound on
    the probability that a uniform random ``f`` is determined among Boolean
    functions by its degree-<=d data.  ``log_uniqueness_failure_bound`` is
    ``log(2N exp(-eta^2 N / (2 M_d)))``, bounding ``P(||r_d||_inf > eta)``; it is
    ``-inf`` when ``d = p``.  ``eta`` may equal 1 here, the certificate's own
    threshold; the thresholds use the same ``eta``.
    """
    k, m = binomial_cumulative(p, d)
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if not omega >= 0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    return BoundsReport(p=p, d=d, eta=float(eta), omega=float(omega), K_d=k, M_d=m)
