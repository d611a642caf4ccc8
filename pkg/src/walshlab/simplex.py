"""Dense-tableau primal simplex for ``max c.x  s.t.  A x = b,  0 <= x <= ub``.

Bounded-variable two-phase method with Bland's rule for both the entering
variable (smallest improving index) and the leaving row (smallest basic
index among ratio ties), which rules out cycling.

``exact=True`` pivots in rational arithmetic (gmpy2 ``mpq`` in object arrays)
with no tolerances.  It first runs the same method in doubles and installs the
final basis exactly ("crossover"); the exact phase then either confirms
optimality with exact reduced costs or keeps pivoting.  When the float pass
ends infeasible, exact phase one resumes from its final basis.  A float basis
that cannot be installed exactly is discarded and the exact method restarts
from the artificial basis, so the float pass only affects speed, never the
answer.
``exact=False`` stays in doubles and leaves verification to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint
import numpy as np
from gmpy2 import mpq

FLOAT_EPS = 1e-9
PERTURBATION = 1e-6


class LPIterationLimit(RuntimeError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    value: object = None
    duals: np.ndarray | None = None
    iterations: int = 0
    basis: list | None = None
    at_upper: np.ndarray | None = None


def _mpq_array(a) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    out.reshape(-1)[:] = [mpq(v) for v in arr.reshape(-1)]
    return out


class _Tableau:
    def __init__(self, A, b, ub, exact):
        m, n = A.shape
        self.m, self.n = m, n
        self.exact = exact
        self.eps = 0 if exact else FLOAT_EPS
        self.zero = mpq(0) if exact else 0.0
        bf = np.array([float(v) for v in b])
        self.row_sign = np.where(bf < 0, -1, 1)
        if exact:
            T = np.empty((m, n + m), dtype=object)
            T[:, :n] = _mpq_array(A) * self.row_sign[:, None]
            T[:, n:] = _mpq_array(np.eye(m, dtype=np.int64))
            self.b = _mpq_array(b) * self.row_sign
        else:
            T = np.zeros((m, n + m))
            T[:, :n] = np.asarray(A, dtype=float) * self.row_sign[:, None]
            T[:, n:] = np.eye(m)
            self.b = bf * self.row_sign
        self.T = T
        self.A0 = T.copy()
        self.beta = self.b.copy()
        self.basis = np.arange(n, n + m)
        self.has_ub = np.array([u is not None for u in ub] + [False] * m)
        ubv = [self.zero if u is None else (mpq(u) if exact else float(u)) for u in ub] + [self.zero] * m
        self.ubv = np.array(ubv, dtype=object) if exact else np.array(ubv, dtype=float)
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.blocked = np.zeros(n + m, dtype=bool)

    def solution(self):
        x = np.where(self.at_upper, self.ubv, self.zero)
        if self.exact:
            x = x.astype(object)
        x[self.basis] = self.beta
        return x

    def fix_artificials(self):
        a = slice(self.n, self.n + self.m)
        self.blocked[a] = True
        self.has_ub[a] = True
        self.ubv[a] = self.zero
        self.at_upper[a] = False

    def refactor(self):
        # float only: rebuild the tableau from the original columns to shed drift
        B = self.A0[:, self.basis]
        self.T = np.linalg.solve(B, self.A0)
        self.T[np.abs(self.T) < 1e-12] = 0.0
        up = np.flatnonzero(self.at_upper)
        rhs = self.b - self.A0[:, up] @ self.ubv[up]
        self.beta = np.linalg.solve(B, rhs)

    def run(self, cost, max_iter, rule="bland", stall_limit=50, refactor_every=100):
        """Iterate to optimality.  ``rule="dantzig"`` prices by largest reduced cost
        and falls back to Bland after ``stall_limit`` consecutive degenerate pivots."""
        eps = self.eps
        nm = self.n + self.m
        in_basis = np.zeros(nm, dtype=bool)
        in_basis[self.basis] = True
        cost = np.asarray(cost, dtype=self.T.dtype)
        reduced = cost - cost[self.basis] @ self.T
        it = 0
        pivots = 0
        stalled = 0
        while True:
            T = self.T
            free = ~(in_basis | self.blocked)
            if self.exact:
                up = np.array([v > 0 for v in reduced], dtype=bool)
                down = np.array([v < 0 for v in reduced], dtype=bool)
            else:
                up = reduced > eps
                down = reduced < -eps
            cand = np.flatnonzero(free & ((~self.at_upper & up) | (self.at_upper & down)))
            if cand.size == 0:
                return "optimal", it
            if rule == "dantzig" and stalled < stall_limit:
                enter = int(cand[np.argmax(np.abs(reduced[cand]))])
            else:
                enter = int(cand[0])
            it += 1
            if it > max_iter:
                raise LPIterationLimit(f"simplex exceeded {max_iter} iterations")
            s = -1 if self.at_upper[enter] else 1
            col = T[:, enter]
            alpha = col * s
            r, to_upper, theta = self._ratio(alpha)
            flip_ok = self.has_ub[enter]
            if r is None and not flip_ok:
                return "unbounded", it
            if flip_ok and (r is None or self.ubv[enter] <= theta):
                self.beta = self.beta - alpha * self.ubv[enter]
                self.at_upper[enter] = not self.at_upper[enter]
                stalled = 0
                continue
            stalled = stalled + 1 if theta == 0 else 0
            new_val = self.ubv[enter] - theta if self.at_upper[enter] else theta
            self.beta = self.beta - alpha * theta
            old = int(self.basis[r])
            self.at_upper[old] = to_upper
            self.at_upper[enter] = False
            self.beta[r] = new_val
            self._pivot(r, enter)
            self.basis[r] = enter
            in_basis[old] = False
            in_basis[enter] = True
            pivots += 1
            if not self.exact and pivots % refactor_every == 0:
                self.refactor()
                reduced = cost - cost[self.basis] @ self.T
            else:
                reduced = reduced - reduced[enter] * self.T[r]
                if not self.exact:
                    reduced[enter] = 0.0

    def _ratio(self, alpha):
        """Bland ratio test: returns (row, leaves_at_upper, step) or (None, None, None)."""
        eps = self.eps
        if self.exact:
            pos = np.array([a > 0 for a in alpha], dtype=bool)
            neg = np.array([a < 0 for a in alpha], dtype=bool)
        else:
            pos = alpha > eps
            neg = alpha < -eps
        neg &= self.has_ub[self.basis]
        rows = np.flatnonzero(pos | neg)
        if rows.size == 0:
            return None, None, None
        ub_b = self.ubv[self.basis]
        lims = np.where(pos[rows], self.beta[rows] / np.where(pos[rows], alpha[rows], 1),
                        (ub_b[rows] - self.beta[rows]) / np.where(neg[rows], -alpha[rows], 1))
        if not self.exact:
            lims = np.maximum(lims, 0.0)
            best = lims.min()
            ties = rows[lims <= best]
        else:
            best = min(lims)
            ties = rows[np.array([v == best for v in lims], dtype=bool)]
        r = int(ties[np.argmin(self.basis[ties])])
        return r, bool(neg[r]), best

    def _pivot(self, r, j):
        T = self.T
        T[r] = T[r] / T[r, j]
        col = T[:, j].copy()
        col[r] = self.zero
        nz = np.flatnonzero(np.array([v != 0 for v in col], dtype=bool)) if self.exact else np.flatnonzero(col)
        if nz.size:
            T[nz] = T[nz] - np.outer(col[nz], T[r])
        if not self.exact:
            T[np.abs(T) < 1e-12] = 0.0

    def install(self, basis, at_upper, phase1=False) -> bool:
        """Pivot ``basis`` in (Gauss-Jordan) and set nonbasic bounds.

        Returns True if the basic solution is exactly feasible: for phase two
        artificials must be zero, for ``phase1`` they need only be nonnegative.
        """
        self.at_upper[:] = at_upper
        placed = np.zeros(self.m, dtype=bool)
        for j in basis:
            j = int(j)
            if j in self.basis:
                placed[int(np.flatnonzero(self.basis == j)[0])] = True
                continue
            col = self.T[:, j]
            rows = [i for i in np.flatnonzero(~placed) if col[i] != 0]
            if not rows:
                return False
            # prefer replacing an artificial so columns installed earlier stay put
            r = next((i for i in rows if self.basis[i] >= self.n), rows[0])
            self._pivot(r, j)
            self.basis[r] = j
            placed[r] = True
        self.at_upper[self.basis] = False
        nonbasic_up = np.flatnonzero(self.at_upper)
        rhs = self.T[:, self.n:] @ self.b
        if nonbasic_up.size:
            rhs = rhs - self.T[:, nonbasic_up] @ self.ubv[nonbasic_up]
        self.beta = rhs
        for i, j in enumerate(self.basis):
            v = self.beta[i]
            if v < 0 or (self.has_ub[j] and v > self.ubv[j]) or (j >= self.n and v != 0 and not phase1):
                return False
        return True


def _solve(tab, c, max_iter, skip_phase1=False, rule="bland"):
    n, m = tab.n, tab.m
    zero = tab.zero
    it1 = 0
    if not skip_phase1 and any(v != 0 for v in tab.beta):
        one = mpq(1) if tab.exact else 1.0
        phase1 = [zero] * n + [-one] * m
        _, it1 = tab.run(phase1, max_iter, rule=rule)
        x = tab.solution()
        if sum(x[n:], zero) > tab.eps:
            return LPResult("infeasible", iterations=it1, basis=list(map(int, tab.basis)),
                            at_upper=tab.at_upper.copy())
    # artificials are now fixed at zero; basic ones leave on the first nonzero pivot
    tab.fix_artificials()
    cost = [mpq(v) if tab.exact else float(v) for v in c] + [zero] * m
    status, it2 = tab.run(cost, max_iter, rule=rule)
    if status != "optimal":
        return LPResult(status, iterations=it1 + it2)
    x = tab.solution()[:n]
    value = sum((cost[j] * x[j] for j in range(n)), zero)
    cb = np.array([cost[j] for j in tab.basis], dtype=tab.T.dtype)
    duals = (cb @ tab.T[:, n:]) * tab.row_sign
    return LPResult("optimal", x=x, value=value, duals=duals, iterations=it1 + it2,
                    basis=list(map(int, tab.basis)), at_upper=tab.at_upper.copy())


def simplex_max(c, A, b, ub=None, *, exact=True, crossover=True, max_iter=200_000) -> LPResult:
    """Maximize ``c.x`` subject to ``A x = b`` and ``0 <= x <= ub``.

    ``ub`` entries of None mean no upper bound.  ``duals`` are the phase-two
    simplex multipliers ``y`` of the final basis.

    The float pass (the whole solve when ``exact=False``, otherwise the
    crossover warm start) runs on a slightly perturbed right-hand side and
    prices with Dantzig's rule, falling back to Bland's rule whenever
    degenerate pivots stall.  Its basis is meant to be checked against the
    unperturbed data, by the exact phase or by :func:`certify_basis`.  Exact
    runs use Bland's rule only.
    """
    A = np.asarray(A)
    m, n = A.shape
    ub = [None] * n if ub is None else list(ub)
    warm = _solve(_Tableau(A, _perturbed_rhs(A, b, ub), ub, False), c, max_iter, rule="dantzig")
    if not exact:
        return warm
    if crossover and warm.status == "optimal":
        tab = _Tableau(A, b, ub, True)
        if tab.install(warm.basis, warm.at_upper):
            return _solve(tab, c, max_iter, skip_phase1=True)
    if crossover and warm.status == "infeasible":
        # resume exact phase one from the float phase-one basis
        tab = _Tableau(A, b, ub, True)
        if tab.install(warm.basis, warm.at_upper, phase1=True):
            return _solve(tab, c, max_iter)
    return _solve(_Tableau(A, b, ub, True), c, max_iter)


def _perturbed_rhs(A, b, ub):
    # b + A.delta for a tiny delta inside the box: keeps feasibility, breaks the
    # degeneracy of b = 0 vertices.  Fixed generator, so runs are reproducible.
    rng = np.random.default_rng(0x5EED)
    delta = PERTURBATION * (1.0 + rng.random(A.shape[1]))
    cap = np.array([np.inf if u is None else float(u) / 2 for u in ub])
    delta = np.minimum(delta, cap)
    return np.asarray([float(v) for v in b]) + np.asarray(A, dtype=float) @ delta


@dataclass
class BasisCertificate:
    x: list  # Fractions, original variables only
    value: Fraction
    duals: list  # Fractions, one per constraint row


def _fq(v) -> Fraction:
    return Fraction(int(v.p), int(v.q))


def certify_basis(c, A, b, ub, basis, at_upper) -> BasisCertificate | None:
    """Exactly check that ``basis`` (with nonbasic ``at_upper`` flags) is optimal.

    Works on the same column layout as :func:`simplex_max` (originals, then
    one artificial per row, artificials fixed at zero).  Returns the exact
    primal point, value and multipliers, or None if the basis is not primal
    feasible or not dual feasible in exact rational arithmetic.
    """
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    sign = np.where(np.array([float(v) for v in b]) < 0, -1, 1)
    a0 = np.hstack([A * sign[:, None], np.eye(m, dtype=np.int64)])
    bq = [Fraction(v) * int(sg) for v, sg in zip(b, sign)]
    if ub is None:
        ub = [None] * n
    ubq = [None if u is None else Fraction(u) for u in ub] + [Fraction(0)] * m
    at_upper = np.asarray(at_upper, dtype=bool)
    basis = [int(j) for j in basis]
    if len(basis) != m or len(set(basis)) != m:
        return None
    bmat = flint.fmpq_mat(a0[:, basis].tolist())
    if bmat.det() == 0:
        return None
    rhs = list(bq)
    for j in np.flatnonzero(at_upper):
        if j in basis or ubq[j] is None:
            continue
        for i in range(m):
            rhs[i] -= int(a0[i, j]) * ubq[j]
    xb = bmat.solve(flint.fmpq_mat([[flint.fmpq(v.numerator, v.denominator)] for v in rhs]))
    x = [ubq[j] if (at_upper[j] and j not in basis) else Fraction(0) for j in range(n + m)]
    for i, j in enumerate(basis):
        v = _fq(xb[i, 0])
        if v < 0 or (ubq[j] is not None and v > ubq[j]):
            return None
        x[j] = v
    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    cb = flint.fmpq_mat([[flint.fmpq(cost[j].numerator, cost[j].denominator)] for j in basis])
    y = bmat.transpose().solve(cb)
    yrow = flint.fmpq_mat(1, m, [y[i, 0] for i in range(m)])
    ya = yrow * flint.fmpq_mat(a0.tolist())
    inb = set(basis)
    for j in range(n):
        if j in inb:
            continue
        dj = cost[j] - _fq(ya[0, j])
        if (not at_upper[j] and dj > 0) or (at_upper[j] and dj < 0):
            return None
    value = sum((cost[j] * x[j] for j in range(n)), Fraction(0))
    duals = [_fq(y[i, 0]) * int(sign[i]) for i in range(m)]
    return BasisCertificate(x[:n], value, duals)
