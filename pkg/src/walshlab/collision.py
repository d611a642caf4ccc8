"""Boolean collisions: ``g != f`` with the same degree-<=d coefficients.

A collision is described by its flip set ``T`` (``g = f`` flipped on ``T``).
Since ``g - f = -2 f 1_T``, the data agree iff ``sum_{x in T} f(x) w_J(x) = 0``
for every ``|J| <= d``.  Everything here is integer arithmetic.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .core import BooleanFunction, _check_degree, _check_p, low_masks, wht, walsh_sign
from .determinacy import binomial_cumulative
from .rng import Xoshiro256, sample_signs, substream_key

EXACT_MAX_P = 4
CENSUS_BUDGET = 1 << 27  # stored coefficients across all samples


@dataclass(frozen=True)
class CollisionWitness:
    p: int
    d: int
    flip_set: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "flip_set", tuple(sorted(int(m) for m in self.flip_set)))

    def apply(self, f: BooleanFunction) -> BooleanFunction:
        return f.flip(self.flip_set)

    def serialize(self) -> str:
        return "\n".join(str(m) for m in self.flip_set) + "\n"


def constraint_rows(f: BooleanFunction, d: int) -> np.ndarray:
    """``A[x, J] = f(x) w_J(x)`` over points x and low masks J (shape N x K_d)."""
    masks = low_masks(f.p, d)
    pts = np.arange(f.n)
    return f.signs()[:, None] * walsh_sign(pts[:, None], masks[None, :])


def verify_witness(f: BooleanFunction, d: int, flip_set) -> bool:
    """True iff ``flip_set`` is nonempty and flipping ``f`` on it keeps every ``|J| <= d`` coefficient."""
    _check_degree(f.p, d)
    pts = sorted(set(int(m) for m in flip_set))
    if not pts:
        return False
    if pts[0] < 0 or pts[-1] >= f.n:
        return False
    masks = low_masks(f.p, d)
    idx = np.array(pts)
    sums = (f.signs()[idx][:, None] * walsh_sign(idx[:, None], masks[None, :])).sum(axis=0)
    return not np.any(sums)


@lru_cache(maxsize=None)
def _combos(n: int, k: int) -> np.ndarray:
    return np.array(list(combinations(range(n), k)), dtype=np.intp).reshape(-1, k)


def collide_exact(f: BooleanFunction, d: int, *, max_p: int = EXACT_MAX_P, max_size: int | None = None):
    """Search flip sets by increasing size for a collision.

    Returns ``(witness, exhaustive)``.  The witness has minimal ``|T|``, ties
    broken by the lexicographically smallest sorted mask tuple.  ``witness`` is
    None when no collision exists among the sizes searched; ``exhaustive`` says
    whether every size was searched (only false when ``max_size`` cuts it short).
    """
    _check_degree(f.p, d)
    if f.p > max_p:
        raise ValueError(f"exhaustive collision search is limited to p <= {max_p}, got p={f.p}")
    n = f.n
    top = n if max_size is None else min(n, max_size)
    a = constraint_rows(f, d)
    # the J = empty constraint forces sum_{x in T} f(x) = 0, so |T| is even
    for k in range(2, top + 1, 2):
        combos = _combos(n, k)
        hits = np.flatnonzero(~a[combos].sum(axis=1).any(axis=1))
        if hits.size:
            return CollisionWitness(f.p, d, tuple(combos[hits[0]])), True
    return None, top == n


@dataclass(frozen=True)
class CensusReport:
    p: int
    d: int
    sample_count: int
    seed: int
    distinct_keys: int
    collision_pairs: tuple[tuple[int, int], ...]
    nontrivial_pairs: int
    log_image_bound: float

    HEADER = "p,d,samples,seed,distinct_keys,collision_pairs,nontrivial_pairs,log_image_bound"

    def csv_row(self) -> str:
        return (
            f"{self.p},{self.d},{self.sample_count},{self.seed},{self.distinct_keys},"
            f"{len(self.collision_pairs)},{self.nontrivial_pairs},{self.log_image_bound!r}"
        )

    def to_csv(self) -> str:
        return f"{self.HEADER}\n{self.csv_row()}\n"

    def pairs_text(self) -> str:
        return "".join(f"{i},{j}\n" for i, j in self.collision_pairs)


def _census_chunk(p, d, seed, start, stop, masks):
    signs = sample_signs(p, seed, range(start, stop))
    low = wht(signs)[:, masks]
    packed = np.packbits((signs < 0).astype(np.uint8), axis=1, bitorder="little")
    return low, packed


def collide_census(p: int, d: int, samples: int, seed: int, *, threads: int = 1,
                   budget: int = CENSUS_BUDGET) -> CensusReport:
    """Sample ``samples`` uniform functions and group them by exact low-degree data.

    Sample ``i`` is drawn from substream ``i`` of ``seed``.  Every pair of sample
    indices with equal data is reported (``i < j``, sorted) and re-verified by
    direct comparison.  ``nontrivial_pairs`` counts the pairs whose functions
    also differ, i.e. genuine Boolean collisions rather than repeated draws.
    """
    _check_p(p)
    _check_degree(p, d)
    if samples < 2:
        raise ValueError("census needs at least 2 samples")
    k, _ = binomial_cumulative(p, d)
    if samples * k > budget:
        raise MemoryError(f"samples * K_d = {samples * k} exceeds census budget {budget}")
    masks = low_masks(p, d)
    n = 1 << p
    chunk = max(1, (1 << 20) // n)
    bounds = [(s, min(samples, s + chunk)) for s in range(0, samples, chunk)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(lambda b: _census_chunk(p, d, seed, b[0], b[1], masks), bounds))
    low = np.concatenate([x[0] for x in parts])
    tables = np.concatenate([x[1] for x in parts])

    groups: dict[bytes, list[int]] = defaultdict(list)
    for i in range(samples):
        groups[low[i].tobytes()].append(i)
    pairs = []
    for members in groups.values():
        pairs.extend(combinations(members, 2))
    pairs.sort()
    nontrivial = 0
    if pairs:
        arr = np.array(pairs)
        if not np.array_equal(low[arr[:, 0]], low[arr[:, 1]]):
            raise AssertionError("census pair failed exact re-verification")
        nontrivial = int(np.any(tables[arr[:, 0]] != tables[arr[:, 1]], axis=1).sum())
    return CensusReport(
        p=p,
        d=d,
        sample_count=samples,
        seed=seed,
        distinct_keys=len(groups),
        collision_pairs=tuple(pairs),
        nontrivial_pairs=nontrivial,
        log_image_bound=k * math.log(n + 1),
    )


@dataclass(frozen=True)
class AnnealParams:
    restarts: int = 20
    max_iters: int | None = None  # default 50 * N
    init_temp: float | None = None  # default N
    cooling: float = 0.995
    seed: int = 0


def flip_energy(f: BooleanFunction, d: int, flip_set) -> int:
    """``E(T) = sum_{|J|<=d} (sum_{x in T} f(x) w_J(x))^2``."""
    idx = np.array(sorted(set(int(m) for m in flip_set)), dtype=np.int64)
    if idx.size == 0:
        return 0
    masks = low_masks(f.p, d)
    sums = (f.signs()[idx][:, None] * walsh_sign(idx[:, None], masks[None, :])).sum(axis=0)
    return int(sums @ sums)


def _anneal_restart(signs, masks, n, iters, temp0, cooling, key):
    rng = Xoshiro256(key)
    k = len(masks)
    inside = np.zeros(n, dtype=bool)
    # initial T: a uniform random subset of size N/2 (partial Fisher-Yates)
    perm = list(range(n))
    for i in range(max(1, n // 2)):
        j = i + rng.below(n - i)
        perm[i], perm[j] = perm[j], perm[i]
        inside[perm[i]] = True
    size = int(inside.sum())
    members = np.flatnonzero(inside)
    v = (signs[members][:, None] * walsh_sign(members[:, None], masks[None, :])).sum(axis=0)
    energy = int(v @ v)
    temp = temp0
    for _ in range(iters):
        if energy == 0 and size > 0:
            break
        x = rng.below(n)
        if inside[x] and size == 1:
            temp *= cooling
            continue
        row = signs[x] * walsh_sign(x, masks)
        if inside[x]:
            row = -row
        # toggling x adds row to v: dE = 2 v.row + |row|^2 = 2 v.row + K
        delta = 2 * int(v @ row) + k
        if delta <= 0 or (temp > 0 and rng.random() < math.exp(-delta / temp)):
            v += row
            energy += delta
            inside[x] = not inside[x]
            size += 1 if inside[x] else -1
        temp *= cooling
    if energy == 0 and size > 0:
        return tuple(int(m) for m in np.flatnonzero(inside))
    return None


def collide_anneal(f: BooleanFunction, d: int, params: AnnealParams = AnnealParams(), *, threads: int = 1):
    """Simulated annealing over flip sets; returns a verified witness or None.

    Each restart runs on substream ``r`` of ``params.seed`` and the first
    successful restart in index order wins, so the result does not depend on
    ``threads``.
    """
    _check_degree(f.p, d)
    n = f.n
    iters = 50 * n if params.max_iters is None else params.max_iters
    temp0 = float(n) if params.init_temp is None else params.init_temp
    masks = low_masks(f.p, d)
    signs = f.signs()

    def run(r):
        return _anneal_restart(signs, masks, n, iters, temp0, params.cooling, substream_key(params.seed, r))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(run, range(params.restarts)))
    for found in results:
        if found is not None:
            if not verify_witness(f, d, found):
                raise AssertionError("annealing produced an unverifiable witness")
            return CollisionWitness(f.p, d, found)
    return None
