"""Seeded Monte Carlo sweeps over (p, d) with the closed-form bounds alongside.

Randomness contract: cells are numbered in canonical order (p-major, d-minor)
and sample ``s`` of cell ``c`` is drawn from substream
``c * samples + s`` of the sweep seed (see :mod:`walshlab.rng`).  Chunks may be
evaluated on any number of threads; results are merged in index order, so the
CSV is byte-identical for every thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

from .collision import EXACT_MAX_P, AnnealParams, collide_anneal, collide_exact
from .competitor import LP_MAX_P, max_competitor
from .core import BooleanFunction, _check_p, truncate_batch
from .determinacy import probability_bounds
from .rng import MASK64, sample_signs, substream_key

CSV_HEADER = (
    "p,d,samples,seed,success_rate,mean_eta,max_eta,collision_rate,lp_zero_rate,"
    "K_d,M_d,Md_over_N,log_nonuniq_bound,log_uniq_fail_bound,d_lower,d_upper"
)
CHUNK_POINTS = 1 << 21


def sample_function(p: int, seed: int, index: int) -> BooleanFunction:
    """Uniform random function on substream ``index`` of ``seed``."""
    _check_p(p)
    return BooleanFunction.from_signs(p, sample_signs(p, seed, [index])[0])


@dataclass(frozen=True)
class SweepConfig:
    p_list: tuple[int, ...]
    d_list: tuple[int, ...] | str = "all"
    samples: int = 1000
    eta: float = 1.0
    omega: float = 1.0
    seed: int = 0
    run_certificate: bool = True
    run_exact_enum: bool = False
    run_anneal: bool = False
    run_lp: bool = False
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p_list", tuple(int(p) for p in self.p_list))
        if self.d_list != "all":
            object.__setattr__(self, "d_list", tuple(int(d) for d in self.d_list))
            if not self.d_list:
                raise ValueError("d_list is empty")
            if min(self.d_list) < 0:
                raise ValueError("degrees must be nonnegative")
        if not self.p_list:
            raise ValueError("p_list is empty")
        for p in self.p_list:
            _check_p(p)
        if isinstance(self.samples, bool) or not isinstance(self.samples, int) or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples!r}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if not self.omega >= 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        top = max(self.p_list)
        if self.run_exact_enum and top > EXACT_MAX_P:
            raise ValueError(f"exact enumeration needs p <= {EXACT_MAX_P}, got p={top}")
        if self.run_lp and top > LP_MAX_P:
            raise ValueError(f"the LP analysis needs p <= {LP_MAX_P}, got p={top}")

    def cells(self) -> list[tuple[int, int]]:
        """Canonical ``(p, d)`` order; explicit degrees above ``p`` are skipped."""
        out = []
        for p in self.p_list:
            ds = range(p + 1) if self.d_list == "all" else [d for d in self.d_list if d <= p]
            out.extend((p, d) for d in ds)
        return out


_BOOL_KEYS = {"run_certificate", "run_exact_enum", "run_anneal", "run_lp"}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def parse_config(text: str) -> dict:
    """Flat ``key=value`` lines (``#`` comments, blank lines ignored) to SweepConfig kwargs."""
    known = {f.name for f in fields(SweepConfig)}
    aliases = {"p": "p_list", "d": "d_list"}
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = aliases.get(key, key)
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key == "p_list":
            out[key] = _int_list(value)
        elif key == "d_list":
            out[key] = "all" if value == "all" else _int_list(value)
        elif key in _BOOL_KEYS:
            out[key] = _parse_bool(value)
        elif key in ("eta", "omega"):
            out[key] = float(value)
        else:
            out[key] = int(value, 0)
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class SweepCell:
    p: int
    d: int
    samples: int
    seed: int
    success_rate: float | None
    mean_eta: float | None
    max_eta: float | None
    collision_rate: float | None
    lp_zero_rate: float | None
    K_d: int
    M_d: int
    Md_over_N: float
    log_nonuniq_bound: float
    log_uniq_fail_bound: float
    d_lower: float
    d_upper: float

    def csv_row(self) -> str:
        return ",".join(_fmt(getattr(self, name)) for name in CSV_HEADER.split(","))

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_HEADER.split(",")}

    @classmethod
    def from_csv_row(cls, row: str) -> "SweepCell":
        parts = row.split(",")
        names = CSV_HEADER.split(",")
        if len(parts) != len(names):
            raise ValueError(f"expected {len(names)} fields, got {len(parts)}")
        vals = {}
        for name, text in zip(names, parts):
            if name in ("p", "d", "samples", "seed", "K_d", "M_d"):
                vals[name] = int(text)
            elif text == "":
                vals[name] = None
            else:
                vals[name] = float(text)
        return cls(**vals)


def emit_csv(cells) -> str:
    return "".join([CSV_HEADER + "\n"] + [c.csv_row() + "\n" for c in cells])


def parse_csv(text: str) -> list[SweepCell]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError("missing or unexpected sweep CSV header")
    return [SweepCell.from_csv_row(ln.strip()) for ln in lines[1:]]


def _chunk_stats(cfg: SweepConfig, p: int, d: int, first: int, count: int):
    """Per-sample (max |rho|, collision found, LP optimum zero) for one chunk."""
    signs = sample_signs(p, cfg.seed, range(first, first + count))
    n = 1 << p
    maxres = None
    if cfg.run_certificate:
        _, rho = truncate_batch(signs, d)
        maxres = np.abs(rho).max(axis=1)
    coll = lp0 = None
    if cfg.run_exact_enum or cfg.run_anneal or cfg.run_lp:
        fs = [BooleanFunction.from_signs(p, row) for row in signs]
        if cfg.run_exact_enum:
            coll = [collide_exact(f, d)[0] is not None for f in fs]
        elif cfg.run_anneal:
            coll = [
                collide_anneal(f, d, AnnealParams(seed=substream_key(cfg.seed, first + i))) is not None
                for i, f in enumerate(fs)
            ]
        if cfg.run_lp:
            lp0 = [max_competitor(f, d).optimum == 0 for f in fs]
    return maxres, coll, lp0, n


def _rate(flags) -> float:
    return float(Fraction(sum(flags), len(flags)))


def run_sweep(cfg: SweepConfig) -> list[SweepCell]:
    """Evaluate every cell of ``cfg``; deterministic for any ``cfg.threads``."""
    jobs = []
    cell_list = cfg.cells()
    for ci, (p, d) in enumerate(cell_list):
        chunk = max(1, CHUNK_POINTS >> p)
        base = ci * cfg.samples
        for s in range(0, cfg.samples, chunk):
            jobs.append((ci, p, d, base + s, min(chunk, cfg.samples - s)))
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        results = list(pool.map(lambda j: _chunk_stats(cfg, *j[1:]), jobs))

    per_cell: dict[int, list] = {ci: [] for ci in range(len(cell_list))}
    for job, res in zip(jobs, results):
        per_cell[job[0]].append(res)

    cells = []
    for ci, (p, d) in enumerate(cell_list):
        parts = per_cell[ci]
        n = 1 << p
        success = mean_eta = max_eta = coll = lp0 = None
        if cfg.run_certificate:
            res = np.concatenate([r[0] for r in parts])
            success = _rate(res < n)
            mean_eta = float(Fraction(int(res.sum()), n * cfg.samples))
            max_eta = float(Fraction(int(res.max()), n))
        if cfg.run_exact_enum or cfg.run_anneal:
            coll = _rate([x for r in parts for x in r[1]])
        if cfg.run_lp:
            lp0 = _rate([x for r in parts for x in r[2]])
        b = probability_bounds(p, d, cfg.eta, cfg.omega)
        cells.append(SweepCell(
            p=p, d=d, samples=cfg.samples, seed=cfg.seed,
            success_rate=success, mean_eta=mean_eta, max_eta=max_eta,
            collision_rate=coll, lp_zero_rate=lp0,
            K_d=b.K_d, M_d=b.M_d, Md_over_N=b.residual_variance,
            log_nonuniq_bound=b.log_nonuniqueness_bound,
            log_uniq_fail_bound=b.log_uniqueness_failure_bound,
            d_lower=b.lower_threshold, d_upper=b.upper_threshold,
        ))
    return cells


def failure_within_bound(cell: SweepCell) -> bool:
    """Empirical certificate failure <= bound + 3 binomial standard errors.

    Vacuous bounds and cells without certificate data pass trivially.
    """
    if cell.success_rate is None or cell.log_uniq_fail_bound >= 0:
        return True
    s = cell.success_rate
    se = math.sqrt(s * (1 - s) / cell.samples)
    return 1 - s <= math.exp(cell.log_uniq_fail_bound) + 3 * se


def transition_summary(cells) -> dict[int, tuple[int | None, int | None]]:
    """Per p: (first d with success rate > 1/2, width of the 0.1..0.9 rise in d)."""
    out = {}
    for p in sorted({c.p for c in cells}):
        row = sorted((c.d, c.success_rate) for c in cells if c.p == p and c.success_rate is not None)
        mid = next((d for d, s in row if s > 0.5), None)
        lo = next((d for d, s in row if s > 0.1), None)
        hi = next((d for d, s in row if s >= 0.9), None)
        out[p] = (mid, None if lo is None or hi is None else hi - lo)
    return out


__all__ = [
    "CSV_HEADER", "SweepCell", "SweepConfig", "emit_csv", "failure_within_bound",
    "parse_config", "parse_csv", "run_sweep", "sample_function", "transition_summary",
]
