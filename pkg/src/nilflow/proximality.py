"""Finite-resolution machinery for higher-order regional proximality.

Contains the witness search/verify pair for RP^[d] membership probes,
the commuting-action witness transfer, dynamical-cube and N_d cloud
samplers, Hausdorff comparison of clouds, polynomial orbit density,
return-time sets and fiber-coverage (characteristic factor) checks.

Search semantics: a verified witness certifies the delta-resolution
membership condition; EXHAUSTED is informative only.  PROVEN-ABSENT is a
genuine non-membership certificate for the relation and is issued only
on the isometry fast path (torus rotations/flows, suspensions of
rotations, and the height-circle factor of a suspension), where a
positive distance already rules the pair out at every scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import RealPolynomial
from .systems import (HEIS_NILFLOW, HEIS_NILSYSTEM, SUSPENSION, TORUS_FLOW,
                      TORUS_MAP, SystemHandle, circle_dist)

WITNESS = "witness"
EXHAUSTED = "exhausted"
PROVEN_ABSENT = "proven-absent"

COMMUTATION_TOL = 1e-10


class CommutationViolation(RuntimeError):
    """The two actions failed the sample commutation check."""


# ---------------------------------------------------------------------------
# data carriers

def face_vectors(d: int, include_zero: bool = False) -> list[tuple[int, ...]]:
    """All eps in {0,1}^d, zero vector excluded unless requested."""
    if d < 1:
        raise ValueError("d must be >= 1")
    vecs = list(itertools.product((0, 1), repeat=d))
    return vecs if include_zero else [v for v in vecs if any(v)]


@dataclass(frozen=True)
class RPWitness:
    """Certificate for finite-resolution membership in RP^[d]."""

    x_prime: object
    y_prime: object
    g: tuple
    delta: float  # achieved bound: max distance over all checked inequalities

    @property
    def order(self) -> int:
        return len(self.g)

    def to_jsonable(self, sys: SystemHandle | None = None) -> dict:
        coords = (lambda p: list(sys.coords(p))) if sys else (lambda p: p)
        return {"x_prime": coords(self.x_prime), "y_prime": coords(self.y_prime),
                "g": list(self.g), "delta": self.delta}


@dataclass(frozen=True)
class RPSearchResult:
    status: str
    witness: RPWitness | None = None
    checked: int = 0
    best_gap: float | None = None

    @property
    def found(self) -> bool:
        return self.status == WITNESS

    def to_jsonable(self, sys: SystemHandle | None = None) -> dict:
        out = {"status": self.status, "checked": self.checked,
               "best_gap": self.best_gap, "verified": self.found}
        if self.witness is not None:
            out["witness"] = {**self.witness.to_jsonable(sys),
                              "verified": self.found}
        return out


@dataclass
class PointCloud:
    """Finite sample of a subset of X^m with provenance metadata."""

    points: np.ndarray  # shape (n, arity, dim)
    system_tag: str
    arity: int
    meta: dict = field(default_factory=dict)
    system: SystemHandle | None = None

    def __post_init__(self):
        if self.points.ndim != 3 or self.points.shape[1] != self.arity:
            raise ValueError("points must have shape (n, arity, dim)")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def flat(self) -> np.ndarray:
        return self.points.reshape(self.n, -1)

    def to_csv(self, path) -> None:
        np.savetxt(path, self.flat(), delimiter=",", fmt="%.17g")

    def manifest(self) -> dict:
        return {"system": self.system_tag, "arity": self.arity, "n": self.n,
                **self.meta}


# ---------------------------------------------------------------------------
# witness verification

def witness_max_gap(sys: SystemHandle, x, y, witness: RPWitness) -> float:
    """Max over the 2 base inequalities and the 2^d - 1 face inequalities."""
    gaps = [sys.dist(x, witness.x_prime), sys.dist(y, witness.y_prime)]
    for eps in face_vectors(witness.order):
        t = sum(g for g, e in zip(witness.g, eps) if e)
        gaps.append(sys.dist(sys.evolve(witness.x_prime, t),
                             sys.evolve(witness.y_prime, t)))
    return max(gaps)


def rp_witness_verify(sys: SystemHandle, x, y, witness: RPWitness,
                      delta: float) -> bool:
    """Strict check of every inequality in the RP^[d] witness condition."""
    if witness.order < 1:
        raise ValueError("witness arity must be >= 1")
    if sys.dist(x, witness.x_prime) >= delta:
        return False
    if sys.dist(y, witness.y_prime) >= delta:
        return False
    for eps in face_vectors(witness.order):
        t = sum(g for g, e in zip(witness.g, eps) if e)
        if sys.dist(sys.evolve(witness.x_prime, t),
                    sys.evolve(witness.y_prime, t)) >= delta:
            return False
    return True


# ---------------------------------------------------------------------------
# witness search

def _grid_dt(sys: SystemHandle) -> float:
    if sys.discrete:
        return 1.0
    return 1.0 if sys.tag == SUSPENSION else 0.25


def _group_grid(sys: SystemHandle, count: int) -> list[float]:
    """Deterministic grid 0, +dt, -dt, +2dt, ... of group elements."""
    dt = _grid_dt(sys)
    out = [0.0]
    k = 1
    while len(out) < count:
        out.append(k * dt)
        if len(out) < count:
            out.append(-k * dt)
        k += 1
    if sys.discrete:
        return [int(v) for v in out]
    return out


def _axis_offsets(dim: int, delta: float) -> list[tuple[float, ...]]:
    offs = []
    for axis in range(dim):
        for j in range(1, 8):
            for sign in (1.0, -1.0):
                v = [0.0] * dim
                v[axis] = sign * j * delta / 8.0
                offs.append(tuple(v))
    return offs


def _candidate_offsets(dim: int, delta: float) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
    """Perturbation lattice inside the delta-balls, cheap candidates first."""
    zero = (0.0,) * dim
    axis = _axis_offsets(dim, delta)
    out = [(zero, zero)]
    out.extend((o, zero) for o in axis)
    out.extend((zero, o) for o in axis)
    out.extend((o, tuple(-v for v in o)) for o in axis)
    return out


def _joint_offsets(dim: int, delta: float) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
    """Coarse joint lattice {0, +-delta/2}^dim on both sides (second round)."""
    vals = (0.0, delta / 2.0, -delta / 2.0)
    singles = list(itertools.product(vals, repeat=dim))
    return [(a, b) for a in singles for b in singles if a != (0.0,) * dim or b != (0.0,) * dim]


def _perturb(sys: SystemHandle, p, offset: tuple[float, ...]):
    if not any(offset):
        return p
    c = sys.coords(p)
    return sys.from_coords(tuple(ci + oi for ci, oi in zip(c, offset)))


def rp_witness_search(sys: SystemHandle, x, y, d: int, delta: float,
                      budget: int, grid_count: int = 257) -> RPSearchResult:
    """Budget-bounded deterministic grid search for an RP^[d] witness.

    Candidate order: round one walks the group-element grid with axis
    perturbation sweeps, round two adds a coarse joint perturbation
    lattice, round three (flows) refines the grid tenfold around the best
    near misses.  Within each round the order is lexicographic over
    (g-tuple index, x'-offset index, y'-offset index); the first verified
    witness wins.  Every candidate verification counts against budget.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if d < 1:
        raise ValueError("d must be >= 1")
    if sys.is_isometric and sys.dist(x, y) >= 2 * delta:
        return RPSearchResult(PROVEN_ABSENT, checked=0, best_gap=sys.dist(x, y))
    if sys.tag == SUSPENSION:
        hgap = circle_dist(x.s, y.s)
        if hgap >= 2 * delta:
            # the height factor is an exact isometric circle flow
            return RPSearchResult(PROVEN_ABSENT, checked=0, best_gap=hgap)
        if sys.spec.base.is_isometric and sys.dist(x, y) >= 2 * delta:
            # suspension of an equicontinuous map is equicontinuous
            return RPSearchResult(PROVEN_ABSENT, checked=0, best_gap=sys.dist(x, y))

    offsets = _candidate_offsets(sys.dim, delta)
    grid = _group_grid(sys, grid_count)
    checked = 0
    best_gap = math.inf
    best_tuples: list[tuple[float, tuple]] = []

    def try_tuple(g_tuple, offset_list):
        nonlocal checked, best_gap
        for dx, dy in offset_list:
            if checked >= budget:
                return None
            checked += 1
            w = RPWitness(_perturb(sys, x, dx), _perturb(sys, y, dy),
                          tuple(g_tuple), delta)
            gap = witness_max_gap(sys, x, y, w)
            if gap < delta:
                return RPWitness(w.x_prime, w.y_prime, w.g, gap)
            if gap < best_gap:
                best_gap = gap
                best_tuples.append((gap, tuple(g_tuple)))
                del best_tuples[:-8]
        return None

    for g_tuple in itertools.product(grid, repeat=d):
        hit = try_tuple(g_tuple, offsets)
        if hit:
            return RPSearchResult(WITNESS, hit, checked, best_gap)
        if checked >= budget:
            return RPSearchResult(EXHAUSTED, None, checked, best_gap)

    joint = _joint_offsets(sys.dim, delta)
    for g_tuple in itertools.product(grid, repeat=d):
        hit = try_tuple(g_tuple, joint)
        if hit:
            return RPSearchResult(WITNESS, hit, checked, best_gap)
        if checked >= budget:
            return RPSearchResult(EXHAUSTED, None, checked, best_gap)

    if not sys.discrete:
        dt = _grid_dt(sys)
        for _, g_tuple in sorted(best_tuples):
            fine = [tuple(g + dt * j / 10.0 for g in g_tuple)
                    for j in (-9, -7, -5, -3, -1, 1, 3, 5, 7, 9)]
            for refined in fine:
                hit = try_tuple(refined, offsets)
                if hit:
                    return RPSearchResult(WITNESS, hit, checked, best_gap)
                if checked >= budget:
                    return RPSearchResult(EXHAUSTED, None, checked, best_gap)

    return RPSearchResult(EXHAUSTED, None, checked, best_gap)


# ---------------------------------------------------------------------------
# commuting transfer

def _sample_elements(sys: SystemHandle) -> list[float]:
    return [1, 2, 5] if sys.discrete else [0.7, 1.3, 2.9]


def check_commutation(sysG: SystemHandle, sysH: SystemHandle, points,
                      tol: float = COMMUTATION_TOL) -> float:
    """Max commutator gap of the two actions over sample points/elements."""
    worst = 0.0
    for p in points:
        for g in _sample_elements(sysG):
            for h in _sample_elements(sysH):
                a = sysG.evolve(sysH.evolve(p, h), g)
                b = sysH.evolve(sysG.evolve(p, g), h)
                worst = max(worst, sysG.dist(a, b))
    return worst


def commuting_rp_transfer(sysG: SystemHandle, sysH: SystemHandle, x, y,
                          witnessG: RPWitness, delta_out: float,
                          budget: int, grid_count: int = 257) -> RPSearchResult:
    """Transfer a G-witness to a commuting H-action at delta_out = 3 delta.

    Realizes the nested open-set construction numerically: for each slot j
    the candidate h's are ranked by how closely their action on x'
    tracks g_j's action, and ranked tuples are verified against the
    H-action until one passes at delta_out.
    """
    gap = check_commutation(sysG, sysH, [x, y, witnessG.x_prime])
    if gap > COMMUTATION_TOL:
        raise CommutationViolation(f"sample commutation gap {gap:.3e}")
    if not rp_witness_verify(sysG, x, y, witnessG, delta_out / 3.0):
        raise ValueError("witnessG does not verify at delta_out/3")
    if sysG is sysH or (sysG.tag == sysH.tag and sysG.spec == sysH.spec):
        return RPSearchResult(WITNESS, witnessG, 0,
                              witness_max_gap(sysG, x, y, witnessG))

    d = witnessG.order
    grid = _group_grid(sysH, grid_count)
    xp = witnessG.x_prime

    ranked: list[list[float]] = []
    for j in range(d):
        target = sysG.evolve(xp, witnessG.g[j])
        scored = sorted(range(len(grid)),
                        key=lambda i: (sysH.dist(sysH.evolve(xp, grid[i]), target), i))
        ranked.append([grid[i] for i in scored])

    top = min(16, len(grid))
    checked = 0
    best_gap = math.inf
    for total in range(top * d + 1):
        for combo in itertools.product(range(top), repeat=d):
            if sum(combo) != total:
                continue
            if checked >= budget:
                return RPSearchResult(EXHAUSTED, None, checked, best_gap)
            checked += 1
            h_tuple = tuple(ranked[j][combo[j]] for j in range(d))
            w = RPWitness(witnessG.x_prime, witnessG.y_prime, h_tuple, delta_out)
            g = witness_max_gap(sysH, x, y, w)
            if g < delta_out:
                return RPSearchResult(WITNESS,
                                      RPWitness(w.x_prime, w.y_prime, h_tuple, g),
                                      checked, best_gap)
            best_gap = min(best_gap, g)
    return RPSearchResult(EXHAUSTED, None, checked, best_gap)


# ---------------------------------------------------------------------------
# cloud samplers

_DEFAULT_INT_RANGE = 10 ** 4
_DEFAULT_HORIZON = 10 ** 3


def _torus_phase_step(sys: SystemHandle) -> np.ndarray | None:
    """Per-unit-time phase translation for torus systems, else None."""
    if sys.tag == TORUS_FLOW:
        return np.array(sys.spec.float_freqs)
    if sys.tag == TORUS_MAP:
        return np.array(sys.spec.flow.float_freqs) * sys.spec.step
    return None


def _draw_elements(sys: SystemHandle, rng, shape, horizon) -> np.ndarray:
    if sys.discrete:
        return rng.integers(0, _DEFAULT_INT_RANGE, size=shape).astype(float)
    return rng.random(shape) * (horizon or _DEFAULT_HORIZON)


def cube_orbit_sample(sys: SystemHandle, x, d: int, budget: int, seed: int,
                      horizon: float | None = None) -> PointCloud:
    """Sample the face-group orbit of the diagonal point (x, ..., x).

    Each sample draws d group elements and emits (g^(eps) x) over all
    eps in {0,1}^d, indexed with eps_1 as the least significant bit.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(seed)
    draws = _draw_elements(sys, rng, (budget, d), horizon)
    draws[0, :] = 0.0  # identity tuple first: the cloud always holds the diagonal
    eps_list = face_vectors(d, include_zero=True)
    arity = len(eps_list)
    omega = _torus_phase_step(sys)
    if omega is not None:
        base = np.array(sys.coords(x))
        pts = np.empty((budget, arity, len(base)))
        for idx, eps in enumerate(eps_list):
            s = draws @ np.array(eps, dtype=float)
            pts[:, idx, :] = (base[None, :] + np.outer(s, omega)) % 1.0
    else:
        pts = np.empty((budget, arity, sys.dim))
        for i in range(budget):
            for idx, eps in enumerate(eps_list):
                t = float(np.dot(draws[i], eps))
                pts[i, idx, :] = sys.coords(sys.evolve(x, t))
    meta = {"generator": "cube_orbit_sample", "budget": budget, "seed": seed,
            "d": d, "base_point": list(sys.coords(x))}
    return PointCloud(pts, sys.tag, arity, meta, sys)


def nd_sample(sys: SystemHandle, x, d: int, budget: int, seed: int,
              alphas: Sequence[float] | None = None,
              horizon: float | None = None) -> PointCloud:
    """Sample tuples (T^{a_1 t} x', ..., T^{a_d t} x') with x' on the orbit of x.

    Discrete systems default to alphas (1, ..., d) (the N_d set); flows
    require a vector of distinct nonzero alphas.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if alphas is None:
        if not sys.discrete:
            raise ValueError("flows require explicit alphas")
        alphas = tuple(range(1, d + 1))
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != d or len(set(alphas)) != d or any(a == 0 for a in alphas):
        raise ValueError("alphas must be d distinct nonzero numbers")
    rng = np.random.default_rng(seed)
    ts = _draw_elements(sys, rng, budget, horizon)
    ss = _draw_elements(sys, rng, budget, horizon)
    omega = _torus_phase_step(sys)
    if omega is not None:
        base = np.array(sys.coords(x))
        pts = np.empty((budget, d, len(base)))
        for j, a in enumerate(alphas):
            pts[:, j, :] = (base[None, :] + np.outer(ss + a * ts, omega)) % 1.0
    else:
        pts = np.empty((budget, d, sys.dim))
        for i in range(budget):
            for j, a in enumerate(alphas):
                pts[i, j, :] = sys.coords(sys.evolve(x, float(ss[i] + a * ts[i])))
    meta = {"generator": "nd_sample", "budget": budget, "seed": seed, "d": d,
            "alphas": list(alphas), "base_point": list(sys.coords(x))}
    return PointCloud(pts, sys.tag, d, meta, sys)


# ---------------------------------------------------------------------------
# Hausdorff distance

def hausdorff_distance(a: PointCloud, b: PointCloud) -> float:
    """Hausdorff distance between finite clouds under the product max metric."""
    if a.arity != b.arity:
        raise ValueError("arity mismatch")
    if a.system_tag != b.system_tag:
        raise ValueError("clouds live over different system metrics")
    if a.system_tag in (TORUS_FLOW, TORUS_MAP):
        from scipy.spatial import cKDTree
        fa = a.flat() % 1.0
        fb = b.flat() % 1.0
        d1 = cKDTree(fb, boxsize=1.0).query(fa, p=np.inf)[0].max()
        d2 = cKDTree(fa, boxsize=1.0).query(fb, p=np.inf)[0].max()
        return float(max(d1, d2))
    sys = a.system or b.system
    if sys is None:
        raise ValueError("non-torus clouds need an attached system handle")

    def tuple_dist(u, v):
        return max(sys.dist(sys.from_coords(u[k]), sys.from_coords(v[k]))
                   for k in range(a.arity))

    def directed(pa, pb):
        worst = 0.0
        for u in pa:
            best = math.inf
            for v in pb:
                dv = tuple_dist(u, v)
                if dv < best:
                    best = dv
            worst = max(worst, best)
        return worst

    return max(directed(a.points, b.points), directed(b.points, a.points))


# ---------------------------------------------------------------------------
# density and coverage probes

def poly_orbit_density(flow_sys: SystemHandle, polys: Sequence[RealPolynomial],
                       x, budget: int, resolution: float, seed: int = 0,
                       t_span: float = 1e4) -> float:
    """Fraction of product-space resolution cells hit by (T^{p_j(t)} x)_j."""
    if not polys:
        raise ValueError("polys must be nonempty")
    if any(p.is_constant for p in polys):
        raise ValueError("polys must be nonconstant")
    rng = np.random.default_rng(seed)
    ts = rng.random(budget) * t_span
    bins = int(round(1.0 / resolution))
    omega = _torus_phase_step(flow_sys)
    if omega is None:
        raise ValueError("poly_orbit_density supports torus flows")
    base = np.array(flow_sys.coords(x))
    dim = len(base)
    idx = np.zeros(budget, dtype=np.int64)
    for p in polys:
        phases = (base[None, :] + np.outer(p.eval_array(ts), omega)) % 1.0
        for c in range(dim):
            digit = np.minimum((phases[:, c] * bins).astype(np.int64), bins - 1)
            idx = idx * bins + digit
    hit = len(np.unique(idx))
    return hit / float(bins ** (dim * len(polys)))


def return_set(sys: SystemHandle, x, center, radius: float,
               time_grid: Sequence[float]) -> list[float]:
    """Grid times t with evolve(x, t) inside the open ball B(center, radius)."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    return [t for t in time_grid if sys.dist(sys.evolve(x, t), center) < radius]


def rp_return_intersection(sys: SystemHandle, x, y, d: int, radius: float,
                           nilflow_sys: SystemHandle, y0, radius0: float,
                           horizon: float, grid_step: float) -> bool:
    """Probe whether R(x, B(y, r)) meets the nilflow return set R(y0, B(y0, r0)).

    Desk-scale check of the return-set duality: scans the grid
    {0, step, 2 step, ...} up to horizon and reports nonemptiness.
    """
    t = 0.0
    while t <= horizon:
        if sys.dist(sys.evolve(x, t), y) < radius and \
           nilflow_sys.dist(nilflow_sys.evolve(y0, t), y0) < radius0:
            return True
        t += grid_step
    return False


_PROJECTIONS = ("identity", "heisenberg-base", "torus-coord-0")


def _nil_evolve_coords(spec, p, ts: np.ndarray) -> np.ndarray:
    """Vectorized canonical coordinates of the nilflow orbit of p."""
    a = spec.generator
    gx = ts * a.x
    gy = ts * a.y
    gz = ts * a.z + 0.5 * ts * (ts - 1.0) * a.x * a.y
    rx = gx + p.x
    ry = gy + p.y
    rz = gz + p.z + gx * p.y
    n = -np.floor(ry)
    z = rz + rx * n
    return np.stack([rx % 1.0, ry % 1.0, z % 1.0], axis=1)


def fiber_coverage(sys: SystemHandle, factor_projection: str, d: int,
                   alphas: Sequence[float], x, budget: int, resolution: float,
                   seed: int = 0, horizon: float = 1e4) -> float:
    """Coverage of the fiber power (pi^-1(pi x))^d by the diagonal orbit cloud.

    A sampled tuple enters a fiber cell when each component lies within
    one resolution of the fiber in the constrained coordinates; cells
    quantize the fiber's free coordinates at the same pitch.
    """
    if factor_projection not in _PROJECTIONS:
        raise ValueError(f"unsupported projection {factor_projection!r}")
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != d:
        raise ValueError("need d alphas")
    rng = np.random.default_rng(seed)
    ts = np.concatenate([[0.0], rng.random(budget - 1) * horizon])
    bins = int(round(1.0 / resolution))
    base = np.array(sys.coords(x))

    if factor_projection == "identity":
        ok = np.ones(len(ts), dtype=bool)
        for a in alphas:
            comp = _component_coords(sys, x, a * ts)
            for c in range(comp.shape[1]):
                gap = np.abs(comp[:, c] - base[c]) % 1.0
                ok &= np.minimum(gap, 1.0 - gap) <= resolution
        return 1.0 if ok.any() else 0.0

    if factor_projection == "heisenberg-base":
        if sys.tag not in (HEIS_NILFLOW, HEIS_NILSYSTEM):
            raise ValueError("heisenberg-base projection needs a Heisenberg system")
        idx = np.zeros(len(ts), dtype=np.int64)
        ok = np.ones(len(ts), dtype=bool)
        for a in alphas:
            comp = _component_coords(sys, x, a * ts)
            for c in (0, 1):
                gap = np.abs(comp[:, c] - base[c]) % 1.0
                ok &= np.minimum(gap, 1.0 - gap) <= resolution
            digit = np.minimum((comp[:, 2] * bins).astype(np.int64), bins - 1)
            idx = idx * bins + digit
        hit = len(np.unique(idx[ok]))
        return hit / float(bins ** d)

    # torus-coord-0: fiber over the first coordinate
    if sys.tag not in (TORUS_FLOW, TORUS_MAP):
        raise ValueError("torus-coord-0 projection needs a torus system")
    dim = sys.dim
    if dim < 2:
        raise ValueError("torus-coord-0 needs dimension >= 2")
    idx = np.zeros(len(ts), dtype=np.int64)
    ok = np.ones(len(ts), dtype=bool)
    for a in alphas:
        comp = _component_coords(sys, x, a * ts)
        gap = np.abs(comp[:, 0] - base[0]) % 1.0
        ok &= np.minimum(gap, 1.0 - gap) <= resolution
        for c in range(1, dim):
            digit = np.minimum((comp[:, c] * bins).astype(np.int64), bins - 1)
            idx = idx * bins + digit
    hit = len(np.unique(idx[ok]))
    return hit / float(bins ** ((dim - 1) * d))


def _component_coords(sys: SystemHandle, x, ts: np.ndarray) -> np.ndarray:
    """Vectorized canonical coordinates of evolve(x, t) over a time array."""
    omega = _torus_phase_step(sys)
    if omega is not None:
        base = np.array(sys.coords(x))
        return (base[None, :] + np.outer(ts, omega)) % 1.0
    if sys.tag == HEIS_NILFLOW:
        return _nil_evolve_coords(sys.spec, x, ts)
    if sys.tag == HEIS_NILSYSTEM:
        return _nil_evolve_coords(sys.spec.flow, x, ts * sys.spec.step)
    out = np.empty((len(ts), sys.dim))
    for i, t in enumerate(ts):
        out[i] = sys.coords(sys.evolve(x, float(t)))
    return out
