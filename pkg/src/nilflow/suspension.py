"""Unit-ceiling suspension flow over a discrete base system.

Points are classes [x, s] with height s in [0, 1); the gluing identifies
(x, 1) with (Tx, 0), so canonicalization applies the integer part of the
height through the base map.  Includes the finite-resolution check of
the witness-transfer statement between a suspension pair and its base
pair, and the integer-part orbit projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .systems import SUSPENSION, SuspensionSpec, SystemHandle

INTEGRAL_GAP_TOL = 1e-12
BASE_MATCH_TOL = 1e-10


@dataclass(frozen=True)
class SuspensionPoint:
    base: object
    s: float


def suspend(base: SystemHandle) -> SystemHandle:
    """Suspension flow handle over a discrete base system."""
    if not base.discrete:
        raise ValueError("suspension needs a discrete base system")
    return SystemHandle(SUSPENSION, SuspensionSpec(base))


def susp_canonical(base_sys: SystemHandle, x, s: float) -> SuspensionPoint:
    """Canonical representative [T^floor(s) x, s - floor(s)]."""
    n = math.floor(s)
    if n == 0:
        return SuspensionPoint(x, s)
    return SuspensionPoint(base_sys.evolve(x, n), s - n)


def susp_equivalent(base_sys: SystemHandle, p: SuspensionPoint,
                    q: SuspensionPoint) -> bool:
    """(x, s) ~ (y, t) iff s - t is an integer and T^{s-t} x = y."""
    gap = p.s - q.s
    k = round(gap)
    if abs(gap - k) > INTEGRAL_GAP_TOL:
        return False
    return base_sys.dist(base_sys.evolve(p.base, k), q.base) <= BASE_MATCH_TOL


def susp_evolve(base_sys: SystemHandle, p: SuspensionPoint, t: float) -> SuspensionPoint:
    return susp_canonical(base_sys, p.base, p.s + t)


def _chart_gap(base_sys: SystemHandle, p: SuspensionPoint, q: SuspensionPoint) -> float:
    best = math.inf
    for k in (-1, 0, 1):
        d = max(base_sys.dist(base_sys.evolve(p.base, k), q.base),
                abs(p.s - k - q.s))
        if d < best:
            best = d
    return best


def susp_metric(base_sys: SystemHandle, p: SuspensionPoint,
                q: SuspensionPoint) -> float:
    """Glued-chart metric; the k in {-1, 0, 1} window covers canonical heights."""
    return min(_chart_gap(base_sys, p, q), _chart_gap(base_sys, q, p))


@dataclass(frozen=True)
class SuspensionTransferReport:
    """Outcome of the suspension/base witness-transfer probe."""

    forward: bool
    backward: bool | None
    height_gap_integral: bool
    forward_status: str
    backward_status: str | None
    checked: int

    @property
    def agreement(self) -> bool:
        """Does the outcome match: forward iff integral gap and base witness."""
        if not self.height_gap_integral:
            return not self.forward
        return self.forward == bool(self.backward)

    def to_jsonable(self) -> dict:
        return {"forward": self.forward, "backward": self.backward,
                "height_gap_integral": self.height_gap_integral,
                "forward_status": self.forward_status,
                "backward_status": self.backward_status,
                "agreement": self.agreement, "checked": self.checked}


def susp_rp_transfer_check(base_sys: SystemHandle, x1, x2, s1: float, s2: float,
                           d: int, delta: float, budget: int) -> SuspensionTransferReport:
    """Finite-resolution probe of witness transfer between suspension and base.

    Forward searches the suspension pair ([x1, s1], [x2, s2]) at delta;
    backward searches the base pair (T^{s1-s2} x1, x2), attempted only
    when the height gap is integral (otherwise the circle factor already
    obstructs membership).
    """
    from .proximality import rp_witness_search
    susp_sys = suspend(base_sys)
    p1 = susp_canonical(base_sys, x1, s1)
    p2 = susp_canonical(base_sys, x2, s2)
    fwd = rp_witness_search(susp_sys, p1, p2, d, delta, budget)
    gap = s1 - s2
    k = round(gap)
    integral = abs(gap - k) <= INTEGRAL_GAP_TOL
    bwd = None
    if integral:
        bwd = rp_witness_search(base_sys, base_sys.evolve(x1, k), x2, d, delta, budget)
    return SuspensionTransferReport(
        forward=fwd.found,
        backward=None if bwd is None else bwd.found,
        height_gap_integral=integral,
        forward_status=fwd.status,
        backward_status=None if bwd is None else bwd.status,
        checked=fwd.checked + (bwd.checked if bwd else 0),
    )


def integer_part_orbit(base_sys: SystemHandle, x, times: Sequence[float],
                       resolution: float) -> float:
    """Coverage of the base space by {T^[t] x : t in times} at the given pitch."""
    from .proximality import _torus_phase_step
    bins = int(round(1.0 / resolution))
    ms = np.floor(np.asarray(times, dtype=float))
    omega = _torus_phase_step(base_sys)
    if omega is not None:
        base = np.array(base_sys.coords(x))
        phases = (base[None, :] + np.outer(ms, omega)) % 1.0
        idx = np.zeros(len(ms), dtype=np.int64)
        for c in range(phases.shape[1]):
            digit = np.minimum((phases[:, c] * bins).astype(np.int64), bins - 1)
            idx = idx * bins + digit
        hit = len(np.unique(idx))
        return hit / float(bins ** phases.shape[1])
    cells = set()
    for m in ms:
        c = base_sys.coords(base_sys.evolve(x, int(m)))
        cells.add(tuple(min(int(v * bins), bins - 1) for v in c))
    return len(cells) / float(bins ** base_sys.dim)
