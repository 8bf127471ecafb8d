"""Exact arithmetic on fibered epistemic measures.

Every measure built by the fibered theories is a finite mixture of pieces
``weight * delta(fiber) x Uniform[lo, hi]``: a point mass in the projective
coordinate times a uniform law on a sub-interval of the auxiliary coordinate
``p``.  Pieces also carry a tag path so that pieces living in different
copies of an ontic space (convex combinations) never overlap.  Within one
``(tag, fiber)`` group the p-density is piecewise constant, so total
variation reduces to a sum over a common refinement of breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ontic.points import OnticBatch, OnticPoint
from ontic.qstate import ProjState, same_state

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiberComponent:
    weight: float
    fiber: ProjState
    lo: float = 0.0
    hi: float = 1.0
    tag: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.weight >= 0.0:
            raise ValueError(f"negative weight {self.weight}")
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError(f"interval [{self.lo}, {self.hi}] must satisfy 0 <= lo < hi <= 1")
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "tag", tuple(int(t) for t in self.tag))

    @property
    def density(self) -> float:
        return self.weight / (self.hi - self.lo)

    def retagged(self, prefix: int, scale: float = 1.0) -> "FiberComponent":
        return FiberComponent(self.weight * scale, self.fiber, self.lo, self.hi, (prefix,) + self.tag)

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "fiber": self.fiber.to_json(),
            "lo": self.lo,
            "hi": self.hi,
            "tag": list(self.tag),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FiberComponent":
        return cls(obj["weight"], ProjState.from_json(obj["fiber"]), obj["lo"], obj["hi"], tuple(obj.get("tag", ())))


@dataclass(frozen=True, eq=False)
class FiberedMeasure:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if comps:
            d = comps[0].fiber.d
            if any(c.fiber.d != d for c in comps):
                raise ValueError("components live in different dimensions")
        object.__setattr__(self, "components", comps)

    @classmethod
    def point(cls, psi: ProjState) -> "FiberedMeasure":
        """Point mass at ``psi`` with ``p`` uniform on [0, 1]."""
        return cls((FiberComponent(1.0, psi),))

    @property
    def d(self) -> int:
        return self.components[0].fiber.d

    @property
    def total_mass(self) -> float:
        return float(sum(c.weight for c in self.components))

    def is_normalized(self, tol: float = MASS_TOL) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def mass_by_tag(self, depth: int = 1) -> dict[tuple, float]:
        out: dict[tuple, float] = {}
        for c in self.components:
            key = c.tag[:depth]
            out[key] = out.get(key, 0.0) + c.weight
        return out

    def canonical(self) -> "FiberedMeasure":
        """Unique normal form: refined, merged, sorted by tag, fiber, interval."""
        comps = []
        for tag, fiber, pieces in _group(self.components):
            for lo, hi, dens in _merged_cells(pieces):
                comps.append(FiberComponent(dens * (hi - lo), fiber, lo, hi, tag))
        return FiberedMeasure(tuple(comps))

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, obj: dict) -> "FiberedMeasure":
        return cls(tuple(FiberComponent.from_json(c) for c in obj["components"]))


def _group(components: Iterable[FiberComponent]):
    """Yield ``(tag, fiber, pieces)`` for components sharing tag and ray."""
    by_tag: dict[tuple, list] = {}
    for c in components:
        if c.weight == 0.0:
            continue
        bucket = by_tag.setdefault(c.tag, [])
        for entry in bucket:
            if same_state(entry[0], c.fiber):
                entry[1].append(c)
                break
        else:
            bucket.append([c.fiber, [c]])
    for tag in sorted(by_tag):
        for fiber, pieces in by_tag[tag]:
            yield tag, fiber, pieces


def _cells(pieces: Sequence[FiberComponent], breaks: np.ndarray) -> np.ndarray:
    """Mass of ``pieces`` on each cell of the refinement ``breaks``."""
    mass = np.zeros(len(breaks) - 1)
    for c in pieces:
        i0 = np.searchsorted(breaks, c.lo)
        i1 = np.searchsorted(breaks, c.hi)
        widths = np.diff(breaks[i0 : i1 + 1])
        mass[i0:i1] += c.weight * widths / (c.hi - c.lo)
    return mass


def _merged_cells(pieces: Sequence[FiberComponent]):
    breaks = np.unique([x for c in pieces for x in (c.lo, c.hi)])
    mass = _cells(pieces, breaks)
    widths = np.diff(breaks)
    dens = mass / widths
    out: list[list[float]] = []
    for lo, hi, m, rho in zip(breaks[:-1], breaks[1:], mass, dens):
        if m <= 0.0:
            continue
        if out and out[-1][1] == lo and abs(out[-1][2] - rho) <= 1e-12 * max(1.0, rho):
            out[-1][1] = hi
        else:
            out.append([lo, hi, rho])
    return [tuple(x) for x in out]


def _check_pair(m1: FiberedMeasure, m2: FiberedMeasure, tol: float) -> None:
    for m in (m1, m2):
        if not m.components:
            raise ValueError("empty measure")
        if not m.is_normalized(tol):
            raise ValueError(f"measure has total mass {m.total_mass!r}, expected 1")
    if m1.d != m2.d:
        raise ValueError("measures live in different dimensions")


def _shared_fibers(m1: FiberedMeasure, m2: FiberedMeasure):
    """``(pieces1, pieces2)`` per (tag, ray), grouped so identical rays share a refinement."""
    by_tag: dict[tuple, list] = {}
    for which, m in enumerate((m1, m2)):
        for c in m.components:
            if c.weight == 0.0:
                continue
            bucket = by_tag.setdefault(c.tag, [])
            for entry in bucket:
                if same_state(entry[0], c.fiber):
                    entry[1 + which].append(c)
                    break
            else:
                entry = [c.fiber, [], []]
                entry[1 + which].append(c)
                bucket.append(entry)
    for bucket in by_tag.values():
        for _, p1, p2 in bucket:
            yield p1, p2


def _refined(p1, p2):
    breaks = np.unique([x for c in p1 + p2 for x in (c.lo, c.hi)])
    return _cells(p1, breaks), _cells(p2, breaks)


def total_variation(m1: FiberedMeasure, m2: FiberedMeasure, tol: float = MASS_TOL) -> float:
    """Exact total variation distance ``(1/2) * integral |m1 - m2|``."""
    _check_pair(m1, m2, tol)
    total = 0.0
    for p1, p2 in _shared_fibers(m1, m2):
        if not p1 or not p2:
            total += sum(c.weight for c in p1) + sum(c.weight for c in p2)
            continue
        c1, c2 = _refined(p1, p2)
        total += float(np.abs(c1 - c2).sum())
    return min(max(0.5 * total, 0.0), 1.0)


def overlap_mass(m1: FiberedMeasure, m2: FiberedMeasure, tol: float = MASS_TOL) -> float:
    """Shared mass ``integral min(m1, m2)``, equal to ``1 - TV``.

    Summed directly rather than as ``1 - TV`` so disjoint measures give exactly 0.
    """
    _check_pair(m1, m2, tol)
    shared = 0.0
    for p1, p2 in _shared_fibers(m1, m2):
        if p1 and p2:
            shared += float(np.minimum(*_refined(p1, p2)).sum())
    return min(shared, 1.0)


def tagged_mixture(parts: Sequence[tuple[float, FiberedMeasure]]) -> FiberedMeasure:
    """Convex combination on the tagged disjoint union of the parts' ontic spaces."""
    coeffs = np.array([c for c, _ in parts], dtype=float)
    if coeffs.size == 0 or (coeffs < 0).any() or abs(coeffs.sum() - 1.0) > MASS_TOL:
        raise ValueError("coefficients must be non-negative and sum to 1")
    comps = [c.retagged(i, coef) for i, (coef, m) in enumerate(parts) for c in m.components]
    return FiberedMeasure(tuple(comps))


def sample(m: FiberedMeasure, rng: np.random.Generator) -> OnticPoint:
    """One ontic point drawn from ``m``."""
    if not m.components:
        raise ValueError("empty measure")
    w = np.array([c.weight for c in m.components])
    if abs(w.sum() - 1.0) > MASS_TOL:
        raise ValueError("measure is not normalized")
    c = m.components[int(rng.choice(w.size, p=w / w.sum()))]
    return OnticPoint(c.fiber, float(c.lo + (c.hi - c.lo) * rng.random()), c.tag)


def sample_batch(m: FiberedMeasure, n: int, rng: np.random.Generator) -> OnticBatch:
    """``n`` i.i.d. draws, grouped by component (order carries no information)."""
    if not m.components:
        raise ValueError("empty measure")
    w = np.array([c.weight for c in m.components])
    if abs(w.sum() - 1.0) > MASS_TOL:
        raise ValueError("measure is not normalized")
    counts = rng.multinomial(n, w / w.sum())
    depth = max(len(c.tag) for c in m.components)
    states = np.empty((n, m.d), dtype=complex)
    p = np.empty(n)
    tags = np.zeros((n, depth), dtype=np.int64)
    at = 0
    for c, k in zip(m.components, counts):
        if k == 0:
            continue
        if len(c.tag) != depth:
            raise ValueError("components carry tag paths of different depth")
        states[at : at + k] = c.fiber.amplitudes
        p[at : at + k] = c.lo + (c.hi - c.lo) * rng.random(k)
        tags[at : at + k] = c.tag
        at += k
    return OnticBatch(states, p, tags)
