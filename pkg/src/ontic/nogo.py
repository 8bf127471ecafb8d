"""Certificates for the objects used by the no-go arguments.

Deficiency regions and radii, orthogonal-support and ball-response checks,
the explicit ``u_i`` family, the nullifying basis, and the fat Cantor set
with its evasion example.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ontic.measures import FiberedMeasure
from ontic.models import KSTheory, ks_profile
from ontic.qstate import (
    OrthoBasis,
    ProjState,
    alpha_gauge,
    fs_distance,
    gram_schmidt,
    haar_states,
)
from ontic.rng import SeedLike, make_rng
from ontic.theory import Theory, wilson_se

CHUNK = 1 << 16


class DiscriminantError(ValueError):
    """The quadratic for the nullifying basis has no real root."""

    def __init__(self, discriminant: float, max_overlap: float):
        self.discriminant = discriminant
        self.max_overlap = max_overlap
        super().__init__(
            f"discriminant {discriminant:.6g} < 0; need |<psi1|psi2>| <= {max_overlap:.6g} for these phases"
        )


class CoplanarError(ValueError):
    """``psi3`` lies in the span of ``psi1`` and ``psi2``."""


# --------------------------------------------------------------------------
# deficiency region


@dataclass
class Proportion:
    estimate: float
    se: float
    lo: float
    hi: float
    n: int
    hits: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "se": self.se, "lo": self.lo, "hi": self.hi, "n": self.n, "hits": self.hits}


def _wilson(hits: int, n: int, z: float = 3.0) -> Proportion:
    p = hits / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z * wilson_se(p, n, z)
    return Proportion(p, wilson_se(p, n, z), max(0.0, centre - half), min(1.0, centre + half), n, hits)


def in_deficiency_region(basis: OrthoBasis, states: np.ndarray) -> np.ndarray:
    """Rows ``lam`` with ``|<phi_i|lam>|^2 < 1/2`` for every basis vector."""
    probs = np.abs(np.atleast_2d(states) @ basis.matrix.conj()) ** 2
    return (probs < 0.5).all(axis=1)


def deficiency_oracle(d: int) -> float:
    """Haar measure of the deficiency region.

    ``|<phi_i|lam>|^2`` are uniform on the simplex, at most one of them can
    exceed 1/2, and each does so with probability ``2^{-(d-1)}``.
    """
    return 1.0 - d * 0.5 ** (d - 1)


def deficiency_fraction(basis: OrthoBasis, n: int, rng: SeedLike, z: float = 3.0) -> Proportion:
    if n < 10_000:
        raise ValueError("need at least 1e4 samples")
    rng = make_rng(rng)
    hits = 0
    for start in range(0, n, CHUNK):
        m = min(CHUNK, n - start)
        hits += int(in_deficiency_region(basis, haar_states(basis.d, m, rng)).sum())
    return _wilson(hits, n, z)


# --------------------------------------------------------------------------
# radii


def _bisect_support(profile, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Boundary between ``profile > 0`` (at ``lo``) and ``profile == 0`` (at ``hi``)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if profile(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def measure_radius(m: FiberedMeasure, psi: ProjState) -> float:
    return max(fs_distance(psi, c.fiber) for c in m.components if c.weight > 0.0)


def estimate_radius(t: Theory, psi: ProjState, n: int = 0, rng: SeedLike = None) -> float:
    """Largest FS distance from ``psi`` at which ``mu_psi`` still has mass.

    Exact for fibered measures; for the KS density the support boundary is
    found by bisection on the profile as a function of FS distance.
    """
    if isinstance(t, KSTheory):
        prof = lambda r: float(ks_profile(math.cos(math.pi * r / 2.0) ** 2))
        return _bisect_support(prof, 0.0, 1.0)
    return measure_radius(t.mu(psi), psi)


# --------------------------------------------------------------------------
# orthogonal support and ball response


def orthogonal_support_check(
    t: Theory, phi: ProjState, psi: ProjState, basis: OrthoBasis, n: int, rng: SeedLike, tol: float = 1e-12
) -> int:
    """Points drawn from ``mu_phi`` on which ``basis`` can return ``psi``.

    Responses at or below ``tol`` count as zero; for 0/1 rules this is exact.
    """
    if abs(np.vdot(phi.amplitudes, psi.amplitudes)) > 1e-12:
        raise ValueError("phi and psi must be orthogonal")
    k = basis.index_of(psi)
    rng = make_rng(rng)
    bad = 0
    for start in range(0, n, CHUNK):
        batch = t.sample(phi, min(CHUNK, n - start), rng)
        bad += int((t.xi_batch(basis, batch)[:, k] > tol).sum())
    return bad


def ball_volume(d: int, eps: float) -> float:
    """Haar measure of the FS ball of radius ``eps`` in ``CP^{d-1}``."""
    return math.sin(math.pi * min(eps, 1.0) / 2.0) ** (2 * (d - 1))


def sample_ball(alpha: ProjState, eps: float, n: int, rng: np.random.Generator, min_acceptance: float = 1e-4):
    """``n`` uniform points of ``B_eps(alpha)``, plus the number of Haar proposals used.

    Rejection from Haar while the acceptance rate is reasonable; otherwise
    ``1 - |<alpha|lam>|^2`` is drawn from its exact conditional law on the cap.
    """
    d = alpha.d
    vol = ball_volume(d, eps)
    cos2 = math.cos(math.pi * min(eps, 1.0) / 2.0) ** 2
    if vol >= min_acceptance:
        out, proposals = [], 0
        need = n
        while need > 0:
            m = max(1024, int(1.2 * need / vol))
            cand = haar_states(d, m, rng)
            proposals += m
            keep = cand[np.abs(cand @ alpha.amplitudes.conj()) ** 2 > cos2]
            out.append(keep[:need])
            need -= len(out[-1])
        return np.vstack(out), proposals
    one_minus_x = (1.0 - cos2) * rng.random(n) ** (1.0 / (d - 1))
    a = alpha.amplitudes
    v = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    v -= np.outer(v @ a.conj(), a)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    lam = np.sqrt(1.0 - one_minus_x)[:, None] * a[None, :] + np.sqrt(one_minus_x)[:, None] * v
    return lam, 0


@dataclass
class BallReport:
    j: int
    masses: list[float]
    volume: float
    acceptance: float | None

    def to_json(self) -> dict:
        return {"j": self.j, "masses": self.masses, "volume": self.volume, "acceptance": self.acceptance}


def ball_response_check(
    t: Theory, basis: OrthoBasis, alpha: ProjState, eps: float, n: int, rng: SeedLike
) -> BallReport:
    """An outcome ``j`` whose response has positive mass on ``B_eps(alpha)``.

    Ontic points over the ball are lifted with ``p`` and tags uniform; masses
    are Haar-measure weighted, so they sum to the ball volume.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = make_rng(rng)
    states, proposals = sample_ball(alpha, eps, n, rng)
    batch = t.lift(states, rng)
    vol = ball_volume(alpha.d, eps)
    masses = t.xi_batch(basis, batch).mean(axis=0) * vol
    acc = n / proposals if proposals else None
    return BallReport(int(np.argmax(masses)), [float(m) for m in masses], vol, acc)


# --------------------------------------------------------------------------
# the u_i family


def ui_coefficients(d: int) -> tuple[float, float]:
    return math.sqrt(d / (2.0 * (d - 1) ** 2)), math.sqrt((d - 2) / (4.0 * (d - 1)))


@dataclass
class UiFamily:
    d: int
    basis: OrthoBasis
    alpha: ProjState
    a_coef: float
    b_coef: float
    u: list[np.ndarray]
    tangents: np.ndarray
    singular_values: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        s = self.singular_values
        return int((s > 1e-8 * s.max()).sum())

    def max_phi_overlap(self) -> float:
        return max(abs(np.vdot(self.basis[i].amplitudes, v)) for i, v in enumerate(self.u))

    def max_alpha_defect(self) -> float:
        return max(abs(np.vdot(self.alpha.amplitudes, v) - 1.0 / math.sqrt(2.0)) for v in self.u)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "a_coef": self.a_coef,
            "b_coef": self.b_coef,
            "max_phi_overlap": self.max_phi_overlap(),
            "max_alpha_defect": self.max_alpha_defect(),
            "rank": self.rank,
            "singular_values": [float(s) for s in self.singular_values],
        }


def build_ui_family(basis: OrthoBasis) -> UiFamily:
    """States ``u_i`` orthogonal to ``phi_i`` with ``<u_i|alpha> = 1/sqrt 2``.

    Tangent vectors are the components orthogonal to ``alpha`` expressed in an
    orthonormal basis of ``alpha``'s complement, viewed as real vectors.
    """
    d = basis.d
    if d < 3:
        raise ValueError("the u_i family needs d >= 3")
    a, b = ui_coefficients(d)
    phi = basis.matrix.T  # rows
    alpha_vec = phi.sum(axis=0) / math.sqrt(d)
    alpha = ProjState.from_vector(alpha_vec)
    alpha_vec = alpha_gauge(alpha_vec, alpha.amplitudes)
    u = []
    for i in range(d):  # 0-based: u[i] pairs with phi_i
        v = a * (phi.sum(axis=0) - phi[i])
        if i < d - 2:
            j, k = i + 1, i + 2
        elif i == d - 2:
            j, k = d - 1, 0
        else:
            j, k = 0, 1
        coef = b if i == d - 1 else 1j * b
        v = v + coef * phi[j] - coef * phi[k]
        u.append(alpha_gauge(v, alpha_vec))
    comp = np.linalg.svd(np.eye(d) - np.outer(alpha_vec, alpha_vec.conj()))[0][:, : d - 1]
    tangents = np.array([comp.conj().T @ (v - np.vdot(alpha_vec, v) * alpha_vec) for v in u])
    real = np.hstack([tangents.real, tangents.imag])
    sv = np.linalg.svd(real, compute_uv=False)
    fam = UiFamily(d, basis, ProjState.from_vector(alpha_vec), a, b, u, tangents, sv)
    if fam.max_phi_overlap() > 1e-12 or fam.max_alpha_defect() > 1e-12 or fam.rank != d:
        raise AssertionError(f"u_i family invariants fail at d={d}: {fam.to_json()}")
    return fam


# --------------------------------------------------------------------------
# nullifying basis


@dataclass
class NullifyingBasis:
    basis: OrthoBasis
    x: complex
    a: complex
    b: complex
    c: complex
    discriminant: float | None

    def residuals(self, psis) -> list[float]:
        return [abs(np.vdot(self.basis[i].amplitudes, p.amplitudes)) for i, p in enumerate(psis)]

    def gram_defect(self) -> float:
        m = self.basis.matrix
        return float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())


def nullifying_discriminant(a: complex, b: complex, c: complex) -> tuple[float, complex, float, float]:
    """``(D, w, q, R)`` for the real quadratic in ``p``."""
    ba = b * np.conj(a)
    beta = abs(ba)
    w = ba / beta
    cw = c * np.conj(w)
    q, r = cw.imag, cw.real
    return 1.0 - 4.0 * beta * (beta * (1.0 + q * q) + r), w, q, r


def _max_overlap(b: complex, q: float, r: float) -> float:
    """Largest ``|<psi1|psi2>|`` with these phases for which the root is real."""
    bb = abs(b)
    qa = 4.0 * (1.0 + q * q) * bb * bb
    qb = 4.0 * r * bb
    t = (-qb + math.sqrt(qb * qb + 4.0 * qa)) / (2.0 * qa)
    return t / math.sqrt(1.0 + t * t)


def build_nullifying_basis(psi1: ProjState, psi2: ProjState, psi3: ProjState, tol: float = 1e-10) -> NullifyingBasis:
    """Orthonormal basis with ``<e_1|psi_1> = <e_2|psi_2> = <e_3|psi_3> = 0``."""
    d = psi1.d
    if not d == psi2.d == psi3.d or d < 3:
        raise ValueError("need three states of a common dimension d >= 3")
    u1 = psi1.amplitudes
    o12 = np.vdot(u1, psi2.amplitudes)
    w2 = psi2.amplitudes - o12 * u1
    r2 = np.linalg.norm(w2)
    if r2 <= tol:
        raise ValueError("psi2 coincides with psi1")
    u2 = w2 / r2
    a = o12 / r2
    w3 = psi3.amplitudes - np.vdot(u1, psi3.amplitudes) * u1 - np.vdot(u2, psi3.amplitudes) * u2
    r3 = np.linalg.norm(w3)
    if r3 <= tol:
        raise CoplanarError("psi3 lies in the plane of psi1 and psi2")
    u3 = w3 / r3
    b = np.vdot(u1, psi3.amplitudes) / r3
    c = np.vdot(u2, psi3.amplitudes) / r3
    disc = None
    if abs(a) <= 1e-15 or abs(b) <= 1e-15:
        x = c
    else:
        disc, w, q, r = nullifying_discriminant(a, b, c)
        if disc < 0:
            raise DiscriminantError(disc, _max_overlap(b, q, r))
        beta = abs(b * a)
        cc = beta * (1.0 + q * q) + r
        p = 2.0 * cc / (1.0 + math.sqrt(disc))
        x = complex(p, q) * w
    xc = np.conj(x)
    ac = np.conj(a)
    e1 = x * u2 + u3
    e2 = u1 - ac * u2 + ac * xc * u3
    e3 = a * (1.0 + abs(x) ** 2) * u1 + u2 - xc * u3
    vecs = [e1, e2, e3]
    if d > 3:
        span = np.array([u1, u2, u3])
        resid = np.eye(d) - span.T @ span.conj()
        order = np.argsort(-np.linalg.norm(resid, axis=0), kind="stable")
        vecs += [np.eye(d)[:, k] for k in order[: d - 3]]
    states = gram_schmidt(vecs)
    return NullifyingBasis(OrthoBasis(tuple(states)), complex(x), complex(a), complex(b), complex(c), disc)


# --------------------------------------------------------------------------
# interval sets and the fat Cantor set


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed intervals with exact rational endpoints."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        ivs = tuple((Fraction(lo), Fraction(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
        for (_, h0), (l1, _) in zip(ivs, ivs[1:]):
            if not h0 < l1:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def clip(self, lo, hi) -> "IntervalSet":
        lo, hi = Fraction(lo), Fraction(hi)
        out = [(max(a, lo), min(b, hi)) for a, b in self.intervals if b >= lo and a <= hi]
        return IntervalSet(tuple(out))

    def measure_within(self, lo, hi) -> Fraction:
        return self.clip(lo, hi).measure

    def contains(self, x) -> bool:
        x = Fraction(x)
        i = bisect.bisect_right([a for a, _ in self.intervals], x) - 1
        return i >= 0 and x <= self.intervals[i][1]

    def complement_within(self, lo, hi) -> list[tuple[Fraction, Fraction]]:
        """Open gaps of ``[lo, hi]`` not covered by the set."""
        lo, hi = Fraction(lo), Fraction(hi)
        gaps, at = [], lo
        for a, b in self.clip(lo, hi).intervals:
            if a > at:
                gaps.append((at, a))
            at = max(at, b)
        if at < hi:
            gaps.append((at, hi))
        return gaps

    def to_rows(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in self.intervals]


MATERIALIZE_LIMIT = 20


class FatCantorSet:
    """Fat Cantor set truncated at ``depth``, held in exact dyadic integers.

    At step ``i`` every remaining interval loses its open middle part of
    relative length ``4^{-i}``.  All intervals at a level are congruent, so
    the set is determined by the per-level lengths; endpoints are integers
    over the common denominator ``2^{depth^2 + 2 depth}``.
    """

    def __init__(self, depth: int):
        if not 0 <= depth <= 30:
            raise ValueError("depth must lie in [0, 30]")
        self.depth = depth
        self.exponent = depth * depth + 2 * depth
        self.denominator = 1 << self.exponent
        lengths = [self.denominator]
        for i in range(1, depth + 1):
            prev = lengths[-1]
            gap = prev >> (2 * i)
            lengths.append((prev - gap) // 2)
        self.lengths = lengths  # numerators of L_0..L_depth
        # offset of the right child's start inside a level-(i-1) interval
        self.shifts = [None] + [lengths[i - 1] - lengths[i] for i in range(1, depth + 1)]

    def __len__(self) -> int:
        return 1 << self.depth

    @property
    def measure(self) -> Fraction:
        return Fraction(self.lengths[-1] << self.depth, self.denominator)

    def gap_lengths(self) -> list[Fraction]:
        return [Fraction(self.shifts[i] - self.lengths[i], self.denominator) for i in range(1, self.depth + 1)]

    def _scaled(self, x) -> Fraction:
        return Fraction(x) * self.denominator

    def measure_below(self, y) -> Fraction:
        """Measure of ``B intersect (-inf, y]``, exactly, by descending the tree."""
        y = self._scaled(y)
        if y <= 0:
            return Fraction(0)
        if y >= self.denominator:
            return self.measure
        pos, total = 0, 0
        for i in range(1, self.depth + 1):
            sub = self.lengths[-1] << (self.depth - i)
            if y >= pos + self.shifts[i]:
                total += sub
                pos += self.shifts[i]
            elif y >= pos + self.lengths[i]:
                return Fraction(total + sub, self.denominator)
        return (total + min(max(y - pos, 0), self.lengths[-1])) / self.denominator

    def measure_within(self, lo, hi) -> Fraction:
        if Fraction(hi) <= Fraction(lo):
            return Fraction(0)
        return self.measure_below(hi) - self.measure_below(lo)

    def contains(self, x) -> bool:
        y = self._scaled(x)
        if y < 0 or y > self.denominator:
            return False
        pos = 0
        for i in range(1, self.depth + 1):
            if y >= pos + self.shifts[i]:
                pos += self.shifts[i]
            elif y > pos + self.lengths[i]:
                return False
        return y <= pos + self.lengths[-1]

    def left_endpoints(self) -> list[int]:
        starts = [0]
        for i in range(1, self.depth + 1):
            s = self.shifts[i]
            starts = [v for p in starts for v in (p, p + s)]
        return starts

    def materialize(self) -> IntervalSet:
        if self.depth > MATERIALIZE_LIMIT:
            raise ValueError(f"refusing to list 2^{self.depth} intervals (limit depth {MATERIALIZE_LIMIT})")
        den, ln = self.denominator, self.lengths[-1]
        return IntervalSet(tuple((Fraction(s, den), Fraction(s + ln, den)) for s in self.left_endpoints()))

    def to_rows(self) -> list[tuple[float, float]]:
        den, ln = self.denominator, self.lengths[-1]
        return [(s / den, (s + ln) / den) for s in self.left_endpoints()]


def fat_cantor(depth: int) -> FatCantorSet:
    return FatCantorSet(depth)


def fat_cantor_measure(depth: int) -> Fraction:
    """``1 - sum of removed lengths``, with every removed gap listed level by level."""
    length, removed = Fraction(1), Fraction(0)
    for i in range(1, depth + 1):
        gap = length / 4**i
        removed += (1 << (i - 1)) * gap
        length = (length - gap) / 2
    return 1 - removed


def fat_cantor_product(depth: int) -> Fraction:
    out = Fraction(1)
    for i in range(1, depth + 1):
        out *= 1 - Fraction(1, 4**i)
    return out


# --------------------------------------------------------------------------
# evasion


@dataclass
class EvasionCertificate:
    x: Fraction
    disjoint: bool
    boundary_masses: list[Fraction]
    support_measure: Fraction
    b_measure_in_window: Fraction

    @property
    def near_boundary(self) -> bool:
        return all(m > 0 for m in self.boundary_masses)

    @property
    def additive(self) -> bool:
        return self.support_measure == 2 - self.b_measure_in_window

    def passed(self, b_positive: bool) -> bool:
        return self.disjoint and self.near_boundary and self.additive and b_positive

    def to_json(self) -> dict:
        return {
            "x": float(self.x),
            "disjoint": self.disjoint,
            "min_boundary_mass": float(min(self.boundary_masses)) if self.boundary_masses else None,
            "support_measure": float(self.support_measure),
            "b_measure_in_window": float(self.b_measure_in_window),
        }


@dataclass
class EvasionReport:
    b_measure: Fraction
    grid: int
    certificates: list[EvasionCertificate]

    @property
    def b_positive(self) -> bool:
        return self.b_measure > 0

    @property
    def passed(self) -> bool:
        return all(c.passed(self.b_positive) for c in self.certificates)

    def to_json(self) -> dict:
        return {
            "b_measure": float(self.b_measure),
            "b_measure_exact": str(self.b_measure),
            "grid": self.grid,
            "pass": self.passed,
            "certificates": [c.to_json() for c in self.certificates],
        }


def _support_pieces(b, x: Fraction, lo: Fraction, hi: Fraction):
    """``[x-1, x+1]`` minus ``b``: outer pieces and the gaps inside ``[lo, hi]``."""
    left, right = x - 1, x + 1
    pieces = []
    if left < lo:
        pieces.append((left, min(lo, right)))
    if right > hi:
        pieces.append((max(hi, left), right))
    return pieces


def evasion_demo(b, xs, grid: int = 20, spot_checks: int = 64, rng: SeedLike = 0) -> EvasionReport:
    """Certify that ``mu_x`` (uniform on ``[x-1, x+1]`` minus ``b``) avoids ``b``.

    ``b`` is an :class:`IntervalSet` or :class:`FatCantorSet` inside ``[0, 1]``.
    For each x: (a) the support misses ``b``; (b) it has positive mass in
    ``[1+x-delta, 1+x]`` for ``delta = 2^-1 .. 2^-grid``; plus the additivity
    identity for the support's measure.  Certificate (c), ``m(b) > 0``, is
    global.
    """
    rng = make_rng(rng)
    b_measure = b.measure
    certs = []
    for x in xs:
        x = Fraction(x)
        left, right = x - 1, x + 1
        in_window = b.measure_within(left, right)
        # support = window minus b, so its measure is the window's minus b's share
        gaps_measure = _gap_measure(b, left, right)
        outer = sum((hi - lo for lo, hi in _support_pieces(b, x, Fraction(0), Fraction(1))), Fraction(0))
        support_measure = outer + gaps_measure
        disjoint = _disjoint(b, left, right, rng, spot_checks)
        masses = []
        for j in range(1, grid + 1):
            delta = Fraction(1, 1 << j)
            lo, hi = right - delta, right
            masses.append(delta - b.measure_within(lo, hi))
        certs.append(EvasionCertificate(x, disjoint, masses, support_measure, in_window))
    return EvasionReport(b_measure, grid, certs)


def _gap_measure(b, lo: Fraction, hi: Fraction) -> Fraction:
    """Measure of the uncovered part of ``[max(lo,0), min(hi,1)]``, from the gap structure."""
    a, z = max(lo, Fraction(0)), min(hi, Fraction(1))
    if z <= a:
        return Fraction(0)
    if isinstance(b, IntervalSet):
        return sum((g1 - g0 for g0, g1 in b.complement_within(a, z)), Fraction(0))
    return (z - a) - b.measure_within(a, z)


def _disjoint(b, left: Fraction, right: Fraction, rng: np.random.Generator, spot_checks: int) -> bool:
    """Support pieces outside ``[0, 1]`` miss ``b``; interior gaps are genuinely open.

    For a fat Cantor set every level gap must have positive length (so the
    closed intervals are strictly separated) and sampled gap points must test
    as outside ``b``.
    """
    if isinstance(b, IntervalSet):
        if not b.intervals:
            return True
        lo_b, hi_b = b.intervals[0][0], b.intervals[-1][1]
        gaps = b.complement_within(max(left, lo_b), min(right, hi_b))
        return lo_b >= 0 and hi_b <= 1 and all(not b.contains((g0 + g1) / 2) for g0, g1 in gaps)
    if any(g <= 0 for g in b.gap_lengths()):
        return False
    if b.contains(Fraction(-1, 1 << 60)) or b.contains(1 + Fraction(1, 1 << 60)):
        return False
    for _ in range(spot_checks):
        # midpoint of a random level-i gap
        i = int(rng.integers(1, b.depth + 1)) if b.depth else 0
        if i == 0:
            break
        pos = 0
        for lvl in range(1, i):
            if rng.random() < 0.5:
                pos += b.shifts[lvl]
        mid = Fraction(2 * pos + b.lengths[i] + b.shifts[i], 2 * b.denominator)
        if b.contains(mid):
            return False
    return True
