"""Concrete ontological theories.

* :func:`psi_ontic` -- point masses at the state, Born-weight responses.
* :func:`ks2d` -- the Kochen-Specker qubit model on the Bloch sphere.
* :class:`PairTheory` -- a deterministic theory on ``CP^{d-1} x [0, 1]``
  whose measures for two chosen states share a slice of ontic space.
* :func:`convex_combine` -- disjoint-union convex combination.
* :func:`net_theory` -- weighted combination of pair theories over finite
  nets, truncated at level ``N``.

Pair theory in brief: the basis is reordered by decreasing
``min(|<phi_i|a>|, |<phi_i|b>|)`` and the ontic point ``(lam, p)`` answers
the first index whose cumulative Born weight reaches ``p``.  The leading
key is at least ``s = |<a|b>|/d``, so any ray within chordal distance
``r < s`` of ``a`` or ``b`` has first Born weight at least ``(s - r)^2``.
Points with ``p`` below ``eps = (s - r)^2`` therefore answer outcome 1 for
every basis, and the mass a nearby state puts there may be moved onto
``{a, b} x [0, eps]`` without changing any statistics.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from ontic.measures import FiberComponent, FiberedMeasure, overlap_mass, sample_batch, tagged_mixture
from ontic.points import OnticBatch, OnticPoint
from ontic.qstate import (
    EQUAL_TOL,
    OrthoBasis,
    ProjState,
    chordal_rows,
    epsilon_net,
    fidelity,
)
from ontic.rng import SeedLike, child_seed, make_rng, stream
from ontic.theory import Theory

DEFAULT_REACH = 0.5
MAX_NET_PAIRS = 20_000


class BudgetError(ValueError):
    pass


def _one_hot(idx: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros((idx.size, d))
    out[np.arange(idx.size), idx] = 1.0
    return out


# --------------------------------------------------------------------------
# psi-ontic baseline and negative control


class PsiOntic(Theory):
    """``mu_psi`` is a point mass at ``psi``; ``xi_k = |<phi_k|lam>|^2``."""

    name = "ontic"
    deterministic = False

    def mu(self, psi):
        return FiberedMeasure.point(psi)

    def xi_batch(self, basis, batch):
        return np.abs(batch.states @ basis.matrix.conj()) ** 2


class BrokenUniform(PsiOntic):
    """Negative control: answers every outcome with probability ``1/d``."""

    name = "broken-uniform"

    def xi_batch(self, basis, batch):
        return np.full((len(batch), self.d), 1.0 / self.d)


def psi_ontic(d: int) -> PsiOntic:
    return PsiOntic(d)


def broken_uniform(d: int) -> BrokenUniform:
    return BrokenUniform(d)


# --------------------------------------------------------------------------
# Kochen-Specker qubit model


def ks_profile(x):
    """Density of the KS measure as a function of ``x = |<lam|psi>|^2``.

    Normalized against the area element of the unit Bloch sphere (total 4 pi).
    """
    x = np.asarray(x, dtype=float)
    return np.where(x > 0.5, 2.0 / np.pi * (x - 0.5), 0.0)


def _clip_integral(u: float, b: float, c: float) -> float:
    """``int_0^{2 pi} max(0, b + c cos(t) - u) dt``."""
    if c <= 1e-300:
        return 2.0 * math.pi * max(0.0, b - u)
    k = (u - b) / c
    if k <= -1.0:
        return 2.0 * math.pi * (b - u)
    if k >= 1.0:
        return 0.0
    return 2.0 * ((b - u) * math.acos(k) + c * math.sqrt(1.0 - k * k))


class KSTheory(Theory):
    """Kochen-Specker model: ``Lambda = CP^1``, closest-basis-state response.

    On the tie set ``|<lam|phi_1>| = |<lam|phi_2>|`` outcome 1 is returned;
    ``tie_break=False`` gives the literal rule in which both responses fire.
    """

    name = "ks2"
    exact = False
    has_p = False

    def __init__(self, tie_break: bool = True):
        super().__init__(2)
        self.tie_break = tie_break

    @staticmethod
    def _perp(psi: ProjState) -> np.ndarray:
        v = psi.amplitudes
        return np.array([-np.conj(v[1]), np.conj(v[0])])

    def density(self, psi: ProjState, states: np.ndarray) -> np.ndarray:
        x = np.abs(np.atleast_2d(states) @ psi.amplitudes.conj()) ** 2
        return ks_profile(x)

    profile = staticmethod(ks_profile)

    def sample(self, psi, n, rng):
        # x = |<lam|psi>|^2 has density 8 (x - 1/2) on (1/2, 1]; inverse CDF below
        u = 1.0 - rng.random(n)
        x = 0.5 + 0.5 * np.sqrt(u)
        phase = np.exp(2j * np.pi * rng.random(n))
        states = np.sqrt(x)[:, None] * psi.amplitudes[None, :] + (np.sqrt(1.0 - x) * phase)[:, None] * self._perp(psi)[None, :]
        return OnticBatch(states)

    def special_points(self, basis, rng):
        return OnticBatch(ks_tie_states(basis, rng.random(8) * 2 * np.pi))

    def xi_batch(self, basis, batch):
        amp = np.abs(batch.states @ basis.matrix.conj())
        first = amp[:, 0] >= amp[:, 1]
        second = amp[:, 1] >= amp[:, 0] if not self.tie_break else ~first
        return np.column_stack([first, second]).astype(float)

    def overlap(self, psi, phi):
        """``int min(mu_psi, mu_phi)`` by quadrature (azimuth done in closed form)."""
        f2 = fidelity(psi, phi) ** 2
        cos_g = min(max(2.0 * f2 - 1.0, -1.0), 1.0)
        sin_g = math.sqrt(max(0.0, 1.0 - cos_g * cos_g))

        def ring(theta):
            a = math.cos(theta)
            b = a * cos_g
            c = math.sin(theta) * sin_g
            return math.sin(theta) * (_clip_integral(0.0, b, c) - _clip_integral(a, b, c))

        val, _ = integrate.quad(ring, 0.0, math.pi / 2.0, epsabs=1e-13, epsrel=1e-11, limit=400)
        return max(val / math.pi, 0.0)

    def manifest(self):
        return {"name": self.name, "d": 2, "tie_break": self.tie_break}


def ks_tie_states(basis: OrthoBasis, phases) -> np.ndarray:
    """Rays ``(phi_1 + e^{i theta} phi_2)/sqrt 2``, equidistant from both basis states."""
    phi1, phi2 = basis.matrix[:, 0], basis.matrix[:, 1]
    phases = np.atleast_1d(phases)
    return (phi1[None, :] + np.exp(1j * phases)[:, None] * phi2[None, :]) / math.sqrt(2.0)


def ks2d(tie_break: bool = True) -> KSTheory:
    return KSTheory(tie_break=tie_break)


# --------------------------------------------------------------------------
# pair theory


def sort_keys(basis: OrthoBasis, a: ProjState, b: ProjState) -> np.ndarray:
    m = basis.matrix.conj().T
    return np.minimum(np.abs(m @ a.amplitudes), np.abs(m @ b.amplitudes))


def pair_sort_order(basis: OrthoBasis, a: ProjState, b: ProjState) -> np.ndarray:
    """Indices of ``basis`` in decreasing key order; ties keep original order."""
    return np.argsort(-sort_keys(basis, a, b), kind="stable")


def pair_sort_basis(basis: OrthoBasis, a: ProjState, b: ProjState) -> OrthoBasis:
    if fidelity(a, b) <= 0.0:
        raise ValueError("a and b must not be orthogonal")
    return basis.permuted(pair_sort_order(basis, a, b))


def cumulative_outcomes(sorted_matrix: np.ndarray, states: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Sorted-position of the answer: smallest i with cum_{i-1} <= p <= cum_i."""
    probs = np.abs(states @ sorted_matrix.conj()) ** 2
    cum = np.cumsum(probs, axis=1)
    cum[:, -1] = np.inf  # cum_d is 1 up to rounding; p <= 1 always lands somewhere
    return (cum < p[:, None]).sum(axis=1)


def pair_response(k: int, basis: OrthoBasis, point: OnticPoint, a: ProjState, b: ProjState) -> int:
    """Deterministic response ``xi_k`` of the pair rule; ``k`` indexes ``basis``."""
    if point.p is None:
        raise ValueError("pair-theory ontic points need a p coordinate")
    order = pair_sort_order(basis, a, b)
    pos = cumulative_outcomes(basis.matrix[:, order], point.state.amplitudes[None, :], np.array([point.p]))[0]
    return int(order[pos] == k)


def mixing_epsilon(a: ProjState, b: ProjState, reach: float = DEFAULT_REACH) -> float:
    s = fidelity(a, b) / a.d
    return ((1.0 - reach) * s) ** 2


def pair_mu(psi: ProjState, a: ProjState, b: ProjState, epsilon: float, radius: float = 0.0) -> FiberedMeasure:
    """Epistemic state of ``psi`` in the pair theory for ``(a, b)``.

    Rays within chordal ``radius`` of ``a`` or ``b`` (or equal to them) move
    their mass on ``p <= epsilon`` uniformly onto ``{a, b} x [0, epsilon]``.
    """
    s = fidelity(a, b) / a.d
    limit = (s - radius) ** 2 if radius < s else 0.0
    if not 0.0 < epsilon <= limit * (1.0 + 1e-12):
        raise ValueError(f"epsilon {epsilon!r} outside (0, {limit!r}] for this pair and radius")
    if not _near_pair(psi, a, b, radius):
        return FiberedMeasure.point(psi)
    return FiberedMeasure(
        (
            FiberComponent(1.0 - epsilon, psi, epsilon, 1.0),
            FiberComponent(epsilon / 2.0, a, 0.0, epsilon),
            FiberComponent(epsilon / 2.0, b, 0.0, epsilon),
        )
    )


def _near_pair(psi: ProjState, a: ProjState, b: ProjState, radius: float) -> bool:
    fid = np.abs(np.array([a.amplitudes, b.amplitudes]).conj() @ psi.amplitudes)
    chord = chordal_rows(np.array([a.amplitudes, b.amplitudes]), psi)
    return bool(((chord < radius) | (fid >= 1.0 - EQUAL_TOL)).any())


def _perturb(x: ProjState, chord: float, rng: np.random.Generator) -> ProjState:
    """Random ray at chordal distance exactly ``chord`` from ``x``."""
    c = 1.0 - chord * chord / 2.0
    v = x.amplitudes
    w = rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size)
    w = w - np.vdot(v, w) * v
    w /= np.linalg.norm(w)
    phase = np.exp(2j * np.pi * rng.random())
    return ProjState.from_vector(c * v + math.sqrt(max(0.0, 1.0 - c * c)) * phase * w)


class PairTheory(Theory):
    """Deterministic theory mixing the epistemic states of ``a``, ``b`` and their neighbours.

    ``reach`` sets the neighbourhood radius as a fraction of ``s = |<a|b>|/d``
    (chordal distance); the mixing width is ``epsilon = ((1 - reach) s)^2``.
    ``reach = 0`` mixes only ``a`` and ``b`` themselves.
    """

    name = "pair"

    def __init__(self, a: ProjState, b: ProjState, reach: float = DEFAULT_REACH):
        if a.d != b.d:
            raise ValueError("a and b differ in dimension")
        super().__init__(a.d)
        if not 0.0 <= reach < 1.0:
            raise ValueError("reach must lie in [0, 1)")
        f = fidelity(a, b)
        if f <= 1e-12:
            raise ValueError("a and b must not be orthogonal")
        self.a, self.b, self.reach = a, b, float(reach)
        self.s = f / self.d
        self.radius = self.reach * self.s
        self.epsilon = ((1.0 - self.reach) * self.s) ** 2

    def near(self, psi: ProjState) -> bool:
        return _near_pair(psi, self.a, self.b, self.radius)

    def mu(self, psi):
        return pair_mu(psi, self.a, self.b, self.epsilon, self.radius)

    def xi_batch(self, basis, batch):
        if batch.p is None:
            raise ValueError("pair-theory ontic points need a p coordinate")
        order = pair_sort_order(basis, self.a, self.b)
        pos = cumulative_outcomes(basis.matrix[:, order], batch.states, batch.p)
        return _one_hot(order[pos], self.d)

    def covers(self, psi: ProjState, phi: ProjState) -> bool:
        return self.near(psi) and self.near(phi)

    def special_points(self, basis, rng):
        ps = np.array([0.0, self.epsilon / 2.0, self.epsilon, 1.0])
        fibers = np.vstack([self.a.amplitudes, self.b.amplitudes, basis.matrix.T])
        states = np.repeat(fibers, ps.size, axis=0)
        return OnticBatch(states, np.tile(ps, len(fibers)))

    def sample_covered_pair(self, rng):
        if self.radius == 0.0:
            return self.a, self.b
        lo, hi = 0.05 * self.radius, 0.95 * self.radius
        return (
            _perturb(self.a, rng.uniform(lo, hi), rng),
            _perturb(self.b, rng.uniform(lo, hi), rng),
        )

    def manifest(self):
        return {"name": self.name, "d": self.d, "a": self.a.to_json(), "b": self.b.to_json(), "reach": self.reach}


def pair_theory(a: ProjState, b: ProjState, reach: float = DEFAULT_REACH) -> PairTheory:
    return PairTheory(a, b, reach)


# --------------------------------------------------------------------------
# convex combinations


class ConvexTheory(Theory):
    """``sum_k c_k T_k`` on the disjoint union ``Lambda_1 x {0} u Lambda_2 x {1} u ...``.

    Responses dispatch on the outermost tag; tags from different parts never
    meet, so the combined Born statistics are the weighted part statistics.
    """

    name = "convex"

    def __init__(self, parts):
        parts = [(float(c), t) for c, t in parts]
        if not parts:
            raise ValueError("no parts")
        d = parts[0][1].d
        if any(t.d != d for _, t in parts):
            raise ValueError("parts live in different dimensions")
        coeffs = np.array([c for c, _ in parts])
        if (coeffs <= 0).any() or (coeffs > 1).any() or abs(coeffs.sum() - 1.0) > 1e-12:
            raise ValueError("coefficients must lie in (0, 1] and sum to 1")
        super().__init__(d)
        self.parts = parts
        self.coefficients = coeffs
        self.exact = all(t.exact for _, t in parts)
        self.deterministic = all(t.deterministic for _, t in parts)
        self.has_p = any(t.has_p for _, t in parts)
        self._inner_depth = max(len(t.tag_arity) for _, t in parts)
        self.tag_arity = (len(parts),)

    def mu(self, psi):
        return tagged_mixture([(c, t.mu(psi)) for c, t in self.parts])

    def _assemble(self, pieces: list[tuple[int, OnticBatch]], n: int) -> OnticBatch:
        depth = 1 + self._inner_depth
        states = np.empty((n, self.d), dtype=complex)
        p = np.zeros(n) if self.has_p else None
        tags = np.zeros((n, depth), dtype=np.int64)
        at = 0
        for k, sub in pieces:
            m = len(sub)
            states[at : at + m] = sub.states
            if p is not None and sub.p is not None:
                p[at : at + m] = sub.p
            tags[at : at + m, 0] = k
            tags[at : at + m, 1 : 1 + sub.tags.shape[1]] = sub.tags
            at += m
        return OnticBatch(states, p, tags)

    def sample(self, psi, n, rng):
        if self.exact:
            return sample_batch(self.mu(psi), n, rng)
        counts = rng.multinomial(n, self.coefficients / self.coefficients.sum())
        pieces = [(k, t.sample(psi, int(m), rng)) for k, ((_, t), m) in enumerate(zip(self.parts, counts)) if m]
        return self._assemble(pieces, n)

    def lift(self, states, rng):
        n = states.shape[0]
        which = rng.integers(0, len(self.parts), n)
        pieces = []
        for k, (_, t) in enumerate(self.parts):
            idx = np.flatnonzero(which == k)
            if idx.size:
                pieces.append((k, t.lift(states[idx], rng)))
        return self._assemble(pieces, n)

    def validate(self, batch):
        super().validate(batch)
        for k, (_, t) in enumerate(self.parts):
            mask = batch.tags[:, 0] == k
            if mask.any():
                t.validate(batch.subset(mask).drop_tag())

    def xi_batch(self, basis, batch):
        if batch.tags.shape[1] == 0:
            raise ValueError("convex-combination ontic points need a tag")
        col = batch.tags[:, 0]
        order = np.argsort(col, kind="stable")
        grouped = batch.subset(order)
        keys, starts = np.unique(col[order], return_index=True)
        bounds = list(starts) + [len(batch)]
        sorted_out = np.empty((len(batch), self.d))
        for k, lo, hi in zip(keys, bounds[:-1], bounds[1:]):
            sub = grouped.subset(slice(lo, hi)).drop_tag()
            sorted_out[lo:hi] = self.parts[int(k)][1].xi_batch(basis, sub)
        out = np.empty_like(sorted_out)
        out[order] = sorted_out
        return out

    def special_points(self, basis, rng, max_parts: int = 8):
        ks = range(len(self.parts))
        if len(self.parts) > max_parts:
            ks = sorted(rng.choice(len(self.parts), max_parts, replace=False))
        pieces = []
        for k in ks:
            sub = self.parts[k][1].special_points(basis, rng)
            if sub is not None and len(sub):
                if sub.p is None and self.has_p:
                    sub = OnticBatch(sub.states, np.zeros(len(sub)), sub.tags)
                pieces.append((int(k), sub))
        if not pieces:
            return None
        return self._assemble(pieces, sum(len(b) for _, b in pieces))

    def overlap(self, psi, phi):
        if self.exact:
            return overlap_mass(self.mu(psi), self.mu(phi))
        return float(sum(c * t.overlap(psi, phi) for c, t in self.parts))

    def sample_covered_pair(self, rng):
        k = int(rng.choice(len(self.parts), p=self.coefficients / self.coefficients.sum()))
        return self.parts[k][1].sample_covered_pair(rng)

    def covers(self, psi, phi):
        return any(getattr(t, "covers", lambda *_: False)(psi, phi) for _, t in self.parts)

    def manifest(self):
        return {
            "name": self.name,
            "d": self.d,
            "parts": [{"coefficient": c, "theory": t.manifest()} for c, t in self.parts],
        }


def convex_combine(parts) -> ConvexTheory:
    return ConvexTheory(parts)


# --------------------------------------------------------------------------
# truncated net theory


class NetTheory(ConvexTheory):
    """Pair theories over all ordered pairs of ``1/n``-nets, ``n = 1..N``.

    Level ``n`` gets weight proportional to ``1/n^2`` (renormalized over the
    truncation), split evenly over its pairs.  A level whose net is a single
    point contributes one pair made from that point and a slight perturbation
    of it.
    """

    name = "net"

    def __init__(self, d: int, levels: int, seed: int, reach: float = DEFAULT_REACH, max_pairs: int = MAX_NET_PAIRS):
        if levels < 1:
            raise ValueError("need at least one level")
        self.levels, self.seed, self.reach = int(levels), int(seed), float(reach)
        self.nets = [epsilon_net(d, n, stream(seed, n)) for n in range(1, levels + 1)]
        counts = [len(a) * (len(a) - 1) if len(a) > 1 else 1 for a in self.nets]
        if sum(counts) > max_pairs:
            raise BudgetError(f"net theory d={d}, N={levels} needs {sum(counts)} pairs (budget {max_pairs})")
        raw = np.array([6.0 / (math.pi**2 * n * n) for n in range(1, levels + 1)])
        self.level_weights = raw / raw.sum()
        parts, self.pair_level = [], []
        for lvl, net in enumerate(self.nets):
            if len(net) == 1:
                pairs = [(net[0], _perturb(net[0], 1e-3, stream(seed, lvl + 1, 1)))]
            else:
                pairs = [(x, y) for i, x in enumerate(net) for j, y in enumerate(net) if i != j]
            w = self.level_weights[lvl] / len(pairs)
            for x, y in pairs:
                parts.append((w, PairTheory(x, y, reach)))
                self.pair_level.append(lvl)
        # coefficients are exact ratios; renormalize away the rounding
        total = math.fsum(c for c, _ in parts)
        super().__init__([(c / total, t) for c, t in parts])
        self.pair_level = np.array(self.pair_level)
        self._a = np.array([t.a.amplitudes for _, t in self.parts])
        self._b = np.array([t.b.amplitudes for _, t in self.parts])
        self._radius = np.array([t.radius for _, t in self.parts])
        self._eps = np.array([t.epsilon for _, t in self.parts])

    @property
    def net_sizes(self) -> list[int]:
        return [len(a) for a in self.nets]

    def _near(self, psi: ProjState) -> np.ndarray:
        v = psi.amplitudes
        fa = np.abs(self._a.conj() @ v)
        fb = np.abs(self._b.conj() @ v)
        ca = chordal_rows(self._a, psi)
        cb = chordal_rows(self._b, psi)
        return (ca < self._radius) | (cb < self._radius) | (fa >= 1.0 - EQUAL_TOL) | (fb >= 1.0 - EQUAL_TOL)

    def mu(self, psi):
        near = self._near(psi)
        comps = []
        for k, (c, t) in enumerate(self.parts):
            if near[k]:
                e = self._eps[k]
                comps += [
                    FiberComponent(c * (1.0 - e), psi, e, 1.0, (k,)),
                    FiberComponent(c * e / 2.0, t.a, 0.0, e, (k,)),
                    FiberComponent(c * e / 2.0, t.b, 0.0, e, (k,)),
                ]
            else:
                comps.append(FiberComponent(c, psi, 0.0, 1.0, (k,)))
        return FiberedMeasure(tuple(comps))

    def covers(self, psi, phi):
        return bool((self._near(psi) & self._near(phi)).any())

    def sample_covered_pair(self, rng):
        k = int(rng.integers(len(self.parts)))
        return self.parts[k][1].sample_covered_pair(rng)

    def manifest(self):
        return {
            "name": self.name,
            "d": self.d,
            "levels": self.levels,
            "seed": self.seed,
            "reach": self.reach,
            "net_sizes": self.net_sizes,
            "level_weights": [float(w) for w in self.level_weights],
        }


def net_theory(d: int, levels: int, rng: SeedLike, reach: float = DEFAULT_REACH, max_pairs: int = MAX_NET_PAIRS) -> NetTheory:
    seed = rng if isinstance(rng, int) else child_seed(make_rng(rng))
    return NetTheory(d, levels, seed, reach=reach, max_pairs=max_pairs)


# --------------------------------------------------------------------------
# manifests


def theory_from_manifest(m: dict) -> Theory:
    name = m["name"]
    if name == "ontic":
        return PsiOntic(m["d"])
    if name == "broken-uniform":
        return BrokenUniform(m["d"])
    if name == "ks2":
        return KSTheory(m.get("tie_break", True))
    if name == "pair":
        return PairTheory(ProjState.from_json(m["a"]), ProjState.from_json(m["b"]), m.get("reach", DEFAULT_REACH))
    if name == "convex":
        return ConvexTheory([(p["coefficient"], theory_from_manifest(p["theory"])) for p in m["parts"]])
    if name == "net":
        return NetTheory(m["d"], m["levels"], m["seed"], reach=m.get("reach", DEFAULT_REACH))
    raise ValueError(f"unknown theory {name!r}")
