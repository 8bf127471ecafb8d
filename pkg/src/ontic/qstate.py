"""Complex projective geometry for pure states in C^d.

States are stored as gauge-fixed unit vectors: the first amplitude whose
modulus exceeds ``GAUGE_TOL`` is made real and non-negative, which gives one
canonical representative per ray.  Distances use the scaled Fubini-Study
metric ``(2/pi) * arccos|<psi|phi>|`` so that orthogonal states sit at
distance 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_DIM = 16
NORM_TOL = 1e-12
GAUGE_TOL = 1e-12
ORTHO_TOL = 1e-10
EQUAL_TOL = 1e-12


class DimensionError(ValueError):
    pass


class RankDeficientError(ValueError):
    pass


class NetConstructionError(RuntimeError):
    pass


def _as_vector(x) -> np.ndarray:
    if isinstance(x, ProjState):
        return x.amplitudes
    return np.asarray(x, dtype=complex)


def gauge_fix(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real >= 0."""
    v = np.asarray(v, dtype=complex)
    nz = np.flatnonzero(np.abs(v) > GAUGE_TOL)
    if nz.size == 0:
        return v.copy()
    c = v[nz[0]]
    out = v * (np.conj(c) / abs(c))
    out[nz[0]] = abs(c)
    return out


def gauge_fix_rows(arr: np.ndarray) -> np.ndarray:
    """Row-wise :func:`gauge_fix` for an ``(n, d)`` array of unit vectors."""
    arr = np.asarray(arr, dtype=complex)
    mod = np.abs(arr)
    first = np.argmax(mod > GAUGE_TOL, axis=1)
    rows = np.arange(arr.shape[0])
    c = arr[rows, first]
    phase = np.where(np.abs(c) > 0, np.conj(c) / np.where(np.abs(c) > 0, np.abs(c), 1.0), 1.0)
    out = arr * phase[:, None]
    out[rows, first] = np.abs(c)
    return out


@dataclass(frozen=True, eq=False)
class ProjState:
    """A ray in C^d, represented by its gauge-fixed unit vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex, copy=True)
        if a.ndim != 1:
            raise DimensionError("amplitudes must be one-dimensional")
        if not 2 <= a.size <= MAX_DIM:
            raise DimensionError(f"dimension {a.size} outside [2, {MAX_DIM}]")
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|v|^2 = {norm2!r})")
        nz = np.flatnonzero(np.abs(a) > GAUGE_TOL)
        lead = a[nz[0]]
        if lead.imag != 0.0 or lead.real < 0.0:
            raise ValueError("state is not gauge-fixed; use ProjState.from_vector")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_vector(cls, v) -> "ProjState":
        v = np.asarray(v, dtype=complex)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise ValueError("zero vector has no ray")
        return cls(gauge_fix(v / n))

    @classmethod
    def basis_vector(cls, d: int, k: int) -> "ProjState":
        e = np.zeros(d, dtype=complex)
        e[k] = 1.0
        return cls(e)

    @property
    def d(self) -> int:
        return self.amplitudes.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjState):
            return NotImplemented
        return same_state(self, other)

    __hash__ = None  # equality is a tolerance test

    def __repr__(self) -> str:
        amps = ", ".join(f"{z.real:.4g}{z.imag:+.4g}j" for z in self.amplitudes)
        return f"ProjState([{amps}])"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "re": [float(x) for x in self.amplitudes.real],
            "im": [float(x) for x in self.amplitudes.imag],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProjState":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        if re.size != obj["d"] or im.size != obj["d"]:
            raise DimensionError("length of re/im does not match d")
        return cls(re + 1j * im)


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """An ordered orthonormal basis; ``states[k]`` is outcome ``k``."""

    states: tuple

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("empty basis")
        d = states[0].d
        if len(states) != d or any(s.d != d for s in states):
            raise DimensionError("a basis of C^d needs exactly d states of dimension d")
        m = np.column_stack([s.amplitudes for s in states])
        gram = m.conj().T @ m
        off = np.abs(gram - np.diag(np.diag(gram)))
        if off.max() > ORTHO_TOL:
            raise ValueError(f"basis states are not orthogonal (max overlap {off.max():.3e})")
        object.__setattr__(self, "states", states)
        m.setflags(write=False)
        object.__setattr__(self, "_matrix", m)

    @classmethod
    def from_matrix(cls, m) -> "OrthoBasis":
        m = np.asarray(m, dtype=complex)
        return cls(tuple(ProjState.from_vector(m[:, k]) for k in range(m.shape[1])))

    @classmethod
    def standard(cls, d: int) -> "OrthoBasis":
        return cls(tuple(ProjState.basis_vector(d, k) for k in range(d)))

    @property
    def d(self) -> int:
        return len(self.states)

    @property
    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors."""
        return self._matrix

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, k):
        return self.states[k]

    def __iter__(self):
        return iter(self.states)

    def permuted(self, order: Sequence[int]) -> "OrthoBasis":
        return OrthoBasis(tuple(self.states[i] for i in order))

    def index_of(self, psi: ProjState) -> int:
        for k, s in enumerate(self.states):
            if same_state(s, psi):
                return k
        raise ValueError("state is not an element of the basis")

    def born(self, psi) -> np.ndarray:
        """Outcome probabilities ``|<phi_k|psi>|^2``."""
        return np.abs(self._matrix.conj().T @ _as_vector(psi)) ** 2

    def to_json(self) -> list:
        return [s.to_json() for s in self.states]

    @classmethod
    def from_json(cls, obj: list) -> "OrthoBasis":
        return cls(tuple(ProjState.from_json(s) for s in obj))


@dataclass(frozen=True, eq=False)
class UnitaryOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError("unitary must be square")
        dev = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if dev > ORTHO_TOL:
            raise ValueError(f"matrix is not unitary (max deviation {dev:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def dagger(self) -> "UnitaryOp":
        return UnitaryOp(self.matrix.conj().T)

    def apply(self, psi) -> ProjState:
        return ProjState.from_vector(self.matrix @ _as_vector(psi))


def inner(psi, phi) -> complex:
    """``<psi|phi>``; the modulus does not depend on the chosen gauge."""
    a, b = _as_vector(psi), _as_vector(phi)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def fidelity(psi, phi) -> float:
    return abs(inner(psi, phi))


def same_state(psi, phi, tol: float = EQUAL_TOL) -> bool:
    return fidelity(psi, phi) >= 1.0 - tol


def _aligned_gap(a: np.ndarray, b: np.ndarray) -> float:
    """``||a - e^{i theta} b||`` with the phase chosen to minimize it."""
    if a.tobytes() > b.tobytes():  # fixed operand order keeps the result symmetric to the bit
        a, b = b, a
    c = np.vdot(b, a)
    return float(np.linalg.norm(a - (c / abs(c)) * b))


def fs_distance(psi, phi) -> float:
    """Scaled Fubini-Study distance in [0, 1].

    Near coincidence the half-angle form ``(4/pi) arcsin(chord/2)`` is used;
    ``arccos`` loses half the digits there.
    """
    a, b = _as_vector(psi), _as_vector(phi)
    f = fidelity(a, b)
    if f < 0.7:
        return float(2.0 / np.pi * np.arccos(min(max(f, 0.0), 1.0)))
    return float(4.0 / np.pi * np.arcsin(min(_aligned_gap(a, b) / 2.0, 1.0)))


def fs_from_overlap(overlap) -> np.ndarray:
    """Vectorized distance from precomputed ``|<psi|phi>|`` values."""
    return 2.0 / np.pi * np.arccos(np.clip(overlap, 0.0, 1.0))


def chordal_distance(psi, phi) -> float:
    """``min_theta ||psi - e^{i theta} phi||`` for unit vectors."""
    a, b = _as_vector(psi), _as_vector(phi)
    f = fidelity(a, b)
    if f < 0.7:
        return float(np.sqrt(max(2.0 - 2.0 * f, 0.0)))
    return _aligned_gap(a, b)


def chordal_rows(states: np.ndarray, psi) -> np.ndarray:
    """:func:`chordal_distance` from ``psi`` to every row of ``states``."""
    v = _as_vector(psi)
    c = np.atleast_2d(states).conj() @ v
    f = np.abs(c)
    far = np.sqrt(np.maximum(2.0 - 2.0 * f, 0.0))
    phase = np.where(f > 0, c / np.where(f > 0, f, 1.0), 1.0)
    near = np.linalg.norm(v[None, :] - phase[:, None] * states, axis=1)
    return np.where(f < 0.7, far, near)


def alpha_gauge(v, alpha) -> np.ndarray:
    """Representative of ``v`` with ``<alpha|v>`` real and positive.

    Undefined for rays orthogonal to ``alpha``.
    """
    v = _as_vector(v)
    a = _as_vector(alpha)
    c = np.vdot(a, v)
    if abs(c) <= GAUGE_TOL:
        raise ValueError("alpha-relative gauge undefined for states orthogonal to alpha")
    v = v / np.linalg.norm(v)
    return v * (np.conj(c) / abs(c))


def haar_states(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``(n, d)`` array of gauge-fixed Haar-random unit vectors."""
    if d < 2:
        raise DimensionError("d must be at least 2")
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return gauge_fix_rows(z)


def haar_state(d: int, rng: np.random.Generator) -> ProjState:
    if not 2 <= d <= MAX_DIM:
        raise DimensionError(f"d must lie in [2, {MAX_DIM}]")
    return ProjState(haar_states(d, 1, rng)[0])


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary (QR of a Ginibre matrix, phases fixed)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_basis(d: int, rng: np.random.Generator) -> OrthoBasis:
    if not 2 <= d <= MAX_DIM:
        raise DimensionError(f"d must lie in [2, {MAX_DIM}]")
    return OrthoBasis.from_matrix(haar_unitary(d, rng))


def gram_schmidt(vectors: Iterable, tol: float = 1e-10) -> list[ProjState]:
    """Order-preserving orthonormalization (modified Gram-Schmidt, two passes)."""
    out: list[np.ndarray] = []
    for k, v in enumerate(vectors):
        w = np.array(_as_vector(v), dtype=complex)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            raise RankDeficientError(f"vector {k} is zero")
        w = w / nrm
        for _ in range(2):
            for q in out:
                w = w - np.vdot(q, w) * q
        res = np.linalg.norm(w)
        if res <= tol:
            raise RankDeficientError(f"vector {k} is linearly dependent on its predecessors (residual {res:.2e})")
        out.append(w / res)
    return [ProjState.from_vector(q) for q in out]


def complete_to_unitary(x) -> np.ndarray:
    """Unitary whose first column is exactly the unit vector ``x``."""
    x = _as_vector(x)
    d = x.size
    q, _ = np.linalg.qr(np.column_stack([x, np.eye(d, dtype=complex)]))
    c = np.vdot(q[:, 0], x)
    q[:, 0] = q[:, 0] * c
    return q


def perturb_to_nonorthogonal(
    states: Sequence[ProjState],
    delta: float,
    rng: np.random.Generator | None = None,
    min_overlap: float = 1e-8,
    max_retries: int = 100,
) -> list[ProjState]:
    """Nudge states by at most ``delta`` (FS distance) until no pair is orthogonal.

    States that already overlap everything else are returned untouched.  A
    moved state lands at distance exactly ``delta / 2`` from where it started.
    """
    if not 0.0 < delta <= 0.01:
        raise ValueError("delta must lie in (0, 0.01]")
    if rng is None:
        rng = np.random.default_rng(0)
    originals = [s.amplitudes for s in states]
    current = [s for s in states]
    theta = np.pi / 2.0 * (delta / 2.0)
    for _ in range(max_retries):
        if len(current) < 2:
            return current
        m = np.array([s.amplitudes for s in current])
        ov = np.abs(m.conj() @ m.T)
        np.fill_diagonal(ov, 1.0)
        bad = np.argwhere(ov < min_overlap)
        if bad.size == 0:
            return current
        j = int(bad[:, 1].max())
        v = originals[j]
        w = rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size)
        w = w - np.vdot(v, w) * v
        w /= np.linalg.norm(w)
        current[j] = ProjState.from_vector(np.cos(theta) * v + np.sin(theta) * w)
    raise NetConstructionError("could not remove orthogonal pairs within the retry budget")


def epsilon_net(
    d: int,
    n: int,
    rng: np.random.Generator,
    probes: int = 10_000,
    pool_factor: int = 2,
    shrink: float = 0.9,
    max_points: int = 5_000,
    max_rounds: int = 50,
) -> list[ProjState]:
    """Finite set whose FS balls of radius ``1/n`` cover projective space.

    Greedy farthest-point insertion over a Haar candidate pool covers the pool
    at ``shrink / n``; a fresh audit of ``probes`` Haar states then has to find
    no point farther than ``1/n``.  Audit failures join the pool and the
    greedy pass resumes.  Members are finally made pairwise non-orthogonal.
    """
    if d < 2 or n < 1:
        raise ValueError("need d >= 2 and n >= 1")
    radius = 1.0 / n
    if n == 1:
        return [haar_state(d, rng)]
    pool = haar_states(d, pool_factor * probes, rng)
    net = [pool[0]]
    nearest = fs_from_overlap(np.abs(pool @ pool[0].conj()))
    for _ in range(max_rounds):
        while True:
            j = int(np.argmax(nearest))
            if nearest[j] <= shrink * radius:
                break
            net.append(pool[j])
            if len(net) > max_points:
                raise NetConstructionError(f"net for d={d}, n={n} exceeded {max_points} points")
            nearest = np.minimum(nearest, fs_from_overlap(np.abs(pool @ pool[j].conj())))
        delta = min(0.01, 0.05 * radius)
        members = perturb_to_nonorthogonal([ProjState(v) for v in net], delta, rng)
        net = [s.amplitudes for s in members]
        audit = haar_states(d, probes, rng)
        dist = fs_from_overlap(np.abs(audit @ np.array(net).conj().T).max(axis=1))
        gaps = dist > radius
        if not gaps.any():
            return members
        pool = np.vstack([pool, audit[gaps]])
        nearest = fs_from_overlap(np.abs(pool @ np.array(net).conj().T).max(axis=1))
    raise NetConstructionError(f"cover audit still failing after {max_rounds} rounds")


def stabilizer_coset_unitary(psi, lam, rng: np.random.Generator) -> UnitaryOp:
    """Haar-random ``M`` with ``M^dagger psi = lam`` up to a phase.

    ``M = U0 W`` where ``U0`` maps ``lam`` to ``psi`` and ``W`` is Haar on the
    stabilizer ``U(1) x U(d-1)`` of ``lam``.
    """
    p, l = _as_vector(psi), _as_vector(lam)
    if p.shape != l.shape:
        raise DimensionError("psi and lambda differ in dimension")
    d = p.size
    vp, vl = complete_to_unitary(p), complete_to_unitary(l)
    u0 = vp @ vl.conj().T
    block = np.zeros((d, d), dtype=complex)
    block[0, 0] = np.exp(2j * np.pi * rng.random())
    block[1:, 1:] = haar_unitary(d - 1, rng)
    w = vl @ block @ vl.conj().T
    return UnitaryOp(u0 @ w)


def states_to_json(states: Sequence[ProjState]) -> list:
    return [s.to_json() for s in states]


def states_from_json(obj: list) -> list[ProjState]:
    return [ProjState.from_json(s) for s in obj]


def orthogonal_state(psi, rng: np.random.Generator) -> ProjState:
    """Haar-random state in the orthogonal complement of ``psi``."""
    v = _as_vector(psi)
    w = rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size)
    w = w - np.vdot(v, w) * v
    w = w - np.vdot(v, w) * v
    return ProjState.from_vector(w)


def basis_containing(psi, rng: np.random.Generator) -> OrthoBasis:
    """Random orthonormal basis whose first member is ``psi``."""
    v = _as_vector(psi)
    d = v.size
    block = np.eye(d, dtype=complex)
    block[1:, 1:] = haar_unitary(d - 1, rng)
    return OrthoBasis.from_matrix(complete_to_unitary(v) @ block)
