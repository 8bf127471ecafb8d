"""Ontological theories and the harness that checks them.

A theory supplies, for each state ``psi``, an epistemic measure over its
ontic space and, for each basis ``M``, response functions ``xi_k(M, lam)``.
The harness checks three things:

* Born rule: ``E_{lam ~ mu_psi} xi_k(M, lam) = |<phi_k|psi>|^2``, by Monte Carlo
  against the exact target with Wilson standard errors;
* normalization: ``sum_k xi_k(M, lam) = 1`` pointwise;
* overlap: ``1 - TV(mu_psi, mu_phi)`` for pairs of states.
"""

from __future__ import annotations

import abc
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ontic.measures import FiberedMeasure, overlap_mass, sample_batch
from ontic.points import OnticBatch, OnticPoint
from ontic.qstate import OrthoBasis, ProjState, fidelity, haar_basis, haar_state, haar_states, same_state
from ontic.rng import SeedLike, child_seed, make_rng, stream

CHUNK = 1 << 16
MIN_SAMPLES = 1000


class Theory(abc.ABC):
    """Base class for ontological theories in dimension ``d``.

    Subclasses implement :meth:`xi_batch` and either :meth:`mu` (exact
    fibered measures) or :meth:`sample` directly.
    """

    name: str = "theory"
    exact: bool = True
    deterministic: bool = True
    has_p: bool = True
    tag_arity: tuple[int, ...] = ()

    def __init__(self, d: int):
        if d < 2:
            raise ValueError("dimension must be at least 2")
        self.d = int(d)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self.d})"

    # --- epistemic states -------------------------------------------------
    def mu(self, psi: ProjState) -> FiberedMeasure:
        raise NotImplementedError(f"{self.name} has no exact fibered measures")

    def sample(self, psi: ProjState, n: int, rng: np.random.Generator) -> OnticBatch:
        return sample_batch(self.mu(psi), n, rng)

    def overlap(self, psi: ProjState, phi: ProjState) -> float:
        return overlap_mass(self.mu(psi), self.mu(phi))

    # --- response functions -----------------------------------------------
    @abc.abstractmethod
    def xi_batch(self, basis: OrthoBasis, batch: OnticBatch) -> np.ndarray:
        """``(n, d)`` array of response values ``xi_k(M, lam_i)``."""

    def xi_vector(self, basis: OrthoBasis, point: OnticPoint) -> np.ndarray:
        return self.xi_batch(basis, OnticBatch.from_points([point]))[0]

    def xi(self, k: int, basis: OrthoBasis, point: OnticPoint) -> float:
        return float(self.xi_vector(basis, point)[k])

    # --- ontic space ------------------------------------------------------
    def lift(self, states: np.ndarray, rng: np.random.Generator) -> OnticBatch:
        """Ontic points over the given rays: ``p`` and tags drawn uniformly."""
        n = states.shape[0]
        p = rng.random(n) if self.has_p else None
        tags = np.column_stack([rng.integers(0, k, n) for k in self.tag_arity]) if self.tag_arity else None
        return OnticBatch(states, p, tags)

    def random_points(self, n: int, rng: np.random.Generator) -> OnticBatch:
        return self.lift(haar_states(self.d, n, rng), rng)

    def special_points(self, basis: OrthoBasis, rng: np.random.Generator) -> OnticBatch | None:
        """Hand-picked ontic points (ties, boundaries) to probe along with random ones."""
        return None

    def validate(self, batch: OnticBatch) -> None:
        if batch.d != self.d:
            raise ValueError(f"ontic points have dimension {batch.d}, theory has {self.d}")
        if self.has_p:
            if batch.p is None:
                raise ValueError("ontic points lack the p coordinate")
            if ((batch.p < 0) | (batch.p > 1)).any():
                raise ValueError("p outside [0, 1]")
        if batch.tags.shape[1] < len(self.tag_arity):
            raise ValueError("ontic points lack a tag")
        for level, k in enumerate(self.tag_arity):
            col = batch.tags[:, level]
            if ((col < 0) | (col >= k)).any():
                raise ValueError("tag index out of range")

    # --- coverage ---------------------------------------------------------
    def sample_covered_pair(self, rng: np.random.Generator) -> tuple[ProjState, ProjState]:
        """A non-orthogonal pair on which the theory claims nontrivial overlap."""
        while True:
            a, b = haar_state(self.d, rng), haar_state(self.d, rng)
            if fidelity(a, b) > 1e-8 and not same_state(a, b):
                return a, b

    def manifest(self) -> dict:
        return {"name": self.name, "d": self.d}


def _check_inputs(t: Theory, psi: ProjState, basis: OrthoBasis) -> None:
    if psi.d != t.d or basis.d != t.d:
        raise ValueError(f"dimension mismatch: theory d={t.d}, state d={psi.d}, basis d={basis.d}")


def _chunk_sums(t: Theory, psi, basis, n, seed, k, size):
    rng = stream(seed, k)
    batch = t.sample(psi, size, rng)
    return t.xi_batch(basis, batch).sum(axis=0)


def estimate_outcome_probs(
    t: Theory,
    psi: ProjState,
    basis: OrthoBasis,
    n: int,
    rng: SeedLike,
    workers: int = 1,
    chunk: int = CHUNK,
) -> np.ndarray:
    """Monte Carlo estimate of ``int xi_k(M, lam) dmu_psi(lam)`` for every k.

    Samples are drawn in fixed-size chunks, each from its own keyed stream, and
    reduced in chunk order, so the result does not depend on ``workers``.
    """
    _check_inputs(t, psi, basis)
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    seed = child_seed(make_rng(rng))
    sizes = [min(chunk, n - s) for s in range(0, n, chunk)]
    jobs = [(t, psi, basis, n, seed, k, size) for k, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _chunk_sums(*a), jobs))
    else:
        parts = [_chunk_sums(*a) for a in jobs]
    total = np.zeros(t.d)
    for part in parts:
        total = total + part
    return total / n


@dataclass
class OutcomeCheck:
    est: float
    target: float
    se: float
    z: float

    def to_json(self) -> dict:
        return {"est": self.est, "target": self.target, "se": self.se, "z": self.z}


@dataclass
class BornReport:
    theory: str
    d: int
    psi: ProjState
    basis: OrthoBasis
    n: int
    seed: int | None
    z_max: float
    outcomes: list[OutcomeCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(abs(o.z) <= self.z_max for o in self.outcomes)

    @property
    def max_abs_z(self) -> float:
        return max(abs(o.z) for o in self.outcomes)

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "d": self.d,
            "psi": self.psi.to_json(),
            "basis": self.basis.to_json(),
            "n": self.n,
            "seed": self.seed,
            "z_max": self.z_max,
            "outcomes": [o.to_json() for o in self.outcomes],
            "pass": self.passed,
        }

    def csv_rows(self) -> list[dict]:
        return [
            {"theory": self.theory, "d": self.d, "n": self.n, "seed": self.seed, "outcome": k, **o.to_json()}
            for k, o in enumerate(self.outcomes)
        ]


def wilson_se(p_hat: float, n: int, z: float) -> float:
    """Wilson-interval half-width divided by ``z``; positive even at p_hat in {0, 1}."""
    z2n = z * z / n
    return math.sqrt(p_hat * (1.0 - p_hat) / n + z2n / (4.0 * n)) / (1.0 + z2n)


def verify_born(
    t: Theory,
    psi: ProjState,
    basis: OrthoBasis,
    n: int,
    z_max: float = 4.0,
    rng: SeedLike = None,
    workers: int = 1,
) -> BornReport:
    seed = rng if isinstance(rng, int) else None
    est = estimate_outcome_probs(t, psi, basis, n, rng, workers=workers)
    target = basis.born(psi)
    report = BornReport(t.name, t.d, psi, basis, n, seed, z_max)
    for e, tg in zip(est, target):
        e = min(max(float(e), 0.0), 1.0)
        se = wilson_se(e, n, z_max)
        report.outcomes.append(OutcomeCheck(e, float(tg), se, (e - float(tg)) / se))
    return report


def normalization_defects(t: Theory, basis: OrthoBasis, lambdas) -> np.ndarray:
    """``sum_k xi_k - 1`` at every ontic point."""
    batch = lambdas if isinstance(lambdas, OnticBatch) else OnticBatch.from_points(list(lambdas))
    t.validate(batch)
    if basis.d != t.d:
        raise ValueError("basis dimension does not match theory")
    return t.xi_batch(basis, batch).sum(axis=1) - 1.0


def verify_normalization(t: Theory, basis: OrthoBasis, lambdas, tol: float = 1e-12) -> bool:
    """Pointwise outcome normalization: exact for 0/1 responses, else within ``tol``."""
    defect = normalization_defects(t, basis, lambdas)
    if t.deterministic:
        return bool((defect == 0.0).all())
    return bool((np.abs(defect) <= tol).all())


def check_nontrivial_pair(t: Theory, psi: ProjState, phi: ProjState) -> float:
    if same_state(psi, phi):
        raise ValueError("states must be distinct")
    return t.overlap(psi, phi)


@dataclass
class NontrivialityReport:
    theory: str
    requested: int
    overlaps: list[float]
    inner_products: list[float]

    @property
    def passed(self) -> bool:
        return len(self.overlaps) == self.requested and all(o > 0.0 for o in self.overlaps)

    @property
    def min_overlap(self) -> float:
        return min(self.overlaps) if self.overlaps else float("nan")

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "requested": self.requested,
            "checked": len(self.overlaps),
            "min_overlap": self.min_overlap,
            "overlaps": self.overlaps,
            "inner_products": self.inner_products,
            "pass": self.passed,
        }


def check_max_nontrivial(t: Theory, n_pairs: int, rng: SeedLike) -> NontrivialityReport:
    """Overlap on ``n_pairs`` covered non-orthogonal pairs; stops at the first zero."""
    rng = make_rng(rng)
    report = NontrivialityReport(t.name, n_pairs, [], [])
    for _ in range(n_pairs):
        psi, phi = t.sample_covered_pair(rng)
        ov = check_nontrivial_pair(t, psi, phi)
        report.overlaps.append(ov)
        report.inner_products.append(fidelity(psi, phi))
        if ov <= 0.0:
            break
    return report


@dataclass
class SweepReport:
    """Born checks over many ``(psi, M)`` draws with a tolerated failure fraction."""

    theory: str
    d: int
    n: int
    seed: int
    z_max: float
    max_fail_frac: float
    reports: list[BornReport]

    @property
    def checks(self) -> int:
        return sum(len(r.outcomes) for r in self.reports)

    @property
    def failures(self) -> int:
        return sum(abs(o.z) > self.z_max for r in self.reports for o in r.outcomes)

    @property
    def fail_frac(self) -> float:
        return self.failures / self.checks

    @property
    def passed(self) -> bool:
        return self.fail_frac <= self.max_fail_frac

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "d": self.d,
            "n": self.n,
            "seed": self.seed,
            "z_max": self.z_max,
            "sweeps": len(self.reports),
            "checks": self.checks,
            "failures": self.failures,
            "fail_frac": self.fail_frac,
            "max_abs_z": max(r.max_abs_z for r in self.reports),
            "pass": self.passed,
            "reports": [r.to_json() for r in self.reports],
        }

    def csv_rows(self) -> list[dict]:
        return [dict(sweep=i, **row) for i, r in enumerate(self.reports) for row in r.csv_rows()]


def born_sweep(
    t: Theory,
    sweeps: int,
    n: int,
    seed: int,
    z_max: float = 4.0,
    max_fail_frac: float = 0.01,
    workers: int = 1,
    psi_source=None,
) -> SweepReport:
    """``verify_born`` on ``sweeps`` random ``(psi, M)``; Haar states unless ``psi_source(rng)`` is given."""
    reports = []
    for i in range(sweeps):
        rng = stream(seed, 0, i)
        psi = psi_source(rng) if psi_source is not None else haar_state(t.d, rng)
        basis = haar_basis(t.d, rng)
        reports.append(verify_born(t, psi, basis, n, z_max, rng=child_seed(rng), workers=workers))
    return SweepReport(t.name, t.d, n, seed, z_max, max_fail_frac, reports)


@dataclass
class NormalizationReport:
    theory: str
    points: int
    exceptions: int
    max_defect: float

    @property
    def passed(self) -> bool:
        return self.exceptions == 0

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "points": self.points,
            "exceptions": self.exceptions,
            "max_defect": self.max_defect,
            "pass": self.passed,
        }


def normalization_sweep(t: Theory, count: int, seed: int, special_bases: int = 100) -> NormalizationReport:
    """Normalization check on ``count`` random ``(M, lam)``, each with its own basis.

    The first ``special_bases`` bases are also probed at the theory's
    :meth:`Theory.special_points`.
    """
    rng = stream(seed, 2)
    batch = t.random_points(count, rng)
    exceptions, worst, total = 0, 0.0, 0
    tol = 0.0 if t.deterministic else 1e-12

    def check(basis, pts):
        nonlocal exceptions, worst, total
        defect = np.abs(normalization_defects(t, basis, pts))
        worst = max(worst, float(defect.max()))
        exceptions += int((defect > tol).sum())
        total += len(pts)

    for i in range(count):
        basis = haar_basis(t.d, rng)
        check(basis, batch.subset(slice(i, i + 1)))
        if i < special_bases:
            extra = t.special_points(basis, rng)
            if extra is not None and len(extra):
                check(basis, extra)
    return NormalizationReport(t.name, total, exceptions, worst)
