"""Reference computations that share no code with the package."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate

# Haar fraction of the deficiency region for d = 3, from 10^6 samples drawn
# with seed 20261016 before the main build.
DEFICIENCY_D3_MC = 0.249774
DEFICIENCY_D3_MC_SE = 0.00043288084499542646


def exact_inner(u, v) -> complex:
    """Sum of conj(u_k) v_k with every product and sum done in rationals."""
    re, im = Fraction(0), Fraction(0)
    for a, b in zip(u, v):
        ar, ai = Fraction(float(a.real)), Fraction(float(a.imag))
        br, bi = Fraction(float(b.real)), Fraction(float(b.imag))
        re += ar * br + ai * bi
        im += ar * bi - ai * br
    return complex(float(re), float(im))


def discretized_tv(m1, m2, cells: int = 100_000) -> float:
    """TV from per-cell masses on a uniform grid of [0, 1] for every (tag, fiber) group."""
    edges = np.linspace(0.0, 1.0, cells + 1)

    def cell_mass(comps):
        out = np.zeros(cells)
        for c in comps:
            lo = np.clip(edges[:-1], c.lo, c.hi)
            hi = np.clip(edges[1:], c.lo, c.hi)
            out += c.weight * (hi - lo) / (c.hi - c.lo)
        return out

    groups: list[list] = []  # [tag, vector, comps1, comps2]
    for which, m in enumerate((m1, m2)):
        for c in m.components:
            v = c.fiber.amplitudes
            for g in groups:
                if g[0] == c.tag and abs(np.vdot(g[1], v)) >= 1 - 1e-12:
                    g[2 + which].append(c)
                    break
            else:
                g = [c.tag, v, [], []]
                g[2 + which].append(c)
                groups.append(g)
    total = 0.0
    for _, _, c1, c2 in groups:
        total += float(np.abs(cell_mass(c1) - cell_mass(c2)).sum())
    return 0.5 * total


def bloch_state(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def sphere_integral(density, psi_theta: float = 0.0, psi_phi: float = 0.0) -> float:
    """Integral of ``density(state)`` over the unit Bloch sphere (area element sin th)."""

    def f(th, ph):
        return density(bloch_state(th, ph)) * math.sin(th)

    lo = integrate.dblquad(f, 0, 2 * math.pi, 0, math.pi / 2, epsabs=1e-12, epsrel=1e-10)[0]
    hi = integrate.dblquad(f, 0, 2 * math.pi, math.pi / 2, math.pi, epsabs=1e-12, epsrel=1e-10)[0]
    return lo + hi


def cantor_product(depth: int) -> Fraction:
    return math.prod((1 - Fraction(1, 4**i) for i in range(1, depth + 1)), start=Fraction(1))


def cantor_intervals(depth: int) -> list[tuple[Fraction, Fraction]]:
    """Literal construction: cut the middle 4^{-i} out of every interval at step i."""
    ivs = [(Fraction(0), Fraction(1))]
    for i in range(1, depth + 1):
        nxt = []
        for lo, hi in ivs:
            gap = (hi - lo) / 4**i
            mid = (lo + hi) / 2
            nxt += [(lo, mid - gap / 2), (mid + gap / 2, hi)]
        ivs = nxt
    return ivs


def deficiency_exact(d: int) -> float:
    return 1.0 - d / 2 ** (d - 1)


def fibered_outcome_probs(components, basis_matrix, a, b) -> np.ndarray:
    """Exact outcome law of the cumulative pair rule under a fibered measure.

    Each component ``(weight, fiber, lo, hi)`` contributes the fraction of
    ``[lo, hi]`` falling in every cumulative-Born cell of its fiber, with the
    basis ordered by decreasing ``min(|<phi|a>|, |<phi|b>|)``.
    """
    cols = [basis_matrix[:, k] for k in range(basis_matrix.shape[1])]
    keys = [min(abs(np.vdot(c, a)), abs(np.vdot(c, b))) for c in cols]
    order = sorted(range(len(cols)), key=lambda k: -keys[k])
    out = np.zeros(len(cols))
    for weight, fiber, lo, hi in components:
        edge = 0.0
        for k in order:
            nxt = edge + abs(np.vdot(cols[k], fiber)) ** 2
            if k == order[-1]:
                nxt = max(nxt, 1.0)
            out[k] += weight * max(0.0, min(hi, nxt) - max(lo, edge)) / (hi - lo)
            edge = nxt
    return out


def ks_min_overlap(gamma: float) -> float:
    """(1/pi) * integral over the sphere of max(0, min(n.m1, n.m2)) for Bloch axes at angle gamma.

    Nested adaptive quadrature in polar coordinates about m1, with the
    azimuthal kinks passed to the inner rule.
    """
    sg, cg = math.sin(gamma), math.cos(gamma)

    def inner(th):
        st, ct = math.sin(th), math.cos(th)

        def g(ph):
            return max(0.0, min(ct, sg * st * math.cos(ph) + cg * ct))

        kinks = []
        if sg * st > 0:
            for c in (ct * (1 - cg) / (sg * st), -cg * ct / (sg * st)):
                if -1 < c < 1:
                    kinks.append(math.acos(c))
        val = integrate.quad(g, 0.0, math.pi, points=kinks or None, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        return 2.0 * val * st

    return integrate.quad(inner, 0.0, math.pi / 2, epsabs=1e-12, epsrel=1e-11, limit=200)[0] / math.pi
