"""Figures rendered next to the CLI's delimited reports.

Everything draws onto the non-interactive Agg canvas and writes a PNG; the
functions take the same row dictionaries that go into the CSV files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

GOLDEN = (math.sqrt(5) - 1.0) / 2.0


def _figure(width: float = 6.0):
    fig, ax = plt.subplots(figsize=(width, width * GOLDEN))
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    return fig, ax


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def ks_profile(rows, path):
    fig, ax = _figure()
    ax.plot([r["fs_distance"] for r in rows], [r["density"] for r in rows], color="k")
    ax.axvline(0.5, ls=":", color="0.5")
    ax.set_xlabel(r"FS distance from $\psi$")
    ax.set_ylabel("density")
    ax.set_title("Kochen-Specker epistemic state")
    return _save(fig, path)


def deficiency(rows, path):
    fig, ax = _figure()
    ds = [r["d"] for r in rows]
    est = [r["estimate"] for r in rows]
    err = [[max(r["estimate"] - r["lo"], 0.0) for r in rows], [max(r["hi"] - r["estimate"], 0.0) for r in rows]]
    ax.errorbar(ds, est, yerr=err, fmt="o", color="k", capsize=3, label="Monte Carlo")
    ax.plot(ds, [r["oracle"] for r in rows], "x--", color="C3", label=r"$1 - d\,2^{1-d}$")
    ax.set_xlabel("d")
    ax.set_ylabel("Haar measure of deficiency region")
    ax.legend(frameon=False)
    return _save(fig, path)


def born_z(zs, z_max, path, title=""):
    fig, ax = _figure()
    ax.hist(zs, bins=40, color="0.6", edgecolor="k", linewidth=0.4)
    for s in (-z_max, z_max):
        ax.axvline(s, ls="--", color="C3")
    ax.set_xlabel("z-score")
    ax.set_ylabel("outcome checks")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def overlaps(rows, path):
    fig, ax = _figure()
    for kind, marker in (("covered", "o"), ("orthogonal", "x"), ("anchor", "s"), ("haar", ".")):
        sel = [r for r in rows if r["kind"] == kind]
        if sel:
            ax.scatter([r["inner"] for r in sel], [r["overlap"] for r in sel], marker=marker, label=kind)
    ax.set_xlabel(r"$|\langle\psi|\phi\rangle|$")
    ax.set_ylabel("overlap mass")
    ax.set_yscale("symlog", linthresh=1e-10)
    ax.legend(frameon=False)
    return _save(fig, path)


def cantor(rows, path, max_intervals: int = 4096):
    fig, ax = _figure(width=7.0)
    step = max(1, len(rows) // max_intervals)
    for lo, hi in rows[::step]:
        ax.plot([lo, hi], [0, 0], color="k", lw=6, solid_capstyle="butt")
    ax.set_xlim(-0.02, 1.02)
    ax.set_yticks([])
    ax.set_title(f"fat Cantor set ({len(rows)} intervals)")
    return _save(fig, path)


def cantor_measures(rows, path):
    fig, ax = _figure()
    ax.plot([r["depth"] for r in rows], [r["measure"] for r in rows], "o-", color="k")
    ax.set_xlabel("depth")
    ax.set_ylabel("measure")
    return _save(fig, path)
