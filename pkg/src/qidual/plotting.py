"""Figures for CLI reports, rendered off-screen to image files."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import characters, torus  # noqa: E402

_STYLE = {
    "figure.figsize": (5.5, 3.8),
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 120,
    "svg.hashsalt": "qidual",
}


def _save(fig, path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    # no timestamps, so reruns produce identical files
    meta = {"Software": None} if path.suffix == ".png" else {"Date": None}
    fig.savefig(path, metadata=meta, bbox_inches="tight")
    plt.close(fig)
    return path.name


def plot_kakutani(report, path: Path) -> str:
    n, prods = zip(*report.trace)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        positive = [max(q, 1e-300) for q in prods]
        ax.semilogy(n, positive, color="C0")
        eq, sing = report.inputs["p_eq"], report.inputs["p_sing"]
        ax.axhline(eq, color="C2", ls="--", lw=0.8, label=f"p_eq = {eq:g}")
        ax.axhline(sing, color="C3", ls="--", lw=0.8, label=f"p_sing = {sing:g}")
        if len(n) > 50:
            ax.set_xscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel("partial Hellinger product")
        ax.set_title(f"{report.inputs['family']}: {report.results['verdict']}")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_metric(report, path: Path) -> str:
    p = report.inputs["p"] or 1.0
    t = np.linspace(0, 0.5, 400)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, (2 * np.sin(np.pi * t)) ** p, color="C0", label="chord^p")
        ax.plot(t, (np.pi * t) ** p, color="C1", ls="--", label="(pi |phi|)^p")
        ax.plot(t, (2 * np.pi * t) ** p, color="C1", ls=":", label="(2 pi |phi|)^p")
        d = np.abs(np.asarray(report.results["diffs"], dtype=float))
        if d.size:
            ax.plot(d, (2 * np.sin(np.pi * d)) ** p, "o", ms=3, color="C3", label="input coordinates")
        ax.set_xlabel("|phi| (turns)")
        ax.set_ylabel(f"p = {p:g}")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_polar(report, path: Path) -> str:
    """Lattice points of the first two coordinates, with the closed-form polar ball."""
    eps, p = report.inputs["eps"], report.inputs["p"]
    chi = report.inputs["chi"]
    r = 1.0 / (4 * eps)
    q = torus.conjugate(p) if p > 1 else math.inf
    lim = int(math.ceil(2 * r)) + 1
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        s = np.linspace(0, 2 * np.pi, 400)
        c, sn = np.cos(s), np.sin(s)
        if math.isinf(q):
            ax.plot([-r, r, r, -r, -r], [-r, -r, r, r, -r], color="C0", label="|n|_b = 1/(4 eps)")
            ax.plot([-2 * r, 2 * r, 2 * r, -2 * r, -2 * r], [-2 * r, -2 * r, 2 * r, 2 * r, -2 * r], color="C0", ls=":")
        else:
            scale = (np.abs(c) ** q + np.abs(sn) ** q) ** (1 / q)
            ax.plot(r * c / scale, r * sn / scale, color="C0", label="4 eps |n|_q = 1")
        g = np.arange(-lim, lim + 1)
        gx, gy = np.meshgrid(g, g)
        inside = np.array(
            [characters.in_polar_ball(characters.Character.from_dense([a, b]), eps, q) if not math.isinf(q)
             else max(abs(a), abs(b)) <= r for a, b in zip(gx.ravel(), gy.ravel())]
        )
        ax.plot(gx.ravel()[inside], gy.ravel()[inside], ".", ms=3, color="C0")
        ax.plot(gx.ravel()[~inside], gy.ravel()[~inside], ".", ms=2, color="0.75")
        n1, n2 = chi.get(1, 0), chi.get(2, 0)
        ax.plot([n1], [n2], "*", ms=10, color="C3", label=f"chi: {report.results['verdict']}")
        ax.set_aspect("equal")
        ax.set_xlabel("n_1")
        ax.set_ylabel("n_2")
        ax.legend(frameon=False, loc="upper left", fontsize=7)
        return _save(fig, path)


def plot_monothetic(report, path: Path) -> str:
    """Orbit of the truncated generator in its first two coordinates."""
    gen = report.results["generator"]
    alphas = np.asarray(gen["alphas"])
    power = report.results.get("power")
    k_max = min(power["k"] if power else 2000, 20000) or 2000
    ks = np.arange(k_max + 1)
    orbit = torus.canonical_angles(ks[:, None] * alphas[None, :2])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        if orbit.shape[1] > 1:
            ax.plot(orbit[:, 0], orbit[:, 1], ".", ms=1, color="0.6", label=f"k <= {k_max}")
        else:
            ax.plot(orbit[:, 0], np.zeros(len(ks)), ".", ms=1, color="0.6")
        if power:
            w = report.inputs["omega"] + [0.0, 0.0]
            ax.plot([w[0]], [w[1]], "*", ms=10, color="C3", label="target")
            hit = list(torus.canonical_angles(power["k"] * alphas[:2])) + [0.0]
            ax.plot([hit[0]], [hit[1]], "o", mfc="none", ms=8, color="C0", label=f"k = {power['k']}")
        ax.set_xlim(-0.5, 0.5)
        ax.set_ylim(-0.5, 0.5)
        ax.set_aspect("equal")
        ax.set_xlabel("coordinate 1 (turns)")
        ax.set_ylabel("coordinate 2 (turns)")
        ax.legend(frameon=False, fontsize=7, loc="upper left")
        return _save(fig, path)


PLOTTERS = {
    "kakutani": plot_kakutani,
    "metric": plot_metric,
    "polar": plot_polar,
    "monothetic": plot_monothetic,
}


def render(report, directory: Path, fmt: str = "png") -> list:
    """Write the figure for ``report`` into ``directory``; returns the file names."""
    plotter = PLOTTERS.get(report.command)
    if plotter is None:
        return []
    return [plotter(report, Path(directory) / f"{report.command}.{fmt}")]
