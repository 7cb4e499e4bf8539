"""Minimal SVG figures of caustics: branch-coloured polylines of x with L overlaid."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .caustic import SHELL_BRANCH, CausticSet  # noqa: E402

# fixed salt and no date keep the SVG byte-stable across runs
matplotlib.rcParams["svg.hashsalt"] = "ias-onshell"
matplotlib.rcParams["svg.fonttype"] = "none"
SVG_METADATA = {"Date": None, "Creator": None}

BRANCH_COLORS = ["0.55", "tab:red", "tab:blue", "tab:green", "tab:purple", "tab:orange", "tab:brown"]


def _runs(P: np.ndarray, jump: float) -> list[np.ndarray]:
    """Split an ordered point list wherever consecutive points are farther apart than ``jump``."""
    if len(P) < 2:
        return [P]
    gaps = np.linalg.norm(np.diff(P, axis=0), axis=-1)
    cuts = np.flatnonzero(gaps > jump) + 1
    return np.split(P, cuts)


def draw_caustic(ax, cs: CausticSet, L: np.ndarray | None = None, title: str = "",
                 equal: bool = True) -> None:
    if cs.x.shape[-1] != 2:
        raise ValueError("only planar caustics (n = 1) can be drawn")
    if L is not None:
        ax.plot(L[:, 0], L[:, 1], color="black", lw=0.8, ls="--", label="L")
    span = np.ptp(cs.x, axis=0).max() if len(cs) else 1.0
    for b in cs.branches():
        pts = cs.x[cs.branch == b]
        color = BRANCH_COLORS[b % len(BRANCH_COLORS)]
        label = "shell" if b == SHELL_BRANCH else f"branch {b}"
        runs = _runs(pts, 0.05 * span if span > 0 else 1.0)
        for k, run in enumerate(runs):
            if len(run) == 1 or np.ptp(run, axis=0).max() < 1e-3 * max(span, 1e-12):
                ax.plot(run[:, 0], run[:, 1], "o", ms=3, color=color, label=label if k == 0 else None)
            else:
                ax.plot(run[:, 0], run[:, 1], lw=1.4, color=color, label=label if k == 0 else None)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if equal:
        ax.set_aspect("equal", adjustable="datalim")
    ax.legend(fontsize=7, loc="best")
    if title:
        ax.set_title(title, fontsize=9)


def save_caustic_figure(panels: list[tuple[CausticSet, np.ndarray | None, str]], path, caption: str = "",
                        equal: bool = True) -> None:
    """One panel per (caustic, L, title); written as SVG without a timestamp."""
    fig, axes = plt.subplots(1, len(panels), figsize=(4.2 * len(panels), 4.2), squeeze=False)
    for ax, (cs, L, title) in zip(axes[0], panels):
        draw_caustic(ax, cs, L, title, equal)
    if caption:
        fig.suptitle(caption, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)


def curve_of_L(S_prime, q: np.ndarray) -> np.ndarray:
    """Points (q, S'(q)) of a planar Lagrangian curve."""
    return np.stack([q, S_prime(q[:, None])], axis=-1)


def unit_circle(k: int = 256) -> np.ndarray:
    a = np.linspace(0, 2 * np.pi, k)
    return np.stack([np.cos(a), np.sin(a)], axis=-1)


def caustic_from_csv(header: list[str], data: np.ndarray) -> CausticSet:
    """Rebuild a CausticSet from the CSV written by :meth:`CausticSet.to_csv`."""
    xcols = [i for i, h in enumerate(header) if h.startswith("x")]
    zcol = header.index("z")
    pcols = list(range(1, xcols[0]))
    n = len(xcols) // 2
    return CausticSet(n, [header[i] for i in pcols], data[:, pcols], data[:, xcols], data[:, zcol],
                      data[:, 0].astype(int), data[:, header.index("res_grad")],
                      data[:, header.index("res_det")])
