"""Diagnostic figure written next to a report.

Left panel: for two-variable problems, the full-degree form of every
polynomial around the unit circle, with the certifying arc shaded and the
reported direction marked; for larger ``n``, the per-polynomial leading
values at the certifying direction.  Right panel: residual probability
``(1 - alpha_0)^N`` against ``N`` for the reporting grid.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .asymptotics import Tolerance, certify_many  # noqa: E402
from .certify import RESIDUAL_GRID  # noqa: E402
from .polynomial import decompose  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "polycert",
}


def _circle_panel(ax, problem, report, tol):
    theta = np.linspace(0.0, 2.0 * np.pi, 2049)
    D = np.column_stack([np.cos(theta), np.sin(theta)])
    decs = [decompose(g) for g in problem.polynomials]
    ok, _ = certify_many(decs, D, tol)
    for i, dec in enumerate(decs):
        top = dec.top_form
        vals = top.evaluate_many(D) if not top.is_zero() else np.zeros(len(D))
        label = "f" if i == 0 else f"g{i}"
        ax.plot(theta, vals, lw=1.0, label=f"{label} leading form (deg {dec.max_degree})")
    ax.axhline(0.0, color="0.4", lw=0.6)
    lo, hi = ax.get_ylim()
    ax.fill_between(theta, lo, hi, where=ok, color="tab:green", alpha=0.2, lw=0,
                    label="certifying (sampled grid)")
    ax.set_ylim(lo, hi)
    if report.direction is not None:
        ang = float(np.arctan2(report.direction[1], report.direction[0])) % (2.0 * np.pi)
        ax.axvline(ang, color="tab:red", lw=1.0, ls="--", label="reported direction")
    ax.set_xlim(0.0, 2.0 * np.pi)
    ax.set_xlabel("angle of d (rad)")
    ax.set_ylabel("leading form value")
    ax.legend(loc="upper center", bbox_to_anchor=(0.5, -0.25), ncol=2, frameon=False)


def _profile_panel(ax, report):
    if not report.profiles:
        ax.text(0.5, 0.5, "no certifying direction", ha="center", va="center",
                transform=ax.transAxes)
        ax.set_axis_off()
        return
    labels = [("f" if p["index"] == 0 else f"g{p['index']}") for p in report.profiles]
    values = [p["leading_value"] for p in report.profiles]
    ax.bar(labels, values, color="tab:blue")
    ax.axhline(0.0, color="0.4", lw=0.6)
    ax.set_ylabel("leading value at d")


def _residual_panel(ax, report):
    N_used = report.sampling["N"]
    N = np.unique(np.geomspace(1, max(10 * N_used, 10), 200).astype(int))
    for a in RESIDUAL_GRID:
        ax.semilogy(N, np.exp(N * np.log1p(-a)), lw=1.0, label=f"alpha_0 = {a:g}")
    ax.axvline(N_used, color="tab:red", lw=1.0, ls="--", label=f"N = {N_used}")
    ax.set_xscale("log")
    ax.set_ylim(1e-12, 1.5)
    ax.set_xlabel("samples N")
    ax.set_ylabel("P(all samples miss)")
    ax.legend(loc="lower left", frameon=False)


def render_figure(problem, report, path, tol: Tolerance | None = None) -> None:
    """Write the two-panel diagnostic figure to ``path`` (format from suffix)."""
    tol = tol or Tolerance(**report.provenance["tolerance"])
    with plt.rc_context(_STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(8.0, 3.8), constrained_layout=True)
        if problem.dimension == 2:
            _circle_panel(left, problem, report, tol)
        else:
            _profile_panel(left, report)
        _residual_panel(right, report)
        title = problem.name or "problem"
        fig.suptitle(f"{title}: {report.verdict}", fontsize=10)
        fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
        plt.close(fig)
