"""Figures written next to a report file.  Floats appear only here, for drawing."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "svg.hashsalt": "ratproof",
}


def gap_figure(report, path: Path) -> Path | None:
    """Optimal payment next to the best opposing-bit payment, per input."""
    rows = report.gap_table
    if not rows:
        return None
    names = [r["input"] for r in rows]
    best = [float(r["optimum"]) for r in rows]
    other = [float(r["best_opposing"]) if r["best_opposing"] is not None else float("nan") for r in rows]
    xs = range(len(rows))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.9 * len(rows) + 1.5), 2.8))
        ax.bar([i - 0.2 for i in xs], best, width=0.4, label="optimal", color="#3b6ea5")
        ax.bar([i + 0.2 for i in xs], other, width=0.4, label="best opposing bit", color="#c8a24a")
        ax.set_xticks(list(xs), names, rotation=30, ha="right")
        ax.set_ylabel("expected payment")
        ax.axhline(0, color="black", lw=0.6)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path


def _upper_tails(p: float, rho: int, ts) -> list[float]:
    """Float Pr(X > t) for X ~ Binomial(rho, p); drawing only, exact values live in the report."""
    if p <= 0 or p >= 1:
        return [float(p >= 1 and t < rho) for t in ts]
    lp, lq = math.log(p), math.log1p(-p)
    pmf = [
        math.exp(math.lgamma(rho + 1) - math.lgamma(k + 1) - math.lgamma(rho - k + 1) + k * lp + (rho - k) * lq)
        for k in range(rho + 1)
    ]
    above, acc = [0.0] * (rho + 2), 0.0
    for k in range(rho, -1, -1):
        above[k] = acc  # mass strictly above k
        acc += pmf[k]
    return [above[t] for t in ts]


def amplification_figure(report, path: Path, points: int = 200) -> Path | None:
    """Pr(more than t of rho repetitions accept) for p = c and p = s, with tau marked."""
    cert = report.amplification
    if not cert:
        return None
    rho, tau = cert["rho"], cert["tau"]
    lo = max(0, int(float(cert["s"]) * rho * 0.8))
    hi = min(rho, int(float(cert["c"]) * rho * 1.1) + 1)
    step = max(1, (hi - lo) // points)
    ts = list(range(lo, hi + 1, step))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 2.8))
        for p, label, color in ((cert["c"], "p = c", "#3b6ea5"), (cert["s"], "p = s", "#b5523b")):
            ys = _upper_tails(float(p), rho, ts)
            ax.plot(ts, ys, label=label, color=color, lw=1.2)
        ax.axvline(float(tau), color="black", ls="--", lw=0.8, label="tau")
        ax.set_xlabel("threshold t")
        ax.set_ylabel("Pr(accepts > t)")
        ax.set_title(f"rho = {rho}")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path


def render_figures(report, report_path: Path) -> list[Path]:
    report_path = Path(report_path)
    stem = report_path.with_suffix("")
    made = [
        gap_figure(report, Path(f"{stem}_gap.png")),
        amplification_figure(report, Path(f"{stem}_amplify.png")),
    ]
    return [p for p in made if p is not None]
