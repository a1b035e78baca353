"""Optional figures for CLI reports.

matplotlib is imported lazily with the Agg backend, so the library and the
default CLI path never need it.  Every figure is written next to the TSV it
is drawn from.
"""

from __future__ import annotations

from pathlib import Path


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("plotting needs matplotlib (pip install 'artifact[plot]')") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({"figure.figsize": (5.0, 3.4), "font.size": 9, "savefig.dpi": 120,
                         "axes.grid": True, "grid.alpha": 0.3})
    return plt


def _save(fig, path: Path) -> Path:
    # fixed metadata keeps repeated runs byte-identical
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    return path


def complexity_plot(table, path: Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots()
    ax.plot(table.n, table.p, "o-", label="p(n)")
    ax.plot(table.n, table.p_rs, "s-", label="right special")
    ax.plot(table.n, table.p_pr, "^-", label="privileged")
    ax.set_xlabel("n")
    ax.set_ylabel("count")
    ax.legend()
    out = _save(fig, path)
    plt.close(fig)
    return out


def zeta_plot(levels, partial_sums, closed_value, path: Path, s: float) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots()
    ax.plot(levels, partial_sums, ".-", label=f"partial sums at s = {s:.4g}")
    if closed_value is not None:
        ax.axhline(closed_value, color="k", lw=0.8, ls="--", label="closed form")
    ax.set_xlabel("level cutoff N")
    ax.set_ylabel("zeta")
    ax.legend()
    out = _save(fig, path)
    plt.close(fig)
    return out


def spectrum_plot(eigenvalues, weyl_table, path: Path) -> Path:
    plt = _pyplot()
    fig, (left, right) = plt.subplots(1, 2, figsize=(8.0, 3.4))
    vals = sorted(v for v in eigenvalues if v > 0)
    left.semilogy(range(1, len(vals) + 1), vals, ".")
    left.set_xlabel("index")
    left.set_ylabel("eigenvalue of -Δ")
    if weyl_table:
        lam, count = zip(*weyl_table)
        right.loglog(lam, count, "o-", ms=3)
    right.set_xlabel("λ")
    right.set_ylabel("N(λ)")
    out = _save(fig, path)
    plt.close(fig)
    return out


def order_plot(report, path: Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots()
    ax.semilogx(report.depths, report.max_ratios, "o-", base=2)
    ax.set_xlabel("depth")
    ax.set_ylabel("max d_sup / d_inf")
    ax.set_title(report.verdict_line(), fontsize=8)
    out = _save(fig, path)
    plt.close(fig)
    return out
