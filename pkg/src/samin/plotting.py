"""SVG line charts for sweep results.

Output is byte-stable: a fixed SVG hash salt, no creation date, and every
number taken from the result rows rather than recomputed.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from samin.experiments import SweepResult  # noqa: E402

AXIS_LABELS = {
    "S": "task size S [bit]",
    "t_U": "UAV transmission time t_U [s]",
    "t_L": "LEO transmission time t_L [s]",
    "N": "MASSs per UAV N",
    "rho_local": "local CPU rate [cycles/s]",
    "T_deadline": "deadline [s]",
    "a": "offloading ratio a",
}
METRICS = {
    "energy": ("E_total", "total energy [J]"),
    "latency": ("T_mean", "mean task latency [s]"),
}
STYLE = {"svg.hashsalt": "samin", "svg.fonttype": "none", "figure.figsize": (6.4, 4.2),
         "axes.grid": True, "grid.alpha": 0.3}


def _metadata(result: SweepResult) -> dict:
    desc = f"config_hash={result.metadata.get('config_hash', '')} seed={result.metadata.get('seed', '')}\n"
    return {"Date": None, "Creator": "samin", "Title": f"sweep over {result.variable}",
            "Description": desc + result.metadata.get("config_text", "")}


def _save(fig, path, result):
    fig.savefig(path, format="svg", metadata=_metadata(result))
    plt.close(fig)


def render_plots(result: SweepResult, out_dir: str, trace_at=None) -> list:
    """Energy, latency and convergence-trace charts; one series per scheme.

    The trace chart shows the objective per outer iteration at sweep value
    ``trace_at`` (default: the middle sweep point).
    """
    if not result.rows:
        raise ValueError("nothing to plot: the sweep result has no rows")
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"{result.metadata.get('config_hash', 'run')}_{result.variable}")
    xlabel = AXIS_LABELS.get(result.variable, result.variable)
    paths = []
    with plt.rc_context(STYLE):
        for name, (column, ylabel) in METRICS.items():
            fig, ax = plt.subplots()
            for scheme in result.schemes:
                x, y = result.series(scheme, column)
                ax.plot(x, y, marker="o", label=scheme.upper())
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.legend()
            fig.tight_layout()
            path = f"{stem}_{name}.svg"
            _save(fig, path, result)
            paths.append(path)

        values = sorted({r["sweep_value"] for r in result.rows})
        at = values[len(values) // 2] if trace_at is None else trace_at
        fig, ax = plt.subplots()
        for scheme in result.schemes:
            row = next((r for r in result.rows if r["scheme"] == scheme and r["sweep_value"] == at), None)
            if row is None or not row["objective_trace"]:
                continue
            trace = [float(v) for v in row["objective_trace"].split(";")]
            ax.plot(range(len(trace)), trace, marker="o", label=scheme.upper())
        ax.set_xlabel("outer iteration")
        ax.set_ylabel("total energy [J]")
        ax.set_title(f"{result.variable} = {at:.6g}")
        ax.legend()
        fig.tight_layout()
        path = f"{stem}_trace.svg"
        _save(fig, path, result)
        paths.append(path)
    return paths
