"""CSV/JSON output for scenario results.

Every byte written is a function of the config and seed only: no timestamps,
stable key order, fixed float formatting.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .scenarios import ScenarioResult, evaluate

SCHEMA_VERSION = 1


class OutputError(OSError):
    pass


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def _clean(obj):
    """Make metrics JSON-safe (numpy scalars, non-finite floats)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def _write(path: Path, text: str) -> Path:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def trajectories_csv(result: ScenarioResult) -> str:
    ens = result.ensemble
    stride = result.config.output_every
    idx = np.arange(0, len(ens.times), stride)
    if idx[-1] != len(ens.times) - 1:
        idx = np.append(idx, len(ens.times) - 1)
    lines = ["traj_id,t,x"]
    t_str = [_fmt(t) for t in ens.times[idx]]
    for i, row in enumerate(ens.positions):
        lines.extend(f"{i},{ts},{_fmt(x)}" for ts, x in zip(t_str, row[idx]))
    return "\n".join(lines) + "\n"


def density_csv(result: ScenarioResult) -> str:
    lines = ["t,x,rho"]
    x_str = [_fmt(x) for x in result.x]
    for t, rho in result.densities.items():
        ts = _fmt(t)
        lines.extend(f"{ts},{xs},{_fmt(r)}" for xs, r in zip(x_str, rho))
    return "\n".join(lines) + "\n"


def summary_dict(result: ScenarioResult) -> dict:
    return _clean({
        "schema_version": SCHEMA_VERSION,
        "scenario": result.config.scenario,
        "seed": result.config.seed,
        "config": result.config.echo(),
        "metrics": result.metrics,
        "equivariance": result.equivariance.as_dict(),
        "checks": {k: c.as_dict() for k, c in result.checks.items()},
        "passed": result.passed,
    })


def write_outputs(result: ScenarioResult, out_dir, figures: bool = True) -> list[Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out}: {exc.strerror or exc}") from exc
    written = [
        _write(out / "trajectories.csv", trajectories_csv(result)),
        _write(out / "density.csv", density_csv(result)),
        _write(out / "summary.json", json.dumps(summary_dict(result), indent=2, sort_keys=True) + "\n"),
    ]
    if result.labels is not None:
        body = "".join(f"{i},{lab}\n" for i, lab in enumerate(result.labels))
        written.append(_write(out / "outcomes.csv", "traj_id,label\n" + body))
    if figures:
        from .plotting import render_figures

        written.extend(render_figures(result, out))
    return written


def load_summary(out_dir) -> dict:
    path = Path(out_dir) / "summary.json"
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def recheck(summary: dict) -> dict[str, bool]:
    """Re-evaluate every stored check from its value/op/limit.

    A check passes only if the recomputed verdict and the stored flag agree on
    a pass.
    """
    if summary.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {summary.get('schema_version')!r}")
    verdicts = {}
    for name, c in summary["checks"].items():
        ok = evaluate(float(c["value"]), c["op"], float(c["limit"]))
        verdicts[name] = ok and bool(c["passed"])
    return verdicts
