"""File formats: trial logs, coincidence-count files, sweep series, reports.

- Trial log: line-delimited JSON, one record per line after a header object.
  hidden_theta (ground truth) is written only when explicitly revealed.
- Counts file: the coincidence grid in the B-rows x A-columns layout, plus
  per-setting trial totals; the layout an analyzer needs to re-estimate E,
  S and the success probability without the raw log.
- Series file: tab-separated (threshold, success probability, S, sigmas).

All exports use degrees; everything is deterministic given its inputs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .analysis import BellEstimate, VisibilityEstimate, WitnessResult
from .experiment import (
    CHSH_SETTING_NAMES,
    CoincidenceTable,
    Setting,
    TrialLog,
)
from .polarization import Basis

__all__ = [
    "write_trial_log",
    "read_trial_log",
    "write_counts",
    "read_counts",
    "write_series",
    "read_fringe_scan",
    "bell_report",
    "witness_report",
    "sweep_report",
]

_VERDICT_TO_INT = {"PLUS": 1, "MINUS": -1, "INCONCLUSIVE": 0}
_CLICK_TO_INT = {"A1": 1, "A2": -1, None: 0}
_INT_TO_VERDICT = {v: k for k, v in _VERDICT_TO_INT.items()}
_INT_TO_CLICK = {v: k for k, v in _CLICK_TO_INT.items()}


def write_trial_log(
    path: str | Path,
    log: TrialLog,
    seed: Optional[int] = None,
    reveal_hidden: bool = False,
) -> None:
    header = {
        "format": "macrobell-trial-log",
        "version": 1,
        "seed": seed,
        "reveal_hidden": reveal_hidden,
        "settings": [
            {"name": s.name, "a_deg": s.a.degrees, "b_deg": s.b.degrees}
            for s in log.settings
        ],
        "pairs_attempted": [int(p) for p in log.pairs_attempted],
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for i in range(len(log)):
            setting = log.settings[int(log.setting_index[i])]
            row = {
                "trial_id": i,
                "timestamp": i,
                "setting": setting.name,
                "a_basis_deg": setting.a.degrees,
                "b_basis_deg": setting.b.degrees,
                "a_click": _INT_TO_CLICK[int(log.a_click[i])],
                "i_plus": float(log.i_plus[i]),
                "i_minus": float(log.i_minus[i]),
                "verdict": _INT_TO_VERDICT[int(log.verdict[i])],
            }
            if reveal_hidden:
                row["hidden_theta_deg"] = math.degrees(float(log.hidden_theta[i]))
            fh.write(json.dumps(row) + "\n")


def read_trial_log(path: str | Path) -> TrialLog:
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format") != "macrobell-trial-log":
            raise ValueError(f"{path}: not a trial log")
        settings = tuple(
            Setting(
                s["name"],
                Basis.from_degrees(s["a_deg"]),
                Basis.from_degrees(s["b_deg"]),
            )
            for s in header["settings"]
        )
        by_name = {s.name: i for i, s in enumerate(settings)}
        setting_index, theta, a_click, i_plus, i_minus, verdict = (
            [], [], [], [], [], []
        )
        for line in fh:
            row = json.loads(line)
            setting_index.append(by_name[row["setting"]])
            theta.append(math.radians(row.get("hidden_theta_deg", 0.0)))
            a_click.append(_CLICK_TO_INT[row["a_click"]])
            i_plus.append(row["i_plus"])
            i_minus.append(row["i_minus"])
            verdict.append(_VERDICT_TO_INT[row["verdict"]])
    return TrialLog(
        settings,
        np.asarray(setting_index, dtype=np.int16),
        np.asarray(theta, dtype=float),
        np.asarray(a_click, dtype=np.int8),
        np.asarray(i_plus, dtype=float),
        np.asarray(i_minus, dtype=float),
        np.asarray(verdict, dtype=np.int8),
        np.asarray(header.get("pairs_attempted", [0] * len(settings)), dtype=np.int64),
    )


_GRID_COLS = ("a1", "a1_perp", "a2", "a2_perp")
_GRID_ROWS = ("b1", "b1_perp", "b2", "b2_perp")


def _counts_grid(tables: dict[str, CoincidenceTable]) -> list[list[int]]:
    grid = [[0] * 4 for _ in range(4)]
    for i, a_name in enumerate(("a1", "a2")):
        for j, b_name in enumerate(("b1", "b2")):
            t = tables[f"{a_name}{b_name}"]
            grid[2 * j][2 * i] = t.n_a1_plus
            grid[2 * j + 1][2 * i] = t.n_a1_minus
            grid[2 * j][2 * i + 1] = t.n_a2_plus
            grid[2 * j + 1][2 * i + 1] = t.n_a2_minus
    return grid


def render_counts_grid(tables: dict[str, CoincidenceTable]) -> str:
    grid = _counts_grid(tables)
    width = 9
    lines = ["".join(f"{c:>{width}}" for c in ("",) + _GRID_COLS)]
    for row_name, row in zip(_GRID_ROWS, grid):
        lines.append(
            f"{row_name:>{width}}" + "".join(f"{v:>{width}}" for v in row)
        )
    return "\n".join(lines)


def write_counts(path: str | Path, tables: dict[str, CoincidenceTable]) -> None:
    for name in CHSH_SETTING_NAMES:
        if name not in tables:
            raise KeyError(f"missing CHSH setting: {name}")
    angles = " ".join(
        f"{k}={v:g}"
        for k, v in (
            ("a1", tables["a1b1"].setting.a.degrees),
            ("a2", tables["a2b1"].setting.a.degrees),
            ("b1", tables["a1b1"].setting.b.degrees),
            ("b2", tables["a1b2"].setting.b.degrees),
        )
    )
    trials = " ".join(
        f"{n}={tables[n].trials}" for n in CHSH_SETTING_NAMES
    )
    conclusive = " ".join(
        f"{n}={tables[n].conclusive}" for n in CHSH_SETTING_NAMES
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# macrobell counts v1\n")
        fh.write("# conclusive coincidences, B verdict rows x A click columns\n")
        fh.write(render_counts_grid(tables) + "\n\n")
        fh.write(f"angles_deg: {angles}\n")
        fh.write(f"trials: {trials}\n")
        fh.write(f"conclusive: {conclusive}\n")


def _parse_kv(line: str) -> dict[str, float]:
    _, _, payload = line.partition(":")
    out: dict[str, float] = {}
    for item in payload.split():
        key, _, value = item.partition("=")
        out[key] = float(value)
    return out


def read_counts(path: str | Path) -> dict[str, CoincidenceTable]:
    grid_rows: dict[str, list[int]] = {}
    angles: dict[str, float] = {"a1": 22.5, "a2": 157.5, "b1": 0.0, "b2": 135.0}
    trials: dict[str, float] = {}
    conclusive: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("angles_deg:"):
                angles.update(_parse_kv(line))
            elif line.startswith("trials:"):
                trials = _parse_kv(line)
            elif line.startswith("conclusive:"):
                conclusive = _parse_kv(line)
            else:
                fields = line.split()
                if fields[0] in _GRID_ROWS:
                    grid_rows[fields[0]] = [int(v) for v in fields[1:5]]
    missing = [r for r in _GRID_ROWS if r not in grid_rows]
    if missing:
        raise ValueError(f"{path}: counts grid is missing rows {missing}")

    tables: dict[str, CoincidenceTable] = {}
    for i, a_name in enumerate(("a1", "a2")):
        for j, b_name in enumerate(("b1", "b2")):
            name = f"{a_name}{b_name}"
            cells = (
                grid_rows[_GRID_ROWS[2 * j]][2 * i],
                grid_rows[_GRID_ROWS[2 * j + 1]][2 * i],
                grid_rows[_GRID_ROWS[2 * j]][2 * i + 1],
                grid_rows[_GRID_ROWS[2 * j + 1]][2 * i + 1],
            )
            cell_sum = sum(cells)
            n_conclusive = int(conclusive.get(name, cell_sum))
            n_trials = int(trials.get(name, n_conclusive))
            tables[name] = CoincidenceTable(
                setting=Setting(
                    name,
                    Basis.from_degrees(angles[a_name]),
                    Basis.from_degrees(angles[b_name]),
                ),
                n_a1_plus=cells[0],
                n_a1_minus=cells[1],
                n_a2_plus=cells[2],
                n_a2_minus=cells[3],
                trials=n_trials,
                conclusive=n_conclusive,
            )
    return tables


def write_series(path: str | Path, rows: Iterable[dict]) -> None:
    columns = (
        "threshold",
        "success_probability",
        "sigma_success",
        "S",
        "sigma_S",
        "conclusive",
        "trials",
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(columns) + "\n")
        for row in rows:
            fh.write("\t".join(repr(row[c]) if isinstance(row[c], float) else str(row[c]) for c in columns) + "\n")


def read_fringe_scan(path: str | Path) -> list[tuple[float, float]]:
    """Scan file: 'alpha_deg count' per line, '#' comments; returns radians."""
    scan: list[tuple[float, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            alpha_deg, count = line.split()[:2]
            scan.append((math.radians(float(alpha_deg)), float(count)))
    if not scan:
        raise ValueError(f"{path}: empty fringe scan")
    return scan


def bell_report(
    estimate: BellEstimate, tables: Optional[dict[str, CoincidenceTable]] = None
) -> str:
    lines = ["CHSH-Bell analysis", "=================="]
    lines.append(
        f"{'setting':>8}{'alpha_deg':>11}{'beta_deg':>10}{'E':>9}{'sigma_E':>9}"
    )
    for name in CHSH_SETTING_NAMES:
        a_deg = tables[name].setting.a.degrees if tables else float("nan")
        b_deg = tables[name].setting.b.degrees if tables else float("nan")
        lines.append(
            f"{name:>8}{a_deg:>11.1f}{b_deg:>10.1f}"
            f"{estimate.e_terms[name]:>9.3f}{estimate.sigma_e[name]:>9.3f}"
        )
    lines.append("")
    lines.append(
        f"S = {estimate.s:.3f} +/- {estimate.sigma_s:.3f}"
        "   (local bound 2, quantum bound 2.828)"
    )
    lines.append(
        f"success probability = {estimate.success_probability:.4f}"
        f"   (conclusive {estimate.conclusive} / trials {estimate.trials})"
    )
    if tables is not None:
        lines.append("")
        lines.append("coincidence counts (B verdict rows x A click columns):")
        lines.append(render_counts_grid(tables))
    return "\n".join(lines) + "\n"


def witness_report(
    result: WitnessResult, estimates: Iterable[VisibilityEstimate] = ()
) -> str:
    lines = ["Visibility witness", "=================="]
    for est in estimates:
        lines.append(
            f"V{est.basis} = {est.v:.3f} +/- {est.sigma_v:.3f}  [{est.method}]"
        )
    lines.append(
        f"total |sum V| = {result.total:.3f} +/- {result.sigma_total:.3f}"
        f"   (separable bound {result.bound:g})"
    )
    verdict = "VIOLATED" if result.violated else "not violated"
    lines.append(
        f"bound {verdict} ({result.significance:+.1f} sigma)"
    )
    return "\n".join(lines) + "\n"


def sweep_report(rows: list[dict]) -> str:
    lines = ["Threshold sweep", "==============="]
    lines.append(
        f"{'threshold':>11}{'P_s':>9}{'sigma':>8}{'S':>8}{'sigma_S':>9}"
    )
    for row in rows:
        lines.append(
            f"{row['threshold']:>11.5f}{row['success_probability']:>9.4f}"
            f"{row['sigma_success']:>8.4f}{row['S']:>8.3f}{row['sigma_S']:>9.3f}"
        )
    return "\n".join(lines) + "\n"
