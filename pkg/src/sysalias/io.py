"""CSV/JSON readers and writers for matrices, trajectories and reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .identify import SelectionOperator, SparsityPrior
from .pipeline import Trajectory


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_rows(path):
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((lineno, [float(c) for c in row]))
            except ValueError:
                if not rows and lineno == 1:
                    continue  # header
                raise ValidationError(f"{path}: line {lineno}: non-numeric value in {row!r}")
    return rows


def read_matrix_csv(path) -> np.ndarray:
    rows = _parse_rows(path)
    if not rows:
        raise ValidationError(f"{path}: empty matrix file")
    width = len(rows[0][1])
    for lineno, r in rows:
        if len(r) != width:
            raise ValidationError(f"{path}: line {lineno}: expected {width} values, got {len(r)}")
    M = np.array([r for _, r in rows])
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{path}: non-finite entries")
    return M


def write_matrix_csv(path, M) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in np.atleast_2d(M):
            w.writerow([_fmt(x) for x in row])


def read_trajectory_csv(path, h: float | None = None, noise_sigma: float = 0.0, rtol: float = 1e-6) -> Trajectory:
    """Read ``t, x1, ..., xn`` rows; checks uniform spacing of ``t``.

    ``h`` overrides the spacing inferred from the time column (which must
    still be uniform).
    """
    rows = _parse_rows(path)
    if len(rows) < 2:
        raise ValidationError(f"{path}: need at least two samples")
    width = len(rows[0][1])
    if width < 2:
        raise ValidationError(f"{path}: need a time column and at least one state")
    for lineno, r in rows:
        if len(r) != width:
            raise ValidationError(f"{path}: line {lineno}: expected {width} values, got {len(r)}")
    data = np.array([r for _, r in rows])
    if not np.all(np.isfinite(data)):
        raise ValidationError(f"{path}: non-finite entries")
    t = data[:, 0]
    dt = np.diff(t)
    step = float(dt[0])  # reference spacing; the first row that departs from it is reported
    if step <= 0:
        raise ValidationError(f"{path}: time column must increase")
    bad = np.flatnonzero(np.abs(dt - step) > rtol * step)
    if bad.size:
        lineno = rows[bad[0] + 1][0]
        raise ValidationError(f"{path}: line {lineno}: non-uniform time step")
    return Trajectory(h if h is not None else step, data[:, 1:], noise_sigma)


def format_trajectory_csv(traj: Trajectory) -> str:
    lines = [",".join(["t"] + [f"x{i + 1}" for i in range(traj.n)])]
    for t, x in zip(traj.times, traj.samples):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in x]))
    return "\n".join(lines) + "\n"


def write_trajectory_csv(path, traj: Trajectory) -> None:
    Path(path).write_text(format_trajectory_csv(traj))


def _clean(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return None
        return obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text (no timestamps, stable float repr)."""
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def load_json(path) -> dict:
    try:
        with Path(path).open() as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def load_selection_operator(path) -> SelectionOperator:
    cfg = load_json(path)
    if "D" not in cfg:
        raise ValidationError(f"{path}: missing key 'D'")
    return SelectionOperator(np.asarray(cfg["D"], dtype=float), provenance=cfg.get("provenance", "custom"))


def load_sparsity_prior(path) -> SparsityPrior:
    cfg = load_json(path)
    if "P" in cfg:
        return SparsityPrior(np.asarray(cfg["P"], dtype=float))
    if "mask" in cfg:
        return SparsityPrior.from_mask(cfg["mask"])
    raise ValidationError(f"{path}: expected key 'P' or 'mask'")
