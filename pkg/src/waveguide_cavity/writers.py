"""
CSV, JSON and SVG emission.

CSV files start with ``# key: value`` metadata lines followed by a plain
pandas table. The ``created`` line is the only non-deterministic content and
is left out in reproducible mode.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .errors import _jsonable  # noqa: E402

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"
SVG_HASH_SALT = "waveguide-cavity"


def _meta_value(value: Any) -> str:
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    if isinstance(value, (str, int, bool)) or value is None:
        return str(value)
    return json.dumps(_jsonable(value), sort_keys=True)


def metadata_lines(meta: Mapping[str, Any], reproducible: bool = False) -> list[str]:
    lines = [f"# {key}: {_meta_value(meta[key])}" for key in sorted(meta)]
    if not reproducible:
        lines.append(f"# created: {pd.Timestamp.now(tz='UTC').isoformat()}")
    return lines


def render_csv(frame: pd.DataFrame, meta: Mapping[str, Any], reproducible: bool = False) -> str:
    header = "\n".join(metadata_lines(meta, reproducible))
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return f"{header}\n{body}" if header else body


def render_json(frame: pd.DataFrame, meta: Mapping[str, Any], reproducible: bool = False) -> str:
    payload: dict[str, Any] = {"meta": _jsonable(dict(meta))}
    if not reproducible:
        payload["meta"]["created"] = pd.Timestamp.now(tz="UTC").isoformat()
    payload["columns"] = list(frame.columns)
    payload["rows"] = json.loads(frame.to_json(orient="records", double_precision=15))
    return json.dumps(payload, indent=2, sort_keys=False)


def render_table(
    frame: pd.DataFrame, meta: Mapping[str, Any], fmt: str = "csv", reproducible: bool = False
) -> str:
    if fmt == "json":
        return render_json(frame, meta, reproducible)
    return render_csv(frame, meta, reproducible)


def write_table(
    frame: pd.DataFrame,
    path: str | Path,
    meta: Mapping[str, Any],
    fmt: str = "csv",
    reproducible: bool = False,
) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render_table(frame, meta, fmt, reproducible), encoding="utf-8")
    logger.info("Wrote %s (%d rows)", out, len(frame))
    return out


def read_csv(path: str | Path) -> tuple[dict[str, str], pd.DataFrame]:
    """Inverse of ``render_csv``: metadata lines as strings plus the table."""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            meta[key] = value
    return meta, pd.read_csv(path, comment="#")


def write_svg(
    path: str | Path,
    curves: Iterable[tuple[str, Sequence[float], Sequence[float]]],
    *,
    envelope: tuple[Sequence[float], float] | None = None,
    xlabel: str = r"$\gamma t$",
    ylabel: str = r"$|c_0|^2$",
    title: str | None = None,
) -> Path:
    """
    Line plot of labelled curves, optionally with the decay envelope
    e^{-rate t} drawn dashed black.
    """
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for label, x, y in curves:
        ax.plot(np.asarray(x), np.asarray(y), linewidth=1.2, label=label)
    if envelope is not None:
        t, rate = envelope
        t = np.asarray(t)
        ax.plot(t, np.exp(-rate * t), "k--", linewidth=1.0, label="envelope")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8, loc="upper right")
    ax.grid(alpha=0.3)

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    logger.info("Wrote %s", out)
    return out


__all__ = [
    "metadata_lines",
    "render_csv",
    "render_json",
    "render_table",
    "write_table",
    "read_csv",
    "write_svg",
]
