"""Probability traces, analytic bounds and time-series serialization."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .basis import ProgramLineSpec
from .propagator import EvolutionResult

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TimeSeries:
    label: str
    t: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    probability: bool = True

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("t and values must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("t must be strictly increasing")
        if self.probability and v.size and (v.min() < -PROB_TOL or v.max() > 1 + PROB_TOL):
            raise ValueError(f"probability series {self.label!r} leaves [0, 1]")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.values.tolist()))

    def argmax(self) -> tuple[float, float]:
        i = int(np.argmax(self.values))
        return float(self.t[i]), float(self.values[i])

    def max(self) -> float:
        return float(self.values.max())

    def window(self, t_min: float = -np.inf, t_max: float = np.inf) -> "TimeSeries":
        sel = (self.t >= t_min) & (self.t <= t_max)
        return TimeSeries(self.label, self.t[sel], self.values[sel], self.probability)

    def to_json(self) -> dict:
        return {"label": self.label, "samples": [[t, v] for t, v in self.samples]}

    @classmethod
    def from_json(cls, data: dict) -> "TimeSeries":
        arr = np.asarray(data["samples"], dtype=float).reshape(-1, 2)
        return cls(data["label"], arr[:, 0], arr[:, 1], probability=False)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(series: TimeSeries | Sequence[TimeSeries], path, index_name: str = "t") -> None:
    """One ``t`` column followed by one column per series (shared grid)."""
    if isinstance(series, TimeSeries):
        series = [series]
    t = series[0].t
    for s in series[1:]:
        if not np.array_equal(s.t, t):
            raise ValueError("all series in one CSV must share the time grid")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([index_name] + [s.label for s in series])
        for i, ti in enumerate(t):
            w.writerow([_fmt(ti)] + [_fmt(s.values[i]) for s in series])


def read_csv(path) -> list[TimeSeries]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))
    return [TimeSeries(label, body[:, 0], body[:, k], probability=False)
            for k, label in enumerate(header[1:], start=1)]


def write_json(series: TimeSeries | Sequence[TimeSeries], path) -> None:
    """A single series as ``{label, samples}``; several as a list of those."""
    if isinstance(series, TimeSeries):
        payload = series.to_json()
    else:
        payload = [s.to_json() for s in series]
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_json(path) -> list[TimeSeries]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    return [TimeSeries.from_json(d) for d in data]


def _check_basis(result: EvolutionResult, spec: ProgramLineSpec):
    if result.basis != spec.basis:
        raise ValueError(f"result basis {result.basis} does not match spec basis {spec.basis}")


def completion_probability(result: EvolutionResult, spec: ProgramLineSpec,
                           label: str = "p_completion") -> TimeSeries:
    """P(Q >= s), summed over register and control."""
    _check_basis(result, spec)
    mask = spec.basis.mask(sites=(spec.s, spec.n_sites))
    return TimeSeries(label, result.times, result.probability(mask))


def control_resolved_probability(result: EvolutionResult, spec: ProgramLineSpec, control,
                                 site_range: tuple[int, int], label: str | None = None) -> TimeSeries:
    _check_basis(result, spec)
    if not spec.has_control:
        raise ValueError("program line has no control q-bit")
    mask = spec.basis.mask(sites=tuple(site_range), control=control)
    if label is None:
        label = f"p_{str(getattr(control, 'name', control)).lower()}_{site_range[0]}_{site_range[1]}"
    return TimeSeries(label, result.times, result.probability(mask))


def bound_eq13(s: int) -> float:
    """Upper bound 8 / s^(2/3) on completion without telomere."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return 8.0 / s ** (2.0 / 3.0)


def bound_eq14(s: int, delta: int) -> float:
    """Upper bound on completion with a telomere of length ``delta``."""
    if s < 1 or delta < 0:
        raise ValueError("need s >= 1 and delta >= 0")
    u = 1.0 / (1.0 + 2.0 * delta / s)
    return 1.0 - (2.0 / math.pi) * (math.asin(u) - u * math.sqrt(max(0.0, 1.0 - u * u)))
