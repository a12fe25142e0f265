"""Parameter sweeps over (source ratio, f, n_r) with repeated random trials.

Every trial draws a fresh deployment whose seed is
``mix_seed(base_seed, bits(ratio), bits(f), bits(n_r), trial)`` where
``bits`` is the IEEE-754 pattern of the value. Seeds therefore depend on the
cell's parameters and not on its position in the grid, so filtering or
reordering the grid leaves every remaining row unchanged, and the parallel
schedule cannot affect any output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .engine import run_trial
from .metrics import energy_index, evaluate
from .world import (ConfigError, WorldConfig, broadcast_radius, float_key, mix_seed,
                    n_star_from_ratio, sample_deployment)

CSV_COLUMNS = ["f", "n_r", "r", "ratio", "n_star", "trials", "cf_mean", "cf_sd",
               "pr_mean", "pr_sd", "tr_mean", "tr_sd", "energy_index"]

# indicator name -> (mean column, sd column)
INDICATORS = {
    "connected_fraction": ("cf_mean", "cf_sd"),
    "power_ratio": ("pr_mean", "pr_sd"),
    "treeness": ("tr_mean", "tr_sd"),
}


@dataclass
class SweepSpec:
    n: int = 2000
    R: float = 1.0
    B0: float = 1.0
    v: float = 1.0
    ratios: list = field(default_factory=list)
    f_values: list = field(default_factory=list)
    n_r_values: list = field(default_factory=list)
    trials: int = 200
    base_seed: int = 0
    jobs: int = 1
    finite_speed: bool = False

    def validate(self) -> None:
        if not (self.ratios and self.f_values and self.n_r_values):
            raise ConfigError("ratios, f_values and n_r_values must be nonempty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        for ratio in self.ratios:
            if not 0 < ratio <= 1:
                raise ConfigError(f"ratio {ratio} outside (0, 1]")
        # Let WorldConfig check every remaining combination.
        for ratio, f, n_r in self.cells():
            WorldConfig(R=self.R, B0=self.B0, v=self.v, n=self.n,
                        n_star=n_star_from_ratio(ratio, self.n), f=f, n_r=n_r,
                        seed=self.base_seed)

    def cells(self) -> list:
        """Grid cells as ``(ratio, f, n_r)``, ratio-major, then f, then n_r."""
        return [(ratio, f, n_r) for ratio in self.ratios
                for f in self.f_values for n_r in self.n_r_values]

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        known = {fl.name for fl in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown sweep spec fields: {sorted(unknown)}")
        try:
            spec = cls(**d)
            spec.ratios = [float(x) for x in spec.ratios]
            spec.f_values = [float(x) for x in spec.f_values]
            spec.n_r_values = [float(x) for x in spec.n_r_values]
            spec.n, spec.trials, spec.jobs = int(spec.n), int(spec.trials), int(spec.jobs)
            spec.base_seed = int(spec.base_seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed sweep spec: {exc}") from None
        return spec

    def to_dict(self) -> dict:
        return asdict(self)


def default_paper_spec() -> SweepSpec:
    """n = 2000, ratios a*10^-b (a in 1,2,5; b in 1,2,3), three f, four n_r, 200 trials."""
    ratios = sorted(a * 10.0 ** -b for a in (1, 2, 5) for b in (1, 2, 3))
    return SweepSpec(n=2000, ratios=[float(f"{x:.3g}") for x in ratios],
                     f_values=[0.1, 0.3, 0.5], n_r_values=[9.0, 11.0, 13.0, 15.0],
                     trials=200)


def load_spec(path) -> SweepSpec:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: sweep spec must be a JSON object")
    return SweepSpec.from_dict(data)


@dataclass(frozen=True)
class SweepRow:
    f: float
    n_r: float
    r: float
    ratio: float
    n_star: int
    trials: int
    cf_mean: float
    cf_sd: float
    pr_mean: float
    pr_sd: float
    tr_mean: float
    tr_sd: float
    energy_index: float

    def as_list(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


def trial_seed(base_seed: int, ratio: float, f: float, n_r: float, trial: int) -> int:
    return mix_seed(base_seed, float_key(ratio), float_key(f), float_key(n_r), trial)


def trial_config(spec: SweepSpec, ratio: float, f: float, n_r: float, trial: int) -> WorldConfig:
    return WorldConfig(R=spec.R, B0=spec.B0, v=spec.v, n=spec.n,
                       n_star=n_star_from_ratio(ratio, spec.n), f=f, n_r=n_r,
                       seed=trial_seed(spec.base_seed, ratio, f, n_r, trial),
                       finite_speed=spec.finite_speed)


def run_cell(spec: SweepSpec, cell: tuple) -> list:
    """MetricsReports for every trial of one cell, in trial order."""
    ratio, f, n_r = cell
    return [evaluate(run_trial(sample_deployment(trial_config(spec, ratio, f, n_r, t))))
            for t in range(spec.trials)]


def _sd(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def summarize(spec: SweepSpec, cell: tuple, reports: list) -> SweepRow:
    ratio, f, n_r = cell
    cf = np.array([m.connected_fraction for m in reports])
    pr = np.array([m.power_ratio for m in reports])
    tr = np.array([m.treeness for m in reports])
    return SweepRow(
        f=f, n_r=n_r, r=broadcast_radius(n_r, spec.n, spec.R), ratio=ratio,
        n_star=n_star_from_ratio(ratio, spec.n), trials=len(reports),
        cf_mean=float(cf.mean()), cf_sd=_sd(cf),
        pr_mean=float(pr.mean()), pr_sd=_sd(pr),
        tr_mean=float(tr.mean()), tr_sd=_sd(tr),
        energy_index=float(np.mean([energy_index(p, n_r) for p in pr])),
    )


def run_sweep_reports(spec: SweepSpec, progress=None) -> list:
    """Per-cell lists of trial reports, in :meth:`SweepSpec.cells` order."""
    spec.validate()
    cells = spec.cells()
    if spec.jobs == 1 or len(cells) == 1:
        out = []
        for cell in cells:
            out.append(run_cell(spec, cell))
            if progress:
                progress(cell)
        return out
    with ProcessPoolExecutor(max_workers=min(spec.jobs, os.cpu_count() or 1, len(cells))) as pool:
        futures = [pool.submit(run_cell, spec, cell) for cell in cells]
        out = []
        for cell, fut in zip(cells, futures):
            out.append(fut.result())
            if progress:
                progress(cell)
        return out


def run_sweep(spec: SweepSpec, per_trial=None, progress=None) -> list:
    """Run every cell of ``spec`` and return one :class:`SweepRow` per cell.

    ``per_trial``, if given, is a text stream that receives one JSON line per
    trial with the cell parameters, trial index, seed and metrics.
    """
    all_reports = run_sweep_reports(spec, progress)
    rows = []
    for cell, reports in zip(spec.cells(), all_reports):
        rows.append(summarize(spec, cell, reports))
        if per_trial is not None:
            ratio, f, n_r = cell
            for t, m in enumerate(reports):
                rec = {"ratio": ratio, "f": f, "n_r": n_r, "trial": t,
                       "seed": trial_seed(spec.base_seed, ratio, f, n_r, t), **asdict(m)}
                per_trial.write(json.dumps(rec) + "\n")
    return rows


def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def emit_csv(rows) -> str:
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to emit")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(x) for x in row.as_list()])
    return buf.getvalue()


def parse_csv(text: str) -> list:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header: {header}")
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(CSV_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(rec)}")
        vals = dict(zip(CSV_COLUMNS, rec))
        rows.append(SweepRow(**{c: int(v) if c in ("n_star", "trials") else float(v)
                                for c, v in vals.items()}))
    if not rows:
        raise ValueError("CSV holds no data rows")
    return rows


def read_csv(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_csv(fh.read())


def _nr_label(n_r: float) -> str:
    return f"{n_r:g}"


def plot_data(rows) -> dict:
    """File name -> text for every (indicator, n_r) pair present in ``rows``.

    Each file is a whitespace table with one line per ratio, columns
    ``ratio log10_ratio`` followed by one mean column per f (``nan`` where
    the grid has no such cell).
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to emit")
    n_rs = sorted({row.n_r for row in rows})
    fs = sorted({row.f for row in rows})
    out = {}
    for name, (mean_col, _) in INDICATORS.items():
        for n_r in n_rs:
            sub = [row for row in rows if row.n_r == n_r]
            ratios = sorted({row.ratio for row in sub})
            lookup = {(row.ratio, row.f): getattr(row, mean_col) for row in sub}
            lines = [f"# {name} vs source ratio, n_r={_nr_label(n_r)}",
                     "# ratio log10_ratio " + " ".join(f"f={f:g}" for f in fs)]
            for ratio in ratios:
                vals = [lookup.get((ratio, f), math.nan) for f in fs]
                lines.append(" ".join([repr(ratio), repr(math.log10(ratio))]
                                      + [repr(float(v)) for v in vals]))
            out[f"{name}_nr{_nr_label(n_r)}.dat"] = "\n".join(lines) + "\n"
    return out


def emit_plot_data(rows, out_dir) -> list:
    """Write :func:`plot_data` files into ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in plot_data(rows).items():
            path = out_dir / name
            path.write_text(text, encoding="utf-8")
            written.append(path)
    except OSError as exc:
        raise OSError(f"{exc.filename or out_dir}: {exc.strerror}") from exc
    return written


def parse_filter(text: str) -> dict:
    """Parse ``f=0.1,nr=13`` style filters into ``{"f": [0.1], "n_r": [13.0]}``."""
    keys = {"f": "f", "nr": "n_r", "n_r": "n_r", "ratio": "ratio"}
    out: dict = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, val = part.partition("=")
        if not sep or key.strip() not in keys:
            raise ConfigError(f"bad filter term {part!r}; expected f=, nr= or ratio=")
        try:
            out.setdefault(keys[key.strip()], []).append(float(val))
        except ValueError:
            raise ConfigError(f"bad filter value in {part!r}") from None
    return out


def apply_filter(spec: SweepSpec, flt: dict) -> SweepSpec:
    """Restrict the spec's grid lists to the values named in ``flt``."""
    def keep(values, wanted):
        if wanted is None:
            return list(values)
        kept = [x for x in values if any(math.isclose(x, w, rel_tol=1e-12) for w in wanted)]
        if not kept:
            raise ConfigError(f"filter {wanted} matches none of {values}")
        return kept

    d = spec.to_dict()
    d["ratios"] = keep(spec.ratios, flt.get("ratio"))
    d["f_values"] = keep(spec.f_values, flt.get("f"))
    d["n_r_values"] = keep(spec.n_r_values, flt.get("n_r"))
    return SweepSpec.from_dict(d)
