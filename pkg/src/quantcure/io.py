"""CSV ingestion with categorical encoding, and serialized outputs.

Input files are UTF-8, comma-separated, header row required, ``.`` as
the decimal separator.  A covariate column is numeric when every cell
parses as a float, otherwise it is one-hot encoded against its
lexicographically first level (overridable per column).  The encoding
report maps each design column back to (variable, level) so draws can
be labelled and categories reconstructed.

Outputs are deterministic: floats serialize through repr (shortest
round-trip form), rows end with a bare newline, manifest keys are
sorted.  Re-running with the same seed yields byte-identical bodies.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DataLoadError, OutputError
from .fit import max_crossing_violation, quantile_curves
from .fit import cure_fraction_draws
from .mcmc import equal_tail_interval, hpd_interval
from .model import SurvivalDataset

__all__ = [
    "EncodingReport",
    "load_csv",
    "write_outputs",
    "write_study",
    "write_dataset",
    "write_km",
    "read_table",
]

LEVEL = 0.95


def _fmt(value):
    return repr(float(value))


def _package_version():
    try:
        from importlib.metadata import version

        return version("quantcure")
    except Exception:
        return "unknown"


@dataclass(frozen=True)
class EncodingReport:
    """Design-column provenance produced by ``load_csv``.

    ``columns`` names every design column (intercept first); ``terms``
    holds the matching (variable, level) pairs, level None for numeric
    columns and the intercept.  ``levels`` lists all observed levels per
    categorical variable and ``reference_levels`` the omitted one.
    """

    columns: tuple
    terms: tuple
    reference_levels: dict
    levels: dict

    def decode(self, design, variable):
        """Reconstruct each row's level of a categorical variable."""
        if variable not in self.levels:
            raise DataLoadError(f"{variable!r} is not an encoded categorical column")
        design = np.atleast_2d(np.asarray(design, dtype=float))
        out = np.full(design.shape[0], self.reference_levels[variable], dtype=object)
        for j, (var, level) in enumerate(self.terms):
            if var == variable and level is not None:
                out[design[:, j] == 1.0] = level
        return [str(v) for v in out]


def _read_rows(path):
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise DataLoadError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataLoadError(f"{path} is empty")
    return rows[0], rows[1:]


def _parse_float(cell, line, column):
    try:
        return float(cell)
    except ValueError:
        raise DataLoadError(
            f"line {line}: cannot parse {cell!r} in column {column!r} as a number"
        ) from None


def load_csv(path, time_column, status_column, covariate_columns, reference_levels=None):
    """Read a survival table into a dataset plus its encoding report.

    Line numbers in errors count the header as line 1.
    """
    header, rows = _read_rows(path)
    if len(set(header)) != len(header):
        dupes = sorted({name for name in header if header.count(name) > 1})
        raise DataLoadError(f"duplicate header names: {dupes}")
    wanted = [time_column, status_column, *covariate_columns]
    missing = [name for name in wanted if name not in header]
    if missing:
        raise DataLoadError(f"columns not found: {missing}")
    index = {name: header.index(name) for name in wanted}
    reference_levels = dict(reference_levels or {})

    cells = {name: [] for name in wanted}
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != len(header):
            raise DataLoadError(f"line {line}: expected {len(header)} cells, got {len(row)}")
        for name in wanted:
            value = row[index[name]].strip()
            if value == "":
                raise DataLoadError(f"line {line}: missing value in column {name!r}")
            cells[name].append((line, value))
    if not rows:
        raise DataLoadError(f"{path} has a header but no data rows")

    times = np.empty(len(rows))
    status = np.empty(len(rows), dtype=int)
    for i, (line, value) in enumerate(cells[time_column]):
        t = _parse_float(value, line, time_column)
        if not t > 0.0:
            raise DataLoadError(f"line {line}: time must be > 0, got {value}")
        times[i] = t
    for i, (line, value) in enumerate(cells[status_column]):
        s = _parse_float(value, line, status_column)
        if s not in (0.0, 1.0):
            raise DataLoadError(f"line {line}: status must be 0 or 1, got {value}")
        status[i] = int(s)

    design_columns = [np.ones(len(rows))]
    names = ["intercept"]
    terms = [("intercept", None)]
    levels_map = {}
    for name in covariate_columns:
        values = [value for _, value in cells[name]]
        try:
            numeric = np.array([float(v) for v in values])
        except ValueError:
            numeric = None
        if numeric is not None:
            design_columns.append(numeric)
            names.append(name)
            terms.append((name, None))
            continue
        levels = sorted(set(values))
        reference = reference_levels.get(name, levels[0])
        if reference not in levels:
            raise DataLoadError(
                f"reference level {reference!r} not among levels of {name!r}: {levels}"
            )
        reference_levels[name] = reference
        levels_map[name] = tuple(levels)
        for level in levels:
            if level == reference:
                continue
            design_columns.append(np.array([1.0 if v == level else 0.0 for v in values]))
            names.append(f"{name}={level}")
            terms.append((name, level))

    dataset = SurvivalDataset(
        times=times,
        status=status,
        design=np.column_stack(design_columns),
        columns=tuple(names),
    )
    report = EncodingReport(
        columns=tuple(names),
        terms=tuple(terms),
        reference_levels={k: v for k, v in reference_levels.items() if k in levels_map},
        levels=levels_map,
    )
    return dataset, report


def read_table(path):
    """CSV back into (header, rows-of-strings); test and tooling aid."""
    header, rows = _read_rows(path)
    return header, rows


def _ensure_dir(out_dir):
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, ".write_probe")
        with open(probe, "w", encoding="utf-8") as handle:
            handle.write("")
        os.remove(probe)
    except OSError as exc:
        raise OutputError(f"output directory {out_dir!r} is not writable: {exc}") from exc


def _write_csv(path, header, rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _pattern_key(row):
    return ",".join(format(float(v), "g") for v in row)


def _interval_cells(draws):
    hpd = hpd_interval(draws, LEVEL)
    eq = equal_tail_interval(draws, LEVEL)
    return [
        _fmt(np.mean(draws)),
        _fmt(hpd.lower),
        _fmt(hpd.upper),
        _fmt(eq.lower),
        _fmt(eq.upper),
    ]


def write_outputs(out_dir, dataset, fits, config, report=None, patterns=None):
    """Write draws, summaries, curves, cure fractions and the manifest.

    An empty grid writes the manifest alone.  Failed grid points are
    flagged in the manifest; curve files require every point to have
    succeeded.  Returns the manifest dictionary.
    """
    _ensure_dir(out_dir)
    if patterns is None:
        patterns = np.unique(dataset.design, axis=0)
    patterns = [tuple(float(v) for v in row) for row in patterns]
    coef_names = list(report.columns if report is not None else dataset.columns)
    param_names = coef_names + ["lambda", "alpha"]

    files = []
    summary_rows = []
    cure_rows = []
    failures = {}
    stalled = []
    rhat_flagged = []

    for f in fits:
        q_key = format(f.q, "g")
        if not f.ok:
            failures[q_key] = f.error
            continue
        if f.sample.diagnostics.stalled:
            stalled.append(q_key)
        if f.sample.diagnostics.rhat_flagged:
            rhat_flagged.append(q_key)
        draws_name = f"draws_q{q_key}.csv"
        _write_csv(
            os.path.join(out_dir, draws_name),
            param_names,
            [[_fmt(v) for v in row] for row in f.sample.draws],
        )
        files.append(draws_name)
        for j, name in enumerate(param_names):
            summary_rows.append([name, q_key, *_interval_cells(f.sample.draws[:, j])])
        for row in patterns:
            cure = cure_fraction_draws(f.sample, row, f.q, mode=config.mode)
            cure_rows.append([_pattern_key(row), q_key, *_interval_cells(cure)])

    ok_fits = [f for f in fits if f.ok]
    if ok_fits:
        _write_csv(
            os.path.join(out_dir, "summary.csv"),
            ["parameter", "q", "mean", "hpd_low", "hpd_high", "eq_low", "eq_high"],
            summary_rows,
        )
        files.append("summary.csv")
        _write_csv(
            os.path.join(out_dir, "cure_fraction.csv"),
            ["pattern", "q", "mean", "hpd_low", "hpd_high", "eq_low", "eq_high"],
            cure_rows,
        )
        files.append("cure_fraction.csv")

    crossing = None
    if ok_fits and not failures:
        table = quantile_curves(ok_fits, patterns, mode=config.mode)
        curve_rows = [
            [_pattern_key(pattern), format(q, "g"), _fmt(table.values[i, j])]
            for i, pattern in enumerate(table.patterns)
            for j, q in enumerate(table.qs)
        ]
        _write_csv(
            os.path.join(out_dir, "curves.csv"),
            ["pattern", "q", "estimate"],
            curve_rows,
        )
        files.append("curves.csv")
        crossing = max_crossing_violation(table)

    manifest = {
        "command": "fit",
        "config": {
            "q_grid": list(config.q_grid),
            "link": config.mode.value,
            "iterations": config.iterations,
            "burn_in": config.burn_in,
            "thin": config.thin,
            "n_chains": config.n_chains,
            "seed": config.seed,
            "proposal_scale": config.proposal_scale,
        },
        "data": {
            "n": dataset.n,
            "n_events": dataset.n_events,
            "columns": coef_names,
        },
        "patterns": [_pattern_key(row) for row in patterns],
        "interval_level": LEVEL,
        "failures": failures,
        "stalled": stalled,
        "rhat_flagged": rhat_flagged,
        "crossing_violation": crossing,
        "files": sorted(files),
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "quantcure": _package_version(),
        },
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def _write_json(path, payload):
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_study(out_dir, summaries, scenario, chain_settings=None):
    """Study table (one row per parameter, n, q) plus a manifest."""
    _ensure_dir(out_dir)
    rows = []
    for s in summaries:
        for j, name in enumerate(s.parameters):
            rows.append(
                [
                    name,
                    str(s.n),
                    format(s.q, "g"),
                    _fmt(s.truth[j]),
                    _fmt(s.mean_estimate[j]),
                    _fmt(s.bias[j]),
                    _fmt(s.mse[j]),
                    _fmt(s.coverage_hpd[j]),
                    _fmt(s.coverage_equal_tail[j]),
                ]
            )
    _write_csv(
        os.path.join(out_dir, "study.csv"),
        [
            "parameter",
            "n",
            "q",
            "truth",
            "mean_estimate",
            "bias",
            "mse",
            "coverage_hpd",
            "coverage_eq",
        ],
        rows,
    )
    manifest = {
        "command": "study",
        "scenario": {
            "alpha": scenario.alpha,
            "lambda": scenario.lam,
            "beta": list(scenario.beta),
            "q": scenario.q,
            "pc0": scenario.pc0,
            "pc1": scenario.pc1,
            "seed": scenario.seed,
        },
        "chain": chain_settings or {},
        "cells": [
            {"n": s.n, "q": s.q, "b_used": s.b_used, "n_failed": s.n_failed}
            for s in summaries
        ],
        "files": ["study.csv"],
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "quantcure": _package_version(),
        },
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def write_dataset(out_dir, dataset, latent, scenario):
    """Simulated data as CSV plus a manifest with the latent horizons."""
    _ensure_dir(out_dir)
    rows = [
        [_fmt(t), str(int(s)), format(float(x), "g")]
        for t, s, x in zip(dataset.times, dataset.status, dataset.design[:, 1])
    ]
    _write_csv(os.path.join(out_dir, "data.csv"), ["time", "status", "x1"], rows)
    manifest = {
        "command": "simulate",
        "scenario": {
            "alpha": scenario.alpha,
            "lambda": scenario.lam,
            "beta": list(scenario.beta),
            "q": scenario.q,
            "pc0": scenario.pc0,
            "pc1": scenario.pc1,
            "n": scenario.n,
            "seed": scenario.seed,
        },
        "tau": {"x0": latent.tau0, "x1": latent.tau1},
        "cured": int(np.sum(latent.cured)),
        "events": dataset.n_events,
        "files": ["data.csv"],
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "quantcure": _package_version(),
        },
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def write_km(out_dir, curves):
    """Grouped product-limit curves as one tidy table."""
    _ensure_dir(out_dir)
    rows = [
        [c.label, _fmt(t), _fmt(s), str(int(r))]
        for c in curves
        for t, s, r in zip(c.times, c.survival, c.at_risk)
    ]
    _write_csv(
        os.path.join(out_dir, "km.csv"), ["group", "time", "survival", "at_risk"], rows
    )
    return os.path.join(out_dir, "km.csv")
