"""Benchmark table: Groebner-stage time and peak memory per model and mode."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .model import BUNDLED_MODELS, bundled_model_path
from .pipeline import MODES, RunConfig, run_pipeline

log = logging.getLogger(__name__)


@dataclass
class BenchRow:
    model: str
    polys: int | None = None
    vars: int | None = None
    trdeg: int | None = None
    seconds: dict[str, float | None] = field(default_factory=dict)
    memory: dict[str, int | None] = field(default_factory=dict)
    vars_by_mode: dict[str, int | None] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)

    def speedup(self, mode: str, baseline: str = "default") -> float | None:
        a, b = self.seconds.get(baseline), self.seconds.get(mode)
        if a is None or b is None or b <= 0:
            return None
        return a / b


def _model_ref(name: str):
    if name in BUNDLED_MODELS or name == "example1":
        return bundled_model_path(name)
    return Path(name)


def bench_row(model: str, modes: Sequence[str], *, seed: int = 0, weights: Mapping[str, str] | None = None,
              max_seconds: float | None = None, measure_memory: bool = True, **kw) -> BenchRow:
    row = BenchRow(Path(str(model)).stem)
    for mode in modes:
        wfile = (weights or {}).get(row.model)
        if mode == "zerodim-weights" and wfile is None:
            row.seconds[mode] = None
            row.errors[mode] = "no weight file"
            continue
        try:
            cfg = RunConfig(_model_ref(model), seed=seed, mode=mode, weights=wfile,
                            max_seconds=max_seconds, measure_memory=measure_memory, **kw)
            res = run_pipeline(cfg)
        except Exception as exc:  # one failing cell must not abort the table
            log.warning("%s/%s failed: %s", row.model, mode, exc)
            row.seconds[mode] = None
            row.memory[mode] = None
            row.errors[mode] = str(exc)
            continue
        row.polys, row.vars, row.trdeg = res.system.n_polys, res.system.n_vars, res.transcendence_degree
        row.vars_by_mode[mode] = res.final_system.n_vars
        complete = res.gb.basis.complete
        row.seconds[mode] = res.gb.seconds if complete else None
        row.memory[mode] = res.gb.peak_bytes if complete else None
        if not complete:
            row.errors[mode] = "budget exhausted"
    return row


def _fmt(v, spec="{:.2f}") -> str:
    return "N/A" if v is None else spec.format(v)


def header(modes: Sequence[str]) -> list[str]:
    cols = ["model", "polys", "vars", "trdeg"]
    cols += [f"time_{m}_s" for m in modes]
    cols += [f"mem_{m}_MB" for m in modes]
    cols += [f"speedup_{m}" for m in modes if m != "default"] if "default" in modes else []
    return cols


def row_cells(row: BenchRow, modes: Sequence[str]) -> list[str]:
    cells = [row.model, _fmt(row.polys, "{}"), _fmt(row.vars, "{}"), _fmt(row.trdeg, "{}")]
    cells += [_fmt(row.seconds.get(m), "{:.3f}") for m in modes]
    cells += [_fmt(None if row.memory.get(m) is None else row.memory[m] / 2**20) for m in modes]
    if "default" in modes:
        cells += [_fmt(row.speedup(m)) for m in modes if m != "default"]
    return cells


def format_table(rows: Sequence[BenchRow], modes: Sequence[str]) -> str:
    table = [header(modes)] + [row_cells(r, modes) for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(table[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def table_csv(rows: Sequence[BenchRow], modes: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header(modes))
    for r in rows:
        w.writerow(row_cells(r, modes))
    return buf.getvalue()


def bench_table(models: Sequence[str], modes: Sequence[str] = ("default", "zerodim"), **kw
                ) -> tuple[str, str, list[BenchRow]]:
    """Aligned text table, its CSV twin and the rows themselves."""
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise ValueError(f"unknown modes: {', '.join(bad)}")
    rows = [bench_row(m, modes, **kw) for m in models]
    return format_table(rows, modes), table_csv(rows, modes), rows
