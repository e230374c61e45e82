"""End-to-end run: parse, prolong, pick a basis, substitute, Groebner basis, classify."""

from __future__ import annotations

import time
import tracemalloc
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .algebra import DEFAULT_PRIME, MonomialOrder
from .basis import DEFAULT_CANDIDATES, BasisCandidate, CandidatePool, enumerate_candidates, jacobian_data
from .entropy import entropy_csv, score, select_best
from .groebner import FORMATS, GroebnerBasis, IdentReport, buchberger, classify, export_system
from .model import OdeModel
from .prolongation import PolySystem, SpecializationConfig, generate_Et
from .substitution import SubstitutionRecord, substitute_basis
from .validation import check_model, check_prime, check_probability

MODES = ("default", "zerodim", "zerodim-weights")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class StageError(RuntimeError):
    """An error tagged with the pipeline stage that raised it."""

    def __init__(self, stage: str, error: BaseException):
        self.stage = stage
        self.error = error
        super().__init__(f"[{stage}] {type(error).__name__}: {error}")


class BudgetExhausted(RuntimeError):
    pass


def read_weights(path: str | Path, names) -> list[int]:
    """Weight file: one ``name weight`` pair per line; unlisted variables weigh 1."""
    table: dict[str, int] = {}
    for no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").replace("=", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{no}: expected 'name weight'")
        table[parts[0]] = int(parts[1])
    unknown = set(table) - set(names)
    if unknown:
        raise ValueError(f"weights given for unknown variables: {', '.join(sorted(unknown))}")
    return [table.get(n, 1) for n in names]


@dataclass
class RunConfig:
    model: str | Path | OdeModel
    prime: int = DEFAULT_PRIME
    seed: int = 0
    candidates: int = DEFAULT_CANDIDATES
    mode: str = "zerodim"
    weights: str | Path | None = None
    export: str | None = None
    prob: Fraction | float = Fraction(99, 100)
    max_pairs: int = 10**6
    max_seconds: float | None = None
    strategy: str = "normal"
    measure_memory: bool = False

    def __post_init__(self):
        self.prime = check_prime(self.prime)
        self.prob = check_probability(self.prob)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        if self.mode == "zerodim-weights" and self.weights is None:
            raise ValueError("mode zerodim-weights needs a weight file")
        if self.export is not None and self.export not in FORMATS:
            raise ValueError(f"export format must be one of {', '.join(FORMATS)}")
        if self.candidates < 1:
            raise ValueError("the candidate cap must be positive")


@dataclass
class GBRun:
    basis: GroebnerBasis
    seconds: float
    peak_bytes: int | None


def timed_groebner(sys: PolySystem, order: MonomialOrder | None = None, *, max_pairs: int = 10**6,
                   max_seconds: float | None = None, strategy: str = "normal",
                   measure_memory: bool = False) -> GBRun:
    """Run the engine, timing only the Groebner stage."""
    if measure_memory:
        tracemalloc.start()
    t0 = time.perf_counter()
    try:
        G = buchberger(sys, order, max_pairs=max_pairs, max_seconds=max_seconds, strategy=strategy)
        seconds = time.perf_counter() - t0
        peak = tracemalloc.get_traced_memory()[1] if measure_memory else None
    finally:
        if measure_memory:
            tracemalloc.stop()
    return GBRun(G, seconds, peak)


@dataclass
class PipelineResult:
    config: RunConfig
    system: PolySystem
    transcendence_degree: int
    pool: CandidatePool | None = None
    basis: BasisCandidate | None = None
    reduced: PolySystem | None = None
    record: SubstitutionRecord | None = None
    gb: GBRun | None = None
    report: IdentReport | None = None
    export_text: str | None = None
    stage_seconds: dict[str, float] = field(default_factory=dict)

    @property
    def final_system(self) -> PolySystem:
        return self.reduced if self.reduced is not None else self.system

    @property
    def complete(self) -> bool:
        return self.gb is None or self.gb.basis.complete

    def entropy_csv(self) -> str:
        return entropy_csv(self.pool or [], self.system)


def _stage(name, timings):
    class _Ctx:
        def __enter__(self):
            self.t = time.perf_counter()

        def __exit__(self, et, ev, tb):
            timings[name] = time.perf_counter() - self.t
            if ev is not None and not isinstance(ev, (StageError, KeyboardInterrupt)):
                raise StageError(name, ev) from ev
            return False
    return _Ctx()


def run_pipeline(cfg: RunConfig, *, groebner: bool = True) -> PipelineResult:
    """Execute every stage; errors surface as :class:`StageError` with the stage name.

    With an export target the system is written out instead of being
    handed to the internal engine (unless ``groebner`` forces both).
    """
    t: dict[str, float] = {}
    with _stage("parse", t):
        model = check_model(cfg.model)
    with _stage("prolongation", t):
        sys = generate_Et(model, SpecializationConfig(seed=cfg.seed, prob=cfg.prob, prime=cfg.prime))
    with _stage("basis", t):
        data = jacobian_data(sys, cfg.seed)
    res = PipelineResult(cfg, sys, data.degree, stage_seconds=t)
    target = sys
    if cfg.mode != "default":
        with _stage("basis", t):
            pool = enumerate_candidates(sys, cfg.candidates, cfg.seed, data=data)
        with _stage("entropy", t):
            score(sys, pool)
            best = select_best(pool)
        with _stage("substitution", t):
            reduced, record = substitute_basis(sys, best, seed=cfg.seed, prob=cfg.prob, data=data)
        res.pool, res.basis, res.reduced, res.record = pool, best, reduced, record
        target = reduced
    order = None
    if cfg.mode == "zerodim-weights":
        with _stage("weights", t):
            order = MonomialOrder.weighted(read_weights(cfg.weights, target.ring.names))
            target = target.with_order(order)
            if res.reduced is not None:
                res.reduced = target
    if cfg.export:
        with _stage("export", t):
            res.export_text = export_system(target, cfg.export)
        if not groebner:
            return res
    with _stage("groebner", t):
        res.gb = timed_groebner(target, max_pairs=cfg.max_pairs, max_seconds=cfg.max_seconds,
                                strategy=cfg.strategy, measure_memory=cfg.measure_memory)
    if res.gb.basis.complete:
        with _stage("classify", t):
            res.report = classify(res.gb.basis, target, local=data, substitution=res.record)
    return res
