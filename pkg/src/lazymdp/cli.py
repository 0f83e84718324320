"""Command-line driver: single checks (JSON) and suites over a directory (CSV).

    lazymdp check --model coin --solver lazy-bvi --domain expl
    lazymdp suite models/ --solvers lazy-bvi,bvi --domains expl,pred --out results.csv

Exit codes: 0 success, 1 usage/parse/evaluation error, 2 budget exceeded
(a partial record with status "budget-exceeded" is still written).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Optional

from .domains import DOMAINS, make_domain
from .errors import BudgetExceeded, LazyMdpError
from .explicit import DEFAULT_STATE_CAP, ExplicitMdp, enumerate_states
from .model import with_target_command
from .oracle import value_iteration_oracle
from .parser import load_model
from .pasg import DEFAULT_MAX_NODES, Pasg, construct
from .solvers import (
    SolveResult,
    TraceHeuristic,
    bounded_value_iteration,
    brtdp,
    explicit_as_mdp,
    lazy_brtdp,
    pasg_as_mdp,
)
from .solvers.brtdp import DEFAULT_MAX_TRACES

SOLVERS = ("oracle", "bvi", "brtdp", "lazy-bvi", "lazy-brtdp")
HEURISTICS = tuple(h.value for h in TraceHeuristic)
EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2


@dataclass
class StatsRecord:
    model: str
    domain: str
    solver: str
    heuristic: str
    seed: int
    threshold: float
    lower: Optional[float] = None
    upper: Optional[float] = None
    total_nodes: int = 0
    covered_nodes: int = 0
    non_covered_nodes: int = 0
    explicit_states: Optional[int] = None
    iterations: int = 0
    time_ms: float = 0.0
    status: str = "ok"

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self))


RECORD_FIELDS = [f.name for f in dataclasses.fields(StatsRecord)]
CSV_HEADER = RECORD_FIELDS[:12] + ["ratio"] + RECORD_FIELDS[12:] + ["message"]
TIME_FIELDS = ("time_ms",)


@dataclass(frozen=True)
class RunConfig:
    solver: str = "lazy-bvi"
    domain: str = "expl"
    heuristic: str = "diff-based"
    seed: int = 0
    threshold: float = 1e-6
    waitlist: str = "lifo"
    max_nodes: int = DEFAULT_MAX_NODES
    max_traces: int = DEFAULT_MAX_TRACES
    max_states: int = DEFAULT_STATE_CAP
    smt_cmd: Optional[str] = None
    count_explicit: bool = False


def resolve_model(name_or_path: str) -> Path:
    """A path to a .gmc file, or the name of a bundled model."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    name = name_or_path if name_or_path.endswith(".gmc") else name_or_path + ".gmc"
    bundled = files("lazymdp") / "models" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise LazyMdpError(f"no model file or bundled model named {name_or_path!r}")


def bundled_models() -> list[str]:
    return sorted(p.name[:-4] for p in (files("lazymdp") / "models").iterdir() if p.name.endswith(".gmc"))


def run(model_path: Path, cfg: RunConfig, dump_pasg: Optional[Path] = None) -> StatsRecord:
    """Solve one model; budget overruns produce a partial record, other errors raise."""
    model, query = load_model(model_path)
    model, _ = with_target_command(model, query)
    rec = StatsRecord(
        model_path.stem, cfg.domain, cfg.solver, cfg.heuristic, cfg.seed, cfg.threshold
    )
    heuristic = TraceHeuristic(cfg.heuristic)
    start = time.perf_counter()
    pasg: Optional[Pasg] = None
    explicit: Optional[ExplicitMdp] = None
    result: Optional[SolveResult] = None
    domain = None
    try:
        if cfg.solver in ("oracle", "bvi", "brtdp"):
            explicit = enumerate_states(model, cfg.max_states)
            if cfg.solver == "oracle":
                value = value_iteration_oracle(explicit, cfg.threshold)
                result = SolveResult(value, value, 0, explicit.num_states)
            elif cfg.solver == "bvi":
                result = bounded_value_iteration(explicit_as_mdp(explicit), cfg.threshold)
            else:
                result = brtdp(explicit_as_mdp(explicit), heuristic, cfg.threshold, cfg.seed, cfg.max_traces)
        else:
            domain = make_domain(cfg.domain, model, cfg.smt_cmd)
            if cfg.solver == "lazy-bvi":
                pasg = construct(model, domain, cfg.waitlist, cfg.max_nodes)
                result = bounded_value_iteration(pasg_as_mdp(pasg), cfg.threshold)
            elif cfg.solver == "lazy-brtdp":
                pasg = Pasg(model, domain, cfg.waitlist, cfg.max_nodes)
                result = lazy_brtdp(pasg, heuristic, cfg.threshold, cfg.seed, cfg.max_traces)
            else:
                raise LazyMdpError(f"unknown solver {cfg.solver!r}")
    except BudgetExceeded as exc:
        rec.status = "budget-exceeded"
        if isinstance(exc.partial, SolveResult):
            result = exc.partial
        elif isinstance(exc.partial, Pasg):
            pasg = exc.partial
    finally:
        close = getattr(getattr(domain, "entailment", None), "close", None)
        if close is not None:
            close()
    rec.time_ms = (time.perf_counter() - start) * 1000.0
    if result is not None:
        rec.lower, rec.upper, rec.iterations = result.lower, result.upper, result.iterations
    if pasg is not None:
        rec.total_nodes, rec.covered_nodes, rec.non_covered_nodes = pasg.counts()
        if dump_pasg is not None:
            dump_pasg.write_text(pasg.dump())
    if explicit is not None:
        rec.explicit_states = explicit.num_states
        rec.total_nodes = rec.non_covered_nodes = explicit.num_states
    elif cfg.count_explicit:
        try:
            rec.explicit_states = enumerate_states(model, cfg.max_states).num_states
        except BudgetExceeded:
            rec.explicit_states = None
    return rec


def _summary(rec: StatsRecord) -> str:
    bracket = "n/a" if rec.lower is None else f"[{rec.lower:.9g}, {rec.upper:.9g}]"
    return (
        f"{rec.model}: {rec.solver}/{rec.domain} Pmax in {bracket}, "
        f"{rec.non_covered_nodes}/{rec.total_nodes} non-covered nodes, "
        f"{rec.iterations} iterations, {rec.time_ms:.1f} ms ({rec.status})"
    )


def _config(args) -> RunConfig:
    return RunConfig(
        solver=args.solver,
        domain=args.domain,
        heuristic=args.heuristic,
        seed=args.seed,
        threshold=args.threshold,
        waitlist=args.waitlist,
        max_nodes=args.max_nodes,
        max_traces=args.max_traces,
        max_states=args.max_states,
        smt_cmd=args.smt_cmd,
        count_explicit=args.count_explicit,
    )


def cmd_check(args) -> int:
    cfg = _config(args)
    try:
        rec = run(resolve_model(args.model), cfg, Path(args.dump_pasg) if args.dump_pasg else None)
    except LazyMdpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = rec.to_json() + "\n"
    if args.stats_out:
        Path(args.stats_out).write_text(text)
    else:
        sys.stdout.write(text)
    print(_summary(rec), file=sys.stderr)
    return EXIT_BUDGET if rec.status == "budget-exceeded" else EXIT_OK


def _suite_row(job) -> dict:
    path, cfg = job
    try:
        rec = run(Path(path), cfg)
        row = dataclasses.asdict(rec)
        row["message"] = ""
    except LazyMdpError as exc:
        row = dataclasses.asdict(
            StatsRecord(Path(path).stem, cfg.domain, cfg.solver, cfg.heuristic, cfg.seed, cfg.threshold, status="error")
        )
        row["message"] = str(exc)
    explicit, non_covered = row["explicit_states"], row["non_covered_nodes"]
    row["ratio"] = f"{non_covered / explicit:.6f}" if explicit else ""
    return row


def suite_jobs(directory: Path, args) -> list[tuple[str, RunConfig]]:
    models = sorted(directory.glob("*.gmc"), key=lambda p: p.stem)
    base = _config(args)
    configs = [
        dataclasses.replace(base, solver=s, domain=d, heuristic=h, seed=seed)
        for s, d, h, seed in itertools.product(
            _split(args.solvers, SOLVERS), _split(args.domains, DOMAINS),
            _split(args.heuristics, HEURISTICS), [int(x) for x in args.seeds.split(",")],
        )
    ]
    return [(str(m), c) for m in models for c in configs]


def _split(text: str, allowed) -> list[str]:
    items = [x.strip() for x in text.split(",") if x.strip()]
    for x in items:
        if x not in allowed:
            raise LazyMdpError(f"unknown value {x!r}; choose from {', '.join(allowed)}")
    return items


def cmd_suite(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return EXIT_ERROR
    try:
        jobs = suite_jobs(directory, args)
    except LazyMdpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_suite_row, jobs))
    else:
        rows = [_suite_row(j) for j in jobs]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row[k] is None else row[k] for k in CSV_HEADER})
    finally:
        if out is not sys.stdout:
            out.close()
    failed = sum(1 for r in rows if r["status"] != "ok")
    print(f"{len(rows)} runs, {failed} not ok", file=sys.stderr)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share exit code 1 with parse errors; 2 means budget exceeded
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--threshold", type=float, default=1e-6, help="absolute precision (default 1e-6)")
    p.add_argument("--waitlist", choices=("lifo", "fifo"), default="lifo")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    p.add_argument("--max-traces", type=int, default=DEFAULT_MAX_TRACES)
    p.add_argument("--max-states", type=int, default=DEFAULT_STATE_CAP, help="explicit state budget")
    p.add_argument("--smt-cmd", help="SMT-LIB solver command for PRED entailment, e.g. 'z3 -in'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lazymdp", description="Maximal reachability for symbolic MDPs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="solve one model and print a JSON record")
    check.add_argument("--model", required=True, help=".gmc file or bundled model name")
    check.add_argument("--solver", choices=SOLVERS, default="lazy-bvi")
    check.add_argument("--domain", choices=DOMAINS, default="expl")
    check.add_argument("--heuristic", choices=HEURISTICS, default="diff-based")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--stats-out", help="write the JSON record here instead of stdout")
    check.add_argument("--dump-pasg", help="write the graph (lazy solvers) as text")
    check.add_argument("--count-explicit", action="store_true", help="also count reachable states")
    _add_common(check)
    check.set_defaults(func=cmd_check)

    suite = sub.add_parser("suite", help="run every .gmc file in a directory, write CSV")
    suite.add_argument("directory")
    suite.add_argument("--solvers", default="lazy-bvi,bvi")
    suite.add_argument("--domains", default="expl,pred")
    suite.add_argument("--heuristics", default="diff-based")
    suite.add_argument("--seeds", default="0")
    suite.add_argument("--out", help="CSV file (default stdout)")
    suite.add_argument("--jobs", type=int, default=1, help="worker processes")
    suite.add_argument("--no-count-explicit", dest="count_explicit", action="store_false")
    _add_common(suite)
    suite.set_defaults(func=cmd_suite, solver="lazy-bvi", domain="expl", heuristic="diff-based", seed=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
