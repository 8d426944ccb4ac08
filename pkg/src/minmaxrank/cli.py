"""Command-line front end: ingestion, aggregation runs, benchmarks, oracle.

Instance files are line-oriented UTF-8 text.  ``#`` starts a comment line,
an optional ``elements:`` line pre-registers element names (written by the
serializer so files round-trip), and each data line reads

    class=<id> lambda=<weight> : token token { tied tokens } token ...

listing one ranking best-to-worst, with tie groups in braces.  Element
names are mapped to 1..n in first-seen order; every line must cover the
same ground set, and all lines of a class must carry the same weight.

Gene-order files have one genome per line: a name, a tab, and a signed
permutation of 1..n.  Signs are stripped and each genome becomes its own
singleton class with weight 1.

Exit codes: 0 success, 2 parse error, 3 incompatible flags, 4 instance too
large for exact enumeration.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import statistics
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import aggregators, exact
from .distances import DistanceKind, SetDistanceKind, effective_kind, set_distance
from .mallows import TwoLevelConfig, sample_instance
from .rankings import (
    Instance,
    PartialRanking,
    Permutation,
    Ranking,
    RankingClass,
    as_partial,
)


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.message = message


@dataclass(frozen=True)
class ParsedFile:
    instance: Instance
    element_names: tuple[str, ...]
    class_ids: tuple[str, ...]


def _tokenize_ranking(text: str, line_no: int) -> list[list[str]]:
    """Split a ranking clause into bucket token groups."""
    tokens = text.replace("{", " { ").replace("}", " } ").split()
    buckets: list[list[str]] = []
    group: list[str] | None = None
    for tok in tokens:
        if tok == "{":
            if group is not None:
                raise ParseError(line_no, "nested '{'")
            group = []
        elif tok == "}":
            if group is None:
                raise ParseError(line_no, "unmatched '}'")
            if not group:
                raise ParseError(line_no, "empty tie group")
            buckets.append(group)
            group = None
        elif group is not None:
            group.append(tok)
        else:
            buckets.append([tok])
    if group is not None:
        raise ParseError(line_no, "unclosed '{'")
    if not buckets:
        raise ParseError(line_no, "empty ranking")
    return buckets


def parse_instance_file(text: str) -> ParsedFile:
    names: dict[str, int] = {}

    def element_id(name: str) -> int:
        if name not in names:
            names[name] = len(names) + 1
        return names[name]

    entries: list[tuple[int, str, Fraction, list[list[int]]]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("elements:"):
            for name in line[len("elements:"):].split():
                element_id(name)
            continue
        head, sep, ranking_part = line.partition(":")
        if not sep:
            raise ParseError(line_no, "missing ':' before ranking")
        fields = head.split()
        if len(fields) != 2 or not fields[0].startswith("class=") or not fields[
            1
        ].startswith("lambda="):
            raise ParseError(line_no, "expected 'class=<id> lambda=<weight> :'")
        class_id = fields[0][len("class="):]
        if not class_id:
            raise ParseError(line_no, "empty class id")
        try:
            weight = Fraction(fields[1][len("lambda="):])
        except (ValueError, ZeroDivisionError):
            raise ParseError(line_no, f"bad lambda {fields[1]!r}")
        if weight <= 0:
            raise ParseError(line_no, "lambda must be positive")
        buckets = [
            [element_id(tok) for tok in group]
            for group in _tokenize_ranking(ranking_part, line_no)
        ]
        flat = [x for b in buckets for x in b]
        if len(set(flat)) != len(flat):
            raise ParseError(line_no, "element repeated within a ranking")
        entries.append((line_no, class_id, weight, buckets))

    if not entries:
        raise ParseError(0, "no rankings in file")
    n = len(names)
    for line_no, _, _, buckets in entries:
        covered = {x for b in buckets for x in b}
        if len(covered) != n:
            raise ParseError(
                line_no, f"ranking covers {len(covered)} of {n} elements"
            )

    class_order: list[str] = []
    by_class: dict[str, list[tuple[int, Fraction, list[list[int]]]]] = {}
    for line_no, class_id, weight, buckets in entries:
        if class_id not in by_class:
            by_class[class_id] = []
            class_order.append(class_id)
        by_class[class_id].append((line_no, weight, buckets))

    classes = []
    for class_id in class_order:
        rows = by_class[class_id]
        weight = rows[0][1]
        for line_no, w, _ in rows[1:]:
            if w != weight:
                raise ParseError(
                    line_no, f"class {class_id} has inconsistent lambda"
                )
        tied = any(any(len(b) > 1 for b in buckets) for _, _, buckets in rows)
        members: list[Ranking] = []
        for _, _, buckets in rows:
            if tied:
                members.append(PartialRanking.from_buckets(buckets))
            else:
                members.append(Permutation.from_order([b[0] for b in buckets]))
        classes.append(RankingClass(tuple(members), weight))

    ordered_names = sorted(names, key=names.get)
    return ParsedFile(
        Instance(n, tuple(classes)), tuple(ordered_names), tuple(class_order)
    )


def _format_weight(w: Fraction) -> str:
    decimal = repr(float(w))
    return decimal if Fraction(decimal) == w else str(w)


def write_instance_file(
    inst: Instance,
    element_names: tuple[str, ...] | None = None,
    class_ids: tuple[str, ...] | None = None,
) -> str:
    """Serialize so that parsing the result reproduces the instance."""
    if element_names is None:
        element_names = tuple(str(x) for x in range(1, inst.n + 1))
    if class_ids is None:
        class_ids = tuple(str(k) for k in range(1, inst.num_classes + 1))
    lines = ["elements: " + " ".join(element_names)]
    for k, cls in enumerate(inst.classes):
        for member in cls.members:
            parts = []
            for bucket in as_partial(member).buckets:
                toks = [element_names[x - 1] for x in sorted(bucket)]
                parts.append(toks[0] if len(bucket) == 1 else "{ %s }" % " ".join(toks))
            lines.append(
                f"class={class_ids[k]} lambda={_format_weight(cls.weight)} : "
                + " ".join(parts)
            )
    return "\n".join(lines) + "\n"


def parse_gene_order_file(text: str) -> ParsedFile:
    """Signed gene arrangements, one genome per line, as singleton classes."""
    rows: list[tuple[int, str, list[int]]] = []
    n = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        name, sep, rest = line.partition("\t")
        if not sep:
            raise ParseError(line_no, "expected '<name><TAB><signed integers>'")
        try:
            values = [abs(int(tok)) for tok in rest.split()]
        except ValueError:
            raise ParseError(line_no, "gene order must be signed integers")
        if n is None:
            n = len(values)
        if len(values) != n or sorted(values) != list(range(1, n + 1)):
            raise ParseError(
                line_no, f"gene order is not a signed permutation of 1..{n}"
            )
        rows.append((line_no, name.strip(), values))
    if not rows:
        raise ParseError(0, "no genomes in file")
    classes = tuple(
        RankingClass((Permutation.from_order(values),), Fraction(1))
        for _, _, values in rows
    )
    names = tuple(str(x) for x in range(1, n + 1))
    return ParsedFile(Instance(n, classes), names, tuple(r[1] for r in rows))


# ---------------------------------------------------------------------------
# commands

_DISTANCES = {"kt": DistanceKind.KENDALL_TAU, "sf": DistanceKind.SPEARMAN_FOOTRULE}
_SET_DISTANCES = {"med": SetDistanceKind.MEDIAN, "min": SetDistanceKind.MINIMUM}

#: algo name -> (required distance flag or None, required setdist flag or None)
_ALGO_REQUIRES = {
    "mmkt": ("kt", "med"),
    "mmsp": ("sf", "med"),
    "pick-rnd": (None, None),
    "pick-opt": (None, None),
    "min-pick": (None, "min"),
    "min-mmkt": ("kt", "min"),
    "min-mmsp": ("sf", "min"),
    "pivot-baseline": (None, None),
    "matching-baseline": (None, None),
}


def run_algorithm(
    algo: str,
    inst: Instance,
    kind: DistanceKind,
    set_kind: SetDistanceKind,
    seed=None,
    deterministic_ties: bool = False,
) -> aggregators.AggregationResult:
    if algo == "mmkt":
        return aggregators.mmkt_conv(inst, kind)
    if algo == "mmsp":
        return aggregators.mmsp_conv(inst, kind, seed, deterministic_ties)
    if algo == "pick-rnd":
        return aggregators.pick_rnd_perm(inst, kind, set_kind, seed)
    if algo == "pick-opt":
        return aggregators.pick_opt_perm(inst, kind, set_kind)
    if algo == "min-pick":
        return aggregators.min_pick_perm(inst, kind)
    if algo == "min-mmkt":
        return aggregators.min_mmkt_conv(inst, kind, seed)
    if algo == "min-mmsp":
        return aggregators.min_mmsp_conv(inst, kind, seed, deterministic_ties)
    if algo == "pivot-baseline":
        return aggregators.median_pivot_baseline(inst, seed, kind, set_kind)
    if algo == "matching-baseline":
        return aggregators.median_footrule_matching_baseline(inst, kind, set_kind)
    raise ValueError(f"unknown algorithm {algo!r}")


def _check_compatible(algo: str, dist_flag: str, set_flag: str) -> str | None:
    need_dist, need_set = _ALGO_REQUIRES[algo]
    if need_dist is not None and dist_flag != need_dist:
        return f"algorithm {algo} requires --distance {need_dist}"
    if need_set is not None and set_flag != need_set:
        return f"algorithm {algo} requires --setdist {need_set}"
    return None


def _read_parsed(path: str, gene_orders: bool) -> ParsedFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_gene_order_file(text) if gene_orders else parse_instance_file(text)


def _fmt_rational(value: Fraction) -> str:
    return f"{value} ({float(value):g})"


def cmd_aggregate(args) -> int:
    incompatible = _check_compatible(args.algo, args.distance, args.setdist)
    if incompatible:
        print(f"error: {incompatible}", file=sys.stderr)
        return 3
    try:
        parsed = _read_parsed(args.file, args.gene_orders)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    inst = parsed.instance
    kind = _DISTANCES[args.distance]
    set_kind = _SET_DISTANCES[args.setdist]
    result = run_algorithm(
        args.algo, inst, kind, set_kind, args.seed, args.deterministic_ties
    )
    kind = effective_kind(inst, kind)
    order = (
        result.ranking.order()
        if isinstance(result.ranking, Permutation)
        else None
    )
    print(f"algorithm: {args.algo}")
    print(f"distance: {kind.value}  setdist: {set_kind.value}")
    if order is not None:
        print("ranking: " + " ".join(parsed.element_names[x - 1] for x in order))
    else:
        parts = []
        for bucket in result.ranking.buckets:
            toks = [parsed.element_names[x - 1] for x in sorted(bucket)]
            parts.append(toks[0] if len(toks) == 1 else "{ %s }" % " ".join(toks))
        print("ranking: " + " ".join(parts))
    print(f"objective: {_fmt_rational(result.objective)}")
    for k, cls in enumerate(inst.classes):
        cost = set_distance(result.ranking, cls, kind, set_kind)
        print(
            f"class {parsed.class_ids[k]}: weight={_format_weight(cls.weight)} "
            f"cost={_fmt_rational(cost)} weighted={_fmt_rational(cls.weight * cost)}"
        )
    if result.certificate is not None:
        print(f"certificate: {result.certificate:.6f}")
    return 0


def cmd_exact(args) -> int:
    try:
        parsed = _read_parsed(args.file, args.gene_orders)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    inst = parsed.instance
    kind = effective_kind(inst, _DISTANCES[args.distance])
    set_kind = _SET_DISTANCES[args.setdist]
    try:
        opt = exact.brute_force(inst, kind, set_kind, n_limit=args.n_limit)
    except exact.TooLarge as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    print(f"n: {inst.n}")
    print(f"W: {_fmt_rational(opt.value)}")
    print(
        "optimal: "
        + " ".join(parsed.element_names[x - 1] for x in opt.ranking.order())
    )
    if set_kind is SetDistanceKind.MEDIAN:
        gap = exact.lp_gap(inst, kind, n_limit=args.n_limit)
        print(f"lp-gap: {gap:.6f}")
    return 0


_BENCH_ALGOS = {
    ("med", "kt"): ["mmkt", "pick-rnd", "pick-opt", "pivot-baseline"],
    ("med", "sf"): ["mmsp", "pick-rnd", "pick-opt", "matching-baseline"],
    ("min", "kt"): ["min-mmkt", "min-pick", "pivot-baseline"],
    ("min", "sf"): ["min-mmsp", "min-pick", "matching-baseline"],
}


@dataclass(frozen=True)
class BenchmarkRow:
    trial: int
    phi1: float
    algo: str
    objective: float
    seconds: float


def _run_trial(task) -> list[BenchmarkRow]:
    (trial, phi1, n, num_classes, per_class, phi2, seed, algos, dist_flag,
     set_flag) = task
    cfg = TwoLevelConfig.create(n, num_classes, per_class, phi1, phi2)
    # keyed by (seed, trial) only: the same uniform stream serves every phi1,
    # coupling the sweeps and letting workers reproduce the serial run
    inst = sample_instance(cfg, (seed, trial))
    kind = _DISTANCES[dist_flag]
    set_kind = _SET_DISTANCES[set_flag]
    rows = []
    for algo_idx, algo in enumerate(algos):
        start = time.perf_counter()
        result = run_algorithm(
            algo, inst, kind, set_kind, seed=(seed, trial, 1000 + algo_idx)
        )
        rows.append(
            BenchmarkRow(
                trial,
                phi1,
                algo,
                float(result.objective),
                time.perf_counter() - start,
            )
        )
    return rows


def run_benchmark(
    n: int,
    num_classes: int,
    per_class: int,
    phi1_list: list[float],
    phi2: float,
    trials: int,
    seed: int,
    dist_flag: str = "kt",
    set_flag: str = "med",
    workers: int = 1,
    algos: list[str] | None = None,
) -> list[BenchmarkRow]:
    """Run the two-level Mallows sweep; rows sorted by (trial, phi1, algo)."""
    if algos is None:
        algos = _BENCH_ALGOS[(set_flag, dist_flag)]
    tasks = [
        (trial, phi1, n, num_classes, per_class, phi2, seed, algos, dist_flag,
         set_flag)
        for trial in range(trials)
        for phi1 in phi1_list
    ]
    rows: list[BenchmarkRow] = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_run_trial, tasks):
                rows.extend(chunk)
    else:
        for task in tasks:
            rows.extend(_run_trial(task))
    rows.sort(key=lambda r: (r.trial, r.phi1, r.algo))
    return rows


def format_benchmark_csv(rows: list[BenchmarkRow], phi1_list, algos) -> str:
    out = ["trial,phi1,algo,objective,seconds"]
    for r in rows:
        out.append(f"{r.trial},{r.phi1:g},{r.algo},{r.objective:.6f},{r.seconds:.4f}")
    out.append("# summary: objective mean (std)")
    out.append("# algo," + ",".join(f"{p:g}" for p in phi1_list))
    for algo in algos:
        cells = []
        for phi1 in phi1_list:
            vals = [r.objective for r in rows if r.algo == algo and r.phi1 == phi1]
            mean = statistics.fmean(vals)
            std = statistics.stdev(vals) if len(vals) > 1 else 0.0
            cells.append(f"{mean:.4f} ({std:.4f})")
        out.append(f"# {algo}," + ",".join(cells))
    return "\n".join(out) + "\n"


def cmd_benchmark(args) -> int:
    phi1_list = [float(tok) for tok in args.phi1_list.split(",") if tok]
    algos = _BENCH_ALGOS[(args.setdist, args.distance)]
    rows = run_benchmark(
        args.n,
        args.classes,
        args.per_class,
        phi1_list,
        args.phi2,
        args.trials,
        args.seed,
        args.distance,
        args.setdist,
        args.workers,
        algos,
    )
    text = format_benchmark_csv(rows, phi1_list, algos)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minmaxrank",
        description="Multiclass minmax rank aggregation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    agg = sub.add_parser("aggregate", help="aggregate a ranking instance file")
    agg.add_argument("file")
    agg.add_argument("--distance", choices=sorted(_DISTANCES), default="kt")
    agg.add_argument("--setdist", choices=sorted(_SET_DISTANCES), default="med")
    agg.add_argument("--algo", choices=sorted(_ALGO_REQUIRES), default="mmkt")
    agg.add_argument("--seed", type=int, default=0)
    agg.add_argument("--deterministic-ties", action="store_true")
    agg.add_argument("--gene-orders", action="store_true",
                     help="parse the file as signed gene orders")
    agg.set_defaults(func=cmd_aggregate)

    ben = sub.add_parser("benchmark", help="two-level Mallows benchmark sweep")
    ben.add_argument("--n", type=int, default=10)
    ben.add_argument("--classes", type=int, default=3)
    ben.add_argument("--per-class", type=int, default=10)
    ben.add_argument("--phi1-list", default="0.5,0.7,0.9,1.0")
    ben.add_argument("--phi2", type=float, default=0.7)
    ben.add_argument("--trials", type=int, default=100)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--distance", choices=sorted(_DISTANCES), default="kt")
    ben.add_argument("--setdist", choices=sorted(_SET_DISTANCES), default="med")
    ben.add_argument("--workers", type=int, default=1)
    ben.add_argument("--out", default=None)
    ben.set_defaults(func=cmd_benchmark)

    exa = sub.add_parser("exact", help="brute-force optimum (small instances)")
    exa.add_argument("file")
    exa.add_argument("--distance", choices=sorted(_DISTANCES), default="kt")
    exa.add_argument("--setdist", choices=sorted(_SET_DISTANCES), default="med")
    exa.add_argument("--n-limit", type=int, default=8)
    exa.add_argument("--gene-orders", action="store_true")
    exa.set_defaults(func=cmd_exact)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry_point() -> None:
    sys.exit(main())
