"""Command-line entry point: build, sample, density, entropy, verify, curve.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import sys
import time
from fractions import Fraction

from .constructions import DiagonalBlock, TransversalUniform, diagonal_block_graphon, ktt_mixture_graphon
from .core import StepFunction
from .densities import (
    bigraph_density,
    hom_density,
    induced_density,
    induced_density_graphon,
)
from .entropy import (
    diagonal_block_exact_entropy,
    entropy_plugin_mm,
    exact_graph_distribution,
    shannon_entropy,
    transversal_entropy_lower_bound,
)
from .graphs import LabeledGraph
from .rng import RngStream
from .sampling import sample_graph, sample_with_latent
from .serialize import graphon_from_spec, load_graph_or_graphon, load_graphon, load_pattern, spec_from_graphon
from .suites import SUITES

ENTROPY_METHODS = ("exact", "plugin", "transversal-lb", "diagonal-exact")
RANDOM_METHODS = ("plugin", "transversal-lb")


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _n_range(text: str) -> range:
    try:
        if ":" in text:
            a, b = text.split(":")
            return range(int(a), int(b) + 1)
        return range(int(text), int(text) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")


def _numbers(text: str) -> list[Fraction]:
    return [Fraction(x) for x in text.split(",")]


def _require_seed(args) -> RngStream:
    if args.seed is None:
        raise UsageError("this command is randomized; pass --seed")
    return RngStream(args.seed)


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    if args.kind == "step":
        if args.constant is not None:
            w = StepFunction.constant(Fraction(args.constant))
        else:
            if not args.values:
                raise UsageError("step graphons need --values (rows separated by ';') or --constant")
            rows = [_numbers(r) for r in args.values.split(";")]
            measures = _numbers(args.measures) if args.measures else [Fraction(1, len(rows))] * len(rows)
            w = StepFunction(tuple(measures), tuple(tuple(r) for r in rows))
        doc = spec_from_graphon(w)
    elif args.kind == "diagonal-block":
        doc = spec_from_graphon(diagonal_block_graphon(args.depth))
    elif args.kind == "ktt-mixture":
        doc = spec_from_graphon(ktt_mixture_graphon(args.t, args.nmax))
    else:
        alpha = {"form": args.alpha}
        if args.alpha == "inverse-power":
            alpha["exponent"] = args.exponent
        elif args.alpha == "exponential":
            alpha["base"] = args.base
        doc = {"kind": "transversal", "alpha": alpha, "k_max": args.k_max}
        w = graphon_from_spec(doc)
        doc["groups"] = [[g, str(b)] for g, b in w.partition.groups()]
    _write(args, json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_sample(args) -> int:
    w = load_graphon(args.graphon)
    rng = _require_seed(args)
    lines = []
    for i in range(args.count):
        r = rng.child(i)
        if args.with_latent:
            g, latent = sample_with_latent(args.n, w, r)
            lines.append(json.dumps({"graph": g.to_line(), "latent": latent}))
        else:
            lines.append(sample_graph(args.n, w, r).to_line())
    _write(args, "".join(line + "\n" for line in lines))
    return 0


def cmd_density(args) -> int:
    bigraph = args.mode == "bigraph"
    pattern = load_pattern(args.pattern, bigraph)
    target = load_graph_or_graphon(args.target)
    rng = RngStream(args.seed) if args.seed is not None else None
    if args.mode in ("hom", "induced"):
        if not isinstance(target, LabeledGraph):
            raise UsageError(f"--mode {args.mode} needs a graph file as target")
        res = (hom_density if args.mode == "hom" else induced_density)(pattern, target)
    else:
        fn = bigraph_density if bigraph else induced_density_graphon
        try:
            res = fn(pattern, target, mode=args.method, trials=args.trials, rng=rng)
        except ValueError as exc:
            if rng is None and "RngStream" in str(exc):
                raise UsageError("Monte Carlo estimation needs --seed") from exc
            raise
    _write(args, json.dumps(res.to_json()) + "\n")
    return 0


def _entropy_row(w, n: int, method: str, trials: int, rng) -> tuple[float, object]:
    if method == "exact":
        if isinstance(w, DiagonalBlock):
            return diagonal_block_exact_entropy(n), ""
        if isinstance(w, TransversalUniform):
            raise UsageError("exact entropy is infeasible for transversal graphons; use transversal-lb")
        return shannon_entropy(exact_graph_distribution(n, w.to_stepfunction())), ""
    if method == "diagonal-exact":
        if not isinstance(w, DiagonalBlock):
            raise UsageError("diagonal-exact needs a diagonal-block graphon")
        return diagonal_block_exact_entropy(n), ""
    if method == "plugin":
        g = [sample_graph(n, w, rng.child(t)).code() for t in range(trials)]
        return entropy_plugin_mm(g), ""
    if not isinstance(w, TransversalUniform):
        raise UsageError("transversal-lb needs a transversal graphon")
    est = transversal_entropy_lower_bound(n, w.partition, w.structure, trials, rng)
    return est.value, est.stderr


def _entropy_table(args, with_runtime: bool) -> str:
    w = load_graphon(args.graphon)
    rng = _require_seed(args) if args.method in RANDOM_METHODS else None
    rows = []
    for n in args.n:
        start = time.perf_counter()
        value, stderr = _entropy_row(w, n, args.method, args.trials, rng.child(n) if rng else None)
        row = {"n": n, "method": args.method, "value_bits": repr(float(value)),
               "stderr": "" if stderr == "" else repr(float(stderr))}
        if with_runtime:
            row["runtime_ms"] = f"{(time.perf_counter() - start) * 1000:.3f}"
        rows.append(row)
    if args.format == "json":
        return json.dumps(rows, indent=2) + "\n"
    fields = ["n", "method", "value_bits", "stderr"] + (["runtime_ms"] if with_runtime else [])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_entropy(args) -> int:
    _write(args, _entropy_table(args, with_runtime=True))
    return 0


def cmd_curve(args) -> int:
    _write(args, _entropy_table(args, with_runtime=False))
    return 0


_SUITE_OPTIONS = {
    "trials": ("trials", "pairs", "samples", "count"),
    "seed": ("seed",),
    "nmax": ("nmax",),
    "n": ("n",),
}


def cmd_verify(args) -> int:
    fn = SUITES[args.suite]
    params = inspect.signature(fn).parameters
    kwargs = {}
    for opt, names in _SUITE_OPTIONS.items():
        value = getattr(args, opt)
        if value is None:
            continue
        for name in names:
            if name in params:
                kwargs[name] = value
                break
        else:
            raise UsageError(f"suite {args.suite} has no --{opt} option")
    report = fn(**kwargs)
    _write(args, "\n".join(report.lines()) + "\n")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphon-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", help="output file (default: stdout)")
        if seed:
            p.add_argument("--seed", type=_seed, help="64-bit seed, required for randomized runs")

    p = sub.add_parser("build", help="emit a GraphonSpec JSON document")
    p.add_argument("kind", choices=["step", "diagonal-block", "transversal", "ktt-mixture"])
    p.add_argument("--constant", help="constant step graphon with this value")
    p.add_argument("--measures", help="comma-separated step measures")
    p.add_argument("--values", help="value rows, comma-separated, rows separated by ';'")
    p.add_argument("--depth", type=int, default=64)
    p.add_argument("--alpha", choices=["inverse", "inverse-power", "exponential"], default="inverse")
    p.add_argument("--exponent", default="1")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--nmax", type=int, default=5)
    common(p, seed=False)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sample", help="draw graphs from G(n, W)")
    p.add_argument("--graphon", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--with-latent", action="store_true")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("density", help="pattern densities")
    p.add_argument("--mode", choices=["hom", "induced", "induced-graphon", "bigraph"], required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--target", required=True, help="graph edge-list file or GraphonSpec JSON")
    p.add_argument("--method", choices=["auto", "exact", "mc"], default="auto")
    p.add_argument("--trials", type=int, default=10**5)
    common(p)
    p.set_defaults(func=cmd_density)

    for name, func, helptext in (
        ("entropy", cmd_entropy, "entropy of G(n, W) over a range of n"),
        ("curve", cmd_curve, "deterministic entropy curve for plotting (no timing column)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--graphon", required=True)
        p.add_argument("--n", type=_n_range, required=True, help="inclusive range A:B")
        p.add_argument("--method", choices=ENTROPY_METHODS, default="exact")
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--n", type=int)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"graphon-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
