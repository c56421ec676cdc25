"""Command-line front door: generate stage trees, run audits, plot projections.

Exit codes: 0 all requested checks passed, 1 some check failed, 2 bad
usage or configuration.  The environment variable ARBRE_SUBST_SEED is
read but ignored: every output is deterministic; the name is reserved so
callers can set it uniformly across tools.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import rauzy, verify
from .realization import Realization
from .trees import (
    ColoredTree,
    RulePattern,
    TreeIteration,
    TreeSubstitution,
)

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treesubst",
        description=__doc__.splitlines()[0],
        epilog="ARBRE_SUBST_SEED is read but ignored (outputs are deterministic).",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=3, help="alphabet size, at least 3")
    common.add_argument("--out", type=Path, default=None, help="output path")

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="write one stage tree")
    gen.add_argument("--n", type=int, default=0, help="stage to generate")
    gen.add_argument(
        "--format", choices=("json", "dot", "csv"), default="json",
        help="tree as json/dot, realized coordinates as csv",
    )

    ver = sub.add_parser("verify", parents=[common], help="run audit suites")
    ver.add_argument("--suite", choices=verify.SUITES, default="all")
    ver.add_argument("--max-stage", type=int, default=None, help="deepest stage to scan")
    ver.add_argument("--tol", type=float, default=1e-3, help="measure snap tolerance")
    ver.add_argument("--prefix-len", type=int, default=10**6,
                     help="fixed-point prefix length for measure estimates")
    ver.add_argument("--format", choices=("table", "json"), default="table")
    ver.add_argument("--rules", type=Path, default=None,
                     help="audit a rule-set JSON file instead of the built-in family")

    plot = sub.add_parser("plot", parents=[common], help="plot planar projections")
    plot.add_argument("--kind", choices=("rauzy", "zeta"), default="rauzy")
    plot.add_argument("--depth", type=int, default=20_000, help="prefix depth")
    plot.add_argument("--n", type=int, default=4, help="stage for --kind zeta")
    plot.add_argument("--color", default="cylinder:7",
                      help="cylinder:<m> or arc:<n> (rauzy kind only)")
    plot.add_argument("--format", choices=("svg", "csv"), default="svg")

    return parser


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        print(f"wrote {out}")


# -- gen --------------------------------------------------------------------


def cmd_gen(args) -> int:
    it = TreeIteration(args.d)
    tree = it.tree_at(args.n)
    if args.format == "json":
        payload = tree.to_json()
        payload["stage"] = args.n
        _write(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "dot":
        _write(tree.to_dot(), args.out)
    else:
        real = Realization(it)
        real.extend_to(args.n)
        lines = ["vertex,birth_stage,degree,norm,address"]
        for v in tree.vertices:
            pt = real.point(v)
            lines.append(
                f"{v},{it.birth_stage[v]},{tree.degree(v)},"
                f"{pt.norm().value():.9f},{pt.text()}"
            )
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------


def _load_rules(d: int, path: Path) -> TreeSubstitution:
    data = json.loads(path.read_text())
    rules = {
        int(color): RulePattern(
            int(color), tuple((s, t, int(c)) for s, t, c in pattern)
        )
        for color, pattern in data["rules"].items()
    }
    return TreeSubstitution(data.get("d", d), rules)


def _rules_audit(ts: TreeSubstitution) -> list[verify.CheckResult]:
    """Structural audit of a custom rule set: iterate from one 2-edge."""
    results = []
    tree = ColoredTree(ts.d, [(0, 1, 2)])
    fails = []
    for step in range(1, 4):
        tree = ts.apply(tree).tree
        if not tree.is_discerned():
            fails.append(f"iterate {step} is not discerned")
    results.append(verify.CheckResult(
        "rule-iteration", f"d={ts.d}, 3 steps from a 2-edge",
        "fail" if fails else "pass", fails,
    ))
    return results


def _emit_report(report: dict, fmt: str, out: Path | None) -> None:
    if fmt == "json":
        _write(json.dumps(report, indent=2) + "\n", out)
        return
    for entry in report["checks"]:
        print(f"{entry['status']:4s}  {entry['name']:28s} {entry['scope']}")
        for w in entry["witnesses"]:
            print(f"          {w}")
    print(f"suite {report['suite']}: {report['status']}")
    if out is not None:
        out.write_text(json.dumps(report, indent=2) + "\n")
        print(f"wrote {out}")


def cmd_verify(args) -> int:
    if args.rules is not None:
        ts = _load_rules(args.d, args.rules)
        report = ts.validate()
        if not report.ok:
            for line in report.failures:
                print(line, file=sys.stderr)
            print("rule set rejected", file=sys.stderr)
            return EXIT_USAGE
        results = _rules_audit(ts)
        _emit_report(verify.to_report("rules", ts.d, results), args.format, args.out)
        return EXIT_OK if all(r.status == "pass" for r in results) else EXIT_CHECK

    results = verify.run_suite(
        args.suite, args.d, args.max_stage, args.tol, args.prefix_len
    )
    _emit_report(verify.to_report(args.suite, args.d, results), args.format, args.out)
    return EXIT_OK if all(r.status == "pass" for r in results) else EXIT_CHECK


# -- plot -------------------------------------------------------------------


def cmd_plot(args) -> int:
    if args.d != 3:
        # same wording as the library gate so scripts can match on it
        print(f"planar projection requires d=3, got d={args.d}", file=sys.stderr)
        return EXIT_USAGE
    if args.kind == "rauzy":
        cloud = rauzy.fractal_cloud(args.depth, args.color)
    else:
        cloud = rauzy.zeta_cloud(args.n, args.depth)
    out = args.out
    if out is None:
        out = Path(f"{args.kind}.{args.format}")
    if args.format == "svg":
        rauzy.render_svg(cloud, str(out))
    else:
        rauzy.export_csv(cloud, str(out))
    print(f"wrote {out} ({len(cloud)} points)")
    return EXIT_OK


# -- entry ------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    os.environ.get("ARBRE_SUBST_SEED")  # reserved, deliberately unused
    args = build_parser().parse_args(argv)
    if args.command != "plot" and args.d < 3:
        print(f"--d must be at least 3, got {args.d}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {"gen": cmd_gen, "verify": cmd_verify, "plot": cmd_plot}
    try:
        return handlers[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
