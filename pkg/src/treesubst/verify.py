"""Audit suites: every statement the package claims, re-checked on demand.

Each suite returns a list of CheckResult records with descriptive names,
the scanned scope, and witness strings for anything that failed.  The CLI
renders these as a table and a versioned JSON report.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import core, rauzy
from .freegroup import (
    cancellation_report,
    family_inverse,
    inverse_growth_root,
    nielsen_probe,
    p_star,
    tribonacci_inverse,
)
from .prefix_suffix import development_tail_word, shift_development
from .realization import Realization
from .trees import TreeIteration, family_tree_substitution, initial_tree
from .words import (
    bispecials_by_generation,
    complexity,
    expected_class_count,
    factors,
    fixed_point_prefix,
    growth_root,
    measure_recursion_gap,
    measure_spectrum,
    word_str,
)

SUITES = ("words", "trees", "realization", "core", "rauzy", "all")


@dataclass
class CheckResult:
    name: str
    scope: str
    status: str                      # "pass" | "fail"
    witnesses: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "scope": self.scope,
            "status": self.status,
            "witnesses": self.witnesses,
        }


def _result(name: str, scope: str, failures: list[str], cap: int = 5) -> CheckResult:
    shown = failures[:cap]
    if len(failures) > cap:
        shown.append(f"... and {len(failures) - cap} more")
    return CheckResult(name, scope, "fail" if failures else "pass", shown)


# -- words ------------------------------------------------------------------


def _brute_bispecials(d: int, max_len: int) -> list[bytes]:
    """Oracle: enumerate bispecials directly from one-sided extensions."""
    out = []
    for n in range(1, max_len + 1):
        longer = factors(d, n + 1)
        for w in sorted(factors(d, n)):
            lefts = {v[0] for v in longer if v[1:] == w}
            rights = {v[-1] for v in longer if v[:-1] == w}
            if len(lefts) >= 2 and len(rights) >= 2:
                out.append(w)
    return out


def words_suite(d: int, tol: float = 1e-3, prefix_len: int = 10**6) -> list[CheckResult]:
    results = []

    fails = [
        f"n={n}: {complexity(d, n)} != {(d - 1) * n + 1}"
        for n in range(1, 31)
        if complexity(d, n) != (d - 1) * n + 1
    ]
    results.append(_result("factor-complexity", f"d={d}, n<=30", fails))

    gen = bispecials_by_generation(d, 60)
    brute = _brute_bispecials(d, 60)
    fails = []
    if sorted(gen) != sorted(brute):
        fails.append(
            f"generation rule {[word_str(w) for w in gen]} != "
            f"enumeration {[word_str(w) for w in brute]}"
        )
    if d == 3 and [len(w) for w in gen[:5]] != [1, 2, 4, 6, 10]:
        fails.append(f"first lengths {[len(w) for w in gen[:5]]} != [1, 2, 4, 6, 10]")
    results.append(_result("bispecial-oracle", f"d={d}, lengths<=60", fails))

    text = fixed_point_prefix(d, 100)
    fails = []
    for k in range(41):
        dev = shift_development(d, k, 20)
        got = development_tail_word(d, dev, 50)
        if got != text[k : k + 50]:
            fails.append(f"shift {k}: tail {word_str(got[:12])}... wrong")
    results.append(_result("development-tails", f"d={d}, shifts<=40", fails))

    ms = (1, 2, 3, 4, 5, 7, 11) if d == 3 else (1, 2, 3, 4, 5)
    fails = []
    for m in ms:
        spec = measure_spectrum(d, m, prefix_len)
        if not spec.ok(tol):
            fails.append(f"m={m}: snap residual {spec.max_residual:.2e} > {tol}")
        if spec.class_count != expected_class_count(d, m):
            fails.append(
                f"m={m}: {spec.class_count} classes != {expected_class_count(d, m)}"
            )
    results.append(_result("measure-snapping", f"d={d}, m in {ms}", fails))

    gap = measure_recursion_gap(d, 4, prefix_len)
    fails = [] if gap < 2e-3 else [f"recursion gap {gap:.2e} >= 2e-3"]
    results.append(_result("measure-recursion", f"d={d}, |u|<=4", fails))

    fails = []
    trib = cancellation_report(tribonacci_inverse(), [(3,)], 2)[(3,)]
    if trib != [False, True]:
        fails.append(f"tribonacci-inverse seed 3: flags {trib} != [False, True]")
    niel = cancellation_report(nielsen_probe(), [(1, 3)], 10)[(1, 3)]
    if niel != [True] * 10:
        fails.append(f"nielsen seed 1.3: flags {niel} != all True")
    inv = family_inverse(d)
    for a in range(1, d + 1):
        flags = cancellation_report(inv, [(a,)], 12)[(a,)]
        if any(flags):
            fails.append(f"family inverse seed {a}: unexpected cancellation {flags}")
    results.append(_result("cancellation-probes", f"d={d}, depth<=12", fails))

    lam, eta = growth_root(d), inverse_growth_root(d)
    fails = []
    if abs(lam**d - lam ** (d - 1) - 1) >= 1e-12:
        fails.append(f"lambda residual {abs(lam**d - lam**(d-1) - 1):.2e}")
    if abs(eta**d - eta - 1) >= 1e-12:
        fails.append(f"eta residual {abs(eta**d - eta - 1):.2e}")
    results.append(_result("growth-roots", f"d={d}", fails))

    return results


# -- trees ------------------------------------------------------------------


def _match_spectrum(observed, expected, extras_test, tol=1e-6) -> list[str]:
    """Greedily pair expected roots with eigenvalues; test the leftovers."""
    pool = list(observed)
    fails = []
    for r in expected:
        best = min(range(len(pool)), key=lambda i: abs(pool[i] - r))
        if abs(pool[best] - r) > tol:
            fails.append(f"no eigenvalue near {r:.6f}")
        pool.pop(best)
    for z in pool:
        err = extras_test(z)
        if err:
            fails.append(err)
    return fails


def trees_suite(d: int, max_stage: int = 12) -> list[CheckResult]:
    results = []
    ts = family_tree_substitution(d)

    report = ts.validate()
    results.append(_result("rule-validation", f"d={d}", list(report.failures)))

    t0 = initial_tree(d)
    fails = []
    if sorted(c for _, _, c in t0.edges) != list(range(1, d + 1)):
        fails.append(f"colors {sorted(c for _, _, c in t0.edges)}")
    if t0.degree(t0.root) != d:
        fails.append(f"root degree {t0.degree(t0.root)}")
    results.append(_result("initial-star", f"d={d}", fails))

    it = TreeIteration(d)
    fails = [
        f"stage {n} not discerned"
        for n in range(max_stage + 1)
        if not it.tree_at(n).is_discerned()
    ]
    results.append(_result("discerned-stages", f"d={d}, n<={max_stage}", fails))

    inv = family_inverse(d)
    fails = []
    for i in range(1, d + 1):
        got = p_star(d, ts.rules[i].trunk_word())
        if got != inv.images[i]:
            fails.append(f"rule {i}: trunk projects to {got}, want {inv.images[i]}")
    results.append(_result("trunk-determinism", f"d={d}, rules 1..{d}", fails))

    sigma_roots = np.roots([1, -1] + [0] * (d - 2) + [-1])
    eta_roots = np.roots([1] + [0] * (d - 2) + [-1, -1])
    edge_ev = np.linalg.eigvals(ts.incidence_matrix().astype(float))
    trunk_ev = np.linalg.eigvals(ts.trunk_matrix().astype(float))
    fails = _match_spectrum(
        edge_ev, sigma_roots,
        lambda z: None if abs(abs(z) - 1) < 1e-6 else f"edge extra {z:.6f} not on unit circle",
    )
    fails += _match_spectrum(
        trunk_ev, eta_roots,
        lambda z: None if abs(z) < 1e-8 else f"trunk extra {z:.6f} not zero",
    )
    results.append(_result("matrix-spectra", f"d={d}", fails))

    return results


# -- realization ------------------------------------------------------------


def realization_suite(d: int, max_stage: int = 10) -> list[CheckResult]:
    results = []
    real = Realization(TreeIteration(d))
    real.extend_to(max_stage)

    fails = []
    for n in range(max_stage + 1):
        try:
            real.edge_length_check(n)
        except AssertionError as exc:
            fails.append(f"stage {n}: {exc}")
    results.append(_result("edge-length-law", f"d={d}, n<={max_stage}", fails))

    eta = inverse_growth_root(d)
    fails = []
    for n in range(1, max_stage + 1):
        gap = real.hausdorff_gap(n).value()
        if gap > eta ** (-1 - n) + 1e-12:
            fails.append(f"stage {n}: gap {gap:.6f} > {eta ** (-1 - n):.6f}")
    results.append(_result("stage-convergence", f"d={d}, n<={max_stage}", fails))

    return results


# -- core -------------------------------------------------------------------


def core_suite(d: int, max_stage: int = 12, geom_stage: int = 8) -> list[CheckResult]:
    geom_stage = min(geom_stage, max_stage)
    results = []
    scan = core.shared_scan(d)
    scan.extend_to(max_stage)

    fails = []
    for m in range(1, 6):
        fails += scan.check_inventory(m)
    if d == 3:
        counts = [len(scan.inventory(m)) for m in range(1, 6)]
        if counts != [2, 3, 5, 7, 11]:
            fails.append(f"label counts {counts} != [2, 3, 5, 7, 11]")
    results.append(_result("label-inventory", f"d={d}, m<=5", fails))

    results.append(
        _result("bispecial-chain", f"d={d}, m<=6", scan.check_bispecial_match(6))
    )

    fails = []
    for n in range(1, max_stage + 1):
        fails += scan.check_writing_exponents(n)
    results.append(_result("writing-exponents", f"d={d}, n<={max_stage}", fails))

    fails = []
    for n in range(1, max_stage + 1):
        fails += scan.check_apparition_chain(n)
    results.append(_result("apparition-chain", f"d={d}, n<={max_stage}", fails))

    fails = []
    for n in range(1, max_stage + 1):
        fails += scan.check_branching_neighbor(n)
    results.append(_result("branching-neighbor", f"d={d}, n<={max_stage}", fails))

    fails = []
    for n in range(geom_stage + 1):
        fails += scan.check_f0(n)
    results.append(_result("address-map-consistency", f"d={d}, n<={geom_stage}", fails))

    results.append(
        _result(
            "label-injectivity",
            f"d={d}, stage {min(10, max_stage)}",
            scan.check_injective(min(10, max_stage)),
        )
    )
    fails = scan.check_approx_steps([0, d, 2 * d])
    fails += scan.check_approx_steps([1, d + 1, 2 * d + 2])
    results.append(_result("approximation-steps", f"d={d}", fails))

    fails = []
    mseq = [core.determined_partition(d, n) for n in range(6)]
    want = [1] + [len(core.l_word(d, n)) + 1 for n in range(1, 6)]
    if mseq != want:
        fails.append(f"partition sizes {mseq} != {want}")
    if d == 3 and mseq != [1, 2, 3, 5, 7, 11]:
        fails.append(f"partition sizes {mseq} != [1, 2, 3, 5, 7, 11]")
    for n in range(max_stage + 1):
        edges = len(scan.it.tree_at(n).edges)
        expected = (d - 1) * core.determined_partition(d, n) + 1
        if edges != expected:
            fails.append(f"stage {n}: {edges} edges != {expected}")
    results.append(_result("partition-sequence", f"d={d}, n<={max_stage}", fails))

    results.append(_result("initial-arcs", f"d={d}", scan.check_initial_arcs()))

    arc_stage = min(6, geom_stage)
    fails = []
    for n in range(arc_stage + 1):
        fails += scan.check_arc_overlaps(n)
    results.append(_result("arc-overlaps", f"d={d}, n<={arc_stage}", fails))

    fails = []
    for n in range(arc_stage + 1):
        fails += scan.check_arc_cylinders(n)
    results.append(_result("arc-cylinders", f"d={d}, n<={arc_stage}", fails))

    fails = []
    for a in range(1, d + 1):
        fails += scan.check_shift_isometry(a, geom_stage)
        fails += scan.check_shift_conjugacy(a, geom_stage)
    fails += scan.check_domain_overlaps(geom_stage)
    results.append(
        _result("shift-isometries", f"d={d}, letters 1..{d}, n<={geom_stage}", fails)
    )

    fails = []
    for n in range(geom_stage + 1):
        fails += scan.check_path_distances(n)
    results.append(_result("path-distances", f"d={d}, n<={geom_stage}", fails))

    return results


# -- rauzy ------------------------------------------------------------------


def rauzy_suite(d: int, depth: int = 20_000) -> list[CheckResult]:
    if d != 3:
        return [
            CheckResult(
                "planar-projection", f"d={d}", "fail",
                ["planar projection requires d=3"],
            )
        ]
    results = []
    results.append(
        _result("projection-bounded", "depths 50k/100k", rauzy.check_boundedness())
    )
    results.append(
        _result("projection-contraction", "k<=18", rauzy.check_contraction())
    )
    results.append(
        _result(
            "cylinder-arc-partition",
            f"depth {depth}, m=7 vs stage 4",
            rauzy.check_partition_match(depth),
        )
    )
    fails = []
    for n in (0, 1, 2):
        cloud = rauzy.zeta_cloud(n, 3000)
        arcs = {t for t in cloud.tags if t != "-"}
        want = 2 * core.determined_partition(3, n) + 1
        if len(arcs) != want:
            fails.append(f"stage {n}: {len(arcs)} arc classes != {want}")
    results.append(_result("tree-image-arcs", "n<=2, depth 3000", fails))
    results.append(
        _result(
            "translate-congruence",
            f"depth {depth}, m=7",
            rauzy.check_translate_congruence(depth),
        )
    )

    cloud = rauzy.fractal_cloud(2000, "cylinder:7")
    fails = []
    with tempfile.TemporaryDirectory() as tmp:
        for render, ext in ((rauzy.render_svg, "svg"), (rauzy.export_csv, "csv")):
            blobs = []
            for k in range(2):
                p = Path(tmp) / f"{k}.{ext}"
                render(cloud, str(p))
                blobs.append(p.read_bytes())
            if blobs[0] != blobs[1]:
                fails.append(f"{ext} output differs between runs")
    results.append(_result("artifact-determinism", "depth 2000", fails))

    return results


# -- entry ------------------------------------------------------------------


def run_suite(
    suite: str,
    d: int,
    max_stage: int | None = None,
    tol: float = 1e-3,
    prefix_len: int = 10**6,
) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}, choose from {SUITES}")
    cap = max_stage if max_stage is not None else (12 if d == 3 else 10)
    out: list[CheckResult] = []
    if suite in ("words", "all"):
        out += words_suite(d, tol, prefix_len)
    if suite in ("trees", "all"):
        out += trees_suite(d, cap)
    if suite in ("realization", "all"):
        out += realization_suite(d, min(cap, 10))
    if suite in ("core", "all"):
        out += core_suite(d, cap, min(8, cap))
    if suite == "rauzy" or (suite == "all" and d == 3):
        out += rauzy_suite(d)
    return out


def to_report(suite: str, d: int, results: list[CheckResult]) -> dict:
    return {
        "report_version": 1,
        "suite": suite,
        "d": d,
        "status": "pass" if all(r.status == "pass" for r in results) else "fail",
        "checks": [r.to_json() for r in results],
    }
