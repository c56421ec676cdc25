"""Planar shadow of the prefix orbit for the three-letter substitution.

The incidence matrix has one expanding real eigenvalue and a contracting
complex pair exactly when d = 3, so the abelianized prefix inverses can be
projected along the expanding direction onto a real plane.  This module
builds that projection, colors the resulting point cloud by cylinder class
or by the arcs of a chosen stage tree, restricts it to the points lying on
an embedded stage tree, and renders deterministic SVG/CSV artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import l_word
from .trees import TreeIteration
from .words import (
    factors,
    family_substitution,
    fixed_point_prefix,
    growth_root,
    measure_spectrum,
    word_str,
)

MODULUS_TOL = 1e-9


@dataclass(frozen=True)
class ContractingBasis:
    d: int
    expanding_value: float
    expanding: tuple[float, float, float]
    plane: tuple[tuple[float, float, float], tuple[float, float, float]]
    # rows map an integer vector to its plane coordinates, expanding part removed
    to_plane: tuple[tuple[float, float, float], tuple[float, float, float]]

    def project(self, vec) -> tuple[float, float]:
        m = np.asarray(self.to_plane)
        x, y = m @ np.asarray(vec, dtype=float)
        return float(x), float(y)


def contracting_basis(matrix: np.ndarray) -> ContractingBasis:
    """Expanding direction and contracting-plane coordinates of a 3x3 matrix.

    The planar picture only exists when the non-dominant spectrum is a
    single contracting complex pair, which the letter count forces to mean
    a 3-letter alphabet; larger alphabets are rejected up front.
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(
            "planar projection requires d=3: the complement of the expanding "
            "direction must be a plane"
        )
    vals, vecs = np.linalg.eig(m)
    order = np.argsort(-np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    top, small = vals[0], vals[1:]
    if not (abs(top.imag) < MODULUS_TOL and top.real > 1):
        raise ValueError("no simple expanding real eigenvalue")
    if not all(abs(v) < 1 - MODULUS_TOL for v in small):
        raise ValueError("spectrum is not Pisot: non-dominant eigenvalue not contracting")
    if not np.isclose(small[0].conjugate(), small[1], atol=1e-8):
        raise ValueError("contracting eigenvalues must form a complex pair")
    exp_vec = vecs[:, 0].real
    exp_vec = exp_vec / exp_vec.sum()
    pair = vecs[:, 1] if small[0].imag > 0 else vecs[:, 2]
    # pin the free complex scale so the basis is reproducible
    lead = pair[int(np.argmax(np.abs(pair)))]
    pair = pair / lead
    basis = np.column_stack([exp_vec, pair.real, pair.imag])
    to_plane = np.linalg.inv(basis)[1:, :]
    return ContractingBasis(
        3,
        float(top.real),
        tuple(exp_vec),
        (tuple(pair.real), tuple(pair.imag)),
        tuple(map(tuple, to_plane)),
    )


@lru_cache(maxsize=None)
def family_basis(d: int) -> ContractingBasis:
    if d != 3:
        raise ValueError(
            f"planar projection requires d=3, got d={d}: the contracting "
            "complement is a plane only for three letters"
        )
    return contracting_basis(family_substitution(d).incidence_matrix())


def _projected_prefix_orbit(depth: int) -> np.ndarray:
    """(depth+1) x 2 array: projections of the inverted prefixes of length 0..depth."""
    basis = family_basis(3)
    text = np.frombuffer(fixed_point_prefix(3, depth), dtype=np.uint8)
    counts = np.zeros((depth + 1, 3))
    for j in range(3):
        counts[1:, j] = np.cumsum(text == j + 1)
    return -(counts @ np.asarray(basis.to_plane).T)


@dataclass
class PointCloud:
    xs: np.ndarray
    ys: np.ndarray
    tags: list[str]

    def __len__(self) -> int:
        return len(self.tags)

    @property
    def points(self) -> list[tuple[float, float, str]]:
        return [
            (float(x), float(y), t) for x, y, t in zip(self.xs, self.ys, self.tags)
        ]


def parse_coloring(spec: str) -> tuple[str, int]:
    """Accepts "cylinder:7", "cylinder 7", "arc:4", "arc 4"."""
    parts = spec.replace(":", " ").split()
    if len(parts) != 2 or parts[0] not in ("cylinder", "arc"):
        raise ValueError(f"coloring must be 'cylinder:<m>' or 'arc:<n>', got {spec!r}")
    return parts[0], int(parts[1])


class _OrbitIndex:
    """Per-prefix-length assignment to the arcs of one base tree.

    Walks the tree iteration once, recording for each center its label
    length, its base-stage ancestor edge, and whether every step of its
    descent stayed on trunk edges (off-trunk edges end in fresh leaves, so
    the center then realizes outside the embedded base tree).
    """

    def __init__(self, base: int, depth: int):
        self.base = base
        self.depth = depth
        self.boundary = len(l_word(3, base))
        self.arc_of = np.full(depth + 1, -1, dtype=np.int64)
        self.on_tree = np.zeros(depth + 1, dtype=bool)
        self.on_tree[: self.boundary + 1] = True
        self._build()

    def _build(self) -> None:
        it = TreeIteration(3)
        sub = family_substitution(3)
        base_tree = it.tree_at(self.base)
        # label lengths of the centers; pre-base stages seed the chains
        length = {0: 0}
        for s in range(1, self.base + 1):
            self._scan_stage(it, sub, s, length, None)
        stage = self.base
        on_edges = np.ones(len(base_tree.edges), dtype=bool)
        while len(l_word(3, stage)) < self.depth:
            stage += 1
            on_edges = self._scan_stage(it, sub, stage, length, on_edges)

    def _scan_stage(self, it, sub, stage, length, on_edges):
        prev = it.tree_at(stage - 1)
        tree = it.tree_at(stage)
        born = it.born[stage]
        step = len(sub.iterate(bytes([1]), stage - 1))
        deg = {}
        for s, t, _ in tree.edges:
            if s in born:
                deg[s] = deg.get(s, 0) + 1
            if t in born:
                deg[t] = deg.get(t, 0) + 1
        for v, e in born.items():
            if deg.get(v) != 3:
                continue
            src = prev.edges[e][0]
            # the replaced edge always runs from an already-labeled vertex
            lab_len = length[src] + step
            length[v] = lab_len
            if on_edges is not None and lab_len <= self.depth:
                self.arc_of[lab_len] = it.ancestor_edge(stage - 1, e, self.base)
                self.on_tree[lab_len] = bool(on_edges[e])
        if on_edges is None:
            return None
        new_on = np.zeros(len(tree.edges), dtype=bool)
        leaves = {v for v, dg in deg.items() if dg == 1}
        origin = it.origins[stage - 1]
        for idx, (s, t, _) in enumerate(tree.edges):
            if s in leaves or t in leaves:
                continue
            new_on[idx] = on_edges[origin[idx]]
        return new_on


@lru_cache(maxsize=8)
def _orbit_index(base: int, depth: int) -> _OrbitIndex:
    return _OrbitIndex(base, depth)


def fractal_cloud(depth: int, coloring: str = "cylinder:1") -> PointCloud:
    """Projected inverted prefixes up to `depth`, tagged by the coloring.

    Cylinder tags are the trailing m letters of the prefix; arc tags name
    the base-stage edge the corresponding branch point descends from.
    Points too short to be tagged get "-".
    """
    kind, k = parse_coloring(coloring)
    pts = _projected_prefix_orbit(depth)
    if kind == "cylinder":
        text = fixed_point_prefix(3, depth)
        tags = [
            word_str(text[i - k : i]) if i >= k else "-" for i in range(depth + 1)
        ]
    else:
        index = _orbit_index(k, depth)
        tags = [
            f"a{index.arc_of[i]}" if index.arc_of[i] >= 0 else "-"
            for i in range(depth + 1)
        ]
    return PointCloud(pts[:, 0].copy(), pts[:, 1].copy(), tags)


def zeta_cloud(n: int, depth: int) -> PointCloud:
    """Projection of the orbit points that lie on the embedded stage-n tree."""
    pts = _projected_prefix_orbit(depth)
    index = _orbit_index(n, depth)
    keep = np.flatnonzero(index.on_tree)
    tags = [
        f"a{index.arc_of[i]}" if index.arc_of[i] >= 0 else "-" for i in keep
    ]
    return PointCloud(pts[keep, 0].copy(), pts[keep, 1].copy(), tags)


# -- audits -----------------------------------------------------------------


def boundedness_profile(checkpoints=(50_000, 100_000)) -> dict[int, float]:
    """Sup norm of the projected orbit at each checkpoint depth."""
    depth = max(checkpoints)
    pts = _projected_prefix_orbit(depth)
    norms = np.abs(pts).max(axis=1)
    running = np.maximum.accumulate(norms)
    return {c: float(running[c]) for c in checkpoints}


def check_boundedness(ratio_tol: float = 0.01) -> list[str]:
    """The orbit's sup norm moves less than 1% between 50k and 100k."""
    profile = boundedness_profile()
    lo, hi = profile[50_000], profile[100_000]
    if not hi < float("inf"):
        return ["projected orbit unbounded"]
    if (hi - lo) / hi > ratio_tol:
        return [f"sup norm still drifting: {lo:.6f} -> {hi:.6f}"]
    return []


def contraction_decay(kmax: int = 18) -> list[float]:
    """Plane norms of the projected images of sigma^k(1); they shrink geometrically."""
    basis = family_basis(3)
    sub = family_substitution(3)
    out = []
    for k in range(kmax + 1):
        img = sub.iterate(bytes([1]), k)
        vec = [img.count(bytes([j + 1])) for j in range(3)]
        out.append(float(np.hypot(*basis.project(vec))))
    return out


def check_contraction(kmax: int = 18) -> list[str]:
    norms = contraction_decay(kmax)
    lam = growth_root(3)
    target = lam**-0.5
    # compare over 3 steps to smooth out the complex rotation
    ratios = [
        (norms[k + 3] / norms[k]) ** (1 / 3) for k in range(4, kmax - 2)
    ]
    bad = [r for r in ratios if not r < 0.95]
    if bad:
        return [f"projected powers not contracting: ratios {bad}"]
    if abs(np.median(ratios) - target) > 0.1:
        return [f"contraction ratio {np.median(ratios):.4f} far from {target:.4f}"]
    return []


def check_partition_match(depth: int = 20_000, m: int = 7, base: int = 4) -> list[str]:
    """Cylinder-m tags and arc-base tags cut the cloud identically."""
    cyl = fractal_cloud(depth, f"cylinder:{m}")
    arc = fractal_cloud(depth, f"arc:{base}")
    boundary = max(m, len(l_word(3, base)) + 1)
    fwd: dict[str, str] = {}
    rev: dict[str, str] = {}
    failures = []
    for i in range(boundary, depth + 1):
        a, b = cyl.tags[i], arc.tags[i]
        if fwd.setdefault(a, b) != b:
            failures.append(f"prefix {i}: cylinder {a} splits across arcs")
        if rev.setdefault(b, a) != a:
            failures.append(f"prefix {i}: arc {b} splits across cylinders")
        if failures:
            break
    if not failures and len(fwd) != len(factors(3, m)):
        failures.append(f"saw {len(fwd)} cylinder classes, want {len(factors(3, m))}")
    return failures


def _nearest_rms(a: np.ndarray, b: np.ndarray, chunk: int = 512) -> float:
    """Root mean square over a of the distance to the nearest point of b."""
    best = np.empty(len(a))
    for i in range(0, len(a), chunk):
        blk = a[i : i + chunk]
        d2 = ((blk[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        best[i : i + chunk] = d2.min(axis=1)
    return float(np.sqrt(best.mean()))


def check_translate_congruence(
    depth: int = 20_000, m: int = 7, rel_tol: float = 0.02
) -> list[str]:
    """Equal-measure cylinder clouds agree up to translation, within tolerance.

    Centroids are aligned and the symmetric nearest-neighbor RMS is compared
    to the cloud diameter.
    """
    cloud = fractal_cloud(depth, f"cylinder:{m}")
    pts = np.column_stack([cloud.xs, cloud.ys])
    diam = float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))))
    spectrum = measure_spectrum(3, m)
    groups: dict[int, list[str]] = {}
    for u, j in spectrum.snapped_exponents.items():
        groups.setdefault(j, []).append(word_str(u))
    by_tag: dict[str, np.ndarray] = {}
    for tag in set(cloud.tags) - {"-"}:
        sel = [i for i, t in enumerate(cloud.tags) if t == tag]
        by_tag[tag] = pts[sel]
    failures = []
    for j, members in sorted(groups.items()):
        for a, b in zip(members, members[1:]):
            pa = by_tag[a] - by_tag[a].mean(axis=0)
            pb = by_tag[b] - by_tag[b].mean(axis=0)
            rms = max(_nearest_rms(pa, pb), _nearest_rms(pb, pa))
            if rms / diam > rel_tol:
                failures.append(
                    f"class lambda^-{j}: {a} vs {b} rms {rms / diam:.4f} of diameter"
                )
    return failures


def projection_collisions(depth: int, tol: float = 1e-9) -> list[tuple[int, int]]:
    """Pairs of distinct prefix lengths landing on the same plane point.

    Reported, not resolved: the planar picture is allowed to collapse
    distinct tree points.
    """
    pts = _projected_prefix_orbit(depth)
    keys = np.round(pts / tol).astype(np.int64)
    seen: dict[tuple[int, int], int] = {}
    out = []
    for i, key in enumerate(map(tuple, keys)):
        if key in seen:
            out.append((seen[key], i))
        else:
            seen[key] = i
    return out


# -- artifacts --------------------------------------------------------------

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7",
    "#dbdb8d", "#9edae5", "#393b79", "#637939", "#8c6d31", "#843c39",
]


def tag_palette(tags) -> dict[str, str]:
    ordered = sorted(set(tags))
    return {t: PALETTE[i % len(PALETTE)] for i, t in enumerate(ordered)}


def export_csv(cloud: PointCloud, path: str) -> None:
    lines = ["x,y,tag"]
    for x, y, t in zip(cloud.xs, cloud.ys, cloud.tags):
        lines.append(f"{x or 0.0:.9f},{y or 0.0:.9f},{t}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def render_svg(cloud: PointCloud, path: str, size: int = 800) -> None:
    """Fixed-viewBox scatter plot; byte-identical for identical clouds."""
    colors = tag_palette(cloud.tags)
    if len(cloud):
        x0, x1 = float(cloud.xs.min()), float(cloud.xs.max())
        y0, y1 = float(cloud.ys.min()), float(cloud.ys.max())
    else:
        x0 = y0 = 0.0
        x1 = y1 = 1.0
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-3)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    r = max(x1 - x0, y1 - y0) / 400
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{x0:.6f} {y0:.6f} {x1 - x0:.6f} {y1 - y0:.6f}">',
        f'<rect x="{x0:.6f}" y="{y0:.6f}" width="{x1 - x0:.6f}" '
        f'height="{y1 - y0:.6f}" fill="white"/>',
    ]
    for x, y, t in zip(cloud.xs, cloud.ys, cloud.tags):
        parts.append(
            f'<circle cx="{x:.6f}" cy="{y:.6f}" r="{r:.6f}" fill="{colors[t]}"/>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
