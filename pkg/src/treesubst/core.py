"""Branch-point labels of the iterated trees and the structures built on them.

Every branch point of a stage-n tree carries a group-word label: the inverse
of a prefix of the fixed point.  This module computes the labels two ways
(incrementally stage by stage, and directly from root paths), derives the
stage inventories, simple arcs and their cylinder words, the partitions the
trees determine, the partial-isometry system on realized branch points, and
the exact path-length cross-check of realized distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algnum import ExactLength, letter_length_exact
from .freegroup import (
    GroupWord,
    concat,
    family_auto,
    from_positive,
    invert,
    p_star,
    to_positive,
    word_text,
)
from .prefix_suffix import automatic_writing
from .realization import FreePoint, Realization, distance
from .trees import ColoredTree, TreeIteration
from .words import (
    Word,
    bispecials_by_generation,
    cylinder_measure,
    factors,
    family_substitution,
    fixed_point_prefix,
    measure_spectrum,
    MeasureSpectrum,
    word_str,
)


def apparition_of_empty(d: int) -> int:
    """Stage at which the empty label is counted as having appeared."""
    return -(d - 2)


@lru_cache(maxsize=None)
def _power_inverse(d: int, alpha: int) -> GroupWord:
    """sigma^alpha(1) inverted, the building block of every label."""
    sub = family_substitution(d)
    return invert(from_positive(sub.iterate(bytes([1]), alpha)))


def l_word(d: int, m: int) -> GroupWord:
    """Longest branch label present after m substitution steps.

    Built as the product of sigma^a(1^-1) over exponents a = a0, a0+(d-1),
    ..., m-1 with a0 = (m-1) mod (d-1).  Its inverse is the m-th bispecial
    factor of the fixed point.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return ()
    a0 = (m - 1) % (d - 1)
    return concat(*(_power_inverse(d, a) for a in range(a0, m, d - 1)))


def determined_partition(d: int, n: int) -> int:
    """Cylinder length m whose partition the stage-n tree determines."""
    if n == 0:
        return 1
    return len(l_word(d, n)) + 1


def legal_path_distance(d: int, w: GroupWord) -> ExactLength:
    """Sum of per-letter lengths of a reduced word over the first d letters."""
    lengths = letter_length_exact(d)
    total = ExactLength.zero(d)
    for letter in w:
        k = abs(letter)
        if not 1 <= k <= d:
            raise ValueError(f"letter {letter} outside 1..{d}")
        total = total + lengths[k]
    return total


@dataclass(frozen=True)
class Arc:
    """One edge of a stage-n tree together with its interior-branch data.

    Iterating the tree substitution k more times puts exactly one branch
    point strictly inside the path [src, dst]; its label determines the
    positive cylinder word of the arc.
    """

    stage: int
    edge_index: int
    src: int
    dst: int
    color: int
    k: int
    center: int
    label: GroupWord

    @property
    def word(self) -> Word:
        return to_positive(invert(self.label))


@dataclass
class PartitionReport:
    m: int
    cylinders: list[tuple[str, float]]
    class_count: int
    determined_by: int | None
    spectrum: MeasureSpectrum


def _path_vertices(tree: ColoredTree, x: int, y: int) -> list[int]:
    # BFS parent chase; tree adjacency is cached on the ColoredTree
    if x == y:
        return [x]
    adj = tree.adjacency()
    parent = {x: None}
    queue = [x]
    while queue:
        nxt = []
        for v in queue:
            for w, _, _ in adj[v]:
                if w not in parent:
                    parent[w] = v
                    if w == y:
                        path = [y]
                        while path[-1] != x:
                            path.append(parent[path[-1]])
                        path.reverse()
                        return path
                    nxt.append(w)
        queue = nxt
    raise ValueError(f"no path {x} -> {y}")


def _hull(tree: ColoredTree, vertices: set[int]) -> tuple[set[int], set[int]]:
    """Vertex and edge sets of the smallest subtree containing `vertices`."""
    if not vertices:
        return set(), set()
    adj = tree.adjacency()
    keep = set(tree.vertices)
    deg = {v: len(adj[v]) for v in keep}
    # peel leaves that are not required until only the spanning subtree is left
    leaves = [v for v in keep if deg[v] <= 1 and v not in vertices]
    while leaves:
        v = leaves.pop()
        if v not in keep:
            continue
        keep.discard(v)
        for w, _, _ in adj[v]:
            if w in keep:
                deg[w] -= 1
                if deg[w] <= 1 and w not in vertices:
                    leaves.append(w)
    edges = {
        i for i, (s, t, _) in enumerate(tree.edges) if s in keep and t in keep
    }
    return keep, edges


class CoreScan:
    """Stage-by-stage labeling of branch points with realization on demand.

    The label of a stage-n center is the label of the source anchor of the
    replaced edge extended by sigma^(n-1)(1^-1); no cancellation occurs, and
    the result is always the inverse of a fixed-point prefix.
    """

    def __init__(self, d: int):
        self.d = d
        self.sub = family_substitution(d)
        self.auto = family_auto(d)
        self.it = TreeIteration(d)
        self.real = Realization(self.it)
        self.labels: dict[int, GroupWord] = {0: ()}
        self.apparition: dict[int, int] = {0: apparition_of_empty(d)}
        self.parent: dict[int, int] = {}
        self.by_word: dict[GroupWord, int] = {(): 0}
        self.by_length: dict[int, int] = {0: 0}
        self.scanned = 0

    # -- label scan ---------------------------------------------------------

    def extend_to(self, n: int) -> None:
        while self.scanned < n:
            self._scan_stage(self.scanned + 1)

    def _scan_stage(self, n: int) -> None:
        prev = self.it.tree_at(n - 1)
        tree = self.it.tree_at(n)
        step = _power_inverse(self.d, n - 1)
        born = self.it.born[n]
        for v in sorted(v for v in born if tree.degree(v) == self.d):
            src, _, color = prev.edges[born[v]]
            assert color == 2, "centers can only replace 2-colored edges"
            lab = self.labels[src] + step
            self._register(v, lab, n, src)
        self.scanned = n

    def _register(self, v: int, lab: GroupWord, stage: int, src: int) -> None:
        assert all(x < 0 for x in lab)
        length = len(lab)
        prefix = fixed_point_prefix(self.d, length)
        assert to_positive(invert(lab)) == prefix, "label is not a prefix inverse"
        assert length not in self.by_length, "duplicate label length"
        self.labels[v] = lab
        self.apparition[v] = stage
        self.parent[v] = src
        self.by_word[lab] = v
        self.by_length[length] = v

    def vertex_of_label(self, lab: GroupWord) -> int:
        try:
            return self.by_word[lab]
        except KeyError:
            raise ValueError(
                f"label {word_text(lab)} not seen up to stage {self.scanned}"
            ) from None

    def apparition_step(self, lab: GroupWord) -> int:
        return self.apparition[self.vertex_of_label(lab)]

    def writing(self, v: int) -> list[int]:
        return automatic_writing(self.d, to_positive(invert(self.labels[v])))

    # -- direct labeling route ---------------------------------------------

    def f0(self, stage: int, v: int) -> GroupWord:
        """Label computed from scratch: sigma^stage of the coded root path."""
        tree = self.it.tree_at(stage)
        gamma = tree.path_word(tree.root, v)
        return self.auto.iterate(p_star(self.d, gamma), stage)

    def check_f0(self, n: int) -> list[str]:
        """Direct route equals the incremental labels, stage-independently."""
        self.extend_to(n)
        failures = []
        tree = self.it.tree_at(n)
        nxt = self.it.tree_at(n + 1)
        for v in tree.branch_points():
            direct = self.f0(n, v)
            if direct != self.labels[v]:
                failures.append(f"stage {n} vertex {v}: direct label differs")
            g_now = p_star(self.d, tree.path_word(tree.root, v))
            g_next = p_star(self.d, nxt.path_word(nxt.root, v))
            if self.auto(g_next) != g_now:
                failures.append(f"stage {n} vertex {v}: path codes inconsistent")
        return failures

    # -- inventories --------------------------------------------------------

    def inventory(self, m: int) -> set[GroupWord]:
        self.extend_to(m)
        tree = self.it.tree_at(m)
        return {self.labels[v] for v in tree.branch_points()}

    def check_inventory(self, m: int) -> list[str]:
        """Stage-m labels are exactly the suffixes of the longest one."""
        failures = []
        got = self.inventory(m)
        lm = l_word(self.d, m)
        suffixes = {lm[i:] for i in range(len(lm) + 1)}
        if got != suffixes:
            failures.append(f"m={m}: inventory is not the suffix set")
        if len(got) != len(lm) + 1:
            failures.append(f"m={m}: expected {len(lm) + 1} labels, got {len(got)}")
        if 1 <= m <= self.d - 1:
            new = got - self.inventory(m - 1)
            if new != {_power_inverse(self.d, m - 1)}:
                failures.append(f"m={m}: early stage should add exactly one label")
        return failures

    def check_bispecial_match(self, max_m: int) -> list[str]:
        """Inverted labels coincide with the bispecial chain, suffix-ordered."""
        failures = []
        longest = to_positive(invert(l_word(self.d, max_m)))
        bis = [b for b in bispecials_by_generation(self.d, len(longest)) if b]
        words = [to_positive(invert(l_word(self.d, m))) for m in range(1, max_m + 1)]
        if words != bis[: len(words)]:
            failures.append("label chain disagrees with bispecial generation")
        # suffix order on the inverses = prefix order on the positive words
        for a, b in zip(words, words[1:]):
            if b[: len(a)] != a:
                failures.append(f"{word_str(a)} does not begin {word_str(b)}")
        return failures

    # -- apparition structure ----------------------------------------------

    def check_apparition_chain(self, n: int) -> list[str]:
        """Each stage-n label extends a label from d-1 to 2d-2 stages back."""
        self.extend_to(n)
        failures = []
        d = self.d
        for v, stage in self.apparition.items():
            if not 1 <= stage <= n:
                continue
            prev = self.apparition[self.parent[v]]
            if not stage - (2 * d - 2) <= prev <= stage - (d - 1):
                failures.append(
                    f"vertex {v}: parent step {prev} outside "
                    f"[{stage - (2 * d - 2)}, {stage - (d - 1)}]"
                )
        return failures

    def check_writing_exponents(self, n: int) -> list[str]:
        """Max writing exponent of a stage-n label is n-1 or n."""
        self.extend_to(n)
        failures = []
        for v, stage in self.apparition.items():
            if not 1 <= stage <= n:
                continue
            top = max(self.writing(v))
            if top not in (stage - 1, stage):
                failures.append(f"vertex {v}: max exponent {top} at step {stage}")
        return failures

    def check_branching_neighbor(self, n: int) -> list[str]:
        """When the max exponent reaches the step, the 1-neighbor branches."""
        self.extend_to(n)
        failures = []
        for v, stage in self.apparition.items():
            if not 1 <= stage <= n:
                continue
            exps = self.writing(v)
            if max(exps) != stage:
                continue
            tree = self.it.tree_at(stage)
            nbr = {sc: w for w, sc, _ in tree.adjacency()[v]}
            y = nbr[1]
            if tree.degree(y) != self.d:
                failures.append(f"vertex {v}: 1-neighbor {y} does not branch")
                continue
            stripped = concat(*(_power_inverse(self.d, a) for a in exps[:-1]))
            if self.labels.get(y) != stripped:
                failures.append(f"vertex {v}: 1-neighbor label mismatch")
        return failures

    # -- realized branch points --------------------------------------------

    def point_of_label(self, lab: GroupWord) -> FreePoint:
        v = self.vertex_of_label(lab)
        self.real.extend_to(max(self.apparition[v], 0))
        return self.real.point(v)

    def check_injective(self, m: int) -> list[str]:
        """Distinct stage-m labels realize as distinct points."""
        self.extend_to(m)
        self.real.extend_to(m)
        seen: dict[FreePoint, GroupWord] = {}
        failures = []
        for lab in sorted(self.inventory(m), key=len):
            pt = self.real.point(self.by_word[lab])
            if pt in seen:
                failures.append(
                    f"labels {word_text(seen[pt])} and {word_text(lab)} collide"
                )
            seen[pt] = lab
        return failures

    def approx_points(self, exponents: list[int]) -> list[FreePoint]:
        """Realized points of the truncations of an ascending writing."""
        for a, b in zip(exponents, exponents[1:]):
            if b - a < self.d:
                raise ValueError("exponent gaps must be at least d")
        self.extend_to(max(exponents) + 1)
        out = []
        lab: GroupWord = ()
        for a in exponents:
            lab = lab + _power_inverse(self.d, a)
            out.append(self.point_of_label(lab))
        return out

    def check_approx_steps(self, exponents: list[int]) -> list[str]:
        """Appending sigma^a(1^-1) moves the point by exactly rho^-a * V(1)."""
        pts = self.approx_points(exponents)
        failures = []
        base = self.real.base_lengths[1]
        for i in range(1, len(pts)):
            got = distance(pts[i - 1], pts[i])
            want = base.scaled(-exponents[i])
            if got != want:
                failures.append(
                    f"step {exponents[i]}: moved {got.value():.6f}, "
                    f"want {want.value():.6f}"
                )
        return failures

    # -- simple arcs --------------------------------------------------------

    def simple_arcs(self, n: int) -> list[Arc]:
        """Each stage-n edge with its first strictly interior branch point."""
        d = self.d
        self.extend_to(n + 2 * d - 2)
        tree = self.it.tree_at(n)
        arcs = []
        for idx, (s, t, c) in enumerate(tree.edges):
            found = None
            for k in range(1, 2 * d - 1):
                deeper = self.it.tree_at(n + k)
                interior = [
                    v
                    for v in _path_vertices(deeper, s, t)[1:-1]
                    if deeper.degree(v) == d
                ]
                if len(interior) == 1:
                    found = (k, interior[0])
                    break
                if len(interior) > 1:
                    break
            if found is None:
                raise RuntimeError(f"edge {idx} at stage {n}: no single branch")
            k, center = found
            arcs.append(Arc(n, idx, s, t, c, k, center, self.labels[center]))
        return arcs

    def check_initial_arcs(self) -> list[str]:
        """Stage-0 arc words around the star follow the two closed forms."""
        failures = []
        d = self.d
        for arc in self.simple_arcs(0):
            j = arc.color
            want = _power_inverse(d, d - 1) if j == 1 else _power_inverse(d, j - 2)
            if arc.label != want:
                failures.append(
                    f"color {j}: arc label {word_text(arc.label)}, "
                    f"want {word_text(want)}"
                )
        return failures

    def _arc_interiors(self, arcs: list[Arc], deep: int) -> list[set[int]]:
        self.extend_to(deep)
        self.it.tree_at(deep)
        n = arcs[0].stage
        owner: dict[int, set[int]] = {a.edge_index: set() for a in arcs}
        for v, b in self.it.birth_stage.items():
            if n < b <= deep:
                owner[self.it.vertex_provenance(v, n)].add(v)
        return [owner[a.edge_index] for a in arcs]

    def check_arc_overlaps(self, n: int) -> list[str]:
        """Deep shadows of distinct arcs meet in at most one vertex.

        Shared vertices must be labeled branch points: the only points lying
        in two arc closures are realized orbit points.
        """
        arcs = self.simple_arcs(n)
        deep = n + 2 * self.d - 2
        tree = self.it.tree_at(deep)
        interiors = self._arc_interiors(arcs, deep)
        sets = [
            {arc.src, arc.dst} | inner for arc, inner in zip(arcs, interiors)
        ]
        failures = []
        for i in range(len(arcs)):
            for j in range(i + 1, len(arcs)):
                shared = sets[i] & sets[j]
                if len(shared) > 1:
                    failures.append(f"arcs {i},{j} share {sorted(shared)}")
                for v in shared:
                    if v not in self.labels or tree.degree(v) != self.d:
                        failures.append(f"arcs {i},{j}: shared {v} not a branch")
        return failures

    def check_arc_cylinders(self, n: int) -> list[str]:
        """Arcs match length-m cylinders and absorb all later labels."""
        d = self.d
        m = determined_partition(d, n)
        arcs = self.simple_arcs(n)
        failures = []
        if len(arcs) != (d - 1) * m + 1:
            failures.append(f"stage {n}: {len(arcs)} arcs, want {(d - 1) * m + 1}")
        tags = [arc.word[-m:] for arc in arcs]
        for arc, tag in zip(arcs, tags):
            if len(arc.word) < m:
                failures.append(f"arc {arc.edge_index}: word shorter than {m}")
        if len(set(tags)) != len(arcs):
            failures.append(f"stage {n}: arc suffixes of length {m} collide")
        if set(tags) != factors(d, m):
            failures.append(f"stage {n}: suffixes miss some length-{m} factors")
        deep = self.scanned
        by_edge = {arc.edge_index: arc for arc in arcs}
        for v, stage in self.apparition.items():
            if not n < stage <= deep:
                continue
            arc = by_edge[self.it.vertex_provenance(v, n)]
            u = to_positive(invert(self.labels[v]))
            if u[-len(arc.word):] != arc.word:
                failures.append(
                    f"vertex {v}: label does not extend arc {arc.edge_index}"
                )
        return failures

    # -- partial isometries -------------------------------------------------

    def omega_letter(self, i: int) -> int:
        return fixed_point_prefix(self.d, i + 1)[i]

    def shift_domain(self, a: int, n: int) -> list[int]:
        """Branch points whose coded tail starts with the letter a."""
        self.extend_to(n)
        tree = self.it.tree_at(n)
        return [
            v
            for v in sorted(tree.branch_points())
            if self.omega_letter(len(self.labels[v])) == a
        ]

    def shift_image_label(self, a: int, v: int) -> GroupWord:
        lab = self.labels[v]
        if self.omega_letter(len(lab)) != a:
            raise ValueError(f"vertex {v} is not in the domain of letter {a}")
        return (-a,) + lab

    def shift_image_vertex(self, a: int, v: int) -> int:
        return self.vertex_of_label(self.shift_image_label(a, v))

    def check_shift_conjugacy(self, a: int, n: int) -> list[str]:
        """Image labels are the one-step-longer prefix inverses."""
        self.extend_to(n + 1)
        failures = []
        for v in self.shift_domain(a, n):
            lab = self.shift_image_label(a, v)
            want = invert(from_positive(fixed_point_prefix(self.d, len(lab))))
            if lab != want:
                failures.append(f"vertex {v}: image label mismatch")
                continue
            try:
                self.vertex_of_label(lab)
            except ValueError:
                failures.append(f"vertex {v}: image label unrealized")
        return failures

    def check_shift_isometry(self, a: int, n: int) -> list[str]:
        """Pairwise distances survive the label shift exactly."""
        self.extend_to(n + 1)
        self.real.extend_to(n + 1)
        dom = self.shift_domain(a, n)
        pts = {v: self.real.point(v) for v in dom}
        imgs = {v: self.point_of_label(self.shift_image_label(a, v)) for v in dom}
        failures = []
        for i, v in enumerate(dom):
            for w in dom[i + 1:]:
                if distance(pts[v], pts[w]) != distance(imgs[v], imgs[w]):
                    failures.append(f"letter {a}: pair ({v},{w}) distorted")
        return failures

    def check_domain_overlaps(self, n: int) -> list[str]:
        """Spanned domains of distinct letters share at most one vertex."""
        self.extend_to(n)
        tree = self.it.tree_at(n)
        hulls = {
            a: _hull(tree, set(self.shift_domain(a, n)))
            for a in range(1, self.d + 1)
        }
        failures = []
        for a in range(1, self.d + 1):
            for b in range(a + 1, self.d + 1):
                va, ea = hulls[a]
                vb, eb = hulls[b]
                if ea & eb:
                    failures.append(f"letters {a},{b}: domains share edges")
                elif len(va & vb) > 1:
                    failures.append(
                        f"letters {a},{b}: domains share {sorted(va & vb)}"
                    )
        return failures

    # -- distances ----------------------------------------------------------

    def check_path_distances(self, n: int) -> list[str]:
        """Realized distance = rho^-n * coded path length, for all pairs."""
        self.extend_to(n)
        self.real.extend_to(n)
        tree = self.it.tree_at(n)
        branch = sorted(tree.branch_points())
        failures = []
        for i, x in enumerate(branch):
            for y in branch[i + 1:]:
                gamma = tree.path_word(x, y)
                if any(abs(c) > self.d for c in gamma):
                    failures.append(f"pair ({x},{y}): path leaves the core colors")
                    continue
                want = legal_path_distance(self.d, p_star(self.d, gamma)).scaled(-n)
                got = distance(self.real.point(x), self.real.point(y))
                if got != want:
                    failures.append(
                        f"pair ({x},{y}): {got.value():.6f} != {want.value():.6f}"
                    )
        return failures


@lru_cache(maxsize=None)
def shared_scan(d: int) -> CoreScan:
    """Process-wide scan reused by audits and the command line."""
    return CoreScan(d)


def branch_inventory(d: int, m: int) -> set[GroupWord]:
    return shared_scan(d).inventory(m)


def partition_report(d: int, m: int, prefix_len: int | None = None) -> PartitionReport:
    """Measure classes of the length-m cylinders and who determines them."""
    kwargs = {} if prefix_len is None else {"prefix_len": prefix_len}
    spectrum = measure_spectrum(d, m, **kwargs)
    cylinders = [
        (word_str(u), cylinder_measure(d, u, **kwargs))
        for u in sorted(factors(d, m))
    ]
    determined_by: int | None
    if m == 1:
        determined_by = 0
    else:
        determined_by = next(
            (n for n in range(1, m + 1) if len(l_word(d, n)) + 1 == m), None
        )
    return PartitionReport(m, cylinders, spectrum.class_count, determined_by, spectrum)
