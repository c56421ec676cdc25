"""Colored directed trees and edge substitutions on them.

An edge (x, y, c) points from x to y and carries a color in 1..2d-2.  A
tree substitution replaces every edge by a finite pattern glued along two
anchor vertices; the family used throughout the package sends color 2 to
a star of d fresh edges and merely recolors every other edge:

    1 -> d,   2 -> star,   i -> i-1 (3 <= i <= d),
    d+1 -> 1, i -> i-1 (d+2 <= i <= 2d-2).

Placeholder vertices of a pattern get fresh ids from a monotone counter,
edges being processed in sorted (src, dst, color) order, so iteration is
fully deterministic and vertex sets are nested along the stages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

Edge = tuple[int, int, int]


class ColoredTree:
    """Finite directed colored tree; edges are stored sorted."""

    def __init__(self, d: int, edges, root: int | None = None):
        self.d = d
        self.edges: tuple[Edge, ...] = tuple(sorted(tuple(e) for e in edges))
        self.root = root
        self._adj: dict[int, list[tuple[int, int, int]]] | None = None
        verts: set[int] = set()
        for s, t, c in self.edges:
            if not 1 <= c <= 2 * d - 2:
                raise ValueError(f"color {c} outside 1..{2*d-2}")
            if s == t:
                raise ValueError("loop edge")
            verts.add(s)
            verts.add(t)
        self.vertices: tuple[int, ...] = tuple(sorted(verts))
        self._assert_tree()

    def _assert_tree(self) -> None:
        n = len(self.vertices)
        if n == 0:
            return
        if len(self.edges) != n - 1:
            raise ValueError("edge count is not vertex count - 1")
        seen = {self.vertices[0]}
        frontier = [self.vertices[0]]
        while frontier:
            v = frontier.pop()
            for w, _, _ in self.adjacency().get(v, ()):
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        if len(seen) != n:
            raise ValueError("tree is not connected")

    def adjacency(self) -> dict[int, list[tuple[int, int, int]]]:
        """v -> list of (neighbor, signed color, edge index); sign -1 on incoming."""
        if self._adj is None:
            adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in self.vertices}
            for i, (s, t, c) in enumerate(self.edges):
                adj[s].append((t, c, i))
                adj[t].append((s, -c, i))
            self._adj = adj
        return self._adj

    def degree(self, v: int) -> int:
        return len(self.adjacency()[v])

    def degrees(self) -> dict[int, int]:
        return {v: self.degree(v) for v in self.vertices}

    def branch_points(self) -> list[int]:
        return [v for v in self.vertices if self.degree(v) >= 3]

    def path_word(self, x: int, y: int) -> tuple[int, ...]:
        """Signed colors along the unique path x -> y (negative = against the arrow)."""
        if x == y:
            return ()
        parent: dict[int, tuple[int, int]] = {x: (x, 0)}
        frontier = [x]
        while frontier and y not in parent:
            nxt = []
            for v in frontier:
                for w, sc, _ in self.adjacency()[v]:
                    if w not in parent:
                        parent[w] = (v, sc)
                        nxt.append(w)
            frontier = nxt
        if y not in parent:
            raise ValueError("no path (disconnected input?)")
        word: list[int] = []
        v = y
        while v != x:
            v, sc = parent[v]
            word.append(sc)
        return tuple(reversed(word))

    def is_discerned(self) -> bool:
        """No path word contains a barred color next to its unbarred twin.

        Equivalent local test: at every vertex the outgoing colors are
        pairwise distinct and the incoming colors are pairwise distinct.
        (An incoming and an outgoing edge may share a color: that spells
        c.c along a path, which is allowed.)
        """
        for v in self.vertices:
            outs = [c for _, c, _ in self.adjacency()[v] if c > 0]
            ins = [c for _, c, _ in self.adjacency()[v] if c < 0]
            if len(set(outs)) != len(outs) or len(set(ins)) != len(ins):
                return False
        return True

    def ball(self, radius: int, center: int | None = None) -> "ColoredTree":
        """Subtree induced by vertices within graph distance `radius` of center."""
        c = self.root if center is None else center
        if c is None:
            raise ValueError("no center given and tree has no root")
        dist = {c: 0}
        frontier = [c]
        while frontier:
            nxt = []
            for v in frontier:
                for w, _, _ in self.adjacency()[v]:
                    if w not in dist and dist[v] < radius:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        kept = [e for e in self.edges if e[0] in dist and e[1] in dist]
        return ColoredTree(self.d, kept, root=c)

    def root_signature(self, center: int | None = None) -> tuple:
        """Sorted multiset of (direction, color) seen at the root."""
        c = self.root if center is None else center
        return tuple(sorted(("out" if sc > 0 else "in", abs(sc))
                            for _, sc, _ in self.adjacency()[c]))

    def canonical_form(self, root: int | None = None) -> tuple:
        """Rooted canonical encoding, invariant under vertex renaming."""
        r = self.root if root is None else root
        if r is None:
            raise ValueError("rooted canonical form needs a root")

        def enc(v: int, parent: int) -> tuple:
            subs = []
            for w, sc, _ in self.adjacency()[v]:
                if w != parent:
                    subs.append((("out" if sc > 0 else "in"), abs(sc), enc(w, v)))
            return tuple(sorted(subs))

        return enc(r, -1)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "root": self.root,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ColoredTree":
        t = cls(data["d"], [tuple(e) for e in data["edges"]], root=data.get("root"))
        if sorted(data["vertices"]) != list(t.vertices):
            raise ValueError("vertex list disagrees with edges")
        return t

    def to_dot(self) -> str:
        palette = ["black", "red", "blue", "green3", "orange", "purple",
                   "brown", "cyan3", "magenta", "gray40"]
        lines = [f"digraph stage_tree {{  // d={self.d}"]
        if self.root is not None:
            lines.append(f"  v{self.root} [shape=doublecircle];")
        for s, t, c in self.edges:
            col = palette[c % len(palette)]
            lines.append(f'  v{s} -> v{t} [label="{c}", color={col}];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        return (isinstance(other, ColoredTree) and self.d == other.d
                and self.edges == other.edges and self.root == other.root)

    def __hash__(self):
        return hash((self.d, self.edges, self.root))


# ---------------------------------------------------------------------------
# substitution rules

ANCHOR_SRC = "X"
ANCHOR_DST = "Y"


@dataclass(frozen=True)
class RulePattern:
    """Replacement pattern for one color, over symbols X, Y, P1, P2, ...

    X and Y are glued to the endpoints of the replaced edge; the Pk get
    fresh vertex ids in increasing k order at instantiation time.
    """

    color: int
    edges: tuple[tuple[str, str, int], ...]

    def symbols(self) -> list[str]:
        syms: set[str] = set()
        for s, t, _ in self.edges:
            syms.add(s)
            syms.add(t)
        return sorted(syms)

    def placeholders(self) -> list[str]:
        ps = [s for s in self.symbols() if s not in (ANCHOR_SRC, ANCHOR_DST)]
        for p in ps:
            if not (p.startswith("P") and p[1:].isdigit()):
                raise ValueError(f"bad placeholder symbol {p!r}")
        return sorted(ps, key=lambda p: int(p[1:]))

    def trunk_word(self) -> tuple[int, ...]:
        """Signed colors along the X -> Y path inside the pattern."""
        adj: dict[str, list[tuple[str, int]]] = {}
        for s, t, c in self.edges:
            adj.setdefault(s, []).append((t, c))
            adj.setdefault(t, []).append((s, -c))
        parent: dict[str, tuple[str, int]] = {ANCHOR_SRC: (ANCHOR_SRC, 0)}
        frontier = [ANCHOR_SRC]
        while frontier and ANCHOR_DST not in parent:
            nxt = []
            for v in frontier:
                for w, sc in adj.get(v, ()):
                    if w not in parent:
                        parent[w] = (v, sc)
                        nxt.append(w)
            frontier = nxt
        if ANCHOR_DST not in parent:
            raise ValueError("anchors are not connected in the pattern")
        word: list[int] = []
        v = ANCHOR_DST
        while v != ANCHOR_SRC:
            v, sc = parent[v]
            word.append(sc)
        return tuple(reversed(word))

    def anchor_degrees(self) -> tuple[int, int]:
        deg = {ANCHOR_SRC: 0, ANCHOR_DST: 0}
        for s, t, _ in self.edges:
            for v in (s, t):
                if v in deg:
                    deg[v] += 1
        return deg[ANCHOR_SRC], deg[ANCHOR_DST]


@dataclass
class ValidationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)


@dataclass
class ApplyResult:
    tree: ColoredTree
    edge_origin: tuple[int, ...]      # new edge index -> old edge index
    born: dict[int, int]              # fresh vertex -> old edge index it replaces


class TreeSubstitution:
    def __init__(self, d: int, rules: dict[int, RulePattern]):
        self.d = d
        self.rules = dict(rules)

    # -- validation ---------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check the four defining constraints of an edge substitution."""
        failures: list[str] = []
        ncolors = 2 * self.d - 2
        missing = [c for c in range(1, ncolors + 1) if c not in self.rules]
        if missing:
            failures.append(f"condition 1: no pattern for colors {missing}")
        for c, pat in sorted(self.rules.items()):
            syms = pat.symbols()
            if ANCHOR_SRC not in syms or ANCHOR_DST not in syms:
                failures.append(f"condition 1: pattern for color {c} misses an anchor")
                continue
            try:
                index = {sym: i for i, sym in enumerate(syms)}
                ColoredTree(self.d, [(index[s], index[t], cc) for s, t, cc in pat.edges])
            except ValueError as exc:
                failures.append(f"condition 2: pattern for color {c} is not a tree ({exc})")
                continue
            try:
                pat.placeholders()
            except ValueError as exc:
                failures.append(f"condition 3: pattern for color {c}: {exc}")
        if not failures:
            failures.extend(self._check_color_cycles())
        return ValidationReport(not failures, failures)

    def _direct_anchor_color(self, pat: RulePattern) -> int | None:
        """Color of an X-Y edge of the pattern if there is one (either direction)."""
        for s, t, c in pat.edges:
            if {s, t} == {ANCHOR_SRC, ANCHOR_DST}:
                return c
        return None

    def _check_color_cycles(self) -> list[str]:
        """Condition 4: on any cycle of direct anchor edges, anchors have degree 1."""
        succ: dict[int, int] = {}
        for c, pat in self.rules.items():
            b = self._direct_anchor_color(pat)
            if b is not None:
                succ[c] = b
        on_cycle: set[int] = set()
        for start in succ:
            seen: list[int] = []
            c = start
            while c in succ and c not in seen:
                seen.append(c)
                c = succ[c]
            if c in seen:
                on_cycle.update(seen[seen.index(c):])
        failures = []
        for c in sorted(on_cycle):
            dx, dy = self.rules[c].anchor_degrees()
            if dx != 1 or dy != 1:
                failures.append(
                    f"condition 4: color cycle through {c} but anchors have degree {dx},{dy}"
                )
        return failures

    # -- application --------------------------------------------------------

    def apply(self, tree: ColoredTree) -> ApplyResult:
        """Replace every edge by its pattern; placeholders get fresh ids."""
        next_id = max(tree.vertices) + 1 if tree.vertices else 0
        new_edges: list[Edge] = []
        origin: list[int] = []
        born: dict[int, int] = {}
        for idx, (s, t, c) in enumerate(tree.edges):
            if c not in self.rules:
                raise ValueError(f"no rule for color {c}")
            pat = self.rules[c]
            assign = {ANCHOR_SRC: s, ANCHOR_DST: t}
            for p in pat.placeholders():
                assign[p] = next_id
                born[next_id] = idx
                next_id += 1
            for ps, pt, pc in pat.edges:
                new_edges.append((assign[ps], assign[pt], pc))
                origin.append(idx)
        order = sorted(range(len(new_edges)), key=lambda i: new_edges[i])
        result = ColoredTree(self.d, [new_edges[i] for i in order], root=tree.root)
        assert len(result.edges) == len(new_edges), "pattern instantiation collided"
        return ApplyResult(result, tuple(origin[i] for i in order), born)

    def trunk_matrix(self) -> np.ndarray:
        """t[i,j] = edges of color i+1 on the anchor path of the pattern for j+1."""
        n = 2 * self.d - 2
        m = np.zeros((n, n), dtype=np.int64)
        for c, pat in self.rules.items():
            for sc in pat.trunk_word():
                m[abs(sc) - 1, c - 1] += 1
        return m

    def incidence_matrix(self) -> np.ndarray:
        """m[i,j] = total edges of color i+1 in the pattern for color j+1."""
        n = 2 * self.d - 2
        m = np.zeros((n, n), dtype=np.int64)
        for c, pat in self.rules.items():
            for _, _, pc in pat.edges:
                m[pc - 1, c - 1] += 1
        return m


@lru_cache(maxsize=None)
def family_tree_substitution(d: int) -> TreeSubstitution:
    """The rule set paired with the d-letter word substitution."""
    if d < 3:
        raise ValueError("family needs d >= 3")
    rules: dict[int, RulePattern] = {}
    rules[1] = RulePattern(1, (("X", "Y", d),))
    star = [("P1", "X", d), ("P1", "Y", 1)]
    for h in range(1, d - 1):
        star.append(("P1", f"P{h + 1}", d + h))
    rules[2] = RulePattern(2, tuple(star))
    for i in range(3, d + 1):
        rules[i] = RulePattern(i, (("X", "Y", i - 1),))
    rules[d + 1] = RulePattern(d + 1, (("X", "Y", 1),))
    for i in range(d + 2, 2 * d - 1):
        rules[i] = RulePattern(i, (("X", "Y", i - 1),))
    return TreeSubstitution(d, rules)


@lru_cache(maxsize=None)
def initial_tree(d: int) -> ColoredTree:
    """T_0^s: iterate the rules d-1 times on a single 2-colored edge.

    The result is a star of d edges out of one center, colored 1..d; it
    is relabelled canonically so the root is vertex 0 and the color-j
    neighbor is vertex j.
    """
    ts = family_tree_substitution(d)
    t = ColoredTree(d, [(0, 1, 2)])
    for _ in range(d - 1):
        t = ts.apply(t).tree
    centers = [v for v in t.vertices if t.degree(v) == d]
    assert len(centers) == 1, "seed iteration did not produce a star"
    center = centers[0]
    colors = sorted(c for _, c, _ in t.adjacency()[center])
    assert colors == list(range(1, d + 1)), "star colors are not 1..d"
    relabel = {center: 0}
    for w, sc, _ in t.adjacency()[center]:
        assert sc > 0, "star edge pointing at the center"
        relabel[w] = sc
    edges = [(relabel[s], relabel[t_], c) for s, t_, c in t.edges]
    return ColoredTree(d, edges, root=0)


class TreeIteration:
    """Stage-indexed iteration T_0^s, T_1^s, ... with provenance maps."""

    def __init__(self, d: int):
        self.d = d
        self.subst = family_tree_substitution(d)
        self.trees: list[ColoredTree] = [initial_tree(d)]
        self.origins: list[tuple[int, ...]] = []   # stage n edge -> stage n-1 edge
        self.born: list[dict[int, int]] = [{}]     # vertex -> replaced edge at birth
        self.birth_stage: dict[int, int] = {v: 0 for v in self.trees[0].vertices}

    def tree_at(self, n: int) -> ColoredTree:
        while len(self.trees) <= n:
            res = self.subst.apply(self.trees[-1])
            self.trees.append(res.tree)
            self.origins.append(res.edge_origin)
            self.born.append(res.born)
            stage = len(self.trees) - 1
            for v in res.born:
                self.birth_stage[v] = stage
        return self.trees[n]

    def ancestor_edge(self, stage: int, edge_idx: int, base: int) -> int:
        """Index in T_base^s of the edge that edge_idx at `stage` descends from."""
        assert base <= stage
        i = edge_idx
        for k in range(stage, base, -1):
            i = self.origins[k - 1][i]
        return i

    def vertex_provenance(self, v: int, base: int) -> int | None:
        """Stage-base ancestor edge a later-born vertex descends from.

        None for vertices that already exist in T_base^s.
        """
        b = self.birth_stage[v]
        if b <= base:
            return None
        replaced = self.born[b][v]          # edge index in T_(b-1)^s
        return self.ancestor_edge(b - 1, replaced, base)
