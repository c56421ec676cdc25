"""Colored trees, substitution rules, iteration, provenance."""

import numpy as np
import pytest

from treesubst.freegroup import family_inverse, p_star
from treesubst.trees import (
    ColoredTree,
    RulePattern,
    TreeIteration,
    TreeSubstitution,
    family_tree_substitution,
    initial_tree,
)


def test_tree_rejects_non_trees():
    with pytest.raises(ValueError):
        ColoredTree(3, [(0, 1, 1), (1, 0, 2)])        # cycle
    with pytest.raises(ValueError):
        ColoredTree(3, [(0, 1, 1), (2, 3, 2)])        # disconnected
    with pytest.raises(ValueError):
        ColoredTree(3, [(0, 1, 7)])                   # color out of range
    with pytest.raises(ValueError):
        ColoredTree(3, [(0, 0, 1)])                   # loop


def test_path_word_signs():
    t = ColoredTree(3, [(0, 1, 1), (1, 2, 3)], root=0)
    assert t.path_word(0, 2) == (1, 3)
    assert t.path_word(2, 0) == (-3, -1)
    assert t.path_word(1, 1) == ()


def test_is_discerned_local_rule():
    good = ColoredTree(3, [(0, 1, 1), (0, 2, 1)])     # same color, both out: clash
    assert not good.is_discerned()
    ok = ColoredTree(3, [(0, 1, 1), (2, 0, 1)])       # in + out may share a color
    assert ok.is_discerned()


def test_initial_tree_is_star():
    for d in (3, 4, 5):
        t0 = initial_tree(d)
        assert len(t0.edges) == d
        assert sorted(c for _, _, c in t0.edges) == list(range(1, d + 1))
        assert t0.degree(t0.root) == d
        # the color-j neighbor is vertex j
        for _, j, c in t0.edges:
            assert j == c


def test_family_rules_validate():
    for d in (3, 4, 5, 6):
        report = family_tree_substitution(d).validate()
        assert report.ok, report.failures


def test_validation_catches_missing_anchor():
    rules = dict(family_tree_substitution(3).rules)
    rules[2] = RulePattern(2, (("P1", "P2", 3),))
    report = TreeSubstitution(3, rules).validate()
    assert not report.ok
    assert any("condition 1" in f for f in report.failures)


def test_trunk_words_project_to_inverse_images():
    for d in (3, 4, 5, 6):
        ts = family_tree_substitution(d)
        inv = family_inverse(d)
        for i in range(1, d + 1):
            assert p_star(d, ts.rules[i].trunk_word()) == inv.images[i]


def test_edge_growth():
    it = TreeIteration(3)
    counts = [len(it.tree_at(n).edges) for n in range(6)]
    assert counts == [3, 5, 7, 11, 15, 23]


def test_apply_preserves_root_and_discernment():
    it = TreeIteration(3)
    for n in range(8):
        t = it.tree_at(n)
        assert t.root == 0
        assert t.is_discerned()


def test_born_vertices_and_origins():
    it = TreeIteration(3)
    t1 = it.tree_at(1)
    born = it.born[1]
    assert born, "stage 1 must create vertices"
    for v, e in born.items():
        assert v not in it.tree_at(0).vertices
        assert 0 <= e < len(it.tree_at(0).edges)
    # every stage-1 edge descends from a stage-0 edge
    assert len(it.origins[0]) == len(t1.edges)


def test_ancestor_edge_chains():
    it = TreeIteration(3)
    it.tree_at(4)
    for idx in range(len(it.tree_at(4).edges)):
        a = it.ancestor_edge(4, idx, 2)
        b = it.ancestor_edge(2, a, 0)
        assert b == it.ancestor_edge(4, idx, 0)


def test_vertex_provenance():
    it = TreeIteration(3)
    it.tree_at(3)
    for v in it.tree_at(3).vertices:
        prov = it.vertex_provenance(v, 1)
        if it.birth_stage[v] <= 1:
            assert prov is None
        else:
            assert 0 <= prov < len(it.tree_at(1).edges)


def test_trunk_matrix_spectrum():
    for d in (3, 4, 5):
        ts = family_tree_substitution(d)
        eigs = sorted(np.abs(np.linalg.eigvals(ts.trunk_matrix().astype(float))))
        # d-2 zeros, then the roots of x^d = x + 1
        assert np.allclose(eigs[: d - 2], 0, atol=1e-9)
        roots = sorted(np.abs(np.roots([1] + [0] * (d - 2) + [-1, -1])))
        assert np.allclose(eigs[d - 2 :], roots, atol=1e-9)


def test_edge_matrix_spectrum():
    for d in (3, 4, 5):
        ts = family_tree_substitution(d)
        eigs = np.linalg.eigvals(ts.incidence_matrix().astype(float))
        top = max(np.abs(eigs))
        sigma_top = max(np.abs(np.roots([1, -1] + [0] * (d - 2) + [-1])))
        assert abs(top - sigma_top) < 1e-9


def test_json_round_trip():
    t = initial_tree(3)
    assert ColoredTree.from_json(t.to_json()) == t


def test_dot_output_lists_every_edge():
    t = initial_tree(3)
    dot = t.to_dot()
    assert dot.count("->") == len(t.edges)
