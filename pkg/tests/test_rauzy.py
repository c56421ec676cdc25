"""Planar projection, orbit clouds, and the plot artifacts."""

import numpy as np
import pytest

from treesubst.words import family_substitution, fixed_point_prefix, word_str
from treesubst.rauzy import (
    check_boundedness,
    check_contraction,
    check_partition_match,
    check_translate_congruence,
    contracting_basis,
    contraction_decay,
    export_csv,
    family_basis,
    boundedness_profile,
    fractal_cloud,
    parse_coloring,
    projection_collisions,
    render_svg,
    tag_palette,
    zeta_cloud,
    _projected_prefix_orbit,
)


def test_basis_rejects_other_dimensions():
    with pytest.raises(ValueError, match="requires d=3"):
        contracting_basis(np.eye(4))
    with pytest.raises(ValueError, match="requires d=3"):
        family_basis(4)


def test_basis_kills_expanding_direction():
    basis = family_basis(3)
    x, y = basis.project(basis.expanding)
    assert abs(x) < 1e-10 and abs(y) < 1e-10
    assert abs(basis.expanding_value - 1.4655712318767682) < 1e-12


def test_projection_is_linear():
    basis = family_basis(3)
    a, b = (1, -2, 3), (0, 4, -1)
    pa, pb = basis.project(a), basis.project(b)
    ps = basis.project(tuple(u + v for u, v in zip(a, b)))
    assert abs(ps[0] - pa[0] - pb[0]) < 1e-12
    assert abs(ps[1] - pa[1] - pb[1]) < 1e-12


def test_orbit_matches_per_point_projection():
    basis = family_basis(3)
    orbit = _projected_prefix_orbit(12)
    text = fixed_point_prefix(3, 12)
    counts = [0, 0, 0]
    assert tuple(orbit[0]) == (0.0, 0.0)
    for i, letter in enumerate(text, start=1):
        counts[letter - 1] += 1
        x, y = basis.project([-c for c in counts])
        assert abs(orbit[i, 0] - x) < 1e-12
        assert abs(orbit[i, 1] - y) < 1e-12


def test_substitution_matrix_generates_basis():
    # the family basis is just the contracting basis of the incidence matrix
    m = family_substitution(3).incidence_matrix()
    assert contracting_basis(m) == family_basis(3)


def test_contraction_decay():
    norms = contraction_decay(15)
    lam = 1.4655712318767682
    ratio = (norms[13] / norms[10]) ** (1 / 3)
    assert abs(ratio - lam**-0.5) < 0.05
    assert norms[12] < norms[4]
    assert check_contraction(15) == []


def test_boundedness():
    profile = boundedness_profile((1_000, 2_000))
    assert set(profile) == {1_000, 2_000}
    assert profile[2_000] >= profile[1_000] > 1.0
    assert check_boundedness() == []


def test_depth_zero_cloud():
    cloud = fractal_cloud(0)
    assert len(cloud) == 1
    assert cloud.points == [(0.0, 0.0, "-")]


def test_cylinder_tags():
    cloud = fractal_cloud(30, "cylinder:2")
    assert cloud.tags[:2] == ["-", "-"]
    assert cloud.tags[2] == word_str(fixed_point_prefix(3, 2))
    seen = set(cloud.tags) - {"-"}
    assert seen <= {"11", "12", "21", "23", "31"}
    assert len(cloud) == 31


def test_arc_coloring_class_counts():
    tags0 = set(fractal_cloud(400, "arc:0").tags) - {"-"}
    assert len(tags0) == 3
    tags4 = set(fractal_cloud(3000, "arc:4").tags) - {"-"}
    assert len(tags4) == 15


def test_zeta_cloud_stage_two():
    cloud = zeta_cloud(2, 3000)
    assert len(cloud) == 870
    assert len(set(cloud.tags) - {"-"}) == 7


def test_partition_match_small_depth():
    assert check_partition_match(6000, 7, 4) == []


def test_translate_congruence():
    assert check_translate_congruence(8000) == []


def test_projection_collisions():
    assert projection_collisions(2000) == []
    crowded = projection_collisions(200, tol=1.0)
    assert crowded and all(i < j for i, j in crowded)


def test_parse_coloring():
    assert parse_coloring("cylinder:7") == ("cylinder", 7)
    assert parse_coloring("arc 4") == ("arc", 4)
    for bad in ("blob:3", "cylinder", "arc:x"):
        with pytest.raises(ValueError):
            parse_coloring(bad)


def test_tag_palette_stable():
    tags = ["12", "-", "23", "12"]
    pal = tag_palette(tags)
    assert set(pal) == {"12", "-", "23"}
    assert all(c.startswith("#") and len(c) == 7 for c in pal.values())
    assert pal == tag_palette(list(reversed(tags)))


def test_artifacts_deterministic(tmp_path):
    cloud = fractal_cloud(500, "cylinder:3")
    paths = [tmp_path / f"out{i}.svg" for i in (0, 1)]
    for p in paths:
        render_svg(cloud, str(p))
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert a.startswith(b"<?xml")
    csvs = [tmp_path / f"out{i}.csv" for i in (0, 1)]
    for p in csvs:
        export_csv(cloud, str(p))
    ca, cb = (p.read_bytes() for p in csvs)
    assert ca == cb
    assert ca.splitlines()[0] == b"x,y,tag"
    assert len(ca.splitlines()) == 502
    assert b"-0.000000000" not in ca


def test_tiny_cloud_svg(tmp_path):
    cloud = zeta_cloud(0, 2)     # origin plus the first two trunk points
    p = tmp_path / "tiny.svg"
    render_svg(cloud, str(p))
    text = p.read_text()
    assert text.count("<circle") == len(cloud)
    assert "</svg>" in text
