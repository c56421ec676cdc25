"""Reduced words, automorphisms, the p* projection, cancellation probes."""

import pytest

from treesubst.freegroup import (
    abelianize,
    cancellation_report,
    concat,
    family_auto,
    family_inverse,
    from_positive,
    invert,
    inverse_growth_root,
    nielsen_probe,
    p_star,
    reduce_word,
    to_positive,
    tribonacci_inverse,
    word_text,
)


def test_reduction():
    assert reduce_word([1, -1]) == ()
    assert reduce_word([1, 2, -2, -1]) == ()
    assert reduce_word([1, 2, -2, 3]) == (1, 3)
    assert reduce_word([2, -3, 3, -2, 1]) == (1,)


def test_invert_and_concat():
    w = (1, -2, 3)
    assert invert(w) == (-3, 2, -1)
    assert concat(w, invert(w)) == ()
    assert concat((1, 2), (-2, 3)) == (1, 3)


def test_positive_round_trip():
    assert from_positive(b"\x01\x02") == (1, 2)
    assert to_positive((1, 2)) == b"\x01\x02"
    with pytest.raises(ValueError):
        to_positive((1, -2))


def test_word_text():
    assert word_text(()) == "e"
    assert word_text((-1, 2)) == "1⁻.2"


def test_family_auto_matches_substitution():
    auto = family_auto(3)
    assert auto.images == {1: (1, 2), 2: (3,), 3: (1,)}
    # sigma and its inverse compose to the identity on generators
    inv = family_inverse(3)
    for a in (1, 2, 3):
        assert inv(auto((a,))) == (a,)
        assert auto(inv((a,))) == (a,)


def test_automorphism_on_inverses():
    auto = family_auto(3)
    assert auto((-1,)) == (-2, -1)
    assert auto.iterate((1,), 3) == (1, 2, 3, 1)


def test_abelianize():
    assert abelianize(3, (1, -2, 1)).tolist() == [2, -1, 0]
    with pytest.raises(ValueError):
        abelianize(3, (4,))


def test_p_star_letters():
    # colors up to d are generators, d+k expands to the image of sigma^k(1)
    assert p_star(3, (1,)) == (1,)
    assert p_star(3, (3,)) == (3,)
    assert p_star(3, (4,)) == (1, 2)
    assert p_star(3, (-4,)) == (-2, -1)
    assert p_star(4, (5,)) == (1, 2)
    assert p_star(4, (6,)) == (1, 2, 3)
    with pytest.raises(ValueError):
        p_star(3, (5,))


def test_inverse_growth_root():
    eta = inverse_growth_root(3)
    assert abs(eta**3 - eta - 1) < 1e-12
    assert abs(eta - 1.3247179572) < 1e-9


def test_tribonacci_inverse_cancels_at_two():
    flags = cancellation_report(tribonacci_inverse(), [(3,)], 6)[(3,)]
    assert flags[0] is False and flags[1] is True


def test_nielsen_probe_persists():
    flags = cancellation_report(nielsen_probe(), [(1, 3)], 10)[(1, 3)]
    assert flags == [True] * 10


def test_family_inverse_never_cancels():
    for d in (3, 4, 5):
        inv = family_inverse(d)
        for a in range(1, d + 1):
            flags = cancellation_report(inv, [(a,)], 12)[(a,)]
            assert not any(flags), (d, a)
