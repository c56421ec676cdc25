"""Reduced words in the free group F_d and automorphisms acting on them.

A group word is a tuple of nonzero ints: +k is the generator k, -k its
inverse.  Reduction cancels adjacent x, -x pairs.  The module carries the
family substitution as an automorphism, its inverse

    1 -> d,  2 -> d^-1 1,  k -> k-1  (3 <= k <= d),

the projection p* from tree path words to group words, and cancellation
probes for iterated inverse automorphisms.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .words import Word, family_substitution

GroupWord = tuple[int, ...]


def reduce_word(letters) -> GroupWord:
    stack: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def invert(w: GroupWord) -> GroupWord:
    return tuple(-x for x in reversed(w))


def concat(*parts: GroupWord) -> GroupWord:
    merged: list[int] = []
    for p in parts:
        merged.extend(p)
    return reduce_word(merged)


def from_positive(w: Word) -> GroupWord:
    """Embed a word over 1..d letterwise."""
    return tuple(int(c) for c in w)


def to_positive(w: GroupWord) -> Word:
    if any(x < 0 for x in w):
        raise ValueError("word has inverse letters")
    return bytes(w)


def word_text(w: GroupWord) -> str:
    """Render like 1.2⁻.3 (dot separated, superscript minus for inverses)."""
    if not w:
        return "e"
    return ".".join(f"{abs(x)}⁻" if x < 0 else str(x) for x in w)


class Automorphism:
    """Map on F_d given by the images of the positive generators."""

    def __init__(self, d: int, images: dict[int, GroupWord]):
        self.d = d
        assert sorted(images) == list(range(1, d + 1))
        self.images = {k: reduce_word(v) for k, v in images.items()}

    def apply(self, w: GroupWord) -> tuple[GroupWord, bool]:
        """Image of w, plus a flag telling whether reduction cancelled anything."""
        parts: list[int] = []
        for x in w:
            img = self.images[abs(x)]
            parts.extend(img if x > 0 else invert(img))
        out = reduce_word(parts)
        return out, len(out) < len(parts)

    def __call__(self, w: GroupWord) -> GroupWord:
        return self.apply(w)[0]

    def iterate(self, w: GroupWord, n: int) -> GroupWord:
        for _ in range(n):
            w = self(w)
        return w

    def incidence_matrix(self) -> np.ndarray:
        """m[i,j] = occurrences of +-(i+1) in the image of j+1."""
        m = np.zeros((self.d, self.d), dtype=np.int64)
        for j in range(1, self.d + 1):
            for x in self.images[j]:
                m[abs(x) - 1, j - 1] += 1
        return m


@lru_cache(maxsize=None)
def family_auto(d: int) -> Automorphism:
    sub = family_substitution(d)
    return Automorphism(d, {k: from_positive(img) for k, img in sub.images.items()})


@lru_cache(maxsize=None)
def family_inverse(d: int) -> Automorphism:
    if d < 3:
        raise ValueError("family needs d >= 3")
    images: dict[int, GroupWord] = {1: (d,), 2: (-d, 1)}
    for k in range(3, d + 1):
        images[k] = (k - 1,)
    return Automorphism(d, images)


def inverse_growth_root(d: int) -> float:
    """Real root > 1 of x^d = x + 1, the Perron value of the inverse family."""
    x = 1.3
    for _ in range(80):
        f = x**d - x - 1.0
        fp = d * x ** (d - 1) - 1.0
        step = f / fp
        x -= step
        if abs(step) < 1e-16:
            break
    assert abs(x**d - x - 1.0) < 1e-12
    return x


def letter_length_vector(d: int) -> np.ndarray:
    """[1, eta^(d-1), eta^(d-2), .., eta]: a left eigenvector of the inverse matrix."""
    eta = inverse_growth_root(d)
    return np.array([1.0] + [eta ** (d - k + 1) for k in range(2, d + 1)])


def abelianize(d: int, w: GroupWord) -> np.ndarray:
    """Signed letter counts in Z^d."""
    v = np.zeros(d, dtype=np.int64)
    for x in w:
        if not 1 <= abs(x) <= d:
            raise ValueError(f"letter {x} outside +-1..{d}")
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


# ---------------------------------------------------------------------------
# tree letters and the projection p*

def p_star(d: int, tree_word) -> GroupWord:
    """Project a tree path word (signed colors 1..2d-2) into F_d.

    Colors k <= d map to the generator k, color d+k to sigma^k(1), and a
    barred color (negative sign) to the inverse of its image.
    """
    sub = family_substitution(d)
    imgs = {k: (k,) for k in range(1, d + 1)}
    w: Word = bytes([1])
    for k in range(1, d - 1):
        w = sub(w)
        imgs[d + k] = from_positive(w)
    parts: list[int] = []
    for x in tree_word:
        c = abs(x)
        if not 1 <= c <= 2 * d - 2:
            raise ValueError(f"color {c} outside 1..{2*d-2}")
        img = imgs[c]
        parts.extend(img if x > 0 else invert(img))
    return reduce_word(parts)


# ---------------------------------------------------------------------------
# cancellation probes


def cancellation_report(auto: Automorphism, seeds: list[GroupWord], depth: int) -> dict:
    """Iterate the automorphism on each reduced seed, recording cancellations.

    Step n applies the map to the reduced image of step n-1; the entry is
    True when that application shortened the concatenated images.
    """
    report: dict[GroupWord, list[bool]] = {}
    for seed in seeds:
        w = reduce_word(seed)
        flags: list[bool] = []
        for _ in range(depth):
            w, cancelled = auto.apply(w)
            flags.append(cancelled)
        report[seed] = flags
    return report


def tribonacci_inverse() -> Automorphism:
    """Inverse of the tribonacci substitution on 3 letters: 1->3, 2->3^-1 1, 3->3^-1 2."""
    return Automorphism(3, {1: (3,), 2: (-3, 1), 3: (-3, 2)})


def nielsen_probe() -> Automorphism:
    """3-letter automorphism 1->3^-1 1, 2->3, 3->1^-1 1^-1 2 with a persistent
    cancellation: the image of 1.3 contains (1.3)^-1 again."""
    return Automorphism(3, {1: (-3, 1), 2: (3,), 3: (-1, -1, 2)})
