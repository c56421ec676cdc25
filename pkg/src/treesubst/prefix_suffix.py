"""Prefix-suffix automaton of the substitution and orbit developments.

States are the letters 1..d.  There is a transition a -> b labelled
(p, a, s) whenever sigma(b) = p.a.s, so walking the automaton spells out
how a letter sits inside iterated images.  A development is a finite
admissible label sequence; the reconstruction identity turns it back
into sigma^k(a_k).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .words import Substitution, Word, family_substitution, fixed_point_prefix, word_str

EMPTY: Word = b""


@dataclass(frozen=True)
class Transition:
    src: int
    dst: int
    prefix: Word
    letter: int
    suffix: Word

    def label(self) -> tuple[Word, int, Word]:
        return (self.prefix, self.letter, self.suffix)

    def label_str(self) -> str:
        p = word_str(self.prefix) or "e"
        s = word_str(self.suffix) or "e"
        return f"({p},{self.letter},{s})"


class PrefixSuffixAutomaton:
    def __init__(self, sub: Substitution):
        self.sub = sub
        self.d = sub.d
        self.transitions: list[Transition] = []
        for b in range(1, self.d + 1):
            img = sub.images[b]
            for i, a in enumerate(img):
                self.transitions.append(Transition(a, b, img[:i], a, img[i + 1 :]))
        self.transitions.sort(key=lambda t: (t.src, t.dst, t.prefix, t.suffix))

    def out_edges(self, state: int) -> list[Transition]:
        return [t for t in self.transitions if t.src == state]

    def dst_of_label(self, label: tuple[Word, int, Word]) -> int:
        """Recover the target state: the letter whose image is p.a.s."""
        p, a, s = label
        word = p + bytes([a]) + s
        for b in range(1, self.d + 1):
            if self.sub.images[b] == word:
                return b
        raise ValueError(f"label {label} matches no image")

    def to_dot(self) -> str:
        lines = ["digraph prefix_suffix {", "  rankdir=LR;"]
        for a in range(1, self.d + 1):
            lines.append(f'  s{a} [label="{a}", shape=circle];')
        for t in self.transitions:
            lines.append(f'  s{t.src} -> s{t.dst} [label="{t.label_str()}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def build_automaton(d: int) -> PrefixSuffixAutomaton:
    return PrefixSuffixAutomaton(family_substitution(d))


Development = tuple[tuple[Word, int, Word], ...]


def is_admissible(d: int, dev: Development) -> bool:
    """Labels chain when each target state equals the next middle letter."""
    auto = build_automaton(d)
    known = {t.label() for t in auto.transitions}
    if not all(lab in known for lab in dev):
        return False
    for cur, nxt in zip(dev, dev[1:]):
        if auto.dst_of_label(cur) != nxt[1]:
            return False
    return True


def reconstruct(d: int, dev: Development) -> Word:
    """Assemble sigma^(k-1)(p_(k-1))...p_0 . a_0 . s_0 ... sigma^(k-1)(s_(k-1)).

    For k labels the result equals sigma^k(a_k) where a_k is the final
    state of the walk; that identity is asserted before returning.
    """
    if not dev:
        raise ValueError("empty development")
    if not is_admissible(d, dev):
        raise ValueError("development is not an admissible path")
    sub = family_substitution(d)
    auto = build_automaton(d)
    k = len(dev)
    left = EMPTY
    right = EMPTY
    for i in range(k - 1, 0, -1):
        left += sub.iterate(dev[i][0], i)
    left += dev[0][0]
    middle = bytes([dev[0][1]])
    right += dev[0][2]
    for i in range(1, k):
        right += sub.iterate(dev[i][2], i)
    word = left + middle + right
    final_state = auto.dst_of_label(dev[-1])
    assert word == sub.iterate(bytes([final_state]), k), "reconstruction identity broke"
    return word


def all_paths(d: int, k: int) -> list[Development]:
    """Every admissible development of exactly k labels."""
    auto = build_automaton(d)
    out: list[Development] = []

    def walk(state: int, acc: list[tuple[Word, int, Word]]):
        if len(acc) == k:
            out.append(tuple(acc))
            return
        for t in auto.out_edges(state):
            acc.append(t.label())
            walk(t.dst, acc)
            acc.pop()

    for a in range(1, d + 1):
        walk(a, [])
    return out


# ---------------------------------------------------------------------------
# automatic writing of fixed-point prefixes


@lru_cache(maxsize=None)
def _power_images(d: int, max_exp: int) -> list[Word]:
    """sigma^k(1) for 0 <= k <= max_exp."""
    sub = family_substitution(d)
    imgs = [bytes([1])]
    for _ in range(max_exp):
        imgs.append(sub(imgs[-1]))
    return imgs


def automatic_writing(d: int, u: Word) -> list[int]:
    """Exponents (ascending) of the unique writing u = sigma^(a_p)(1)...sigma^(a_0)(1).

    Consecutive exponents differ by at least d.  Peel from the left: the
    top factor is the largest sigma^a(1) no longer than what remains, and
    the remainder is again a fixed-point prefix.  The length recursion
    |sigma^(a+1)(1)| - |sigma^a(1)| = |sigma^(a-d+1)(1)| makes the gap
    condition automatic, so a mismatch means u is not a prefix.
    """
    if any(not 1 <= c <= d for c in u):
        raise ValueError("letters outside 1..d")
    exps: list[int] = []
    rest = u
    while rest:
        imgs = _power_images(d, 1)
        while len(imgs[-1]) <= len(rest):
            imgs = _power_images(d, len(imgs) + 1)
        a = len(imgs) - 2 if len(imgs[-1]) > len(rest) else len(imgs) - 1
        while len(imgs[a]) > len(rest):
            a -= 1
        if not rest.startswith(imgs[a]):
            raise ValueError(f"{word_str(u)} is not a prefix of the fixed point")
        if exps and not exps[-1] - a >= d:
            raise ValueError(f"{word_str(u)} breaks the exponent-gap rule")
        exps.append(a)
        rest = rest[len(imgs[a]):]
    exps.reverse()
    return exps


def writing_word(d: int, exps: list[int]) -> Word:
    """Concatenation sigma^(a_p)(1)...sigma^(a_0)(1) for ascending exponents."""
    imgs = _power_images(d, max(exps, default=0))
    out = EMPTY
    for a in reversed(exps):
        out += imgs[a]
    return out


def shift_development(d: int, k: int, depth: int) -> Development:
    """First `depth` labels of the development of the k-shifted fixed point.

    The prefix entry p_i is the letter 1 exactly at the exponents of the
    automatic writing of the length-k prefix and empty elsewhere; the
    states are then forced, ending in the loop (e,1,2) at state 1.
    """
    sub = family_substitution(d)
    u = fixed_point_prefix(d, k)
    exps = set(automatic_writing(d, u))
    if exps and max(exps) >= depth:
        raise ValueError("depth too small for the requested shift")
    # fill states top-down: above the largest exponent the path loops at 1
    states = [0] * (depth + 1)
    states[depth] = 1
    labels: list[tuple[Word, int, Word]] = [None] * depth  # type: ignore
    for i in range(depth - 1, -1, -1):
        img = sub.images[states[i + 1]]
        if i in exps:
            assert img[:1] == b"\x01", "prefix letter 1 forces target sigma-image 1..."
            states[i] = img[1]
            labels[i] = (b"\x01", img[1], img[2:])
        else:
            states[i] = img[0]
            labels[i] = (EMPTY, img[0], img[1:])
    dev = tuple(labels)
    assert is_admissible(d, dev)
    return dev


def development_tail_word(d: int, dev: Development, length: int) -> Word:
    """a_0 s_0 sigma(s_1) sigma^2(s_2)... truncated to `length` letters."""
    sub = family_substitution(d)
    out = bytes([dev[0][1]])
    for i, (_, _, s) in enumerate(dev):
        if len(out) >= length:
            break
        out += sub.iterate(s, i)
    return out[:length]
