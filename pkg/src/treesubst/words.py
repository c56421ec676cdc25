"""Word combinatorics of the substitution family 1 -> 12, k -> k+1, d -> 1.

Words over the alphabet {1, .., d} are stored as ``bytes`` whose entries are
the letters themselves (so b"\\x01\\x02" is the word 12).  The module knows
how to iterate the substitution, enumerate the language of the fixed point
with certified stabilization, classify special factors, and estimate
cylinder measures by sliding-window frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

Word = bytes


def word_from_ints(letters) -> Word:
    return bytes(letters)


def word_str(w: Word) -> str:
    """Digit string for reports, e.g. b"\\x01\\x02" -> "12"."""
    return "".join(str(c) for c in w)


def word_from_str(s: str) -> Word:
    return bytes(int(c) for c in s)


class Substitution:
    """A non-erasing substitution letter -> word on letters 1..d."""

    def __init__(self, images: dict[int, Word]):
        self.d = len(images)
        assert sorted(images) == list(range(1, self.d + 1)), "letters must be 1..d"
        for a, img in images.items():
            assert len(img) > 0, f"empty image for letter {a}"
            assert all(1 <= c <= self.d for c in img), f"image of {a} leaves alphabet"
        self.images = dict(images)

    def __call__(self, w: Word) -> Word:
        self._check_word(w)
        return b"".join(self.images[c] for c in w)

    def iterate(self, w: Word, n: int) -> Word:
        for _ in range(n):
            w = self(w)
        return w

    def _check_word(self, w: Word) -> None:
        for c in w:
            if not 1 <= c <= self.d:
                raise ValueError(f"letter {c} outside alphabet 1..{self.d}")

    def incidence_matrix(self) -> np.ndarray:
        """M[i,j] = number of occurrences of letter i+1 in the image of j+1."""
        m = np.zeros((self.d, self.d), dtype=np.int64)
        for j in range(1, self.d + 1):
            for c in self.images[j]:
                m[c - 1, j - 1] += 1
        return m


@lru_cache(maxsize=None)
def family_substitution(d: int) -> Substitution:
    """The d-letter member: 1 -> 12, k -> k+1 for 2 <= k <= d-1, d -> 1."""
    if d < 3:
        raise ValueError("family needs d >= 3")
    images = {1: bytes([1, 2]), d: bytes([1])}
    for k in range(2, d):
        images[k] = bytes([k + 1])
    return Substitution(images)


@lru_cache(maxsize=8)
def _fixed_point_cache(d: int, min_len: int) -> Word:
    sub = family_substitution(d)
    w = bytes([1])
    while len(w) < min_len:
        w = sub(w)
    return w


def fixed_point_prefix(d: int, length: int) -> Word:
    """Prefix of the fixed point lim sigma^n(1); 1 is a prefix of sigma(1)."""
    # round the cache key up so repeated close requests share one expansion
    min_len = 1
    while min_len < length:
        min_len *= 4
    return _fixed_point_cache(d, min_len)[:length]


def growth_root(d: int) -> float:
    """Real root > 1 of x^d = x^(d-1) + 1 (Newton, double precision)."""
    x = 1.5
    for _ in range(80):
        f = x**d - x ** (d - 1) - 1.0
        fp = d * x ** (d - 1) - (d - 1) * x ** (d - 2)
        step = f / fp
        x -= step
        if abs(step) < 1e-16:
            break
    assert abs(x**d - x ** (d - 1) - 1.0) < 1e-12
    return x


def perron(m: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Dominant eigen-data (value, left, right) of a primitive matrix.

    The right eigenvector is normalized to sum 1, the left one to first
    entry 1.  Raises ValueError when the matrix is not primitive.
    """
    m = np.asarray(m)
    n = m.shape[0]
    assert m.shape == (n, n), "square matrix required"
    if (m < 0).any():
        raise ValueError("nonnegative matrix required")
    # Wielandt's bound: primitive iff m^(n^2-2n+2) is positive
    power = np.identity(n, dtype=bool)
    booleans = m > 0
    for _ in range(n * n - 2 * n + 2):
        power = power @ booleans
    if not power.all():
        raise ValueError("matrix is not primitive")
    vals, vecs = np.linalg.eig(m.astype(float))
    k = int(np.argmax(vals.real))
    lam = vals[k].real
    right = vecs[:, k].real
    right = right / right.sum()
    lvals, lvecs = np.linalg.eig(m.T.astype(float))
    k2 = int(np.argmax(lvals.real))
    left = lvecs[:, k2].real
    left = left / left[0]
    assert np.allclose(m @ right, lam * right, atol=1e-9)
    assert np.allclose(left @ m, lam * left, atol=1e-9)
    return lam, left, right


# ---------------------------------------------------------------------------
# language enumeration


@lru_cache(maxsize=None)
def _stable_factors(d: int, n: int) -> frozenset[Word]:
    """All length-n factors of the fixed point, by double stabilization.

    Iterate sigma^N(1) until the window set of length n agrees for two
    consecutive N; factors of shorter length are prefixes of these.
    """
    sub = family_substitution(d)
    w = bytes([1])
    prev: set[Word] | None = None
    while True:
        w = sub(w)
        if len(w) < n:
            continue
        cur = {w[i : i + n] for i in range(len(w) - n + 1)}
        if cur == prev:
            return frozenset(cur)
        prev = cur


def factors(d: int, n: int) -> set[Word]:
    if n == 0:
        return {b""}
    return set(_stable_factors(d, n))


def complexity(d: int, n: int) -> int:
    return len(factors(d, n))


@dataclass
class LanguageTable:
    """Length-n slice of the language with its special factors."""

    d: int
    n: int
    factors: list[Word]
    left_special: list[Word]
    right_special: list[Word]
    bispecial: list[Word]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "factors": [word_str(w) for w in self.factors],
            "left_special": [word_str(w) for w in self.left_special],
            "right_special": [word_str(w) for w in self.right_special],
            "bispecial": [word_str(w) for w in self.bispecial],
        }


def language(d: int, n: int) -> LanguageTable:
    """Factors of length n classified by extendability inside the language."""
    if n < 1:
        raise ValueError("n >= 1 required")
    fac = sorted(factors(d, n))
    ext = factors(d, n + 1)
    left, right = [], []
    for u in fac:
        if sum(1 for a in range(1, d + 1) if bytes([a]) + u in ext) >= 2:
            left.append(u)
        if sum(1 for b in range(1, d + 1) if u + bytes([b]) in ext) >= 2:
            right.append(u)
    bis = [u for u in left if u in set(right)]
    return LanguageTable(d, n, fac, left, right, bis)


def bispecials_by_generation(d: int, max_len: int) -> list[Word]:
    """Bispecial factors up to max_len, grown by the substitution step.

    Each bispecial v yields the next one as sigma(v), extended by the
    letter 1 exactly when v ends with d-1.  Seeded with the word 1.
    """
    sub = family_substitution(d)
    out: list[Word] = []
    u = bytes([1])
    while len(u) <= max_len:
        out.append(u)
        nxt = sub(u)
        if u[-1] == d - 1:
            nxt += bytes([1])
        if len(nxt) == len(u):  # safety: would loop forever
            raise RuntimeError("bispecial generation stalled")
        u = nxt
    return out


# ---------------------------------------------------------------------------
# cylinder measures

DEFAULT_PREFIX_LEN = 10**6


def cylinder_measure(d: int, u: Word, prefix_len: int = DEFAULT_PREFIX_LEN) -> float:
    """Sliding-window frequency of u among the first prefix_len positions."""
    if len(u) == 0:
        return 1.0
    text = fixed_point_prefix(d, prefix_len + len(u))
    count = 0
    start = text.find(u)
    while 0 <= start < prefix_len:
        count += 1
        start = text.find(u, start + 1)
    return count / prefix_len


@lru_cache(maxsize=None)
def _window_counts(d: int, m: int, prefix_len: int) -> tuple[tuple[Word, int], ...]:
    text = fixed_point_prefix(d, prefix_len + m)
    counts: dict[Word, int] = {}
    for i in range(prefix_len):
        key = text[i : i + m]
        counts[key] = counts.get(key, 0) + 1
    return tuple(sorted(counts.items()))


@dataclass
class MeasureSpectrum:
    d: int
    m: int
    values: list[float]          # distinct snapped measures, descending
    class_count: int
    snapped_exponents: dict[Word, int]   # cylinder word -> j with measure ~ lambda^-j
    max_residual: float          # worst |estimate - lambda^-j|

    def ok(self, tol: float) -> bool:
        return self.max_residual < tol


def measure_spectrum(d: int, m: int, prefix_len: int = DEFAULT_PREFIX_LEN,
                     max_exponent: int = 40) -> MeasureSpectrum:
    """Estimated measures of all length-m cylinders, snapped to powers of lambda.

    Snapping picks the nearest lambda^-j with j <= max_exponent; the worst
    residual is reported so callers can reject a failed snap.
    """
    lam = growth_root(d)
    powers = [lam**-j for j in range(max_exponent + 1)]
    snapped: dict[Word, int] = {}
    worst = 0.0
    for u, count in _window_counts(d, m, prefix_len):
        est = count / prefix_len
        j = min(range(max_exponent + 1), key=lambda k: abs(powers[k] - est))
        snapped[u] = j
        worst = max(worst, abs(powers[j] - est))
    values = sorted({powers[j] for j in snapped.values()}, reverse=True)
    return MeasureSpectrum(d, m, values, len(values), snapped, worst)


def expected_class_count(d: int, m: int) -> int:
    """d for m = 1, 2d-2 when a bispecial factor of length m-1 exists, else 2d-1."""
    if m == 1:
        return d
    lens = {len(b) for b in bispecials_by_generation(d, m - 1)}
    return 2 * d - 2 if (m - 1) in lens else 2 * d - 1


def measure_recursion_gap(d: int, max_len: int = 4,
                          prefix_len: int = DEFAULT_PREFIX_LEN) -> float:
    """Worst |mu(C_u) - lambda * mu(C_sigma(u))| over short cylinders.

    Only factors whose last letter is not d qualify: sigma maps exactly the
    occurrences of u onto the occurrences of sigma(u) in that case.
    """
    sub = family_substitution(d)
    lam = growth_root(d)
    worst = 0.0
    for m in range(1, max_len + 1):
        counts = dict(_window_counts(d, m, prefix_len))
        for u in sorted(counts):
            if u[-1] == d:
                continue
            v = sub(u)
            image_counts = dict(_window_counts(d, len(v), prefix_len))
            a = counts[u] / prefix_len
            b = image_counts.get(v, 0) / prefix_len
            worst = max(worst, abs(a - lam * b))
    return worst
