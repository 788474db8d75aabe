"""Toric and quasitoric braid words and their closures.

Letters are ``σ_i^ε`` with 1 ≤ i < strands and ε = ±1.  A positive letter
moves the strand at position i to position i + 1 over its neighbour, and
closes up to a crossing of handedness ε.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

from billiard_knots.errors import BraidError, PaddingError

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"^s(\d+)(?:\^([+-]?1))?$")


@dataclass(frozen=True)
class BraidLetter:
    index: int
    sign: int

    def inverse(self) -> "BraidLetter":
        return BraidLetter(self.index, -self.sign)

    def __str__(self) -> str:
        return f"s{self.index}" if self.sign > 0 else f"s{self.index}^-1"


@dataclass(frozen=True)
class BraidWord:
    """Word in the braid group on ``strands`` strands."""

    strands: int
    letters: tuple[BraidLetter, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.strands < 2:
            raise BraidError("A braid needs at least 2 strands.")
        letters = tuple(
            letter if isinstance(letter, BraidLetter) else BraidLetter(*letter)
            for letter in self.letters
        )
        for letter in letters:
            if not 1 <= letter.index < self.strands:
                raise BraidError(
                    f"Generator index {letter.index} out of range for {self.strands} strands."
                )
            if letter.sign not in (1, -1):
                raise BraidError(f"Generator sign must be +1 or -1, got {letter.sign}.")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(letter.sign for letter in self.letters)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(letter.index for letter in self.letters)

    def concat(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise BraidError("Cannot concatenate braids with different strand counts.")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(letter.inverse() for letter in reversed(self.letters)))


@dataclass(frozen=True)
class QuasitoricSpec:
    """τ_{p,n} with per-letter signs; gcd(p, n) is the number of components."""

    p: int
    n: int
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.p < 2:
            raise BraidError("Quasitoric braids need p >= 2 strands.")
        if self.n < 1:
            raise BraidError("Quasitoric braids need n >= 1 periods.")
        signs = tuple(int(sign) for sign in self.signs)
        if any(sign not in (1, -1) for sign in signs):
            raise BraidError("Signs must all be +1 or -1.")
        expected = self.n * (self.p - 1)
        if len(signs) != expected:
            raise BraidError(
                f"Signs length must be n(p-1) = {expected} for p={self.p}, n={self.n}; got {len(signs)}."
            )
        object.__setattr__(self, "signs", signs)

    @property
    def mu(self) -> int:
        return math.gcd(self.p, self.n)

    @classmethod
    def all_positive(cls, p: int, n: int) -> "QuasitoricSpec":
        return cls(p, n, (1,) * (n * (p - 1)))

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "n": self.n, "signs": list(self.signs)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "QuasitoricSpec":
        try:
            return cls(p=int(data["p"]), n=int(data["n"]), signs=tuple(data["signs"]))
        except (KeyError, TypeError) as exc:
            raise BraidError(f"Quasitoric spec needs integer p, n and a signs list: {exc}") from exc


@dataclass(frozen=True)
class OrientedCrossing:
    """Crossing of an oriented diagram, given by its four edge labels."""

    over_in: int
    over_out: int
    under_in: int
    under_out: int
    sign: int


@dataclass(frozen=True)
class ClosureDiagram:
    """Abstract oriented diagram: crossings plus crossing-free circles."""

    crossings: tuple[OrientedCrossing, ...]
    free_loops: int = 0


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _cycles(permutation: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(permutation)
    cycles = []
    for start in range(len(permutation)):
        if seen[start]:
            continue
        cycle = []
        position = start
        while not seen[position]:
            seen[position] = True
            cycle.append(position)
            position = permutation[position]
        cycles.append(cycle)
    return cycles


def _is_realisable(p: int, n: int, n_min: int) -> bool:
    """(p, n) yields μ copies of an (n/μ, p/μ) polygon with n/μ odd and ≥ 2p/μ + 1."""
    mu = math.gcd(p, n)
    sides, winding = n // mu, p // mu
    return n >= n_min and sides % 2 == 1 and sides >= 2 * winding + 1


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def toric(p: int, n: int) -> BraidWord:
    """τ_{p,n} = (σ₁ σ₂ ⋯ σ_{p−1})ⁿ."""
    if p < 2 or n < 1:
        raise BraidError(f"Toric braids need p >= 2 and n >= 1, got p={p}, n={n}.")
    return BraidWord(p, tuple(BraidLetter(i, 1) for _ in range(n) for i in range(1, p)))


def quasitoric(spec: QuasitoricSpec) -> BraidWord:
    """τ_{p,n} with its letter signs replaced by ``spec.signs``."""
    template = toric(spec.p, spec.n)
    return BraidWord(
        spec.p,
        tuple(BraidLetter(letter.index, sign) for letter, sign in zip(template.letters, spec.signs)),
    )


def permutation(word: BraidWord) -> tuple[int, ...]:
    """Position (0-based) where the strand starting at each position ends."""
    at = list(range(word.strands))
    for letter in word.letters:
        i = letter.index - 1
        at[i], at[i + 1] = at[i + 1], at[i]
    ends = [0] * word.strands
    for position, strand in enumerate(at):
        ends[strand] = position
    return tuple(ends)


def closure_components(word: BraidWord) -> int:
    """Number of components of the closed braid."""
    return len(_cycles(permutation(word)))


def exponent_sum(word: BraidWord) -> int:
    return sum(word.signs)


def parse_word(text: str, strands: int | None = None) -> BraidWord:
    """Parse the ``s1 s2^-1 s1`` text form."""
    letters = []
    for token in text.replace(",", " ").split():
        match = _TOKEN.match(token)
        if match is None:
            raise BraidError(f"Cannot parse braid token {token!r}; expected s<i> or s<i>^-1.")
        letters.append(BraidLetter(int(match.group(1)), -1 if match.group(2) == "-1" else 1))
    if strands is None:
        strands = max((letter.index for letter in letters), default=1) + 1
    return BraidWord(strands, tuple(letters))


def format_word(word: BraidWord) -> str:
    return " ".join(str(letter) for letter in word.letters)


def pad(spec: QuasitoricSpec, n_min: int | None = None) -> QuasitoricSpec:
    """Lengthen *spec* until its closure can be drawn as billiard polygons.

    Only two-strand words are padded (by appending σ₁σ₁⁻¹, which keeps the
    exponent sum and so the closure); wider specs must already qualify.
    """
    n_min = 2 * spec.p + 1 if n_min is None else n_min
    if _is_realisable(spec.p, spec.n, n_min):
        return spec
    if spec.p != 2:
        raise PaddingError(
            f"Cannot certify padding for p={spec.p}; supply n odd, coprime to p and >= {max(n_min, 2 * spec.p + 1)}."
        )
    n = spec.n
    signs = list(spec.signs)
    while not _is_realisable(2, n, n_min):
        signs.extend((1, -1))
        n += 2
    logger.info("Padded p=2 spec from n=%d to n=%d (exponent sum %d).", spec.n, n, sum(signs))
    return QuasitoricSpec(2, n, tuple(signs))


def closure_crossings(word: BraidWord) -> ClosureDiagram:
    """Oriented crossings of the standard closure of *word*.

    Edge labels run along each strand; the bottom of every position is
    glued back to its top.
    """
    next_label = 0

    def fresh() -> int:
        nonlocal next_label
        next_label += 1
        return next_label

    tops = [fresh() for _ in range(word.strands)]
    current = list(tops)
    touched = [False] * word.strands
    raw: list[tuple[int, int, int, int, int]] = []
    for letter in word.letters:
        left, right = letter.index - 1, letter.index
        rising, falling = fresh(), fresh()
        if letter.sign > 0:
            raw.append((current[left], rising, current[right], falling, 1))
        else:
            raw.append((current[right], falling, current[left], rising, -1))
        current[left], current[right] = falling, rising
        touched[left] = touched[right] = True

    glue = {bottom: top for bottom, top in zip(current, tops) if bottom != top}

    def relabel(label: int) -> int:
        return glue.get(label, label)

    crossings = tuple(
        OrientedCrossing(relabel(a), relabel(b), relabel(c), relabel(d), sign)
        for a, b, c, d, sign in raw
    )
    free = sum(
        1 for cycle in _cycles(permutation(word)) if not any(touched[position] for position in cycle)
    )
    return ClosureDiagram(crossings=crossings, free_loops=free)
