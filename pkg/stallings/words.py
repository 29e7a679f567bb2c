"""
Words over {a, a^-1, b, b^-1}

Parsing, free reduction and the shortlex normal form of the modular group
PSL2(Z) = <a, b | a^2 = b^3 = 1>. Normal forms alternate a with b or b^-1
and never contain a^-1.

Author: PSL2 Subgroups Team
License: MIT
"""

import re
from enum import Enum
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from psl2.exceptions import InvalidWordError


class Letter(str, Enum):
    """One of the four letters; text form is a, A (= a^-1), b, B (= b^-1)"""
    A = "a"
    A_INV = "A"
    B = "b"
    B_INV = "B"

    @property
    def inverse(self) -> "Letter":
        return _INVERSES[self]

    @property
    def generator(self) -> str:
        return self.value.lower()


_INVERSES = {
    Letter.A: Letter.A_INV,
    Letter.A_INV: Letter.A,
    Letter.B: Letter.B_INV,
    Letter.B_INV: Letter.B,
}

# generator -> (order, exponent of each letter)
_ORDERS = {"a": 2, "b": 3}
_EXPONENTS = {Letter.A: 1, Letter.A_INV: 1, Letter.B: 1, Letter.B_INV: 2}

_TOKEN = re.compile(r"\s*(?:([abAB])(?:\s*(?:\^\s*-\s*1|⁻¹))?)")


@dataclass(frozen=True)
class Word:
    """Immutable finite word"""
    letters: Tuple[Letter, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Word":
        """
        Parse the compact text syntax

        Accepts a, A, b, B concatenated, with a^-1 / b^-1 / a⁻¹ / b⁻¹ as
        alternatives for the inverses, whitespace anywhere, and "" or "ε"
        for the empty word.
        """
        stripped = text.strip()
        if stripped in ("", "ε", "1"):
            return EMPTY

        letters: List[Letter] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            match = _TOKEN.match(text, pos)
            if not match or match.end() == pos:
                raise InvalidWordError(f"Unexpected character {text[pos]!r} at position {pos} in {text!r}")
            letter = Letter(match.group(1))
            if match.group(0).strip() != match.group(1):
                letter = letter.inverse
            letters.append(letter)
            pos = match.end()
        return cls(tuple(letters))

    def __str__(self) -> str:
        return "".join(letter.value for letter in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, exponent: int) -> "Word":
        if exponent < 0:
            return self.invert() ** (-exponent)
        return Word(self.letters * exponent)

    def invert(self) -> "Word":
        return Word(tuple(letter.inverse for letter in reversed(self.letters)))

    @property
    def is_shortlex(self) -> bool:
        """True when the word is already in normal form"""
        previous = None
        for letter in self.letters:
            if letter is Letter.A_INV:
                return False
            if previous is not None and previous.generator == letter.generator:
                return False
            previous = letter
        return True


EMPTY = Word()


def as_word(value) -> Word:
    """Coerce text or a Word into a Word"""
    if isinstance(value, Word):
        return value
    return Word.parse(value)


def free_reduce(w) -> Word:
    """Delete factors x x^-1 until none is left (free group F(a, b))"""
    stack: List[Letter] = []
    for letter in as_word(w):
        if stack and stack[-1] is letter.inverse:
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack))


def _syllables(w: Word) -> List[Tuple[str, int]]:
    # maximal powers of a single generator, exponents taken mod its order
    stack: List[Tuple[str, int]] = []
    for letter in w:
        gen = letter.generator
        exponent = _EXPONENTS[letter]
        if stack and stack[-1][0] == gen:
            combined = (stack[-1][1] + exponent) % _ORDERS[gen]
            if combined:
                stack[-1] = (gen, combined)
            else:
                stack.pop()
        else:
            stack.append((gen, exponent))
    return stack


def normalize_shortlex(w) -> Word:
    """Shortlex geodesic representative of the image of w in PSL2(Z)"""
    letters = []
    for gen, exponent in _syllables(as_word(w)):
        if gen == "a":
            letters.append(Letter.A)
        else:
            letters.append(Letter.B if exponent == 1 else Letter.B_INV)
    return Word(tuple(letters))


def is_equal_in_group(u, v) -> bool:
    return normalize_shortlex(u) == normalize_shortlex(v)


def parse_generators(text: str) -> List[Word]:
    """Comma separated list of words, as given to --generators"""
    if not text.strip():
        return []
    return [Word.parse(part) for part in text.split(",")]


def words_to_text(words: Iterable[Word]) -> List[str]:
    return [str(w) for w in words]
