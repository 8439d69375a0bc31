"""Freely reduced words over named generators.

A Word is an immutable sequence of (generator name, nonzero exponent)
syllables with adjacent equal names merged.  Words are the shared
currency between presentations, concrete models, graphs of groups and
coset enumeration.
"""


class Word:
    __slots__ = ("syllables",)

    def __init__(self, syllables=()):
        reduced = []
        for name, exp in syllables:
            if exp == 0:
                continue
            if reduced and reduced[-1][0] == name:
                merged = reduced[-1][1] + exp
                reduced.pop()
                if merged:
                    reduced.append((name, merged))
            else:
                reduced.append((name, exp))
        self.syllables = tuple(reduced)

    def __mul__(self, other):
        return Word(self.syllables + other.syllables)

    def __invert__(self):
        return Word(tuple((name, -exp) for name, exp in reversed(self.syllables)))

    def __pow__(self, k):
        if k < 0:
            return (~self) ** (-k)
        return Word(self.syllables * k)

    def __eq__(self, other):
        return isinstance(other, Word) and self.syllables == other.syllables

    def __hash__(self):
        return hash(self.syllables)

    def __len__(self):
        return sum(abs(exp) for _, exp in self.syllables)

    def __bool__(self):
        return bool(self.syllables)

    def __repr__(self):
        if not self.syllables:
            return "1"
        return " ".join(name if exp == 1 else f"{name}^{exp}"
                        for name, exp in self.syllables)

    def letters(self):
        """Yield (name, +1 or -1) per letter, exponents expanded."""
        for name, exp in self.syllables:
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield name, sign

    def names(self):
        return {name for name, _ in self.syllables}


IDENTITY = Word()


def gen(name, exp=1):
    """Single-syllable word."""
    return Word(((name, exp),))


def from_letters(letters):
    return Word(tuple((name, sign) for name, sign in letters))


def commutator(u, v):
    """[u, v] = u^-1 v^-1 u v."""
    return ~u * ~v * u * v
