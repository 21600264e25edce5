"""Multivariate polynomials with exact rational coefficients.

A polynomial is stored as a sorted tuple of (monomial, coefficient) pairs
with all zero coefficients dropped, so structural equality coincides with
polynomial identity.  A monomial is a sorted tuple of (atom, power) pairs
over string atoms.  Monomials are ordered graded-lexicographically: first
by total degree, then by the expanded atom sequence.

These polynomials do double duty: they are the canonical forms of the
commutative-semiring theory, the symbolic values of rational outputs, and
the index expressions of indexed constants (an index such as a sum or
product of index parameters is just a polynomial over those parameters).
"""

from __future__ import annotations

from fractions import Fraction

Monomial = tuple[tuple[str, int], ...]

_UNIT: Monomial = ()


def _mono_key(mono: Monomial):
    expanded = tuple(atom for atom, power in mono for _ in range(power))
    return (len(expanded), expanded)


def _mono_mul(left: Monomial, right: Monomial) -> Monomial:
    powers: dict[str, int] = {}
    for atom, power in left:
        powers[atom] = powers.get(atom, 0) + power
    for atom, power in right:
        powers[atom] = powers.get(atom, 0) + power
    return tuple(sorted(powers.items()))


def _coerce(value) -> "Poly":
    if isinstance(value, Poly):
        return value
    if isinstance(value, (int, Fraction)):
        return Poly.const(value)
    raise TypeError(f"cannot treat {value!r} as a polynomial")


class Poly:
    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc: dict[Monomial, Fraction] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for mono, coeff in items:
            coeff = Fraction(coeff)
            if coeff:
                mono = tuple(sorted((a, p) for a, p in mono if p))
                total = acc.get(mono, Fraction(0)) + coeff
                if total:
                    acc[mono] = total
                elif mono in acc:
                    del acc[mono]
        self._terms = tuple(sorted(acc.items(), key=lambda kv: _mono_key(kv[0])))

    @staticmethod
    def const(value) -> "Poly":
        return Poly(((_UNIT, Fraction(value)),))

    @staticmethod
    def atom(name: str) -> "Poly":
        return Poly(((((name, 1),), Fraction(1)),))

    @property
    def terms(self) -> tuple[tuple[Monomial, Fraction], ...]:
        return self._terms

    def atoms(self) -> frozenset[str]:
        return frozenset(a for mono, _ in self._terms for a, _ in mono)

    @property
    def is_constant(self) -> bool:
        return all(mono == _UNIT for mono, _ in self._terms)

    def constant_value(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if self.is_constant:
            return self._terms[0][1]
        raise ValueError(f"{self} is not a constant polynomial")

    def __add__(self, other) -> "Poly":
        other = _coerce(other)
        return Poly(list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __mul__(self, other) -> "Poly":
        other = _coerce(other)
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms:
            for m2, c2 in other._terms:
                mono = _mono_mul(m1, m2)
                acc[mono] = acc.get(mono, Fraction(0)) + c1 * c2
        return Poly(acc)

    __rmul__ = __mul__

    def substitute(self, mapping) -> "Poly":
        """Replace atoms by polynomials; atoms absent from the mapping stay."""
        result = Poly()
        for mono, coeff in self._terms:
            part = Poly.const(coeff)
            for atom, power in mono:
                base = _coerce(mapping[atom]) if atom in mapping else Poly.atom(atom)
                for _ in range(power):
                    part = part * base
            result = result + part
        return result

    def evaluate(self, env) -> Fraction:
        total = Fraction(0)
        for mono, coeff in self._terms:
            value = coeff
            for atom, power in mono:
                value *= Fraction(env[atom]) ** power
            total += value
        return total

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, coeff in self._terms:
            factors = [a for a, p in mono for _ in range(p)]
            if not factors:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(coeff)] + factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self})"
