"""
Exact arithmetic in the torus character variables

Polynomials are sparse maps from monomials to Fraction coefficients over
the variables t0 and t[r][s] (r a residue mod n, s a block index).  Zero
coefficients are never stored, so equality is structural.  Rational
functions keep their denominators factored into linear characters whenever
they were built that way, which is all the localization sums need.
"""

import re
import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import (TYPE_CHECKING, Any, Callable, Dict, Iterable, Iterator, List,
                    Mapping, Optional, Tuple, Union)

from core.errors import NotDivisibleError, ZeroDenominatorError

if TYPE_CHECKING:
    from core.model import Instance

Scalar = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class VarId:
    """
    A torus variable; block 0 is t0, block s >= 1 is t[residue][s]

    Field order gives the canonical variable order: t0 first, then
    t[r][s] sorted by (s, r).
    """
    block: int
    residue: int

    @classmethod
    def rot(cls, residue: int, block: int, n: int) -> "VarId":
        if block < 1:
            raise ValueError(f"block index must be >= 1, got {block}")
        return cls(block, residue % n)

    @property
    def is_t0(self) -> bool:
        return self.block == 0

    def shifted(self, steps: int, n: int) -> "VarId":
        if self.is_t0:
            return self
        return VarId(self.block, (self.residue + steps) % n)

    def __str__(self) -> str:
        if self.is_t0:
            return "t0"
        return f"t[{self.residue}][{self.block}]"

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "VarId":
        """
        Parse "t0" or "t[r][s]" with s >= 1, reducing r mod n when n is given

        Raises:
            ValueError: for anything else, including t[r][0]
        """
        text = text.strip()
        if text == "t0":
            return T0
        match = _VAR_RE.fullmatch(text)
        if not match:
            raise ValueError(f"not a variable: {text!r}")
        residue, block = int(match.group(1)), int(match.group(2))
        if n is not None:
            return cls.rot(residue, block, n)
        if block < 1:
            raise ValueError(f"block index must be >= 1, got {text!r}")
        return cls(block, residue)


T0 = VarId(0, 0)
_VAR_RE = re.compile(r"t\[(\d+)\]\[(\d+)\]")

Monomial = Tuple[Tuple[VarId, int], ...]
_ONE_MONOMIAL: Monomial = ()
_SENTINEL = (sys.maxsize, sys.maxsize, 0)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: Dict[VarId, int] = dict(a)
    for var, e in b:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(exps.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_exp(m: Monomial, var: VarId) -> int:
    for v, e in m:
        if v == var:
            return e
    return 0


def _mono_drop(m: Monomial, var: VarId) -> Monomial:
    """Divide the monomial by one power of var (caller checks divisibility)"""
    out = []
    for v, e in m:
        if v == var:
            if e > 1:
                out.append((v, e - 1))
        else:
            out.append((v, e))
    return tuple(out)


def _mono_div(m: Monomial, d: Monomial) -> Monomial:
    exps = dict(m)
    for v, e in d:
        exps[v] -= e
    return tuple(sorted((v, e) for v, e in exps.items() if e))


def _grlex_key(m: Monomial) -> Tuple:
    """Ascending sort on this key lists monomials from largest to smallest"""
    lex = tuple((v.block, v.residue, -e) for v, e in m) + (_SENTINEL,)
    return (-_mono_degree(m), lex)


class Character:
    """An additive torus weight: integer combination of variables"""

    __slots__ = ("_items",)

    def __init__(self, coeffs: Optional[Mapping[VarId, int]] = None):
        coeffs = coeffs or {}
        self._items: Tuple[Tuple[VarId, int], ...] = tuple(
            sorted((v, int(c)) for v, c in coeffs.items() if c)
        )

    @classmethod
    def var(cls, var: VarId, coeff: int = 1) -> "Character":
        return cls({var: coeff})

    def items(self) -> Tuple[Tuple[VarId, int], ...]:
        return self._items

    def coefficient(self, var: VarId) -> int:
        for v, c in self._items:
            if v == var:
                return c
        return 0

    @property
    def is_zero(self) -> bool:
        return not self._items

    def __add__(self, other: "Character") -> "Character":
        coeffs: Dict[VarId, int] = dict(self._items)
        for v, c in other._items:
            coeffs[v] = coeffs.get(v, 0) + c
        return Character(coeffs)

    def __neg__(self) -> "Character":
        return Character({v: -c for v, c in self._items})

    def __sub__(self, other: "Character") -> "Character":
        return self + (-other)

    def __rmul__(self, k: int) -> "Character":
        return Character({v: k * c for v, c in self._items})

    __mul__ = __rmul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Character) and self._items == other._items

    def __hash__(self) -> int:
        return hash(("Character", self._items))

    def __repr__(self) -> str:
        return f"Character({self})"

    def __str__(self) -> str:
        return str(self.to_polynomial())

    def to_polynomial(self) -> "Polynomial":
        return Polynomial({((v, 1),): Fraction(c) for v, c in self._items})

    def primitive(self) -> Tuple[int, "Character"]:
        """
        Split into scale * primitive character

        The primitive part has coprime coefficients and a positive
        coefficient on its first variable, so w and -2w share it.
        """
        if self.is_zero:
            raise ValueError("zero character has no primitive part")
        g = reduce(gcd, (abs(c) for _, c in self._items))
        if self._items[0][1] < 0:
            g = -g
        return g, Character({v: c // g for v, c in self._items})

    def ratio_to(self, other: "Character") -> Optional[Fraction]:
        """Return r with self = r * other, or None if not proportional"""
        if other.is_zero or self.is_zero:
            return None
        mine = dict(self._items)
        theirs = dict(other._items)
        if mine.keys() != theirs.keys():
            return None
        v0 = self._items[0][0]
        r = Fraction(mine[v0], theirs[v0])
        if all(Fraction(mine[v], theirs[v]) == r for v in mine):
            return r
        return None

    def to_json(self) -> List[Dict[str, Any]]:
        return self.to_polynomial().to_json()

    @classmethod
    def from_json(cls, data: List[Dict[str, Any]], n: Optional[int] = None) -> "Character":
        poly = Polynomial.from_json(data, n)
        coeffs: Dict[VarId, int] = {}
        for mono, coeff in poly.items():
            if len(mono) != 1 or mono[0][1] != 1 or coeff.denominator != 1:
                raise ValueError("character must be an integral linear form")
            coeffs[mono[0][0]] = int(coeff)
        return cls(coeffs)


class Polynomial:
    """Immutable sparse polynomial with rational coefficients"""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self._terms: Dict[Monomial, Fraction] = {
            m: Fraction(c) for m, c in (terms or {}).items() if c != 0
        }
        self._hash: Optional[int] = None

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def constant(cls, value: Scalar) -> "Polynomial":
        return cls({_ONE_MONOMIAL: value})

    @classmethod
    def variable(cls, var: VarId) -> "Polynomial":
        return cls({((var, 1),): 1})

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def terms(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms in canonical graded-lex order, largest first"""
        return sorted(self._terms.items(), key=lambda t: _grlex_key(t[0]))

    def variables(self) -> List[VarId]:
        return sorted({v for m in self._terms for v, _ in m})

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return all(m == _ONE_MONOMIAL for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return self._terms.get(_ONE_MONOMIAL, Fraction(0))

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1"""
        if not self._terms:
            return -1
        return max(_mono_degree(m) for m in self._terms)

    def is_homogeneous(self) -> bool:
        return len({_mono_degree(m) for m in self._terms}) <= 1

    def __add__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return Polynomial.constant(other) - self

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            k = Fraction(other)
            return Polynomial({m: k * c for m, c in self._terms.items()})
        if not self._terms or not other._terms:
            return Polynomial()
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, Fraction(0)) + ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        result = Polynomial.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def map_variables(self, fn: Callable[[VarId], VarId]) -> "Polynomial":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            exps: Dict[VarId, int] = {}
            for v, e in m:
                w = fn(v)
                exps[w] = exps.get(w, 0) + e
            key = tuple(sorted(exps.items()))
            out[key] = out.get(key, Fraction(0)) + c
        return Polynomial(out)

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term"""
        if not self._terms:
            return _ONE_MONOMIAL
        monos = list(self._terms)
        common = dict(monos[0])
        for m in monos[1:]:
            exps = dict(m)
            common = {v: min(e, exps[v]) for v, e in common.items() if v in exps}
        return tuple(sorted(common.items()))

    def divide_monomial(self, d: Monomial) -> "Polynomial":
        return Polynomial({_mono_div(m, d): c for m, c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        return isinstance(other, Polynomial) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: List[str] = []
        for m, c in self.terms():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = [str(v) if e == 1 else f"{v}^{e}" for v, e in m]
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def to_json(self) -> List[Dict[str, Any]]:
        return [
            {"coeff": f"{c.numerator}/{c.denominator}",
             "monomial": [[str(v), e] for v, e in m]}
            for m, c in self.terms()
        ]

    @classmethod
    def from_json(cls, data: List[Dict[str, Any]], n: Optional[int] = None) -> "Polynomial":
        """Inverse of to_json; with n given, residues are reduced mod n"""
        terms: Dict[Monomial, Fraction] = {}
        for term in data:
            exps: Dict[VarId, int] = {}
            for v, e in term["monomial"]:
                var = VarId.parse(v, n)
                exps[var] = exps.get(var, 0) + int(e)
            mono = tuple(sorted((var, e) for var, e in exps.items() if e))
            terms[mono] = terms.get(mono, Fraction(0)) + Fraction(term["coeff"])
        return cls(terms)


ZERO = Polynomial.zero()
ONE = Polynomial.constant(1)


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def product(factors: Iterable[Union[Polynomial, Character]]) -> Polynomial:
    result = ONE
    for f in factors:
        result = result * (f.to_polynomial() if isinstance(f, Character) else f)
    return result


def exact_div_linear(p: Polynomial, w: Character) -> Polynomial:
    """
    Divide p by the linear form w exactly

    Uses the monomial order that ranks the exponent of w's first variable
    above graded lex, so every reduction step cancels the leading term.

    Raises:
        NotDivisibleError: when w does not divide p
    """
    if w.is_zero:
        raise ZeroDenominatorError("division by the zero character")
    lead_var, lead_coeff = w.items()[0]
    divisor = w.to_polynomial()

    def order(m: Monomial) -> Tuple:
        return (-_mono_exp(m, lead_var), _grlex_key(m))

    quotient: Dict[Monomial, Fraction] = {}
    remainder = p
    while not remainder.is_zero:
        lead, coeff = min(remainder.items(), key=lambda t: order(t[0]))
        if _mono_exp(lead, lead_var) == 0:
            raise NotDivisibleError(f"{w} does not divide {p}")
        mono = _mono_drop(lead, lead_var)
        q = coeff / lead_coeff
        quotient[mono] = quotient.get(mono, Fraction(0)) + q
        remainder = remainder - Polynomial({mono: q}) * divisor
    return Polynomial(quotient)


def divide_by_weights(p: Polynomial, weights: Iterable[Character]) -> Polynomial:
    """Exact division by a product of linear characters"""
    for w in weights:
        p = exact_div_linear(p, w)
    return p


def rho_shift(p: Polynomial, steps: int, n: int) -> Polynomial:
    """Apply rho^steps: t[r][s] -> t[r+steps][s], t0 fixed"""
    return p.map_variables(lambda v: v.shifted(steps, n))


def rho_shift_character(w: Character, steps: int, n: int) -> Character:
    return Character({v.shifted(steps, n): c for v, c in w.items()})


def chi_pair(w: Character, inst: "Instance") -> int:
    """Pair a character with the cocharacter t0 -> M, t[r][k] -> k - M*j_k + M"""
    total = 0
    for v, c in w.items():
        if v.is_t0:
            total += c * inst.M
        else:
            total += c * (v.block - inst.M * inst.blocks[v.block - 1] + inst.M)
    return total


class RationalFunction:
    """
    Quotient of polynomials

    When built through from_weights, the denominator is tracked as a
    multiset of primitive linear characters; sums then use the least
    common multiple of those multisets instead of a plain product.
    """

    __slots__ = ("numerator", "denominator", "_factors")

    def __init__(self, numerator: Polynomial, denominator: Polynomial = ONE,
                 factors: Optional[Counter] = None):
        if denominator.is_zero:
            raise ZeroDenominatorError(f"{numerator} / 0")
        if factors is None and denominator.is_constant:
            numerator = numerator * (1 / denominator.constant_value())
            denominator = ONE
            factors = Counter()
        self.numerator = numerator
        self.denominator = denominator
        self._factors = factors

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, ONE, Counter())

    @classmethod
    def from_weights(cls, numerator: Polynomial,
                     weights: Iterable[Character]) -> "RationalFunction":
        scale = 1
        factors: Counter = Counter()
        for w in weights:
            k, prim = w.primitive()
            scale *= k
            factors[prim] += 1
        return cls(numerator * Fraction(1, scale), product(factors.elements()), factors).reduced()

    @property
    def is_factored(self) -> bool:
        return self._factors is not None

    def reduced(self) -> "RationalFunction":
        """Cancel tracked linear factors and common monomial content"""
        if self.numerator.is_zero:
            return RationalFunction.from_polynomial(ZERO)
        if self._factors is not None:
            num = self.numerator
            left: Counter = Counter()
            for w, count in self._factors.items():
                while count:
                    try:
                        num = exact_div_linear(num, w)
                    except NotDivisibleError:
                        break
                    count -= 1
                if count:
                    left[w] = count
            return RationalFunction(num, product(left.elements()), left)
        content = _common_content(self.numerator, self.denominator)
        num = self.numerator.divide_monomial(content)
        den = self.denominator.divide_monomial(content)
        lead = den.terms()[0][1]
        return RationalFunction(num * (1 / lead), den * (1 / lead))

    def is_polynomial(self) -> bool:
        return self.reduced().denominator.is_constant

    def to_polynomial(self) -> Polynomial:
        r = self.reduced()
        if not r.denominator.is_constant:
            raise NotDivisibleError(f"({r.numerator}) / ({r.denominator}) is not a polynomial")
        return r.numerator * (1 / r.denominator.constant_value())

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return rat_add(self, other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return rat_mul(self, other)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator, self._factors)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            other = RationalFunction.from_polynomial(other)
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.from_polynomial(Polynomial.constant(other))
        return isinstance(other, RationalFunction) and rat_eq(self, other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"RationalFunction(({self.numerator}) / ({self.denominator}))"


def _common_content(a: Polynomial, b: Polynomial) -> Monomial:
    ca = dict(a.monomial_content())
    cb = dict(b.monomial_content())
    return tuple(sorted((v, min(e, cb[v])) for v, e in ca.items() if v in cb))


def rat_add(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    if a._factors is not None and b._factors is not None:
        lcm = a._factors | b._factors
        num = (a.numerator * product((lcm - a._factors).elements())
               + b.numerator * product((lcm - b._factors).elements()))
        return RationalFunction(num, product(lcm.elements()), lcm).reduced()
    num = a.numerator * b.denominator + b.numerator * a.denominator
    return RationalFunction(num, a.denominator * b.denominator).reduced()


def rat_mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    if a._factors is not None and b._factors is not None:
        factors = a._factors + b._factors
        return RationalFunction(a.numerator * b.numerator,
                                product(factors.elements()), factors).reduced()
    return RationalFunction(a.numerator * b.numerator,
                            a.denominator * b.denominator).reduced()


def rat_eq(a: RationalFunction, b: RationalFunction) -> bool:
    return a.numerator * b.denominator == b.numerator * a.denominator


def rat_sum(terms: Iterable[RationalFunction]) -> RationalFunction:
    total = RationalFunction.from_polynomial(ZERO)
    for t in terms:
        total = total + t
    return total
