"""Sparse Laurent polynomials in ``x0, ..., xn`` with integer coefficients.

A value is stored as ``x^shift * num`` where ``num`` is an ordinary
polynomial (a FLINT ``fmpz_mpoly``) with no monomial factor. That pair is
unique, so equality and hashing reduce to comparing the pair.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import flint
from flint.utils.flint_exceptions import DomainError

from .errors import NotDivisible

Exponents = tuple[int, ...]


@lru_cache(maxsize=None)
def _ctx(nvars: int):
    return flint.fmpz_mpoly_ctx.get(tuple(f"x{i}" for i in range(nvars)))


@lru_cache(maxsize=None)
def _qctx(nvars: int):
    return flint.fmpq_mpoly_ctx.get(tuple(f"x{i}" for i in range(nvars)))


def _monomial(nvars: int, exps: Exponents):
    return _ctx(nvars).from_dict({tuple(exps): 1})


class LaurentPoly:
    """Element of ``Z[x0^{+-1}, ..., xn^{+-1}]``."""

    __slots__ = ("nvars", "num", "shift", "_hash")

    def __init__(self, nvars: int, num, shift: Sequence[int] | None = None, *, _clean=False):
        self.nvars = nvars
        shift = tuple(shift) if shift is not None else (0,) * nvars
        if not _clean:
            num, shift = _normalize(nvars, num, shift)
        self.num = num
        self.shift = shift
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars, _ctx(nvars).from_dict({}), _clean=True)

    @classmethod
    def constant(cls, nvars: int, c: int) -> "LaurentPoly":
        return cls(nvars, _ctx(nvars).from_dict({(0,) * nvars: c} if c else {}), _clean=True)

    @classmethod
    def gen(cls, nvars: int, i: int) -> "LaurentPoly":
        shift = [0] * nvars
        shift[i] = 1
        return cls(nvars, _ctx(nvars).from_dict({(0,) * nvars: 1}), shift, _clean=True)

    @classmethod
    def gens(cls, nvars: int) -> list["LaurentPoly"]:
        return [cls.gen(nvars, i) for i in range(nvars)]

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Exponents, int] | Iterable) -> "LaurentPoly":
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Exponents, int] = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} does not have length {nvars}")
            merged[exps] = merged.get(exps, 0) + int(c)
        merged = {e: c for e, c in merged.items() if c}
        if not merged:
            return cls.zero(nvars)
        low = tuple(min(e[k] for e in merged) for k in range(nvars))
        num = _ctx(nvars).from_dict(
            {tuple(a - b for a, b in zip(e, low)): c for e, c in merged.items()}
        )
        return cls(nvars, num, low, _clean=True)

    @classmethod
    def from_json(cls, data: list) -> "LaurentPoly":
        if not data:
            raise ValueError("cannot infer the variable count of an empty term list")
        return cls.from_terms(len(data[0][0]), ((e, int(c)) for e, c in data))

    # inspection

    def terms(self) -> dict[Exponents, int]:
        return {
            tuple(int(a) + b for a, b in zip(e, self.shift)): int(c)
            for e, c in self.num.to_dict().items()
        }

    def __len__(self) -> int:
        return len(self.num)

    def is_zero(self) -> bool:
        return len(self.num) == 0

    def has_positive_coefficients(self) -> bool:
        return not self.is_zero() and all(c > 0 for c in self.num.coeffs())

    def is_monomial(self) -> bool:
        return len(self.num) == 1

    # arithmetic

    def _check(self, other: "LaurentPoly"):
        if self.nvars != other.nvars:
            raise ValueError(f"ambient mismatch: {self.nvars} vs {other.nvars} variables")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        low = tuple(map(min, self.shift, other.shift))
        a = self.num * _monomial(self.nvars, tuple(s - l for s, l in zip(self.shift, low)))
        b = other.num * _monomial(self.nvars, tuple(s - l for s, l in zip(other.shift, low)))
        return LaurentPoly(self.nvars, a + b, low)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, -self.num, self.shift, _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return LaurentPoly.zero(self.nvars)
        # minimal exponents add under multiplication, so the product stays monomial-free
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        return LaurentPoly(self.nvars, self.num * other.num, shift, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise NotDivisible("negative power of a non-monomial")
            return LaurentPoly.constant(self.nvars, 1).exact_div(self ** (-k))
        return LaurentPoly(self.nvars, self.num ** k, tuple(k * s for s in self.shift), _clean=True)

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient ``r`` with ``r * other == self``; NotDivisible when no Laurent quotient exists."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if self.is_zero():
            return self
        try:
            q = self.num / other.num
        except DomainError:
            raise NotDivisible(
                f"{len(self)}-term dividend is not a multiple of {len(other)}-term divisor"
            ) from None
        shift = tuple(a - b for a, b in zip(self.shift, other.shift))
        return LaurentPoly(self.nvars, q, shift, _clean=True)

    __truediv__ = exact_div

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other.exact_div(self)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(self.nvars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.shift == other.shift and self.num == other.num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.shift, tuple(sorted(self.num.to_dict().items()))))
        return self._hash

    # substitution

    def rename(self, target: Sequence[int]) -> "LaurentPoly":
        """Substitute ``x_k -> x_{target[k]}`` (variables may be merged)."""
        out: dict[Exponents, int] = {}
        for exps, c in self.terms().items():
            new = [0] * self.nvars
            for k, e in enumerate(exps):
                new[target[k]] += e
            key = tuple(new)
            out[key] = out.get(key, 0) + c
        return LaurentPoly.from_terms(self.nvars, out)

    def evaluate(self, values: Sequence) -> Fraction:
        """Exact value at rational points; all values must be nonzero when negative exponents occur."""
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        vals = [Fraction(v) for v in values]
        if self.is_zero():
            return Fraction(0)
        qs = [flint.fmpq(v.numerator, v.denominator) for v in vals]
        body = _qctx(self.nvars).from_dict(self.num.to_dict())(*qs)
        scale = flint.fmpq(1)
        for v, s in zip(qs, self.shift):
            if s:
                scale *= v ** s
        r = body * scale
        return Fraction(int(r.p), int(r.q))

    # text and JSON

    def sorted_terms(self) -> list[tuple[Exponents, int]]:
        return sorted(self.terms().items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        """Canonical text ``c*x0^a0*...`` with explicit signs, terms in graded-lex order."""
        if self.is_zero():
            return "0"
        names = names or [f"x{k}" for k in range(self.nvars)]
        parts = []
        for i, (exps, c) in enumerate(self.sorted_terms()):
            factors = [f"{names[k]}^{e}" for k, e in enumerate(exps) if e]
            body = "*".join([str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append(("-" if c < 0 else "") + body if i == 0 else f" {sign} {body}")
        return "".join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"LaurentPoly({self.to_text()!r})"

    def to_json(self) -> list:
        return [[list(e), str(c)] for e, c in self.sorted_terms()]


class RationalSpecialization:
    """A point with strictly positive rational coordinates."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable):
        vals = tuple(Fraction(v) for v in values)
        if not vals or any(v <= 0 for v in vals):
            raise ValueError(f"specialization values must be strictly positive: {vals}")
        self.values = vals

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __eq__(self, other):
        return isinstance(other, RationalSpecialization) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"RationalSpecialization({self.to_text()!r})"

    @classmethod
    def constant(cls, nvars: int, value=1) -> "RationalSpecialization":
        return cls([value] * nvars)

    @classmethod
    def random(cls, nvars: int, rng: random.Random, low: int = 1, high: int = 7):
        """Numerators and denominators drawn uniformly from ``[low, high]``."""
        return cls(Fraction(rng.randint(low, high), rng.randint(low, high)) for _ in range(nvars))

    @classmethod
    def parse(cls, text: str, labels: Sequence[int]) -> "RationalSpecialization":
        """Read ``all=1`` or ``x0=2,x1=1/3,...`` (every vertex label must be assigned)."""
        assigned: dict[int, Fraction] = {}
        default = None
        for item in filter(None, (t.strip() for t in text.split(","))):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"bad specialization item {item!r}")
            key = key.strip()
            try:
                value = Fraction(val.strip())
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"bad rational {val!r}") from None
            if key == "all":
                default = value
            elif re.fullmatch(r"x\d+", key):
                assigned[int(key[1:])] = value
            else:
                raise ValueError(f"bad specialization key {key!r}")
        unknown = set(assigned) - set(labels)
        if unknown:
            raise ValueError(f"no vertices {sorted(unknown)}")
        missing = [lab for lab in labels if lab not in assigned and default is None]
        if missing:
            raise ValueError(f"no value for vertices {missing}")
        return cls(assigned.get(lab, default) for lab in labels)

    def to_text(self, labels: Sequence[int] | None = None) -> str:
        labels = labels if labels is not None else range(len(self.values))
        return ",".join(f"x{lab}={v}" for lab, v in zip(labels, self.values))


def _normalize(nvars: int, num, shift: Exponents):
    """Move the monomial content of ``num`` into ``shift``."""
    if len(num) == 0:
        return num, (0,) * nvars
    low = tuple(min(col) for col in zip(*num.monoms()))
    if any(low):
        num = num / _monomial(nvars, low)
        shift = tuple(a + b for a, b in zip(shift, low))
    return num, shift


def parse_text(nvars: int, text: str) -> LaurentPoly:
    """Inverse of :meth:`LaurentPoly.to_text`."""
    text = text.strip()
    if text == "0":
        return LaurentPoly.zero(nvars)
    terms: dict[Exponents, int] = {}
    tokens = text.replace(" - ", " + -").split(" + ")
    for tok in tokens:
        coeff, *factors = tok.strip().split("*")
        exps = [0] * nvars
        for f in factors:
            var, _, e = f.partition("^")
            exps[int(var[1:])] += int(e or 1)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + int(coeff)
    return LaurentPoly.from_terms(nvars, terms)
