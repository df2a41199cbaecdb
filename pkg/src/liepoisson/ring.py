"""Exact sparse polynomial arithmetic over the Gaussian rationals Q(i).

Everything downstream (Poisson brackets, commutant solves, closure checks)
runs on the two classes defined here.  Coefficients are exact: no floats
anywhere.  Monomials are dense exponent tuples; polynomials are sparse
monomial -> coefficient maps with zero coefficients stripped eagerly, so two
equal polynomials always have identical term dicts.

The canonical monomial order is graded lexicographic: lower total degree
first, ties broken by comparing exponent tuples left to right.  Serialized
term lists ascend in this order.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as mpq

__all__ = [
    "mpq",
    "GaussianRational",
    "Monomial",
    "Polynomial",
    "grlex_key",
    "poly_add",
    "poly_mul",
    "poly_partial",
]

_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


def _as_mpq(value) -> mpq:
    if type(value) is mpq:
        return value
    if isinstance(value, str):
        return mpq(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use exact rationals")
    return mpq(value)


class GaussianRational:
    """An element re + im*i of Q(i) with exact rational parts.

    Both parts are kept in lowest terms with positive denominator (the
    rational backend guarantees that).  Instances are immutable and compare
    by value.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_mpq(re))
        object.__setattr__(self, "im", _as_mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> "GaussianRational":
        self = object.__new__(cls)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        return self

    @classmethod
    def from_strings(cls, re: str, im: str) -> "GaussianRational":
        return cls._raw(mpq(re), mpq(im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, type(_MPQ_ZERO))):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other) -> "GaussianRational":
        other = _coerce(other)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussianRational":
        other = _coerce(other)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "GaussianRational":
        other = _coerce(other)
        return GaussianRational._raw(other.re - self.re, other.im - self.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other) -> "GaussianRational":
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        # short circuits: the bulk of real computations stay on one axis
        if not b:
            if not a:
                return GR_ZERO
            return GaussianRational._raw(a * c, a * d)
        if not d:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GaussianRational":
        other = _coerce(other)
        c, d = other.re, other.im
        if not c and not d:
            raise ZeroDivisionError("division by zero in Q(i)")
        if not d:
            return GaussianRational._raw(self.re / c, self.im / c)
        n = c * c + d * d
        a, b = self.re, self.im
        return GaussianRational._raw((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other) -> "GaussianRational":
        return _coerce(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def __repr__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


def _coerce(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use exact rationals")
    return GaussianRational._raw(_as_mpq(value), _MPQ_ZERO)


GR_ZERO = GaussianRational._raw(_MPQ_ZERO, _MPQ_ZERO)
GR_ONE = GaussianRational._raw(_MPQ_ONE, _MPQ_ZERO)
GR_I = GaussianRational._raw(_MPQ_ZERO, _MPQ_ONE)
GR_MINUS_I = GaussianRational._raw(_MPQ_ZERO, -_MPQ_ONE)


class Monomial(tuple):
    """Dense exponent vector.  Behaves as a plain tuple of nonnegative ints."""

    __slots__ = ()

    def __new__(cls, exps: Iterable[int]):
        self = super().__new__(cls, tuple(int(e) for e in exps))
        if any(e < 0 for e in self):
            raise ValueError("monomial exponents must be nonnegative")
        return self

    @property
    def exps(self) -> tuple:
        return tuple(self)

    def degree(self) -> int:
        return sum(self)

    def mul(self, other: Sequence[int]) -> "Monomial":
        if len(self) != len(other):
            raise ValueError("monomial length mismatch")
        return Monomial(a + b for a, b in zip(self, other))


def grlex_key(mono: Sequence[int]):
    """Sort key for graded lexicographic order, ascending."""
    return (sum(mono), tuple(mono))


class Polynomial:
    """Sparse polynomial over Q(i) in a fixed number of variables.

    terms maps exponent tuples to nonzero GaussianRational coefficients.
    The map never holds a zero coefficient, which makes equality a plain
    dict comparison.  Treat instances as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], GaussianRational] | None = None):
        self.nvars = int(nvars)
        clean: dict[tuple, GaussianRational] = {}
        if terms:
            for mono, coeff in terms.items():
                if not isinstance(coeff, GaussianRational):
                    coeff = _coerce(coeff)
                if not coeff:
                    continue
                mono = tuple(mono)
                if len(mono) != self.nvars:
                    raise ValueError(
                        f"monomial {mono} has {len(mono)} exponents, expected {self.nvars}"
                    )
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in monomial {mono}")
                clean[mono] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value) -> "Polynomial":
        value = _coerce(value)
        if not value:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        mono = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {mono: GR_ONE})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=GR_ONE) -> "Polynomial":
        return cls(len(exps), {tuple(exps): _coerce(coeff)})

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def homogeneous_components(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for mono, coeff in self.terms.items():
            parts.setdefault(sum(mono), {})[mono] = coeff
        return {d: Polynomial(self.nvars, t) for d, t in sorted(parts.items())}

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def leading_term(self):
        """(monomial, coefficient) maximal in graded lex order; None if zero."""
        if not self.terms:
            return None
        mono = max(self.terms, key=grlex_key)
        return mono, self.terms[mono]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __iter__(self) -> Iterator:
        return iter(self.sorted_terms())

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            prev = terms.get(mono)
            s = coeff if prev is None else prev + coeff
            if s:
                terms[mono] = s
            elif prev is not None:
                del terms[mono]
        out = object.__new__(Polynomial)
        out.nvars = self.nvars
        out.terms = terms
        return out

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            prev = terms.get(mono)
            s = -coeff if prev is None else prev - coeff
            if s:
                terms[mono] = s
            elif prev is not None:
                del terms[mono]
        out = object.__new__(Polynomial)
        out.nvars = self.nvars
        out.terms = terms
        return out

    def __neg__(self) -> "Polynomial":
        out = object.__new__(Polynomial)
        out.nvars = self.nvars
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def scale(self, value) -> "Polynomial":
        value = _coerce(value)
        out = object.__new__(Polynomial)
        out.nvars = self.nvars
        if not value:
            out.terms = {}
        else:
            out.terms = {m: c * value for m, c in self.terms.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return _poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def partial(self, index: int) -> "Polynomial":
        """Partial derivative with respect to variable index."""
        if not 0 <= index < self.nvars:
            raise IndexError(f"variable index {index} out of range")
        terms = {}
        for mono, coeff in self.terms.items():
            e = mono[index]
            if not e:
                continue
            lowered = mono[:index] + (e - 1,) + mono[index + 1 :]
            terms[lowered] = coeff * e
        out = object.__new__(Polynomial)
        out.nvars = self.nvars
        out.terms = terms
        return out

    def monic(self) -> "Polynomial":
        """Divide by the graded-lex leading coefficient."""
        lt = self.leading_term()
        if lt is None:
            return self
        return self.scale(GR_ONE / lt[1])

    def evaluate(self, point: Sequence) -> GaussianRational:
        """Exact evaluation at a point of rationals or GaussianRationals."""
        if len(point) != self.nvars:
            raise ValueError("point length mismatch")
        vals = [_coerce(p) for p in point]
        total = GR_ZERO
        for mono, coeff in self.terms.items():
            acc = coeff
            for e, v in zip(mono, vals):
                for _ in range(e):
                    acc = acc * v
            total = total + acc
        return total

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials over different variable counts")

    # -- serialization ------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"exps": list(mono), "re": str(coeff.re), "im": str(coeff.im)}
                for mono, coeff in self.sorted_terms()
            ],
        }

    @classmethod
    def from_obj(cls, obj: Mapping) -> "Polynomial":
        nvars = int(obj["nvars"])
        terms = {}
        for entry in obj["terms"]:
            mono = tuple(int(e) for e in entry["exps"])
            coeff = GaussianRational.from_strings(entry["re"], entry.get("im", "0"))
            if coeff:
                terms[mono] = coeff
        return cls(nvars, terms)

    def pretty(self, names: Sequence[str] | None = None) -> str:
        """Human readable form, terms descending in graded lex order."""
        if not self.terms:
            return "0"
        if names is None:
            names = [f"x{i+1}" for i in range(self.nvars)]
        pieces = []
        for mono, coeff in sorted(
            self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True
        ):
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors) if factors else "1"
            c = repr(coeff)
            if c == "1" and factors:
                pieces.append(body)
            elif c == "-1" and factors:
                pieces.append(f"-{body}")
            else:
                cs = c if ("+" not in c[1:] and "-" not in c[1:]) else f"({c})"
                pieces.append(f"{cs}*{body}" if factors else cs)
        text = " + ".join(pieces)
        return text.replace("+ -", "- ")

    def __repr__(self) -> str:
        n = len(self.terms)
        return f"Polynomial(nvars={self.nvars}, {n} term{'s' if n != 1 else ''})"


# ---------------------------------------------------------------------------
# multiplication kernel
#
# Polynomials split into real and imaginary coefficient dicts keyed by packed
# exponent integers, so a term product is one integer addition plus a rational
# multiply.  Purely real or purely imaginary operands skip the cross terms.

PACK_BITS = 6
_PACK_MASK = (1 << PACK_BITS) - 1


def pack_mono(mono: Sequence[int]) -> int:
    key = 0
    for e in mono:
        if e > _PACK_MASK:
            raise OverflowError(f"exponent {e} exceeds packed width")
        key = (key << PACK_BITS) | e
    return key


def unpack_mono(key: int, nvars: int) -> tuple:
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = key & _PACK_MASK
        key >>= PACK_BITS
    return tuple(out)


def split_packed(poly: Polynomial):
    """(re_dict, im_dict) keyed by packed monomials.  Internal fast form."""
    re_d: dict[int, mpq] = {}
    im_d: dict[int, mpq] = {}
    for mono, coeff in poly.terms.items():
        key = pack_mono(mono)
        if coeff.re:
            re_d[key] = coeff.re
        if coeff.im:
            im_d[key] = coeff.im
    return re_d, im_d


def join_packed(re_d: dict, im_d: dict, nvars: int) -> Polynomial:
    terms: dict[tuple, GaussianRational] = {}
    for key, val in re_d.items():
        if val:
            terms[unpack_mono(key, nvars)] = GaussianRational._raw(val, _MPQ_ZERO)
    for key, val in im_d.items():
        if not val:
            continue
        mono = unpack_mono(key, nvars)
        prev = terms.get(mono)
        if prev is None:
            terms[mono] = GaussianRational._raw(_MPQ_ZERO, val)
        else:
            terms[mono] = GaussianRational._raw(prev.re, val)
    out = object.__new__(Polynomial)
    out.nvars = nvars
    out.terms = terms
    return out


def dict_mul(da: dict, db: dict) -> dict:
    """Convolution of two packed coefficient dicts."""
    if not da or not db:
        return {}
    if len(da) > len(db):
        da, db = db, da
    out: dict[int, mpq] = {}
    get = out.get
    for ka, va in da.items():
        for kb, vb in db.items():
            k = ka + kb
            prev = get(k)
            out[k] = va * vb if prev is None else prev + va * vb
    return out


def dict_accum(target: dict, source: dict, sign: int = 1) -> None:
    """target += sign * source, in place, zeros removed."""
    get = target.get
    if sign == 1:
        for k, v in source.items():
            prev = get(k)
            nv = v if prev is None else prev + v
            if nv:
                target[k] = nv
            elif prev is not None:
                del target[k]
    else:
        for k, v in source.items():
            prev = get(k)
            nv = -v if prev is None else prev - v
            if nv:
                target[k] = nv
            elif prev is not None:
                del target[k]


def _poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if not a.terms or not b.terms:
        return Polynomial(a.nvars)
    ar, ai = split_packed(a)
    br, bi = split_packed(b)
    re_d = dict_mul(ar, br)
    if ai and bi:
        dict_accum(re_d, dict_mul(ai, bi), -1)
    im_d = dict_mul(ar, bi)
    if ai and br:
        dict_accum(im_d, dict_mul(ai, br), 1)
    re_d = {k: v for k, v in re_d.items() if v}
    im_d = {k: v for k, v in im_d.items() if v}
    return join_packed(re_d, im_d, a.nvars)


# spec-level function aliases; the methods above are the implementation


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_partial(a: Polynomial, index: int) -> Polynomial:
    return a.partial(index)
