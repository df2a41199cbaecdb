"""Block multi-degree grading and candidate pruning for bracket expansions.

Coordinates of a LieAlgebraSpec come partitioned into blocks, and every
monomial gets a grading: the vector of its per-block degrees.  Polynomials
get the set of gradings of their homogeneous parts.  The payoff is bracket
pruning: a Poisson bracket can only move gradings by shift vectors read off
the block bracket targets, so most degree-matched generator products are
ruled out as expansion candidates before any linear algebra runs.

Generators that are not grading homogeneous (fixture: the central cubic and
quartic) take part through their homogeneous slices.  Each slice that is
expressible back in same-degree generators becomes an enumeration symbol, a
product of symbols is admissible when its summed grading lands in the target
set, and the symbol product rewrites to a combination of plain generator
products.  That rewriting is exactly the substitution trick the fixture
needs from degree 8 upward.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .ring import GR_ONE, GaussianRational, Polynomial, grlex_key
from .liealgebra import LieAlgebraSpec
from . import linalg

__all__ = [
    "Grading",
    "GradingSum",
    "monomial_grading",
    "poly_grading",
    "bracket_grading",
    "grading_shifts",
    "AdmissibleSet",
    "admissible_products",
    "compact_form_count",
    "table1_report",
]


class Grading(tuple):
    """Per-block degree vector of a homogeneous polynomial."""

    __slots__ = ()

    def __new__(cls, vec: Iterable[int]):
        self = super().__new__(cls, tuple(int(v) for v in vec))
        if any(v < 0 for v in self):
            raise ValueError("grading components must be nonnegative")
        return self

    @property
    def degree(self) -> int:
        return sum(self)

    def __add__(self, other):
        return Grading(a + b for a, b in zip(self, other))


class GradingSum:
    """A finite set of gradings, the grading of a possibly mixed polynomial."""

    __slots__ = ("parts",)

    def __init__(self, parts: Iterable):
        self.parts = frozenset(Grading(p) for p in parts)
        if not self.parts:
            raise ValueError("empty grading sum")

    @property
    def homogeneous(self) -> bool:
        return len(self.parts) == 1

    def degrees(self) -> set:
        return {g.degree for g in self.parts}

    def __iter__(self):
        return iter(sorted(self.parts))

    def __contains__(self, item) -> bool:
        return Grading(item) in self.parts

    def __eq__(self, other) -> bool:
        if isinstance(other, GradingSum):
            return self.parts == other.parts
        return NotImplemented

    def __hash__(self):
        return hash(self.parts)

    def union(self, other: "GradingSum") -> "GradingSum":
        return GradingSum(self.parts | other.parts)

    def sumset(self, other: "GradingSum") -> "GradingSum":
        return GradingSum(a + b for a in self.parts for b in other.parts)

    def __repr__(self):
        return "GradingSum({})".format(" ~ ".join(str(tuple(g)) for g in self))


def monomial_grading(alg: LieAlgebraSpec, mono: Sequence[int]) -> Grading:
    vec = [0] * len(alg.blocks)
    block_of = alg.block_of
    for v, e in enumerate(mono):
        if e:
            vec[block_of[v]] += e
    return Grading(vec)


def poly_grading(alg: LieAlgebraSpec, poly: Polynomial) -> GradingSum:
    """Grading set of a nonzero polynomial; rejects the zero polynomial."""
    if poly.is_zero():
        raise ValueError("the zero polynomial has no grading")
    return GradingSum(monomial_grading(alg, m) for m in poly.terms)


def grading_shifts(alg: LieAlgebraSpec) -> list[tuple]:
    """Shift vectors a bracket applies to a grading pair's sum.

    One bracketed variable is consumed from block r, one from block s, and a
    variable from a declared target block t is produced: the grading moves
    by -e_r - e_s + e_t.
    """
    nb = len(alg.blocks)
    shifts = set()
    for (r, s), targets in alg.block_brackets.items():
        for t in targets:
            vec = [0] * nb
            vec[r] -= 1
            vec[s] -= 1
            vec[t] += 1
            shifts.add(tuple(vec))
    return sorted(shifts)


def bracket_grading(alg: LieAlgebraSpec, ga: GradingSum, gb: GradingSum) -> GradingSum:
    """All gradings a bracket of polynomials graded ga, gb can produce."""
    shifts = grading_shifts(alg)
    out = set()
    for a in ga.parts:
        for b in gb.parts:
            base = [x + y for x, y in zip(a, b)]
            for shift in shifts:
                cand = tuple(x + s for x, s in zip(base, shift))
                if all(v >= 0 for v in cand):
                    out.add(cand)
    if not out:
        raise ValueError("bracket grading is empty; arguments cannot bracket")
    return GradingSum(out)


# ---------------------------------------------------------------------------
# admissible generator products


class _Symbol:
    """A grading homogeneous enumeration symbol.

    combo expresses the symbol polynomial as a linear combination of plain
    same-degree generators, the form products are rewritten into.
    """

    __slots__ = ("name", "degree", "grading", "combo")

    def __init__(self, name, degree, grading, combo):
        self.name = name
        self.degree = degree
        self.grading = grading
        self.combo = combo

    def __repr__(self):
        return f"_Symbol({self.name}, deg={self.degree}, G={tuple(self.grading)})"


class AdmissibleSet:
    """Outcome of admissible_products.

    candidates: list of (symbol_names, combo) where combo maps plain
    generator-name multisets (sorted tuples) to coefficients; the candidate
    polynomial is the corresponding combination of generator products.
    products: the deduplicated union of plain multisets, the printable
    candidate list whose length the pruning reports quote.
    """

    __slots__ = ("degree", "target", "candidates", "products")

    def __init__(self, degree, target, candidates, products):
        self.degree = degree
        self.target = target
        self.candidates = candidates
        self.products = products

    def __len__(self):
        return len(self.products)


def _homogeneous_symbols(alg: LieAlgebraSpec, gens) -> list[_Symbol]:
    """Grading homogeneous symbols spanning each degree's generator span.

    Homogeneous generators pass through unchanged.  For mixed generators,
    every grading slice of the degree's generator span is solved back
    against the plain generators; slices that cannot be expressed are
    rejected, since products containing them could never recombine into
    generator products.
    """
    by_degree: dict[int, list] = {}
    for entry in gens.entries:
        by_degree.setdefault(entry.degree, []).append(entry)

    symbols: list[_Symbol] = []
    for degree in sorted(by_degree):
        entries = by_degree[degree]
        mixed = [e for e in entries if not e.grading.homogeneous]
        for e in entries:
            if e.grading.homogeneous:
                (g,) = e.grading.parts
                symbols.append(
                    _Symbol(e.name, degree, g, {e.name: GR_ONE})
                )
        if not mixed:
            continue
        # grading slices of the whole degree-d span that are not already
        # covered by a homogeneous generator
        covered = {s.grading for s in symbols if s.degree == degree}
        # build slices per grading from the graded pieces of each entry
        slices: dict[Grading, list] = {}
        for e in entries:
            for piece in _grading_pieces(alg, e.polynomial).items():
                slices.setdefault(piece[0], []).append((e.name, piece[1]))
        for g in sorted(slices):
            if g in covered:
                continue
            vectors = slices[g]
            # canonical representative: RREF of the slice vectors
            cols: dict[tuple, int] = {}
            rows = []
            for _, poly in vectors:
                row = {}
                for mono, coeff in poly.terms.items():
                    c = cols.setdefault(mono, len(cols))
                    row[c] = coeff
                rows.append(row)
            _, rref_rows = linalg.rref(rows, len(cols))
            mono_of = {i: m for m, i in cols.items()}
            for ridx, rrow in enumerate(rref_rows):
                rep = Polynomial(alg.dim, {mono_of[c]: v for c, v in rrow.items()})
                combo = _express_linear(rep, entries)
                if combo is None:
                    continue
                suffix = "" if len(rref_rows) == 1 else f".{ridx+1}"
                name = "slice[" + ",".join(str(x) for x in g) + "]" + suffix
                symbols.append(_Symbol(name, degree, g, combo))

    symbols.sort(key=lambda s: (s.degree, tuple(s.grading), s.name))
    return symbols


def _grading_pieces(alg: LieAlgebraSpec, poly: Polynomial) -> dict:
    pieces: dict[Grading, dict] = {}
    for mono, coeff in poly.terms.items():
        g = monomial_grading(alg, mono)
        pieces.setdefault(g, {})[mono] = coeff
    return {g: Polynomial(poly.nvars, t) for g, t in pieces.items()}


def _express_linear(target: Polynomial, entries) -> dict | None:
    """Write target as sum alpha_g * g over the given generator entries."""
    cols: dict[tuple, int] = {}
    rows_by_mono: dict[int, dict] = {}
    for gi, e in enumerate(entries):
        for mono, coeff in e.polynomial.terms.items():
            c = cols.setdefault(mono, len(cols))
            rows_by_mono.setdefault(c, {})[gi] = coeff
    rhs_col = len(entries)
    for mono, coeff in target.terms.items():
        if mono not in cols:
            return None
        rows_by_mono.setdefault(cols[mono], {})[rhs_col] = coeff
    sol, _null, dropped = linalg.solve_affine(
        list(rows_by_mono.values()), rhs_col + 1, rhs_col
    )
    if dropped:
        return None
    return {entries[gi].name: v for gi, v in sorted(sol.items()) if v}


def _multisets(symbols: list, total: int, start: int = 0):
    """Multisets of symbols with degree sum equal to total, lexicographic."""
    if total == 0:
        yield ()
        return
    for i in range(start, len(symbols)):
        d = symbols[i].degree
        if d > total:
            continue
        for rest in _multisets(symbols, total - d, i):
            yield (i,) + rest


def admissible_products(
    alg: LieAlgebraSpec,
    gens,
    target: GradingSum,
    total_degree: int,
) -> AdmissibleSet:
    """Products of generators that can appear in a bracket of a given grading.

    Enumerates symbol multisets of the requested total degree, keeps those
    whose grading lands in target, and rewrites each into plain generator
    products.  Returns candidates in a deterministic order together with the
    deduplicated plain product list.
    """
    key = (gens.content_hash(), total_degree, target)
    cached = _ADMISSIBLE_CACHE.get(key)
    if cached is not None:
        return cached

    symbols = _homogeneous_symbols(alg, gens)
    nb = len(alg.blocks)
    target_set = {tuple(g) for g in target.parts}

    candidates = []
    for multi in _multisets(symbols, total_degree):
        vec = [0] * nb
        for i in multi:
            for b, x in enumerate(symbols[i].grading):
                vec[b] += x
        if tuple(vec) not in target_set:
            continue
        chosen = [symbols[i] for i in multi]
        combo: dict[tuple, GaussianRational] = {(): GR_ONE}
        for sym in chosen:
            new: dict[tuple, GaussianRational] = {}
            for ms, c in combo.items():
                for gname, alpha in sym.combo.items():
                    nms = tuple(sorted(ms + (gname,)))
                    prev = new.get(nms)
                    val = c * alpha if prev is None else prev + c * alpha
                    if val:
                        new[nms] = val
                    elif prev is not None:
                        del new[nms]
            combo = new
        if combo:
            names = tuple(s.name for s in chosen)
            candidates.append((names, combo))

    seen: dict[tuple, None] = {}
    for _names, combo in candidates:
        for ms in combo:
            seen.setdefault(ms, None)
    products = sorted(seen)

    out = AdmissibleSet(total_degree, target, candidates, products)
    _ADMISSIBLE_CACHE[key] = out
    return out


_ADMISSIBLE_CACHE: dict = {}


# ---------------------------------------------------------------------------
# product counting by degree alone, for the pruning comparison table


def compact_form_count(degree: int, multiplicities: dict[int, int]) -> int:
    """Number of generator products of a given total degree.

    multiplicities maps generator degree j to the number of generators of
    that degree.  Counts multisets: the sum over exponent vectors a_j with
    sum j*a_j = degree of the product of binomial(m_j + a_j - 1, a_j).
    """
    from math import comb

    degs = sorted(d for d, m in multiplicities.items() if m > 0 and d <= degree)

    def count(remaining: int, idx: int) -> int:
        if remaining == 0:
            return 1
        if idx == len(degs):
            return 0
        d = degs[idx]
        m = multiplicities[d]
        total = 0
        a = 0
        while a * d <= remaining:
            ways = comb(m + a - 1, a)
            total += ways * count(remaining - a * d, idx + 1)
            a += 1
        return total

    return count(degree, 0)


def table1_report(alg: LieAlgebraSpec, gens, example_pairs: list) -> list[dict]:
    """Pruning comparison rows: degree, product count, grading count, delta.

    example_pairs lists (degree, (name_a, name_b)) bracket examples; the
    grading count is the plain candidate list length for that bracket.
    """
    mult = dict(gens.counts)
    rows = []
    for degree, (na, nb) in example_pairs:
        ea = gens.entry(na)
        eb = gens.entry(nb)
        if ea.degree + eb.degree - 1 != degree:
            raise ValueError(f"example bracket {{{na},{nb}}} is not degree {degree}")
        target = bracket_grading(alg, ea.grading, eb.grading)
        adm = admissible_products(alg, gens, target, degree)
        compact = compact_form_count(degree, mult)
        rows.append(
            {
                "degree": degree,
                "compact_count": compact,
                "grading_count": len(adm),
                "example_bracket": f"{{{na},{nb}}}",
                "delta": compact - len(adm),
            }
        )
    return rows
