"""Contraction invariants and the distinguished generator bases.

Invariants are built from index patterns: ordered products of epsilon,
delta, and coordinate symbols with abstract labels summed over {1,2,3}.
Expanding a pattern gives an exact polynomial in the chain coordinates
that commutes with the whole subalgebra.  Two named bases are assembled
from them: the "barred" basis, whose entries are single contractions up
to the two central recombinations, and the "unbarred" companion in which
higher-degree generators absorb decomposable tails.  The nicknames refer
to the accent conventionally used to tell the two normalizations apart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .liealgebra import LieAlgebraSpec, StructureError
from .ring import GaussianRational, Polynomial, poly_mul
from .grading import poly_grading
from .commutant import GeneratorEntry, GeneratorSet, expand_product, product_multisets
from .linalg import solve_affine

__all__ = [
    "ContractionPattern",
    "load_patterns",
    "contract_invariant",
    "invariant",
    "barred_basis",
    "unbarred_basis",
    "verify_translation",
    "TranslationReport",
]

_ARITY = {"s": 1, "t": 1, "q": 2, "eps": 3, "delta": 2}

# slot -> index space; epsilon and delta inherit the space of their labels
_VECTOR_SLOTS = {("s", 0), ("q", 0)}
_FLAVOR_SLOTS = {("t", 0), ("q", 1)}

_EPS_SIGN = {
    (1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
    (1, 3, 2): -1, (3, 2, 1): -1, (2, 1, 3): -1,
}


@dataclass(frozen=True)
class ContractionPattern:
    """Fully contracted index pattern over the three-index Euclidean range.

    factors is an ordered tuple of (symbol, labels) pairs with symbol in
    {s, t, q, eps, delta}.  Every label must appear exactly twice across
    the whole pattern, and both occurrences must live in the same index
    space (vector or flavor), so the expansion is a scalar invariant.
    """

    name: str
    factors: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "factors",
            tuple((sym, tuple(idx)) for sym, idx in self.factors),
        )
        self.validate()

    def validate(self) -> None:
        uses: dict[str, list] = {}
        for sym, idx in self.factors:
            if sym not in _ARITY:
                raise ValueError(f"{self.name}: unknown symbol {sym!r}")
            if len(idx) != _ARITY[sym]:
                raise ValueError(f"{self.name}: {sym} takes {_ARITY[sym]} labels")
            for pos, lab in enumerate(idx):
                space = None
                if (sym, pos) in _VECTOR_SLOTS:
                    space = "vector"
                elif (sym, pos) in _FLAVOR_SLOTS:
                    space = "flavor"
                uses.setdefault(lab, []).append(space)
        for lab, spaces in uses.items():
            if len(spaces) != 2:
                raise ValueError(
                    f"{self.name}: label {lab!r} appears {len(spaces)} times"
                )
            fixed = {s for s in spaces if s}
            if len(fixed) > 1:
                raise ValueError(f"{self.name}: label {lab!r} mixes index spaces")

    @property
    def tri_degree(self) -> tuple:
        counts = {"s": 0, "t": 0, "q": 0}
        for sym, _ in self.factors:
            if sym in counts:
                counts[sym] += 1
        return (counts["s"], counts["t"], counts["q"])

    @property
    def degree(self) -> int:
        return sum(self.tri_degree)

    def labels(self) -> list:
        seen: list = []
        for _, idx in self.factors:
            for lab in idx:
                if lab not in seen:
                    seen.append(lab)
        return seen

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "factors": [{"sym": s, "idx": list(i)} for s, i in self.factors],
        }

    @classmethod
    def from_obj(cls, obj) -> "ContractionPattern":
        return cls(
            name=obj["name"],
            factors=tuple((f["sym"], tuple(f["idx"])) for f in obj["factors"]),
        )


_PATTERNS: dict | None = None


def load_patterns() -> dict:
    """The twenty bundled invariant patterns, keyed by name."""
    global _PATTERNS
    if _PATTERNS is None:
        text = (
            resources.files("liepoisson")
            .joinpath("data/contraction_patterns.json")
            .read_text()
        )
        raw = json.loads(text)
        _PATTERNS = {
            name: ContractionPattern(
                name=name,
                factors=tuple((f["sym"], tuple(f["idx"])) for f in factors),
            )
            for name, factors in raw.items()
        }
    return _PATTERNS


def _block_layout(alg: LieAlgebraSpec):
    """Variable indices for s_i, t_a, q_{ia}; requires the 3+3+9 layout."""
    if len(alg.blocks) != 3 or [len(b) for b in alg.blocks] != [3, 3, 9]:
        raise StructureError(
            "contraction patterns need blocks of sizes 3, 3, 9 "
            f"(got {[len(b) for b in alg.blocks]})"
        )
    s_vars = list(alg.blocks[0])
    t_vars = list(alg.blocks[1])
    q_vars = list(alg.blocks[2])
    return s_vars, t_vars, q_vars


_INVARIANT_CACHE: dict = {}


def contract_invariant(pattern: ContractionPattern, alg: LieAlgebraSpec) -> Polynomial:
    """Expand a fully contracted pattern into an exact polynomial.

    Sums over all assignments of the abstract labels to {1,2,3} with
    Levi-Civita and Kronecker weights.  Assignments are pruned as soon as
    an epsilon repeats a value or a delta mismatches.
    """
    key = (alg.content_hash(), pattern.name, pattern.factors)
    cached = _INVARIANT_CACHE.get(key)
    if cached is not None:
        return cached

    s_vars, t_vars, q_vars = _block_layout(alg)
    labels = pattern.labels()
    pos_of = {lab: n for n, lab in enumerate(labels)}

    # constraint factors checked as soon as their last label is assigned
    checkers = []
    for sym, idx in pattern.factors:
        if sym in ("eps", "delta"):
            last = max(pos_of[lab] for lab in idx)
            checkers.append((last, sym, tuple(pos_of[lab] for lab in idx)))
    coord_factors = [
        (sym, tuple(pos_of[lab] for lab in idx))
        for sym, idx in pattern.factors
        if sym in ("s", "t", "q")
    ]

    terms: dict = {}
    assign = [0] * len(labels)
    nvars = alg.dim

    def descend(depth: int, sign: int):
        if depth == len(labels):
            exps = [0] * nvars
            for sym, positions in coord_factors:
                if sym == "s":
                    v = s_vars[assign[positions[0]] - 1]
                elif sym == "t":
                    v = t_vars[assign[positions[0]] - 1]
                else:
                    v = q_vars[3 * (assign[positions[0]] - 1)
                               + (assign[positions[1]] - 1)]
                exps[v] += 1
            mono = tuple(exps)
            cur = terms.get(mono)
            terms[mono] = sign if cur is None else cur + sign
            return
        for val in (1, 2, 3):
            assign[depth] = val
            fac = 1
            ok = True
            for last, sym, positions in checkers:
                if last != depth:
                    continue
                vals = tuple(assign[p] for p in positions)
                if sym == "eps":
                    s = _EPS_SIGN.get(vals, 0)
                    if s == 0:
                        ok = False
                        break
                    fac *= s
                else:
                    if vals[0] != vals[1]:
                        ok = False
                        break
            if ok:
                descend(depth + 1, sign * fac)

    descend(0, 1)
    poly = Polynomial(
        nvars,
        {m: GaussianRational(c) for m, c in terms.items() if c},
    )
    _INVARIANT_CACHE[key] = poly
    return poly


def invariant(alg: LieAlgebraSpec, name: str) -> Polynomial:
    """Bundled invariant by pattern name, e.g. invariant(alg, "C111")."""
    return contract_invariant(load_patterns()[name], alg)


def _entry(alg, name, poly, central) -> GeneratorEntry:
    return GeneratorEntry(
        name=name,
        polynomial=poly,
        degree=poly.degree(),
        grading=poly_grading(alg, poly),
        central=central,
    )


_CENTRAL_NAMES = ("b1", "b2", "b3", "c1", "d1")


def barred_basis(alg: LieAlgebraSpec) -> GeneratorSet:
    """The twenty-generator basis of single contractions.

    All entries are plain invariants except the two centrals c1 and d1,
    which are the combinations commuting with every generator:
    c1 = C111 - (2/3) C003α and d1 = C202 + C022 - C112 - 2 C004.
    """
    C = lambda name: invariant(alg, name)
    combos = [
        ("b1", C("C200")),
        ("b2", C("C020")),
        ("b3", C("C002")),
        ("c1", C("C111") - C("C003").scale(GaussianRational("2/3"))),
        ("C2", C("C111")),
        ("d1", C("C202") + C("C022") - C("C112") - C("C004").scale(2)),
        ("D2", C("C112")),
        ("D3", C("C022")),
        ("D4", C("C004")),
        ("E1", C("C113")),
        ("F1", C("C213")),
        ("F2", C("C204")),
        ("F3", C("C123")),
        ("F4", C("C024")),
        ("G1", C("C214")),
        ("G2", C("C124")),
        ("H1", C("C215")),
        ("H2", C("C125")),
        ("I1", C("C036")),
        ("I2", C("C306")),
    ]
    entries = [
        _entry(alg, name, poly, name in _CENTRAL_NAMES) for name, poly in combos
    ]
    return GeneratorSet(algebra=alg, entries=entries)


def unbarred_basis(alg: LieAlgebraSpec) -> GeneratorSet:
    """The companion normalization of the same twenty generators.

    Shares names and spans with the barred basis; the degree-6 and
    degree-9 entries absorb decomposable tails and some entries carry
    different scalar factors.  This is the set the degree-by-degree
    construction lands on, up to row reduction.
    """
    C = lambda name: invariant(alg, name)
    half = GaussianRational("1/2")
    sixth = GaussianRational("1/6")
    combos = [
        ("b1", C("C200")),
        ("b2", C("C020")),
        ("b3", C("C002")),
        ("c1", C("C111") - C("C003").scale(GaussianRational("2/3"))),
        ("C2", C("C111")),
        ("d1", C("C202") + C("C022") - C("C112") - C("C004").scale(2)),
        ("D2", C("C112").scale(half)),
        ("D3", C("C022")),
        ("D4", C("C004")),
        ("E1", C("C113")),
        ("F1", C("C213")),
        ("F2", C("C204").scale(2) - poly_mul(C("C200"), C("C004"))),
        ("F3", C("C123")),
        ("F4", C("C024").scale(2) - poly_mul(C("C020"), C("C004"))),
        ("G1", C("C214")),
        ("G2", C("C124")),
        ("H1", C("C215")),
        ("H2", C("C125")),
        ("I1", C("C036").scale(-8)),
        (
            "I2",
            (
                C("C306")
                + poly_mul(C("C002"), C("C214"))
                + poly_mul(C("C003"), C("C213")).scale(sixth)
            ).scale(-4),
        ),
    ]
    entries = [
        _entry(alg, name, poly, name in _CENTRAL_NAMES) for name, poly in combos
    ]
    return GeneratorSet(algebra=alg, entries=entries)


@dataclass
class TranslationReport:
    """Outcome of verify_translation: one row per pipeline generator."""

    rows: list

    @property
    def complete(self) -> bool:
        return all(r["combo"] is not None for r in self.rows)

    def failures(self) -> list:
        return [r["name"] for r in self.rows if r["combo"] is None]

    def to_obj(self) -> dict:
        out_rows = []
        for r in self.rows:
            combo = r["combo"]
            out_rows.append(
                {
                    "name": r["name"],
                    "degree": r["degree"],
                    "combo": None
                    if combo is None
                    else [
                        {"product": list(ms), "re": str(c.re), "im": str(c.im)}
                        for ms, c in sorted(combo.items())
                    ],
                }
            )
        return {"complete": self.complete, "rows": out_rows}


def verify_translation(
    pipeline_gens: GeneratorSet, barred: GeneratorSet
) -> TranslationReport:
    """Express each pipeline generator in products of barred generators.

    Solves an exact linear system per generator over the degree-matched
    product multisets of the barred set (single factors included).  A row
    with combo None means the generator is outside the span, which would
    disprove the claimed translation; reports rather than raises.
    """
    rows = []
    for entry in pipeline_gens.entries:
        rows.append(
            {
                "name": entry.name,
                "degree": entry.degree,
                "combo": _express_in_products(barred, entry.polynomial, entry.degree),
            }
        )
    return TranslationReport(rows=rows)


def _express_in_products(gens: GeneratorSet, target: Polynomial, degree: int):
    multisets = list(product_multisets(gens, degree, min_factors=1))
    columns = [(ms, expand_product(gens, ms)) for ms in multisets]
    rhs_col = len(columns)
    row_index: dict = {}

    def row_of(mono):
        idx = row_index.get(mono)
        if idx is None:
            idx = len(row_index)
            row_index[mono] = idx
        return idx

    system_rows: list[dict] = []

    def put(ri, ci, coeff):
        while len(system_rows) <= ri:
            system_rows.append({})
        system_rows[ri][ci] = coeff

    for ci, (_, poly) in enumerate(columns):
        for mono, coeff in poly.terms.items():
            put(row_of(mono), ci, coeff)
    for mono, coeff in target.terms.items():
        put(row_of(mono), rhs_col, coeff)
    particular, _, dropped = solve_affine(system_rows, rhs_col + 1, rhs_col)
    if dropped:
        return None
    return {columns[ci][0]: v for ci, v in sorted(particular.items()) if v}
