"""Degree by degree solver for the Poisson commutant of a subalgebra.

commutant_basis sets up, for each total degree k, the linear system that a
homogeneous ansatz must satisfy to bracket to zero with every subalgebra
coordinate, and returns the canonical echelon basis of its solution space.
When the subalgebra action preserves coordinate blocks the system splits by
block multi-degree; when the subalgebra is a pair of three dimensional
rotation triples (the supermultiplet fixture) the solver additionally moves
to a complexified weight variable basis where the commutant is cut out by
just two raising derivations on the zero weight monomials, which is what
makes degrees 6 and 7 cheap.

The rest of the module turns solution spaces into a generating set:
filtering out products of lower degree generators, flagging central
elements, naming generators by degree letter, and locating Casimir
combinations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .ring import GR_ONE, GaussianRational, Polynomial, grlex_key, mpq
from .liealgebra import LieAlgebraSpec, poisson_bracket
from .grading import GradingSum, poly_grading
from . import linalg

__all__ = [
    "ansatz_dimension",
    "monomials_of_degree",
    "commutant_basis",
    "filter_indecomposable",
    "GeneratorEntry",
    "GeneratorSet",
    "is_casimir",
    "generator_pipeline",
    "casimir_combinations",
    "LabelingReport",
    "labeling_report",
    "expand_product",
]

_GR_ZERO = GaussianRational(0)


def ansatz_dimension(nvars: int, degree: int) -> int:
    """Monomial count of the homogeneous degree ansatz in nvars variables."""
    if degree < 0:
        return 0
    return comb(nvars + degree - 1, degree)


def monomials_of_degree(nvars: int, degree: int):
    """Degree-homogeneous exponent tuples in ascending graded lex order."""
    if nvars == 1:
        yield (degree,)
        return
    for e in range(degree + 1):
        for rest in monomials_of_degree(nvars - 1, degree - e):
            yield (e,) + rest


# ---------------------------------------------------------------------------
# derivation systems


def _sub_derivations(alg: LieAlgebraSpec) -> dict[int, dict[int, dict]]:
    """For v in the subalgebra: u -> {u': coeff} with {x_v, x_u} = sum coeff x_u'."""
    out: dict[int, dict[int, dict]] = {}
    for v in alg.subalgebra:
        row: dict[int, dict] = {}
        for u in range(alg.dim):
            targets = alg._pair_targets(v, u)
            if targets:
                row[u] = {k: c for k, c in targets}
        out[v] = row
    return out


def _action_block_preserving(alg: LieAlgebraSpec) -> bool:
    for v in alg.subalgebra:
        for u in range(alg.dim):
            for k, _ in alg._pair_targets(v, u):
                if alg.block_of[k] != alg.block_of[u]:
                    return False
    return True


def _block_degree_vectors(nblocks: int, k: int):
    yield from monomials_of_degree(nblocks, k)


def _block_monomials(alg: LieAlgebraSpec, block_deg: Sequence[int]) -> list[tuple]:
    """Monomials with the given per-block degrees, ascending graded lex."""
    per_block = []
    for b, members in enumerate(alg.blocks):
        per_block.append((members, list(monomials_of_degree(len(members), block_deg[b]))))
    monos = []

    def build(bidx: int, acc: list):
        if bidx == len(per_block):
            monos.append(tuple(acc))
            return
        members, partials = per_block[bidx]
        for pm in partials:
            nxt = list(acc)
            for m, e in zip(members, pm):
                nxt[m] = e
            build(bidx + 1, nxt)

    build(0, [0] * alg.dim)
    monos.sort(key=grlex_key)
    return monos


def _derivation_rows(
    derivs: dict[int, dict[int, dict]],
    monos: list[tuple],
) -> list[dict]:
    """Equation rows of {x_v, ansatz} = 0 over the given monomial columns."""
    rows: dict[tuple, dict[int, GaussianRational]] = {}
    for j, m in enumerate(monos):
        support = [(u, e) for u, e in enumerate(m) if e]
        for v, action in derivs.items():
            for u, e in support:
                tgt = action.get(u)
                if not tgt:
                    continue
                for u2, c in tgt.items():
                    lowered = list(m)
                    lowered[u] -= 1
                    lowered[u2] += 1
                    rm = (v, tuple(lowered))
                    row = rows.setdefault(rm, {})
                    cur = row.get(j)
                    val = c * e if cur is None else cur + c * e
                    if val:
                        row[j] = val
                    elif cur is not None:
                        del row[j]
    return [r for r in rows.values() if r]


def _vectors_to_polys(
    alg: LieAlgebraSpec, vectors: list[dict], monos: list[tuple]
) -> list[Polynomial]:
    out = []
    for vec in vectors:
        out.append(Polynomial(alg.dim, {monos[c]: v for c, v in vec.items()}))
    return out


def _canonicalize(alg: LieAlgebraSpec, polys: list[Polynomial]) -> list[Polynomial]:
    """Canonical echelon basis of span(polys), pivoting on leading monomials.

    Columns run through monomials in descending graded lex order, so each
    basis vector is monic in its leading term and the basis is sorted with
    the largest leading monomial first.
    """
    all_monos = sorted({m for p in polys for m in p.terms}, key=grlex_key, reverse=True)
    cols = {m: i for i, m in enumerate(all_monos)}
    rows = [{cols[m]: c for m, c in p.terms.items()} for p in polys if p.terms]
    if not rows:
        return []
    _, rref_rows = linalg.rref(rows, len(cols))
    return _vectors_to_polys(alg, rref_rows, all_monos)


# ---------------------------------------------------------------------------
# weight basis fast path for a pair of rotation triples


def _is_rotation_triple(alg: LieAlgebraSpec, trip: Sequence[int]) -> bool:
    if len(trip) != 3:
        return False
    a1, a2, a3 = trip
    eye = GaussianRational(0, 1)
    want = {
        (a1, a2): (a3, eye),
        (a2, a3): (a1, eye),
        (a3, a1): (a2, eye),
    }
    for (i, j), (k, c) in want.items():
        targets = dict(alg._pair_targets(i, j))
        if set(targets) != {k} or targets[k] != c:
            return False
    return True


def _detect_weight_setup(alg: LieAlgebraSpec):
    """Weight basis data when the subalgebra is two rotation triples; else None."""
    if len(alg.blocks) < 2:
        return None
    b0, b1 = alg.blocks[0], alg.blocks[1]
    if set(alg.subalgebra) != set(b0) | set(b1):
        return None
    if not (_is_rotation_triple(alg, b0) and _is_rotation_triple(alg, b1)):
        return None
    if not _action_block_preserving(alg):
        return None
    return _WeightBasis(alg)


class _WeightBasis:
    """Complexified coordinates diagonalizing both Cartan directions.

    Variables are indexed like the original coordinates (same blocks).  The
    commutant of the two triples equals, in these coordinates, the joint
    kernel of the two raising derivations restricted to weight (0,0)
    monomials: a zero weight vector killed by both raising operators spans a
    trivial module of each triple, complete reducibility does the rest.
    """

    def __init__(self, alg: LieAlgebraSpec):
        self.alg = alg
        n = alg.dim
        b0, b1 = alg.blocks[0], alg.blocks[1]
        h_s, h_t = b0[2], b1[2]

        basis: list[Polynomial] = [Polynomial(n)] * n
        weights: list[tuple] = [(0, 0)] * n
        eye = GaussianRational(0, 1)

        for (a1, a2, a3), tag in ((tuple(b0), 0), (tuple(b1), 1)):
            raise_p = alg.variable(a1) + alg.variable(a2).scale(eye)
            lower_p = alg.variable(a1) - alg.variable(a2).scale(eye)
            basis[a1] = raise_p
            basis[a2] = alg.variable(a3)
            basis[a3] = lower_p
            w = (1, 0) if tag == 0 else (0, 1)
            weights[a1] = w
            weights[a2] = (0, 0)
            weights[a3] = (-w[0], -w[1])

        for block in alg.blocks[2:]:
            vecs = self._joint_eigenbasis(block, h_s, h_t)
            for slot, (w, poly) in zip(block, vecs):
                basis[slot] = poly
                weights[slot] = w

        self.basis = basis
        self.weights = weights
        self.matrix = []  # rows: weight var -> coefficients over original vars
        for p in basis:
            row = [_GR_ZERO] * n
            for mono, c in p.terms.items():
                row[mono.index(1)] = c
            self.matrix.append(row)
        self.inverse = _invert_matrix(self.matrix)
        self.raising = (
            self._action_matrix(alg.blocks[0][0]),
            self._action_matrix(alg.blocks[1][0]),
        )
        self._expand_cache: dict[tuple, Polynomial] = {}

    def _joint_eigenbasis(self, block: Sequence[int], h_s: int, h_t: int):
        alg = self.alg
        m = len(block)
        pos = {u: i for i, u in enumerate(block)}

        def action_matrix(h):
            mat = [[_GR_ZERO] * m for _ in range(m)]
            for u in block:
                for k, c in alg._pair_targets(h, u):
                    mat[pos[k]][pos[u]] = c
            return mat

        a_s = action_matrix(h_s)
        a_t = action_matrix(h_t)
        eig_s = _integer_eigenvalues(a_s)
        eig_t = _integer_eigenvalues(a_t)

        out = []
        for ws in eig_s:
            p_s = _eigen_projector(a_s, ws, eig_s)
            for wt in eig_t:
                p_t = _eigen_projector(a_t, wt, eig_t)
                prod = _mat_mul(p_s, p_t)
                vectors = _column_space_basis(prod)
                for vec in vectors:
                    poly = Polynomial(
                        alg.dim,
                        {
                            tuple(1 if i == block[r] else 0 for i in range(alg.dim)): c
                            for r, c in enumerate(vec)
                            if c
                        },
                    )
                    out.append(((ws, wt), poly))
        if len(out) != m:
            raise RuntimeError("joint eigenbasis construction failed")
        return out

    def _action_matrix(self, raiser_var: int):
        """Raising derivation on weight variables: u -> {u': coeff}."""
        alg = self.alg
        n = alg.dim
        raiser = self.basis[raiser_var]
        out: dict[int, dict[int, GaussianRational]] = {}
        for u in range(n):
            img = poisson_bracket(raiser, self.basis[u], alg)
            if img.is_zero():
                continue
            coeffs = [_GR_ZERO] * n
            for mono, c in img.terms.items():
                coeffs[mono.index(1)] = c
            row = {}
            for u2 in range(n):
                acc = _GR_ZERO
                for x in range(n):
                    v = self.inverse[x][u2]
                    if v and coeffs[x]:
                        acc = acc + coeffs[x] * v
                if acc:
                    row[u2] = acc
            out[u] = row
        return out

    def expand_mono(self, mono: tuple) -> Polynomial:
        """Weight monomial as a polynomial in the original coordinates."""
        cached = self._expand_cache.get(mono)
        if cached is not None:
            return cached
        if not any(mono):
            poly = Polynomial.constant(self.alg.dim, GR_ONE)
        else:
            u = next(i for i, e in enumerate(mono) if e)
            sub = list(mono)
            sub[u] -= 1
            poly = self.expand_mono(tuple(sub)) * self.basis[u]
        self._expand_cache[mono] = poly
        return poly

    def solve_block(self, block_deg: Sequence[int]) -> list[Polynomial]:
        alg = self.alg
        monos = _block_monomials(alg, block_deg)
        weights = self.weights
        zero_weight = []
        for m in monos:
            ws = sum(e * weights[u][0] for u, e in enumerate(m) if e)
            wt = sum(e * weights[u][1] for u, e in enumerate(m) if e)
            if ws == 0 and wt == 0:
                zero_weight.append(m)
        if not zero_weight:
            return []

        rows: dict[tuple, dict[int, GaussianRational]] = {}
        for j, m in enumerate(zero_weight):
            support = [(u, e) for u, e in enumerate(m) if e]
            for op_id, action in enumerate(self.raising):
                for u, e in support:
                    tgt = action.get(u)
                    if not tgt:
                        continue
                    for u2, c in tgt.items():
                        lowered = list(m)
                        lowered[u] -= 1
                        lowered[u2] += 1
                        rm = (op_id, tuple(lowered))
                        row = rows.setdefault(rm, {})
                        cur = row.get(j)
                        val = c * e if cur is None else cur + c * e
                        if val:
                            row[j] = val
                        elif cur is not None:
                            del row[j]

        null = linalg.nullspace([r for r in rows.values() if r], len(zero_weight))
        polys = []
        for vec in null:
            acc = Polynomial(alg.dim)
            for cidx, coeff in vec.items():
                acc = acc + self.expand_mono(zero_weight[cidx]).scale(coeff)
            polys.append(acc)
        return _canonicalize(alg, polys)


def _integer_eigenvalues(mat) -> list[int]:
    """Integer spectrum of a small exactly diagonalizable matrix."""
    m = len(mat)
    found = []
    total = 0
    for lam in range(-m, m + 1):
        rows = []
        for r in range(m):
            row = {}
            for c in range(m):
                v = mat[r][c] - (GaussianRational(lam) if r == c else _GR_ZERO)
                if v:
                    row[c] = v
            rows.append(row)
        dim = m - len(linalg.rref(rows, m)[0])
        if dim:
            found.append(lam)
            total += dim
    if total != m:
        raise RuntimeError("matrix is not diagonalizable over the integers")
    return found


def _eigen_projector(mat, lam: int, spectrum: Sequence[int]):
    m = len(mat)
    proj = [[GR_ONE if r == c else _GR_ZERO for c in range(m)] for r in range(m)]
    for mu in spectrum:
        if mu == lam:
            continue
        shifted = [
            [
                mat[r][c] - (GaussianRational(mu) if r == c else _GR_ZERO)
                for c in range(m)
            ]
            for r in range(m)
        ]
        scale = GR_ONE / GaussianRational(lam - mu)
        shifted = [[v * scale for v in row] for row in shifted]
        proj = _mat_mul(proj, shifted)
    return proj


def _mat_mul(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    out = [[_GR_ZERO] * m for _ in range(n)]
    for i in range(n):
        for k in range(mid):
            v = a[i][k]
            if not v:
                continue
            rowb = b[k]
            rowo = out[i]
            for j in range(m):
                if rowb[j]:
                    rowo[j] = rowo[j] + v * rowb[j]
    return out


def _column_space_basis(mat) -> list[list[GaussianRational]]:
    """Canonical echelon basis of the column space, as column vectors."""
    m = len(mat)
    rows = []
    for c in range(m):
        row = {r: mat[r][c] for r in range(m) if mat[r][c]}
        if row:
            rows.append(row)
    if not rows:
        return []
    _, rref_rows = linalg.rref(rows, m)
    out = []
    for row in rref_rows:
        vec = [_GR_ZERO] * m
        for c, v in row.items():
            vec[c] = v
        out.append(vec)
    return out


def _invert_matrix(mat):
    n = len(mat)
    rows = []
    for r in range(n):
        row = {c: mat[r][c] for c in range(n) if mat[r][c]}
        for c in range(n):
            if r == c:
                row[n + c] = GR_ONE
        rows.append(row)
    pivots, rref_rows = linalg.rref(rows, 2 * n, frozen_cols=range(n, 2 * n))
    if pivots != list(range(n)):
        raise RuntimeError("matrix is singular")
    inv = [[_GR_ZERO] * n for _ in range(n)]
    for r, row in enumerate(rref_rows):
        for c, v in row.items():
            if c >= n:
                inv[r][c - n] = v
    return inv


# ---------------------------------------------------------------------------
# public solver


def commutant_basis(
    alg: LieAlgebraSpec, degree: int, method: str = "auto"
) -> list[Polynomial]:
    """Canonical basis of degree-homogeneous polynomials commuting with the
    subalgebra coordinates.

    method: "auto" picks the weight fast path when the subalgebra is a pair
    of rotation triples, otherwise the generic sparse solve; "generic" and
    "weight" force a path.
    """
    if degree <= 0:
        return []
    weight = None
    if method in ("auto", "weight"):
        weight = _detect_weight_setup(alg)
        if method == "weight" and weight is None:
            raise ValueError("weight method requires a pair of rotation triples")
    use_weight = weight is not None and method != "generic"

    if not alg.subalgebra:
        monos = list(monomials_of_degree(alg.dim, degree))
        return [Polynomial(alg.dim, {m: GR_ONE}) for m in monos]

    split = _action_block_preserving(alg)
    solutions: list[Polynomial] = []
    if split:
        derivs = None if use_weight else _sub_derivations(alg)
        for bd in _block_degree_vectors(len(alg.blocks), degree):
            if use_weight:
                solutions.extend(weight.solve_block(bd))
            else:
                monos = _block_monomials(alg, bd)
                rows = _derivation_rows(derivs, monos)
                null = linalg.nullspace(rows, len(monos))
                solutions.extend(
                    _canonicalize(alg, _vectors_to_polys(alg, null, monos))
                )
    else:
        derivs = _sub_derivations(alg)
        monos = list(monomials_of_degree(alg.dim, degree))
        rows = _derivation_rows(derivs, monos)
        null = linalg.nullspace(rows, len(monos))
        solutions.extend(_canonicalize(alg, _vectors_to_polys(alg, null, monos)))

    solutions.sort(
        key=lambda p: grlex_key(max(p.terms, key=grlex_key)), reverse=True
    )
    return solutions


# ---------------------------------------------------------------------------
# products of generators and indecomposable filtering

_PRODUCT_CACHE: dict = {}


def expand_product(gens: "GeneratorSet", multiset: Sequence[str]) -> Polynomial:
    """Expanded polynomial of a product of named generators."""
    multiset = tuple(sorted(multiset))
    key = (gens.content_hash(), multiset)
    got = _PRODUCT_CACHE.get(key)
    if got is not None:
        return got
    if not multiset:
        raise ValueError("empty product")
    if len(multiset) == 1:
        poly = gens.entry(multiset[0]).polynomial
    else:
        poly = expand_product(gens, multiset[:-1]) * gens.entry(multiset[-1]).polynomial
    _PRODUCT_CACHE[key] = poly
    return poly


def product_multisets(gens: "GeneratorSet", degree: int, min_factors: int = 2):
    """Sorted-name multisets of generators with total degree equal to degree."""
    entries = [(e.name, e.degree) for e in gens.entries]
    out: list[tuple] = []

    def rec(start: int, remaining: int, acc: tuple):
        if remaining == 0:
            if len(acc) >= min_factors:
                out.append(acc)
            return
        for i in range(start, len(entries)):
            name, d = entries[i]
            if d > remaining:
                continue
            rec(i, remaining - d, acc + (name,))

    rec(0, degree, ())
    return sorted(out)


def filter_indecomposable(
    alg: LieAlgebraSpec,
    solutions: Sequence[Polynomial],
    gens: "GeneratorSet",
    degree: int,
):
    """Split commutant solutions into fresh generators and product relations.

    Returns (new_polys, relations): new_polys is the canonical echelon basis
    of the solution span modulo products of lower degree generators, and
    relations records, for each solution lying in the product span, its
    exact product combination as {multiset: coefficient}.
    """
    multisets = product_multisets(gens, degree)
    products = [(ms, expand_product(gens, ms)) for ms in multisets]

    cols: dict[tuple, int] = {}
    for _, p in products:
        for m in p.terms:
            cols.setdefault(m, None)
    for s in solutions:
        for m in s.terms:
            cols.setdefault(m, None)
    ordered = sorted(cols, key=grlex_key, reverse=True)
    cols = {m: i for i, m in enumerate(ordered)}

    span_rows: list[dict] = []
    for _, p in products:
        span_rows.append({cols[m]: c for m, c in p.terms.items()})
    if span_rows:
        _, span_rref = linalg.rref(span_rows, len(cols))
    else:
        span_rref = []

    pivot_of = {min(row): row for row in span_rref}

    residuals: list[Polynomial] = []
    relations: list[tuple] = []
    for sidx, s in enumerate(solutions):
        vec = {cols[m]: c for m, c in s.terms.items()}
        _reduce_against(vec, pivot_of)
        if not vec:
            combo = _solve_product_combo(products, cols, s)
            relations.append((sidx, combo))
        else:
            residuals.append(Polynomial(alg.dim, {ordered[c]: v for c, v in vec.items()}))

    new_polys = _canonicalize(alg, residuals)
    return new_polys, relations


def _reduce_against(vec: dict, pivots: dict[int, dict]) -> None:
    """Project vec onto the complement of the RREF rows keyed by pivot column.

    Rows must come from a reduced echelon form: unit pivots, each pivot
    column supported on its own row only, so elimination order is immaterial
    and vec ends with no support on any pivot column.
    """
    for pc in [c for c in list(vec) if c in pivots]:
        factor = vec.get(pc)
        if not factor:
            continue
        row = pivots[pc]
        for c, v in row.items():
            cur = vec.get(c)
            nv = -(factor * v) if cur is None else cur - factor * v
            if nv:
                vec[c] = nv
            elif cur is not None:
                del vec[c]


def _solve_product_combo(products, cols, target: Polynomial) -> dict:
    ncand = len(products)
    rows_by_mono: dict[int, dict] = {}
    for ci, (_, p) in enumerate(products):
        for m, c in p.terms.items():
            rows_by_mono.setdefault(cols[m], {})[ci] = c
    for m, c in target.terms.items():
        rows_by_mono.setdefault(cols[m], {})[ncand] = c
    sol, _null, dropped = linalg.solve_affine(
        list(rows_by_mono.values()), ncand + 1, ncand
    )
    if dropped:
        raise AssertionError("declared-decomposable solution failed to resolve")
    return {products[ci][0]: v for ci, v in sorted(sol.items()) if v}


# ---------------------------------------------------------------------------
# generator bookkeeping


@dataclass
class GeneratorEntry:
    name: str
    polynomial: Polynomial
    degree: int
    grading: GradingSum
    central: bool

    def to_obj(self) -> dict:
        return {
            "name": self.name,
            "degree": self.degree,
            "central": self.central,
            "grading": [list(g) for g in self.grading],
            "polynomial": self.polynomial.to_obj(),
        }


@dataclass
class GeneratorSet:
    """Named generating set of the commutant algebra.

    counts maps degree to the number of generators of that degree;
    max_degree is the top generator degree; total the generator count.
    relations holds the product combinations of decomposable commutant
    solutions met along the way, as (degree, solution_index, combo) rows.
    """

    algebra: LieAlgebraSpec
    entries: list[GeneratorEntry] = field(default_factory=list)
    relations: list = field(default_factory=list)
    _hash: str | None = None
    _index: dict = None

    def __post_init__(self):
        self._index = {e.name: e for e in self.entries}

    @property
    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for e in self.entries:
            out[e.degree] = out.get(e.degree, 0) + 1
        return dict(sorted(out.items()))

    @property
    def max_degree(self) -> int:
        return max((e.degree for e in self.entries), default=0)

    @property
    def total(self) -> int:
        return len(self.entries)

    def entry(self, name: str) -> GeneratorEntry:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def central_names(self) -> list[str]:
        return [e.name for e in self.entries if e.central]

    def by_degree(self, degree: int) -> list[GeneratorEntry]:
        return [e for e in self.entries if e.degree == degree]

    def add(self, entry: GeneratorEntry) -> None:
        if entry.name in self._index:
            raise ValueError(f"duplicate generator name {entry.name}")
        self.entries.append(entry)
        self._index[entry.name] = entry
        self._hash = None

    def content_hash(self) -> str:
        if self._hash is None:
            import hashlib
            import json

            blob = json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":"))
            self._hash = hashlib.sha256(blob.encode()).hexdigest()
        return self._hash

    def to_obj(self) -> dict:
        return {
            "algebra": self.algebra.to_obj(),
            "entries": [e.to_obj() for e in self.entries],
            "relations": [
                {
                    "degree": degree,
                    "solution": sidx,
                    "combo": [
                        {"product": list(ms), "re": str(c.re), "im": str(c.im)}
                        for ms, c in sorted(combo.items())
                    ],
                }
                for degree, sidx, combo in self.relations
            ],
        }

    @classmethod
    def from_obj(cls, obj) -> "GeneratorSet":
        alg = LieAlgebraSpec.from_obj(obj["algebra"])
        entries = []
        for e in obj["entries"]:
            entries.append(
                GeneratorEntry(
                    name=e["name"],
                    polynomial=Polynomial.from_obj(e["polynomial"]),
                    degree=int(e["degree"]),
                    grading=GradingSum(tuple(g) for g in e["grading"]),
                    central=bool(e["central"]),
                )
            )
        relations = []
        for r in obj.get("relations", []):
            combo = {
                tuple(item["product"]): GaussianRational.from_strings(
                    item["re"], item["im"]
                )
                for item in r["combo"]
            }
            relations.append((int(r["degree"]), int(r["solution"]), combo))
        return cls(algebra=alg, entries=entries, relations=relations)


_DEGREE_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _degree_letter(degree: int) -> str:
    if degree < 1 or degree > len(_DEGREE_LETTERS):
        raise ValueError(f"no name letter for degree {degree}")
    return _DEGREE_LETTERS[degree - 1]


def is_casimir(alg: LieAlgebraSpec, poly: Polynomial) -> bool:
    """True when the polynomial brackets to zero with every coordinate."""
    for v in range(alg.dim):
        if not poisson_bracket(alg.variable(v), poly, alg).is_zero():
            return False
    return True


def _central_split(alg: LieAlgebraSpec, polys, against):
    """Split span(polys) into the part bracketing to zero with every
    polynomial in against, plus a canonical complement.

    Centrality here is relative to the generated algebra: commuting with
    the generators extends to brackets by the Jacobi identity and to
    products by the Leibniz rule.
    """
    if not polys:
        return [], []
    rows_by_eq: dict[tuple, dict] = {}
    for pi, p in enumerate(polys):
        for gi, g in enumerate(against):
            img = poisson_bracket(p, g, alg)
            for mono, c in img.terms.items():
                rows_by_eq.setdefault((gi, mono), {})[pi] = c
    null = linalg.nullspace(list(rows_by_eq.values()), len(polys))

    central = []
    for vec in null:
        acc = Polynomial(alg.dim)
        for pi, c in vec.items():
            acc = acc + polys[pi].scale(c)
        central.append(acc)
    central = _canonicalize(alg, central)

    # complete with noncentral representatives reduced against the centrals
    cols = sorted({m for p in polys for m in p.terms}, key=grlex_key, reverse=True)
    col_of = {m: i for i, m in enumerate(cols)}
    pivots: dict[int, dict] = {}
    for p in central:
        vec = {col_of[m]: c for m, c in p.terms.items()}
        pivots[min(vec)] = vec
    residues = []
    for p in polys:
        vec = {col_of[m]: c for m, c in p.terms.items()}
        _reduce_against(vec, pivots)
        if vec:
            residues.append(Polynomial(alg.dim, {cols[c]: v for c, v in vec.items()}))
    noncentral = _canonicalize(alg, residues)
    return central, noncentral


def generator_pipeline(
    alg: LieAlgebraSpec,
    max_degree: int,
    method: str = "auto",
    progress=None,
) -> GeneratorSet:
    """Run the commutant solves degree by degree and collect generators.

    Central generators (zero bracket with every other generator) come first
    at each degree with lowercase degree letters; the rest follow uppercase;
    subscripts number the degree's generators consecutively, so names look
    like b1, c1, C2, d1, D2, ...  Centrality needs the whole generator list,
    so naming happens in a second pass over the collected degree spans.
    """
    stage = GeneratorSet(algebra=alg)
    solutions_at: dict[int, list[Polynomial]] = {}
    new_at: dict[int, list[Polynomial]] = {}
    for k in range(1, max_degree + 1):
        if progress:
            progress(f"degree {k}: solving commutant")
        sols = commutant_basis(alg, k, method=method)
        new_polys, _ = filter_indecomposable(alg, sols, stage, k)
        solutions_at[k] = sols
        new_at[k] = new_polys
        for i, p in enumerate(new_polys):
            stage.add(
                GeneratorEntry(f"tmp{k}.{i}", p, k, poly_grading(alg, p), False)
            )
        if progress:
            progress(
                f"degree {k}: {len(sols)} solutions, {len(new_polys)} new generators"
            )

    all_polys = [e.polynomial for e in stage.entries]
    gens = GeneratorSet(algebra=alg)
    for k in sorted(new_at):
        if not new_at[k]:
            continue
        central, noncentral = _central_split(alg, new_at[k], all_polys)
        letter = _degree_letter(k)
        idx = 1
        for p in central:
            gens.add(GeneratorEntry(f"{letter.lower()}{idx}", p, k, poly_grading(alg, p), True))
            idx += 1
        for p in noncentral:
            gens.add(GeneratorEntry(f"{letter.upper()}{idx}", p, k, poly_grading(alg, p), False))
            idx += 1

    # product relations expressed in the final named basis
    for k, sols in solutions_at.items():
        if not sols:
            continue
        _, relations = filter_indecomposable(alg, sols, gens, k)
        for sidx, combo in relations:
            gens.relations.append((k, sidx, combo))
    return gens


# ---------------------------------------------------------------------------
# Casimir combinations


def casimir_combinations(
    alg: LieAlgebraSpec, gens: GeneratorSet, max_degree: int
) -> list[dict]:
    """Primitive Casimir polynomials expressed in the generator basis.

    For each degree the full-center solutions (zero bracket with every
    coordinate) are reduced modulo products of lower degree Casimirs; each
    primitive direction is solved as a combination of generator products of
    its degree (single generators included).
    """
    full = LieAlgebraSpec(
        dim=alg.dim,
        names=alg.names,
        structure=alg.structure,
        blocks=[list(range(alg.dim))],
        subalgebra=range(alg.dim),
        validate=False,
    )
    found: list[dict] = []
    lower: list[tuple[int, Polynomial]] = []
    for k in range(1, max_degree + 1):
        space = commutant_basis(full, k, method="generic")
        if not space:
            continue
        # reduce against products of lower degree Casimirs
        prod_polys: list[Polynomial] = []

        def casimir_products(remaining, start, acc):
            if remaining == 0 and len(acc) >= 2:
                poly = acc[0]
                for q in acc[1:]:
                    poly = poly * q
                prod_polys.append(poly)
                return
            for i in range(start, len(lower)):
                d, p = lower[i]
                if d <= remaining:
                    casimir_products(remaining - d, i, acc + [p])

        casimir_products(k, 0, [])
        cols = sorted(
            {m for p in space for m in p.terms}
            | {m for p in prod_polys for m in p.terms},
            key=grlex_key,
            reverse=True,
        )
        col_of = {m: i for i, m in enumerate(cols)}
        pivots: dict[int, dict] = {}
        if prod_polys:
            rows = [{col_of[m]: c for m, c in p.terms.items()} for p in prod_polys]
            _, rref_rows = linalg.rref(rows, len(cols))
            for row in rref_rows:
                pivots[min(row)] = row
        fresh = []
        for p in space:
            vec = {col_of[m]: c for m, c in p.terms.items()}
            _reduce_against(vec, pivots)
            if vec:
                fresh.append(Polynomial(alg.dim, {cols[c]: v for c, v in vec.items()}))
        fresh = _canonicalize(alg, fresh)
        for fi, p in enumerate(fresh):
            combo = _express_in_generator_products(gens, p, k)
            name = f"casimir[{k}]" if len(fresh) == 1 else f"casimir[{k}].{fi+1}"
            found.append(
                {
                    "name": name,
                    "degree": k,
                    "polynomial": p,
                    "combination": combo,
                }
            )
            lower.append((k, p))
    return found


def _express_in_generator_products(gens: GeneratorSet, target: Polynomial, degree: int):
    multisets = product_multisets(gens, degree, min_factors=1)
    products = [(ms, expand_product(gens, ms)) for ms in multisets]
    cols: dict[tuple, int] = {}
    for _, p in products:
        for m in p.terms:
            cols.setdefault(m, len(cols))
    for m in target.terms:
        if m not in cols:
            return None
    rows_by_mono: dict[int, dict] = {}
    ncand = len(products)
    for ci, (_, p) in enumerate(products):
        for m, c in p.terms.items():
            rows_by_mono.setdefault(cols[m], {})[ci] = c
    for m, c in target.terms.items():
        rows_by_mono.setdefault(cols[m], {})[ncand] = c
    sol, _null, dropped = linalg.solve_affine(
        list(rows_by_mono.values()), ncand + 1, ncand
    )
    if dropped:
        return None
    return {products[ci][0]: v for ci, v in sorted(sol.items()) if v}


# ---------------------------------------------------------------------------
# label counting report


@dataclass
class LabelingReport:
    """Label budget of the reduction chain.

    internal_labels counts the states a full multiplet needs beyond the
    subalgebra labels; missing_pairs solves internal_labels =
    2 * missing_pairs + invariants + sub_invariants and need not be an
    integer, in which case integral is False and the chain demands a closer
    look before use.
    """

    dim_algebra: int
    dim_subalgebra: int
    ell0: int
    invariants: int
    sub_invariants: int
    internal_labels: int
    missing_pairs: object
    integral: bool

    def to_obj(self) -> dict:
        return {
            "dim_algebra": self.dim_algebra,
            "dim_subalgebra": self.dim_subalgebra,
            "ell0": self.ell0,
            "invariants": self.invariants,
            "sub_invariants": self.sub_invariants,
            "internal_labels": self.internal_labels,
            "missing_pairs": str(self.missing_pairs),
            "integral": self.integral,
        }


def labeling_report(
    dim_algebra: int,
    dim_subalgebra: int,
    ell0: int,
    invariants: int,
    sub_invariants: int,
) -> LabelingReport:
    internal = dim_algebra - dim_subalgebra + ell0
    pairs = mpq(internal - invariants - sub_invariants, 2)
    return LabelingReport(
        dim_algebra=dim_algebra,
        dim_subalgebra=dim_subalgebra,
        ell0=ell0,
        invariants=invariants,
        sub_invariants=sub_invariants,
        internal_labels=internal,
        missing_pairs=pairs,
        integral=pairs.denominator == 1,
    )
