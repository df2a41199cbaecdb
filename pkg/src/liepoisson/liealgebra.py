"""Lie algebra specifications and the induced Lie-Poisson bracket.

A LieAlgebraSpec pins down a finite dimensional Lie algebra by structure
constants over Q(i), a distinguished subalgebra, and an ordered partition of
the coordinates into blocks.  The symmetric algebra of the dual carries the
Lie-Poisson bracket

    {p, q} = sum_{i<j,k} c_ij^k x_k (dp/dx_i dq/dx_j - dp/dx_j dq/dx_i)

which is what everything downstream computes with.  Validation is exhaustive
and errors name the offending structure triple, since a silently wrong
constant would poison every later result.
"""

from __future__ import annotations

import hashlib
import json
from typing import Iterable, Mapping, Sequence

from .ring import (
    GR_ONE,
    GaussianRational,
    PACK_BITS,
    Polynomial,
    dict_accum,
    dict_mul,
    join_packed,
    split_packed,
)

__all__ = [
    "LieAlgebraSpec",
    "load_algebra",
    "su4_supermultiplet",
    "poisson_bracket",
    "bracket_coordinates",
]


class StructureError(ValueError):
    """Raised when structure constants violate a Lie algebra axiom."""


class LieAlgebraSpec:
    """Structure constants plus block and subalgebra bookkeeping.

    structure maps ordered pairs (i, j) with i < j to {k: coefficient}.
    Antisymmetry is representational: only i < j is stored, and the bracket
    expansion supplies the sign for the mirrored pair.
    """

    __slots__ = (
        "dim",
        "names",
        "blocks",
        "subalgebra",
        "structure",
        "block_of",
        "block_brackets",
        "_hash",
    )

    def __init__(
        self,
        dim: int,
        names: Sequence[str],
        structure: Mapping,
        blocks: Sequence[Sequence[int]],
        subalgebra: Iterable[int],
        block_brackets: Mapping | None = None,
        validate: bool = True,
    ):
        self.dim = int(dim)
        self.names = tuple(names)
        self.blocks = tuple(tuple(int(v) for v in b) for b in blocks)
        self.subalgebra = tuple(sorted(int(v) for v in set(subalgebra)))

        cleaned: dict[tuple, dict[int, GaussianRational]] = {}
        for (i, j), targets in structure.items():
            row = {}
            for k, coeff in targets.items():
                if not isinstance(coeff, GaussianRational):
                    coeff = GaussianRational(coeff)
                if coeff:
                    row[int(k)] = coeff
            if row:
                cleaned[(int(i), int(j))] = row
        self.structure = cleaned

        block_of = [-1] * self.dim
        for b, members in enumerate(self.blocks):
            for v in members:
                block_of[v] = b
        self.block_of = tuple(block_of)

        if block_brackets is None:
            derived: dict[tuple, set] = {}
            for (i, j), targets in self.structure.items():
                r, s = sorted((self.block_of[i], self.block_of[j]))
                derived.setdefault((r, s), set()).update(
                    self.block_of[k] for k in targets
                )
            self.block_brackets = {rs: frozenset(t) for rs, t in derived.items()}
        else:
            self.block_brackets = {
                tuple(sorted(rs)): frozenset(t) for rs, t in block_brackets.items()
            }
        self._hash = None
        if validate:
            self.validate()

    # -- validation ----------------------------------------------------

    def validate(self) -> None:
        if len(self.names) != self.dim:
            raise StructureError(f"{len(self.names)} names for dim {self.dim}")
        if len(set(self.names)) != self.dim:
            raise StructureError("coordinate names must be distinct")

        seen = set()
        for b in self.blocks:
            for v in b:
                if not 0 <= v < self.dim:
                    raise StructureError(f"block member {v} out of range")
                if v in seen:
                    raise StructureError(f"coordinate {v} appears in two blocks")
                seen.add(v)
        if seen != set(range(self.dim)):
            raise StructureError("blocks must partition all coordinates")

        for v in self.subalgebra:
            if not 0 <= v < self.dim:
                raise StructureError(f"subalgebra member {v} out of range")

        for (i, j), targets in self.structure.items():
            if not (0 <= i < j < self.dim):
                raise StructureError(
                    f"structure pair ({i},{j}) must satisfy 0 <= i < j < dim"
                )
            for k in targets:
                if not 0 <= k < self.dim:
                    raise StructureError(f"structure target ({i},{j})->{k} out of range")

        self._check_jacobi()
        self._check_subalgebra_closed()
        self._check_block_compatibility()

    def structure_coeff(self, i: int, j: int, k: int) -> GaussianRational:
        """c_ij^k for any index order, antisymmetry applied."""
        if i == j:
            return GaussianRational(0)
        if i < j:
            return self.structure.get((i, j), {}).get(k, GaussianRational(0))
        c = self.structure.get((j, i), {}).get(k, GaussianRational(0))
        return -c

    def _check_jacobi(self) -> None:
        n = self.dim
        # adjacency from each generator for the sparse double sum
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    acc: dict[int, GaussianRational] = {}
                    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                        # {x_c, {x_a, x_b}} = sum_m c_ab^m c_cm^n
                        for m, cab in self._pair_targets(a, b):
                            for nn, ccm in self._pair_targets(c, m):
                                prev = acc.get(nn)
                                val = cab * ccm if prev is None else prev + cab * ccm
                                acc[nn] = val
                    for nn, val in acc.items():
                        if val:
                            raise StructureError(
                                f"Jacobi identity fails on triple ({i},{j},{k})"
                                f" with residue on coordinate {nn}"
                            )

    def _pair_targets(self, i: int, j: int):
        if i == j:
            return ()
        if i < j:
            return tuple(self.structure.get((i, j), {}).items())
        return tuple((k, -c) for k, c in self.structure.get((j, i), {}).items())

    def _check_subalgebra_closed(self) -> None:
        sub = set(self.subalgebra)
        for i in self.subalgebra:
            for j in self.subalgebra:
                if i >= j:
                    continue
                for k in self.structure.get((i, j), {}):
                    if k not in sub:
                        raise StructureError(
                            f"subalgebra not closed: ({i},{j})->{k} leaves it"
                        )

    def _check_block_compatibility(self) -> None:
        for (i, j), targets in self.structure.items():
            rs = tuple(sorted((self.block_of[i], self.block_of[j])))
            allowed = self.block_brackets.get(rs, frozenset())
            for k in targets:
                if self.block_of[k] not in allowed:
                    raise StructureError(
                        f"structure triple ({i},{j})->{k} lands outside the "
                        f"declared target blocks {sorted(allowed)} for block pair {rs}"
                    )

    # -- serialization ---------------------------------------------------

    def to_obj(self) -> dict:
        entries = []
        for (i, j) in sorted(self.structure):
            for k in sorted(self.structure[(i, j)]):
                c = self.structure[(i, j)][k]
                entries.append({"i": i, "j": j, "k": k, "re": str(c.re), "im": str(c.im)})
        return {
            "dim": self.dim,
            "names": list(self.names),
            "blocks": [list(b) for b in self.blocks],
            "subalgebra": list(self.subalgebra),
            "structure": entries,
        }

    @classmethod
    def from_obj(cls, obj: Mapping) -> "LieAlgebraSpec":
        structure: dict[tuple, dict] = {}
        for entry in obj["structure"]:
            i, j, k = int(entry["i"]), int(entry["j"]), int(entry["k"])
            coeff = GaussianRational.from_strings(entry["re"], entry.get("im", "0"))
            row = structure.setdefault((i, j), {})
            if k in row:
                raise StructureError(f"duplicate structure entry ({i},{j})->{k}")
            row[k] = coeff
        return cls(
            dim=obj["dim"],
            names=obj["names"],
            structure=structure,
            blocks=obj["blocks"],
            subalgebra=obj["subalgebra"],
            block_brackets=None,
        )

    def content_hash(self) -> str:
        if self._hash is None:
            blob = json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":"))
            self._hash = hashlib.sha256(blob.encode()).hexdigest()
        return self._hash

    def variable(self, index: int) -> Polynomial:
        return Polynomial.variable(index, self.dim)

    def name_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate name {name!r}") from None

    def __repr__(self) -> str:
        return (
            f"LieAlgebraSpec(dim={self.dim}, blocks={[len(b) for b in self.blocks]}, "
            f"subalgebra={len(self.subalgebra)})"
        )


def load_algebra(source) -> LieAlgebraSpec:
    """Load and validate an algebra from a path, JSON string, or mapping."""
    if isinstance(source, LieAlgebraSpec):
        return source
    if isinstance(source, Mapping):
        return LieAlgebraSpec.from_obj(source)
    text = None
    try:
        with open(source, "r") as fh:
            text = fh.read()
    except (OSError, TypeError):
        if isinstance(source, (str, bytes)):
            text = source
        else:
            raise
    return LieAlgebraSpec.from_obj(json.loads(text))


# ---------------------------------------------------------------------------
# the built-in fixture: su(4) restricted to su(2) x su(2)


def _epsilon(i: int, j: int, k: int) -> int:
    if (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        return 1
    if (i, j, k) in ((2, 1, 0), (1, 0, 2), (0, 2, 1)):
        return -1
    return 0


def su4_supermultiplet() -> LieAlgebraSpec:
    """su(4) in the spin/isospin coordinate system s_i, t_a, q_ia.

    The subalgebra is the su(2) x su(2) span of the s and t coordinates and
    the q block transforms as the (3,3) bitensor.  All brackets carry the
    factor i, and the q-q bracket the additional 1/4, so the coordinates
    match the physics normalization used for supermultiplet labels.
    """
    names = ["s1", "s2", "s3", "t1", "t2", "t3"]
    for i in range(3):
        for a in range(3):
            names.append(f"q{i+1}{a+1}")

    def s_idx(i):
        return i

    def t_idx(a):
        return 3 + a

    def q_idx(i, a):
        return 6 + 3 * i + a

    I = GaussianRational(0, 1)
    I4 = GaussianRational(0, "1/4")

    structure: dict[tuple, dict[int, GaussianRational]] = {}

    def put(i, j, k, coeff):
        if not coeff:
            return
        if i == j:
            raise AssertionError("diagonal bracket")
        if i > j:
            i, j, coeff = j, i, -coeff
        row = structure.setdefault((i, j), {})
        row[k] = row.get(k, GaussianRational(0)) + coeff

    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = _epsilon(i, j, k)
                if e and i < j:
                    put(s_idx(i), s_idx(j), s_idx(k), I * e)
                    put(t_idx(i), t_idx(j), t_idx(k), I * e)

    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = _epsilon(i, j, k)
                if not e:
                    continue
                for a in range(3):
                    # {s_i, q_ja} = i eps_ijk q_ka ; {t_a, q_ib} = i eps_abc q_ic
                    put(s_idx(i), q_idx(j, a), q_idx(k, a), I * e)
                    put(t_idx(i), q_idx(a, j), q_idx(a, k), I * e)

    for i in range(3):
        for a in range(3):
            for j in range(3):
                for b in range(3):
                    ii, jj = q_idx(i, a), q_idx(j, b)
                    if ii >= jj:
                        continue
                    if a == b:
                        for k in range(3):
                            e = _epsilon(i, j, k)
                            if e:
                                put(ii, jj, s_idx(k), I4 * e)
                    if i == j:
                        for c in range(3):
                            e = _epsilon(a, b, c)
                            if e:
                                put(ii, jj, t_idx(c), I4 * e)

    return LieAlgebraSpec(
        dim=15,
        names=names,
        structure=structure,
        blocks=[[0, 1, 2], [3, 4, 5], list(range(6, 15))],
        subalgebra=range(6),
        block_brackets={
            (0, 0): {0},
            (1, 1): {1},
            (0, 2): {2},
            (1, 2): {2},
            (2, 2): {0, 1},
        },
    )


# ---------------------------------------------------------------------------
# the bracket


def _packed_partial(re_d: dict, im_d: dict, shift: int):
    mask = (1 << PACK_BITS) - 1
    out_r: dict[int, object] = {}
    out_i: dict[int, object] = {}
    for src, dst in ((re_d, out_r), (im_d, out_i)):
        for key, val in src.items():
            e = (key >> shift) & mask
            if e:
                dst[key - (1 << shift)] = val * e
    return out_r, out_i


def poisson_bracket(p: Polynomial, q: Polynomial, alg: LieAlgebraSpec) -> Polynomial:
    """Lie-Poisson bracket {p, q} on polynomials over alg's coordinates."""
    if p.nvars != alg.dim or q.nvars != alg.dim:
        raise ValueError("polynomial variable count does not match algebra dim")
    if not p.terms or not q.terms:
        return Polynomial(alg.dim)

    pr, pi = split_packed(p)
    qr, qi = split_packed(q)
    n = alg.dim

    p_parts: dict[int, tuple] = {}
    q_parts: dict[int, tuple] = {}

    def partial_of(cache, re_d, im_d, v):
        got = cache.get(v)
        if got is None:
            shift = (n - 1 - v) * PACK_BITS
            got = _packed_partial(re_d, im_d, shift)
            cache[v] = got
        return got

    acc_r: dict[int, object] = {}
    acc_i: dict[int, object] = {}

    for (i, j), targets in alg.structure.items():
        dpi_r, dpi_i = partial_of(p_parts, pr, pi, i)
        dqj_r, dqj_i = partial_of(q_parts, qr, qi, j)
        dpj_r, dpj_i = partial_of(p_parts, pr, pi, j)
        dqi_r, dqi_i = partial_of(q_parts, qr, qi, i)

        if not (dpi_r or dpi_i) and not (dpj_r or dpj_i):
            continue
        if not (dqj_r or dqj_i) and not (dqi_r or dqi_i):
            continue

        # w = dp/dx_i dq/dx_j - dp/dx_j dq/dx_i, split into re and im parts
        w_r = dict_mul(dpi_r, dqj_r)
        dict_accum(w_r, dict_mul(dpi_i, dqj_i), -1)
        dict_accum(w_r, dict_mul(dpj_r, dqi_r), -1)
        dict_accum(w_r, dict_mul(dpj_i, dqi_i), 1)

        w_i = dict_mul(dpi_r, dqj_i)
        dict_accum(w_i, dict_mul(dpi_i, dqj_r), 1)
        dict_accum(w_i, dict_mul(dpj_r, dqi_i), -1)
        dict_accum(w_i, dict_mul(dpj_i, dqi_r), -1)

        if not w_r and not w_i:
            continue

        for k, coeff in targets.items():
            kkey = 1 << ((n - 1 - k) * PACK_BITS)
            cr, ci = coeff.re, coeff.im
            if cr:
                if w_r:
                    dict_accum(acc_r, {m + kkey: v * cr for m, v in w_r.items()}, 1)
                if w_i:
                    dict_accum(acc_i, {m + kkey: v * cr for m, v in w_i.items()}, 1)
            if ci:
                if w_i:
                    dict_accum(acc_r, {m + kkey: -(v * ci) for m, v in w_i.items()}, 1)
                if w_r:
                    dict_accum(acc_i, {m + kkey: v * ci for m, v in w_r.items()}, 1)

    return join_packed(acc_r, acc_i, n)


def bracket_coordinates(alg: LieAlgebraSpec, i: int, j: int) -> Polynomial:
    """{x_i, x_j} as a polynomial, for spot checks and reports."""
    return poisson_bracket(alg.variable(i), alg.variable(j), alg)
