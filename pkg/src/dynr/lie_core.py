"""Root systems and Chevalley-basis simple Lie algebras of finite type.

Root systems are generated from Cartan matrices by reflection closure over
integer coefficient vectors, so all root arithmetic (sums, strings, heights)
is exact.  Coordinates in an orthonormal basis of the real Cartan dual are
attached per series: explicit integer/half-integer realizations for B, C, D
and a Cholesky factor of the exact Gram matrix otherwise.  The invariant
bilinear form is normalized so long roots have squared length 2.

The algebra basis is {x_1..x_r} (orthonormal Cartan vectors) followed by one
root vector per root, scaled so that B(e_a, e_{-a}) = 1 and
[e_a, e_{-a}] = h_a, the form-dual of the root a.  Structure-constant signs
follow a fixed extraspecial-pair convention; root-to-root constants are kept
as exact rationals, Cartan legs are floats (orthonormalization is
irrational).  Every construction is checked for antisymmetry, the Jacobi
identity, and invariance of the form before it is returned.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import ConstructionFailure, UnsupportedType

Scalar = Union[Fraction, float]

_CACHE_ENV = "DYNR_FIXTURE_DIR"
_CACHE_VERSION = 1


def _cartan_data(series: str, rank: int):
    """Cartan matrix a[i][j] = 2(a_i,a_j)/(a_j,a_j) and half-lengths d_i."""
    if rank < 1:
        raise UnsupportedType(f"rank must be positive, got {rank}")
    one = Fraction(1)
    half = Fraction(1, 2)
    a = [[2 * (i == j) for j in range(rank)] for i in range(rank)]

    def chain(i, j):
        a[i][j] = -1
        a[j][i] = -1

    if series == "A":
        d = [one] * rank
        for i in range(rank - 1):
            chain(i, i + 1)
    elif series == "B":
        if rank < 2:
            raise UnsupportedType("B requires rank >= 2")
        d = [one] * (rank - 1) + [half]
        for i in range(rank - 2):
            chain(i, i + 1)
        a[rank - 2][rank - 1] = -2
        a[rank - 1][rank - 2] = -1
    elif series == "C":
        if rank < 2:
            raise UnsupportedType("C requires rank >= 2")
        d = [half] * (rank - 1) + [one]
        for i in range(rank - 2):
            chain(i, i + 1)
        a[rank - 2][rank - 1] = -1
        a[rank - 1][rank - 2] = -2
    elif series == "D":
        if rank < 3:
            raise UnsupportedType("D requires rank >= 3")
        d = [one] * rank
        for i in range(rank - 2):
            chain(i, i + 1)
        chain(rank - 3, rank - 1)
    elif series == "G":
        if rank != 2:
            raise UnsupportedType("G requires rank == 2")
        d = [Fraction(1, 3), one]
        a[0][1] = -1
        a[1][0] = -3
    elif series == "F":
        if rank != 4:
            raise UnsupportedType("F requires rank == 4")
        d = [one, one, half, half]
        chain(0, 1)
        chain(2, 3)
        a[1][2] = -2
        a[2][1] = -1
    elif series == "E":
        if rank not in (6, 7, 8):
            raise UnsupportedType("E requires rank in {6, 7, 8}")
        d = [one] * rank
        edges = [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)]
        edges += [(5, 6)] if rank >= 7 else []
        edges += [(6, 7)] if rank == 8 else []
        for i, j in edges:
            chain(i, j)
    else:
        raise UnsupportedType(f"unsupported series {series!r}")
    return a, d


def _gram(cartan, d):
    """(a_i, a_j) = a_ij * d_j, exact and symmetric."""
    rank = len(d)
    g = [[Fraction(cartan[i][j]) * d[j] for j in range(rank)] for i in range(rank)]
    for i in range(rank):
        for j in range(rank):
            if g[i][j] != g[j][i]:
                raise ConstructionFailure("Gram matrix not symmetric")
    return g


def _simple_coords(series: str, rank: int, gram) -> np.ndarray:
    """Rows are orthonormal coordinates of the simple roots."""
    if series == "B":
        m = np.zeros((rank, rank))
        for i in range(rank - 1):
            m[i, i], m[i, i + 1] = 1.0, -1.0
        m[rank - 1, rank - 1] = 1.0
        return m
    if series == "C":
        s = np.sqrt(2.0)
        m = np.zeros((rank, rank))
        for i in range(rank - 1):
            m[i, i], m[i, i + 1] = 1 / s, -1 / s
        m[rank - 1, rank - 1] = s
        return m
    if series == "D":
        m = np.zeros((rank, rank))
        for i in range(rank - 1):
            m[i, i], m[i, i + 1] = 1.0, -1.0
        m[rank - 1, rank - 2], m[rank - 1, rank - 1] = 1.0, 1.0
        return m
    g = np.array([[float(x) for x in row] for row in gram])
    return np.linalg.cholesky(g)


def _reflection_closure(cartan, rank):
    """All roots as integer coefficient tuples, via simple reflections."""
    simples = [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
    zero = tuple([0] * rank)
    roots = set(simples)
    frontier = list(simples)
    while frontier:
        fresh = []
        for c in frontier:
            for i in range(rank):
                pair_i = sum(c[j] * cartan[j][i] for j in range(rank))
                refl = list(c)
                refl[i] -= pair_i
                t = tuple(refl)
                if t != zero and t not in roots:
                    roots.add(t)
                    fresh.append(t)
        frontier = fresh
    return sorted(roots)


@dataclass(eq=False)
class RootSystemData:
    """A finite root system with exact coefficients and float coordinates.

    Attributes
    ----------
    series, rank : type label, e.g. ("B", 2).
    roots : (n_roots, rank) float array, orthonormal coordinates.
    coeffs : (n_roots, rank) int array, expansion in the simple roots.
    simple_roots : indices of the simple roots, in simple-root order.
    positive_roots : indices of roots with all-nonnegative coefficients.
    cartan_matrix : (rank, rank) int array, a_ij = 2(a_i,a_j)/(a_j,a_j).
    """

    series: str
    rank: int
    roots: np.ndarray
    coeffs: np.ndarray
    simple_roots: tuple
    positive_roots: tuple
    cartan_matrix: np.ndarray
    gram: tuple  # exact Gram matrix of the simple roots, Fractions
    _index: dict = field(init=False, repr=False)
    _neg: np.ndarray = field(init=False, repr=False)
    _len_sq: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self._index = {tuple(int(x) for x in c): i for i, c in enumerate(self.coeffs)}
        self._neg = np.array([self._index[tuple(-c)] for c in self.coeffs])
        g = self.gram
        ls = []
        for c in self.coeffs:
            v = Fraction(0)
            for i in range(self.rank):
                for j in range(self.rank):
                    v += Fraction(int(c[i])) * g[i][j] * Fraction(int(c[j]))
            ls.append(v)
        self._len_sq = tuple(ls)

    @property
    def n_roots(self) -> int:
        return len(self.coeffs)

    def index_of(self, coeff) -> Optional[int]:
        return self._index.get(tuple(int(x) for x in coeff))

    def neg(self, idx: int) -> int:
        return int(self._neg[idx])

    def is_positive(self, idx: int) -> bool:
        return idx in self._pos_set

    @property
    def _pos_set(self):
        return set(self.positive_roots)

    def add(self, i: int, j: int) -> Optional[int]:
        """Index of root_i + root_j, or None when the sum is not a root."""
        return self.index_of(self.coeffs[i] + self.coeffs[j])

    def height(self, idx: int) -> int:
        return int(self.coeffs[idx].sum())

    def length_sq(self, idx: int) -> Fraction:
        return self._len_sq[idx]

    def pair_exact(self, i: int, j: int) -> Fraction:
        """(root_i, root_j) from the exact Gram matrix."""
        v = Fraction(0)
        ci, cj = self.coeffs[i], self.coeffs[j]
        for a in range(self.rank):
            for b in range(self.rank):
                v += Fraction(int(ci[a])) * self.gram[a][b] * Fraction(int(cj[b]))
        return v


def build_root_system(series: str, rank: int) -> RootSystemData:
    """Construct the root system of a finite-type series.

    Parameters
    ----------
    series : one of "A", "B", "C", "D", "E", "F", "G".
    rank : positive integer valid for the series.

    Returns
    -------
    RootSystemData with roots sorted lexicographically by coefficient
    tuple (deterministic ordering used everywhere downstream).

    Raises
    ------
    UnsupportedType
        If (series, rank) is not a supported finite type.
    """
    series = str(series).upper()
    if series not in "ABCDEFG" or len(series) != 1:
        raise UnsupportedType(f"unsupported series {series!r}")
    cartan, d = _cartan_data(series, rank)
    gram = _gram(cartan, d)
    coeff_list = _reflection_closure(cartan, rank)
    coeffs = np.array(coeff_list, dtype=int)
    for c in coeff_list:
        if not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
            raise ConstructionFailure(f"mixed-sign root coefficients {c}")
    simple_coords = _simple_coords(series, rank, gram)
    roots = coeffs @ simple_coords
    simple_idx = [None] * rank
    positive = []
    for i, c in enumerate(coeff_list):
        if all(x >= 0 for x in c):
            positive.append(i)
            if sum(c) == 1:
                simple_idx[c.index(1)] = i
    rs = RootSystemData(
        series=series,
        rank=rank,
        roots=roots,
        coeffs=coeffs,
        simple_roots=tuple(simple_idx),
        positive_roots=tuple(positive),
        cartan_matrix=np.array(cartan, dtype=int),
        gram=tuple(tuple(row) for row in gram),
    )
    if len(positive) * 2 != rs.n_roots:
        raise ConstructionFailure("roots do not split into +/- halves")
    return rs


class _ChevalleyConstants:
    """Structure constants N(a,b) with the extraspecial-pair sign convention.

    Positive roots are ordered by (height, coefficient tuple).  For each
    non-simple positive root the decomposition with the least first member
    is declared extraspecial and assigned N = +(p+1), where p is the string
    length; every other constant follows from the Jacobi identity, the
    rotation rule N(y,w) = N(x,y)(x,x)/(w,w) for x+y+w = 0, and the
    involution N(-a,-b) = -N(a,b).
    """

    def __init__(self, rs: RootSystemData):
        self.rs = rs
        pos = sorted(rs.positive_roots, key=lambda i: (rs.height(i), tuple(rs.coeffs[i])))
        self.order = {i: n for n, i in enumerate(pos)}
        self.extraspecial = {}
        for g_idx in pos:
            if rs.height(g_idx) < 2:
                continue
            cands = []
            for a_idx in pos:
                b_idx = rs.index_of(rs.coeffs[g_idx] - rs.coeffs[a_idx])
                if b_idx is not None and b_idx in self.order and self.order[a_idx] <= self.order[b_idx]:
                    cands.append((self.order[a_idx], a_idx, b_idx))
            if not cands:
                raise ConstructionFailure("positive root with no decomposition")
            _, a_idx, b_idx = min(cands)
            self.extraspecial[g_idx] = (a_idx, b_idx)
        self._memo = {}

    def p(self, a: int, b: int) -> int:
        rs, k = self.rs, 0
        cur = rs.coeffs[b] - rs.coeffs[a]
        while rs.index_of(cur) is not None:
            k += 1
            cur = cur - rs.coeffs[a]
        return k

    def N(self, a: int, b: int) -> Fraction:
        rs = self.rs
        s = rs.index_of(rs.coeffs[a] + rs.coeffs[b])
        if s is None:
            return Fraction(0)
        key = (a, b)
        if key in self._memo:
            return self._memo[key]
        pos_a, pos_b = a in self.order, b in self.order
        ls = rs.length_sq
        if pos_a and pos_b:
            if self.order[a] > self.order[b]:
                val = -self.N(b, a)
            elif (a, b) == self.extraspecial[s]:
                val = Fraction(self.p(a, b) + 1)
            else:
                a0, b0 = self.extraspecial[s]
                t = Fraction(0)
                if rs.index_of(rs.coeffs[b0] - rs.coeffs[a]) is not None:
                    t += self.N(b0, rs.neg(a)) * self.N(rs.index_of(rs.coeffs[b0] - rs.coeffs[a]), a0)
                if rs.index_of(rs.coeffs[a0] - rs.coeffs[a]) is not None:
                    t += self.N(rs.neg(a), a0) * self.N(rs.index_of(rs.coeffs[a0] - rs.coeffs[a]), b0)
                if t == 0:
                    raise ConstructionFailure("degenerate extraspecial recursion")
                val = ls(s) / (ls(b) * self.N(a0, b0)) * t
        elif not pos_a and not pos_b:
            val = -self.N(rs.neg(a), rs.neg(b))
        elif not pos_a:
            val = -self.N(b, a)
        else:
            c = rs.neg(s)
            if s in self.order:  # a + b positive, c negative
                val = -self.N(rs.neg(b), rs.neg(c)) * ls(c) / ls(a)
            else:
                val = self.N(c, a) * ls(c) / ls(b)
        self._memo[key] = val
        return val


@dataclass(eq=False)
class SimpleLieAlgebra:
    """Chevalley-type basis of a finite-dimensional simple Lie algebra.

    Basis order: x_0..x_{rank-1} (orthonormal Cartan vectors), then one
    root vector per root in root-system order.  structure_constants maps a
    basis index pair (i, j) to a tuple of (k, coefficient) entries of
    [b_i, b_j]; root-to-root coefficients are exact Fractions, Cartan legs
    are floats.  bilinear_form is the matrix of the invariant form.
    """

    root_system: RootSystemData
    dim: int
    structure_constants: dict
    bilinear_form: np.ndarray
    labels: tuple
    _dense: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    @property
    def rank(self) -> int:
        return self.root_system.rank

    def root_basis_index(self, root_idx: int) -> int:
        return self.rank + root_idx

    def bracket_table(self) -> np.ndarray:
        """Dense complex tensor f[i, j, k] with [b_i, b_j] = sum_k f[i,j,k] b_k."""
        if self._dense is None:
            f = np.zeros((self.dim, self.dim, self.dim), dtype=complex)
            for (i, j), entries in self.structure_constants.items():
                for k, v in entries:
                    f[i, j, k] += float(v)
            self._dense = f
        return self._dense

    def type_name(self) -> str:
        return f"{self.root_system.series}{self.root_system.rank}"


def _assemble_constants(rs: RootSystemData):
    """Structure constants in the rescaled (dual root vector) basis."""
    chev = _ChevalleyConstants(rs)
    rank, nr = rs.rank, rs.n_roots

    def scale(idx: int) -> Fraction:
        # e_a -> s_a e_a with s_a s_{-a} = (a,a)/2; carried by the positive member
        return rs.length_sq(idx) / 2 if idx in rs._pos_set else Fraction(1)

    const = {}

    def put(i, j, entries):
        if entries:
            const[(i, j)] = tuple(entries)
            const[(j, i)] = tuple((k, -v) for k, v in entries)

    for ridx in range(nr):
        bi = rank + ridx
        coords = rs.roots[ridx]
        # [x_k, e_a] = (a, x_k) e_a
        for k in range(rank):
            c = float(coords[k])
            if c != 0.0:
                put(k, bi, [(bi, c)])
    for i in range(nr):
        for j in range(nr):
            if i == j:
                continue
            bi, bj = rank + i, rank + j
            if (bi, bj) in const:
                continue
            if rs.neg(i) == j:
                if i < j:
                    # [e_a, e_{-a}] = h_a, the form-dual of a, in x coordinates
                    entries = [(k, float(rs.roots[i][k])) for k in range(rank) if rs.roots[i][k] != 0.0]
                    put(bi, bj, entries)
                continue
            s = rs.add(i, j)
            if s is None:
                continue
            n = chev.N(i, j)
            if n == 0:
                raise ConstructionFailure("vanishing constant on a root sum")
            v = n * scale(i) * scale(j) / scale(s)
            if v.denominator != 1 and rs.series in ("A", "D", "E"):
                raise ConstructionFailure("non-integer constant in simply-laced type")
            put(bi, bj, [(rank + s, v)])
    return const


def _verify_algebra(g: SimpleLieAlgebra, tol: float = 1e-12):
    f = g.bracket_table()
    if np.max(np.abs(f + np.swapaxes(f, 0, 1))) > tol:
        raise ConstructionFailure("antisymmetry violated")
    if g.dim <= 80:
        jac = np.einsum("bcm,amk->abck", f, f)
        total = jac + np.einsum("abck->bcak", jac) + np.einsum("abck->cabk", jac)
        if np.max(np.abs(total)) > tol:
            raise ConstructionFailure("Jacobi identity violated")
        b = g.bilinear_form.astype(complex)
        lhs = np.einsum("abm,mc->abc", f, b)
        rhs = np.einsum("bcm,am->abc", f, b)
        if np.max(np.abs(lhs - rhs)) > tol:
            raise ConstructionFailure("invariance of the form violated")


def build_simple_lie_algebra(rs: RootSystemData, cache_dir: Optional[str] = None) -> SimpleLieAlgebra:
    """Build the algebra over a root system, with dual root-vector basis.

    Parameters
    ----------
    rs : root system from build_root_system.
    cache_dir : directory for the structure-constant cache; defaults to the
        DYNR_FIXTURE_DIR environment variable, and no caching when unset.

    Returns
    -------
    SimpleLieAlgebra with B(x_i,x_j) = delta_ij, B(e_a, e_b) = delta_{a,-b},
    [e_a, e_{-a}] = h_a.

    Raises
    ------
    ConstructionFailure
        If any internal consistency check (Jacobi, invariance) fails.
    """
    cache_dir = cache_dir if cache_dir is not None else os.environ.get(_CACHE_ENV)
    const = None
    if cache_dir:
        const = _load_cache(cache_dir, rs.series, rs.rank)
    fresh = const is None
    if fresh:
        const = _assemble_constants(rs)
    dim = rs.rank + rs.n_roots
    bform = np.zeros((dim, dim))
    bform[: rs.rank, : rs.rank] = np.eye(rs.rank)
    for i in range(rs.n_roots):
        bform[rs.rank + i, rs.rank + rs.neg(i)] = 1.0
    labels = tuple(
        [f"x{k + 1}" for k in range(rs.rank)]
        + ["e(" + ",".join(str(int(x)) for x in c) + ")" for c in rs.coeffs]
    )
    g = SimpleLieAlgebra(
        root_system=rs,
        dim=dim,
        structure_constants=const,
        bilinear_form=bform,
        labels=labels,
    )
    _verify_algebra(g)
    if cache_dir and fresh:
        _save_cache(cache_dir, rs.series, rs.rank, const)
    return g


def _cache_path(cache_dir: str, series: str, rank: int) -> str:
    return os.path.join(cache_dir, f"structure_{series}{rank}_v{_CACHE_VERSION}.json")


def _encode_value(v: Scalar):
    if isinstance(v, Fraction):
        return ["q", str(v.numerator), str(v.denominator)]
    return ["f", float(v)]


def _decode_value(obj) -> Scalar:
    tag = obj[0]
    if tag == "q":
        return Fraction(int(obj[1]), int(obj[2]))
    return float(obj[1])


def _save_cache(cache_dir: str, series: str, rank: int, const: dict):
    os.makedirs(cache_dir, exist_ok=True)
    doc = {
        "version": _CACHE_VERSION,
        "series": series,
        "rank": rank,
        "entries": [
            [int(i), int(j), [[int(k), _encode_value(v)] for k, v in entries]]
            for (i, j), entries in sorted(const.items())
        ],
    }
    with open(_cache_path(cache_dir, series, rank), "w") as fh:
        json.dump(doc, fh)


def _load_cache(cache_dir: str, series: str, rank: int) -> Optional[dict]:
    path = _cache_path(cache_dir, series, rank)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != _CACHE_VERSION:
        return None
    const = {}
    for i, j, entries in doc["entries"]:
        const[(int(i), int(j))] = tuple((int(k), _decode_value(v)) for k, v in entries)
    return const


@dataclass(frozen=True)
class CartanVector:
    """A point of the complexified Cartan dual in orthonormal coordinates."""

    coords: tuple

    @staticmethod
    def of(values) -> "CartanVector":
        return CartanVector(tuple(complex(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def __add__(self, other: "CartanVector") -> "CartanVector":
        return CartanVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "CartanVector") -> "CartanVector":
        return CartanVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, c: complex) -> "CartanVector":
        return CartanVector(tuple(complex(c) * a for a in self.coords))

    @staticmethod
    def zero(rank: int) -> "CartanVector":
        return CartanVector((0j,) * rank)


def pairing(rs: RootSystemData, lam: CartanVector, alpha: int, shift: Optional[CartanVector] = None) -> complex:
    """(alpha, lam - shift) in orthonormal coordinates.

    Parameters
    ----------
    rs : root system owning the root index.
    lam : evaluation point.
    alpha : root index into rs.
    shift : optional second point, e.g. the family parameter nu.
    """
    v = lam.as_array()
    if shift is not None:
        v = v - shift.as_array()
    return complex(np.dot(rs.roots[alpha], v))


def fundamental_weights(rs: RootSystemData) -> np.ndarray:
    """Rows are orthonormal coordinates of the fundamental weights.

    Defined by 2(w_i, a_j)/(a_j, a_j) = delta_ij over the simple roots.
    """
    simple = rs.roots[list(rs.simple_roots)]
    d = np.array([float(rs.length_sq(i)) / 2.0 for i in rs.simple_roots])
    return np.diag(d) @ np.linalg.inv(simple.T)


def casimir(g: SimpleLieAlgebra):
    """The invariant symmetric tensor of the bilinear form.

    Sum of x_i (x) x_i over the orthonormal Cartan basis plus e_a (x) e_{-a}
    over all roots.  Returned as a Tensor2 over g.
    """
    from .tensor_alg import Tensor2

    rs = g.root_system
    m = np.zeros((g.dim, g.dim), dtype=complex)
    for k in range(rs.rank):
        m[k, k] = 1.0
    for i in range(rs.n_roots):
        m[g.root_basis_index(i), g.root_basis_index(rs.neg(i))] = 1.0
    return Tensor2(g, m)
