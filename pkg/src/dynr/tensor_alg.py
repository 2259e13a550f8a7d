"""Tensors over a simple Lie algebra and the bracket/alternation calculus.

Tensor2 and Tensor3 wrap dense complex arrays indexed by the algebra basis.
bracket_legs contracts two 2-tensors through the Lie bracket on a shared
leg placement, alt3 symmetrizes a 3-tensor over cyclic leg rotations, and
act_diag applies an element diagonally (ad on every leg).  All operations
check that operands live over the same algebra.
"""

from __future__ import annotations

from typing import Union

import numpy as np

from .errors import AlgebraMismatch, UnsupportedType
from .lie_core import SimpleLieAlgebra

_PLACEMENTS = ("12-13", "12-23", "13-23")


class Tensor2:
    """Element of g (x) g as a dense (dim, dim) complex matrix."""

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: SimpleLieAlgebra, data: np.ndarray):
        data = np.asarray(data, dtype=complex)
        if data.shape != (algebra.dim, algebra.dim):
            raise UnsupportedType(f"Tensor2 data shape {data.shape} != {(algebra.dim,) * 2}")
        self.algebra = algebra
        self.data = data

    def _check(self, other):
        if self.algebra is not other.algebra:
            raise AlgebraMismatch("tensors over different algebras")

    def __add__(self, other: "Tensor2") -> "Tensor2":
        self._check(other)
        return Tensor2(self.algebra, self.data + other.data)

    def __sub__(self, other: "Tensor2") -> "Tensor2":
        self._check(other)
        return Tensor2(self.algebra, self.data - other.data)

    def scale(self, c: complex) -> "Tensor2":
        return Tensor2(self.algebra, complex(c) * self.data)

    def swap(self) -> "Tensor2":
        """Exchange the two legs: (a (x) b) -> (b (x) a)."""
        return Tensor2(self.algebra, self.data.T.copy())

    def norm(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def copy(self) -> "Tensor2":
        return Tensor2(self.algebra, self.data.copy())


class Tensor3:
    """Element of g (x) g (x) g as a dense (dim, dim, dim) complex array."""

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: SimpleLieAlgebra, data: np.ndarray):
        data = np.asarray(data, dtype=complex)
        if data.shape != (algebra.dim,) * 3:
            raise UnsupportedType(f"Tensor3 data shape {data.shape} != {(algebra.dim,) * 3}")
        self.algebra = algebra
        self.data = data

    def _check(self, other):
        if self.algebra is not other.algebra:
            raise AlgebraMismatch("tensors over different algebras")

    def __add__(self, other: "Tensor3") -> "Tensor3":
        self._check(other)
        return Tensor3(self.algebra, self.data + other.data)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        self._check(other)
        return Tensor3(self.algebra, self.data - other.data)

    def scale(self, c: complex) -> "Tensor3":
        return Tensor3(self.algebra, complex(c) * self.data)

    def transpose_legs(self, perm) -> "Tensor3":
        """Relabel legs in numpy axes convention: result leg k is input leg perm[k].

        R[j0, j1, j2] = data[i0, i1, i2] with i[perm[k]] = j[k].  For a pure
        tensor a(x)b(x)c, perm (1,2,0) gives b(x)c(x)a and (2,0,1) gives
        c(x)a(x)b.
        """
        if sorted(perm) != [0, 1, 2]:
            raise UnsupportedType(f"not a leg permutation: {perm}")
        return Tensor3(self.algebra, np.transpose(self.data, perm).copy())

    def norm(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0


def tensor_product(algebra: SimpleLieAlgebra, u: np.ndarray, v: np.ndarray) -> Tensor2:
    """u (x) v for coefficient vectors in the algebra basis."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (algebra.dim,) or v.shape != (algebra.dim,):
        raise UnsupportedType("vectors must have algebra dimension")
    return Tensor2(algebra, np.outer(u, v))


def bracket_legs(x: Tensor2, y: Tensor2, placement: str) -> Tensor3:
    """Pairwise leg bracket [x^{p}, y^{q}] inside g (x) g (x) g.

    Parameters
    ----------
    x, y : Tensor2 over the same algebra.
    placement : one of "12-13", "12-23", "13-23"; x occupies the first
        pair of legs, y the second, and the bracket is taken on the leg
        they share.

    Returns
    -------
    Tensor3 holding the commutator.
    """
    x._check(y)
    f = x.algebra.bracket_table()
    a, b = x.data, y.data
    if placement == "12-13":
        data = np.einsum("ack,ab,cd->kbd", f, a, b)
    elif placement == "12-23":
        data = np.einsum("bck,ab,cd->akd", f, a, b)
    elif placement == "13-23":
        data = np.einsum("bdk,ab,cd->ack", f, a, b)
    else:
        raise UnsupportedType(f"placement must be one of {_PLACEMENTS}, got {placement!r}")
    return Tensor3(x.algebra, data)


def alt3(z: Tensor3) -> Tensor3:
    """Sum of the three cyclic leg rotations of z.

    For z = a (x) b (x) c the result is a(x)b(x)c + c(x)a(x)b + b(x)c(x)a.
    """
    d = z.data
    return Tensor3(z.algebra, d + np.transpose(d, (1, 2, 0)) + np.transpose(d, (2, 0, 1)))


def _ad_contract(algebra: SimpleLieAlgebra, x) -> np.ndarray:
    """M[c, k] = coefficient of b_k in [x, b_c]."""
    f = algebra.bracket_table()
    if isinstance(x, (int, np.integer)):
        return f[int(x)]
    x = np.asarray(x, dtype=complex)
    if x.shape != (algebra.dim,):
        raise UnsupportedType("element must be a basis index or a dim-length vector")
    return np.einsum("a,ack->ck", x, f)


def act_diag(x, t: Union[Tensor2, Tensor3]) -> Union[Tensor2, Tensor3]:
    """Diagonal adjoint action of x: sum over legs of (1 .. ad_x .. 1).

    x may be a basis index or a coefficient vector.  For Cartan x and a
    zero-weight tensor the result vanishes.
    """
    m = _ad_contract(t.algebra, x)
    d = t.data
    if isinstance(t, Tensor2):
        out = np.einsum("ak,ab->kb", m, d) + np.einsum("bk,ab->ak", m, d)
        return Tensor2(t.algebra, out)
    out = (
        np.einsum("ak,abc->kbc", m, d)
        + np.einsum("bk,abc->akc", m, d)
        + np.einsum("ck,abc->abk", m, d)
    )
    return Tensor3(t.algebra, out)


def norm(t: Union[Tensor2, Tensor3]) -> float:
    """Sup norm over coefficients in the algebra basis."""
    return t.norm()
