"""Finite-dimensional associative unital algebras over F_p.

An algebra is given by structure constants c[i][j][k] with
e_i * e_j = sum_k c[i][j][k] e_k and a distinguished unit vector.
Associativity and the unit laws are checked at construction; invalid
tables are rejected with the failing triple named.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fplin import FpMatrix, check_prime


class InvalidAlgebra(ValueError):
    pass


class NonAssociative(InvalidAlgebra):
    def __init__(self, i: int, j: int, k: int):
        self.triple = (i, j, k)
        super().__init__(
            f"structure constants are not associative at triple ({i}, {j}, {k})"
        )


class BadUnit(InvalidAlgebra):
    def __init__(self, i: int):
        self.index = i
        super().__init__(f"unit law fails on basis element {i}")


@dataclass(frozen=True, eq=False)
class Algebra:
    p: int
    dim: int
    labels: tuple[str, ...]
    c: np.ndarray  # (dim, dim, dim), c[i, j, k]
    unit: np.ndarray  # (dim,)
    name: str = ""

    def mult(self, x, y) -> np.ndarray:
        """Product of two coordinate vectors."""
        x = np.asarray(x, dtype=np.int64) % self.p
        y = np.asarray(y, dtype=np.int64) % self.p
        return np.einsum("i,j,ijk->k", x, y, self.c) % self.p

    def left_mult_matrix(self, x) -> FpMatrix:
        """Matrix of y -> x*y on the basis."""
        x = np.asarray(x, dtype=np.int64) % self.p
        return FpMatrix(self.p, np.einsum("i,ijk->kj", x, self.c) % self.p)

    def right_mult_matrix(self, x) -> FpMatrix:
        """Matrix of y -> y*x on the basis."""
        x = np.asarray(x, dtype=np.int64) % self.p
        return FpMatrix(self.p, np.einsum("j,ijk->ki", x, self.c) % self.p)

    def regular_action(self) -> tuple[FpMatrix, ...]:
        """Left multiplication matrix of each basis element."""
        return tuple(
            FpMatrix(self.p, self.c[i].T % self.p) for i in range(self.dim)
        )

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Algebra):
            return NotImplemented
        return (
            self.p == other.p
            and self.dim == other.dim
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.unit, other.unit)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.dim, self.c.tobytes(), self.unit.tobytes()))

    def __repr__(self) -> str:
        label = self.name or f"dim-{self.dim} algebra"
        return f"Algebra({label} over F_{self.p})"


def build_algebra(
    p: int,
    dim: int,
    struct_consts,
    unit,
    labels: Optional[Sequence[str]] = None,
    name: str = "",
) -> Algebra:
    p = check_prime(p)
    if dim < 1:
        raise InvalidAlgebra("algebra dimension must be >= 1")
    c = np.array(struct_consts, dtype=np.int64) % p
    if c.shape != (dim, dim, dim):
        raise InvalidAlgebra(
            f"structure constants have shape {c.shape}, expected {(dim,) * 3}"
        )
    u = np.array(unit, dtype=np.int64) % p
    if u.shape != (dim,):
        raise InvalidAlgebra(f"unit has shape {u.shape}, expected ({dim},)")

    # (e_i e_j) e_k vs e_i (e_j e_k), all triples at once
    left = np.einsum("ijm,mkl->ijkl", c, c) % p
    right = np.einsum("jkm,iml->ijkl", c, c) % p
    if not np.array_equal(left, right):
        bad = np.argwhere((left != right).any(axis=3))
        i, j, k = (int(x) for x in bad[0])
        raise NonAssociative(i, j, k)

    left_unit = np.einsum("i,ijk->jk", u, c) % p  # unit * e_j in column j? rows k
    right_unit = np.einsum("j,ijk->ik", u, c) % p
    eye = np.eye(dim, dtype=np.int64)
    if not np.array_equal(left_unit, eye):
        bad = int(np.argwhere((left_unit != eye).any(axis=1))[0][0])
        raise BadUnit(bad)
    if not np.array_equal(right_unit, eye):
        bad = int(np.argwhere((right_unit != eye).any(axis=1))[0][0])
        raise BadUnit(bad)

    if labels is None:
        labels = tuple(f"e{i}" for i in range(dim))
    else:
        labels = tuple(str(s) for s in labels)
        if len(labels) != dim:
            raise InvalidAlgebra("label count does not match dimension")
    c.setflags(write=False)
    u.setflags(write=False)
    return Algebra(p=p, dim=dim, labels=labels, c=c, unit=u, name=name)


def field_algebra(p: int) -> Algebra:
    """F_p itself, as a 1-dimensional algebra."""
    return build_algebra(p, 1, [[[1]]], [1], labels=("1",), name=f"F_{p}")


def quotient_poly(p: int, coeffs: Sequence[int]) -> Algebra:
    """F_p[x]/(f) for a monic polynomial f given by its coefficient list.

    `coeffs` lists f's coefficients from the constant term up and must
    end with 1 (monic); deg f = len(coeffs) - 1 >= 1.
    """
    p = check_prime(p)
    f = [x % p for x in coeffs]
    if len(f) < 2 or f[-1] != 1:
        raise InvalidAlgebra("polynomial must be monic of degree >= 1")
    d = len(f) - 1
    # powers of x mod f, up to x^(2d-2)
    powers = [np.zeros(d, dtype=np.int64) for _ in range(2 * d - 1)]
    for m in range(min(d, 2 * d - 1)):
        powers[m][m] = 1
    for m in range(d, 2 * d - 1):
        prev = powers[m - 1]
        shifted = np.zeros(d, dtype=np.int64)
        shifted[1:] = prev[:-1]
        # x^d = -(f_0 + f_1 x + ... + f_{d-1} x^{d-1})
        head = prev[d - 1]
        red = np.array(f[:d], dtype=np.int64)
        powers[m] = (shifted - head * red) % p
    c = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            c[i, j] = powers[i + j]
    unit = np.zeros(d, dtype=np.int64)
    unit[0] = 1
    labels = tuple("1" if i == 0 else ("x" if i == 1 else f"x^{i}") for i in range(d))
    fstr = "+".join(
        f"{a}x^{i}" if i > 1 else (f"{a}x" if i == 1 else str(a))
        for i, a in enumerate(f)
        if a
    )
    return build_algebra(p, d, c, unit, labels=labels, name=f"F_{p}[x]/({fstr})")


def upper_triangular(p: int, n: int) -> Algebra:
    """Upper triangular n x n matrices over F_p (matrix units e_ij, i <= j)."""
    p = check_prime(p)
    if n < 1:
        raise InvalidAlgebra("matrix size must be >= 1")
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index = {pr: t for t, pr in enumerate(pairs)}
    d = len(pairs)
    c = np.zeros((d, d, d), dtype=np.int64)
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            if j == k:
                c[a, b, index[(i, l)]] = 1
    unit = np.zeros(d, dtype=np.int64)
    for i in range(n):
        unit[index[(i, i)]] = 1
    labels = tuple(f"E{i}{j}" for (i, j) in pairs)
    return build_algebra(p, d, c, unit, labels=labels, name=f"T_{n}(F_{p})")


def cyclic_group_table(n: int) -> list[list[int]]:
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def group_algebra(p: int, table: Sequence[Sequence[int]]) -> Algebra:
    """Group algebra F_p[G] for a group given by its multiplication table.

    table[i][j] is the index of g_i g_j; groups of order <= 8 only.
    """
    p = check_prime(p)
    n = len(table)
    if not 1 <= n <= 8:
        raise InvalidAlgebra("group order must be between 1 and 8")
    t = [[int(x) for x in row] for row in table]
    if any(len(row) != n for row in t) or any(
        not 0 <= x < n for row in t for x in row
    ):
        raise InvalidAlgebra("multiplication table is not a square over 0..n-1")
    ident = [e for e in range(n) if all(t[e][j] == j and t[j][e] == j for j in range(n))]
    if len(ident) != 1:
        raise InvalidAlgebra("table has no two-sided identity")
    e = ident[0]
    for i in range(n):
        if e not in t[i]:
            raise InvalidAlgebra(f"element {i} has no inverse")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if t[t[i][j]][k] != t[i][t[j][k]]:
                    raise InvalidAlgebra(f"table not associative at ({i}, {j}, {k})")
    c = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            c[i, j, t[i][j]] = 1
    unit = np.zeros(n, dtype=np.int64)
    unit[e] = 1
    labels = tuple(f"g{i}" for i in range(n))
    return build_algebra(p, n, c, unit, labels=labels, name=f"F_{p}[G{n}]")


def opposite(a: Algebra) -> Algebra:
    """Opposite algebra: products reversed, same unit."""
    c_op = np.ascontiguousarray(a.c.swapaxes(0, 1))
    return build_algebra(
        a.p, a.dim, c_op, a.unit, labels=a.labels, name=f"op({a.name})" if a.name else ""
    )
