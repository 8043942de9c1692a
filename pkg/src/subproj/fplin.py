"""Exact dense linear algebra over prime fields F_p.

Everything here is deterministic: pivots are chosen by scanning columns
left to right and rows top down, so equal inputs give bit-identical
outputs and canonical bases (kernel, image) come out in reduced row
echelon form.

Conventions:
  * matrices are `FpMatrix` objects wrapping an immutable int64 numpy
    array with entries reduced into [0, p);
  * a *basis* of a subspace of F_p^n is an FpMatrix whose rows are the
    basis vectors, in RREF, so two equal subspaces have equal bases;
  * `solve` treats its right-hand side as a column.
"""

from __future__ import annotations

from typing import Iterator, Optional, Sequence, Union

import numpy as np

MAX_PRIME = 1 << 16

_prime_cache: dict[int, bool] = {}

MatrixLike = Union["FpMatrix", Sequence[Sequence[int]], np.ndarray]


def is_prime(n: int) -> bool:
    if n not in _prime_cache:
        if n < 2:
            _prime_cache[n] = False
        else:
            _prime_cache[n] = all(n % d for d in range(2, int(n**0.5) + 1))
    return _prime_cache[n]


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus must be prime, got {p!r}")
    if p >= MAX_PRIME:
        raise ValueError(f"modulus {p} too large (must be < 2^16)")
    return int(p)


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("no inverse of 0")
    return pow(a, p - 2, p)


class FpMatrix:
    """A rows x cols matrix over F_p."""

    __slots__ = ("p", "a")

    def __init__(self, p: int, entries: MatrixLike, cols: Optional[int] = None):
        p = check_prime(p)
        if isinstance(entries, FpMatrix):
            arr = entries.a.copy()
        else:
            arr = np.array(entries, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={arr.ndim}")
        if arr.shape[0] == 0 and cols is not None:
            arr = arr.reshape(0, cols)
        arr %= p
        arr.setflags(write=False)
        self.p = p
        self.a = arr

    @classmethod
    def _wrap(cls, p: int, arr: np.ndarray) -> "FpMatrix":
        """Internal constructor: arr must already be reduced int64."""
        m = object.__new__(cls)
        arr.setflags(write=False)
        m.p = p
        m.a = arr
        return m

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls._wrap(check_prime(p), np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls._wrap(check_prime(p), np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def T(self) -> "FpMatrix":
        return FpMatrix._wrap(self.p, np.ascontiguousarray(self.a.T))

    def is_zero(self) -> bool:
        return not self.a.any()

    def vec(self) -> np.ndarray:
        """Row-major flattening (read-only view)."""
        return self.a.reshape(-1)

    def tolists(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.a]

    def col(self, j: int) -> np.ndarray:
        return self.a[:, j]

    def _coerce(self, other: MatrixLike) -> "FpMatrix":
        if isinstance(other, FpMatrix):
            if other.p != self.p:
                raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")
            return other
        return FpMatrix(self.p, other)

    def __matmul__(self, other: MatrixLike) -> "FpMatrix":
        o = self._coerce(other)
        if self.cols != o.rows:
            raise ValueError(f"shape mismatch for product: {self.shape} @ {o.shape}")
        return FpMatrix._wrap(self.p, (self.a @ o.a) % self.p)

    def __add__(self, other: MatrixLike) -> "FpMatrix":
        o = self._coerce(other)
        if self.shape != o.shape:
            raise ValueError(f"shape mismatch for sum: {self.shape} + {o.shape}")
        return FpMatrix._wrap(self.p, (self.a + o.a) % self.p)

    def __sub__(self, other: MatrixLike) -> "FpMatrix":
        o = self._coerce(other)
        if self.shape != o.shape:
            raise ValueError(f"shape mismatch for difference: {self.shape} - {o.shape}")
        return FpMatrix._wrap(self.p, (self.a - o.a) % self.p)

    def __neg__(self) -> "FpMatrix":
        return FpMatrix._wrap(self.p, (-self.a) % self.p)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix._wrap(self.p, (self.a * (int(c) % self.p)) % self.p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.tolists()})"


def hstack(mats: Sequence[FpMatrix]) -> FpMatrix:
    p = mats[0].p
    rows = mats[0].rows
    if any(m.p != p or m.rows != rows for m in mats):
        raise ValueError("hstack needs equal moduli and row counts")
    return FpMatrix._wrap(p, np.hstack([m.a for m in mats]))


def vstack(mats: Sequence[FpMatrix]) -> FpMatrix:
    p = mats[0].p
    cols = mats[0].cols
    if any(m.p != p or m.cols != cols for m in mats):
        raise ValueError("vstack needs equal moduli and column counts")
    return FpMatrix._wrap(p, np.vstack([m.a for m in mats]))


def block_diag(p: int, mats: Sequence[FpMatrix]) -> FpMatrix:
    p = check_prime(p)
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        if m.p != p:
            raise ValueError("modulus mismatch in block_diag")
        out[r : r + m.rows, c : c + m.cols] = m.a
        r += m.rows
        c += m.cols
    return FpMatrix._wrap(p, out)


def kron(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    if a.p != b.p:
        raise ValueError("modulus mismatch in kron")
    return FpMatrix._wrap(a.p, np.kron(a.a, b.a) % a.p)


def _rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = a.copy() % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = (a[r] * inv_mod(int(a[r, c]), p)) % p
        col = a[:, c].copy()
        col[r] = 0
        a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: FpMatrix) -> tuple[FpMatrix, tuple[int, ...], int]:
    """Reduced row echelon form, pivot columns, rank."""
    a, pivots = _rref_array(m.a, m.p)
    return FpMatrix._wrap(m.p, a), tuple(pivots), len(pivots)


def rank(m: FpMatrix) -> int:
    return rref(m)[2]


def kernel_basis(a: FpMatrix) -> FpMatrix:
    """Canonical basis of {x : a @ x = 0}, one vector per row, in RREF."""
    red, pivots, rk = rref(a)
    n = a.cols
    free = [j for j in range(n) if j not in set(pivots)]
    if not free:
        return FpMatrix.zeros(a.p, 0, n)
    vecs = np.zeros((len(free), n), dtype=np.int64)
    for idx, j in enumerate(free):
        vecs[idx, j] = 1
        for r, pc in enumerate(pivots):
            vecs[idx, pc] = (-int(red.a[r, j])) % a.p
    red2, _ = _rref_array(vecs, a.p)
    return FpMatrix._wrap(a.p, red2)


def image_basis(a: FpMatrix) -> FpMatrix:
    """Canonical basis (rows, RREF) of the column space of `a`."""
    red, _, rk = rref(a.T)
    return FpMatrix._wrap(a.p, red.a[:rk].copy())


def row_space_basis(a: FpMatrix) -> FpMatrix:
    red, _, rk = rref(a)
    return FpMatrix._wrap(a.p, red.a[:rk].copy())


def solve(a: FpMatrix, b: MatrixLike) -> Optional[tuple[FpMatrix, FpMatrix]]:
    """Solve a @ x = b for a single column b.

    Returns (x, kernel) with x a cols x 1 particular solution (free
    variables set to 0) and kernel the canonical basis of ker(a), or
    None when the system is inconsistent.
    """
    bm = b if isinstance(b, FpMatrix) else FpMatrix(a.p, np.asarray(b).reshape(-1, 1))
    if bm.cols != 1:
        raise ValueError("right-hand side must be a single column")
    x = solve_matrix(a, bm)
    if x is None:
        return None
    return x, kernel_basis(a)


def solve_matrix(a: FpMatrix, b: FpMatrix) -> Optional[FpMatrix]:
    """Solve a @ X = b columnwise; None if any column is inconsistent."""
    if a.p != b.p:
        raise ValueError("modulus mismatch in solve")
    if a.rows != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} vs rhs {b.shape}")
    aug = np.hstack([a.a, b.a])
    red, pivots = _rref_array(aug, a.p)
    n = a.cols
    if any(c >= n for c in pivots):
        return None
    x = np.zeros((n, b.cols), dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = red[r, n:]
    return FpMatrix._wrap(a.p, x)


def solve_left(a: FpMatrix, b: FpMatrix) -> Optional[FpMatrix]:
    """Solve X @ a = b."""
    x = solve_matrix(a.T, b.T)
    return None if x is None else x.T


def subspace_contains(span_rows: FpMatrix, v: MatrixLike) -> bool:
    """Is the row vector v in the row space of span_rows?"""
    vm = v if isinstance(v, FpMatrix) else FpMatrix(span_rows.p, np.asarray(v).reshape(1, -1))
    if vm.cols != span_rows.cols:
        raise ValueError("vector length does not match ambient dimension")
    base = rank(span_rows)
    return rank(vstack([span_rows, vm])) == base


def coordinates_in_rows(span_rows: FpMatrix, v: MatrixLike) -> Optional[np.ndarray]:
    """Coefficients writing row vector v as a combination of the rows."""
    vm = v if isinstance(v, FpMatrix) else FpMatrix(span_rows.p, np.asarray(v).reshape(1, -1))
    x = solve_matrix(span_rows.T, vm.T)
    return None if x is None else x.a.reshape(-1)


def invertible(a: FpMatrix) -> bool:
    return a.rows == a.cols and rank(a) == a.rows


def inverse(a: FpMatrix) -> Optional[FpMatrix]:
    if a.rows != a.cols:
        return None
    return solve_matrix(a, FpMatrix.identity(a.p, a.rows))


def iter_vectors(p: int, n: int) -> Iterator[np.ndarray]:
    """All vectors of F_p^n in lexicographic order (first coord slowest)."""
    p = check_prime(p)
    v = np.zeros(n, dtype=np.int64)
    while True:
        yield v.copy()
        i = n - 1
        while i >= 0 and v[i] == p - 1:
            v[i] = 0
            i -= 1
        if i < 0:
            return
        v[i] += 1


def all_combinations(p: int, k: int) -> np.ndarray:
    """All p^k coefficient vectors as a (p^k, k) array, lexicographic."""
    p = check_prime(p)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(p, dtype=np.int64)] * k, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)
