"""Finitely generated modules over a finite-dimensional algebra.

A module is a matrix representation: one action matrix per algebra
basis element, satisfying the structure-constant relations.  Maps are
equivariant matrices.  All hom-space computations reduce to exact
kernel computations over F_p, so bases are canonical and every decision
is reproducible.

The factorization tests at the bottom decide whether maps factor
through a projective module; they are the module-level core that the
complex-level machinery builds on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence
from weakref import WeakKeyDictionary

import numpy as np

from . import fplin
from .algebras import Algebra, opposite
from .certificates import Factorization, RankEvidence, Verdict
from .fplin import FpMatrix, block_diag, kernel_basis, kron, rank, solve_matrix, vstack


class InvalidModule(ValueError):
    pass


class InvalidMap(ValueError):
    pass


@dataclass(eq=False)
class ModuleRep:
    algebra: Algebra
    mdim: int
    action: tuple[FpMatrix, ...]

    @property
    def p(self) -> int:
        return self.algebra.p

    def act(self, i: int) -> FpMatrix:
        return self.action[i]

    def action_of(self, x) -> FpMatrix:
        """Action matrix of an arbitrary algebra element."""
        x = np.asarray(x, dtype=np.int64) % self.p
        out = np.zeros((self.mdim, self.mdim), dtype=np.int64)
        for i, mat in enumerate(self.action):
            out = (out + int(x[i]) * mat.a) % self.p
        return FpMatrix(self.p, out, cols=self.mdim)

    def is_zero(self) -> bool:
        return self.mdim == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleRep):
            return NotImplemented
        return (
            self.algebra == other.algebra
            and self.mdim == other.mdim
            and self.action == other.action
        )

    # identity hash: caches key on the object, not on its contents
    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"ModuleRep(dim={self.mdim} over {self.algebra!r})"


@dataclass(eq=False)
class ModuleMap:
    src: ModuleRep
    dst: ModuleRep
    matrix: FpMatrix  # dst.mdim x src.mdim

    @property
    def p(self) -> int:
        return self.src.p

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        return (self.matrix.a @ v) % self.p

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self . other (apply other first)."""
        if other.dst is not self.src and other.dst != self.src:
            raise InvalidMap("composition mismatch")
        return ModuleMap(other.src, self.dst, self.matrix @ other.matrix)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.src, self.dst, self.matrix + other.matrix)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.src, self.dst, self.matrix.scale(c))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleMap):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and self.matrix == other.matrix

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"ModuleMap({self.src.mdim} -> {self.dst.mdim} over F_{self.p})"


def module_rep(algebra: Algebra, action: Sequence[FpMatrix]) -> ModuleRep:
    """Validated module: action must extend to an algebra morphism."""
    mats = tuple(action)
    if len(mats) != algebra.dim:
        raise InvalidModule("need one action matrix per algebra basis element")
    if not mats:
        raise InvalidModule("algebra dimension must be >= 1")
    m = mats[0].rows
    for t in mats:
        if t.p != algebra.p or t.shape != (m, m):
            raise InvalidModule("action matrices must be square, equal-sized, same p")
    p = algebra.p
    u = np.zeros((m, m), dtype=np.int64)
    for i in range(algebra.dim):
        u = (u + int(algebra.unit[i]) * mats[i].a) % p
    if not np.array_equal(u, np.eye(m, dtype=np.int64)):
        raise InvalidModule("unit does not act as the identity")
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            lhs = (mats[i].a @ mats[j].a) % p
            rhs = np.zeros((m, m), dtype=np.int64)
            for k in range(algebra.dim):
                cijk = int(algebra.c[i, j, k])
                if cijk:
                    rhs = (rhs + cijk * mats[k].a) % p
            if not np.array_equal(lhs, rhs):
                raise InvalidModule(f"action violates relation e{i}*e{j}")
    return ModuleRep(algebra=algebra, mdim=m, action=mats)


def module_map(src: ModuleRep, dst: ModuleRep, matrix: FpMatrix) -> ModuleMap:
    """Validated equivariant map."""
    if src.algebra != dst.algebra:
        raise InvalidMap("source and target live over different algebras")
    if matrix.shape != (dst.mdim, src.mdim):
        raise InvalidMap(f"matrix shape {matrix.shape} != ({dst.mdim}, {src.mdim})")
    for i in range(src.algebra.dim):
        if matrix @ src.act(i) != dst.act(i) @ matrix:
            raise InvalidMap(f"map does not commute with e{i}")
    return ModuleMap(src=src, dst=dst, matrix=matrix)


def zero_module(algebra: Algebra) -> ModuleRep:
    z = FpMatrix.zeros(algebra.p, 0, 0)
    return ModuleRep(algebra=algebra, mdim=0, action=tuple(z for _ in range(algebra.dim)))


def zero_map(src: ModuleRep, dst: ModuleRep) -> ModuleMap:
    return ModuleMap(src, dst, FpMatrix.zeros(src.p, dst.mdim, src.mdim))


def identity_map(m: ModuleRep) -> ModuleMap:
    return ModuleMap(m, m, FpMatrix.identity(m.p, m.mdim))


def free_module(algebra: Algebra, k: int) -> ModuleRep:
    """A^k with the regular action on each summand."""
    if k < 0:
        raise InvalidModule("rank must be >= 0")
    if k == 0:
        return zero_module(algebra)
    reg = algebra.regular_action()
    action = tuple(block_diag(algebra.p, [reg[i]] * k) for i in range(algebra.dim))
    return ModuleRep(algebra=algebra, mdim=k * algebra.dim, action=action)


def regular_module(algebra: Algebra) -> ModuleRep:
    return free_module(algebra, 1)


def direct_sum_modules(mods: Sequence[ModuleRep]) -> ModuleRep:
    if not mods:
        raise InvalidModule("need at least one summand (use zero_module)")
    a = mods[0].algebra
    if any(m.algebra != a for m in mods):
        raise InvalidModule("summands live over different algebras")
    action = tuple(
        block_diag(a.p, [m.act(i) for m in mods]) for i in range(a.dim)
    )
    return ModuleRep(algebra=a, mdim=sum(m.mdim for m in mods), action=action)


def sum_inclusions(total: ModuleRep, mods: Sequence[ModuleRep]) -> list[ModuleMap]:
    """Canonical inclusions of the summands into their direct sum."""
    out = []
    offset = 0
    for m in mods:
        mat = np.zeros((total.mdim, m.mdim), dtype=np.int64)
        mat[offset : offset + m.mdim] = np.eye(m.mdim, dtype=np.int64)
        out.append(ModuleMap(m, total, FpMatrix(total.p, mat, cols=m.mdim)))
        offset += m.mdim
    return out


# identity-keyed caches: verifier sweeps ask for the same hom spaces and
# covers over and over on shared module objects
_HOM_CACHE: "WeakKeyDictionary[ModuleRep, WeakKeyDictionary]" = WeakKeyDictionary()
_COVER_CACHE: "WeakKeyDictionary[ModuleRep, tuple]" = WeakKeyDictionary()
_FACTORABLE_CACHE: "WeakKeyDictionary[ModuleRep, WeakKeyDictionary]" = WeakKeyDictionary()


def hom_space(m: ModuleRep, n: ModuleRep) -> tuple[ModuleMap, ...]:
    """Canonical basis of the space of equivariant maps m -> n.

    Computed as the kernel of the stacked commutation constraints
    F.rho_m(e_i) = rho_n(e_i).F, vectorized row-major.  The result is
    cached per module pair; treat it as read-only.
    """
    inner = _HOM_CACHE.get(m)
    if inner is not None:
        hit = inner.get(n)
        if hit is not None:
            return hit
    if m.algebra != n.algebra:
        raise InvalidMap("hom_space needs a common algebra")
    nm, mm = n.mdim, m.mdim
    if nm == 0 or mm == 0:
        out: tuple[ModuleMap, ...] = ()
    else:
        p = m.p
        eye_n = FpMatrix.identity(p, nm)
        eye_m = FpMatrix.identity(p, mm)
        blocks = []
        for i in range(m.algebra.dim):
            blocks.append(kron(eye_n, m.act(i).T) - kron(n.act(i), eye_m))
        ker = kernel_basis(vstack(blocks))
        maps = []
        for row in ker.a:
            mat = FpMatrix(p, row.reshape(nm, mm).copy(), cols=mm)
            maps.append(ModuleMap(m, n, mat))
        out = tuple(maps)
    _HOM_CACHE.setdefault(m, WeakKeyDictionary())[n] = out
    return out


def hom_dim(m: ModuleRep, n: ModuleRep) -> int:
    return len(hom_space(m, n))


def map_from_coords(basis: Sequence[ModuleMap], coeffs) -> ModuleMap:
    if not basis:
        raise InvalidMap("empty basis")
    p = basis[0].p
    acc = np.zeros(basis[0].matrix.shape, dtype=np.int64)
    for c, b in zip(coeffs, basis):
        acc = (acc + int(c) * b.matrix.a) % p
    return ModuleMap(
        basis[0].src, basis[0].dst, FpMatrix(p, acc, cols=basis[0].matrix.cols)
    )


def map_coords(basis: Sequence[ModuleMap], f: ModuleMap) -> Optional[np.ndarray]:
    """Coordinates of f in a hom basis, or None if it is outside the span."""
    if not basis:
        return np.zeros(0, dtype=np.int64) if f.is_zero() else None
    rows = FpMatrix(
        f.p,
        np.stack([b.matrix.vec() for b in basis]),
        cols=f.matrix.rows * f.matrix.cols,
    )
    return fplin.coordinates_in_rows(rows, f.matrix.vec())


def kernel(f: ModuleMap) -> tuple[ModuleRep, ModuleMap]:
    """Kernel subrepresentation with its inclusion."""
    rows = kernel_basis(f.matrix)  # rows span ker(f) in src coordinates
    return _sub_rep(f.src, rows)


def image(f: ModuleMap) -> tuple[ModuleRep, ModuleMap]:
    """Image subrepresentation with its inclusion into dst."""
    rows = fplin.image_basis(f.matrix)
    return _sub_rep(f.dst, rows)


def _sub_rep(ambient: ModuleRep, rows: FpMatrix) -> tuple[ModuleRep, ModuleMap]:
    """Subrepresentation on an invariant subspace spanned by `rows`."""
    k = rows.rows
    incl = rows.T  # ambient.mdim x k
    action = []
    for i in range(ambient.algebra.dim):
        sol = solve_matrix(incl, ambient.act(i) @ incl)
        if sol is None:
            raise InvalidModule("subspace is not invariant under the action")
        action.append(sol)
    sub = ModuleRep(algebra=ambient.algebra, mdim=k, action=tuple(action))
    return sub, ModuleMap(sub, ambient, incl)


def quotient(ambient: ModuleRep, rows: FpMatrix) -> tuple[ModuleRep, ModuleMap]:
    """Quotient of `ambient` by the invariant subspace spanned by `rows`.

    The quotient basis is the image of the standard basis vectors at the
    non-pivot coordinates of the subspace's RREF (deterministic
    complement), so certificates are reproducible.
    """
    p = ambient.p
    red, pivots, rk = fplin.rref(rows)
    b = red.a[:rk]
    nonpiv = [j for j in range(ambient.mdim) if j not in set(pivots)]
    q = len(nonpiv)
    proj = np.zeros((q, ambient.mdim), dtype=np.int64)
    for qi, j in enumerate(nonpiv):
        proj[qi, j] = 1
    for t, pc in enumerate(pivots):
        for qi, j in enumerate(nonpiv):
            proj[qi, pc] = (proj[qi, pc] - int(b[t, j])) % p
    projm = FpMatrix(p, proj, cols=ambient.mdim)
    action = []
    for i in range(ambient.algebra.dim):
        act = projm @ FpMatrix(p, ambient.act(i).a[:, nonpiv].copy(), cols=q)
        action.append(act)
    quo = ModuleRep(algebra=ambient.algebra, mdim=q, action=tuple(action))
    proj_map = ModuleMap(ambient, quo, projm)
    # sanity: the projection must be equivariant; cheap and worth keeping
    for i in range(ambient.algebra.dim):
        if proj_map.matrix @ ambient.act(i) != quo.act(i) @ proj_map.matrix:
            raise InvalidModule("quotient action failed equivariance")
    return quo, proj_map


def cokernel(f: ModuleMap) -> tuple[ModuleRep, ModuleMap]:
    """Cokernel with the projection dst -> dst/im(f)."""
    return quotient(f.dst, fplin.image_basis(f.matrix))


def submodule_generated(ambient: ModuleRep, vectors) -> FpMatrix:
    """Row basis of the submodule generated by the given vectors."""
    p = ambient.p
    rows = FpMatrix(p, np.atleast_2d(np.asarray(vectors, dtype=np.int64)) % p,
                    cols=ambient.mdim)
    rows = fplin.row_space_basis(rows)
    while True:
        new = [rows]
        for i in range(ambient.algebra.dim):
            new.append((ambient.act(i) @ rows.T).T)
        bigger = fplin.row_space_basis(vstack(new))
        if bigger.rows == rows.rows:
            return bigger
        rows = bigger


def free_cover(m: ModuleRep) -> tuple[ModuleRep, ModuleMap]:
    """The standard surjection A^mdim -> m sending generator j to basis j.

    Non-minimal on purpose: whether a map factors through *some*
    projective does not depend on the cover being minimal.
    """
    hit = _COVER_CACHE.get(m)
    if hit is not None:
        return hit
    a = m.algebra
    f = free_module(a, m.mdim)
    d = a.dim
    mat = np.zeros((m.mdim, m.mdim * d), dtype=np.int64)
    for j in range(m.mdim):
        for t in range(d):
            mat[:, j * d + t] = m.act(t).a[:, j]
    eps = ModuleMap(f, m, FpMatrix(m.p, mat, cols=m.mdim * d))
    _COVER_CACHE[m] = (f, eps)
    return f, eps


def factor_through_projective(f: ModuleMap) -> Verdict:
    """Does f factor through a projective module?

    Equivalent to lifting f along the free cover of its target: returns
    the lift as a positive certificate, or the witness with rank
    evidence when no lift exists.
    """
    cover, eps = free_cover(f.dst)
    basis = hom_space(f.src, cover)
    target_rows = [(eps.matrix @ b.matrix).vec() for b in basis]
    p = f.p
    ncols = f.dst.mdim * f.src.mdim
    span = FpMatrix(p, np.stack(target_rows) if target_rows else np.zeros((0, ncols), dtype=np.int64), cols=ncols)
    coeffs = fplin.coordinates_in_rows(span, f.matrix.vec()) if ncols else np.zeros(0, dtype=np.int64)
    if ncols == 0 or coeffs is not None:
        if ncols == 0 or not basis:
            g = zero_map(f.src, cover)
        else:
            g = map_from_coords(basis, coeffs)
        if eps.compose(g).matrix != f.matrix:
            raise AssertionError("lift certificate failed to recompose")
        return Verdict(True, positive_cert=Factorization(through=cover, beta=g, alpha=eps))
    base_rank = rank(span)
    ext_rank = rank(vstack([span, FpMatrix(p, f.matrix.vec().reshape(1, -1), cols=ncols)]))
    return Verdict(
        False,
        negative_cert=RankEvidence(witness=f, subspace_rank=base_rank, extended_rank=ext_rank),
    )


def factorable_subspace(m: ModuleRep, n: ModuleRep) -> tuple[list[ModuleMap], FpMatrix]:
    """Basis maps spanning {f: m -> n factoring through a projective}.

    Returns (spanning maps, canonical row basis of their vectorization).
    """
    inner = _FACTORABLE_CACHE.get(m)
    if inner is not None:
        hit = inner.get(n)
        if hit is not None:
            return hit
    cover, eps = free_cover(n)
    lifted = [eps.compose(g) for g in hom_space(m, cover)]
    ncols = n.mdim * m.mdim
    if lifted:
        rows = FpMatrix(m.p, np.stack([g.matrix.vec() for g in lifted]), cols=ncols)
    else:
        rows = FpMatrix.zeros(m.p, 0, ncols)
    result = (lifted, fplin.row_space_basis(rows))
    _FACTORABLE_CACHE.setdefault(m, WeakKeyDictionary())[n] = result
    return result


def is_subprojective(m: ModuleRep, n: ModuleRep) -> Verdict:
    """Does every map m -> n factor through a projective?

    True iff the factorable subspace has full dimension inside
    Hom(m, n); the negative certificate is one unfactorable basis map.
    """
    basis = hom_space(m, n)
    if not basis:
        return Verdict(True, positive_cert=())
    _, span = factorable_subspace(m, n)
    full = FpMatrix(m.p, np.stack([b.matrix.vec() for b in basis]), cols=span.cols)
    if rank(vstack([span, full])) == span.rows:
        certs = []
        for b in basis:
            v = factor_through_projective(b)
            certs.append(v.positive_cert)
        return Verdict(True, positive_cert=tuple(certs))
    for b in basis:
        if not fplin.subspace_contains(span, b.matrix.vec()):
            ext = rank(vstack([span, FpMatrix(m.p, b.matrix.vec().reshape(1, -1), cols=span.cols)]))
            return Verdict(
                False,
                negative_cert=RankEvidence(witness=b, subspace_rank=span.rows, extended_rank=ext),
            )
    raise AssertionError("rank test and basis scan disagree")


def is_projective(m: ModuleRep) -> bool:
    """Projective iff the free cover splits, i.e. id factors through it."""
    return factor_through_projective(identity_map(m)).holds


def dual_module(m: ModuleRep) -> ModuleRep:
    """Linear dual as a module over the opposite algebra.

    On dual bases the action matrices are just the transposes; the
    double dual is this very representation again.
    """
    op = opposite(m.algebra)
    return ModuleRep(
        algebra=op, mdim=m.mdim, action=tuple(a.T for a in m.action)
    )


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.dst), dual_module(f.src), f.matrix.T)


def is_injective(m: ModuleRep) -> bool:
    """Injectivity via duality: m is injective iff its dual is projective."""
    return is_projective(dual_module(m))


def is_qf(algebra: Algebra) -> bool:
    """Quasi-Frobenius: the regular module is injective."""
    return is_injective(regular_module(algebra))


ISO_SEARCH_CAP = 1 << 16


@dataclass
class IsoResult:
    status: str  # "iso" | "no" | "undecided"
    map: Optional[ModuleMap] = None


def find_isomorphism(m: ModuleRep, n: ModuleRep, cap: int = ISO_SEARCH_CAP) -> IsoResult:
    """Brute-force search for an invertible equivariant map m -> n.

    Enumerates the hom space (up to `cap` candidates); over a field this
    is short-circuited since dimension determines the module.
    """
    if m.algebra != n.algebra:
        return IsoResult("no")
    if m.mdim != n.mdim:
        return IsoResult("no")
    if m.mdim == 0:
        return IsoResult("iso", zero_map(m, n))
    if m.algebra.dim == 1:
        return IsoResult("iso", ModuleMap(m, n, FpMatrix.identity(m.p, m.mdim)))
    if hom_dim(m, m) != hom_dim(n, n) or hom_dim(m, n) != hom_dim(n, m):
        return IsoResult("no")
    basis = hom_space(m, n)
    k = len(basis)
    p = m.p
    if k == 0:
        return IsoResult("no")
    if p**k > cap:
        return IsoResult("undecided")
    stack = np.stack([b.matrix.a for b in basis])
    coeffs = fplin.all_combinations(p, k)
    for row in coeffs[1:]:  # skip the zero map
        mat = np.tensordot(row, stack, axes=1) % p
        fm = FpMatrix(p, mat, cols=m.mdim)
        if fplin.invertible(fm):
            return IsoResult("iso", ModuleMap(m, n, fm))
    return IsoResult("no")
