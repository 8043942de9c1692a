"""Subprojectivity decisions for chain complexes, with dual certificates.

A chain map factors through a projective complex iff it lifts along the
canonical projective epi built from disks on free covers, and iff it is
null-homotopic by a homotopy whose components all factor through
projective modules.  Both routes are implemented and cross-checked: a
disagreement raises InternalConsistencyError (a bug trap, never an
expected outcome).

The two degreewise homotopy builders mirror the constructive arguments
that make exactness hypotheses usable: one walks up from the bottom of a
bounded-below source, the other walks down from the top of a
bounded-above target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence
from weakref import WeakKeyDictionary

import numpy as np

from . import fplin
from .certificates import (
    Factorization,
    InternalConsistencyError,
    RankEvidence,
    Verdict,
)
from .complexes import (
    ChainComplex,
    ChainMap,
    Homotopy,
    chain_complex,
    chain_map,
    chain_maps,
    cycles,
    direct_sum_modules,
    disk,
    homotopy_classes_dim,
    image,
    is_exact,
    is_null_homotopy,
    zero_chain_map,
    zero_complex,
)
from .fplin import FpMatrix
from .modules import (
    ModuleMap,
    ModuleRep,
    factor_through_projective,
    free_cover,
    hom_space,
    is_subprojective,
    map_from_coords,
    module_map,
    zero_map,
)

_EPI_CACHE: "WeakKeyDictionary[ChainComplex, tuple]" = WeakKeyDictionary()


def projective_epi(n: ChainComplex) -> tuple[ChainComplex, ChainMap]:
    """The canonical degreewise-surjective map from a projective complex.

    Q is a sum of disks on the free covers of the terms; its degree-m
    piece is F(N_m) + F(N_{m+1}), hit by [eps_m | d_{m+1} . eps_{m+1}].
    Q is contractible with free terms, i.e. a projective object among
    complexes.
    """
    hit = _EPI_CACHE.get(n)
    if hit is not None:
        return hit
    a = n.algebra
    if n.is_zero():
        q = zero_complex(a)
        result = (q, zero_chain_map(q, n))
        _EPI_CACHE[n] = result
        return result
    covers = {}
    for m in range(n.lo, n.hi + 1):
        covers[m] = free_cover(n.term(m))
    zero_cover = free_cover(n.term(n.lo - 1))  # cover of the zero module

    def cov(m: int):
        return covers.get(m, zero_cover)

    lo = n.lo - 1
    hi = n.hi
    terms = []
    for m in range(lo, hi + 1):
        terms.append(direct_sum_modules([cov(m)[0], cov(m + 1)[0]]))
    diffs = []
    for m in range(lo + 1, hi + 1):
        top = cov(m)[0].mdim
        bot = cov(m + 1)[0].mdim
        prev_top = cov(m - 1)[0].mdim
        mat = np.zeros((prev_top + top, top + bot), dtype=np.int64)
        mat[prev_top : prev_top + top, :top] = np.eye(top, dtype=np.int64)
        diffs.append(FpMatrix(a.p, mat, cols=top + bot))
    q = chain_complex(a, lo, terms, diffs)
    comps = []
    for m in range(lo, hi + 1):
        eps_m = cov(m)[1]
        eps_next = cov(m + 1)[1]
        right = n.diff(m + 1).matrix @ eps_next.matrix
        comps.append(fplin.hstack([eps_m.matrix, right]))
    pi = chain_map(q, n, lo, comps)
    result = (q, pi)
    _EPI_CACHE[n] = result
    return result


def _joint_window(m: ChainComplex, n: ChainComplex) -> range:
    return range(max(m.lo, n.lo), min(m.hi, n.hi) + 1)


def _vec_chain_map(f: ChainMap, window: range) -> np.ndarray:
    parts = [f.component(d).matrix.vec() for d in window]
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


def _vec_len(m: ChainComplex, n: ChainComplex, window: range) -> int:
    return sum(n.term(d).mdim * m.term(d).mdim for d in window)


def lift_along_projective_epi(f: ChainMap) -> Optional[ChainMap]:
    """A chain map g with pi . g = f, or None; pi the canonical epi onto f.dst."""
    q, pi = projective_epi(f.dst)
    window = _joint_window(f.src, f.dst)
    ncols = _vec_len(f.src, f.dst, window)
    basis = chain_maps(f.src, q)
    if ncols == 0:
        return zero_chain_map(f.src, q)
    rows = [_vec_chain_map(pi.compose(g), window) for g in basis]
    span = FpMatrix(f.p, np.stack(rows) if rows else np.zeros((0, ncols), dtype=np.int64), cols=ncols)
    coords = fplin.coordinates_in_rows(span, _vec_chain_map(f, window))
    if coords is None:
        return None
    g = zero_chain_map(f.src, q)
    for c, b in zip(coords, basis):
        g = g + b.scale(int(c))
    if pi.compose(g) != f:
        raise AssertionError("lift failed to recompose")
    return g


def constrained_null_homotopy(f: ChainMap) -> Optional[Homotopy]:
    """A homotopy for f with every component inside the subspace of maps
    that factor through a projective module, or None.

    Components are parametrized by lifts into the free covers of the
    target terms, so a solution comes with its factorizations built in.
    """
    m, n = f.src, f.dst
    p = f.p
    window = list(_joint_window(m, n))
    unknown_degrees = []
    lift_bases = {}
    for d in range(m.lo, m.hi + 1):
        tgt = n.term(d + 1)
        if m.term(d).mdim == 0 or tgt.mdim == 0:
            continue
        cover, eps = free_cover(tgt)
        basis = hom_space(m.term(d), cover)
        if basis:
            unknown_degrees.append(d)
            lift_bases[d] = (cover, eps, basis)
    col_offsets = {}
    total_cols = 0
    for d in unknown_degrees:
        col_offsets[d] = total_cols
        total_cols += len(lift_bases[d][2])
    row_offsets = {}
    total_rows = 0
    for d in window:
        row_offsets[d] = total_rows
        total_rows += n.term(d).mdim * m.term(d).mdim
    sys = np.zeros((total_rows, total_cols), dtype=np.int64)
    for d in unknown_degrees:
        cover, eps, basis = lift_bases[d]
        for j, h in enumerate(basis):
            col = col_offsets[d] + j
            s_mat = (eps.matrix @ h.matrix).a  # candidate component M_d -> N_{d+1}
            if d in row_offsets:
                contrib = (n.diff(d + 1).matrix.a @ s_mat) % p
                off = row_offsets[d]
                sys[off : off + contrib.size, col] = (
                    sys[off : off + contrib.size, col] + contrib.reshape(-1)
                ) % p
            if d + 1 in row_offsets:
                contrib = (s_mat @ m.diff(d + 1).matrix.a) % p
                off = row_offsets[d + 1]
                sys[off : off + contrib.size, col] = (
                    sys[off : off + contrib.size, col] + contrib.reshape(-1)
                ) % p
    rhs = _vec_chain_map(f, range(window[0], window[-1] + 1)) if window else np.zeros(0, dtype=np.int64)
    sol = fplin.solve_matrix(
        FpMatrix(p, sys, cols=total_cols),
        FpMatrix(p, rhs.reshape(-1, 1), cols=1),
    )
    if sol is None:
        return None
    y = sol.a.reshape(-1)
    comps = []
    if unknown_degrees:
        lo = min(unknown_degrees)
        hi = max(unknown_degrees)
        for d in range(lo, hi + 1):
            if d in lift_bases:
                cover, eps, basis = lift_bases[d]
                off = col_offsets[d]
                lift = map_from_coords(list(basis), y[off : off + len(basis)])
                comps.append(eps.compose(lift))
            else:
                comps.append(zero_map(m.term(d), n.term(d + 1)))
        s = Homotopy(src=m, dst=n, lo=lo, components=tuple(comps))
    else:
        s = Homotopy(src=m, dst=n, lo=0, components=())
    if not is_null_homotopy(f, s):
        raise AssertionError("constrained homotopy failed to recompose")
    return s


def factor_through_projective_complex(f: ChainMap, cross_check: bool = True) -> Verdict:
    """Does the chain map f factor through a projective complex?

    Decided by lifting along the canonical projective epi; when
    `cross_check` is set the answer is recomputed through the
    constrained-homotopy characterization and compared.
    """
    q, pi = projective_epi(f.dst)
    g = lift_along_projective_epi(f)
    if cross_check:
        s = constrained_null_homotopy(f)
        if (g is None) != (s is None):
            raise InternalConsistencyError(
                "projective-epi lift and constrained homotopy disagree"
            )
    if g is not None:
        return Verdict(True, positive_cert=Factorization(through=q, beta=g, alpha=pi))
    window = _joint_window(f.src, f.dst)
    ncols = _vec_len(f.src, f.dst, window)
    rows = [_vec_chain_map(pi.compose(h), window) for h in chain_maps(f.src, q)]
    span = FpMatrix(
        f.p, np.stack(rows) if rows else np.zeros((0, ncols), dtype=np.int64), cols=ncols
    )
    base = fplin.rank(span)
    ext = fplin.rank(
        fplin.vstack([span, FpMatrix(f.p, _vec_chain_map(f, window).reshape(1, -1), cols=ncols)])
    )
    return Verdict(
        False,
        negative_cert=RankEvidence(witness=f, subspace_rank=base, extended_rank=ext),
    )


def is_subprojective_complex(m: ChainComplex, n: ChainComplex) -> Verdict:
    """Does every chain map m -> n factor through a projective complex?

    Rank test: the span of pi-composites against the full chain-map
    space.  The negative certificate is one unliftable basis map.
    """
    cms = chain_maps(m, n)
    if not cms:
        return Verdict(True, positive_cert=())
    q, pi = projective_epi(n)
    window = _joint_window(m, n)
    ncols = _vec_len(m, n, window)
    rows = [_vec_chain_map(pi.compose(g), window) for g in chain_maps(m, q)]
    span = FpMatrix(
        m.p, np.stack(rows) if rows else np.zeros((0, ncols), dtype=np.int64), cols=ncols
    )
    span = fplin.row_space_basis(span)
    full = FpMatrix(m.p, np.stack([_vec_chain_map(g, window) for g in cms]), cols=ncols)
    if fplin.rank(fplin.vstack([span, full])) == span.rows:
        certs = []
        for g in cms:
            v = factor_through_projective_complex(g, cross_check=False)
            certs.append(v.positive_cert)
        return Verdict(True, positive_cert=tuple(certs))
    for g in cms:
        if not fplin.subspace_contains(span, _vec_chain_map(g, window)):
            ext = fplin.rank(
                fplin.vstack(
                    [span, FpMatrix(m.p, _vec_chain_map(g, window).reshape(1, -1), cols=ncols)]
                )
            )
            return Verdict(
                False,
                negative_cert=RankEvidence(
                    witness=g, subspace_rank=span.rows, extended_rank=ext
                ),
            )
    raise AssertionError("rank test and basis scan disagree")


def check_termwise(m: ChainComplex, n: ChainComplex) -> bool:
    """N_{d+1} in the subprojectivity domain of M_d for every degree d."""
    for d in range(m.lo, m.hi + 1):
        if m.term(d).mdim == 0 or n.term(d + 1).mdim == 0:
            continue
        if not is_subprojective(m.term(d), n.term(d + 1)).holds:
            return False
    return True


@dataclass
class Thm311Report:
    termwise: bool
    subprojective: Optional[bool]
    homotopy_classes: Optional[int]
    consistent: bool


def cross_check_thm_3_11(m: ChainComplex, n: ChainComplex) -> Thm311Report:
    """Where the termwise condition holds, subprojectivity of the pair
    must coincide with the vanishing of homotopy classes."""
    tw = check_termwise(m, n)
    if not tw:
        return Thm311Report(termwise=False, subprojective=None, homotopy_classes=None, consistent=True)
    sub = is_subprojective_complex(m, n).holds
    hk = homotopy_classes_dim(m, n)
    return Thm311Report(
        termwise=True,
        subprojective=sub,
        homotopy_classes=hk,
        consistent=(sub == (hk == 0)),
    )


@dataclass
class HomotopyBuild:
    ok: bool
    homotopy: Optional[Homotopy] = None
    factorizations: dict = field(default_factory=dict)
    reason: str = ""
    failed_degree: Optional[int] = None


def _solve_right_factor(
    gamma_src: ModuleRep, gamma_dst: ModuleRep, post: FpMatrix, target: FpMatrix
) -> Optional[ModuleMap]:
    """An equivariant gamma: gamma_src -> gamma_dst with post @ gamma = target."""
    basis = hom_space(gamma_src, gamma_dst)
    if not basis:
        return None if not target.is_zero() else zero_map(gamma_src, gamma_dst)
    cols = [(post @ b.matrix).vec() for b in basis]
    span = FpMatrix(post.p, np.stack(cols), cols=target.rows * target.cols)
    coords = fplin.coordinates_in_rows(span, target.vec())
    if coords is None:
        return None
    return map_from_coords(list(basis), coords)


def _solve_left_factor(
    gamma_src: ModuleRep, gamma_dst: ModuleRep, pre: FpMatrix, target: FpMatrix
) -> Optional[ModuleMap]:
    """An equivariant gamma: gamma_src -> gamma_dst with gamma @ pre = target."""
    basis = hom_space(gamma_src, gamma_dst)
    if not basis:
        return None if not target.is_zero() else zero_map(gamma_src, gamma_dst)
    cols = [(b.matrix @ pre).vec() for b in basis]
    span = FpMatrix(pre.p, np.stack(cols), cols=target.rows * target.cols)
    coords = fplin.coordinates_in_rows(span, target.vec())
    if coords is None:
        return None
    return map_from_coords(list(basis), coords)


def build_homotopy_from_cycle_factorizations(f: ChainMap) -> HomotopyBuild:
    """Degreewise homotopy for f: M -> N, walking up from the bottom of M.

    Needs N exact and every induced map M_d -> Z_d(N) factorable through
    a projective; each step factors the residual through the cycles,
    lifts into the free cover, then lifts along the exact differential.
    Components come out factored as s_d = gamma_d . beta_d through the
    free cover of Z_d(N).
    """
    m, n = f.src, f.dst
    comps: dict[int, ModuleMap] = {}
    facts: dict[int, Factorization] = {}
    prev = None  # s_{d-1}
    cycle_cache: dict[int, tuple] = {}
    for d in range(m.lo, m.hi + 1):
        md = m.term(d)
        if md.mdim == 0:
            prev = None
            continue
        r = f.component(d)
        if prev is not None:
            r = ModuleMap(md, n.term(d), r.matrix - (prev.matrix @ m.diff(d).matrix))
        tgt = n.term(d + 1)
        if tgt.mdim == 0:
            if not r.matrix.is_zero():
                return HomotopyBuild(False, reason="residual hit a zero target term", failed_degree=d)
            prev = None
            continue
        if d not in cycle_cache:
            cycle_cache[d] = cycles(n, d)
        z, mu = cycle_cache[d]
        tmat = fplin.solve_matrix(mu.matrix, r.matrix)
        if tmat is None:
            return HomotopyBuild(False, reason="residual does not land in the cycles", failed_degree=d)
        t = ModuleMap(md, z, tmat)
        v = factor_through_projective(t)
        if not v.holds:
            return HomotopyBuild(
                False, reason="residual into cycles does not factor through a projective", failed_degree=d
            )
        beta = v.positive_cert.beta  # M_d -> F(Z_d)
        cover = v.positive_cert.through
        eps = v.positive_cert.alpha  # F(Z_d) -> Z_d
        # gamma: F(Z_d) -> N_{d+1} with d_{d+1} . gamma = mu . eps
        gamma = _solve_right_factor(
            cover, tgt, n.diff(d + 1).matrix, mu.matrix @ eps.matrix
        )
        if gamma is None:
            return HomotopyBuild(
                False, reason="free cover does not lift along the differential", failed_degree=d
            )
        s_d = gamma.compose(beta)
        comps[d] = s_d
        facts[d] = Factorization(through=cover, beta=beta, alpha=gamma)
        prev = s_d
    s = _homotopy_from_dict(f, comps)
    if not is_null_homotopy(f, s):
        return HomotopyBuild(False, reason="constructed family is not a homotopy")
    return HomotopyBuild(True, homotopy=s, factorizations=facts)


def build_homotopy_from_cocycle_factorizations(f: ChainMap) -> HomotopyBuild:
    """Degreewise homotopy for f: M -> N, walking down from the top of N.

    Needs M exact and every induced map out of the cycles of M into N_d
    factorable through a projective; each step factors the residual
    through the image of the differential, then extends along the cycle
    inclusion.  Components come out factored through free covers of the
    target terms.
    """
    m, n = f.src, f.dst
    comps: dict[int, ModuleMap] = {}
    facts: dict[int, Factorization] = {}
    nxt = None  # s_d while constructing s_{d-1}
    for d in range(min(m.hi, n.hi), m.lo - 1, -1):
        md = m.term(d)
        nd = n.term(d)
        if nd.mdim == 0:
            # the equation at d is vacuous and s_{d-1} maps into N_d = 0
            nxt = None
            continue
        r_mat = f.component(d).matrix
        if nxt is not None:
            r_mat = r_mat - (n.diff(d + 1).matrix @ nxt.matrix)
        if md.mdim == 0:
            if not r_mat.is_zero():
                return HomotopyBuild(False, reason="nonzero residual from a zero term", failed_degree=d)
            nxt = None
            continue
        # factor the residual through the image of d_d: M_d ->> Z (exactness of M)
        z, incl = image(m.diff(d))
        epi = fplin.solve_matrix(incl.matrix, m.diff(d).matrix)
        if epi is None:
            raise AssertionError("image computation lost its own generators")
        t = fplin.solve_left(epi, r_mat)
        if t is None:
            return HomotopyBuild(
                False, reason="residual does not factor through the boundary image", failed_degree=d
            )
        tmap = ModuleMap(z, nd, t)
        v = factor_through_projective(tmap)
        if not v.holds:
            return HomotopyBuild(
                False, reason="residual off the cycles does not factor through a projective", failed_degree=d
            )
        beta = v.positive_cert.beta  # Z -> F(N_d)
        cover = v.positive_cert.through
        eps = v.positive_cert.alpha  # F(N_d) -> N_d
        prev_m = m.term(d - 1)
        if prev_m.mdim == 0:
            nxt = None
            continue
        # gamma: M_{d-1} -> F(N_d) extending beta along the inclusion of Z
        gamma = _solve_left_factor(prev_m, cover, incl.matrix, beta.matrix)
        if gamma is None:
            return HomotopyBuild(
                False, reason="factor map does not extend along the cycle inclusion", failed_degree=d
            )
        s_prev = eps.compose(gamma)  # M_{d-1} -> N_d
        comps[d - 1] = s_prev
        facts[d - 1] = Factorization(through=cover, beta=gamma, alpha=eps)
        nxt = s_prev
    s = _homotopy_from_dict(f, comps)
    if not is_null_homotopy(f, s):
        return HomotopyBuild(False, reason="constructed family is not a homotopy")
    return HomotopyBuild(True, homotopy=s, factorizations=facts)


def _homotopy_from_dict(f: ChainMap, comps: dict[int, ModuleMap]) -> Homotopy:
    live = {d: c for d, c in comps.items() if c is not None}
    if not live:
        return Homotopy(src=f.src, dst=f.dst, lo=0, components=())
    lo = min(live)
    hi = max(live)
    out = []
    for d in range(lo, hi + 1):
        out.append(live.get(d) or zero_map(f.src.term(d), f.dst.term(d + 1)))
    return Homotopy(src=f.src, dst=f.dst, lo=lo, components=tuple(out))
