"""Morphism spaces: Hom bases, retractions and isomorphism tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import NotMono, PosetMismatch, RetractionMissing
from .module import (Morphism, PersistenceModule, identity_morphism,
                     morphism_from_flat)

__all__ = ["HomBasis", "hom_basis", "end_basis", "retraction", "are_isomorphic",
           "IsoResult", "Morphism"]


@dataclass(frozen=True, eq=False)
class HomBasis:
    source: PersistenceModule
    target: PersistenceModule
    morphisms: tuple[Morphism, ...]

    def __len__(self):
        return len(self.morphisms)

    def __iter__(self):
        return iter(self.morphisms)

    def __getitem__(self, k):
        return self.morphisms[k]

    @property
    def dim(self) -> int:
        return len(self.morphisms)

    def combination(self, coeffs) -> Morphism:
        p = self.source.p
        vec = la.zeros(1, self._width()).ravel()
        for c, f in zip(coeffs, self.morphisms):
            vec = (vec + (int(c) % p) * f.flatten()) % p
        return morphism_from_flat(self.source, self.target, vec)

    def _width(self) -> int:
        return sum(a * b for a, b in zip(self.source.dims, self.target.dims))


def _constraint_matrix(m: PersistenceModule, n: PersistenceModule) -> np.ndarray:
    """Rows encode ``N_ab f_a - f_b M_ab = 0`` for every cover, row-major vec."""
    p = m.p
    sizes = [a * b for a, b in zip(m.dims, n.dims)]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    width = int(offsets[-1])
    blocks = []
    for a, b in m.poset.covers:
        rows = n.dims[b] * m.dims[a]
        if rows == 0:
            continue
        blk = la.zeros(rows, width)
        if sizes[a]:
            blk[:, offsets[a]:offsets[a + 1]] = np.kron(n.maps[(a, b)], la.identity(m.dims[a]))
        if sizes[b]:
            blk[:, offsets[b]:offsets[b + 1]] = (
                blk[:, offsets[b]:offsets[b + 1]] - np.kron(la.identity(n.dims[b]), m.maps[(a, b)].T)) % p
        blocks.append(blk % p)
    if not blocks:
        return la.zeros(0, width)
    return np.vstack(blocks)


def hom_basis(m: PersistenceModule, n: PersistenceModule) -> HomBasis:
    """A basis of Hom(M, N): the kernel of the stacked commutation system.

    Basis vectors come out in reduced echelon order of their flattened
    coordinates, so the basis is canonical for the given modules.
    """
    if m.poset != n.poset:
        raise PosetMismatch("Hom between modules over different posets")
    if m.field != n.field:
        raise PosetMismatch(f"Hom between F_{m.p} and F_{n.p} modules")
    system = _constraint_matrix(m, n)
    kern = la.kernel_basis(system, m.p)
    return HomBasis(m, n, tuple(morphism_from_flat(m, n, row) for row in kern.basis))


def end_basis(m: PersistenceModule) -> HomBasis:
    return hom_basis(m, m)


def retraction(f: Morphism) -> Morphism | None:
    """A left inverse ``g`` with ``g ∘ f = id`` among all morphisms, or None.

    When the source is k_I for a directed ideal I the left inverse must
    exist; callers that know this should use :func:`require_retraction`.
    """
    if not f.is_mono():
        raise NotMono("retraction requested for a morphism that is not pointwise injective")
    src, tgt, p = f.source, f.target, f.p
    basis = hom_basis(tgt, src)
    target = identity_morphism(src).flatten()
    if target.size == 0:
        return Morphism(tgt, src, tuple(la.zeros(a, b) for a, b in zip(src.dims, tgt.dims)))
    if basis.dim == 0:
        return None
    cols = np.stack([g.compose(f).flatten() for g in basis], axis=1)
    sol = la.solve(cols, target.reshape(-1, 1), p)
    if sol is None:
        return None
    return basis.combination(sol.ravel())


def require_retraction(f: Morphism) -> Morphism:
    g = retraction(f)
    if g is None:
        raise RetractionMissing("monomorphism from an injective module does not split")
    return g


@dataclass(frozen=True, eq=False)
class IsoResult:
    isomorphic: bool
    witness: Morphism | None = None
    method: str = ""

    def __bool__(self):
        return self.isomorphic


def _first_invertible(candidates) -> Morphism | None:
    for f in candidates:
        if f.is_iso():
            return f
    return None


def basis_isomorphism(m: PersistenceModule, n: PersistenceModule) -> Morphism | None:
    """An isomorphism among the Hom(M, N) basis elements, if any.

    Complete when End(M) is local: the products g_i ∘ f_j span an ideal
    that escapes the radical exactly when M ≅ N, and then some f_j is a
    split mono between modules of equal dimension.
    """
    if m.dims != n.dims:
        return None
    if m.total_dim == 0:
        return identity_morphism(m)
    return _first_invertible(hom_basis(m, n))


def are_isomorphic(m: PersistenceModule, n: PersistenceModule, seed: int = 0,
                   trials: int = 64) -> IsoResult:
    """Decide M ≅ N, returning an explicit isomorphism when one is found.

    Tries the Hom basis, then ``trials`` seeded random combinations, then
    falls back to matching the indecomposable summands of both modules.
    """
    if m.poset != n.poset or m.field != n.field:
        raise PosetMismatch("modules live over different posets or fields")
    if m.dims != n.dims:
        return IsoResult(False, None, "dims")
    if m.total_dim == 0:
        return IsoResult(True, identity_morphism(m), "zero")
    basis = hom_basis(m, n)
    if basis.dim == 0:
        return IsoResult(False, None, "hom-zero")
    f = _first_invertible(basis)
    if f is not None:
        return IsoResult(True, f, "basis")
    rng = np.random.default_rng(seed)
    p = m.p
    for _ in range(trials):
        f = basis.combination(rng.integers(0, p, size=basis.dim))
        if f.is_iso():
            return IsoResult(True, f, "random")
    from .decomp import decompose, krs_match
    match = krs_match(decompose(m, seed), decompose(n, seed))
    if not match.ok:
        return IsoResult(False, None, "decomposition")
    return IsoResult(True, match.assemble_isomorphism(), "decomposition")
