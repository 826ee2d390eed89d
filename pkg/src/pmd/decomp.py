"""Decomposition into indecomposable summands.

The engine is Fitting's lemma: for an endomorphism θ and n at least every
pointwise dimension, ``M = Im θ^n ⊕ Ker θ^n`` as modules.  The driver keeps
splitting with ``θ - λ`` for θ drawn from the End basis (then from seeded
random combinations) and λ ranging over eigenvalues in F_p, until no
summand splits further.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import NotEndomorphism
from .homspace import basis_isomorphism, end_basis
from .module import (Morphism, PersistenceModule, SubmoduleFamily,
                     identity_morphism)

log = logging.getLogger(__name__)

DEFAULT_TRIALS = 32


@dataclass(frozen=True)
class Certificate:
    """Why a summand is believed indecomposable.

    ``EndDimOne`` is a proof (End = k·id is local); ``HeuristicExhausted``
    means dim End > 1 but no basis element or random trial split it.
    """

    kind: str
    trials: int = 0

    @property
    def proven(self) -> bool:
        return self.kind == "EndDimOne"

    def __str__(self):
        return self.kind if self.proven else f"{self.kind}({self.trials})"


END_DIM_ONE = Certificate("EndDimOne")


@dataclass(frozen=True, eq=False)
class Summand:
    module: PersistenceModule
    embedding: Morphism
    projection: Morphism
    certificate: Certificate

    @property
    def support(self) -> frozenset[int]:
        return self.module.support


@dataclass(frozen=True, eq=False)
class Decomposition:
    original: PersistenceModule
    summands: tuple[Summand, ...]
    seed: int = 0

    def __len__(self):
        return len(self.summands)

    def __iter__(self):
        return iter(self.summands)

    @property
    def supports(self) -> list[frozenset[int]]:
        return [s.support for s in self.summands]

    def reconstruction(self) -> Morphism:
        """Σ e_i ∘ p_i, which must equal the identity of the original."""
        total = identity_morphism(self.original).scale(0)
        for s in self.summands:
            total = total + s.embedding.compose(s.projection)
        return total

    def reconstructs(self) -> bool:
        return self.reconstruction().equals(identity_morphism(self.original))

    def orthogonal(self) -> bool:
        """p_i ∘ e_j = δ_ij id for all i, j."""
        for i, si in enumerate(self.summands):
            for j, sj in enumerate(self.summands):
                prod = si.projection.compose(sj.embedding)
                if i == j:
                    if not prod.equals(identity_morphism(si.module)):
                        return False
                elif not prod.is_zero():
                    return False
        return True


@dataclass(frozen=True, eq=False)
class FittingSplit:
    image: SubmoduleFamily
    kernel: SubmoduleFamily
    exponent: int
    image_module: PersistenceModule
    kernel_module: PersistenceModule
    image_embedding: Morphism
    image_projection: Morphism
    kernel_embedding: Morphism
    kernel_projection: Morphism

    @property
    def nontrivial(self) -> bool:
        return not self.image.is_zero() and not self.kernel.is_zero()


def fitting_split(module: PersistenceModule, theta: Morphism) -> FittingSplit:
    """Split M along Im θ^n ⊕ Ker θ^n with n = max pointwise dimension."""
    if theta.source is not module and not (theta.source == module):
        raise NotEndomorphism("θ does not start at the module")
    if theta.target is not module and not (theta.target == module):
        raise NotEndomorphism("θ does not end at the module")
    if not theta.is_valid():
        raise NotEndomorphism("θ does not commute with the structure maps")
    p = module.p
    n = max(module.dims, default=0)
    ims, kers, e_im, e_ker, p_im, p_ker = [], [], [], [], [], []
    for x, d in enumerate(module.dims):
        power = la.mat_pow(theta.comps[x], n, p)
        im = la.image_basis(power, p)
        ker = la.kernel_basis(power, p)
        ims.append(im)
        kers.append(ker)
        change = np.hstack([im.columns, ker.columns]) if d else la.zeros(0, 0)
        inv = la.inverse(change, p)
        p_im.append(inv[:im.dim])
        p_ker.append(inv[im.dim:])
    image = SubmoduleFamily(module, tuple(ims))
    kernel = SubmoduleFamily(module, tuple(kers))
    im_mod, im_inc = image.as_module()
    ker_mod, ker_inc = kernel.as_module()
    return FittingSplit(
        image, kernel, n, im_mod, ker_mod,
        im_inc, Morphism(module, im_mod, tuple(p_im)),
        ker_inc, Morphism(module, ker_mod, tuple(p_ker)))


def _eigenvalues(theta: Morphism) -> list[int]:
    p = theta.p
    roots: set[int] = set()
    for f in theta.comps:
        if f.shape[0]:
            roots.update(la.poly_roots(la.charpoly(f, p), p))
    return sorted(roots)


def _try_split(module: PersistenceModule, theta: Morphism) -> FittingSplit | None:
    ident = identity_morphism(module)
    for lam in _eigenvalues(theta):
        split = fitting_split(module, theta - ident.scale(lam))
        if split.nontrivial:
            return split
    return None


def _find_split(module, basis, rng, trials) -> FittingSplit | None:
    for theta in basis:
        split = _try_split(module, theta)
        if split is not None:
            return split
    p = module.p
    for _ in range(trials):
        theta = basis.combination(rng.integers(0, p, size=basis.dim))
        split = _try_split(module, theta)
        if split is not None:
            return split
    return None


def _decompose(module, rng, trials) -> list[tuple[PersistenceModule, Morphism, Morphism, Certificate]]:
    if module.is_zero():
        return []
    ident = identity_morphism(module)
    basis = end_basis(module)
    if basis.dim == 1:
        return [(module, ident, ident, END_DIM_ONE)]
    split = _find_split(module, basis, rng, trials)
    if split is None:
        log.debug("no split found for %r (dim End = %d)", module, basis.dim)
        return [(module, ident, ident, Certificate("HeuristicExhausted", trials))]
    out = []
    for part, emb, proj in ((split.image_module, split.image_embedding, split.image_projection),
                            (split.kernel_module, split.kernel_embedding, split.kernel_projection)):
        for sub, e, q, cert in _decompose(part, rng, trials):
            out.append((sub, emb.compose(e), q.compose(proj), cert))
    return out


def _summand_key(s: Summand):
    return (tuple(sorted(s.support)), s.module.dims)


def decompose(module: PersistenceModule, seed: int = 0, trials: int = DEFAULT_TRIALS) -> Decomposition:
    """Decompose M into indecomposables with embedding/projection witnesses.

    Deterministic for a fixed ``seed``.  Summands are ordered by support and
    then by pointwise dimensions.
    """
    rng = np.random.default_rng(seed)
    parts = [Summand(s, e, q, c) for s, e, q, c in _decompose(module, rng, trials)]
    parts.sort(key=_summand_key)
    return Decomposition(module, tuple(parts), seed)


# --- Krull-Remak-Schmidt matching ----------------------------------------------

@dataclass(frozen=True, eq=False)
class KRSMatch:
    ok: bool
    pairs: tuple[tuple[int, int, Morphism], ...] = ()
    report: str = ""
    left: object = field(default=None, repr=False)
    right: object = field(default=None, repr=False)

    def bijection(self) -> dict[int, int]:
        return {i: j for i, j, _ in self.pairs}

    def assemble_isomorphism(self) -> Morphism:
        """Σ e'_j ∘ w_ij ∘ p_i : M -> N from a matching of two Decompositions."""
        if not self.ok or not isinstance(self.left, Decomposition):
            raise ValueError("need a successful match between two Decompositions")
        a, b = self.left, self.right
        total = None
        for i, j, w in self.pairs:
            term = b.summands[j].embedding.compose(w.compose(a.summands[i].projection))
            total = term if total is None else total + term
        if total is None:
            return identity_morphism(a.original)
        return total


def _modules_of(dec) -> list[PersistenceModule]:
    if isinstance(dec, Decomposition):
        return [s.module for s in dec.summands]
    return list(dec)


def krs_match(a, b) -> KRSMatch:
    """Pair isomorphic summands of two decompositions, or explain the mismatch.

    ``a`` and ``b`` are Decompositions or plain sequences of indecomposable
    modules.  Isomorphism of indecomposables is tested on Hom basis elements,
    which is complete because their endomorphism rings are local.
    """
    left, right = _modules_of(a), _modules_of(b)
    used = [False] * len(right)
    pairs = []
    for i, m in enumerate(left):
        hit = None
        for j, n in enumerate(right):
            if used[j] or n.dims != m.dims:
                continue
            w = basis_isomorphism(m, n)
            if w is not None:
                hit = (j, w)
                break
        if hit is None:
            mult_a = sum(1 for x in left if x.dims == m.dims and basis_isomorphism(m, x) is not None)
            mult_b = sum(1 for y in right if y.dims == m.dims and basis_isomorphism(m, y) is not None)
            report = (f"summand #{i} (support {sorted(m.support)}, dims {list(m.dims)}) "
                      f"has multiplicity {mult_a} on the left and {mult_b} on the right")
            return KRSMatch(False, tuple(pairs), report, a, b)
        used[hit[0]] = True
        pairs.append((i, hit[0], hit[1]))
    if not all(used):
        j = used.index(False)
        n = right[j]
        mult_b = sum(1 for y in right if y.dims == n.dims and basis_isomorphism(n, y) is not None)
        mult_a = sum(1 for x in left if x.dims == n.dims and basis_isomorphism(n, x) is not None)
        report = (f"summand #{j} on the right (support {sorted(n.support)}, dims {list(n.dims)}) "
                  f"has multiplicity {mult_a} on the left and {mult_b} on the right")
        return KRSMatch(False, tuple(pairs), report, a, b)
    return KRSMatch(True, tuple(pairs), "ok", a, b)
