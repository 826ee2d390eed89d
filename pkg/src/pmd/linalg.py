"""Dense exact linear algebra over a prime field F_p.

Matrices are 2-d ``numpy.int64`` arrays with entries reduced into ``[0, p)``.
Empty shapes (``0 x n`` / ``n x 0``) are legal and stand for maps to or from
the zero space.  Products switch to Python integers when ``k * (p-1)**2``
could overflow 64 bits, so any prime below ``2**31`` is supported.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatch, InputError

DEFAULT_CHAR = 32003
MAX_CHAR = 2**31 - 1
_INT64_LIMIT = 2**63 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The prime field F_p."""

    p: int = DEFAULT_CHAR

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise InputError(f"field characteristic must be an integer, got {self.p!r}")
        if not is_prime(int(self.p)):
            raise InputError(f"field characteristic {self.p} is not prime")
        if self.p > MAX_CHAR:
            raise InputError(f"field characteristic {self.p} exceeds {MAX_CHAR}")
        object.__setattr__(self, "p", int(self.p))

    @classmethod
    def from_env(cls) -> "FieldSpec":
        raw = os.environ.get("PMD_FIELD_CHAR")
        if raw is None or raw.strip() == "":
            return cls()
        try:
            return cls(int(raw))
        except ValueError:
            raise InputError(f"PMD_FIELD_CHAR={raw!r} is not an integer") from None

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.p - 2, self.p)


def as_matrix(a, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce nested lists / arrays into a reduced int64 matrix."""
    if shape is not None and shape[0] * shape[1] == 0:
        return np.zeros(shape, dtype=np.int64)
    m = np.array(a, dtype=object if _needs_object(a) else np.int64)
    if m.ndim == 1 and m.size == 0:
        m = m.reshape(0, 0)
    if m.ndim != 2:
        raise InputError(f"expected a 2-d matrix, got shape {m.shape}")
    m = np.asarray(m % p, dtype=np.int64)
    if shape is not None and m.shape != tuple(shape):
        raise InputError(f"expected shape {tuple(shape)}, got {m.shape}")
    return m


def _needs_object(a) -> bool:
    if isinstance(a, np.ndarray):
        return a.dtype == object
    try:
        flat = np.array(a, dtype=object).ravel()
    except Exception:
        return False
    return any(isinstance(v, int) and abs(v) > _INT64_LIMIT for v in flat)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise InputError(f"cannot multiply {a.shape} by {b.shape}")
    k = a.shape[1]
    if k == 0:
        return zeros(a.shape[0], b.shape[1])
    if k * (p - 1) ** 2 <= _INT64_LIMIT:
        return (a @ b) % p
    out = (a.astype(object) @ b.astype(object)) % p
    return out.astype(np.int64)


def mat_chain(p: int, *mats: np.ndarray) -> np.ndarray:
    """Product ``mats[0] @ mats[1] @ ...`` mod p."""
    out = mats[0]
    for m in mats[1:]:
        out = matmul(out, m, p)
    return out


def mat_pow(a: np.ndarray, n: int, p: int) -> np.ndarray:
    result = identity(a.shape[0])
    base = a
    while n:
        if n & 1:
            result = matmul(result, base, p)
        base = matmul(base, base, p)
        n >>= 1
    return result


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    r_mat = np.array(a, dtype=np.int64) % p
    rows, cols = r_mat.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(r_mat[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            r_mat[[r, k]] = r_mat[[k, r]]
        inv = pow(int(r_mat[r, c]), p - 2, p)
        r_mat[r] = (r_mat[r] * inv) % p
        col = r_mat[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            r_mat[hit] = (r_mat[hit] - np.outer(col[hit], r_mat[r]) % p) % p
        pivots.append(c)
        r += 1
    return r_mat[:r], pivots


def rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise InputError(f"cannot invert non-square {a.shape}")
    if n == 0:
        return zeros(0, 0)
    red, piv = rref(np.hstack([a, identity(n)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n or piv[n - 1] >= n:
        raise ZeroDivisionError("matrix is singular")
    return red[:, n:]


def is_invertible(a: np.ndarray, p: int) -> bool:
    return a.shape[0] == a.shape[1] and rank(a, p) == a.shape[0]


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^ambient held as a canonical RREF row basis."""

    ambient: int
    basis: np.ndarray
    p: int

    @classmethod
    def span(cls, rows: np.ndarray, ambient: int, p: int) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64)
        if ambient == 0 or rows.size == 0:
            return cls(ambient, zeros(0, ambient), p)
        red, _ = rref(rows, p)
        return cls(ambient, red, p)

    @classmethod
    def zero(cls, ambient: int, p: int) -> "Subspace":
        return cls(ambient, zeros(0, ambient), p)

    @classmethod
    def full(cls, ambient: int, p: int) -> "Subspace":
        return cls(ambient, identity(ambient), p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def columns(self) -> np.ndarray:
        """Basis vectors as the columns of an ``ambient x dim`` matrix."""
        return self.basis.T.copy()

    def pivots(self) -> list[int]:
        return [int(np.flatnonzero(row)[0]) for row in self.basis]

    def contains(self, vectors: np.ndarray) -> bool:
        """True when every column of ``vectors`` lies in the subspace."""
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.size == 0:
            return True
        return rank(np.vstack([self.basis, vectors.T]), self.p) == self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient == other.ambient and self.p == other.p
                and np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.ambient, self.p, self.basis.tobytes()))

    def __le__(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return other.contains(self.columns)

    def __repr__(self):
        return f"Subspace(ambient={self.ambient}, dim={self.dim}, p={self.p})"


def _check_ambient(u: Subspace, v: Subspace):
    if u.ambient != v.ambient or u.p != v.p:
        raise AmbientMismatch(
            f"subspaces live in F_{u.p}^{u.ambient} and F_{v.p}^{v.ambient}")


def _null_rows(a: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning the right kernel of ``a`` (not yet canonical)."""
    cols = a.shape[1]
    if a.shape[0] == 0:
        return identity(cols)
    red, piv = rref(a, p)
    free = [c for c in range(cols) if c not in set(piv)]
    out = zeros(len(free), cols)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(piv):
            out[k, pc] = (-red[i, f]) % p
    return out


def kernel_basis(a: np.ndarray, p: int) -> Subspace:
    """Ker(a) as a canonical subspace of F_p^cols."""
    return Subspace.span(_null_rows(a, p), a.shape[1], p)


def image_basis(a: np.ndarray, p: int) -> Subspace:
    """Column space of ``a`` as a canonical subspace of F_p^rows."""
    return Subspace.span(a.T, a.shape[0], p)


def subspace_join(u: Subspace, v: Subspace) -> Subspace:
    _check_ambient(u, v)
    return Subspace.span(np.vstack([u.basis, v.basis]), u.ambient, u.p)


def subspace_meet(u: Subspace, v: Subspace) -> Subspace:
    _check_ambient(u, v)
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(u.ambient, u.p)
    p = u.p
    # a.U = b.V  <=>  (a, -b) in the left kernel of [U; V]
    stacked = np.vstack([u.basis, (-v.basis) % p])
    coeffs = _null_rows(stacked.T, p)
    vecs = matmul(coeffs[:, :u.dim], u.basis, p)
    return Subspace.span(vecs, u.ambient, p)


def subspace_meet_join(u: Subspace, v: Subspace) -> tuple[Subspace, Subspace]:
    return subspace_meet(u, v), subspace_join(u, v)


@dataclass(frozen=True, eq=False)
class AffineSolution:
    """All ``X`` with ``A X = B``: ``particular + N T`` for N spanning Ker(A)."""

    particular: np.ndarray
    kernel: Subspace

    def sample(self, coeffs: np.ndarray, p: int) -> np.ndarray:
        return (self.particular + matmul(self.kernel.columns, coeffs, p)) % p


def solve_all(a: np.ndarray, b: np.ndarray, p: int) -> AffineSolution | None:
    """Solve ``a @ X == b``; None when inconsistent."""
    rows, cols = a.shape
    if b.shape[0] != rows:
        raise InputError(f"incompatible shapes {a.shape} and {b.shape}")
    kern = kernel_basis(a, p)
    nb = b.shape[1]
    if rows == 0:
        return AffineSolution(zeros(cols, nb), kern)
    red, piv = rref(np.hstack([a, b]), p)
    if any(c >= cols for c in piv):
        return None
    x = zeros(cols, nb)
    for i, c in enumerate(piv):
        x[c] = red[i, cols:]
    return AffineSolution(x, kern)


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    sol = solve_all(a, b, p)
    return None if sol is None else sol.particular


def complement_quotient(sub: Subspace) -> np.ndarray:
    """Quotient map F^n -> F^n / sub using the non-pivot coordinates.

    Returns a ``(n - dim) x n`` matrix whose kernel is exactly ``sub``.
    """
    n, p = sub.ambient, sub.p
    piv = sub.pivots()
    free = [c for c in range(n) if c not in set(piv)]
    q = zeros(len(free), n)
    for k, f in enumerate(free):
        q[k, f] = 1
    if piv:
        q[:, piv] = (-sub.basis[:, free].T) % p
    return q


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


def random_invertible(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    while True:
        m = random_matrix(rng, n, n, p)
        if is_invertible(m, p):
            return m


# --- polynomials over F_p: coefficient lists, lowest degree first -------------

def charpoly(a: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial det(xI - a), monic, lowest degree first.

    Reduces to upper Hessenberg form by similarity and then runs the
    standard Hessenberg determinant recurrence; valid in any characteristic.
    """
    n = a.shape[0]
    h = [[int(v) for v in row] for row in np.asarray(a) % p]
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if h[i][m - 1]), None)
        if piv is None:
            continue
        if piv != m:
            h[m], h[piv] = h[piv], h[m]
            for row in h:
                row[m], row[piv] = row[piv], row[m]
        inv = pow(h[m][m - 1], p - 2, p)
        for i in range(m + 1, n):
            u = h[i][m - 1] * inv % p
            if not u:
                continue
            for j in range(n):
                h[i][j] = (h[i][j] - u * h[m][j]) % p
            for row in h:
                row[m] = (row[m] + u * row[i]) % p
    polys = [[1]]
    for k in range(1, n + 1):
        # p_k = (x - h[k-1][k-1]) p_{k-1} - sum_{i<k} h[i-1][k-1] * prod(sub) * p_{i-1}
        nxt = _poly_sub(_poly_mul([(-h[k - 1][k - 1]) % p, 1], polys[k - 1], p), [0], p)
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * h[i][i - 1] % p
            coef = h[i - 1][k - 1] * prod % p
            if coef:
                nxt = _poly_sub(nxt, [c * coef % p for c in polys[i - 1]], p)
        polys.append(nxt)
    return _trim(polys[n])


def _trim(f: list[int]) -> list[int]:
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def _poly_mul(f, g, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _trim(out)


def _poly_sub(f, g, p):
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return _trim([(a - b) % p for a, b in zip(f, g)])


def _poly_divmod(f, g, p):
    f = _trim(f)
    g = _trim(g)
    if len(g) == 1 and g[0] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(g[-1], p - 2, p)
    rem = list(f)
    quot = [0] * max(1, len(f) - len(g) + 1)
    while len(rem) >= len(g) and not (len(rem) == 1 and rem[0] == 0):
        shift = len(rem) - len(g)
        c = rem[-1] * inv % p
        quot[shift] = c
        for i, b in enumerate(g):
            rem[shift + i] = (rem[shift + i] - c * b) % p
        rem = _trim(rem)
        if len(rem) < len(g):
            break
    return _trim(quot), rem


def _poly_mod(f, g, p):
    return _poly_divmod(f, g, p)[1]


def _poly_gcd(f, g, p):
    f, g = _trim(f), _trim(g)
    while not (len(g) == 1 and g[0] == 0):
        f, g = g, _poly_mod(f, g, p)
    if f[-1] not in (0, 1):
        inv = pow(f[-1], p - 2, p)
        f = [c * inv % p for c in f]
    return f


def _poly_powmod(base, e, mod, p):
    result = [1]
    base = _poly_mod(base, mod, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), mod, p)
        base = _poly_mod(_poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def poly_eval(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def poly_roots(f: list[int], p: int) -> list[int]:
    """Distinct roots in F_p of ``f``, ascending."""
    f = _trim([c % p for c in f])
    if len(f) == 1:
        return []
    if p <= 1024:
        return [x for x in range(p) if poly_eval(f, x, p) == 0]
    # product of the distinct linear factors: gcd(f, x^p - x)
    xp = _poly_powmod([0, 1], p, f, p)
    g = _poly_gcd(f, _poly_sub(xp, [0, 1], p), p)
    roots: list[int] = []
    _split_linear(g, p, roots)
    return sorted(roots)


def _split_linear(g, p, out, shift=0):
    deg = len(g) - 1
    if deg == 0:
        return
    if deg == 1:
        out.append((-g[0]) * pow(g[1], p - 2, p) % p)
        return
    # deterministic equal-degree splitting with (x + a)^((p-1)/2) - 1
    for a in range(shift, shift + 4 * p):
        h = _poly_powmod([a % p, 1], (p - 1) // 2, g, p)
        d = _poly_gcd(g, _poly_sub(h, [1], p), p)
        if 0 < len(d) - 1 < deg:
            _split_linear(d, p, out, a + 1)
            _split_linear(_poly_divmod(g, d, p)[0], p, out, a + 1)
            return
    raise ArithmeticError("failed to split a product of linear factors")
