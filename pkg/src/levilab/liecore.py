"""Complex semisimple Lie algebras in a fixed basis, their real-linear
involutions, real forms and Cartan decompositions.

Elements of the algebra are complex coefficient vectors of length
``dim_complex``.  A real subspace is stored as a complex array of shape
``(m, dim_complex)`` whose rows form a basis of it over the reals.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, ValidationError
from .tolerances import DEFAULT_TOL

__all__ = [
    "LieAlgebra",
    "RealLinear",
    "Involution",
    "RealFormSetup",
    "build_sl",
    "direct_sum",
    "bracket",
    "killing",
    "make_setup",
    "hermitian_inner",
    "fixed_subspace",
    "cartan_decompose",
    "null_space",
    "real_null_space",
    "realify",
    "complexify",
]


# -- small linear algebra helpers -------------------------------------------

# singular values below this are zero whatever the scale of the matrix
ABS_FLOOR = 1e-12


def null_space(a, rtol=DEFAULT_TOL.rank):
    """Columns spanning the numerical kernel of ``a`` (real or complex)."""
    a = np.atleast_2d(a)
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n, dtype=a.dtype)
    _, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    if smax <= ABS_FLOOR:
        return np.eye(n, dtype=a.dtype)
    rank = int(np.sum(s > max(rtol * smax, ABS_FLOOR)))
    return vh[rank:].conj().T


def column_space(a, rtol=DEFAULT_TOL.rank):
    a = np.atleast_2d(a)
    if a.size == 0:
        return a[:, :0]
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if not s.size or s[0] <= ABS_FLOOR:
        return a[:, :0]
    rank = int(np.sum(s > max(rtol * s[0], ABS_FLOOR)))
    return u[:, :rank]


def realify(v):
    """(..., d) complex -> (..., 2d) real."""
    v = np.asarray(v)
    return np.concatenate([v.real, v.imag], axis=-1)


def complexify(r):
    r = np.asarray(r)
    d = r.shape[-1] // 2
    return r[..., :d] + 1j * r[..., d:]


def real_null_space(ops, rtol=DEFAULT_TOL.rank):
    """Real subspace killed by every real 2d x 2d matrix in ``ops``.

    Returned as a complex array of row vectors (the realified basis
    converted back to coefficient vectors).
    """
    stacked = np.vstack(ops)
    basis = null_space(stacked, rtol)
    return complexify(basis.T)


# -- algebra -----------------------------------------------------------------

def _freeze(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Complex Lie algebra given by structure constants ``[e_i, e_j] = sum_k c[i,j,k] e_k``."""

    basis_labels: tuple
    structure: np.ndarray
    killing: np.ndarray = field(default=None)
    # optional matrix realization (d, N, N) of the basis, used by the extrinsic oracle
    matrix_basis: np.ndarray | None = field(default=None)

    def __post_init__(self):
        c = np.asarray(self.structure, dtype=complex)
        d = len(self.basis_labels)
        if c.shape != (d, d, d):
            raise InvalidArgument(
                f"structure tensor has shape {c.shape}, expected {(d, d, d)}",
                invariant="structure shape",
            )
        object.__setattr__(self, "structure", _freeze(c))
        if self.killing is None:
            ads = np.einsum("ijk->ikj", c)  # ads[i] = ad(e_i)
            b = np.einsum("iab,jba->ij", ads, ads)
            object.__setattr__(self, "killing", _freeze(b))
        else:
            object.__setattr__(self, "killing", _freeze(np.asarray(self.killing, dtype=complex)))
        if self.matrix_basis is not None:
            object.__setattr__(self, "matrix_basis", _freeze(np.asarray(self.matrix_basis)))

    @property
    def dim_complex(self):
        return len(self.basis_labels)

    def ad(self, x):
        """Matrix of ``ad(x)`` acting on coefficient columns."""
        return np.einsum("i,ijk->kj", np.asarray(x), self.structure)

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.structure)

    def B(self, x, y):
        """Killing form, bilinear over C."""
        return np.asarray(x) @ self.killing @ np.asarray(y)

    def vector(self, **coeffs):
        """Coefficient vector from basis labels, e.g. ``alg.vector(E12=1, H1=2)``."""
        v = np.zeros(self.dim_complex, dtype=complex)
        index = {lab: i for i, lab in enumerate(self.basis_labels)}
        for lab, val in coeffs.items():
            v[index[lab]] = val
        return v

    def to_matrix(self, x):
        if self.matrix_basis is None:
            raise InvalidArgument("algebra has no matrix realization")
        return np.einsum("i,iab->ab", np.asarray(x), self.matrix_basis)

    # invariants
    def antisymmetry_residual(self):
        c = self.structure
        return float(np.max(np.abs(c + c.transpose(1, 0, 2))))

    def jacobi_residual(self):
        c = self.structure
        # [e_i,[e_j,e_k]] = c[j,k,m] c[i,m,l]
        t = np.einsum("jkm,iml->ijkl", c, c)
        cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.max(np.abs(cyc))) if cyc.size else 0.0

    def killing_trace_residual(self):
        d = self.dim_complex
        eye = np.eye(d)
        b = np.array([[np.trace(self.ad(eye[i]) @ self.ad(eye[j])) for j in range(d)] for i in range(d)])
        return float(np.max(np.abs(b - self.killing)))

    def killing_min_singular(self):
        s = np.linalg.svd(self.killing, compute_uv=False)
        return float(s[-1] / s[0])

    def to_dict(self):
        c = self.structure
        idx = np.argwhere(np.abs(c) > 0)
        return {
            "basis_labels": list(self.basis_labels),
            "structure": [[int(i), int(j), int(k), [float(c[i, j, k].real), float(c[i, j, k].imag)]]
                          for i, j, k in idx],
        }

    @classmethod
    def from_dict(cls, data):
        labels = tuple(data["basis_labels"])
        d = len(labels)
        c = np.zeros((d, d, d), dtype=complex)
        for i, j, k, val in data["structure"]:
            c[i, j, k] = complex(val[0], val[1]) if isinstance(val, (list, tuple)) else val
        return cls(labels, c)


def _sl_basis(n):
    labels, mats = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                m = np.zeros((n, n))
                m[i, j] = 1.0
                labels.append(f"E{i + 1}{j + 1}")
                mats.append(m)
    for i in range(n - 1):
        m = np.zeros((n, n))
        m[i, i], m[i + 1, i + 1] = 1.0, -1.0
        labels.append("H" if n == 2 else f"H{i + 1}")
        mats.append(m)
    return labels, np.array(mats)


def _sl_coords(n, m):
    """Coordinates of a traceless n x n matrix in the basis of ``_sl_basis``."""
    off = [m[i, j] for i in range(n) for j in range(n) if i != j]
    h = np.cumsum(np.diag(m))[:-1]
    return np.concatenate([np.asarray(off, dtype=complex), h.astype(complex)])


def build_sl(n):
    """sl(n, C) in the basis {E_ij (i != j)} + {E_ii - E_(i+1)(i+1)}."""
    if int(n) != n or n < 2:
        raise InvalidArgument(f"sl(n) needs n >= 2, got {n}", invariant="n >= 2")
    n = int(n)
    labels, mats = _sl_basis(n)
    d = len(labels)
    c = np.zeros((d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            c[i, j] = _sl_coords(n, mats[i] @ mats[j] - mats[j] @ mats[i])
    return LieAlgebra(tuple(labels), c, matrix_basis=mats)


def sl_coords(algebra, m):
    """Coordinates of a matrix in an algebra built by :func:`build_sl` (or a direct sum of them)."""
    mb = algebra.matrix_basis
    flat = mb.reshape(mb.shape[0], -1).T
    coef, *_ = np.linalg.lstsq(flat.astype(complex), np.asarray(m, dtype=complex).ravel(), rcond=None)
    return coef


def direct_sum(a, b):
    da, db = a.dim_complex, b.dim_complex
    d = da + db
    c = np.zeros((d, d, d), dtype=complex)
    c[:da, :da, :da] = a.structure
    c[da:, da:, da:] = b.structure
    labels = tuple(f"a.{x}" for x in a.basis_labels) + tuple(f"b.{x}" for x in b.basis_labels)
    kill = np.zeros((d, d), dtype=complex)
    kill[:da, :da] = a.killing
    kill[da:, da:] = b.killing
    mats = None
    if a.matrix_basis is not None and b.matrix_basis is not None:
        na, nb = a.matrix_basis.shape[1], b.matrix_basis.shape[1]
        mats = np.zeros((d, na + nb, na + nb), dtype=np.result_type(a.matrix_basis, b.matrix_basis))
        mats[:da, :na, :na] = a.matrix_basis
        mats[da:, na:, na:] = b.matrix_basis
    return LieAlgebra(labels, c, killing=kill, matrix_basis=mats)


def bracket(algebra, x, y):
    x, y = np.asarray(x), np.asarray(y)
    d = algebra.dim_complex
    if x.shape[-1] != d or y.shape[-1] != d:
        raise InvalidArgument(
            f"vectors must have length {d}, got {x.shape[-1]} and {y.shape[-1]}",
            invariant="length == dim_complex",
        )
    return algebra.bracket(x, y)


def killing(algebra, x, y):
    return algebra.B(x, y)


# -- real-linear maps --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealLinear:
    """The map ``x -> lin @ x + anti @ conj(x)`` on C^d."""

    lin: np.ndarray
    anti: np.ndarray

    @classmethod
    def linear(cls, m):
        m = np.asarray(m, dtype=complex)
        return cls(m, np.zeros_like(m))

    @classmethod
    def antilinear(cls, m):
        m = np.asarray(m, dtype=complex)
        return cls(np.zeros_like(m), m)

    @classmethod
    def identity(cls, d):
        return cls.linear(np.eye(d))

    @classmethod
    def from_operator(cls, r):
        """Inverse of :attr:`operator`."""
        r = np.asarray(r, dtype=float)
        d = r.shape[0] // 2
        p, q, s, t = r[:d, :d], r[:d, d:], r[d:, :d], r[d:, d:]
        # p = Re(L + A), q = -Im L + Im A, s = Im L + Im A, t = Re L - Re A
        lin = 0.5 * (p + t) + 0.5j * (s - q)
        anti = 0.5 * (p - t) + 0.5j * (s + q)
        return cls(lin, anti)

    def __call__(self, x):
        x = np.asarray(x)
        if x.ndim == 1:
            return self.lin @ x + self.anti @ x.conj()
        # rows are vectors
        return x @ self.lin.T + x.conj() @ self.anti.T

    def __matmul__(self, other):
        return RealLinear(
            self.lin @ other.lin + self.anti @ other.anti.conj(),
            self.lin @ other.anti + self.anti @ other.lin.conj(),
        )

    @property
    def operator(self):
        """The 2d x 2d real matrix acting on (Re x, Im x)."""
        lr, li = self.lin.real, self.lin.imag
        ar, ai = self.anti.real, self.anti.imag
        return np.block([[lr + ar, -li + ai], [li + ai, lr - ar]])

    @property
    def is_c_linear(self):
        return np.max(np.abs(self.anti), initial=0.0) == 0.0


_J_CACHE = {}


def complex_structure(d):
    if d not in _J_CACHE:
        _J_CACHE[d] = RealLinear.linear(1j * np.eye(d)).operator
    return _J_CACHE[d]


@dataclass(frozen=True, eq=False)
class Involution:
    """Involutive automorphism, C-linear or C-antilinear.

    ``matrix`` is the complex matrix M with ``phi(x) = M x`` (linear) or
    ``phi(x) = M conj(x)`` (antilinear).
    """

    matrix: np.ndarray
    antilinear: bool
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(np.asarray(self.matrix, dtype=complex)))

    @classmethod
    def from_operator(cls, operator, linearity, name=""):
        rl = RealLinear.from_operator(operator)
        if linearity not in ("C-linear", "C-antilinear"):
            raise InvalidArgument(f"unknown linearity {linearity!r}")
        anti = linearity == "C-antilinear"
        return cls(rl.anti if anti else rl.lin, anti, name)

    @property
    def linearity(self):
        return "C-antilinear" if self.antilinear else "C-linear"

    @property
    def map(self):
        return RealLinear.antilinear(self.matrix) if self.antilinear else RealLinear.linear(self.matrix)

    @property
    def operator(self):
        return self.map.operator

    def __call__(self, x):
        return self.map(x)

    # invariants
    def square_residual(self):
        sq = self.map @ self.map
        d = self.matrix.shape[0]
        return float(max(np.max(np.abs(sq.lin - np.eye(d))), np.max(np.abs(sq.anti))))

    def complex_structure_residual(self):
        r = self.operator
        j = complex_structure(self.matrix.shape[0])
        res = r @ j + j @ r if self.antilinear else r @ j - j @ r
        return float(np.max(np.abs(res)))

    def automorphism_residual(self, algebra):
        c = algebra.structure
        m = self.matrix
        cc = c.conj() if self.antilinear else c
        # phi([e_i, e_j]) with e_i real unit vectors
        lhs = np.einsum("ijk,lk->ijl", cc, m)
        rhs = np.einsum("ai,bj,abl->ijl", m, m, c)
        return float(np.max(np.abs(lhs - rhs)))

    def to_dict(self):
        return {
            "name": self.name,
            "linearity": self.linearity,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_dict(cls, data):
        m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
        return cls(m, data["linearity"] == "C-antilinear", data.get("name", ""))


def _involution_from_matrix_map(algebra, f, antilinear, name):
    """Involution of an sl(n)-type algebra from a map on basis matrices."""
    mats = algebra.matrix_basis
    m = np.array([sl_coords(algebra, f(b)) for b in mats]).T
    return Involution(m, antilinear, name)


def fixed_subspace(algebra, phi, theta=None, tol=DEFAULT_TOL):
    """Real basis of the +1 eigenspace of ``phi``.

    When ``theta`` is given the basis is orthonormal for ``Re <x, y>``.
    """
    if phi.square_residual() > 1e-8:
        raise InvalidArgument(f"{phi.name or 'map'} is not involutive", invariant="phi^2 = id")
    d = algebra.dim_complex
    basis = real_null_space([phi.operator - np.eye(2 * d)], tol.rank)
    if theta is not None and len(basis):
        basis = _orthonormalize(algebra, theta, basis)
    return basis


def _real_gram(algebra, theta, basis):
    g = _hermitian_gram(algebra, theta)
    return (basis.conj() @ g @ basis.T).real  # Re <b_i, b_j>, symmetric


def _orthonormalize(algebra, theta, basis):
    gram = _real_gram(algebra, theta, basis)
    w, v = np.linalg.eigh(gram)
    return (v / np.sqrt(w)).T @ basis


def _hermitian_gram(algebra, theta):
    """Matrix P with <x, y> = y^H P x."""
    # <x, y> = -B(x, theta y) = -x^T B M conj(y) for antilinear theta
    g = -algebra.killing @ theta.matrix
    return g.T


# -- real form setups ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealFormSetup:
    algebra: LieAlgebra
    theta: Involution
    sigma1: Involution
    sigma2: Involution
    g1: np.ndarray
    g2: np.ndarray
    k1: np.ndarray
    p1: np.ndarray
    k2: np.ndarray
    p2: np.ndarray
    name: str = ""

    @property
    def gram(self):
        """Hermitian Gram matrix P of the inner product, <x, y> = y^H P x."""
        return _hermitian_gram(self.algebra, self.theta)

    @property
    def dim(self):
        return self.algebra.dim_complex

    def sigma(self, j):
        return {1: self.sigma1, 2: self.sigma2}[j]

    def k(self, j):
        return {1: self.k1, 2: self.k2}[j]

    def p(self, j):
        return {1: self.p1, 2: self.p2}[j]

    def residuals(self):
        """Invariant residuals keyed by name."""
        alg = self.algebra
        out = {
            "antisymmetry": alg.antisymmetry_residual(),
            "jacobi": alg.jacobi_residual(),
        }
        for inv in (self.theta, self.sigma1, self.sigma2):
            out[f"square[{inv.name}]"] = inv.square_residual()
            out[f"J[{inv.name}]"] = inv.complex_structure_residual()
            out[f"automorphism[{inv.name}]"] = inv.automorphism_residual(alg)
        th = self.theta.operator
        for j in (1, 2):
            s = self.sigma(j).operator
            out[f"commute_theta[sigma{j}]"] = float(np.max(np.abs(s @ th - th @ s)))
        return out

    def intersection_parts(self, tol=DEFAULT_TOL):
        """(k1 ∩ k2, p1 ∩ p2) as real bases."""
        d = self.dim
        eye = np.eye(2 * d)
        s1, s2, th = self.sigma1.operator, self.sigma2.operator, self.theta.operator
        k = real_null_space([s1 - eye, s2 - eye, th - eye], tol.rank)
        p = real_null_space([s1 - eye, s2 - eye, th + eye], tol.rank)
        return k, p


def make_setup(algebra, theta, sigma1, sigma2, name="", tol=DEFAULT_TOL):
    """Validate the involutions and compute real forms and Cartan decompositions."""
    d = algebra.dim_complex
    for inv in (theta, sigma1, sigma2):
        if not inv.antilinear:
            raise ValidationError(f"{inv.name} must be C-antilinear", invariant="antiholomorphic involution")
        if inv.matrix.shape != (d, d):
            raise ValidationError(f"{inv.name} has wrong shape", invariant="operator shape")
        if inv.square_residual() > 1e-10:
            raise ValidationError(f"{inv.name} is not involutive", invariant="phi^2 = id")
        if inv.automorphism_residual(algebra) > 1e-9:
            raise ValidationError(f"{inv.name} is not an automorphism", invariant="phi[x,y] = [phi x, phi y]")
    th = theta.operator
    for j, s in ((1, sigma1), (2, sigma2)):
        if np.max(np.abs(s.operator @ th - th @ s.operator)) > 1e-10:
            raise ValidationError(f"sigma{j} does not commute with theta", invariant="sigma_j theta = theta sigma_j")
    g = _hermitian_gram(algebra, theta)
    if np.max(np.abs(g - g.conj().T)) > 1e-9 or np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0] <= 1e-8:
        raise ValidationError("-B(x, theta y) is not positive definite", invariant="theta is a Cartan involution")

    eye = np.eye(2 * d)
    parts = {}
    for j, s in ((1, sigma1), (2, sigma2)):
        so = s.operator
        parts[f"g{j}"] = fixed_subspace(algebra, s, theta, tol)
        parts[f"k{j}"] = real_null_space([so - eye, th - eye], tol.rank)
        parts[f"p{j}"] = real_null_space([so - eye, th + eye], tol.rank)
        if len(parts[f"g{j}"]) != d:
            raise ValidationError(f"Fix(sigma{j}) has real dimension {len(parts[f'g{j}'])} != {d}",
                                  invariant="dim_R g_j = dim_C")
        if len(parts[f"k{j}"]) + len(parts[f"p{j}"]) != d:
            raise ValidationError("k_j + p_j does not fill g_j", invariant="g_j = k_j + p_j")
    return RealFormSetup(algebra, theta, sigma1, sigma2, name=name, **parts)


def hermitian_inner(setup, x, y):
    """<x, y> = -B(x, theta(y)); linear in x, antilinear in y."""
    return complex(-setup.algebra.B(x, setup.theta(y)))


def cartan_decompose(setup, j):
    return setup.k(j), setup.p(j)


# -- standard involutions of sl(n) ---------------------------------------------

def sl_theta(algebra):
    """Cartan involution X -> -conj(X)^T."""
    return _involution_from_matrix_map(algebra, lambda x: -x.conj().T, True, "theta")


def sl_conjugation(algebra):
    """X -> conj(X); fixes sl(n, R)."""
    return _involution_from_matrix_map(algebra, lambda x: x.conj(), True, "conj")


def sl_unitary(algebra, signs, name=None):
    """X -> -I_{p,q} X^* I_{p,q}; fixes su(p, q) with I_{p,q} = diag(signs)."""
    ipq = np.diag(np.asarray(signs, dtype=float))
    if name is None:
        p = int(np.sum(np.asarray(signs) > 0))
        name = f"sigma_{p},{len(signs) - p}"
    return _involution_from_matrix_map(algebra, lambda x: -ipq @ x.conj().T @ ipq, True, name)
