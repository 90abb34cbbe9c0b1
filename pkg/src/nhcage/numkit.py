"""Dense complex linear algebra kernel.

All matrices handled by the package are small and dense (a few hundred rows at
most), so everything here works on plain :class:`numpy.ndarray` objects of
complex dtype.  Eigenvalues and singular values come from LAPACK through numpy,
the matrix exponential from :func:`scipy.linalg.expm`; the Krylov dimension,
nilpotency detection and defect-aware eigenvalue clustering are implemented
here.

Defective spectra deserve a remark.  Rounding errors of size ``eps`` move an
eigenvalue sitting in a Jordan block of size ``n`` by roughly ``eps**(1/n)``,
so a raw eigensolver reports the fourfold zero of an order-4 exceptional point
as four numbers of magnitude ~1e-4.  The *mean* of such a cluster, however, is
accurate to ``O(eps)``.  :func:`eigen_clusters` groups the raw eigenvalues,
replaces each group by its mean and then checks algebraically (via the ranks of
``(A - cI)**p``) that the group really is one eigenvalue of the stated
algebraic multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import linkage, to_tree

from .errors import (ConvergenceError, DimensionError, DomainError,
                     RangeError)

__all__ = [
    "DEFAULT_TOL",
    "EigenCluster",
    "as_cmatrix",
    "clustered_eigvals",
    "eigen_clusters",
    "eigvals",
    "expm",
    "fit_loglog_slope",
    "krylov_basis",
    "krylov_dim",
    "nilpotency_index",
    "norm_bound",
    "numerical_rank",
    "sort_spectrum",
]

DEFAULT_TOL = 1e-9

_EPS = np.finfo(float).eps
# Radius (relative to the matrix scale, as tol**(1/m)) beyond which a group of m
# eigenvalues cannot be a single perturbed eigenvalue; saves an SVD per rejection.
_CLUSTER_PREFILTER = 1e-6


def as_cmatrix(m, square=False):
    """Return ``m`` as a finite 2-D complex array.

    Raises
    ------
    DimensionError
        If ``m`` is not two-dimensional, or not square when ``square`` is set.
    ValueError
        If any entry is NaN or infinite.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def norm_bound(m):
    """Cheap upper bound on the spectral norm, ``sqrt(||m||_1 ||m||_inf)``."""
    a = np.abs(m)
    return float(np.sqrt(a.sum(axis=0).max() * a.sum(axis=1).max()))


def eigvals(m):
    """All eigenvalues of a square matrix, with algebraic multiplicity.

    Uses the LAPACK Hessenberg reduction followed by shifted QR iteration, which
    is deterministic for a fixed input.

    Raises
    ------
    DimensionError
        If ``m`` is not square.
    ConvergenceError
        If the QR iteration hits its iteration cap.
    """
    a = as_cmatrix(m, square=True)
    try:
        w = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        # LAPACK does not hand back the stalled subdiagonal; report the scale instead.
        raise ConvergenceError(f"QR iteration did not converge: {exc}",
                               residual=norm_bound(a)) from exc
    return w.astype(complex)


def sort_spectrum(values, decimals=8):
    """Sort complex values by real part, then imaginary part.

    Keys are rounded to ``decimals`` places so that rounding noise in a
    vanishing real part does not reorder otherwise equal values.
    """
    v = np.asarray(values, dtype=complex)
    re = np.round(v.real, decimals) + 0.0
    im = np.round(v.imag, decimals) + 0.0
    return v[np.lexsort((im, re))]


def numerical_rank(m, tol=DEFAULT_TOL):
    """Number of singular values above ``tol`` times the largest one."""
    if tol < 0:
        raise DomainError("tol must be nonnegative")
    a = as_cmatrix(m)
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def expm(m):
    """Matrix exponential by scaling and squaring with Pade approximants.

    Raises
    ------
    RangeError
        If the result overflows.
    """
    a = as_cmatrix(m, square=True)
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise RangeError(f"matrix exponential overflowed (norm bound {norm_bound(a):.3g})")
    return out


def krylov_basis(m, v, tol=DEFAULT_TOL):
    """Orthonormal basis of the cyclic subspace spanned by ``v, m v, m^2 v, ...``.

    Each new vector is orthogonalised twice by modified Gram-Schmidt; the
    iteration stops once ``m`` applied to the newest basis vector leaves a
    residual below ``tol`` times the norm of ``m``.

    Returns
    -------
    q : ndarray, shape (n, d)
        Columns form the basis; ``d`` is the Krylov dimension.
    """
    a = as_cmatrix(m, square=True)
    x = np.asarray(v, dtype=complex).ravel()
    n = a.shape[0]
    if x.shape[0] != n:
        raise DimensionError(f"vector of length {x.shape[0]} for a {n}x{n} matrix")
    nv = np.linalg.norm(x)
    if nv == 0.0:
        raise DomainError("Krylov subspace of the zero vector is undefined")
    scale = norm_bound(a)
    basis = [x / nv]
    while len(basis) < n:
        w = a @ basis[-1]
        for _ in range(2):
            for q in basis:
                w = w - (q.conj() @ w) * q
        r = np.linalg.norm(w)
        if r <= tol * scale:
            break
        basis.append(w / r)
    return np.column_stack(basis)


def krylov_dim(m, v, tol=DEFAULT_TOL):
    """Dimension of the cyclic subspace generated by ``v`` under ``m``."""
    return krylov_basis(m, v, tol).shape[1]


def fit_loglog_slope(xs, ys):
    """Least-squares slope of ``log(ys)`` against ``log(xs)``.

    >>> round(fit_loglog_slope([1, 10, 100], [3, 30, 300]), 12)
    1.0
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError("xs and ys must be 1-D sequences of equal length")
    if x.size < 2:
        raise DimensionError("need at least two points to fit a slope")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("log-log fit needs strictly positive values")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0.0:
        raise DomainError("xs must not all be equal")
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def nilpotency_index(m, tol=1e-10):
    """Smallest ``d`` with ``m**d`` numerically zero, or ``None``.

    ``m**d`` counts as zero when its largest entry is below ``tol`` times both
    ``||m||**d`` and ``||m**(d-1)|| * ||m||``.  The second condition demands a
    sudden collapse of the power, so matrices whose powers merely decay
    geometrically (spectral radius well below the norm) are not mistaken for
    nilpotent ones.  A nonzero trace of any power proves the matrix is not
    nilpotent and ends the search early.
    """
    a = as_cmatrix(m, square=True)
    n = a.shape[0]
    scale = norm_bound(a)
    if scale == 0.0:
        return 1
    a = a / scale
    p = a.copy()
    prev = np.abs(p).max()
    for d in range(1, n + 1):
        cur = np.abs(p).max()
        if cur <= tol and (d == 1 or cur <= tol * prev):
            return d
        if abs(np.trace(p)) > 1e-8 * n:
            return None
        prev = cur
        p = p @ a
    return None


@dataclass(frozen=True)
class EigenCluster:
    """A group of raw eigenvalues identified as one eigenvalue.

    Attributes
    ----------
    center : complex
        Mean of the group (the estimate of the eigenvalue).
    multiplicity : int
        Algebraic multiplicity (number of raw eigenvalues in the group).
    index : int
        Size of the largest Jordan block, i.e. the exponent of this root in
        the minimal polynomial.
    verified : bool
        Whether the rank test confirmed the group.
    """

    center: complex
    multiplicity: int
    index: int
    verified: bool


def _weyr_index(a, c, mult, scale, tol):
    """Rank test for an eigenvalue ``c`` of algebraic multiplicity ``mult``.

    Returns ``(ok, index)`` where ``ok`` says the nullity of ``(a - cI)**p``
    reaches exactly ``mult`` and ``index`` is the power at which it does.
    """
    n = a.shape[0]
    b = (a - c * np.eye(n)) / scale
    p = b
    bnorm = None
    prev_null = 0
    for power in range(1, mult + 1):
        sv = np.linalg.svd(p, compute_uv=False)
        if bnorm is None:
            bnorm = max(sv[0], 1.0)
        null = int(np.count_nonzero(sv <= tol * bnorm ** power))
        if null >= mult:
            return null == mult, power
        if null <= prev_null:
            return False, power
        prev_null = null
        p = p @ b
    return False, mult


def _snap(z, level):
    re = 0.0 if abs(z.real) <= level else z.real
    im = 0.0 if abs(z.imag) <= level else z.imag
    return complex(re, im)


def eigen_clusters(m, tol=DEFAULT_TOL):
    """Group eigenvalues into verified distinct roots.

    The raw eigenvalues are arranged in a single-linkage dendrogram, which is
    walked from the root: a node is accepted when its members pass the rank
    test of a single eigenvalue, otherwise it is split into its two children.
    Singletons reached this way are simple eigenvalues.

    Returns
    -------
    list of EigenCluster
        Sorted by real part, then imaginary part of the centers.
    """
    a = as_cmatrix(m, square=True)
    w = eigvals(a)
    n = w.size
    scale = max(1.0, norm_bound(a))
    snap = 64 * _EPS * scale
    if n == 1:
        return [EigenCluster(_snap(complex(w[0]), snap), 1, 1, True)]
    tree = to_tree(linkage(np.column_stack([w.real, w.imag]), method="single"))
    found = []
    stack = [tree]
    while stack:
        node = stack.pop()
        members = node.pre_order()
        mult = len(members)
        center = complex(w[members].mean())
        if mult == 1:
            found.append(EigenCluster(_snap(center, snap), 1, 1, True))
            continue
        radius = np.abs(w[members] - center).max()
        if radius <= scale * _CLUSTER_PREFILTER ** (1.0 / mult):
            ok, index = _weyr_index(a, center, mult, scale, tol)
            if ok:
                found.append(EigenCluster(_snap(center, snap), mult, index, True))
                continue
        stack.extend([node.get_right(), node.get_left()])
    found.sort(key=lambda c: (round(c.center.real, 8) + 0.0,
                              round(c.center.imag, 8) + 0.0))
    return found


def clustered_eigvals(m, tol=DEFAULT_TOL):
    """Eigenvalues with each verified cluster replaced by its mean.

    Multiplicities are preserved, so the result has one entry per row of
    ``m``; it is sorted with :func:`sort_spectrum`.
    """
    vals = []
    for c in eigen_clusters(m, tol):
        vals.extend([c.center] * c.multiplicity)
    return sort_spectrum(vals)
