"""Band structure, minimal polynomials and degeneracy classification."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import (ConsistencyError, DegenerateResponseError,
                     InconclusiveLatticeError, PreconditionError)
from .model import build_bloch, build_real_space, excitation_vector
from .params import (LadderParams, LatticeSpec, gauge_fix, is_multiple_of_pi,
                     n_chains_of)
from .transfer import flat_band_conditions, nchain_prohibited

__all__ = [
    "BandGrid",
    "ClosedForm",
    "DegeneracyClass",
    "Kind",
    "MinimalPoly",
    "PhaseDiagram",
    "classify",
    "classify_nchain",
    "closed_form",
    "closed_form_eigs",
    "dispersion",
    "krylov_support_columns",
    "local_range",
    "minimal_polynomial",
    "perturbation_response",
    "perturbation_scaling",
    "phase_diagram_scan",
]


# -- dispersion ----------------------------------------------------------------

@dataclass(frozen=True)
class BandGrid:
    """Bands on a momentum grid.

    ``bands[i]`` holds the four eigenvalues at ``k_values[i]`` sorted by real
    part, then imaginary part.
    """

    k_values: np.ndarray
    bands: np.ndarray

    def spread(self):
        """Largest variation over k of each band (one number per band)."""
        return np.abs(self.bands - self.bands[:1]).max(axis=0)


def dispersion(p, k_values, tol=numkit.DEFAULT_TOL):
    """Eigenvalues of the Bloch matrix at each momentum.

    Degenerate eigenvalues are reported as verified cluster means (see
    :func:`nhcage.numkit.clustered_eigvals`), which keeps exceptional-point
    bands flat to rounding accuracy.
    """
    ks = np.asarray(k_values, dtype=float).ravel()
    bands = np.array([numkit.clustered_eigvals(build_bloch(p, k), tol) for k in ks])
    return BandGrid(k_values=ks, bands=bands.reshape(len(ks), 4))


@dataclass(frozen=True)
class ClosedForm:
    """The two invariants that fix the Bloch spectrum at one momentum.

    ``lambda_sq = t1**2 - t2**2 + 4 (j**2 - t**2) cos(k)**2`` and
    ``delta = 4 cos(k)**2 ((j t1 cos th1 - t t2 cos th2)**2
    + (j**2 - t**2) t1**2 sin(th1)**2)``.  The squared eigenvalues are
    ``lambda_sq +- 2 sqrt(delta)``.
    """

    lambda_sq: float
    delta: float


def closed_form(p, k):
    q = gauge_fix(p)
    c2 = math.cos(k) ** 2
    lambda_sq = q.t1 ** 2 - q.t2 ** 2 + 4 * (q.j ** 2 - q.t ** 2) * c2
    delta = 4 * c2 * ((q.j * q.t1 * math.cos(q.theta1) - q.t * q.t2 * math.cos(q.theta2)) ** 2
                      + (q.j ** 2 - q.t ** 2) * q.t1 ** 2 * math.sin(q.theta1) ** 2)
    return ClosedForm(lambda_sq, delta)


def closed_form_eigs(p, k):
    """The four eigenvalues ``+-sqrt(lambda_sq +- 2 sqrt(delta))``.

    Principal complex square roots throughout; ``delta < 0`` (possible when
    ``t > j``) gives an imaginary ``sqrt(delta)``.  The factor 2 is checked
    against the characteristic polynomial of the Bloch matrix, whose
    ``E**2`` and ``E**0`` coefficients are ``-2 lambda_sq`` and
    ``lambda_sq**2 - 4 delta``.
    """
    cf = closed_form(p, k)
    root = 2 * cmath.sqrt(cf.delta)
    out = []
    for s in (1, -1):
        e = cmath.sqrt(cf.lambda_sq + s * root)
        out.extend([e, -e])
    return numkit.sort_spectrum(out)


# -- minimal polynomial --------------------------------------------------------

@dataclass(frozen=True)
class MinimalPoly:
    """Monic polynomial stored as (root, multiplicity) pairs."""

    roots: tuple

    @property
    def degree(self):
        return sum(m for _, m in self.roots)

    @property
    def coefficients(self):
        """Coefficients, highest power first (leading 1)."""
        zs = [r for r, m in self.roots for _ in range(m)]
        return np.poly(zs) if zs else np.ones(1)

    def evaluate(self, m):
        """The matrix ``prod (m - r I)**mult``."""
        a = np.asarray(m, dtype=complex)
        out = np.eye(a.shape[0], dtype=complex)
        for r, mult in self.roots:
            shifted = a - r * np.eye(a.shape[0])
            for _ in range(mult):
                out = out @ shifted
        return out

    def structure(self):
        """Sorted multiplicities, e.g. ``(2, 2)`` for two double roots."""
        return tuple(sorted(m for _, m in self.roots))


def _annihilates(a, roots, scale, tol):
    scaled = MinimalPoly(tuple((r / scale, m) for r, m in roots))
    return float(np.abs(scaled.evaluate(a / scale)).max()) <= tol


def minimal_polynomial(m, tol=numkit.DEFAULT_TOL):
    """Lowest-degree monic polynomial that annihilates ``m``.

    Distinct roots come from :func:`nhcage.numkit.eigen_clusters`, whose rank
    test also yields the exponent of each root (its largest Jordan block).
    The product is then checked to annihilate ``m``, and lowering any exponent
    by one is checked to break annihilation.

    Raises
    ------
    ConsistencyError
        If the checks fail, which means ``tol`` does not match the conditioning
        of ``m``.
    """
    a = numkit.as_cmatrix(m, square=True)
    clusters = numkit.eigen_clusters(a, tol)
    scale = max(1.0, numkit.norm_bound(a))
    if not all(c.verified for c in clusters):
        raise ConsistencyError("eigenvalue clusters failed the rank test",
                               {"clusters": clusters})
    roots = [(c.center, c.index) for c in clusters]
    if not _annihilates(a, roots, scale, tol):
        raise ConsistencyError("candidate minimal polynomial does not annihilate the matrix",
                               {"roots": roots})
    for i, (r, mult) in enumerate(roots):
        lower = roots[:i] + ([(r, mult - 1)] if mult > 1 else []) + roots[i + 1:]
        if _annihilates(a, lower, scale, tol):
            raise ConsistencyError("a lower-degree polynomial also annihilates the matrix",
                                   {"roots": roots, "lower": lower})
    return MinimalPoly(tuple(roots))


# -- local range ---------------------------------------------------------------

def krylov_support_columns(q, n_chains, tol=numkit.DEFAULT_TOL):
    """Cells touched by the columns of a Krylov basis."""
    weight = np.abs(q).max(axis=1)
    rows = np.nonzero(weight > tol)[0]
    return sorted({int(r) // (2 * n_chains) for r in rows})


def _edge_columns(lat, source):
    """Cells counted as 'the boundary' for an excitation at ``source``."""
    L = lat.cells
    if lat.periodic:
        far = L // 2
        return {c for c in range(L) if lat.column_distance(c, source) >= far}
    return {0, L - 1}


def local_range(p, lat, site, amplitudes=(1 / math.sqrt(2), 1 / math.sqrt(2)),
                tol=numkit.DEFAULT_TOL):
    """Dimension of the cyclic subspace an excitation explores.

    Raises
    ------
    InconclusiveLatticeError
        If the Krylov vectors reach the edge of the lattice (for a periodic
        lattice, the column opposite the source).
    """
    h = build_real_space(p, lat)
    v = excitation_vector(p, lat, site, amplitudes)
    q = numkit.krylov_basis(h, v, tol)
    cols = krylov_support_columns(q, n_chains_of(p), tol)
    if set(cols) & _edge_columns(lat, site.cell):
        raise InconclusiveLatticeError(
            f"excitation at cell {site.cell} reaches the edge of a {lat.cells}-cell "
            "lattice; use more cells")
    return q.shape[1]


# -- classification ------------------------------------------------------------

class Kind(str, enum.Enum):
    DP2 = "DP2"
    EP2_FIRST = "EP2_first"
    EP2_SECOND = "EP2_second"
    EP4 = "EP4"
    EP2N = "EP2N"
    NON_FLAT = "NonFlat"
    UNDEFINED = "Undefined"


# exponent pattern of the minimal polynomial for each ladder class
_STRUCTURE = {
    Kind.DP2: ((1, 1), False),
    Kind.EP2_FIRST: ((2,), True),
    Kind.EP2_SECOND: ((2, 2), False),
    Kind.EP4: ((4,), True),
}


@dataclass(frozen=True)
class DegeneracyClass:
    """Degeneracy type of a flat-band configuration.

    ``flat_energy`` lists the distinct flat-band energies; ``n`` is the
    degeneracy order for ``EP2N``.
    """

    kind: Kind
    flat_energy: tuple = ()
    n: int | None = None
    minimal_poly: MinimalPoly | None = None

    @property
    def is_flat(self):
        return self.kind not in (Kind.NON_FLAT, Kind.UNDEFINED)


def _same_abs(a, b, tol):
    return abs(abs(a) - abs(b)) <= tol * max(1.0, abs(a), abs(b))


def table_verdict(p, tol=numkit.DEFAULT_TOL):
    """Degeneracy type from the phase conditions alone, or None if no row applies.

    Rows are tried from higher to lower exceptional-point order, so boundary
    cases fall into the higher-order class.
    """
    q = gauge_fix(p)
    th1, th2 = q.theta1, q.theta2
    th1_zero = is_multiple_of_pi(th1)
    th2_zero = is_multiple_of_pi(th2)
    sum_zero = is_multiple_of_pi(th1 + th2) or is_multiple_of_pi(th1 - th2)
    equal = _same_abs(q.t1, q.t2, tol)
    if not th1_zero and sum_zero and equal:
        return Kind.EP4
    if th1_zero and th2_zero and equal:
        return Kind.EP2_FIRST
    if not th1_zero and not sum_zero and not equal:
        return Kind.EP2_SECOND
    if th1_zero and not th2_zero and not equal:
        return Kind.DP2
    return None


def structure_verdict(mp, scale, tol=numkit.DEFAULT_TOL):
    """Degeneracy type read off the minimal polynomial of the Bloch matrix."""
    at_zero = all(abs(r) <= 1e3 * tol * scale for r, _ in mp.roots)
    for kind, (pattern, zero) in _STRUCTURE.items():
        if mp.structure() == pattern and (zero == at_zero):
            return kind
    return None


def classify(p, tol=numkit.DEFAULT_TOL):
    """Degeneracy type of a ladder configuration.

    The phase-condition table decides; the minimal polynomial of the Bloch
    matrix at ``k = 0`` must agree with it.  Flat configurations that no table
    row covers (e.g. both phases at pi/2 with unequal strengths) are
    classified by the minimal polynomial alone.

    Raises
    ------
    ConsistencyError
        If the two routes disagree; ``verdicts`` carries both.
    """
    q = gauge_fix(p)
    if not flat_band_conditions(q, tol * max(1.0, q.max_strength)).is_cage:
        return DegeneracyClass(Kind.NON_FLAT)
    h = build_bloch(q, 0.0)
    mp = minimal_polynomial(h, tol)
    by_table = table_verdict(q, tol)
    by_poly = structure_verdict(mp, max(1.0, numkit.norm_bound(h)), tol)
    kind = by_table if by_table is not None else by_poly
    if kind is None or (by_poly != kind):
        raise ConsistencyError(
            f"phase table says {getattr(by_table, 'value', None)}, minimal polynomial "
            f"{mp.roots} says {getattr(by_poly, 'value', None)}",
            {"table": by_table, "minimal_polynomial": by_poly})
    lam = cmath.sqrt(q.t1 ** 2 - q.t2 ** 2)
    energy = (0j,) if kind in (Kind.EP4, Kind.EP2_FIRST) else (lam, -lam)
    return DegeneracyClass(kind, flat_energy=energy, minimal_poly=mp)


def classify_nchain(p, cells=16, tol=numkit.DEFAULT_TOL):
    """Degeneracy type of an N-chain lattice.

    Only the EP2N construction is recognised: when every rung blocks the
    detour paths, the real-space minimal polynomial must be ``x**(2N)``.
    """
    if not nchain_prohibited(p):
        return DegeneracyClass(Kind.NON_FLAT)
    h = build_real_space(p, LatticeSpec(cells))
    mp = minimal_polynomial(h, tol)
    order = 2 * p.n_chains
    scale = max(1.0, numkit.norm_bound(h))
    if mp.structure() != (order,) or abs(mp.roots[0][0]) > 1e3 * tol * scale:
        raise ConsistencyError(
            f"rung conditions promise x^{order}, minimal polynomial has roots {mp.roots}",
            {"rungs": Kind.EP2N, "minimal_polynomial": mp.roots})
    return DegeneracyClass(Kind.EP2N, flat_energy=(0j,), n=order, minimal_poly=mp)


# -- perturbation scaling ------------------------------------------------------

def perturbation_response(p, deltas, k=0.0, tol=numkit.DEFAULT_TOL):
    """Largest change of ``|E|`` when ``j`` is shifted by each ``delta``.

    Eigenvalue moduli before and after are sorted and compared pairwise.  The
    unperturbed spectrum uses verified cluster means; the perturbed one is
    split by the shift and uses raw eigenvalues.
    """
    q = gauge_fix(p)
    h0 = build_bloch(q, k)
    base = np.sort(np.abs(numkit.clustered_eigvals(h0, tol)))
    out = []
    for d in deltas:
        h = build_bloch(q.with_(j=q.j + d), k)
        if np.array_equal(h, h0):
            # j + d rounds back to j
            out.append(0.0)
            continue
        moved = np.sort(np.abs(numkit.eigvals(h)))
        out.append(float(np.abs(moved - base).max()))
    return np.array(out)


def perturbation_scaling(p, deltas, k=0.0, tol=numkit.DEFAULT_TOL):
    """Exponent of the power law ``response ~ delta**exponent``.

    Raises
    ------
    PreconditionError
        If ``p`` has no flat band, or ``deltas`` are not positive.
    DegenerateResponseError
        If no delta moves the spectrum measurably.
    """
    ds = np.asarray(deltas, dtype=float)
    if ds.size < 2 or np.any(ds <= 0):
        raise PreconditionError("need at least two positive deltas")
    if not classify(p, tol).is_flat:
        raise PreconditionError("perturbation scaling needs flat-band parameters")
    resp = perturbation_response(p, ds, k, tol)
    if np.all(resp < 1e-14):
        raise DegenerateResponseError("spectrum does not respond to the perturbation")
    keep = resp > 0
    if keep.sum() < 2:
        raise DegenerateResponseError("fewer than two nonzero responses")
    return numkit.fit_loglog_slope(ds[keep], resp[keep])


# -- phase diagram -------------------------------------------------------------

@dataclass(frozen=True)
class ScanPoint:
    theta1: float
    theta2: float
    t2: float
    kind: Kind
    flagged: bool = False


@dataclass(frozen=True)
class PhaseDiagram:
    t1: float
    theta1: np.ndarray
    theta2: np.ndarray
    points: list = field(repr=False)

    def kinds(self):
        """Array of class labels, shape ``(len(theta1), len(theta2))``."""
        n1, n2 = len(self.theta1), len(self.theta2)
        return np.array([pt.kind.value for pt in self.points], dtype=object).reshape(n1, n2)


def _scan_point(t1, th1, th2, t2, j, tol):
    if t2 < 0:
        # t2 e^{i th2} with t2 < 0 is the same coupling as |t2| e^{i (th2 + pi)}
        t2, th2_eff = -t2, th2 + math.pi
    else:
        th2_eff = th2
    p = LadderParams(j, j, t1, t2, th1, th2_eff)
    try:
        return classify(p, tol).kind, t2
    except ConsistencyError:
        return Kind.UNDEFINED, t2


def phase_diagram_scan(t1, theta1_grid, theta2_grid, j=2.0, tol=numkit.DEFAULT_TOL):
    """Degeneracy type over a (theta1, theta2) grid on the flat-band surface.

    At each point ``j = t`` and ``t2 = t1 cos(theta1) / cos(theta2)``.  A
    negative ``t2`` is traded for a pi shift of ``theta2``.  Where
    ``cos(theta2)`` vanishes the constraint only has solutions if
    ``cos(theta1)`` vanishes too; those points reuse the previous column's
    ``t2`` (``t1`` for the first column) and are flagged, the others get the
    ``Undefined`` label and are flagged as well.
    """
    th1s = np.asarray(theta1_grid, dtype=float)
    th2s = np.asarray(theta2_grid, dtype=float)
    points = []
    for th1 in th1s:
        prev_t2 = t1
        for th2 in th2s:
            c2 = math.cos(th2)
            if abs(c2) < 1e-9:
                if abs(math.cos(th1)) < 1e-9:
                    kind, t2 = _scan_point(t1, th1, th2, prev_t2, j, tol)
                else:
                    kind, t2 = Kind.UNDEFINED, float("nan")
                points.append(ScanPoint(th1, th2, t2, kind, flagged=True))
                continue
            t2 = t1 * math.cos(th1) / c2
            kind, t2 = _scan_point(t1, th1, th2, t2, j, tol)
            prev_t2 = t2
            points.append(ScanPoint(th1, th2, t2, kind))
    return PhaseDiagram(t1=t1, theta1=th1s, theta2=th2s, points=points)


def default_angle_grid(n):
    """``n`` equally spaced angles in (-pi, pi], ending at pi."""
    return -math.pi + 2 * math.pi * np.arange(1, n + 1) / n
