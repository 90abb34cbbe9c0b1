"""Time evolution of single-site excitations and what to read off it.

The observable is the site intensity, ``|particle|**2 + |hole|**2``, with no
renormalisation: the dynamics is not unitary and growth is the signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import numkit
from .errors import ClassificationError, DomainError, InconclusiveLatticeError
from .model import build_real_space, excitation_vector
from .params import (LadderParams, LatticeSpec, SiteIndex, n_chains_of)
from .transfer import flat_band_conditions, nchain_prohibited

__all__ = [
    "DEFAULT_CELLS",
    "EvolutionTrace",
    "ExcitationSpec",
    "Growth",
    "confinement_check",
    "default_times",
    "evolve",
    "growth_character",
    "is_caged",
    "max_leak",
    "mirror_deviation",
    "occupied_sites",
]

DEFAULT_CELLS = 64
DEFAULT_SOURCE_CELL = 32
CONTAMINATION_TOL = 1e-8


def default_times(t_max=10.0, n=201):
    return np.linspace(0.0, t_max, n)


@dataclass(frozen=True)
class ExcitationSpec:
    site: SiteIndex
    amplitudes: tuple = (1 / math.sqrt(2), 1 / math.sqrt(2))

    def __post_init__(self):
        a = tuple(complex(x) for x in self.amplitudes)
        if len(a) != 2 or a == (0j, 0j):
            raise ValueError("amplitudes must be a (particle, hole) pair, not both zero")
        object.__setattr__(self, "amplitudes", a)


@dataclass(frozen=True)
class EvolutionTrace:
    """Site intensities over time.

    ``intensities[i, cell, chain - 1]`` is the intensity at ``times[i]``.
    """

    times: np.ndarray
    intensities: np.ndarray
    source_column: int
    source_chain: int
    periodic: bool = True

    @property
    def cells(self):
        return self.intensities.shape[1]

    @property
    def n_chains(self):
        return self.intensities.shape[2]

    def column_distance(self, a, b):
        d = abs(a - b)
        return min(d, self.cells - d) if self.periodic else d

    def series(self, site):
        return self.intensities[:, site.cell, site.chain - 1]


def is_caged(p, tol=1e-9):
    if isinstance(p, LadderParams):
        return flat_band_conditions(p, tol * max(1.0, p.max_strength)).is_cage
    return nchain_prohibited(p)


def _nilpotent_orbit(h, v, tol=1e-10):
    """``[v, h v, h^2 v, ...]`` up to the last nonzero power, or None.

    Returns None unless ``h`` is verified nilpotent.
    """
    nu = numkit.nilpotency_index(h, tol)
    if nu is None:
        return None
    orbit = [v]
    for _ in range(nu - 1):
        orbit.append(h @ orbit[-1])
    return orbit


def _polynomial_states(orbit, times):
    # psi(t) = sum_k (-i t)^k / k! h^k v, exact for nilpotent h
    out = np.zeros((len(times), orbit[0].size), dtype=complex)
    for k, w in enumerate(orbit):
        coef = (-1j * times) ** k / math.factorial(k)
        out += coef[:, None] * w[None, :]
    return out


def _expm_states(h, v, times):
    steps = np.diff(times)
    out = np.empty((len(times), v.size), dtype=complex)
    out[0] = v
    uniform = len(steps) > 0 and np.allclose(steps, steps[0], rtol=1e-12, atol=0.0)
    if uniform:
        step = numkit.expm(-1j * h * steps[0])
        for i in range(1, len(times)):
            out[i] = step @ out[i - 1]
    else:
        for i, t in enumerate(times[1:], start=1):
            out[i] = numkit.expm(-1j * h * t) @ v
    return out


def _krylov_states(h, v, times, tol):
    """Evolve inside the cyclic subspace of ``v`` when it is invariant and small.

    Returns None if the subspace fills more than half the space.
    """
    q = numkit.krylov_basis(h, v, tol)
    if q.shape[1] > h.shape[0] // 2:
        return None
    t = q.conj().T @ h @ q
    coords = q.conj().T @ v
    small = np.array([numkit.expm(-1j * t * s) @ coords for s in times])
    return small @ q.T


def evolve(p, lat=None, exc=None, times=None, method="auto", tol=numkit.DEFAULT_TOL):
    """Evolve a single-site excitation and record site intensities.

    Parameters
    ----------
    p : LadderParams or NChainParams
    lat : LatticeSpec, optional
        Defaults to 64 periodic cells.
    exc : ExcitationSpec, optional
        Defaults to chain 1 at cell 32 with equal particle and hole amplitudes.
    times : array_like, optional
        Increasing and starting at 0; defaults to 201 points on [0, 10].
    method : {"auto", "polynomial", "krylov", "expm"}
        ``auto`` uses the exact polynomial propagator when the dynamical
        matrix is nilpotent, then evolution inside the cyclic subspace of the
        excitation when that subspace is small, and the full matrix
        exponential otherwise.

    Raises
    ------
    InconclusiveLatticeError
        If caged parameters put intensity above 1e-8 on the cells farthest
        from the source.
    """
    lat = lat or LatticeSpec(DEFAULT_CELLS)
    exc = exc or ExcitationSpec(SiteIndex(1, min(DEFAULT_SOURCE_CELL, lat.cells // 2)))
    ts = default_times() if times is None else np.asarray(times, dtype=float)
    if ts.ndim != 1 or ts.size < 1 or ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
        raise DomainError("times must be increasing and start at 0")
    h = build_real_space(p, lat)
    v = excitation_vector(p, lat, exc.site, exc.amplitudes)
    v = v / np.linalg.norm(v)

    states = None
    if method in ("auto", "polynomial"):
        orbit = _nilpotent_orbit(h, v)
        if orbit is not None:
            states = _polynomial_states(orbit, ts)
        elif method == "polynomial":
            raise DomainError("dynamical matrix is not nilpotent")
    if states is None and method in ("auto", "krylov"):
        states = _krylov_states(h, v, ts, tol)
    if states is None:
        states = _expm_states(h, v, ts)
    states[0] = v

    n = n_chains_of(p)
    amp2 = np.abs(states.reshape(len(ts), lat.cells, n, 2)) ** 2
    trace = EvolutionTrace(times=ts, intensities=amp2.sum(axis=3),
                           source_column=exc.site.cell, source_chain=exc.site.chain,
                           periodic=lat.periodic)
    if is_caged(p):
        edge = _edge_mask(trace)
        leak = float(trace.intensities[:, edge, :].max()) if edge.any() else 0.0
        if leak > CONTAMINATION_TOL:
            raise InconclusiveLatticeError(
                f"intensity {leak:.3g} reached the lattice edge; use more than {lat.cells} cells")
    return trace


def _edge_mask(trace):
    cols = np.arange(trace.cells)
    if trace.periodic:
        far = trace.cells // 2
        return np.array([trace.column_distance(c, trace.source_column) >= far for c in cols])
    return (cols == 0) | (cols == trace.cells - 1)


def confinement_check(trace, radius=1, tol=1e-10):
    """True iff no column farther than ``radius`` from the source ever exceeds ``tol``."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    far = np.array([trace.column_distance(c, trace.source_column) > radius
                    for c in range(trace.cells)])
    if not far.any():
        return True
    return bool(trace.intensities[:, far, :].max() <= tol)


def max_leak(trace, radius=1):
    """Largest intensity seen beyond ``radius`` columns from the source."""
    far = np.array([trace.column_distance(c, trace.source_column) > radius
                    for c in range(trace.cells)])
    return float(trace.intensities[:, far, :].max()) if far.any() else 0.0


def occupied_sites(trace, tol=1e-10):
    """Sites whose intensity exceeds ``tol`` at some time, as ``SiteIndex`` objects."""
    hit = trace.intensities.max(axis=0) > tol
    return {SiteIndex(int(chain) + 1, int(cell)) for cell, chain in zip(*np.nonzero(hit))}


def mirror_deviation(trace):
    """Largest left/right asymmetry of the column profile about the source.

    Each time slice is compared with its reflection through the source
    column and scaled by that slice's largest intensity.
    """
    L = trace.cells
    if not trace.periodic:
        span = min(trace.source_column, L - 1 - trace.source_column)
        offsets = np.arange(1, span + 1)
    else:
        offsets = np.arange(1, L // 2 + 1)
    right = trace.intensities[:, (trace.source_column + offsets) % L, :]
    left = trace.intensities[:, (trace.source_column - offsets) % L, :]
    peak = trace.intensities.reshape(len(trace.times), -1).max(axis=1)
    peak = np.where(peak > 0, peak, 1.0)
    return float((np.abs(right - left).max(axis=(1, 2)) / peak).max())


# -- growth character ----------------------------------------------------------

class Growth(NamedTuple):
    """``kind`` is constant, polynomial, oscillatory or exponential.

    ``value`` is the degree, the frequency or the rate respectively (None for
    constant).  An intensity is quadratic in the amplitudes, so a pair of
    modes at energies ``+w`` and ``-w`` makes it beat at angular frequency
    ``2 w``; the frequency reported is that ``w``.  The rate is the slope of
    ``log(intensity)``.
    """

    kind: str
    value: float | None = None


def _linear_r2(x, y):
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    ss = float(((y - y.mean()) ** 2).sum())
    return coef[0], (1.0 - float((resid ** 2).sum()) / ss) if ss > 0 else 1.0


def _dominant_frequency(t, y):
    """Angular frequency of the strongest Fourier mode and the variance it explains."""
    dt = t[1] - t[0]
    detr = y - np.polyval(np.polyfit(t, y, 1), t)
    var = float((detr ** 2).sum())
    if var == 0.0:
        return 0.0, 0.0
    spec = np.fft.rfft(detr)
    freqs = 2 * np.pi * np.fft.rfftfreq(t.size, dt)
    i = int(np.argmax(np.abs(spec[1:]))) + 1
    # refine by least squares over a fine grid around the FFT peak
    best_w, best_frac = freqs[i], 0.0
    for w in np.linspace(freqs[max(i - 1, 1)], freqs[min(i + 1, freqs.size - 1)], 401):
        basis = np.column_stack([np.cos(w * t), np.sin(w * t)])
        coef, *_ = np.linalg.lstsq(basis, detr, rcond=None)
        frac = 1.0 - float(((detr - basis @ coef) ** 2).sum()) / var
        if frac > best_frac:
            best_w, best_frac = w, frac
    return float(best_w), best_frac


def growth_character(trace, site, r2_min=0.999, poly_r2_min=0.99, osc_min=0.99):
    """Classify how the intensity at ``site`` evolves.

    Tried in order: constant (relative variation below 1e-6), exponential
    (log intensity linear in time over the later half), polynomial (log-log
    fit over the trailing decade of time; the degree is the rounded slope), oscillatory
    (after removing a linear trend, one frequency explains at least 99% of the
    variance).

    Raises
    ------
    ClassificationError
        If no test passes; ``residuals`` holds each test's figure of merit.
    """
    t = np.asarray(trace.times)
    y = np.asarray(trace.series(site), dtype=float)
    peak = float(np.abs(y).max())
    if peak == 0.0 or float(np.ptp(y)) <= 1e-6 * peak:
        return Growth("constant")

    fits = {}
    late = t >= t[-1] / 2
    if np.all(y[late] > 0):
        rate, r2 = _linear_r2(t[late], np.log(y[late]))
        fits["exponential_r2"] = r2
        if r2 >= r2_min and rate * (t[-1] - t[late][0]) > math.log(1e3):
            return Growth("exponential", float(rate))

    decade = (t >= t[-1] / 10) & (t > 0)
    if np.all(y[decade] > 0) and decade.sum() >= 3:
        slope, r2 = _linear_r2(np.log(t[decade]), np.log(y[decade]))
        fits["polynomial_r2"] = r2
        fits["polynomial_slope"] = slope
        if r2 >= poly_r2_min and round(slope) >= 1:
            return Growth("polynomial", int(round(slope)))

    if t.size >= 8 and np.allclose(np.diff(t), t[1] - t[0]):
        w, frac = _dominant_frequency(t, y)
        fits["oscillatory_fraction"] = frac
        if frac >= osc_min:
            return Growth("oscillatory", w / 2)

    raise ClassificationError(
        f"no growth pattern fits the intensity at chain {site.chain}, cell {site.cell}",
        fits)
