"""Parameter containers, lattice geometry and gauge operations.

The two-chain ladder has eight real parameters: intra-chain conjugated (``j``)
and pair (``t``) couplings, rung conjugated/pair strengths ``t1``/``t2`` with
phases ``theta1``/``theta2``, and pair-coupling phases ``eta_a``/``eta_b`` on
the two legs.  Local U(1) rotations of the two legs shuffle the phases around;
only the two fluxes ``2*theta1 + eta_b - eta_a`` and ``2*theta2 - eta_a -
eta_b`` are physical, and :func:`gauge_fix` moves everything onto the rungs.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError, PreconditionError

__all__ = [
    "Boundary",
    "Component",
    "LadderParams",
    "LatticeSpec",
    "NChainParams",
    "SiteIndex",
    "angle_distance",
    "canonical_angle",
    "fluxes",
    "gauge_fix",
    "gauge_transform",
    "is_gauge_fixed",
    "is_multiple_of_pi",
    "make_ep2n_params",
    "params_from_dict",
    "params_to_dict",
    "load_params",
]

ANGLE_TOL = 1e-9
GAUGE_TOL = 1e-12


def canonical_angle(phi):
    """Reduce an angle to the interval (-pi, pi]; values inside are returned unchanged."""
    if -math.pi < phi <= math.pi:
        return float(phi)
    out = math.pi - math.fmod(math.pi - phi, 2 * math.pi)
    if out > math.pi:
        out -= 2 * math.pi
    elif out <= -math.pi:
        out += 2 * math.pi
    return out


def angle_distance(a, b):
    """Distance between two angles on the circle."""
    return abs(canonical_angle(a - b))


def is_multiple_of_pi(phi, tol=ANGLE_TOL):
    r = math.fmod(abs(phi), math.pi)
    return min(r, math.pi - r) <= tol


@dataclass(frozen=True)
class LadderParams:
    """The eight real couplings of the two-chain ladder.

    Phases are stored reduced to (-pi, pi].
    """

    j: float
    t: float
    t1: float
    t2: float
    theta1: float = 0.0
    theta2: float = 0.0
    eta_a: float = 0.0
    eta_b: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = float(getattr(self, f.name))
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v}")
            if f.name in ("theta1", "theta2", "eta_a", "eta_b"):
                v = canonical_angle(v)
            object.__setattr__(self, f.name, v)
        if self.t1 < 0 or self.t2 < 0:
            raise ValueError("rung strengths t1, t2 must be nonnegative")

    @property
    def max_strength(self):
        return max(abs(self.j), abs(self.t), self.t1, self.t2)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class NChainParams:
    """Couplings of ``N`` stacked chains.

    Chain ``m`` (1-based, counted from the top) has equal conjugated and pair
    couplings ``chain_strengths[m-1]``.  Rung ``m`` joins chains ``m`` and
    ``m+1`` with strengths ``rung_t1[m-1]``, ``rung_t2[m-1]`` and phases
    ``rung_theta1[m-1]``, ``rung_theta2[m-1]``.
    """

    chain_strengths: tuple
    rung_t1: tuple
    rung_t2: tuple
    rung_theta1: tuple
    rung_theta2: tuple

    def __post_init__(self):
        cs = tuple(float(x) for x in self.chain_strengths)
        if len(cs) < 2:
            raise ValueError("need at least two chains")
        object.__setattr__(self, "chain_strengths", cs)
        for name in ("rung_t1", "rung_t2", "rung_theta1", "rung_theta2"):
            vals = tuple(float(x) for x in getattr(self, name))
            if len(vals) != len(cs) - 1:
                raise ValueError(f"{name} needs {len(cs) - 1} entries, got {len(vals)}")
            if name.startswith("rung_theta"):
                vals = tuple(canonical_angle(v) for v in vals)
            object.__setattr__(self, name, vals)
        for v in cs + self.rung_t1 + self.rung_t2:
            if not math.isfinite(v):
                raise ValueError("couplings must be finite")

    @property
    def n_chains(self):
        return len(self.chain_strengths)

    @property
    def max_strength(self):
        return max(max(abs(x) for x in self.chain_strengths),
                   max(self.rung_t1), max(self.rung_t2))


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


class Component(enum.IntEnum):
    PARTICLE = 0
    HOLE = 1


@dataclass(frozen=True)
class LatticeSpec:
    cells: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if int(self.cells) != self.cells or self.cells < 1:
            raise ValueError("cells must be a positive integer")
        object.__setattr__(self, "cells", int(self.cells))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def periodic(self):
        return self.boundary is Boundary.PERIODIC

    def column_distance(self, a, b):
        d = abs(a - b)
        return min(d, self.cells - d) if self.periodic else d


@dataclass(frozen=True)
class SiteIndex:
    """One bosonic mode: ``chain`` in 1..N, ``cell`` in 0..L-1, and a component."""

    chain: int
    cell: int
    component: Component = Component.PARTICLE

    def flat(self, n_chains, cells=None):
        if not 1 <= self.chain <= n_chains:
            raise IndexError(f"chain {self.chain} outside 1..{n_chains}")
        if cells is not None and not 0 <= self.cell < cells:
            raise IndexError(f"cell {self.cell} outside 0..{cells - 1}")
        return 2 * (self.cell * n_chains + self.chain - 1) + int(self.component)

    @classmethod
    def from_flat(cls, index, n_chains):
        site, comp = divmod(index, 2)
        cell, chain = divmod(site, n_chains)
        return cls(chain + 1, cell, Component(comp))


def n_chains_of(p):
    return 2 if isinstance(p, LadderParams) else p.n_chains


# -- gauge -------------------------------------------------------------------

def gauge_transform(p, phi_a, phi_b):
    """Rotate leg ``a`` by ``phi_a`` and leg ``b`` by ``phi_b``."""
    return replace(p,
                   theta1=p.theta1 + phi_b - phi_a,
                   theta2=p.theta2 - phi_b - phi_a,
                   eta_a=p.eta_a - 2 * phi_a,
                   eta_b=p.eta_b - 2 * phi_b)


def fluxes(p):
    """The gauge-invariant pair ``(Phi1, Phi2)``, reduced to (-pi, pi]."""
    return (canonical_angle(2 * p.theta1 + p.eta_b - p.eta_a),
            canonical_angle(2 * p.theta2 - p.eta_a - p.eta_b))


def is_gauge_fixed(p, tol=GAUGE_TOL):
    return abs(p.eta_a) + abs(p.eta_b) <= tol


def gauge_fix(p):
    """Gauge-equivalent parameters with ``eta_a = eta_b = 0``.

    The result carries ``theta1 = Phi1/2`` and ``theta2 = Phi2/2`` (modulo a
    common shift of both phases by pi, which is itself a gauge transform).
    """
    if isinstance(p, NChainParams) or is_gauge_fixed(p, 0.0):
        return p
    q = gauge_transform(p, p.eta_a / 2, p.eta_b / 2)
    return replace(q, eta_a=0.0, eta_b=0.0)


def require_gauge_fixed(p):
    if isinstance(p, LadderParams) and not is_gauge_fixed(p):
        raise PreconditionError(
            f"parameters carry leg phases eta_a={p.eta_a:.3g}, eta_b={p.eta_b:.3g}; "
            "call gauge_fix() first")


# -- constructors ------------------------------------------------------------

def make_ep2n_params(n, strength, theta):
    """N chains coupled so that every rung satisfies the EP2N conditions.

    All chains and rungs get the same ``strength``; every rung carries
    ``theta1 = theta`` and ``theta2 = -theta``.

    Raises
    ------
    PreconditionError
        If ``theta`` is a multiple of pi (the degeneracy order would collapse).
    """
    if int(n) != n or n < 2:
        raise ValueError("need an integer number of chains >= 2")
    if strength <= 0:
        raise ValueError("strength must be positive")
    if is_multiple_of_pi(theta):
        raise PreconditionError("theta must not be a multiple of pi")
    n = int(n)
    s = float(strength)
    return NChainParams(chain_strengths=(s,) * n,
                        rung_t1=(s,) * (n - 1),
                        rung_t2=(s,) * (n - 1),
                        rung_theta1=(theta,) * (n - 1),
                        rung_theta2=(-theta,) * (n - 1))


def ladder_as_nchain(p):
    """Express a gauge-fixed ladder with ``j = t`` as a two-chain NChainParams."""
    require_gauge_fixed(p)
    if abs(p.j - p.t) > GAUGE_TOL:
        raise PreconditionError("only ladders with j = t have an N-chain form")
    return NChainParams((p.j, p.j), (p.t1,), (p.t2,), (p.theta1,), (p.theta2,))


# -- JSON --------------------------------------------------------------------

_LADDER_KEYS = ("j", "t", "t1", "t2", "theta1", "theta2", "eta_a", "eta_b")
_LADDER_REQUIRED = ("j", "t", "t1", "t2", "theta1", "theta2")
_NCHAIN_KEYS = ("chain_strengths", "rung_t1", "rung_t2", "rung_theta1", "rung_theta2")
_ANGLE_KEYS = ("theta1", "theta2", "eta_a", "eta_b", "rung_theta1", "rung_theta2")


def params_to_dict(p):
    if isinstance(p, LadderParams):
        d = {"model": "ladder"}
        d.update({k: getattr(p, k) for k in _LADDER_KEYS})
        return d
    d = {"model": "nchain"}
    d.update({k: list(getattr(p, k)) for k in _NCHAIN_KEYS})
    return d


def params_from_dict(d, degrees=False, extra_keys=()):
    """Build parameters from the JSON object form.

    Unknown keys raise :class:`ConfigError`; ``extra_keys`` lists keys the
    caller handles itself.  With ``degrees`` set, angles are read in degrees.
    """
    if not isinstance(d, dict):
        raise ConfigError("parameter document must be a JSON object")
    model = d.get("model", "ladder")
    if model == "ladder":
        allowed, required = _LADDER_KEYS, _LADDER_REQUIRED
    elif model == "nchain":
        allowed, required = _NCHAIN_KEYS, _NCHAIN_KEYS
    else:
        raise ConfigError(f"unknown model {model!r}; expected 'ladder' or 'nchain'")
    unknown = set(d) - set(allowed) - {"model"} - set(extra_keys)
    if unknown:
        raise ConfigError(f"unknown keys for model {model!r}: {sorted(unknown)}")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"missing keys for model {model!r}: {missing}")
    vals = {}
    for k in allowed:
        if k not in d:
            continue
        v = d[k]
        try:
            if isinstance(v, list):
                v = [float(x) for x in v]
                if degrees and k in _ANGLE_KEYS:
                    v = [math.radians(x) for x in v]
            else:
                if isinstance(v, bool):
                    raise TypeError
                v = float(v)
                if degrees and k in _ANGLE_KEYS:
                    v = math.radians(v)
        except (TypeError, ValueError):
            raise ConfigError(f"key {k!r} must be numeric, got {d[k]!r}") from None
        vals[k] = v
    try:
        if model == "ladder":
            return LadderParams(**vals)
        return NChainParams(**vals)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_params(path, degrees=False):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return params_from_dict(d, degrees=degrees)
