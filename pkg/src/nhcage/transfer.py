"""Two-by-two hop matrices and the propagation-path algebra built on them.

A hop matrix ``U[x, y]`` maps the (particle, hole) pair of site ``y`` onto the
equation of motion of site ``x``.  Products of hop matrices along a path are
written target-first, so the *first* move of a path is the *rightmost* factor.
:class:`PathSpec` stores moves in travel order and :func:`path_product` does the
reversal.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import PathError, PreconditionError
from .params import (GAUGE_TOL, gauge_fix, is_multiple_of_pi,
                     require_gauge_fixed)

__all__ = [
    "FlatBandReport",
    "Move",
    "NChainTransfer",
    "PathSpec",
    "TransferSet",
    "cage_loop_matrix",
    "chain_hop",
    "flat_band_conditions",
    "is_zero",
    "nchain_prohibited",
    "nchain_transfer",
    "path_product",
    "rung_down",
    "rung_up",
    "transfer_set",
    "zero_tol",
]


def chain_hop(j, t, eta=0.0):
    """Hop between neighbouring cells of one leg (same in both directions)."""
    e = cmath.exp(1j * eta)
    return np.array([[j, t * e], [-t * e.conjugate(), -j]], dtype=complex)


def rung_up(t1, t2, theta1, theta2):
    """Hop from the lower chain of a rung to the upper one."""
    return np.array([[t1 * cmath.exp(1j * theta1), t2 * cmath.exp(1j * theta2)],
                     [-t2 * cmath.exp(-1j * theta2), -t1 * cmath.exp(-1j * theta1)]],
                    dtype=complex)


def rung_down(t1, t2, theta1, theta2):
    """Hop from the upper chain of a rung to the lower one."""
    return np.array([[t1 * cmath.exp(-1j * theta1), t2 * cmath.exp(1j * theta2)],
                     [-t2 * cmath.exp(-1j * theta2), -t1 * cmath.exp(1j * theta1)]],
                    dtype=complex)


def zero_tol(strength):
    """Default threshold for 'this 2x2 product vanishes'."""
    return 1e-10 * max(strength, 1e-300) ** 2


def is_zero(m, tol):
    return float(np.abs(m).max()) <= tol


@dataclass(frozen=True)
class TransferSet:
    u_r: np.ndarray
    u_l: np.ndarray
    u_up: np.ndarray
    u_down: np.ndarray


def transfer_set(p):
    """The four hop matrices of a gauge-fixed ladder."""
    require_gauge_fixed(p)
    u0 = chain_hop(p.j, p.t)
    return TransferSet(u_r=u0, u_l=u0.copy(),
                       u_up=rung_up(p.t1, p.t2, p.theta1, p.theta2),
                       u_down=rung_down(p.t1, p.t2, p.theta1, p.theta2))


@dataclass(frozen=True)
class NChainTransfer:
    """Hop matrices of an N-chain lattice.

    ``chain[m]`` is the intra-chain hop of chain ``m + 1``; ``up[m]`` and
    ``down[m]`` cross rung ``m + 1`` (between chains ``m + 1`` and ``m + 2``).
    """

    chain: tuple
    up: tuple
    down: tuple


def nchain_transfer(p):
    chain = tuple(chain_hop(s, s) for s in p.chain_strengths)
    args = list(zip(p.rung_t1, p.rung_t2, p.rung_theta1, p.rung_theta2))
    return NChainTransfer(chain=chain,
                          up=tuple(rung_up(*a) for a in args),
                          down=tuple(rung_down(*a) for a in args))


class Move(NamedTuple):
    """One hop.  ``kind`` is right/left/up/down; ``rung`` numbers vertical hops.

    ``up`` across rung ``m`` goes from chain ``m + 1`` to chain ``m``; ``down``
    goes the other way.  Chains are numbered from the top starting at 1.
    """

    kind: str
    rung: int = 0

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        kind, _, rung = text.partition(":")
        if kind in ("right", "left"):
            if rung:
                raise PathError(f"horizontal move {text!r} takes no rung")
            return cls(kind)
        if kind in ("up", "down"):
            return cls(kind, int(rung) if rung else 1)
        raise PathError(f"unknown move {text!r}")


RIGHT = Move("right")
LEFT = Move("left")


def up(rung=1):
    return Move("up", rung)


def down(rung=1):
    return Move("down", rung)


@dataclass(frozen=True)
class PathSpec:
    """Moves in travel order, plus the chain the path starts on.

    ``start_chain`` may be omitted when the path contains a vertical move; it
    is then inferred from the first one.
    """

    moves: tuple
    start_chain: int | None = None

    def __post_init__(self):
        moves = tuple(Move.parse(m) if isinstance(m, str) else Move(*m)
                      for m in self.moves)
        if not moves:
            raise PathError("a path needs at least one move")
        object.__setattr__(self, "moves", moves)

    @classmethod
    def parse(cls, text, start_chain=None):
        return cls(tuple(text.split(",")), start_chain)

    def chains(self, n_chains):
        """Chain occupied before each move, and after the last one."""
        cur = self.start_chain
        if cur is None:
            first = next((m for m in self.moves if m.kind in ("up", "down")), None)
            if first is None:
                cur = 1
            else:
                cur = first.rung + 1 if first.kind == "up" else first.rung
        out = [cur]
        for m in self.moves:
            if m.kind == "up":
                if cur != m.rung + 1 or not 1 <= m.rung < n_chains:
                    raise PathError(f"cannot move up across rung {m.rung} from chain {cur}")
                cur = m.rung
            elif m.kind == "down":
                if cur != m.rung or not 1 <= m.rung < n_chains:
                    raise PathError(f"cannot move down across rung {m.rung} from chain {cur}")
                cur = m.rung + 1
            out.append(cur)
        if not 1 <= out[0] <= n_chains:
            raise PathError(f"start chain {out[0]} outside 1..{n_chains}")
        return out


def path_product(ts, path):
    """Ordered product of hop matrices along ``path``.

    The first move is the rightmost factor.  ``ts`` is a :class:`TransferSet`
    (ladder) or an :class:`NChainTransfer`.
    """
    if isinstance(ts, TransferSet):
        n_chains = 2
    else:
        n_chains = len(ts.chain)
    chains = path.chains(n_chains)
    out = np.eye(2, dtype=complex)
    for move, chain in zip(path.moves, chains):
        if isinstance(ts, TransferSet):
            hop = {"right": ts.u_r, "left": ts.u_l,
                   "up": ts.u_up, "down": ts.u_down}[move.kind]
        elif move.kind in ("right", "left"):
            hop = ts.chain[chain - 1]
        else:
            hop = (ts.up if move.kind == "up" else ts.down)[move.rung - 1]
        out = hop @ out
    return out


@dataclass(frozen=True)
class FlatBandReport:
    chain_nilpotent: bool
    rung_balanced: bool

    @property
    def is_cage(self):
        return self.chain_nilpotent and self.rung_balanced


def rung_imbalance(p):
    return p.t1 * math.cos(p.theta1) - p.t2 * math.cos(p.theta2)


def flat_band_conditions(p, tol=1e-9):
    """Check ``j = t`` and ``t1 cos(theta1) = t2 cos(theta2)``.

    Parameters in any gauge are accepted; the rung balance is evaluated in the
    fixed gauge.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    q = gauge_fix(p)
    return FlatBandReport(chain_nilpotent=abs(q.j - q.t) <= tol,
                          rung_balanced=abs(rung_imbalance(q)) <= tol)


def cage_loop_matrix(p):
    """Two-cell advance ``U_up U0 U_down U0 + U0 U_up U0 U_down`` of a j = t ladder.

    It is diagonal, ``4 j t (t1 cos(theta1) - t2 cos(theta2))**2`` times the
    identity, and vanishes exactly when the rung is balanced.
    """
    require_gauge_fixed(p)
    if abs(p.j - p.t) > GAUGE_TOL:
        raise PreconditionError(f"cage loop needs j = t, got j={p.j}, t={p.t}")
    ts = transfer_set(p)
    u0, uu, ud = ts.u_r, ts.u_up, ts.u_down
    return uu @ u0 @ ud @ u0 + u0 @ uu @ u0 @ ud


def nchain_prohibited(p, tol=None):
    """Whether every rung blocks the two-step detours of the N-chain cage.

    For each rung the products ``U_down U0`` and ``U0 U_up`` must vanish for
    the hop matrices ``U0`` of both adjacent chains, and the rung phase must
    not be a multiple of pi.  At ``theta = 0`` the products vanish too, but the
    rung hop is then proportional to ``U0`` itself and the construction
    degenerates, so that case is rejected.
    """
    if tol is None:
        tol = zero_tol(p.max_strength)
    tr = nchain_transfer(p)
    for m in range(p.n_chains - 1):
        if is_multiple_of_pi(p.rung_theta1[m]):
            return False
        for u0 in (tr.chain[m], tr.chain[m + 1]):
            if not (is_zero(tr.down[m] @ u0, tol) and is_zero(u0 @ tr.up[m], tol)):
                return False
    return True
