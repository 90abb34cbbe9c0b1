"""Dynamical matrices of the ladder and of N coupled chains.

Basis conventions
-----------------
Momentum space (ladder only): ``(alpha_k, beta_k, alpha^dag_-k, beta^dag_-k)``.

Real space: sites ordered cell by cell (left to right), chains top to bottom
within a cell, and particle/hole interleaved per site, so mode
``(chain, cell, component)`` sits at ``2*(cell*N + chain - 1) + component``.
A column of the lattice is therefore a contiguous block of ``2N`` rows.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, DomainError
from .params import (LadderParams, NChainParams, SiteIndex, n_chains_of,
                     require_gauge_fixed)
from .transfer import chain_hop, rung_down, rung_up

__all__ = [
    "GAMMA",
    "build_bloch",
    "build_real_space",
    "excitation_vector",
    "hop_blocks",
    "wilson_loop",
    "wilson_loop_strength",
]

_S0 = np.eye(2, dtype=complex)
_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)

# Dirac representation: gamma^i = i s2 (x) s_i, gamma^0 = s3 (x) 1, gamma^5 = s1 (x) 1
GAMMA = {
    0: np.kron(_S3, _S0),
    1: 1j * np.kron(_S2, _S1),
    2: 1j * np.kron(_S2, _S2),
    3: 1j * np.kron(_S2, _S3),
    5: np.kron(_S1, _S0),
}


def build_bloch(p, k):
    """Momentum-space dynamical matrix of a gauge-fixed ladder.

    Assembled from gamma-matrix products::

        H(k) = 2j cos k g0 + t1 cos th1 g1 g5 + i t1 sin th1 g1 g3
             + 2t cos k g0 g5 + t2 cos th2 g1 + i t2 sin th2 g0 g1
    """
    if not isinstance(p, LadderParams):
        raise TypeError("build_bloch takes LadderParams")
    require_gauge_fixed(p)
    g = GAMMA
    ck = math.cos(k)
    return (2 * p.j * ck * g[0]
            + p.t1 * math.cos(p.theta1) * (g[1] @ g[5])
            + 1j * p.t1 * math.sin(p.theta1) * (g[1] @ g[3])
            + 2 * p.t * ck * (g[0] @ g[5])
            + p.t2 * math.cos(p.theta2) * g[1]
            + 1j * p.t2 * math.sin(p.theta2) * (g[0] @ g[1]))


def hop_blocks(p):
    """Per-chain hop matrices and per-rung (up, down) pairs of a model.

    Ladder parameters may be in any gauge here: the leg phases enter the
    intra-chain blocks directly.
    """
    if isinstance(p, LadderParams):
        chains = [chain_hop(p.j, p.t, p.eta_a), chain_hop(p.j, p.t, p.eta_b)]
        rungs = [(rung_up(p.t1, p.t2, p.theta1, p.theta2),
                  rung_down(p.t1, p.t2, p.theta1, p.theta2))]
        return chains, rungs
    if isinstance(p, NChainParams):
        chains = [chain_hop(s, s) for s in p.chain_strengths]
        rungs = [(rung_up(*a), rung_down(*a)) for a in
                 zip(p.rung_t1, p.rung_t2, p.rung_theta1, p.rung_theta2)]
        return chains, rungs
    raise TypeError(f"unsupported parameter type {type(p).__name__}")


def build_real_space(p, lat):
    """Real-space dynamical matrix on ``lat.cells`` columns.

    Every nonzero 2x2 block is one hop matrix: intra-chain hops between
    neighbouring cells of the same chain and rung hops inside a cell.  With a
    periodic boundary the last cell is bonded to the first; for two cells the
    two bonds coincide and their blocks add up.
    """
    L = lat.cells
    if L < 2:
        raise DimensionError(f"need at least 2 cells, got {L}")
    chains, rungs = hop_blocks(p)
    n = len(chains)
    h = np.zeros((2 * n * L, 2 * n * L), dtype=complex)

    def sl(chain, cell):
        i = 2 * (cell * n + chain)
        return slice(i, i + 2)

    for cell in range(L):
        for m, (u_up, u_down) in enumerate(rungs):
            h[sl(m, cell), sl(m + 1, cell)] += u_up
            h[sl(m + 1, cell), sl(m, cell)] += u_down
        if cell + 1 < L or lat.periodic:
            nxt = (cell + 1) % L
            for c, u0 in enumerate(chains):
                h[sl(c, nxt), sl(c, cell)] += u0
                h[sl(c, cell), sl(c, nxt)] += u0
    return h


def excitation_vector(p, lat, site, amplitudes=(1 / math.sqrt(2), 1 / math.sqrt(2))):
    """State with the given (particle, hole) amplitudes on one site."""
    n = n_chains_of(p)
    a = np.asarray(amplitudes, dtype=complex)
    if a.shape != (2,) or not np.any(a):
        raise ValueError("amplitudes must be a nonzero (particle, hole) pair")
    v = np.zeros(2 * n * lat.cells, dtype=complex)
    i = SiteIndex(site.chain, site.cell).flat(n, lat.cells)
    v[i:i + 2] = a
    return v


def wilson_loop_strength(p):
    """Product of the link strengths around one plaquette.

    A leg link carries the two couplings ``j`` and ``t`` and a rung link ``t1``
    and ``t2``; each link strength is the geometric mean of its pair, so the
    loop of two leg and two rung links has strength ``j t t1 t2``.
    """
    return p.j * p.t * p.t1 * p.t2


def wilson_loop(p):
    """Normalised trace of the hop product around a plaquette.

    The loop starts on the top leg, goes down the rung, right along the bottom
    leg, up the next rung and back left along the top leg:
    ``Tr(U_l U_up U_r U_down) / (j t t1 t2)``.  Leg phases are kept, so the
    value can be compared across gauges.

    Raises
    ------
    DomainError
        If any of ``j, t, t1, t2`` vanishes.
    """
    strength = wilson_loop_strength(p)
    if strength == 0.0:
        raise DomainError("Wilson loop needs nonzero j, t, t1 and t2")
    (u_a, u_b), [(u_up, u_down)] = hop_blocks(p)
    loop = u_a @ u_up @ u_b @ u_down
    return complex(np.trace(loop)) / strength
