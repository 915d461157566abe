"""Independent ground truth for the stochastic chain: exact master-equation
stationary states, exact diagonalization of the open XXZ chain, and spectral
cross-checks against the Markov generator.

State convention (fixed project-wide): a configuration is a length-L bit
word, site 1 leftmost and slowest Kronecker index, bit 1 = occupied;
occupied maps to spin-down in the chain picture.  Bulk moves: (1,0)->(0,1)
at rate 1, (0,1)->(1,0) at rate q.  Boundary site 1: enter alpha, exit
gamma_r; boundary site L: exit beta_r, enter delta_r.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _iproduct

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import linear_sum_assignment

from . import _spinchain as _sc
from .asep import ASEPRates, Observables

__all__ = [
    "MarkovGenerator",
    "StationaryDistribution",
    "XXZModel",
    "build_generator",
    "stationary_distribution",
    "oracle_observables",
    "build_xxz",
    "spectrum_compare",
]


@dataclass
class MarkovGenerator:
    """Sparse master-equation generator; columns sum to zero."""

    L: int
    matrix: sp.csc_matrix
    rates: ASEPRates


@dataclass
class StationaryDistribution:
    """Kernel vector of the generator as a word -> probability map."""

    probs: dict[tuple[int, ...], float]

    @property
    def L(self) -> int:
        return len(next(iter(self.probs)))


@dataclass
class XXZModel:
    """Open chain with nondiagonal boundary fields, H = H_bulk + B1 + BL.

    ``Delta_q``/``h_field`` are the anisotropy and boundary-gradient
    coefficients of the assembled bulk, which lives at the gauge-resolved
    argument -1/sqrt(q): Delta_q = +(s + 1/s)/2, h_field = (s - 1/s)/2 with
    s = sqrt(q).  ``mu`` is the free diagonal-gauge parameter; it never
    affects the spectrum.
    """

    L: int
    H: np.ndarray
    H_bulk: np.ndarray
    B1: np.ndarray
    BL: np.ndarray
    Delta_q: float
    h_field: float
    mu: float


def _state_bits(L: int):
    """All words in index order (site 1 slowest); shape (2^L, L)."""
    words = np.array(list(_iproduct((0, 1), repeat=L)), dtype=np.int64)
    return words


def build_generator(rates: ASEPRates, L: int) -> MarkovGenerator:
    """Assemble the sparse generator for a length-L open chain."""
    if not 1 <= L <= 14:
        raise ValueError("L must be in 1..14 (memory guard)")
    q = rates.q.q
    al, be, ga, de = rates.alpha, rates.beta_r, rates.gamma_r, rates.delta_r
    dim = 2**L
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    diag = np.zeros(dim)

    def add(target: int, source: int, rate: float) -> None:
        if rate == 0.0:
            return
        rows.append(target)
        cols.append(source)
        vals.append(rate)
        diag[source] -= rate

    for s_idx in range(dim):
        for i in range(L - 1):
            hi, lo = L - 1 - i, L - 2 - i  # bit positions of sites i+1, i+2
            bi = (s_idx >> hi) & 1
            bj = (s_idx >> lo) & 1
            if bi == 1 and bj == 0:
                add(s_idx ^ (1 << hi) ^ (1 << lo), s_idx, 1.0)
            elif bi == 0 and bj == 1:
                add(s_idx ^ (1 << hi) ^ (1 << lo), s_idx, q)
        b1 = (s_idx >> (L - 1)) & 1
        add(s_idx ^ (1 << (L - 1)), s_idx, ga if b1 else al)
        bL = s_idx & 1
        add(s_idx ^ 1, s_idx, be if bL else de)

    rows.extend(range(dim))
    cols.extend(range(dim))
    vals.extend(diag)
    G = sp.csc_matrix((vals, (rows, cols)), shape=(dim, dim))
    colsum = np.abs(np.asarray(G.sum(axis=0))).max()
    if colsum > 1e-13:
        raise AssertionError(f"column sums not zero: {colsum}")
    return MarkovGenerator(L=L, matrix=G, rates=rates)


def _kernel_dense(G: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eig(G)
    order = np.argsort(np.abs(w))
    if len(w) > 1 and abs(w[order[1]]) < 1e-10:
        raise RuntimeError("kernel dimension > 1: generator not irreducible")
    vec = np.real(V[:, order[0]])
    return vec


def stationary_distribution(g: MarkovGenerator) -> StationaryDistribution:
    """Normalized kernel vector of the generator.

    Shift-inverted Arnoldi on the sparse matrix (target 0 via a small
    negative shift, safely off the singular point), dense eigensolve
    fallback for L <= 8.
    """
    dim = 2**g.L
    vec = None
    if dim >= 4:
        try:
            w, V = spla.eigs(g.matrix, k=2, sigma=-1e-8, which="LM")
            order = np.argsort(np.abs(w))
            if abs(w[order[1]]) < 1e-10:
                raise RuntimeError("kernel dimension > 1: generator not irreducible")
            cand = np.real(V[:, order[0]])
            if np.abs(g.matrix @ cand).max() <= 1e-12 * np.abs(cand).sum():
                vec = cand
        except RuntimeError:
            raise
        except Exception:
            vec = None
    if vec is None:
        if g.L > 8:
            raise RuntimeError("sparse solve failed and L > 8 (no dense fallback)")
        vec = _kernel_dense(g.matrix.toarray())
    vec = vec * np.sign(vec.sum())
    if vec.min() < -1e-12 * vec.max():
        raise RuntimeError(f"kernel vector not nonnegative (min {vec.min()})")
    vec = np.clip(vec, 0.0, None)
    vec /= vec.sum()
    resid = np.abs(g.matrix @ vec).max()
    if resid >= 1e-12:
        raise RuntimeError(f"kernel residual {resid} >= 1e-12")
    words = _state_bits(g.L)
    return StationaryDistribution(
        probs={tuple(int(b) for b in words[i]): float(vec[i]) for i in range(dim)}
    )


def oracle_observables(sd: StationaryDistribution, rates: ASEPRates) -> Observables:
    """Site densities, two-point functions, and the (unique) current.

    The current is computed on every bulk bond and from both boundary
    fluxes; stationarity forces all routes to one value, asserted to 1e-12.
    """
    L = sd.L
    q = rates.q.q
    words = _state_bits(L)
    p = np.array([sd.probs[tuple(int(b) for b in w)] for w in words])
    B = words.astype(float)
    dens = B.T @ p
    two_mat = B.T @ (p[:, None] * B)
    currents = []
    for i in range(L - 1):
        flow = B[:, i] * (1 - B[:, i + 1]) - q * (1 - B[:, i]) * B[:, i + 1]
        currents.append(float(flow @ p))
    currents.append(float(rates.alpha * (1 - dens[0]) - rates.gamma_r * dens[0]))
    currents.append(float(rates.beta_r * dens[-1] - rates.delta_r * (1 - dens[-1])))
    J = currents[-1]
    spread = max(currents) - min(currents)
    if spread > 1e-12 * max(1.0, abs(J)):
        raise AssertionError(f"current routes disagree by {spread}: {currents}")
    two = {
        (i + 1, j + 1): float(two_mat[i, j])
        for i in range(L)
        for j in range(i + 1, L)
    }
    return Observables(Z_L=1.0, density=tuple(float(x) for x in dens),
                       current=J, two_point=two)


def build_xxz(rates: ASEPRates, L: int, mu: float = 1.0) -> XXZModel:
    """Open XXZ chain similar to the Markov generator.

    Derivation sketch (the diagonal gauge is not constructed, only its
    existence is used): write the generator as a sum of bond and boundary
    2x2 / 4x4 blocks in the occupation basis, conjugate each bond by the
    diagonal q^{1/4}-weighted similarity that symmetrizes the hop rates
    (1, q) -> (sqrt q, sqrt q), and identify the result with the symmetric
    bulk Hamiltonian at argument -1/s, s = sqrt(q), shifted by
    (L-1)(s+1/s)/2 per the bond identity count.  The boundary blocks pick
    up the free one-parameter family mu of residual diagonal gauge, with
    site-L entries dressed by s^{+-(L-1)} from the accumulated bond weights.
    The similarity gives Gamma = -s U^{-1} H U, so spectra satisfy
    spec(Gamma) = spec(-s H) for every mu.
    """
    if not 2 <= L <= 12:
        raise ValueError("L must be in 2..12")
    if mu == 0:
        raise ValueError("mu must be nonzero")
    s = rates.q.sqrt_q
    al, be, ga, de = rates.alpha, rates.beta_r, rates.gamma_r, rates.delta_r
    eye = np.eye(2**L)
    H_bulk = _sc.uq_symmetric_xxz(-1.0 / s, L) + (L - 1) * (s + 1 / s) / 2 * eye
    B1 = (
        (al + ga) * eye
        + (al - ga) * _sc.site_op(_sc.SZ, 0, L)
        - 2 * al * mu * _sc.site_op(_sc.SM, 0, L)
        - 2 * ga / mu * _sc.site_op(_sc.SP, 0, L)
    ) / (2 * s)
    BL = (
        (be + de) * eye
        - (be - de) * _sc.site_op(_sc.SZ, L - 1, L)
        - 2 * de * mu * s ** (L - 1) * _sc.site_op(_sc.SM, L - 1, L)
        - 2 * be / mu * s ** (-(L - 1)) * _sc.site_op(_sc.SP, L - 1, L)
    ) / (2 * s)
    H = H_bulk + B1 + BL
    return XXZModel(
        L=L,
        H=H,
        H_bulk=H_bulk,
        B1=B1,
        BL=BL,
        Delta_q=(s + 1 / s) / 2,
        h_field=(s - 1 / s) / 2,
        mu=mu,
    )


def spectrum_compare(g: MarkovGenerator, m: XXZModel) -> float:
    """Optimal-matching distance between spec(Gamma) and spec(-s H)."""
    if g.L != m.L:
        raise ValueError("generator and chain have different L")
    s = g.rates.q.sqrt_q
    ev_g = np.linalg.eigvals(g.matrix.toarray())
    ev_h = -s * np.linalg.eigvals(m.H)
    cost = np.abs(ev_g[:, None] - ev_h[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
