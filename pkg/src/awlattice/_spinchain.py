"""Shared dense spin-chain constructors (private).

Site 1 is the leftmost tensor factor, i.e. the slowest Kronecker index; the
occupation bit 1 maps to spin-down.  These builders are dense and meant for
desk-scale L (the sparse master-equation generator lives in :mod:`.oracle`).
"""

from __future__ import annotations

import numpy as np

SZ = np.diag([1.0, -1.0])
SP = np.array([[0.0, 1.0], [0.0, 0.0]])  # sigma^+
SM = SP.T.copy()  # sigma^-
I2 = np.eye(2)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def site_op(op: np.ndarray, i: int, L: int) -> np.ndarray:
    """``op`` acting on site i (0-based), identity elsewhere."""
    return kron_all(*([I2] * i), op, *([I2] * (L - 1 - i)))


def uq_symmetric_xxz(p: float, L: int) -> np.ndarray:
    """Quantum-group symmetric open XXZ Hamiltonian at deformation p.

    H(p) = -1/2 sum_i [ sx sx + sy sy + Delta_p sz sz
                        + h_p (sz_{i+1} - sz_i) + Delta_p ]
    with Delta_p = -(p + p^{-1})/2 and h_p = (p - p^{-1})/2.  Valid for any
    nonzero real p (either sign); H(-p) = -U H(p) U^{-1} with the staggered
    gauge of :func:`stagger_u`.
    """
    delta = -(p + 1.0 / p) / 2.0
    h = (p - 1.0 / p) / 2.0
    xxyy = 2.0 * (np.kron(SP, SM) + np.kron(SM, SP))
    bond = (
        xxyy
        + delta * np.kron(SZ, SZ)
        + h * (np.kron(I2, SZ) - np.kron(SZ, I2))
        + delta * np.eye(4)
    )
    dim = 2**L
    H = np.zeros((dim, dim))
    for i in range(L - 1):
        H += kron_all(np.eye(2**i), bond, np.eye(2 ** (L - 2 - i)))
    return -0.5 * H


def stagger_u(L: int) -> np.ndarray:
    """Bond-alternating diagonal gauge U = prod_m diag(i^m, i^-m)."""
    return kron_all(
        *[
            np.diag([np.exp(1j * np.pi * m / 2), np.exp(-1j * np.pi * m / 2)])
            for m in range(1, L + 1)
        ]
    )


def tensor_generators(
    p: float, L: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """L-fold coproduct images of the deformed sl(2) generators.

    Returns (Jp, Jm, pN, pN_half): the raising/lowering sums with
    p^{+sz/4} tails to the left and p^{-sz/4} tails to the right of the
    local sigma^{+-}, and the diagonal weights p^N, p^{N/2}.
    """
    t = np.diag([p**0.25, p**-0.25])
    ti = np.diag([p**-0.25, p**0.25])
    dim = 2**L
    Jp = np.zeros((dim, dim))
    Jm = np.zeros((dim, dim))
    for i in range(L):
        Jp += kron_all(*([t] * i), SP, *([ti] * (L - 1 - i)))
        Jm += kron_all(*([t] * i), SM, *([ti] * (L - 1 - i)))
    pN_half = kron_all(*([t] * L))
    return Jp, Jm, pN_half @ pN_half, pN_half
