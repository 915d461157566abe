"""Finite-dimensional U_q(su(2)) representations and level-zero evaluation
representations of the quantum affine algebra.

Conventions used project-wide:

* the symmetric q-number ``[x] = (q^(x/2) - q^(-x/2)) / (q^(1/2) - q^(-1/2))``;
* spin-j weight basis ordered top down, ``N = diag(j, j-1, ..., -j)``;
* raising entries ``(A+)_{m+1,m} = sqrt([j-m][j+m+1])``, which makes
  ``[N, A+-] = +-A+-`` and ``[A+, A-] = (q^N - q^-N)/(q^(1/2)-q^(-1/2))``
  hold exactly;
* tensor products use the Kronecker convention (first factor = slow index).

The Casimir is taken in the form ``Q = A+ A- + (q^(N-1/2) + q^(-N+1/2)) /
(q^(1/2)-q^(-1/2))^2``.  The variant with a relative minus sign between the
two ``q^(+-(N-1/2))`` terms is *not* central already on the two-dimensional
representation, so the plus combination is the one used everywhere (the
helper :func:`casimir_centrality_residuals` exposes both for auditing).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qspecial import QParams, q_number

__all__ = [
    "SpinRep",
    "ChevalleyRep",
    "CoidealParams",
    "build_spin_rep",
    "casimir_value",
    "casimir_centrality_residuals",
    "build_evaluation_rep",
    "chevalley_relation_residual",
    "qserre_residual",
    "qserre_residual_both_signs",
    "coproduct_coideal_residual",
]


def _rel(diff: np.ndarray, *refs: np.ndarray) -> float:
    scale = max([np.linalg.norm(r) for r in refs] + [1e-300])
    return float(np.linalg.norm(diff) / scale)


@dataclass
class SpinRep:
    """Spin-j irreducible representation data.  dim = j_twice + 1."""

    dim: int
    j_twice: int
    qp: QParams
    Aplus: np.ndarray
    Aminus: np.ndarray
    qN_pos: np.ndarray  # q^{+N}
    qN_neg: np.ndarray  # q^{-N}

    @property
    def n_diag(self) -> np.ndarray:
        j = 0.5 * self.j_twice
        return j - np.arange(self.dim)

    @property
    def qN_half(self) -> np.ndarray:
        """q^{N/2} (diagonal, positive)."""
        return np.diag(np.sqrt(np.diag(self.qN_pos)))

    @property
    def qN_neg_half(self) -> np.ndarray:
        return np.diag(1.0 / np.sqrt(np.diag(self.qN_pos)))


def build_spin_rep(j_twice: int, qp: QParams) -> SpinRep:
    """Standard spin-j matrices deformed so the q-commutation relations are exact."""
    if j_twice < 0:
        raise ValueError("j_twice must be nonnegative")
    dim = j_twice + 1
    j = 0.5 * j_twice
    m = j - np.arange(dim)  # weights, top down
    Ap = np.zeros((dim, dim))
    for i in range(1, dim):
        # raises e_i (weight m[i]) to e_{i-1} (weight m[i]+1)
        Ap[i - 1, i] = np.sqrt(q_number(j - m[i], qp) * q_number(j + m[i] + 1, qp))
    Am = Ap.T.copy()
    qN = np.diag(qp.q**m)
    return SpinRep(dim, j_twice, qp, Ap, Am, qN, np.diag(qp.q**-m))


def casimir_value(rep: SpinRep) -> float:
    """Scalar by which the central element acts on an irreducible SpinRep.

    Computed as the (0,0) entry of ``A+ A- + (q^(N-1/2)+q^(-N+1/2))/lam^2``;
    the full matrix is asserted to be that scalar times the identity to
    1e-10, so a convention drift anywhere upstream fails loudly here.
    """
    qp = rep.qp
    lam2 = qp.lam**2
    nm = rep.n_diag - 0.5
    Q = rep.Aplus @ rep.Aminus + np.diag((qp.q**nm + qp.q**-nm) / lam2)
    val = Q[0, 0]
    if not np.allclose(Q, val * np.eye(rep.dim), atol=1e-10 * max(1.0, abs(val))):
        raise RuntimeError("Casimir matrix is not scalar: convention error upstream")
    return float(val)


def casimir_centrality_residuals(rep: SpinRep) -> tuple[float, float]:
    """Commutator norms ``[Q, A+]`` for the plus- and minus-sign Casimir forms.

    The first residual (plus combination, the form used by
    :func:`casimir_value`) is machine zero; the second shows the minus
    combination failing centrality.  Kept as an explicit audit hook.
    """
    qp = rep.qp
    lam2 = qp.lam**2
    nm = rep.n_diag - 0.5
    out = []
    for sign in (+1.0, -1.0):
        Q = rep.Aplus @ rep.Aminus + np.diag((qp.q**nm + sign * qp.q**-nm) / lam2)
        out.append(_rel(Q @ rep.Aplus - rep.Aplus @ Q, Q @ rep.Aplus))
    return out[0], out[1]


@dataclass
class ChevalleyRep:
    """Images of the affine generators E_i^+-, q^{H_i} on one space.

    ``level`` is the central charge (0 for evaluation representations), and
    ``nu`` the spectral parameter when applicable.
    """

    dim: int
    qp: QParams
    E0p: np.ndarray
    E0m: np.ndarray
    E1p: np.ndarray
    E1m: np.ndarray
    qH0: np.ndarray
    qH1: np.ndarray
    level: int = 0
    nu: Optional[complex] = None

    def qh_half(self, i: int, sign: int) -> np.ndarray:
        """Diagonal q^{+-H_i/2} (the qH_i are positive diagonal here)."""
        qh = self.qH0 if i == 0 else self.qH1
        root = np.sqrt(np.diag(qh))
        return np.diag(root if sign > 0 else 1.0 / root)


def build_evaluation_rep(nu: complex, base: SpinRep) -> ChevalleyRep:
    """Level-zero representation: E1+- act as A+-, E0+- as nu^{+-1} A-+."""
    return ChevalleyRep(
        dim=base.dim,
        qp=base.qp,
        E0p=nu * base.Aminus,
        E0m=(1.0 / nu) * base.Aplus,
        E1p=base.Aplus.astype(complex),
        E1m=base.Aminus.astype(complex),
        qH0=base.qN_neg,
        qH1=base.qN_pos,
        level=0,
        nu=nu,
    )


def chevalley_relation_residual(rep: ChevalleyRep) -> float:
    """Max relative residual of the defining relations.

    Checked: q^{H_i} E_j^+- q^{-H_i} = q^{+-e} E_j^+- with e = +1 for i = j
    and -1 for i != j; [E_i^+, E_i^-] = (q^{H_i} - q^{-H_i}) / (q^{1/2} -
    q^{-1/2}); [E_0^+, E_1^-] = [E_1^+, E_0^-] = 0; and the level relation
    q^{H_0} q^{H_1} = q^{level} I.
    """
    q = rep.qp.q
    lam = rep.qp.lam
    H = {0: rep.qH0, 1: rep.qH1}
    Hi = {0: np.diag(1.0 / np.diag(rep.qH0)), 1: np.diag(1.0 / np.diag(rep.qH1))}
    E = {(0, +1): rep.E0p, (0, -1): rep.E0m, (1, +1): rep.E1p, (1, -1): rep.E1m}
    rs = []
    for i in (0, 1):
        for j in (0, 1):
            for sg in (+1, -1):
                fac = q**sg if i == j else q**-sg
                rs.append(_rel(H[i] @ E[(j, sg)] @ Hi[i] - fac * E[(j, sg)], E[(j, sg)]))
    for i in (0, 1):
        lhs = E[(i, 1)] @ E[(i, -1)] - E[(i, -1)] @ E[(i, 1)]
        rhs = (H[i] - Hi[i]) / lam
        rs.append(_rel(lhs - rhs, lhs, rhs))
    rs.append(_rel(rep.E0p @ rep.E1m - rep.E1m @ rep.E0p, rep.E0p @ rep.E1m))
    rs.append(_rel(rep.E1p @ rep.E0m - rep.E0m @ rep.E1p, rep.E1p @ rep.E0m))
    rs.append(
        _rel(rep.qH0 @ rep.qH1 - q**rep.level * np.eye(rep.dim), np.eye(rep.dim))
    )
    return max(rs)


def _serre_combo(X: np.ndarray, Y: np.ndarray, three: float, last_sign: float):
    X2 = X @ X
    X3 = X2 @ X
    return X3 @ Y - three * X2 @ Y @ X + three * X @ Y @ X2 + last_sign * Y @ X3


def qserre_residual(rep: ChevalleyRep, last_sign: float = -1.0) -> float:
    """Relative residual of the cubic Serre relations between the two nodes.

    The relation is ``X^3 Y - [3] X^2 Y X + [3] X Y X^2 - Y X^3 = 0`` for
    X = E_i^s, Y = E_j^s, i != j.  The sign of the final term is exposed
    because it is the one typographically fragile spot; the alternating
    (-1) choice is the one annihilated by evaluation representations (see
    :func:`qserre_residual_both_signs` for the comparison).
    """
    three = q_number(3.0, rep.qp)
    E = {(0, +1): rep.E0p, (0, -1): rep.E0m, (1, +1): rep.E1p, (1, -1): rep.E1m}
    worst = 0.0
    for i, j in ((0, 1), (1, 0)):
        for sg in (+1, -1):
            X, Y = E[(i, sg)], E[(j, sg)]
            combo = _serre_combo(X, Y, three, last_sign)
            scale = max(np.linalg.norm(X) ** 3 * np.linalg.norm(Y), 1e-300)
            worst = max(worst, float(np.linalg.norm(combo) / scale))
    return worst


def qserre_residual_both_signs(rep: ChevalleyRep) -> dict:
    """Residuals for both choices of the final-term sign (audit hook)."""
    return {
        "minus": qserre_residual(rep, -1.0),
        "plus": qserre_residual(rep, +1.0),
    }


@dataclass(frozen=True)
class CoidealParams:
    """Free scalars (u, u*, v, v*, k, k*) of the coideal combination."""

    u: complex
    u_star: complex
    v: complex
    v_star: complex
    k: complex
    k_star: complex


def dress_params(cp: CoidealParams, nu: complex) -> CoidealParams:
    """Absorb the spectral parameter into (u, v): u -> u nu, v -> v / nu.

    With this dressing the abstract structure-constant formulas apply
    verbatim to pairs built on an evaluation representation at parameter nu.
    """
    return CoidealParams(cp.u * nu, cp.u_star, cp.v / nu, cp.v_star, cp.k, cp.k_star)


def _coideal_matrices(
    rep: ChevalleyRep, cp: CoidealParams, _rescale: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """The pair (A, A*) as matrices on the representation space.

    A  = u E0~+ q^{-H0/2} + v E0~- q^{-H0/2} + k q^{-H0},
    A* = u* E1~+ q^{-H1/2} + v* E1~- q^{-H1/2} + k* q^{-H1},

    where E~+- = +-(q^(1/2)-q^(-1/2)) E+- is the rescaled generator.  This is
    the single place in the code base where that rescaling is applied
    (``_rescale`` exists only so a unit test can toggle it and watch the
    closed algebra fail).
    """
    lam = rep.qp.lam if _rescale else 1.0
    h0 = rep.qh_half(0, -1)
    h1 = rep.qh_half(1, -1)
    A = (
        cp.u * lam * rep.E0p @ h0
        - cp.v * lam * rep.E0m @ h0
        + cp.k * (h0 @ h0)
    )
    As = (
        cp.u_star * lam * rep.E1p @ h1
        - cp.v_star * lam * rep.E1m @ h1
        + cp.k_star * (h1 @ h1)
    )
    return A, As


def _sym_coproduct(rep1: ChevalleyRep, rep2: ChevalleyRep) -> ChevalleyRep:
    """Tensor-product representation via the symmetric coproduct.

    Delta(E_i^+-) = E_i^+- x q^{-H_i/2} + q^{H_i/2} x E_i^+-,
    Delta(q^{H_i}) = q^{H_i} x q^{H_i}.
    """

    def dE(Ea, Eb, i):
        return np.kron(Ea, rep2.qh_half(i, -1)) + np.kron(rep1.qh_half(i, +1), Eb)

    return ChevalleyRep(
        dim=rep1.dim * rep2.dim,
        qp=rep1.qp,
        E0p=dE(rep1.E0p, rep2.E0p, 0),
        E0m=dE(rep1.E0m, rep2.E0m, 0),
        E1p=dE(rep1.E1p, rep2.E1p, 1),
        E1m=dE(rep1.E1m, rep2.E1m, 1),
        qH0=np.kron(rep1.qH0, rep2.qH0),
        qH1=np.kron(rep1.qH1, rep2.qH1),
        level=rep1.level + rep2.level,
    )


def coproduct_coideal_residual(
    rep1: ChevalleyRep, rep2: ChevalleyRep, cp: CoidealParams
) -> float:
    """Check that the coideal pair reproduces its own coproduct.

    Builds A (and A*) on rep1 x rep2 two ways: (i) from the coideal
    combination applied to the coproduct images of the generators, and (ii)
    directly as ``I x A + (A - k I) x q^{-H_0}`` (starred version with
    q^{-H_1}).  Returns the larger of the two relative differences; the
    identity is exact, so this is a machine-epsilon quantity when the
    coproduct convention is right.
    """
    if rep1.qp.q != rep2.qp.q:
        raise ValueError("representations must share q")
    big = _sym_coproduct(rep1, rep2)
    A_big, As_big = _coideal_matrices(big, cp)
    A1, As1 = _coideal_matrices(rep1, cp)
    A2, As2 = _coideal_matrices(rep2, cp)
    I1 = np.eye(rep1.dim)
    qH0_inv2 = np.diag(1.0 / np.diag(rep2.qH0))
    qH1_inv2 = np.diag(1.0 / np.diag(rep2.qH1))
    rhs_A = np.kron(I1, A2) + np.kron(A1 - cp.k * I1, qH0_inv2)
    rhs_As = np.kron(I1, As2) + np.kron(As1 - cp.k_star * I1, qH1_inv2)
    return max(_rel(A_big - rhs_A, A_big, rhs_A), _rel(As_big - rhs_As, As_big, rhs_As))
