"""Askey-Wilson tridiagonal pairs: construction, structure constants, residuals.

Two constructions are provided: the coideal combination built on an affine
representation (:func:`build_coideal_ops`) and the polynomial basic
representation (:func:`build_basic_representation`, tridiagonal-times-x
against a diagonal q-difference operator).  Structure constants come either
from closed forms (:func:`coideal_structure_constants`) or from an
equilibrated least-squares fit of the defining relations
(:func:`fit_structure_constants`), and every relation check reports a
relative residual so "zero" is always meaningful.

The defining relations in q-commutator form, with ``[X,Y]_q = q^(1/2) XY -
q^(-1/2) YX``:

    [[A,A*]_q, A]_q  = -rho  A* - omega A  - eta,
    [A*,[A,A*]_q]_q  = -rho* A  - omega A* - eta*.

The long (printed) form adds anticommutator terms with coefficients gamma,
gamma*; the reduced form has gamma = gamma* = 0.  Truncated pairs (basic
representation) are checked on a leading interior block whose margin is
computed from word length x bandwidths in one place
(:func:`truncation_margin`); everything downstream relies on that formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .qspecial import AWParams, QParams, dual_eigenvalue, recurrence_coeffs
from .quantumrep import ChevalleyRep, CoidealParams, _coideal_matrices

__all__ = [
    "AWStructure",
    "TridiagonalPair",
    "QCommutator",
    "DegenerateFitError",
    "q_commutator",
    "build_coideal_ops",
    "coideal_structure_constants",
    "recover_l_v0",
    "fit_structure_constants",
    "aw_residual",
    "tridiagonal_residual",
    "affine_transform",
    "build_basic_representation",
    "truncation_margin",
]


class DegenerateFitError(ValueError):
    """Raised when the structure-constant design matrix is rank deficient."""


@dataclass(frozen=True)
class AWStructure:
    """Scalars of the algebra relations.

    ``beta_aw`` is the q-commutator coefficient q + q^{-1}; the reduced form
    has ``gamma = gamma_star = 0``.
    """

    beta_aw: complex
    rho: complex
    rho_star: complex
    omega: complex
    eta: complex
    eta_star: complex
    gamma: complex = 0.0
    gamma_star: complex = 0.0


def _measured_bandwidth(M: np.ndarray) -> int:
    idx = np.nonzero(M)
    if idx[0].size == 0:
        return 0
    return int(np.max(np.abs(idx[0] - idx[1])))


@dataclass
class TridiagonalPair:
    """A pair of banded operators with declared bandwidths.

    ``exact_dim`` is set when the matrices are an exact finite-dimensional
    representation; ``None`` marks a truncation of an infinite matrix, in
    which case residual checks restrict to a leading interior block.
    The declared bandwidths must be upper bounds: entries beyond the band
    are required to be exactly zero.
    """

    A: np.ndarray
    A_star: np.ndarray
    bandwidth_A: int
    bandwidth_Astar: int
    q: QParams
    exact_dim: Optional[int] = None

    def __post_init__(self) -> None:
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.A_star.shape != (n, n):
            raise ValueError("A and A_star must be square and equally sized")
        for M, bw, name in (
            (self.A, self.bandwidth_A, "A"),
            (self.A_star, self.bandwidth_Astar, "A_star"),
        ):
            if _measured_bandwidth(M) > bw:
                raise ValueError(f"{name} has entries beyond declared bandwidth {bw}")

    @property
    def dim(self) -> int:
        return self.A.shape[0]


def q_commutator(X: np.ndarray, Y: np.ndarray, qp: QParams) -> np.ndarray:
    """q^{1/2} XY - q^{-1/2} YX."""
    return qp.sqrt_q * X @ Y - qp.inv_sqrt_q * Y @ X


@dataclass(frozen=True)
class QCommutator:
    """Value type holding [A, A*]_q of a pair."""

    matrix: np.ndarray

    @classmethod
    def of_pair(cls, pair: TridiagonalPair) -> "QCommutator":
        return cls(q_commutator(pair.A, pair.A_star, pair.q))


def truncation_margin(pair: TridiagonalPair, word: Literal["cubic", "quartic"]) -> int:
    """Rows/columns to drop so interior entries of relation words are exact.

    A truncated banded matrix product is wrong only within (sum of word
    bandwidths) of the truncation edge; the margins below over-cover every
    word appearing in the respective relation:

    * ``cubic``  (defining relations, words like A A* A):
      2 (bw_A + bw_A*) + max(bw_A, bw_A*);
    * ``quartic`` (commutator form, words like A^2 A* A):
      3 (bw_A + bw_A*).
    """
    ba, bs = pair.bandwidth_A, pair.bandwidth_Astar
    if word == "cubic":
        return 2 * (ba + bs) + max(ba, bs)
    if word == "quartic":
        return 3 * (ba + bs)
    raise ValueError(f"unknown word class {word!r}")


def _interior(M: np.ndarray, m: int) -> np.ndarray:
    if m == 0:
        return M
    if M.shape[0] <= m:
        raise ValueError("matrix too small for requested truncation margin")
    return M[: M.shape[0] - m, : M.shape[0] - m]


def _rel_norm(residual: np.ndarray, *terms: np.ndarray) -> float:
    scale = max([np.linalg.norm(t) for t in terms] + [1e-300])
    return float(np.linalg.norm(residual) / scale)


def build_coideal_ops(rep: ChevalleyRep, cp: CoidealParams) -> TridiagonalPair:
    """Coideal pair on an affine representation.

    A  = u E0~+ q^{-H0/2} + v E0~- q^{-H0/2} + k  q^{-H0},
    A* = u* E1~+ q^{-H1/2} + v* E1~- q^{-H1/2} + k* q^{-H1},

    with E~+- the generators rescaled by +-(q^{1/2} - q^{-1/2}) — that
    rescaling happens here (via the private helper) and nowhere else.
    ``exact_dim`` is set to the representation dimension.
    """
    A, As = _coideal_matrices(rep, cp)
    return TridiagonalPair(
        A=A,
        A_star=As,
        bandwidth_A=_measured_bandwidth(A),
        bandwidth_Astar=_measured_bandwidth(As),
        q=rep.qp,
        exact_dim=rep.dim,
    )


def coideal_structure_constants(
    cp: CoidealParams, l_v0: complex, qp: QParams
) -> AWStructure:
    """Closed-form structure constants of the coideal pair.

    ``l_v0`` is the representation-dependent scalar; on an irreducible
    spin-j module it equals (q^{1/2}-q^{-1/2})^2 times the Casimir scalar,
    i.e. q^{j+1/2} + q^{-j-1/2}, but callers normally *fit* it
    (:func:`recover_l_v0`) rather than assume irreducibility.
    """
    lam, qm = qp.lam, qp.qm
    G = cp.u * cp.u_star * qp.sqrt_q + cp.v * cp.v_star * qp.inv_sqrt_q
    return AWStructure(
        beta_aw=qp.q + 1.0 / qp.q,
        rho=-cp.u * cp.v * qm**2,
        rho_star=-cp.u_star * cp.v_star * qm**2,
        omega=-(lam**2) * (cp.k * cp.k_star + l_v0 * G),
        eta=qm * lam * (cp.k * G + l_v0 * cp.u * cp.v * cp.k_star),
        eta_star=qm * lam * (cp.k_star * G + l_v0 * cp.u_star * cp.v_star * cp.k),
    )


def recover_l_v0(cp: CoidealParams, fitted: AWStructure, qp: QParams) -> complex:
    """Invert the omega (or, failing that, eta) closed form for l_v0."""
    lam, qm = qp.lam, qp.qm
    G = cp.u * cp.u_star * qp.sqrt_q + cp.v * cp.v_star * qp.inv_sqrt_q
    if abs(G) > 1e-12:
        return (-fitted.omega / lam**2 - cp.k * cp.k_star) / G
    denom = cp.u * cp.v * cp.k_star
    if abs(denom) > 1e-12:
        return (fitted.eta / (qm * lam) - cp.k * G) / denom
    raise DegenerateFitError("l_v0 not recoverable: G and u v k* both vanish")


def _relation_words(pair: TridiagonalPair):
    A, As, qp = pair.A, pair.A_star, pair.q
    C = q_commutator(A, As, qp)
    M1 = q_commutator(C, A, qp)  # [[A,A*]_q, A]_q
    M2 = qp.sqrt_q * As @ C - qp.inv_sqrt_q * C @ As  # [A*, [A,A*]_q]_q
    return M1, M2


def _error_envelope(W: np.ndarray, bw: int, window: int = 3) -> np.ndarray:
    """Per-entry absolute-error scale of a banded matrix of magnitudes W.

    Entry (i, j) gets the largest magnitude found in W within ``window`` rows
    of i or j, restricted to the declared band (off-band entries are exact
    zeros and get no error).  The window forgives cancellation: an entry much
    smaller than its neighbours was plausibly computed from ingredients of
    neighbour size, so its absolute error is eps times the envelope, not eps
    times itself.
    """
    n = W.shape[0]
    row_max = np.max(W, axis=1)
    col_max = np.max(W, axis=0)
    local = np.maximum(row_max, col_max)
    env = np.array(
        [np.max(local[max(0, i - window) : min(n, i + window + 1)]) for i in range(n)]
    )
    i, j = np.indices((n, n))
    out = np.maximum(env[i], env[j])
    out[np.abs(i - j) > bw] = 0.0
    return out


def _word_noise(
    Wx: np.ndarray, Wy: np.ndarray, Ex: np.ndarray, Ey: np.ndarray, bp: float
) -> np.ndarray:
    """Propagated error bound for bp·X Y X − X² Y − Y X² entry magnitudes."""
    t1 = Ex @ Wy @ Wx + Wx @ Ey @ Wx + Wx @ Wy @ Ex
    t2 = Ex @ Wx @ Wy + Wx @ Ex @ Wy + Wx @ Wx @ Ey
    t3 = Ey @ Wx @ Wx + Wy @ Ex @ Wx + Wy @ Wx @ Ex
    return bp * t1 + t2 + t3


def fit_structure_constants(
    pair: TridiagonalPair, form: Literal["reduced", "full"] = "reduced"
) -> tuple[AWStructure, float]:
    """Least-squares fit of the structure constants from the pair itself.

    ``reduced`` fits (rho, omega, eta) from the first q-commutator relation
    and (rho*, omega', eta*) from the second, then asserts omega = omega'
    (within 1e-8) whenever the residual is small.  ``full`` adds the
    anticommutator and square columns (coefficients gamma, gamma*), which is
    required after affine shifts of the pair.

    Rows of the design matrix are equilibrated to unit max-modulus before
    solving; the basic representation's entries span a dynamic range like
    q^{-2n} and an unequilibrated fit loses the small rows entirely.
    Returns (structure, fit_residual) where fit_residual is the largest
    relative post-fit residual of the two relations.

    Raises :class:`DegenerateFitError` when the design matrix is rank
    deficient (e.g. A* proportional to the identity).
    """
    m = 0 if pair.exact_dim is not None else truncation_margin(pair, "cubic")
    A = _interior(pair.A, m)
    As = _interior(pair.A_star, m)
    n = A.shape[0]
    eye = np.eye(n)
    M1_f, M2_f = _relation_words(pair)
    M1 = _interior(M1_f, m)
    M2 = _interior(M2_f, m)

    # First-order roundoff estimate for the relation words.  Each stored
    # entry of A (resp. A*) carries an absolute error ~ eps times the size
    # of the ingredients it was computed from; we bound that by eps times a
    # local sliding-window envelope of the matrix itself.  This matters for
    # the basic representation, where the diagonal of A cancels down to
    # O(q^n) from O(1) ingredients, and the O(eps) absolute error is then
    # amplified by the q^{-n} growth of A* — deep off-diagonal equations
    # are pure noise in double precision and must not enter the fit.
    Wa, Ws = np.abs(A), np.abs(As)
    EA = 1e-16 * _error_envelope(Wa, pair.bandwidth_A)
    ES = 1e-16 * _error_envelope(Ws, pair.bandwidth_Astar)
    bp2 = pair.q.q + 1.0 / pair.q.q
    noise1 = _word_noise(Wa, Ws, EA, ES, bp2)
    noise2 = _word_noise(Ws, Wa, ES, EA, bp2)

    if form == "reduced":
        cols1 = [As, A, eye]
        cols2 = [A, As, eye]
    elif form == "full":
        anti = A @ As + As @ A
        cols1 = [As, A, eye, anti, A @ A]
        cols2 = [A, As, eye, anti, As @ As]
    else:
        raise ValueError(f"unknown fit form {form!r}")

    def solve(cols, target, noise_mat):
        D = np.stack([c.ravel() for c in cols], axis=1)
        t = target.ravel()
        scale = np.maximum(np.max(np.abs(D), axis=1), np.abs(t))
        noise = noise_mat.ravel()
        # keep a row only if (a) the design has support there — targets at
        # structural zeros are pure cancellation noise — and (b) its relative
        # noise floor leaves at least ~1e-10 of signal after equilibration
        keep = (np.max(np.abs(D), axis=1) > 0.0) & (noise <= 1e-10 * scale)
        if not np.any(keep):
            raise DegenerateFitError("no numerically trustworthy rows to fit")
        D = D[keep] / scale[keep, None]
        t2 = t[keep] / scale[keep]
        sv = np.linalg.svd(D, compute_uv=False)
        if sv.size < len(cols) or sv[-1] < sv[0] * 1e-13:
            raise DegenerateFitError(
                "design matrix rank deficient; pair does not determine constants"
            )
        x, *_ = np.linalg.lstsq(D, t2, rcond=None)
        # relative residual of the kept (equilibrated) equations
        r = np.linalg.norm(D @ x - t2) / max(np.linalg.norm(t2), 1e-300)
        return x, float(r)

    x1, r1 = solve(cols1, -M1, noise1)
    x2, r2 = solve(cols2, -M2, noise2)
    if form == "reduced":
        rho, omega, eta = x1
        rho_star, omega2, eta_star = x2
        gamma = gamma_star = 0.0
    else:
        rho, omega, eta, gamma, gamma_star = x1
        rho_star, omega2, eta_star, gs2, g2 = x2

    res = max(r1, r2)
    if res < 1e-6 and abs(omega - omega2) > 1e-8 * max(1.0, abs(omega)):
        raise RuntimeError(
            f"omega mismatch between the two relations: {omega} vs {omega2}"
        )
    s = AWStructure(
        beta_aw=pair.q.q + 1.0 / pair.q.q,
        rho=rho,
        rho_star=rho_star,
        omega=0.5 * (omega + omega2),
        eta=eta,
        eta_star=eta_star,
        gamma=gamma,
        gamma_star=gamma_star,
    )
    return s, res


def _entrywise_rel(R: np.ndarray, scale: np.ndarray, m: int) -> float:
    Ri = _interior(R, m)
    Si = _interior(scale, m)
    out = np.zeros_like(Ri, dtype=float)
    mask = Si > 0
    out[mask] = np.abs(Ri[mask]) / Si[mask]
    # entries with zero scale are structural zeros of every word; any value
    # there is a hard error, so compare against the global scale instead
    if np.any(~mask):
        glob = max(float(np.max(Si)), 1e-300)
        out[~mask] = np.abs(Ri[~mask]) / glob
    return float(np.max(out)) if out.size else 0.0


def _abs_word_scales(pair: TridiagonalPair, s: AWStructure):
    """Per-entry magnitude of everything summed in each relation.

    Mirrors the actual computation graph of :func:`_relation_words` with
    every entry and coefficient replaced by its modulus, so an entry of the
    residual divided by this scale is a genuine relative error of the
    floating-point evaluation: for truncated pairs the words grow like
    q^{-2n} with depth while the relation value only grows like q^{-n}, and
    a single global norm would both hide deep-entry violations and flag
    benign deep-entry roundoff.
    """
    Wa, Ws = np.abs(pair.A), np.abs(pair.A_star)
    eye = np.eye(pair.dim)
    bp = pair.q.q + 1.0 / pair.q.q
    sq, isq = pair.q.sqrt_q, pair.q.inv_sqrt_q
    Cabs = sq * Wa @ Ws + isq * Ws @ Wa
    W1 = sq * Cabs @ Wa + isq * Wa @ Cabs
    W2 = sq * Ws @ Cabs + isq * Cabs @ Ws
    anti = Wa @ Ws + Ws @ Wa
    S1 = (
        W1
        + abs(s.rho) * Ws
        + abs(s.omega) * Wa
        + abs(s.eta) * eye
        + abs(s.gamma) * anti
        + abs(s.gamma_star) * Wa @ Wa
    )
    S2 = (
        W2
        + abs(s.rho_star) * Wa
        + abs(s.omega) * Ws
        + abs(s.eta_star) * eye
        + abs(s.gamma_star) * anti
        + abs(s.gamma) * Ws @ Ws
    )
    return S1, S2


def aw_residual(pair: TridiagonalPair, s: AWStructure) -> tuple[float, float]:
    """Relative residuals of the two defining relations.

    Each residual is the max-norm of the relation matrix scaled entrywise by
    the total magnitude of the terms summed there (absolute-value words), so
    the value is meaningful down to the roundoff floor even when the pair's
    entries span many orders of magnitude.  Truncated pairs are evaluated on
    the leading interior block with the cubic-word margin; exact pairs on
    the full matrix.
    """
    m = 0 if pair.exact_dim is not None else truncation_margin(pair, "cubic")
    A, As = pair.A, pair.A_star
    eye = np.eye(pair.dim)
    M1, M2 = _relation_words(pair)
    anti = A @ As + As @ A
    R1 = (
        M1
        + s.rho * As
        + s.omega * A
        + s.eta * eye
        + s.gamma * anti
        + s.gamma_star * A @ A
    )
    R2 = (
        M2
        + s.rho_star * A
        + s.omega * As
        + s.eta_star * eye
        + s.gamma_star * anti
        + s.gamma * As @ As
    )
    S1, S2 = _abs_word_scales(pair, s)
    return _entrywise_rel(R1, S1, m), _entrywise_rel(R2, S2, m)


def tridiagonal_residual(pair: TridiagonalPair, s: AWStructure) -> tuple[float, float]:
    """Residuals of the commutator (hidden-symmetry) form of the relations.

    [A, beta A A* A - A^2 A* - A* A^2 + gamma {A,A*} + rho A*] = 0 and the
    starred partner.  These follow from the defining relations by taking one
    more commutator, so any pair passing :func:`aw_residual` passes here;
    the margin is the quartic one and the scaling entrywise, as in
    :func:`aw_residual`.
    """
    m = 0 if pair.exact_dim is not None else truncation_margin(pair, "quartic")
    A, As = pair.A, pair.A_star
    Wa, Ws = np.abs(A), np.abs(As)
    M1, M2 = _relation_words(pair)
    anti = A @ As + As @ A
    B1 = -M1 - s.gamma * anti - s.rho * As
    B2 = -M2 - s.gamma_star * anti - s.rho_star * A
    T1 = A @ B1 - B1 @ A
    T2 = As @ B2 - B2 @ As
    S1c, S2c = _abs_word_scales(pair, s)
    S1 = Wa @ S1c + S1c @ Wa
    S2 = Ws @ S2c + S2c @ Ws
    return _entrywise_rel(T1, S1, m), _entrywise_rel(T2, S2, m)


def affine_transform(
    pair: TridiagonalPair,
    t: complex,
    t_star: complex,
    c_prime: complex = 0.0,
    c_star: complex = 0.0,
) -> TridiagonalPair:
    """A -> t A + c' I, A* -> t* A* + c* I.  Bandwidth bounds are unchanged.

    Useful facts (tested, not enforced): rescaling A* by sqrt(rho/rho*)
    equalizes the two rho constants; a diagonal shift changes omega, eta,
    eta* (and, in the long form, generates gamma terms) but never rho, rho*.
    """
    eye = np.eye(pair.dim)
    return TridiagonalPair(
        A=t * pair.A + c_prime * eye,
        A_star=t_star * pair.A_star + c_star * eye,
        bandwidth_A=pair.bandwidth_A,
        bandwidth_Astar=pair.bandwidth_Astar,
        q=pair.q,
        exact_dim=pair.exact_dim,
    )


def build_basic_representation(N: int, p: AWParams) -> TridiagonalPair:
    """Truncation of the polynomial-basis pair: A tridiagonal, A* diagonal.

    A is the multiplication-by-(y + 1/y) matrix in the polynomial basis,
    column n carrying (c_n above, a_n on, b_n below the diagonal); A* is
    diag(q^{-n} + a b c d q^{n-1}).  The pair is a truncation
    (``exact_dim=None``), so residual checks use interior blocks.
    """
    if N < 1:
        raise ValueError("N must be positive")
    coeffs = [recurrence_coeffs(n, p) for n in range(N)]
    dtype = np.result_type(*[np.result_type(*c) for c in coeffs], float)
    A = np.zeros((N, N), dtype=dtype)
    for n, (a_n, b_n, c_n) in enumerate(coeffs):
        A[n, n] = a_n
        if n + 1 < N:
            A[n + 1, n] = b_n
        if n >= 1:
            A[n - 1, n] = c_n
    As = np.diag(np.array([dual_eigenvalue(n, p) for n in range(N)], dtype=dtype))
    return TridiagonalPair(
        A=A, A_star=As, bandwidth_A=1, bandwidth_Astar=0, q=p.qp, exact_dim=None
    )
