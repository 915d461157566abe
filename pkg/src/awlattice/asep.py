"""Open-boundary ASEP stationary states via a matrix-product construction,
boundary tridiagonal-pair algebra, and lattice conserved charges.

The matrix representation of the stationary weights is *bootstrapped* from
its defining invariants rather than transcribed: ``D1 = c1 (I + X)``,
``D0 = c1 (I + Y)`` with ``c1 = sqrt(q)/(1-q)``, where ``X + Y`` equals the
three-term-recurrence Jacobi matrix at the kappa-mapped polynomial
parameters and X is the unique tridiagonal solution of the bulk exchange
relation compatible with both boundary eigenvalue conditions (explicit seed
plus two-term recursions, derived by hand; see ``_bootstrap_x``).  The
printed-style candidate assemblies (diagonal + transposed-Jacobi forms) are
kept available in :func:`mpa_convention_audit`, which demonstrates that none
of them satisfies the invariants — the audit, not silent substitution, is
the record of that resolution.

Conventions fixed here and used project-wide: right hop rate 1, left hop
rate q; particles enter at site 1 with rate alpha and leave with gamma_r;
at site L they leave with beta_r and enter with delta_r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _iproduct
from typing import Literal

import numpy as np

from . import _spinchain as _sc
from .awalgebra import AWStructure, TridiagonalPair, fit_structure_constants
from .qspecial import AWParams, QParams, norm_h, recurrence_coeffs
from .quantumrep import CoidealParams, SpinRep
from .awalgebra import coideal_structure_constants

__all__ = [
    "ASEPRates",
    "MPAState",
    "Observables",
    "kappa_map",
    "build_mpa",
    "mpa_distribution",
    "observables",
    "mpa_current",
    "mpa_invariant_residuals",
    "mpa_convention_audit",
    "boundary_pair_finite",
    "boundary_coideal_params",
    "boundary_aw_constants",
    "boundary_aw_constants_exact",
    "boundary_constants_report",
    "conserved_charge_residual",
    "gauge_residual",
]

_INV_TOL = 1e-10


@dataclass(frozen=True)
class ASEPRates:
    """Boundary rates with the bulk asymmetry.

    ``x0`` is the representation scale; it is computed (boundary eigenvalue
    times beta_r, equal to sqrt(q) identically by a Vieta identity on the
    kappa quadratic), never supplied.
    """

    alpha: float
    beta_r: float
    gamma_r: float
    delta_r: float
    q: QParams
    x0: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("alpha", "beta_r", "gamma_r", "delta_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.alpha + self.gamma_r <= 0:
            raise ValueError("need alpha + gamma_r > 0 (nondegenerate left boundary)")
        if self.beta_r + self.delta_r <= 0:
            raise ValueError("need beta_r + delta_r > 0 (nondegenerate right boundary)")
        object.__setattr__(self, "x0", self.q.sqrt_q)


@dataclass
class MPAState:
    """Matrix-product data: D0, D1 with the shared boundary vectors."""

    D0: np.ndarray
    D1: np.ndarray
    w_vec: np.ndarray
    v_vec: np.ndarray
    params: AWParams
    rates: ASEPRates
    N: int


@dataclass
class Observables:
    Z_L: float
    density: tuple[float, ...]
    current: float
    two_point: dict[tuple[int, int], float]


def _kappa_roots(diff: float, prod_rate: float, denom: float, q: float):
    disc = np.sqrt((diff - (1.0 - q)) ** 2 + 4.0 * prod_rate)
    return (
        (-(diff - (1.0 - q)) + disc) / (2.0 * denom),
        (-(diff - (1.0 - q)) - disc) / (2.0 * denom),
    )


def kappa_map(rates: ASEPRates) -> AWParams:
    """Polynomial parameters (a, b, c, d) from the boundary rates.

    a, c are the +- roots of the left-boundary quadratic (alpha, gamma_r),
    b, d of the right-boundary one (beta_r, delta_r).  The Vieta identities
    b d = -delta_r/beta_r, a c = -gamma_r/alpha and
    beta_r (1+b)(1+d) = 1-q = alpha (1+a)(1+c) are asserted.
    """
    if rates.beta_r <= 0 or rates.alpha <= 0:
        raise ValueError("kappa_map needs beta_r > 0 and alpha > 0")
    q = rates.q.q
    b, d = _kappa_roots(rates.beta_r - rates.delta_r, rates.beta_r * rates.delta_r,
                        rates.beta_r, q)
    a, c = _kappa_roots(rates.alpha - rates.gamma_r, rates.alpha * rates.gamma_r,
                        rates.alpha, q)
    for lhs, rhs, tag in (
        (b * d, -rates.delta_r / rates.beta_r, "b*d"),
        (a * c, -rates.gamma_r / rates.alpha, "a*c"),
        (rates.beta_r * (1 + b) * (1 + d), 1.0 - q, "beta(1+b)(1+d)"),
        (rates.alpha * (1 + a) * (1 + c), 1.0 - q, "alpha(1+a)(1+c)"),
    ):
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(rhs)):
            raise AssertionError(f"kappa identity {tag} violated: {lhs} vs {rhs}")
    try:
        return AWParams(a, b, c, d, rates.q)
    except ValueError as exc:
        raise ValueError(
            f"rates {rates.alpha, rates.beta_r, rates.gamma_r, rates.delta_r} "
            f"map to a degenerate parameter point: {exc}"
        ) from exc


def _abc_arrays(p: AWParams, nmax: int):
    """Recurrence coefficients a_n, b_n, c_n for n = 0..nmax as arrays."""
    rows = [recurrence_coeffs(n, p) for n in range(nmax + 1)]
    an = np.array([complex(r[0]).real for r in rows])
    bn = np.array([complex(r[1]).real for r in rows])
    cn = np.array([complex(r[2]).real for r in rows])
    return an, bn, cn


def _jacobi(p: AWParams, N: int) -> np.ndarray:
    an, bn, cn = _abc_arrays(p, N)
    return np.diag(an[:N]) + np.diag(cn[1:N], 1) + np.diag(bn[: N - 1], -1)


def _bootstrap_x(rates: ASEPRates, p: AWParams, N: int):
    """The tridiagonal splitting X of the Jacobi matrix.

    Seeds come from the two boundary eigenvalue conditions at the first
    basis vector (their mutual consistency is itself a check); the
    recursions propagate the bulk exchange relation column by column:

        x0[n+1] = (q (b_n - l_n) x0[n] + q a_{n+1} l_n - l_n a_n
                   + l_n x0[n]) / (b_n - l_n + q l_n)
        l[n+1]  = q b_{n+1} l_n / (b_n - l_n + q l_n)
        u[n+1]  = u_n c_{n+2} / (q c_{n+1} + (1-q) u_n)
    """
    q = rates.q.q
    al, be, ga, de = rates.alpha, rates.beta_r, rates.gamma_r, rates.delta_r
    an, bn, cn = _abc_arrays(p, N + 1)
    x0n = np.zeros(N)
    ln = np.zeros(N)
    un = np.zeros(N)
    x0n[0] = (1 - q - (be - de) + de * an[0]) / (be + de)
    seed_alt = ((al - ga) + al * an[0] - (1 - q)) / (al + ga)
    if abs(x0n[0] - seed_alt) > 1e-9 * max(1.0, abs(x0n[0])):
        raise RuntimeError(
            f"boundary seeds disagree ({x0n[0]} vs {seed_alt}): convention error"
        )
    ln[0] = de * bn[0] / (be + de)
    un[0] = al * cn[1] / (al + ga)
    for n in range(N - 1):
        den = bn[n] - ln[n] + q * ln[n]
        x0n[n + 1] = (
            q * (bn[n] - ln[n]) * x0n[n] + q * an[n + 1] * ln[n]
            - ln[n] * an[n] + ln[n] * x0n[n]
        ) / den
        ln[n + 1] = q * bn[n + 1] * ln[n] / den
        un[n + 1] = un[n] * cn[n + 2] / (q * cn[n + 1] + (1 - q) * un[n])
    X = np.diag(x0n) + np.diag(un[:-1], 1) + np.diag(ln[:-1], -1)
    return X


def _check_invariants(D0, D1, w, v, rates: ASEPRates, N: int) -> dict[str, float]:
    q, x0 = rates.q.q, rates.x0
    bulk = D1 @ D0 - q * D0 @ D1 - x0 * (D1 + D0)
    scale = max(1.0, np.abs(D0).max(), np.abs(D1).max())
    right = (rates.beta_r * D1 - rates.delta_r * D0) @ v - x0 * v
    left = w @ (rates.alpha * D0 - rates.gamma_r * D1) - x0 * w
    return {
        "bulk_interior": float(np.abs(bulk[: N - 2, : N - 2]).max() / scale),
        "right_bc": float(np.abs(right[: N - 1]).max() / max(1.0, np.abs(v).max())),
        "left_bc": float(np.abs(left[: N - 1]).max() / max(1.0, np.abs(w).max())),
    }


def build_mpa(rates: ASEPRates, L: int, N: int | None = None) -> MPAState:
    """Assemble the stationary-weight matrices for a length-L chain.

    N defaults to L+2, which is exact: every length-L product of the
    tridiagonal D's against the first basis vector stays inside the
    truncation (enlarging N cannot change any weight).
    """
    if L < 1:
        raise ValueError("L must be positive")
    if N is None:
        N = L + 2
    if N < L + 2:
        raise ValueError("need N >= L + 2 for truncation-free weights")
    p = kappa_map(rates)
    c1 = rates.q.sqrt_q / (1.0 - rates.q.q)
    # x0 from the boundary eigenvalue, cross-checked on both boundaries
    lam0 = c1 * (1 + p.b) * (1 + p.d)
    lam0_star = c1 * (1 + p.a) * (1 + p.c)
    for val, tag in ((rates.beta_r * lam0, "beta_r*lambda_0"),
                     (rates.alpha * lam0_star, "alpha*lambda*_0")):
        if abs(val - rates.x0) > 1e-10 * max(1.0, rates.x0):
            raise AssertionError(f"{tag} = {val} != x0 = {rates.x0}")
    X = _bootstrap_x(rates, p, N)
    Y = _jacobi(p, N) - X
    D1 = c1 * (np.eye(N) + X)
    D0 = c1 * (np.eye(N) + Y)
    h0 = complex(norm_h(0, p))
    if abs(h0.imag) > 1e-10 * abs(h0):
        raise RuntimeError(f"orthogonality normalization not real: h0 = {h0}")
    e0 = np.zeros(N)
    e0[0] = 1.0
    wv = e0 / np.emath.sqrt(h0.real)
    # the boundary/bulk invariants are scale-free, so check on e0 itself
    res = _check_invariants(D0, D1, e0, e0, rates, N)
    bad = {k: r for k, r in res.items() if r > _INV_TOL}
    if bad:
        raise RuntimeError(f"representation invariants violated: {bad}")
    return MPAState(D0=D0, D1=D1, w_vec=wv, v_vec=wv, params=p, rates=rates, N=N)


def mpa_distribution(mpa: MPAState, L: int) -> dict[tuple[int, ...], float]:
    """Normalized stationary distribution over occupation words."""
    if L > mpa.N - 2:
        raise ValueError("L exceeds the truncation-exact range (L <= N-2)")
    e0 = np.zeros(mpa.N)
    e0[0] = 1.0
    weights = {}
    for word in _iproduct((0, 1), repeat=L):
        vec = e0
        for s in word:
            vec = vec @ (mpa.D1 if s else mpa.D0)
        weights[word] = float(vec @ e0)
    Z = sum(weights.values())
    if Z == 0:
        raise RuntimeError("zero partition sum: degenerate representation")
    # the first-basis-vector route carries an unphysical overall sign (the
    # h0^{-1/2} normalization restores it in Z_L); only mixed signs are an error
    dist = {word: wgt / Z for word, wgt in weights.items()}
    if min(dist.values()) < -1e-12:
        raise RuntimeError("mixed-sign stationary weights: convention error")
    return dist


def observables(mpa: MPAState, L: int) -> Observables:
    """Partition sum, site densities, two-point functions, and the current.

    The current is computed both as x0 Z_{L-1}/Z_L and per bond from the
    exchange-combination matrix element; all values must agree to 1e-9.
    Z_L is the literal boundary-vector sandwich including the h0^{-1/2}
    normalization; Z_L <= 0 signals leaving the orthogonality regime (or a
    convention error) and is rejected.  Densities and currents are ratios
    and do not depend on that normalization.
    """
    if L > mpa.N - 2:
        raise ValueError("L exceeds the truncation-exact range (L <= N-2)")
    N = mpa.N
    e0 = np.zeros(N)
    e0[0] = 1.0
    C = mpa.D0 + mpa.D1
    # prefix[i] = e0 C^i, suffix[i] = C^i e0
    prefix = [e0]
    for _ in range(L):
        prefix.append(prefix[-1] @ C)
    suffix = [e0]
    for _ in range(L):
        suffix.append(C @ suffix[-1])
    Z_e0 = float(prefix[L] @ e0)
    wv_scale = float(np.real(mpa.w_vec[0] * mpa.v_vec[0]))
    Z_L = Z_e0 * wv_scale
    if Z_L <= 0:
        raise RuntimeError(f"nonpositive partition sum {Z_L}: regime/convention error")
    dens = tuple(
        float(prefix[i - 1] @ mpa.D1 @ suffix[L - i]) / Z_e0 for i in range(1, L + 1)
    )
    if min(dens) < -1e-12 or max(dens) > 1 + 1e-12:
        raise RuntimeError(f"densities outside [0,1]: {dens}")
    # two-point via direct sandwich (L is small; keep it simple and exact)
    two = {}
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            vec = prefix[i - 1] @ mpa.D1
            for _ in range(j - i - 1):
                vec = vec @ C
            vec = vec @ mpa.D1
            two[(i, j)] = float(vec @ suffix[L - j]) / Z_e0
    current = mpa.rates.x0 * float(prefix[L - 1] @ e0) / Z_e0
    # per-bond matrix-element route
    bond_op = mpa.D1 @ mpa.D0 - mpa.rates.q.q * mpa.D0 @ mpa.D1
    for i in range(1, L):
        ji = float(prefix[i - 1] @ bond_op @ suffix[L - i - 1]) / Z_e0
        if abs(ji - current) > 1e-9 * max(1.0, abs(current)):
            raise RuntimeError(f"bond current {ji} at bond {i} != ratio value {current}")
    return Observables(Z_L=Z_L, density=dens, current=current, two_point=two)


def mpa_invariant_residuals(mpa: MPAState) -> dict[str, float]:
    """Re-evaluate the defining relations of the stored representation."""
    e0 = np.zeros(mpa.N)
    e0[0] = 1.0
    return _check_invariants(mpa.D0, mpa.D1, e0, e0, mpa.rates, mpa.N)


def mpa_current(mpa: MPAState, L: int) -> float:
    """Stationary current x0 Z_{L-1}/Z_L from the normalization ratio.

    Unlike :func:`observables` this uses only the first-basis-vector route,
    so it stays valid outside the orthogonality regime (where the literal
    Z_L changes sign through the h0 normalization).
    """
    if L > mpa.N - 2:
        raise ValueError("L exceeds the truncation-exact range (L <= N-2)")
    e0 = np.zeros(mpa.N)
    e0[0] = 1.0
    C = mpa.D0 + mpa.D1
    vec = e0
    for _ in range(L - 1):
        vec = vec @ C
    z_prev = float(vec @ e0)
    z_full = float((vec @ C) @ e0)
    if z_full == 0:
        raise RuntimeError("zero partition sum: degenerate representation")
    return mpa.rates.x0 * z_prev / z_full


def mpa_convention_audit(rates: ASEPRates, N: int = 12) -> dict[str, dict[str, float]]:
    """Invariant residuals for the printed-style assemblies and the bootstrap.

    The printed-style candidates build one boundary combination as a diagonal
    eigenvalue matrix and the other as prefactor * Jacobi (optionally
    transposed) + identity, then unmix; the candidate axes are
    {diagonal on the right | left boundary} x {prefactor a | b} x
    {Jacobi | its transpose}.  None satisfies all three invariants; the
    bootstrap entry does.  This function is the audit trail for that
    resolution.
    """
    p = kappa_map(rates)
    q = rates.q.q
    c1 = rates.q.sqrt_q / (1.0 - q)
    N = int(N)
    n = np.arange(N, dtype=float)
    A = _jacobi(p, N)
    e0 = np.zeros(N)
    e0[0] = 1.0
    abcd = p.abcd.real
    out: dict[str, dict[str, float]] = {}
    for diag_side in ("right", "left"):
        if diag_side == "right":
            lam = c1 * (p.b * q**-n + p.d * q**n + 1 + p.b * p.d)
            mix_diag, mix_tri = p.b * p.d, p.a * p.c
            shift = 1 + p.a * p.c
        else:
            lam = c1 * (p.a * q**-n + p.c * q**n + 1 + p.a * p.c)
            mix_diag, mix_tri = p.a * p.c, p.b * p.d
            shift = 1 + p.b * p.d
        M1 = np.diag(lam.real)
        for pref_name in ("a", "b"):
            pref = p.a if pref_name == "a" else p.b
            for transposed in (False, True):
                M2 = c1 * (pref * (A.T if transposed else A) + shift * np.eye(N))
                M2 = M2.real
                if diag_side == "right":
                    D1 = (M1 - mix_diag * M2) / (1 - abcd)
                    D0 = (M2 - mix_tri * M1) / (1 - abcd)
                else:
                    D0 = (M1 - mix_diag * M2) / (1 - abcd)
                    D1 = (M2 - mix_tri * M1) / (1 - abcd)
                key = f"diag-{diag_side}/pref-{pref_name}/{'At' if transposed else 'A'}"
                out[key] = _check_invariants(D0, D1, e0, e0, rates, N)
    st = build_mpa(rates, N - 2)
    out["bootstrap"] = _check_invariants(st.D0, st.D1, e0, e0, rates, N)
    return out


# ---------------------------------------------------------------------------
# boundary tridiagonal pair on a finite spin representation


def boundary_pair_finite(rates: ASEPRates, rep: SpinRep) -> TridiagonalPair:
    """Shift-free boundary combinations as a tridiagonal pair.

    A  = g beta_r q^{N/2} J+ - g delta_r J- q^{N/2} + h (beta_r sqrt{q} - delta_r) q^N,
    A* = g alpha  q^{-N/2} J+ - g gamma_r J- q^{-N/2} + h (alpha/sqrt{q} - gamma_r) q^{-N},
    with g = x0/sqrt(1-q), h = x0/(1-q) (identity shifts already removed).
    """
    q = rates.q.q
    sq = rates.q.sqrt_q
    g = rates.x0 / np.sqrt(1.0 - q)
    h = rates.x0 / (1.0 - q)
    A = (
        g * rates.beta_r * rep.qN_half @ rep.Aplus
        - g * rates.delta_r * rep.Aminus @ rep.qN_half
        + h * (rates.beta_r * sq - rates.delta_r) * rep.qN_pos
    )
    As = (
        g * rates.alpha * rep.qN_neg_half @ rep.Aplus
        - g * rates.gamma_r * rep.Aminus @ rep.qN_neg_half
        + h * (rates.alpha / sq - rates.gamma_r) * rep.qN_neg
    )
    return TridiagonalPair(
        A=A,
        A_star=As,
        bandwidth_A=1,
        bandwidth_Astar=1,
        q=rates.q,
        exact_dim=rep.dim,
    )


def boundary_coideal_params(rates: ASEPRates) -> CoidealParams:
    """Map boundary rates to the six coideal parameters.

    This realizes the boundary pair as a coideal pair, so the closed-form
    structure constants apply verbatim (see boundary_aw_constants_exact).
    """
    qp = rates.q
    sq, lam = qp.sqrt_q, qp.lam
    g = rates.x0 / np.sqrt(1.0 - qp.q)
    h = rates.x0 / (1.0 - qp.q)
    return CoidealParams(
        u=-g * rates.delta_r / lam,
        u_star=g * rates.alpha / (sq * lam),
        v=-g * rates.beta_r * sq / lam,
        v_star=g * rates.gamma_r / lam,
        k=h * (rates.beta_r * sq - rates.delta_r),
        k_star=h * (rates.alpha / sq - rates.gamma_r),
    )


def boundary_aw_constants(rates: ASEPRates, Q_val: complex) -> AWStructure:
    """Structure constants in the long-printed form (transcribed literally).

    ``Q_val`` is the Casimir scalar of the chosen representation.  Note
    only rho and rho* of this form agree with the actual constants of
    :func:`boundary_pair_finite`; use :func:`boundary_constants_report`
    for the verified values and the mismatch record.
    """
    qp = rates.q
    sq, lam, bp = qp.sqrt_q, qp.lam, qp.bp
    al, be, ga, de = rates.alpha, rates.beta_r, rates.gamma_r, rates.delta_r
    x0sq = rates.x0**2
    x0cu = rates.x0**3
    return AWStructure(
        beta_aw=qp.q + 1.0 / qp.q,
        rho=x0sq * be * de / qp.q * bp**2,
        rho_star=x0sq * al * ga / qp.q * bp**2,
        omega=-(x0sq * (be - de) * (ga - al) - x0sq * (be * ga + al * de) * lam * Q_val),
        eta=sq * bp * x0cu * (be * de * (ga - al) * Q_val + (be - de) * (be * ga + al * de) / lam),
        eta_star=sq * bp * x0cu * (al * ga * (be - de) * Q_val + (al - ga) * (al * de + be * ga) / lam),
    )


def boundary_aw_constants_exact(rates: ASEPRates, Q_val: complex) -> AWStructure:
    """Verified structure constants via the coideal closed forms."""
    qp = rates.q
    return coideal_structure_constants(
        boundary_coideal_params(rates), qp.lam**2 * Q_val, qp
    )


def boundary_constants_report(rates: ASEPRates, rep: SpinRep) -> dict:
    """Fit the boundary pair and compare against both constant routes.

    Returns the fitted constants, the fit residual, and elementwise maximum
    deviations of the literal printed form and of the coideal closed form.
    The printed rho, rho* match; its omega, eta, eta* do not (any Casimir
    scalar), which is why the exact route exists.
    """
    from .quantumrep import casimir_value

    pair = boundary_pair_finite(rates, rep)
    fitted, fit_res = fit_structure_constants(pair)
    Q_val = casimir_value(rep)
    printed = boundary_aw_constants(rates, Q_val)
    exact = boundary_aw_constants_exact(rates, Q_val)

    def _dev(s: AWStructure) -> float:
        vals = []
        for f in ("rho", "rho_star", "omega", "eta", "eta_star"):
            a, b = getattr(fitted, f), getattr(s, f)
            vals.append(abs(a - b) / max(1.0, abs(a)))
        return float(max(vals))

    # The literal form's rho and rho* each differ from the fitted values by a
    # pure q-dependent normalization (no rate or representation dependence):
    # -q^{3/2}/(1-q) on rho and -q^{1/2}/(1-q) on rho*.  No such factor exists
    # for omega/eta/eta* (their deviation varies with rates and Casimir), so
    # the mismatch is structural, not a rescale convention.
    return {
        "fitted": fitted,
        "fit_residual": fit_res,
        "printed": printed,
        "printed_max_dev": _dev(printed),
        "printed_rho_factor": complex(fitted.rho / printed.rho),
        "printed_rho_star_factor": complex(fitted.rho_star / printed.rho_star),
        "exact": exact,
        "exact_max_dev": _dev(exact),
        "printed_matches": _dev(printed) < 1e-8,
    }


# ---------------------------------------------------------------------------
# conserved boundary charges on the L-site chain


def _chain_boundary_ops(rates: ASEPRates, L: int):
    """Full L-site boundary combinations (identity shifts included)."""
    qp = rates.q
    q, sq = qp.q, qp.sqrt_q
    g = rates.x0 / np.sqrt(1.0 - q)
    h = rates.x0 / (1.0 - q)
    Jp, Jm, qN, qN_half = _sc.tensor_generators(q, L)
    qN_inv = np.diag(1.0 / np.diag(qN))
    qN_half_inv = np.diag(1.0 / np.diag(qN_half))
    eye = np.eye(2**L)
    al, be, ga, de = rates.alpha, rates.beta_r, rates.gamma_r, rates.delta_r
    B_right = (
        g * be * qN_half @ Jp - g * de * Jm @ qN_half
        + h * (be * sq - de) * qN + h * (be - de) * eye
    )
    B_left = (
        g * al * qN_half_inv @ Jp - g * ga * Jm @ qN_half_inv
        + h * (al / sq - ga) * qN_inv + h * (al - ga) * eye
    )
    return B_right, B_left


def conserved_charge_residual(
    rates: ASEPRates, L: int, which: Literal["left", "right"]
) -> float:
    """Relative commutator norm of a boundary charge with the bulk chain.

    which="left": the (alpha, gamma_r) charge against the symmetric chain
    Hamiltonian at argument -sqrt(q).  which="right": the (beta_r, delta_r)
    charge against the staggered-gauge image -U H(+sqrt(q)) U^{-1} (the same
    matrix, constructed through the gauge route — the two routes share one
    identity but different assembly paths, which is the point of the check).
    """
    if not 2 <= L <= 8:
        raise ValueError("L must be in 2..8")
    sq = rates.q.sqrt_q
    B_right, B_left = _chain_boundary_ops(rates, L)
    if which == "left":
        H = _sc.uq_symmetric_xxz(-sq, L)
        B = B_left
    elif which == "right":
        U = _sc.stagger_u(L)
        H = -U @ _sc.uq_symmetric_xxz(sq, L) @ np.conj(U.T)
        B = B_right
    else:
        raise ValueError("which must be 'left' or 'right'")
    comm = H @ B - B @ H
    scale = max(np.abs(H).max() * np.abs(B).max(), 1e-300)
    return float(np.abs(comm).max() / scale)


def gauge_residual(L: int, p: float) -> float:
    """Residual of H(-p) = -U H(p) U^{-1} with the staggered gauge."""
    U = _sc.stagger_u(L)
    H = _sc.uq_symmetric_xxz(p, L)
    Hm = _sc.uq_symmetric_xxz(-p, L)
    diff = Hm + U @ H @ np.conj(U.T)
    return float(np.abs(diff).max() / max(np.abs(H).max(), 1e-300))
