"""q-series primitives and Askey-Wilson polynomial machinery.

Everything in this module works with a deformation parameter ``0 < q < 1``
(:class:`QParams`) and, for the polynomial family, a quadruple of complex
parameters ``(a, b, c, d)`` (:class:`AWParams`).  The polynomials are handled
in the normalization in which ``p_0 = 1`` and

    p_n(x) = 4phi3(q^-n, abcd q^(n-1), a y, a/y; ab, ac, ad | q; q),

with ``x = y + 1/y``.  The same family rescaled by ``a^-n (ab,ac,ad;q)_n``
(here called the "big" normalization ``P_n``) is regular at ``a = 0`` and is
the one entering the orthogonality relation.

Scalars are complex doubles throughout; residual checks downstream are done
with relative norms, so no arbitrary-precision arithmetic is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "QParams",
    "AWParams",
    "SymLaurentPoly",
    "q_number",
    "q_pochhammer",
    "q_pochhammer_tail_bound",
    "aw_poly_eval",
    "aw_poly_big",
    "aw_poly_as_laurent",
    "recurrence_coeffs",
    "big_recurrence_coeffs",
    "dual_eigenvalue",
    "apply_D",
    "norm_h",
    "orthogonality_check",
    "orthogonality_gram",
]

#: truncation threshold for infinite q-Pochhammer products
EPS_PROD = 1e-16

#: default range of the abcd != q^m representation guard
M_GUARD = 64


@dataclass(frozen=True)
class QParams:
    """Deformation parameter with cached square roots.

    Raises ``ValueError`` unless ``0 < q < 1``.
    """

    q: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in (0,1), got {self.q}")

    @property
    def sqrt_q(self) -> float:
        return math.sqrt(self.q)

    @property
    def inv_sqrt_q(self) -> float:
        return 1.0 / math.sqrt(self.q)

    @property
    def lam(self) -> float:
        """q^(1/2) - q^(-1/2); the basic q-deformation scale (negative here)."""
        return self.sqrt_q - self.inv_sqrt_q

    @property
    def qm(self) -> float:
        """q - 1/q."""
        return self.q - 1.0 / self.q

    @property
    def bp(self) -> float:
        """q^(1/2) + q^(-1/2)."""
        return self.sqrt_q + self.inv_sqrt_q


def q_number(x: float, qp: QParams) -> float:
    """Symmetric q-number (q^(x/2) - q^(-x/2)) / (q^(1/2) - q^(-1/2))."""
    s = qp.sqrt_q
    return (s**x - s**-x) / (s - 1.0 / s)


def q_pochhammer(z: complex, qp: QParams, n) -> complex:
    """Product (z;q)_n = prod_{k=0}^{n-1} (1 - z q^k).

    ``n`` may be a nonnegative integer or ``math.inf`` for the infinite
    product, which is truncated once ``|z| q^k`` drops below ``EPS_PROD``
    (the neglected tail is bounded by :func:`q_pochhammer_tail_bound`).
    """
    if n is math.inf or n == math.inf:
        out = 1.0 + 0.0j
        zk = complex(z)
        # geometric decay: |z q^k| shrinks by q every step
        for _ in range(100_000):
            if abs(zk) < EPS_PROD:
                break
            out *= 1.0 - zk
            zk *= qp.q
        return out
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative or inf")
    out = 1.0 + 0.0j
    zk = complex(z)
    for _ in range(n):
        out *= 1.0 - zk
        zk *= qp.q
    return out


def q_pochhammer_tail_bound(z: complex, qp: QParams) -> float:
    """Bound on the relative error of the truncated infinite product.

    After stopping at the first ``k`` with ``|z| q^k < EPS_PROD`` the
    neglected log-tail is at most ``sum_{m>=k} |z| q^m < EPS_PROD / (1-q)``.
    """
    return EPS_PROD / (1.0 - qp.q)


def _q_pochhammer_multi(zs: Sequence[complex], qp: QParams, n) -> complex:
    out = 1.0 + 0.0j
    for z in zs:
        out *= q_pochhammer(z, qp, n)
    return out


@dataclass(frozen=True)
class AWParams:
    """Polynomial parameter quadruple with its deformation parameter.

    The product ``abcd`` must stay away from ``q^m`` for
    ``m = 0, 1, ..., m_guard`` (default 64); this keeps recurrence
    denominators nonzero and the dual eigenvalues distinct.  Set
    ``m_guard = 0`` to skip the guard (useful for isolated formula
    evaluations at degenerate parameter points).
    """

    a: complex
    b: complex
    c: complex
    d: complex
    qp: QParams
    m_guard: int = M_GUARD

    def __post_init__(self):
        prod = self.a * self.b * self.c * self.d
        qm = 1.0
        for m in range(self.m_guard + 1):
            # relative comparison: abcd = 0 is fine, tiny q^m must not trip it
            if abs(prod - qm) < 1e-12 * max(abs(prod), qm):
                raise ValueError(
                    f"parameter guard violated: abcd = {prod} is within 1e-12 of q^{m}"
                )
            qm *= self.qp.q

    @property
    def abcd(self) -> complex:
        return self.a * self.b * self.c * self.d

    @property
    def q(self) -> float:
        return self.qp.q


def recurrence_coeffs(n: int, p: AWParams) -> tuple[complex, complex, complex]:
    """Three-term recurrence data (a_n, b_n, c_n) for the p_n normalization.

    ``x p_n = b_n p_{n+1} + a_n p_n + c_n p_{n-1}`` with ``p_{-1} = 0`` and
    ``a_n = a + 1/a - b_n - c_n``.  Requires ``a != 0``; for parameter sets
    with ``a = 0`` use :func:`big_recurrence_coeffs`.
    """
    if p.a == 0:
        raise ValueError("recurrence_coeffs needs a != 0; use big_recurrence_coeffs")
    q = p.q
    a, b, c, d = p.a, p.b, p.c, p.d
    abcd = p.abcd
    qn = q**n
    for shift, label in ((2 * n - 2, "2n-2"), (2 * n - 1, "2n-1"), (2 * n, "2n")):
        if shift >= 0 and abs(1.0 - abcd * q**shift) < 1e-14:
            raise ValueError(f"vanishing denominator 1 - abcd q^({label}) at n={n}")
    bn = (
        (1 - a * b * qn)
        * (1 - a * c * qn)
        * (1 - a * d * qn)
        * (1 - abcd * qn / q)
        / (a * (1 - abcd * qn * qn / q) * (1 - abcd * qn * qn))
    )
    cn = (
        a
        * (1 - qn)
        * (1 - b * c * qn / q)
        * (1 - b * d * qn / q)
        * (1 - c * d * qn / q)
        / ((1 - abcd * qn * qn / (q * q)) * (1 - abcd * qn * qn / q))
    )
    # a_n = a + 1/a - b_n - c_n cancels down to O(q^n); evaluating the
    # difference literally leaves an O(eps) absolute error that later gets
    # amplified by the q^{-n} growth of the dual eigenvalues.  Expand
    # prod(1 - x_i) - prod(1 - y_j) into elementary symmetric sums (every
    # term is individually O(q^n)) so a_n keeps full *relative* accuracy.
    an = -_one_minus_prod_ratio(
        (a * b * qn, a * c * qn, a * d * qn, abcd * qn / q),
        (abcd * qn * qn / q, abcd * qn * qn),
    ) / a - a * _one_minus_prod_ratio(
        (qn, b * c * qn / q, b * d * qn / q, c * d * qn / q),
        (abcd * qn * qn / (q * q), abcd * qn * qn / q),
    )
    return an, bn, cn


def _one_minus_prod_ratio(xs, ys) -> complex:
    """(prod(1-x_i) - prod(1-y_j)) / prod(1-y_j), cancellation-free.

    Valid for len(xs) = 4, len(ys) = 2; the numerator is expanded so that no
    O(1) quantities are subtracted when all arguments are small.
    """
    x1, x2, x3, x4 = xs
    y1, y2 = ys
    e1 = x1 + x2 + x3 + x4
    e2 = x1 * (x2 + x3 + x4) + x2 * (x3 + x4) + x3 * x4
    e3 = x1 * x2 * (x3 + x4) + (x1 + x2) * x3 * x4
    e4 = x1 * x2 * x3 * x4
    num = -e1 + e2 - e3 + e4 + y1 + y2 - y1 * y2
    return num / ((1 - y1) * (1 - y2))


def big_recurrence_coeffs(n: int, p: AWParams) -> tuple[complex, complex, complex]:
    """Recurrence data (alpha_n, A_n, C_n) for the rescaled family P_n.

    ``x P_n = A_n P_{n+1} + alpha_n P_n + C_n P_{n-1}``.  All three
    coefficients are regular at ``a = 0`` (the diagonal term is evaluated
    through its explicit limit there), which is what makes this family the
    right one for orthogonality checks at degenerate parameter points.
    """
    q = p.q
    a, b, c, d = p.a, p.b, p.c, p.d
    abcd = p.abcd
    qn = q**n
    An = (1 - abcd * qn / q) / ((1 - abcd * qn * qn / q) * (1 - abcd * qn * qn))
    Cn = (
        (1 - qn)
        * (1 - a * b * qn / q)
        * (1 - a * c * qn / q)
        * (1 - a * d * qn / q)
        * (1 - b * c * qn / q)
        * (1 - b * d * qn / q)
        * (1 - c * d * qn / q)
        / ((1 - abcd * qn * qn / (q * q)) * (1 - abcd * qn * qn / q))
    )
    if a != 0:
        alpha = recurrence_coeffs(n, p)[0]
    else:
        # limit a -> 0 of a + 1/a - b_n - c_n
        alpha = (b + c + d) * qn + b * c * d * (qn / q) * (1 - qn - qn * q)
    return alpha, An, Cn


def dual_eigenvalue(n: int, p: AWParams) -> complex:
    """Eigenvalue q^-n + abcd q^(n-1) of the q-difference operator."""
    return p.q ** (-n) + p.abcd * p.q ** (n - 1)


def aw_poly_eval(n: int, x: complex, p: AWParams) -> complex:
    """Evaluate p_n(x) through its terminating basic hypergeometric series.

    ``x`` is resolved to ``y`` with ``x = y + 1/y`` (the root with
    ``|y| >= 1`` is taken; the series is symmetric under ``y -> 1/y`` so the
    choice does not affect the value).  The series has exactly ``n+1`` terms.

    Raises ``ValueError`` when one of the products ``ab, ac, ad`` equals
    ``q^-k`` for some ``k < n`` (vanishing Pochhammer denominator).
    """
    if p.a == 0:
        raise ValueError("aw_poly_eval needs a != 0 in this normalization")
    q = p.q
    for name, z in (("ab", p.a * p.b), ("ac", p.a * p.c), ("ad", p.a * p.d)):
        zk = complex(z)
        for k in range(n):
            if abs(1.0 - zk) < 1e-14:
                raise ValueError(
                    f"degenerate denominator: {name} = q^(-{k}) makes ({name};q)_n vanish"
                )
            zk *= q
    x = complex(x)
    disc = np.sqrt(x * x - 4.0 + 0.0j)
    y = (x + disc) / 2.0
    if abs(y) < 1.0:
        y = (x - disc) / 2.0
    # term-by-term update of the 4phi3 sum
    num = [q ** (-n), p.abcd * q ** (n - 1), p.a * y, p.a / y]
    den = [p.a * p.b, p.a * p.c, p.a * p.d, q]
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    qk = 1.0
    for _ in range(n):
        ratio = q
        for z in num:
            ratio *= 1.0 - z * qk
        for z in den:
            ratio /= 1.0 - z * qk
        term *= ratio
        total += term
        qk *= q
    return total


def _big_scale(n: int, p: AWParams) -> complex:
    """a^-n (ab;q)_n (ac;q)_n (ad;q)_n, the P_n / p_n normalization ratio."""
    q = p.qp
    return (
        p.a ** (-n)
        * q_pochhammer(p.a * p.b, q, n)
        * q_pochhammer(p.a * p.c, q, n)
        * q_pochhammer(p.a * p.d, q, n)
    )


def aw_poly_big(n: int, x: complex, p: AWParams) -> complex:
    """Evaluate the rescaled polynomial P_n(x) by its regular recurrence."""
    pm1 = 0.0 + 0.0j
    pn = 1.0 + 0.0j
    for k in range(n):
        alpha, Ak, Ck = big_recurrence_coeffs(k, p)
        pm1, pn = pn, (x * pn - alpha * pn - Ck * pm1) / Ak
    return pn


@dataclass
class SymLaurentPoly:
    """Symmetric Laurent polynomial f[y] = c_0 + sum_k c_k (y^k + y^-k).

    Invariant under ``y -> 1/y`` by construction.  ``coeffs[k]`` is ``c_k``.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=complex))

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y):
        y = np.asarray(y, dtype=complex)
        out = np.full_like(y, self.coeffs[0])
        for k in range(1, len(self.coeffs)):
            out = out + self.coeffs[k] * (y**k + y ** (-k))
        return out if out.shape else complex(out)


def _times_x(coeffs: np.ndarray) -> np.ndarray:
    """Coefficients of (y + 1/y) * f for f in the symmetric Laurent basis."""
    K = len(coeffs) - 1
    out = np.zeros(K + 2, dtype=complex)
    # x * 1 = (y + 1/y);  x * (y^k + y^-k) = (y^(k+1)+y^-(k+1)) + (y^(k-1)+y^-(k-1)),
    # where the k=1 case feeds the constant twice.
    out[1] += coeffs[0]
    for k in range(1, K + 1):
        out[k + 1] += coeffs[k]
        if k == 1:
            out[0] += 2.0 * coeffs[k]
        else:
            out[k - 1] += coeffs[k]
    return out


def aw_poly_as_laurent(n: int, p: AWParams) -> SymLaurentPoly:
    """p_n as an explicit symmetric Laurent polynomial (degree n).

    Built by running the three-term recurrence in coefficient space, so it
    agrees with :func:`aw_poly_eval` to rounding.
    """
    if p.a == 0:
        raise ValueError("needs a != 0 (p_n normalization)")
    prev = np.zeros(1, dtype=complex)  # p_{-1} = 0
    cur = np.ones(1, dtype=complex)  # p_0 = 1
    for k in range(n):
        ak, bk, ck = recurrence_coeffs(k, p)
        nxt = _times_x(cur)
        nxt[: len(cur)] -= ak * cur
        nxt[: len(prev)] -= ck * prev
        prev, cur = cur, nxt / bk
    return SymLaurentPoly(cur)


def _dop_values(f, y: np.ndarray, p: AWParams) -> np.ndarray:
    """Pointwise values of the q-difference operator applied to f."""
    q = p.q
    a, b, c, d = p.a, p.b, p.c, p.d
    Aco = ((1 - a * y) * (1 - b * y) * (1 - c * y) * (1 - d * y)) / (
        (1 - y * y) * (1 - q * y * y)
    )
    Bco = ((a - y) * (b - y) * (c - y) * (d - y)) / ((1 - y * y) * (q - y * y))
    fy = f(y)
    return (1 + p.abcd / q) * fy + Aco * (f(q * y) - fy) + Bco * (f(y / q) - fy)


def apply_D(f: SymLaurentPoly, p: AWParams) -> SymLaurentPoly:
    """Apply the second-order q-difference operator to a symmetric Laurent poly.

    The operator maps degree-K symmetric Laurent polynomials to degree <= K
    ones; its rational coefficients only cancel after combining the three
    terms, so instead of symbolic manipulation the image is sampled on a
    generic grid of >= 2K+3 points and the coefficients are recovered by a
    least-squares Vandermonde solve (relative solve residual must be < 1e-10;
    the grid is regenerated up to three times before giving up).

    Grid points sit on the unit circle, ``y_j = exp(i theta_j)`` with theta_j
    bounded away from 0 and pi, so y^2 never hits the poles {1, q, 1/q} of
    the coefficient functions and the Vandermonde in the basis
    ``{1, y^k + y^-k} = {1, 2 cos(k theta)}`` stays well conditioned.
    """
    K = f.degree
    M = 2 * K + 3
    rhs_scale = max(float(np.abs(f.coeffs).max()), 1e-300)
    last_err = None
    for offset in (0.5, 0.37, 0.71):
        theta = np.pi * (np.arange(M) + offset) / M
        y = np.exp(1j * theta)
        vals = _dop_values(f, y, p)
        V = np.ones((M, K + 1), dtype=complex)
        for k in range(1, K + 1):
            V[:, k] = y**k + y ** (-k)
        coeffs, *_ = np.linalg.lstsq(V, vals, rcond=None)
        resid = np.linalg.norm(V @ coeffs - vals)
        scale = max(np.linalg.norm(vals), rhs_scale)
        if resid <= 1e-10 * scale:
            return SymLaurentPoly(coeffs)
        last_err = resid / scale
    raise RuntimeError(
        f"q-difference interpolation failed after 3 grids (last rel residual {last_err:.3e})"
    )


def norm_h(n: int, p: AWParams) -> complex:
    """Orthogonality norm h_n of the rescaled family P_n.

    h_n = (abcd q^(n-1);q)_n (abcd q^(2n);q)_inf
          / (q^(n+1), ab q^n, ac q^n, ad q^n, bc q^n, bd q^n, cd q^n; q)_inf
    """
    q = p.qp
    qn = p.q**n
    num = q_pochhammer(p.abcd * qn / p.q, q, n) * q_pochhammer(
        p.abcd * qn * qn, q, math.inf
    )
    den = _q_pochhammer_multi(
        [
            p.q * qn,
            p.a * p.b * qn,
            p.a * p.c * qn,
            p.a * p.d * qn,
            p.b * p.c * qn,
            p.b * p.d * qn,
            p.c * p.d * qn,
        ],
        q,
        math.inf,
    )
    return num / den


def _poch_inf_vec(z: np.ndarray, qp: QParams) -> np.ndarray:
    """Vectorized infinite q-Pochhammer over an array of arguments."""
    out = np.ones_like(z, dtype=complex)
    zk = np.asarray(z, dtype=complex).copy()
    for _ in range(100_000):
        if np.abs(zk).max() < EPS_PROD:
            break
        out *= 1.0 - zk
        zk *= qp.q
    return out


def _weight_theta(theta: np.ndarray, p: AWParams) -> np.ndarray:
    """Orthogonality weight w(cos theta) via infinite-product factors."""
    q = p.qp
    y = np.exp(1j * theta)

    def h_inf(mu):
        return _poch_inf_vec(mu * y, q) * _poch_inf_vec(mu / y, q)

    num = h_inf(1.0) * h_inf(-1.0) * h_inf(q.sqrt_q) * h_inf(-q.sqrt_q)
    den = h_inf(p.a) * h_inf(p.b) * h_inf(p.c) * h_inf(p.d)
    return (num / den).real


def orthogonality_check(
    m: int, n: int, p: AWParams, quad_points: int = 2000
) -> tuple[complex, complex]:
    """Weighted inner product of P_m and P_n against the reference norm h_n.

    Returns ``(integral, h_n_ref)`` where the integral is

        (1/2pi) * int_0^pi  w(cos theta) P_m(x) P_n(x) dtheta,   x = 2 cos theta
        mapped as x = y + 1/y with y = e^(i theta),

    computed by Gauss-Legendre quadrature in theta (the 1/sqrt(1-x^2)
    singularity of the x-form is absorbed by the substitution).  Only the
    absolutely continuous regime is supported: all of |a|,|b|,|c|,|d| must be
    < 1, otherwise the measure acquires discrete masses not handled here and
    a ``ValueError`` is raised.
    """
    G, href = orthogonality_gram(max(m, n), p, quad_points)
    return complex(G[m, n]), href[n]


def _big_poly_table(nmax: int, x: np.ndarray, p: AWParams) -> np.ndarray:
    """Values P_n(x_i) for n = 0..nmax as an (nmax+1, len(x)) array."""
    table = np.zeros((nmax + 1, len(x)), dtype=complex)
    table[0] = 1.0
    if nmax >= 1:
        prev = np.zeros_like(table[0])
        cur = table[0].copy()
        for k in range(nmax):
            alpha, Ak, Ck = big_recurrence_coeffs(k, p)
            prev, cur = cur, (x * cur - alpha * cur - Ck * prev) / Ak
            table[k + 1] = cur
    return table


def orthogonality_gram(
    nmax: int, p: AWParams, quad_points: int = 2000
) -> tuple[np.ndarray, np.ndarray]:
    """Full Gram matrix of P_0..P_nmax under the continuous weight.

    Returns ``(G, h_ref)`` with ``G[m,n]`` the quadrature value of the
    weighted inner product and ``h_ref[n] = norm_h(n, p)``.  Same regime
    restriction as :func:`orthogonality_check`.
    """
    for name, z in (("a", p.a), ("b", p.b), ("c", p.c), ("d", p.d)):
        if abs(z) >= 1.0:
            raise ValueError(
                f"unsupported regime: |{name}| = {abs(z)} >= 1 (discrete masses present)"
            )
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    theta = 0.5 * np.pi * (nodes + 1.0)
    wq = 0.5 * np.pi * weights
    x = 2.0 * np.cos(theta)
    w = _weight_theta(theta, p)
    table = _big_poly_table(nmax, x, p)
    weighted = table * (wq * w)[None, :]
    G = weighted @ table.T / (2.0 * np.pi)
    href = np.array([norm_h(n, p) for n in range(nmax + 1)])
    return G, href
