"""Pole-sector bases at the origin, their polynomial duals under the residue
pairing, the projection onto a pole sector parallel to the regular series,
and the generating-kernel identities.

The sector attached to a parameter lam (off the lattice) is spanned by the
derivatives of theta(lam + z)/theta(z); its elements have poles of order
i+1 at 0 with leading Laurent coefficient theta(lam) * (-1)^i * i!. The
zero sector is spanned by the derivatives of theta'/theta. Polynomials
e^0, e^1, ... dual to these under res_0(f*g dz) exist with valuation(e^i)=i
because the pairing matrix is lower triangular.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import CapabilityError, ConditioningError, DomainError, PrecisionError
from .params import ModularParams
from .series import LaurentSeries, pairing
from .theta import theta_with_capability

COND_LIMIT = 1e12
DUAL_GUARD_COLS = 4  # extra dual columns stabilizing the high-degree coefficients


def sector_basis(lam: complex, n: int, p: ModularParams) -> list:
    """Laurent expansions at 0 of the i-th derivatives of
    theta(lam+z)/theta(z), i = 0..n-1, each valid to degree >= n."""
    th = theta_with_capability(p, 2 * n + 2)
    th.check_regular(lam, label="lambda")
    order = 2 * n + 2
    num = th.taylor_at(lam, order)
    den_inv = th.taylor_at(0.0, order).invert()
    e0 = num * den_inv
    out = [e0]
    for _ in range(1, n):
        out.append(out[-1].derive())
    return out


def zero_sector_basis(n: int, p: ModularParams) -> list:
    """Laurent expansions at 0 of the j-th derivatives of theta'/theta."""
    th = theta_with_capability(p, 2 * n + 3)
    order = 2 * n + 3
    t = th.taylor_at(0.0, order)
    e0 = t.derive() * t.invert()
    out = [e0]
    for _ in range(1, n):
        out.append(out[-1].derive())
    return out


@dataclass(frozen=True)
class KernelBasis:
    """Paired bases to truncation order n: primal pole-sector elements and
    their polynomial duals (coefficient vectors, valuation(e^i) = i)."""

    lam: complex | None  # None marks the zero sector
    order: int
    primal: tuple
    dual: tuple
    condition_number: float


def dual_basis(lam: complex | None, n: int, p: ModularParams) -> KernelBasis:
    """Solve for polynomials dual to the sector basis under the residue
    pairing.

    The pairing matrix M[j, m] = res_0(z^m e_j dz) is lower triangular with
    diagonal theta(lam) (-1)^j j! (or (-1)^j j! in the zero sector), so the
    solve is stable after row equilibration; its condition number is
    reported and gated.
    """
    n_poly = n + DUAL_GUARD_COLS
    primal = (
        zero_sector_basis(n_poly, p) if lam is None else sector_basis(lam, n_poly, p)
    )
    m = np.zeros((n_poly, n_poly), dtype=np.complex128)
    for j in range(n_poly):
        for col in range(n_poly):
            # res_0(z^col * e_j) is the coefficient of z^(-col-1)
            if -col - 1 >= primal[j].min_degree:
                m[j, col] = primal[j].coefficient(-col - 1)
    scale = np.abs(m).max(axis=1)
    if not np.all(scale > 0):
        raise ConditioningError("pairing matrix has a zero row", float("inf"))
    ms = m / scale[:, np.newaxis]
    cond = float(np.linalg.cond(ms))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ConditioningError(
            f"dual-basis solve too ill-conditioned (cond = {cond:.3e}); "
            "the sector parameter is too close to the lattice",
            cond,
        )
    # M C^T = I  =>  dual coefficient rows are the columns of M^{-1}
    cmat = np.linalg.solve(ms, np.eye(n_poly) / scale[:, np.newaxis]).T
    return KernelBasis(
        lam=lam,
        order=n,
        primal=tuple(primal[:n]),
        dual=tuple(cmat[i] for i in range(n)),
        condition_number=cond,
    )


def duality_deviation(basis: KernelBasis) -> float:
    """Max |pairing(e^i, e_j) - delta_ij| over i, j < order."""
    worst = 0.0
    for i in range(basis.order):
        poly = LaurentSeries(0, basis.dual[i])
        for j in range(basis.order):
            val = pairing(poly, basis.primal[j])
            worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
    return worst


def _ratio_taylor(z: complex, lam: complex | None, n: int, p: ModularParams) -> np.ndarray:
    """u-Taylor coefficients of theta(lam+z+u)/theta(z+u) (sector lam) or of
    (theta'/theta)(z+u) (zero sector), to order n-1."""
    th = theta_with_capability(p, n + 1)
    th.check_regular(z, label="z")
    if lam is None:
        b = th.log_deriv_series(z, n - 1)
        return np.array([b[k] / factorial(k) for k in range(n)], dtype=np.complex128)
    fact = np.array([factorial(k) for k in range(n)], dtype=np.complex128)
    num = th.derivs(lam + z, n - 1) / fact
    den = th.derivs(z, n - 1) / fact
    out = np.empty(n, dtype=np.complex128)
    for j in range(n):
        s = num[j]
        for i in range(j):
            s -= out[i] * den[j - i]
        out[j] = s / den[0]
    return out


def kernel_sum_residual(
    lam: complex | None, z: complex, n: int, p: ModularParams
) -> float:
    """Scaled max coefficient discrepancy of the truncated kernel sum.

    sum_{i<n} e_i(z) e^i(w), a polynomial in w, is compared with the
    w-Taylor expansion (around 0, to order n-1) of the closed kernel:
    theta(z-w+lam)/(theta(z-w) theta(lam)) in the lam sector and
    (theta'/theta)(z-w) in the zero sector. Because valuation(e^i) = i the
    truncation is exact through w-order n-1. The discrepancy is scaled by
    max(1, |kernel coefficients|).
    """
    basis = dual_basis(lam, n, p)
    ratio = _ratio_taylor(z, lam, n, p)
    e_at_z = np.array(
        [ratio[i] * factorial(i) for i in range(n)], dtype=np.complex128
    )
    n_poly = len(basis.dual[0])
    lhs = np.zeros(n_poly, dtype=np.complex128)
    for i in range(n):
        lhs += e_at_z[i] * basis.dual[i]
    signs = np.array([(-1.0) ** k for k in range(n)])
    if lam is None:
        rhs = ratio * signs
    else:
        th = theta_with_capability(p, 2)
        rhs = ratio * signs / th.value(lam)
    scale = max(1.0, float(np.abs(rhs).max()))
    return float(np.abs(lhs[:n] - rhs).max()) / scale


def project_pole_part(
    eps: LaurentSeries, mu: complex, n: int, p: ModularParams
) -> tuple:
    """Split eps into (pi, rho): pi in the -mu sector matching the full pole
    part of eps, rho regular.

    The peel is triangular from the highest pole down; the projection is
    idempotent and linear by construction.
    """
    pole_order = max(0, -eps.min_degree)
    if pole_order >= n:
        raise CapabilityError(
            f"pole order {pole_order} exceeds the basis truncation {n}"
        )
    if pole_order == 0:
        zero = LaurentSeries(0, [], eps.order_valid)
        return zero, eps
    basis = sector_basis(-mu, pole_order, p)
    remaining = eps
    pi = LaurentSeries(0, [], eps.order_valid)
    for d in range(pole_order, 0, -1):
        lead = basis[d - 1].coefficient(-d)
        c = remaining.coefficient(-d) / lead
        pi = pi + basis[d - 1].scale(c)
        remaining = remaining - basis[d - 1].scale(c)
    # the pole part cancels exactly up to roundoff; drop the dust
    scale = max(1.0, float(np.abs(eps.coeffs).max()) if not eps.is_zero else 1.0)
    rho = _drop_pole_dust(remaining, scale)
    return pi, rho


def _drop_pole_dust(s: LaurentSeries, scale: float) -> LaurentSeries:
    if s.min_degree >= 0 or s.is_zero:
        return s
    k = -s.min_degree
    dust = np.abs(s.coeffs[:k]).max() if k <= len(s.coeffs) else 0.0
    if dust > 1e-9 * scale:
        raise PrecisionError(
            f"pole part failed to cancel (residual {dust:.3e} at scale {scale:.3e})"
        )
    return LaurentSeries(0, s.coeffs[k:], s.order_valid)
