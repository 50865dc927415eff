"""The explicit dynamical R-matrices on (C^2)x(C^2), the classical r-matrix,
the diagonal twist matrix, and the gauge conjugation by the factor phi.

Basis order is (v1 v1, v1 v-1, v-1 v1, v-1 v-1); site weight is +1 for v1
and -1 for v-1, and e = E_{1,-1}, f = E_{-1,1}, h = E_11 - E_{-1,-1}.

Every R-matrix entry is a signed ratio of factors theta(a*z + b*lam + c*gamma)
with small integer (a, b, c). The single factor table below is evaluated in
three modes: numerically, as a gamma-jet at fixed (z, lam) (for the gauge
equivalence and semiclassical expansions), and as a lambda-jet (for the
Taylor-definition cross-check of dynamical shifts).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .exceptions import DomainError, SingularityError
from .params import ModularParams
from .series import Jet, half_tanh_coeffs, shift_jet
from .theta import ThetaFunction, get_theta
from .theta import theta_with_capability

KINDS = ("rminus", "rplus", "rbar")


@dataclass(frozen=True)
class TensorOperator:
    """Complex matrix on (C^2)^(tensor n), weight basis, v1 first."""

    sites: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2**self.sites, 2**self.sites):
            raise DomainError(f"matrix shape {m.shape} does not match sites={self.sites}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, sites: int) -> "TensorOperator":
        return cls(sites, np.eye(2**sites, dtype=np.complex128))

    def __matmul__(self, other: "TensorOperator") -> "TensorOperator":
        if self.sites != other.sites:
            raise DomainError("site-count mismatch in operator product")
        return TensorOperator(self.sites, self.matrix @ other.matrix)

    def max_abs_diff(self, other: "TensorOperator") -> float:
        return float(np.abs(self.matrix - other.matrix).max())


def site_weights(index: int, sites: int) -> tuple[int, ...]:
    """h-eigenvalues (+1/-1) of each site for a basis index."""
    return tuple(1 - 2 * ((index >> (sites - 1 - k)) & 1) for k in range(sites))


def weight_sector_leakage(op: TensorOperator) -> float:
    """Largest entry connecting different total-weight sectors."""
    n = op.sites
    worst = 0.0
    for r in range(2**n):
        wr = sum(site_weights(r, n))
        for c in range(2**n):
            if sum(site_weights(c, n)) != wr:
                worst = max(worst, abs(op.matrix[r, c]))
    return worst


# -- factor tables ---------------------------------------------------------
# entry -> (sign, numerator factors, denominator factors); a factor (a, b, c)
# stands for theta(a*z + b*lam + c*gamma)

_TABLES = {
    "rminus": {
        (0, 0): (1, [], []),
        (3, 3): (1, [], []),
        (1, 1): (1, [(1, 0, 0)], [(1, 0, 1)]),
        (2, 2): (1, [(0, 1, -1), (0, 1, 1), (1, 0, 0)], [(0, 1, 0), (0, 1, 0), (1, 0, 1)]),
        (1, 2): (1, [(1, 1, 0), (0, 0, 1)], [(1, 0, 1), (0, 1, 0)]),
        (2, 1): (-1, [(1, -1, 0), (0, 0, 1)], [(1, 0, 1), (0, 1, 0)]),
    },
    "rplus": {
        (0, 0): (1, [], []),
        (3, 3): (1, [], []),
        (1, 1): (1, [(1, 0, 0), (0, 1, -1), (0, 1, 1)], [(1, 0, -1), (0, 1, 0), (0, 1, 0)]),
        (2, 2): (1, [(1, 0, 0)], [(1, 0, -1)]),
        (1, 2): (-1, [(1, 1, 0), (0, 0, 1)], [(1, 0, -1), (0, 1, 0)]),
        (2, 1): (1, [(1, -1, 0), (0, 0, 1)], [(1, 0, -1), (0, 1, 0)]),
    },
    "rbar": {
        (0, 0): (1, [], []),
        (3, 3): (1, [], []),
        (1, 1): (1, [(0, 1, 1), (1, 0, 0)], [(0, 1, 0), (1, 0, -1)]),
        (2, 2): (1, [(0, 1, -1), (1, 0, 0)], [(0, 1, 0), (1, 0, -1)]),
        (1, 2): (-1, [(1, 1, 0), (0, 0, 1)], [(0, 1, 0), (1, 0, -1)]),
        (2, 1): (-1, [(1, -1, 0), (0, 0, 1)], [(0, -1, 0), (1, 0, -1)]),
    },
}


def _factor_label(a: int, b: int, c: int) -> str:
    parts = []
    for coef, name in ((a, "z"), (b, "lambda"), (c, "gamma")):
        if coef == 0:
            continue
        sign = "+" if coef > 0 and parts else ("-" if coef < 0 else "")
        mag = abs(coef)
        parts.append(f"{sign}{'' if mag == 1 else mag}{name}")
    return "theta(" + ("0" if not parts else "".join(parts)) + ")"


def _eval_numeric(kind: str, th: ThetaFunction, z: complex, lam: complex, gamma: complex):
    out = np.zeros((4, 4), dtype=np.complex128)
    for (r, c), (sign, num, den) in _TABLES[kind].items():
        val = complex(sign)
        for a, b, cc in num:
            val *= th.value(a * z + b * lam + cc * gamma)
        for a, b, cc in den:
            arg = a * z + b * lam + cc * gamma
            if th.lattice_distance(arg) < 1e-6:
                raise SingularityError(
                    f"{_factor_label(a, b, cc)} vanishes at z={z:.6g}, lambda={lam:.6g}",
                    factor=_factor_label(a, b, cc),
                )
            val /= th.value(arg)
        out[r, c] = val
    return out


def _eval_jets(kind: str, th: ThetaFunction, z: complex, lam: complex, gamma: complex,
               order: int, wrt: str):
    """Entrywise jets in gamma (wrt='gamma') or in a lambda offset (wrt='lambda')."""
    out = np.empty((4, 4), dtype=object)
    one = Jet.constant(wrt, 1.0, order)
    zero = Jet.constant(wrt, 0.0, order)
    out[:] = zero
    for (r, c), (sign, num, den) in _TABLES[kind].items():
        val = one * complex(sign)
        for group, invert in ((num, False), (den, True)):
            for a, b, cc in group:
                if wrt == "gamma":
                    base = a * z + b * lam
                    mult = cc
                else:
                    base = a * z + b * lam + cc * gamma
                    mult = b
                if mult == 0:
                    j = Jet.constant(wrt, th.value(base), order)
                else:
                    j = shift_jet(th.derivs(base, order), mult, order, param=wrt)
                if invert:
                    if th.lattice_distance(base) < 1e-6:
                        raise SingularityError(
                            f"{_factor_label(a, b, cc)} is singular at expansion base "
                            f"{base:.6g}",
                            factor=_factor_label(a, b, cc),
                        )
                    val = val / j
                else:
                    val = val * j
        out[r, c] = val
    return out


# -- public constructors ---------------------------------------------------


def _build(kind: str, z: complex, lam: complex, p: ModularParams) -> TensorOperator:
    th = get_theta(p)
    return TensorOperator(2, _eval_numeric(kind, th, complex(z), complex(lam), p.gamma))


def r_minus(z: complex, lam: complex, p: ModularParams) -> TensorOperator:
    """Six-entry dynamical R-matrix with theta(z+gamma) denominators."""
    return _build("rminus", z, lam, p)


def r_plus(z: complex, lam: complex, p: ModularParams) -> TensorOperator:
    """The inverse family of r_minus, in explicit form."""
    return _build("rplus", z, lam, p)


def r_bar(z: complex, lam: complex, p: ModularParams) -> TensorOperator:
    """Felder-normalized R-matrix (both off-diagonal entries negative)."""
    return _build("rbar", z, lam, p)


def rmatrix(kind: str, z: complex, lam: complex, p: ModularParams) -> TensorOperator:
    if kind not in KINDS:
        raise DomainError(f"unknown R-matrix kind {kind!r}")
    return _build(kind, z, lam, p)


def rmatrix_gamma_jets(kind: str, z: complex, lam: complex, order: int, p: ModularParams):
    """4x4 array of gamma-jets of the entries, expanded at gamma = 0."""
    th = theta_with_capability(p, order + 1)
    return _eval_jets(kind, th, complex(z), complex(lam), p.gamma, order, "gamma")


def rmatrix_lambda_jets(kind: str, z: complex, lam: complex, order: int, p: ModularParams):
    """4x4 array of jets of the entries in a lambda offset."""
    th = theta_with_capability(p, order + 1)
    return _eval_jets(kind, th, complex(z), complex(lam), p.gamma, order, "lambda")


def t_matrix(lam: complex) -> TensorOperator:
    """Diagonal twist diag(exp(-i pi lam), exp(i pi lam)) on one site."""
    lam = complex(lam)
    return TensorOperator(
        1, np.diag([np.exp(-1j * np.pi * lam), np.exp(1j * np.pi * lam)])
    )


def classical_r(z: complex, lam: complex, p: ModularParams) -> TensorOperator:
    """Classical dynamical r-matrix (finite part, difference variable z).

    (1/2)(theta'/theta)(z) h@h + e@f theta(z+lam)/(theta(z)theta(lam))
    + f@e theta(z-lam)/(theta(z)theta(-lam)).
    """
    th = get_theta(p)
    z = complex(z)
    lam = complex(lam)
    for arg, label in ((z, "z"), (lam, "lambda")):
        if th.lattice_distance(arg) < 1e-6:
            raise SingularityError(f"theta({label}) vanishes at {arg:.6g}", factor=label)
    m = np.zeros((4, 4), dtype=np.complex128)
    ld = th.log_deriv(z)
    m += 0.5 * ld * np.diag([1.0, -1.0, -1.0, 1.0])
    m[1, 2] = th.value(z + lam) / (th.value(z) * th.value(lam))
    m[2, 1] = th.value(z - lam) / (th.value(z) * th.value(-lam))
    return TensorOperator(2, m)


# -- the gauge factor ------------------------------------------------------


def phi_ratio(u: complex, u_prime: complex, lam: complex, order: int,
              p: ModularParams) -> Jet:
    """gamma-jet of phi(lam - gamma*u)/phi(lam - gamma*u_prime).

    Built from the log-derivative jets of phi; the theta^(1/2) prefactors
    cancel exactly, so only integer theta data enters.
    """
    if u == u_prime:
        return Jet.constant("gamma", 1.0, order)
    th = theta_with_capability(p, order + 1)
    B = th.log_deriv_series(lam, max(order - 1, 0))
    t = half_tanh_coeffs(max((order + 1) // 2, 1))
    s, sp = -complex(u), -complex(u_prime)
    acc = Jet.constant("gamma", 0.0, order)
    for k in range(1, order + 1):
        # gamma-jet of the (k-1)-th derivative of phi'/phi
        dcoef = np.zeros(order + 1, dtype=np.complex128)
        dcoef[0] = 0.5 * B[k - 1]
        for j in range(1, len(t) + 1):
            pw = 2 * j - 1
            idx = 2 * j + k - 2
            if pw <= order and idx < len(B):
                dcoef[pw] = -t[j - 1] * B[idx]
        term = Jet("gamma", dcoef).mul_power(k) * ((s**k - sp**k) / factorial(k))
        acc = acc + term
    return acc.exp()


def gauge_conjugate(z: complex, lam: complex, order: int, p: ModularParams):
    """gamma-jets of phi(lam-gamma h^(2)) R+ (z,lam) phi(lam-gamma h^(1))^(-1).

    Each entry of the plus R-matrix is multiplied by the phi ratio fixed by
    the row's site-2 weight and the column's site-1 weight. The result must
    match the gamma-expansion of the rbar entries.
    """
    rp = rmatrix_gamma_jets("rplus", z, lam, order, p)
    out = np.empty((4, 4), dtype=object)
    ratios = {}
    for r in range(4):
        w_row = site_weights(r, 2)[1]
        for c in range(4):
            w_col = site_weights(c, 2)[0]
            key = (w_row, w_col)
            if key not in ratios:
                ratios[key] = phi_ratio(w_row, w_col, lam, order, p)
            out[r, c] = rp[r, c] * ratios[key]
    return out


def gauge_residual(z: complex, lam: complex, order: int, p: ModularParams) -> float:
    """Max per-order relative coefficient discrepancy between the conjugated
    plus family and the gamma-expansion of rbar, through the given order."""
    conj = gauge_conjugate(z, lam, order, p)
    rb = rmatrix_gamma_jets("rbar", z, lam, order, p)
    worst = 0.0
    for r in range(4):
        for c in range(4):
            scale = np.maximum(1.0, np.abs(rb[r, c].coeffs))
            worst = max(
                worst, float((np.abs(conj[r, c].coeffs - rb[r, c].coeffs) / scale).max())
            )
    return worst
