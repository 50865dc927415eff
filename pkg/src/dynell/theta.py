"""The normalized elliptic theta function and its derived quantities.

``theta`` is the unique entire function with theta'(0) = 1, zeros exactly on
the lattice L = Z + tau*Z, and the multiplier laws

    theta(z + 1)   = -theta(z)
    theta(z + tau) = -exp(-i*pi*tau) * exp(-2*i*pi*z) * theta(z).

It is odd. Everything else the package evaluates is built from it: the
logarithmic derivative theta'/theta (simple pole, residue 1 at lattice
points), the even lattice-periodic function wp = -(theta'/theta)', and local
Taylor/Laurent data at arbitrary points.

Derivatives are always computed by termwise differentiation of the defining
series, never by finite differences.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._backend import BACKEND, core
from .exceptions import CapabilityError, SingularityError
from .params import ModularParams, ThetaConfig

POLE_GUARD = 1e-6  # distance-to-lattice threshold for log_deriv / wp


class ThetaFunction:
    """Theta evaluator bound to modular parameters and evaluation settings."""

    def __init__(self, params: ModularParams, config: ThetaConfig | None = None):
        self.params = params
        self.config = config or ThetaConfig()
        self.n_terms = self.config.resolved_terms(params.tau)
        self._tau = params.tau
        self._norm = core.theta_norm(self._tau, self.n_terms)

    # -- raw evaluations -------------------------------------------------

    def value(self, z: complex) -> complex:
        return core.theta_eval(complex(z), self._tau, self.n_terms, self._norm)

    def values(self, zs) -> np.ndarray:
        return core.theta_many(zs, self._tau, self.n_terms, self._norm)

    def derivs(self, z: complex, nmax: int) -> np.ndarray:
        """theta^(k)(z) for k = 0..nmax."""
        if nmax > self.config.deriv_max:
            raise CapabilityError(
                f"derivative order {nmax} exceeds deriv_max = {self.config.deriv_max}"
            )
        return np.asarray(
            core.theta_derivs(complex(z), nmax, self._tau, self.n_terms, self._norm),
            dtype=np.complex128,
        )

    def deriv(self, z: complex, n: int) -> complex:
        if n == 0:
            return self.value(z)
        return complex(self.derivs(z, n)[n])

    # -- singularity guard -----------------------------------------------

    def lattice_distance(self, z: complex) -> float:
        return self.params.lattice_distance(complex(z))

    def check_regular(self, z: complex, label: str = "z", guard: float = POLE_GUARD) -> None:
        d = self.lattice_distance(z)
        if d < guard:
            raise SingularityError(
                f"theta({label}) vanishes: argument {complex(z):.6g} is within "
                f"{d:.2e} of the lattice",
                factor=label,
            )

    # -- derived quantities ----------------------------------------------

    def log_deriv(self, z: complex) -> complex:
        """theta'(z)/theta(z); simple pole with residue 1 on the lattice."""
        self.check_regular(z)
        d = self.derivs(z, 1)
        return complex(d[1] / d[0])

    def log_deriv_series(self, a: complex, kmax: int) -> np.ndarray:
        """B_k(a) = (log theta)^(k+1)(a) for k = 0..kmax.

        Computed by dividing the Taylor series of theta' by that of theta at
        a regular point a, so that high orders stay well conditioned.
        """
        self.check_regular(a)
        t = self.derivs(a, kmax + 1)
        fact = np.cumprod(np.concatenate(([1.0], np.arange(1, kmax + 2))))
        tc = t / fact  # Taylor coefficients of theta at a
        tp = tc[1:] * np.arange(1, kmax + 2)  # Taylor coefficients of theta'
        d = np.empty(kmax + 1, dtype=np.complex128)
        for j in range(kmax + 1):
            s = tp[j]
            for i in range(j):
                s -= d[i] * tc[j - i]
            d[j] = s / tc[0]
        return d * fact[: kmax + 1]

    def wp(self, z: complex) -> complex:
        """-(theta'/theta)'(z): even, fully L-periodic, double pole at L."""
        return complex(-self.log_deriv_series(z, 1)[1])

    def taylor_at(self, a: complex, order: int):
        """Taylor expansion of theta at a, as a LaurentSeries in the local variable."""
        from .series import LaurentSeries

        t = self.derivs(a, order)
        fact = np.cumprod(np.concatenate(([1.0], np.arange(1, order + 1))))
        return LaurentSeries(0, t / fact, order_valid=order)


@lru_cache(maxsize=32)
def get_theta(params: ModularParams, config: ThetaConfig | None = None) -> ThetaFunction:
    return ThetaFunction(params, config)


def theta_with_capability(params: ModularParams, nmax: int) -> ThetaFunction:
    """A theta evaluator able to produce at least nmax derivatives.

    Solvers whose internal expansions exceed the default deriv_max use this
    to raise their own capability without touching caller configuration.
    """
    base = ThetaConfig()
    if nmax <= base.deriv_max:
        return get_theta(params, base)
    return get_theta(params, ThetaConfig(deriv_max=nmax))


# -- module-level convenience wrappers ------------------------------------


def theta(z: complex, p: ModularParams, config: ThetaConfig | None = None) -> complex:
    return get_theta(p, config).value(z)


def theta_deriv(z: complex, n: int, p: ModularParams, config: ThetaConfig | None = None) -> complex:
    return get_theta(p, config).deriv(z, n)


def log_deriv(z: complex, p: ModularParams, config: ThetaConfig | None = None) -> complex:
    return get_theta(p, config).log_deriv(z)


def wp(z: complex, p: ModularParams, config: ThetaConfig | None = None) -> complex:
    return get_theta(p, config).wp(z)


def taylor_at(a: complex, order: int, p: ModularParams, config: ThetaConfig | None = None):
    return get_theta(p, config).taylor_at(a, order)


__all__ = [
    "BACKEND",
    "POLE_GUARD",
    "ThetaFunction",
    "get_theta",
    "theta_with_capability",
    "theta",
    "theta_deriv",
    "log_deriv",
    "wp",
    "taylor_at",
]
