"""Global parameter records: modular data and theta evaluation settings.

Conventions used throughout the package: the dynamical step is ``gamma``,
the deformation parameter is ``hbar = -gamma``, the half step is
``eta = gamma/2``, and the nome is ``q = exp(2*pi*i*tau)``. All series
solvers work in hbar internally; callers convert with these fields.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .exceptions import ParameterError

_TAIL_LOG10 = 34.0  # dropped-tail budget, in decimal digits, for the theta series


def _terms_needed(im_tau: float, deriv_max: int) -> int:
    """Smallest term count keeping the theta-series tail below 1e-34.

    Relative to the leading term at a reduced argument, term n is bounded by
    exp(-pi*Im(tau)*n*(n+1)) * ((2n+1)*pi)**k for a k-th derivative; include
    the worst k = deriv_max.
    """
    budget = _TAIL_LOG10 * math.log(10.0)
    n = 1
    while True:
        margin = math.pi * im_tau * n * (n + 1) - deriv_max * math.log((2 * n + 1) * math.pi)
        if margin >= budget:
            return n + 1
        n += 1
        if n > 4096:
            raise ParameterError(f"theta series does not converge fast enough (Im tau = {im_tau})")


@dataclass(frozen=True)
class ThetaConfig:
    """Evaluation settings for the theta backend.

    series_terms=0 means "choose automatically from tau and deriv_max" when
    the config is bound to modular parameters.
    """

    series_terms: int = 0
    reduce_domain: bool = True
    deriv_max: int = 16

    def __post_init__(self):
        if self.series_terms < 0:
            raise ParameterError("series_terms must be >= 0 (0 selects automatically)")
        if self.deriv_max < 0:
            raise ParameterError("deriv_max must be >= 0")

    def resolved_terms(self, tau: complex) -> int:
        if self.series_terms:
            return self.series_terms
        return _terms_needed(tau.imag, self.deriv_max)


@dataclass(frozen=True)
class ModularParams:
    """Modular parameter, dynamical step, and the derived constants.

    Invariants: Im(tau) > 0, hbar = -gamma and eta = gamma/2 exactly,
    |q_nome| < 1.
    """

    tau: complex
    gamma: complex
    hbar: complex = field(init=False)
    eta: complex = field(init=False)
    q_nome: complex = field(init=False)

    def __post_init__(self):
        tau = complex(self.tau)
        gamma = complex(self.gamma)
        if not tau.imag > 0:
            raise ParameterError(f"Im(tau) must be positive, got tau = {tau}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "hbar", -gamma)
        object.__setattr__(self, "eta", gamma / 2)
        object.__setattr__(self, "q_nome", cmath.exp(2j * cmath.pi * tau))
        # |q| < 1 is implied by Im(tau) > 0; assert the invariant anyway
        if not abs(self.q_nome) < 1:
            raise ParameterError(f"|q_nome| must be < 1, got {abs(self.q_nome)}")

    def lattice_distance(self, z: complex) -> float:
        """Distance from z to the period lattice Z + tau*Z."""
        n = round(z.imag / self.tau.imag)
        w = z - n * self.tau
        w -= round(w.real)
        best = abs(w)
        if best == 0.0:
            return 0.0
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                d = abs(w - dm - dn * self.tau)
                if d < best:
                    best = d
        return best


DEFAULT_TAU = 0.75j
DEFAULT_GAMMA = 0.05 + 0j


def default_params(gamma: complex = DEFAULT_GAMMA, tau: complex = DEFAULT_TAU) -> ModularParams:
    return ModularParams(tau=tau, gamma=gamma)
