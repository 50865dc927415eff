"""Pure-Python theta kernels (fallback when the compiled core is absent).

Implements the same API as ``_theta_core``:

    theta_norm(tau, n_terms)                  -> complex
    theta_eval(z, tau, n_terms, norm)         -> complex
    theta_derivs(z, nmax, tau, n_terms, norm) -> list of complex, length nmax+1
    theta_many(zs, tau, n_terms, norm)        -> numpy array

The function computed is the odd entire function with derivative 1 at the
origin, zeros exactly on Z + tau*Z, and multipliers -1 under z -> z+1 and
-exp(-i*pi*tau - 2*i*pi*z) under z -> z+tau. It is evaluated as the sine
series sum_j (-1)^j q^{(j+1/2)^2} sin((2j+1) pi z) with q = exp(i pi tau),
normalized post hoc by the series derivative at 0. Arguments are reduced to
the fundamental cell via the two multiplier laws before summation, and the
accumulated multiplier is restored exactly (for derivatives, via the Leibniz
rule on the exponential prefactor).
"""

from __future__ import annotations

import cmath
from math import comb, pi

import numpy as np

BACKEND_NAME = "python"

_2PI = 2.0 * pi
_I = 1j


def theta_norm(tau: complex, n_terms: int) -> complex:
    """Derivative of the raw sine series at z = 0 (the normalizer)."""
    acc = 0.0 + 0.0j
    sign = 1.0
    for j in range(n_terms):
        acc += sign * cmath.exp(_I * pi * tau * (j + 0.5) ** 2) * (2 * j + 1) * pi
        sign = -sign
    return acc


def _reduce(z: complex, tau: complex):
    """Split z = z0 + m + n*tau with z0 in the fundamental cell.

    floor(x + 0.5) keeps the tie-breaking identical to the compiled core.
    """
    n = int(np.floor(z.imag / tau.imag + 0.5))
    w = z - n * tau
    m = int(np.floor(w.real + 0.5))
    return w - m, m, n


def _raw_derivs(z0: complex, nmax: int, tau: complex, n_terms: int):
    """Termwise derivatives of the raw series at a reduced argument."""
    out = [0.0 + 0.0j] * (nmax + 1)
    sign = 1.0
    for j in range(n_terms):
        a = _I * pi * tau * (j + 0.5) ** 2
        b = _I * (2 * j + 1) * pi * z0
        ep = cmath.exp(a + b)
        em = cmath.exp(a - b)
        w = (2 * j + 1) * pi
        wk = 1.0
        ik = 1.0 + 0.0j
        mk = 1.0 + 0.0j
        for k in range(nmax + 1):
            out[k] += sign * wk * (ik * ep - mk * em) / (2j)
            wk *= w
            ik *= _I
            mk *= -_I
        sign = -sign
    return out


def theta_derivs(z: complex, nmax: int, tau: complex, n_terms: int, norm: complex):
    """theta and its first nmax derivatives at z, as a list."""
    z0, m, n = _reduce(z, tau)
    raw = _raw_derivs(z0, nmax, tau, n_terms)
    if m == 0 and n == 0:
        return [r / norm for r in raw]
    mu = (-1) ** ((m + n) & 1) * cmath.exp(-_I * pi * n * n * tau - _I * _2PI * n * z0)
    c = -_I * _2PI * n
    out = []
    for k in range(nmax + 1):
        acc = 0.0 + 0.0j
        ck = 1.0 + 0.0j
        for l in range(k, -1, -1):
            acc += comb(k, k - l) * ck * raw[l]
            ck *= c
        out.append(mu * acc / norm)
    return out


def theta_eval(z: complex, tau: complex, n_terms: int, norm: complex) -> complex:
    z0, m, n = _reduce(z, tau)
    acc = 0.0 + 0.0j
    sign = 1.0
    for j in range(n_terms):
        a = _I * pi * tau * (j + 0.5) ** 2
        b = _I * (2 * j + 1) * pi * z0
        acc += sign * (cmath.exp(a + b) - cmath.exp(a - b)) / (2j)
        sign = -sign
    if m == 0 and n == 0:
        return acc / norm
    mu = (-1) ** ((m + n) & 1) * cmath.exp(-_I * pi * n * n * tau - _I * _2PI * n * z0)
    return mu * acc / norm


def theta_many(zs, tau: complex, n_terms: int, norm: complex):
    zs = np.asarray(zs, dtype=np.complex128)
    out = np.empty(zs.shape, dtype=np.complex128)
    flat_in = zs.ravel()
    flat_out = out.ravel()
    for i in range(flat_in.size):
        flat_out[i] = theta_eval(complex(flat_in[i]), tau, n_terms, norm)
    return out
