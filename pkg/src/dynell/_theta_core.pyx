# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled theta kernels. Same API and numerics as _theta_fallback; see
that module for the algorithm description."""

import numpy as np

cdef extern from "complex.h":
    double complex cexp(double complex) nogil

cdef extern from "math.h":
    double floor(double) nogil
    double M_PI

BACKEND_NAME = "cython"


cdef inline double complex _I() nogil:
    return 1j


def theta_norm(tau, n_terms):
    """Derivative of the raw sine series at z = 0 (the normalizer)."""
    cdef double complex t = tau
    cdef double complex acc = 0
    cdef double sign = 1.0
    cdef int j
    cdef int n = n_terms
    for j in range(n):
        acc = acc + sign * cexp(_I() * M_PI * t * (j + 0.5) * (j + 0.5)) * (2 * j + 1) * M_PI
        sign = -sign
    return complex(acc)


cdef inline void _reduce(double complex z, double complex tau,
                         double complex *z0, long *m, long *n) nogil:
    cdef double ni = floor(z.imag / tau.imag + 0.5)
    cdef double complex w = z - ni * tau
    cdef double mi = floor(w.real + 0.5)
    z0[0] = w - mi
    m[0] = <long> mi
    n[0] = <long> ni


cdef double complex _eval_reduced(double complex z0, double complex tau,
                                  int n_terms) nogil:
    cdef double complex acc = 0
    cdef double complex a, b
    cdef double sign = 1.0
    cdef int j
    for j in range(n_terms):
        a = _I() * M_PI * tau * (j + 0.5) * (j + 0.5)
        b = _I() * (2 * j + 1) * M_PI * z0
        acc = acc + sign * (cexp(a + b) - cexp(a - b)) / (2 * _I())
        sign = -sign
    return acc


def theta_eval(z, tau, n_terms, norm):
    cdef double complex zz = z
    cdef double complex t = tau
    cdef double complex nrm = norm
    cdef double complex z0, mu
    cdef long m = 0, n = 0
    _reduce(zz, t, &z0, &m, &n)
    cdef double complex val = _eval_reduced(z0, t, n_terms)
    if m == 0 and n == 0:
        return complex(val / nrm)
    mu = cexp(-_I() * M_PI * n * n * t - _I() * 2 * M_PI * n * z0)
    if (m + n) & 1:
        mu = -mu
    return complex(mu * val / nrm)


def theta_derivs(z, nmax, tau, n_terms, norm):
    """theta and its first nmax derivatives at z, as a list."""
    cdef double complex zz = z
    cdef double complex t = tau
    cdef double complex nrm = norm
    cdef int kmax = nmax
    cdef double complex z0, mu, a, b, ep, em, w, ik, mk, wk, c, ck, acc
    cdef long m = 0, n = 0
    cdef int j, k, l
    _reduce(zz, t, &z0, &m, &n)

    raw = np.zeros(kmax + 1, dtype=np.complex128)
    cdef double complex[::1] rawv = raw
    cdef double sign = 1.0
    for j in range(n_terms):
        a = _I() * M_PI * t * (j + 0.5) * (j + 0.5)
        b = _I() * (2 * j + 1) * M_PI * z0
        ep = cexp(a + b)
        em = cexp(a - b)
        w = (2 * j + 1) * M_PI
        wk = 1.0
        ik = 1.0
        mk = 1.0
        for k in range(kmax + 1):
            rawv[k] = rawv[k] + sign * wk * (ik * ep - mk * em) / (2 * _I())
            wk = wk * w
            ik = ik * _I()
            mk = mk * (-_I())
        sign = -sign

    if m == 0 and n == 0:
        return [complex(rawv[k] / nrm) for k in range(kmax + 1)]

    mu = cexp(-_I() * M_PI * n * n * t - _I() * 2 * M_PI * n * z0)
    if (m + n) & 1:
        mu = -mu
    c = -_I() * 2 * M_PI * n
    out = []
    cdef double binom
    for k in range(kmax + 1):
        acc = 0
        ck = 1.0
        binom = 1.0
        # Leibniz on exp(c*z) * theta(z0): sum_l C(k, k-l) c^(k-l) theta^(l)
        for l in range(k, -1, -1):
            acc = acc + binom * ck * rawv[l]
            ck = ck * c
            binom = binom * l / (k - l + 1)
        out.append(complex(mu * acc / nrm))
    return out


def theta_many(zs, tau, n_terms, norm):
    arr = np.ascontiguousarray(np.asarray(zs, dtype=np.complex128)).ravel()
    out = np.empty(arr.shape[0], dtype=np.complex128)
    cdef double complex[::1] src = arr
    cdef double complex[::1] dst = out
    cdef double complex t = tau
    cdef double complex nrm = norm
    cdef int nt = n_terms
    cdef Py_ssize_t i
    cdef double complex z0, mu, val
    cdef long m, n
    with nogil:
        for i in range(src.shape[0]):
            _reduce(src[i], t, &z0, &m, &n)
            val = _eval_reduced(z0, t, nt)
            if m != 0 or n != 0:
                mu = cexp(-_I() * M_PI * n * n * t - _I() * 2 * M_PI * n * z0)
                if (m + n) & 1:
                    mu = -mu
                val = mu * val
            dst[i] = val / nrm
    return out.reshape(np.asarray(zs).shape)
