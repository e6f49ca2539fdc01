"""Shared generators and independent oracles for the test suite."""

import numpy as np

from newton2pep import COEFF_KEYS, MatrixPoly2, NewtonNodes, complex_normal


def random_coeffs(rng, n):
    return {key: complex_normal(rng, n, n) for key in COEFF_KEYS}


def random_monomial(rng, n):
    return MatrixPoly2.monomial(random_coeffs(rng, n))


def random_nodes(rng):
    z = complex_normal(rng, 4)
    return NewtonNodes(*z)


def random_newton(rng, n, nodes=None):
    return MatrixPoly2.newton(random_coeffs(rng, n), nodes or random_nodes(rng))


def scalar_monomial(a20, a11, a02, a10, a01, a00):
    c = {(2, 0): [[a20]], (1, 1): [[a11]], (0, 2): [[a02]],
         (1, 0): [[a10]], (0, 1): [[a01]], (0, 0): [[a00]]}
    return MatrixPoly2.monomial(c)


def scalar_newton(a20, a11, a02, a10, a01, a00, nodes=None):
    return scalar_monomial(a20, a11, a02, a10, a01, a00).newton_partner(
        nodes or NewtonNodes())


def annulus_scalar(rng, count=1):
    r = rng.uniform(0.5, 2.0, count)
    th = rng.uniform(0.0, 2 * np.pi, count)
    z = r * np.exp(1j * th)
    return z[0] if count == 1 else z


def cofactor_det(a):
    """Determinant by cofactor expansion along the first row (oracle)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    total = 0j
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1) ** j * a[0, j] * cofactor_det(minor)
    return total


def kron_oracle(a, b):
    """Index-loop Kronecker product (oracle)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            out[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = a[i, j] * b
    return out
