"""Quadratic bivariate matrix polynomials tagged with a scalar basis.

A polynomial is a sum of six n x n coefficient blocks weighted by the scalar
basis functions of total degree at most two in (lambda, mu). Two bases are
supported:

* monomial:  1, lambda, mu, lambda^2, lambda*mu, mu^2
* Newton, on nodes (alpha1, alpha2, beta1, beta2):

      n_0 = 1, n_1 = lambda - alpha1, n_2 = n_1 * (lambda - alpha2)
      m_0 = 1, m_1 = mu - beta1,      m_2 = m_1 * (mu - beta2)

Nodes may coincide; the Newton basis degenerates gracefully, and with all
nodes zero it reduces to the monomial basis exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BasisMismatchError
from .linalg import as_matrix, freeze

MONOMIAL = "monomial"
NEWTON = "newton"

# Coefficient keys (i, j) for the lambda-degree-i, mu-degree-j basis function.
# The order matches the six-vector returned by monomial_six / newton_six.
COEFF_KEYS = ((2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0))

__all__ = [
    "MONOMIAL",
    "NEWTON",
    "COEFF_KEYS",
    "NewtonNodes",
    "newton_scalars",
    "monomial_triple",
    "newton_triple",
    "monomial_six",
    "newton_six",
    "MatrixPoly2",
]


@dataclass(frozen=True)
class NewtonNodes:
    """Interpolation nodes defining the Newton basis. Nodes may coincide."""

    alpha1: complex = 0j
    alpha2: complex = 0j
    beta1: complex = 0j
    beta2: complex = 0j

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            value = complex(getattr(self, name))
            if not (np.isfinite(value.real) and np.isfinite(value.imag)):
                raise ValueError(f"node {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha1, self.alpha2, self.beta1, self.beta2)

    @property
    def is_zero(self) -> bool:
        return all(z == 0 for z in self.as_tuple())


def newton_scalars(nodes: NewtonNodes, lam: complex, mu: complex):
    """Scalar Newton basis values (n0, n1, n2, m0, m1, m2) at (lam, mu).

    n2 and m2 are computed through the multiplicative recurrence
    n2 = n1 * (lam - alpha2), m2 = m1 * (mu - beta2), so the recurrence holds
    exactly as evaluated in floating point.
    """
    n1 = lam - nodes.alpha1
    n2 = n1 * (lam - nodes.alpha2)
    m1 = mu - nodes.beta1
    m2 = m1 * (mu - nodes.beta2)
    return (1.0 + 0j, n1, n2, 1.0 + 0j, m1, m2)


def monomial_triple(lam: complex, mu: complex) -> np.ndarray:
    """The vector (lambda, mu, 1)."""
    return np.array([lam, mu, 1.0], dtype=complex)


def newton_triple(nodes: NewtonNodes, lam: complex, mu: complex) -> np.ndarray:
    """The vector (n1(lambda), m1(mu), 1)."""
    return np.array([lam - nodes.alpha1, mu - nodes.beta1, 1.0], dtype=complex)


def monomial_six(lam: complex, mu: complex) -> np.ndarray:
    """Degree-two monomials (lambda^2, lambda*mu, mu^2, lambda, mu, 1)."""
    return np.array([lam * lam, lam * mu, mu * mu, lam, mu, 1.0], dtype=complex)


def newton_six(nodes: NewtonNodes, lam: complex, mu: complex) -> np.ndarray:
    """Degree-two Newton basis (n2, n1*m1, m2, n1, m1, 1).

    With all nodes zero this equals ``monomial_six`` entry for entry.
    """
    _, n1, n2, _, m1, m2 = newton_scalars(nodes, lam, mu)
    return np.array([n2, n1 * m1, m2, n1, m1, 1.0], dtype=complex)


@dataclass(frozen=True)
class MatrixPoly2:
    """Quadratic two-parameter matrix polynomial with a basis tag.

    ``coeffs`` maps (i, j) in COEFF_KEYS to the n x n block multiplying the
    basis function of lambda-degree i and mu-degree j. All six blocks are
    stored explicitly (zero blocks included).
    """

    n: int
    basis: str
    coeffs: dict
    nodes: NewtonNodes | None = field(default=None)

    @classmethod
    def monomial(cls, coeffs) -> "MatrixPoly2":
        return cls._build(MONOMIAL, coeffs, None)

    @classmethod
    def newton(cls, coeffs, nodes: NewtonNodes) -> "MatrixPoly2":
        if not isinstance(nodes, NewtonNodes):
            nodes = NewtonNodes(*nodes)
        return cls._build(NEWTON, coeffs, nodes)

    @classmethod
    def _build(cls, basis, coeffs, nodes) -> "MatrixPoly2":
        missing = [k for k in COEFF_KEYS if k not in coeffs]
        if missing:
            raise ValueError(f"missing coefficient blocks: {missing}")
        first = np.atleast_2d(np.asarray(coeffs[COEFF_KEYS[0]], dtype=complex))
        n = first.shape[0]
        clean = {}
        for key in COEFF_KEYS:
            block = np.atleast_2d(np.asarray(coeffs[key], dtype=complex))
            clean[key] = freeze(as_matrix(block, n, n, name=f"coefficient {key}"))
        return cls(n=n, basis=basis, coeffs=clean, nodes=nodes)

    def coeff(self, i: int, j: int) -> np.ndarray:
        return self.coeffs[(i, j)]

    def basis_weights(self, lam: complex, mu: complex) -> np.ndarray:
        """Six scalar basis values at (lam, mu), ordered like COEFF_KEYS."""
        if self.basis == MONOMIAL:
            return monomial_six(lam, mu)
        return newton_six(self.nodes, lam, mu)

    def eval(self, lam: complex, mu: complex) -> np.ndarray:
        """Value of the polynomial at (lam, mu) as an n x n matrix."""
        w = self.basis_weights(lam, mu)
        out = np.zeros((self.n, self.n), dtype=complex)
        for weight, key in zip(w, COEFF_KEYS):
            out += weight * self.coeffs[key]
        return out

    def __call__(self, lam: complex, mu: complex) -> np.ndarray:
        return self.eval(lam, mu)

    def to_monomial(self) -> "MatrixPoly2":
        """Expand a Newton-tagged polynomial into the monomial basis.

        Uses the expansions
            n2    = lambda^2 - (a1 + a2) lambda + a1 a2
            n1 m1 = lambda mu - b1 lambda - a1 mu + a1 b1
            m2    = mu^2 - (b1 + b2) mu + b1 b2
            n1    = lambda - a1
            m1    = mu - b1
        so the result evaluates identically everywhere.
        """
        if self.basis != NEWTON:
            raise BasisMismatchError("to_monomial expects a newton-tagged polynomial")
        a1, a2, b1, b2 = self.nodes.as_tuple()
        c = self.coeffs
        out = {
            (2, 0): c[(2, 0)].copy(),
            (1, 1): c[(1, 1)].copy(),
            (0, 2): c[(0, 2)].copy(),
            (1, 0): -(a1 + a2) * c[(2, 0)] - b1 * c[(1, 1)] + c[(1, 0)],
            (0, 1): -a1 * c[(1, 1)] - (b1 + b2) * c[(0, 2)] + c[(0, 1)],
            (0, 0): (a1 * a2) * c[(2, 0)] + (a1 * b1) * c[(1, 1)]
                    + (b1 * b2) * c[(0, 2)] - a1 * c[(1, 0)] - b1 * c[(0, 1)]
                    + c[(0, 0)],
        }
        return MatrixPoly2.monomial(out)

    def monomial_partner(self) -> "MatrixPoly2":
        """Monomial-tagged polynomial with the same coefficient blocks."""
        return MatrixPoly2.monomial(dict(self.coeffs))

    def newton_partner(self, nodes: NewtonNodes | None = None) -> "MatrixPoly2":
        """Newton-tagged polynomial with the same coefficient blocks."""
        return MatrixPoly2.newton(dict(self.coeffs), nodes or NewtonNodes())

    def coefficient_scale(self) -> float:
        """Largest Frobenius norm among the six blocks."""
        return max(float(np.linalg.norm(self.coeffs[k])) for k in COEFF_KEYS)
