"""Constructors and certifiers for linearizations.

The central construction is the e1-ansatz family: given the six coefficient
blocks of a quadratic polynomial and free parameters (Y11, Z1, Z2), assemble

    A1 = [ e1 x C20 | -Y1 + e1 x C11 | -Z1 + e1 x C10 ]
    A2 = [ Y1       | e1 x C02       | -Z2 + e1 x C01 ]
    A3 = [ Z1       | Z2             | e1 x C00       ]

with Y1 = (Y11; 0; 0) stacked. Any such triple satisfies the ansatz identity
with v = e1; it is a linearization exactly when the trailing 2n x 2n block

    Z = [[Z21, Z22], [Z31, Z32]]

is nonsingular. In that case explicit unimodular factors E and F reduce the
pencil to diag(Q, I_2n), which pins the determinant ratio
det L(lam, mu) = det(Z) * det Q(lam, mu); the verifier estimates that ratio
by sampling and checks its constancy.

The same machinery serves monomial and Newton forms: the blocks are
identical, only the evaluation rule changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    AdmissibilityError,
    BasisMismatchError,
    DegenerateProblemError,
    NodeMismatchError,
)
from .linalg import annulus_points, as_matrix, complex_normal, det, smallest_singular_value
from .matpoly import MatrixPoly2, MONOMIAL, NEWTON
from .spaces import (
    DEFAULT_SAMPLES,
    DEFAULT_TOL,
    AnsatzVector,
    MonomialPencil,
    NewtonPencil,
    select_M,
)

__all__ = [
    "E1FreeParams",
    "companion_pencil",
    "newton_companion",
    "assemble_e1_blocks",
    "construct_e1_monomial",
    "construct_e1_newton",
    "UnimodularWitnessPair",
    "unimodular_witnesses",
    "LinearizationReport",
    "verify_linearization",
    "GeneralAnsatzPencil",
    "construct_general_ansatz",
]


@dataclass(frozen=True)
class E1FreeParams:
    """Free parameters of the e1-ansatz construction.

    y11 is n x n; z1 and z2 are 3n x n stacks (Z11; Z21; Z31) and
    (Z12; Z22; Z32). Admissibility means the 2n x 2n block built from the
    lower four sub-blocks is nonsingular.
    """

    y11: np.ndarray
    z1: np.ndarray
    z2: np.ndarray

    @classmethod
    def build(cls, y11, z1, z2) -> "E1FreeParams":
        y11 = np.atleast_2d(np.asarray(y11, dtype=complex))
        n = y11.shape[0]
        y11 = as_matrix(y11, n, n, name="Y11")
        z1 = as_matrix(z1, 3 * n, n, name="Z1")
        z2 = as_matrix(z2, 3 * n, n, name="Z2")
        return cls(y11=y11, z1=z1, z2=z2)

    @property
    def n(self) -> int:
        return self.y11.shape[0]

    @property
    def z_block(self) -> np.ndarray:
        """The 2n x 2n matrix [[Z21, Z22], [Z31, Z32]]."""
        n = self.n
        return np.block([[self.z1[n:2 * n], self.z2[n:2 * n]],
                         [self.z1[2 * n:], self.z2[2 * n:]]])

    def z_sigma_min(self) -> float:
        return smallest_singular_value(self.z_block)

    def require_admissible(self, tol: float = DEFAULT_TOL) -> None:
        zb = self.z_block
        smin = smallest_singular_value(zb)
        bound = tol * max(1.0, float(np.linalg.norm(zb)))
        if smin <= bound:
            raise AdmissibilityError(
                f"Z block is numerically singular: sigma_min = {smin:.3e} "
                f"<= {bound:.3e}; the construction needs det Z != 0"
            )

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, *,
               min_sigma: float = 0.05, max_tries: int = 32) -> "E1FreeParams":
        """Random admissible draw (rejection sampling on the Z block)."""
        y11 = complex_normal(rng, n, n)
        for _ in range(max_tries):
            z1 = complex_normal(rng, 3 * n, n)
            z2 = complex_normal(rng, 3 * n, n)
            params = cls.build(y11, z1, z2)
            if params.z_sigma_min() > min_sigma:
                return params
        raise AdmissibilityError(
            f"failed to draw admissible Z after {max_tries} tries "
            f"(min_sigma = {min_sigma})"
        )

    @classmethod
    def companion(cls, q: MatrixPoly2) -> "E1FreeParams":
        """The parameter choice that reproduces the companion pencil."""
        n = q.n
        eye = np.eye(n)
        zero = np.zeros((n, n))
        z1 = np.vstack([q.coeff(1, 0), zero, -eye])
        z2 = np.vstack([q.coeff(0, 1), -eye, zero])
        return cls.build(np.zeros((n, n)), z1, z2)


def companion_pencil(q: MatrixPoly2) -> MonomialPencil:
    """The 3n x 3n companion pencil of a monomial quadratic polynomial.

    L1 = [[C20, C11, 0], [0, 0, 0], [0, 0, I]]
    L2 = [[0, C02, 0], [0, 0, I], [0, 0, 0]]
    L0 = [[C10, C01, C00], [0, -I, 0], [-I, 0, 0]]

    It satisfies C(lam, mu) (Lambda kron I) = e1 kron Q(lam, mu), and for
    n = 1 one has det C = -q identically.
    """
    if q.basis != MONOMIAL:
        raise BasisMismatchError("companion_pencil expects a monomial-tagged polynomial")
    n = q.n
    eye = np.eye(n)
    zero = np.zeros((n, n))
    l1 = np.block([[q.coeff(2, 0), q.coeff(1, 1), zero],
                   [zero, zero, zero],
                   [zero, zero, eye]])
    l2 = np.block([[zero, q.coeff(0, 2), zero],
                   [zero, zero, eye],
                   [zero, zero, zero]])
    l0 = np.block([[q.coeff(1, 0), q.coeff(0, 1), q.coeff(0, 0)],
                   [zero, -eye, zero],
                   [-eye, zero, zero]])
    return MonomialPencil.from_blocks(l1, l2, l0)


def newton_companion(q_newton: MatrixPoly2) -> NewtonPencil:
    """Companion blocks of the shared coefficients, in Newton form."""
    if q_newton.basis != NEWTON:
        raise BasisMismatchError("newton_companion expects a newton-tagged polynomial")
    c = companion_pencil(q_newton.monomial_partner())
    return NewtonPencil.from_blocks(q_newton.nodes, c.L1, c.L2, c.L0)


def assemble_e1_blocks(q: MatrixPoly2, y11, z1, z2):
    """Raw e1-form block triple (A1, A2, A3); no admissibility check.

    Exposed separately so degenerate parameter choices (for instance a zero
    Z block) can be assembled and studied; the public constructors validate
    admissibility before calling this.
    """
    n = q.n
    y11 = as_matrix(np.atleast_2d(np.asarray(y11, dtype=complex)), n, n, name="Y11")
    z1 = as_matrix(z1, 3 * n, n, name="Z1")
    z2 = as_matrix(z2, 3 * n, n, name="Z2")
    zero2 = np.zeros((2 * n, n))

    def e1_col(block):
        return np.vstack([block, zero2])

    y1 = np.vstack([y11, zero2])
    a1 = np.hstack([e1_col(q.coeff(2, 0)), -y1 + e1_col(q.coeff(1, 1)),
                    -z1 + e1_col(q.coeff(1, 0))])
    a2 = np.hstack([y1, e1_col(q.coeff(0, 2)), -z2 + e1_col(q.coeff(0, 1))])
    a3 = np.hstack([z1, z2, e1_col(q.coeff(0, 0))])
    return a1, a2, a3


def construct_e1_monomial(q: MatrixPoly2, params: E1FreeParams, *,
                          tol: float = DEFAULT_TOL) -> MonomialPencil:
    """e1-ansatz pencil for a monomial polynomial; a linearization of q."""
    if q.basis != MONOMIAL:
        raise BasisMismatchError("construct_e1_monomial expects a monomial-tagged polynomial")
    if params.n != q.n:
        raise ValueError(f"size mismatch: params n={params.n}, polynomial n={q.n}")
    params.require_admissible(tol)
    a1, a2, a3 = assemble_e1_blocks(q, params.y11, params.z1, params.z2)
    return MonomialPencil.from_blocks(a1, a2, a3)


def construct_e1_newton(q: MatrixPoly2, params: E1FreeParams, *,
                        tol: float = DEFAULT_TOL) -> NewtonPencil:
    """e1-ansatz Newton pencil; a linearization of the Newton polynomial."""
    if q.basis != NEWTON:
        raise BasisMismatchError("construct_e1_newton expects a newton-tagged polynomial")
    if params.n != q.n:
        raise ValueError(f"size mismatch: params n={params.n}, polynomial n={q.n}")
    params.require_admissible(tol)
    a1, a2, a3 = assemble_e1_blocks(q, params.y11, params.z1, params.z2)
    return NewtonPencil.from_blocks(q.nodes, a1, a2, a3)


@dataclass(frozen=True)
class UnimodularWitnessPair:
    """Explicit unimodular factors E, F with F L E = diag(Q, I_2n).

    E(lam, mu) = [[n1 I, I, 0], [m1 I, 0, I], [I, 0, 0]] has determinant 1
    for every (lam, mu); F(lam, mu) = [[I, -W(lam, mu) Z^{-1}], [0, Z^{-1}]]
    has the constant determinant det(Z)^{-1}. Hence the predicted ratio
    det L / det Q equals 1 / (det E * det F) = det Z.
    """

    q: MatrixPoly2
    y11: np.ndarray
    z11: np.ndarray
    z12: np.ndarray
    z_inv: np.ndarray
    det_e: complex
    det_f: complex
    max_reduction_residual: float
    max_det_constancy_deviation: float

    @property
    def n(self) -> int:
        return self.q.n

    def predicted_gamma(self) -> complex:
        return 1.0 / (self.det_e * self.det_f)

    def e_factor(self, lam: complex, mu: complex) -> np.ndarray:
        nodes = self.q.nodes
        n = self.n
        eye = np.eye(n)
        zero = np.zeros((n, n))
        n1 = lam - nodes.alpha1
        m1 = mu - nodes.beta1
        return np.block([[n1 * eye, eye, zero],
                         [m1 * eye, zero, eye],
                         [eye, zero, zero]])

    def w_blocks(self, lam: complex, mu: complex) -> np.ndarray:
        """The n x 2n top-row remainder [W1 W2] after the E reduction."""
        nodes = self.q.nodes
        g1 = lam - nodes.alpha1
        g2 = lam - nodes.alpha2
        gt1 = mu - nodes.beta1
        gt2 = mu - nodes.beta2
        w1 = g2 * self.q.coeff(2, 0) + gt1 * self.y11 + self.z11
        w2 = g1 * (self.q.coeff(1, 1) - self.y11) + gt2 * self.q.coeff(0, 2) + self.z12
        return np.hstack([w1, w2])

    def f_factor(self, lam: complex, mu: complex) -> np.ndarray:
        n = self.n
        w = self.w_blocks(lam, mu)
        return np.block([[np.eye(n), -w @ self.z_inv],
                         [np.zeros((2 * n, n)), self.z_inv]])

    def reduce(self, pencil: NewtonPencil, lam: complex, mu: complex) -> np.ndarray:
        return self.f_factor(lam, mu) @ pencil.eval(lam, mu) @ self.e_factor(lam, mu)


def unimodular_witnesses(q: MatrixPoly2, pencil: NewtonPencil, params: E1FreeParams,
                         *, samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL,
                         seed: int = 0) -> UnimodularWitnessPair:
    """Build the witness pair for an e1-form pencil and check the reduction.

    The reduction F L E = diag(Q, I_2n) and the constancy of det E, det F
    are evaluated at the sample points; the largest relative deviations are
    stored on the returned pair. A numerically singular Z is rejected.
    """
    if q.basis != NEWTON:
        raise BasisMismatchError("unimodular_witnesses expects a newton-tagged polynomial")
    if pencil.nodes.as_tuple() != q.nodes.as_tuple():
        raise NodeMismatchError("pencil and polynomial carry different nodes")
    params.require_admissible(tol)

    n = q.n
    zb = params.z_block
    z_inv = np.linalg.inv(zb)
    det_f = det(z_inv)

    draft = UnimodularWitnessPair(
        q=q, y11=params.y11, z11=params.z1[:n], z12=params.z2[:n],
        z_inv=z_inv, det_e=1.0 + 0j, det_f=det_f,
        max_reduction_residual=0.0, max_det_constancy_deviation=0.0,
    )

    rng = np.random.default_rng(seed)
    pts = annulus_points(rng, 2 * samples)
    worst_red = 0.0
    worst_const = 0.0
    target_tail = np.eye(2 * n)
    for lam, mu in zip(pts[:samples], pts[samples:]):
        red = draft.reduce(pencil, lam, mu)
        target = np.block([[q.eval(lam, mu), np.zeros((n, 2 * n))],
                           [np.zeros((2 * n, n)), target_tail]])
        scale = max(1.0, float(np.linalg.norm(pencil.eval(lam, mu)))
                    * float(np.linalg.norm(draft.f_factor(lam, mu))))
        worst_red = max(worst_red, float(np.linalg.norm(red - target)) / scale)
        worst_const = max(
            worst_const,
            abs(det(draft.e_factor(lam, mu)) - draft.det_e),
            abs(det(draft.f_factor(lam, mu)) - det_f) / max(abs(det_f), 1e-300),
        )
    return replace(draft, max_reduction_residual=worst_red,
                   max_det_constancy_deviation=worst_const)


@dataclass(frozen=True)
class LinearizationReport:
    """Result of the determinant-ratio linearization check.

    gamma is estimated at the sample point where |det Q| is largest; every
    other sample must satisfy |det L - gamma det Q| <= tol |gamma det Q|.
    The verdict is "pass" exactly when the largest relative deviation stays
    below the tolerance and |gamma| exceeds it.
    """

    gamma_estimate: complex
    max_relative_deviation: float
    sample_count: int
    verdict: str
    tol: float
    samples: tuple

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def verify_linearization(pencil: NewtonPencil, q: MatrixPoly2, *,
                         samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL,
                         seed: int = 0) -> LinearizationReport:
    """Sample det L against det Q and decide whether the ratio is a nonzero constant."""
    if q.basis != NEWTON:
        raise BasisMismatchError("verify_linearization expects a newton-tagged polynomial")
    if pencil.n != q.n:
        raise ValueError(f"size mismatch: pencil n={pencil.n}, polynomial n={q.n}")
    if pencil.nodes.as_tuple() != q.nodes.as_tuple():
        raise NodeMismatchError("pencil and polynomial carry different nodes")

    rng = np.random.default_rng(seed)
    pts = annulus_points(rng, 2 * samples)
    lams, mus = pts[:samples], pts[samples:]

    det_l = np.array([det(pencil.eval(l, m)) for l, m in zip(lams, mus)])
    det_q = np.array([det(q.eval(l, m)) for l, m in zip(lams, mus)])

    # Magnitude a determinant of this size "should" have, used only to decide
    # whether det Q vanishes identically (inconclusive input).
    q_mag = max(float(np.linalg.norm(q.eval(l, m))) / max(1.0, np.sqrt(q.n))
                for l, m in zip(lams, mus))
    if np.abs(det_q).max() <= 1e-13 * max(1.0, q_mag ** q.n):
        raise DegenerateProblemError(
            "det Q vanishes at every sample point; the determinant-ratio "
            "check is inconclusive for this polynomial"
        )

    ref = int(np.argmax(np.abs(det_q)))
    gamma = det_l[ref] / det_q[ref]

    records = []
    worst = 0.0
    for i in range(samples):
        if i == ref:
            dev = 0.0
        else:
            target = gamma * det_q[i]
            err = abs(det_l[i] - target)
            dev = err / abs(target) if target != 0 else (0.0 if err == 0 else np.inf)
            worst = max(worst, dev)
        records.append((complex(lams[i]), complex(mus[i]),
                        complex(det_l[i]), complex(det_q[i]), float(dev)))

    verdict = "pass" if (worst < tol and abs(gamma) > tol) else "fail"
    return LinearizationReport(gamma_estimate=complex(gamma),
                               max_relative_deviation=float(worst),
                               sample_count=samples, verdict=verdict, tol=tol,
                               samples=tuple(records))


@dataclass(frozen=True)
class GeneralAnsatzPencil:
    """Outcome of the general-ansatz construction.

    ``pencil`` is the e1-form linearization built from the transformed
    parameters; ``pencil_v`` applies M^{-1} kron I on the left and is the
    member of the Newton space with the requested ansatz vector.
    """

    M: np.ndarray
    pencil: NewtonPencil
    y11_used: np.ndarray
    z1_hat: np.ndarray
    z2_hat: np.ndarray

    @property
    def pencil_v(self) -> NewtonPencil:
        minv = np.linalg.inv(self.M)
        t = np.kron(minv, np.eye(self.pencil.n))
        return NewtonPencil.from_blocks(self.pencil.nodes,
                                        t @ self.pencil.A1,
                                        t @ self.pencil.A2,
                                        t @ self.pencil.A3)

    @property
    def params_hat(self) -> E1FreeParams:
        return E1FreeParams.build(self.y11_used, self.z1_hat, self.z2_hat)


def construct_general_ansatz(q: MatrixPoly2, v, params: E1FreeParams | None = None,
                             *, tol: float = DEFAULT_TOL, seed: int = 0,
                             max_tries: int = 32,
                             alternate_ac: bool = False) -> GeneralAnsatzPencil:
    """Linearization construction for an arbitrary nonzero ansatz vector.

    Steps: pick M with M v = e1 from the pattern table; transform the free
    parameters by M kron I; force Y11 = 0 unless m21 = m31 = 0 (in which
    case Y11 may stay arbitrary); choose the Z stacks so the transformed
    2n x 2n block is nonsingular. When ``params`` is omitted a deterministic
    default is used: Z11 = Z12 = 0 and the lower entries solved from the
    inverse of M's trailing 2 x 2 submatrix so the transformed block becomes
    the identity; if that submatrix is singular, random draws with rejection
    take over (at most ``max_tries``).
    """
    if q.basis != NEWTON:
        raise BasisMismatchError("construct_general_ansatz expects a newton-tagged polynomial")
    n = q.n
    if not isinstance(v, AnsatzVector):
        v = AnsatzVector.classify(v, tol=tol)
    m = select_M(v, tol=tol, alternate_ac=alternate_ac)
    t = np.kron(m, np.eye(n))
    y_free = abs(m[1, 0]) == 0 and abs(m[2, 0]) == 0

    def hat_block(z1, z2):
        z1h, z2h = t @ z1, t @ z2
        blk = np.block([[z1h[n:2 * n], z2h[n:2 * n]], [z1h[2 * n:], z2h[2 * n:]]])
        return z1h, z2h, blk

    if params is not None:
        if params.n != n:
            raise ValueError(f"size mismatch: params n={params.n}, polynomial n={n}")
        y11 = params.y11 if y_free else np.zeros((n, n))
        z1_hat, z2_hat, blk = hat_block(params.z1, params.z2)
        smin = smallest_singular_value(blk)
        if smin <= tol * max(1.0, float(np.linalg.norm(blk))):
            raise AdmissibilityError(
                f"transformed Z block is numerically singular (sigma_min = {smin:.3e}); "
                "choose different Z stacks for this ansatz pattern"
            )
    else:
        y11 = np.zeros((n, n))
        m_tail = m[1:, 1:]
        if abs(np.linalg.det(m_tail)) > tol:
            inv = np.linalg.inv(m_tail)
            eye = np.eye(n)
            zero = np.zeros((n, n))
            z1 = np.vstack([zero, inv[0, 0] * eye, inv[1, 0] * eye])
            z2 = np.vstack([zero, inv[0, 1] * eye, inv[1, 1] * eye])
            z1_hat, z2_hat, blk = hat_block(z1, z2)
        else:
            rng = np.random.default_rng(seed)
            for attempt in range(max_tries):
                z1 = complex_normal(rng, 3 * n, n)
                z2 = complex_normal(rng, 3 * n, n)
                z1_hat, z2_hat, blk = hat_block(z1, z2)
                if smallest_singular_value(blk) > 0.05:
                    break
            else:
                raise AdmissibilityError(
                    f"no admissible Z found for ansatz pattern {v.pattern} "
                    f"after {max_tries} random draws"
                )

    yh11 = m[0, 0] * y11
    a1, a2, a3 = assemble_e1_blocks(q, yh11, z1_hat, z2_hat)
    pencil = NewtonPencil.from_blocks(q.nodes, a1, a2, a3)
    return GeneralAnsatzPencil(M=m, pencil=pencil, y11_used=yh11,
                               z1_hat=z1_hat, z2_hat=z2_hat)
