"""Linearizations of quadratic two-parameter matrix polynomials in Newton bases.

The package builds companion and e1-ansatz pencils for quadratic matrix
polynomials in monomial or Newton form, certifies the linearization property
numerically (determinant-ratio sampling plus explicit unimodular factors),
and assembles the Kronecker operator determinants coupling a pair of such
problems, together with desk-scale spectrum oracles.
"""

from .errors import (
    AdmissibilityError,
    BasisMismatchError,
    DegenerateProblemError,
    Newton2PepError,
    NodeMismatchError,
    NonSquareError,
    SharedFactorError,
    SingularPencilError,
)
from .linalg import (
    Eigenpair,
    annulus_points,
    commutation_matrix,
    complex_normal,
    det,
    kron,
    small_dense_eigen,
    smallest_singular_value,
)
from .matpoly import (
    COEFF_KEYS,
    MONOMIAL,
    NEWTON,
    MatrixPoly2,
    NewtonNodes,
    monomial_six,
    monomial_triple,
    newton_scalars,
    newton_six,
    newton_triple,
)
from .spaces import (
    AnsatzVector,
    MembershipResult,
    MonomialPencil,
    NewtonPencil,
    gamma_blocks,
    membership_monomial,
    membership_newton,
    s_map,
    select_M,
    to_monomial_space,
    to_newton_space,
    transfer_to_newton,
)
from .linearize import (
    E1FreeParams,
    GeneralAnsatzPencil,
    LinearizationReport,
    UnimodularWitnessPair,
    assemble_e1_blocks,
    companion_pencil,
    construct_e1_monomial,
    construct_e1_newton,
    construct_general_ansatz,
    newton_companion,
    unimodular_witnesses,
    verify_linearization,
)
from .twoparam import (
    DeltaTriple,
    QtepPair,
    SingularityCertificate,
    SpectrumPoint,
    SpectrumSample,
    certify_singular,
    delta_operators,
    pair_linearize,
    spectrum_pair_oracle,
    spectrum_slice,
    verify_spectrum_match,
)

__version__ = "0.1.0"
