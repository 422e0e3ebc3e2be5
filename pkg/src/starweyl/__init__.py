"""Star products, star exponentials and transcendental elements of the Weyl algebra."""
from . import closed_forms, fock_oracle, quadrature, verify
from .closed_forms import (
    ExpElement,
    ExpSum,
    SingularLocus,
    antivacuum,
    exp_group_mul,
    exp_series,
    intertwine_exp,
    poly_star_exp,
    singular_locus,
    star_cos,
    star_exp_linear,
    star_exp_quadratic,
    star_sin,
    theta_partial_sum,
    vacuum,
    x_polynomial,
)
from .errors import (
    ContourTooCloseError,
    ConvergenceError,
    ConvergenceWarning,
    DimensionError,
    DivergesError,
    DomainError,
    OrderingMismatchError,
    PoleError,
    SingularPointError,
    StarWeylError,
    TruncationError,
)
from .weyl_poly import (
    HBAR,
    Coefficient,
    GaussianRational,
    OrderingKey,
    Polynomial,
    bumping_apply,
    commutator,
    intertwine,
    random_ordering,
    random_polynomial,
    star_mul,
    star_pow,
    w2_generators,
)

__version__ = "0.1.0"
