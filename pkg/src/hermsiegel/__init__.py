"""Exact local densities, Siegel series and intersection numbers for
hermitian lattices over an unramified quadratic extension of Q_p (p odd)."""

from .ring import Field, FElem, ResidueRing, ResidueElem, field, reduce
from .lattice import (
    EmbeddedLattice,
    HermSpace,
    Invariants,
    flat_from_invariants,
    intersect_lattices,
    intersect_with_hyperplane,
    lattice_from_invariants,
    standard_space,
    sum_lattices,
)
from .overlat import (
    OverlatticeRecord,
    count_intermediate,
    cyclic_overlattices,
    integral_overlattices,
    vertex_overlattices,
)
from .density import (
    DensityPoly,
    den_central,
    den_lambda_poly,
    den_poly,
    den_value,
    derived_den,
    derived_den_lambda,
    functional_eq_check,
    induction_check,
    rank1_closed,
    sankaran_rank2,
    terstiege_rank3,
    weight_m,
    weight_m_der,
    whittaker_factors,
)
from .oracle import RepCount, cancellation_oracle_check, count_rep, den_oracle
from .schwartz import LatticeFunction, evaluate, fourier, functions_equal, int_v_lambda, local_modularity_check
from .decomp import (
    FlatPair,
    diff_identity_check,
    fourier_pden_perp,
    in_support_N,
    pden_horizontal,
    pden_vertical,
    pden_x,
    support_bound_check,
)
from .kr import (
    IntResult,
    eisenstein_ratio_check,
    horizontal_degree,
    int_almost_selfdual,
    int_prime,
    int_selfdual,
    mult_vertical,
    vertical_identity_n3,
)

__version__ = "0.1.0"
