"""flagsos: flag-algebra sums-of-squares certificates for edge-density bounds.

Library layout:

- ``graphs``    labeled graphs, canonical forms, flag enumeration
- ``poly``      exact multilinear polynomials with the induced S_n action
- ``flagcalc``  flag density polynomials and pair-density tables
- ``symrep``    symmetric-group representation machinery and adapted bases
- ``sdp``       block SDP assembly, interior-point solver, rational rounding
- ``verify``    exact verification of identities, bounds, and certificates
- ``cli``       the ``flagsos`` command-line entry point
"""

__version__ = "0.1.0"

from .graphs import (  # noqa: F401
    CharVector,
    Flag,
    Graph,
    IntersectionType,
    K3,
    canonical_form,
    char_vector,
    contains_induced,
    enumerate_A_free,
    enumerate_flags,
)
from .poly import EdgePermAction, MPoly, coeff_equal, reduce_boolean  # noqa: F401
from .flagcalc import (  # noqa: F401
    Labeling,
    PairDensityTable,
    d_H,
    d_pair,
    d_theta_F,
    err_poly,
    p_h,
    pair_density_table,
)
from .symrep import (  # noqa: F401
    character,
    dominance_geq,
    kostka,
    multiplicity,
    partitions_lex_geq,
    symmetry_adapted_basis,
    y_matrix,
    yor_matrices,
)
from .sdp import (  # noqa: F401
    Certificate,
    assemble_flag_sdp,
    assemble_gp_sdp,
    check_psd_rational,
    round_to_certificate,
    solve_sdp,
)
from .verify import (  # noqa: F401
    IdentityClaim,
    solve_and_certify,
    verify_density_bound,
    verify_identity,
    verify_isotypic_membership,
    verify_mantel_flag_sos,
    verify_section5,
)
