"""lpmhd: a pseudospectral Littlewood-Paley toolkit on the periodic torus,
with Triebel-Lizorkin norms, Bony paracalculus, an ideal-MHD solver in
Elsasser form, and a randomized inequality-verification lab."""

from .spectral import (
    FilterBank,
    Grid,
    RealField,
    SpectralError,
    curl,
    dealias,
    divergence,
    dyadic_block,
    from_function,
    from_values,
    gradient,
    jacobian,
    jacobian_sup_norm,
    leray_project,
    load_snapshot,
    low_pass,
    make_filter_bank,
    multiply,
    partition_defect,
    random_band_limited,
    random_solenoidal,
    riesz,
    save_snapshot,
    solenoidal_residual,
    spectral_derivative,
    zero_field,
)
from .spaces import (
    NormDomainError,
    NormSpec,
    lp_norm,
    maximal_function,
    sup_block_norm,
    tl_norm,
)
from .paracalc import (
    CommutatorSplit,
    bony_reconstruction,
    commutator,
    commutator_split,
    paraproduct,
    remainder,
)
from .mhd import (
    CflWarning,
    ElsasserState,
    TrajectoryMap,
    from_elsasser,
    mhd_tendency,
    picard_iterate,
    pressure_gradient,
    step,
    to_elsasser,
    trajectory_map,
)
from .diagnostics import DiagnosticsRecord, DiagnosticsStream, gronwall_check
from .lab import (
    INEQUALITY_IDS,
    InequalityReport,
    run_inequality,
    stability_sweep,
)

__version__ = "0.1.0"
