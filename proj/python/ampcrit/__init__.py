"""Critical-coupling laboratory for the complex-mass linear amplifier.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (  # noqa: F401
    CriticalReport,
    Direction,
    EvolvedField,
    FieldModel,
    GaussianDraw,
    MomentEstimate,
    MuResult,
    TorusGrid,
    build_beamlet_model,
    closed_form_free_moment,
    critical_report,
    eval_field,
    mc_moment,
    monomials,
    mu_alternating,
    mu_oracle_sphere_grid,
    normalization_integral,
    random_model,
    sample_gaussian,
    solve_amplifier,
    solve_eta,
    two_equal_beamlets,
    uniform_beamlet,
)

__version__ = "0.1.0"
