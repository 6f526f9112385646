"""Gradient blow-up toolkit for a stiff inclusion nearly touching the matrix boundary.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from ._core import (  # noqa: F401
    CaseNotCovered,
    ConfigError,
    GeometryError,
    NumericalError,
    __version__,
    bridge,
    c_alpha_asymptotic,
    classify_family,
    closed_form_convex_2d,
    closed_form_convex_3d,
    diag_expansion,
    family_trace,
    fit_geometry_constants,
    flat_gap_factor,
    free_constants,
    lame_rate_constant,
    moment_integral,
    rate_table,
    rho,
    rho_selectors,
    rigid_basis,
    solve_reference,
    vbar,
)
