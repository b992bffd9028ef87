"""Spectral workbench for the 1-D Zakharov system on the torus."""

from .fields import (
    FourierField,
    InsufficientTailError,
    convolve,
    field_from_csv,
    field_to_csv,
    fit_regularity,
    harmonic_power_sum,
    random_sobolev_field,
    sobolev_norm,
)
from .reduction import (
    GaugeRecord,
    PhysicalTriple,
    apply_d,
    apply_d_inverse,
    from_plus_minus,
    gauge_normalize,
    to_plus_minus,
    ungauge_n,
    ungauge_u,
)
from .dynamics import (
    BlowUpError,
    ModelParams,
    Trajectory,
    ZakharovState,
    energy,
    integrate,
    linear_flow_schrodinger,
    linear_flow_wave_plus,
    mass,
    rhs,
)

__version__ = "0.1.0"
