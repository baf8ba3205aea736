"""Electro-optic sampling of vacuum fluctuations in lossless dispersive dielectrics."""

__version__ = "0.1.0"

from .dielectric import (  # noqa: E402
    REDUCED,
    BandStructure,
    Constant,
    DielectricModel,
    Lorentz,
    MultiLorentz,
    PhysicalConstants,
    epsilon_derivative,
    eval_epsilon,
    propagative_bands,
)
from .eos import (  # noqa: E402
    GaussianAutocorrelation,
    GeometryConfig,
    Identity,
    RectLowpass,
    SpectrumTrace,
    TimeTrace,
    Vacuum,
    discrete_spectrum_weights,
    filter_response,
    kspace_time_correlation,
    polariton_spectrum,
    ratio_spectrum,
    time_correlation,
    vacuum_spectrum,
)
from .inversion import (  # noqa: E402
    FitResult,
    MeasuredTrace,
    fit_lorentz,
    invert_ratio,
    synthesize_measurement,
)
from .polariton import (  # noqa: E402
    ModeSolution,
    branch_frequencies,
    group_velocity,
    hopfield_coefficients,
    indicator,
    mode_solutions,
    wavevector_of,
)
from .vacuum import (  # noqa: E402
    PartitionReport,
    partition_identity,
    population_profile,
    virtual_photon_population,
)
