"""Energy analysis of nearest-neighbor cooperative uplinks.

Closed-form outage-constrained transmit powers for a two-handset cooperation
scheme and its non-cooperative baseline, the distribution of the cooperative
round total induced by Poisson-distributed handset locations, and a Monte
Carlo protocol simulator that cross-validates every closed form.
"""

from .params import (
    SPEED_OF_LIGHT,
    LinearParams,
    ParameterError,
    SystemParams,
    db_to_linear,
    load_config,
    validate,
    wavelength,
)
from .geometry import (
    Geometry,
    mean_nn_distance,
    nn_distance_cdf,
    nn_distance_pdf,
    partner_distance_to_bs,
    sample_nn_geometry,
    sample_nn_geometries,
)
from .powermodel import (
    OutageTargets,
    PowerBreakdown,
    PowerCoefficients,
    cellular_coeff,
    composite_outage_nncc,
    conventional_power,
    link_capacity,
    nncc_power_breakdown,
    per_link_outage_conventional,
    per_link_outage_nncc,
    power_coefficients,
    received_snr_cellular,
    received_snr_short,
    short_range_coeff,
    short_range_outage_prob,
)
from .distribution import (
    DistributionResult,
    IntegrationError,
    PowerQuadratic,
    RootPair,
    cdf_branch_form,
    cdf_reference,
    cdf_reference_batch,
    energy_efficiency,
    evaluate_distribution,
    expected_power,
    expected_power_conventional,
    expected_power_quadrature,
    pdf_branch_form,
    power_roots,
    support_upper,
)
from .montecarlo import (
    McReport,
    ProtocolFading,
    RandomStream,
    TrialOutcome,
    estimate_link_outage,
    estimate_outage,
    ks_distance,
    sample_power_distribution,
    simulate_protocol_trial,
)
from .experiments import ExperimentSpec, run_figure, sweep, validate_report

__version__ = "0.1.0"
