"""Wasserstein geometry of probabilistic frames on discrete measures."""

from .measure import (
    DiscreteMeasure,
    MeasureError,
    canonicalize,
    center,
    convex_combine,
    dirac,
    mean,
    measures_close,
    moment,
    new_discrete,
    project_hyperplane,
    project_line,
    push_forward_linear,
    push_forward_map,
)
from .psd import (
    NotPSDError,
    block_coupling_psd,
    bures_distance,
    bures_squared,
    congruence,
    image_projection,
    interpolate_map,
    loewner_geq,
    optimal_map,
    pinv_psd,
    sqrt_psd,
)
from .ot import (
    Coupling,
    TransportPlan,
    coupling_frame_operator,
    pushforward_coupling,
    solve_exact,
    wasserstein_p,
)
from .frames import (
    Ellipsoid,
    FrameReport,
    NotAFrameError,
    UnsupportedError,
    canonical_dual,
    closest_in_fiber,
    closest_on_ray,
    closest_tight,
    directional_distance,
    directional_lower_bound,
    frame_ellipsoid,
    frame_operator,
    frame_report,
    gelbrich_bound,
    geodesic,
    pfp,
    pfp_minimizer_check,
    retract_to_fiber,
)
from .duals import (
    DualCertificate,
    canonical_dual_coupling,
    convex_combine_duals,
    delta_dual_family,
    dual_distance_check,
    dual_feasibility,
    finite_mixture_dual,
    is_m_dual,
    m_dual_from_transport_dual,
    pushforward_dual,
)

__version__ = "0.1.0"

__all__ = [
    "Coupling",
    "DiscreteMeasure",
    "DualCertificate",
    "Ellipsoid",
    "FrameReport",
    "MeasureError",
    "NotAFrameError",
    "NotPSDError",
    "TransportPlan",
    "UnsupportedError",
    "block_coupling_psd",
    "bures_distance",
    "bures_squared",
    "canonical_dual",
    "canonical_dual_coupling",
    "canonicalize",
    "center",
    "closest_in_fiber",
    "closest_on_ray",
    "closest_tight",
    "congruence",
    "convex_combine",
    "convex_combine_duals",
    "coupling_frame_operator",
    "delta_dual_family",
    "dirac",
    "directional_distance",
    "directional_lower_bound",
    "dual_distance_check",
    "dual_feasibility",
    "finite_mixture_dual",
    "frame_ellipsoid",
    "frame_operator",
    "frame_report",
    "gelbrich_bound",
    "geodesic",
    "image_projection",
    "interpolate_map",
    "is_m_dual",
    "loewner_geq",
    "m_dual_from_transport_dual",
    "mean",
    "measures_close",
    "moment",
    "new_discrete",
    "optimal_map",
    "pfp",
    "pfp_minimizer_check",
    "pinv_psd",
    "project_hyperplane",
    "project_line",
    "push_forward_linear",
    "push_forward_map",
    "pushforward_coupling",
    "pushforward_dual",
    "retract_to_fiber",
    "solve_exact",
    "sqrt_psd",
    "wasserstein_p",
]
