"""Certified lower bound for the sign-change density of psi(x) - x.

The package re-verifies, in outward-rounded interval arithmetic, a
computer-assisted bound of the form

    liminf V(T)/log T  >=  gamma_0/pi + (2/delta) 2^N sum_i r_i,

where V(T) counts sign changes of the prime counting error term,
gamma_0 = 14.134725... is the lowest zeta zero ordinate, and the final
sum is a certified lower bound for the volume of a solution set of
penalty inequalities attached to a contour in the upper half-plane.

Layers (bottom up): interval (outward-rounded arithmetic), zeros (zero
table ingestion and derived weights), tail (truncation error bound),
contour (mesh and clearance certification), penalty (envelope constants
and weights w_n), lattice (bounded LLL and the tiling certificate),
volume (grid inversion and the truncated convolution), pipeline / cli
(orchestration, reports).
"""

from .config import RunConfig, load_config, parse_config
from .contour import (
    ContourConfig, ContourMesh, alpha_schedule, band_angles, build_mesh,
    deriv_slope_bound, eval_FNeta, eval_deriv, make_contour_config, z1_point,
)
from .errors import (
    CertificationError, HeuristicFailure, IntervalDomainError, KappaZeroError,
    ZeroTableError,
)
from .interval import (
    DEFAULT_PRECISION, Interval, certainly, from_endpoints, interval,
    iv_elementary, iv_ring, nearest_int_distance, pi_interval,
)
from .lattice import (
    ProjectionSet, TilingCertificate, certify, lll_bounded, make_projections,
)
from .penalty import PenaltyFamily, envelope_constants, v_penalty, w_eval
from .pipeline import CertificateReport, PipelineRunner, run_pipeline
from .tail import TailBoundConfig, lemma5_tail, make_tail_config, tail_bound
from .volume import (
    GridFamily, VolumeResult, convolve_volume, convolve_volume_rational,
    final_bound, invert_w,
)
from .zeros import WeightSet, ZeroTable, derive_weights, load_zero_table

__version__ = "0.1.0"
