"""Compressive k-t video sensing with a linear dynamical system model.

The toolkit simulates partial Fourier acquisition of a dynamic image
sequence (a small set of spectrum samples per frame, some bins shared by
every frame) and reconstructs the full video in two stages: the state
sequence of an underlying linear dynamical system is read off a block
Hankel matrix of the shared samples, then the observation matrix is
recovered from all samples by ADMM under a joint structured-sparsity prior
in the wavelet domain.
"""

from .core import (
    FrameGeometry,
    LdsModel,
    ObservationMatrix,
    StateSequence,
    Video,
    load_states,
    load_video,
    mat_frame,
    reconstruction_snr,
    save_states,
    save_video,
    snr_db,
    vec_frame,
)
from .transforms import FourierOp, MaskedFourierOp, WaveletOp, dft2, idft2
from .sampling import (
    KTMeasurements,
    SamplingDensity,
    SamplingPattern,
    acquire,
    density_pmf,
    generate_pattern,
    load_measurements,
    load_pattern,
    save_measurements,
    save_pattern,
)
from .sysid import (
    SorParams,
    SorResult,
    build_hankel,
    estimate_states_sor,
    estimate_states_svd,
    estimate_transition,
    hankel_singular_values,
    is_observable,
    observability_matrix,
    select_order,
)
from .admm import (
    AdmmHistory,
    AdmmParams,
    shrink_l1,
    shrink_l2,
    solve,
    validate_convergence_condition,
)
from .pipeline import (
    ExperimentConfig,
    ExperimentReport,
    lds_approximation_curve,
    phantom_video,
    run_ktcslds,
    sweep,
    synthesize_lds_video,
    zero_fill_baseline,
)

__version__ = "0.1.0"

__all__ = [
    "FrameGeometry",
    "Video",
    "StateSequence",
    "ObservationMatrix",
    "LdsModel",
    "vec_frame",
    "mat_frame",
    "snr_db",
    "reconstruction_snr",
    "save_video",
    "load_video",
    "save_states",
    "load_states",
    "dft2",
    "idft2",
    "FourierOp",
    "WaveletOp",
    "MaskedFourierOp",
    "SamplingDensity",
    "density_pmf",
    "SamplingPattern",
    "generate_pattern",
    "KTMeasurements",
    "acquire",
    "save_pattern",
    "load_pattern",
    "save_measurements",
    "load_measurements",
    "build_hankel",
    "hankel_singular_values",
    "estimate_states_svd",
    "SorParams",
    "SorResult",
    "estimate_states_sor",
    "observability_matrix",
    "is_observable",
    "select_order",
    "estimate_transition",
    "shrink_l1",
    "shrink_l2",
    "AdmmParams",
    "AdmmHistory",
    "solve",
    "validate_convergence_condition",
    "ExperimentConfig",
    "ExperimentReport",
    "synthesize_lds_video",
    "phantom_video",
    "lds_approximation_curve",
    "zero_fill_baseline",
    "run_ktcslds",
    "sweep",
    "__version__",
]
