"""Row-decoupled low-rank + sparse reconstruction of undersampled multi-coil MRI.

Undersampled 2D k-space with 1D phase-encoding masks splits, after a 1D
inverse Fourier transform along the frequency-encoding axis, into independent
per-row recovery problems. Each row is solved by iterative soft-thresholding
with an IRLS-reweighted Hankel low-rank penalty and a tight-frame l1 penalty.
"""

from .fourier import (
    fft_fe,
    fft_pe,
    fft_pe_tensor,
    ifft_fe,
    ifft_pe,
    ifft_pe_tensor,
    sos_combine,
)
from .frame import frame_adjoint, frame_forward, soft_threshold
from .hankel import (
    HankelConfig,
    gram,
    hankel_adjoint,
    hankel_lift,
    lowrank_grad,
    toeplitz_apply,
    weight_sqrt,
    weight_update,
)
from .metrics import MetricsReport, evaluate, psnr, rlne, ssim
from .phantom import PhantomSpec, gen_phantom
from .sampling import (
    SamplingMask,
    adjoint_mask,
    af_of,
    apply_mask,
    apply_mask_tensor,
    gen_cartesian,
    gen_partial_fourier,
    gen_uniform,
)
from .solver import (
    DivergenceError,
    ReconReport,
    SolverConfig,
    auto_step,
    objective,
    recon_image,
    recon_row,
    tune_params,
)
from .tensorio import TensorFormatError, read_tensor, tensor_from_bytes, tensor_to_bytes, write_tensor

__version__ = "0.1.0"

__all__ = [
    "fft_fe",
    "fft_pe",
    "fft_pe_tensor",
    "ifft_fe",
    "ifft_pe",
    "ifft_pe_tensor",
    "sos_combine",
    "frame_adjoint",
    "frame_forward",
    "soft_threshold",
    "HankelConfig",
    "gram",
    "hankel_adjoint",
    "hankel_lift",
    "lowrank_grad",
    "toeplitz_apply",
    "weight_sqrt",
    "weight_update",
    "MetricsReport",
    "evaluate",
    "psnr",
    "rlne",
    "ssim",
    "PhantomSpec",
    "gen_phantom",
    "SamplingMask",
    "adjoint_mask",
    "af_of",
    "apply_mask",
    "apply_mask_tensor",
    "gen_cartesian",
    "gen_partial_fourier",
    "gen_uniform",
    "DivergenceError",
    "ReconReport",
    "SolverConfig",
    "auto_step",
    "objective",
    "recon_image",
    "recon_row",
    "tune_params",
    "TensorFormatError",
    "read_tensor",
    "tensor_from_bytes",
    "tensor_to_bytes",
    "write_tensor",
]
