"""Time-frequency calculus on sampled grids."""
from .grid import (
    Field,
    Grid,
    PhaseField,
    boundary_magnitude,
    convolve,
    fourier,
    inner,
    inverse_fourier,
    l2_norm,
    mixed_norm,
    multiply,
)
from .modspace import (
    GaborCoeffs,
    WindowPair,
    gabor_coeffs,
    gabor_synthesize,
    gaussian_window,
    make_window_pair,
    mod_norm,
    operator_gabor_matrix,
    projection_bound,
    verify_conv,
    verify_mult,
    wiener_norm,
)
from .nlse import NlseConfig, Trajectory, lift, phase_residual, split_step
from .product import gabor_product, involution, product_bound
from .sequences import LatticeSeq, seq_convolve, seq_mul, seq_norm, verify_holder, verify_young
from .stft import moyal, project, stft, stft_adjoint, twisted_convolve
from .weights import (
    ConditionError,
    Exponent,
    Weight,
    WeightClass,
    as_exponent,
    check_moderate,
    classify,
    conv_exponents_ok,
    holder_ok,
    intro_solve,
    mult_exponents_ok,
    parse_weight,
    weight_cond_conv,
    weight_cond_mult,
    young_ok,
)

__version__ = "0.1.0"
