//! Numerical kernels for compact hyperbolic surfaces: length spectra, heat
//! traces, Selberg zeta values and regularized Laplacian determinants.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

mod ball;
mod dd;
pub mod degeneration;
pub mod detlap;
pub mod dirichlet;
pub mod error;
pub mod extended_log;
pub mod fenchel_nielsen;
pub mod group;
pub mod heat;
pub mod moebius;
pub mod quadrature;
pub mod spectrum;
pub mod sum;
pub mod zeta;

pub use degeneration::{
    check_bounds, envelope, make_pinching_family, tau_coordinate, tau_to_ell, BoundRecord, CheckOptions, EnvelopeKind,
    EnvelopeParams, FamilySpec, Pinch,
};
pub use detlap::{
    c_n_constant, log_barnes_g_int, log_det_laplacian, zeta_prime_minus_one, SpectralConstants, ZetaInput,
};
pub use error::{Error, ErrorCategory, Result};
pub use extended_log::ExtendedLog;
pub use fenchel_nielsen::{build_genus2_from_fn, builtin_pants_double, FnParams};
pub use group::{builtin_octagon, cyclic_group, GroupPresentation, Word};
pub use heat::{
    find_t0, heat_kernel_h, heat_trace, heat_trace_lower_bound, periodized_kernel, HeatTraceSample, PeriodizedKernel,
    TailModel,
};
pub use moebius::{classify, hyperbolic_distance, IsometryClass, IsometryKind, MoebiusElement, Point};
pub use spectrum::{
    count_geodesics, enumerate_spectrum, pgt_log_bound, EnumerationOptions, LengthSpectrum, SpectrumEntry,
};
pub use zeta::{
    selberg_zeta_log, zeta_log_derivative_mckean, zeta_log_derivative_product, zeta_prime_at_one_experimental,
    zeta_ratio_log, ZetaEvaluation, ZetaPrimeAtOne,
};
