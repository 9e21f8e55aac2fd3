//! Orthogonal space-time block codes analysed through their equivalent
//! Euclidean codes.
//!
//! The crate builds code matrices from complex orthogonal designs, extracts
//! the real code an OSTBC signal set is equivalent to, and evaluates it with
//! distance spectra, fading error-rate bounds, exact Alamouti error rates and
//! a Monte Carlo simulator over quasistatic Rayleigh fading.

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bounds;
pub mod catalog;
pub mod design;
pub mod equivalent;
pub mod error;
pub mod exact;
pub mod quadrature;
pub mod schlafli;
pub mod sim;
pub mod special;

pub use bounds::{
    asymptotic_bound, bounds_row, min_distance_bound, pep, pep_lemma_form, union_bound_ser, BoundsRow, FadingLinkParams,
};
pub use catalog::{biorthogonal_code, canonical_product_code, qpsk_frame, Catalog, CatalogEntry};
pub use design::{
    average_snr_per_antenna, build_code_matrix, verify_orthogonality, Cell, CodeMatrix, ComplexScalar,
    ConstituentConstellation, OstbcDesign, SymbolVector,
};
pub use equivalent::{
    check_rankin_bounds, distance_spectrum, extract_equivalent_code, extract_equivalent_code_blocks, is_gray_monotone,
    is_spherical, is_uniform, ndsc, numerical_rank, DistanceSpectrum, EuclideanCode, RankinCertificate, SpectrumLine,
};
pub use error::{Error, Result};
pub use exact::{ber_alamouti_bpsk, exact_row, fading_average, ser_alamouti_bpsk, snr_pdf, ExactRow, FadingSnrParams};
pub use schlafli::{coxeter_bound, schlafli_f};
pub use sim::{run_monte_carlo, Decoder, ErrorRateEstimate, SimConfig, SnrMeasure};
pub use special::gaussian_q;
