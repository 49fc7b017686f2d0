//! Chromatic adaptation by spectral reconstruction.
//!
//! A source colour is turned into the smoothest strictly positive reflectance
//! (in log space) that reproduces it under a reconstructed source illuminant,
//! then re-lit by a reconstructed destination illuminant. Because every
//! intermediate spectrum is positive, predictions can never leave the
//! spectral locus.
//!
//! The crate also carries the von Kries baselines (HPE, CAT02, CAT16),
//! object-colour-solid and spectral-locus geometry, and an evaluation harness
//! for corresponding-colour datasets.

pub mod cmf;
pub mod colorimetry;
pub mod error;
pub mod eval;
pub mod gamut;
pub mod lab;
pub mod method;
pub mod presets;
pub mod recon;
pub mod spectral_cat;
pub mod spectrum;
pub mod vonkries;

pub use cmf::{builtin_cmf, CmfSet};
pub use colorimetry::{chromaticity, normalize_illuminant, tristimulus, weight_cmf, white_point};
pub use colorimetry::{Chromaticity, Illuminant, Tristimulus};
pub use error::{Error, Result};
pub use lab::{delta_e94, xyz_to_lab, LabColor};
pub use method::{Method, PreparedCat};
pub use recon::{build_diff_matrix, build_dual_cmf, reconstruct, reconstruct_symmetric, DiffMatrix, ReconResult};
pub use spectral_cat::{prepare_context, SpectralCatContext, Variant};
pub use spectrum::{Spectrum, N_BANDS};
