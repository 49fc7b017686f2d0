//! The spectral-reconstruction chromatic adaptation transform.
//!
//! Per illuminant pair (done once, see [`SpectralCatContext::new`]):
//!
//! 1. reconstruct source and destination illuminants `W_S`, `W_D` from their
//!    white points, using the unweighted CMFs as the referencing matrix;
//! 2. blend the destination toward the source for partial adaptation,
//!    `W_D,eff = D·W_D + (1 − D)·W_S`;
//! 3. precompute `A_S`, `A_D` and, for the symmetric variant, `A_SD`.
//!
//! Per colour ([`SpectralCatContext::transform`]): reconstruct a reflectance
//! against `A_S`, re-light it with `A_D`, then rescale so the prediction keeps
//! its chromaticity but takes the source luminance.

use serde::{Deserialize, Serialize};

use crate::cmf::{builtin_cmf, CmfSet};
use crate::colorimetry::{normalize_illuminant, normalize_white_point, tristimulus, weight_cmf};
use crate::colorimetry::{Illuminant, Tristimulus};
use crate::error::{Error, Result};
use crate::recon::{build_diff_matrix, build_dual_cmf, reconstruct, reconstruct_symmetric};
use crate::recon::{DiffMatrix, ReconResult};
use crate::spectrum::N_BANDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Symmetric,
}

/// Precomputed state for one source/destination illuminant pair.
#[derive(Debug, Clone)]
pub struct SpectralCatContext {
    src_wp: Tristimulus,
    dst_wp: Tristimulus,
    w_s: Illuminant,
    w_d: Illuminant,
    w_d_effective: Illuminant,
    a_s: CmfSet,
    a_d: CmfSet,
    a_sd: CmfSet,
    diff: DiffMatrix,
    adaptation: f64,
    variant: Variant,
}

/// [`SpectralCatContext::new`] with the built-in CIE 1931 observer.
pub fn prepare_context(
    src_wp: Tristimulus,
    dst_wp: Tristimulus,
    adaptation: f64,
    variant: Variant,
) -> Result<SpectralCatContext> {
    SpectralCatContext::new(&builtin_cmf(), src_wp, dst_wp, adaptation, variant)
}

/// Reconstructs a normalised illuminant whose white point is `wp` (with `Y = 1`).
pub fn reconstruct_illuminant(cmf: &CmfSet, diff: &DiffMatrix, wp: Tristimulus) -> Result<Illuminant> {
    let recon = reconstruct(cmf, diff, wp)?;
    // The solve leaves ȳ·W within roundoff of one; pin it exactly.
    normalize_illuminant(&recon.rho, cmf)
}

impl SpectralCatContext {
    /// White points may be given on either the 0–1 or 0–100 scale; both are
    /// rescaled to `Y = 1`.
    pub fn new(
        cmf: &CmfSet,
        src_wp: Tristimulus,
        dst_wp: Tristimulus,
        adaptation: f64,
        variant: Variant,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&adaptation) {
            return Err(Error::InvalidAdaptation(adaptation));
        }
        let src_wp = normalize_white_point(src_wp)?;
        let dst_wp = normalize_white_point(dst_wp)?;
        let diff = build_diff_matrix(N_BANDS)?;

        let w_s = reconstruct_illuminant(cmf, &diff, src_wp)?;
        let w_d = if dst_wp == src_wp { w_s } else { reconstruct_illuminant(cmf, &diff, dst_wp)? };
        let w_d_effective = if adaptation == 1.0 { w_d } else { w_d.blend(&w_s, adaptation) };

        Ok(SpectralCatContext {
            src_wp,
            dst_wp,
            w_s,
            w_d,
            w_d_effective,
            a_s: weight_cmf(&w_s, cmf),
            a_d: weight_cmf(&w_d_effective, cmf),
            a_sd: build_dual_cmf(&w_s, &w_d_effective, cmf),
            diff,
            adaptation,
            variant,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn adaptation(&self) -> f64 {
        self.adaptation
    }

    pub fn source_white(&self) -> Tristimulus {
        self.src_wp
    }

    pub fn destination_white(&self) -> Tristimulus {
        self.dst_wp
    }

    pub fn source_illuminant(&self) -> &Illuminant {
        &self.w_s
    }

    /// The reconstructed destination illuminant before partial adaptation.
    pub fn destination_illuminant(&self) -> &Illuminant {
        &self.w_d
    }

    pub fn effective_destination_illuminant(&self) -> &Illuminant {
        &self.w_d_effective
    }

    pub fn source_cmf(&self) -> &CmfSet {
        &self.a_s
    }

    pub fn destination_cmf(&self) -> &CmfSet {
        &self.a_d
    }

    pub fn dual_cmf(&self) -> &CmfSet {
        &self.a_sd
    }

    /// True when source and effective destination illuminants coincide, in
    /// which case every colour maps to itself.
    pub fn is_identity(&self) -> bool {
        self.w_d_effective == self.w_s
    }

    /// The reflectance this context would use for `src`.
    pub fn reconstruct_source(&self, src: Tristimulus) -> Result<ReconResult> {
        match self.variant {
            Variant::Original => reconstruct(&self.a_s, &self.diff, src),
            Variant::Symmetric => reconstruct_symmetric(&self.a_s, &self.a_sd, &self.diff, src),
        }
    }

    pub fn transform(&self, src: Tristimulus) -> Result<Tristimulus> {
        if !(src.y > 0.0) || !src.is_finite() {
            return Err(Error::NonPositiveLuminance(src.y));
        }
        if self.is_identity() {
            // A_D = A_S, and the reconstruction reproduces src under A_S.
            return Ok(src);
        }
        let recon = self.reconstruct_source(src)?;
        let unscaled = tristimulus(&recon.rho, &self.a_d);
        if unscaled.y <= 1e-12 {
            return Err(Error::DegenerateLuminance(unscaled.y));
        }
        let mut out = unscaled.scale(src.y / unscaled.y);
        out.y = src.y;
        Ok(out)
    }
}

/// Forward through `ab`, then back through `ba`.
pub fn round_trip(ab: &SpectralCatContext, ba: &SpectralCatContext, src: Tristimulus) -> Result<Tristimulus> {
    ba.transform(ab.transform(src)?)
}
