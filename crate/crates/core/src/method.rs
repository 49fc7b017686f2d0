//! Uniform dispatch over the spectral and linear transforms.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::cmf::CmfSet;
use crate::colorimetry::{normalize_white_point, Tristimulus};
use crate::error::{Error, Result};
use crate::spectral_cat::{SpectralCatContext, Variant};
use crate::vonkries::{self, LinearCatSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Spectral,
    SpectralSym,
    Hpe,
    Cat02,
    Cat16,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Spectral, Method::SpectralSym, Method::Hpe, Method::Cat02, Method::Cat16];

    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::SpectralSym => "spectral-sym",
            Method::Hpe => "hpe",
            Method::Cat02 => "cat02",
            Method::Cat16 => "cat16",
        }
    }

    pub fn is_spectral(self) -> bool {
        matches!(self, Method::Spectral | Method::SpectralSym)
    }

    pub fn linear_spec(self) -> Option<LinearCatSpec> {
        match self {
            Method::Hpe => Some(vonkries::hpe()),
            Method::Cat02 => Some(vonkries::cat02()),
            Method::Cat16 => Some(vonkries::cat16()),
            Method::Spectral | Method::SpectralSym => None,
        }
    }

    /// Builds the per-illuminant-pair state. White points are rescaled to `Y = 1`.
    pub fn prepare(self, cmf: &CmfSet, src_wp: Tristimulus, dst_wp: Tristimulus, d: f64) -> Result<PreparedCat> {
        let inner = match self {
            Method::Spectral => {
                Prepared::Spectral(SpectralCatContext::new(cmf, src_wp, dst_wp, d, Variant::Original)?)
            }
            Method::SpectralSym => {
                Prepared::Spectral(SpectralCatContext::new(cmf, src_wp, dst_wp, d, Variant::Symmetric)?)
            }
            _ => {
                let spec = self.linear_spec().expect("linear method");
                let src_wp = normalize_white_point(src_wp)?;
                let dst_wp = normalize_white_point(dst_wp)?;
                let matrix = spec.adaptation_matrix(src_wp, dst_wp, d)?;
                Prepared::Linear { matrix, identity: d == 0.0 || src_wp == dst_wp }
            }
        };
        Ok(PreparedCat { method: self, inner })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Spectral(SpectralCatContext),
    Linear { matrix: Matrix3<f64>, identity: bool },
}

/// A transform bound to one source/destination pair and degree of adaptation.
#[derive(Debug, Clone)]
pub struct PreparedCat {
    method: Method,
    inner: Prepared,
}

impl PreparedCat {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn spectral_context(&self) -> Option<&SpectralCatContext> {
        match &self.inner {
            Prepared::Spectral(ctx) => Some(ctx),
            Prepared::Linear { .. } => None,
        }
    }

    pub fn transform(&self, src: Tristimulus) -> Result<Tristimulus> {
        match &self.inner {
            Prepared::Spectral(ctx) => ctx.transform(src),
            Prepared::Linear { identity: true, .. } => Ok(src),
            Prepared::Linear { matrix, .. } => {
                let v = matrix * Vector3::new(src.x, src.y, src.z);
                Ok(Tristimulus::new(v[0], v[1], v[2]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmf::builtin_cmf;
    use crate::presets;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("CAT02".parse::<Method>().unwrap(), Method::Cat02);
        assert!(matches!("bradford".parse::<Method>(), Err(Error::UnknownMethod(_))));
    }

    #[test]
    fn every_method_maps_white_to_white() {
        let cmf = builtin_cmf();
        let a = presets::white_point("A").unwrap();
        let d65 = presets::white_point("D65").unwrap();
        for m in Method::ALL {
            let cat = m.prepare(&cmf, a, d65, 1.0).unwrap();
            let out = cat.transform(a).unwrap();
            assert!(out.max_abs_diff(d65) < 1e-8, "{m}: {out:?}");
        }
    }

    #[test]
    fn every_method_is_identity_at_zero_adaptation() {
        let cmf = builtin_cmf();
        let a = presets::white_point("A").unwrap();
        let d65 = presets::white_point("D65").unwrap();
        let src = Tristimulus::new(0.2, 0.3, 0.1);
        for m in Method::ALL {
            assert_eq!(m.prepare(&cmf, a, d65, 0.0).unwrap().transform(src).unwrap(), src);
            assert_eq!(m.prepare(&cmf, d65, d65, 1.0).unwrap().transform(src).unwrap(), src);
        }
    }

    #[test]
    fn linear_white_points_on_hundred_scale() {
        let cmf = builtin_cmf();
        let a = presets::white_point("A").unwrap();
        let d65 = presets::white_point("D65").unwrap();
        let cat = Method::Cat16.prepare(&cmf, a.scale(100.0), d65.scale(100.0), 1.0).unwrap();
        assert!(cat.transform(a).unwrap().max_abs_diff(d65) < 1e-12);
    }
}
