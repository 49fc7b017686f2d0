//! Tristimulus values, chromaticities and illuminant normalisation.
//!
//! Everything is on the 0–1 convention: a perfect reflector under a
//! normalised illuminant has `Y = 1`.

use serde::{Deserialize, Serialize};

use crate::cmf::CmfSet;
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, N_BANDS};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tristimulus {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
}

impl Tristimulus {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Tristimulus { x, y, z }
    }

    pub fn from_array([x, y, z]: [f64; 3]) -> Self {
        Tristimulus { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn scale(self, k: f64) -> Self {
        Tristimulus::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn sum(self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// True iff any component is strictly below zero.
    pub fn has_negative(self) -> bool {
        self.x < 0.0 || self.y < 0.0 || self.z < 0.0
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(self, other: Tristimulus) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs()).max((self.z - other.z).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chromaticity {
    pub x: f64,
    pub y: f64,
}

impl Chromaticity {
    pub const fn new(x: f64, y: f64) -> Self {
        Chromaticity { x, y }
    }

    /// The tristimulus value with this chromaticity and the given luminance.
    pub fn with_luminance(self, luminance: f64) -> Tristimulus {
        let k = luminance / self.y;
        Tristimulus::new(self.x * k, luminance, (1.0 - self.x - self.y) * k)
    }
}

pub fn chromaticity(xyz: Tristimulus) -> Result<Chromaticity> {
    let s = xyz.sum();
    if s == 0.0 || !s.is_finite() {
        return Err(Error::DegenerateSum);
    }
    Ok(Chromaticity::new(xyz.x / s, xyz.y / s))
}

/// Rescales a white point to `Y = 1`, which also moves a 0–100 white point
/// onto the 0–1 convention.
pub fn normalize_white_point(wp: Tristimulus) -> Result<Tristimulus> {
    if !(wp.y > 0.0) || !wp.is_finite() {
        return Err(Error::InvalidWhitePoint(wp.y));
    }
    Ok(wp.scale(1.0 / wp.y))
}

/// A spectral power distribution scaled so that `ȳ·W = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Illuminant {
    spectrum: Spectrum,
}

impl Illuminant {
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// An equal-energy illuminant normalised against `cmf`.
    pub fn equal_energy(cmf: &CmfSet) -> Result<Self> {
        normalize_illuminant(&Spectrum::ones(), cmf)
    }

    /// `D·self + (1 − D)·other`; stays normalised because both terms are.
    pub(crate) fn blend(&self, other: &Illuminant, d: f64) -> Illuminant {
        let a = self.spectrum.values();
        let b = other.spectrum.values();
        let values: [f64; N_BANDS] = std::array::from_fn(|i| d * a[i] + (1.0 - d) * b[i]);
        Illuminant { spectrum: Spectrum::new(values).expect("blend of finite spectra") }
    }
}

/// Scales `raw` so that its luminance `ȳ·W` is exactly one.
pub fn normalize_illuminant(raw: &Spectrum, cmf: &CmfSet) -> Result<Illuminant> {
    if let Some((index, &value)) = raw.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeIlluminant { index, value });
    }
    let luminance = raw.dot(&cmf.ybar());
    if luminance <= 0.0 || !luminance.is_finite() {
        return Err(Error::ZeroLuminance(luminance));
    }
    Ok(Illuminant { spectrum: raw.scale(1.0 / luminance) })
}

/// `A_W = diag(W)·A`.
pub fn weight_cmf(illum: &Illuminant, cmf: &CmfSet) -> CmfSet {
    cmf.scale_rows(illum.spectrum.values())
}

/// `XYZ = A_W′·ρ`.
pub fn tristimulus(rho: &Spectrum, weighted: &CmfSet) -> Tristimulus {
    let mut acc = [0.0; 3];
    for (r, row) in rho.iter().zip(weighted.rows()) {
        for k in 0..3 {
            acc[k] += row[k] * r;
        }
    }
    Tristimulus::from_array(acc)
}

/// `XYZ^wp = A′·W`, the tristimulus of a perfect reflector.
pub fn white_point(illum: &Illuminant, cmf: &CmfSet) -> Tristimulus {
    tristimulus(&Spectrum::ones(), &weight_cmf(illum, cmf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmf::builtin_cmf;
    use proptest::prelude::*;

    fn spectrum_strategy() -> impl Strategy<Value = Spectrum> {
        proptest::array::uniform32(0.0f64..1.0)
            .prop_flat_map(|head| (Just(head), proptest::array::uniform4(0.0f64..1.0)))
            .prop_map(|(head, tail)| {
                let mut v = [0.0; N_BANDS];
                v[..32].copy_from_slice(&head);
                v[32..].copy_from_slice(&tail);
                Spectrum::new(v).unwrap()
            })
    }

    fn illuminant_strategy() -> impl Strategy<Value = Illuminant> {
        spectrum_strategy().prop_map(|s| normalize_illuminant(&s.map(|v| v + 0.05), &builtin_cmf()).unwrap())
    }

    #[test]
    fn flat_spectrum_normalises_to_inverse_ybar_sum() {
        let cmf = builtin_cmf();
        let w = normalize_illuminant(&Spectrum::ones(), &cmf).unwrap();
        let expected = 1.0 / cmf.ybar().iter().sum::<f64>();
        assert!(w.spectrum().iter().all(|v| (v - expected).abs() < 1e-15));
    }

    #[test]
    fn normalisation_is_scale_invariant_and_idempotent() {
        let cmf = builtin_cmf();
        let raw = Spectrum::from_slice(&(0..N_BANDS).map(|i| 0.3 + (i as f64 * 0.4).sin().abs()).collect::<Vec<_>>())
            .unwrap();
        let w = normalize_illuminant(&raw, &cmf).unwrap();
        let again = normalize_illuminant(w.spectrum(), &cmf).unwrap();
        let doubled = normalize_illuminant(&w.spectrum().scale(2.0), &cmf).unwrap();
        for i in 0..N_BANDS {
            assert!((again.spectrum()[i] - w.spectrum()[i]).abs() < 1e-15);
            assert!((doubled.spectrum()[i] - w.spectrum()[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_luminance_is_rejected() {
        let cmf = builtin_cmf();
        assert!(matches!(normalize_illuminant(&Spectrum::constant(0.0), &cmf), Err(Error::ZeroLuminance(_))));
        let mut v = [0.0; N_BANDS];
        v[4] = -1.0;
        assert!(matches!(
            normalize_illuminant(&Spectrum::new(v).unwrap(), &cmf),
            Err(Error::NegativeIlluminant { index: 4, .. })
        ));
    }

    #[test]
    fn weighting_zero_band_zeroes_row() {
        let cmf = builtin_cmf();
        let mut v = [1.0; N_BANDS];
        v[20] = 0.0;
        let w = normalize_illuminant(&Spectrum::new(v).unwrap(), &cmf).unwrap();
        let aw = weight_cmf(&w, &cmf);
        assert_eq!(aw.row(20), [0.0; 3]);
        let k = w.spectrum()[0];
        for i in (0..N_BANDS).filter(|&i| i != 20) {
            for c in 0..3 {
                assert!((aw.row(i)[c] - k * cmf.row(i)[c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn simple_tristimulus_cases() {
        let cmf = builtin_cmf();
        let w = Illuminant::equal_energy(&cmf).unwrap();
        let aw = weight_cmf(&w, &cmf);
        let wp = white_point(&w, &cmf);
        assert!((wp.y - 1.0).abs() < 1e-12);
        assert_eq!(tristimulus(&Spectrum::constant(0.0), &aw), Tristimulus::default());
        let half = tristimulus(&Spectrum::constant(0.5), &aw);
        assert!(half.max_abs_diff(wp.scale(0.5)) < 1e-15);
    }

    #[test]
    fn chromaticity_cases() {
        let c = chromaticity(Tristimulus::new(1.0, 1.0, 1.0)).unwrap();
        assert!((c.x - 1.0 / 3.0).abs() < 1e-15 && (c.y - 1.0 / 3.0).abs() < 1e-15);
        let c = chromaticity(Tristimulus::new(1.5, 1.0, 0.5)).unwrap();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 1.0 / 3.0).abs() < 1e-15);
        let c = chromaticity(Tristimulus::new(0.660, 1.0, 0.792)).unwrap();
        assert!((c.x - 0.269).abs() < 5e-4 && (c.y - 0.408).abs() < 5e-4, "{c:?}");
        let c = chromaticity(Tristimulus::new(2.15, 1.0, 4.73)).unwrap();
        assert!((c.x - 0.272).abs() < 1e-3 && (c.y - 0.127).abs() < 1e-3, "{c:?}");
        assert!(matches!(chromaticity(Tristimulus::default()), Err(Error::DegenerateSum)));
    }

    #[test]
    fn lifting_chromaticity_recovers_tristimulus() {
        let xyz = Tristimulus::new(0.4, 0.3, 0.2);
        let back = chromaticity(xyz).unwrap().with_luminance(0.3);
        assert!(back.max_abs_diff(xyz) < 1e-15);
    }

    #[test]
    fn white_point_normalisation() {
        let wp = normalize_white_point(Tristimulus::new(95.047, 100.0, 108.883)).unwrap();
        assert!(wp.max_abs_diff(Tristimulus::new(0.95047, 1.0, 1.08883)) < 1e-15);
        assert_eq!(normalize_white_point(Tristimulus::new(1.5, 1.0, 0.5)).unwrap(), Tristimulus::new(1.5, 1.0, 0.5));
        assert!(matches!(normalize_white_point(Tristimulus::new(1.0, 0.0, 1.0)), Err(Error::InvalidWhitePoint(_))));
    }

    #[test]
    fn has_negative_boundary() {
        assert!(!Tristimulus::new(0.2, 0.3, 0.1).has_negative());
        assert!(Tristimulus::new(-0.01, 0.3, 0.1).has_negative());
        assert!(!Tristimulus::new(0.0, 0.0, 0.0).has_negative());
    }

    proptest! {
        #[test]
        fn normalised_luminance_is_one(raw in spectrum_strategy()) {
            let cmf = builtin_cmf();
            let raw = raw.map(|v| v + 1e-3);
            let w = normalize_illuminant(&raw, &cmf).unwrap();
            prop_assert!((w.spectrum().dot(&cmf.ybar()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tristimulus_is_linear(r1 in spectrum_strategy(), r2 in spectrum_strategy(), a in -2.0f64..2.0, b in -2.0f64..2.0, w in illuminant_strategy()) {
            let aw = weight_cmf(&w, &builtin_cmf());
            let mix = Spectrum::new(std::array::from_fn(|i| a * r1[i] + b * r2[i])).unwrap();
            let lhs = tristimulus(&mix, &aw);
            let t1 = tristimulus(&r1, &aw);
            let t2 = tristimulus(&r2, &aw);
            let rhs = Tristimulus::new(a * t1.x + b * t2.x, a * t1.y + b * t2.y, a * t1.z + b * t2.z);
            prop_assert!(lhs.max_abs_diff(rhs) < 1e-12);
        }

        #[test]
        fn white_point_matches_weighted_ones(w in illuminant_strategy()) {
            let cmf = builtin_cmf();
            let wp = white_point(&w, &cmf);
            // A_W′·1 and A′·W are the same sums in a different association order.
            let direct = Tristimulus::from_array(std::array::from_fn(|k| w.spectrum().dot(&cmf.column(k))));
            prop_assert!(wp.max_abs_diff(direct) < 1e-14);
            prop_assert!((wp.y - 1.0).abs() < 1e-12);
        }
    }
}
