//! Linear von Kries-family transforms (HPE, CAT02, CAT16).

use nalgebra::{Matrix3, Vector3};

use crate::colorimetry::Tristimulus;
use crate::error::{Error, Result};

/// Hunt–Pointer–Estévez cone fundamentals, rows normalised so an
/// equal-energy stimulus gives equal responses.
#[rustfmt::skip]
const HPE: [[f64; 3]; 3] = [
    [ 0.38971, 0.68898, -0.07868],
    [-0.22981, 1.18340,  0.04641],
    [ 0.00000, 0.00000,  1.00000],
];

/// CIECAM02 sharpened space, CIE 159:2004.
#[rustfmt::skip]
const CAT02: [[f64; 3]; 3] = [
    [ 0.7328, 0.4296, -0.1624],
    [-0.7036, 1.6975,  0.0061],
    [ 0.0030, 0.0136,  0.9834],
];

/// CAM16 sharpened space, Li et al. (2017), Color Res. Appl. 42(6).
#[rustfmt::skip]
const CAT16: [[f64; 3]; 3] = [
    [ 0.401288, 0.650173, -0.051461],
    [-0.250268, 1.204414,  0.045854],
    [-0.002079, 0.048952,  0.953127],
];

#[derive(Debug, Clone, PartialEq)]
pub struct LinearCatSpec {
    name: &'static str,
    m: Matrix3<f64>,
    m_inv: Matrix3<f64>,
}

impl LinearCatSpec {
    /// Fails with `SingularMatrix` when `m` has no inverse.
    pub fn new(name: &'static str, m: [[f64; 3]; 3]) -> Result<Self> {
        let m = Matrix3::from_fn(|i, j| m[i][j]);
        let m_inv = m.try_inverse().ok_or_else(|| Error::SingularMatrix(name.to_string()))?;
        if !m_inv.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularMatrix(name.to_string()));
        }
        Ok(LinearCatSpec { name, m, m_inv })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn inverse(&self) -> &Matrix3<f64> {
        &self.m_inv
    }

    fn cone(&self, xyz: Tristimulus) -> Vector3<f64> {
        self.m * Vector3::from(xyz.to_array())
    }

    /// The full 3×3 adaptation matrix `M⁻¹·(D·Λ + (1 − D)·I)·M`.
    pub fn adaptation_matrix(&self, src_wp: Tristimulus, dst_wp: Tristimulus, d: f64) -> Result<Matrix3<f64>> {
        check_adaptation(d)?;
        let s = self.cone(src_wp);
        let t = self.cone(dst_wp);
        for channel in 0..3 {
            if !(s[channel] > 0.0) {
                return Err(Error::DegenerateCone { channel, value: s[channel] });
            }
        }
        let gains = Vector3::from_fn(|i, _| d * t[i] / s[i] + (1.0 - d));
        Ok(self.m_inv * Matrix3::from_diagonal(&gains) * self.m)
    }
}

fn check_adaptation(d: f64) -> Result<()> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidAdaptation(d))
    }
}

pub fn hpe() -> LinearCatSpec {
    LinearCatSpec::new("hpe", HPE).expect("HPE matrix is invertible")
}

pub fn cat02() -> LinearCatSpec {
    LinearCatSpec::new("cat02", CAT02).expect("CAT02 matrix is invertible")
}

pub fn cat16() -> LinearCatSpec {
    LinearCatSpec::new("cat16", CAT16).expect("CAT16 matrix is invertible")
}

pub fn builtin_specs() -> Vec<LinearCatSpec> {
    vec![hpe(), cat02(), cat16()]
}

/// Negative outputs are returned unchanged.
pub fn linear_cat_transform(
    spec: &LinearCatSpec,
    src_wp: Tristimulus,
    dst_wp: Tristimulus,
    d: f64,
    src: Tristimulus,
) -> Result<Tristimulus> {
    let m = spec.adaptation_matrix(src_wp, dst_wp, d)?;
    if d == 0.0 {
        return Ok(src);
    }
    let out = m * Vector3::from(src.to_array());
    Ok(Tristimulus::new(out[0], out[1], out[2]))
}
