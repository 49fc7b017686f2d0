//! CIE 1976 L*a*b* and the CIE94 colour difference.

use serde::{Deserialize, Serialize};

use crate::colorimetry::Tristimulus;
use crate::error::{Error, Result};

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabColor {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabColor {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        LabColor { l, a, b }
    }

    pub fn chroma(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

fn f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

pub fn xyz_to_lab(xyz: Tristimulus, white: Tristimulus) -> Result<LabColor> {
    if !(white.x > 0.0 && white.y > 0.0 && white.z > 0.0) {
        return Err(Error::InvalidWhite(white.x, white.y, white.z));
    }
    let fx = f(xyz.x / white.x);
    let fy = f(xyz.y / white.y);
    let fz = f(xyz.z / white.z);
    Ok(LabColor::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)))
}

/// CIE94 ΔE*, graphic-arts weights (kL = kC = kH = 1, K1 = 0.045, K2 = 0.015).
///
/// Asymmetric: the chroma of `reference` sets the weighting functions.
pub fn delta_e94(reference: &LabColor, sample: &LabColor) -> f64 {
    const K1: f64 = 0.045;
    const K2: f64 = 0.015;

    let dl = reference.l - sample.l;
    let c1 = reference.chroma();
    let c2 = sample.chroma();
    let dc = c1 - c2;
    let da = reference.a - sample.a;
    let db = reference.b - sample.b;
    // ΔH² can dip below zero by roundoff when the hue difference vanishes.
    let dh2 = (da * da + db * db - dc * dc).max(0.0);

    let sc = 1.0 + K1 * c1;
    let sh = 1.0 + K2 * c1;
    (dl * dl + (dc / sc).powi(2) + dh2 / (sh * sh)).sqrt()
}
