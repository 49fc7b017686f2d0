//! Named white points, resolved from CIE 1931 2° chromaticities.

use crate::colorimetry::{Chromaticity, Tristimulus};

/// CIE 15:2004, Table T.3 (2° observer).
pub const ILLUMINANT_A: Chromaticity = Chromaticity::new(0.44757, 0.40745);
/// CIE 15:2004, Table T.3 (2° observer).
pub const ILLUMINANT_C: Chromaticity = Chromaticity::new(0.31006, 0.31616);
/// CIE 15:2004, Table T.3 (2° observer).
pub const ILLUMINANT_D65: Chromaticity = Chromaticity::new(0.31271, 0.32902);
pub const EQUAL_ENERGY: Chromaticity = Chromaticity::new(1.0 / 3.0, 1.0 / 3.0);

/// Looks up a preset by name (`A`, `C`, `D65`, `EE`/`E`), case-insensitively.
/// The result has `Y = 1`.
pub fn white_point(name: &str) -> Option<Tristimulus> {
    let c = match name.to_ascii_uppercase().as_str() {
        "A" => ILLUMINANT_A,
        "C" => ILLUMINANT_C,
        "D65" => ILLUMINANT_D65,
        "EE" | "E" => return Some(Tristimulus::new(1.0, 1.0, 1.0)),
        _ => return None,
    };
    Some(c.with_luminance(1.0))
}

pub const NAMES: [&str; 4] = ["A", "C", "D65", "EE"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_lift_to_unit_luminance() {
        for name in NAMES {
            let wp = white_point(name).unwrap();
            assert_eq!(wp.y, 1.0);
        }
        let a = white_point("a").unwrap();
        assert!((a.x - 1.098466).abs() < 1e-6 && (a.z - 0.355823).abs() < 1e-6, "{a:?}");
        let d65 = white_point("D65").unwrap();
        assert!((d65.x - 0.950428).abs() < 1e-6 && (d65.z - 1.088901).abs() < 1e-6, "{d65:?}");
        assert!(white_point("F2").is_none());
    }
}
