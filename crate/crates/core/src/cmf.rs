//! Colour-matching functions and illuminant-weighted CMF matrices.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectrum::{read_grid_csv, wavelengths, N_BANDS};

/// CIE 1931 2° standard observer, 380–730 nm at 10 nm (CIE 015 tabulation).
/// Columns are x̄, ȳ, z̄.
#[rustfmt::skip]
const CIE1931_2DEG: [[f64; 3]; N_BANDS] = [
    [0.001368, 0.000039, 0.006450],
    [0.004243, 0.000120, 0.020050],
    [0.014310, 0.000396, 0.067850],
    [0.043510, 0.001210, 0.207400],
    [0.134380, 0.004000, 0.645600],
    [0.283900, 0.011600, 1.385600],
    [0.348280, 0.023000, 1.747060],
    [0.336200, 0.038000, 1.772110],
    [0.290800, 0.060000, 1.669200],
    [0.195360, 0.090980, 1.287640],
    [0.095640, 0.139020, 0.812950],
    [0.032010, 0.208020, 0.465180],
    [0.004900, 0.323000, 0.272000],
    [0.009300, 0.503000, 0.158200],
    [0.063270, 0.710000, 0.078250],
    [0.165500, 0.862000, 0.042160],
    [0.290400, 0.954000, 0.020300],
    [0.433450, 0.994950, 0.008750],
    [0.594500, 0.995000, 0.003900],
    [0.762100, 0.952000, 0.002100],
    [0.916300, 0.870000, 0.001650],
    [1.026300, 0.757000, 0.001100],
    [1.062200, 0.631000, 0.000800],
    [1.002600, 0.503000, 0.000340],
    [0.854450, 0.381000, 0.000190],
    [0.642400, 0.265000, 0.000050],
    [0.447900, 0.175000, 0.000020],
    [0.283500, 0.107000, 0.000000],
    [0.164900, 0.061000, 0.000000],
    [0.087400, 0.032000, 0.000000],
    [0.046770, 0.017000, 0.000000],
    [0.022700, 0.008210, 0.000000],
    [0.011359, 0.004102, 0.000000],
    [0.005790, 0.002091, 0.000000],
    [0.002899, 0.001047, 0.000000],
    [0.001440, 0.000520, 0.000000],
];

/// An n×3 matrix of colour-matching functions, one row per band.
///
/// The same type holds the plain observer `A` and its illuminant-weighted
/// forms (`diag(W)·A`, `diag(W_S)·diag(W_D)·A`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmfSet {
    rows: [[f64; 3]; N_BANDS],
}

pub fn builtin_cmf() -> CmfSet {
    CmfSet { rows: CIE1931_2DEG }
}

impl CmfSet {
    pub fn from_rows(rows: [[f64; 3]; N_BANDS]) -> Result<Self> {
        for (band, row) in rows.iter().enumerate() {
            for (column, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite { index: band });
                }
                if value < 0.0 {
                    return Err(Error::NegativeCmf { band, column, value });
                }
            }
        }
        Ok(CmfSet { rows })
    }

    pub fn rows(&self) -> &[[f64; 3]; N_BANDS] {
        &self.rows
    }

    pub fn row(&self, band: usize) -> [f64; 3] {
        self.rows[band]
    }

    pub fn column(&self, k: usize) -> [f64; N_BANDS] {
        std::array::from_fn(|i| self.rows[i][k])
    }

    /// The luminance column ȳ (or its weighted counterpart).
    pub fn ybar(&self) -> [f64; N_BANDS] {
        self.column(1)
    }

    /// Scales row `i` by `weights[i]`. Weights must be non-negative.
    pub(crate) fn scale_rows(&self, weights: &[f64; N_BANDS]) -> CmfSet {
        CmfSet { rows: std::array::from_fn(|i| self.rows[i].map(|v| v * weights[i])) }
    }

    /// Reads the `wavelength_nm,xbar,ybar,zbar` format.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let parsed = read_grid_csv(file, path, &["xbar", "ybar", "zbar"])?;
        Self::from_rows(std::array::from_fn(|i| [parsed[i][0], parsed[i][1], parsed[i][2]]))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["wavelength_nm", "xbar", "ybar", "zbar"])?;
        for (nm, row) in wavelengths().zip(self.rows.iter()) {
            w.write_record([nm.to_string(), row[0].to_string(), row[1].to_string(), row[2].to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))?;
        Ok(())
    }
}
