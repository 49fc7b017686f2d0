//! Spectral samples on the fixed 380–730 nm, 10 nm grid.

use std::io::{Read, Write};
use std::ops::Index;
use std::path::Path;

use crate::error::{Error, Result};

/// Number of wavelength bands.
pub const N_BANDS: usize = 36;
/// Centre of the first band, in nanometres.
pub const FIRST_WAVELENGTH_NM: u32 = 380;
/// Band spacing, in nanometres.
pub const BAND_STEP_NM: u32 = 10;

/// Centre wavelength of band `i`.
pub const fn wavelength_nm(i: usize) -> u32 {
    FIRST_WAVELENGTH_NM + BAND_STEP_NM * i as u32
}

/// Band centres, 380, 390, …, 730.
pub fn wavelengths() -> impl Iterator<Item = u32> {
    (0..N_BANDS).map(wavelength_nm)
}

/// One value per band: a reflectance or a relative spectral power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum([f64; N_BANDS]);

impl Spectrum {
    pub fn new(values: [f64; N_BANDS]) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Spectrum(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; N_BANDS] = values.try_into().map_err(|_| Error::SampleCount {
            expected: N_BANDS,
            actual: values.len(),
        })?;
        Self::new(arr)
    }

    pub fn constant(value: f64) -> Self {
        Spectrum([value; N_BANDS])
    }

    pub fn ones() -> Self {
        Self::constant(1.0)
    }

    pub fn values(&self) -> &[f64; N_BANDS] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Spectrum(self.0.map(f))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| v * k)
    }

    pub fn dot(&self, other: &[f64; N_BANDS]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Reads the two-column `wavelength_nm,value` format.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let rows = read_grid_csv(file, path, &["value"])?;
        Self::from_slice(&rows.iter().map(|r| r[0]).collect::<Vec<_>>())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["wavelength_nm", "value"])?;
        for (nm, v) in wavelengths().zip(self.iter()) {
            w.write_record([nm.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))?;
        Ok(())
    }
}

impl Index<usize> for Spectrum {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Parses a CSV whose first column is `wavelength_nm` on the standard grid and
/// whose remaining columns are exactly `value_columns`.
pub(crate) fn read_grid_csv<R: Read>(
    input: R,
    path: &Path,
    value_columns: &[&str],
) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("wavelength_nm").chain(value_columns.iter().copied()).collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::schema(
            path,
            format!("expected header `{}`, found `{}`", expected.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut rows = Vec::with_capacity(N_BANDS);
    let mut count = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        count += 1;
        if row >= N_BANDS {
            continue;
        }
        let parse = |field: &str| -> Result<f64> {
            field
                .parse::<f64>()
                .map_err(|_| Error::schema(path, format!("row {}: `{field}` is not a number", row + 1)))
        };
        let nm = parse(&record[0])?;
        if nm != f64::from(wavelength_nm(row)) {
            return Err(Error::Grid { row: row + 1, expected: wavelength_nm(row), found: nm });
        }
        rows.push(record.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?);
    }
    if count != N_BANDS {
        return Err(Error::SampleCount { expected: N_BANDS, actual: count });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        assert_eq!(wavelength_nm(0), 380);
        assert_eq!(wavelength_nm(N_BANDS - 1), 730);
        assert_eq!(wavelengths().count(), 36);
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let mut v = [0.5; N_BANDS];
        v[7] = f64::NAN;
        assert!(matches!(Spectrum::new(v), Err(Error::NonFinite { index: 7 })));
        assert!(matches!(Spectrum::from_slice(&[1.0; 35]), Err(Error::SampleCount { actual: 35, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let s = Spectrum::from_slice(&(0..N_BANDS).map(|i| 0.1 + i as f64 / 100.0).collect::<Vec<_>>()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        s.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        assert_eq!(Spectrum::read_csv(&path).unwrap(), s);
    }

    #[test]
    fn csv_rejects_wrong_grid() {
        let mut text = String::from("wavelength_nm,value\n");
        for i in 0..N_BANDS {
            text += &format!("{},1.0\n", 385 + 10 * i);
        }
        let err = read_grid_csv(text.as_bytes(), Path::new("x.csv"), &["value"]).unwrap_err();
        assert!(matches!(err, Error::Grid { row: 1, expected: 380, .. }), "{err}");

        let short: String = "wavelength_nm,value\n380,1\n390,1\n".into();
        let err = read_grid_csv(short.as_bytes(), Path::new("x.csv"), &["value"]).unwrap_err();
        assert!(matches!(err, Error::SampleCount { actual: 2, .. }));
    }

    #[test]
    fn csv_rejects_wrong_header() {
        let text = "nm,value\n380,1\n";
        assert!(matches!(
            read_grid_csv(text.as_bytes(), Path::new("x.csv"), &["value"]),
            Err(Error::Schema { .. })
        ));
    }
}
