use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// `%g` with six significant digits.
pub fn g6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim(format!("{v:.*}", (5 - exp) as usize))
    } else {
        format!("{}e{}{:02}", trim(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// `--out` or stdout.
pub fn open(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `data.csv` → `data.csv.json`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn meta(command: &str, extra: Value) -> Value {
    json!({
        "tool": "chromadapt",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "parameters": extra,
    })
}

pub fn write_json(w: &mut dyn Write, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

#[cfg(test)]
mod tests {
    use super::g6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(g6(0.169936123), "0.169936");
        assert_eq!(g6(0.3), "0.3");
        assert_eq!(g6(1.0), "1");
        assert_eq!(g6(123456.7), "123457");
        assert_eq!(g6(1234567.0), "1.23457e+06");
        assert_eq!(g6(0.00001234567), "1.23457e-05");
        assert_eq!(g6(0.0001234567), "0.000123457");
        assert_eq!(g6(-2.5), "-2.5");
        assert_eq!(g6(9.9999996), "10");
        assert_eq!(g6(-0.0), "0");
        assert_eq!(g6(-1e-300), "-1e-300");
    }
}
