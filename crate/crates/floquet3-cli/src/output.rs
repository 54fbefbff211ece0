//! Deterministic output helpers: C-style `%.12e` scientific formatting and
//! a small writer that targets stdout or a file.

use std::io::Write;
use std::path::PathBuf;

/// Scientific notation with 12 fractional digits and a signed two-digit
/// exponent (`1.097215892335e-03`), stable across runs for byte-level
/// diffing.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.12e}", x);
    let (mant, exp) = s.split_once('e').expect("{:.12e} always carries an exponent");
    let e: i32 = exp.parse().expect("exponent is an integer");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format `{other}` (expected csv or text)")),
        }
    }
}

/// Collects lines and flushes them to stdout or to `--out`.
pub struct Sink {
    out: Option<PathBuf>,
    buffer: String,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Sink {
            out,
            buffer: String::new(),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.buffer.push_str(s.as_ref());
        self.buffer.push('\n');
    }

    pub fn finish(self) -> std::io::Result<()> {
        match self.out {
            Some(path) => std::fs::write(path, self.buffer),
            None => std::io::stdout().write_all(self.buffer.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_matches_c_style() {
        assert_eq!(fmt_sci(0.001097), "1.097000000000e-03");
        assert_eq!(fmt_sci(-2.5), "-2.500000000000e+00");
        assert_eq!(fmt_sci(0.0), "0.000000000000e+00");
        assert_eq!(fmt_sci(3.0e120), "3.000000000000e+120");
        assert_eq!(fmt_sci(f64::NAN), "nan");
    }
}
