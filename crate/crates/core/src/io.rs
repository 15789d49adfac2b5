//! JSON and CSV formats.
//!
//! Function file:
//! `{"n": 3, "target": {"kind": "lq", "q": "inf", "m": 3}, "repr": "point", "data": [[re, im], ...]}`
//! with `data` vertex-major (`2^n * m` entries). Scalar targets are written as
//! `{"kind": "scalar"}`. Radial file: `{"n": 100, "phi": [[re, im], ...]}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cube::{fwht, ifwht, CubeFunction, Spectrum, TargetSpace};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::radial::{LevelSpectrum, RadialFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl From<TargetSpace> for TargetJson {
    fn from(t: TargetSpace) -> Self {
        match t {
            TargetSpace::Scalar => TargetJson {
                kind: "scalar".into(),
                q: None,
                m: None,
            },
            TargetSpace::Lq { q, m } => TargetJson {
                kind: "lq".into(),
                q: Some(q),
                m: Some(m),
            },
        }
    }
}

impl TargetJson {
    pub fn to_target(&self) -> Result<TargetSpace> {
        match self.kind.as_str() {
            "scalar" => Ok(TargetSpace::Scalar),
            "lq" => {
                let q = self.q.ok_or_else(|| Error::Format("lq target needs q".into()))?;
                let m = self.m.ok_or_else(|| Error::Format("lq target needs m".into()))?;
                TargetSpace::lq(q, m)
            }
            k => Err(Error::Format(format!("unknown target kind {k:?}"))),
        }
    }
}

/// Whether `data` holds values or Walsh coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Point,
    Spectrum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub n: usize,
    pub target: TargetJson,
    pub repr: Representation,
    pub data: Vec<[f64; 2]>,
}

fn pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(d: &[[f64; 2]]) -> Vec<Complex64> {
    d.iter().map(|[a, b]| Complex64::new(*a, *b)).collect()
}

impl FunctionFile {
    pub fn from_function(f: &CubeFunction) -> Self {
        FunctionFile {
            n: f.n(),
            target: f.target().into(),
            repr: Representation::Point,
            data: pairs(f.values()),
        }
    }

    pub fn from_spectrum(s: &Spectrum) -> Self {
        FunctionFile {
            n: s.n(),
            target: s.target().into(),
            repr: Representation::Spectrum,
            data: pairs(s.coeffs()),
        }
    }

    /// Point values, inverting the transform if the file holds a spectrum.
    pub fn to_function(&self) -> Result<CubeFunction> {
        let target = self.target.to_target()?;
        let vals = complexes(&self.data);
        match self.repr {
            Representation::Point => CubeFunction::new(self.n, target, vals),
            Representation::Spectrum => Ok(ifwht(&Spectrum::new(self.n, target, vals)?)),
        }
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let target = self.target.to_target()?;
        let vals = complexes(&self.data);
        match self.repr {
            Representation::Point => Ok(fwht(&CubeFunction::new(self.n, target, vals)?)),
            Representation::Spectrum => Spectrum::new(self.n, target, vals),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFile {
    pub n: usize,
    pub phi: Vec<[f64; 2]>,
}

impl RadialFile {
    pub fn from_radial(f: &RadialFunction) -> Self {
        RadialFile {
            n: f.n(),
            phi: pairs(f.phi()),
        }
    }

    pub fn to_radial(&self) -> Result<RadialFunction> {
        RadialFunction::new(self.n, complexes(&self.phi))
    }
}

/// Level spectrum of a radial function as orthonormal amplitudes
/// `sqrt(C(n,k)) c_k`: `{"n": 100, "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl LevelFile {
    pub fn from_levels(s: &LevelSpectrum) -> Self {
        LevelFile {
            n: s.n(),
            amplitudes: pairs(s.amplitudes()),
        }
    }

    pub fn to_levels(&self) -> Result<LevelSpectrum> {
        LevelSpectrum::from_amplitudes(self.n, complexes(&self.amplitudes))
    }
}

/// Any of the function file kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyFunctionFile {
    Dense(FunctionFile),
    Radial(RadialFile),
    Levels(LevelFile),
}

/// Reads a function file, telling the kinds apart by their keys.
pub fn read_any(path: &Path) -> Result<AnyFunctionFile> {
    let v: serde_json::Value = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if v.get("phi").is_some() {
        Ok(AnyFunctionFile::Radial(serde_json::from_value(v)?))
    } else if v.get("amplitudes").is_some() {
        Ok(AnyFunctionFile::Levels(serde_json::from_value(v)?))
    } else {
        Ok(AnyFunctionFile::Dense(serde_json::from_value(v)?))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `rows` as CSV with the given header.
pub fn write_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{random_function, SpectralBand};

    #[test]
    fn function_file_roundtrip() {
        let t = TargetSpace::lq(Exponent::Infinity, 2).unwrap();
        let f = random_function(3, SpectralBand::full(3), t, 1, 0).unwrap();
        let file = FunctionFile::from_function(&f);
        let s = serde_json::to_string(&file).unwrap();
        assert!(s.contains("\"q\":\"inf\""));
        let back: FunctionFile = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_function().unwrap(), f);
        let spec = FunctionFile::from_spectrum(&fwht(&f));
        let g = spec.to_function().unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn scalar_target_is_terse() {
        let f = crate::cube::character(1, 1).unwrap();
        let s = serde_json::to_string(&FunctionFile::from_function(&f)).unwrap();
        assert_eq!(
            s,
            r#"{"n":1,"target":{"kind":"scalar"},"repr":"point","data":[[1.0,0.0],[-1.0,0.0]]}"#
        );
    }

    #[test]
    fn malformed_files() {
        let bad: FunctionFile = serde_json::from_str(
            r#"{"n":1,"target":{"kind":"lq","q":2},"repr":"point","data":[[1,0],[0,0]]}"#,
        )
        .unwrap();
        assert!(bad.to_function().is_err());
        let short: FunctionFile = serde_json::from_str(
            r#"{"n":2,"target":{"kind":"scalar"},"repr":"point","data":[[1,0]]}"#,
        )
        .unwrap();
        assert!(short.to_function().is_err());
        assert!(serde_json::from_str::<FunctionFile>(r#"{"n":1}"#).is_err());
    }

    #[test]
    fn radial_file_roundtrip() {
        let r = RadialFunction::chebyshev_witness(6, 2).unwrap();
        let f = RadialFile::from_radial(&r);
        let back: RadialFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back.to_radial().unwrap(), r);
    }
}
