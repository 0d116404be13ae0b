use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrate::fmt_f64;

/// Which route produced a derivative estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Tangent,
    Adjoint,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Tangent => "tangent",
            Method::Adjoint => "adjoint",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tangent" => Ok(Method::Tangent),
            "adjoint" => Ok(Method::Adjoint),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// A windowed derivative estimate of `d⟨J⟩/ds` with its diagnostics.
#[derive(Debug, Clone)]
pub struct SensitivityReport {
    pub derivative: f64,
    pub method: Method,
    pub window_name: String,
    pub horizon: f64,
    pub dt: f64,
    /// Location of the smallest `‖v(t_i)‖`, as a fraction of the horizon.
    /// Only the tangent route has the shadowing direction available.
    pub argmin_location: Option<f64>,
    /// `(t_i, ‖v(t_i)‖)`; empty for adjoint reports.
    pub envelope: Vec<(f64, f64)>,
}

impl SensitivityReport {
    /// Writes the envelope as `t,norm_v` rows.
    pub fn write_envelope_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "norm_v"])?;
        for &(t, nv) in &self.envelope {
            w.write_record([fmt_f64(t), fmt_f64(nv)])?;
        }
        w.flush().map_err(|e| Error::io("<envelope csv>", e))?;
        Ok(())
    }
}
