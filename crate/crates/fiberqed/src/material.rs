//! Frequency-dependent complex relative permittivity of the fiber material.
//!
//! Three model kinds are supported: a tabulated optical-constants file
//! (wavelength_nm, n, k), an analytic Sellmeier form, and a constant. The
//! static (zero-frequency) value is carried separately since optical tables
//! do not reach it.

use crate::constants::C;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

/// Default static relative permittivity of silica used when a table model
/// cannot provide the zero-frequency limit.
pub const DEFAULT_STATIC_EPSILON: f64 = 3.9;

/// Angular frequencies (rad/s) of the two-pole description of epsilon on the
/// imaginary frequency axis: infrared and ultraviolet silica resonances.
pub const SILICA_OMEGA_IR: f64 = 1.88e14;
pub const SILICA_OMEGA_UV: f64 = 2.03e16;

#[derive(Debug, Clone, Error)]
pub enum MaterialError {
    #[error("frequency {omega:.4e} rad/s outside supported window [{min:.4e}, {max:.4e}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },
    #[error("optical-constants table line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("optical-constants table line {line}: wavelengths must strictly increase")]
    NonMonotone { line: usize },
    #[error("optical-constants table line {line}: n must be > 0 and k >= 0")]
    Invalid { line: usize },
    #[error("model does not define a static permittivity")]
    MissingStatic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TableRow {
    omega: f64, // rad/s
    n: f64,
    k: f64,
}

/// Permittivity model of the fiber core; the outside is always vacuum.
#[derive(Debug, Clone)]
pub enum PermittivityModel {
    /// Interpolated (wavelength, n, k) table, rows sorted by increasing omega.
    Tabulated {
        rows: Vec<TableRowPub>,
        static_value: f64,
        version: String,
    },
    /// Three-term Sellmeier formula, coefficients in um^2 units for c_i.
    Sellmeier {
        b: [f64; 3],
        c_um2: [f64; 3],
        static_value: f64,
    },
    /// Frequency-independent value.
    Constant { epsilon: f64, static_value: f64 },
}

/// Public row (omega in rad/s ascending).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRowPub {
    pub omega: f64,
    pub n: f64,
    pub k: f64,
}

impl fmt::Display for PermittivityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PermittivityModel::Tabulated { rows, version, .. } => {
                write!(f, "tabulated({} rows, version {})", rows.len(), version)
            }
            PermittivityModel::Sellmeier { .. } => write!(f, "sellmeier"),
            PermittivityModel::Constant { epsilon, .. } => write!(f, "constant({epsilon})"),
        }
    }
}

impl PermittivityModel {
    /// Built-in fused-silica table shipped with the crate.
    pub fn builtin_silica() -> &'static PermittivityModel {
        static MODEL: OnceLock<PermittivityModel> = OnceLock::new();
        MODEL.get_or_init(|| {
            PermittivityModel::from_table_str(include_str!("../data/silica_nk.csv"))
                .expect("embedded silica table parses")
        })
    }

    /// Malitson-type Sellmeier coefficients for fused silica.
    pub fn silica_sellmeier() -> PermittivityModel {
        PermittivityModel::Sellmeier {
            b: [0.696_166_3, 0.407_942_6, 0.897_479_4],
            c_um2: [
                0.068_404_3 * 0.068_404_3,
                0.116_241_4 * 0.116_241_4,
                9.896_161 * 9.896_161,
            ],
            static_value: DEFAULT_STATIC_EPSILON,
        }
    }

    pub fn constant(epsilon: f64) -> PermittivityModel {
        PermittivityModel::Constant {
            epsilon,
            static_value: epsilon,
        }
    }

    /// Parse an optical-constants CSV: `#` comments (a `# version:` line is
    /// kept as provenance), one header row, then `wavelength_nm,n,k` rows in
    /// strictly increasing wavelength.
    pub fn from_table_str(text: &str) -> Result<PermittivityModel, MaterialError> {
        let mut rows: Vec<TableRow> = Vec::new();
        let mut version = String::from("unversioned");
        let mut header_seen = false;
        let mut prev_lambda = 0.0f64;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("version:") {
                    version = v.trim().to_string();
                }
                continue;
            }
            if !header_seen {
                header_seen = true;
                if !line.starts_with("wavelength_nm") {
                    return Err(MaterialError::Parse {
                        line: line_no,
                        msg: format!("expected header `wavelength_nm,n,k`, found `{line}`"),
                    });
                }
                continue;
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| -> Result<f64, MaterialError> {
                parts
                    .next()
                    .ok_or_else(|| MaterialError::Parse {
                        line: line_no,
                        msg: format!("missing {what} column"),
                    })?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| MaterialError::Parse {
                        line: line_no,
                        msg: format!("{what}: {e}"),
                    })
            };
            let lambda_nm = next("wavelength_nm")?;
            let n = next("n")?;
            let k = next("k")?;
            if lambda_nm <= prev_lambda {
                return Err(MaterialError::NonMonotone { line: line_no });
            }
            prev_lambda = lambda_nm;
            if n <= 0.0 || k < 0.0 {
                return Err(MaterialError::Invalid { line: line_no });
            }
            rows.push(TableRow {
                omega: 2.0 * PI * C / (lambda_nm * 1e-9),
                n,
                k,
            });
        }
        if rows.len() < 2 {
            return Err(MaterialError::Parse {
                line: 0,
                msg: "table needs at least two rows".into(),
            });
        }
        // rows were in increasing wavelength = decreasing omega
        rows.reverse();
        Ok(PermittivityModel::Tabulated {
            rows: rows
                .into_iter()
                .map(|r| TableRowPub {
                    omega: r.omega,
                    n: r.n,
                    k: r.k,
                })
                .collect(),
            static_value: DEFAULT_STATIC_EPSILON,
            version,
        })
    }

    /// Load a table from a file path.
    pub fn from_table_file(path: &std::path::Path) -> Result<PermittivityModel, MaterialError> {
        let text = std::fs::read_to_string(path).map_err(|e| MaterialError::Parse {
            line: 0,
            msg: format!("{}: {e}", path.display()),
        })?;
        PermittivityModel::from_table_str(&text)
    }

    /// Override the static value (CLI knob).
    pub fn with_static_value(mut self, value: f64) -> Self {
        match &mut self {
            PermittivityModel::Tabulated { static_value, .. }
            | PermittivityModel::Sellmeier { static_value, .. }
            | PermittivityModel::Constant { static_value, .. } => *static_value = value,
        }
        self
    }

    /// Supported angular-frequency window (rad/s); constants support all.
    pub fn frequency_window(&self) -> (f64, f64) {
        match self {
            PermittivityModel::Tabulated { rows, .. } => {
                (rows.first().unwrap().omega, rows.last().unwrap().omega)
            }
            PermittivityModel::Sellmeier { c_um2, .. } => {
                // valid up to just below the first UV pole
                let lam_min_um = c_um2[0].sqrt().max(c_um2[1].sqrt()) * 1.05;
                (0.0, 2.0 * PI * C / (lam_min_um * 1e-6))
            }
            PermittivityModel::Constant { .. } => (0.0, f64::INFINITY),
        }
    }

    /// Complex relative permittivity at angular frequency omega (rad/s).
    pub fn permittivity(&self, omega: f64) -> Result<Complex64, MaterialError> {
        let (min, max) = self.frequency_window();
        match self {
            PermittivityModel::Constant { epsilon, .. } => Ok(Complex64::new(*epsilon, 0.0)),
            PermittivityModel::Sellmeier { b, c_um2, .. } => {
                if omega > max {
                    return Err(MaterialError::OutOfRange { omega, min, max });
                }
                let lam_um = 2.0 * PI * C / omega * 1e6;
                let l2 = lam_um * lam_um;
                let mut n2 = 1.0;
                for i in 0..3 {
                    n2 += b[i] * l2 / (l2 - c_um2[i]);
                }
                Ok(Complex64::new(n2, 0.0))
            }
            PermittivityModel::Tabulated { rows, .. } => {
                if omega < min || omega > max {
                    return Err(MaterialError::OutOfRange { omega, min, max });
                }
                let idx = rows.partition_point(|r| r.omega < omega).min(rows.len() - 1);
                let (lo, hi) = if idx == 0 {
                    (&rows[0], &rows[1])
                } else {
                    (&rows[idx - 1], &rows[idx])
                };
                let t = (omega.ln() - lo.omega.ln()) / (hi.omega.ln() - lo.omega.ln());
                let n = log_lerp(lo.n, hi.n, t);
                let k = log_lerp(lo.k, hi.k, t);
                let nc = Complex64::new(n, k);
                Ok(nc * nc)
            }
        }
    }

    /// Zero-frequency (static) relative permittivity.
    pub fn static_permittivity(&self) -> f64 {
        match self {
            PermittivityModel::Constant { static_value, .. }
            | PermittivityModel::Tabulated { static_value, .. } => *static_value,
            PermittivityModel::Sellmeier { b, .. } => 1.0 + b.iter().sum::<f64>(),
        }
    }

    /// Real permittivity on the imaginary frequency axis, epsilon(i xi),
    /// from a two-pole model pinned to the static value and to the optical
    /// value of this model (evaluated at 600 nm when reachable).
    pub fn permittivity_imag_axis(&self, xi: f64) -> f64 {
        let eps_static = self.static_permittivity();
        let omega_opt = 2.0 * PI * C / 600e-9;
        let eps_opt = self
            .permittivity(omega_opt)
            .map(|e| e.re)
            .unwrap_or(eps_static.min(2.1));
        let c_uv = (eps_opt - 1.0).max(0.0);
        let c_ir = (eps_static - eps_opt).max(0.0);
        1.0 + c_ir * SILICA_OMEGA_IR.powi(2) / (SILICA_OMEGA_IR.powi(2) + xi * xi)
            + c_uv * SILICA_OMEGA_UV.powi(2) / (SILICA_OMEGA_UV.powi(2) + xi * xi)
    }

    /// Provenance string for output headers.
    pub fn version(&self) -> String {
        match self {
            PermittivityModel::Tabulated { version, .. } => version.clone(),
            PermittivityModel::Sellmeier { .. } => "sellmeier".into(),
            PermittivityModel::Constant { epsilon, .. } => format!("constant {epsilon}"),
        }
    }
}

/// Interpolate positive quantities geometrically, fall back to linear when a
/// node is zero (absorption-free table regions).
fn log_lerp(a: f64, b: f64, t: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        (a.ln() * (1.0 - t) + b.ln() * t).exp()
    } else {
        a * (1.0 - t) + b * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega_of_nm(lambda_nm: f64) -> f64 {
        2.0 * PI * C / (lambda_nm * 1e-9)
    }

    #[test]
    fn constant_model() {
        let m = PermittivityModel::constant(2.1025);
        let e = m.permittivity(omega_of_nm(780.0)).unwrap();
        assert_eq!(e, Complex64::new(2.1025, 0.0));
        assert_eq!(m.static_permittivity(), 2.1025);
    }

    /// Interpolated table value at 780 nm against the Sellmeier formula the
    /// optical part of the table was generated from.
    #[test]
    fn silica_at_780nm() {
        let m = PermittivityModel::builtin_silica();
        let e = m.permittivity(omega_of_nm(780.0)).unwrap();
        assert!((e.re - 2.1129).abs() < 0.002, "eps = {e}");
        assert!((e.re.sqrt() - 1.4537).abs() < 1e-3);
        let s = PermittivityModel::silica_sellmeier();
        let es = s.permittivity(omega_of_nm(780.0)).unwrap();
        assert!((e.re - es.re).abs() < 2e-4 * es.re);
    }

    #[test]
    fn absorption_band_has_positive_im() {
        let m = PermittivityModel::builtin_silica();
        let e = m.permittivity(omega_of_nm(9000.0)).unwrap();
        assert!(e.im > 0.0, "9 um band: {e}");
    }

    #[test]
    fn passivity_across_window() {
        let m = PermittivityModel::builtin_silica();
        let (lo, hi) = m.frequency_window();
        for i in 0..400 {
            let w = lo * ((hi / lo).ln() * i as f64 / 399.0).exp();
            let e = m.permittivity(w.min(hi)).unwrap();
            assert!(e.im >= 0.0, "omega {w}: {e}");
        }
    }

    #[test]
    fn out_of_range_reports_window() {
        let m = PermittivityModel::builtin_silica();
        let err = m.permittivity(1e10).unwrap_err();
        match err {
            MaterialError::OutOfRange { min, max, .. } => assert!(min < max),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn static_values() {
        assert_eq!(
            PermittivityModel::builtin_silica().static_permittivity(),
            DEFAULT_STATIC_EPSILON
        );
        let s = PermittivityModel::silica_sellmeier();
        assert!((s.static_permittivity() - 3.0016).abs() < 1e-3);
        let m = PermittivityModel::builtin_silica().clone().with_static_value(3.5);
        assert_eq!(m.static_permittivity(), 3.5);
    }

    /// Removing an interior node and re-interpolating reproduces it within 2%.
    #[test]
    fn interpolation_node_consistency() {
        let m = PermittivityModel::builtin_silica();
        let rows = match m {
            PermittivityModel::Tabulated { rows, .. } => rows.clone(),
            _ => unreachable!(),
        };
        for skip in (5..rows.len() - 5).step_by(7) {
            let mut text = String::from("# version: test\nwavelength_nm,n,k\n");
            for (i, r) in rows.iter().enumerate().rev() {
                if i == skip {
                    continue;
                }
                text.push_str(&format!(
                    "{},{},{}\n",
                    2.0 * PI * C / r.omega * 1e9,
                    r.n,
                    r.k
                ));
            }
            let thinned = PermittivityModel::from_table_str(&text).unwrap();
            let e = thinned.permittivity(rows[skip].omega).unwrap();
            let n = e.sqrt().re;
            assert!(
                (n - rows[skip].n).abs() < 0.02 * rows[skip].n,
                "node {skip}: {n} vs {}",
                rows[skip].n
            );
        }
    }

    #[test]
    fn imaginary_axis_monotone() {
        let m = PermittivityModel::builtin_silica();
        let mut prev = m.permittivity_imag_axis(0.0);
        assert!((prev - DEFAULT_STATIC_EPSILON).abs() < 1e-9);
        for i in 1..60 {
            let xi = 10f64.powf(12.0 + 5.0 * i as f64 / 60.0);
            let v = m.permittivity_imag_axis(xi);
            assert!(v <= prev + 1e-12 && v >= 1.0);
            prev = v;
        }
    }

    #[test]
    fn rejects_nonmonotone_table() {
        let text = "wavelength_nm,n,k\n500,1.4,0\n400,1.4,0\n";
        assert!(matches!(
            PermittivityModel::from_table_str(text),
            Err(MaterialError::NonMonotone { .. })
        ));
    }
}
