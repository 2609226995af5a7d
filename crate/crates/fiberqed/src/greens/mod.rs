//! Dyadic Green's tensor of a dielectric cylinder at coincident points:
//! reflection coefficients, characteristic function, guided-mode roots,
//! pole residues, radiative branch-line integrals, the electrostatic limit
//! and the spatial derivative kernels needed by forces and quadrupole
//! couplings.

mod gn;
mod guided;
mod modes;
mod radiative;
mod refl;
mod statics;

pub use gn::{GnData, QuadKernel};
pub use guided::GuidedChannel;
pub use modes::ModeFamily;
pub use radiative::LineKernels;
pub use refl::ReflectionParts;

use crate::constants::C;
use crate::material::{MaterialError, PermittivityModel};
use crate::specfun::SpecFunError;
use crate::tensor::Tensor3;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GreensError {
    #[error("field point rho = {rho:.3e} m lies inside the fiber (a = {a:.3e} m)")]
    InsideFiber { rho: f64, a: f64 },
    #[error("evaluation at the branch point eta2 = 0 (beta = k2)")]
    BranchPoint,
    #[error("azimuthal sum not converged after {n_terms} terms (last term {last:.3e} of partial sum {partial:.3e})")]
    AzimuthalNonConvergence {
        n_terms: usize,
        last: f64,
        partial: f64,
    },
    #[error("quadrature stalled: reached {achieved:.3e} relative error against a request of {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("characteristic root at beta = {beta:.6e} has |dD/dbeta| below threshold; residue undefined")]
    DegenerateRoot { beta: f64 },
    #[error("root bracketing exhausted at scan resolution {resolution} points")]
    BracketExhaustion { resolution: usize },
    #[error("Re G_0 at coincident points diverges and is not provided")]
    UnsupportedOperation,
    #[error("static-limit extrapolation sequence non-monotone: {0:?}")]
    NonMonotoneExtrapolation(Vec<f64>),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Cylinder geometry plus material.
#[derive(Debug, Clone)]
pub struct FiberConfig {
    /// Fiber radius, m.
    pub radius: f64,
    /// Core permittivity model; the cladding is vacuum (n2 = 1).
    pub permittivity: PermittivityModel,
}

impl FiberConfig {
    pub fn new(radius: f64, permittivity: PermittivityModel) -> Self {
        assert!(radius > 0.0, "fiber radius must be positive");
        FiberConfig {
            radius,
            permittivity,
        }
    }
}

/// Numerical tolerances of the engine.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative tolerance of the beta integrals.
    pub tau_int: f64,
    /// Hard cap on the azimuthal order.
    pub n_max_azimuthal: usize,
    /// Consecutive negligible azimuthal terms required to stop.
    pub n_tail: usize,
    /// Relative size below which an azimuthal term counts as negligible.
    pub n_tail_rel: f64,
    /// Number of scan points for guided-mode root bracketing.
    pub scan_points: usize,
    /// Relative finite-difference step for dD/dbeta at a pole.
    pub residue_fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_int: 1e-6,
            n_max_azimuthal: 120,
            n_tail: 3,
            n_tail_rel: 1e-8,
            scan_points: 1500,
            residue_fd_step: 1e-6,
        }
    }
}

/// Which part of the Green tensor a [`GreenTensorPart`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Vacuum,
    Scattering,
    Guided,
    Radiative,
}

/// A 3x3 complex Green-tensor block at coincident points, tagged by part,
/// in the cylindrical basis at the atom (units 1/m).
#[derive(Debug, Clone)]
pub struct GreenTensorPart {
    pub part: Part,
    pub position: f64,
    pub omega: f64,
    pub tensor: Tensor3,
    /// Guided part only: per-(mode, propagation sign) terms.
    pub channels: Vec<GuidedChannel>,
}

/// One guided mode of the fiber at a given frequency.
#[derive(Debug, Clone)]
pub struct GuidedMode {
    pub family: ModeFamily,
    /// Azimuthal order l >= 0.
    pub l: u32,
    /// Radial order m >= 1.
    pub m: u32,
    pub omega: f64,
    /// Propagation constant, rad/m, positive by convention.
    pub beta: f64,
    /// Propagation direction label (+1 forward); set per channel.
    pub f: i8,
    /// Phase-circulation label; +1 for l = 0.
    pub p: i8,
}

impl GuidedMode {
    pub fn label(&self) -> String {
        format!("{}{}{}", self.family, self.l, self.m)
    }
}

/// Squared wavenumbers shared by every evaluation at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct WaveContext {
    pub k1_sq: Complex64,
    pub k2_sq: Complex64,
    pub k2: Complex64,
    pub radius: f64,
}

impl WaveContext {
    /// Real frequency; `eps1` is the core permittivity to use.
    pub fn real_frequency(omega: f64, eps1: Complex64, radius: f64) -> Self {
        let k2 = omega / C;
        WaveContext {
            k1_sq: eps1 * k2 * k2,
            k2_sq: Complex64::new(k2 * k2, 0.0),
            k2: Complex64::new(k2, 0.0),
            radius,
        }
    }

    /// Imaginary frequency omega = i xi with real eps(i xi).
    pub fn imaginary_frequency(xi: f64, eps1: f64, radius: f64) -> Self {
        let q = xi / C;
        WaveContext {
            k1_sq: Complex64::new(-eps1 * q * q, 0.0),
            k2_sq: Complex64::new(-q * q, 0.0),
            k2: Complex64::new(0.0, q),
            radius,
        }
    }

    /// sqrt(k^2 - beta^2) on the branch Im eta >= 0 (eta >= 0 when real).
    pub fn eta(k_sq: Complex64, beta: Complex64) -> Complex64 {
        let r = (k_sq - beta * beta).sqrt();
        if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
            -r
        } else {
            r
        }
    }
}

type ModeKey = (u64, u64, u32);

/// Green-tensor engine for one fiber configuration.
///
/// All evaluations are pure functions of (config, R, omega); the mode table
/// is memoized behind a read-write lock so concurrent readers are cheap.
pub struct GreensEngine {
    pub config: FiberConfig,
    pub tol: Tolerances,
    mode_cache: RwLock<HashMap<ModeKey, Arc<Vec<GuidedMode>>>>,
}

impl GreensEngine {
    pub fn new(config: FiberConfig, tol: Tolerances) -> Self {
        GreensEngine {
            config,
            tol,
            mode_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn radius(&self) -> f64 {
        self.config.radius
    }

    /// Core permittivity at a (real) angular frequency. Frequencies below
    /// the material window use the static value, matching the non-retarded
    /// treatment of the long-wavelength transitions.
    pub fn eps1(&self, omega: f64) -> Result<Complex64, GreensError> {
        let (lo, _hi) = self.config.permittivity.frequency_window();
        if omega < lo {
            return Ok(Complex64::new(
                self.config.permittivity.static_permittivity(),
                0.0,
            ));
        }
        Ok(self.config.permittivity.permittivity(omega)?)
    }

    pub fn ctx(&self, omega: f64) -> Result<WaveContext, GreensError> {
        Ok(WaveContext::real_frequency(
            omega,
            self.eps1(omega)?,
            self.config.radius,
        ))
    }

    /// Context with the real part of the permittivity only, used for root
    /// finding, residues and the evanescent line.
    pub fn ctx_real(&self, omega: f64) -> Result<WaveContext, GreensError> {
        let eps = self.eps1(omega)?;
        Ok(WaveContext::real_frequency(
            omega,
            Complex64::new(eps.re, 0.0),
            self.config.radius,
        ))
    }

    /// Im G_0 diagonal at coincident points: omega / (6 pi c).
    pub fn vacuum_im_diag(omega: f64) -> f64 {
        omega / (6.0 * std::f64::consts::PI * C)
    }

    /// Vacuum part as a tensor block; only the imaginary part is defined at
    /// coincident points.
    pub fn vacuum_green(omega: f64, position: f64) -> GreenTensorPart {
        let v = Complex64::new(0.0, Self::vacuum_im_diag(omega));
        GreenTensorPart {
            part: Part::Vacuum,
            position,
            omega,
            tensor: Tensor3::from_diagonal([v, v, v]),
            channels: Vec::new(),
        }
    }

    pub(crate) fn check_outside(&self, rho: f64) -> Result<(), GreensError> {
        if rho < self.config.radius {
            Err(GreensError::InsideFiber {
                rho,
                a: self.config.radius,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn cached_modes(
        &self,
        key: ModeKey,
        build: impl FnOnce() -> Result<Vec<GuidedMode>, GreensError>,
    ) -> Result<Arc<Vec<GuidedMode>>, GreensError> {
        if let Some(found) = self.mode_cache.read().unwrap().get(&key) {
            return Ok(found.clone());
        }
        let modes = Arc::new(build()?);
        self.mode_cache
            .write()
            .unwrap()
            .insert(key, modes.clone());
        Ok(modes)
    }
}
