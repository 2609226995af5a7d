//! Guided-mode root finding on the characteristic equation D_n = 0.

use super::refl::InterfaceArrays;
use super::{GreensEngine, GreensError, GuidedMode, WaveContext};
use num_complex::Complex64;
use std::fmt;

/// Mode family label of a step-index fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeFamily {
    Te,
    Tm,
    He,
    Eh,
}

impl fmt::Display for ModeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeFamily::Te => write!(f, "TE"),
            ModeFamily::Tm => write!(f, "TM"),
            ModeFamily::He => write!(f, "HE"),
            ModeFamily::Eh => write!(f, "EH"),
        }
    }
}

impl GreensEngine {
    /// Normalized frequency V = k a sqrt(n1^2 - 1).
    pub fn v_number(&self, omega: f64) -> Result<f64, GreensError> {
        let eps = self.eps1(omega)?.re;
        let k = omega / crate::constants::C;
        Ok(if eps > 1.0 {
            k * self.config.radius * (eps - 1.0).sqrt()
        } else {
            0.0
        })
    }

    /// All guided modes at `omega` with azimuthal order l <= l_max
    /// (l_max = None picks ceil(V) + 2). Root finding uses the real part of
    /// the permittivity; each root is refined to |dbeta|/beta < 1e-12,
    /// classified TE/TM (l = 0, by which sub-determinant vanishes) or HE/EH
    /// (standard alternation in decreasing beta), deduplicated and sorted by
    /// beta descending.
    pub fn guided_modes(
        &self,
        omega: f64,
        l_max: Option<u32>,
    ) -> Result<std::sync::Arc<Vec<GuidedMode>>, GreensError> {
        let l_max = match l_max {
            Some(l) => l,
            None => self.v_number(omega)?.ceil() as u32 + 2,
        };
        let key = (omega.to_bits(), self.config.radius.to_bits(), l_max);
        self.cached_modes(key, || self.find_modes(omega, l_max))
    }

    fn find_modes(&self, omega: f64, l_max: u32) -> Result<Vec<GuidedMode>, GreensError> {
        let ctx = self.ctx_real(omega)?;
        let k2 = ctx.k2.re;
        let k1 = ctx.k1_sq.re.max(0.0).sqrt();
        let mut modes: Vec<GuidedMode> = Vec::new();
        if k1 <= k2 {
            return Ok(modes); // no guided window (n1 <= 1)
        }
        let margin = 1e-9 * (k1 - k2);
        let lo = k2 + margin;
        let hi = k1 - margin;
        for l in 0..=l_max {
            let roots = self.scan_roots(&ctx, l, lo, hi)?;
            let mut sorted = roots;
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            // deduplicate near-identical roots
            sorted.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * *b);
            if l == 0 {
                for beta in sorted {
                    let family = self.classify_l0(&ctx, beta)?;
                    modes.push(GuidedMode {
                        family,
                        l,
                        m: 0,
                        omega,
                        beta,
                        f: 1,
                        p: 1,
                    });
                }
            } else {
                // standard ordering: HE_{l,1}, EH_{l,1}, HE_{l,2}, ... in
                // decreasing beta
                for (idx, beta) in sorted.into_iter().enumerate() {
                    let family = if idx % 2 == 0 {
                        ModeFamily::He
                    } else {
                        ModeFamily::Eh
                    };
                    modes.push(GuidedMode {
                        family,
                        l,
                        m: (idx / 2 + 1) as u32,
                        omega,
                        beta,
                        f: 1,
                        p: 1,
                    });
                }
            }
        }
        // radial order for l = 0 families counts within each family
        let mut te_count = 0;
        let mut tm_count = 0;
        for m in modes.iter_mut().filter(|m| m.l == 0) {
            match m.family {
                ModeFamily::Te => {
                    te_count += 1;
                    m.m = te_count;
                }
                ModeFamily::Tm => {
                    tm_count += 1;
                    m.m = tm_count;
                }
                _ => {}
            }
        }
        modes.sort_by(|a, b| b.beta.partial_cmp(&a.beta).unwrap());
        Ok(modes)
    }

    fn scan_roots(
        &self,
        ctx: &WaveContext,
        l: u32,
        lo: f64,
        hi: f64,
    ) -> Result<Vec<f64>, GreensError> {
        let points = self.tol.scan_points.max(64);
        let cleared = |beta: f64| -> Result<f64, GreensError> {
            let arrays = InterfaceArrays::new(ctx, Complex64::new(beta, 0.0), l as usize + 1)?;
            Ok(arrays
                .characteristic_cleared(ctx, Complex64::new(beta, 0.0), l)
                .re)
        };
        let mut roots = Vec::new();
        let mut prev_beta = lo;
        let mut prev_val = cleared(lo)?;
        for i in 1..=points {
            let beta = lo + (hi - lo) * i as f64 / points as f64;
            let val = cleared(beta)?;
            if prev_val == 0.0 {
                roots.push(prev_beta);
            } else if prev_val * val < 0.0 {
                roots.push(self.bisect(&cleared, prev_beta, beta, prev_val)?);
            }
            prev_beta = beta;
            prev_val = val;
        }
        Ok(roots)
    }

    fn bisect(
        &self,
        f: &dyn Fn(f64) -> Result<f64, GreensError>,
        mut a: f64,
        mut b: f64,
        mut fa: f64,
    ) -> Result<f64, GreensError> {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if (b - a) < 1e-13 * mid {
                return Ok(mid);
            }
            let fm = f(mid)?;
            if fm == 0.0 {
                return Ok(mid);
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        Err(GreensError::BracketExhaustion {
            resolution: self.tol.scan_points,
        })
    }

    fn classify_l0(&self, ctx: &WaveContext, beta: f64) -> Result<ModeFamily, GreensError> {
        // at n = 0 the determinant factorizes D = (PJ1 - PH2)(k1^2 PJ1 - k2^2 PH2):
        // the TE sub-determinant is the first factor, TM the second
        let r = super::refl::reflection_parts(ctx, 0, Complex64::new(beta, 0.0))?;
        let x1 = r.eta1 * ctx.radius;
        let x2 = r.eta2 * ctx.radius;
        let j = crate::specfun::bessel_j(0, x1)?;
        let dj = crate::specfun::bessel_j_deriv(0, x1)?;
        let h = crate::specfun::hankel1(0, x2)?;
        let dh = crate::specfun::hankel1_deriv(0, x2)?;
        let pj1 = dj / (r.eta1 * j);
        let ph2 = dh / (r.eta2 * h);
        let te = (pj1 - ph2).norm();
        let tm = (pj1 * ctx.k1_sq - ph2 * ctx.k2_sq).norm() / ctx.k2_sq.norm();
        Ok(if te < tm {
            ModeFamily::Te
        } else {
            ModeFamily::Tm
        })
    }

    /// dD/dbeta at a root by 4th-order central differences with one
    /// Richardson refinement.
    pub(crate) fn d_prime(
        &self,
        ctx: &WaveContext,
        l: u32,
        beta: f64,
    ) -> Result<Complex64, GreensError> {
        let d = |b: f64| super::refl::characteristic_d(ctx, l, Complex64::new(b, 0.0));
        let fourth = |h: f64| -> Result<Complex64, GreensError> {
            Ok((-d(beta + 2.0 * h)? + 8.0 * d(beta + h)? - 8.0 * d(beta - h)? + d(beta - 2.0 * h)?)
                / (12.0 * h))
        };
        let h = self.tol.residue_fd_step * beta;
        let d1 = fourth(h)?;
        let d2 = fourth(0.5 * h)?;
        // O(h^4) error: Richardson with ratio 16
        let refined = (16.0 * d2 - d1) / 15.0;
        if refined.norm() < 1e-30 {
            return Err(GreensError::DegenerateRoot { beta });
        }
        Ok(refined)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{FiberConfig, Tolerances};
    use crate::material::PermittivityModel;
    use std::f64::consts::PI;

    fn engine(a: f64, eps: f64) -> GreensEngine {
        GreensEngine::new(
            FiberConfig::new(a, PermittivityModel::constant(eps)),
            Tolerances::default(),
        )
    }

    fn omega_of(lambda: f64) -> f64 {
        2.0 * PI * crate::constants::C / lambda
    }

    #[test]
    fn single_mode_at_780nm_150nm() {
        let eng = engine(150e-9, 1.4537f64.powi(2));
        let omega = omega_of(780e-9);
        let v = eng.v_number(omega).unwrap();
        assert!((v - 1.27).abs() < 0.02, "V = {v}");
        let modes = eng.guided_modes(omega, Some(3)).unwrap();
        assert_eq!(modes.len(), 1, "{modes:?}");
        let m = &modes[0];
        assert_eq!((m.family, m.l, m.m), (ModeFamily::He, 1, 1));
        let k2 = omega / crate::constants::C;
        let k1 = 1.4537 * k2;
        assert!(m.beta > k2 && m.beta < k1);
        // root quality
        let ctx = eng.ctx_real(omega).unwrap();
        let d =
            crate::greens::refl::characteristic_d(&ctx, 1, Complex64::new(m.beta, 0.0)).unwrap();
        let d_off = crate::greens::refl::characteristic_d(
            &ctx,
            1,
            Complex64::new(m.beta * (1.0 + 1e-6), 0.0),
        )
        .unwrap();
        assert!(d.norm() < 1e-5 * d_off.norm(), "{} vs {}", d.norm(), d_off.norm());
    }

    #[test]
    fn still_single_mode_at_250nm() {
        let eng = engine(250e-9, 1.4537f64.powi(2));
        let omega = omega_of(780e-9);
        let v = eng.v_number(omega).unwrap();
        assert!((v - 2.13).abs() < 0.03, "V = {v}");
        let modes = eng.guided_modes(omega, Some(3)).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].family, ModeFamily::He);
    }

    #[test]
    fn first_four_families_above_cutoff() {
        // a = 250 nm at 480 nm: V ~ 3.5 supports HE11, TE01, TM01, HE21
        let eng = engine(250e-9, 1.4635f64.powi(2));
        let omega = omega_of(480e-9);
        let v = eng.v_number(omega).unwrap();
        assert!(v > 2.405 && v < 3.832, "V = {v}");
        let modes = eng.guided_modes(omega, None).unwrap();
        let labels: Vec<String> = modes.iter().map(|m| m.label()).collect();
        assert_eq!(modes.len(), 4, "{labels:?}");
        assert!(labels.contains(&"HE11".into()));
        assert!(labels.contains(&"TE01".into()));
        assert!(labels.contains(&"TM01".into()));
        assert!(labels.contains(&"HE21".into()));
        // HE11 is the most confined
        assert_eq!(modes[0].label(), "HE11");
    }

    #[test]
    fn window_closes_at_low_frequency() {
        let eng = engine(150e-9, 2.1025);
        // lambda = 1 mm around a 150 nm fiber: V ~ 1e-3; the HE11 root is
        // exponentially close to k2, inside the scan margin, and no other
        // family exists below cutoff
        let omega = omega_of(1e-3);
        let modes = eng.guided_modes(omega, Some(1)).unwrap();
        assert!(modes.is_empty(), "{modes:?}");
    }

    /// Dense-scan oracle via the textbook eigenvalue equation of the
    /// step-index fiber, cross-checking the HE11 propagation constant.
    #[test]
    fn he11_matches_textbook_characteristic_equation() {
        use crate::specfun::{bessel_j, bessel_j_deriv, hankel1, hankel1_deriv};
        let n1 = 1.4537f64;
        let a = 150e-9;
        let omega = omega_of(780e-9);
        let k0 = omega / crate::constants::C;
        let (k1, k2) = (n1 * k0, k0);
        // J-K form: (J'/uJ + K'/wK)(n1^2 J'/uJ + n2^2 K'/wK) = l^2 beta^2/k0^2 (1/u^2+1/w^2)^2
        // with u = a eta1, w = a q, all real; K expressed through H(i w/a rho)
        let f = |beta: f64| -> f64 {
            let u = a * (k1 * k1 - beta * beta).sqrt();
            let w = a * (beta * beta - k2 * k2).sqrt();
            let uj = bessel_j(1, Complex64::new(u, 0.0)).unwrap().re;
            let duj = bessel_j_deriv(1, Complex64::new(u, 0.0)).unwrap().re;
            // K_l(w) and K_l'(w) from H^(1)_l(i w)
            let h = hankel1(1, Complex64::new(0.0, w)).unwrap();
            let dh = hankel1_deriv(1, Complex64::new(0.0, w)).unwrap();
            // H_l(ix) = (2/pi)(-i)^{l+1} K_l(x); dH/dz = (2/pi)(-i)^{l+1} K' / i
            let phase = (2.0 / PI) * Complex64::new(0.0, -1.0).powu(2);
            let kv = (h / phase).re;
            let dkv = (dh * Complex64::i() / phase).re;
            let lhs = (duj / (u * uj) + dkv / (w * kv))
                * (n1 * n1 * duj / (u * uj) + dkv / (w * kv));
            let rhs = (beta / k0).powi(2) * (1.0 / (u * u) + 1.0 / (w * w)).powi(2);
            lhs - rhs
        };
        // dense scan for the root
        let (lo, hi) = (k2 * 1.000001, k1 * 0.999999);
        let mut root = None;
        let mut prev = f(lo);
        for i in 1..20000 {
            let b = lo + (hi - lo) * i as f64 / 20000.0;
            let v = f(b);
            if prev * v < 0.0 {
                let (mut x0, mut x1) = (b - (hi - lo) / 20000.0, b);
                for _ in 0..80 {
                    let m = 0.5 * (x0 + x1);
                    if f(x0) * f(m) <= 0.0 {
                        x1 = m;
                    } else {
                        x0 = m;
                    }
                }
                root = Some(0.5 * (x0 + x1));
                break;
            }
            prev = v;
        }
        let oracle = root.expect("oracle finds HE11");
        let eng = engine(a, n1 * n1);
        let modes = eng.guided_modes(omega, Some(2)).unwrap();
        let he11 = &modes[0];
        assert!(
            (he11.beta - oracle).abs() < 1e-9 * oracle,
            "{} vs oracle {}",
            he11.beta,
            oracle
        );
    }
}
