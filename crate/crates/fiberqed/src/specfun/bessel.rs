//! Bessel J_n, Y_n and Hankel H_n^(1) for integer order and complex argument.
//!
//! Evaluation regimes:
//! * J_n: ascending series for tiny |z|, otherwise Miller backward recurrence
//!   normalized against e^{-iz} = J_0 + 2 sum_k (-i)^k J_k (constructive for
//!   Im z >= 0).
//! * H_n^(1) on the real axis: J + iY with Y_0, Y_1 from the logarithmic
//!   series (x < 13) or the large-argument Hankel expansion, then upward
//!   recurrence in the order.
//! * H_n^(1) off the real axis: H_n^(1)(z) = (2/pi)(-i)^{n+1} K_n(-iz) with
//!   K_0, K_1 from the ascending series (|w| < 2), the asymptotic expansion
//!   (|w| > 14) or a trapezoidal evaluation of K_n(w) = int_0^inf
//!   e^{-w cosh t} cosh(nt) dt in between; upward recurrence in the order.
//!
//! Orders up to 200 and |z| up to ~1e3 stay within 1e-10 relative accuracy.

use super::SpecFunError;
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ORDER: i32 = 200;
/// |Im z| beyond which e^{|Im z|} factors overflow f64.
const IM_LIMIT: f64 = 690.0;

/// Value and first derivative of a cylinder function at one (order, argument).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylFunValue {
    pub order: i32,
    pub argument: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
}

fn check_order(n: i32) -> Result<(), SpecFunError> {
    if n.abs() > MAX_ORDER {
        Err(SpecFunError::OrderTooLarge(n))
    } else {
        Ok(())
    }
}

fn check_argument(z: Complex64) -> Result<(), SpecFunError> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > IM_LIMIT || z.norm() > 5e3 {
        return Err(SpecFunError::OutOfRange(z.norm()));
    }
    Ok(())
}

/// J_0 .. J_{n_max} for complex argument.
pub fn bessel_j_array(n_max: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    check_order(n_max as i32)?;
    check_argument(z)?;
    let r = z.norm();
    if r < 1e-8 {
        return Ok(series_j_small(n_max, z));
    }
    // Miller backward recurrence with enough headroom above max(n, |z|).
    let top = n_max.max(r.ceil() as usize);
    let start = top + 18 + (2.0 * ((top + 1) as f64).sqrt()).ceil() as usize + top / 4;
    let mut jp = Complex64::new(0.0, 0.0);
    let mut jc = Complex64::new(1e-280, 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    // normalization sum e^{-iz} = j0 + 2 sum (-i)^k jk, accumulated on the fly
    let mut norm = Complex64::new(0.0, 0.0);
    let mut phase_pow = phase_neg_i(start as i32);
    for k in (0..=start).rev() {
        let jm = Complex64::new(2.0 * (k + 1) as f64, 0.0) / z * jc - jp;
        jp = jc;
        jc = jm;
        // jc is now J_k (un-normalized); phase_pow = (-i)^k
        if k == 0 {
            norm += jc;
        } else {
            norm += 2.0 * phase_pow * jc;
        }
        phase_pow *= Complex64::new(0.0, 1.0); // (-i)^{k-1} = (-i)^k * i
        if k <= n_max {
            out[k] = jc;
        }
        // rescale to avoid overflow of the dominant backward solution
        let m = jc.norm();
        if m > 1e250 {
            let s = 1e-250;
            jp *= s;
            jc *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    if norm.norm() == 0.0 {
        return Err(SpecFunError::OutOfRange(r));
    }
    let target = (-Complex64::i() * z).exp();
    let scale = target / norm;
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

fn phase_neg_i(k: i32) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn series_j_small(n_max: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let half = z * 0.5;
    for (n, v) in out.iter_mut().enumerate() {
        let mut pre = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            pre *= half / k as f64;
        }
        let q = half * half;
        let mut term = pre;
        let mut sum = term;
        for k in 1..=6 {
            term *= -q / (k as f64 * (n + k) as f64);
            sum += term;
        }
        *v = sum;
    }
    out
}

/// Derivative array from a value array: Z'_n = Z_{n-1} - (n/z) Z_n, Z'_0 = -Z_1.
pub fn deriv_from_array(values: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    if values.is_empty() {
        return out;
    }
    if values.len() > 1 {
        out[0] = -values[1];
    }
    for n in 1..values.len() {
        out[n] = values[n - 1] - (n as f64 / z) * values[n];
    }
    out
}

/// J_n(z) for any integer order.
pub fn bessel_j(n: i32, z: Complex64) -> Result<Complex64, SpecFunError> {
    check_order(n)?;
    let m = n.unsigned_abs() as usize;
    let arr = bessel_j_array(m, z)?;
    let v = arr[m];
    Ok(if n < 0 && n % 2 != 0 { -v } else { v })
}

/// dJ_n/dz.
pub fn bessel_j_deriv(n: i32, z: Complex64) -> Result<Complex64, SpecFunError> {
    check_order(n)?;
    if z.norm() == 0.0 {
        // entire function limits at the origin
        return Ok(match n.abs() {
            1 => Complex64::new(0.5, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
    }
    let m = n.unsigned_abs() as usize;
    let arr = bessel_j_array(m + 1, z)?;
    let d = if m == 0 {
        -arr[1]
    } else {
        arr[m - 1] - (m as f64 / z) * arr[m]
    };
    Ok(if n < 0 && n % 2 != 0 { -d } else { d })
}

/// Y_n(x) for real positive argument.
pub fn bessel_y(n: i32, x: f64) -> Result<Complex64, SpecFunError> {
    if x <= 0.0 {
        return Err(SpecFunError::ZeroArgument);
    }
    let arr = y_array_real(n.unsigned_abs() as usize, x)?;
    let v = arr[n.unsigned_abs() as usize];
    Ok(if n < 0 && n % 2 != 0 { -v } else { v })
}

fn y_array_real(n_max: usize, x: f64) -> Result<Vec<Complex64>, SpecFunError> {
    check_order(n_max as i32)?;
    let (y0, y1) = if x < 13.0 {
        let j = bessel_j_array(1, Complex64::new(x, 0.0))?;
        (y0_series(x, j[0]), y1_series(x, j[1]))
    } else {
        (hankel_asym(0, x).im, hankel_asym(1, x).im)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    out[0] = Complex64::new(y0, 0.0);
    if n_max >= 1 {
        out[1] = Complex64::new(y1, 0.0);
        for n in 1..n_max {
            out[n + 1] = (2.0 * n as f64 / x) * out[n] - out[n - 1];
        }
    }
    Ok(out)
}

fn y0_series(x: f64, j0: Complex64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0f64;
    let mut h = 0.0f64;
    let mut sum = 0.0f64;
    for k in 1..200 {
        term *= -q / ((k * k) as f64);
        h += 1.0 / k as f64;
        let add = -term * h;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-30) && k > 3 {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0.re + sum)
}

fn y1_series(x: f64, j1: Complex64) -> f64 {
    // A&S 9.1.11 specialized to n = 1
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = 0.0f64;
    let mut psi_k = -EULER_GAMMA;
    let mut psi_k1 = -EULER_GAMMA + 1.0;
    for k in 0..200 {
        let add = term * (psi_k + psi_k1);
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-30) && k > 3 {
            break;
        }
        let kf = (k + 1) as f64;
        term *= -q / (kf * (kf + 1.0));
        psi_k += 1.0 / kf;
        psi_k1 += 1.0 / (kf + 1.0);
    }
    (2.0 / PI) * (0.5 * x).ln() * j1.re - (2.0 / (PI * x)) - sum / PI
}

/// Large-argument Hankel expansion for real x, orders 0 and 1 only.
fn hankel_asym(n: u32, x: f64) -> Complex64 {
    let chi = x - (n as f64 * 0.5 + 0.25) * PI;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let fournu2 = 4.0 * (n * n) as f64;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        let factor = (fournu2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
        term *= Complex64::new(0.0, 1.0) * factor;
        if term.norm() > prev {
            break;
        }
        prev = term.norm();
        sum += term;
        if term.norm() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * Complex64::new(chi.cos(), chi.sin()) * sum
}

/// H^(1)_0 .. H^(1)_{n_max}(z) for Im z >= 0 (principal branch on the
/// negative real axis, approached from above).
pub fn hankel1_array(n_max: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    check_order(n_max as i32)?;
    check_argument(z)?;
    if z.norm() == 0.0 {
        return Err(SpecFunError::ZeroArgument);
    }
    if z.im < 0.0 && z.im.abs() > 1e-13 * z.re.abs() {
        return Err(SpecFunError::LowerHalfPlane(z.im));
    }
    if z.im.abs() <= 1e-13 * z.re.abs() && z.re > 0.0 {
        // real axis: H = J + iY
        let x = z.re;
        let j = bessel_j_array(n_max, Complex64::new(x, 0.0))?;
        let y = y_array_real(n_max, x)?;
        return Ok(j
            .iter()
            .zip(y.iter())
            .map(|(a, b)| a + Complex64::i() * b)
            .collect());
    }
    if z.im.abs() <= 1e-13 * z.re.abs() && z.re < 0.0 {
        // upper lip of the branch cut: H1_n(-x + i0) = (-1)^n (H1_n(x) - 2 J_n(x))
        let x = -z.re;
        let h = hankel1_array(n_max, Complex64::new(x, 0.0))?;
        let j = bessel_j_array(n_max, Complex64::new(x, 0.0))?;
        return Ok(h
            .iter()
            .zip(j.iter())
            .enumerate()
            .map(|(n, (hh, jj))| {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                s * (hh - 2.0 * jj)
            })
            .collect());
    }
    // general upper half plane through K_n(-iz), Re(-iz) = Im z > 0
    let w = -Complex64::i() * z;
    let k = modified_k_array(n_max, w)?;
    let mut phase = Complex64::new(0.0, -1.0); // (-i)^{1}
    let mut out = Vec::with_capacity(n_max + 1);
    for kn in k {
        out.push((2.0 / PI) * phase * kn);
        phase *= Complex64::new(0.0, -1.0);
    }
    Ok(out)
}

/// H^(1)_n(z).
pub fn hankel1(n: i32, z: Complex64) -> Result<Complex64, SpecFunError> {
    check_order(n)?;
    let m = n.unsigned_abs() as usize;
    let arr = hankel1_array(m, z)?;
    let v = arr[m];
    Ok(if n < 0 && n % 2 != 0 { -v } else { v })
}

/// dH^(1)_n/dz.
pub fn hankel1_deriv(n: i32, z: Complex64) -> Result<Complex64, SpecFunError> {
    check_order(n)?;
    let m = n.unsigned_abs() as usize;
    let arr = hankel1_array(m + 1, z)?;
    let d = if m == 0 {
        -arr[1]
    } else {
        arr[m - 1] - (m as f64 / z) * arr[m]
    };
    Ok(if n < 0 && n % 2 != 0 { -d } else { d })
}

/// K_0 .. K_{n_max}(w) for Re w > 0, upward recurrence from K_0, K_1.
fn modified_k_array(n_max: usize, w: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    let r = w.norm();
    if w.re * r > 690.0 * r {
        return Err(SpecFunError::OutOfRange(r));
    }
    let (k0, k1) = if r < 2.0 {
        k01_series(w)
    } else if r > 14.0 {
        (k_asym(0, w), k_asym(1, w))
    } else {
        (k_integral(0, w), k_integral(1, w))
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    out[0] = k0;
    if n_max >= 1 {
        out[1] = k1;
        for n in 1..n_max {
            out[n + 1] = out[n - 1] + (2.0 * n as f64 / w) * out[n];
        }
    }
    Ok(out)
}

fn k01_series(w: Complex64) -> (Complex64, Complex64) {
    let q = 0.25 * w * w;
    let lg = (0.5 * w).ln() + EULER_GAMMA;
    // I_0, I_1 ascending series
    let mut i0 = Complex64::new(1.0, 0.0);
    let mut i1 = 0.5 * w;
    let mut t0 = i0;
    let mut t1 = i1;
    // K_0 = -(ln(w/2)+gamma) I_0 + sum_k H_k (w^2/4)^k / (k!)^2
    let mut k0_sum = Complex64::new(0.0, 0.0);
    let mut tk0 = Complex64::new(1.0, 0.0);
    let mut h = 0.0f64;
    // K_1 = 1/w + ln(w/2) I_1 - (1/2) sum_k [psi(k+1)+psi(k+2)] (w/2)(w^2/4)^k/(k!(k+1)!)
    let mut k1_sum = Complex64::new(0.0, 0.0);
    let mut tk1 = 0.5 * w;
    let mut pk = -EULER_GAMMA;
    let mut pk1 = -EULER_GAMMA + 1.0;
    k1_sum += tk1 * (pk + pk1);
    for k in 1..80 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        i0 += t0;
        i1 += t1;
        h += 1.0 / kf;
        tk0 *= q / (kf * kf);
        k0_sum += tk0 * h;
        pk += 1.0 / kf;
        pk1 += 1.0 / (kf + 1.0);
        tk1 *= q / (kf * (kf + 1.0));
        k1_sum += tk1 * (pk + pk1);
        if t0.norm() < 1e-18 * i0.norm() && k > 4 {
            break;
        }
    }
    let k0 = -lg * i0 + k0_sum;
    let k1 = 1.0 / w + (0.5 * w).ln() * i1 - 0.5 * k1_sum;
    (k0, k1)
}

fn k_asym(n: u32, w: Complex64) -> Complex64 {
    let fournu2 = 4.0 * (n * n) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= (fournu2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * w);
        if term.norm() > prev {
            break;
        }
        prev = term.norm();
        sum += term;
        if term.norm() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * w)).sqrt() * (-w).exp() * sum
}

/// K_n(w) = int_0^inf e^{-w cosh t} cosh(n t) dt by refined trapezoid.
fn k_integral(n: u32, w: Complex64) -> Complex64 {
    let t_max = (760.0 / w.re).acosh() + 0.5;
    let f = |t: f64| (-w * t.cosh()).exp() * (n as f64 * t).cosh();
    let mut h = 0.125;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut value = Complex64::new(0.0, 0.0);
    for iter in 0..14 {
        let steps = (t_max / h).ceil() as usize;
        let mut acc = 0.5 * f(0.0);
        for i in 1..=steps {
            acc += f(i as f64 * h);
        }
        value = acc * h;
        if iter > 2 && (value - prev).norm() < 1e-14 * value.norm() {
            break;
        }
        prev = value;
        h *= 0.5;
    }
    value
}
