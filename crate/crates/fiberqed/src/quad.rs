//! Adaptive Gauss-Legendre quadrature over bisected panels.

use std::sync::OnceLock;

/// Values an adaptive integrator can accumulate: needs a zero, addition,
/// scaling by the quadrature weight and a magnitude for error control.
pub trait Accumulate: Clone {
    fn zero() -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn magnitude(&self) -> f64;
}

impl Accumulate for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accumulate for num_complex::Complex64 {
    fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Accumulate for crate::tensor::Tensor3 {
    fn zero() -> Self {
        Self::ZERO
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += other.0[i][j] * w;
            }
        }
    }
    fn magnitude(&self) -> f64 {
        self.max_norm()
    }
}

impl<A: Accumulate, B: Accumulate> Accumulate for (A, B) {
    fn zero() -> Self {
        (A::zero(), B::zero())
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.0.add_scaled(&other.0, w);
        self.1.add_scaled(&other.1, w);
    }
    fn magnitude(&self) -> f64 {
        self.0.magnitude().max(self.1.magnitude())
    }
}

impl<A: Accumulate, const N: usize> Accumulate for [A; N] {
    fn zero() -> Self {
        std::array::from_fn(|_| A::zero())
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        for (s, o) in self.iter_mut().zip(other.iter()) {
            s.add_scaled(o, w);
        }
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|a| a.magnitude()).fold(0.0, f64::max)
    }
}

const GL_ORDER: usize = 15;

fn gl_nodes() -> &'static [(f64, f64); GL_ORDER] {
    static NODES: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    NODES.get_or_init(|| {
        // Newton iteration on Legendre polynomials for nodes on (-1, 1).
        let n = GL_ORDER;
        let mut out = [(0.0, 0.0); GL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            out[i] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fixed 15-point Gauss-Legendre rule on [a, b].
pub fn gauss_panel<T: Accumulate>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> T {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = T::zero();
    for &(x, w) in gl_nodes() {
        let v = f(mid + half * x);
        acc.add_scaled(&v, w * half);
    }
    acc
}

#[derive(Debug, Clone)]
pub struct QuadFailure {
    pub achieved: f64,
    pub requested: f64,
}

/// Integrate `f` over [a, b] with panel bisection until the local
/// error estimate of every panel is below `tol` relative to the total.
pub fn adaptive<T: Accumulate>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<T, QuadFailure> {
    struct Panel<T> {
        a: f64,
        b: f64,
        whole: T,
        depth: u32,
    }
    let whole = gauss_panel(&mut f, a, b);
    let mut stack = vec![Panel {
        a,
        b,
        whole,
        depth: 0,
    }];
    let mut total = T::zero();
    let mut scale = 0.0f64;
    let mut worst_rel = 0.0f64;
    while let Some(p) = stack.pop() {
        let mid = 0.5 * (p.a + p.b);
        let left = gauss_panel(&mut f, p.a, mid);
        let right = gauss_panel(&mut f, mid, p.b);
        let mut refined = left.clone();
        refined.add_scaled(&right, 1.0);
        let mut diff = refined.clone();
        diff.add_scaled(&p.whole, -1.0);
        let err = diff.magnitude();
        scale = scale.max(refined.magnitude());
        let accept = err <= tol * scale.max(1e-300) || p.depth >= max_depth;
        if accept {
            if p.depth >= max_depth {
                worst_rel = worst_rel.max(err / scale.max(1e-300));
            }
            total.add_scaled(&refined, 1.0);
        } else {
            stack.push(Panel {
                a: p.a,
                b: mid,
                whole: left,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: mid,
                b: p.b,
                whole: right,
                depth: p.depth + 1,
            });
        }
    }
    if worst_rel > 100.0 * tol {
        return Err(QuadFailure {
            achieved: worst_rel,
            requested: tol,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = gauss_panel(&mut |x: f64| x.powi(11), 0.0, 1.0);
        assert!((v - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_oscillatory() {
        let v = adaptive(|x: f64| (40.0 * x).sin(), 0.0, 1.0, 1e-12, 30).unwrap();
        let exact = (1.0 - (40.0f64).cos()) / 40.0;
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    #[test]
    fn adaptive_endpoint_structure() {
        // smooth but sharply peaked integrand
        let v = adaptive(|x: f64| 1.0 / (1e-4 + x * x), 0.0, 1.0, 1e-10, 40).unwrap();
        let exact = (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-6 * exact);
    }
}
