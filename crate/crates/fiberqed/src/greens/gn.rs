//! Components of the azimuthal Green-tensor blocks g_n(rho, rho', omega, beta)
//! outside the fiber, together with their radial slot derivatives and the
//! rank-4 second-derivative kernel used by quadrupole couplings.
//!
//! Every component is a short sum of separable terms
//! `coefficient * u(eta2 rho) * v(eta2 rho')` with u, v drawn from
//! {H_n, n H_n / x, dH_n}; evaluating the derivative levels only swaps the
//! factors for their radial derivatives. Components are computed for
//! n >= 0, beta >= 0 and extended by the exact parity table
//! (diagonals even/even; rho-phi odd/even; rho-z even/odd; phi-z odd/odd).

use super::refl::ReflectionParts;
use super::WaveContext;
use crate::quad::Accumulate;
use crate::specfun::{deriv_from_array, hankel1_array};
use crate::tensor::Tensor3;
use num_complex::Complex64;

/// Hankel factor bundle at one radial argument x = eta2 * rho:
/// values of H, nH/x, dH and their derivatives with respect to rho.
#[derive(Debug, Clone, Copy)]
pub struct Factors {
    h: Complex64,
    nh: Complex64,
    dh: Complex64,
    d_h: Complex64,
    d_nh: Complex64,
    d_dh: Complex64,
}

impl Factors {
    pub fn new(n: u32, eta2: Complex64, rho: f64, h: Complex64, dh: Complex64) -> Self {
        let x = eta2 * rho;
        let nf = n as f64;
        let nh = nf * h / x;
        Factors {
            h,
            nh,
            dh,
            d_h: eta2 * dh,
            d_nh: eta2 / x * (nf * dh - nh),
            d_dh: eta2 * ((nf * nf / (x * x) - 1.0) * h - dh / x),
        }
    }

    /// Build factor bundles for orders 0..=n_max at radius rho.
    pub fn array(
        n_max: usize,
        eta2: Complex64,
        rho: f64,
    ) -> Result<Vec<Factors>, crate::specfun::SpecFunError> {
        let x = eta2 * rho;
        let h = hankel1_array(n_max + 1, x)?;
        let dh = deriv_from_array(&h, x);
        Ok((0..=n_max)
            .map(|n| Factors::new(n as u32, eta2, rho, h[n], dh[n]))
            .collect())
    }

    fn get(&self, kind: u8, deriv: bool) -> Complex64 {
        match (kind, deriv) {
            (0, false) => self.h,
            (1, false) => self.nh,
            (2, false) => self.dh,
            (0, true) => self.d_h,
            (1, true) => self.d_nh,
            _ => self.d_dh,
        }
    }
}

const H: u8 = 0;
const NH: u8 = 1;
const DH: u8 = 2;

/// Component values of g_n at one (n >= 0, |beta|) with all four radial
/// derivative levels: value, d/drho, d/drho', d2/(drho drho').
#[derive(Debug, Clone, Copy)]
pub struct GnData {
    /// vals[3*i + j][level]
    vals: [[Complex64; 4]; 9],
    pub n: u32,
}

/// parity exponents (in n, in beta) per component index 3*i + j
const PARITY: [(u8, u8); 9] = [
    (0, 0), // rho rho
    (1, 0), // rho phi
    (0, 1), // rho z
    (1, 0), // phi rho
    (0, 0), // phi phi
    (1, 1), // phi z
    (0, 1), // z rho
    (1, 1), // z phi
    (0, 0), // z z
];

impl GnData {
    /// Evaluate the component table. `refl` must be built at the same
    /// (n, |beta|); `numerators` swaps the reflection coefficients for their
    /// D-cleared numerators (used when taking pole residues).
    pub fn evaluate(
        ctx: &WaveContext,
        refl: &ReflectionParts,
        fu: &Factors,
        fv: &Factors,
        numerators: bool,
    ) -> GnData {
        let (cm, cn, cx) = if numerators {
            (refl.num_mm, refl.num_nn, refl.num_nm)
        } else {
            (refl.r_mm, refl.r_nn, refl.r_nm)
        };
        let i = Complex64::i();
        let l = refl.beta / ctx.k2;
        let e = refl.eta2 / ctx.k2;
        let l2 = l * l;
        // term tables: (coefficient, u kind, v kind)
        let comp = |terms: &[(Complex64, u8, u8)], level: usize| -> Complex64 {
            let (du, dv) = (level == 1 || level == 3, level == 2 || level == 3);
            terms
                .iter()
                .map(|&(c, ut, vt)| c * fu.get(ut, du) * fv.get(vt, dv))
                .sum()
        };
        let tables: [&[(Complex64, u8, u8)]; 9] = [
            // rho rho
            &[
                (i * cm, NH, NH),
                (i * cn * l2, DH, DH),
                (i * cx * l, NH, DH),
                (i * cx * l, DH, NH),
            ],
            // rho phi
            &[
                (cm.into(), NH, DH),
                (cn * l2, DH, NH),
                (cx * l, DH, DH),
                (cx * l, NH, NH),
            ],
            // rho z
            &[(-e * cx, NH, H), (-e * l * cn, DH, H)],
            // phi rho
            &[
                (-cm, DH, NH),
                (-cn * l2, NH, DH),
                (-cx * l, DH, DH),
                (-cx * l, NH, NH),
            ],
            // phi phi
            &[
                (i * cm, DH, DH),
                (i * cn * l2, NH, NH),
                (i * cx * l, NH, DH),
                (i * cx * l, DH, NH),
            ],
            // phi z
            &[(-i * e * cx, DH, H), (-i * e * l * cn, NH, H)],
            // z rho
            &[(e * cx, H, NH), (e * l * cn, H, DH)],
            // z phi
            &[(-i * e * cx, H, DH), (-i * e * l * cn, H, NH)],
            // z z
            &[(i * e * e * cn, H, H)],
        ];
        let mut vals = [[Complex64::new(0.0, 0.0); 4]; 9];
        for (ci, terms) in tables.iter().enumerate() {
            for (level, slot) in vals[ci].iter_mut().enumerate() {
                *slot = comp(terms, level);
            }
        }
        GnData { vals, n: refl.n }
    }

    /// Component (i, j) at a derivative level for signed order/beta.
    pub fn component(&self, i: usize, j: usize, level: usize, sn: i8, sb: i8) -> Complex64 {
        let ci = 3 * i + j;
        let (pn, pb) = PARITY[ci];
        let mut v = self.vals[ci][level];
        if pn == 1 && sn < 0 {
            v = -v;
        }
        if pb == 1 && sb < 0 {
            v = -v;
        }
        v
    }

    /// Full 3x3 block at a derivative level for signed order/beta.
    pub fn matrix(&self, level: usize, sn: i8, sb: i8) -> Tensor3 {
        let mut t = Tensor3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.component(i, j, level, sn, sb);
            }
        }
        t
    }
}

/// Rank-4 kernel K[alpha][gamma]_{beta delta} = d_alpha d'_gamma g_{beta delta}
/// at coincident points, Cartesian derivative labels at the atom
/// (x = radial, y = azimuthal, z = axial).
#[derive(Debug, Clone, Copy)]
pub struct QuadKernel(pub [[Tensor3; 3]; 3]);

impl QuadKernel {
    pub const ZERO: QuadKernel = QuadKernel([[Tensor3::ZERO; 3]; 3]);

    pub fn imag(&self) -> QuadKernel {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for t in row.iter_mut() {
                *t = t.imag();
            }
        }
        out
    }

    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|t| t.max_norm())
            .fold(0.0, f64::max)
    }

    /// sum_{a b g d} Q1_{a b} Q2*_{g d} K[a][g]_{b d}
    pub fn contract(&self, q1: &[[Complex64; 3]; 3], q2: &[[Complex64; 3]; 3]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..3 {
            for b in 0..3 {
                for g in 0..3 {
                    for d in 0..3 {
                        acc += q1[a][b] * q2[g][d].conj() * self.0[a][g].0[b][d];
                    }
                }
            }
        }
        acc
    }
}

impl Accumulate for QuadKernel {
    fn zero() -> Self {
        Self::ZERO
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        for (r, ro) in self.0.iter_mut().zip(other.0.iter()) {
            for (t, to) in r.iter_mut().zip(ro.iter()) {
                t.add_scaled(to, w);
            }
        }
    }
    fn magnitude(&self) -> f64 {
        self.max_norm()
    }
}

fn l_left(x: &Tensor3) -> Tensor3 {
    // rows: (Lx)_{0j} = -x_{1j}, (Lx)_{1j} = x_{0j}, (Lx)_{2j} = 0
    let mut t = Tensor3::ZERO;
    for j in 0..3 {
        t.0[0][j] = -x.0[1][j];
        t.0[1][j] = x.0[0][j];
    }
    t
}

fn l_right(x: &Tensor3) -> Tensor3 {
    // columns: (xL^T)_{i0} = -x_{i1}, (xL^T)_{i1} = x_{i0}, (xL^T)_{i2} = 0
    let mut t = Tensor3::ZERO;
    for i in 0..3 {
        t.0[i][0] = -x.0[i][1];
        t.0[i][1] = x.0[i][0];
    }
    t
}

/// Second-derivative kernel contribution of one (n, |beta|) block for a
/// fixed beta sign, summed over the order signs; `r` is the atom radius.
pub fn quad_assembly(g: &GnData, beta_abs: f64, sb: i8, r: f64) -> QuadKernel {
    let mut out = QuadKernel::ZERO;
    let signs: &[i8] = if g.n == 0 { &[1] } else { &[1, -1] };
    let i = Complex64::i();
    for &sn in signs {
        let nn = sn as f64 * g.n as f64;
        let bb = sb as f64 * beta_abs;
        let m = [
            g.matrix(0, sn, sb),
            g.matrix(1, sn, sb),
            g.matrix(2, sn, sb),
            g.matrix(3, sn, sb),
        ];
        for alpha in 0..3 {
            for gamma in 0..3 {
                let base_idx = usize::from(alpha == 0) + 2 * usize::from(gamma == 0);
                let mut x = m[base_idx];
                // left operator
                x = match alpha {
                    0 => x,
                    1 => (l_left(&x) + x * (i * nn)) * Complex64::new(1.0 / r, 0.0),
                    _ => x * (i * bb),
                };
                // right operator
                x = match gamma {
                    0 => x,
                    1 => (l_right(&x) + x * (-i * nn)) * Complex64::new(1.0 / r, 0.0),
                    _ => x * (-i * bb),
                };
                out.0[alpha][gamma] += x;
            }
        }
    }
    out
}
