//! Small fixed-size complex 3x3 tensor used for Green-function blocks.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

/// Complex 3x3 tensor; indices follow the cylindrical basis
/// (e_rho, e_phi, e_z) at the atom, which coincides with (e_x, e_y, e_z).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Tensor3(pub [[Complex64; 3]; 3]);

impl Tensor3 {
    pub const ZERO: Tensor3 = Tensor3([[Complex64::new(0.0, 0.0); 3]; 3]);

    pub fn from_diagonal(d: [Complex64; 3]) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            t.0[i][i] = d[i];
        }
        t
    }

    pub fn diagonal(&self) -> [Complex64; 3] {
        [self.0[0][0], self.0[1][1], self.0[2][2]]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn imag(&self) -> Self {
        self.map(|z| Complex64::new(0.0, z.im))
    }

    pub fn real(&self) -> Self {
        self.map(|z| Complex64::new(z.re, 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut t = Self::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = f(self.0[i][j]);
            }
        }
        t
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.0 {
            for z in row {
                m = m.max(z.norm());
            }
        }
        m
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    m = m.max(self.0[i][j].norm());
                }
            }
        }
        m
    }

    /// d* . T . d for a complex vector d.
    pub fn quadratic_form(&self, d: &[Complex64; 3]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += d[i].conj() * self.0[i][j] * d[j];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for Tensor3 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: Tensor3) -> Tensor3 {
        let mut t = self;
        t += rhs;
        t
    }
}

impl AddAssign for Tensor3 {
    fn add_assign(&mut self, rhs: Tensor3) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: Tensor3) -> Tensor3 {
        self + rhs * Complex64::new(-1.0, 0.0)
    }
}

impl Mul<Complex64> for Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: Complex64) -> Tensor3 {
        self.map(|z| z * s)
    }
}

impl Mul<f64> for Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: f64) -> Tensor3 {
        self.map(|z| z * s)
    }
}
