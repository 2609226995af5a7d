//! Special-function kernel: cylindrical Bessel/Hankel functions of integer
//! order with real and complex arguments, and Wigner 3j/6j symbols.

mod bessel;
mod wigner;

pub use bessel::{
    bessel_j, bessel_j_array, bessel_j_deriv, bessel_y, deriv_from_array, hankel1, hankel1_array,
    hankel1_deriv, CylFunValue,
};
pub use wigner::{wigner_3j, wigner_6j};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SpecFunError {
    #[error("order |n| = {0} exceeds the supported maximum of 200")]
    OrderTooLarge(i32),
    #[error("argument z = 0 is outside the domain of this function")]
    ZeroArgument,
    #[error("argument with |z| = {0:.3e} would overflow/underflow the evaluation")]
    OutOfRange(f64),
    #[error("lower half plane argument (Im z = {0:.3e} < 0) is not supported")]
    LowerHalfPlane(f64),
    #[error("quantum number {0} is not a half-integer")]
    NonHalfInteger(f64),
}
