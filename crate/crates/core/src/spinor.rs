//! Two-component spinor values of the 1D Dirac field.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Mul};

/// Value of the reduced Dirac field at a point: upper (+) and lower (-) components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor2 {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl Spinor2 {
    pub const ZERO: Spinor2 = Spinor2 {
        plus: Complex64::new(0.0, 0.0),
        minus: Complex64::new(0.0, 0.0),
    };

    pub fn new(plus: Complex64, minus: Complex64) -> Self {
        Spinor2 { plus, minus }
    }

    /// psi^dagger psi, always >= 0.
    pub fn density(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }

    /// psi^dagger sigma_x psi = 2 Re(conj(phi+) phi-).
    pub fn current(&self) -> f64 {
        2.0 * (self.plus.conj() * self.minus).re
    }

    /// psi^dagger sigma_y psi = 2 Im(conj(phi+) phi-); drives the mass term of the
    /// acceleration split.
    pub fn sigma_y(&self) -> f64 {
        2.0 * (self.plus.conj() * self.minus).im
    }
}

impl Add for Spinor2 {
    type Output = Spinor2;
    fn add(self, rhs: Spinor2) -> Spinor2 {
        Spinor2::new(self.plus + rhs.plus, self.minus + rhs.minus)
    }
}

impl AddAssign for Spinor2 {
    fn add_assign(&mut self, rhs: Spinor2) {
        self.plus += rhs.plus;
        self.minus += rhs.minus;
    }
}

impl Mul<Complex64> for Spinor2 {
    type Output = Spinor2;
    fn mul(self, rhs: Complex64) -> Spinor2 {
        Spinor2::new(self.plus * rhs, self.minus * rhs)
    }
}
