//! Reals carried together with a certified absolute error bound.
//!
//! Every arithmetic operation propagates the input errors interval-style and
//! adds a rounding allowance proportional to the magnitude of the result, so
//! the true value always lies in `[value - abs_error, value + abs_error]`
//! provided the inputs did.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// One unit of relative rounding per operation, with a little headroom.
const ROUND: f64 = 2.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedReal {
    pub value: f64,
    pub abs_error: f64,
}

fn slop(x: f64) -> f64 {
    x.abs() * ROUND
}

/// Inflates an error term so the error computation itself stays an upper bound.
fn up(e: f64) -> f64 {
    e * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE
}

impl CertifiedReal {
    pub fn new(value: f64, abs_error: f64) -> Self {
        debug_assert!(abs_error >= 0.0 && abs_error.is_finite());
        CertifiedReal { value, abs_error }
    }

    /// A value that is exactly representable (e.g. a small integer).
    pub fn exact(value: f64) -> Self {
        CertifiedReal { value, abs_error: 0.0 }
    }

    /// A correctly rounded value (half an ulp away from the truth at most).
    pub fn rounded(value: f64) -> Self {
        CertifiedReal { value, abs_error: slop(value) }
    }

    pub fn from_int(n: i64) -> Self {
        let v = n as f64;
        if (v as i64) == n && v.abs() < 9.0e15 {
            Self::exact(v)
        } else {
            Self::rounded(v)
        }
    }

    pub fn pi() -> Self {
        Self::rounded(std::f64::consts::PI)
    }

    pub fn lo(&self) -> f64 {
        self.value - self.abs_error
    }

    pub fn hi(&self) -> f64 {
        self.value + self.abs_error
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    /// True when the two enclosures intersect.
    pub fn overlaps(&self, other: &CertifiedReal) -> bool {
        self.lo() <= other.hi() && other.lo() <= self.hi()
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo() > 0.0
    }

    pub fn abs(self) -> Self {
        CertifiedReal { value: self.value.abs(), abs_error: self.abs_error }
    }

    pub fn widen(self, extra: f64) -> Self {
        CertifiedReal { value: self.value, abs_error: up(self.abs_error + extra.abs()) }
    }

    pub fn sqrt(self) -> Self {
        assert!(self.hi() >= 0.0, "sqrt of a certainly negative quantity");
        let v = self.value.max(0.0).sqrt();
        let lo = self.lo().max(0.0).sqrt();
        let hi = self.hi().sqrt();
        let e = (v - lo).max(hi - v);
        CertifiedReal { value: v, abs_error: up(e + slop(v)) }
    }

    pub fn ln(self) -> Self {
        assert!(self.lo() > 0.0, "log of a quantity not certainly positive");
        let v = self.value.ln();
        // |ln x - ln y| <= |x - y| / min(x, y)
        let e = self.abs_error / self.lo();
        CertifiedReal { value: v, abs_error: up(e + slop(v) + f64::EPSILON) }
    }

    pub fn exp(self) -> Self {
        let v = self.value.exp();
        let e = self.hi().exp() - v;
        CertifiedReal { value: v, abs_error: up(e.max(v - self.lo().exp()) + slop(v)) }
    }

    /// `self^p` for a positive base.
    pub fn powf(self, p: f64) -> Self {
        (self.ln() * CertifiedReal::exact(p)).exp()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = CertifiedReal::exact(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    pub fn max(self, other: CertifiedReal) -> Self {
        if self.value >= other.value {
            CertifiedReal { value: self.value, abs_error: self.abs_error.max(other.hi() - self.value).max(0.0) }
        } else {
            other.max(self)
        }
    }
}

impl Add for CertifiedReal {
    type Output = CertifiedReal;
    fn add(self, rhs: CertifiedReal) -> CertifiedReal {
        let v = self.value + rhs.value;
        CertifiedReal { value: v, abs_error: up(self.abs_error + rhs.abs_error + slop(v)) }
    }
}

impl Sub for CertifiedReal {
    type Output = CertifiedReal;
    fn sub(self, rhs: CertifiedReal) -> CertifiedReal {
        self + (-rhs)
    }
}

impl Neg for CertifiedReal {
    type Output = CertifiedReal;
    fn neg(self) -> CertifiedReal {
        CertifiedReal { value: -self.value, abs_error: self.abs_error }
    }
}

impl Mul for CertifiedReal {
    type Output = CertifiedReal;
    fn mul(self, rhs: CertifiedReal) -> CertifiedReal {
        let v = self.value * rhs.value;
        let e = self.value.abs() * rhs.abs_error
            + rhs.value.abs() * self.abs_error
            + self.abs_error * rhs.abs_error;
        CertifiedReal { value: v, abs_error: up(e + slop(v)) }
    }
}

impl Div for CertifiedReal {
    type Output = CertifiedReal;
    fn div(self, rhs: CertifiedReal) -> CertifiedReal {
        let b_min = rhs.value.abs() - rhs.abs_error;
        assert!(b_min > 0.0, "division by a quantity whose enclosure contains zero");
        let v = self.value / rhs.value;
        let e = (self.value.abs() * rhs.abs_error + rhs.value.abs() * self.abs_error)
            / (rhs.value.abs() * b_min);
        CertifiedReal { value: v, abs_error: up(e + slop(v)) }
    }
}

impl Mul<f64> for CertifiedReal {
    type Output = CertifiedReal;
    fn mul(self, rhs: f64) -> CertifiedReal {
        self * CertifiedReal::exact(rhs)
    }
}

impl fmt::Display for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} ± {:.1e}", self.value, self.abs_error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_enclosure() {
        let p = CertifiedReal::pi();
        assert!(p.abs_error > 0.0 && p.abs_error < 2e-15);
        assert!(p.contains(std::f64::consts::PI));
    }

    #[test]
    fn log_and_sqrt_of_exact_values() {
        let two = CertifiedReal::exact(2.0);
        assert!(two.sqrt().contains(std::f64::consts::SQRT_2));
        assert!(two.ln().contains(std::f64::consts::LN_2));
    }

    proptest! {
        // The enclosure of a product/quotient contains the product of any
        // points drawn from the input enclosures.
        #[test]
        fn arithmetic_encloses(a in -1e3f64..1e3, b in 1e-2f64..1e3, ea in 0.0f64..1e-3, eb in 0.0f64..1e-3,
                               ta in -1.0f64..1.0, tb in -1.0f64..1.0) {
            let x = CertifiedReal::new(a, ea);
            let y = CertifiedReal::new(b, eb);
            let xa = a + ta * ea;
            let yb = b + tb * eb;
            prop_assume!(yb > 0.0 && b - eb > 0.0);
            prop_assert!((x * y).widen(1e-12 * (xa * yb).abs()).contains(xa * yb));
            prop_assert!((x + y).widen(1e-12).contains(xa + yb));
            prop_assert!((x / y).widen(1e-12 * (xa / yb).abs()).contains(xa / yb));
        }
    }
}
