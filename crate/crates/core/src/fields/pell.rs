//! Fundamental units of real quadratic orders via the continued fraction of ω.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::isqrt;
use crate::certified::CertifiedReal;

/// The fundamental unit `ε = (x + y√D)/2 > 1` of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub x: BigInt,
    pub y: BigInt,
    /// Norm of ε, i.e. `(x² − D·y²)/4 = ±1`.
    pub norm: i8,
}

impl FundamentalUnit {
    /// `log ε` with a certified error bound.
    pub fn regulator(&self) -> CertifiedReal {
        let (lx, small_x) = ln_big(&self.x);
        let v = match small_x {
            Some(x) => {
                // Y√D = sqrt(x² − 4·norm)
                let ysd = (x * x - 4.0 * self.norm as f64).sqrt();
                ((x + ysd) / 2.0).ln()
            }
            None => {
                let xf2 = (-lx * 2.0).exp();
                lx + ((1.0 + (1.0 - 4.0 * self.norm as f64 * xf2).sqrt()) / 2.0).ln()
            }
        };
        CertifiedReal::new(v, 16.0 * f64::EPSILON * v.abs().max(1.0))
    }
}

/// `ln x` for a positive big integer, plus `x` itself as f64 when exact enough.
fn ln_big(x: &BigInt) -> (f64, Option<f64>) {
    let bits = x.bits();
    if bits <= 53 {
        let f = x.to_f64().expect("small integer");
        return (f.ln(), Some(f));
    }
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_u64().expect("60-bit head") as f64;
    let l = top.ln() + shift as f64 * std::f64::consts::LN_2;
    if bits <= 500 {
        (l, x.to_f64())
    } else {
        (l, None)
    }
}

/// Solves `x² − D y² = ±4` minimally with the PQa continued fraction of
/// `(P₀ + √D)/Q₀`, `Q₀ = 2`, `P₀ = D mod 2`.
pub fn fundamental_unit(d: i64) -> FundamentalUnit {
    assert!(d > 1, "real quadratic discriminant expected");
    let s = isqrt(d);
    assert!(s * s != d, "square discriminant");
    let q0 = 2i64;
    let p0 = d.rem_euclid(2);
    let (mut p, mut q) = (p0, q0);
    let (mut a_prev, mut a_cur) = (BigInt::zero(), BigInt::one());
    let (mut b_prev, mut b_cur) = (BigInt::one(), BigInt::zero());
    let mut i = 0u64;
    loop {
        let a = (p + s).div_euclid(q);
        let a_next = &a_cur * a + &a_prev;
        let b_next = &b_cur * a + &b_prev;
        a_prev = std::mem::replace(&mut a_cur, a_next);
        b_prev = std::mem::replace(&mut b_cur, b_next);
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        p = p_next;
        q = q_next;
        if q == q0 {
            let x = &a_cur * q0 - &b_cur * p0;
            let y = b_cur.clone();
            let norm: i8 = if i.is_multiple_of(2) { -1 } else { 1 };
            let check = &x * &x - BigInt::from(d) * &y * &y;
            assert_eq!(check, BigInt::from(4 * norm as i64), "Pell identity");
            debug_assert!(x.is_positive() && y.is_positive());
            return FundamentalUnit { x, y, norm };
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(d: i64) -> (i64, i64, i8) {
        // smallest y > 0 with D y² ± 4 a perfect square
        for y in 1i64.. {
            for sign in [-1i64, 1] {
                let t = d * y * y + 4 * sign;
                if t > 0 {
                    let x = isqrt(t);
                    if x * x == t {
                        return (x, y, sign as i8);
                    }
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn small_units() {
        let u = fundamental_unit(5);
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(1), BigInt::from(1), -1));
        assert!((u.regulator().value - 0.4812118251).abs() < 1e-10);
        let u = fundamental_unit(8);
        assert_eq!((u.x.clone(), u.y.clone()), (BigInt::from(2), BigInt::from(1)));
        assert!((u.regulator().value - 0.8813735870).abs() < 1e-10);
        let u = fundamental_unit(12);
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(4), BigInt::from(1), 1));
        assert!((u.regulator().value - 1.3169578969).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_brute_force() {
        for d in [13i64, 17, 21, 24, 28, 29, 33, 37, 40, 41, 44, 53, 56, 57, 60, 61, 65] {
            let u = fundamental_unit(d);
            let (x, y, n) = brute_force(d);
            assert_eq!((u.x.to_i64().unwrap(), u.y.to_i64().unwrap(), u.norm), (x, y, n), "D={d}");
        }
    }

    #[test]
    fn huge_unit_regulator() {
        // Z[√94] has fundamental unit 2143295 + 221064·√94
        let u = fundamental_unit(376);
        assert_eq!(u.x, BigInt::from(2 * 2143295));
        let r = u.regulator().value;
        assert!((r - (2143295f64 + 221064f64 * 94f64.sqrt()).ln()).abs() < 1e-12);
    }
}
