//! Exact invariants of quadratic number fields.
//!
//! A field is identified by its fundamental discriminant `D`. Everything
//! here is exact integer arithmetic except the regulator and the L-values,
//! which are carried as [`CertifiedReal`]s.

mod forms;
mod kronecker;
mod pell;

pub use forms::{count_form_cycles, reduced_definite_forms, reduced_indefinite_forms, Form};
pub use kronecker::{jacobi, kronecker_chi, CharacterTable};
pub use pell::{fundamental_unit, FundamentalUnit};

use serde::{Deserialize, Serialize};

use crate::certified::CertifiedReal;
use crate::error::{Error, Result};
use crate::lfun;

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: i64) -> i64 {
    assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Archimedean signature `(r1, r2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub r1: u32,
    pub r2: u32,
}

impl Signature {
    pub const REAL_QUADRATIC: Signature = Signature { r1: 2, r2: 0 };
    pub const IMAGINARY_QUADRATIC: Signature = Signature { r1: 0, r2: 1 };

    pub fn new(r1: u32, r2: u32) -> Result<Self> {
        let s = Signature { r1, r2 };
        if s.degree() < 2 {
            return Err(Error::domain(format!("signature ({r1},{r2}) has degree < 2")));
        }
        Ok(s)
    }

    pub fn degree(&self) -> u32 {
        self.r1 + 2 * self.r2
    }

    /// The signature of the quadratic field of discriminant `d`.
    pub fn of_disc(d: i64) -> Self {
        if d > 0 {
            Self::REAL_QUADRATIC
        } else {
            Self::IMAGINARY_QUADRATIC
        }
    }

    fn require_quadratic(&self) -> Result<()> {
        match self.degree() {
            2 => Ok(()),
            d => Err(Error::UnsupportedDegree(d)),
        }
    }
}

impl std::str::FromStr for Signature {
    type Err = Error;

    /// Accepts `"2,0"`, `"(0,1)"`, `"real"` or `"imaginary"`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "real" => return Ok(Self::REAL_QUADRATIC),
            "imaginary" => return Ok(Self::IMAGINARY_QUADRATIC),
            _ => {}
        }
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::Config(format!("bad signature {s:?}, expected r1,r2")));
        }
        let parse = |p: &str| p.parse::<u32>().map_err(|_| Error::Config(format!("bad signature {s:?}")));
        Signature::new(parse(parts[0])?, parse(parts[1])?)
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.r1, self.r2)
    }
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// `D ≡ 1 mod 4` squarefree, or `D = 4m` with `m ≡ 2, 3 mod 4` squarefree; `D ≠ 1`.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

pub(crate) fn require_fundamental(d: i64) -> Result<()> {
    if is_fundamental(d) {
        Ok(())
    } else {
        Err(Error::NotFundamental(d))
    }
}

/// Fundamental discriminants in `[dmin, dmax]` whose sign matches `sig`,
/// ascending by `|D|`.
pub fn list_fundamental_discriminants(dmin: i64, dmax: i64, sig: Signature) -> Result<Vec<i64>> {
    sig.require_quadratic()?;
    if dmin > dmax {
        return Err(Error::domain(format!("empty interval [{dmin}, {dmax}]")));
    }
    let (lo, hi) = if sig == Signature::REAL_QUADRATIC {
        (dmin.max(2), dmax)
    } else {
        (dmin, dmax.min(-1))
    };
    if lo > hi {
        return Ok(Vec::new());
    }
    // squarefree sieve on |n| ≤ bound
    let bound = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
    let mut squarefree = vec![true; bound + 1];
    let mut k = 2usize;
    while k * k <= bound {
        let mut j = k * k;
        while j <= bound {
            squarefree[j] = false;
            j += k * k;
        }
        k += 1;
    }
    let sf = |n: i64| squarefree[n.unsigned_abs() as usize];
    let mut out: Vec<i64> = (lo..=hi)
        .filter(|&d| {
            d != 1
                && match d.rem_euclid(4) {
                    1 => sf(d),
                    0 => matches!((d / 4).rem_euclid(4), 2 | 3) && sf(d / 4),
                    _ => false,
                }
        })
        .collect();
    out.sort_by_key(|d| d.unsigned_abs());
    Ok(out)
}

/// Number of roots of unity in the field of discriminant `d`.
pub fn roots_of_unity(d: i64) -> u32 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// The class number `h`.
///
/// For `D < 0` this counts reduced definite forms. For `D > 0` it counts
/// cycles of reduced indefinite forms (the narrow class number) and halves
/// it when the fundamental unit has norm `+1`.
pub fn class_number(d: i64) -> Result<u64> {
    require_fundamental(d)?;
    if d < 0 {
        Ok(reduced_definite_forms(d).len() as u64)
    } else {
        let narrow = count_form_cycles(d);
        Ok(if fundamental_unit(d).norm == 1 { narrow / 2 } else { narrow })
    }
}

/// An element `a + bω` of `O_F`, `ω = (D + √D)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadInteger {
    pub a: i64,
    pub b: i64,
}

impl QuadInteger {
    pub const ZERO: QuadInteger = QuadInteger { a: 0, b: 0 };
    pub const ONE: QuadInteger = QuadInteger { a: 1, b: 0 };
    pub const OMEGA: QuadInteger = QuadInteger { a: 0, b: 1 };

    pub fn new(a: i64, b: i64) -> Self {
        QuadInteger { a, b }
    }

    pub fn rational(a: i64) -> Self {
        QuadInteger { a, b: 0 }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn trace(&self, d: i64) -> i64 {
        2 * self.a + self.b * d
    }

    pub fn norm(&self, d: i64) -> i64 {
        let (a, b, d) = (self.a as i128, self.b as i128, d as i128);
        (a * a + a * b * d + b * b * (d * d - d) / 4) as i64
    }

    /// `(t, y)` with `x = (t + y√D)/2`.
    pub fn half_coords(&self, d: i64) -> (i64, i64) {
        (self.trace(d), self.b)
    }

    /// Inverse of [`half_coords`](Self::half_coords); `None` unless the pair
    /// describes an algebraic integer.
    pub fn from_half_coords(t: i64, y: i64, d: i64) -> Option<Self> {
        let num = t - y * d;
        (num.rem_euclid(2) == 0 && (t * t - d * y * y).rem_euclid(4) == 0).then_some(QuadInteger { a: num / 2, b: y })
    }

    pub fn conj(&self, d: i64) -> Self {
        // ω + ω̄ = D
        QuadInteger { a: self.a + self.b * d, b: -self.b }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadInteger { a: self.a + o.a, b: self.b + o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadInteger { a: self.a - o.a, b: self.b - o.b }
    }

    pub fn neg(&self) -> Self {
        QuadInteger { a: -self.a, b: -self.b }
    }

    /// `ω² = Dω − (D² − D)/4`.
    pub fn mul(&self, o: &Self, d: i64) -> Self {
        let c = (d * d - d) / 4;
        QuadInteger {
            a: self.a * o.a - self.b * o.b * c,
            b: self.a * o.b + self.b * o.a + self.b * o.b * d,
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        QuadInteger { a: self.a * k, b: self.b * k }
    }

    /// An exact square root in `O_F`, if one exists.
    ///
    /// A root `s` has `N(s)² = N(x)` and `T(s)² = T(x) + 2N(s)`, which leaves at
    /// most four candidates to verify by squaring.
    pub fn sqrt(&self, d: i64) -> Option<Self> {
        if *self == Self::ZERO {
            return Some(Self::ZERO);
        }
        let nx = self.norm(d);
        if nx < 0 {
            return None;
        }
        let rn = isqrt(nx);
        if rn * rn != nx {
            return None;
        }
        let tx = self.trace(d);
        for n in [rn, -rn] {
            let t2 = tx + 2 * n;
            if t2 < 0 {
                continue;
            }
            let t = isqrt(t2);
            if t * t != t2 {
                continue;
            }
            for t in [t, -t] {
                let y2n = t * t - 4 * n;
                if y2n % d != 0 {
                    continue;
                }
                let y2 = y2n / d;
                if y2 < 0 {
                    continue;
                }
                let y = isqrt(y2);
                if y * y != y2 {
                    continue;
                }
                for y in [y, -y] {
                    if let Some(s) = Self::from_half_coords(t, y, d) {
                        if s.mul(&s, d) == *self {
                            return Some(s);
                        }
                    }
                }
            }
        }
        None
    }
}

impl std::fmt::Display for QuadInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}ω"),
            (a, b) if b < 0 => write!(f, "{a}-{}ω", -b),
            (a, b) => write!(f, "{a}+{b}ω"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Ingested,
}

/// The invariants of one quadratic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldInvariants {
    pub disc: i64,
    pub signature: Signature,
    pub h: u64,
    /// `log ε` for real fields; zero for imaginary ones.
    pub regulator: CertifiedReal,
    /// Norm of the fundamental unit (real fields only).
    pub unit_norm: Option<i8>,
    pub w: u32,
    /// `L(1, χ_D)` from the finite character sum.
    pub l1: CertifiedReal,
    pub zeta2: CertifiedReal,
    pub provenance: Provenance,
}

impl FieldInvariants {
    pub fn abs_disc(&self) -> f64 {
        self.disc.unsigned_abs() as f64
    }

    pub fn log_disc(&self) -> f64 {
        self.abs_disc().ln()
    }

    pub fn degree(&self) -> u32 {
        self.signature.degree()
    }

    /// The regulator as it enters the class number formula (1 for imaginary fields).
    pub fn regulator_eff(&self) -> CertifiedReal {
        if self.disc > 0 {
            self.regulator
        } else {
            CertifiedReal::exact(1.0)
        }
    }

    /// `res_{s=1} ζ_F(s) = L(1, χ_D)`.
    pub fn residue(&self) -> CertifiedReal {
        self.l1
    }

    /// `2^{r1}(2π)^{r2} h R / (w √|D|)`.
    pub fn class_number_formula(&self) -> CertifiedReal {
        class_number_formula(self.disc, self.h, self.w, self.regulator_eff())
    }
}

fn class_number_formula(d: i64, h: u64, w: u32, reg: CertifiedReal) -> CertifiedReal {
    let lead = if d > 0 {
        CertifiedReal::exact(4.0)
    } else {
        CertifiedReal::pi() * 2.0
    };
    lead * CertifiedReal::from_int(h as i64) * reg
        / (CertifiedReal::from_int(w as i64) * CertifiedReal::from_int(d.abs()).sqrt())
}

/// Tolerance for the agreement of the two `L(1, χ_D)` evaluations.
pub const L1_AGREEMENT_TOL: f64 = 1e-9;

/// All invariants of the field of discriminant `d`, cross-checking the class
/// number formula against the finite character sum.
pub fn field_invariants(d: i64) -> Result<FieldInvariants> {
    require_fundamental(d)?;
    let w = roots_of_unity(d);
    let (h, regulator, unit_norm) = if d < 0 {
        (reduced_definite_forms(d).len() as u64, CertifiedReal::exact(0.0), None)
    } else {
        let unit = fundamental_unit(d);
        let narrow = count_form_cycles(d);
        let h = if unit.norm == 1 { narrow / 2 } else { narrow };
        (h, unit.regulator(), Some(unit.norm))
    };
    let l1 = lfun::l_at_one(d)?;
    let inv = FieldInvariants {
        disc: d,
        signature: Signature::of_disc(d),
        h,
        regulator,
        unit_norm,
        w,
        l1,
        zeta2: lfun::zeta_f_at_2(d, lfun::DEFAULT_TOL)?,
        provenance: Provenance::Computed,
    };
    let cnf = inv.class_number_formula();
    if (cnf.value - l1.value).abs() > L1_AGREEMENT_TOL + cnf.abs_error + l1.abs_error {
        return Err(Error::Consistency(format!(
            "D={d}: L(1,χ) = {l1} from the character sum but {cnf} from the class number formula"
        )));
    }
    Ok(inv)
}

/// Exponent of the local different at the prime `p`, read off from an
/// Eisenstein generator of the completion.
pub fn local_different_exponent(d: i64, p: u64) -> u32 {
    if !d.unsigned_abs().is_multiple_of(p) {
        return 0;
    }
    if p != 2 {
        // tame: π = √m, f'(π) = 2√m has valuation v_π(√m) = 1
        return 1;
    }
    // D = 4m; uniformizer 1 + √m (m ≡ 3 mod 4) or √m (m ≡ 2 mod 4).
    // f'(π) = 2√m, and v_π(2) = 2.
    let m = d / 4;
    let v_sqrt_m = if m.rem_euclid(2) == 0 { 1 } else { 0 };
    2 + v_sqrt_m
}

/// `∏_{v ramified} 𝔑(∂_v)`, which equals `|D|`.
pub fn different_norm_product(d: i64) -> Result<u64> {
    require_fundamental(d)?;
    Ok(factorize(d.unsigned_abs())
        .into_iter()
        .map(|(p, _)| p.pow(local_different_exponent(d, p)))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_list(lo: i64, hi: i64, positive: bool) -> Vec<i64> {
        let mut v: Vec<i64> = (lo..=hi).filter(|&d| (d > 0) == positive && is_fundamental(d)).collect();
        v.sort_by_key(|d| d.unsigned_abs());
        v
    }

    #[test]
    fn discriminant_lists() {
        let imag = Signature::IMAGINARY_QUADRATIC;
        let real = Signature::REAL_QUADRATIC;
        assert_eq!(list_fundamental_discriminants(-10, -1, imag).unwrap(), vec![-3, -4, -7, -8]);
        assert!(list_fundamental_discriminants(1, 4, real).unwrap().is_empty());
        assert_eq!(list_fundamental_discriminants(5, 13, real).unwrap(), vec![5, 8, 12, 13]);
        assert_eq!(list_fundamental_discriminants(-3000, -1, imag).unwrap(), brute_list(-3000, -1, false));
        assert_eq!(list_fundamental_discriminants(1, 3000, real).unwrap(), brute_list(1, 3000, true));
        assert!(matches!(
            list_fundamental_discriminants(1, 10, Signature { r1: 4, r2: 0 }),
            Err(Error::UnsupportedDegree(4))
        ));
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-4).unwrap(), 1);
        assert_eq!(class_number(229).unwrap(), 3);
        assert_eq!(class_number(12).unwrap(), 1);
        assert_eq!(class_number(-163).unwrap(), 1);
        assert_eq!(class_number(-5 * 4).unwrap(), 2);
        assert_eq!(class_number(4 * 79).unwrap(), 3);
        assert!(class_number(9).is_err());
    }

    #[test]
    fn invariants_of_small_fields() {
        let f = field_invariants(-4).unwrap();
        assert_eq!((f.h, f.w), (1, 4));
        assert!((f.l1.value - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let f = field_invariants(5).unwrap();
        assert_eq!((f.h, f.w), (1, 2));
        assert!((f.regulator.value - 0.4812118251).abs() < 1e-10);
        assert!((f.l1.value - 0.4304089410).abs() < 1e-10);
        let f = field_invariants(-3).unwrap();
        assert_eq!((f.h, f.w), (1, 6));
        assert!((f.l1.value - 0.6045997881).abs() < 1e-10);
    }

    #[test]
    fn different_matches_discriminant() {
        assert_eq!(different_norm_product(12).unwrap(), 12);
        assert_eq!(different_norm_product(-4).unwrap(), 4);
        assert_eq!(different_norm_product(5).unwrap(), 5);
        for d in list_fundamental_discriminants(-2000, 2000, Signature::IMAGINARY_QUADRATIC)
            .unwrap()
            .into_iter()
            .chain(list_fundamental_discriminants(-2000, 2000, Signature::REAL_QUADRATIC).unwrap())
        {
            assert_eq!(different_norm_product(d).unwrap(), d.unsigned_abs(), "D={d}");
        }
    }

    #[test]
    fn quad_integer_arithmetic() {
        let d = 5;
        let w = QuadInteger::OMEGA;
        // ω = (5 + √5)/2: trace 5, norm 5
        assert_eq!((w.trace(d), w.norm(d)), (5, 5));
        let w2 = w.mul(&w, d);
        assert_eq!(w2.norm(d), 25);
        let s = w2.sqrt(d).unwrap();
        assert!(s == w || s == w.neg());
        assert_eq!(QuadInteger::rational(5).sqrt(d).map(|s| s.mul(&s, d)), Some(QuadInteger::rational(5)));
        assert_eq!(QuadInteger::rational(-3).sqrt(-4), None);
        assert_eq!(QuadInteger::rational(-1).sqrt(-4).map(|s| s.norm(-4)), Some(1));
        assert_eq!(w.conj(d).add(&w), QuadInteger::rational(d));
    }
}
