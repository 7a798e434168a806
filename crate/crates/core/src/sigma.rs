//! The finite coefficient set `Σ₀`: monic quadratics `X² + aX + b` whose
//! coefficients are algebraic integers of small norm, and their
//! classification over a given quadratic field.
//!
//! Coefficients live in `Λ = ℤ ∪ ⋃ O_E`, the union over quadratic fields `E`
//! of the scanned signature with `|D_E| ≤ D₀`. A nonrational `x ∈ O_E` has
//! `‖x‖²_r ≥ |D_E|/2`, so `D₀(R) = ⌊2R²⌋ + 1` suffices for a ball of radius `R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{fundamental_unit, list_fundamental_discriminants, roots_of_unity, FieldInvariants, QuadInteger, Signature};
use crate::lattices::{min_nonrational_norm, IdealLattice};
use crate::report::BoundReport;
use crate::volumes::GroupKind;

/// Largest admissible ball radius.
pub const MAX_RADIUS: f64 = 64.0;
/// Largest admissible `D₀`.
pub const MAX_D0: i64 = 20_000;

/// An algebraic integer together with the discriminant of the quadratic field
/// it generates; `home_disc` is `None` for rational integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TaggedInteger {
    pub home_disc: Option<i64>,
    pub value: QuadInteger,
}

impl TaggedInteger {
    pub fn rational(n: i64) -> Self {
        TaggedInteger { home_disc: None, value: QuadInteger::rational(n) }
    }
}

/// `D₀(R) = ⌊2R²⌋ + 1`.
pub fn d0_threshold(r: f64) -> i64 {
    (2.0 * r * r).floor() as i64 + 1
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || r > MAX_RADIUS {
        return Err(Error::SizeGuard(format!("ball radius {r} outside (0, {MAX_RADIUS}]")));
    }
    Ok(())
}

/// Elements of `O_E` (rational ones included) with `‖x‖_r ≤ r`, all certain.
fn ball_in_field(d: i64, r: f64) -> Vec<QuadInteger> {
    let lat = IdealLattice::ring_of_integers(d, 1.0);
    let mut out: Vec<QuadInteger> = lat
        .short_vectors(r * r)
        .into_iter()
        .filter(|(_, v)| v.hi() <= r * r)
        .map(|((m, n), _)| lat.element(m, n))
        .collect();
    out.push(QuadInteger::ZERO);
    out.sort();
    out
}

/// Rational integers `n` with `‖n‖_r = √2·|n| ≤ r`.
fn rational_ball(r: f64) -> Vec<i64> {
    let m = (r / std::f64::consts::SQRT_2).floor() as i64;
    // guard the boundary exactly: 2n² ≤ r²
    let m = (0..=m + 1).rev().find(|&n| (2 * n * n) as f64 <= r * r).unwrap_or(0);
    (-m..=m).collect()
}

fn fields_up_to(d0: i64, sig: Signature) -> Result<Vec<i64>> {
    if sig == Signature::REAL_QUADRATIC {
        list_fundamental_discriminants(5, d0, sig)
    } else {
        list_fundamental_discriminants(-d0, -3, sig)
    }
}

/// All of `Λ ∩ B_R` for `Λ = ℤ ∪ ⋃_{|D_E| ≤ D₀} O_E`, each nonrational element
/// tagged with its field. Sorted, rational integers listed once.
pub fn enum_integers_in_ball(d0: i64, r: f64, sig: Signature) -> Result<Vec<TaggedInteger>> {
    check_radius(r)?;
    if !(1..=MAX_D0).contains(&d0) {
        return Err(Error::SizeGuard(format!("D0 = {d0} outside [1, {MAX_D0}]")));
    }
    let mut out: Vec<TaggedInteger> = rational_ball(r).into_iter().map(TaggedInteger::rational).collect();
    for d in fields_up_to(d0, sig)? {
        if min_nonrational_norm(d, r).is_none() {
            continue;
        }
        out.extend(
            ball_in_field(d, r)
                .into_iter()
                .filter(|x| !x.is_rational())
                .map(|value| TaggedInteger { home_disc: Some(d), value }),
        );
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassKind {
    #[serde(rename = "reg.ell")]
    RegEll,
    #[serde(rename = "reg.split")]
    RegSplit,
    #[serde(rename = "unip")]
    Unip,
}

impl std::fmt::Display for ClassKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassKind::RegEll => "reg.ell",
            ClassKind::RegSplit => "reg.split",
            ClassKind::Unip => "unip",
        })
    }
}

/// The monic polynomial `X² + aX + b` with `a, b` in the field of
/// discriminant `home_disc` (or in `ℤ`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PolynomialClass {
    pub home_disc: Option<i64>,
    pub a: QuadInteger,
    pub b: QuadInteger,
}

impl PolynomialClass {
    pub fn rational(a: i64, b: i64) -> Self {
        PolynomialClass { home_disc: None, a: QuadInteger::rational(a), b: QuadInteger::rational(b) }
    }

    /// `a² − 4b`, read in the field of discriminant `d`.
    pub fn discriminant(&self, d: i64) -> QuadInteger {
        self.a.mul(&self.a, d).sub(&self.b.scale(4))
    }

    /// The coefficients lie in the field of discriminant `d`.
    pub fn lies_in(&self, d: i64) -> bool {
        self.home_disc.is_none_or(|h| h == d)
    }
}

impl std::fmt::Display for PolynomialClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "X^2 + ({})X + ({})", self.a, self.b)?;
        if let Some(h) = self.home_disc {
            write!(f, " over D={h}")?;
        }
        Ok(())
    }
}

/// Trace and determinant radii for matrices with `‖g_ij − δ_ij‖_r ≤ R`.
///
/// `‖1‖_r = √2`, so diagonal entries have norm at most `√2 + R`; the norm is
/// submultiplicative, giving `‖tr‖ ≤ 2(√2 + R)` and `‖det‖ ≤ (√2 + R)² + R²`.
pub fn coefficient_radii(r: f64) -> (f64, f64) {
    let diag = std::f64::consts::SQRT_2 + r;
    (2.0 * diag, diag * diag + r * r)
}

/// Units of `O_E` (rational ones included) with `‖u‖_r ≤ r`.
fn units_in_ball(d: i64, r: f64) -> Vec<QuadInteger> {
    let mut units = vec![QuadInteger::ONE, QuadInteger::ONE.neg()];
    if d < 0 {
        // only D = −3, −4 have nonrational roots of unity, all of norm √2
        if roots_of_unity(d) > 2 && 2.0 <= r * r {
            units.extend(ball_in_field(d, std::f64::consts::SQRT_2).into_iter().filter(|x| x.norm(d) == 1 && !x.is_rational()));
        }
    } else {
        let u = fundamental_unit(d);
        let (Ok(x), Ok(y)) = (i32::try_from(&u.x), i32::try_from(&u.y)) else {
            // ε > 2³⁰ lies far outside any admissible ball
            return sorted(units);
        };
        let (x, y) = (x as i64, y as i64);
        // ε = (x + y√D)/2, conjugate ±1/ε
        let eps = QuadInteger::from_half_coords(x, y, d).expect("unit lies in O_F");
        let lat = IdealLattice::ring_of_integers(d, 1.0);
        let inv = if u.norm == 1 { eps.conj(d) } else { eps.conj(d).neg() };
        for base in [eps, inv] {
            let mut p = base;
            while lat.sq_norm(&p).hi() <= r * r {
                units.push(p);
                units.push(p.neg());
                // both factors lie in the ball, so the product stays small
                p = p.mul(&base, d);
            }
        }
    }
    sorted(units)
}

fn sorted(mut v: Vec<QuadInteger>) -> Vec<QuadInteger> {
    v.sort();
    v.dedup();
    v
}

/// `Σ₀` for test functions supported in `‖g_ij − δ_ij‖_r ≤ R`.
///
/// The linear coefficient ranges over `Λ` in the trace ball. The constant
/// term is `1` for `SL₂` and a unit in the determinant ball for `GL₂`; both
/// coefficients lie in a common field.
pub fn sigma0_set(r: f64, g: GroupKind, sig: Signature) -> Result<Vec<PolynomialClass>> {
    check_radius(r)?;
    let (rt, rd) = coefficient_radii(r);
    let mut out = Vec::new();
    let rational_units = [1, -1];
    let consts: &[i64] = if g == GroupKind::SL2 { &rational_units[..1] } else { &rational_units };
    for a in rational_ball(rt) {
        for &b in consts {
            out.push(PolynomialClass::rational(a, b));
        }
    }
    // fields that carry a nonrational trace or a nonrational unit
    let d0 = match g {
        GroupKind::SL2 => d0_threshold(rt),
        GroupKind::GL2 if sig == Signature::REAL_QUADRATIC => d0_threshold(rt).max(d0_threshold(rd)),
        GroupKind::GL2 => d0_threshold(rt),
    };
    for d in fields_up_to(d0.min(MAX_D0), sig)? {
        let traces = if min_nonrational_norm(d, rt).is_some() {
            ball_in_field(d, rt)
        } else {
            rational_ball(rt).into_iter().map(QuadInteger::rational).collect()
        };
        let units = match g {
            GroupKind::SL2 => vec![QuadInteger::ONE],
            GroupKind::GL2 => units_in_ball(d, rd),
        };
        for a in &traces {
            for b in &units {
                if a.is_rational() && b.is_rational() {
                    continue;
                }
                out.push(PolynomialClass { home_disc: Some(d), a: *a, b: *b });
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Unipotent, regular split or regular elliptic over the field, or `None`
/// when the coefficients do not lie in `O_F`.
pub fn classify(inv: &FieldInvariants, p: &PolynomialClass) -> Option<ClassKind> {
    let d = inv.disc;
    if !p.lies_in(d) {
        return None;
    }
    let disc = p.discriminant(d);
    Some(if disc == QuadInteger::ZERO {
        ClassKind::Unip
    } else if disc.sqrt(d).is_some() {
        ClassKind::RegSplit
    } else {
        ClassKind::RegEll
    })
}

/// `Σ₀` restricted to the field, with each class's kind.
pub fn classify_all(inv: &FieldInvariants, sigma0: &[PolynomialClass]) -> Vec<(PolynomialClass, ClassKind)> {
    sigma0.iter().filter_map(|p| classify(inv, p).map(|k| (*p, k))).collect()
}

/// The smallest `D₀` for which `O_F ∩ B_R ⊆ Λ(D₀)`: `|D|` when `O_F` has a
/// nonrational element in the ball, else `0`.
pub fn required_d0(d: i64, r: f64) -> Result<i64> {
    check_radius(r)?;
    let nonrational = ball_in_field(d, r).iter().any(|x| !x.is_rational());
    Ok(if nonrational { d.abs() } else { 0 })
}

/// `O_F ∩ B_R ⊆ ℤ ∪ ⋃_{|D_E| ≤ D₀} O_E`, decided by enumerating the ball.
///
/// `computed` is the field's own requirement `required_d0`, `bound` is `D₀`.
pub fn verify_inclusion(inv: &FieldInvariants, r: f64, d0: i64) -> Result<BoundReport> {
    use crate::certified::CertifiedReal;
    let need = required_d0(inv.disc, r)?;
    let rep = BoundReport::compare(
        "sigma0_inclusion",
        inv.disc,
        None,
        CertifiedReal::from_int(need),
        CertifiedReal::from_int(d0),
    );
    Ok(if r * r < 2.0 { rep.flag("vacuous") } else if need == 0 { rep.flag("rational-only") } else { rep })
}

/// If `O_F ∖ ℤ` meets `B_R` then `|D| ≤ 2R² + 1`.
pub fn threshold_law(inv: &FieldInvariants, r: f64) -> Result<BoundReport> {
    use crate::certified::CertifiedReal;
    let need = required_d0(inv.disc, r)?;
    let bound = CertifiedReal::exact(2.0 * r * r + 1.0);
    Ok(BoundReport::compare("sigma0_threshold", inv.disc, None, CertifiedReal::from_int(need), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::field_invariants;

    const IMAG: Signature = Signature::IMAGINARY_QUADRATIC;

    #[test]
    fn ball_enumeration() {
        // 0, ±1, ±i and the four nonrational sixth roots of unity
        let v = enum_integers_in_ball(10, 1.5, IMAG).unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v.iter().filter(|x| x.home_disc == Some(-4)).count(), 2);
        assert_eq!(v.iter().filter(|x| x.home_disc == Some(-3)).count(), 4);
        // ‖±1‖ = √2 > 1.2
        assert_eq!(enum_integers_in_ball(3, 1.2, IMAG).unwrap(), vec![TaggedInteger::rational(0)]);
        assert_eq!(enum_integers_in_ball(50, 0.9, Signature::REAL_QUADRATIC).unwrap().len(), 1);
        assert!(enum_integers_in_ball(10, 1e6, IMAG).is_err());
    }

    #[test]
    fn ball_matches_brute_force() {
        for d in [-3i64, -4, -7, -15, 5, 8, 13] {
            let r = 4.0;
            let lat = IdealLattice::ring_of_integers(d, 1.0);
            let mut brute = Vec::new();
            for m in -20..=20 {
                for n in -20..=20 {
                    let x = QuadInteger::new(m, n);
                    if lat.sq_norm(&x).value <= r * r {
                        brute.push(x);
                    }
                }
            }
            brute.sort();
            assert_eq!(ball_in_field(d, r), brute, "D={d}");
        }
    }

    #[test]
    fn classification() {
        let f5 = field_invariants(5).unwrap();
        let f4 = field_invariants(-4).unwrap();
        assert_eq!(classify(&f5, &PolynomialClass::rational(-3, 1)), Some(ClassKind::RegSplit));
        assert_eq!(classify(&f4, &PolynomialClass::rational(-2, 1)), Some(ClassKind::Unip));
        assert_eq!(classify(&f4, &PolynomialClass::rational(1, 1)), Some(ClassKind::RegEll));
        // X² + 1 splits over ℚ(i)
        assert_eq!(classify(&f4, &PolynomialClass::rational(0, 1)), Some(ClassKind::RegSplit));
        let foreign = PolynomialClass { home_disc: Some(-3), a: QuadInteger::OMEGA, b: QuadInteger::ONE };
        assert_eq!(classify(&f4, &foreign), None);
    }

    #[test]
    fn sigma0_shapes() {
        let tiny = sigma0_set(0.01, GroupKind::SL2, IMAG).unwrap();
        // trace ball radius 2√2 + 0.02: a ∈ {−2..2} over ℚ, plus Z[i], Z[ω] traces
        assert!(tiny.contains(&PolynomialClass::rational(-2, 1)));
        assert!(tiny.contains(&PolynomialClass::rational(2, 1)));
        assert!(tiny.iter().all(|p| p.b == QuadInteger::ONE));
        let sl = sigma0_set(1.0, GroupKind::SL2, IMAG).unwrap();
        let gl = sigma0_set(1.0, GroupKind::GL2, IMAG).unwrap();
        assert!(gl.len() > sl.len());
        assert!(sl.iter().all(|p| gl.contains(p)));
        assert!(gl.contains(&PolynomialClass::rational(0, -1)));
        let real = sigma0_set(1.0, GroupKind::GL2, Signature::REAL_QUADRATIC).unwrap();
        assert!(real.iter().any(|p| p.home_disc == Some(5) && !p.b.is_rational()));
    }

    #[test]
    fn inclusion_reports() {
        let r = verify_inclusion(&field_invariants(-163).unwrap(), 5.0, 51).unwrap();
        assert!(r.pass && r.computed.value == 0.0);
        let r = verify_inclusion(&field_invariants(-4).unwrap(), 5.0, 51).unwrap();
        assert!(r.pass && r.computed.value == 4.0);
        assert!(!verify_inclusion(&field_invariants(-4).unwrap(), 5.0, 3).unwrap().pass);
        assert!(verify_inclusion(&field_invariants(-7).unwrap(), 1.0, 1).unwrap().has_flag("vacuous"));
        assert_eq!(d0_threshold(5.0), 51);
        for d in [-3i64, -4, -51, -52, 5, 13, 53] {
            assert!(threshold_law(&field_invariants(d).unwrap(), 5.0).unwrap().pass);
        }
    }
}
