//! Certified values of `L(s, χ_D)` and of the Dedekind zeta function of a
//! quadratic field, `ζ_F(s) = ζ(s)·L(s, χ_D)`.
//!
//! At `s = 1` only closed finite character sums are used. For `s ≥ 3/2` the
//! Dirichlet series is truncated with an explicit tail bound; at `s = 2` and
//! larger conductors the Hurwitz decomposition `L(2,χ) = q⁻² Σ χ(a) ψ₁(a/q)`
//! is used instead, since its cost is linear in `q` rather than in `√(q/tol)`.

use crate::certified::CertifiedReal;
use crate::error::{Error, Result};
use crate::fields::{require_fundamental, roots_of_unity, CharacterTable};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest truncation point the series path will accept.
const MAX_TERMS: u64 = 1 << 28;

/// Conductors above this use the trigamma path at `s = 2`.
const HURWITZ_CUTOFF: u64 = 32;

/// Compensated (Neumaier) summation that also accumulates `Σ |x|`.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Rounding error of the compensated sum (generous).
    fn rounding(&self) -> f64 {
        4.0 * f64::EPSILON * self.value().abs() + 1e-30 + self.abs * f64::EPSILON * f64::EPSILON * 64.0
    }
}

/// `ζ(2) = π²/6`.
pub fn zeta_2() -> CertifiedReal {
    CertifiedReal::pi().powi(2) / CertifiedReal::exact(6.0)
}

/// `ζ(4) = π⁴/90`.
pub fn zeta_4() -> CertifiedReal {
    CertifiedReal::pi().powi(4) / CertifiedReal::exact(90.0)
}

/// `L(1, χ_D)` from the finite formulas.
///
/// `D < 0`: `−π |D|^{−3/2} Σ a χ(a)`, an exact integer sum.
/// `D > 0`: `−|D|^{−1/2} Σ χ(a) log sin(πa/D)`.
pub fn l_at_one(d: i64) -> Result<CertifiedReal> {
    require_fundamental(d)?;
    let table = CharacterTable::new(d);
    let q = table.modulus();
    let qc = CertifiedReal::from_int(q as i64);
    if d < 0 {
        let s: i64 = table.iter().map(|(a, c)| a as i64 * c as i64).sum();
        Ok(CertifiedReal::pi() * CertifiedReal::from_int(-s) / (qc * qc.sqrt()))
    } else {
        let mut acc = Accumulator::default();
        let mut err = 0.0;
        let step = std::f64::consts::PI / q as f64;
        for (a, c) in table.iter().take_while(|&(a, _)| 2 * a < q) {
            if c != 0 {
                let ls = (step * a as f64).sin().ln();
                acc.add(c as f64 * ls);
                // absolute error of log sin: a few ulps relative in sin
                err += 8.0 * f64::EPSILON * (1.0 + ls.abs());
            }
        }
        let sum = CertifiedReal::new(-2.0 * acc.value(), 2.0 * (err + acc.rounding()));
        Ok(sum / qc.sqrt())
    }
}

/// `w·√|D|·L(1,χ_D)/(2π)`, which is the class number of an imaginary field.
pub fn analytic_class_number(d: i64) -> Result<CertifiedReal> {
    if d >= 0 {
        return Err(Error::domain("the analytic class number needs D < 0"));
    }
    let l1 = l_at_one(d)?;
    let w = CertifiedReal::from_int(roots_of_unity(d) as i64);
    Ok(w * CertifiedReal::from_int(-d).sqrt() * l1 / (CertifiedReal::pi() * 2.0))
}

/// `Σ_{n>N} χ(n) n^{−s}` is at most `min(N^{1−s}/(s−1), q·N^{−s})` in size.
///
/// The second bound is partial summation with `|Σ_{M<n≤x} χ(n)| ≤ q/2`.
pub fn series_tail_bound(q: u64, s: f64, n: u64) -> f64 {
    let n = n as f64;
    (n.powf(1.0 - s) / (s - 1.0)).min(q as f64 * n.powf(-s))
}

/// The truncated series `Σ_{n≤N} χ(n) n^{−s}` with its tail folded into the error.
pub fn dirichlet_series_partial(table: &CharacterTable, s: f64, n: u64) -> CertifiedReal {
    let mut acc = Accumulator::default();
    let mut err = 0.0;
    for k in 1..=n {
        let c = table.get(k);
        if c != 0 {
            let t = (k as f64).powf(-s);
            acc.add(c as f64 * t);
            err += 4.0 * f64::EPSILON * t;
        }
    }
    CertifiedReal::new(acc.value(), err + acc.rounding() + series_tail_bound(table.modulus(), s, n))
}

/// `ψ₁(x)` for `x > 0`, with an absolute error bound.
pub fn trigamma(x: f64) -> (f64, f64) {
    assert!(x > 0.0);
    let mut acc = 0.0;
    let mut y = x;
    let mut steps = 0.0;
    while y < 10.0 {
        acc += 1.0 / (y * y);
        y += 1.0;
        steps += 1.0;
    }
    let r = 1.0 / y;
    let r2 = r * r;
    // 1/y + 1/2y² + Σ B_2k / y^{2k+1}
    let tail = r * (1.0 + r * (0.5 + r * (1.0 / 6.0 + r2 * (-1.0 / 30.0 + r2 * (1.0 / 42.0 + r2 * (-1.0 / 30.0))))));
    let v = acc + tail;
    let remainder = 5.0 / 66.0 * r2.powi(5) * r;
    (v, remainder + (steps + 12.0) * 2.0 * f64::EPSILON * v)
}

fn l2_hurwitz(table: &CharacterTable) -> CertifiedReal {
    let q = table.modulus();
    let qf = q as f64;
    let mut acc = Accumulator::default();
    let mut err = 0.0;
    for (a, c) in table.iter() {
        if c != 0 {
            let (v, e) = trigamma(a as f64 / qf);
            acc.add(c as f64 * v);
            // a/q is rounded; ψ₁' ≈ −2/x³ amplifies that by ≈ 2ψ₁
            err += e + 4.0 * f64::EPSILON * v;
        }
    }
    let sum = CertifiedReal::new(acc.value(), err + acc.rounding());
    sum / CertifiedReal::exact(qf * qf).widen(qf * qf * f64::EPSILON)
}

/// `L(s, χ_D)` with `|value − L(s,χ)| ≤ abs_error ≤ tol`.
pub fn dirichlet_l(d: i64, s: f64, tol: f64) -> Result<CertifiedReal> {
    require_fundamental(d)?;
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if s == 1.0 {
        return l_at_one(d);
    }
    if !(s >= 1.5) {
        return Err(Error::UnsupportedRegime(format!(
            "s = {s}: only s = 1 and s ≥ 3/2 are certified"
        )));
    }
    let table = CharacterTable::new(d);
    let q = table.modulus();
    let out = if s == 2.0 && q > HURWITZ_CUTOFF {
        l2_hurwitz(&table)
    } else {
        let mut n = 1024u64;
        while series_tail_bound(q, s, n) > tol / 2.0 {
            n *= 2;
            if n > MAX_TERMS {
                return Err(Error::SizeGuard(format!(
                    "L({s}, χ_{d}) to {tol:e} needs more than {MAX_TERMS} terms"
                )));
            }
        }
        dirichlet_series_partial(&table, s, n)
    };
    if out.abs_error > tol {
        return Err(Error::Consistency(format!(
            "L({s}, χ_{d}) error {:e} exceeds tolerance {tol:e}",
            out.abs_error
        )));
    }
    Ok(out)
}

/// `ζ_F(2) = ζ(2)·L(2, χ_D)`.
pub fn zeta_f_at_2(d: i64, tol: f64) -> Result<CertifiedReal> {
    let z = zeta_2();
    let l = dirichlet_l(d, 2.0, tol / (2.0 * z.value))?;
    Ok(z * l)
}

/// `res_{s=1} ζ_F(s) = L(1, χ_D)`.
pub fn residue_zeta_f(d: i64) -> Result<CertifiedReal> {
    dirichlet_l(d, 1.0, 1e-12)
}

/// `∏_{p ≤ pmax} (1 − χ(p) p^{−2})^{−1}`, enclosing `L(2, χ_D)` once the
/// truncation error `|log L − log P| ≤ (1/pmax)/(1 − pmax^{−2})` is included.
pub fn euler_product_l2(d: i64, pmax: u64) -> Result<CertifiedReal> {
    require_fundamental(d)?;
    let mut sieve = vec![true; pmax as usize + 1];
    let mut log_p = Accumulator::default();
    let mut err = 0.0;
    for p in 2..=pmax as usize {
        if !sieve[p] {
            continue;
        }
        let mut j = p * p;
        while j <= pmax as usize {
            sieve[j] = false;
            j += p;
        }
        let c = crate::fields::kronecker_chi(d, p as u64)?;
        if c != 0 {
            let t = -(-(c as f64) / (p * p) as f64).ln_1p();
            log_p.add(t);
            err += 4.0 * f64::EPSILON * t.abs();
        }
    }
    let pm = pmax as f64;
    let trunc = (1.0 / pm) / (1.0 - 1.0 / (pm * pm));
    Ok(CertifiedReal::new(log_p.value(), err + log_p.rounding() + trunc).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;

    #[test]
    fn values_at_one() {
        let l = dirichlet_l(-4, 1.0, 1e-12).unwrap();
        assert!(l.contains(std::f64::consts::FRAC_PI_4) && l.abs_error <= 1e-12);
        assert!((residue_zeta_f(5).unwrap().value - 0.4304089410).abs() < 1e-10);
        // h(−8) = 1, w = 2: 2π/(2√8)
        let expected = std::f64::consts::PI / 8f64.sqrt();
        assert!((residue_zeta_f(-8).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn values_at_two() {
        let l = dirichlet_l(-4, 2.0, 1e-9).unwrap();
        assert!(l.abs_error <= 1e-9 && (l.value - CATALAN).abs() <= l.abs_error + 1e-15);
        // 4π²/(25√5)
        let exact5 = 4.0 * std::f64::consts::PI.powi(2) / (25.0 * 5f64.sqrt());
        let l = dirichlet_l(5, 2.0, 1e-9).unwrap();
        assert!((l.value - exact5).abs() <= l.abs_error + 1e-15);
        assert!((l.value - 0.7062114033).abs() < 1e-9);
    }

    #[test]
    fn zeta_values() {
        let z = zeta_f_at_2(-4, 1e-9).unwrap();
        assert!((z.value - 1.5067030099).abs() < 1e-9);
        let z = zeta_f_at_2(-3, 1e-9).unwrap();
        assert!((z.value - 1.2851909555).abs() < 1e-9);
        let z = zeta_f_at_2(5, 1e-9).unwrap();
        assert!((z.value - 1.1616711956).abs() < 1e-9);
    }

    #[test]
    fn unsupported_strip() {
        assert!(matches!(dirichlet_l(-4, 1.2, 1e-9), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(dirichlet_l(-4, 0.5, 1e-9), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn series_and_hurwitz_agree() {
        // exact odd closed form for D = −3: L(2) via series at small q vs ψ₁ sum
        for d in [-3i64, -4, 5, 8, 12, -7, 13, 17, -20, 21] {
            let table = CharacterTable::new(d);
            let a = l2_hurwitz(&table);
            let b = dirichlet_series_partial(&table, 2.0, 1 << 20);
            assert!(a.overlaps(&b), "D={d}: {a} vs {b}");
            assert!(a.abs_error < 1e-12);
        }
    }

    #[test]
    fn tail_is_monotone() {
        let table = CharacterTable::new(-23);
        let mut prev = dirichlet_series_partial(&table, 2.0, 100);
        for n in [200u64, 400, 1600, 10_000, 100_000] {
            let next = dirichlet_series_partial(&table, 2.0, n);
            assert!(prev.lo() <= next.value && next.value <= prev.hi(), "n={n}");
            prev = next;
        }
    }

    #[test]
    fn euler_product_encloses() {
        for d in [-4i64, -3, 5, -23, 229, -1003, 4 * 1001] {
            if !crate::fields::is_fundamental(d) {
                continue;
            }
            let e = euler_product_l2(d, 10_000).unwrap();
            let l = dirichlet_l(d, 2.0, 1e-9).unwrap();
            assert!(e.overlaps(&l), "D={d}");
        }
    }

    #[test]
    fn trigamma_known_values() {
        let (v, e) = trigamma(1.0);
        assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() <= e + 1e-15);
        let (v, e) = trigamma(0.5);
        assert!((v - std::f64::consts::PI.powi(2) / 2.0).abs() <= e + 1e-15);
    }
}
