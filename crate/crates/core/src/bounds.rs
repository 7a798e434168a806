//! Explicit upper bounds for the non-central geometric terms and the
//! continuous-spectrum term, each checked against the decay shape it is
//! supposed to have in `|D|`.
//!
//! Every geometric contribution is reported already divided by
//! `vol(G(F)\G(A)¹)`. The archimedean test function is the indicator of
//! `‖g_ij − δ_ij‖_r ≤ R`, so its integrals reduce to ball volumes: the set
//! `‖x‖_r ≤ R` in `F ⊗ ℝ` has volume `πR²` for both signatures.

use serde::{Deserialize, Serialize};

use crate::bt_orbital::{biquadratic_subfields, global_elliptic_bound, QuarticData};
use crate::certified::CertifiedReal;
use crate::error::{Error, Result};
use crate::fields::{FieldInvariants, Signature};
use crate::lattices::minkowski_embed;
use crate::lfun::zeta_4;
use crate::report::BoundReport;
use crate::sigma::{coefficient_radii, sigma0_set, ClassKind, PolynomialClass};
use crate::volumes::{nu_f, vol_kf, vol_quotient, GroupKind};

/// Default regularity constant `ρ`.
pub const DEFAULT_RHO: f64 = 8.0;
/// `ε` in the spectral exponent `−δ_G + ε`.
pub const SPECTRAL_EPSILON: f64 = 0.05;
/// Fields used to calibrate the geometric-remainder constant.
pub const CALIBRATION_FIELDS: usize = 10;
/// Default size limit for quadratic subfields of `F(γ)` whose `L(1, χ)` is
/// evaluated exactly in the elliptic term.
pub const DEFAULT_EXACT_LIMIT: u64 = 50_000;

/// `T ∈ 𝔞⁺` through `ϖ(T)`; `α(T) = 2ϖ(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationParam {
    pub varpi: f64,
}

impl TruncationParam {
    pub fn from_alpha(alpha: f64) -> Self {
        TruncationParam { varpi: alpha / 2.0 }
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.varpi
    }

    pub fn is_regular(&self, abs_disc: f64, rho: f64) -> bool {
        self.alpha() >= regular_alpha(abs_disc, rho)
    }
}

/// `ρ·max{1, log|D|}`.
pub fn regular_alpha(abs_disc: f64, rho: f64) -> f64 {
    rho * abs_disc.ln().max(1.0)
}

/// The least regular `T`: `α(T) = ρ·max{1, log|D|}`.
pub fn truncation_threshold(inv: &FieldInvariants, rho: f64) -> Result<TruncationParam> {
    if !(rho > 0.0) {
        return Err(Error::Config(format!("ρ must be positive, got {rho}")));
    }
    Ok(TruncationParam::from_alpha(regular_alpha(inv.abs_disc(), rho)))
}

fn check_regular(inv: &FieldInvariants, t: TruncationParam, rho: f64) -> Result<()> {
    let required = regular_alpha(inv.abs_disc(), rho);
    if t.alpha() < required {
        return Err(Error::NotRegular { alpha: t.alpha(), required });
    }
    Ok(())
}

/// `δ_G(ϖ(T) + log‖(1,x)‖_{A_F})`.
pub fn torus_truncated_bound(t: TruncationParam, g: GroupKind, x_norm: f64) -> Result<f64> {
    if !(x_norm >= 1.0) {
        return Err(Error::domain(format!("‖(1,x)‖ = {x_norm} < 1")));
    }
    Ok(g.delta_torus() * (t.varpi + x_norm.ln()))
}

/// `vol{x ∈ F ⊗ ℝ : ‖x‖_r ≤ R} = πR²`.
pub fn ball_volume(r: f64) -> CertifiedReal {
    CertifiedReal::pi() * CertifiedReal::rounded(r * r)
}

/// `ζ(4)^{−d}`, the constant of the quotient-measure bounds.
fn zeta4_factor() -> CertifiedReal {
    CertifiedReal::exact(1.0) / zeta_4().powi(2)
}

/// Everything a scan shares across fields: `Σ₀` and the field-independent
/// constants derived from it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundContext {
    pub group: GroupKind,
    pub signature: Signature,
    pub radius: f64,
    pub sigma0: Vec<PolynomialClass>,
    /// Largest number of `Σ₀` classes lying in any single field.
    pub max_classes: usize,
    /// Largest number of unipotent classes `(X − z)²` in any single field.
    pub max_unipotent: usize,
    pub exact_limit: u64,
    pub quartics: Vec<QuarticData>,
}

impl BoundContext {
    pub fn new(group: GroupKind, signature: Signature, radius: f64) -> Result<Self> {
        let sigma0 = sigma0_set(radius, group, signature)?;
        let per_field = |pred: &dyn Fn(&PolynomialClass) -> bool| {
            let rational = sigma0.iter().filter(|p| p.home_disc.is_none() && pred(p)).count();
            let mut homes: Vec<i64> = sigma0.iter().filter_map(|p| p.home_disc).collect();
            homes.dedup();
            let best = homes
                .iter()
                .map(|h| sigma0.iter().filter(|p| p.home_disc == Some(*h) && pred(p)).count())
                .max()
                .unwrap_or(0);
            rational + best
        };
        // (X − z)² has a = −2z, b = z²
        let is_square = |p: &PolynomialClass| {
            let d = p.home_disc.unwrap_or(-4);
            p.discriminant(d) == crate::fields::QuadInteger::ZERO
        };
        Ok(BoundContext {
            group,
            signature,
            radius,
            max_classes: per_field(&|_| true),
            max_unipotent: per_field(&is_square),
            sigma0,
            exact_limit: DEFAULT_EXACT_LIMIT,
            quartics: Vec::new(),
        })
    }

    pub fn with_quartics(mut self, q: Vec<QuarticData>) -> Self {
        self.quartics = q;
        self
    }

    pub fn with_exact_limit(mut self, limit: u64) -> Self {
        self.exact_limit = limit;
        self
    }

    /// `Σ₀(F)` with kinds.
    pub fn classes(&self, inv: &FieldInvariants) -> Vec<(PolynomialClass, ClassKind)> {
        crate::sigma::classify_all(inv, &self.sigma0)
    }

    /// `Δ_max = R_tr² + 4R_det`, bounding `|a_v|² + 4|b_v|` at every place.
    pub fn delta_max(&self) -> f64 {
        let (rt, rd) = coefficient_radii(self.radius);
        rt * rt + 4.0 * rd
    }

    /// Field-independent constant of the split bound:
    /// `2ζ(4)^{−2}·n·πR²·(1 + log Δ_max)·(1 + log Δ_max + log(1 + R²Δ_max))`.
    pub fn split_constant(&self) -> CertifiedReal {
        let dm = self.delta_max();
        let k = 1.0 + dm.ln() + (1.0 + self.radius * self.radius * dm).ln();
        zeta4_factor()
            * ball_volume(self.radius)
            * CertifiedReal::rounded(2.0 * self.max_classes as f64 * (1.0 + dm.ln()) * k).widen(1e-12 * k)
    }

    /// `c₂ = n_z(2R)^{2d}(1 + 2d·log⁺R)/β_G` for `n_z` central elements.
    pub fn unip_c2(&self, n_z: usize) -> CertifiedReal {
        let r = self.radius;
        let v = n_z as f64 * (2.0 * r).powi(4) * (1.0 + 4.0 * r.ln().max(0.0)) / self.group.beta_g();
        CertifiedReal::rounded(v).widen(4.0 * f64::EPSILON * v)
    }

    fn quartic_for(&self, inv: &FieldInvariants, poly: &PolynomialClass) -> Option<&QuarticData> {
        let delta = poly.discriminant(inv.disc);
        if !delta.is_rational() {
            return None;
        }
        let sub = biquadratic_subfields(inv.disc, delta.a)?;
        let disc: i64 = sub.iter().map(|x| x.abs()).product();
        let r2 = if sub.iter().any(|x| *x < 0) { 2 } else { 0 };
        self.quartics.iter().find(|q| q.disc.abs() == disc && q.r2 == r2)
    }
}

/// `(1 + log|s|_r)·πR²·K(s)` for `γ₁ − γ₂ = s`, where `K(s)` bounds
/// `1 + Σ_{v|∞} |log‖(|s|_v, |x|_v)‖_v|` on the ball `‖x‖_r ≤ R`.
pub fn split_class_term(d: i64, s: &crate::fields::QuadInteger, r: f64) -> CertifiedReal {
    let norm = (s.norm(d) as f64).abs();
    let emb = minkowski_embed(d, s);
    let mut k = 1.0;
    for x in &emb.real {
        let a = x.abs();
        k += a.ln().abs() + 0.5 * (1.0 + r * r / (a * a)).ln();
    }
    for (re, im) in &emb.complex {
        let a2 = re * re + im * im;
        k += a2.ln().abs() + (1.0 + r * r / (2.0 * a2)).ln();
    }
    let v = (1.0 + norm.ln()) * k;
    ball_volume(r) * CertifiedReal::rounded(v).widen(1e-12 * v)
}

/// `Σ_{δ ∈ Σ₀'(F)_{reg.split}} split_class_term`.
pub fn reg_split_sum(inv: &FieldInvariants, classes: &[PolynomialClass], r: f64) -> Result<CertifiedReal> {
    let d = inv.disc;
    let mut total = CertifiedReal::exact(0.0);
    for p in classes {
        let s = p
            .discriminant(d)
            .sqrt(d)
            .ok_or_else(|| Error::domain(format!("{p} is not split over D={d}")))?;
        total = total + split_class_term(d, &s, r);
    }
    Ok(total)
}

/// `res/(|D|ζ_F(2))` and `res/(|D|^{1/2}ζ_F(2))`.
fn measure_ratio(inv: &FieldInvariants, half: bool) -> CertifiedReal {
    let dd = CertifiedReal::from_int(inv.disc.abs());
    inv.residue() / (if half { dd.sqrt() } else { dd } * inv.zeta2)
}

fn log_d(inv: &FieldInvariants) -> CertifiedReal {
    CertifiedReal::from_int(inv.disc.abs()).ln()
}

/// The regular split contribution `2ϖ(T)·Σ·res/(|D|ζ_F(2))` against
/// `C_split·|D|^{−1}(log|D|)^{d−1}ϖ(T)`.
pub fn reg_split_bound(inv: &FieldInvariants, t: TruncationParam, rho: f64, ctx: &BoundContext) -> Result<BoundReport> {
    check_regular(inv, t, rho)?;
    let g = Some(ctx.group);
    if inv.disc.abs() < 5 {
        return Ok(BoundReport::out_of_domain("reg_split", inv.disc, g));
    }
    let split: Vec<PolynomialClass> =
        ctx.classes(inv).into_iter().filter(|(_, k)| *k == ClassKind::RegSplit).map(|(p, _)| p).collect();
    let varpi = CertifiedReal::rounded(t.varpi);
    let computed = reg_split_sum(inv, &split, ctx.radius)? * varpi * 2.0 * measure_ratio(inv, false);
    let bound = ctx.split_constant() * log_d(inv) * varpi / CertifiedReal::from_int(inv.disc.abs());
    let rep = BoundReport::compare("reg_split", inv.disc, g, computed, bound);
    Ok(if split.is_empty() { rep.flag("vacuous") } else { rep })
}

/// The non-central unipotent contribution `c₂ϖ(T)·res/(|D|^{1/2}ζ_F(2))`
/// against `c₂(n_max)ζ(4)^{−2}|D|^{−1/2}(log|D|)^{d−1}ϖ(T)`.
///
/// `c₂ϖ` dominates the exact interval length `ϖ + 2d log R` once `ϖ ≥ 1`.
pub fn unip_bound(inv: &FieldInvariants, t: TruncationParam, rho: f64, ctx: &BoundContext) -> Result<BoundReport> {
    check_regular(inv, t, rho)?;
    let g = Some(ctx.group);
    if inv.disc.abs() < 5 {
        return Ok(BoundReport::out_of_domain("unip", inv.disc, g));
    }
    let n_z = ctx.classes(inv).iter().filter(|(_, k)| *k == ClassKind::Unip).count();
    let varpi = CertifiedReal::rounded(t.varpi);
    let computed = ctx.unip_c2(n_z) * varpi * measure_ratio(inv, true);
    let bound = ctx.unip_c2(ctx.max_unipotent) * zeta4_factor() * log_d(inv) * varpi
        / CertifiedReal::from_int(inv.disc.abs()).sqrt();
    Ok(BoundReport::compare("unip", inv.disc, g, computed, bound))
}

/// Sum of the regular elliptic terms over `Σ₀(F)_{reg.ell}` and the
/// per-class reports.
pub fn reg_ell_terms(inv: &FieldInvariants, ctx: &BoundContext) -> Result<(CertifiedReal, Vec<BoundReport>)> {
    let mut total = CertifiedReal::exact(0.0);
    let mut reports = Vec::new();
    for (p, k) in ctx.classes(inv) {
        if k != ClassKind::RegEll {
            continue;
        }
        let r = global_elliptic_bound(inv, ctx.group, &p, ctx.quartic_for(inv, &p), ctx.exact_limit)?;
        total = total + r.computed;
        reports.push(r);
    }
    Ok((total, reports))
}

/// One report for all elliptic classes of a field: sums of the computed
/// terms and of the bounds, passing iff every class passes.
pub fn aggregate_elliptic(disc: i64, g: GroupKind, per_class: &[BoundReport]) -> BoundReport {
    let zero = CertifiedReal::exact(0.0);
    let computed = per_class.iter().fold(zero, |a, r| a + r.computed);
    let bound = per_class.iter().fold(zero, |a, r| a + r.bound);
    let mut rep = BoundReport::compare("reg_ell", disc, Some(g), computed, bound);
    rep.pass = per_class.iter().all(|r| r.pass);
    let bound_only = per_class.iter().filter(|r| r.has_flag("bound-only")).count();
    if per_class.is_empty() {
        rep = rep.flag("vacuous");
    }
    if bound_only > 0 {
        rep = rep.flag(format!("bound-only:{bound_only}/{}", per_class.len()));
    }
    rep
}

/// The three non-central geometric contributions of one field, each divided
/// by `vol(G(F)\G(A)¹)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometricTerms {
    pub disc: i64,
    pub group: GroupKind,
    pub varpi: f64,
    pub reg_ell: CertifiedReal,
    pub reg_split: CertifiedReal,
    pub unip: CertifiedReal,
    /// Component reports (split, unipotent, and one per elliptic class).
    pub reports: Vec<BoundReport>,
}

impl GeometricTerms {
    pub fn total(&self) -> CertifiedReal {
        self.reg_ell + self.reg_split + self.unip
    }

    /// `|D|^{−1/2}(log|D|)^{2d}ϖ(T)`.
    pub fn shape(&self) -> CertifiedReal {
        let dd = CertifiedReal::from_int(self.disc.abs());
        dd.ln().powi(4) * CertifiedReal::rounded(self.varpi) / dd.sqrt()
    }
}

pub fn geometric_terms(inv: &FieldInvariants, t: TruncationParam, rho: f64, ctx: &BoundContext) -> Result<GeometricTerms> {
    let split = reg_split_bound(inv, t, rho, ctx)?;
    let unip = unip_bound(inv, t, rho, ctx)?;
    let (ell, per_class) = reg_ell_terms(inv, ctx)?;
    let ell_report = aggregate_elliptic(inv.disc, ctx.group, &per_class);
    let ell = ell / vol_quotient(ctx.group, inv);
    let value = |r: &BoundReport| if r.has_flag("out-of-domain") { CertifiedReal::exact(0.0) } else { r.computed };
    let out = GeometricTerms {
        disc: inv.disc,
        group: ctx.group,
        varpi: t.varpi,
        reg_ell: ell,
        reg_split: value(&split),
        unip: value(&unip),
        reports: Vec::new(),
    };
    Ok(GeometricTerms { reports: vec![split, unip, ell_report], ..out })
}

/// `C = max total/shape` over the `CALIBRATION_FIELDS` smallest `|D|`.
pub fn calibrate_constant(terms: &[GeometricTerms]) -> Result<f64> {
    let mut sorted: Vec<&GeometricTerms> = terms.iter().filter(|t| t.disc.abs() >= 5).collect();
    sorted.sort_by_key(|t| (t.disc.unsigned_abs(), t.disc));
    if sorted.len() < CALIBRATION_FIELDS {
        return Err(Error::domain(format!(
            "calibration needs {CALIBRATION_FIELDS} fields with |D| ≥ 5, got {}",
            sorted.len()
        )));
    }
    Ok(sorted[..CALIBRATION_FIELDS]
        .iter()
        .map(|t| t.total().hi() / t.shape().lo())
        .fold(0.0, f64::max))
}

/// `total ≤ C·|D|^{−1/2}(log|D|)^{2d}ϖ(T)`.
pub fn geometric_remainder(terms: &GeometricTerms, c: f64) -> BoundReport {
    let bound = terms.shape() * CertifiedReal::rounded(c);
    BoundReport::compare("geometric_remainder", terms.disc, Some(terms.group), terms.total(), bound)
}

/// Extrapolates a degree-one polynomial in `ϖ(T)` to `T = 0` from two
/// values, widening by `c₁|D|^{−1}e^{−α(T)/2}ϖ(T)` at the smaller `T`, and
/// compares with `a·|D|^{−1/2}(log|D|)^{2d+1}`.
pub fn interpolation_constant_report(
    disc: i64,
    points: [(TruncationParam, f64); 2],
    a: f64,
    c1: f64,
) -> Result<BoundReport> {
    let [(t1, y1), (t2, y2)] = points;
    if (t1.varpi - t2.varpi).abs() <= 1e-12 * t1.varpi.abs().max(t2.varpi.abs()) {
        return Err(Error::domain("interpolation needs two distinct truncation parameters"));
    }
    let slope = (y2 - y1) / (t2.varpi - t1.varpi);
    let intercept = y1 - slope * t1.varpi;
    let t = if t1.varpi < t2.varpi { t1 } else { t2 };
    let dd = disc.unsigned_abs() as f64;
    let radius = c1 * (-t.alpha() / 2.0).exp() * t.varpi / dd;
    let rounding = 8.0 * f64::EPSILON * (y1.abs() + y2.abs() + intercept.abs());
    let computed = CertifiedReal::new(intercept.abs(), rounding).widen(radius);
    let bound = CertifiedReal::rounded(a * dd.ln().powi(5) / dd.sqrt());
    Ok(BoundReport::compare("interpolation_constant", disc, None, computed, bound))
}

/// `h^{a_G}(1 + log|D|)·vol(K_f)/vol(G(F)\G(A)¹) ≤ ν_F^{−δ_G + ε}`.
pub fn spectral_remainder_bound(inv: &FieldInvariants, g: GroupKind) -> BoundReport {
    let h = CertifiedReal::from_int(inv.h as i64).powi(g.a_g());
    let one_log = log_d(inv) + CertifiedReal::exact(1.0);
    let computed = h * one_log * vol_kf(g, inv.disc).value() / vol_quotient(g, inv);
    let exponent = -g.delta_spectral() + SPECTRAL_EPSILON;
    let nu = nu_f(g, inv);
    // ν^e is monotone in ν; enclose it from the endpoints
    let (a, b) = (nu.lo().powf(exponent), nu.hi().powf(exponent));
    let mid = 0.5 * (a + b);
    let bound = CertifiedReal::new(mid, 0.5 * (a - b).abs() + 4.0 * f64::EPSILON * mid);
    BoundReport::compare("spectral_remainder", inv.disc, Some(g), computed, bound)
}

/// Least-squares line through `(log|D|, log y)`: `(slope, intercept)`.
/// Needs at least 10 samples spanning two decades of `|D|` (up to 1%).
pub fn decay_fit(samples: &[(i64, f64)]) -> Result<(f64, f64)> {
    if samples.len() < 10 {
        return Err(Error::domain(format!("decay fit needs 10 fields, got {}", samples.len())));
    }
    if samples.iter().any(|&(d, y)| d == 0 || !(y > 0.0)) {
        return Err(Error::domain("decay fit needs nonzero discriminants and positive values"));
    }
    let xs: Vec<f64> = samples.iter().map(|(d, _)| (d.unsigned_abs() as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, y)| y.ln()).collect();
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let decades = (hi - lo) / std::f64::consts::LN_10;
    if decades < 1.99 {
        return Err(Error::domain(format!("samples span {decades:.3} decades, need 2")));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// `decay_fit` of `total/ϖ(T)`.
pub fn decay_fit_terms(terms: &[GeometricTerms]) -> Result<(f64, f64)> {
    let samples: Vec<(i64, f64)> = terms.iter().map(|t| (t.disc, t.total().value / t.varpi)).collect();
    decay_fit(&samples)
}
