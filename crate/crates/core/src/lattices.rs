//! Ideal lattices `Λ_a = a_∞ Λ'_a` in `F ⊗ ℝ` under the Minkowski embedding.
//!
//! The quadratic form is `‖x‖²_r = Σ_real x_v² + 2 Σ_complex |x_v|²`. Writing
//! `x = (t + y√D)/2`, every lattice vector has
//!
//! ```text
//! ‖x‖²_r = (α·(t² + |D|y²) + β·2ty) / 4
//! ```
//!
//! with `α = s₁² + s₂²`, `β = (s₁² − s₂²)√D` for real fields and `α = 2s²`,
//! `β = 0` for imaginary ones, where the `s` are the archimedean scales. The
//! integer parts are evaluated exactly; only `α`, `β` carry rounding.
//!
//! `first_minimum` returns the squared norm, `count_ball` compares the
//! unsquared norm with `R`.

use num_integer::Integer;

use crate::certified::CertifiedReal;
use crate::error::{Error, Result};
use crate::fields::{kronecker_chi, QuadInteger};
use crate::report::BoundReport;

/// A point of `ℝ^{r1} × ℂ^{r2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiVector {
    pub real: Vec<f64>,
    pub complex: Vec<(f64, f64)>,
}

/// The embedding `x ↦ (σ_v(x))_v` with `√D ↦ +√D` (real) or `i√|D|` (complex).
pub fn minkowski_embed(d: i64, x: &QuadInteger) -> MinkowskiVector {
    let (t, y) = x.half_coords(d);
    let root = (d.abs() as f64).sqrt();
    if d > 0 {
        let (t, y) = (t as f64, y as f64 * root);
        MinkowskiVector { real: vec![(t + y) / 2.0, (t - y) / 2.0], complex: vec![] }
    } else {
        MinkowskiVector { real: vec![], complex: vec![(t as f64 / 2.0, y as f64 * root / 2.0)] }
    }
}

/// `‖v‖_r`.
pub fn r_norm(v: &MinkowskiVector) -> f64 {
    let real: f64 = v.real.iter().map(|x| x * x).sum();
    let complex: f64 = v.complex.iter().map(|(a, b)| a * a + b * b).sum();
    (real + 2.0 * complex).sqrt()
}

/// Hermite normal form of the subgroup of `ℤ²` spanned by `vecs`:
/// basis `(h, 0)`, `(x, y)` with `0 ≤ x < h`, `y > 0`.
fn hnf2(vecs: &[(i64, i64)]) -> Option<((i64, i64), (i64, i64))> {
    let (mut pa, mut pb) = (0i64, 0i64);
    let mut h = 0i64;
    for &(va, vb) in vecs {
        let e = pb.extended_gcd(&vb);
        if e.gcd == 0 {
            h = h.gcd(&pa).gcd(&va);
            continue;
        }
        let (g, s, t) = (e.gcd, e.x, e.y);
        h = h.gcd(&((vb / g) * pa - (pb / g) * va));
        pa = s * pa + t * va;
        pb = g;
    }
    if h == 0 || pb == 0 {
        return None;
    }
    if pb < 0 {
        pa = -pa;
        pb = -pb;
    }
    Some(((h.abs(), 0), (pa.rem_euclid(h.abs()), pb)))
}

/// A fractional-ideal lattice `a_∞ Λ'_a` with `Λ'_a ⊆ O_F` integral.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealLattice {
    pub disc: i64,
    /// HNF basis `{h, x + yω}` of `Λ'_a`.
    pub basis: [QuadInteger; 2],
    /// One positive scale per archimedean place.
    pub scale: Vec<f64>,
    /// `𝔑(Λ'_a) = [O_F : Λ'_a]`.
    pub ideal_norm: u64,
}

impl IdealLattice {
    /// The ideal generated by `gens`, i.e. the `ℤ`-span of `g` and `gω`.
    pub fn from_generators(d: i64, gens: &[QuadInteger], scale: Vec<f64>) -> Result<Self> {
        let places = if d > 0 { 2 } else { 1 };
        if scale.len() != places {
            return Err(Error::domain(format!("{} scales given for {places} places", scale.len())));
        }
        if scale.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::domain("archimedean scales must be positive"));
        }
        let vecs: Vec<(i64, i64)> = gens
            .iter()
            .flat_map(|g| [*g, g.mul(&QuadInteger::OMEGA, d)])
            .map(|q| (q.a, q.b))
            .collect();
        let ((h, _), (x, y)) = hnf2(&vecs).ok_or_else(|| Error::domain("generators span a degenerate lattice"))?;
        Ok(IdealLattice {
            disc: d,
            basis: [QuadInteger::rational(h), QuadInteger::new(x, y)],
            scale,
            ideal_norm: (h * y) as u64,
        })
    }

    pub fn principal(d: i64, x: QuadInteger, scale: Vec<f64>) -> Result<Self> {
        Self::from_generators(d, &[x], scale)
    }

    /// `O_F` with every scale equal to `s`.
    pub fn ring_of_integers(d: i64, s: f64) -> Self {
        let places = if d > 0 { 2 } else { 1 };
        Self::from_generators(d, &[QuadInteger::ONE], vec![s; places]).expect("O_F is nondegenerate")
    }

    /// The prime `(p, ω − r)` above a prime `p` that splits in `F`.
    pub fn split_prime(d: i64, p: u64, scale: Vec<f64>) -> Result<Self> {
        if kronecker_chi(d, p)? != 1 {
            return Err(Error::domain(format!("{p} does not split in the field of discriminant {d}")));
        }
        let p = p as i64;
        let c = (d * d - d) / 4;
        let r = (0..p)
            .find(|&r| (r * r - d * r + c).rem_euclid(p) == 0)
            .expect("split prime has a root");
        Self::from_generators(d, &[QuadInteger::rational(p), QuadInteger::new(-r, 1)], scale)
    }

    /// The product ideal, keeping this lattice's scales.
    pub fn product(&self, other: &IdealLattice) -> Result<Self> {
        let d = self.disc;
        let gens: Vec<QuadInteger> =
            self.basis.iter().flat_map(|u| other.basis.iter().map(move |v| u.mul(v, d))).collect();
        Self::from_generators(d, &gens, self.scale.clone())
    }

    pub fn with_scale(&self, scale: Vec<f64>) -> Self {
        IdealLattice { scale, ..self.clone() }
    }

    pub fn degree(&self) -> u32 {
        2
    }

    /// `|a|_{A_F} = |a_∞|_∞ / 𝔑(Λ'_a)`, with `|z|_ℂ = z z̄`.
    pub fn idele_norm(&self) -> CertifiedReal {
        let arch = if self.disc > 0 {
            CertifiedReal::exact(self.scale[0]) * CertifiedReal::exact(self.scale[1])
        } else {
            CertifiedReal::exact(self.scale[0]).powi(2)
        };
        arch / CertifiedReal::from_int(self.ideal_norm as i64)
    }

    /// `(α, β)` as `(value, absolute error)` pairs.
    fn weights(&self) -> ((f64, f64), (f64, f64)) {
        if self.disc > 0 {
            let (s1, e1) = exact_mul(self.scale[0], self.scale[0]);
            let (s2, e2) = exact_mul(self.scale[1], self.scale[1]);
            let (alpha, ea) = exact_add(s1, s2);
            let beta = if self.scale[0] == self.scale[1] {
                (0.0, 0.0)
            } else {
                let b = CertifiedReal::new(s1 - s2, e1 + e2 + (s1 - s2).abs() * f64::EPSILON)
                    * CertifiedReal::from_int(self.disc).sqrt();
                (b.value, b.abs_error)
            };
            ((alpha, ea + e1 + e2), beta)
        } else {
            let (s, e) = exact_mul(self.scale[0], self.scale[0]);
            ((2.0 * s, 2.0 * e), (0.0, 0.0))
        }
    }

    /// The element with lattice coordinates `(m, n)`.
    pub fn element(&self, m: i64, n: i64) -> QuadInteger {
        self.basis[0].scale(m).add(&self.basis[1].scale(n))
    }

    /// `‖x‖²_r` for the lattice vector `a_∞ x`, `x ∈ Λ'_a`.
    ///
    /// Uses error-free products, so exactly representable inputs give an
    /// exact result with zero error.
    pub fn sq_norm(&self, x: &QuadInteger) -> CertifiedReal {
        let (t, y) = x.half_coords(self.disc);
        let (t, y, dd) = (t as i128, y as i128, self.disc.abs() as i128);
        let (p, ep) = int_to_f64(t * t + dd * y * y);
        let (q, eq) = int_to_f64(2 * t * y);
        let ((alpha, ea), (beta, eb)) = self.weights();
        let (ap, r1) = exact_mul(alpha, p);
        let (bq, r2) = exact_mul(beta, q);
        let (sum, r3) = exact_add(ap, bq);
        let err = r1 + r2 + r3 + ea * p.abs() + eb * q.abs() + alpha * ep + beta.abs() * eq;
        CertifiedReal::new(sum / 4.0, err / 4.0)
    }

    /// Floating Gram matrix in lattice coordinates.
    fn gram(&self) -> [[f64; 2]; 2] {
        let ((a, _), (b, _)) = self.weights();
        let dd = self.disc.abs() as f64;
        let (t1, y1) = self.basis[0].half_coords(self.disc);
        let (t2, y2) = self.basis[1].half_coords(self.disc);
        let (t1, y1, t2, y2) = (t1 as f64, y1 as f64, t2 as f64, y2 as f64);
        let f = |ta: f64, ya: f64, tb: f64, yb: f64| (a * (ta * tb + dd * ya * yb) + b * (ta * yb + tb * ya)) / 4.0;
        let g12 = f(t1, y1, t2, y2);
        [[f(t1, y1, t1, y1), g12], [g12, f(t2, y2, t2, y2)]]
    }

    /// All nonzero lattice vectors whose squared norm may be `≤ bound`,
    /// as `(coordinates, certified squared norm)`.
    pub fn short_vectors(&self, bound: f64) -> Vec<((i64, i64), CertifiedReal)> {
        let g = self.gram();
        let q = |v: (f64, f64)| g[0][0] * v.0 * v.0 + 2.0 * g[0][1] * v.0 * v.1 + g[1][1] * v.1 * v.1;
        let dot = |u: (f64, f64), v: (f64, f64)| {
            g[0][0] * u.0 * v.0 + g[0][1] * (u.0 * v.1 + u.1 * v.0) + g[1][1] * u.1 * v.1
        };
        // Lagrange reduction of the coordinate basis
        let (mut e1, mut e2) = ((1i64, 0i64), (0i64, 1i64));
        let as_f = |e: (i64, i64)| (e.0 as f64, e.1 as f64);
        for _ in 0..200 {
            if q(as_f(e2)) < q(as_f(e1)) {
                std::mem::swap(&mut e1, &mut e2);
            }
            let mu = (dot(as_f(e1), as_f(e2)) / q(as_f(e1))).round() as i64;
            if mu == 0 {
                break;
            }
            e2 = (e2.0 - mu * e1.0, e2.1 - mu * e1.1);
        }
        let h11 = q(as_f(e1));
        let h12 = dot(as_f(e1), as_f(e2));
        let h22 = q(as_f(e2));
        let det = (h11 * h22 - h12 * h12).max(h11 * h22 * 1e-12);
        let b = bound * (1.0 + 1e-9) + 1e-300;
        let vmax = (b * h11 / det).sqrt().floor() as i64 + 1;
        let mut out = Vec::new();
        for v in -vmax..=vmax {
            let rest = b - v as f64 * v as f64 * det / h11;
            let r = if rest > 0.0 { (rest / h11).sqrt() } else { 0.0 };
            let c = -(v as f64) * h12 / h11;
            for u in (c - r).floor() as i64 - 1..=(c + r).ceil() as i64 + 1 {
                if u == 0 && v == 0 {
                    continue;
                }
                let m = u * e1.0 + v * e2.0;
                let n = u * e1.1 + v * e2.1;
                let val = self.sq_norm(&self.element(m, n));
                if val.lo() <= bound {
                    out.push(((m, n), val));
                }
            }
        }
        out.sort_by_key(|p| p.0);
        out.dedup_by_key(|p| p.0);
        out
    }
}

/// `a·b` rounded, with the exact magnitude of the rounding error.
fn exact_mul(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p).abs())
}

/// `a + b` rounded, with the exact magnitude of the rounding error.
fn exact_add(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err.abs())
}

fn int_to_f64(n: i128) -> (f64, f64) {
    let f = n as f64;
    (f, (f as i128 - n).unsigned_abs() as f64)
}

/// `λ₁(Λ_a)`: the minimum of `‖x‖²_r` over nonzero lattice points.
pub fn first_minimum(lat: &IdealLattice) -> Result<CertifiedReal> {
    if lat.scale.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::domain("degenerate archimedean scale"));
    }
    let g = lat.gram();
    let bound = g[0][0].min(g[1][1]);
    lat.short_vectors(bound)
        .into_iter()
        .map(|(_, v)| v)
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::Consistency("no lattice vector below a basis vector's norm".into()))
}

/// Nonzero lattice points with `‖X‖_r ≤ R`: `(certain, possible)`.
///
/// The two counts differ only when a point's certified norm straddles `R`.
pub fn count_ball_bounds(lat: &IdealLattice, r: f64) -> (u64, u64) {
    let r2 = r * r;
    let pts = lat.short_vectors(r2);
    let certain = pts.iter().filter(|(_, v)| v.hi() <= r2).count() as u64;
    (certain, pts.len() as u64)
}

/// `|{X ∈ Λ_a ∖ {0} : ‖X‖_r ≤ R}|`.
pub fn count_ball(lat: &IdealLattice, r: f64) -> u64 {
    count_ball_bounds(lat, r).1
}

/// The first-minimum and point-count inequalities for one lattice and radius.
pub fn check_point_count_bounds(lat: &IdealLattice, r: f64) -> Result<Vec<BoundReport>> {
    let d = lat.degree();
    let lam = first_minimum(lat)?;
    let a = lat.idele_norm();
    let count = count_ball(lat, r);
    let cnt = CertifiedReal::from_int(count as i64);
    let rr = CertifiedReal::exact(r);
    let disc = lat.disc;
    let mut out = vec![BoundReport::compare("first_minimum", disc, None, a.powf(1.0 / d as f64), lam)];
    let threshold = rr.powi(2 * d);
    if a.lo() > threshold.hi() {
        out.push(BoundReport::compare("empty_ball", disc, None, cnt, CertifiedReal::exact(0.0)));
    } else {
        out.push(BoundReport::compare(
            "count_volume",
            disc,
            None,
            cnt,
            (rr * 2.0).powi(2 * d) / a,
        ));
    }
    if lam.hi() <= r * r {
        // ⌊2R/λ₁^{1/2} + 1⌋^d, the successive-minima bound with λ₂ ≥ λ₁
        let side = ((rr * 2.0) / lam.sqrt()).hi().floor() + 1.0;
        out.push(BoundReport::compare("count_bhw", disc, None, cnt, CertifiedReal::exact(side.powi(d as i32))));
    }
    Ok(out)
}

/// `min ‖x‖_r` over `x ∈ O_F ∖ ℤ`, or `None` when that exceeds `R`.
///
/// With `x = (t + y√D)/2` and `y ≠ 0`, `‖x‖²_r = (t² + |D|y²)/2`, minimized
/// at `y = ±1` and `t = D mod 2`.
pub fn min_nonrational_norm(d: i64, r: f64) -> Option<f64> {
    let v = ((d.rem_euclid(2) + d.abs()) as f64 / 2.0).sqrt();
    (v <= r).then_some(v)
}

/// `min ‖x‖_r` over `x ∈ O_F ∖ ℤ` without the `R` cutoff.
pub fn min_nonrational_norm_value(d: i64) -> f64 {
    ((d.rem_euclid(2) + d.abs()) as f64 / 2.0).sqrt()
}
