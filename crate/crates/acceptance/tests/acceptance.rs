//! Acceptance criteria 1–9. Each criterion prints one `PASS`/`FAIL` line;
//! the process fails if any criterion fails.

use std::time::{Duration, Instant};

use lmp::bounds::spectral_remainder_bound;
use lmp::bt_orbital::orbital_oracle;
use lmp::fields::{
    class_number, different_norm_product, field_invariants, fundamental_unit, list_fundamental_discriminants,
    reduced_definite_forms, Signature,
};
use lmp::io_cli::{run_scan, ScanConfig};
use lmp::lattices::{check_point_count_bounds, IdealLattice};
use lmp::lfun::{analytic_class_number, l_at_one};
use lmp::sigma::{d0_threshold, required_d0};
use lmp::{CertifiedReal, GroupKind};
use num_bigint::BigInt;

const IMAG: Signature = Signature::IMAGINARY_QUADRATIC;
const REAL: Signature = Signature::REAL_QUADRATIC;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.1}s]", o.detail, took.as_secs_f64());
    if let Some(l) = limit {
        if took > l {
            o.pass = false;
            o.detail = format!("{}; exceeded {}s", o.detail, l.as_secs());
        }
    }
    o
}

fn fundamentals(dmin: i64, dmax: i64, sig: Signature) -> Vec<i64> {
    list_fundamental_discriminants(dmin, dmax, sig).expect("discriminant list")
}

/// Fixed-vertex counts equal the unramified closed form.
fn criterion_1() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in [2u64, 3, 5, 7] {
        for d in 0..=4u32 {
            match orbital_oracle(p, d, false, 3) {
                Ok(reports) if reports.len() >= 3 => {
                    checked += reports.len();
                    bad.extend(reports.into_iter().filter(|r| !r.pass).map(|r| r.label));
                }
                Ok(r) => bad.push(format!("p={p} d={d}: only {} samples", r.len())),
                Err(e) => bad.push(format!("p={p} d={d}: {e}")),
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} elements, mismatches {bad:?}"))
}

/// Reduced forms against the analytic class number; `hR` against
/// `(√D/2)L(1,χ)` and the Pell identity.
fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let imag = fundamentals(-9999, -1, IMAG);
    for &d in &imag {
        let forms = reduced_definite_forms(d).len() as i64;
        let analytic = analytic_class_number(d).expect("analytic h");
        let gap = (analytic - CertifiedReal::from_int(forms)).abs();
        if gap.hi().is_nan() || gap.hi() >= 0.5 {
            bad.push(format!("D={d}: {forms} forms vs {analytic}"));
        }
    }
    let real = fundamentals(2, 4999, REAL);
    let mut worst: f64 = 0.0;
    for &d in &real {
        let inv = match field_invariants(d) {
            Ok(i) => i,
            Err(e) => {
                bad.push(format!("D={d}: {e}"));
                continue;
            }
        };
        let hr = CertifiedReal::from_int(inv.h as i64) * inv.regulator;
        let rhs = CertifiedReal::from_int(d).sqrt() * inv.l1 / CertifiedReal::exact(2.0);
        let rel = ((hr - rhs).abs() / rhs).hi();
        worst = worst.max(rel);
        if rel.is_nan() || rel > 1e-6 {
            bad.push(format!("D={d}: relative gap {rel:e}"));
        }
        let u = fundamental_unit(d);
        if &u.x * &u.x - BigInt::from(d) * &u.y * &u.y != BigInt::from(4 * u.norm as i64) {
            bad.push(format!("D={d}: Pell identity"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} imaginary, {} real fields, worst hR gap {worst:.2e}, failures {:?}", imag.len(), real.len(), bad),
    )
}

/// `∏ 𝔑(∂_v) = |D|` for every fundamental discriminant with `|D| ≤ 10⁵`.
fn criterion_3() -> Outcome {
    let mut n = 0;
    let mut bad = Vec::new();
    for sig in [IMAG, REAL] {
        for d in fundamentals(-100_000, 100_000, sig) {
            n += 1;
            match different_norm_product(d) {
                Ok(v) if v == d.unsigned_abs() => {}
                other => bad.push(format!("D={d}: {other:?}")),
            }
        }
    }
    outcome(bad.is_empty(), format!("{n} fields, failures {bad:?}"))
}

/// `L(1,χ) ≤ log|D|` and `h ≤ 2|D|^{1/2} log|D|` for `5 ≤ |D| ≤ 10⁵`.
fn criterion_4() -> Outcome {
    let mut n = 0;
    let mut bad = Vec::new();
    let (mut worst_l, mut worst_h): (f64, f64) = (0.0, 0.0);
    for sig in [IMAG, REAL] {
        for d in fundamentals(-100_000, 100_000, sig) {
            if d.abs() < 5 {
                continue;
            }
            n += 1;
            let log_d = CertifiedReal::from_int(d.abs()).ln();
            let l1 = l_at_one(d).expect("L(1)");
            let h = class_number(d).expect("h");
            let hb = CertifiedReal::from_int(d.abs()).sqrt() * log_d * 2.0;
            worst_l = worst_l.max(l1.value / log_d.value);
            worst_h = worst_h.max(h as f64 / hb.value);
            if l1.lo() > log_d.hi() {
                bad.push(format!("D={d}: L(1) = {l1}"));
            }
            if h as f64 > hb.hi() {
                bad.push(format!("D={d}: h = {h}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{n} fields, max L(1)/log|D| = {worst_l:.4}, max h/bound = {worst_h:.4}, failures {bad:?}"),
    )
}

/// First-minimum and point-count laws over sampled (field, ideal, scale)
/// triples with `|a| ≥ 1/4` and `R ≥ 1/√2`.
fn criterion_5() -> Outcome {
    let mut lattices = Vec::new();
    for d in [-3i64, -4, -7, -8, -15, -23, -163, 5, 8, 12, 13, 17, 229] {
        let base = IdealLattice::ring_of_integers(d, 1.0);
        let mut ideals = vec![base];
        for p in [2u64, 3, 5, 7, 11, 13] {
            if let Ok(l) = IdealLattice::split_prime(d, p, if d > 0 { vec![1.0, 1.0] } else { vec![1.0] }) {
                ideals.push(l);
            }
        }
        if ideals.len() >= 3 {
            if let Ok(l) = ideals[1].product(&ideals[2]) {
                ideals.push(l);
            }
        }
        let scales: Vec<Vec<f64>> = if d > 0 {
            vec![vec![1.0, 1.0], vec![2.0, 0.5], vec![0.7, 3.0], vec![1.5, 2.5], vec![4.0, 1.0]]
        } else {
            vec![vec![1.0], vec![0.6], vec![1.5], vec![2.5], vec![4.0]]
        };
        for lat in &ideals {
            for s in &scales {
                lattices.push(lat.with_scale(s.clone()));
            }
        }
    }
    let mut triples = 0;
    let mut outside = 0;
    let mut bad = Vec::new();
    for lat in &lattices {
        let a = lat.idele_norm();
        for r in [0.75, 1.0, 2.0, 3.5] {
            if a.lo() < 0.25 {
                outside += 1;
                continue;
            }
            triples += 1;
            match check_point_count_bounds(lat, r) {
                Ok(reports) => bad.extend(
                    reports
                        .into_iter()
                        .filter(|x| !x.pass)
                        .map(|x| format!("D={} N={} s={:?} R={r}: {x}", lat.disc, lat.ideal_norm, lat.scale)),
                ),
                Err(e) => bad.push(format!("D={}: {e}", lat.disc)),
            }
        }
    }
    outcome(
        bad.is_empty() && triples >= 100,
        format!("{triples} triples ({outside} outside |a| ≥ 1/4 skipped), failures {bad:?}"),
    )
}

/// Nonrational integers of norm at most 5 only occur for `|D| ≤ 51`.
fn criterion_6() -> Outcome {
    let r = 5.0;
    let d0 = d0_threshold(r);
    let mut n = 0;
    let mut bad = Vec::new();
    for sig in [IMAG, REAL] {
        for d in fundamentals(-10_000, 10_000, sig) {
            n += 1;
            // brute force: (t + y√D)/2 with y ≠ 0 has ‖x‖²_r = (t² + |D|y²)/2
            let dd = d.abs();
            let meets = (-10i64..=10).any(|t| (t - d).rem_euclid(2) == 0 && (t * t + dd) as f64 / 2.0 <= r * r);
            if meets && dd > d0 {
                bad.push(format!("D={d} meets the ball"));
            }
            match required_d0(d, r) {
                Ok(need) if need <= d0 && (need > 0) == meets => {}
                other => bad.push(format!("D={d}: required D0 {other:?}")),
            }
        }
    }
    outcome(bad.is_empty() && d0 <= 51, format!("D0(5) = {d0}, {n} fields, failures {bad:?}"))
}

fn jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Geometric remainder over `−10⁵ < D ≤ −10³`.
fn criterion_7() -> Outcome {
    let mut cfg = ScanConfig::new(GroupKind::SL2, IMAG, -99_999, -1000);
    cfg.rho = 8.0;
    cfg.jobs = jobs();
    let out = match run_scan(&cfg) {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("scan error: {e}")),
    };
    let geo: Vec<_> = out.reports.iter().filter(|r| r.label == "geometric_remainder").collect();
    let failing = geo.iter().filter(|r| !r.pass).count();
    let worst = geo.iter().filter(|r| !r.has_flag("calibration")).map(|r| r.ratio).fold(0.0, f64::max);
    let slope = out.summary.decay_fit.map(|f| f.0);
    let ok = failing == 0 && !geo.is_empty() && slope.is_some_and(|s| s <= -1.0 / 3.0);
    outcome(
        ok,
        format!(
            "{} fields, C = {:.4e}, {failing} failing, max ratio after calibration {worst:.4}, slope {:?} (≤ −1/3 required)",
            out.summary.fields,
            out.summary.constant.unwrap_or(f64::NAN),
            slope
        ),
    )
}

/// Continuous-spectrum bound with exponent `−δ_G + 0.05`.
fn criterion_8() -> Outcome {
    let mut lines = Vec::new();
    let mut all_ok = true;
    for sig in [IMAG, REAL] {
        let fields: Vec<_> = fundamentals(-10_000, 10_000, sig)
            .into_iter()
            .filter(|d| d.abs() >= 5)
            .map(|d| field_invariants(d).expect("invariants"))
            .collect();
        for g in GroupKind::all() {
            let reports: Vec<_> = fields.iter().map(|f| spectral_remainder_bound(f, g)).collect();
            let fail: Vec<i64> = reports.iter().filter(|r| !r.pass).map(|r| r.field_disc).collect();
            let worst = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
            all_ok &= fail.is_empty();
            lines.push(format!(
                "{g} {sig}: {}/{} fail, max ratio {worst:.3}, largest failing |D| {:?}",
                fail.len(),
                reports.len(),
                fail.iter().map(|d| d.abs()).max()
            ));
        }
    }
    outcome(all_ok, lines.join("; "))
}

/// Byte-identical outputs for `--jobs 1` and `--jobs 8`.
fn criterion_9() -> Outcome {
    let base = std::env::temp_dir().join(format!("lmp-acceptance-{}", std::process::id()));
    let mut diffs = Vec::new();
    for (g, sig, lo, hi) in [(GroupKind::SL2, IMAG, -3000, -3), (GroupKind::GL2, REAL, 5, 1500)] {
        let mut outputs = Vec::new();
        for jobs in [1usize, 8] {
            let dir = base.join(format!("{g}-{}-{jobs}", sig.r1));
            let mut cfg = ScanConfig::new(g, sig, lo, hi);
            cfg.jobs = jobs;
            cfg.out = Some(dir.clone());
            if let Err(e) = run_scan(&cfg) {
                return outcome(false, format!("scan error: {e}"));
            }
            let csv = std::fs::read(dir.join("report.csv")).expect("csv");
            let json = std::fs::read(dir.join("report.json")).expect("json");
            outputs.push((csv, json));
        }
        if outputs[0] != outputs[1] {
            diffs.push(format!("{g} {sig}"));
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    outcome(diffs.is_empty(), format!("2 scans at jobs 1 and 8, differing: {diffs:?}"))
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);

fn main() {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria: [Criterion; 9] = [
        (1, "orbital-integral oracle", secs(60), criterion_1),
        (2, "class-number cross-check", secs(300), criterion_2),
        (3, "different-discriminant identity", None, criterion_3),
        (4, "residue and class-number bounds", secs(600), criterion_4),
        (5, "lattice laws", None, criterion_5),
        (6, "Σ₀ inclusion at R = 5", None, criterion_6),
        (7, "geometric remainder decay", secs(1800), criterion_7),
        (8, "spectral remainder shape", None, criterion_8),
        (9, "determinism", None, criterion_9),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = Vec::new();
    for (n, name, limit, f) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let o = timed(limit, f);
        println!("criterion {n} ({name}): {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
