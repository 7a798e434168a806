//! Field-table ingestion, scan orchestration and report emission.
//!
//! A scan computes every per-field report independently (optionally in
//! parallel), then sorts by `|D|` and check label before calibrating the
//! scan-wide constant and writing anything, so outputs do not depend on the
//! number of worker threads.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    calibrate_constant, decay_fit_terms, geometric_remainder, geometric_terms, spectral_remainder_bound,
    truncation_threshold, BoundContext, GeometricTerms, CALIBRATION_FIELDS, DEFAULT_RHO,
};
use crate::bt_orbital::QuarticData;
use crate::certified::CertifiedReal;
use crate::error::{Error, Result};
use crate::fields::{
    different_norm_product, field_invariants, fundamental_unit, list_fundamental_discriminants, FieldInvariants,
    Signature,
};
use crate::lfun::{analytic_class_number, DEFAULT_TOL};
use crate::report::BoundReport;
use crate::sigma::{d0_threshold, verify_inclusion};
use crate::volumes::{quot_meas_check, GroupKind};

/// One externally tabulated number field, e.g. a quartic `F(γ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestedField {
    pub label: String,
    pub degree: u32,
    pub disc: i64,
    pub signature: (u32, u32),
    pub h: u64,
    #[serde(rename = "R")]
    pub regulator: f64,
    pub w: u32,
    #[serde(default)]
    pub source: String,
}

impl IngestedField {
    /// The record invariants; the error string names the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let (r1, r2) = self.signature;
        if self.degree != r1 + 2 * r2 {
            return Err(format!("degree {} ≠ r1 + 2·r2 = {}", self.degree, r1 + 2 * r2));
        }
        if self.h < 1 {
            return Err("class number must be at least 1".into());
        }
        if self.w < 2 || !self.w.is_multiple_of(2) {
            return Err(format!("w = {} is not an even count of roots of unity", self.w));
        }
        let real_quadratic = self.degree == 2 && r1 == 2;
        if (self.degree > 2 || real_quadratic) && !(self.regulator > 0.0) {
            return Err(format!("regulator {} must be positive", self.regulator));
        }
        if !self.regulator.is_finite() || self.regulator < 0.0 {
            return Err(format!("regulator {} is not a nonnegative real", self.regulator));
        }
        if self.disc == 0 || (self.disc < 0) != (r2 % 2 == 1) {
            return Err(format!("disc {} has the wrong sign for signature ({r1},{r2})", self.disc));
        }
        Ok(())
    }

    pub fn to_quartic(&self) -> Option<QuarticData> {
        (self.degree == 4).then(|| QuarticData {
            label: self.label.clone(),
            disc: self.disc,
            r1: self.signature.0,
            r2: self.signature.1,
            h: self.h,
            regulator: self.regulator,
            w: self.w,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectedRecord {
    pub line: usize,
    pub label: String,
    pub reason: String,
}

/// Result of reading a field table.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub fields: Vec<IngestedField>,
    pub rejected: Vec<RejectedRecord>,
    /// Duplicate labels, one message per dropped line.
    pub warnings: Vec<String>,
}

impl IngestReport {
    pub fn quartics(&self) -> Vec<QuarticData> {
        self.fields.iter().filter_map(IngestedField::to_quartic).collect()
    }
}

/// Reads a JSON-lines field table from any reader. Blank lines are skipped.
pub fn ingest_reader(reader: impl BufRead) -> Result<IngestReport> {
    let mut out = IngestReport::default();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: IngestedField =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        if let Err(reason) = rec.validate() {
            out.rejected.push(RejectedRecord { line: line_no, label: rec.label, reason });
            continue;
        }
        if !seen.insert(rec.label.clone()) {
            out.warnings.push(format!("line {line_no}: duplicate label {} dropped", rec.label));
            continue;
        }
        out.fields.push(rec);
    }
    Ok(out)
}

pub fn ingest_field_table(path: impl AsRef<Path>) -> Result<IngestReport> {
    let f = std::fs::File::open(path.as_ref())?;
    ingest_reader(BufReader::new(f))
}

/// Everything a scan needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanConfig {
    pub group: GroupKind,
    pub signature: Signature,
    pub dmin: i64,
    pub dmax: i64,
    pub radius: f64,
    pub rho: f64,
    pub tol: f64,
    /// Directory receiving `report.csv` and `report.json`.
    pub out: Option<PathBuf>,
    pub jobs: usize,
    #[serde(skip)]
    pub quartics: Vec<QuarticData>,
}

impl ScanConfig {
    pub fn new(group: GroupKind, signature: Signature, dmin: i64, dmax: i64) -> Self {
        ScanConfig {
            group,
            signature,
            dmin,
            dmax,
            radius: 5.0,
            rho: DEFAULT_RHO,
            tol: DEFAULT_TOL,
            out: None,
            jobs: 1,
            quartics: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad(format!("ρ must be positive, got {}", self.rho));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        if self.dmin > self.dmax {
            return bad(format!("dmin = {} exceeds dmax = {}", self.dmin, self.dmax));
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        if self.signature.degree() != 2 {
            return Err(Error::UnsupportedDegree(self.signature.degree()));
        }
        Ok(())
    }
}

/// Metadata recorded next to the reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub group: GroupKind,
    pub signature: Signature,
    pub dmin: i64,
    pub dmax: i64,
    pub radius: f64,
    pub rho: f64,
    pub tol: f64,
    pub fields: usize,
    pub d0: i64,
    /// Geometric-remainder constant frozen on the smallest fields.
    pub constant: Option<f64>,
    /// `(slope, intercept)` of `log(remainder/ϖ)` against `log|D|`.
    pub decay_fit: Option<(f64, f64)>,
    /// Smallest regulator among real fields, as `(D, R_F)`: an empirical
    /// stand-in for the absolute lower bound on regulators.
    pub min_regulator: Option<(i64, f64)>,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub summary: ScanSummary,
    pub reports: Vec<BoundReport>,
    #[serde(skip)]
    pub terms: Vec<GeometricTerms>,
}

impl ScanOutcome {
    /// 0 iff every non-experimental report passes.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failures == 0 {
            0
        } else {
            1
        }
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        write_csv(&self.reports, w)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Twelve significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub const CSV_HEADER: [&str; 8] = ["disc", "group", "check_label", "computed", "error", "bound", "ratio", "pass"];

pub fn write_csv(reports: &[BoundReport], w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wr.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        wr.write_record([
            r.field_disc.to_string(),
            r.group.map(|g| g.to_string()).unwrap_or_default(),
            r.label.clone(),
            fmt_float(r.computed.value),
            fmt_float(r.computed.abs_error),
            fmt_float(r.bound.value),
            fmt_float(r.ratio),
            r.pass.to_string(),
        ])
        .map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// Arithmetic cross-checks of one field's invariants.
pub fn invariant_checks(inv: &FieldInvariants, tol: f64) -> Result<Vec<BoundReport>> {
    let d = inv.disc;
    let dd = CertifiedReal::from_int(d.abs());
    let mut out = Vec::new();
    if d < 0 {
        let analytic = analytic_class_number(d)?;
        let gap = (analytic - CertifiedReal::from_int(inv.h as i64)).abs();
        out.push(BoundReport::compare("class_number", d, None, gap, CertifiedReal::exact(0.5)));
    } else {
        let hr = CertifiedReal::from_int(inv.h as i64) * inv.regulator;
        let rhs = dd.sqrt() * inv.l1 / CertifiedReal::exact(2.0);
        let rel = (hr - rhs).abs() / rhs;
        out.push(BoundReport::compare("class_number", d, None, rel, CertifiedReal::exact(1e-6)));
        let u = fundamental_unit(d);
        let lhs = &u.x * &u.x - num_bigint::BigInt::from(d) * &u.y * &u.y;
        let ok = lhs == num_bigint::BigInt::from(4 * u.norm as i64);
        out.push(BoundReport::predicate("pell", d, None, ok));
    }
    let gap = (inv.class_number_formula() - inv.l1).abs();
    out.push(BoundReport::compare("l1_agreement", d, None, gap, CertifiedReal::exact(tol)));
    out.push(BoundReport::predicate("different", d, None, different_norm_product(d)? == d.unsigned_abs()));
    if d.abs() < 5 {
        out.push(BoundReport::out_of_domain("residue_bound", d, None));
        out.push(BoundReport::out_of_domain("class_number_bound", d, None));
    } else {
        let log_d = dd.ln().powi(inv.degree() - 1);
        out.push(BoundReport::compare("residue_bound", d, None, inv.l1, log_d));
        let hb = dd.sqrt() * log_d * 2.0;
        out.push(BoundReport::compare("class_number_bound", d, None, CertifiedReal::from_int(inv.h as i64), hb));
    }
    Ok(out)
}

/// All per-field reports except the calibrated geometric remainder.
pub fn field_reports(
    inv: &FieldInvariants,
    cfg: &ScanConfig,
    ctx: &BoundContext,
) -> Result<(Vec<BoundReport>, GeometricTerms)> {
    let mut out = invariant_checks(inv, cfg.tol)?;
    out.extend(quot_meas_check(cfg.group, inv));
    out.push(verify_inclusion(inv, cfg.radius, d0_threshold(cfg.radius))?);
    out.push(spectral_remainder_bound(inv, cfg.group));
    let t = truncation_threshold(inv, cfg.rho)?;
    let terms = geometric_terms(inv, t, cfg.rho, ctx)?;
    out.extend(terms.reports.iter().cloned());
    Ok((out, terms))
}

type FieldResult = (Vec<BoundReport>, GeometricTerms, f64);

fn scan_one(d: i64, cfg: &ScanConfig, ctx: &BoundContext) -> Result<FieldResult> {
    let at = |e: Error| match e {
        Error::Consistency(m) => Error::Consistency(format!("field D={d}: {m}")),
        e => Error::Consistency(format!("field D={d}: {e}")),
    };
    let inv = field_invariants(d).map_err(at)?;
    let (reports, terms) = field_reports(&inv, cfg, ctx).map_err(at)?;
    Ok((reports, terms, inv.regulator.value))
}

fn sort_reports(reports: &mut [BoundReport]) {
    reports.sort_by(|a, b| {
        (a.field_disc.unsigned_abs(), a.field_disc, &a.label).cmp(&(b.field_disc.unsigned_abs(), b.field_disc, &b.label))
    });
}

/// Runs the scan and writes `report.csv`/`report.json` when `cfg.out` is set.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanOutcome> {
    cfg.validate()?;
    let discs = list_fundamental_discriminants(cfg.dmin, cfg.dmax, cfg.signature)?;
    let ctx = BoundContext::new(cfg.group, cfg.signature, cfg.radius)?.with_quartics(cfg.quartics.clone());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let per_field: Vec<FieldResult> =
        pool.install(|| discs.par_iter().map(|&d| scan_one(d, cfg, &ctx)).collect::<Result<_>>())?;

    let mut reports = Vec::new();
    let mut terms = Vec::new();
    let mut min_regulator: Option<(i64, f64)> = None;
    for (r, t, reg) in per_field {
        if t.disc > 0 && min_regulator.is_none_or(|(_, m)| reg < m) {
            min_regulator = Some((t.disc, reg));
        }
        reports.extend(r);
        terms.push(t);
    }
    terms.sort_by_key(|t| (t.disc.unsigned_abs(), t.disc));

    let eligible: Vec<&GeometricTerms> = terms.iter().filter(|t| t.disc.abs() >= 5).collect();
    let constant = calibrate_constant(&terms).ok();
    for (i, t) in eligible.iter().enumerate() {
        let rep = match constant {
            Some(c) if i < CALIBRATION_FIELDS => geometric_remainder(t, c).flag("calibration"),
            Some(c) => geometric_remainder(t, c),
            None => BoundReport::out_of_domain("geometric_remainder", t.disc, Some(cfg.group)).flag("uncalibrated"),
        };
        reports.push(rep);
    }
    let owned: Vec<GeometricTerms> = eligible.into_iter().cloned().collect();
    let fit = decay_fit_terms(&owned).ok();
    sort_reports(&mut reports);

    let summary = ScanSummary {
        group: cfg.group,
        signature: cfg.signature,
        dmin: cfg.dmin,
        dmax: cfg.dmax,
        radius: cfg.radius,
        rho: cfg.rho,
        tol: cfg.tol,
        fields: discs.len(),
        d0: d0_threshold(cfg.radius),
        constant,
        decay_fit: fit,
        min_regulator,
        failures: reports.iter().filter(|r| r.is_failure()).count(),
    };
    let outcome = ScanOutcome { summary, reports, terms };
    if let Some(dir) = &cfg.out {
        write_outputs(&outcome, dir)?;
    }
    Ok(outcome)
}

pub fn write_outputs(outcome: &ScanOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let csv = std::fs::File::create(dir.join("report.csv"))?;
    outcome.write_csv(std::io::BufWriter::new(csv))?;
    std::fs::write(dir.join("report.json"), outcome.to_json()? + "\n")?;
    Ok(())
}

/// Exit code for an error: configuration and I/O problems are 2, anything
/// else is a failed check.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Parse { .. }
        | Error::NotFundamental(_)
        | Error::UnsupportedDegree(_) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"label":"4.0.144.1","degree":4,"disc":144,"signature":[0,2],"h":1,"R":1.31695789692482,"w":12,"source":"fixture"}"#;

    #[test]
    fn ingestion_gates() {
        let bad_degree = GOOD.replace(r#""degree":4"#, r#""degree":3"#).replace("4.0.144.1", "bad");
        let text = format!("{GOOD}\n\n{bad_degree}\n{GOOD}\n");
        let rep = ingest_reader(text.as_bytes()).unwrap();
        assert_eq!(rep.fields.len(), 1);
        assert_eq!(rep.rejected.len(), 1);
        assert_eq!(rep.rejected[0].line, 3);
        assert_eq!(rep.warnings.len(), 1);
        assert!(rep.warnings[0].starts_with("line 4"));
        let q = rep.quartics();
        assert_eq!(q[0].disc, 144);
        assert!((q[0].residue().value - 0.36105).abs() < 1e-4);
    }

    #[test]
    fn malformed_line_number() {
        let text = format!("{GOOD}\n{{\"label\": 3\n");
        match ingest_reader(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = ScanConfig::new(GroupKind::SL2, Signature::IMAGINARY_QUADRATIC, -50, -3);
        assert!(cfg.validate().is_ok());
        cfg.rho = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.rho = 8.0;
        cfg.radius = -1.0;
        assert!(cfg.validate().is_err());
        cfg.radius = 5.0;
        cfg.dmin = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.1980), "1.98000000000e-1");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
    }
}
