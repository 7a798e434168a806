//! A single verified inequality `computed ≤ bound`.

use serde::{Deserialize, Serialize};

use crate::certified::CertifiedReal;
use crate::volumes::GroupKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub label: String,
    pub field_disc: i64,
    pub group: Option<GroupKind>,
    pub computed: CertifiedReal,
    pub bound: CertifiedReal,
    pub ratio: f64,
    /// `computed.lo() ≤ bound.hi()`.
    pub pass: bool,
    /// Experimental checks are reported but never affect the exit status.
    pub experimental: bool,
    /// Free-form markers such as `out-of-domain`, `bound-only` or `vacuous`.
    pub flags: Vec<String>,
}

impl BoundReport {
    pub fn compare(
        label: impl Into<String>,
        field_disc: i64,
        group: Option<GroupKind>,
        computed: CertifiedReal,
        bound: CertifiedReal,
    ) -> Self {
        let ratio = if bound.value != 0.0 { computed.value / bound.value } else { 0.0 };
        BoundReport {
            label: label.into(),
            field_disc,
            group,
            computed,
            bound,
            ratio,
            pass: computed.lo() <= bound.hi(),
            experimental: false,
            flags: Vec::new(),
        }
    }

    /// An exact equality or predicate check, recorded as `0 ≤ 0` or `1 ≤ 0`.
    pub fn predicate(label: impl Into<String>, field_disc: i64, group: Option<GroupKind>, ok: bool) -> Self {
        let computed = CertifiedReal::exact(if ok { 0.0 } else { 1.0 });
        Self::compare(label, field_disc, group, computed, CertifiedReal::exact(0.0))
    }

    /// The check's hypothesis does not hold for this input; nothing is asserted.
    pub fn out_of_domain(label: impl Into<String>, field_disc: i64, group: Option<GroupKind>) -> Self {
        Self::predicate(label, field_disc, group, true).flag("out-of-domain")
    }

    pub fn flag(mut self, f: impl Into<String>) -> Self {
        self.flags.push(f.into());
        self
    }

    pub fn experimental(mut self) -> Self {
        self.experimental = true;
        self
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }

    /// A failing, non-experimental report.
    pub fn is_failure(&self) -> bool {
        !self.pass && !self.experimental
    }
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {} D={}: {} <= {} (ratio {:.4}){}",
            if self.pass { "pass" } else { "FAIL" },
            self.label,
            self.field_disc,
            self.computed,
            self.bound,
            self.ratio,
            if self.flags.is_empty() { String::new() } else { format!(" [{}]", self.flags.join(",")) }
        )
    }
}
