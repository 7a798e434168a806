//! Measure normalizations for `G = SL₂` or `GL₂` over a quadratic field:
//! the quotient volume, the volume of the maximal compact `K_f`, and
//! `ν_F = vol(G(F)\G(A)¹) / vol(K_f)`.

use serde::{Deserialize, Serialize};

use crate::certified::CertifiedReal;
use crate::error::{Error, Result};
use crate::fields::FieldInvariants;
use crate::lfun::zeta_4;
use crate::report::BoundReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    SL2,
    GL2,
}

impl GroupKind {
    /// Exponent of `h_F` in the continuous-spectrum term.
    pub fn a_g(self) -> u32 {
        match self {
            GroupKind::GL2 => 2,
            GroupKind::SL2 => 1,
        }
    }

    /// Divisor in the unipotent lattice-point bound.
    pub fn beta_g(self) -> f64 {
        match self {
            GroupKind::SL2 => 2.0,
            GroupKind::GL2 => 1.0,
        }
    }

    /// Decay exponent of the spectral remainder in `ν_F`.
    pub fn delta_spectral(self) -> f64 {
        match self {
            GroupKind::GL2 => 0.5,
            GroupKind::SL2 => 2.0 / 3.0,
        }
    }

    /// Constant in the truncated torus integral, `δ_G (ϖ(T) + log‖(1,x)‖)`.
    pub fn delta_torus(self) -> f64 {
        match self {
            GroupKind::SL2 => 1.0,
            GroupKind::GL2 => 2.0,
        }
    }

    /// `vol(K_f) = |D|^{−num/den}`.
    pub fn kf_exponent(self) -> (u32, u32) {
        match self {
            GroupKind::GL2 => (3, 2),
            GroupKind::SL2 => (1, 1),
        }
    }

    pub fn all() -> [GroupKind; 2] {
        [GroupKind::SL2, GroupKind::GL2]
    }
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupKind::SL2 => "SL2",
            GroupKind::GL2 => "GL2",
        })
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SL2" => Ok(GroupKind::SL2),
            "GL2" => Ok(GroupKind::GL2),
            _ => Err(Error::Config(format!("unknown group {s:?}, expected SL2 or GL2"))),
        }
    }
}

/// The exact quantity `base^{−num/den}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversePower {
    pub base: u64,
    pub num: u32,
    pub den: u32,
}

impl InversePower {
    pub fn value(&self) -> CertifiedReal {
        let b = CertifiedReal::from_int(self.base as i64);
        let p = b.powi(self.num);
        let p = if self.den == 2 { p.sqrt() } else { p.powf(1.0 / self.den as f64) };
        CertifiedReal::exact(1.0) / p
    }

    /// `Some(m)` when the power is exactly `1/m` for an integer `m`.
    pub fn as_unit_fraction(&self) -> Option<u64> {
        let p = self.base.checked_pow(self.num)?;
        let r = (p as f64).powf(1.0 / self.den as f64).round() as u64;
        (r.checked_pow(self.den)? == p).then_some(r)
    }
}

impl std::fmt::Display for InversePower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}^-{}", self.base, self.num)
        } else {
            write!(f, "{}^-({}/{})", self.base, self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumePack {
    pub group: GroupKind,
    pub vol_quotient: CertifiedReal,
    pub vol_kf: InversePower,
    pub nu: CertifiedReal,
}

fn abs_disc(inv: &FieldInvariants) -> CertifiedReal {
    CertifiedReal::from_int(inv.disc.abs())
}

/// `vol(G(F)\G(A)¹)`: `|D|^{1/2} ζ_F(2)`, times `res ζ_F` for `GL₂`.
pub fn vol_quotient(g: GroupKind, inv: &FieldInvariants) -> CertifiedReal {
    let base = abs_disc(inv).sqrt() * inv.zeta2;
    match g {
        GroupKind::SL2 => base,
        GroupKind::GL2 => base * inv.residue(),
    }
}

/// `vol(K_f)`: `|D|^{−1}` for `SL₂`, `|D|^{−3/2}` for `GL₂`.
pub fn vol_kf(g: GroupKind, d: i64) -> InversePower {
    let (num, den) = g.kf_exponent();
    InversePower { base: d.unsigned_abs(), num, den }
}

/// `ν_F`: `|D|^{3/2} ζ_F(2)` for `SL₂`, `|D|² ζ_F(2) res ζ_F` for `GL₂`.
pub fn nu_f(g: GroupKind, inv: &FieldInvariants) -> CertifiedReal {
    let dd = abs_disc(inv);
    match g {
        GroupKind::SL2 => dd * dd.sqrt() * inv.zeta2,
        GroupKind::GL2 => dd * dd * inv.zeta2 * inv.residue(),
    }
}

/// All three volumes, checking `ν_F = vol_quotient / vol(K_f)`.
pub fn volume_pack(g: GroupKind, inv: &FieldInvariants) -> Result<VolumePack> {
    let vq = vol_quotient(g, inv);
    let vk = vol_kf(g, inv.disc);
    let nu = nu_f(g, inv);
    if !(vq / vk.value()).overlaps(&nu) {
        return Err(Error::Consistency(format!("D={}: ν_F disagrees with vol_quotient/vol(K_f)", inv.disc)));
    }
    Ok(VolumePack { group: g, vol_quotient: vq, vol_kf: vk, nu })
}

/// The two quotient-measure ratios and their bounds.
///
/// `res/(|D|^{1/2} ζ_F(2)) ≤ ζ(4)^{−2}|D|^{−1/2} log|D|` and
/// `res/(|D| ζ_F(2)) ≤ ζ(4)^{−2}|D|^{−1} log|D|`; stated for `|D| ≥ 5`.
pub fn quot_meas_check(g: GroupKind, inv: &FieldInvariants) -> Vec<BoundReport> {
    let labels = ["quot_meas", "quot_meas_ohat"];
    if inv.disc.abs() < 5 {
        return labels.iter().map(|l| BoundReport::out_of_domain(*l, inv.disc, Some(g))).collect();
    }
    let dd = abs_disc(inv);
    let log_d = dd.ln().powi(inv.degree() - 1);
    let z = zeta_4().powi(inv.degree());
    [dd.sqrt(), dd]
        .into_iter()
        .zip(labels)
        .map(|(scale, label)| {
            let computed = inv.residue() / (scale * inv.zeta2);
            let bound = log_d / (z * scale);
            BoundReport::compare(label, inv.disc, Some(g), computed, bound)
        })
        .collect()
}
