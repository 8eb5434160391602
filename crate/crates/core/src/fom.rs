//! Figures of merit: area-delay product, power-delay product, technology
//! scaling and latency.
//!
//! Quantities with different units are distinct types. An FPGA ADP in
//! LUT·s only becomes comparable to an ASIC ADP in µm²·s through
//! [`LutSeconds::to_um2_seconds`], which takes the silicon area of one LUT
//! as an explicit argument.
//!
//! **Per-LUT area.** There is no physical per-LUT area figure behind the
//! tech-scaled FPGA row; [`DEFAULT_UM2_PER_LUT`] is 1.0 µm² at the FPGA node,
//! which makes the scaled value numerically the LUT·s product times the node
//! ratio squared. Supply a real value when one is known.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FomError;

pub const DEFAULT_UM2_PER_LUT: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlatformKind {
    #[serde(rename = "ASIC")]
    Asic,
    #[serde(rename = "FPGA")]
    Fpga,
}

impl PlatformKind {
    fn name(self) -> &'static str {
        match self {
            PlatformKind::Asic => "ASIC",
            PlatformKind::Fpga => "FPGA",
        }
    }
}

/// Measured figures of one implementation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformMetrics {
    #[serde(default)]
    pub label: String,
    pub kind: PlatformKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_um2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub luts: Option<f64>,
    pub cpd_ns: f64,
    pub power_mw: f64,
    pub tech_nm: f64,
    /// Power as quoted by the source in watts, when it was quoted in watts.
    /// Only used to flag disagreement with `power_mw`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_power_w: Option<f64>,
}

impl PlatformMetrics {
    pub fn validate(&self) -> Result<(), FomError> {
        let kind = self.kind.name();
        match self.kind {
            PlatformKind::Asic => {
                if self.area_um2.is_none() {
                    return Err(FomError::MissingField(kind, "area_um2"));
                }
                if self.luts.is_some() {
                    return Err(FomError::UnexpectedField(kind, "luts"));
                }
            }
            PlatformKind::Fpga => {
                if self.luts.is_none() {
                    return Err(FomError::MissingField(kind, "luts"));
                }
                if self.area_um2.is_some() {
                    return Err(FomError::UnexpectedField(kind, "area_um2"));
                }
            }
        }
        positive("cpd_ns", self.cpd_ns)?;
        positive("tech_nm", self.tech_nm)?;
        if let Some(a) = self.area_um2 {
            non_negative("area_um2", a)?;
        }
        if let Some(l) = self.luts {
            non_negative("luts", l)?;
        }
        non_negative("power_mw", self.power_mw)?;
        if let Some(w) = self.source_power_w {
            non_negative("source_power_w", w)?;
        }
        Ok(())
    }

    pub fn cpd_seconds(&self) -> f64 {
        self.cpd_ns * 1e-9
    }

    /// Warning when the quoted wattage and the power used for PDP disagree
    /// by more than rounding.
    pub fn power_warning(&self) -> Option<String> {
        let w = self.source_power_w?;
        let quoted_mw = w * 1e3;
        let tol = 1e-6 * quoted_mw.abs().max(self.power_mw.abs());
        if (quoted_mw - self.power_mw).abs() <= tol {
            return None;
        }
        let implied_w = self.power_mw * 1e-3;
        Some(format!(
            "{}: source power is {w} W ({quoted_mw} mW) but power_mw is {}; PDP uses power_mw. \
             The PDP with the quoted wattage would be {} mW·s ({implied_w} W assumed here)",
            self.display_label(),
            self.power_mw,
            sig3(quoted_mw * self.cpd_seconds()),
        ))
    }

    fn display_label(&self) -> &str {
        if self.label.is_empty() {
            self.kind.name()
        } else {
            &self.label
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), FomError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(FomError::NonPositive(name))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<(), FomError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(FomError::Negative(name))
    }
}

macro_rules! unit {
    ($name:ident, $unit:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub f64);

        impl $name {
            pub const UNIT: &'static str = $unit;

            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", sig3(self.0), $unit)
            }
        }
    };
}

unit!(Um2Seconds, "µm²·s");
unit!(LutSeconds, "LUT·s");
unit!(MilliwattSeconds, "mW·s");

impl LutSeconds {
    /// Area-equivalent ADP at `to_nm`, from `um2_per_lut` µm² per LUT at
    /// `from_nm`.
    pub fn to_um2_seconds(self, um2_per_lut: f64, from_nm: f64, to_nm: f64) -> Result<Um2Seconds, FomError> {
        non_negative("um2_per_lut", um2_per_lut)?;
        Ok(Um2Seconds(scale_area(self.0 * um2_per_lut, from_nm, to_nm)?))
    }
}

/// Area-delay product, tagged by platform unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Adp {
    Asic(Um2Seconds),
    Fpga(LutSeconds),
}

impl Adp {
    pub fn value(self) -> f64 {
        match self {
            Adp::Asic(v) => v.0,
            Adp::Fpga(v) => v.0,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Adp::Asic(_) => Um2Seconds::UNIT,
            Adp::Fpga(_) => LutSeconds::UNIT,
        }
    }
}

impl fmt::Display for Adp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adp::Asic(v) => v.fmt(f),
            Adp::Fpga(v) => v.fmt(f),
        }
    }
}

pub fn adp(m: &PlatformMetrics) -> Result<Adp, FomError> {
    m.validate()?;
    let t = m.cpd_seconds();
    Ok(match m.kind {
        PlatformKind::Asic => Adp::Asic(Um2Seconds(m.area_um2.unwrap_or_default() * t)),
        PlatformKind::Fpga => Adp::Fpga(LutSeconds(m.luts.unwrap_or_default() * t)),
    })
}

pub fn pdp(m: &PlatformMetrics) -> Result<MilliwattSeconds, FomError> {
    m.validate()?;
    Ok(MilliwattSeconds(m.power_mw * m.cpd_seconds()))
}

/// Classical area scaling: `area * (to_nm / from_nm)^2`.
pub fn scale_area(area: f64, from_nm: f64, to_nm: f64) -> Result<f64, FomError> {
    positive("from_nm", from_nm)?;
    positive("to_nm", to_nm)?;
    let r = to_nm / from_nm;
    Ok(area * r * r)
}

/// Seconds for `cycles` at `freq_hz`.
pub fn latency(cycles: u64, freq_hz: f64) -> Result<f64, FomError> {
    if !(freq_hz.is_finite() && freq_hz > 0.0) {
        return Err(FomError::ZeroFrequency);
    }
    Ok(cycles as f64 / freq_hz)
}

/// Rounds to three significant figures.
pub fn round_sig3(x: f64) -> f64 {
    sig3(x).parse().unwrap_or(x)
}

/// Three-significant-figure scientific notation, e.g. `8.23e-4`.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    match s.split_once('e') {
        Some((m, e)) => format!("{m}e{e}"),
        None => s,
    }
}

/// Options for [`report`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleOptions {
    /// Node FPGA rows are scaled to; defaults to the first ASIC node.
    pub target_nm: Option<f64>,
    pub um2_per_lut: f64,
}

impl Default for ScaleOptions {
    fn default() -> Self {
        ScaleOptions { target_nm: None, um2_per_lut: DEFAULT_UM2_PER_LUT }
    }
}

/// One row of a figures-of-merit table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FomRow {
    pub platform: String,
    pub cpd_ns: f64,
    pub adp: f64,
    pub adp_unit: &'static str,
    pub pdp_mws: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FomReport {
    pub rows: Vec<FomRow>,
    pub warnings: Vec<String>,
}

impl FomReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("platform,cpd_ns,adp,adp_unit,pdp_mws\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.platform,
                r.cpd_ns,
                sig3(r.adp),
                r.adp_unit,
                sig3(r.pdp_mws)
            ));
        }
        s
    }
}

/// Builds ADP/PDP rows for every platform, plus a tech-scaled row for each
/// FPGA whose node differs from the target node.
pub fn report(metrics: &[PlatformMetrics], opts: ScaleOptions) -> Result<FomReport, FomError> {
    let target = opts
        .target_nm
        .or_else(|| metrics.iter().find(|m| m.kind == PlatformKind::Asic).map(|m| m.tech_nm));
    let mut out = FomReport::default();
    for m in metrics {
        let a = adp(m)?;
        let p = pdp(m)?;
        out.rows.push(FomRow {
            platform: m.display_label().to_string(),
            cpd_ns: m.cpd_ns,
            adp: a.value(),
            adp_unit: a.unit(),
            pdp_mws: p.0,
        });
        if let (Adp::Fpga(lut_s), Some(to_nm)) = (a, target) {
            if to_nm != m.tech_nm {
                let scaled = lut_s.to_um2_seconds(opts.um2_per_lut, m.tech_nm, to_nm)?;
                out.rows.push(FomRow {
                    platform: format!("{} (tech-scaled {} nm)", m.display_label(), to_nm),
                    cpd_ns: m.cpd_ns,
                    adp: scaled.0,
                    adp_unit: Um2Seconds::UNIT,
                    pdp_mws: p.0,
                });
            }
        }
        out.warnings.extend(m.power_warning());
    }
    Ok(out)
}
