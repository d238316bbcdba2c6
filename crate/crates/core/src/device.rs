//! MOSFET device physics and the AND-gate delay/power aggregation.
//!
//! Drain-current models for the triode and saturation regions, the closed-form
//! triode dissipation integral, RC-logarithm turn-on/turn-off delays, datasheet
//! calibration of the transconductance coefficient `k`, and bundled presets for
//! the two discrete devices the electronic receiver is costed with.
//!
//! All quantities are magnitudes: PMOS devices use the same equations as NMOS
//! with positive voltages and currents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel polarity of a device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MosfetPolarity {
    #[serde(alias = "NMOS")]
    Nmos,
    #[serde(alias = "PMOS")]
    Pmos,
}

impl std::fmt::Display for MosfetPolarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MosfetPolarity::Nmos => write!(f, "nmos"),
            MosfetPolarity::Pmos => write!(f, "pmos"),
        }
    }
}

/// Operating region of a device at a given bias point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cutoff,
    Triode,
    Saturation,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Cutoff => write!(f, "cutoff"),
            Mode::Triode => write!(f, "triode"),
            Mode::Saturation => write!(f, "saturation"),
        }
    }
}

/// Device constants taken from a datasheet.
///
/// `k` is optional because datasheets rarely state it; [`calibrate_k`]
/// recovers it from a published current.
#[derive(Debug, Clone, PartialEq)]
pub struct MosfetDatasheet {
    name: String,
    polarity: MosfetPolarity,
    r_g_ohm: f64,
    c_iss_at_0v_f: f64,
    c_iss_at_vds_f: f64,
    v_th_v: f64,
    v_gp_v: f64,
    k_a_per_v2: Option<f64>,
    lambda_per_v: f64,
    v_off_v: f64,
}

impl MosfetDatasheet {
    pub fn new(
        name: impl Into<String>,
        polarity: MosfetPolarity,
        r_g_ohm: f64,
        c_iss_at_0v_f: f64,
        c_iss_at_vds_f: f64,
        v_th_v: f64,
        v_gp_v: f64,
    ) -> Result<Self> {
        let ds = Self {
            name: name.into(),
            polarity,
            r_g_ohm,
            c_iss_at_0v_f,
            c_iss_at_vds_f,
            v_th_v,
            v_gp_v,
            k_a_per_v2: None,
            lambda_per_v: 0.0,
            v_off_v: 0.0,
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("c_iss_at_0v", self.c_iss_at_0v_f),
            ("c_iss_at_vds", self.c_iss_at_vds_f),
            ("v_th", self.v_th_v),
            ("v_gp", self.v_gp_v),
        ];
        for (label, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Domain(format!(
                    "datasheet {}: {label} must be positive, got {value}",
                    self.name
                )));
            }
        }
        let non_negative = [
            ("r_g", self.r_g_ohm),
            ("lambda", self.lambda_per_v),
            ("v_off", self.v_off_v),
        ];
        for (label, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!(
                    "datasheet {}: {label} must be non-negative, got {value}",
                    self.name
                )));
            }
        }
        if let Some(k) = self.k_a_per_v2 {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::Domain(format!(
                    "datasheet {}: k must be positive, got {k}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn with_k(mut self, k_a_per_v2: f64) -> Result<Self> {
        self.k_a_per_v2 = Some(k_a_per_v2);
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda_per_v: f64) -> Result<Self> {
        self.lambda_per_v = lambda_per_v;
        self.validate()?;
        Ok(self)
    }

    pub fn with_v_off(mut self, v_off_v: f64) -> Result<Self> {
        self.v_off_v = v_off_v;
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polarity(&self) -> MosfetPolarity {
        self.polarity
    }

    pub fn r_g_ohm(&self) -> f64 {
        self.r_g_ohm
    }

    pub fn c_iss_at_0v_f(&self) -> f64 {
        self.c_iss_at_0v_f
    }

    pub fn c_iss_at_vds_f(&self) -> f64 {
        self.c_iss_at_vds_f
    }

    pub fn v_th_v(&self) -> f64 {
        self.v_th_v
    }

    pub fn v_gp_v(&self) -> f64 {
        self.v_gp_v
    }

    pub fn k_a_per_v2(&self) -> Option<f64> {
        self.k_a_per_v2
    }

    pub fn lambda_per_v(&self) -> f64 {
        self.lambda_per_v
    }

    pub fn v_off_v(&self) -> f64 {
        self.v_off_v
    }

    fn require_k(&self) -> Result<f64> {
        self.k_a_per_v2.ok_or_else(|| {
            Error::Calibration(format!(
                "datasheet {} has no transconductance coefficient; set k or calibrate it",
                self.name
            ))
        })
    }

    /// Raw triode-region drain current `k[(V_GS−V_th)V_DS − V_DS²/2]`, with
    /// no operating-region gate. Used for continuity checks at the region
    /// boundary; prefer [`i_d_triode`] elsewhere.
    pub fn triode_current(&self, v_gs: f64, v_ds: f64) -> Result<f64> {
        let k = self.require_k()?;
        Ok(k * ((v_gs - self.v_th_v) * v_ds - 0.5 * v_ds * v_ds))
    }

    /// Raw saturation-region drain current `(k/2)(V_GS−V_th)²(1+λV_DS)`,
    /// with no operating-region gate.
    pub fn saturation_current(&self, v_gs: f64, v_ds: f64) -> Result<f64> {
        let k = self.require_k()?;
        let overdrive = v_gs - self.v_th_v;
        Ok(0.5 * k * overdrive * overdrive * (1.0 + self.lambda_per_v * v_ds))
    }

    /// Triode dissipation from the datasheet's default integral lower bound.
    pub fn dissipation_to(&self, v_gs: f64, v_ds: f64) -> Result<f64> {
        dissipation_integral(self, v_gs, v_ds, self.v_off_v)
    }

    /// Parses the JSON datasheet format (capacitances in picofarads).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: DatasheetFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("datasheet parse error: {e}")))?;
        file.into_datasheet()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

/// On-disk datasheet schema. Capacitances are given in picofarads, matching
/// how datasheets print them.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasheetFile {
    name: String,
    polarity: MosfetPolarity,
    r_g_ohm: f64,
    c_iss_0v_pf: f64,
    c_iss_vds_pf: f64,
    v_th_v: f64,
    v_gp_v: f64,
    #[serde(default)]
    k_a_per_v2: Option<f64>,
    #[serde(default)]
    lambda_per_v: f64,
    #[serde(default)]
    v_off_v: f64,
}

impl DatasheetFile {
    fn into_datasheet(self) -> Result<MosfetDatasheet> {
        let mut ds = MosfetDatasheet::new(
            self.name,
            self.polarity,
            self.r_g_ohm,
            self.c_iss_0v_pf * 1e-12,
            self.c_iss_vds_pf * 1e-12,
            self.v_th_v,
            self.v_gp_v,
        )?
        .with_lambda(self.lambda_per_v)?
        .with_v_off(self.v_off_v)?;
        if let Some(k) = self.k_a_per_v2 {
            ds = ds.with_k(k)?;
        }
        Ok(ds)
    }
}

/// Bias point, in magnitude convention (both voltages non-negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    v_gs: f64,
    v_ds: f64,
}

impl OperatingPoint {
    pub fn new(v_gs: f64, v_ds: f64) -> Result<Self> {
        for (label, value) in [("v_gs", v_gs), ("v_ds", v_ds)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!(
                    "{label} must be non-negative and finite, got {value}"
                )));
            }
        }
        Ok(Self { v_gs, v_ds })
    }

    pub fn v_gs(&self) -> f64 {
        self.v_gs
    }

    pub fn v_ds(&self) -> f64 {
        self.v_ds
    }
}

/// External gate-drive resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateDrive {
    r_gext_ohm: f64,
}

impl GateDrive {
    pub fn new(r_gext_ohm: f64) -> Result<Self> {
        if !r_gext_ohm.is_finite() || r_gext_ohm < 0.0 {
            return Err(Error::Domain(format!(
                "external gate resistance must be non-negative, got {r_gext_ohm}"
            )));
        }
        Ok(Self { r_gext_ohm })
    }

    pub fn r_gext_ohm(&self) -> f64 {
        self.r_gext_ohm
    }

    /// Effective total gate resistance `R_g + R_gext` for a device.
    pub fn total_resistance_ohm(&self, ds: &MosfetDatasheet) -> f64 {
        ds.r_g_ohm() + self.r_gext_ohm
    }
}

/// Operating-region classification. The `V_GS = V_th` boundary counts as
/// cutoff (both current models give zero there anyway); the
/// `V_DS = V_GS − V_th` boundary counts as saturation.
pub fn classify_mode(ds: &MosfetDatasheet, op: OperatingPoint) -> Mode {
    if op.v_gs() <= ds.v_th_v() {
        Mode::Cutoff
    } else if op.v_ds() < op.v_gs() - ds.v_th_v() {
        Mode::Triode
    } else {
        Mode::Saturation
    }
}

fn expect_mode(ds: &MosfetDatasheet, op: OperatingPoint, wanted: Mode) -> Result<()> {
    let actual = classify_mode(ds, op);
    if actual != wanted {
        return Err(Error::Mode(format!(
            "operating point (v_gs={}, v_ds={}) is in {actual} mode, not {wanted}",
            op.v_gs(),
            op.v_ds()
        )));
    }
    Ok(())
}

/// Triode-region drain current; errors outside the triode region.
pub fn i_d_triode(ds: &MosfetDatasheet, op: OperatingPoint) -> Result<f64> {
    expect_mode(ds, op, Mode::Triode)?;
    ds.triode_current(op.v_gs(), op.v_ds())
}

/// Saturation-region drain current; errors outside the saturation region.
pub fn i_d_saturation(ds: &MosfetDatasheet, op: OperatingPoint) -> Result<f64> {
    expect_mode(ds, op, Mode::Saturation)?;
    ds.saturation_current(op.v_gs(), op.v_ds())
}

/// Dissipated power `P = I_d · V_DS` at the operating point, zero in cutoff.
pub fn power(ds: &MosfetDatasheet, op: OperatingPoint) -> Result<f64> {
    let current = match classify_mode(ds, op) {
        Mode::Cutoff => 0.0,
        Mode::Triode => ds.triode_current(op.v_gs(), op.v_ds())?,
        Mode::Saturation => ds.saturation_current(op.v_gs(), op.v_ds())?,
    };
    Ok(current * op.v_ds())
}

/// Closed form of the triode-current integral over drain-source voltage:
/// `(k/2)[(V_GS−V_th)(V_DS²−V_off²) − (V_DS³−V_off³)/3]`.
///
/// Valid on `v_off ≤ v_ds ≤ v_gs − v_th`.
pub fn dissipation_integral(ds: &MosfetDatasheet, v_gs: f64, v_ds: f64, v_off: f64) -> Result<f64> {
    let k = ds.require_k()?;
    if ![v_gs, v_ds, v_off].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("integral bounds must be finite".to_string()));
    }
    let overdrive = v_gs - ds.v_th_v();
    if v_off > v_ds || v_ds > overdrive {
        return Err(Error::Domain(format!(
            "integral range requires v_off <= v_ds <= v_gs - v_th, got v_off={v_off}, v_ds={v_ds}, overdrive={overdrive}"
        )));
    }
    Ok(0.5
        * k
        * (overdrive * (v_ds * v_ds - v_off * v_off)
            - (v_ds * v_ds * v_ds - v_off * v_off * v_off) / 3.0))
}

/// Turn-on delay `(R_g + R_gext) · C_iss(V_DS) · ln(V_GS / (V_GS − V_gp))`.
///
/// Requires the gate voltage to clear the plateau.
pub fn turn_on_delay(ds: &MosfetDatasheet, drive: GateDrive, v_gs: f64) -> Result<f64> {
    if !v_gs.is_finite() || v_gs <= ds.v_gp_v() {
        return Err(Error::NoTurnOn(format!(
            "v_gs must exceed the plateau voltage {} V, got {v_gs}",
            ds.v_gp_v()
        )));
    }
    Ok(drive.total_resistance_ohm(ds) * ds.c_iss_at_vds_f() * (v_gs / (v_gs - ds.v_gp_v())).ln())
}

/// Turn-off delay `(R_g + R_gext) · C_iss(0V) · ln(V_GS / V_gp)`.
///
/// Zero exactly at the plateau voltage; below it the device never charged
/// past the plateau, so there is nothing to turn off.
pub fn turn_off_delay(ds: &MosfetDatasheet, drive: GateDrive, v_gs: f64) -> Result<f64> {
    if !v_gs.is_finite() || v_gs <= 0.0 {
        return Err(Error::Domain(format!(
            "v_gs must be positive, got {v_gs}"
        )));
    }
    if v_gs < ds.v_gp_v() {
        return Err(Error::Domain(format!(
            "v_gs {v_gs} below the plateau voltage {} V",
            ds.v_gp_v()
        )));
    }
    Ok(drive.total_resistance_ohm(ds) * ds.c_iss_at_0v_f() * (v_gs / ds.v_gp_v()).ln())
}

/// Solves the mode-appropriate current model for `k` such that it reproduces
/// `reference_current_a` at the operating point (λ taken from the datasheet).
pub fn calibrate_k(
    ds: &MosfetDatasheet,
    reference_current_a: f64,
    op: OperatingPoint,
) -> Result<f64> {
    if !reference_current_a.is_finite() || reference_current_a <= 0.0 {
        return Err(Error::Calibration(format!(
            "reference current must be positive, got {reference_current_a}"
        )));
    }
    let overdrive = op.v_gs() - ds.v_th_v();
    let per_k = match classify_mode(ds, op) {
        Mode::Cutoff => {
            return Err(Error::Calibration(
                "operating point is in cutoff; no current to match".to_string(),
            ))
        }
        Mode::Triode => overdrive * op.v_ds() - 0.5 * op.v_ds() * op.v_ds(),
        Mode::Saturation => 0.5 * overdrive * overdrive * (1.0 + ds.lambda_per_v() * op.v_ds()),
    };
    if per_k <= 0.0 {
        return Err(Error::Calibration(format!(
            "degenerate operating point (current per unit k = {per_k})"
        )));
    }
    Ok(reference_current_a / per_k)
}

/// How the four device switching delays combine into one AND-gate delay.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DelayPolicy {
    /// For the NAND stage and the inverter stage separately, take the worst
    /// switching delay over the gate's input cases, then sum the two stages.
    #[default]
    StageWorstSum,
    /// Fixed aggregate delay, stored in picoseconds; bypasses the device
    /// models for the aggregate while still reporting the constituents.
    FixedPs(f64),
}

impl DelayPolicy {
    pub fn fixed_seconds(seconds: f64) -> Result<Self> {
        if !seconds.is_finite() || seconds <= 0.0 {
            return Err(Error::Config(format!(
                "fixed delay must be positive, got {seconds}"
            )));
        }
        Ok(DelayPolicy::FixedPs(seconds * 1e12))
    }

    /// Parses `stage-worst-sum` or `fixed:<seconds>`.
    pub fn parse(text: &str) -> Result<Self> {
        if text == "stage-worst-sum" {
            return Ok(DelayPolicy::StageWorstSum);
        }
        if let Some(value) = text.strip_prefix("fixed:") {
            let seconds: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse fixed delay '{value}'")))?;
            return Self::fixed_seconds(seconds);
        }
        Err(Error::Config(format!(
            "unknown delay policy '{text}' (expected 'stage-worst-sum' or 'fixed:<seconds>')"
        )))
    }

    pub fn name(&self) -> String {
        match self {
            DelayPolicy::StageWorstSum => "stage-worst-sum".to_string(),
            DelayPolicy::FixedPs(ps) => format!("fixed:{:e}", ps * 1e-12),
        }
    }
}

/// The four constituent device delays and the aggregated AND-gate figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AndGateDelays {
    pub nmos_turn_on_s: f64,
    pub nmos_turn_off_s: f64,
    pub pmos_turn_on_s: f64,
    pub pmos_turn_off_s: f64,
    pub and_gate_delay_s: f64,
    pub policy: String,
}

fn check_polarity(ds: &MosfetDatasheet, wanted: MosfetPolarity, slot: &str) -> Result<()> {
    if ds.polarity() != wanted {
        return Err(Error::Config(format!(
            "device {} in the {slot} slot has polarity {}",
            ds.name(),
            ds.polarity()
        )));
    }
    Ok(())
}

/// Aggregates the four switching delays of the NAND+inverter AND gate into a
/// single delay according to the policy.
///
/// The AND gate is a NAND followed by an inverter. Which transistors switch
/// on and which switch off depends on the input case (both low / mixed /
/// both high); the default policy charges each stage with the slowest
/// transition over all cases and sums the two stages.
pub fn and_gate_delay(
    nmos: &MosfetDatasheet,
    pmos: &MosfetDatasheet,
    drive: GateDrive,
    v_gs: f64,
    policy: &DelayPolicy,
) -> Result<AndGateDelays> {
    check_polarity(nmos, MosfetPolarity::Nmos, "NMOS")?;
    check_polarity(pmos, MosfetPolarity::Pmos, "PMOS")?;
    let nmos_on = turn_on_delay(nmos, drive, v_gs)?;
    let nmos_off = turn_off_delay(nmos, drive, v_gs)?;
    let pmos_on = turn_on_delay(pmos, drive, v_gs)?;
    let pmos_off = turn_off_delay(pmos, drive, v_gs)?;

    let aggregated = match policy {
        DelayPolicy::StageWorstSum => {
            // NAND stage: both-low turns the PMOS pair on, mixed switches one
            // device of each kind, both-high turns the NMOS pair on.
            let nand = [
                pmos_on.max(nmos_off),
                pmos_on.max(nmos_on).max(pmos_off.max(nmos_off)),
                nmos_on.max(pmos_off),
            ]
            .into_iter()
            .fold(f64::MIN, f64::max);
            // Inverter stage: input high turns its NMOS on, input low its PMOS.
            let inverter = nmos_on.max(pmos_off).max(pmos_on.max(nmos_off));
            nand + inverter
        }
        DelayPolicy::FixedPs(ps) => ps * 1e-12,
    };

    Ok(AndGateDelays {
        nmos_turn_on_s: nmos_on,
        nmos_turn_off_s: nmos_off,
        pmos_turn_on_s: pmos_on,
        pmos_turn_off_s: pmos_off,
        and_gate_delay_s: aggregated,
        policy: policy.name(),
    })
}

/// One row of a drain-source power sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub v_ds_v: f64,
    pub i_d_a: f64,
    pub p_w: f64,
    pub mode: Mode,
}

/// Samples `P(V_DS)` at fixed gate voltage from `v_ds_start` to `v_ds_end`
/// (inclusive) in uniform steps, annotating the operating mode.
pub fn power_sweep(
    ds: &MosfetDatasheet,
    v_gs: f64,
    v_ds_start: f64,
    v_ds_end: f64,
    step: f64,
) -> Result<Vec<PowerSample>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if !v_ds_start.is_finite() || !v_ds_end.is_finite() || v_ds_start < 0.0 || v_ds_end < v_ds_start
    {
        return Err(Error::Domain(format!(
            "sweep range must satisfy 0 <= start <= end, got [{v_ds_start}, {v_ds_end}]"
        )));
    }
    // Index-based sampling keeps the grid reproducible.
    let count = ((v_ds_end - v_ds_start) / step + 1e-9).floor() as usize;
    let mut samples = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let v_ds = v_ds_start + step * i as f64;
        let op = OperatingPoint::new(v_gs, v_ds)?;
        let mode = classify_mode(ds, op);
        let i_d = match mode {
            Mode::Cutoff => 0.0,
            Mode::Triode => ds.triode_current(v_gs, v_ds)?,
            Mode::Saturation => ds.saturation_current(v_gs, v_ds)?,
        };
        samples.push(PowerSample {
            v_ds_v: v_ds,
            i_d_a: i_d,
            p_w: i_d * v_ds,
            mode,
        });
    }
    Ok(samples)
}

/// A bundled device: base datasheet constants plus published saturation
/// currents used to calibrate `k` per gate voltage (one `k` cannot fit both
/// published points).
#[derive(Debug, Clone)]
pub struct MosfetPreset {
    base: MosfetDatasheet,
    k_anchors: &'static [(f64, f64)],
}

impl MosfetPreset {
    pub fn name(&self) -> &str {
        self.base.name()
    }

    pub fn polarity(&self) -> MosfetPolarity {
        self.base.polarity()
    }

    /// Published `(v_gs, saturation current)` anchor points.
    pub fn k_anchors(&self) -> &[(f64, f64)] {
        self.k_anchors
    }

    /// Datasheet with `k` calibrated against the anchor closest to the
    /// requested gate voltage (ties resolve to the lower anchor).
    pub fn datasheet_at(&self, v_gs: f64) -> Result<MosfetDatasheet> {
        if !v_gs.is_finite() || v_gs <= 0.0 {
            return Err(Error::Domain(format!(
                "preset gate voltage must be positive, got {v_gs}"
            )));
        }
        let &(anchor_vgs, anchor_current) = self
            .k_anchors
            .iter()
            .min_by(|a, b| {
                let da = (a.0 - v_gs).abs();
                let db = (b.0 - v_gs).abs();
                da.partial_cmp(&db)
                    .unwrap()
                    .then(a.0.partial_cmp(&b.0).unwrap())
            })
            .expect("presets carry at least one anchor");
        // The anchor current is a saturation figure; v_ds = v_gs sits safely
        // in saturation since v_th > 0.
        let op = OperatingPoint::new(anchor_vgs, anchor_vgs)?;
        let k = calibrate_k(&self.base, anchor_current, op)?;
        self.base.clone().with_k(k)
    }
}

/// The bundled NMOS device (SiRA04DP-class constants).
pub fn sira04dp() -> MosfetPreset {
    MosfetPreset {
        base: MosfetDatasheet::new(
            "SiRA04DP",
            MosfetPolarity::Nmos,
            1.0,
            4000e-12,
            3600e-12,
            1.7,
            2.6,
        )
        .expect("preset constants are valid"),
        k_anchors: &[(3.3, 35.0), (5.0, 235.0)],
    }
}

/// The bundled PMOS device (SiA469DJ-class constants).
pub fn sia469dj() -> MosfetPreset {
    MosfetPreset {
        base: MosfetDatasheet::new(
            "SiA469DJ",
            MosfetPolarity::Pmos,
            9.0,
            1500e-12,
            1020e-12,
            3.0,
            2.1,
        )
        .expect("preset constants are valid"),
        k_anchors: &[(3.3, 15.0), (5.0, 90.0)],
    }
}

/// Looks a preset up by (case-insensitive) name.
pub fn preset(name: &str) -> Option<MosfetPreset> {
    match name.to_ascii_lowercase().as_str() {
        "sira04dp" => Some(sira04dp()),
        "sia469dj" => Some(sia469dj()),
        _ => None,
    }
}

pub fn preset_names() -> [&'static str; 2] {
    ["sira04dp", "sia469dj"]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bare_device(v_th: f64, k: f64, lambda: f64) -> MosfetDatasheet {
        MosfetDatasheet::new("test", MosfetPolarity::Nmos, 1.0, 1e-9, 1e-9, v_th, 2.0)
            .unwrap()
            .with_k(k)
            .unwrap()
            .with_lambda(lambda)
            .unwrap()
    }

    fn op(v_gs: f64, v_ds: f64) -> OperatingPoint {
        OperatingPoint::new(v_gs, v_ds).unwrap()
    }

    #[test]
    fn classification_follows_bias() {
        let ds = sira04dp().datasheet_at(3.3).unwrap();
        assert_eq!(classify_mode(&ds, op(1.0, 0.3)), Mode::Cutoff);
        assert_eq!(classify_mode(&ds, op(1.7, 0.3)), Mode::Cutoff);
        assert_eq!(classify_mode(&ds, op(3.3, 0.5)), Mode::Triode);
        assert_eq!(classify_mode(&ds, op(3.3, 1.6)), Mode::Saturation);
        assert_eq!(classify_mode(&ds, op(3.3, 5.0)), Mode::Saturation);
    }

    #[test]
    fn triode_current_examples() {
        let ds = bare_device(1.0, 1.0, 0.0);
        assert_relative_eq!(
            i_d_triode(&ds, op(2.0, 0.5)).unwrap(),
            0.375,
            max_relative = 1e-12
        );
        assert_eq!(i_d_triode(&ds, op(2.0, 0.0)).unwrap(), 0.0);

        let ds2 = bare_device(1.0, 2.0, 0.0);
        assert_relative_eq!(
            i_d_triode(&ds2, op(3.0, 1.0)).unwrap(),
            3.0,
            max_relative = 1e-12
        );
        // Saturation point rejected.
        assert!(matches!(i_d_triode(&ds, op(2.0, 1.0)), Err(Error::Mode(_))));
    }

    #[test]
    fn saturation_current_examples() {
        let ds = bare_device(1.0, 1.0, 0.0);
        assert_relative_eq!(
            i_d_saturation(&ds, op(2.0, 1.5)).unwrap(),
            0.5,
            max_relative = 1e-12
        );
        // λ = 0 makes the current independent of v_ds.
        assert_eq!(
            i_d_saturation(&ds, op(2.0, 1.0)).unwrap(),
            i_d_saturation(&ds, op(2.0, 9.0)).unwrap()
        );

        let ds2 = bare_device(1.0, 2.0, 0.01);
        assert_relative_eq!(
            i_d_saturation(&ds2, op(3.0, 5.0)).unwrap(),
            4.2,
            max_relative = 1e-12
        );
        assert!(matches!(
            i_d_saturation(&ds, op(2.0, 0.5)),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn power_examples() {
        let ds = bare_device(1.0, 1.0, 0.0);
        assert_eq!(power(&ds, op(0.5, 3.0)).unwrap(), 0.0);
        assert_relative_eq!(
            power(&ds, op(2.0, 0.5)).unwrap(),
            0.1875,
            max_relative = 1e-12
        );
        assert_relative_eq!(power(&ds, op(2.0, 2.0)).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn dissipation_integral_examples() {
        let ds = bare_device(1.0, 1.0, 0.0);
        assert_eq!(dissipation_integral(&ds, 2.0, 0.3, 0.3).unwrap(), 0.0);
        assert_relative_eq!(
            dissipation_integral(&ds, 2.0, 0.5, 0.0).unwrap(),
            0.10416666666666667,
            max_relative = 1e-12
        );
        // Non-zero lower bound: 1.5[2(1 - 0.04) - (1 - 0.008)/3].
        let ds3 = bare_device(1.0, 3.0, 0.0);
        assert_relative_eq!(
            dissipation_integral(&ds3, 3.0, 1.0, 0.2).unwrap(),
            2.384,
            max_relative = 1e-12
        );
        // Out of triode range.
        assert!(dissipation_integral(&ds, 2.0, 1.5, 0.0).is_err());
        assert!(dissipation_integral(&ds, 2.0, 0.2, 0.5).is_err());
    }

    #[test]
    fn dissipation_default_lower_bound_comes_from_datasheet() {
        let ds = bare_device(1.0, 3.0, 0.0).with_v_off(0.2).unwrap();
        assert_relative_eq!(
            ds.dissipation_to(3.0, 1.0).unwrap(),
            dissipation_integral(&ds, 3.0, 1.0, 0.2).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn delay_regression_at_5v() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(5.0).unwrap();
        let pmos = sia469dj().datasheet_at(5.0).unwrap();
        assert_relative_eq!(
            turn_on_delay(&nmos, drive, 5.0).unwrap(),
            2.906517933317594e-8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            turn_off_delay(&nmos, drive, 5.0).unwrap(),
            2.8772764565893216e-8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            turn_on_delay(&pmos, drive, 5.0).unwrap(),
            1.0556812660059605e-8,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            turn_off_delay(&pmos, drive, 5.0).unwrap(),
            2.472376617958461e-8,
            max_relative = 1e-12
        );
    }

    #[test]
    fn delay_guards() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(5.0).unwrap();
        // At or below the plateau the gate never turns on.
        assert!(matches!(
            turn_on_delay(&nmos, drive, 2.6),
            Err(Error::NoTurnOn(_))
        ));
        assert!(matches!(
            turn_on_delay(&nmos, drive, 1.0),
            Err(Error::NoTurnOn(_))
        ));
        // Turn-off is exactly zero at the plateau.
        assert_eq!(turn_off_delay(&nmos, drive, 2.6).unwrap(), 0.0);
        assert!(turn_off_delay(&nmos, drive, 0.0).is_err());
        assert!(turn_off_delay(&nmos, drive, 1.0).is_err());
    }

    #[test]
    fn turn_on_diverges_towards_plateau() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(5.0).unwrap();
        let close = turn_on_delay(&nmos, drive, 2.6 + 1e-9).unwrap();
        let closer = turn_on_delay(&nmos, drive, 2.6 + 1e-12).unwrap();
        assert!(closer > close);
        assert!(closer > 1e-6);
    }

    #[test]
    fn calibrate_k_examples() {
        let ds = MosfetDatasheet::new("cal", MosfetPolarity::Nmos, 0.0, 1e-9, 1e-9, 1.0, 2.0)
            .unwrap();
        assert_relative_eq!(
            calibrate_k(&ds, 0.5, op(2.0, 1.5)).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            calibrate_k(&ds, 0.375, op(2.0, 0.5)).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!(calibrate_k(&ds, 0.0, op(2.0, 1.5)).is_err());
        assert!(calibrate_k(&ds, 1.0, op(0.5, 1.0)).is_err()); // cutoff
        assert!(calibrate_k(&ds, 1.0, op(2.0, 0.0)).is_err()); // degenerate
    }

    #[test]
    fn preset_anchors_reproduce_published_currents() {
        let nmos33 = sira04dp().datasheet_at(3.3).unwrap();
        assert_relative_eq!(
            nmos33.saturation_current(3.3, 3.3).unwrap(),
            35.0,
            max_relative = 1e-12
        );
        let nmos5 = sira04dp().datasheet_at(5.0).unwrap();
        assert_relative_eq!(
            nmos5.saturation_current(5.0, 5.0).unwrap(),
            235.0,
            max_relative = 1e-12
        );
        let pmos33 = sia469dj().datasheet_at(3.3).unwrap();
        assert_relative_eq!(
            pmos33.saturation_current(3.3, 3.3).unwrap(),
            15.0,
            max_relative = 1e-12
        );
        let pmos5 = sia469dj().datasheet_at(5.0).unwrap();
        assert_relative_eq!(
            pmos5.saturation_current(5.0, 5.0).unwrap(),
            90.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn preset_lookup() {
        assert!(preset("sira04dp").is_some());
        assert!(preset("SiA469DJ").is_some());
        assert!(preset("unknown").is_none());
    }

    #[test]
    fn and_gate_delay_default_policy() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(5.0).unwrap();
        let pmos = sia469dj().datasheet_at(5.0).unwrap();
        let delays =
            and_gate_delay(&nmos, &pmos, drive, 5.0, &DelayPolicy::StageWorstSum).unwrap();
        // Both stages are dominated by the NMOS turn-on at 5 V.
        assert_relative_eq!(
            delays.and_gate_delay_s,
            2.0 * delays.nmos_turn_on_s,
            max_relative = 1e-12
        );
        assert_eq!(delays.policy, "stage-worst-sum");
    }

    #[test]
    fn and_gate_delay_reports_constituents_at_low_drive() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(3.3).unwrap();
        let pmos = sia469dj().datasheet_at(3.3).unwrap();
        let delays =
            and_gate_delay(&nmos, &pmos, drive, 3.3, &DelayPolicy::StageWorstSum).unwrap();
        // The slow NMOS turn-on dominates both stages at 3.3 V.
        assert_relative_eq!(delays.nmos_turn_on_s, 6.140365753148223e-8, max_relative = 1e-9);
        assert_relative_eq!(delays.nmos_turn_off_s, 1.049008503157992e-8, max_relative = 1e-9);
        assert_relative_eq!(delays.pmos_turn_on_s, 1.9604825668328943e-8, max_relative = 1e-9);
        assert_relative_eq!(delays.pmos_turn_off_s, 1.2881576026677127e-8, max_relative = 1e-9);
        assert_relative_eq!(
            delays.and_gate_delay_s,
            2.0 * delays.nmos_turn_on_s,
            max_relative = 1e-12
        );
    }

    #[test]
    fn and_gate_delay_fixed_policy() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(5.0).unwrap();
        let pmos = sia469dj().datasheet_at(5.0).unwrap();
        let policy = DelayPolicy::fixed_seconds(80e-9).unwrap();
        let delays = and_gate_delay(&nmos, &pmos, drive, 5.0, &policy).unwrap();
        assert_relative_eq!(delays.and_gate_delay_s, 80e-9, max_relative = 1e-12);
        // Constituents still reported.
        assert!(delays.nmos_turn_on_s > 0.0);
    }

    #[test]
    fn and_gate_delay_symmetric_devices() {
        // All four delays equal => aggregate is twice the common delay.
        let sym_n = MosfetDatasheet::new("symn", MosfetPolarity::Nmos, 0.0, 1e-9, 1e-9, 1.0, 2.0)
            .unwrap();
        let sym_p = MosfetDatasheet::new("symp", MosfetPolarity::Pmos, 0.0, 1e-9, 1e-9, 1.0, 2.0)
            .unwrap();
        let drive = GateDrive::new(10.0).unwrap();
        // v_gs = 4 makes ln(v/(v-vgp)) = ln(4/2) = ln(4/2) and ln(v/vgp) = ln(2): equal.
        let delays =
            and_gate_delay(&sym_n, &sym_p, drive, 4.0, &DelayPolicy::StageWorstSum).unwrap();
        assert_relative_eq!(
            delays.and_gate_delay_s,
            2.0 * delays.nmos_turn_on_s,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            delays.nmos_turn_on_s,
            delays.pmos_turn_off_s,
            max_relative = 1e-12
        );
    }

    #[test]
    fn and_gate_delay_checks_polarity() {
        let drive = GateDrive::new(10.0).unwrap();
        let nmos = sira04dp().datasheet_at(5.0).unwrap();
        let pmos = sia469dj().datasheet_at(5.0).unwrap();
        assert!(matches!(
            and_gate_delay(&pmos, &nmos, drive, 5.0, &DelayPolicy::StageWorstSum),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn delay_policy_parsing() {
        assert_eq!(
            DelayPolicy::parse("stage-worst-sum").unwrap(),
            DelayPolicy::StageWorstSum
        );
        let fixed = DelayPolicy::parse("fixed:80e-9").unwrap();
        assert_eq!(fixed, DelayPolicy::FixedPs(80000.0));
        assert!(DelayPolicy::parse("nonsense").is_err());
        assert!(DelayPolicy::parse("fixed:abc").is_err());
        assert!(DelayPolicy::parse("fixed:-1").is_err());
    }

    #[test]
    fn power_sweep_cutoff_voltage_gives_zero_curve() {
        let ds = sira04dp().datasheet_at(3.3).unwrap();
        let samples = power_sweep(&ds, 1.0, 0.0, 3.0, 0.5).unwrap();
        assert_eq!(samples.len(), 7);
        assert!(samples.iter().all(|s| s.p_w == 0.0 && s.mode == Mode::Cutoff));
    }

    #[test]
    fn power_sweep_plateaus_at_published_current() {
        let ds = sira04dp().datasheet_at(3.3).unwrap();
        let samples = power_sweep(&ds, 3.3, 0.0, 3.3, 0.1).unwrap();
        let last = samples.last().unwrap();
        assert_eq!(last.mode, Mode::Saturation);
        assert_relative_eq!(last.i_d_a, 35.0, max_relative = 1e-12);
        assert_relative_eq!(last.p_w, 35.0 * last.v_ds_v, max_relative = 1e-12);
    }

    #[test]
    fn power_sweep_mode_boundary_is_continuous() {
        let ds = bare_device(1.0, 3.0, 0.0);
        let boundary = 3.0 - 1.0;
        let triode = ds.triode_current(3.0, boundary).unwrap();
        let saturation = ds.saturation_current(3.0, boundary).unwrap();
        assert_relative_eq!(triode, saturation, max_relative = 1e-12);
    }

    #[test]
    fn power_sweep_rejects_bad_ranges() {
        let ds = bare_device(1.0, 1.0, 0.0);
        assert!(power_sweep(&ds, 2.0, 0.0, 1.0, 0.0).is_err());
        assert!(power_sweep(&ds, 2.0, 1.0, 0.5, 0.1).is_err());
        assert!(power_sweep(&ds, 2.0, -1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn datasheet_json_roundtrip() {
        let json = r#"{
            "name": "custom",
            "polarity": "nmos",
            "r_g_ohm": 2.5,
            "c_iss_0v_pf": 1200,
            "c_iss_vds_pf": 900,
            "v_th_v": 1.2,
            "v_gp_v": 2.2,
            "k_a_per_v2": 12.0
        }"#;
        let ds = MosfetDatasheet::from_json_str(json).unwrap();
        assert_eq!(ds.name(), "custom");
        assert_eq!(ds.polarity(), MosfetPolarity::Nmos);
        assert_relative_eq!(ds.c_iss_at_0v_f(), 1.2e-9, max_relative = 1e-12);
        assert_relative_eq!(ds.c_iss_at_vds_f(), 0.9e-9, max_relative = 1e-12);
        assert_eq!(ds.k_a_per_v2(), Some(12.0));
        assert_eq!(ds.lambda_per_v(), 0.0);
    }

    #[test]
    fn datasheet_json_rejects_unknown_and_invalid() {
        assert!(MosfetDatasheet::from_json_str("{\"name\": \"x\"}").is_err());
        let with_typo = r#"{
            "name": "x", "polarity": "nmos", "r_g_ohm": 1.0,
            "c_iss_0v_pf": 10, "c_iss_vds_pf": 10, "v_th_v": 1.0, "v_gp_v": 2.0,
            "vth_typo": 3.0
        }"#;
        assert!(MosfetDatasheet::from_json_str(with_typo).is_err());
        let negative_cap = r#"{
            "name": "x", "polarity": "pmos", "r_g_ohm": 1.0,
            "c_iss_0v_pf": -10, "c_iss_vds_pf": 10, "v_th_v": 1.0, "v_gp_v": 2.0
        }"#;
        assert!(MosfetDatasheet::from_json_str(negative_cap).is_err());
    }

    #[test]
    fn missing_k_fails_current_models_but_not_delays() {
        let ds = MosfetDatasheet::new("nok", MosfetPolarity::Nmos, 1.0, 1e-9, 1e-9, 1.0, 2.0)
            .unwrap();
        assert!(matches!(
            power(&ds, op(3.0, 1.0)),
            Err(Error::Calibration(_))
        ));
        let drive = GateDrive::new(10.0).unwrap();
        assert!(turn_on_delay(&ds, drive, 5.0).is_ok());
    }

    proptest! {
        #[test]
        fn currents_continuous_at_region_boundary(
            k in 0.1f64..100.0,
            v_th in 0.2f64..3.0,
            overdrive in 0.1f64..5.0,
        ) {
            let ds = bare_device(v_th, k, 0.0);
            let v_gs = v_th + overdrive;
            let triode = ds.triode_current(v_gs, overdrive).unwrap();
            let saturation = ds.saturation_current(v_gs, overdrive).unwrap();
            prop_assert!((triode - saturation).abs() <= 1e-12 * triode.abs().max(1e-300));
        }

        #[test]
        fn turn_on_decreases_and_turn_off_increases_with_vgs(
            lo_step in 0.01f64..1.0,
            hi_step in 0.01f64..1.0,
        ) {
            let drive = GateDrive::new(10.0).unwrap();
            let ds = sira04dp().datasheet_at(5.0).unwrap();
            let v1 = ds.v_gp_v() + 0.2 + lo_step;
            let v2 = v1 + hi_step;
            prop_assert!(turn_on_delay(&ds, drive, v2).unwrap() < turn_on_delay(&ds, drive, v1).unwrap());
            prop_assert!(turn_off_delay(&ds, drive, v2).unwrap() > turn_off_delay(&ds, drive, v1).unwrap());
        }

        #[test]
        fn delays_scale_linearly_with_total_resistance(
            r_a in 0.0f64..100.0,
            r_b in 0.0f64..100.0,
            v_gs in 3.0f64..10.0,
        ) {
            let ds = sira04dp().datasheet_at(5.0).unwrap();
            let (da, db) = (GateDrive::new(r_a).unwrap(), GateDrive::new(r_b).unwrap());
            let (ta, tb) = (
                turn_on_delay(&ds, da, v_gs).unwrap(),
                turn_on_delay(&ds, db, v_gs).unwrap(),
            );
            let (ra, rb) = (ds.r_g_ohm() + r_a, ds.r_g_ohm() + r_b);
            prop_assert!((ta * rb - tb * ra).abs() <= 1e-12 * (ta * rb).abs().max(1e-300));
        }

        #[test]
        fn calibration_is_right_inverse(
            k_true in 0.05f64..500.0,
            v_th in 0.2f64..3.0,
            overdrive in 0.1f64..4.0,
            frac in 0.05f64..0.95,
        ) {
            let ds_true = bare_device(v_th, k_true, 0.0);
            let v_gs = v_th + overdrive;
            // Triode point.
            let v_ds = overdrive * frac;
            let reference = ds_true.triode_current(v_gs, v_ds).unwrap();
            prop_assume!(reference > 0.0);
            let blank = bare_device(v_th, 1.0, 0.0);
            let k = calibrate_k(&blank, reference, op(v_gs, v_ds)).unwrap();
            let check = blank.with_k(k).unwrap().triode_current(v_gs, v_ds).unwrap();
            prop_assert!((check - reference).abs() <= 1e-12 * reference);
        }

        #[test]
        fn power_zero_in_cutoff_positive_elsewhere(
            k in 0.1f64..100.0,
            v_th in 0.2f64..3.0,
            overdrive in 0.05f64..4.0,
            v_ds_frac in 0.01f64..2.0,
        ) {
            let ds = bare_device(v_th, k, 0.0);
            // Anywhere below threshold: exactly zero.
            prop_assert_eq!(power(&ds, op(v_th * 0.9, overdrive)).unwrap(), 0.0);
            // Above threshold with drain bias: strictly positive.
            let v_gs = v_th + overdrive;
            let v_ds = overdrive * v_ds_frac;
            prop_assert!(power(&ds, op(v_gs, v_ds)).unwrap() > 0.0);
        }

        #[test]
        fn power_sweep_monotone_for_nonnegative_lambda(
            k in 0.1f64..100.0,
            v_th in 0.2f64..3.0,
            overdrive in 0.2f64..4.0,
            lambda in 0.0f64..0.2,
        ) {
            let ds = bare_device(v_th, k, lambda);
            let v_gs = v_th + overdrive;
            let samples = power_sweep(&ds, v_gs, 0.0, v_gs, v_gs / 64.0).unwrap();
            for pair in samples.windows(2) {
                prop_assert!(pair[1].p_w >= pair[0].p_w - 1e-12);
            }
        }
    }
}
