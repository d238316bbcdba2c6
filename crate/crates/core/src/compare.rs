//! Runs both receiver substrates over a verification codeword set and
//! assembles the latency/power comparison report.
//!
//! Latencies are carried in picoseconds internally so that ratios of
//! round-number delays (say 80 ns per gate against 10 ps per stage) stay
//! exact in floating point; report fields are converted to SI seconds.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::device::{
    and_gate_delay, classify_mode, preset, AndGateDelays, DelayPolicy, GateDrive, Mode,
    MosfetDatasheet, MosfetPolarity, OperatingPoint,
};
use crate::digital::{decode_digital, encode_digital, propagate_digital, Polarity};
use crate::error::{Error, Result};
use crate::fwht::HadamardOrder;
use crate::optical::{
    decode_optical, encode_optical, optical_latency, optical_power, propagate_optical_with,
    BeamsplitterSpec, ChipGeometry, PropagationOptions,
};
use crate::topology::{beamsplitter_count, build_butterfly, depth, HadamardPlan};

/// Report schema version stamped into every JSON report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A discrete AND gate costs six transistors: four in the NAND, two in the
/// inverter behind it.
pub const TRANSISTORS_PER_AND_GATE: u64 = 6;

/// One logical beamsplitter is four parallel AND gates.
pub const AND_GATES_PER_LOGICAL_BEAMSPLITTER: u64 = 4;

/// Codewords sampled per compare run when the order is too large to sweep
/// exhaustively.
pub const VERIFICATION_SAMPLE_SIZE: usize = 64;

/// Orders up to this bound verify every codeword.
pub const EXHAUSTIVE_VERIFICATION_MAX_ORDER: u32 = 10;

// Fixed seed keeps sampled verification sets, and therefore reports,
// reproducible run to run.
const VERIFICATION_SAMPLE_SEED: u64 = 0x00d1_ce5e_ed00;

/// Where a device's constants come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeviceSource {
    /// A bundled preset, by name.
    Preset(String),
    /// A JSON datasheet file.
    File(PathBuf),
}

impl DeviceSource {
    /// Treats known preset names as presets and anything else as a path.
    pub fn parse(text: &str) -> Self {
        if preset(text).is_some() {
            DeviceSource::Preset(text.to_ascii_lowercase())
        } else {
            DeviceSource::File(PathBuf::from(text))
        }
    }

    pub fn resolve(&self, v_gs: f64) -> Result<MosfetDatasheet> {
        match self {
            DeviceSource::Preset(name) => preset(name)
                .ok_or_else(|| Error::Config(format!("unknown device preset '{name}'")))?
                .datasheet_at(v_gs),
            DeviceSource::File(path) => MosfetDatasheet::from_json_file(path),
        }
    }
}

/// Which beamsplitter phase convention the optical network uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `φ = 0`; concentrates energy with no extra phase shifters.
    #[default]
    Zero,
    /// `φ = π/2`; needs per-stage phase correction to decode.
    QuarterWave,
}

impl PhaseConvention {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "0" => Ok(PhaseConvention::Zero),
            "pi2" => Ok(PhaseConvention::QuarterWave),
            other => Err(Error::Config(format!(
                "unknown phase convention '{other}' (expected '0' or 'pi2')"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhaseConvention::Zero => "0",
            PhaseConvention::QuarterWave => "pi2",
        }
    }

    pub fn spec(&self) -> BeamsplitterSpec {
        match self {
            PhaseConvention::Zero => BeamsplitterSpec::hadamard(),
            PhaseConvention::QuarterWave => BeamsplitterSpec::quadrature(),
        }
    }
}

/// Gate-voltage sweep bounds for delay-curve emission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySweep {
    /// Lower bound; defaults to each device's plateau voltage plus 0.1 V.
    pub v_gs_min: Option<f64>,
    pub v_gs_max: f64,
    pub step_v: f64,
}

impl Default for DelaySweep {
    fn default() -> Self {
        Self {
            v_gs_min: None,
            v_gs_max: 10.0,
            step_v: 0.05,
        }
    }
}

/// Full configuration of one comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub order: u32,
    /// Gate drive voltage for the electronic substrate, volts.
    pub v_gs: f64,
    /// External gate resistance, ohms.
    pub r_gext_ohm: f64,
    pub nmos: DeviceSource,
    pub pmos: DeviceSource,
    pub phi: PhaseConvention,
    pub phase_correction: bool,
    pub geometry: ChipGeometry,
    /// Overrides the geometry-derived per-stage optical delay, picoseconds.
    pub stage_delay_ps: Option<f64>,
    pub policy: DelayPolicy,
    /// Informational only; fiber links are not modeled.
    pub link_propagation_s: Option<f64>,
    pub delay_sweep: DelaySweep,
    /// Destination for emitted files and decode-failure diagnostics.
    pub out_dir: Option<PathBuf>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            order: 4,
            v_gs: 5.0,
            r_gext_ohm: 10.0,
            nmos: DeviceSource::Preset("sira04dp".to_string()),
            pmos: DeviceSource::Preset("sia469dj".to_string()),
            phi: PhaseConvention::Zero,
            phase_correction: false,
            geometry: ChipGeometry::default(),
            stage_delay_ps: None,
            policy: DelayPolicy::StageWorstSum,
            link_propagation_s: None,
            delay_sweep: DelaySweep::default(),
            out_dir: None,
        }
    }
}

/// Power drawn at one drain-source sample point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPointPower {
    pub v_ds_v: f64,
    pub i_d_a: f64,
    pub power_w: f64,
    pub mode: Mode,
}

/// Per-device operating-point power summary at the configured gate voltage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevicePowerSummary {
    pub name: String,
    pub polarity: MosfetPolarity,
    pub v_gs_v: f64,
    pub k_a_per_v2: Option<f64>,
    /// Power in the cutoff region; identically zero.
    pub cutoff_power_w: f64,
    /// Samples at the triode-range midpoint and at full drain swing.
    pub samples: Vec<OperatingPointPower>,
}

/// Paired latency/power results for the two substrates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub order: u32,
    pub modes: u64,
    pub depth: u32,
    pub beamsplitter_count: u64,
    pub transistor_count: u64,
    pub verified_codewords: u64,
    pub optical_stage_delay_s: f64,
    pub optical_latency_s: f64,
    pub and_gate_delay_s: f64,
    pub electronic_latency_s: f64,
    pub latency_ratio: f64,
    pub optical_runtime_power_w: f64,
    pub tuning_power_excluded: bool,
    pub delays: AndGateDelays,
    pub device_power: Vec<DevicePowerSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_propagation_s: Option<f64>,
}

/// Runs the verification set through both substrates, then assembles the
/// latency/power report.
pub fn run_compare(config: &CompareConfig) -> Result<ComparisonReport> {
    if !config.v_gs.is_finite() || config.v_gs <= 0.0 {
        return Err(Error::Config(format!(
            "gate voltage must be positive, got {}",
            config.v_gs
        )));
    }
    let order = HadamardOrder::new(config.order)?;
    let plan = build_butterfly(order);

    let nmos = resolve_with_polarity(&config.nmos, config.v_gs, MosfetPolarity::Nmos)?;
    let pmos = resolve_with_polarity(&config.pmos, config.v_gs, MosfetPolarity::Pmos)?;
    let drive = GateDrive::new(config.r_gext_ohm)?;
    let delays = and_gate_delay(&nmos, &pmos, drive, config.v_gs, &config.policy)?;

    let verified = verify_decoding(&plan, config)?;

    let stage_count = f64::from(depth(order));
    let and_delay_ps = match config.policy {
        DelayPolicy::FixedPs(ps) => ps,
        DelayPolicy::StageWorstSum => delays.and_gate_delay_s * 1e12,
    };
    let electronic_ps = stage_count * and_delay_ps;

    let (stage_delay_ps, optical_ps) = optical_picoseconds(config, &plan, stage_count)?;
    let latency_ratio = electronic_ps / optical_ps;

    let power = optical_power();
    Ok(ComparisonReport {
        schema_version: REPORT_SCHEMA_VERSION,
        order: order.get(),
        modes: order.modes() as u64,
        depth: depth(order),
        beamsplitter_count: beamsplitter_count(order),
        transistor_count: transistor_count(order),
        verified_codewords: verified,
        optical_stage_delay_s: stage_delay_ps * 1e-12,
        optical_latency_s: optical_ps * 1e-12,
        and_gate_delay_s: and_delay_ps * 1e-12,
        electronic_latency_s: electronic_ps * 1e-12,
        latency_ratio,
        optical_runtime_power_w: power.runtime_power_w,
        tuning_power_excluded: power.tuning_power_excluded,
        delays,
        device_power: vec![
            device_power_summary(&nmos, config.v_gs)?,
            device_power_summary(&pmos, config.v_gs)?,
        ],
        link_propagation_s: config.link_propagation_s,
    })
}

/// Transistor cost of the electronic receiver:
/// 6 per AND gate × 4 gates per logical beamsplitter × beamsplitter count.
pub fn transistor_count(order: HadamardOrder) -> u64 {
    TRANSISTORS_PER_AND_GATE * AND_GATES_PER_LOGICAL_BEAMSPLITTER * beamsplitter_count(order)
}

fn resolve_with_polarity(
    source: &DeviceSource,
    v_gs: f64,
    wanted: MosfetPolarity,
) -> Result<MosfetDatasheet> {
    let ds = source.resolve(v_gs)?;
    if ds.polarity() != wanted {
        return Err(Error::Config(format!(
            "device {} has polarity {}, expected {}",
            ds.name(),
            ds.polarity(),
            wanted
        )));
    }
    Ok(ds)
}

fn optical_picoseconds(
    config: &CompareConfig,
    plan: &HadamardPlan,
    stage_count: f64,
) -> Result<(f64, f64)> {
    match (config.stage_delay_ps, config.geometry.full_chip_length_m()) {
        (Some(ps), _) => {
            if !ps.is_finite() || ps <= 0.0 {
                return Err(Error::Config(format!(
                    "per-stage optical delay must be positive, got {ps} ps"
                )));
            }
            Ok((ps, stage_count * ps))
        }
        (None, Some(_)) => {
            let total_ps = optical_latency(plan, &config.geometry) * 1e12;
            Ok((total_ps / stage_count, total_ps))
        }
        (None, None) => {
            let stage_ps = config.geometry.stage_traversal_seconds() * 1e12;
            Ok((stage_ps, stage_count * stage_ps))
        }
    }
}

/// Codewords checked before a report is issued: every message for small
/// orders, a fixed-seed random sample above that.
pub fn verification_codewords(order: HadamardOrder) -> Vec<usize> {
    if order.get() <= EXHAUSTIVE_VERIFICATION_MAX_ORDER {
        return (0..order.modes()).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFICATION_SAMPLE_SEED);
    let mut set = Vec::with_capacity(VERIFICATION_SAMPLE_SIZE);
    while set.len() < VERIFICATION_SAMPLE_SIZE {
        let j = rng.gen_range(0..order.modes());
        if !set.contains(&j) {
            set.push(j);
        }
    }
    set
}

fn verify_decoding(plan: &HadamardPlan, config: &CompareConfig) -> Result<u64> {
    let order = plan.order();
    let spec = config.phi.spec();
    let options = PropagationOptions {
        phase_correction: config.phase_correction,
    };
    let alpha = Complex64::new(1.0, 0.0);
    let codewords = verification_codewords(order);

    for &j in &codewords {
        let input = encode_optical(j, order, alpha)?;
        let output = propagate_optical_with(plan, &input, &spec, options)?;
        let (idx, share) = decode_optical(&output)?;
        if idx != j || share < 1.0 - 1e-9 {
            dump_diagnostics(plan, config, j, &spec, options)?;
            return Err(Error::DecodeFailure(format!(
                "optical substrate decoded codeword {j} as mode {idx} with energy share {share:e} \
                 (phi={}, phase_correction={})",
                config.phi.name(),
                config.phase_correction
            )));
        }

        let digital_in = encode_digital(j, order, false)?;
        let digital_out = propagate_digital(plan, &digital_in)?;
        match decode_digital(&digital_out) {
            Ok((idx, Polarity::Plus)) if idx == j => {}
            other => {
                dump_diagnostics(plan, config, j, &spec, options)?;
                return Err(Error::DecodeFailure(format!(
                    "digital substrate decoded codeword {j} as {other:?}"
                )));
            }
        }
    }
    Ok(codewords.len() as u64)
}

/// On decode failure, leave per-stage traces of the offending codeword next
/// to the other outputs (when an output directory is configured).
fn dump_diagnostics(
    plan: &HadamardPlan,
    config: &CompareConfig,
    j: usize,
    spec: &BeamsplitterSpec,
    options: PropagationOptions,
) -> Result<()> {
    let Some(dir) = &config.out_dir else {
        return Ok(());
    };
    let order = plan.order();
    let diag = dir.join("diagnostics");

    let optical_in = encode_optical(j, order, Complex64::new(1.0, 0.0))?;
    if let Ok(trace) = crate::optical::propagate_optical_trace(plan, &optical_in, spec, options) {
        let csv = crate::emit::render_optical_trace_csv(&trace);
        crate::emit::write_text_file(diag.join(format!("optical_trace_j{j}.csv")), &csv)?;
    }
    let digital_in = encode_digital(j, order, false)?;
    if let Ok(trace) = crate::digital::propagate_digital_trace(plan, &digital_in) {
        let csv = crate::emit::render_digital_trace_csv(&trace);
        crate::emit::write_text_file(diag.join(format!("digital_trace_j{j}.csv")), &csv)?;
    }
    Ok(())
}

fn device_power_summary(ds: &MosfetDatasheet, v_gs: f64) -> Result<DevicePowerSummary> {
    let overdrive = (v_gs - ds.v_th_v()).max(0.0);
    // Midpoint of the triode range plus the full-swing point.
    let sample_points = [0.5 * overdrive, v_gs];
    let mut samples = Vec::with_capacity(sample_points.len());
    for v_ds in sample_points {
        let op = OperatingPoint::new(v_gs, v_ds)?;
        let mode = classify_mode(ds, op);
        let i_d = match mode {
            Mode::Cutoff => 0.0,
            Mode::Triode => ds.triode_current(v_gs, v_ds)?,
            Mode::Saturation => ds.saturation_current(v_gs, v_ds)?,
        };
        samples.push(OperatingPointPower {
            v_ds_v: v_ds,
            i_d_a: i_d,
            power_w: i_d * v_ds,
            mode,
        });
    }
    Ok(DevicePowerSummary {
        name: ds.name().to_string(),
        polarity: ds.polarity(),
        v_gs_v: v_gs,
        k_a_per_v2: ds.k_a_per_v2(),
        cutoff_power_w: 0.0,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn headline_ratio_is_exact_with_round_delays() {
        for order in [1u32, 10, 16] {
            let config = CompareConfig {
                order,
                policy: DelayPolicy::fixed_seconds(80e-9).unwrap(),
                stage_delay_ps: Some(10.0),
                ..CompareConfig::default()
            };
            let report = run_compare(&config).unwrap();
            assert_eq!(report.latency_ratio, 8000.0, "order {order}");
            assert_eq!(report.optical_runtime_power_w, 0.0);
            assert!(report.tuning_power_excluded);
            assert_relative_eq!(
                report.electronic_latency_s,
                80e-9 * f64::from(order),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                report.optical_latency_s,
                10e-12 * f64::from(order),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn identical_stage_delays_give_unit_ratio() {
        let config = CompareConfig {
            order: 1,
            policy: DelayPolicy::fixed_seconds(10e-12).unwrap(),
            stage_delay_ps: Some(10.0),
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        assert_eq!(report.latency_ratio, 1.0);
    }

    #[test]
    fn report_counts_follow_formulas() {
        let config = CompareConfig {
            order: 5,
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        assert_eq!(report.beamsplitter_count, 80);
        assert_eq!(report.transistor_count, 24 * 80);
        assert_eq!(report.depth, 5);
        assert_eq!(report.modes, 32);
        assert_eq!(report.verified_codewords, 32);
    }

    #[test]
    fn default_geometry_drives_optical_latency() {
        let config = CompareConfig {
            order: 3,
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        let per_stage = 2e-3 / crate::optical::SPEED_OF_LIGHT_M_PER_S;
        assert_relative_eq!(report.optical_stage_delay_s, per_stage, max_relative = 1e-12);
        assert_relative_eq!(
            report.optical_latency_s,
            3.0 * per_stage,
            max_relative = 1e-12
        );
        // Consistency: latencies recomputable from report fields.
        assert_relative_eq!(
            report.electronic_latency_s,
            f64::from(report.depth) * report.and_gate_delay_s,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            report.latency_ratio,
            report.electronic_latency_s / report.optical_latency_s,
            max_relative = 1e-12
        );
    }

    #[test]
    fn quarter_wave_without_correction_fails_decode() {
        let config = CompareConfig {
            order: 2,
            phi: PhaseConvention::QuarterWave,
            phase_correction: false,
            ..CompareConfig::default()
        };
        assert!(matches!(
            run_compare(&config),
            Err(Error::DecodeFailure(_))
        ));
    }

    #[test]
    fn quarter_wave_with_correction_decodes() {
        let config = CompareConfig {
            order: 3,
            phi: PhaseConvention::QuarterWave,
            phase_correction: true,
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        assert_eq!(report.verified_codewords, 8);
    }

    #[test]
    fn sampled_verification_is_deterministic() {
        let order = HadamardOrder::new(12).unwrap();
        let a = verification_codewords(order);
        let b = verification_codewords(order);
        assert_eq!(a, b);
        assert_eq!(a.len(), VERIFICATION_SAMPLE_SIZE);
        assert!(a.iter().all(|j| *j < order.modes()));
    }

    #[test]
    fn power_summary_uses_both_regions() {
        let config = CompareConfig {
            order: 2,
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        assert_eq!(report.device_power.len(), 2);
        for summary in &report.device_power {
            assert_eq!(summary.cutoff_power_w, 0.0);
            assert_eq!(summary.samples.len(), 2);
            assert_eq!(summary.samples[0].mode, Mode::Triode);
            assert_eq!(summary.samples[1].mode, Mode::Saturation);
            assert!(summary.samples[1].power_w > summary.samples[0].power_w);
        }
    }

    #[test]
    fn device_source_parsing() {
        assert_eq!(
            DeviceSource::parse("SiRA04DP"),
            DeviceSource::Preset("sira04dp".to_string())
        );
        assert_eq!(
            DeviceSource::parse("devices/custom.json"),
            DeviceSource::File(PathBuf::from("devices/custom.json"))
        );
    }

    #[test]
    fn mismatched_polarity_is_config_error() {
        let config = CompareConfig {
            order: 1,
            nmos: DeviceSource::Preset("sia469dj".to_string()),
            ..CompareConfig::default()
        };
        assert!(matches!(run_compare(&config), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_vgs_is_config_error() {
        let config = CompareConfig {
            order: 1,
            v_gs: 0.0,
            ..CompareConfig::default()
        };
        assert!(matches!(run_compare(&config), Err(Error::Config(_))));
    }

    #[test]
    fn report_json_roundtrip() {
        let config = CompareConfig {
            order: 2,
            link_propagation_s: Some(1e-6),
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: ComparisonReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
