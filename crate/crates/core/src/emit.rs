//! Deterministic file emission: curve CSVs, stage traces, plan dumps, and
//! comparison reports.
//!
//! Numbers are written in SI base units using scientific notation with no
//! locale dependence, so identical configurations always produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::compare::{CompareConfig, ComparisonReport, DeviceSource};
use crate::device::{power_sweep, turn_off_delay, turn_on_delay, GateDrive, PowerSample};
use crate::digital::SymbolVector;
use crate::error::{Error, Result};
use crate::optical::ModeVector;

/// Drain-source sampling step for emitted power curves, volts.
pub const POWER_CURVE_STEP_V: f64 = 0.01;

/// Gate voltages the power-curve figures are emitted at.
pub const POWER_CURVE_GATE_VOLTAGES: [f64; 2] = [3.3, 5.0];

/// Output encoding of a comparison report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl ReportFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::Config(format!(
                "unknown report format '{other}' (expected 'json' or 'text')"
            ))),
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            ReportFormat::Json => "report.json",
            ReportFormat::Text => "report.txt",
        }
    }
}

fn sci(value: f64) -> String {
    format!("{value:e}")
}

/// Writes `contents` to `path`, creating parent directories as needed.
pub fn write_text_file(path: impl AsRef<Path>, contents: &str) -> Result<PathBuf> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

/// JSON rendering of a report (schema-versioned, stable field order).
pub fn render_report_json(report: &ComparisonReport) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

/// Human-readable rendering of a report.
pub fn render_report_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "comparison report (schema v{})", report.schema_version);
    let _ = writeln!(out, "order:                  {}", report.order);
    let _ = writeln!(out, "modes:                  {}", report.modes);
    let _ = writeln!(out, "depth:                  {}", report.depth);
    let _ = writeln!(out, "beamsplitters:          {}", report.beamsplitter_count);
    let _ = writeln!(out, "transistors:            {}", report.transistor_count);
    let _ = writeln!(out, "verified codewords:     {}", report.verified_codewords);
    let _ = writeln!(
        out,
        "optical stage delay:    {} s",
        sci(report.optical_stage_delay_s)
    );
    let _ = writeln!(
        out,
        "optical latency:        {} s",
        sci(report.optical_latency_s)
    );
    let _ = writeln!(
        out,
        "AND-gate delay:         {} s  (policy {})",
        sci(report.and_gate_delay_s),
        report.delays.policy
    );
    let _ = writeln!(
        out,
        "electronic latency:     {} s",
        sci(report.electronic_latency_s)
    );
    let _ = writeln!(out, "latency ratio:          {}", sci(report.latency_ratio));
    let _ = writeln!(
        out,
        "optical runtime power:  {} W (initial tuning excluded: {})",
        sci(report.optical_runtime_power_w),
        report.tuning_power_excluded
    );
    let _ = writeln!(out, "switching delays:");
    let _ = writeln!(
        out,
        "  nmos turn-on:         {} s",
        sci(report.delays.nmos_turn_on_s)
    );
    let _ = writeln!(
        out,
        "  nmos turn-off:        {} s",
        sci(report.delays.nmos_turn_off_s)
    );
    let _ = writeln!(
        out,
        "  pmos turn-on:         {} s",
        sci(report.delays.pmos_turn_on_s)
    );
    let _ = writeln!(
        out,
        "  pmos turn-off:        {} s",
        sci(report.delays.pmos_turn_off_s)
    );
    for device in &report.device_power {
        let k = match device.k_a_per_v2 {
            Some(k) => sci(k),
            None => "uncalibrated".to_string(),
        };
        let _ = writeln!(
            out,
            "device {} ({}) at v_gs = {} V, k = {} A/V^2:",
            device.name,
            device.polarity,
            sci(device.v_gs_v),
            k
        );
        let _ = writeln!(
            out,
            "  cutoff power:         {} W",
            sci(device.cutoff_power_w)
        );
        for sample in &device.samples {
            let _ = writeln!(
                out,
                "  v_ds = {} V: i_d = {} A, p = {} W ({})",
                sci(sample.v_ds_v),
                sci(sample.i_d_a),
                sci(sample.power_w),
                sample.mode
            );
        }
    }
    if let Some(link) = report.link_propagation_s {
        let _ = writeln!(out, "link propagation (informational): {} s", sci(link));
    }
    out
}

pub fn render_report(report: &ComparisonReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => render_report_json(report),
        ReportFormat::Text => render_report_text(report),
    }
}

/// Writes the report into `dir` under the format's canonical file name.
pub fn write_report(
    report: &ComparisonReport,
    format: ReportFormat,
    dir: impl AsRef<Path>,
) -> Result<PathBuf> {
    write_text_file(
        dir.as_ref().join(format.file_name()),
        &render_report(report, format),
    )
}

/// Per-stage amplitude dump: `stage,mode,re,im,energy`, stage 0 being the
/// network input.
pub fn render_optical_trace_csv(trace: &[ModeVector]) -> String {
    let mut out = String::from("stage,mode,re,im,energy\n");
    for (stage, vector) in trace.iter().enumerate() {
        for (mode, amp) in vector.amplitudes().iter().enumerate() {
            let _ = writeln!(
                out,
                "{stage},{mode},{},{},{}",
                sci(amp.re),
                sci(amp.im),
                sci(amp.norm_sqr())
            );
        }
    }
    out
}

/// Per-stage symbol dump: `stage,mode,symbol_bits`.
pub fn render_digital_trace_csv(trace: &[SymbolVector]) -> String {
    let mut out = String::from("stage,mode,symbol_bits\n");
    for (stage, vector) in trace.iter().enumerate() {
        for (mode, symbol) in vector.symbols().iter().enumerate() {
            let _ = writeln!(out, "{stage},{mode},{}", symbol.bit_str());
        }
    }
    out
}

/// Power curve CSV: `v_ds_v,i_d_a,p_w,mode`.
pub fn render_power_curve_csv(samples: &[PowerSample]) -> String {
    let mut out = String::from("v_ds_v,i_d_a,p_w,mode\n");
    for sample in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            sci(sample.v_ds_v),
            sci(sample.i_d_a),
            sci(sample.p_w),
            sample.mode
        );
    }
    out
}

/// Delay curve CSV: `v_gs_v,t_on_s,t_off_s`.
pub fn render_delay_curve_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("v_gs_v,t_on_s,t_off_s\n");
    for (v_gs, t_on, t_off) in rows {
        let _ = writeln!(out, "{},{},{}", sci(*v_gs), sci(*t_on), sci(*t_off));
    }
    out
}

fn curve_file_stem(source: &DeviceSource, v_gs: f64) -> Result<String> {
    // Resolve just for the canonical device name.
    let ds = source.resolve(v_gs)?;
    Ok(ds.name().to_ascii_lowercase())
}

/// Emits one power-curve CSV per (device, gate voltage) figure point into
/// `dir`; drain-source voltage spans `0..=v_gs`.
pub fn emit_power_curves(config: &CompareConfig, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut paths = Vec::new();
    for source in [&config.nmos, &config.pmos] {
        for v_gs in POWER_CURVE_GATE_VOLTAGES {
            let ds = source.resolve(v_gs)?;
            let samples = power_sweep(&ds, v_gs, 0.0, v_gs, POWER_CURVE_STEP_V)?;
            let name = format!("power_{}_vgs{}.csv", ds.name().to_ascii_lowercase(), v_gs);
            paths.push(write_text_file(
                dir.join(name),
                &render_power_curve_csv(&samples),
            )?);
        }
    }
    Ok(paths)
}

/// Result of a delay-curve emission: written files plus the number of sweep
/// rows skipped for sitting at or below the plateau voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayCurveOutcome {
    pub paths: Vec<PathBuf>,
    pub skipped_rows: usize,
}

/// Emits one `v_gs → (t_on, t_off)` CSV per device into `dir`.
pub fn emit_delay_curves(
    config: &CompareConfig,
    dir: impl AsRef<Path>,
) -> Result<DelayCurveOutcome> {
    let dir = dir.as_ref();
    let drive = GateDrive::new(config.r_gext_ohm)?;
    let sweep = config.delay_sweep;
    if !sweep.step_v.is_finite() || sweep.step_v <= 0.0 {
        return Err(Error::Config(format!(
            "delay sweep step must be positive, got {}",
            sweep.step_v
        )));
    }
    let mut paths = Vec::new();
    let mut skipped_rows = 0usize;
    for source in [&config.nmos, &config.pmos] {
        let ds = source.resolve(config.v_gs)?;
        let start = sweep.v_gs_min.unwrap_or(ds.v_gp_v() + 0.1);
        if !start.is_finite() || start <= 0.0 || sweep.v_gs_max < start {
            return Err(Error::Config(format!(
                "delay sweep range [{start}, {}] is invalid",
                sweep.v_gs_max
            )));
        }
        let count = ((sweep.v_gs_max - start) / sweep.step_v + 1e-9).floor() as usize;
        let mut rows = Vec::with_capacity(count + 1);
        for i in 0..=count {
            let v_gs = start + sweep.step_v * i as f64;
            if v_gs <= ds.v_gp_v() {
                skipped_rows += 1;
                continue;
            }
            rows.push((
                v_gs,
                turn_on_delay(&ds, drive, v_gs)?,
                turn_off_delay(&ds, drive, v_gs)?,
            ));
        }
        let stem = curve_file_stem(source, config.v_gs)?;
        paths.push(write_text_file(
            dir.join(format!("delay_{stem}.csv")),
            &render_delay_curve_csv(&rows),
        )?);
    }
    Ok(DelayCurveOutcome {
        paths,
        skipped_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::{run_compare, DelaySweep};
    use crate::digital::{encode_digital, propagate_digital_trace};
    use crate::fwht::HadamardOrder;
    use crate::optical::{
        encode_optical, propagate_optical_trace, BeamsplitterSpec, PropagationOptions,
    };
    use crate::topology::build_butterfly;
    use num_complex::Complex64;

    #[test]
    fn report_text_and_json_render() {
        let config = CompareConfig {
            order: 2,
            ..CompareConfig::default()
        };
        let report = run_compare(&config).unwrap();
        let json = render_report_json(&report);
        assert!(json.starts_with("{\n  \"schema_version\": 1"));
        let text = render_report_text(&report);
        assert!(text.contains("latency ratio"));
        assert!(text.contains("SiRA04DP"));
    }

    #[test]
    fn optical_trace_csv_shape() {
        let order = HadamardOrder::new(1).unwrap();
        let plan = build_butterfly(order);
        let input = encode_optical(0, order, Complex64::new(1.0, 0.0)).unwrap();
        let trace = propagate_optical_trace(
            &plan,
            &input,
            &BeamsplitterSpec::hadamard(),
            PropagationOptions::default(),
        )
        .unwrap();
        let csv = render_optical_trace_csv(&trace);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "stage,mode,re,im,energy");
        // 2 stages (input + 1) x 2 modes.
        assert_eq!(lines.len(), 1 + 4);
        assert!(lines[1].starts_with("0,0,1e0,0e0,1e0"));
    }

    #[test]
    fn digital_trace_csv_shape() {
        let order = HadamardOrder::new(1).unwrap();
        let plan = build_butterfly(order);
        let input = encode_digital(0, order, false).unwrap();
        let trace = propagate_digital_trace(&plan, &input).unwrap();
        let csv = render_digital_trace_csv(&trace);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "stage,mode,symbol_bits");
        assert_eq!(lines[1], "0,0,01");
        assert_eq!(lines[3], "1,0,01");
        assert_eq!(lines[4], "1,1,00");
    }

    #[test]
    fn power_curves_emitted_per_device_and_voltage() {
        let dir = tempfile::tempdir().unwrap();
        let config = CompareConfig::default();
        let paths = emit_power_curves(&config, dir.path()).unwrap();
        assert_eq!(paths.len(), 4);
        let names: Vec<String> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().to_string())
            .collect();
        assert!(names.contains(&"power_sira04dp_vgs3.3.csv".to_string()));
        assert!(names.contains(&"power_sia469dj_vgs5.csv".to_string()));
        let body = std::fs::read_to_string(&paths[0]).unwrap();
        assert!(body.starts_with("v_ds_v,i_d_a,p_w,mode\n"));
        assert!(body.contains("triode"));
        assert!(body.contains("saturation"));
    }

    #[test]
    fn delay_curves_emitted_with_default_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let config = CompareConfig::default();
        let outcome = emit_delay_curves(&config, dir.path()).unwrap();
        assert_eq!(outcome.paths.len(), 2);
        assert_eq!(outcome.skipped_rows, 0);
        let body = std::fs::read_to_string(&outcome.paths[0]).unwrap();
        assert!(body.starts_with("v_gs_v,t_on_s,t_off_s\n"));
        assert!(body.lines().count() > 100);
    }

    #[test]
    fn delay_curve_sweep_below_plateau_skips_rows() {
        let dir = tempfile::tempdir().unwrap();
        let config = CompareConfig {
            delay_sweep: DelaySweep {
                v_gs_min: Some(2.0), // below both presets' plateau region start
                v_gs_max: 3.0,
                step_v: 0.1,
            },
            ..CompareConfig::default()
        };
        let outcome = emit_delay_curves(&config, dir.path()).unwrap();
        assert!(outcome.skipped_rows > 0);
    }

    #[test]
    fn emission_is_deterministic() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let config = CompareConfig {
            order: 3,
            ..CompareConfig::default()
        };
        let report_a = run_compare(&config).unwrap();
        let report_b = run_compare(&config).unwrap();
        let path_a = write_report(&report_a, ReportFormat::Json, dir_a.path()).unwrap();
        let path_b = write_report(&report_b, ReportFormat::Json, dir_b.path()).unwrap();
        assert_eq!(
            std::fs::read(path_a).unwrap(),
            std::fs::read(path_b).unwrap()
        );

        for emitted in [
            emit_power_curves(&config, dir_a.path()).unwrap(),
            emit_power_curves(&config, dir_b.path()).unwrap(),
        ]
        .windows(2)
        {
            for (a, b) in emitted[0].iter().zip(&emitted[1]) {
                assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
            }
        }
    }

    #[test]
    fn emitted_delay_rows_reevaluate_under_device_ops() {
        // Scientific-notation float formatting round-trips, so emitted rows
        // can be checked against the closed forms they came from.
        let dir = tempfile::tempdir().unwrap();
        let config = CompareConfig::default();
        let outcome = emit_delay_curves(&config, dir.path()).unwrap();
        let nmos = config.nmos.resolve(config.v_gs).unwrap();
        let drive = GateDrive::new(config.r_gext_ohm).unwrap();
        let body = std::fs::read_to_string(
            outcome
                .paths
                .iter()
                .find(|p| p.file_name().unwrap() == "delay_sira04dp.csv")
                .unwrap(),
        )
        .unwrap();
        let mut checked = 0;
        for line in body.lines().skip(1).step_by(7) {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            let [v_gs, t_on, t_off] = fields[..] else {
                panic!("row shape")
            };
            assert_eq!(t_on, turn_on_delay(&nmos, drive, v_gs).unwrap());
            assert_eq!(t_off, turn_off_delay(&nmos, drive, v_gs).unwrap());
            checked += 1;
        }
        assert!(checked > 10);

        // The 5 V row lands on the sweep grid and matches the closed form.
        let row_5v = body
            .lines()
            .skip(1)
            .find(|l| l.split(',').next().unwrap().parse::<f64>().unwrap() == 5.0)
            .expect("5 V row on the default grid");
        let fields: Vec<f64> = row_5v.split(',').map(|f| f.parse().unwrap()).collect();
        assert!((fields[1] - 2.906517933317594e-8).abs() <= 1e-9 * fields[1]);
        assert!((fields[2] - 2.8772764565893216e-8).abs() <= 1e-9 * fields[2]);
    }

    #[test]
    fn emitted_power_rows_reevaluate_under_device_ops() {
        use crate::device::{classify_mode, power, OperatingPoint};
        let dir = tempfile::tempdir().unwrap();
        let config = CompareConfig::default();
        let paths = emit_power_curves(&config, dir.path()).unwrap();
        let path = paths
            .iter()
            .find(|p| p.file_name().unwrap() == "power_sira04dp_vgs5.csv")
            .unwrap();
        let ds = config.nmos.resolve(5.0).unwrap();
        let body = std::fs::read_to_string(path).unwrap();
        let mut checked = 0;
        for line in body.lines().skip(1).step_by(17) {
            let fields: Vec<&str> = line.split(',').collect();
            let v_ds: f64 = fields[0].parse().unwrap();
            let p_w: f64 = fields[2].parse().unwrap();
            let op = OperatingPoint::new(5.0, v_ds).unwrap();
            assert_eq!(p_w, power(&ds, op).unwrap());
            assert_eq!(fields[3], classify_mode(&ds, op).to_string());
            checked += 1;
        }
        assert!(checked > 10);
    }

    #[test]
    fn power_curve_for_subthreshold_device_is_all_zero() {
        // A device whose threshold sits above both figure gate voltages
        // never leaves cutoff, so both emitted curves carry zero current.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("high_vth.json");
        std::fs::write(
            &path,
            r#"{
                "name": "HighVth",
                "polarity": "nmos",
                "r_g_ohm": 1.0,
                "c_iss_0v_pf": 100,
                "c_iss_vds_pf": 100,
                "v_th_v": 6.0,
                "v_gp_v": 2.0,
                "k_a_per_v2": 10.0
            }"#,
        )
        .unwrap();
        let config = CompareConfig {
            nmos: DeviceSource::File(path),
            ..CompareConfig::default()
        };
        let paths = emit_power_curves(&config, dir.path()).unwrap();
        for path in paths
            .iter()
            .filter(|p| p.file_name().unwrap().to_str().unwrap().contains("highvth"))
        {
            let body = std::fs::read_to_string(path).unwrap();
            for line in body.lines().skip(1) {
                let fields: Vec<&str> = line.split(',').collect();
                assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);
                assert_eq!(fields[2].parse::<f64>().unwrap(), 0.0);
                assert_eq!(fields[3], "cutoff");
            }
        }
    }
}
