//! Command-line front end: substrate simulation dumps, device curves, the
//! latency/power comparison report, and butterfly plan inspection.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use greenmachine::compare::{
    run_compare, CompareConfig, DelaySweep, DeviceSource, PhaseConvention,
};
use greenmachine::device::{DelayPolicy, MosfetPolarity};
use greenmachine::digital::{decode_digital, encode_digital, propagate_digital_trace};
use greenmachine::emit;
use greenmachine::error::{Error, Result};
use greenmachine::fwht::HadamardOrder;
use greenmachine::optical::{
    decode_optical, encode_optical, propagate_optical_trace, ChipGeometry, PropagationOptions,
};
use greenmachine::topology::build_butterfly;

#[derive(Parser)]
#[command(
    name = "greenmachine",
    version,
    about = "Walsh-Hadamard joint-detection receiver: optical vs. electronic decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one codeword through a substrate and dump per-stage state.
    Simulate {
        #[command(subcommand)]
        substrate: SimulateCommand,
    },
    /// Device-model curve emission.
    Device {
        #[command(subcommand)]
        curve: DeviceCommand,
    },
    /// Run both substrates and emit the comparison report.
    Compare(CompareArgs),
    /// Butterfly plan inspection.
    Plan {
        #[command(subcommand)]
        action: PlanCommand,
    },
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Coherent-amplitude propagation; emits CSV columns stage,mode,re,im,energy.
    Optical(SimulateOpticalArgs),
    /// Two-bit symbol propagation; emits CSV columns stage,mode,symbol_bits.
    Digital(SimulateDigitalArgs),
}

#[derive(Args)]
struct SimulateOpticalArgs {
    /// Butterfly order n (network spans 2^n modes).
    #[arg(short = 'n', long)]
    order: u32,
    /// Message index to encode.
    #[arg(short = 'j', long, default_value_t = 0)]
    codeword: usize,
    /// Coherent amplitude as `re` or `re,im`.
    #[arg(long, default_value = "1", value_parser = parse_complex)]
    alpha: Complex64,
    /// Beamsplitter phase convention.
    #[arg(long, default_value = "0")]
    phi: String,
    /// Conjugate each pair with per-stage phase shifters.
    #[arg(long)]
    phase_correction: bool,
    /// Trace format (csv only).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateDigitalArgs {
    /// Butterfly order n (network spans 2^n lines).
    #[arg(short = 'n', long)]
    order: u32,
    /// Message index to encode.
    #[arg(short = 'j', long, default_value_t = 0)]
    codeword: usize,
    /// Swap Plus and Minus in the encoded word.
    #[arg(long)]
    invert: bool,
    /// Trace format (csv only).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DeviceCommand {
    /// P(V_DS) curves per device at the 3.3 V and 5 V gate voltages.
    PowerCurve(DeviceArgs),
    /// Turn-on/turn-off delay curves over a gate-voltage sweep.
    DelayCurve(DelayCurveArgs),
}

#[derive(Args)]
struct DeviceArgs {
    /// Device preset name or datasheet JSON path; repeatable.
    #[arg(long = "device", num_args = 1)]
    devices: Vec<String>,
    /// Curve format (csv only).
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DelayCurveArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// External gate resistance, ohms.
    #[arg(long, default_value_t = 10.0)]
    rgext: f64,
    /// Sweep lower bound, volts; defaults to each device's plateau + 0.1 V.
    #[arg(long)]
    vgs_min: Option<f64>,
    /// Sweep upper bound, volts.
    #[arg(long, default_value_t = 10.0)]
    vgs_max: f64,
    /// Sweep step, volts.
    #[arg(long, default_value_t = 0.05)]
    vgs_step: f64,
}

#[derive(Args)]
struct CompareArgs {
    /// Butterfly order n.
    #[arg(short = 'n', long)]
    order: u32,
    /// Gate drive voltage, volts.
    #[arg(long, default_value_t = 5.0)]
    vgs: f64,
    /// External gate resistance, ohms.
    #[arg(long, default_value_t = 10.0)]
    rgext: f64,
    /// Device preset name or datasheet JSON path; pass one NMOS and one PMOS.
    #[arg(long = "device", num_args = 1)]
    devices: Vec<String>,
    /// AND-gate delay aggregation: `stage-worst-sum` or `fixed:<seconds>`.
    #[arg(long, default_value = "stage-worst-sum")]
    policy: String,
    /// Beamsplitter phase convention.
    #[arg(long, default_value = "0")]
    phi: String,
    /// Conjugate each pair with per-stage phase shifters.
    #[arg(long)]
    phase_correction: bool,
    /// Beamsplitter traversal length, meters.
    #[arg(long, default_value_t = ChipGeometry::DEFAULT_BS_TRAVERSAL_LENGTH_M)]
    bs_length_m: f64,
    /// Waveguide refractive index.
    #[arg(long, default_value_t = 1.0)]
    refractive_index: f64,
    /// Optional full-chip traversal length override, meters.
    #[arg(long)]
    chip_length_m: Option<f64>,
    /// Per-stage optical delay override, picoseconds.
    #[arg(long)]
    stage_delay_ps: Option<f64>,
    /// Informational fiber-link propagation time, seconds.
    #[arg(long)]
    link_propagation_s: Option<f64>,
    /// Report format.
    #[arg(long, default_value = "json")]
    format: String,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PlanCommand {
    /// Emit the stage/pair structure as JSON.
    Dump {
        /// Butterfly order n.
        #[arg(short = 'n', long)]
        order: u32,
        /// Output directory; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn require_csv(format: &str) -> Result<()> {
    if format != "csv" {
        return Err(Error::Config(format!(
            "this output is tabular; only 'csv' is supported, got '{format}'"
        )));
    }
    Ok(())
}

fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("cannot parse '{s}' as a number"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err("expected 're' or 're,im'".to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Exit codes: 1 decode failure, 2 configuration error, 3 i/o error.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DecodeFailure(_) | Error::NoSignal => 1,
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { substrate } => match substrate {
            SimulateCommand::Optical(args) => simulate_optical(args),
            SimulateCommand::Digital(args) => simulate_digital(args),
        },
        Command::Device { curve } => match curve {
            DeviceCommand::PowerCurve(args) => device_power_curve(args),
            DeviceCommand::DelayCurve(args) => device_delay_curve(args),
        },
        Command::Compare(args) => compare(args),
        Command::Plan { action } => match action {
            PlanCommand::Dump { order, out } => plan_dump(order, out),
        },
    }
}

fn simulate_optical(args: SimulateOpticalArgs) -> Result<()> {
    require_csv(&args.format)?;
    let order = HadamardOrder::new(args.order)?;
    let plan = build_butterfly(order);
    let phi = PhaseConvention::parse(&args.phi)?;
    let options = PropagationOptions {
        phase_correction: args.phase_correction,
    };
    let input = encode_optical(args.codeword, order, args.alpha)?;
    let trace = propagate_optical_trace(&plan, &input, &phi.spec(), options)?;
    let (index, share) = decode_optical(trace.last().expect("trace never empty"))?;
    let csv = emit::render_optical_trace_csv(&trace);
    match args.out {
        Some(dir) => {
            let path = emit::write_text_file(
                dir.join(format!("optical_trace_n{}_j{}.csv", args.order, args.codeword)),
                &csv,
            )?;
            println!("wrote {}", path.display());
            println!("decoded mode {index} with energy share {share:e}");
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn simulate_digital(args: SimulateDigitalArgs) -> Result<()> {
    require_csv(&args.format)?;
    let order = HadamardOrder::new(args.order)?;
    let plan = build_butterfly(order);
    let input = encode_digital(args.codeword, order, args.invert)?;
    let trace = propagate_digital_trace(&plan, &input)?;
    let decoded = decode_digital(trace.last().expect("trace never empty"))?;
    let csv = emit::render_digital_trace_csv(&trace);
    match args.out {
        Some(dir) => {
            let path = emit::write_text_file(
                dir.join(format!("digital_trace_n{}_j{}.csv", args.order, args.codeword)),
                &csv,
            )?;
            println!("wrote {}", path.display());
            println!("decoded index {} with polarity {:?}", decoded.0, decoded.1);
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// Resolves repeated `--device` flags into one NMOS and one PMOS source.
fn split_devices(devices: &[String], v_gs: f64) -> Result<(DeviceSource, DeviceSource)> {
    let defaults = CompareConfig::default();
    if devices.is_empty() {
        return Ok((defaults.nmos, defaults.pmos));
    }
    let mut nmos = None;
    let mut pmos = None;
    for text in devices {
        let source = DeviceSource::parse(text);
        let ds = source.resolve(v_gs)?;
        let slot = match ds.polarity() {
            MosfetPolarity::Nmos => &mut nmos,
            MosfetPolarity::Pmos => &mut pmos,
        };
        if slot.replace(source).is_some() {
            return Err(Error::Config(format!(
                "multiple {} devices supplied",
                ds.polarity()
            )));
        }
    }
    Ok((
        nmos.unwrap_or(defaults.nmos),
        pmos.unwrap_or(defaults.pmos),
    ))
}

fn device_config(devices: &[String], rgext: f64, sweep: DelaySweep) -> Result<CompareConfig> {
    let defaults = CompareConfig::default();
    let (nmos, pmos) = split_devices(devices, defaults.v_gs)?;
    Ok(CompareConfig {
        nmos,
        pmos,
        r_gext_ohm: rgext,
        delay_sweep: sweep,
        ..defaults
    })
}

fn device_power_curve(args: DeviceArgs) -> Result<()> {
    require_csv(&args.format)?;
    let config = device_config(&args.devices, 10.0, DelaySweep::default())?;
    let paths = emit::emit_power_curves(&config, &args.out)?;
    for path in paths {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn device_delay_curve(args: DelayCurveArgs) -> Result<()> {
    require_csv(&args.device.format)?;
    let sweep = DelaySweep {
        v_gs_min: args.vgs_min,
        v_gs_max: args.vgs_max,
        step_v: args.vgs_step,
    };
    let config = device_config(&args.device.devices, args.rgext, sweep)?;
    let outcome = emit::emit_delay_curves(&config, &args.device.out)?;
    for path in &outcome.paths {
        println!("wrote {}", path.display());
    }
    if outcome.skipped_rows > 0 {
        eprintln!(
            "warning: skipped {} sweep row(s) at or below the plateau voltage",
            outcome.skipped_rows
        );
    }
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let format = emit::ReportFormat::parse(&args.format)?;
    let (nmos, pmos) = split_devices(&args.devices, args.vgs)?;
    let config = CompareConfig {
        order: args.order,
        v_gs: args.vgs,
        r_gext_ohm: args.rgext,
        nmos,
        pmos,
        phi: PhaseConvention::parse(&args.phi)?,
        phase_correction: args.phase_correction,
        geometry: ChipGeometry::new(args.bs_length_m, args.refractive_index, args.chip_length_m)?,
        stage_delay_ps: args.stage_delay_ps,
        policy: DelayPolicy::parse(&args.policy)?,
        link_propagation_s: args.link_propagation_s,
        delay_sweep: DelaySweep::default(),
        out_dir: args.out.clone(),
    };
    let report = run_compare(&config)?;
    match args.out {
        Some(dir) => {
            let path = emit::write_report(&report, format, dir)?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", emit::render_report(&report, format)),
    }
    Ok(())
}

fn plan_dump(order: u32, out: Option<PathBuf>) -> Result<()> {
    let plan = build_butterfly(HadamardOrder::new(order)?);
    let json = plan.dump_json();
    match out {
        Some(dir) => {
            let path = emit::write_text_file(
                dir.join(format!("plan_n{order}.json")),
                &format!("{json}\n"),
            )?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}
