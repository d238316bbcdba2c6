//! Coherent-amplitude propagation through the beamsplitter butterfly.
//!
//! Coherent states are tracked classically by their complex amplitudes; one
//! vector entry per optical mode. Propagating an encoded codeword through the
//! network concentrates the total energy into the mode matching the message
//! index, which is the receiver's decoding step.

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fwht::{hadamard_entry, HadamardOrder};
use crate::topology::{depth, HadamardPlan};

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Lossless two-port beamsplitter: transmittance `T`, reflectance `R`,
/// phase shift `φ`, acting as the unitary
/// `[[√T, e^{iφ}√R], [−e^{−iφ}√R, √T]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterSpec {
    transmittance: f64,
    reflectance: f64,
    phase: f64,
}

impl BeamsplitterSpec {
    /// Tolerance on the `R + T = 1` unitarity constraint.
    pub const UNITARITY_TOL: f64 = 1e-12;

    pub fn new(transmittance: f64, reflectance: f64, phase: f64) -> Result<Self> {
        if !transmittance.is_finite() || !reflectance.is_finite() || !phase.is_finite() {
            return Err(Error::InvalidSpec(
                "parameters must be finite".to_string(),
            ));
        }
        if !(0.0..=1.0).contains(&transmittance) || !(0.0..=1.0).contains(&reflectance) {
            return Err(Error::InvalidSpec(format!(
                "T and R must lie in [0, 1], got T={transmittance}, R={reflectance}"
            )));
        }
        if (transmittance + reflectance - 1.0).abs() > Self::UNITARITY_TOL {
            return Err(Error::InvalidSpec(format!(
                "R + T must equal 1, got {}",
                transmittance + reflectance
            )));
        }
        Ok(Self {
            transmittance,
            reflectance,
            phase,
        })
    }

    /// 50:50 splitter with zero phase; the network default, whose kernel
    /// concentrates codeword energy without auxiliary phase shifters.
    pub fn hadamard() -> Self {
        Self {
            transmittance: 0.5,
            reflectance: 0.5,
            phase: 0.0,
        }
    }

    /// 50:50 splitter with the quarter-wave convention `φ = π/2`. On its own
    /// this kernel does not concentrate energy; pair it with
    /// [`PropagationOptions::phase_correction`].
    pub fn quadrature() -> Self {
        Self {
            transmittance: 0.5,
            reflectance: 0.5,
            phase: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    pub fn reflectance(&self) -> f64 {
        self.reflectance
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    fn kernel(&self) -> [[Complex64; 2]; 2] {
        let t = self.transmittance.sqrt();
        let r = self.reflectance.sqrt();
        let up = Complex64::from_polar(r, self.phase);
        let down = -Complex64::from_polar(r, -self.phase);
        [
            [Complex64::new(t, 0.0), up],
            [down, Complex64::new(t, 0.0)],
        ]
    }
}

/// Applies the beamsplitter unitary to one pair of input amplitudes.
///
/// Spec validity (`R + T = 1`) is enforced at [`BeamsplitterSpec::new`], so
/// the application itself cannot fail; energy `|a1|² + |a2|²` is preserved.
pub fn beamsplitter_apply(
    spec: &BeamsplitterSpec,
    a1: Complex64,
    a2: Complex64,
) -> (Complex64, Complex64) {
    let k = spec.kernel();
    (k[0][0] * a1 + k[0][1] * a2, k[1][0] * a1 + k[1][1] * a2)
}

/// Complex coherent-state amplitudes across `2^n` optical modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    amplitudes: Vec<Complex64>,
}

impl ModeVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "mode vector length must be a power of two, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Domain(
                "mode amplitudes must be finite".to_string(),
            ));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `Σ |amplitude|²` over all modes.
    pub fn total_energy(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// BPSK encoding of message `j`: amplitude `α · H[j,k]` on mode `k`.
pub fn encode_optical(j: usize, order: HadamardOrder, alpha: Complex64) -> Result<ModeVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::Domain("coherent amplitude must be finite".to_string()));
    }
    let amplitudes = (0..order.modes())
        .map(|k| Ok(alpha * f64::from(hadamard_entry(j, k, order)?)))
        .collect::<Result<Vec<_>>>()?;
    ModeVector::new(amplitudes)
}

/// Propagation switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PropagationOptions {
    /// Conjugate every pair by the phase shifter `diag(1, e^{-iφ})`. Under
    /// the `φ = π/2` convention this restores the real Hadamard kernel; with
    /// `φ = 0` it is the identity.
    pub phase_correction: bool,
}

/// Propagates a mode vector through every stage of the plan with the default
/// options.
pub fn propagate_optical(
    plan: &HadamardPlan,
    input: &ModeVector,
    spec: &BeamsplitterSpec,
) -> Result<ModeVector> {
    propagate_optical_with(plan, input, spec, PropagationOptions::default())
}

/// Propagates a mode vector, selecting [`PropagationOptions`].
pub fn propagate_optical_with(
    plan: &HadamardPlan,
    input: &ModeVector,
    spec: &BeamsplitterSpec,
    options: PropagationOptions,
) -> Result<ModeVector> {
    check_length(plan, input)?;
    let mut state = input.amplitudes().to_vec();
    for stage in plan.stages() {
        apply_stage(&mut state, stage, spec, options);
    }
    debug_assert!(energy_preserved(input, &state));
    ModeVector::new(state)
}

/// Like [`propagate_optical_with`] but returns a snapshot after every stage;
/// entry 0 is the input itself.
pub fn propagate_optical_trace(
    plan: &HadamardPlan,
    input: &ModeVector,
    spec: &BeamsplitterSpec,
    options: PropagationOptions,
) -> Result<Vec<ModeVector>> {
    check_length(plan, input)?;
    let mut state = input.amplitudes().to_vec();
    let mut trace = Vec::with_capacity(plan.stages().len() + 1);
    trace.push(input.clone());
    for stage in plan.stages() {
        apply_stage(&mut state, stage, spec, options);
        trace.push(ModeVector::new(state.clone())?);
    }
    Ok(trace)
}

fn check_length(plan: &HadamardPlan, input: &ModeVector) -> Result<()> {
    if input.len() != plan.modes() {
        return Err(Error::Domain(format!(
            "mode vector length {} does not match plan with {} modes",
            input.len(),
            plan.modes()
        )));
    }
    Ok(())
}

fn apply_stage(
    state: &mut [Complex64],
    pairs: &[(u32, u32)],
    spec: &BeamsplitterSpec,
    options: PropagationOptions,
) {
    let kernel = spec.kernel();
    let shifter = Complex64::from_polar(1.0, -spec.phase());
    for &(lo, hi) in pairs {
        let a1 = state[lo as usize];
        let mut a2 = state[hi as usize];
        if options.phase_correction {
            a2 *= shifter;
        }
        let b1 = kernel[0][0] * a1 + kernel[0][1] * a2;
        let mut b2 = kernel[1][0] * a1 + kernel[1][1] * a2;
        if options.phase_correction {
            b2 *= shifter;
        }
        state[lo as usize] = b1;
        state[hi as usize] = b2;
    }
}

fn energy_preserved(input: &ModeVector, state: &[Complex64]) -> bool {
    let before = input.total_energy();
    let after: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    before == 0.0 || ((after - before) / before).abs() < 1e-9
}

/// Picks the mode carrying the most energy.
///
/// Returns the mode index (ties broken toward the lowest index) and that
/// mode's share of the total energy.
pub fn decode_optical(output: &ModeVector) -> Result<(usize, f64)> {
    let total = output.total_energy();
    if total == 0.0 {
        return Err(Error::NoSignal);
    }
    let (best_idx, best_energy) = output
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr())
        .enumerate()
        .fold((0usize, f64::MIN), |(bi, be), (i, e)| {
            if e > be {
                (i, e)
            } else {
                (bi, be)
            }
        });
    Ok((best_idx, best_energy / total))
}

/// Physical dimensions of the photonic chip.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipGeometry {
    bs_traversal_length_m: f64,
    refractive_index: f64,
    full_chip_length_m: Option<f64>,
}

impl ChipGeometry {
    pub const DEFAULT_BS_TRAVERSAL_LENGTH_M: f64 = 2e-3;

    pub fn new(
        bs_traversal_length_m: f64,
        refractive_index: f64,
        full_chip_length_m: Option<f64>,
    ) -> Result<Self> {
        for (label, value) in [
            ("beamsplitter traversal length", bs_traversal_length_m),
            ("refractive index", refractive_index),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::Domain(format!(
                    "{label} must be positive and finite, got {value}"
                )));
            }
        }
        if let Some(full) = full_chip_length_m {
            if !full.is_finite() || full <= 0.0 {
                return Err(Error::Domain(format!(
                    "full chip length must be positive and finite, got {full}"
                )));
            }
        }
        Ok(Self {
            bs_traversal_length_m,
            refractive_index,
            full_chip_length_m,
        })
    }

    pub fn bs_traversal_length_m(&self) -> f64 {
        self.bs_traversal_length_m
    }

    pub fn refractive_index(&self) -> f64 {
        self.refractive_index
    }

    pub fn full_chip_length_m(&self) -> Option<f64> {
        self.full_chip_length_m
    }

    /// Light traversal time of a single beamsplitter stage, in seconds.
    pub fn stage_traversal_seconds(&self) -> f64 {
        self.bs_traversal_length_m * self.refractive_index / SPEED_OF_LIGHT_M_PER_S
    }
}

impl Default for ChipGeometry {
    fn default() -> Self {
        Self {
            bs_traversal_length_m: Self::DEFAULT_BS_TRAVERSAL_LENGTH_M,
            refractive_index: 1.0,
            full_chip_length_m: None,
        }
    }
}

/// Optical decoding latency in seconds: `depth(n)` beamsplitter traversals,
/// or the full-chip traversal when the geometry carries that override.
pub fn optical_latency(plan: &HadamardPlan, geometry: &ChipGeometry) -> f64 {
    match geometry.full_chip_length_m() {
        Some(full) => full * geometry.refractive_index() / SPEED_OF_LIGHT_M_PER_S,
        None => f64::from(depth(plan.order())) * geometry.stage_traversal_seconds(),
    }
}

/// Runtime power draw of the passive network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalPower {
    /// Always zero: the couplers are passive in operation.
    pub runtime_power_w: f64,
    /// The one-off tuning power spent configuring the couplers is excluded
    /// from the runtime figure.
    pub tuning_power_excluded: bool,
}

pub fn optical_power() -> OpticalPower {
    OpticalPower {
        runtime_power_w: 0.0,
        tuning_power_excluded: true,
    }
}
