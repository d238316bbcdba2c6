//! Gate-level model of the receiver.
//!
//! Each optical mode becomes a two-bit line: `00` vacuum, `01` for `|α⟩`,
//! `10` for `|−α⟩` (`11` is unused). A logical beamsplitter is four parallel
//! two-input AND gates; the butterfly of those gates performs the transform
//! on symbols, disregarding amplitude growth.

use crate::error::{Error, Result};
use crate::fwht::{hadamard_entry, HadamardOrder};
use crate::topology::{depth, HadamardPlan};

/// Line state on one digital mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Bit pattern `00`.
    Vacuum,
    /// Bit pattern `01`, standing in for `|α⟩`.
    Plus,
    /// Bit pattern `10`, standing in for `|−α⟩`.
    Minus,
}

impl Symbol {
    /// Two-bit line representation `(first, second)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Symbol::Vacuum => (false, false),
            Symbol::Plus => (false, true),
            Symbol::Minus => (true, false),
        }
    }

    /// Rebuilds a symbol from line bits. `11` is not a symbol; seeing it
    /// means the netlist was driven with invalid inputs.
    pub fn from_bits(bits: (bool, bool)) -> Result<Self> {
        match bits {
            (false, false) => Ok(Symbol::Vacuum),
            (false, true) => Ok(Symbol::Plus),
            (true, false) => Ok(Symbol::Minus),
            (true, true) => Err(Error::Internal(
                "netlist produced forbidden bit pattern 11".to_string(),
            )),
        }
    }

    pub fn bit_str(self) -> &'static str {
        match self {
            Symbol::Vacuum => "00",
            Symbol::Plus => "01",
            Symbol::Minus => "10",
        }
    }

    pub fn polarity(self) -> Option<Polarity> {
        match self {
            Symbol::Vacuum => None,
            Symbol::Plus => Some(Polarity::Plus),
            Symbol::Minus => Some(Polarity::Minus),
        }
    }

    /// All valid symbols, for exhaustive checks.
    pub const ALL: [Symbol; 3] = [Symbol::Vacuum, Symbol::Plus, Symbol::Minus];
}

/// Sign of a decoded non-vacuum output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Plus,
    Minus,
}

/// Symbols across `2^n` digital lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolVector {
    symbols: Vec<Symbol>,
}

impl SymbolVector {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if !symbols.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "symbol vector length must be a power of two, got {}",
                symbols.len()
            )));
        }
        Ok(Self { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Input lines of one logical beamsplitter: two bits per port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputWire {
    A1,
    A2,
    B1,
    B2,
}

/// Output lines of one logical beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputWire {
    C1,
    C2,
    D1,
    D2,
}

/// One two-input AND gate of the netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AndGate {
    pub inputs: (InputWire, InputWire),
    pub output: OutputWire,
}

/// The fixed four-gate wiring of one logical beamsplitter:
/// `C1 = A1∧B1`, `C2 = A2∧B2`, `D1 = A1∧B2`, `D2 = A2∧B1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AndNetlist {
    gates: [AndGate; 4],
}

impl AndNetlist {
    pub const fn standard() -> Self {
        Self {
            gates: [
                AndGate {
                    inputs: (InputWire::A1, InputWire::B1),
                    output: OutputWire::C1,
                },
                AndGate {
                    inputs: (InputWire::A2, InputWire::B2),
                    output: OutputWire::C2,
                },
                AndGate {
                    inputs: (InputWire::B2, InputWire::A1),
                    output: OutputWire::D1,
                },
                AndGate {
                    inputs: (InputWire::B1, InputWire::A2),
                    output: OutputWire::D2,
                },
            ],
        }
    }

    pub fn gates(&self) -> &[AndGate] {
        &self.gates
    }

    /// Evaluates the four gates on raw line bits.
    pub fn evaluate(&self, a: (bool, bool), b: (bool, bool)) -> ((bool, bool), (bool, bool)) {
        let line = |wire: InputWire| match wire {
            InputWire::A1 => a.0,
            InputWire::A2 => a.1,
            InputWire::B1 => b.0,
            InputWire::B2 => b.1,
        };
        let mut c = (false, false);
        let mut d = (false, false);
        for gate in &self.gates {
            let value = line(gate.inputs.0) && line(gate.inputs.1);
            match gate.output {
                OutputWire::C1 => c.0 = value,
                OutputWire::C2 => c.1 = value,
                OutputWire::D1 => d.0 = value,
                OutputWire::D2 => d.1 = value,
            }
        }
        (c, d)
    }
}

/// Binary beamsplitter transformation as a direct truth table.
///
/// Rows pairing vacuum with anything collapse to `(Vacuum, Vacuum)`, the
/// AND-gate closure of the table.
pub fn bs_truth_table(a: Symbol, b: Symbol) -> (Symbol, Symbol) {
    use Symbol::*;
    match (a, b) {
        (Plus, Plus) => (Plus, Vacuum),
        (Plus, Minus) => (Vacuum, Plus),
        (Minus, Plus) => (Vacuum, Minus),
        (Minus, Minus) => (Minus, Vacuum),
        (Vacuum, _) | (_, Vacuum) => (Vacuum, Vacuum),
    }
}

/// Binary beamsplitter via the AND netlist; must agree with
/// [`bs_truth_table`] on every valid symbol pair.
pub fn logical_beamsplitter(a: Symbol, b: Symbol) -> Result<(Symbol, Symbol)> {
    let (c_bits, d_bits) = AndNetlist::standard().evaluate(a.bits(), b.bits());
    Ok((Symbol::from_bits(c_bits)?, Symbol::from_bits(d_bits)?))
}

/// Digital encoding of message `j`: `Plus` where the codeword sign is `+1`,
/// `Minus` where it is `-1`; `invert` swaps the two.
pub fn encode_digital(j: usize, order: HadamardOrder, invert: bool) -> Result<SymbolVector> {
    let symbols = (0..order.modes())
        .map(|k| {
            let positive = hadamard_entry(j, k, order)? == 1;
            Ok(if positive != invert {
                Symbol::Plus
            } else {
                Symbol::Minus
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SymbolVector::new(symbols)
}

/// Runs every stage of the plan through the logical beamsplitter.
pub fn propagate_digital(plan: &HadamardPlan, input: &SymbolVector) -> Result<SymbolVector> {
    let mut state = checked_state(plan, input)?;
    for stage in plan.stages() {
        apply_stage(&mut state, stage)?;
    }
    SymbolVector::new(state)
}

/// Like [`propagate_digital`] but keeps a snapshot after every stage;
/// entry 0 is the input itself.
pub fn propagate_digital_trace(
    plan: &HadamardPlan,
    input: &SymbolVector,
) -> Result<Vec<SymbolVector>> {
    let mut state = checked_state(plan, input)?;
    let mut trace = Vec::with_capacity(plan.stages().len() + 1);
    trace.push(input.clone());
    for stage in plan.stages() {
        apply_stage(&mut state, stage)?;
        trace.push(SymbolVector::new(state.clone())?);
    }
    Ok(trace)
}

fn checked_state(plan: &HadamardPlan, input: &SymbolVector) -> Result<Vec<Symbol>> {
    if input.len() != plan.modes() {
        return Err(Error::Domain(format!(
            "symbol vector length {} does not match plan with {} modes",
            input.len(),
            plan.modes()
        )));
    }
    Ok(input.symbols().to_vec())
}

fn apply_stage(state: &mut [Symbol], pairs: &[(u32, u32)]) -> Result<()> {
    for &(lo, hi) in pairs {
        let (c, d) = logical_beamsplitter(state[lo as usize], state[hi as usize])?;
        state[lo as usize] = c;
        state[hi as usize] = d;
    }
    Ok(())
}

/// Reads the decoded message off the network output: exactly one line must
/// be non-vacuum; its index and polarity are the result.
pub fn decode_digital(output: &SymbolVector) -> Result<(usize, Polarity)> {
    let mut found: Option<(usize, Polarity)> = None;
    for (idx, symbol) in output.symbols().iter().enumerate() {
        if let Some(polarity) = symbol.polarity() {
            if let Some((first, _)) = found {
                return Err(Error::DecodeFailure(format!(
                    "multiple non-vacuum outputs (first at {first}, another at {idx})"
                )));
            }
            found = Some((idx, polarity));
        }
    }
    found.ok_or_else(|| Error::DecodeFailure("all outputs are vacuum".to_string()))
}

/// Electronic decoding latency in seconds: one AND-gate depth per stage
/// (the four gates of a logical beamsplitter switch in parallel).
pub fn electronic_latency(plan: &HadamardPlan, and_delay_s: f64) -> Result<f64> {
    if !and_delay_s.is_finite() || and_delay_s <= 0.0 {
        return Err(Error::Domain(format!(
            "AND-gate delay must be positive and finite, got {and_delay_s}"
        )));
    }
    Ok(f64::from(depth(plan.order())) * and_delay_s)
}
