//! Butterfly network plan shared by the optical and digital substrates.
//!
//! A plan lists, stage by stage, which mode pairs are coupled. Stage `s`
//! pairs indices that differ exactly in bit `s` (least-significant bit
//! first); within a pair the lower index carries the kernel's "+" output and
//! the higher index the "−" output.

use serde::Serialize;

use crate::error::Result;
use crate::fwht::HadamardOrder;

/// The butterfly topology: `n` stages of `2^(n-1)` disjoint `(lo, hi)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardPlan {
    order: HadamardOrder,
    stages: Vec<Vec<(u32, u32)>>,
}

/// Builds the butterfly plan for the given order.
pub fn build_butterfly(order: HadamardOrder) -> HadamardPlan {
    let modes = order.modes() as u32;
    let stages = (0..order.get())
        .map(|s| {
            let bit = 1u32 << s;
            (0..modes)
                .filter(|k| k & bit == 0)
                .map(|k| (k, k | bit))
                .collect()
        })
        .collect();
    HadamardPlan { order, stages }
}

impl HadamardPlan {
    pub fn order(&self) -> HadamardOrder {
        self.order
    }

    pub fn modes(&self) -> usize {
        self.order.modes()
    }

    pub fn stages(&self) -> &[Vec<(u32, u32)>] {
        &self.stages
    }

    /// Total number of pairs across all stages.
    pub fn pair_count(&self) -> u64 {
        self.stages.iter().map(|s| s.len() as u64).sum()
    }

    /// JSON rendering of the plan (stages as arrays of `[lo, hi]`).
    pub fn dump_json(&self) -> String {
        #[derive(Serialize)]
        struct PlanDump<'a> {
            order: u32,
            stages: &'a [Vec<(u32, u32)>],
        }
        serde_json::to_string_pretty(&PlanDump {
            order: self.order.get(),
            stages: &self.stages,
        })
        .expect("plan serialization cannot fail")
    }
}

/// Number of two-mode couplers the butterfly needs: `n · 2^(n-1)`.
pub fn beamsplitter_count(order: HadamardOrder) -> u64 {
    u64::from(order.get()) << (order.get() - 1)
}

/// Number of sequential stages a signal traverses end to end.
pub fn depth(order: HadamardOrder) -> u32 {
    order.get()
}

/// Convenience: plan construction straight from a raw order value.
pub fn build_butterfly_for(n: u32) -> Result<HadamardPlan> {
    Ok(build_butterfly(HadamardOrder::new(n)?))
}
