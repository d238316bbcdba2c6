//! Hadamard-code reference mathematics.
//!
//! Matrix entries `(-1)^(j·k)` with `j·k` the bitwise scalar product, codeword
//! encoding (rows of the matrix), and an unnormalized fast Walsh-Hadamard
//! transform that serves as the oracle both receiver substrates are checked
//! against.

use crate::error::{Error, Result};

/// Number of butterfly stages `n`; the transform acts on `2^n` modes.
///
/// Orders are capped (default 20) so a mode vector always fits comfortably in
/// memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HadamardOrder(u32);

impl HadamardOrder {
    /// Default upper bound on the order.
    pub const DEFAULT_CAP: u32 = 20;

    pub fn new(n: u32) -> Result<Self> {
        Self::with_cap(n, Self::DEFAULT_CAP)
    }

    pub fn with_cap(n: u32, cap: u32) -> Result<Self> {
        if n == 0 || n > cap {
            return Err(Error::Domain(format!(
                "order must lie in 1..={cap}, got {n}"
            )));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `2^n`, the number of modes.
    pub fn modes(self) -> usize {
        1usize << self.0
    }
}

impl std::fmt::Display for HadamardOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A ±1-valued row of the Hadamard matrix; one codeword of the code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    entries: Vec<i8>,
}

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if !entries.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "sign vector length must be a power of two, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| **e != 1 && **e != -1) {
            return Err(Error::Domain(format!(
                "sign vector entries must be +1 or -1, got {bad}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_mode_index(what: &str, idx: usize, order: HadamardOrder) -> Result<()> {
    if idx >= order.modes() {
        return Err(Error::Domain(format!(
            "{what} index {idx} out of range for 2^{} = {} modes",
            order.get(),
            order.modes()
        )));
    }
    Ok(())
}

/// Bitwise scalar product of the binary representations of two mode indices:
/// `Σ_t j_t · k_t` over the `n` bit positions, bit 0 being least significant.
pub fn bitwise_dot(j: usize, k: usize, order: HadamardOrder) -> Result<u32> {
    check_mode_index("row", j, order)?;
    check_mode_index("column", k, order)?;
    Ok((j & k).count_ones())
}

/// Hadamard matrix entry `(-1)^(j·k)`, returned as ±1.
pub fn hadamard_entry(j: usize, k: usize, order: HadamardOrder) -> Result<i8> {
    Ok(if bitwise_dot(j, k, order)? % 2 == 0 {
        1
    } else {
        -1
    })
}

/// Row `j` of the Hadamard matrix: the codeword transmitted for message `j`.
pub fn encode_codeword(j: usize, order: HadamardOrder) -> Result<SignVector> {
    check_mode_index("row", j, order)?;
    let entries = (0..order.modes())
        .map(|k| hadamard_entry(j, k, order).expect("column index in range"))
        .collect();
    Ok(SignVector { entries })
}

/// Unnormalized fast Walsh-Hadamard transform `H_n · x`.
///
/// Computed by the in-place butterfly; exact for integer-valued input. The
/// `1/2^(n/2)` normalization belongs to the optical model, not the oracle.
pub fn fwht_reference(x: &[f64]) -> Result<Vec<f64>> {
    let mut data = x.to_vec();
    fwht_in_place(&mut data)?;
    Ok(data)
}

/// In-place variant of [`fwht_reference`].
pub fn fwht_in_place(data: &mut [f64]) -> Result<()> {
    if !data.len().is_power_of_two() {
        return Err(Error::Domain(format!(
            "transform length must be a power of two, got {}",
            data.len()
        )));
    }
    let mut half = 1;
    while half < data.len() {
        for block in data.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (sum, diff) = (*a + *b, *a - *b);
                *a = sum;
                *b = diff;
            }
        }
        half *= 2;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn order(n: u32) -> HadamardOrder {
        HadamardOrder::new(n).unwrap()
    }

    #[test]
    fn order_bounds() {
        assert!(HadamardOrder::new(0).is_err());
        assert!(HadamardOrder::new(1).is_ok());
        assert!(HadamardOrder::new(20).is_ok());
        assert!(HadamardOrder::new(21).is_err());
        assert!(HadamardOrder::with_cap(24, 26).is_ok());
        assert_eq!(order(3).modes(), 8);
    }

    #[test]
    fn bitwise_dot_examples() {
        assert_eq!(bitwise_dot(0, 5, order(3)).unwrap(), 0);
        assert_eq!(bitwise_dot(3, 3, order(2)).unwrap(), 2);
        // 101 · 110 has exactly one shared bit.
        assert_eq!(bitwise_dot(5, 6, order(3)).unwrap(), 1);
    }

    #[test]
    fn bitwise_dot_range_check() {
        assert!(bitwise_dot(8, 0, order(3)).is_err());
        assert!(bitwise_dot(0, 4, order(2)).is_err());
    }

    #[test]
    fn hadamard_entry_examples() {
        for k in 0..4 {
            assert_eq!(hadamard_entry(0, k, order(2)).unwrap(), 1);
        }
        assert_eq!(hadamard_entry(3, 1, order(2)).unwrap(), -1);
        assert_eq!(hadamard_entry(3, 3, order(2)).unwrap(), 1);
    }

    #[test]
    fn encode_codeword_examples() {
        assert_eq!(encode_codeword(0, order(2)).unwrap().entries(), &[1, 1, 1, 1]);
        assert_eq!(encode_codeword(1, order(1)).unwrap().entries(), &[1, -1]);
        assert_eq!(
            encode_codeword(3, order(2)).unwrap().entries(),
            &[1, -1, -1, 1]
        );
        assert!(encode_codeword(4, order(2)).is_err());
    }

    #[test]
    fn fwht_examples() {
        assert_eq!(fwht_reference(&[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(
            fwht_reference(&[1.0, 1.0, 1.0, 1.0]).unwrap(),
            vec![4.0, 0.0, 0.0, 0.0]
        );
        assert!(fwht_reference(&[1.0, 2.0, 3.0]).is_err());
        assert!(fwht_reference(&[]).is_err());
    }

    #[test]
    fn sign_vector_rejects_bad_entries() {
        assert!(SignVector::new(vec![1, -1, 0, 1]).is_err());
        assert!(SignVector::new(vec![1, -1, 1]).is_err());
        assert!(SignVector::new(vec![1, -1]).is_ok());
    }

    #[test]
    fn rows_are_orthogonal() {
        for n in 1..=6u32 {
            let ord = order(n);
            for j in 0..ord.modes() {
                for jp in 0..ord.modes() {
                    let dot: i64 = (0..ord.modes())
                        .map(|k| {
                            i64::from(hadamard_entry(j, k, ord).unwrap())
                                * i64::from(hadamard_entry(jp, k, ord).unwrap())
                        })
                        .sum();
                    let expected = if j == jp { ord.modes() as i64 } else { 0 };
                    assert_eq!(dot, expected, "rows {j},{jp} at n={n}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fwht_is_involution_up_to_scale(
            n in 1u32..=6,
            seed in proptest::collection::vec(-100i32..=100, 64),
        ) {
            let modes = 1usize << n;
            let x: Vec<f64> = seed.iter().take(modes).map(|v| f64::from(*v)).collect();
            let twice = fwht_reference(&fwht_reference(&x).unwrap()).unwrap();
            for (orig, back) in x.iter().zip(&twice) {
                // Integer input keeps the butterfly exact.
                prop_assert_eq!(orig * modes as f64, *back);
            }
        }
    }
}
