//! Exact integer combinatorics over block-size multisets.
//!
//! Every count is computed in `u128` with checked arithmetic, so results are
//! either exact or an [`Error::Overflow`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A sorted multiset of positive block sizes `λ₁ ≤ … ≤ λ_m` summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartitionShape {
    blocks: Vec<usize>,
}

impl PartitionShape {
    /// Builds a shape from block sizes in any order.
    pub fn new(mut blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return domain("a partition needs at least one block");
        }
        if blocks.contains(&0) {
            return domain("block sizes must be positive");
        }
        blocks.sort_unstable();
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// The two-block shape `(k, n-k)` with the smaller block first.
    pub fn bipartition(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return domain(format!("bipartition ({k}, {}) of {n} qubits", n as i64 - k as i64));
        }
        Self::new(vec![k, n - k])
    }
}

impl TryFrom<Vec<usize>> for PartitionShape {
    type Error = Error;

    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<PartitionShape> for Vec<usize> {
    fn from(shape: PartitionShape) -> Self {
        shape.blocks
    }
}

impl fmt::Display for PartitionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for PartitionShape {
    type Err = Error;

    /// Parses `"1,2,3"`, optionally wrapped in parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let blocks = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Domain(format!("bad block size {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }
}

/// Exact binomial coefficient `C(n, k)`; zero when `k` is outside `[0, n]`.
pub fn binomial(n: u64, k: i64) -> Result<u128> {
    if k < 0 || k as u64 > n {
        return Ok(0);
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step.
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("C({n},{k})")))?
            / (i + 1) as u128;
    }
    Ok(acc)
}

/// Binomial coefficient as `f64`, for weights inside floating-point formulas.
pub(crate) fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if m < 1 || m > n {
        return domain(format!("need 1 <= m <= n, got n={n}, m={m}"));
    }
    Ok(())
}

/// Number of integer partitions of `n` into exactly `m` positive parts.
pub fn partition_count(n: usize, m: usize) -> u128 {
    // p[j][i] = p_j(i)
    let mut p = vec![vec![0u128; n + 1]; m + 1];
    p[0][0] = 1;
    for j in 1..=m {
        for i in 1..=n {
            if j > i {
                continue;
            }
            p[j][i] = p[j][i - j] + p[j - 1][i - 1];
        }
    }
    p[m][n]
}

/// All block-size multisets of `n` into `m` blocks, in lexicographic order.
pub fn partitions(n: usize, m: usize) -> Result<Vec<PartitionShape>> {
    check_nm(n, m)?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(m);
    extend_partitions(n, m, 1, &mut prefix, &mut out);
    Ok(out)
}

fn extend_partitions(
    remaining: usize,
    slots: usize,
    min_part: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<PartitionShape>,
) {
    if slots == 1 {
        if remaining >= min_part {
            prefix.push(remaining);
            out.push(PartitionShape { blocks: prefix.clone() });
            prefix.pop();
        }
        return;
    }
    // The smallest remaining part can be at most remaining / slots.
    for part in min_part..=remaining / slots {
        prefix.push(part);
        extend_partitions(remaining - part, slots - 1, part, prefix, out);
        prefix.pop();
    }
}

/// Number of set partitions of `{1..n}` with block-size multiset `λ`.
pub fn multiplicity(shape: &PartitionShape) -> Result<u128> {
    let n = shape.n();
    let overflow = || Error::Overflow(format!("f{shape}"));
    let mut remaining = n as u64;
    let mut multinomial: u128 = 1;
    for &b in shape.blocks() {
        multinomial = multinomial
            .checked_mul(binomial(remaining, b as i64)?)
            .ok_or_else(overflow)?;
        remaining -= b as u64;
    }
    let mut symmetry: u128 = 1;
    for run in shape.blocks().chunk_by(|a, b| a == b) {
        for i in 2..=run.len() as u128 {
            symmetry = symmetry.checked_mul(i).ok_or_else(overflow)?;
        }
    }
    Ok(multinomial / symmetry)
}

/// Stirling number of the second kind `S(n, m)`.
pub fn stirling2(n: usize, m: usize) -> Result<u128> {
    check_nm(n, m)?;
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=m.min(i)).rev() {
            row[j] = (j as u128)
                .checked_mul(row[j])
                .and_then(|v| v.checked_add(row[j - 1]))
                .ok_or_else(|| Error::Overflow(format!("S({n},{m})")))?;
        }
        row[0] = 0;
    }
    Ok(row[m])
}

/// Shapes of `Λ_{n,m}` with their multiplicities and the total `S(n,m)`.
pub fn weighted_partitions(n: usize, m: usize) -> Result<(Vec<(PartitionShape, u128)>, u128)> {
    let shapes = partitions(n, m)?;
    let weighted = shapes
        .into_iter()
        .map(|s| multiplicity(&s).map(|f| (s, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok((weighted, stirling2(n, m)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(b: &[usize]) -> PartitionShape {
        PartitionShape::new(b.to_vec()).unwrap()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(9, 0).unwrap(), 1);
        assert_eq!(binomial(6, 3).unwrap(), 720 / (6 * 6));
        assert_eq!(binomial(5, -1).unwrap(), 0);
        assert_eq!(binomial(5, 6).unwrap(), 0);
        assert_eq!(binomial(64, 32).unwrap(), 1_832_624_140_942_590_534);
    }

    #[test]
    fn binomial_overflow_is_reported() {
        assert!(matches!(binomial(200, 100), Err(Error::Overflow(_))));
    }

    #[test]
    fn worked_example_six_into_three() {
        let got = partitions(6, 3).unwrap();
        assert_eq!(got, vec![shape(&[1, 1, 4]), shape(&[1, 2, 3]), shape(&[2, 2, 2])]);
        let f: Vec<u128> = got.iter().map(|s| multiplicity(s).unwrap()).collect();
        assert_eq!(f, vec![15, 60, 15]);
        assert_eq!(stirling2(6, 3).unwrap(), 90);
    }

    #[test]
    fn small_cases() {
        assert_eq!(partitions(7, 1).unwrap(), vec![shape(&[7])]);
        assert_eq!(partitions(5, 2).unwrap(), vec![shape(&[1, 4]), shape(&[2, 3])]);
        assert_eq!(stirling2(4, 4).unwrap(), 1);
        for n in 2..=20 {
            assert_eq!(stirling2(n, 2).unwrap(), (1u128 << (n - 1)) - 1);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(partitions(3, 4).is_err());
        assert!(partitions(3, 0).is_err());
        assert!(stirling2(2, 3).is_err());
        assert!(PartitionShape::new(vec![]).is_err());
        assert!(PartitionShape::new(vec![1, 0]).is_err());
    }

    #[test]
    fn count_matches_enumeration() {
        for n in 1..=18 {
            for m in 1..=n {
                assert_eq!(partition_count(n, m), partitions(n, m).unwrap().len() as u128);
            }
        }
    }

    #[test]
    fn multiplicities_sum_to_stirling_up_to_twenty() {
        for n in 1..=20 {
            for m in 1..=n {
                let (w, s) = weighted_partitions(n, m).unwrap();
                assert_eq!(w.iter().map(|(_, f)| f).sum::<u128>(), s, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn shapes_are_sorted_and_distinct() {
        let all = partitions(14, 4).unwrap();
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
        for s in &all {
            assert_eq!(s.n(), 14);
            assert_eq!(s.m(), 4);
            assert!(s.blocks().windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn parse_and_display() {
        let s: PartitionShape = "3,1,2".parse().unwrap();
        assert_eq!(s.to_string(), "(1,2,3)");
        assert_eq!("(2,2,2)".parse::<PartitionShape>().unwrap(), shape(&[2, 2, 2]));
        assert!("1,x".parse::<PartitionShape>().is_err());
    }
}
