//! Closed-form entanglement–rate bounds and the AME reference curve.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, weighted_partitions, PartitionShape};
use crate::compression::{average_rate, rate_for_shape};
use crate::error::{domain, Error, Result};
use crate::format::float;
use crate::linalg::entropy_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    UpperM2,
    LowerM2,
    UpperM,
    LowerM,
    Ame,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::UpperM2 => "upper_m2",
            BoundKind::LowerM2 => "lower_m2",
            BoundKind::UpperM => "upper_m",
            BoundKind::LowerM => "lower_m",
            BoundKind::Ame => "ame",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurvePoint {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "R")]
    pub rate: f64,
    pub value: f64,
    pub kind: BoundKind,
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("bounds need n >= 2, got {n}"));
    }
    Ok(())
}

/// Bipartitions `(k, n-k)`, `k = 1..⌊n/2⌋`, with multiplicities and `S(n,2)`.
fn bipartitions(n: usize) -> Result<(Vec<(usize, u128)>, u128)> {
    let (weighted, total) = weighted_partitions(n, 2)?;
    Ok((weighted.into_iter().map(|(s, f)| (s.blocks()[0], f)).collect(), total))
}

/// `r_k = ⌈log₂(k+1)⌉ + ⌈log₂(n−k+1)⌉` for `k = 1..⌊n/2⌋`.
pub fn universal_rates_m2(n: usize) -> Result<BTreeMap<usize, usize>> {
    check_n(n)?;
    (1..=n / 2)
        .map(|k| Ok((k, rate_for_shape(&PartitionShape::bipartition(n, k)?))))
        .collect()
}

/// `r_λ` of the universal compressor for every `λ ∈ Λ_{n,m}`.
pub fn universal_rates(n: usize, m: usize) -> Result<BTreeMap<PartitionShape, usize>> {
    let (weighted, _) = weighted_partitions(n, m)?;
    Ok(weighted.into_iter().map(|(s, _)| (s.clone(), rate_for_shape(&s))).collect())
}

/// `(1/S(n,2)) Σ_k f(k,n−k) min{⌊r_k/2⌋, log₂(k+1)}` at the average of the given rates.
pub fn upper_bound_m2(n: usize, rates: &BTreeMap<usize, usize>) -> Result<BoundCurvePoint> {
    check_n(n)?;
    let (cuts, total) = bipartitions(n)?;
    let (mut value, mut rate) = (0.0, 0.0);
    for (k, f) in cuts {
        let r = *rates
            .get(&k)
            .ok_or_else(|| Error::Domain(format!("missing rate r_{k} for n={n}")))?;
        if r < 2 {
            return domain(format!("rate r_{k}={r} is below 2"));
        }
        value += f as f64 * ((r / 2) as f64).min(((k + 1) as f64).log2());
        rate += (f * r as u128) as f64;
    }
    let total = total as f64;
    Ok(BoundCurvePoint { n, m: 2, rate: rate / total, value: value / total, kind: BoundKind::UpperM2 })
}

/// Exact numerators `C(k,j) C(n−k,t−j)` for `j = 0..=k` and their denominator `C(n,t)`.
pub fn hypergeometric_weights(n: usize, k: usize, t: usize) -> Result<(Vec<u128>, u128)> {
    if k == 0 || k > n / 2 || t > n {
        return domain(format!("hypergeometric spectrum needs 1 <= k <= n/2 and t <= n, got n={n} k={k} t={t}"));
    }
    let nums = (0..=k)
        .map(|j| {
            let a = binomial(k as u64, j as i64)?;
            let b = binomial((n - k) as u64, t as i64 - j as i64)?;
            a.checked_mul(b).ok_or_else(|| Error::Overflow(format!("C({k},{j})C({},{})", n - k, t as i64 - j as i64)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((nums, binomial(n as u64, t as i64)?))
}

/// Schmidt spectrum `C(k,j) C(n−k,t−j) / C(n,t)` of `|D_t^(n)⟩` across a `k`-qubit cut.
pub fn hypergeometric_spectrum(n: usize, k: usize, t: usize) -> Result<Vec<f64>> {
    let (nums, den) = hypergeometric_weights(n, k, t)?;
    Ok(nums.into_iter().map(|x| x as f64 / den as f64).collect())
}

/// Average entanglement of `|D_{⌊n/2⌋}^(n)⟩` over all bipartitions, at the universal rate.
pub fn lower_bound_m2(n: usize) -> Result<BoundCurvePoint> {
    check_n(n)?;
    let t = n / 2;
    let (cuts, total) = bipartitions(n)?;
    let rates = universal_rates_m2(n)?;
    let (mut value, mut rate) = (0.0, 0.0);
    for (k, f) in cuts {
        value += f as f64 * entropy_bits(hypergeometric_spectrum(n, k, t)?);
        rate += (f * rates[&k] as u128) as f64;
    }
    let total = total as f64;
    Ok(BoundCurvePoint { n, m: 2, rate: rate / total, value: value / total, kind: BoundKind::LowerM2 })
}

/// Per-shape term `min{⌊(m−1) r_λ / m⌋, log₂ ∏_{i<m} (λᵢ+1)}` over the `m−1` smallest blocks.
pub fn upper_bound_term(shape: &PartitionShape, rate: usize) -> f64 {
    let m = shape.m();
    let capacity = ((m - 1) * rate / m) as f64;
    let dims: f64 = shape.blocks()[..m - 1].iter().map(|&b| ((b + 1) as f64).log2()).sum();
    capacity.min(dims)
}

/// `(1/S(n,m)) Σ_λ f(λ)·upper_bound_term(λ, r_λ)` at the average of the given rates.
pub fn upper_bound_m(n: usize, m: usize, rates: &BTreeMap<PartitionShape, usize>) -> Result<BoundCurvePoint> {
    let (weighted, total) = weighted_partitions(n, m)?;
    let (mut value, mut rate) = (0.0, 0.0);
    for (shape, f) in weighted {
        let r = *rates
            .get(&shape)
            .ok_or_else(|| Error::Domain(format!("missing rate for partition {shape}")))?;
        value += f as f64 * upper_bound_term(&shape, r);
        rate += (f * r as u128) as f64;
    }
    let total = total as f64;
    Ok(BoundCurvePoint { n, m, rate: rate / total, value: value / total, kind: BoundKind::UpperM })
}

/// `(1/S(n,m)) Σ_λ f(λ)·E(λ)` where `oracle(λ)` evaluates the geometric
/// entanglement of `|D_{⌊n/2⌋}^(n)⟩` across `λ`.
pub fn lower_bound_m<F>(n: usize, m: usize, mut oracle: F) -> Result<BoundCurvePoint>
where
    F: FnMut(&PartitionShape) -> Result<f64>,
{
    let (weighted, total) = weighted_partitions(n, m)?;
    let mut value = 0.0;
    for (shape, f) in &weighted {
        value += *f as f64 * oracle(shape)?;
    }
    Ok(BoundCurvePoint {
        n,
        m,
        rate: average_rate(n, m)?,
        value: value / total as f64,
        kind: BoundKind::LowerM,
    })
}

/// Uncompressed AME reference: `(1/S(n,2)) Σ_λ f(λ) min(λ₁, λ₂)` at `R = n`.
pub fn ame_curve(n: usize) -> Result<BoundCurvePoint> {
    check_n(n)?;
    let (cuts, total) = bipartitions(n)?;
    let sum: u128 = cuts.iter().map(|&(k, f)| f * k as u128).sum();
    Ok(BoundCurvePoint { n, m: 2, rate: n as f64, value: sum as f64 / total as f64, kind: BoundKind::Ame })
}

/// CSV with header `n,m,kind,R,value`.
pub fn write_csv<W: Write>(out: &mut W, points: &[BoundCurvePoint]) -> std::io::Result<()> {
    writeln!(out, "n,m,kind,R,value")?;
    for p in points {
        writeln!(out, "{},{},{},{},{}", p.n, p.m, p.kind, float(p.rate), float(p.value))?;
    }
    Ok(())
}
