//! Density-matrix simulation of compressed versus uncompressed transmission
//! of a symmetric state through i.i.d. depolarizing channels, with optional
//! gate noise on the compression circuit.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compression::{encode_blocks, MAX_BLOCK};
use crate::entanglement::DensityMatrix;
use crate::error::{domain, Result};
use crate::format::float;
use crate::linalg::CMatrix;
use crate::par;
use crate::states::WeightedDickeState;

/// Hardware noise parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseConfig", into = "NoiseConfig")]
pub struct NoiseParams {
    pub t1: f64,
    pub t2: f64,
    pub t_1q: f64,
    pub t_2q: f64,
    pub p1: f64,
    pub p2: f64,
    pub n1: u32,
    pub n2: u32,
}

/// On-disk form of [`NoiseParams`].
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub T1_us: f64,
    pub T2_us: f64,
    pub t1q_ns: f64,
    pub t2q_ns: f64,
    pub p1: f64,
    pub p2: f64,
    pub N1: u32,
    pub N2: u32,
}

impl TryFrom<NoiseConfig> for NoiseParams {
    type Error = crate::Error;

    fn try_from(c: NoiseConfig) -> Result<Self> {
        let p = NoiseParams {
            t1: c.T1_us * 1e-6,
            t2: c.T2_us * 1e-6,
            t_1q: c.t1q_ns * 1e-9,
            t_2q: c.t2q_ns * 1e-9,
            p1: c.p1,
            p2: c.p2,
            n1: c.N1,
            n2: c.N2,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<NoiseParams> for NoiseConfig {
    fn from(p: NoiseParams) -> Self {
        NoiseConfig {
            T1_us: p.t1 * 1e6,
            T2_us: p.t2 * 1e6,
            t1q_ns: p.t_1q * 1e9,
            t2q_ns: p.t_2q * 1e9,
            p1: p.p1,
            p2: p.p2,
            N1: p.n1,
            N2: p.n2,
        }
    }
}

impl Default for NoiseParams {
    /// Superconducting-device values for a 3→2 qubit compression circuit of
    /// 37 single-qubit and 9 two-qubit gates.
    fn default() -> Self {
        NoiseParams {
            t1: 120e-6,
            t2: 80e-6,
            t_1q: 35e-9,
            t_2q: 300e-9,
            p1: 1e-4,
            p2: 1e-3,
            n1: 37,
            n2: 9,
        }
    }
}

impl NoiseParams {
    /// Same hardware, no gates: every effective error probability is zero.
    pub fn noiseless() -> Self {
        NoiseParams { n1: 0, n2: 0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("T1", self.t1), ("T2", self.t2), ("t_1q", self.t_1q), ("t_2q", self.t_2q)] {
            if !(t > 0.0 && t.is_finite()) {
                return domain(format!("{name} must be positive, got {t}"));
            }
        }
        if self.t2 > 2.0 * self.t1 {
            return domain(format!("T2={} exceeds 2*T1={}", self.t2, 2.0 * self.t1));
        }
        check_probability("p1", self.p1)?;
        check_probability("p2", self.p2)
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("{name} must lie in [0, 1], got {p}"));
    }
    Ok(())
}

/// Gate noise of the whole compression circuit folded into single-qubit channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveGateNoise {
    pub gamma_a: f64,
    pub gamma_p: f64,
    pub p1_eff: f64,
    pub p2_eff: f64,
}

impl EffectiveGateNoise {
    pub const ZERO: Self = Self { gamma_a: 0.0, gamma_p: 0.0, p1_eff: 0.0, p2_eff: 0.0 };

    /// `𝒟(p₂) ∘ 𝒟(p₁) ∘ 𝒫(γ_p) ∘ 𝒜(γ_a)`, in application order.
    pub fn channels(&self) -> [Channel; 4] {
        [
            Channel::AmplitudeDamping(self.gamma_a),
            Channel::PhaseDamping(self.gamma_p),
            Channel::Depolarizing(self.p1_eff),
            Channel::Depolarizing(self.p2_eff),
        ]
    }
}

pub fn effective_gate_noise(params: &NoiseParams) -> Result<EffectiveGateNoise> {
    params.validate()?;
    let t_tot = params.n1 as f64 * params.t_1q + params.n2 as f64 * params.t_2q;
    let gamma_a = 1.0 - (-t_tot / params.t1).exp();
    let inv_tphi = 1.0 / params.t2 - 1.0 / (2.0 * params.t1);
    let gamma_p = 1.0 - (-t_tot * inv_tphi).exp();
    Ok(EffectiveGateNoise {
        gamma_a,
        gamma_p,
        p1_eff: 1.0 - (1.0 - params.p1).powi(params.n1 as i32),
        p2_eff: 1.0 - (1.0 - params.p2).powi(params.n2 as i32),
    })
}

/// Total duration `N₁t₁q + N₂t₂q` of the compression circuit in seconds.
pub fn circuit_duration(params: &NoiseParams) -> f64 {
    params.n1 as f64 * params.t_1q + params.n2 as f64 * params.t_2q
}

pub type Kraus = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p")]
pub enum Channel {
    /// `ρ → (1−p)ρ + (p/3)(XρX + YρY + ZρZ)`.
    Depolarizing(f64),
    AmplitudeDamping(f64),
    PhaseDamping(f64),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Channel {
    pub fn probability(&self) -> f64 {
        match *self {
            Channel::Depolarizing(p) | Channel::AmplitudeDamping(p) | Channel::PhaseDamping(p) => p,
        }
    }

    pub fn kraus(&self) -> Result<Vec<Kraus>> {
        let p = self.probability();
        check_probability("channel probability", p)?;
        let z = c(0.0, 0.0);
        Ok(match *self {
            Channel::Depolarizing(p) => {
                let a = (1.0 - p).sqrt();
                let b = (p / 3.0).sqrt();
                vec![
                    [[c(a, 0.0), z], [z, c(a, 0.0)]],
                    [[z, c(b, 0.0)], [c(b, 0.0), z]],
                    [[z, c(0.0, -b)], [c(0.0, b), z]],
                    [[c(b, 0.0), z], [z, c(-b, 0.0)]],
                ]
            }
            Channel::AmplitudeDamping(g) => vec![
                [[c(1.0, 0.0), z], [z, c((1.0 - g).sqrt(), 0.0)]],
                [[z, c(g.sqrt(), 0.0)], [z, z]],
            ],
            Channel::PhaseDamping(g) => vec![
                [[c(1.0, 0.0), z], [z, c((1.0 - g).sqrt(), 0.0)]],
                [[z, z], [z, c(g.sqrt(), 0.0)]],
            ],
        })
    }

    fn is_identity(&self) -> bool {
        self.probability() == 0.0
    }
}

/// `Σ_K K ρ K†` with every `K` acting on `qubit` (big-endian position).
pub fn apply_single_qubit_channel(rho: &DensityMatrix, qubit: usize, channel: Channel) -> Result<DensityMatrix> {
    let n = rho.dims().len();
    if qubit >= n || rho.dims()[qubit] != 2 {
        return domain(format!("qubit {qubit} is not a qubit of a register with dims {:?}", rho.dims()));
    }
    let kraus = channel.kraus()?;
    if channel.is_identity() {
        return Ok(rho.clone());
    }
    let m = rho.matrix();
    let d = m.nrows();
    let bit = 1usize << (n - 1 - qubit);
    let mut out = CMatrix::zeros(d, d);
    let mut left = CMatrix::zeros(d, d);
    for k in &kraus {
        // left = K ρ on the row index
        for r0 in (0..d).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for col in 0..d {
                let (a, b) = (m[(r0, col)], m[(r1, col)]);
                left[(r0, col)] = k[0][0] * a + k[0][1] * b;
                left[(r1, col)] = k[1][0] * a + k[1][1] * b;
            }
        }
        // out += left K† on the column index
        for c0 in (0..d).filter(|c| c & bit == 0) {
            let c1 = c0 | bit;
            for row in 0..d {
                let (a, b) = (left[(row, c0)], left[(row, c1)]);
                out[(row, c0)] += a * k[0][0].conj() + b * k[0][1].conj();
                out[(row, c1)] += a * k[1][0].conj() + b * k[1][1].conj();
            }
        }
    }
    DensityMatrix::from_parts(rho.dims().to_vec(), out)
}

/// Applies `channel` independently to every qubit.
pub fn apply_to_all(rho: &DensityMatrix, channel: Channel) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    for q in 0..rho.dims().len() {
        out = apply_single_qubit_channel(&out, q, channel)?;
    }
    Ok(out)
}

/// Effective gate noise `ℰ_gate^(1)` applied to every qubit of the register.
pub fn gate_noise_map(rho: &DensityMatrix, eff: &EffectiveGateNoise) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    for q in 0..rho.dims().len() {
        for ch in eff.channels() {
            out = apply_single_qubit_channel(&out, q, ch)?;
        }
    }
    Ok(out)
}

fn halves(state: &WeightedDickeState) -> Result<usize> {
    let n = state.n();
    if n < 2 || n % 2 != 0 || n / 2 > MAX_BLOCK.min(5) {
        return domain(format!("transmission scenarios need an even n in 2..=10, got {n}"));
    }
    Ok(n / 2)
}

fn pure_rho(state: &WeightedDickeState) -> Result<DensityMatrix> {
    DensityMatrix::from_qubits(&state.to_statevector()?, state.n())
}

/// `E_N` across the half cut after depolarizing every physical qubit.
pub fn scenario_uncompressed(state: &WeightedDickeState, p: f64) -> Result<f64> {
    let h = halves(state)?;
    let rho = apply_to_all(&pure_rho(state)?, Channel::Depolarizing(p))?;
    rho.log_negativity(&(0..h).collect::<Vec<_>>())
}

/// The encoded registers before channel noise: optional gate noise on the
/// physical qubits, then the trace-preserving block encoders.
pub fn encoded_state(state: &WeightedDickeState, gate_noise: Option<&EffectiveGateNoise>) -> Result<DensityMatrix> {
    let h = halves(state)?;
    let mut rho = pure_rho(state)?;
    if let Some(eff) = gate_noise {
        rho = gate_noise_map(&rho, eff)?;
    }
    encode_blocks(&rho, &[h, h])
}

fn transmit_encoded(encoded: &DensityMatrix, p: f64) -> Result<f64> {
    let rho = apply_to_all(encoded, Channel::Depolarizing(p))?;
    let half = rho.dims().len() / 2;
    rho.log_negativity(&(0..half).collect::<Vec<_>>())
}

/// `E_N` across the register cut after depolarizing every compressed qubit.
pub fn scenario_compressed(state: &WeightedDickeState, p: f64, gate_noise: Option<&EffectiveGateNoise>) -> Result<f64> {
    transmit_encoded(&encoded_state(state, gate_noise)?, p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub p: Vec<f64>,
    pub uncompressed: Vec<f64>,
    pub compressed_ideal: Vec<f64>,
    pub compressed_noisy: Vec<f64>,
    /// Every sign change of `compressed_noisy − uncompressed`, interpolated.
    pub crossings: Vec<f64>,
    /// First point where the noisy compressed series overtakes the uncompressed one.
    pub crossover: Option<f64>,
    pub gate_noise: EffectiveGateNoise,
}

/// Differences below this are treated as ties when locating crossings.
const TIE: f64 = 1e-12;

/// Linearly interpolated zeros of `d` over `x`, ignoring ties. Each entry is
/// `(x*, rising)`, where `rising` means `d` goes from negative to positive.
pub fn sign_changes(x: &[f64], d: &[f64]) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for i in 0..d.len() {
        if d[i].abs() < TIE {
            continue;
        }
        if let Some(j) = last {
            if (d[j] < 0.0) != (d[i] < 0.0) {
                let t = d[j] / (d[j] - d[i]);
                out.push((x[j] + t * (x[i] - x[j]), d[j] < 0.0));
            }
        }
        last = Some(i);
    }
    out
}

pub fn sweep_and_crossover(state: &WeightedDickeState, p_grid: &[f64], params: &NoiseParams) -> Result<SweepResult> {
    if p_grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("p grid must be sorted ascending");
    }
    for &p in p_grid {
        check_probability("p", p)?;
    }
    let eff = effective_gate_noise(params)?;
    let ideal = encoded_state(state, None)?;
    let noisy = encoded_state(state, Some(&eff))?;
    let rows = par::map(p_grid.to_vec(), |p| -> Result<[f64; 3]> {
        Ok([scenario_uncompressed(state, p)?, transmit_encoded(&ideal, p)?, transmit_encoded(&noisy, p)?])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let uncompressed: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let compressed_ideal: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let compressed_noisy: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let d: Vec<f64> = compressed_noisy.iter().zip(&uncompressed).map(|(a, b)| a - b).collect();
    let changes = sign_changes(p_grid, &d);
    Ok(SweepResult {
        p: p_grid.to_vec(),
        crossings: changes.iter().map(|c| c.0).collect(),
        crossover: changes.iter().find(|c| c.1).map(|c| c.0),
        uncompressed,
        compressed_ideal,
        compressed_noisy,
        gate_noise: eff,
    })
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// CSV with header `p,EN_uncompressed,EN_compressed_ideal,EN_compressed_noisy`.
pub fn write_csv<W: Write>(out: &mut W, sweep: &SweepResult) -> std::io::Result<()> {
    writeln!(out, "p,EN_uncompressed,EN_compressed_ideal,EN_compressed_noisy")?;
    for i in 0..sweep.p.len() {
        writeln!(
            out,
            "{},{},{},{}",
            float(sweep.p[i]),
            float(sweep.uncompressed[i]),
            float(sweep.compressed_ideal[i]),
            float(sweep.compressed_noisy[i])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use approx::assert_abs_diff_eq;

    fn one_qubit(m: [[f64; 2]; 2]) -> DensityMatrix {
        let v: Vec<Complex64> = m.iter().flatten().map(|&x| c(x, 0.0)).collect();
        DensityMatrix::new(vec![2], CMatrix::from_row_slice(2, 2, &v)).unwrap()
    }

    #[test]
    fn effective_noise_defaults() {
        let p = NoiseParams::default();
        assert_abs_diff_eq!(circuit_duration(&p), 3.995e-6, epsilon = 1e-15);
        let e = effective_gate_noise(&p).unwrap();
        let g = 1.0 - (-3.995f64 / 120.0).exp();
        assert_abs_diff_eq!(e.gamma_a, g, epsilon = 1e-12);
        assert_abs_diff_eq!(e.gamma_p, g, epsilon = 1e-12);
        assert_abs_diff_eq!(e.gamma_a, 0.03274, epsilon = 1e-5);
        assert_abs_diff_eq!(e.p1_eff, 3.693e-3, epsilon = 1e-6);
        assert_abs_diff_eq!(e.p2_eff, 1.0 - 0.999f64.powi(9), epsilon = 1e-15);
        assert_eq!(effective_gate_noise(&NoiseParams::noiseless()).unwrap(), EffectiveGateNoise::ZERO);
    }

    #[test]
    fn parameter_validation() {
        let bad = NoiseParams { t2: 250e-6, ..NoiseParams::default() };
        assert!(effective_gate_noise(&bad).is_err());
        let bad = NoiseParams { p1: 1.5, ..NoiseParams::default() };
        assert!(bad.validate().is_err());
        let bad = NoiseParams { t_1q: 0.0, ..NoiseParams::default() };
        assert!(bad.validate().is_err());
        assert!(Channel::Depolarizing(-0.1).kraus().is_err());
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{"T1_us":120,"T2_us":80,"t1q_ns":35,"t2q_ns":300,"p1":0.0001,"p2":0.001,"N1":37,"N2":9}"#;
        let p: NoiseParams = serde_json::from_str(json).unwrap();
        assert_abs_diff_eq!(p.t1, 120e-6, epsilon = 1e-18);
        assert_eq!(p.n1, 37);
        let back: NoiseParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_abs_diff_eq!(back.t_2q, p.t_2q, epsilon = 1e-20);
        assert!(serde_json::from_str::<NoiseParams>(r#"{"T1_us":10,"T2_us":80,"t1q_ns":35,"t2q_ns":300,"p1":0,"p2":0,"N1":1,"N2":1}"#).is_err());
    }

    #[test]
    fn kraus_completeness() {
        for ch in [Channel::Depolarizing(0.3), Channel::AmplitudeDamping(0.7), Channel::PhaseDamping(0.2)] {
            let mut sum = [[c(0.0, 0.0); 2]; 2];
            for k in ch.kraus().unwrap() {
                for i in 0..2 {
                    for j in 0..2 {
                        for l in 0..2 {
                            sum[i][j] += k[l][i].conj() * k[l][j];
                        }
                    }
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((sum[i][j] - c(want, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn channel_examples() {
        let rho = one_qubit([[0.6, 0.2], [0.2, 0.4]]);
        for ch in [Channel::Depolarizing(0.0), Channel::AmplitudeDamping(0.0), Channel::PhaseDamping(0.0)] {
            let out = apply_single_qubit_channel(&rho, 0, ch).unwrap();
            assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
        }
        let out = apply_single_qubit_channel(&rho, 0, Channel::AmplitudeDamping(1.0)).unwrap();
        assert!(max_abs_diff(out.matrix(), one_qubit([[1.0, 0.0], [0.0, 0.0]]).matrix()) < 1e-15);
        let zero = one_qubit([[1.0, 0.0], [0.0, 0.0]]);
        let out = apply_single_qubit_channel(&zero, 0, Channel::Depolarizing(0.75)).unwrap();
        assert!(max_abs_diff(out.matrix(), one_qubit([[0.5, 0.0], [0.0, 0.5]]).matrix()) < 1e-15);
        assert!(apply_single_qubit_channel(&zero, 1, Channel::Depolarizing(0.1)).is_err());
    }

    #[test]
    fn gate_map_identity_at_zero() {
        let s = WeightedDickeState::dicke(6, 3).unwrap();
        let rho = pure_rho(&s).unwrap();
        let out = gate_noise_map(&rho, &EffectiveGateNoise::ZERO).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn ideal_compression_preserves_negativity() {
        let s = WeightedDickeState::dicke(6, 3).unwrap();
        let a = scenario_uncompressed(&s, 0.0).unwrap();
        let b = scenario_compressed(&s, 0.0, None).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        let eff = effective_gate_noise(&NoiseParams::default()).unwrap();
        assert!(scenario_compressed(&s, 0.0, Some(&eff)).unwrap() < a);
        assert!(scenario_uncompressed(&WeightedDickeState::dicke(5, 2).unwrap(), 0.0).is_err());
    }

    #[test]
    fn sign_change_interpolation() {
        let x = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(sign_changes(&x, &[-1.0, 1.0, 1.0, 1.0]), vec![(0.5, true)]);
        assert_eq!(sign_changes(&x, &[-1.0, 0.0, 3.0, -1.0]), vec![(0.5, true), (2.75, false)]);
        assert!(sign_changes(&x, &[0.0, 0.0, 1.0, 2.0]).is_empty());
    }

    #[test]
    fn grid() {
        assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linear_grid(0.2, 0.9, 1), vec![0.2]);
    }
}
