//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcomp::bounds::{
    ame_curve, hypergeometric_spectrum, lower_bound_m, lower_bound_m2, universal_rates, universal_rates_m2,
    upper_bound_m, upper_bound_m2,
};
use symcomp::combinatorics::{multiplicity, partitions, stirling2, weighted_partitions, PartitionShape};
use symcomp::compression::{build_isometry, encode_blocks, register_qubits};
use symcomp::entanglement::{
    gme, gme_statevector, reduced_pure, DensityMatrix, GmeOptions, Measure, ProductOverlapProblem,
};
use symcomp::linalg::{entropy_bits, trace_distance, CMatrix};
use symcomp::noise::{linear_grid, sweep_and_crossover, Channel, NoiseParams};
use symcomp::optimizer::{ascend, search_support, Objective, OptimizerConfig, OptimizerReport};
use symcomp::states::WeightedDickeState;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn shape(b: &[usize]) -> PartitionShape {
    PartitionShape::new(b.to_vec()).unwrap()
}

/// `(n, λ, E(ψ), E(D_1), E(D_{⌊n/2⌋}))` for the tripartite table.
const TABLE: &[(usize, [usize; 3], f64, f64, f64)] = &[
    (3, [1, 1, 1], 1.1599, 1.1699, 1.1699),
    (4, [1, 1, 2], 1.5204, 1.0000, 1.2630),
    (5, [1, 1, 3], 1.4280, 0.7370, 1.2775),
    (5, [1, 2, 2], 1.5933, 1.1293, 1.2746),
    (6, [1, 1, 4], 1.5320, 0.5850, 1.3219),
    (6, [1, 2, 3], 1.8601, 1.0003, 1.3949),
    (6, [2, 2, 2], 1.9593, 1.1699, 1.3223),
    (7, [1, 1, 5], 1.5417, 0.4854, 1.3219),
    (7, [1, 2, 4], 1.8881, 0.8074, 1.4035),
    (7, [1, 3, 3], 2.0098, 1.0969, 1.4544),
    (7, [2, 2, 3], 2.0198, 1.1293, 1.4675),
    (8, [1, 1, 6], 1.5578, 0.4150, 1.3479),
    (8, [1, 2, 5], 1.9744, 0.6781, 1.4545),
    (8, [1, 3, 4], 2.1620, 1.0004, 1.5120),
    (8, [2, 2, 4], 2.1620, 1.0002, 1.5071),
    (8, [2, 3, 3], 2.3268, 1.1520, 1.5799),
    (9, [1, 1, 7], 1.5382, 0.3626, 1.3455),
    (9, [1, 2, 6], 1.9444, 0.5850, 1.4595),
    (9, [1, 3, 5], 2.2020, 0.8480, 1.5375),
    (9, [1, 4, 4], 2.3003, 1.0768, 1.5521),
    (9, [2, 2, 5], 2.2085, 0.8480, 1.5567),
    (9, [2, 3, 4], 2.3337, 1.1085, 1.6173),
    (9, [3, 3, 3], 2.3599, 1.1699, 1.6534),
    (10, [1, 1, 8], 1.5462, 0.3219, 1.3626),
    (10, [1, 2, 7], 1.9502, 0.5146, 1.4884),
    (10, [1, 3, 6], 2.2518, 0.7370, 1.5718),
    (10, [1, 4, 5], 2.4771, 1.0000, 1.6050),
    (10, [2, 2, 6], 2.2484, 0.7370, 1.5828),
    (10, [2, 3, 5], 2.4949, 1.0000, 1.6688),
    (10, [2, 4, 4], 2.5531, 1.1293, 1.6760),
    (10, [3, 3, 4], 2.5682, 1.1520, 1.7153),
];

struct Context {
    /// Tripartite optimizer reports at the default configuration, n = 3..=8.
    m3_reports: BTreeMap<usize, OptimizerReport>,
}

fn c1_combinatorics() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=15usize {
        for m in 2..=n {
            let (weighted, s) = weighted_partitions(n, m).unwrap();
            let sum: u128 = weighted.iter().map(|w| w.1).sum();
            if sum != s {
                bad.push(format!("n={n} m={m}: {sum} != {s}"));
            }
        }
    }
    let lam = partitions(6, 3).unwrap();
    let f: Vec<u128> = lam.iter().map(|l| multiplicity(l).unwrap()).collect();
    let worked = lam == vec![shape(&[1, 1, 4]), shape(&[1, 2, 3]), shape(&[2, 2, 2])]
        && f == vec![15, 60, 15]
        && stirling2(6, 3).unwrap() == 90;
    outcome(bad.is_empty() && worked, format!("sum mismatches={} worked_example={}", bad.len(), worked))
}

fn c2_w3() -> Outcome {
    let w3 = WeightedDickeState::dicke(3, 1).unwrap();
    let e = gme(&w3, &shape(&[1, 1, 1]), &GmeOptions::default()).unwrap().e_g;
    outcome((e - 1.1699).abs() <= 1e-3, format!("E_G={e:.6}"))
}

fn c3_dicke_columns() -> Outcome {
    let opts = GmeOptions::default();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for &(n, lam, _, d1, dh) in TABLE.iter().filter(|r| (4..=10).contains(&r.0)) {
        let s = shape(&lam);
        let got1 = gme(&WeightedDickeState::dicke(n, 1).unwrap(), &s, &opts).unwrap().e_g;
        let goth = gme(&WeightedDickeState::dicke(n, n / 2).unwrap(), &s, &opts).unwrap().e_g;
        for (got, want, col) in [(got1, d1, "D1"), (goth, dh, "Dhalf")] {
            let err = (got - want).abs();
            worst = worst.max(err);
            if err > 5e-3 {
                failures.push(format!("n={n} {s} {col}: {got:.4} vs {want:.4}"));
            }
        }
    }
    outcome(failures.is_empty(), format!("max |err|={worst:.2e} {}", failures.join("; ")))
}

fn c4_optimized_column(ctx: &Context) -> Outcome {
    let mut failures = Vec::new();
    let mut cells = 0;
    for &(n, lam, psi, _, _) in TABLE.iter().filter(|r| (3..=8).contains(&r.0)) {
        let report = &ctx.m3_reports[&n];
        let s = shape(&lam);
        let got = report.per_lambda.iter().find(|l| l.shape == s).unwrap().value;
        cells += 1;
        if got < psi - 0.02 {
            failures.push(format!("n={n} {s}: {got:.4} < {psi:.4}-0.02"));
        }
    }
    outcome(failures.is_empty(), format!("{}/{cells} cells ok {}", cells - failures.len(), failures.join("; ")))
}

fn c5_m2_optimality() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [2usize, 3, 4, 6] {
        let r = search_support(&OptimizerConfig::new(n, 2)).unwrap();
        let ub = upper_bound_m2(n, &universal_rates_m2(n).unwrap()).unwrap().value;
        pass &= (r.best_e - ub).abs() <= 1e-2;
        parts.push(format!("n={n}: {:.4}/{:.4}", r.best_e, ub));
    }
    outcome(pass, parts.join(" "))
}

/// Lighter search used for the sandwich check at sizes beyond the table.
fn light_config(n: usize, m: usize) -> OptimizerConfig {
    OptimizerConfig {
        inner_restarts: 6,
        screen_restarts: 2,
        finalists: 3,
        gme_restarts: 4,
        inner_max_iters: 100,
        ..OptimizerConfig::new(n, m)
    }
}

fn c6_sandwich(ctx: &Context) -> Outcome {
    let opts = GmeOptions::default();
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 2..=12usize {
        let r = search_support(&OptimizerConfig::new(n, 2)).unwrap();
        let lb = lower_bound_m2(n).unwrap().value;
        let ub = upper_bound_m2(n, &universal_rates_m2(n).unwrap()).unwrap().value;
        checked += 1;
        if !(lb <= r.best_e + 1e-6 && r.best_e <= ub + 1e-6) {
            failures.push(format!("m=2 n={n}: {lb:.4} <= {:.4} <= {ub:.4}", r.best_e));
        }
    }
    for n in 3..=12usize {
        let light;
        let r = match ctx.m3_reports.get(&n) {
            Some(r) => r,
            None => {
                light = search_support(&light_config(n, 3)).unwrap();
                &light
            }
        };
        let half = WeightedDickeState::dicke(n, n / 2).unwrap();
        let lb = lower_bound_m(n, 3, |s| Ok(gme(&half, s, &opts)?.e_g)).unwrap().value;
        let ub = upper_bound_m(n, 3, &universal_rates(n, 3).unwrap()).unwrap().value;
        checked += 1;
        if !(lb <= r.best_e + 1e-6 && r.best_e <= ub + 1e-6) {
            failures.push(format!("m=3 n={n}: {lb:.4} <= {:.4} <= {ub:.4}", r.best_e));
        }
    }
    outcome(failures.is_empty(), format!("{checked} (n,m) pairs {}", failures.join("; ")))
}

fn c7_ame() -> Outcome {
    let mut failures = Vec::new();
    for n in 7..=15 {
        let lb = lower_bound_m2(n).unwrap().value;
        let ame = ame_curve(n).unwrap().value;
        if lb <= ame {
            failures.push(format!("n={n}: {lb:.4} <= {ame:.4}"));
        }
    }
    outcome(failures.is_empty(), failures.join("; "))
}

fn c8_hypergeometric_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=10usize {
        let sv = WeightedDickeState::dicke(n, n / 2).unwrap().to_statevector().unwrap();
        for k in 1..=n / 2 {
            let closed = entropy_bits(hypergeometric_spectrum(n, k, n / 2).unwrap());
            let brute = reduced_pure(&sv, &vec![2; n], &(0..k).collect::<Vec<_>>()).unwrap().entropy();
            worst = worst.max((closed - brute).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max |err|={worst:.2e}"))
}

fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> WeightedDickeState {
    let support: Vec<usize> = (0..=n).collect();
    let amps = (0..=n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    WeightedDickeState::weighted(n, support, amps).unwrap()
}

/// Compressed two-register state of a bipartite block tensor, padded to `2^r` per block.
fn compressed_bipartite(state: &WeightedDickeState, k: usize) -> (Vec<Complex64>, Vec<usize>) {
    let n = state.n();
    let bt = state.block_tensor(&PartitionShape::bipartition(n, k).unwrap()).unwrap();
    // the block tensor lists the smaller block first
    let (a, b) = (k.min(n - k), k.max(n - k));
    let (ra, rb) = (1usize << register_qubits(a), 1usize << register_qubits(b));
    let mut psi = vec![Complex64::new(0.0, 0.0); ra * rb];
    for (idx, v) in bt.tensor().indexed() {
        psi[idx[0] * rb + idx[1]] = v;
    }
    (psi, vec![ra, rb])
}

fn c9_compression() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_lossless, mut worst_flag, mut worst_ent) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let c = rng.random_range(1..=8usize);
        let psi = random_symmetric(c, &mut rng).to_statevector().unwrap();
        let rho = DensityMatrix::from_qubits(&psi, c).unwrap();
        let v = build_isometry(c).unwrap();
        let back = v.decompress(&v.compress(rho.matrix()));
        worst_lossless = worst_lossless.max(trace_distance(&back, rho.matrix()));
        if c <= 6 {
            let enc = encode_blocks(&rho, &[c]).unwrap();
            let direct = v.compress(rho.matrix());
            worst_flag = worst_flag.max(trace_distance(enc.matrix(), &direct));
        }

        let n = rng.random_range(2..=8usize);
        let k = rng.random_range(1..=n / 2);
        let state = random_symmetric(n, &mut rng);
        let full = state.to_statevector().unwrap();
        let cut: Vec<usize> = (0..k).collect();
        let s_full = reduced_pure(&full, &vec![2; n], &cut).unwrap().entropy();
        let en_full = DensityMatrix::from_qubits(&full, n).unwrap().log_negativity(&cut).unwrap();
        let (small, dims) = compressed_bipartite(&state, k);
        let s_comp = reduced_pure(&small, &dims, &[0]).unwrap().entropy();
        let en_comp = DensityMatrix::from_pure(&small, dims).unwrap().log_negativity(&[0]).unwrap();
        worst_ent = worst_ent.max((s_full - s_comp).abs()).max((en_full - en_comp).abs());
    }
    let pass = worst_lossless <= 1e-12 && worst_flag <= 1e-12 && worst_ent <= 1e-10;
    outcome(
        pass,
        format!("lossless={worst_lossless:.1e} encoder={worst_flag:.1e} entanglement={worst_ent:.1e}"),
    )
}

fn c10_noise() -> Outcome {
    let state = search_support(&OptimizerConfig::new(6, 2)).unwrap().best_state;
    let grid = linear_grid(0.0, 0.3, 50);
    let r = sweep_and_crossover(&state, &grid, &NoiseParams::default()).unwrap();
    let a = (r.uncompressed[0] - r.compressed_ideal[0]).abs() <= 1e-9;
    let b_gap = (1..grid.len()).map(|i| r.compressed_ideal[i] - r.uncompressed[i]).fold(f64::INFINITY, f64::min);
    let b = b_gap >= -1e-12;
    let c = r.crossings.len() == 1 && r.crossover.is_some_and(|p| (0.10..=0.25).contains(&p));
    for (name, s) in [
        ("D_3", WeightedDickeState::dicke(6, 3).unwrap()),
        ("W_6", WeightedDickeState::dicke(6, 1).unwrap()),
        ("GHZ_6", WeightedDickeState::weighted(6, vec![0, 6], vec![Complex64::new(1.0, 0.0); 2]).unwrap()),
    ] {
        let x = sweep_and_crossover(&s, &grid, &NoiseParams::default()).unwrap();
        println!("    info: {name} crossings={:?}", x.crossings);
    }
    outcome(
        a && b && c,
        format!("state=[{state}] (a)={a} (b)={b} min gap={b_gap:.2e} (c)={c} crossings={:?}", r.crossings),
    )
}

fn c11_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut notes = Vec::new();
    let mut pass = true;

    // alternating sweeps never decrease the overlap
    let mut sweep_ok = true;
    for _ in 0..20 {
        let n = rng.random_range(3..=8usize);
        let m = rng.random_range(2..=3usize.min(n));
        let lam = partitions(n, m).unwrap();
        let s = &lam[rng.random_range(0..lam.len())];
        let t = random_symmetric(n, &mut rng).block_tensor(s).unwrap().into_tensor();
        let p = ProductOverlapProblem::new(&t).unwrap();
        let start = p.random_factors(&mut rng);
        let run = p.alternate(start, 200, 0.0, &mut rng);
        sweep_ok &= run.trajectory.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    }
    notes.push(format!("gme_sweeps={sweep_ok}"));
    pass &= sweep_ok;

    // accepted ascent iterates never decrease the objective
    let mut ascent_ok = true;
    for _ in 0..10 {
        let n = rng.random_range(3..=7usize);
        let sup = vec![rng.random_range(0..=n / 2), n / 2 + 1 + rng.random_range(0..(n - n / 2))];
        for (m, measure) in [(2, Measure::VonNeumann), (3, Measure::Gme)] {
            let obj = Objective::new(n, m, &sup, measure, GmeOptions::default().with_restarts(4)).unwrap();
            let x0: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let run = ascend(&obj, &x0, 50, 1e-5, 1e-10);
            ascent_ok &= run.trajectory.windows(2).all(|w| w[1] >= w[0]);
        }
    }
    notes.push(format!("ascent={ascent_ok}"));
    pass &= ascent_ok;

    // central differences at h and h/10 agree
    let mut worst_grad = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(3..=9usize);
        let k = rng.random_range(1..=3usize);
        let mut sup: Vec<usize> = (0..=n).collect();
        for i in (1..sup.len()).rev() {
            sup.swap(i, rng.random_range(0..=i));
        }
        sup.truncate(k);
        let obj = Objective::new(n, 2, &sup, Measure::VonNeumann, GmeOptions::default()).unwrap();
        let x: Vec<f64> = (0..2 * k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = OptimizerConfig::new(n, 2).grad_step;
        let g1 = obj.numerical_gradient(&x, h);
        let g2 = obj.numerical_gradient(&x, h / 10.0);
        let num: f64 = g1.iter().zip(&g2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = g2.iter().map(|b| b * b).sum::<f64>().sqrt().max(1e-12);
        if den > 1e-8 {
            worst_grad = worst_grad.max(num / den);
        }
    }
    notes.push(format!("gradient_rel={worst_grad:.1e}"));
    pass &= worst_grad < 1e-4;

    // Kraus completeness
    let mut worst_kraus = 0.0f64;
    for _ in 0..20 {
        let p: f64 = rng.random_range(0.0..=1.0);
        for ch in [Channel::Depolarizing(p), Channel::AmplitudeDamping(p), Channel::PhaseDamping(p)] {
            let mut sum = CMatrix::zeros(2, 2);
            for k in ch.kraus().unwrap() {
                let km = CMatrix::from_row_slice(2, 2, &[k[0][0], k[0][1], k[1][0], k[1][1]]);
                sum += km.adjoint() * km;
            }
            worst_kraus = worst_kraus.max(symcomp::linalg::max_abs_diff(&sum, &CMatrix::identity(2, 2)));
        }
    }
    notes.push(format!("kraus={worst_kraus:.1e}"));
    pass &= worst_kraus <= 1e-14;

    // GME depends only on the block-size multiset
    let mut worst_perm = 0.0f64;
    for _ in 0..10 {
        let n = rng.random_range(3..=6usize);
        let state = random_symmetric(n, &mut rng);
        let sv = state.to_statevector().unwrap();
        let mut qubits: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            qubits.swap(i, rng.random_range(0..=i));
        }
        let cut1 = rng.random_range(1..n - 1);
        let cut2 = rng.random_range(cut1 + 1..n);
        let blocks = vec![qubits[..cut1].to_vec(), qubits[cut1..cut2].to_vec(), qubits[cut2..].to_vec()];
        let sizes = vec![cut1, cut2 - cut1, n - cut2];
        let opts = GmeOptions::default();
        let a = gme_statevector(&sv, n, &blocks, &opts).unwrap().e_g;
        let b = gme(&state, &PartitionShape::new(sizes).unwrap(), &opts).unwrap().e_g;
        worst_perm = worst_perm.max((a - b).abs());
    }
    notes.push(format!("partition_symmetry={worst_perm:.1e}"));
    pass &= worst_perm <= 2e-3;

    outcome(pass, notes.join(" "))
}

fn main() {
    let mut all_pass = true;
    let mut run = |id: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let elapsed = t.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = o.pass && in_time;
        all_pass &= pass;
        let budget = limit.map(|l| format!(" / {:.0?}", l)).unwrap_or_default();
        println!(
            "criterion {id:>2} {}: {name} [{elapsed:.2?}{budget}] {}",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    let sec = Duration::from_secs;

    run(1, "combinatorics exactness", Some(sec(1)), &mut c1_combinatorics);
    run(2, "W3 geometric entanglement", Some(sec(1)), &mut c2_w3);
    run(3, "Dicke columns of the tripartite table", Some(sec(600)), &mut c3_dicke_columns);

    let mut ctx = Context { m3_reports: BTreeMap::new() };
    run(4, "optimized tripartite column", Some(sec(1800)), &mut || {
        for n in 3..=8 {
            ctx.m3_reports.insert(n, search_support(&OptimizerConfig::new(n, 3)).unwrap());
        }
        c4_optimized_column(&ctx)
    });
    run(5, "bipartite optimality at small n", None, &mut c5_m2_optimality);
    run(6, "bound sandwich", None, &mut || c6_sandwich(&ctx));
    run(7, "lower bound above AME", None, &mut c7_ame);
    run(8, "hypergeometric spectrum oracle", None, &mut c8_hypergeometric_oracle);
    run(9, "compression invariants", None, &mut c9_compression);
    run(10, "noise sweep", Some(sec(120)), &mut c10_noise);
    run(11, "property suites", None, &mut c11_properties);

    if !all_pass {
        println!("acceptance: FAILED");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
