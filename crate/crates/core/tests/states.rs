use num_complex::Complex64;
use proptest::prelude::*;

use symcomp::combinatorics::{partitions, PartitionShape};
use symcomp::compression::dicke_vector;
use symcomp::entanglement::{reduced_pure, von_neumann_bipartite};
use symcomp::states::WeightedDickeState;
use symcomp::tensor::{DenseTensor, MultiIndex};

fn state_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = WeightedDickeState> {
    (min_n..=max_n)
        .prop_flat_map(|n| {
            let amps = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n + 1);
            let mask = prop::collection::vec(any::<bool>(), n + 1);
            (Just(n), amps, mask)
        })
        .prop_filter_map("empty support", |(n, amps, mask)| {
            let (support, amps): (Vec<usize>, Vec<Complex64>) = (0..=n)
                .filter(|&k| mask[k])
                .map(|k| (k, Complex64::new(amps[k].0, amps[k].1)))
                .unzip();
            WeightedDickeState::weighted(n, support, amps).ok()
        })
}

fn shuffled(n: usize, keys: &[u32]) -> Vec<usize> {
    let mut q: Vec<usize> = (0..n).collect();
    q.sort_by_key(|&i| keys[i % keys.len()].wrapping_mul(2654435761).wrapping_add(i as u32));
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statevector_is_normalized(state in state_strategy(1, 12)) {
        let norm: f64 = state.to_statevector().unwrap().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn block_tensor_matches_projected_statevector(
        state in state_strategy(2, 8),
        pick in any::<prop::sample::Index>(),
        m_pick in any::<prop::sample::Index>(),
        keys in prop::collection::vec(any::<u32>(), 8),
    ) {
        let n = state.n();
        let m = 2 + m_pick.index(n - 1);
        let lam = partitions(n, m).unwrap();
        let shape = &lam[pick.index(lam.len())];
        let bt = state.block_tensor(shape).unwrap();
        prop_assert!((bt.tensor().norm() - 1.0).abs() <= 1e-10);

        let order = shuffled(n, &keys);
        let mut blocks = Vec::new();
        let mut start = 0;
        for &b in shape.blocks() {
            blocks.push(order[start..start + b].to_vec());
            start += b;
        }
        let full = DenseTensor::from_statevector(&state.to_statevector().unwrap(), n, &blocks).unwrap();
        let bases: Vec<Vec<Vec<Complex64>>> =
            shape.blocks().iter().map(|&b| (0..=b).map(|w| dicke_vector(b, w)).collect()).collect();
        let dims: Vec<usize> = shape.blocks().iter().map(|b| b + 1).collect();
        for local in MultiIndex::new(&dims) {
            let mut projected = Complex64::new(0.0, 0.0);
            for (x, z) in full.indexed() {
                let w: Complex64 = x.iter().enumerate().map(|(i, &xi)| bases[i][local[i]][xi].conj()).product();
                projected += w * z;
            }
            prop_assert!((projected - bt.get(&local)).norm() <= 1e-10);
        }
    }

    #[test]
    fn reflection_flips_local_weights(state in state_strategy(2, 10), pick in any::<prop::sample::Index>()) {
        let n = state.n();
        let lam = partitions(n, 2).unwrap();
        let shape = &lam[pick.index(lam.len())];
        let bt = state.block_tensor(shape).unwrap();
        let rt = state.reflected().block_tensor(shape).unwrap();
        // the reflected state is canonicalized to a different global phase
        let dims: Vec<usize> = shape.blocks().iter().map(|b| b + 1).collect();
        let mut phase = None;
        for idx in MultiIndex::new(&dims) {
            let flipped: Vec<usize> = idx.iter().zip(shape.blocks()).map(|(&j, &b)| b - j).collect();
            let (a, r) = (bt.get(&idx), rt.get(&flipped));
            if phase.is_none() && a.norm() > 1e-6 {
                phase = Some(r / a);
            }
            let ph = phase.unwrap_or(Complex64::new(1.0, 0.0));
            prop_assert!((a * ph - r).norm() <= 1e-12);
        }
    }

    #[test]
    fn bipartite_entropy_matches_partial_trace(state in state_strategy(2, 10), k_pick in any::<prop::sample::Index>()) {
        let n = state.n();
        let k = 1 + k_pick.index(n / 2);
        let fast = von_neumann_bipartite(&state, k).unwrap();
        let sv = state.to_statevector().unwrap();
        let brute = reduced_pure(&sv, &vec![2; n], &(0..k).collect::<Vec<_>>()).unwrap().entropy();
        prop_assert!((fast - brute).abs() <= 1e-9);
    }

    #[test]
    fn json_round_trip(state in state_strategy(1, 15)) {
        let text = serde_json::to_string(&state).unwrap();
        let back: WeightedDickeState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, state);
    }

    #[test]
    fn shape_parse_round_trip(blocks in prop::collection::vec(1usize..9, 1..5)) {
        let s = PartitionShape::new(blocks).unwrap();
        prop_assert_eq!(s.to_string().parse::<PartitionShape>().unwrap(), s);
    }
}
