use decomposition::{mader_build, MaderOp};
use graph_core::{edge_connectivity, validate_arborescence_set};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws up to `len` operations, each sampled against the graph produced by
/// the ops accepted so far; draws the builder rejects are dropped.
fn random_ops(k: usize, seed: u64, len: usize) -> Vec<MaderOp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops: Vec<MaderOp> = Vec::new();
    for _ in 0..len {
        let (g, _) = mader_build(k, &ops).expect("accepted prefix");
        let ids: Vec<i64> = g.edges().map(|e| g.external_id(e)).collect();
        let labels: Vec<String> = g.vertices().map(|v| g.label(v).to_string()).collect();
        let pinch = |rng: &mut ChaCha8Rng, pool: &[i64]| -> Vec<i64> {
            let mut picked = pool.to_vec();
            picked.shuffle(rng);
            picked.truncate(k / 2);
            picked
        };
        let op = match rng.gen_range(0..4u8) {
            0 => {
                let u = labels.choose(&mut rng).unwrap().clone();
                let v = labels.choose(&mut rng).unwrap().clone();
                if u == v {
                    continue;
                }
                MaderOp::AddEdge { u, v }
            }
            1 => MaderOp::PinchCeil {
                edges: pinch(&mut rng, &ids),
            },
            2 => MaderOp::PinchFloorPlusEdge {
                edges: pinch(&mut rng, &ids),
                attach: labels.choose(&mut rng).unwrap().clone(),
            },
            _ => {
                if ids.len() < k {
                    continue;
                }
                let first = pinch(&mut rng, &ids);
                let rest: Vec<i64> = ids.iter().copied().filter(|x| !first.contains(x)).collect();
                MaderOp::DoublePinchPlusEdge {
                    first,
                    second: pinch(&mut rng, &rest),
                }
            }
        };
        let mut attempt = ops.clone();
        attempt.push(op);
        if mader_build(k, &attempt).is_ok() {
            ops = attempt;
        }
    }
    ops
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_op_sequences_stay_valid(seed in any::<u64>(), len in 0usize..=6, k in prop::sample::select(vec![2usize, 4])) {
        let ops = random_ops(k, seed, len);
        let (g, set) = mader_build(k, &ops).expect("accepted sequence");
        prop_assert!(set.adbed());
        prop_assert_eq!(set.k(), k);
        prop_assert!(validate_arborescence_set(&g, &set).is_empty());
        prop_assert!(edge_connectivity(&g) >= k);
    }
}
