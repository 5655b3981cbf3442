mod common;

use std::collections::HashSet;

use lapsep::classifier::{verdict, verdict_with, Probe};
use lapsep::density::{density_matrix, is_ppt_exact};
use lapsep::labeling::{enumerate_labelings, labeling_count};
use lapsep::pt_graph::{degree_condition, BipartiteSplit};
use lapsep::{TensorShape, VertexLabeling};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Applying every group element to every representative yields each of the
/// n! labelings exactly once.
fn orbit_partition(shape: &str) {
    let shape: TensorShape = shape.parse().unwrap();
    let n = shape.size();
    let group = shape.symmetry_group();
    let mut seen = HashSet::new();
    let mut reps = 0;
    for rep in enumerate_labelings(n, &shape, true).unwrap() {
        reps += 1;
        for g in &group {
            let image = rep.act(g).unwrap();
            assert!(seen.insert(image.as_permutation().to_vec()), "labeling covered twice");
        }
    }
    let full: HashSet<_> = enumerate_labelings(n, &shape, false)
        .unwrap()
        .map(|l| l.as_permutation().to_vec())
        .collect();
    assert_eq!(seen, full);
    assert_eq!(reps as u64, labeling_count(&shape, true));
}

#[test]
fn orbit_partition_2x2() {
    orbit_partition("2x2");
}

#[test]
fn orbit_partition_2x3() {
    orbit_partition("2x3");
}

#[test]
fn orbit_partition_2x2x2() {
    orbit_partition("2x2x2");
}

#[test]
fn degree_and_ppt_verdicts_are_group_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (shape, trials) in [("2x2", 50), ("2x3", 100), ("3x3", 60), ("2x2x2", 60)] {
        let shape: TensorShape = shape.parse().unwrap();
        let n = shape.size();
        let group = shape.symmetry_group();
        let cuts = BipartiteSplit::single_factor_cuts(&shape);
        for _ in 0..trials {
            let g = common::random_nonempty(&mut rng, n);
            let lab = VertexLabeling::random(shape.clone(), &mut rng);
            let base = verdict(&g, &lab, &shape).unwrap().verdict;
            let rho = density_matrix(&g, &lab).unwrap();
            for elem in &group {
                let moved = lab.act(elem).unwrap();
                assert_eq!(verdict(&g, &moved, &shape).unwrap().verdict, base);
                if shape.len() == 2 {
                    let split = &cuts[0];
                    assert_eq!(
                        degree_condition(&g, &lab, split).unwrap(),
                        degree_condition(&g, &moved, split).unwrap()
                    );
                    let moved_rho = density_matrix(&g, &moved).unwrap();
                    assert_eq!(is_ppt_exact(&rho, split).unwrap(), is_ppt_exact(&moved_rho, split).unwrap());
                }
            }
            // both probes agree on the verdict
            assert_eq!(verdict_with(&g, &lab, &shape, Probe::ExactPpt).unwrap().verdict, base);
        }
    }
}
