use bethe_core::config::{config_rank, enumerate_configurations, Configuration};
use bethe_core::hamiltonian::{eigen_residual, HamiltonianAction};
use bethe_core::solver::{enumerate_spectrum, ContinuationPlan};
use bethe_core::ModelParams;

/// Full 2^L matrix assembled from the 4x4 two-site block, then restricted
/// to the N-up sector in lexicographic configuration order.
fn sector_from_local_blocks(l: usize, n: usize, delta: f64) -> Vec<Vec<f64>> {
    // Two-site basis |ab>, index 2a + b; a mixed pair carries -delta and swaps.
    let local = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, -delta, 1.0, 0.0],
        [0.0, 1.0, -delta, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ];
    let dim = 1usize << l;
    let mut full = vec![vec![0.0; dim]; dim];
    for i in 0..l {
        let j = (i + 1) % l;
        for col in 0..dim {
            let (a, b) = ((col >> i) & 1, (col >> j) & 1);
            let src = 2 * a + b;
            for dst in 0..4 {
                let v = local[dst][src];
                if v == 0.0 {
                    continue;
                }
                let (na, nb) = (dst >> 1, dst & 1);
                let row = (col & !(1 << i) & !(1 << j)) | (na << i) | (nb << j);
                full[row][col] += v;
            }
        }
    }
    let params = ModelParams::new(l, n, delta).unwrap();
    let masks: Vec<usize> = enumerate_configurations(&params)
        .iter()
        .map(|c| c.sites().iter().fold(0, |m, &s| m | (1 << s)))
        .collect();
    masks
        .iter()
        .map(|&r| masks.iter().map(|&c| full[r][c]).collect())
        .collect()
}

#[test]
fn rule_based_matches_local_block_assembly() {
    for (n, l) in [(1, 4), (2, 5), (2, 6)] {
        for delta in [0.0, 0.1, -0.37] {
            let oracle = sector_from_local_blocks(l, n, delta);
            let dense = HamiltonianAction::new(ModelParams::new(l, n, delta).unwrap())
                .unwrap()
                .to_dense();
            for (i, row) in oracle.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    assert_eq!(dense[(i, j)].re, v, "({n},{l},{delta}) at ({i},{j})");
                    assert_eq!(dense[(i, j)].im, 0.0);
                }
            }
        }
    }
}

#[test]
fn single_particle_against_oracle() {
    let oracle = sector_from_local_blocks(3, 1, 0.2);
    assert_eq!(oracle[1], vec![1.0, -0.4, 1.0]);
}

#[test]
fn adjacent_pair_against_oracle() {
    let params = ModelParams::new(4, 2, 0.3).unwrap();
    let oracle = sector_from_local_blocks(4, 2, 0.3);
    let r = |s: &[usize]| config_rank(&Configuration::new(s.to_vec(), &params).unwrap(), &params).unwrap();
    let col: Vec<f64> = oracle.iter().map(|row| row[r(&[0, 1])]).collect();
    assert_eq!(col[r(&[0, 1])], -0.6);
    assert_eq!(col[r(&[0, 2])], 1.0);
    assert_eq!(col[r(&[1, 3])], 1.0);
    assert_eq!(col.iter().filter(|v| **v != 0.0).count(), 3);
}

#[test]
fn free_fermion_roots_are_eigenvectors() {
    let params = ModelParams::new(7, 2, 0.0).unwrap();
    let s = enumerate_spectrum(&ContinuationPlan::new(0.0), &params).unwrap();
    for r in &s.roots {
        assert!(eigen_residual(r, &params).unwrap() <= 1e-10);
    }
}

#[test]
fn interacting_roots_are_eigenvectors() {
    let params = ModelParams::new(7, 3, 0.1).unwrap();
    let s = enumerate_spectrum(&ContinuationPlan::new(0.1), &params).unwrap();
    let h = HamiltonianAction::new(params).unwrap();
    for r in &s.roots {
        assert!(h.eigen_residual(r).unwrap() <= 1e-8);
    }
}
