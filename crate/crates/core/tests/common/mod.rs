#![allow(dead_code)]

use fnqap::instance::{Instance, Matrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Worked five-facility instance with a symmetric flow matrix and an
/// asymmetric distance matrix.
pub fn example_instance() -> Instance {
    let d = Matrix::from_rows(&[
        vec![0.0, 1.0, 0.0, 1.0, 4.0],
        vec![1.0, 0.0, 4.0, 2.0, 0.0],
        vec![0.0, 0.0, 0.0, 3.0, 5.0],
        vec![2.0, 3.0, 1.0, 0.0, 1.0],
        vec![4.0, 5.0, 0.0, 3.0, 0.0],
    ])
    .unwrap();
    let f = Matrix::from_rows(&[
        vec![0.0, 2.0, 1.0, 0.0, 4.0],
        vec![2.0, 0.0, 3.0, 2.0, 2.0],
        vec![1.0, 3.0, 0.0, 7.0, 0.0],
        vec![0.0, 2.0, 7.0, 0.0, 3.0],
        vec![4.0, 2.0, 0.0, 3.0, 0.0],
    ])
    .unwrap();
    Instance::new("example5", f, d).unwrap()
}

/// Support {2, 5, 11, 18, 24} of the worked example.
pub const EXAMPLE_SIGMA: [usize; 5] = [2, 0, 1, 3, 4];

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, symmetric: bool) -> Matrix {
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            let v = rng.random_range(0..10) as f64;
            m.set(i, j, v);
            if symmetric {
                m.set(j, i, v);
            }
        }
    }
    // force asymmetry when requested
    if !symmetric && m.is_symmetric() {
        let v = m.get(0, 1) + 1.0;
        m.set(0, 1, v);
    }
    m
}

/// Random integer instance; `class` 0..4 selects symmetric, F-symmetric,
/// D-symmetric or asymmetric.
pub fn random_instance(seed: u64, n: usize, class: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (fs, ds) = match class % 4 {
        0 => (true, true),
        1 => (true, false),
        2 => (false, true),
        _ => (false, false),
    };
    let f = random_matrix(&mut rng, n, fs);
    let d = random_matrix(&mut rng, n, ds);
    Instance::new(format!("rand{seed}"), f, d).unwrap()
}

pub fn random_permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng);
    p
}

pub fn assert_close(a: f64, b: f64, rel: f64) {
    let scale = a.abs().max(b.abs()).max(1.0);
    assert!((a - b).abs() <= rel * scale, "{a} vs {b}");
}
