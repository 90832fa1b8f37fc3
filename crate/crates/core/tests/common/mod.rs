//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use p1chain::polytope;
use p1chain::ChainSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worked() -> ChainSpec {
    ChainSpec::new(vec![3, 5], [(2, 1, 1)]).unwrap()
}

/// Random chains with ℓ ≤ `max_ell`, |c| ≤ 3, 1 ≤ l ≤ 6.
pub fn random_specs(seed: u64, count: usize, max_ell: usize) -> Vec<ChainSpec> {
    let mut r = rng(seed);
    (0..count).map(|_| ChainSpec::random(&mut r, max_ell, 3, 1..=6)).collect()
}

/// First `count` random chains with the requested positivity.
pub fn random_specs_with(seed: u64, count: usize, max_ell: usize, positive: bool) -> Vec<ChainSpec> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let s = ChainSpec::random(&mut r, max_ell, 3, 1..=6);
        if polytope::is_positive(&s) == positive {
            out.push(s);
        }
    }
    out
}

/// Integer points of the bounding box of the exact extrema that satisfy the
/// inequalities, found by an odometer scan.
pub fn brute_force_lattice(spec: &ChainSpec) -> Vec<Vec<i64>> {
    let (lo, hi) = polytope::extrema(spec);
    let lo: Vec<i64> = lo.iter().map(|x| x.floor() as i64).collect();
    let hi: Vec<i64> = hi.iter().map(|x| x.ceil() as i64).collect();
    let ell = spec.ell();
    let mut n = lo.clone();
    let mut out = Vec::new();
    'scan: loop {
        let ok = (0..ell).all(|j| {
            let bound = spec.weights()[j] - (0..j).map(|i| spec.twist(j + 1, i + 1) * n[i]).sum::<i64>();
            n[j] >= 0 && n[j] <= bound
        });
        if ok {
            out.push(n.clone());
        }
        for k in (0..ell).rev() {
            if n[k] < hi[k] {
                n[k] += 1;
                continue 'scan;
            }
            n[k] = lo[k];
        }
        break;
    }
    out
}

/// `Σ_{k=0}^{b} e^{ikθ}` term by term.
pub fn geometric(b: i64, theta: f64) -> Complex64 {
    (0..=b).map(|k| Complex64::from_polar(1.0, k as f64 * theta)).sum()
}

/// `∫_0^l e^{−βεx} dx`.
pub fn laplace_interval(l: f64, beta_eps: f64) -> f64 {
    if beta_eps == 0.0 {
        l
    } else {
        (1.0 - (-beta_eps * l).exp()) / beta_eps
    }
}
