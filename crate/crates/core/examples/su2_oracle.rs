//! Compare the matrix-factorization oracle for the tilde coordinates with the
//! closed-form coordinate change.

use num_complex::Complex64;
use p1chain::coords::{self, TauCoords};
use p1chain::su2::{self, Mat2};
use p1chain::ChainSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> p1chain::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let g = Mat2::random(&mut rng, 1.0);
    let parts = su2::iwasawa(&g);
    println!("Iwasawa T-component {:.6}, reconstruction error {:.2e}", parts.t, parts.reconstruct().dist(&g));

    let spec = ChainSpec::new(vec![3, 5, 2], [(2, 1, 1), (3, 1, -2), (3, 2, 1)])?;
    for _ in 0..3 {
        let tau: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let z: Vec<Complex64> = tau.iter().map(|&t| Complex64::from_polar(t.exp(), rng.gen_range(-3.0..3.0))).collect();
        let oracle = su2::chain_tilde_oracle(&spec, &z)?;
        let closed = coords::tilde_from_tau(&spec, &TauCoords::new(tau));
        for (a, t) in oracle.iter().zip(&closed.tau_tilde) {
            print!("  |z̃|={:.9} e^τ̃={:.9}", a.norm(), t.exp());
        }
        println!();
    }
    Ok(())
}
