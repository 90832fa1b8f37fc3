//! Action variables, the Hessian of the potential and its determinant.

use p1chain::coords::{self, TauCoords};
use p1chain::ChainSpec;

fn main() -> p1chain::Result<()> {
    let spec = ChainSpec::new(vec![3, 5], [(2, 1, 1)])?;
    for tau in [[0.0, 0.0], [1.5, -0.5], [-4.0, 3.0]] {
        let t = TauCoords::new(tau.to_vec());
        let tt = coords::tilde_from_tau(&spec, &t);
        let j = coords::action_vars(&spec, &tt);
        let fd = coords::half_gradient_fd(&spec, &t, coords::FD_STEP);
        println!("τ={tau:?}  J={:?}  ½∇K={fd:?}", j.j);
        println!(
            "  det Hess={:.6}  product form={:.6}  min eig={:.6}",
            coords::hessian(&spec, &t).determinant(),
            coords::det_product(&spec, &tt),
            coords::min_eigenvalue(&spec, &t)
        );
    }

    let bad = ChainSpec::new(vec![3, 5], [(2, 1, 2)])?;
    match coords::find_indefinite_point(&bad) {
        Some(t) => println!("indefinite Hessian for c21=2 at τ={:?}, min eig {:.4}", t.tau, coords::min_eigenvalue(&bad, &t)),
        None => println!("no indefinite point found"),
    }
    Ok(())
}
