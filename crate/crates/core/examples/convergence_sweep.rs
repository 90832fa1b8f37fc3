//! Refine the path-integral cutoffs level by level and print the CSV table.

use p1chain::partition::TorusElement;
use p1chain::pathint::{self, PathIntegralParams};
use p1chain::ChainSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ChainSpec::product(vec![3])?;
    let h = TorusElement::new(vec![0.7], 1.0)?;
    let base = PathIntegralParams { phi_cutoff: 25.0, n_max: 5, regulator: 6.4e-2, quad_points: 400, slices: 1 };
    let rows = pathint::convergence_sweep(&spec, &h, &base, 4)?;
    pathint::write_convergence_csv(&mut std::io::stdout().lock(), &rows)?;
    Ok(())
}
