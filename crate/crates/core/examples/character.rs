//! Quantum character against the classical partition function along one axis.

use p1chain::partition::{self, TorusElement};
use p1chain::polytope::Method;
use p1chain::ChainSpec;

fn main() -> p1chain::Result<()> {
    let spec = ChainSpec::new(vec![3, 5], [(2, 1, 1)])?;
    let h = TorusElement::new(vec![0.0, 0.4], 1.0)?;
    let z = partition::character(&spec, &h)?;
    println!("Z(H) = {:.9} over {} weights", z.value, z.count);

    let report = partition::quantum_classical_report(&spec, &TorusElement::new(vec![0.3, -0.2], 1.0)?)?;
    print!("{}", report.to_record());

    println!("eps,|Z|,Z_classical");
    for row in partition::sweep(&spec, &h, 0, 9, Method::Quadrature)? {
        println!("{:.4},{:.6},{:.6}", row.eps, row.z.norm(), row.z_classical);
    }
    Ok(())
}
