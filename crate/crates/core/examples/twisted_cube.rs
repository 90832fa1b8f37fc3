//! Lattice points, vertices, volume and membership for a twisted cube.

use p1chain::polytope::{self, Membership, Method};
use p1chain::ChainSpec;

pub fn main() -> p1chain::Result<()> {
    let spec = ChainSpec::new(vec![3, 5], [(2, 1, 1)])?;
    let points = polytope::lattice_points(&spec)?;
    println!("{} lattice points", points.len());
    for row in points.chunks(6) {
        let line: Vec<String> = row.iter().map(|p| format!("{:?}", p.n)).collect();
        println!("  {}", line.join(" "));
    }
    println!("vertices: {:?}", polytope::vertices(&spec)?);

    let q = polytope::volume(&spec, Method::Quadrature)?;
    let mc = polytope::volume(&spec, Method::MonteCarlo { samples: 1 << 20, seed: 1 })?;
    println!("volume: quadrature {:.10}  monte carlo {:.5} ± {:.5}", q.value, mc.value, mc.std_error);

    for eta in [[1.0, 2.0], [2.5, 1.0], [3.0, 3.0], [4.0, 1.0]] {
        let m = polytope::conjugate_membership(&spec, &eta)?;
        println!("η={eta:?}: {}", if m == Membership::Interior { "interior" } else { "boundary or exterior" });
    }
    Ok(())
}
