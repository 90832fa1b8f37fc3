//! Discretized phase-space path integral for a single stage, compared with
//! the character it should reproduce.

use p1chain::partition::{self, TorusElement};
use p1chain::pathint::{self, PathIntegralParams};
use p1chain::ChainSpec;

pub fn main() -> p1chain::Result<()> {
    let spec = ChainSpec::product(vec![2])?;
    let h = TorusElement::new(vec![1.0], 1.0)?;
    let exact = partition::character(&spec, &h)?.value;
    println!("character        {exact:.9}");
    println!("analytic, N=2    {:.9}", pathint::analytic_reduce(&spec, &h, 2)?);

    let p = PathIntegralParams { phi_cutoff: 50.0, n_max: 10, regulator: 1.6e-2, quad_points: 400, slices: 1 };
    let z = pathint::numeric_path_integral(&spec, &h, &p)?;
    println!("numeric          {z:.9}  error {:.2e}", (z - exact).norm());
    let bare = pathint::numeric_path_integral(&spec, &h, &PathIntegralParams { n_max: 0, ..p })?;
    println!("no winding sum   {bare:.9}  error {:.2e}", (bare - exact).norm());

    println!("winding sum alone: {:.9}", pathint::poisson_check(2, -1.0, 200, 1e-4)?);
    Ok(())
}
