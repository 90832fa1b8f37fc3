//! Parse a chain spec, validate it and print its facet ranges.

use p1chain::{parse_chain_spec, polytope, validate};

pub fn main() -> p1chain::Result<()> {
    let spec = parse_chain_spec("{ell: 3, c: [{j: 2, i: 1, v: 1}, {j: 3, i: 2, v: -1}], l: [3, 5, 2]}")?;
    let diag = validate(&spec);
    println!("canonical: {}", spec.to_canonical_string());
    println!("usable: {}  warnings: {:?}", diag.is_usable(), diag.warnings);
    println!("positive: {}", polytope::is_positive(&spec));

    let (tlo, thi) = polytope::minmax_table(&spec);
    let (lo, hi) = polytope::extrema(&spec);
    for j in 0..spec.ell() {
        println!("J_{}: exact [{}, {}]  table [{}, {}]", j + 1, lo[j], hi[j], tlo[j], thi[j]);
    }

    let steep = parse_chain_spec("{ell: 2, c: [{j: 2, i: 1, v: 2}], l: [3, 5]}")?;
    println!("steep twist positive: {}", polytope::is_positive(&steep));
    Ok(())
}
