//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use p1chain::coords::{self, TauCoords, TildeCoords};
use p1chain::partition::{self, TorusElement};
use p1chain::pathint::{self, PathIntegralParams};
use p1chain::polytope::{self, Membership, Method};
use p1chain::su2;
use p1chain::ChainSpec;
use rand::Rng;

use common::*;

type Outcome = (bool, String);

fn matrix_oracle() -> Outcome {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for spec in random_specs(1, 200, 4) {
        for _ in 0..50 {
            let tau: Vec<f64> = (0..spec.ell()).map(|_| r.gen_range(-3.0..3.0)).collect();
            let z: Vec<Complex64> = tau.iter().map(|&t| Complex64::from_polar(t.exp(), r.gen_range(-PI..PI))).collect();
            let oracle = su2::chain_tilde_oracle(&spec, &z).unwrap();
            let closed = coords::tilde_from_tau(&spec, &TauCoords::new(tau));
            for (a, b) in oracle.iter().zip(&closed.tau_tilde) {
                let m = b.exp();
                worst = worst.max((a.norm() - m).abs() / m);
            }
        }
    }
    (worst <= 1e-9, format!("max relative |z̃| deviation {worst:.2e} (tol 1e-9)"))
}

fn iwasawa_t() -> Outcome {
    let mut r = rng(102);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = 10f64.powf(r.gen_range(-1.0..1.0));
        let z = Complex64::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
        worst = worst.max(su2::iwasawa_t_residual(a, z));
    }
    (worst < 1e-10, format!("max residual {worst:.2e} over 1000 pairs (tol 1e-10)"))
}

fn gradient() -> Outcome {
    let mut r = rng(103);
    let mut worst = 0.0f64;
    let specs = random_specs(3, 20, 4);
    for spec in &specs {
        for _ in 0..500 {
            let t = TauCoords::new((0..spec.ell()).map(|_| r.gen_range(-3.0..3.0)).collect());
            let jv = coords::action_vars(spec, &coords::tilde_from_tau(spec, &t)).j;
            let fd = coords::half_gradient_fd(spec, &t, 1e-5);
            for (a, b) in jv.iter().zip(&fd) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    (worst <= 1e-5, format!("max |J − ½∂K/∂τ| {worst:.2e} over {} specs × 500 points (tol 1e-5)", specs.len()))
}

fn determinant() -> Outcome {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    let specs = random_specs(4, 20, 4);
    for spec in &specs {
        for _ in 0..200 {
            let t = TauCoords::new((0..spec.ell()).map(|_| r.gen_range(-3.0..3.0)).collect());
            worst = worst.max(coords::det_identity_residual(spec, &t));
        }
    }
    (worst < 1e-5, format!("max residual {worst:.2e} over {} specs × 200 points (tol 1e-5)", specs.len()))
}

fn positivity() -> Outcome {
    let mut r = rng(105);
    let mut disagreements = 0;
    for spec in random_specs_with(5, 50, 4, true) {
        for _ in 0..500 {
            let tt = TildeCoords::new((0..spec.ell()).map(|_| r.gen_range(-3.0..3.0)).collect());
            if coords::min_eigenvalue(&spec, &coords::tau_from_tilde(&spec, &tt)) <= 0.0 {
                disagreements += 1;
            }
        }
    }
    let missing = random_specs_with(6, 50, 4, false)
        .iter()
        .filter(|s| coords::find_indefinite_point(s).is_none())
        .count();
    (
        disagreements == 0 && missing == 0,
        format!("positive specs: {disagreements} non-PD samples of 25000; non-positive specs without witness: {missing} of 50"),
    )
}

fn lattice() -> Outcome {
    let mut mismatched = 0;
    let specs = random_specs_with(7, 100, 4, true);
    for spec in &specs {
        let got: Vec<Vec<i64>> = polytope::lattice_points(spec).unwrap().into_iter().map(|p| p.n).collect();
        if got != brute_force_lattice(spec) {
            mismatched += 1;
        }
    }
    let w = worked();
    let count = polytope::lattice_points(&w).unwrap().len();
    let verts = polytope::vertices(&w).unwrap();
    let expect = vec![vec![0.0, 0.0], vec![0.0, 5.0], vec![3.0, 0.0], vec![3.0, 2.0]];
    let q = polytope::volume(&w, Method::Quadrature).unwrap().value;
    let mc = polytope::volume(&w, Method::MonteCarlo { samples: 1_000_000, seed: 6 }).unwrap();
    let ok = mismatched == 0 && count == 18 && verts == expect && (q - 10.5).abs() <= 1e-8 && (mc.value - 10.5).abs() <= 4.0 * mc.std_error;
    (
        ok,
        format!(
            "{mismatched}/{} specs differ from brute force; worked spec: {count} points, vertices {}, quadrature {q:.12}, MC {:.5} ± {:.5}",
            specs.len(),
            if verts == expect { "match" } else { "differ" },
            mc.value,
            mc.std_error
        ),
    )
}

fn conjugate() -> Outcome {
    let mut specs = random_specs_with(8, 40, 3, true);
    specs.push(worked());
    let (mut checked, mut wrong) = (0usize, 0usize);
    let mut first = String::new();
    for spec in &specs {
        let cube = polytope::TwistedCube::new(spec);
        let lo: Vec<i64> = cube.min_j.iter().map(|x| x.floor() as i64 - 1).collect();
        let hi: Vec<i64> = cube.max_j.iter().map(|x| x.ceil() as i64 + 1).collect();
        let mut n = lo.clone();
        'scan: loop {
            let x: Vec<f64> = n.iter().map(|&v| v as f64).collect();
            let slack = cube.slack(&x);
            if slack.abs() >= 0.5 {
                let expect = if slack > 0.0 { Membership::Interior } else { Membership::BoundaryOrExterior };
                checked += 1;
                if polytope::conjugate_membership(spec, &x).unwrap() != expect {
                    if wrong == 0 {
                        first = format!("; first at {x:?} in {spec}");
                    }
                    wrong += 1;
                }
            }
            for k in (0..n.len()).rev() {
                if n[k] < hi[k] {
                    n[k] += 1;
                    continue 'scan;
                }
                n[k] = lo[k];
            }
            break;
        }
    }
    (wrong == 0, format!("{wrong} disagreements among {checked} integer points over {} specs{first}", specs.len()))
}

fn characters() -> Outcome {
    let mut worst_zero = 0.0f64;
    for spec in random_specs_with(9, 50, 4, true) {
        let z = partition::character(&spec, &TorusElement::zero(spec.ell())).unwrap();
        worst_zero = worst_zero.max((z.value - Complex64::new(z.count as f64, 0.0)).norm());
    }
    let one = ChainSpec::product(vec![2]).unwrap();
    let quarter = partition::character(&one, &TorusElement::new(vec![PI / 2.0], 1.0).unwrap()).unwrap().value;
    let quarter_err = (quarter - Complex64::i()).norm();
    let mut r = rng(109);
    let mut worst_prod = 0.0f64;
    for _ in 0..50 {
        let ell = r.gen_range(1..=4);
        let l: Vec<i64> = (0..ell).map(|_| r.gen_range(1..=6)).collect();
        let eps: Vec<f64> = (0..ell).map(|_| r.gen_range(-PI..PI)).collect();
        let beta = r.gen_range(0.2..2.0);
        let spec = ChainSpec::product(l.clone()).unwrap();
        let h = TorusElement::new(eps.clone(), beta).unwrap();
        let z = partition::character(&spec, &h).unwrap().value;
        let expect: Complex64 = l.iter().zip(&eps).map(|(&b, &e)| geometric(b, e)).product();
        worst_prod = worst_prod.max((z - expect).norm() / expect.norm().max(1.0));
        let c = partition::classical_z(&spec, &h, Method::Quadrature).unwrap().value;
        let expect: f64 = l.iter().zip(&eps).map(|(&b, &e)| laplace_interval(b as f64, beta * e)).product();
        worst_prod = worst_prod.max((c - expect).abs() / expect.abs().max(1.0));
    }
    (
        worst_zero == 0.0 && quarter_err <= 1e-12 && worst_prod <= 1e-9,
        format!("Z(0) − #Π max {worst_zero:e}; Z(π/2) − i = {quarter_err:.1e}; product factorization max rel err {worst_prod:.1e}"),
    )
}

fn path_integral() -> Outcome {
    let mut r = rng(110);
    let mut worst_reduce = 0.0f64;
    let mut n_dependent = 0;
    for spec in random_specs_with(10, 50, 4, true) {
        let h = TorusElement::new((0..spec.ell()).map(|_| r.gen_range(-PI..PI)).collect(), 1.0).unwrap();
        let exact = partition::character(&spec, &h).unwrap().value;
        let base = pathint::analytic_reduce(&spec, &h, 1).unwrap();
        worst_reduce = worst_reduce.max((base - exact).norm());
        for n in [2, 4, 8, 16] {
            if pathint::analytic_reduce(&spec, &h, n).unwrap() != base {
                n_dependent += 1;
            }
        }
    }
    let mut worst_numeric = 0.0f64;
    let mut weakest_ablation = f64::INFINITY;
    for l in 1..=3 {
        let spec = ChainSpec::product(vec![l]).unwrap();
        for e in [0.0, PI / 2.0, 1.0] {
            let h = TorusElement::new(vec![e], 1.0).unwrap();
            let exact = partition::character(&spec, &h).unwrap().value;
            for slices in [1, 2] {
                let p = PathIntegralParams { slices, ..Default::default() };
                let z = pathint::numeric_path_integral(&spec, &h, &p).unwrap();
                worst_numeric = worst_numeric.max((z - exact).norm());
                if e != 0.0 {
                    let ablated = pathint::numeric_path_integral(&spec, &h, &PathIntegralParams { n_max: 0, ..p }).unwrap();
                    weakest_ablation = weakest_ablation.min((ablated - exact).norm());
                }
            }
        }
    }
    (
        worst_reduce <= 1e-12 && n_dependent == 0 && worst_numeric <= 0.05 && weakest_ablation > 0.05,
        format!(
            "reduce vs character {worst_reduce:.1e}, N-dependent cases {n_dependent}; numeric max error {worst_numeric:.2e} (tol 0.05); n_max=0 min error {weakest_ablation:.3} (> 0.05)"
        ),
    )
}

fn poisson() -> Outcome {
    let mut worst = 0.0f64;
    for l in [1u32, 2, 5] {
        for h in [0.0, PI / 2.0, 1.0] {
            let z = pathint::poisson_check(l, h, 200, 1e-4).unwrap();
            worst = worst.max((z - geometric(l as i64, h)).norm());
        }
    }
    (worst <= 0.02, format!("max deviation from geometric sum {worst:.2e} (tol 0.02)"))
}

fn classical() -> Outcome {
    let one = ChainSpec::product(vec![2]).unwrap();
    let v = partition::classical_z(&one, &TorusElement::new(vec![1.0], 1.0).unwrap(), Method::Quadrature).unwrap().value;
    let err = (v - (1.0 - (-2.0f64).exp())).abs();
    let mut r = rng(111);
    let mut worst_sigma = 0.0f64;
    let mut worst_vol = 0.0f64;
    let specs = random_specs_with(11, 30, 4, true);
    for (k, spec) in specs.iter().enumerate() {
        let h = TorusElement::new((0..spec.ell()).map(|_| r.gen_range(-0.5..0.5)).collect(), 1.0).unwrap();
        let q = partition::classical_z(spec, &h, Method::Quadrature).unwrap().value;
        let mc = partition::classical_z(spec, &h, Method::MonteCarlo { samples: 200_000, seed: k as u64 }).unwrap();
        worst_sigma = worst_sigma.max((q - mc.value).abs() / mc.std_error);
        let z0 = partition::classical_z(spec, &TorusElement::zero(spec.ell()), Method::Quadrature).unwrap().value;
        let vol = polytope::volume(spec, Method::Quadrature).unwrap().value;
        worst_vol = worst_vol.max((z0 - vol).abs());
    }
    (
        err <= 1e-8 && worst_sigma <= 4.0 && worst_vol == 0.0,
        format!("ℓ=1 value error {err:.1e}; quadrature vs MC max {worst_sigma:.2}σ over {} specs; H=0 vs volume max diff {worst_vol:e}", specs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("matrix-oracle agreement", matrix_oracle),
        ("Iwasawa T-component residuals", iwasawa_t),
        ("gradient check", gradient),
        ("determinant identity", determinant),
        ("positivity vs Hessian definiteness", positivity),
        ("lattice enumeration and worked cube", lattice),
        ("conjugate membership", conjugate),
        ("character identities", characters),
        ("path integral", path_integral),
        ("Poisson check", poisson),
        ("classical partition function", classical),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => o,
            Err(_) => (false, "panicked".to_string()),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
