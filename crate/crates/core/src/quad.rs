//! One-dimensional quadrature: a globally adaptive Gauss–Kronrod (7, 15) rule,
//! its iterated use over twisted cubes, and composite Gauss–Legendre grids.

use std::collections::BinaryHeap;

use gauss_quad::legendre::GaussLegendre;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd positions are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Single G7/K15 panel: `(kronrod, |kronrod − gauss|)`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[k] * s;
        if k % 2 == 1 {
            rg += WG[k / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Adaptive integral of `f` over `[a, b]` to relative tolerance `rel_tol`
/// (or absolute `abs_tol`, whichever is looser). At most `max_panels` panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64, max_panels: usize) -> Estimate {
    if a == b {
        return Estimate { value: 0.0, error: 0.0 };
    }
    let (val, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, val, err });
    let (mut total, mut total_err) = (val, err);
    while total_err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_panels {
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        total += v1 + v2 - p.val;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.val, e + p.err));
    Estimate { value, error }
}

/// Largest chain length accepted by [`integrate_twisted_cube`].
pub const MAX_NESTED_ELL: usize = 6;

/// `∫ f(x) dx` over `{0 ≤ x_j ≤ l_j − Σ_{i<j} c_ji x_i}`, iterating 1-D
/// adaptive rules with `x_1` outermost.
///
/// Slices where an upper bound is negative contribute nothing; for positive
/// chains this never happens inside the cube.
pub fn integrate_twisted_cube<F: Fn(&[f64]) -> f64>(spec: &ChainSpec, f: F, rel_tol: f64) -> Result<f64> {
    let ell = spec.ell();
    if ell > MAX_NESTED_ELL {
        return Err(Error::BudgetExceeded(format!(
            "nested quadrature supports ell <= {MAX_NESTED_ELL}, got {ell}"
        )));
    }
    let mut x = vec![0.0; ell];
    Ok(nested(spec, &f, &mut x, 0, rel_tol))
}

fn nested<F: Fn(&[f64]) -> f64>(spec: &ChainSpec, f: &F, x: &mut Vec<f64>, depth: usize, rel_tol: f64) -> f64 {
    let ell = spec.ell();
    if depth == ell {
        return f(x);
    }
    let upper = spec.facet_bound(depth, &x[..depth]);
    if upper <= 0.0 {
        return 0.0;
    }
    // inner levels run tighter so their noise stays below the outer tolerance
    let inner_tol = if depth == 0 { rel_tol * 1e-2 } else { rel_tol };
    integrate(
        |t| {
            x[depth] = t;
            nested(spec, f, x, depth + 1, inner_tol)
        },
        0.0,
        upper,
        rel_tol,
        1e-300,
        400,
    )
    .value
}

/// Composite Gauss–Legendre rule: nodes and weights on `[a, b]` with
/// `panels` equal panels of `order` points each.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rule = GaussLegendre::new(order).expect("order >= 2").into_node_weight_pairs();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(t, w) in &rule {
            xs.push(lo + 0.5 * h * (t + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}
