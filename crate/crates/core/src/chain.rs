//! The abstract P¹-chain: chain length, twist integers `c_ji` and weights `l_i`.
//!
//! Indices in the file format and in [`ChainSpec::twist`] are 1-based, with
//! index 1 the innermost factor. Vectors elsewhere in the crate are plain
//! slices where position `k` holds index `k + 1`.

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Largest chain length accepted by [`validate`]; corner enumeration is 2^ℓ.
pub const MAX_ELL: usize = 20;

/// Largest entry magnitude accepted by [`validate`].
pub const MAX_ENTRY: i64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainSpec {
    ell: usize,
    /// Row `j` holds `c_{j+1, i+1}` for `i < j`.
    twists: Vec<Vec<i64>>,
    weights: Vec<i64>,
}

impl ChainSpec {
    /// Builds a chain from 1-based `(j, i, v)` twist triples. Absent entries are 0.
    pub fn new(weights: Vec<i64>, twists: impl IntoIterator<Item = (i64, i64, i64)>) -> Result<Self> {
        let ell = weights.len();
        if ell == 0 {
            return Err(Error::EmptyChain);
        }
        let mut rows: Vec<Vec<i64>> = (0..ell).map(|j| vec![0; j]).collect();
        let mut seen = std::collections::HashSet::new();
        for (j, i, v) in twists {
            if j < 1 || i < 1 || j as u64 > ell as u64 || i as u64 > ell as u64 {
                return Err(Error::IndexOutOfRange { j, i, ell });
            }
            if i >= j {
                return Err(Error::UpperTriangularTwist { j, i });
            }
            let (j, i) = (j as usize, i as usize);
            if !seen.insert((j, i)) {
                return Err(Error::DuplicateTwist { j, i });
            }
            rows[j - 1][i - 1] = v;
        }
        Ok(Self { ell, twists: rows, weights })
    }

    /// The product chain `(P¹)^ℓ`.
    pub fn product(weights: Vec<i64>) -> Result<Self> {
        Self::new(weights, std::iter::empty())
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// `c_ji` with 1-based indices; zero unless `j > i`.
    pub fn twist(&self, j: usize, i: usize) -> i64 {
        if i >= 1 && i < j && j <= self.ell {
            self.twists[j - 1][i - 1]
        } else {
            0
        }
    }

    /// Row of twists below position `j` (0-based): `row(j)[i] = c_{j+1,i+1}`.
    pub(crate) fn row(&self, j: usize) -> &[i64] {
        &self.twists[j]
    }

    pub(crate) fn c(&self, j: usize, i: usize) -> f64 {
        if i < j {
            self.twists[j][i] as f64
        } else {
            0.0
        }
    }

    pub(crate) fn l(&self, j: usize) -> f64 {
        self.weights[j] as f64
    }

    /// Nonzero twists as 1-based `(j, i, v)` in lexicographic `(j, i)` order.
    pub fn twist_entries(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for (j, row) in self.twists.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                if v != 0 {
                    out.push((j + 1, i + 1, v));
                }
            }
        }
        out
    }

    pub fn is_product(&self) -> bool {
        self.twists.iter().all(|r| r.iter().all(|&v| v == 0))
    }

    /// `l_j − Σ_{i<j} c_ji x_i` at position `j` for a prefix `x[..j]`.
    pub fn facet_bound(&self, j: usize, x: &[f64]) -> f64 {
        self.l(j) - self.row(j).iter().zip(x).map(|(&c, &xi)| c as f64 * xi).sum::<f64>()
    }

    /// Integer version of [`ChainSpec::facet_bound`].
    pub fn facet_bound_int(&self, j: usize, n: &[i64]) -> i64 {
        self.weights[j] - self.row(j).iter().zip(n).map(|(&c, &ni)| c * ni).sum::<i64>()
    }

    /// Same chain with every weight multiplied by `k`.
    pub fn dilate(&self, k: i64) -> Self {
        Self {
            ell: self.ell,
            twists: self.twists.clone(),
            weights: self.weights.iter().map(|&l| l * k).collect(),
        }
    }

    /// Canonical text form: compact JSON, nonzero twists sorted by `(j, i)`.
    pub fn to_canonical_string(&self) -> String {
        #[derive(Serialize)]
        struct Entry {
            j: usize,
            i: usize,
            v: i64,
        }
        #[derive(Serialize)]
        struct File<'a> {
            ell: usize,
            c: Vec<Entry>,
            l: &'a [i64],
        }
        let file = File {
            ell: self.ell,
            c: self.twist_entries().into_iter().map(|(j, i, v)| Entry { j, i, v }).collect(),
            l: &self.weights,
        };
        serde_json::to_string(&file).expect("chain spec serializes")
    }

    /// Draws a chain with `1 ≤ ℓ ≤ max_ell`, `|c_ji| ≤ max_twist` and weights in `weights`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        max_ell: usize,
        max_twist: i64,
        weights: std::ops::RangeInclusive<i64>,
    ) -> Self {
        let ell = rng.gen_range(1..=max_ell);
        let w: Vec<i64> = (0..ell).map(|_| rng.gen_range(weights.clone())).collect();
        let mut triples = Vec::new();
        for j in 2..=ell {
            for i in 1..j {
                triples.push((j as i64, i as i64, rng.gen_range(-max_twist..=max_twist)));
            }
        }
        Self::new(w, triples).expect("random chain is well formed")
    }
}

impl std::fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl std::str::FromStr for ChainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_chain_spec(s)
    }
}

fn as_int(v: &Value, field: &'static str) -> Result<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or(Error::NonInteger { field }),
        _ => Err(Error::NonInteger { field }),
    }
}

/// Parses the spec-file format: an object with `ell`, `c` (array of `{j, i, v}`)
/// and `l`. JSON5 syntax (unquoted keys, trailing commas) is accepted.
pub fn parse_chain_spec(text: &str) -> Result<ChainSpec> {
    let root: Value = json5::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::Malformed("top level must be an object".into()))?;
    if let Some(k) = obj.keys().find(|k| !matches!(k.as_str(), "ell" | "c" | "l")) {
        return Err(Error::Malformed(format!("unknown field `{k}`")));
    }
    let ell = obj
        .get("ell")
        .ok_or_else(|| Error::Malformed("missing field `ell`".into()))
        .and_then(|v| as_int(v, "ell"))?;
    if ell < 1 {
        return Err(Error::EmptyChain);
    }
    let weights = obj
        .get("l")
        .ok_or_else(|| Error::Malformed("missing field `l`".into()))?
        .as_array()
        .ok_or_else(|| Error::Malformed("`l` must be an array".into()))?
        .iter()
        .map(|v| as_int(v, "l"))
        .collect::<Result<Vec<_>>>()?;
    if weights.len() as i64 != ell {
        return Err(Error::LengthMismatch { ell: ell as usize, got: weights.len() });
    }
    let mut triples = Vec::new();
    if let Some(c) = obj.get("c") {
        let entries = c.as_array().ok_or_else(|| Error::Malformed("`c` must be an array".into()))?;
        for e in entries {
            let e = e
                .as_object()
                .ok_or_else(|| Error::Malformed("twist entries must be objects {j, i, v}".into()))?;
            let get = |k: &str| {
                e.get(k)
                    .ok_or_else(|| Error::Malformed(format!("twist entry missing `{k}`")))
                    .and_then(|v| as_int(v, "c"))
            };
            triples.push((get("j")?, get("i")?, get("v")?));
        }
    }
    ChainSpec::new(weights, triples)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl Diagnostics {
    pub fn is_usable(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Structural limits and positivity-hypothesis warnings. Never fails.
pub fn validate(spec: &ChainSpec) -> Diagnostics {
    let mut d = Diagnostics::default();
    if spec.ell() > MAX_ELL {
        d.errors.push(format!("ell = {} exceeds supported maximum {MAX_ELL}", spec.ell()));
    }
    let too_big = spec
        .weights()
        .iter()
        .copied()
        .chain(spec.twist_entries().into_iter().map(|(_, _, v)| v))
        .any(|v| v.abs() > MAX_ENTRY);
    if too_big {
        d.errors.push(format!("entry magnitude exceeds {MAX_ENTRY}"));
    }
    for (k, &l) in spec.weights().iter().enumerate() {
        if l == 0 {
            d.warnings.push(format!("l_{} = 0: positivity theorem hypothesis fails", k + 1));
        } else if l < 0 {
            d.warnings.push(format!("l_{} = {l} < 0: negative weight: positivity will fail", k + 1));
        }
    }
    d
}
