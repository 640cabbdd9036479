//! Parry and Shannon-Parry measures, Markov measures on the multigraph and
//! their push-forwards under the branch-erasing projection, and escape rates
//! into cylinder holes.
//!
//! Measures are generic over the scalar: `f64` at a certified float `θ`, or
//! exact rationals when `θ` is rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::langmodel::{oracle_table, Budget, LangError, ShiftSpec};
use crate::ratfield::{vanishes_at, AlgebraError, RatFun};
use crate::scalar::{rational_to_f64, Scalar};
use crate::spectral::{self, AdjMatrix, SpectralError, SpectralOptions, SpectralReport};
use crate::words::{Word, WordError};

const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cannot parse cylinder {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("not a path of the graph: {0}")]
    InvalidPath(String),
    #[error("not a stochastic matrix: {0}")]
    NotStochastic(String),
    #[error("the Perron root is irrational; the exact pipeline needs a rational root")]
    Irrational,
    #[error("property (P) is not certified; the combinatorial route needs an explicit override")]
    PropertyPUnknown,
    #[error("the matrix is not irreducible")]
    Reducible,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("integer overflow while counting paths")]
    Overflow,
    #[error("more than {0} cylinders to enumerate")]
    Budget(u64),
}

fn fl<T: Scalar>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn from_u128<T: Scalar>(x: u128) -> T {
    <T as Scalar>::from_u128(x)
}

/// Row-stochastic matrix over the vertices with its stationary vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StochMat<T> {
    pub labels: Vec<Word>,
    pub entries: Vec<Vec<T>>,
    /// Left eigenvector for eigenvalue 1 with entries summing to 1.
    pub stationary: Vec<T>,
}

impl<T: Scalar> StochMat<T> {
    /// Checks non-negativity and row sums, then solves for the stationary vector.
    pub fn new(labels: Vec<Word>, entries: Vec<Vec<T>>) -> Result<Self, MeasureError> {
        let n = labels.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(MeasureError::NotStochastic("shape".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.iter().any(|x| *x < T::zero()) {
                return Err(MeasureError::NotStochastic(format!("negative entry in row {i}")));
            }
            let s = row.iter().fold(T::zero(), |a, b| a + b.clone());
            if !s.approx_eq(&T::one(), FLOAT_TOL) {
                return Err(MeasureError::NotStochastic(format!("row {i} sums to {}", fl(&s))));
            }
        }
        let stationary = stationary_vector(&entries).ok_or(MeasureError::Reducible)?;
        Ok(StochMat { labels, entries, stationary })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Largest `|Σ_j P_ij - 1|`.
    pub fn row_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|r| fl(&(r.iter().fold(T::zero(), |a, b| a + b.clone()) - T::one())).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `ρ P` from `ρ`, and of `Σ ρ` from 1.
    pub fn stationarity_defect(&self) -> f64 {
        let n = self.len();
        let mut d = fl(&(self.stationary.iter().fold(T::zero(), |a, b| a + b.clone()) - T::one())).abs();
        for j in 0..n {
            let s = (0..n).fold(T::zero(), |a, i| a + self.stationary[i].clone() * self.entries[i][j].clone());
            d = d.max(fl(&(s - self.stationary[j].clone())).abs());
        }
        d
    }

    /// Same zero pattern as the adjacency matrix.
    pub fn is_compatible(&self, a: &AdjMatrix) -> bool {
        a.len() == self.len()
            && (0..a.len()).all(|i| (0..a.len()).all(|j| (a.get(i, j) > 0) == (self.entries[i][j] > T::zero())))
    }
}

// Solves ρ (P - I) = 0, Σ ρ = 1 by elimination with partial pivoting.
fn stationary_vector<T: Scalar>(p: &[Vec<T>]) -> Option<Vec<T>> {
    let n = p.len();
    if n == 0 {
        return None;
    }
    // rows: equations j = 0..n-1 of Σ_i ρ_i (P_ij - δ_ij) = 0, last replaced by Σ ρ = 1
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut row: Vec<T> = (0..n)
                .map(|i| if i == j { p[i][j].clone() - T::one() } else { p[i][j].clone() })
                .collect();
            row.push(T::zero());
            row
        })
        .collect();
    m[n - 1] = vec![T::one(); n + 1];
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs_val().partial_cmp(&m[b][c].abs_val()).expect("ordered"))?;
        if m[piv][c].is_zero() || (!T::EXACT && fl(&m[piv][c]).abs() < 1e-300) {
            return None;
        }
        m.swap(c, piv);
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone() / m[c][c].clone();
                for k in c..=n {
                    let t = f.clone() * m[c][k].clone();
                    m[r][k] = m[r][k].clone() - t;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone() / m[i][i].clone()).collect())
}

/// `P_XY = A_XY V_Y / (θ V_X)` and `ρ_X = U_X V_X / U^T V`.
pub fn shannon_parry_matrix<T: Scalar>(a: &AdjMatrix, theta: &T, u: &[T], v: &[T]) -> Result<StochMat<T>, MeasureError> {
    let n = a.len();
    if v.iter().any(Zero::is_zero) {
        return Err(MeasureError::Precondition("zero entry in the right eigenvector".into()));
    }
    let dot = u.iter().zip(v).fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone());
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| from_u128::<T>(a.get(i, j)) * v[j].clone() / (theta.clone() * v[i].clone()))
                .collect()
        })
        .collect();
    let stationary = (0..n).map(|i| u[i].clone() * v[i].clone() / dot.clone()).collect();
    Ok(StochMat { labels: a.labels.clone(), entries, stationary })
}

/// Integer matrix `L P` with `L` the lcm of the denominators of the positive
/// entries; its Shannon-Parry matrix is `P` again.
pub fn lift_rational_stochastic(p: &StochMat<BigRational>) -> Result<(BigInt, AdjMatrix), MeasureError> {
    let l = p
        .entries
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let entries = p
        .entries
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer().to_u128().ok_or(MeasureError::Overflow))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((l, AdjMatrix::new(p.labels.clone(), entries)))
}

/// Shannon-Parry matrix of a bare matrix through its own Perron data; exact
/// when the Perron root is rational.
pub fn shannon_parry_exact(a: &AdjMatrix) -> Result<StochMat<BigRational>, MeasureError> {
    let mp = spectral::matrix_perron(a)?;
    let theta = mp.certificate.exact.clone().ok_or(MeasureError::Irrational)?;
    let (u, v) = mp.exact.expect("rational root has exact vectors");
    shannon_parry_matrix(a, &theta, &u, &v)
}

/// Shannon-Parry matrix of a bare matrix in floats.
pub fn shannon_parry_float(a: &AdjMatrix) -> Result<StochMat<f64>, MeasureError> {
    let mp = spectral::matrix_perron(a)?;
    shannon_parry_matrix(a, &mp.certificate.value, &mp.u, &mp.v)
}

/// Path in the graph: vertex indices, plus branch indices (1-based) for an
/// edge word of the multigraph; without branches it is a word of the
/// higher-block shift, i.e. the union of all its lifts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cylinder {
    pub vertices: Vec<usize>,
    pub branches: Option<Vec<u128>>,
}

impl Cylinder {
    pub fn vertex_word(vertices: Vec<usize>) -> Self {
        Cylinder { vertices, branches: None }
    }

    pub fn edge_word(vertices: Vec<usize>, branches: Vec<u128>) -> Self {
        Cylinder { vertices, branches: Some(branches) }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Parses either a symbol string (consecutive windows of length `p - 1`
    /// become the vertices) or a chain of `X*Y#j` edges separated by spaces
    /// or commas; a missing `#j` means branch 1.
    pub fn parse(spec: &ShiftSpec, a: &AdjMatrix, text: &str) -> Result<Self, MeasureError> {
        let err = |reason: &str| MeasureError::Parse { text: text.to_string(), reason: reason.to_string() };
        let label = |s: &str| -> Result<usize, MeasureError> {
            let w = spec.alphabet().parse(s.trim())?;
            a.index_of(w.symbols()).ok_or_else(|| err(&format!("{} is not a vertex", s.trim())))
        };
        let text_t = text.trim();
        if text_t.is_empty() {
            return Err(err("empty"));
        }
        let c = if text_t.contains('*') {
            let mut vertices = Vec::new();
            let mut branches = Vec::new();
            for tok in text_t.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                let (edge, j) = match tok.split_once('#') {
                    Some((e, j)) => (e, j.parse::<u128>().map_err(|_| err("bad branch index"))?),
                    None => (tok, 1),
                };
                let (x, y) = edge.split_once('*').ok_or_else(|| err("edge needs X*Y"))?;
                let (x, y) = (label(x)?, label(y)?);
                match vertices.last() {
                    None => vertices.push(x),
                    Some(&last) if last == x => {}
                    Some(_) => return Err(err("edges do not chain")),
                }
                vertices.push(y);
                branches.push(j);
            }
            Cylinder::edge_word(vertices, branches)
        } else {
            let w = spec.alphabet().parse(text_t)?;
            let k = spec.p() - 1;
            if w.len() < k {
                return Err(err("shorter than a vertex label"));
            }
            let vertices = (0..=w.len() - k)
                .map(|i| a.index_of(&w.symbols()[i..i + k]).ok_or_else(|| err("window is not a vertex")))
                .collect::<Result<_, _>>()?;
            Cylinder::vertex_word(vertices)
        };
        c.validate(a)?;
        Ok(c)
    }

    /// Consecutive vertices joined by edges and branch indices in range.
    pub fn validate(&self, a: &AdjMatrix) -> Result<(), MeasureError> {
        if self.vertices.is_empty() || self.vertices.iter().any(|&v| v >= a.len()) {
            return Err(MeasureError::InvalidPath("vertex out of range".into()));
        }
        for (i, w) in self.vertices.windows(2).enumerate() {
            let k = a.get(w[0], w[1]);
            if k == 0 {
                return Err(MeasureError::InvalidPath(format!("no edge {}*{}", a.labels[w[0]], a.labels[w[1]])));
            }
            if let Some(b) = &self.branches {
                if b.len() != self.len() || b[i] == 0 || b[i] > k {
                    return Err(MeasureError::InvalidPath(format!(
                        "branch on edge {}*{} must lie in 1..={k}",
                        a.labels[w[0]], a.labels[w[1]]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The symbol word `X_1 * X_2 * …`.
    pub fn symbol_word(&self, a: &AdjMatrix) -> Word {
        let mut w = a.labels[self.vertices[0]].clone();
        for &v in &self.vertices[1..] {
            w = w.push(*a.labels[v].symbols().last().expect("non-empty"));
        }
        w
    }

    pub fn render(&self, spec: &ShiftSpec, a: &AdjMatrix) -> String {
        let lab = |i: usize| spec.render(a.labels[i].symbols());
        match &self.branches {
            None => spec.render(self.symbol_word(a).symbols()),
            Some(b) if !b.is_empty() => self
                .vertices
                .windows(2)
                .zip(b)
                .map(|(w, j)| format!("{}*{}#{j}", lab(w[0]), lab(w[1])))
                .collect::<Vec<_>>()
                .join(" "),
            Some(_) => lab(self.vertices[0]),
        }
    }
}

/// Erases branch indices.
pub fn project_pi(c: &Cylinder) -> Cylinder {
    Cylinder::vertex_word(c.vertices.clone())
}

/// Number of edge words over a vertex word: `Π A_{X_i X_{i+1}}`.
pub fn preimage_count(c: &Cylinder, a: &AdjMatrix) -> Result<u128, MeasureError> {
    c.vertices
        .windows(2)
        .try_fold(1u128, |acc, w| acc.checked_mul(a.get(w[0], w[1])).ok_or(MeasureError::Overflow))
}

/// All edge words projecting onto the vertex word, branches in lexicographic order.
pub fn preimage(c: &Cylinder, a: &AdjMatrix) -> Vec<Cylinder> {
    let mut out = vec![Vec::new()];
    for w in c.vertices.windows(2) {
        let k = a.get(w[0], w[1]);
        out = out
            .into_iter()
            .flat_map(|b: Vec<u128>| {
                (1..=k).map(move |j| {
                    let mut b = b.clone();
                    b.push(j);
                    b
                })
            })
            .collect();
    }
    out.into_iter().map(|b| Cylinder::edge_word(c.vertices.clone(), b)).collect()
}

/// Vertex words with exactly `n` edges, in lexicographic order of vertex indices.
pub fn vertex_words(a: &AdjMatrix, n: usize, cap: u64) -> Result<Vec<Vec<usize>>, MeasureError> {
    let mut cur: Vec<Vec<usize>> = (0..a.len()).map(|i| vec![i]).collect();
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &cur {
            let last = *w.last().expect("non-empty");
            for j in 0..a.len() {
                if a.get(last, j) > 0 {
                    let mut e = w.clone();
                    e.push(j);
                    next.push(e);
                    if next.len() as u64 > cap {
                        return Err(MeasureError::Budget(cap));
                    }
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Which formula evaluates a cylinder measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureRoute {
    /// `U_{X_1} V_{X_{n+1}} / θ^n` with `U^T V = 1`.
    Parry,
    /// `ρ_{X_1} Π P_{X_i X_{i+1}} / A_{X_i X_{i+1}}`.
    ShannonParry,
    /// Unscaled formula vectors over `θ^{n+p-1} (1 + R'(θ))`.
    Combinatorial,
}

impl MeasureRoute {
    pub const ALL: [MeasureRoute; 3] = [MeasureRoute::Parry, MeasureRoute::ShannonParry, MeasureRoute::Combinatorial];

    pub fn name(self) -> &'static str {
        match self {
            MeasureRoute::Parry => "parry",
            MeasureRoute::ShannonParry => "shannon_parry",
            MeasureRoute::Combinatorial => "combinatorial",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// The measure of maximal entropy on the multigraph edge shift of a spec.
#[derive(Clone, Debug, PartialEq)]
pub struct ParryMeasure<T> {
    pub adjacency: AdjMatrix,
    pub p: usize,
    pub theta: T,
    /// Eigenvectors scaled so that `U^T V = 1`.
    pub u: Vec<T>,
    pub v: Vec<T>,
    /// Eigenvectors as given by the correlation formulas.
    pub raw_u: Vec<T>,
    pub raw_v: Vec<T>,
    /// `θ^{p-1} (1 + R'(θ))`.
    pub scale: T,
    pub property_p: bool,
    /// Use the combinatorial route even without a property (P) witness.
    pub assume_property_p: bool,
    pub chain: StochMat<T>,
}

impl<T: Scalar> ParryMeasure<T> {
    fn assemble(rep: &SpectralReport, theta: T, scale: T, conv: impl Fn(&BigRational) -> T, p: usize) -> Result<Self, MeasureError> {
        let vecs = rep.vectors.as_ref().ok_or(MeasureError::Reducible)?;
        let raw_u: Vec<T> = vecs.u.iter().map(&conv).collect();
        let raw_v: Vec<T> = vecs.v.iter().map(&conv).collect();
        let dot = raw_u.iter().zip(&raw_v).fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone());
        let v: Vec<T> = raw_v.iter().map(|x| x.clone() / dot.clone()).collect();
        let chain = shannon_parry_matrix(&rep.adjacency, &theta, &raw_u, &raw_v)?;
        Ok(ParryMeasure {
            adjacency: rep.adjacency.clone(),
            p,
            theta,
            u: raw_u.clone(),
            v,
            raw_u,
            raw_v,
            scale,
            property_p: rep.property_p.is_some(),
            assume_property_p: false,
            chain,
        })
    }

    /// Measure of a cylinder; vertex words get the mass of all their lifts.
    pub fn cylinder(&self, c: &Cylinder, route: MeasureRoute) -> Result<T, MeasureError> {
        c.validate(&self.adjacency)?;
        let a = &self.adjacency;
        let (x0, xn) = (c.vertices[0], *c.vertices.last().expect("non-empty"));
        let lifts = if c.branches.is_some() { T::one() } else { from_u128(preimage_count(c, a)?) };
        let mut tn = T::one();
        for _ in 0..c.len() {
            tn = tn * self.theta.clone();
        }
        Ok(match route {
            MeasureRoute::Parry => lifts * self.u[x0].clone() * self.v[xn].clone() / tn,
            MeasureRoute::ShannonParry => {
                let mut m = self.chain.stationary[x0].clone();
                for w in c.vertices.windows(2) {
                    let p = self.chain.entries[w[0]][w[1]].clone();
                    m = m * if c.branches.is_some() { p / from_u128(a.get(w[0], w[1])) } else { p };
                }
                m
            }
            MeasureRoute::Combinatorial => {
                if !self.property_p && !self.assume_property_p {
                    return Err(MeasureError::PropertyPUnknown);
                }
                lifts * self.raw_u[x0].clone() * self.raw_v[xn].clone() / (tn * self.scale.clone())
            }
        })
    }

    /// Largest pairwise gap between the routes on one cylinder.
    pub fn route_gap(&self, c: &Cylinder) -> Result<f64, MeasureError> {
        let vals = MeasureRoute::ALL.iter().map(|&r| self.cylinder(c, r).map(|x| fl(&x))).collect::<Result<Vec<_>, _>>()?;
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        Ok(hi - lo)
    }

    /// Checks `μ(C_W) = Σ_e μ(C_{We})` for edge words with fewer than
    /// `max_edges` edges and `Σ_X μ(C_X) = 1`; returns the count and largest defect.
    pub fn kolmogorov(&self, route: MeasureRoute, max_edges: usize, cap: u64) -> Result<(usize, f64), MeasureError> {
        let a = &self.adjacency;
        let mut checked = 1;
        let total = (0..a.len()).try_fold(T::zero(), |s, i| self.cylinder(&Cylinder::edge_word(vec![i], vec![]), route).map(|m| s + m))?;
        let mut worst = fl(&(total - T::one())).abs();
        let mut level: Vec<Cylinder> = (0..a.len()).map(|i| Cylinder::edge_word(vec![i], vec![])).collect();
        for _ in 0..max_edges {
            let mut next = Vec::new();
            for c in &level {
                let last = *c.vertices.last().expect("non-empty");
                let mut sum = T::zero();
                for j in 0..a.len() {
                    for b in 1..=a.get(last, j) {
                        let mut vs = c.vertices.clone();
                        vs.push(j);
                        let mut bs = c.branches.clone().expect("edge word");
                        bs.push(b);
                        let e = Cylinder::edge_word(vs, bs);
                        sum = sum + self.cylinder(&e, route)?;
                        next.push(e);
                        if next.len() as u64 > cap {
                            return Err(MeasureError::Budget(cap));
                        }
                    }
                }
                worst = worst.max(fl(&(sum - self.cylinder(c, route)?)).abs());
                checked += 1;
            }
            level = next;
        }
        Ok((checked, worst))
    }

    /// The Shannon-Parry chain as a Markov measure with equal branch shares.
    pub fn edge_markov(&self) -> Result<EdgeMarkov<T>, MeasureError> {
        EdgeMarkov::uniform(&self.adjacency, &self.chain)
    }
}

impl ParryMeasure<f64> {
    /// Float pipeline at the certified `θ`.
    pub fn float(spec: &ShiftSpec, opts: &SpectralOptions) -> Result<Self, MeasureError> {
        let rep = spectral::analyze(spec, opts)?;
        Self::from_report(spec, &rep)
    }

    pub fn from_report(spec: &ShiftSpec, rep: &SpectralReport) -> Result<Self, MeasureError> {
        let norm = rep.normalization.as_ref().ok_or(MeasureError::Reducible)?;
        Self::assemble(rep, rep.theta, norm.formula, rational_to_f64, spec.p())
    }
}

impl ParryMeasure<BigRational> {
    /// Exact pipeline; fails with [`MeasureError::Irrational`] unless `θ` is rational.
    pub fn exact(spec: &ShiftSpec, opts: &SpectralOptions) -> Result<Self, MeasureError> {
        let rep = spectral::analyze(spec, opts)?;
        Self::from_report(spec, &rep)
    }

    pub fn from_report(spec: &ShiftSpec, rep: &SpectralReport) -> Result<Self, MeasureError> {
        let theta = rep.certificate.exact.clone().ok_or(MeasureError::Irrational)?;
        let norm = rep.normalization.as_ref().ok_or(MeasureError::Reducible)?;
        let (_, scale) = norm.exact.clone().ok_or(MeasureError::Irrational)?;
        Self::assemble(rep, theta, scale, BigRational::clone, spec.p())
    }
}

/// Markov measure on the multigraph edge shift: stationary vertex weights
/// and a conditional probability for every individual edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMarkov<T> {
    pub adjacency: AdjMatrix,
    pub stationary: Vec<T>,
    /// `branches[X][Y][j]` is the probability of edge `(X*Y)_{j+1}` given `X`.
    pub branches: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> EdgeMarkov<T> {
    /// Splits every `P_XY` equally among the `A_XY` parallel edges.
    pub fn uniform(a: &AdjMatrix, p: &StochMat<T>) -> Result<Self, MeasureError> {
        if !p.is_compatible(a) {
            return Err(MeasureError::NotStochastic("zero pattern differs from the adjacency matrix".into()));
        }
        let n = a.len();
        let branches = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let k = a.get(i, j);
                        (0..k).map(|_| p.entries[i][j].clone() / from_u128(k)).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(EdgeMarkov { adjacency: a.clone(), stationary: p.stationary.clone(), branches })
    }

    /// Arbitrary per-edge probabilities; the stationary vector is solved for.
    pub fn with_branches(a: &AdjMatrix, branches: Vec<Vec<Vec<T>>>) -> Result<Self, MeasureError> {
        let n = a.len();
        if branches.len() != n
            || branches.iter().enumerate().any(|(i, r)| r.len() != n || r.iter().enumerate().any(|(j, b)| b.len() as u128 != a.get(i, j)))
        {
            return Err(MeasureError::NotStochastic("branch table does not match the multigraph".into()));
        }
        let mut m = EdgeMarkov { adjacency: a.clone(), stationary: Vec::new(), branches };
        m.stationary = m.chain()?.stationary;
        Ok(m)
    }

    /// `P_XY = Σ_j` probability of `(X*Y)_j`.
    pub fn chain(&self) -> Result<StochMat<T>, MeasureError> {
        let entries = self
            .branches
            .iter()
            .map(|r| r.iter().map(|b| b.iter().fold(T::zero(), |s, x| s + x.clone())).collect())
            .collect();
        StochMat::new(self.adjacency.labels.clone(), entries)
    }

    /// Measure of an edge-word cylinder.
    pub fn edge_cylinder(&self, c: &Cylinder) -> Result<T, MeasureError> {
        c.validate(&self.adjacency)?;
        let b = c.branches.as_ref().ok_or_else(|| MeasureError::Precondition("edge word expected".into()))?;
        let mut m = self.stationary[c.vertices[0]].clone();
        for (w, j) in c.vertices.windows(2).zip(b) {
            m = m * self.branches[w[0]][w[1]][(*j - 1) as usize].clone();
        }
        Ok(m)
    }

    /// `μ(π^{-1}(C_Ŵ))` by summing over every lift of the vertex word.
    pub fn pushforward(&self, c: &Cylinder) -> Result<T, MeasureError> {
        preimage(&project_pi(c), &self.adjacency)
            .iter()
            .try_fold(T::zero(), |s, e| self.edge_cylinder(e).map(|m| s + m))
    }
}

/// `ν(C_Ŵ) = ρ_{X_1} Π P_{X_i X_{i+1}}`.
pub fn markov_vertex_measure<T: Scalar>(p: &StochMat<T>, vertices: &[usize]) -> T {
    vertices
        .windows(2)
        .fold(p.stationary[vertices[0]].clone(), |m, w| m * p.entries[w[0]][w[1]].clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardReport {
    pub checked: usize,
    pub max_defect: f64,
    /// Vertex words whose two sides differ (beyond `1e-12` in floats).
    pub violations: Vec<Vec<usize>>,
}

/// Compares the push-forward of an edge Markov measure with the vertex Markov
/// measure of its chain on every vertex word of at most `n_max` edges.
pub fn pushforward_check<T: Scalar>(m: &EdgeMarkov<T>, n_max: usize, cap: u64) -> Result<PushforwardReport, MeasureError> {
    let chain = m.chain()?;
    let mut rep = PushforwardReport { checked: 0, max_defect: 0.0, violations: Vec::new() };
    for n in 0..=n_max {
        for vs in vertex_words(&m.adjacency, n, cap)? {
            let lhs = m.pushforward(&Cylinder::vertex_word(vs.clone()))?;
            let rhs = markov_vertex_measure(&chain, &vs);
            let d = fl(&(lhs.clone() - rhs.clone())).abs();
            rep.max_defect = rep.max_defect.max(d);
            if !lhs.approx_eq(&rhs, FLOAT_TOL) {
                rep.violations.push(vs);
            }
            rep.checked += 1;
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqualMultiplicityReport {
    /// The common multiplicity.
    pub multiplicity: u64,
    pub checked: usize,
    /// Vertex words where the push-forward and the Parry measure differ exactly.
    pub failures: Vec<Vec<usize>>,
    /// Largest float gap at the certified root, for display.
    pub max_float_gap: f64,
}

/// For a spec whose repeated collection is every allowed word of length `p`
/// with one multiplicity `M`: compares, exactly, the push-forward of the
/// Shannon-Parry measure with the Parry measure of the binary matrix on all
/// vertex words of at most `max_edges` edges.
///
/// Both sides are rational functions of the binary matrix's root `t`
/// (the multigraph side at `z = M t`); their difference is tested for
/// vanishing at the certified root.
pub fn equal_multiplicity_check(spec: &ShiftSpec, max_edges: usize) -> Result<EqualMultiplicityReport, MeasureError> {
    let p = spec.p();
    let ms: Vec<u64> = spec.repeated().iter().map(|(_, m)| *m).collect();
    let m = *ms.first().ok_or_else(|| MeasureError::Precondition("no repeated words".into()))?;
    let lp = crate::langmodel::enumerate_slice(spec, p, &Budget::default())?;
    let covers = lp.entries.iter().all(|(w, _)| spec.repeated().iter().any(|(r, _)| r == w));
    if ms.iter().any(|&x| x != m) || !covers || spec.repeated().iter().any(|(r, _)| r.len() != p) {
        return Err(MeasureError::Precondition("repeated words must be every allowed word of length p with one multiplicity".into()));
    }
    let hat = ShiftSpec::new(spec.alphabet().clone(), spec.forbidden().to_vec(), Vec::new())?;
    if hat.p() != p {
        return Err(MeasureError::Precondition("forbidden words must reach length p".into()));
    }
    let a = spectral::build_adjacency(spec)?;
    let ah = spectral::build_adjacency(&hat)?;
    if !a.is_irreducible() {
        return Err(MeasureError::Reducible);
    }
    let root = spectral::combinatorial_root(&hat, &ah)?;
    let mq = BigRational::from_integer(BigInt::from(m));
    let chain_fns = |a: &AdjMatrix, s: &ShiftSpec, dilate: Option<&BigRational>| -> Result<(Vec<RatFun<BigRational>>, Vec<Vec<RatFun<BigRational>>>), MeasureError> {
        let (us, vs) = spectral::vector_functions(s)?;
        let d = |f: RatFun<BigRational>| match dilate {
            Some(c) => f.dilate(c),
            None => f,
        };
        let us: Vec<_> = us.into_iter().map(d).collect();
        let vs: Vec<_> = vs.into_iter().map(d).collect();
        let zf = d(RatFun::z());
        let dot = us.iter().zip(&vs).fold(RatFun::zero(), |s, (x, y)| &s + &(x * y));
        let rho = us.iter().zip(&vs).map(|(x, y)| &(x * y) / &dot).collect();
        let n = a.len();
        let pm = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let aij = BigRational::from_integer(BigInt::from(a.get(i, j)));
                        &vs[j].scale(&aij) / &(&zf * &vs[i])
                    })
                    .collect()
            })
            .collect();
        Ok((rho, pm))
    };
    let (rho, pm) = chain_fns(&a, spec, Some(&mq))?;
    let (rho_h, pm_h) = chain_fns(&ah, &hat, None)?;
    let x = spectral::evaluation_point(&root.certificate);
    let mut rep = EqualMultiplicityReport { multiplicity: m, checked: 0, failures: Vec::new(), max_float_gap: 0.0 };
    for n in 0..=max_edges {
        for vs in vertex_words(&a, n, 1 << 20)? {
            let c = Cylinder::vertex_word(vs.clone());
            // every lift carries ρ Π P/A; the lifts number Π A
            let lifts = BigRational::from_integer(BigInt::from(preimage_count(&c, &a)?));
            let mut one_lift = rho[vs[0]].clone();
            let mut parry = rho_h[vs[0]].clone();
            for w in vs.windows(2) {
                let aij = BigRational::from_integer(BigInt::from(a.get(w[0], w[1])));
                one_lift = &one_lift * &pm[w[0]][w[1]].scale(&(BigRational::one() / aij));
                parry = &parry * &pm_h[w[0]][w[1]];
            }
            let push = one_lift.scale(&lifts);
            let diff = &push - &parry;
            if !vanishes_at(diff.num(), &root.polynomial, &root.certificate)? {
                rep.failures.push(vs.clone());
            }
            let gap = rational_to_f64(&push.eval(&x)?) - rational_to_f64(&parry.eval(&x)?);
            rep.max_float_gap = rep.max_float_gap.max(gap.abs());
            rep.checked += 1;
        }
    }
    Ok(rep)
}

// Failure function of the hole over edge symbols.
fn failure<S: PartialEq>(w: &[S]) -> Vec<usize> {
    let mut f = vec![0usize; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = f[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        f[i] = k;
    }
    f
}

fn hole_edges(hole: &Cylinder) -> Vec<(usize, usize, u128)> {
    let b = hole.branches.clone().unwrap_or_else(|| vec![1; hole.len()]);
    hole.vertices.windows(2).zip(b).map(|(w, j)| (w[0], w[1], j)).collect()
}

/// `h_W(n)` for `0 <= n <= n_max`: paths of `n` edges that avoid the hole
/// `W` as a block, by a transfer matrix over (vertex, matched prefix of `W`).
/// A vertex word as hole means its branch-1 lift.
pub fn avoiding_path_counts(a: &AdjMatrix, hole: &Cylinder, n_max: usize) -> Result<Vec<u128>, MeasureError> {
    hole.validate(a)?;
    let w = hole_edges(hole);
    let k = w.len();
    if k == 0 {
        return Err(MeasureError::Precondition("hole needs at least one edge".into()));
    }
    let fail = failure(&w);
    let step = |mut j: usize, e: (usize, usize, u128)| {
        while j > 0 && w[j] != e {
            j = fail[j - 1];
        }
        if w[j] == e {
            j + 1
        } else {
            0
        }
    };
    let n = a.len();
    let mut cnt = vec![vec![0u128; k]; n];
    for row in cnt.iter_mut() {
        row[0] = 1;
    }
    let mut out = vec![n as u128];
    for _ in 0..n_max {
        let mut next = vec![vec![0u128; k]; n];
        for x in 0..n {
            for j in 0..k {
                let c = cnt[x][j];
                if c == 0 {
                    continue;
                }
                for y in 0..n {
                    let mult = a.get(x, y);
                    if mult == 0 {
                        continue;
                    }
                    let mut special: Vec<u128> = w.iter().filter(|e| e.0 == x && e.1 == y).map(|e| e.2).collect();
                    special.sort_unstable();
                    special.dedup();
                    for &b in &special {
                        let j2 = step(j, (x, y, b));
                        if j2 < k {
                            next[y][j2] = next[y][j2].checked_add(c).ok_or(MeasureError::Overflow)?;
                        }
                    }
                    let rest = mult - special.len() as u128;
                    if rest > 0 {
                        let add = c.checked_mul(rest).ok_or(MeasureError::Overflow)?;
                        // any other edge breaks every partial match
                        next[y][0] = next[y][0].checked_add(add).ok_or(MeasureError::Overflow)?;
                    }
                }
            }
        }
        cnt = next;
        let total = cnt.iter().flatten().try_fold(0u128, |s, &x| s.checked_add(x).ok_or(MeasureError::Overflow))?;
        out.push(total);
    }
    Ok(out)
}

/// Same counts by listing every path; reference semantics for small `n_max`.
pub fn avoiding_path_counts_brute(a: &AdjMatrix, hole: &Cylinder, n_max: usize) -> Result<Vec<u128>, MeasureError> {
    hole.validate(a)?;
    let w = hole_edges(hole);
    let mut paths: Vec<(usize, Vec<(usize, usize, u128)>)> = (0..a.len()).map(|x| (x, Vec::new())).collect();
    let mut out = vec![a.len() as u128];
    for _ in 0..n_max {
        let mut next = Vec::new();
        for (x, es) in &paths {
            for y in 0..a.len() {
                for b in 1..=a.get(*x, y) {
                    let mut e = es.clone();
                    e.push((*x, y, b));
                    if !e.ends_with(&w) {
                        next.push((y, e));
                    }
                }
            }
        }
        out.push(next.len() as u128);
        paths = next;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EscapeReport {
    /// `h[n]`: avoiding paths with `n` edges.
    pub h: Vec<u128>,
    /// `h(n_max) / h(n_max - 1)`.
    pub lambda: f64,
    pub theta: f64,
    /// `ln(θ / λ)`.
    pub rate: f64,
    /// Symbol word of the hole and its multiplicity.
    pub word: Word,
    pub multiplicity: u128,
    /// `τ[n]`: weighted count of length-`n` words avoiding the hole's symbol word.
    pub tau: Vec<u128>,
    /// `τ(N) / τ(N - 1)` at `N = n_max + p - 1`.
    pub theta_w: f64,
    /// `h(n - p + 1) = τ(n)` for all compared `n`; checked only when the multiplicity is 1.
    pub identity: Option<bool>,
}

// The spec with the word added to the forbidden collection, keeping both collections reduced.
fn forbid_word(spec: &ShiftSpec, w: &Word) -> Result<ShiftSpec, MeasureError> {
    let mut f: Vec<Word> = spec.forbidden().iter().filter(|a| !a.contains(w.symbols())).cloned().collect();
    f.push(w.clone());
    let r = spec.repeated().iter().filter(|(r, _)| !r.contains(w.symbols())).cloned().collect();
    Ok(ShiftSpec::new(spec.alphabet().clone(), f, r)?)
}

/// Escape-rate estimates for the hole `W` from path counts up to `n_max` edges.
pub fn escape_rate(spec: &ShiftSpec, hole: &Cylinder, n_max: usize, budget: &Budget) -> Result<EscapeReport, MeasureError> {
    if n_max < 1 {
        return Err(MeasureError::Precondition("n_max must be at least 1".into()));
    }
    let a = spectral::build_adjacency(spec)?;
    let h = avoiding_path_counts(&a, hole, n_max)?;
    let ratio = |v: &[u128], n: usize| if v[n - 1] == 0 { 0.0 } else { v[n] as f64 / v[n - 1] as f64 };
    let lambda = ratio(&h, n_max);
    let theta = if a.is_irreducible() { spectral::power_iteration(&a)?.theta } else { spectral::perron_root(spec)? };
    let word = hole.symbol_word(&a);
    let multiplicity = spec.multiplicity(word.symbols())?;
    let p = spec.p();
    let big_n = n_max + p - 1;
    let tau = oracle_table(&forbid_word(spec, &word)?, big_n, budget)?.f;
    let theta_w = ratio(&tau, big_n);
    let identity = (multiplicity == 1).then(|| (p..=big_n).all(|n| h[n - p + 1] == tau[n]));
    Ok(EscapeReport { h, lambda, theta, rate: (theta / lambda).ln(), word, multiplicity, tau, theta_w, identity })
}
