//! Adjacency matrix of the multigraph edge shift and its Perron data.
//!
//! The Perron root comes from the generating functions and is cross-checked
//! by power iteration. Eigenvectors come from correlation formulas evaluated
//! at an exact rational point: the root itself when it is rational, otherwise
//! the midpoint of its isolating interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::genfun::{self, GenFunError};
use crate::langmodel::{enumerate_slice, oracle_table, Budget, LangError, LanguageSlice, ShiftSpec};
use crate::ratfield::{largest_real_root, AlgebraError, Poly, RatFun, RatMat, RootCertificate};
use crate::scalar::rational_to_f64;
use crate::words::{self, Sym, Word, WordError};

/// Agreement required between the two routes to the Perron root.
pub const ROUTE_TOL: f64 = 1e-9;
const POWER_TOL: f64 = 1e-12;
const POWER_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    GenFun(#[from] GenFunError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no allowed words of length {0}")]
    Empty(usize),
    #[error("adjacency matrix is not irreducible ({0} strongly connected components)")]
    Reducible(usize),
    #[error("Perron root routes disagree: combinatorial {comb}, power iteration {power}")]
    RouteDisagreement { comb: f64, power: f64 },
    #[error("power iteration did not converge in {0} steps")]
    NoConvergence(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("integer overflow in matrix power")]
    Overflow,
}

/// Non-negative integer matrix indexed by the allowed words of length `p - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjMatrix {
    pub labels: Vec<Word>,
    pub entries: Vec<Vec<u128>>,
}

impl AdjMatrix {
    pub fn new(labels: Vec<Word>, entries: Vec<Vec<u128>>) -> Self {
        assert!(entries.len() == labels.len() && entries.iter().all(|r| r.len() == labels.len()));
        AdjMatrix { labels, entries }
    }

    /// Unlabelled square matrix; labels are the single symbols `0..n`.
    pub fn from_rows(entries: Vec<Vec<u128>>) -> Self {
        let labels = (0..entries.len()).map(|i| Word::new(vec![i as Sym]).expect("non-empty")).collect();
        Self::new(labels, entries)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> u128 {
        self.entries[i][j]
    }

    pub fn index_of(&self, w: &[Sym]) -> Option<usize> {
        self.labels.binary_search_by(|l| l.symbols().cmp(w)).ok()
    }

    pub fn row_sums(&self) -> Vec<u128> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> u128 {
        self.row_sums().iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.len();
        let entries = (0..n).map(|i| (0..n).map(|j| self.entries[j][i]).collect()).collect();
        AdjMatrix { labels: self.labels.clone(), entries }
    }

    /// Sum of all entries of `A^k`.
    pub fn power_sum(&self, k: usize) -> Result<u128, SpectralError> {
        let n = self.len();
        let mut v = vec![1u128; n];
        for _ in 0..k {
            let mut next = vec![0u128; n];
            for (i, row) in self.entries.iter().enumerate() {
                for (j, &a) in row.iter().enumerate() {
                    let t = a.checked_mul(v[j]).ok_or(SpectralError::Overflow)?;
                    next[i] = next[i].checked_add(t).ok_or(SpectralError::Overflow)?;
                }
            }
            v = next;
        }
        v.iter().try_fold(0u128, |acc, &x| acc.checked_add(x).ok_or(SpectralError::Overflow))
    }

    fn reach(&self, start: usize, forward: bool) -> Vec<bool> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let e = if forward { self.entries[i][j] } else { self.entries[j][i] };
                if e > 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Strongly connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let f = self.reach(i, true);
            let b = self.reach(i, false);
            let comp: Vec<usize> = (0..n).filter(|&j| f[j] && b[j]).collect();
            for &j in &comp {
                assigned[j] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Strongly connected with at least one cycle.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        if n == 1 {
            return self.entries[0][0] > 0;
        }
        self.reach(0, true).iter().all(|&b| b) && self.reach(0, false).iter().all(|&b| b)
    }

    pub fn submatrix(&self, idx: &[usize]) -> Self {
        AdjMatrix {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            entries: idx.iter().map(|&i| idx.iter().map(|&j| self.entries[i][j]).collect()).collect(),
        }
    }

    pub fn as_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
    }
}

fn labels_of(spec: &ShiftSpec) -> Result<Vec<Word>, SpectralError> {
    let n = spec.p() - 1;
    let slice = enumerate_slice(spec, n, &Budget::default())?;
    if slice.entries.is_empty() {
        return Err(SpectralError::Empty(n));
    }
    Ok(slice.entries.into_iter().map(|(w, _)| w).collect())
}

fn adjacency_by(spec: &ShiftSpec, weight: impl Fn(&[Sym]) -> Result<u128, LangError>) -> Result<AdjMatrix, SpectralError> {
    let labels = labels_of(spec)?;
    let n = labels.len();
    let mut a = AdjMatrix { labels, entries: vec![vec![0; n]; n] };
    for i in 0..n {
        for s in 0..spec.q() as Sym {
            let w = a.labels[i].push(s);
            if !spec.is_allowed(w.symbols()) {
                continue;
            }
            let j = a.index_of(&w.symbols()[1..]).expect("suffix of an allowed word is a label");
            a.entries[i][j] = weight(w.symbols())?;
        }
    }
    Ok(a)
}

/// `A_{XY} = k(X*Y)` on allowed words of length `p`, zero elsewhere.
pub fn build_adjacency(spec: &ShiftSpec) -> Result<AdjMatrix, SpectralError> {
    adjacency_by(spec, |w| spec.k_value(w))
}

/// `Ã_{XY} = m(X*Y)`; equals [`build_adjacency`] when every repeated word has length `p`.
pub fn build_tilde_adjacency(spec: &ShiftSpec) -> Result<AdjMatrix, SpectralError> {
    adjacency_by(spec, |w| spec.multiplicity(w))
}

/// Outcome of power iteration on `A + I`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerEstimate {
    pub theta: f64,
    /// Collatz–Wielandt bracket for `θ`.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    /// Right eigenvector with maximum entry 1.
    pub vector: Vec<f64>,
}

/// Spectral radius by power iteration on the shifted matrix `A + I`.
pub fn power_iteration(a: &AdjMatrix) -> Result<PowerEstimate, SpectralError> {
    let n = a.len();
    if n == 0 {
        return Err(SpectralError::Empty(0));
    }
    let m = a.as_f64();
    let mut x = vec![1.0f64; n];
    for it in 1..=POWER_CAP {
        let y: Vec<f64> = (0..n).map(|i| x[i] + m[i].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()).collect();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            if x[i] > 0.0 {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        let top = y.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / top).collect();
        if hi - lo <= POWER_TOL * hi.max(1.0) {
            return Ok(PowerEstimate { theta: (lo + hi) / 2.0 - 1.0, lo: lo - 1.0, hi: hi - 1.0, iterations: it, vector: x });
        }
    }
    Err(SpectralError::NoConvergence(POWER_CAP))
}

/// Which function's largest real zero certified `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSource {
    /// `z - q + R(z)`.
    ReducedR,
    /// Denominator of `F(z)` from the general system.
    SystemDenominator,
}

/// Certified Perron root together with a polynomial having it as its largest real root.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronRoot {
    pub certificate: RootCertificate,
    pub source: RootSource,
    pub polynomial: Poly<BigRational>,
}

fn bracket(a: &AdjMatrix) -> (BigRational, BigRational) {
    let lo = BigRational::new(BigInt::one(), BigInt::from(2));
    let hi = BigRational::from_integer(BigInt::from(a.row_sums().into_iter().max().unwrap_or(0) + 1));
    (lo, hi)
}

/// Largest real zero of `z - q + R(z)`, or the largest real pole of `F` when
/// the union is not reduced, bracketed by `(1/2, 1 + max row sum]`.
pub fn combinatorial_root(spec: &ShiftSpec, a: &AdjMatrix) -> Result<PerronRoot, SpectralError> {
    let (lo, hi) = bracket(a);
    let (polynomial, source) = if spec.union_reduced() {
        let r = genfun::r_of_z::<BigRational>(spec)?;
        let shifted = RatFun::from_poly(Poly::new(vec![-BigRational::from_integer(BigInt::from(spec.q())), BigRational::one()]));
        ((&shifted + &r).num().clone(), RootSource::ReducedR)
    } else {
        (genfun::solve(spec)?.f.den().clone(), RootSource::SystemDenominator)
    };
    let certificate = largest_real_root(&polynomial, &lo, Some(&hi))?;
    Ok(PerronRoot { certificate, source, polynomial })
}

/// Characteristic polynomial `det(zI - A)` by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &AdjMatrix) -> Poly<BigRational> {
    let n = a.len();
    let q = |x: u128| BigRational::from_integer(BigInt::from(x));
    let am: Vec<Vec<BigRational>> = a.entries.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &x[i][k] * &y[k][j])).collect()).collect()
    };
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mul(&am, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        let am_next = mul(&am, &next);
        let tr = (0..n).fold(BigRational::zero(), |s, i| s + &am_next[i][i]);
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        m = next;
    }
    Poly::new(c)
}

// A non-zero vector of the right kernel of a rational matrix, if any.
fn kernel_vector(mut m: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![BigRational::zero(); cols];
    v[free] = BigRational::one();
    for (i, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[i][free].clone();
    }
    Some(v)
}

/// Perron data of a bare matrix, independent of any spec.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPerron {
    pub certificate: RootCertificate,
    pub polynomial: Poly<BigRational>,
    /// Left and right eigenvectors, exact when the root is rational.
    pub exact: Option<(Vec<BigRational>, Vec<BigRational>)>,
    /// Left and right eigenvectors by power iteration, maximum entry 1.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Perron root as the largest real root of the characteristic polynomial;
/// eigenvectors by exact elimination when the root is rational.
pub fn matrix_perron(a: &AdjMatrix) -> Result<MatrixPerron, SpectralError> {
    if !a.is_irreducible() {
        return Err(SpectralError::Reducible(a.components().len()));
    }
    let (lo, hi) = bracket(a);
    let polynomial = characteristic_polynomial(a);
    let certificate = largest_real_root(&polynomial, &lo, Some(&hi))?;
    let exact = certificate.exact.as_ref().map(|t| {
        let shifted = |tr: bool| -> Vec<Vec<BigRational>> {
            let n = a.len();
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let e = if tr { a.entries[j][i] } else { a.entries[i][j] };
                            let d = BigRational::from_integer(BigInt::from(e));
                            if i == j { d - t } else { d }
                        })
                        .collect()
                })
                .collect()
        };
        let pos = |v: Vec<BigRational>| if v.iter().any(|x| x < &BigRational::zero()) { v.into_iter().map(|x| -x).collect() } else { v };
        let u = pos(kernel_vector(shifted(true)).expect("rational eigenvalue has a kernel"));
        let v = pos(kernel_vector(shifted(false)).expect("rational eigenvalue has a kernel"));
        (u, v)
    });
    let v = power_iteration(a)?.vector;
    let u = power_iteration(&a.transpose())?.vector;
    Ok(MatrixPerron { certificate, polynomial, exact, u, v })
}

/// The point at which formulas in `θ` are evaluated exactly.
pub fn evaluation_point(cert: &RootCertificate) -> BigRational {
    cert.exact.clone().unwrap_or_else(|| (&cert.lo + &cert.hi) / BigRational::from_integer(BigInt::from(2)))
}

/// Eigenvectors from the correlation formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronVectors {
    pub labels: Vec<Word>,
    /// Left eigenvector, unscaled.
    pub u: Vec<BigRational>,
    /// Right eigenvector, unscaled.
    pub v: Vec<BigRational>,
    /// Whether `u`, `v` are the exact eigenvectors (rational `θ`).
    pub exact: bool,
}

impl PerronVectors {
    pub fn u_f64(&self) -> Vec<f64> {
        self.u.iter().map(rational_to_f64).collect()
    }

    pub fn v_f64(&self) -> Vec<f64> {
        self.v.iter().map(rational_to_f64).collect()
    }

    pub fn dot(&self) -> BigRational {
        self.u.iter().zip(&self.v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `(U, V / U^T V)`, so that the pair has `U^T V = 1`.
    pub fn normalized(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let d = self.dot();
        (self.u.clone(), self.v.iter().map(|x| x / &d).collect())
    }
}

fn tail_at(u: &[Sym], v: &[Sym], alpha: usize, x: &BigRational) -> BigRational {
    words::tail_correlation_poly::<BigRational>(u, v, alpha).expect("alpha in range").eval(x)
}

fn weight(m: u64) -> BigRational {
    BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(m))
}

// Row sums of `M(x)^{-1}`, i.e. the solution of `M(x) r = 1`, and optionally
// `r'(x) = -M(x)^{-1} M'(x) r`; elimination happens at the point, never over
// the function field.
fn inverse_row_sums_at(m: &RatMat<BigRational>, x: &BigRational, derivative: bool) -> Result<(Vec<BigRational>, Vec<BigRational>), SpectralError> {
    let n = m.rows();
    let mx = m.eval(x)?;
    let ones = vec![BigRational::one(); n];
    let r = solve_exact(mx.clone(), ones)?;
    if !derivative {
        return Ok((r, Vec::new()));
    }
    let dm = RatMat::from_fn(n, n, |i, j| m.get(i, j).derivative()).eval(x)?;
    let rhs = (0..n)
        .map(|i| -(0..n).fold(BigRational::zero(), |acc, j| acc + &dm[i][j] * &r[j]))
        .collect();
    let dr = solve_exact(mx, rhs)?;
    Ok((r, dr))
}

fn solve_exact(mut m: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>, SpectralError> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).ok_or(AlgebraError::Singular)?;
        m.swap(c, p);
        b.swap(c, p);
        let inv = BigRational::one() / &m[c][c];
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        b[c] *= &inv;
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
                let t = &f * &b[c];
                b[i] -= t;
            }
        }
    }
    Ok(b)
}

/// Left and right Perron vectors, computed on the spec whose repeated words
/// all have length `p` (the spec itself, or its extension).
pub fn perron_vectors(spec: &ShiftSpec, cert: &RootCertificate) -> Result<PerronVectors, SpectralError> {
    let ext = spec.extend_r_tilde()?;
    let labels = labels_of(spec)?;
    let x = evaluation_point(cert);
    let (rv, _) = inverse_row_sums_at(&genfun::build_p::<BigRational>(&ext)?, &x, false)?;
    let (sv, _) = inverse_row_sums_at(&genfun::build_q::<BigRational>(&ext)?, &x, false)?;
    let l = ext.repeated().len();
    let mut u = Vec::with_capacity(labels.len());
    let mut v = Vec::with_capacity(labels.len());
    for lab in &labels {
        let lab = lab.symbols();
        let mut ux = BigRational::zero();
        let mut vx = BigRational::zero();
        for (i, (r, m)) in ext.repeated().iter().enumerate() {
            let r = r.symbols();
            let w = weight(*m);
            ux -= &w * &rv[i] * tail_at(r, lab, r.len() - 1, &x);
            vx -= &w * &sv[i] * words::correlation_poly::<BigRational>(lab, r).eval(&x);
        }
        for (j, a) in ext.forbidden().iter().enumerate() {
            let a = a.symbols();
            ux += &rv[l + j] * tail_at(a, lab, a.len() - 1, &x);
            vx += &sv[l + j] * words::correlation_poly::<BigRational>(lab, a).eval(&x);
        }
        u.push(BigRational::one() + &x * ux);
        v.push(BigRational::one() + &x * vx);
    }
    Ok(PerronVectors { labels, u, v, exact: cert.exact.is_some() })
}

/// `U_X(z)` and `V_X(z)` as rational functions, before evaluation at `θ`.
pub fn vector_functions(spec: &ShiftSpec) -> Result<(Vec<RatFun<BigRational>>, Vec<RatFun<BigRational>>), SpectralError> {
    let ext = spec.extend_r_tilde()?;
    let labels = labels_of(spec)?;
    let rsum = genfun::p_inverse_row_sums::<BigRational>(&ext)?;
    let ssum = genfun::q_inverse_row_sums::<BigRational>(&ext)?;
    let l = ext.repeated().len();
    let zf = RatFun::<BigRational>::z();
    let poly = |p: Poly<BigRational>| RatFun::from_poly(p);
    let mut us = Vec::with_capacity(labels.len());
    let mut vs = Vec::with_capacity(labels.len());
    for lab in &labels {
        let lab = lab.symbols();
        let mut ux = RatFun::zero();
        let mut vx = RatFun::zero();
        for (i, (r, m)) in ext.repeated().iter().enumerate() {
            let r = r.symbols();
            let w = weight(*m);
            let tail = words::tail_correlation_poly::<BigRational>(r, lab, r.len() - 1)?;
            ux = &ux - &(&rsum[i] * &poly(tail)).scale(&w);
            vx = &vx - &(&ssum[i] * &poly(words::correlation_poly(lab, r))).scale(&w);
        }
        for (j, a) in ext.forbidden().iter().enumerate() {
            let a = a.symbols();
            let tail = words::tail_correlation_poly::<BigRational>(a, lab, a.len() - 1)?;
            ux = &ux + &(&rsum[l + j] * &poly(tail));
            vx = &vx + &(&ssum[l + j] * &poly(words::correlation_poly(lab, a)));
        }
        us.push(&RatFun::constant(BigRational::one()) + &(&zf * &ux));
        vs.push(&RatFun::constant(BigRational::one()) + &(&zf * &vx));
    }
    Ok((us, vs))
}

/// `‖A v - θ v‖_∞ / ‖v‖_∞` and `‖u^T A - θ u^T‖_∞ / ‖u‖_∞`.
pub fn eigen_residuals(a: &AdjMatrix, theta: f64, u: &[f64], v: &[f64]) -> (f64, f64) {
    let m = a.as_f64();
    let n = a.len();
    let norm = |x: &[f64]| x.iter().fold(0.0f64, |acc, y| acc.max(y.abs()));
    let right = (0..n)
        .map(|i| (m[i].iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - theta * v[i]).abs())
        .fold(0.0, f64::max);
    let left = (0..n)
        .map(|j| ((0..n).map(|i| u[i] * m[i][j]).sum::<f64>() - theta * u[j]).abs())
        .fold(0.0, f64::max);
    (right / norm(v), left / norm(u))
}

/// `U^T V` against `θ^{p-1} (1 + R'(θ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    pub dot: f64,
    pub formula: f64,
    pub agree: bool,
    /// Both sides as exact rationals when `θ` is rational.
    pub exact: Option<(BigRational, BigRational)>,
    pub property_p: bool,
}

/// Compares the dot product of the eigenvectors with the derivative formula;
/// a disagreement is reported, not raised.
pub fn normalization(spec: &ShiftSpec, vecs: &PerronVectors, cert: &RootCertificate, property_p: bool) -> Result<Normalization, SpectralError> {
    let ext = spec.extend_r_tilde()?;
    let x = evaluation_point(cert);
    let (r, dr) = inverse_row_sums_at(&genfun::build_p::<BigRational>(&ext)?, &x, true)?;
    // R = z c.r with c the combining weights, so R' = c.r + z c.r'
    let c: Vec<BigRational> = ext
        .repeated()
        .iter()
        .map(|(_, m)| weight(*m))
        .chain(ext.forbidden().iter().map(|_| -BigRational::one()))
        .collect();
    let dot = |v: &[BigRational]| c.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
    let d = dot(&r) + &x * dot(&dr);
    let mut pw = BigRational::one();
    for _ in 0..spec.p() - 1 {
        pw *= &x;
    }
    let formula = pw * (BigRational::one() + d);
    let dot = vecs.dot();
    let (df, ff) = (rational_to_f64(&dot), rational_to_f64(&formula));
    Ok(Normalization {
        dot: df,
        formula: ff,
        agree: (df - ff).abs() <= ROUTE_TOL * df.abs().max(1.0),
        exact: vecs.exact.then_some((dot, formula)),
        property_p,
    })
}

/// Words witnessing property (P): `Z` runs from `X` to `Y`, `W` from `Y` to `Y`,
/// both of multiplicity 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyPWitness {
    pub x: Word,
    pub y: Word,
    pub z: Word,
    pub w: Word,
}

/// Breadth-first search over multiplicity-1 words of length at most `bound`
/// (default `3p`) for a loop word `W`; then `X = Y` and `Z = W`. `None` means
/// unknown, including when the node budget runs out.
pub fn property_p_witness(spec: &ShiftSpec, bound: Option<usize>, budget: &Budget) -> Option<PropertyPWitness> {
    let p = spec.p();
    let bound = bound.unwrap_or(3 * p);
    let plain = |w: &[Sym]| {
        spec.is_allowed(w) && !spec.repeated().iter().any(|(r, _)| w.ends_with(r.symbols()))
    };
    let mut frontier: Vec<Vec<Sym>> = vec![vec![]];
    let mut nodes = 0u64;
    for len in 1..=bound {
        let mut next = Vec::new();
        for w in &frontier {
            for s in 0..spec.q() as Sym {
                nodes += 1;
                if nodes > budget.max_nodes {
                    return None;
                }
                let mut e = w.clone();
                e.push(s);
                if !plain(&e) {
                    continue;
                }
                if len >= p && e[..p - 1] == e[len - p + 1..] {
                    let word = Word::new(e).expect("non-empty");
                    let y = word.prefix(p - 1);
                    return Some(PropertyPWitness { x: y.clone(), y, z: word.clone(), w: word });
                }
                next.push(e);
            }
        }
        frontier = next;
    }
    None
}

/// `ln θ` and the finite-length estimate `(1/n) ln |Λ_n|`.
pub fn entropy(theta: f64, slice: &LanguageSlice) -> (f64, f64) {
    let est = if slice.n == 0 || slice.cardinality == 0 {
        f64::NAN
    } else {
        (slice.cardinality as f64).ln() / slice.n as f64
    };
    (theta.ln(), est)
}

/// `f(n)` against the sum of entries of `A^{n-p+1}` for `p <= n <= p + extra`;
/// `None` when some repeated word is shorter than `p`.
pub fn power_sum_check(spec: &ShiftSpec, a: &AdjMatrix, extra: usize, budget: &Budget) -> Result<Option<Vec<(usize, u128, u128)>>, SpectralError> {
    let p = spec.p();
    if spec.repeated().iter().any(|(r, _)| r.len() != p) {
        return Ok(None);
    }
    let table = oracle_table(spec, p + extra, budget)?;
    (p..=p + extra)
        .map(|n| Ok((n, table.f[n], a.power_sum(n - p + 1)?)))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Largest gap between `U` of the spec and `V` of the reversed spec, matched
/// through reversed labels; `None` when some repeated word is shorter than `p`.
pub fn reversal_gap(spec: &ShiftSpec, cert: &RootCertificate) -> Result<Option<f64>, SpectralError> {
    let p = spec.p();
    if spec.repeated().iter().any(|(r, _)| r.len() != p) {
        return Ok(None);
    }
    let fwd = perron_vectors(spec, cert)?;
    let back = perron_vectors(&spec.reversed(), cert)?;
    let mut gap = 0.0f64;
    for (i, lab) in fwd.labels.iter().enumerate() {
        let rev: Vec<Sym> = lab.symbols().iter().rev().copied().collect();
        let j = back.labels.binary_search_by(|l| l.symbols().cmp(&rev[..])).expect("reversed label present");
        gap = gap.max((rational_to_f64(&fwd.u[i]) - rational_to_f64(&back.v[j])).abs());
    }
    Ok(Some(gap))
}

/// Perron root of one strongly connected component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentRoot {
    pub members: Vec<Word>,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralOptions {
    /// Proceed per strongly connected component instead of failing on a reducible matrix.
    pub allow_reducible: bool,
    /// Word length cap for the property (P) search.
    pub property_p_bound: Option<usize>,
    pub budget: Budget,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { allow_reducible: false, property_p_bound: None, budget: Budget::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub adjacency: AdjMatrix,
    pub irreducible: bool,
    pub theta: f64,
    pub certificate: RootCertificate,
    pub source: RootSource,
    pub theta_power: f64,
    pub route_agreement: f64,
    /// Per-component roots; filled only for reducible matrices.
    pub components: Vec<ComponentRoot>,
    pub vectors: Option<PerronVectors>,
    /// Right and left relative residuals of the eigenvectors.
    pub residuals: Option<(f64, f64)>,
    pub normalization: Option<Normalization>,
    pub property_p: Option<PropertyPWitness>,
    pub entropy: f64,
}

/// Full spectral analysis of a spec.
pub fn analyze(spec: &ShiftSpec, opts: &SpectralOptions) -> Result<SpectralReport, SpectralError> {
    let a = build_adjacency(spec)?;
    let irreducible = a.is_irreducible();
    let comps = a.components();
    if !irreducible && !opts.allow_reducible {
        return Err(SpectralError::Reducible(comps.len()));
    }
    let root = combinatorial_root(spec, &a)?;
    let (certificate, source) = (root.certificate.clone(), root.source);
    let theta = certificate.value;
    let (theta_power, components) = if irreducible {
        (power_iteration(&a)?.theta, Vec::new())
    } else {
        let mut roots = Vec::new();
        for c in &comps {
            let sub = a.submatrix(c);
            let t = if sub.is_irreducible() { power_iteration(&sub)?.theta } else { 0.0 };
            roots.push(ComponentRoot { members: sub.labels, theta: t });
        }
        (roots.iter().map(|c| c.theta).fold(0.0, f64::max), roots)
    };
    let route_agreement = (theta - theta_power).abs();
    if route_agreement > ROUTE_TOL * theta.max(1.0) {
        return Err(SpectralError::RouteDisagreement { comb: theta, power: theta_power });
    }
    let property_p = property_p_witness(spec, opts.property_p_bound, &opts.budget);
    let (vectors, residuals, normalization) = if irreducible {
        let vecs = perron_vectors(spec, &certificate)?;
        let res = eigen_residuals(&a, theta, &vecs.u_f64(), &vecs.v_f64());
        let norm = normalization(spec, &vecs, &certificate, property_p.is_some())?;
        (Some(vecs), Some(res), Some(norm))
    } else {
        (None, None, None)
    };
    Ok(SpectralReport {
        adjacency: a,
        irreducible,
        theta,
        certificate,
        source,
        theta_power,
        route_agreement,
        components,
        vectors,
        residuals,
        normalization,
        property_p,
        entropy: theta.ln(),
    })
}

/// `θ` as a float, whichever route; convenience for callers that only need the number.
pub fn perron_root(spec: &ShiftSpec) -> Result<f64, SpectralError> {
    let a = build_adjacency(spec)?;
    Ok(combinatorial_root(spec, &a)?.certificate.value)
}
