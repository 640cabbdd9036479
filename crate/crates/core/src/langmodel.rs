//! The generalized language: multiplicities, exact enumeration of allowed
//! words, and brute-force counters used as an oracle for the generating
//! functions.

use std::fmt;

use thiserror::Error;

use crate::words::{self, Alphabet, Sym, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("{0} collection is not reduced")]
    NotReduced(&'static str),
    #[error("word {0} listed twice")]
    Duplicate(String),
    #[error("single symbols cannot be forbidden ({0})")]
    ForbiddenSymbol(String),
    #[error("repeated word {repeated} contains forbidden word {forbidden}")]
    RepeatedContainsForbidden { repeated: String, forbidden: String },
    #[error("multiplicity of {word} is {m}, must be at least 2")]
    Multiplicity { word: String, m: u64 },
    #[error("enumeration budget of {limit} exceeded")]
    Budget { limit: u64 },
    #[error("integer overflow while counting")]
    Overflow,
    #[error("word {0} is forbidden")]
    Forbidden(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Alphabet with a forbidden collection and a repeated collection carrying multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpec {
    alphabet: Alphabet,
    forbidden: Vec<Word>,
    repeated: Vec<(Word, u64)>,
    p: usize,
    union_reduced: bool,
}

impl ShiftSpec {
    /// Validates the collections and derives the block length and reducedness of the union.
    pub fn new(alphabet: Alphabet, forbidden: Vec<Word>, repeated: Vec<(Word, u64)>) -> Result<Self, LangError> {
        let q = alphabet.len();
        let check_syms = |w: &Word| {
            if w.symbols().iter().any(|&s| s as usize >= q) {
                Err(LangError::Word(WordError::UnknownSymbol { word: w.to_string() }))
            } else {
                Ok(())
            }
        };
        for a in &forbidden {
            check_syms(a)?;
            if a.len() == 1 {
                return Err(LangError::ForbiddenSymbol(alphabet.render(a.symbols())));
            }
        }
        for (r, m) in &repeated {
            check_syms(r)?;
            if *m < 2 {
                return Err(LangError::Multiplicity { word: alphabet.render(r.symbols()), m: *m });
            }
        }
        let rwords: Vec<&Word> = repeated.iter().map(|(r, _)| r).collect();
        for (i, w) in forbidden.iter().enumerate() {
            if forbidden[..i].contains(w) {
                return Err(LangError::Duplicate(alphabet.render(w.symbols())));
            }
        }
        for (i, w) in rwords.iter().enumerate() {
            if rwords[..i].contains(w) {
                return Err(LangError::Duplicate(alphabet.render(w.symbols())));
            }
        }
        if !words::is_reduced(&forbidden) {
            return Err(LangError::NotReduced("forbidden"));
        }
        if !words::is_reduced(&rwords) {
            return Err(LangError::NotReduced("repeated"));
        }
        for r in &rwords {
            if let Some(a) = forbidden.iter().find(|a| r.contains(a.symbols())) {
                return Err(LangError::RepeatedContainsForbidden {
                    repeated: alphabet.render(r.symbols()),
                    forbidden: alphabet.render(a.symbols()),
                });
            }
        }
        let all: Vec<&Word> = forbidden.iter().chain(rwords.iter().copied()).collect();
        let union_reduced = words::is_reduced(&all);
        let p = all.iter().map(|w| w.len()).max().unwrap_or(0).max(2);
        Ok(ShiftSpec { alphabet, forbidden, repeated, p, union_reduced })
    }

    /// Parses words written over the alphabet's symbols.
    pub fn parse(symbols: &[&str], forbidden: &[&str], repeated: &[(&str, u64)]) -> Result<Self, LangError> {
        let alphabet = Alphabet::new(symbols.iter().copied())?;
        let f = forbidden.iter().map(|s| alphabet.parse(s)).collect::<Result<_, _>>()?;
        let r = repeated
            .iter()
            .map(|(s, m)| alphabet.parse(s).map(|w| (w, *m)))
            .collect::<Result<_, _>>()?;
        Self::new(alphabet, f, r)
    }

    /// Binary-digit alphabet `0..q`.
    pub fn digits(q: usize, forbidden: &[&str], repeated: &[(&str, u64)]) -> Result<Self, LangError> {
        let syms: Vec<String> = (0..q).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = syms.iter().map(String::as_str).collect();
        Self::parse(&refs, forbidden, repeated)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn q(&self) -> usize {
        self.alphabet.len()
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    pub fn repeated(&self) -> &[(Word, u64)] {
        &self.repeated
    }

    /// Length of the longest word of the collections, at least 2.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn union_reduced(&self) -> bool {
        self.union_reduced
    }

    pub fn render(&self, w: &[Sym]) -> String {
        self.alphabet.render(w)
    }

    pub fn is_allowed(&self, w: &[Sym]) -> bool {
        !self.forbidden.iter().any(|a| words::subword_count(w, a.symbols()) > 0)
    }

    /// `m(w)`: zero for forbidden words, else the product of `m_j` over occurrences of each `r_j`.
    pub fn multiplicity(&self, w: &[Sym]) -> Result<u128, LangError> {
        if !self.is_allowed(w) {
            return Ok(0);
        }
        self.repeated_product(w)
    }

    fn repeated_product(&self, w: &[Sym]) -> Result<u128, LangError> {
        let mut m: u128 = 1;
        for (r, mr) in &self.repeated {
            let n = words::subword_count(w, r.symbols());
            let f = (*mr as u128).checked_pow(n as u32).ok_or(LangError::Overflow)?;
            m = m.checked_mul(f).ok_or(LangError::Overflow)?;
        }
        Ok(m)
    }

    /// Weight of a word whose only forbidden occurrence is a terminal `a`.
    pub fn forbidden_end_multiplicity(&self, w: &[Sym], a: &[Sym]) -> Result<u128, LangError> {
        if !w.ends_with(a) || !self.forbidden.iter().any(|f| f.symbols() == a) {
            return Err(LangError::Precondition(format!(
                "{} does not end with forbidden word {}",
                self.render(w),
                self.render(a)
            )));
        }
        if !self.is_allowed(&w[..w.len() - 1]) {
            return Err(LangError::Precondition(format!(
                "{} has a forbidden occurrence before its end",
                self.render(w)
            )));
        }
        Ok(self.repeated_product(w)? / self.repeated_product(a)?)
    }

    /// `m(v) / m(v without its first symbol)`.
    pub fn k_value(&self, v: &[Sym]) -> Result<u128, LangError> {
        if v.len() < 2 {
            return Err(LangError::Precondition("k(v) needs |v| >= 2".into()));
        }
        let m = self.multiplicity(v)?;
        if m == 0 {
            return Err(LangError::Forbidden(self.render(v)));
        }
        Ok(m / self.multiplicity(&v[1..])?)
    }

    /// Same forbidden collection; repeated collection replaced by all allowed
    /// length-`p` words starting with a repeated word, each weighted by `k`.
    pub fn extend_r_tilde(&self) -> Result<ShiftSpec, LangError> {
        if self.repeated.iter().all(|(r, _)| r.len() == self.p) {
            return Ok(self.clone());
        }
        let mut rt = Vec::new();
        for (w, _) in enumerate_slice(self, self.p, &Budget::default())?.entries {
            if self.repeated.iter().any(|(r, _)| w.symbols().starts_with(r.symbols())) {
                let k = self.k_value(w.symbols())?;
                rt.push((w, k as u64));
            }
        }
        let mut out = ShiftSpec::new(self.alphabet.clone(), self.forbidden.clone(), rt)?;
        out.p = self.p;
        Ok(out)
    }

    /// Same spec with every word reversed.
    pub fn reversed(&self) -> ShiftSpec {
        let rev = |w: &Word| Word::new(w.symbols().iter().rev().copied().collect()).expect("non-empty");
        ShiftSpec {
            alphabet: self.alphabet.clone(),
            forbidden: self.forbidden.iter().map(rev).collect(),
            repeated: self.repeated.iter().map(|(r, m)| (rev(r), *m)).collect(),
            p: self.p,
            union_reduced: self.union_reduced,
        }
    }
}

impl fmt::Display for ShiftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fs: Vec<String> = self.forbidden.iter().map(|a| self.render(a.symbols())).collect();
        let rs: Vec<String> = self.repeated.iter().map(|(r, m)| format!("{}({m})", self.render(r.symbols()))).collect();
        write!(f, "q={} F={{{}}} R={{{}}}", self.q(), fs.join(","), rs.join(","))
    }
}

/// Caps on enumeration work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Search-tree nodes visited by depth-first enumeration.
    pub max_nodes: u64,
    /// Raw strings scanned by the exhaustive counters.
    pub max_raw: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: 1 << 26, max_raw: 1 << 24 }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes, ..Budget::default() }
    }
}

/// Allowed words of one length with their multiplicities, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageSlice {
    pub n: usize,
    pub entries: Vec<(Word, u128)>,
    pub cardinality: u128,
}

// Depth-first walk over allowed words up to `n_max`, carrying m(w).
// `visit` sees every allowed word; `on_forbidden` every one-symbol extension
// that completes a forbidden word (with its index and the word's repeated product).
fn walk(
    spec: &ShiftSpec,
    n_max: usize,
    budget: &Budget,
    visit: &mut dyn FnMut(&[Sym], u128) -> Result<(), LangError>,
    on_forbidden: &mut dyn FnMut(&[Sym], usize, u128) -> Result<(), LangError>,
) -> Result<(), LangError> {
    let mut nodes: u64 = 0;
    let mut stack: Vec<Sym> = Vec::with_capacity(n_max);
    descend(spec, n_max, budget, &mut nodes, &mut stack, 1, visit, on_forbidden)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    spec: &ShiftSpec,
    n_max: usize,
    budget: &Budget,
    nodes: &mut u64,
    stack: &mut Vec<Sym>,
    m: u128,
    visit: &mut dyn FnMut(&[Sym], u128) -> Result<(), LangError>,
    on_forbidden: &mut dyn FnMut(&[Sym], usize, u128) -> Result<(), LangError>,
) -> Result<(), LangError> {
    if stack.len() == n_max {
        return Ok(());
    }
    for s in 0..spec.q() as Sym {
        *nodes += 1;
        if *nodes > budget.max_nodes {
            return Err(LangError::Budget { limit: budget.max_nodes });
        }
        stack.push(s);
        let mut m2 = m;
        for (r, mr) in spec.repeated() {
            if stack.ends_with(r.symbols()) {
                m2 = m2.checked_mul(*mr as u128).ok_or(LangError::Overflow)?;
            }
        }
        if let Some(i) = spec.forbidden().iter().position(|a| stack.ends_with(a.symbols())) {
            on_forbidden(stack, i, m2)?;
        } else {
            visit(stack, m2)?;
            descend(spec, n_max, budget, nodes, stack, m2, visit, on_forbidden)?;
        }
        stack.pop();
    }
    Ok(())
}

/// `Λ_n`: allowed words of length `n` with multiplicities.
pub fn enumerate_slice(spec: &ShiftSpec, n: usize, budget: &Budget) -> Result<LanguageSlice, LangError> {
    let mut entries = Vec::new();
    let mut card: u128 = 0;
    walk(
        spec,
        n,
        budget,
        &mut |w, m| {
            if w.len() == n {
                entries.push((Word::new(w.to_vec())?, m));
                card = card.checked_add(m).ok_or(LangError::Overflow)?;
            }
            Ok(())
        },
        &mut |_, _, _| Ok(()),
    )?;
    Ok(LanguageSlice { n, entries, cardinality: card })
}

/// Oracle counts for `0 <= n <= n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable {
    /// `f(n) = |Λ_n|`, with `f(0) = 1`.
    pub f: Vec<u128>,
    /// `g[j][n]`: weight of allowed words ending with the `j`-th repeated word.
    pub g: Vec<Vec<u128>>,
    /// `fa[i][n]`: weight of words whose only forbidden occurrence is a terminal `i`-th forbidden word.
    pub fa: Vec<Vec<u128>>,
}

/// Counts by depth-first extension of allowed words.
pub fn oracle_table(spec: &ShiftSpec, n_max: usize, budget: &Budget) -> Result<OracleTable, LangError> {
    let mut f = vec![0u128; n_max + 1];
    let mut g = vec![vec![0u128; n_max + 1]; spec.repeated().len()];
    let mut fa = vec![vec![0u128; n_max + 1]; spec.forbidden().len()];
    f[0] = 1;
    let add = |x: &mut u128, y: u128| -> Result<(), LangError> {
        *x = x.checked_add(y).ok_or(LangError::Overflow)?;
        Ok(())
    };
    let ends: Vec<u128> = spec
        .forbidden()
        .iter()
        .map(|a| spec.repeated_product(a.symbols()))
        .collect::<Result<_, _>>()?;
    walk(
        spec,
        n_max,
        budget,
        &mut |w, m| {
            let n = w.len();
            add(&mut f[n], m)?;
            for (j, (r, _)) in spec.repeated().iter().enumerate() {
                if w.ends_with(r.symbols()) {
                    add(&mut g[j][n], m)?;
                }
            }
            Ok(())
        },
        &mut |w, i, m| add(&mut fa[i][w.len()], m / ends[i]),
    )?;
    Ok(OracleTable { f, g, fa })
}

/// `f(n)`.
pub fn f_oracle(spec: &ShiftSpec, n: usize, budget: &Budget) -> Result<u128, LangError> {
    Ok(oracle_table(spec, n, budget)?.f[n])
}

/// `g_r(n)` for the `j`-th repeated word.
pub fn g_oracle(spec: &ShiftSpec, j: usize, n: usize, budget: &Budget) -> Result<u128, LangError> {
    Ok(oracle_table(spec, n, budget)?.g[j][n])
}

/// `f_a(n)` for the `i`-th forbidden word.
pub fn f_a_oracle(spec: &ShiftSpec, i: usize, n: usize, budget: &Budget) -> Result<u128, LangError> {
    Ok(oracle_table(spec, n, budget)?.fa[i][n])
}

/// The same table by scanning every string of every length; reference semantics.
pub fn oracle_table_scan(spec: &ShiftSpec, n_max: usize, budget: &Budget) -> Result<OracleTable, LangError> {
    let q = spec.q();
    let mut f = vec![0u128; n_max + 1];
    let mut g = vec![vec![0u128; n_max + 1]; spec.repeated().len()];
    let mut fa = vec![vec![0u128; n_max + 1]; spec.forbidden().len()];
    f[0] = 1;
    for n in 1..=n_max {
        let total = (q as u64).checked_pow(n as u32).filter(|&t| t <= budget.max_raw);
        if total.is_none() {
            return Err(LangError::Budget { limit: budget.max_raw });
        }
        for w in spec.alphabet().all_words(n) {
            let w = w.symbols();
            let m = spec.multiplicity(w)?;
            if m > 0 {
                f[n] += m;
                for (j, (r, _)) in spec.repeated().iter().enumerate() {
                    if w.ends_with(r.symbols()) {
                        g[j][n] += m;
                    }
                }
            } else {
                for (i, a) in spec.forbidden().iter().enumerate() {
                    if w.ends_with(a.symbols()) && spec.is_allowed(&w[..n - 1]) {
                        fa[i][n] += spec.forbidden_end_multiplicity(w, a.symbols())?;
                    }
                }
            }
        }
    }
    Ok(OracleTable { f, g, fa })
}
