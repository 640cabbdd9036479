//! Word combinatorics: correlations, tail correlations, overlap counts, the
//! star product and subword counting.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratfield::Poly;
use crate::scalar::Scalar;

/// Index of a symbol in its alphabet's declared order.
pub type Sym = u16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("words must be non-empty")]
    Empty,
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("duplicate alphabet symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("cannot split {word:?} into symbols of the alphabet")]
    UnknownSymbol { word: String },
    #[error("words have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("tail length {alpha} outside 1..={len}")]
    TailOutOfRange { alpha: usize, len: usize },
}

/// Ordered list of opaque symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = WordError;
    fn try_from(symbols: Vec<String>) -> Result<Self, WordError> {
        Alphabet::new(symbols)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(WordError::UnknownSymbol { word: s.clone() });
            }
            if symbols[..i].contains(s) {
                return Err(WordError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// `{0, 1, …, q-1}` written as decimal digits.
    pub fn digits(q: usize) -> Self {
        Alphabet::new((0..q).map(|i| i.to_string())).expect("q >= 1")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Whitespace-separated tokens, or else greedy longest-match splitting.
    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let err = || WordError::UnknownSymbol { word: text.to_string() };
        let text = text.trim();
        let mut out = Vec::new();
        if text.contains(char::is_whitespace) {
            for tok in text.split_whitespace() {
                out.push(self.index_of(tok).ok_or_else(err)?);
            }
        } else {
            let mut rest = text;
            while !rest.is_empty() {
                let (i, len) = self
                    .symbols
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| rest.starts_with(s.as_str()))
                    .map(|(i, s)| (i, s.len()))
                    .max_by_key(|&(_, l)| l)
                    .ok_or_else(err)?;
                out.push(i as Sym);
                rest = &rest[len..];
            }
        }
        Word::new(out)
    }

    fn index_of(&self, tok: &str) -> Option<Sym> {
        self.symbols.iter().position(|s| s == tok).map(|i| i as Sym)
    }

    pub fn render(&self, w: &[Sym]) -> String {
        let sep = if self.symbols.iter().all(|s| s.chars().count() == 1) { "" } else { " " };
        w.iter().map(|&s| self.symbols[s as usize].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// All words of length `n` in lexicographic order.
    pub fn all_words(&self, n: usize) -> Vec<Word> {
        let q = self.len();
        let mut out = Vec::new();
        let mut cur = vec![0 as Sym; n];
        if n == 0 {
            return out;
        }
        loop {
            out.push(Word(cur.clone()));
            let mut k = n;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if (cur[k] as usize) + 1 < q {
                    cur[k] += 1;
                    for c in cur.iter_mut().skip(k + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }
}

/// Non-empty finite sequence of symbols; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Sym>);

impl Word {
    pub fn new(symbols: Vec<Sym>) -> Result<Self, WordError> {
        if symbols.is_empty() {
            Err(WordError::Empty)
        } else {
            Ok(Word(symbols))
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.0
    }

    /// The word without its first symbol; `None` for a single symbol.
    pub fn tail(&self) -> Option<Word> {
        (self.0.len() > 1).then(|| Word(self.0[1..].to_vec()))
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix(&self, n: usize) -> Word {
        Word(self.0[self.0.len() - n..].to_vec())
    }

    pub fn push(&self, s: Sym) -> Word {
        let mut v = self.0.clone();
        v.push(s);
        Word(v)
    }

    pub fn contains(&self, r: &[Sym]) -> bool {
        subword_count(&self.0, r) > 0
    }
}

impl AsRef<[Sym]> for Word {
    fn as_ref(&self) -> &[Sym] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(if self.0.iter().all(|&x| x < 10) { "" } else { "," }))
    }
}

/// Correlation bits of `(u, v)`: bit `i` is set when `v`, placed under `u`
/// starting at `u[i]`, agrees with `u` on the overlap.
pub fn correlate(u: &[Sym], v: &[Sym]) -> Vec<bool> {
    (0..u.len())
        .map(|i| {
            let l = (u.len() - i).min(v.len());
            u[i..i + l] == v[..l]
        })
        .collect()
}

/// Overlap positions `t`, counted from the right end of `u`, in decreasing order.
pub fn overlap_positions(u: &[Sym], v: &[Sym]) -> Vec<usize> {
    correlate(u, v)
        .into_iter()
        .enumerate()
        .filter(|&(_, b)| b)
        .map(|(i, _)| u.len() - i)
        .collect()
}

/// `Σ z^{t-1}` over overlap positions `t`.
pub fn correlation_poly<T: Scalar>(u: &[Sym], v: &[Sym]) -> Poly<T> {
    positions_poly(overlap_positions(u, v).into_iter())
}

/// Correlation polynomial keeping only positions `t <= alpha`.
pub fn tail_correlation_poly<T: Scalar>(u: &[Sym], v: &[Sym], alpha: usize) -> Result<Poly<T>, WordError> {
    if alpha == 0 || alpha > u.len() {
        return Err(WordError::TailOutOfRange { alpha, len: u.len() });
    }
    Ok(positions_poly(overlap_positions(u, v).into_iter().filter(|&t| t <= alpha)))
}

fn positions_poly<T: Scalar>(ts: impl Iterator<Item = usize>) -> Poly<T> {
    ts.fold(Poly::zero(), |acc, t| &acc + &Poly::monomial(T::one(), t - 1))
}

/// Occurrences of `r` inside `a` other than a terminal one.
pub fn gamma(a: &[Sym], r: &[Sym]) -> usize {
    gamma_t(a, r, 0)
}

/// Overlap positions of `(a, r)` strictly greater than `max(|r|, t)`.
pub fn gamma_t(a: &[Sym], r: &[Sym], t: usize) -> usize {
    let bound = r.len().max(t);
    overlap_positions(a, r).into_iter().filter(|&al| al > bound).count()
}

/// `X*Y`: defined when `X` without its first symbol equals `Y` without its last.
pub fn star(x: &[Sym], y: &[Sym]) -> Result<Option<Word>, WordError> {
    if x.len() != y.len() {
        return Err(WordError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(WordError::Empty);
    }
    if x[1..] != y[..y.len() - 1] {
        return Ok(None);
    }
    let mut v = x.to_vec();
    v.push(*y.last().expect("non-empty"));
    Ok(Some(Word(v)))
}

/// No word is a subword of a different word of the collection.
pub fn is_reduced<W: AsRef<[Sym]>>(words: &[W]) -> bool {
    words.iter().enumerate().all(|(i, a)| {
        words.iter().enumerate().all(|(j, b)| {
            let (a, b) = (a.as_ref(), b.as_ref());
            i == j || a == b || subword_count(b, a) == 0
        })
    })
}

/// Starting positions of `r` in `w`, overlaps included.
pub fn subword_count(w: &[Sym], r: &[Sym]) -> usize {
    if r.is_empty() || r.len() > w.len() {
        return 0;
    }
    w.windows(r.len()).filter(|win| *win == r).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QPoly;

    fn w(s: &str) -> Vec<Sym> {
        s.bytes().map(|b| (b - b'0') as Sym).collect()
    }

    #[test]
    fn correlation_bits() {
        let b = |v: Vec<bool>| v.into_iter().map(u8::from).collect::<Vec<_>>();
        assert_eq!(b(correlate(&w("210210"), &w("2102"))), vec![1, 0, 0, 1, 0, 0]);
        assert_eq!(b(correlate(&w("2102"), &w("210210"))), vec![1, 0, 0, 1]);
        assert!(correlate(&w("0110"), &w("0110"))[0]);
    }

    #[test]
    fn correlation_polys() {
        assert_eq!(correlation_poly::<crate::Rational>(&w("210210"), &w("2102")), QPoly::from_ints(&[0, 0, 1, 0, 0, 1]));
        assert_eq!(correlation_poly::<crate::Rational>(&w("000"), &w("000")), QPoly::from_ints(&[1, 1, 1]));
        assert_eq!(correlation_poly::<crate::Rational>(&w("010"), &w("010")), QPoly::from_ints(&[1, 0, 1]));
    }

    #[test]
    fn tail_correlations() {
        let t = |u: &str, v: &str, a| tail_correlation_poly::<crate::Rational>(&w(u), &w(v), a).unwrap();
        assert_eq!(t("210210", "2102", 4), QPoly::from_ints(&[0, 0, 1]));
        assert_eq!(t("2102", "210210", 2), QPoly::from_ints(&[1]));
        assert_eq!(t("210210", "2102", 6), correlation_poly(&w("210210"), &w("2102")));
        assert!(tail_correlation_poly::<crate::Rational>(&w("01"), &w("1"), 3).is_err());
        assert!(tail_correlation_poly::<crate::Rational>(&w("01"), &w("1"), 0).is_err());
    }

    #[test]
    fn gamma_counts() {
        assert_eq!(gamma(&w("001"), &w("00")), 1);
        assert_eq!(gamma(&w("0100"), &w("01")), 1);
        assert_eq!(gamma(&w("010"), &w("000")), 0);
        assert_eq!(gamma_t(&w("001"), &w("00"), 1), 1);
        assert_eq!(gamma_t(&w("001"), &w("00"), 3), 0);
        assert_eq!(gamma_t(&w("0101"), &w("01"), 4), 0);
    }

    #[test]
    fn star_product() {
        assert_eq!(star(&w("01"), &w("11")).unwrap(), Some(Word(w("011"))));
        assert_eq!(star(&w("01"), &w("00")).unwrap(), None);
        assert_eq!(star(&w("0"), &w("1")).unwrap(), Some(Word(w("01"))));
        assert!(star(&w("0"), &w("11")).is_err());
    }

    #[test]
    fn reducedness() {
        assert!(is_reduced(&[w("010"), w("101"), w("111")]));
        assert!(!is_reduced(&[w("00"), w("000")]));
        assert!(!is_reduced(&[w("001"), w("00")]));
    }

    #[test]
    fn subword_counts() {
        assert_eq!(subword_count(&w("000"), &w("00")), 2);
        assert_eq!(subword_count(&w("1010"), &w("01")), 1);
        assert_eq!(subword_count(&w("01"), &w("010")), 0);
    }

    #[test]
    fn alphabet_parsing() {
        let a = Alphabet::new(["a", "b", "ab"]).unwrap();
        assert_eq!(a.parse("abab").unwrap().symbols(), &[2, 2]);
        assert_eq!(a.parse("a b ab").unwrap().symbols(), &[0, 1, 2]);
        assert!(a.parse("abc").is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["0", "0"]).is_err());
        let d = Alphabet::digits(2);
        assert_eq!(d.render(d.parse("0110").unwrap().symbols()), "0110");
        let all = d.all_words(3);
        assert_eq!(all.len(), 8);
        assert!(all.windows(2).all(|p| p[0] < p[1]));
    }
}
