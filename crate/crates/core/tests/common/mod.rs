#![allow(dead_code)]

use edgeshift::langmodel::ShiftSpec;
use proptest::prelude::*;
use rand::Rng;

pub fn spec(q: usize, f: &[&str], r: &[(&str, u64)]) -> ShiftSpec {
    ShiftSpec::digits(q, f, r).unwrap()
}

fn word(rng: &mut impl Rng, q: usize, lo: usize, hi: usize) -> String {
    let n = rng.gen_range(lo..=hi);
    (0..n).map(|_| char::from(b'0' + rng.gen_range(0..q) as u8)).collect()
}

/// Random valid spec: q <= 3, |F|+|R| <= 4, lengths <= 4, multiplicities <= 4.
pub fn random_spec(rng: &mut impl Rng) -> ShiftSpec {
    loop {
        let q = rng.gen_range(2..=3);
        let total = rng.gen_range(1..=4);
        let nf = rng.gen_range(0..=total);
        let f: Vec<String> = (0..nf).map(|_| word(rng, q, 2, 4)).collect();
        let r: Vec<(String, u64)> = (nf..total).map(|_| (word(rng, q, 1, 4), rng.gen_range(2..=4))).collect();
        let fr: Vec<&str> = f.iter().map(String::as_str).collect();
        let rr: Vec<(&str, u64)> = r.iter().map(|(w, m)| (w.as_str(), *m)).collect();
        if let Ok(s) = ShiftSpec::digits(q, &fr, &rr) {
            return s;
        }
    }
}

/// Random spec whose union is reduced (`Some(true)`), not reduced (`Some(false)`), or either.
pub fn random_spec_with(rng: &mut impl Rng, reduced: Option<bool>) -> ShiftSpec {
    loop {
        let s = random_spec(rng);
        if reduced.is_none_or(|want| s.union_reduced() == want) {
            return s;
        }
    }
}

pub fn arb_spec() -> impl Strategy<Value = ShiftSpec> {
    any::<u64>().prop_map(|seed| {
        use rand::SeedableRng;
        random_spec(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    })
}
