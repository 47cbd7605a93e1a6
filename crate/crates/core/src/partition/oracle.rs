use super::{enumerate_support, ProblemSpec, SizeIndex};
use crate::error::Result;
use crate::scalar::Weight;

/// `x^s / s!`.
pub fn monomial_term<W: Weight>(s: &SizeIndex, x: &[W]) -> W {
    let mut t = W::one();
    for (i, &m) in s.0.iter().enumerate() {
        for r in 1..=m {
            t = t * x[i].clone() / W::int(r as i64);
        }
    }
    t
}

/// Brute-force `Σ_{s ∈ support} x^s / s!`.
pub fn oracle_z<W: Weight>(spec: &ProblemSpec, x: &[W]) -> Result<W> {
    spec.check_len(x)?;
    Ok(enumerate_support(spec)?.iter().fold(W::zero(), |acc, s| acc + monomial_term(s, x)))
}
