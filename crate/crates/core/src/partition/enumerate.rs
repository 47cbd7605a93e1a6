use super::{ProblemSpec, SizeIndex};
use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 10_000_000;

/// Every size index of the (restricted) support, lexicographically ascending.
pub fn enumerate_support(spec: &ProblemSpec) -> Result<Vec<SizeIndex>> {
    enumerate_support_capped(spec, DEFAULT_CAP)
}

pub fn enumerate_support_capped(spec: &ProblemSpec, cap: usize) -> Result<Vec<SizeIndex>> {
    let mut out = Vec::new();
    if !spec.support_nonempty() {
        return Ok(out);
    }
    let mut s = vec![0u64; spec.len()];
    walk(spec.hi(), spec.lo(), spec.n, spec.k, &mut s, &mut out, cap)?;
    out.sort();
    Ok(out)
}

/// Parts are placed in nonincreasing order, largest first.
fn walk(
    max_part: usize,
    lo: usize,
    rest: usize,
    blocks: usize,
    s: &mut Vec<u64>,
    out: &mut Vec<SizeIndex>,
    cap: usize,
) -> Result<()> {
    if blocks == 0 {
        if rest == 0 {
            if out.len() == cap {
                return Err(Error::Capacity { cap });
            }
            out.push(SizeIndex(s.clone()));
        }
        return Ok(());
    }
    if rest < lo * blocks {
        return Ok(());
    }
    let top = max_part.min(rest + lo - lo * blocks);
    for p in (lo..=top).rev() {
        if p * blocks < rest {
            break;
        }
        s[p - 1] += 1;
        walk(p, lo, rest - p, blocks - 1, s, out, cap)?;
        s[p - 1] -= 1;
    }
    Ok(())
}

/// Partitions of `n` into exactly `k` parts: `p(n,k) = p(n-1,k-1) + p(n-k,k)`.
pub fn partition_count(n: usize, k: usize) -> u128 {
    let mut t = vec![vec![0u128; k + 1]; n + 1];
    t[0][0] = 1;
    for m in 1..=n {
        for j in 1..=k.min(m) {
            t[m][j] = t[m - 1][j - 1] + t[m - j][j];
        }
    }
    t[n][k]
}
