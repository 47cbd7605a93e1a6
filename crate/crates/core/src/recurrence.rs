//! Partial Bell polynomials by the block-count recurrence
//! `Z_{N,K} = (1/N) Σ_j j x_j Z_{N-j,K-1}`, `Z_{m,0} = δ_{m,0}`.
//!
//! Cost is `O(k (n-k)^2)` for one table, which serves every `Z_{N,K}` with
//! `K ≤ k` and `N - K ≤ n - k`.

use crate::error::{domain, Result};
use crate::partition::ProblemSpec;
use crate::scalar::{Real, Weight};
use crate::scaled::Scaled;
use serde::Serialize;

/// `Z_{N,K}` for `K ≤ k`, `N - K ≤ d`.
#[derive(Clone, Debug)]
pub struct ZTable<W> {
    rows: Vec<Vec<W>>,
    d: usize,
}

impl<W: Weight> ZTable<W> {
    pub fn get(&self, n: usize, k: usize) -> W {
        if n < k || k >= self.rows.len() || n - k > self.d {
            return W::zero();
        }
        self.rows[k][n - k].clone()
    }

    pub fn max_k(&self) -> usize {
        self.rows.len() - 1
    }
}

/// `x[j-1] = x_j`; entries beyond `d + 1` are ignored, missing ones read as zero.
pub fn z_table<W: Weight>(x: &[W], k: usize, d: usize) -> ZTable<W> {
    let coeff: Vec<W> = (1..=d + 1)
        .map(|j| match x.get(j - 1) {
            Some(v) if !v.is_zero() => W::uint(j) * v.clone(),
            _ => W::zero(),
        })
        .collect();
    let mut rows = Vec::with_capacity(k + 1);
    let mut base = vec![W::zero(); d + 1];
    base[0] = W::one();
    rows.push(base);
    for big_k in 1..=k {
        let prev = &rows[big_k - 1];
        let row: Vec<W> = (0..=d)
            .map(|dd| {
                let mut s = W::zero();
                for j in 1..=dd + 1 {
                    let (c, z) = (&coeff[j - 1], &prev[dd + 1 - j]);
                    if !c.is_zero() && !z.is_zero() {
                        s = s + c.clone() * z.clone();
                    }
                }
                s / W::uint(big_k + dd)
            })
            .collect();
        rows.push(row);
    }
    ZTable { rows, d }
}

/// Lower restriction as an index shift: `Z_{n,k,(r)}(x) = Z_{n-(r-1)k,k}(x_{·+r-1})`.
pub fn shift_lower<W: Weight>(spec: &ProblemSpec, x: &[W]) -> (ProblemSpec, Vec<W>) {
    let shift = spec.lo() - 1;
    let n = spec.n - shift * spec.k;
    let len = n - spec.k + 1;
    let xs = (1..=len)
        .map(|j| {
            let src = j + shift;
            if src <= spec.hi() { x[src - 1].clone() } else { W::zero() }
        })
        .collect();
    (ProblemSpec { n, k: spec.k, r_min: None, r_max: None }, xs)
}

/// `Z_{n,k}(x)` over the (restricted) support; zero when the support is empty.
pub fn recurrence_z<W: Weight>(spec: &ProblemSpec, x: &[W]) -> Result<W> {
    spec.check_len(x)?;
    if !spec.support_nonempty() {
        return Ok(W::zero());
    }
    let (s, xs) = shift_lower(spec, x);
    Ok(z_table(&xs, s.k, s.d()).get(s.n, s.k))
}

/// `Z_{n,k}` in log-scaled arithmetic from real indeterminates.
pub fn recurrence_z_scaled<F: Real>(spec: &ProblemSpec, x: &[F]) -> Result<Scaled<F>> {
    let xs: Vec<Scaled<F>> = x.iter().map(|&v| Scaled::from_real(v)).collect();
    recurrence_z(spec, &xs)
}

/// `(Z_{n,k}, x_3 Z_{n-3,k-1}, …, x_{n-k+1} Z_{k-1,k-1})` as `dir · 2^exp2 · exp(log_scale)`.
///
/// Normalisation only moves `exp2`, so rescaling by it is exact in binary floats.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussManinVector<W> {
    pub dir: Vec<W>,
    pub log_scale: f64,
    #[serde(default)]
    pub exp2: i64,
}

impl<W: Weight> GaussManinVector<W> {
    pub fn exact(dir: Vec<W>) -> Self {
        GaussManinVector { dir, log_scale: 0.0, exp2: 0 }
    }

    pub fn with_log_scale(dir: Vec<W>, log_scale: f64) -> Self {
        GaussManinVector { dir, log_scale, exp2: 0 }
    }

    /// `ln` of the common factor `2^exp2 · exp(log_scale)`.
    pub fn total_log_scale(&self) -> f64 {
        self.log_scale + self.exp2 as f64 * std::f64::consts::LN_2
    }

    pub fn log_z(&self) -> f64 {
        self.dir[0].ln_abs() + self.total_log_scale()
    }

    pub fn z_sign(&self) -> i8 {
        self.dir[0].signum_i8()
    }

    /// `ln |Q_l|`, 1-based.
    pub fn log_component(&self, l: usize) -> f64 {
        self.dir[l - 1].ln_abs() + self.total_log_scale()
    }

    /// Rescale to unit max-norm; a no-op for exact carriers.
    pub fn normalize(&mut self) {
        if !W::FLOATING {
            return;
        }
        let m = self.dir.iter().map(|v| v.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            let e = (m / std::f64::consts::LN_2).floor() as i64;
            if e != 0 {
                self.dir.iter_mut().for_each(|v| *v = v.scale_pow2(-e));
                self.exp2 += e;
            }
        }
    }

    /// Direction expressed in the scale of `other` (for combining two vectors).
    pub fn rescaled_like(&self, other: &Self) -> Vec<W> {
        let s = self.log_scale - other.log_scale;
        let e = self.exp2 - other.exp2;
        self.dir.iter().map(|v| v.scale_pow2(e).scale_exp(s)).collect()
    }
}

fn gm_check(spec: &ProblemSpec) -> Result<()> {
    if spec.is_restricted() {
        return domain("Gauss-Manin vectors are defined for the unrestricted support");
    }
    if spec.n < spec.k + 2 {
        return domain(format!("Gauss-Manin vector needs n >= k+2, got n={}, k={}", spec.n, spec.k));
    }
    Ok(())
}

/// The Gauss–Manin vector in the carrier `W` itself (no rescaling).
pub fn gauss_manin<W: Weight>(spec: &ProblemSpec, x: &[W]) -> Result<GaussManinVector<W>> {
    gm_check(spec)?;
    spec.check_len(x)?;
    let t = z_table(x, spec.k, spec.d());
    Ok(GaussManinVector::exact(gm_from_table(spec, x, &t)))
}

pub(crate) fn gm_from_table<W: Weight>(spec: &ProblemSpec, x: &[W], t: &ZTable<W>) -> Vec<W> {
    let (n, k) = (spec.n, spec.k);
    let mut q = vec![t.get(n, k)];
    q.extend((3..=spec.len()).map(|j| x[j - 1].clone() * t.get(n - j, k - 1)));
    q
}

/// The Gauss–Manin vector in log-scaled arithmetic, returned unit-normalised in `F`.
pub fn gauss_manin_scaled<F: Real>(spec: &ProblemSpec, x: &[F]) -> Result<GaussManinVector<F>> {
    let xs: Vec<Scaled<F>> = x.iter().map(|&v| Scaled::from_real(v)).collect();
    let q = gauss_manin(spec, &xs)?.dir;
    let m = q.iter().map(|v| v.log()).fold(F::neg_infinity(), |a, b| a.max(b));
    if !m.is_finite() {
        return Ok(GaussManinVector::exact(vec![F::zero(); q.len()]));
    }
    let dir = q.iter().map(|v| Scaled::new(v.sign(), v.log() - m).to_real()).collect();
    Ok(GaussManinVector::with_log_scale(dir, m.f64()))
}

/// Joint factorial moment `E[Π_i [S_i]_{r_i}] = x^r Z_{n-Σ i r_i, k-Σ r_i} / Z_{n,k}`.
pub fn factorial_moment<W: Weight>(spec: &ProblemSpec, x: &[W], r: &[u64]) -> Result<W> {
    spec.check_len(x)?;
    if r.iter().skip(x.len()).any(|&v| v != 0) {
        return Ok(W::zero());
    }
    let blocks: usize = r.iter().map(|&v| v as usize).sum();
    let size: usize = r.iter().enumerate().map(|(i, &v)| (i + 1) * v as usize).sum();
    if blocks > spec.k || size > spec.n || spec.n - size < spec.k - blocks {
        return Ok(W::zero());
    }
    let t = z_table(x, spec.k, spec.d());
    let mut num = t.get(spec.n - size, spec.k - blocks);
    for (i, &v) in r.iter().enumerate() {
        for _ in 0..v {
            num = num * x[i].clone();
        }
    }
    Ok(num / t.get(spec.n, spec.k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfc::gfc_x;
    use crate::partition::oracle_z;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn spec(n: usize, k: usize) -> ProblemSpec {
        ProblemSpec::new(n, k).unwrap()
    }

    #[test]
    fn small_value() {
        let z: BigRational = recurrence_z(&spec(4, 2), &vec![BigRational::one(); 3]).unwrap();
        assert_eq!(z, ratio(3, 2));
    }

    #[test]
    fn gfc_reference_rows() {
        let z = |a: f64, n: usize, k: usize| recurrence_z_scaled(&spec(n, k), &gfc_x(a, n - k + 1)).unwrap().log();
        assert!((z(0.5, 100, 90) + 300.737).abs() < 1e-3);
        assert!((z(0.1, 100, 90) + 295.383).abs() < 1e-3);
    }

    #[test]
    fn gauss_manin_small() {
        let q = gauss_manin(&spec(4, 2), &vec![BigRational::one(); 3]).unwrap();
        assert_eq!(q.dir, vec![ratio(3, 2), ratio(1, 1)]);
        let q = gauss_manin(&spec(6, 4), &vec![BigRational::one(); 3]).unwrap();
        assert_eq!(q.dir, vec![ratio(10, 24), ratio(1, 6)]);
        let x = vec![2.0, 3.0, 0.0];
        assert_eq!(gauss_manin(&spec(5, 3), &x).unwrap().dir[1], 0.0);
    }

    #[test]
    fn scaled_gauss_manin_matches_components() {
        let s = spec(30, 22);
        let x = gfc_x(0.3, s.len());
        let q = gauss_manin_scaled(&s, &x).unwrap();
        let direct = gauss_manin(&s, &x).unwrap();
        for l in 1..=s.d() {
            assert!((q.log_component(l) - direct.log_component(l)).abs() < 1e-12);
        }
    }

    #[test]
    fn factorial_moments() {
        let ones = vec![BigRational::one(); 3];
        let s = spec(4, 2);
        assert_eq!(factorial_moment(&s, &ones, &[0, 2, 0]).unwrap(), ratio(2, 3));
        assert_eq!(factorial_moment(&s, &ones, &[1, 0, 0]).unwrap(), ratio(2, 3));
        assert!(factorial_moment(&s, &ones, &[2, 1, 0]).unwrap().is_zero());
    }

    #[test]
    fn restricted_matches_oracle() {
        let x: Vec<BigRational> = (1..=9).map(|i| ratio(i % 4 + 1, i + 1)).collect();
        for (lo, hi) in [(None, Some(3)), (Some(2), None), (Some(2), Some(4)), (Some(3), Some(3))] {
            let s = ProblemSpec::with_bounds(12, 4, lo, hi).unwrap();
            let xs = &x[..s.len()];
            assert_eq!(recurrence_z(&s, xs).unwrap(), oracle_z(&s, xs).unwrap(), "{lo:?} {hi:?}");
        }
        let empty = ProblemSpec::with_bounds(12, 4, Some(4), None).unwrap();
        assert!(recurrence_z(&empty, &x[..9]).unwrap().is_zero());
    }
}
