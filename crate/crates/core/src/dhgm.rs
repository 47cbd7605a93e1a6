//! Difference HGM: Gauss–Manin vectors from contiguity relations in `(n, k)`.
//!
//! For `k < n/2`, `Q_{n,k} = x_1^{k-1} Π_{i=0}^{k-2} (P_1^{(n-i,k-i)})^{-1} Q_{n-k+1,1}`.
//! Otherwise a doubling loop builds `Q_{2(n-k),n-k}` from `Q_{4,2}` before the
//! same product finishes the climb.

use crate::error::{domain, Error, Result};
use crate::partition::ProblemSpec;
use crate::pfaffian::{mat_vec, p_tilde};
use crate::recurrence::GaussManinVector;
use crate::scalar::Weight;

/// `(P_1^{(n,k)})^{-1} v = (2k-n)^{-1} [[1, -r], [0, (2k-n) E]] diag(1, P̃_1) v`, `r = (1, …, n-k-1)`.
pub fn apply_p1_inverse<W: Weight>(n: usize, k: usize, x: &[W], v: &[W]) -> Result<Vec<W>> {
    let c = 2 * k as i64 - n as i64;
    if c == 0 {
        return Err(Error::Singular(format!("P_1 is singular at n={n}, k={k} (2k-n = 0)")));
    }
    let d = n - k;
    let tail = mat_vec(&p_tilde(n, k, 1, x)?, &v[1..]);
    let head = tail
        .iter()
        .enumerate()
        .fold(v[0].clone(), |acc, (j, w)| acc - W::uint(j + 1) * w.clone());
    let mut out = Vec::with_capacity(d);
    out.push(head / W::int(c));
    out.extend(tail);
    Ok(out)
}

/// Multiplies in the carrier so later combinations stay on the exact binary scale.
fn times_x1_pow<W: Weight>(q: &mut GaussManinVector<W>, x1: &W, p: usize) {
    for _ in 0..p {
        q.dir.iter_mut().for_each(|v| *v = v.clone() * x1.clone());
        q.normalize();
    }
}

/// Climbs from `Q_{n0,k0}` to `Q_{n0+steps, k0+steps}` without the `x_1` factor.
fn climb<W: Weight>(mut q: GaussManinVector<W>, n0: usize, k0: usize, steps: usize, x: &[W]) -> Result<GaussManinVector<W>> {
    for s in 1..=steps {
        q.dir = apply_p1_inverse(n0 + s, k0 + s, x, &q.dir)?;
        q.normalize();
    }
    Ok(q)
}

fn dhgm_small_k<W: Weight>(n: usize, k: usize, x: &[W]) -> Result<GaussManinVector<W>> {
    let d = n - k;
    let mut seed = vec![W::zero(); d];
    seed[0] = x[d].clone();
    seed[d - 1] = seed[d - 1].clone() + x[d].clone();
    let mut q = climb(GaussManinVector::exact(seed), d + 1, 1, k - 1, x)?;
    times_x1_pow(&mut q, &x[0], k - 1);
    Ok(q)
}

/// Gauss–Manin vector by contiguity relations; `n ≥ k + 2 ≥ 4`.
pub fn dhgm<W: Weight>(spec: &ProblemSpec, x: &[W]) -> Result<GaussManinVector<W>> {
    spec.check_len(x)?;
    let (n, k) = (spec.n, spec.k);
    if spec.is_restricted() || k < 2 || n < k + 2 {
        return domain(format!("difference HGM needs an unrestricted spec with n >= k+2 >= 4, got n={n}, k={k}"));
    }
    if x.iter().any(|v| v.signum_i8() <= 0) {
        return domain("difference HGM needs strictly positive indeterminates");
    }
    if 2 * k < n {
        return dhgm_small_k(n, k, x);
    }
    let d = n - k;
    let (x1, x2, x3) = (x[0].clone(), x[1].clone(), x[2].clone());
    let two = W::int(2);
    let mut q = GaussManinVector::exact(vec![x1.clone() * x3.clone() + x2.clone() * x2.clone() / two.clone(), x1.clone() * x3]);
    q.normalize();
    for i in 3..=d {
        let z = dhgm_small_k(2 * i - 1, i - 1, x)?;
        let (zp, prev, exp2) = if z.exp2 > q.exp2 {
            (z.dir[0].clone(), q.rescaled_like(&z), z.exp2)
        } else {
            (z.rescaled_like(&q)[0].clone(), q.dir.clone(), q.exp2)
        };
        let tail: Vec<W> = mat_vec(&p_tilde(2 * i, i, 2, x)?, &prev[1..])
            .into_iter()
            .map(|v| x2.clone() * v)
            .collect();
        let mut v = vec![zp, prev[0].clone()];
        v.extend(tail);
        let fi = W::uint(i);
        let r1 = (2..i).fold(two.clone() * x1.clone() * v[0].clone() + x2.clone() * v[1].clone(), |acc, j| {
            acc - W::uint(j - 1) * v[j].clone()
        });
        let r2 = (2..i).fold(fi.clone() * x1.clone() * v[0].clone(), |acc, j| acc - W::uint(i * j) * v[j].clone());
        let mut dir = vec![r1 / fi.clone(), r2 / fi];
        dir.extend(v.drain(2..));
        q = GaussManinVector { dir, log_scale: 0.0, exp2 };
        q.normalize();
    }
    let mut q = climb(q, 2 * d, d, 2 * k - n, x)?;
    times_x1_pow(&mut q, &x1, 2 * k - n);
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfc::gfc_x;
    use crate::recurrence::gauss_manin;
    use crate::scalar::ratio;
    use crate::DoubleDouble;
    use num_rational::BigRational;

    #[test]
    fn exact_against_recurrence() {
        for n in 4..16 {
            for k in 2..=n - 2 {
                let s = ProblemSpec::new(n, k).unwrap();
                let x: Vec<BigRational> =
                    (0..s.len() as i64).map(|j| ratio((n as i64 * 3 + j * 5) % 8 + 1, (k as i64 + j * 7) % 6 + 1)).collect();
                assert_eq!(dhgm(&s, &x).unwrap().dir, gauss_manin(&s, &x).unwrap().dir, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn base_case() {
        let x = vec![ratio(2, 1), ratio(3, 1), ratio(5, 1)];
        let q = dhgm(&ProblemSpec::new(4, 2).unwrap(), &x).unwrap();
        assert_eq!(q.dir, vec![ratio(29, 2), ratio(10, 1)]);
    }

    #[test]
    fn half_cell_small_n_minus_k() {
        let s = ProblemSpec::new(100, 90).unwrap();
        let q = dhgm(&s, &gfc_x(DoubleDouble::from(0.5), s.len())).unwrap();
        assert!((q.log_z() + 300.737).abs() < 1e-3, "{}", q.log_z());
    }

    #[test]
    fn singular_p1_is_reported() {
        let x = vec![1.0; 4];
        assert!(matches!(apply_p1_inverse(6, 3, &x, &[1.0, 1.0, 1.0]), Err(Error::Singular(_))));
    }
}
