//! Pfaffian system `θ_i Q = P_i Q` of the Gauss–Manin vector.
//!
//! Row 1 of each `P_i` is an integer vector. Rows `l ≥ 2` carry the inverse of
//! the upper-triangular `P̃_i`, whose entries are
//! `(m-l+1)/(n-i-l-1) · x_{m-l+1} x_{i+l+1} / (x_{m+2} x_i)`.

use crate::error::{Error, Result};
use crate::partition::ProblemSpec;
use crate::scalar::{Real, Weight};

pub type Mat<W> = Vec<Vec<W>>;

/// `P_i^{(n,k)}` for `i = 1..=n-k+1`, stored at `p[i-1]`.
#[derive(Clone, Debug)]
pub struct PfaffianSet<W> {
    pub n: usize,
    pub k: usize,
    pub p: Vec<Mat<W>>,
}

impl<W: Weight> PfaffianSet<W> {
    pub fn get(&self, i: usize) -> &Mat<W> {
        &self.p[i - 1]
    }
}

fn xs<W: Weight>(x: &[W], j: usize) -> Result<W> {
    x.get(j - 1).cloned().ok_or_else(|| Error::Domain(format!("indeterminate x_{j} missing")))
}

fn singular(msg: String) -> Error {
    Error::Singular(msg)
}

fn check_dims(n: usize, k: usize, i: usize) -> Result<()> {
    if n < k + 2 || i == 0 || i > n - k + 1 {
        return Err(Error::Domain(format!("no P_{i} for n={n}, k={k}")));
    }
    Ok(())
}

/// `P̃_i^{(n)}`, size `n-k-i`.
pub fn p_tilde<W: Weight>(n: usize, k: usize, i: usize, x: &[W]) -> Result<Mat<W>> {
    check_dims(n, k, i)?;
    let s = n - k - i.min(n - k);
    let xi = xs(x, i)?;
    if s > 0 && xi.is_zero() {
        return Err(singular(format!("x_{i} = 0 in P~_{i}")));
    }
    let mut t = vec![vec![W::zero(); s]; s];
    for l in 1..=s {
        let den = n as i64 - i as i64 - l as i64 - 1;
        if den == 0 {
            return Err(singular(format!("denominator n-i-l-1 vanishes at i={i}, l={l}")));
        }
        for m in l..=s {
            let xm2 = xs(x, m + 2)?;
            if xm2.is_zero() {
                return Err(singular(format!("x_{} = 0 in P~_{i}", m + 2)));
            }
            t[l - 1][m - 1] = W::uint(m - l + 1) * xs(x, m - l + 1)? * xs(x, i + l + 1)?
                / (W::int(den) * xm2 * xi.clone());
        }
        let row_max = t[l - 1].iter().map(|v| v.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        let diag = &t[l - 1][l - 1];
        let tiny = W::FLOATING && diag.ln_abs() < row_max + 1e-30f64.ln();
        if diag.is_zero() || tiny {
            return Err(singular(format!("pivot {l} of P~_{i} is zero")));
        }
    }
    Ok(t)
}

/// Solves `U v = b` for upper-triangular `U`.
pub fn solve_upper<W: Weight>(u: &Mat<W>, b: &[W]) -> Result<Vec<W>> {
    let s = u.len();
    let mut v = vec![W::zero(); s];
    for r in (0..s).rev() {
        if u[r][r].is_zero() {
            return Err(singular(format!("zero pivot at row {}", r + 1)));
        }
        let mut acc = b[r].clone();
        for c in r + 1..s {
            acc = acc - u[r][c].clone() * v[c].clone();
        }
        v[r] = acc / u[r][r].clone();
    }
    Ok(v)
}

pub fn invert_upper<W: Weight>(u: &Mat<W>) -> Result<Mat<W>> {
    let s = u.len();
    let mut inv = vec![vec![W::zero(); s]; s];
    for c in 0..s {
        let mut e = vec![W::zero(); s];
        e[c] = W::one();
        let col = solve_upper(u, &e)?;
        for r in 0..s {
            inv[r][c] = col[r].clone();
        }
    }
    Ok(inv)
}

/// Row 1 of `P_i^{(n,k)}`.
pub fn first_row(n: usize, k: usize, i: usize) -> Vec<i64> {
    let d = n - k;
    match i {
        1 => std::iter::once(2 * k as i64 - n as i64).chain((1..d).map(|m| m as i64)).collect(),
        2 => std::iter::once(d as i64).chain((2..=d).map(|m| -(m as i64))).collect(),
        _ => (1..=d).map(|m| i64::from(m + 1 == i)).collect(),
    }
}

/// Places `P̃_i^{-1}` into rows `2..` and columns `i+1..` of `P_i`.
fn assemble<W: Weight>(n: usize, k: usize, i: usize, tinv: &Mat<W>) -> Mat<W> {
    let d = n - k;
    let mut p = vec![vec![W::zero(); d]; d];
    p[0] = first_row(n, k, i).into_iter().map(W::int).collect();
    if i >= 3 {
        p[i - 2][i - 2] = p[i - 2][i - 2].clone() + W::one();
    }
    for (r, row) in tinv.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            p[r + 1][c + i] = p[r + 1][c + i].clone() + v.clone();
        }
    }
    p
}

/// All Pfaffian matrices at `x`.
pub fn pfaffian_matrices<W: Weight>(spec: &ProblemSpec, x: &[W]) -> Result<PfaffianSet<W>> {
    spec.check_len(x)?;
    let (n, k) = (spec.n, spec.k);
    check_dims(n, k, 1)?;
    let p = (1..=spec.len())
        .map(|i| {
            let tinv = invert_upper(&p_tilde(n, k, i, x)?)?;
            Ok(assemble(n, k, i, &tinv))
        })
        .collect::<Result<_>>()?;
    Ok(PfaffianSet { n, k, p })
}

/// `P_i q` by back-substitution, without forming `P_i`.
///
/// Each row `l` of `P̃_i` shares the factor `x_{i+l+1} / ((n-i-l-1) x_i)`, so the
/// solve reduces to `w_l = (b_l / r_l - Σ_{m>l} (m-l+1) x_{m-l+1} w_m) / x_1`
/// with `u_l = x_{l+2} w_l`.
pub fn apply_pfaffian<W: Weight>(n: usize, k: usize, i: usize, x: &[W], q: &[W]) -> Result<Vec<W>> {
    check_dims(n, k, i)?;
    let d = n - k;
    let row = first_row(n, k, i);
    let mut out = vec![W::zero(); d];
    out[0] = row.iter().zip(q).fold(W::zero(), |acc, (&c, v)| match c {
        0 => acc,
        c => acc + W::int(c) * v.clone(),
    });
    if i >= 3 {
        out[i - 2] = out[i - 2].clone() + q[i - 2].clone();
    }
    let s = d.saturating_sub(i);
    if s == 0 {
        return Ok(out);
    }
    let x1 = xs(x, 1)?;
    let xi = xs(x, i)?;
    if x1.is_zero() || xi.is_zero() {
        return Err(singular(format!("x_1 or x_{i} vanishes in P~_{i}")));
    }
    let jx: Vec<W> = (1..=s).map(|j| Ok(W::uint(j) * xs(x, j)?)).collect::<Result<_>>()?;
    let mut w = vec![W::zero(); s + 1];
    for l in (1..=s).rev() {
        let den = n as i64 - i as i64 - l as i64 - 1;
        let top = xs(x, i + l + 1)?;
        if den == 0 || top.is_zero() {
            return Err(singular(format!("pivot {l} of P~_{i} is zero")));
        }
        let mut acc = q[i + l - 1].clone() * W::int(den) * xi.clone() / top;
        for m in l + 1..=s {
            if !w[m].is_zero() {
                acc = acc - jx[m - l].clone() * w[m].clone();
            }
        }
        w[l] = acc / x1.clone();
        let u = xs(x, l + 2)? * w[l].clone();
        out[l] = out[l].clone() + u;
    }
    Ok(out)
}

/// `θ_i Q` from the block-count table: the exact right-hand side of the Pfaffian system.
pub fn theta_q<W: Weight>(spec: &ProblemSpec, x: &[W], i: usize) -> Result<Vec<W>> {
    let (n, k) = (spec.n, spec.k);
    check_dims(n, k, i)?;
    let t = crate::recurrence::z_table(x, k, spec.d());
    let xi = xs(x, i)?;
    let mut out = vec![xi.clone() * t.get(n.saturating_sub(i), k - 1)];
    for j in 3..=spec.len() {
        let xj = xs(x, j)?;
        let mut v = if k >= 2 && n >= i + j { xi.clone() * xj.clone() * t.get(n - i - j, k - 2) } else { W::zero() };
        if i == j {
            v = v + xj * t.get(n - j, k - 1);
        }
        out.push(v);
    }
    Ok(out)
}

/// Closed-form `(P̃_i)^{-1}` on the GFC curve, upper triangle only.
///
/// Entry `(l-1, m-i)` is
/// `(-1)^l (n-m-1) [m+1]_{l+i} / ((l+1)! i!) · (α-1)/(m-α) · (α-l)_{m-i} / (i-α)_{m-i}`.
pub fn gfc_p_tilde_inverse<F: Real>(n: usize, k: usize, i: usize, alpha: F) -> Result<Mat<F>> {
    check_dims(n, k, i)?;
    let s = n - k - i.min(n - k);
    let mut t = vec![vec![F::zero(); s]; s];
    for l in 2..=s + 1 {
        for m in i + 1..=n - k {
            if m - i < l - 1 {
                continue;
            }
            let sign = if l % 2 == 0 { F::one() } else { -F::one() };
            let mut falling = F::one();
            for r in 0..l + i {
                falling = falling * (F::of(m + 1) - F::of(r));
            }
            let mut fact = F::one();
            for r in 2..=l + 1 {
                fact = fact * F::of(r);
            }
            for r in 2..=i {
                fact = fact * F::of(r);
            }
            let (mut up, mut down) = (F::one(), F::one());
            for r in 0..m - i {
                up = up * (alpha - F::of(l) + F::of(r));
                down = down * (F::of(i) - alpha + F::of(r));
            }
            let nm = F::of(n) - F::of(m) - F::one();
            t[l - 2][m - i - 1] =
                sign * nm * falling / fact * (alpha - F::one()) / (F::of(m) - alpha) * up / down;
        }
    }
    Ok(t)
}

/// Pfaffian matrices on the GFC curve from the closed form.
pub fn gfc_pfaffian_matrices<F: Real + Weight>(spec: &ProblemSpec, alpha: F) -> Result<PfaffianSet<F>> {
    let (n, k) = (spec.n, spec.k);
    check_dims(n, k, 1)?;
    let p = (1..=spec.len())
        .map(|i| Ok(assemble(n, k, i, &gfc_p_tilde_inverse(n, k, i, alpha)?)))
        .collect::<Result<_>>()?;
    Ok(PfaffianSet { n, k, p })
}

pub fn mat_vec<W: Weight>(m: &Mat<W>, v: &[W]) -> Vec<W> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(W::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfc::gfc_x;
    use crate::recurrence::gauss_manin;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn spec(n: usize, k: usize) -> ProblemSpec {
        ProblemSpec::new(n, k).unwrap()
    }

    fn rand_x(len: usize, seed: i64) -> Vec<BigRational> {
        (0..len as i64).map(|j| ratio((seed * 7 + j * 13) % 9 + 1, (seed * 5 + j * 3) % 7 + 1)).collect()
    }

    #[test]
    fn n_minus_two_is_constant() {
        for n in 4..9 {
            let x: Vec<f64> = vec![0.7, 1.9, 3.3];
            let p = pfaffian_matrices(&spec(n, n - 2), &x).unwrap();
            let nf = n as f64;
            assert_eq!(p.get(1), &vec![vec![nf - 4.0, 1.0], vec![0.0, nf - 3.0]]);
            assert_eq!(p.get(2), &vec![vec![2.0, -2.0], vec![0.0, 0.0]]);
            assert_eq!(p.get(3), &vec![vec![0.0, 1.0], vec![0.0, 1.0]]);
        }
    }

    #[test]
    fn pfaffian_system_holds_exactly() {
        for n in 4..=12 {
            for k in 2..=n - 2 {
                let s = spec(n, k);
                let x = rand_x(s.len(), (n * 31 + k) as i64);
                let q = gauss_manin(&s, &x).unwrap().dir;
                let ps = pfaffian_matrices(&s, &x).unwrap();
                for i in 1..=s.len() {
                    let rhs = theta_q(&s, &x, i).unwrap();
                    assert_eq!(mat_vec(ps.get(i), &q), rhs, "n={n} k={k} i={i}");
                    assert_eq!(apply_pfaffian(n, k, i, &x, &q).unwrap(), rhs, "apply n={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn gfc_closed_form_matches_generic_inverse() {
        for (n, k) in [(8, 4), (10, 5), (12, 7), (9, 3)] {
            for alpha in [ratio(1, 2), ratio(-1, 1), ratio(1, 10)] {
                let len = n - k + 1;
                let mut x = vec![ratio(1, 1)];
                for i in 2..=len {
                    let prev = x[i - 2].clone();
                    x.push(prev * (ratio(i as i64 - 1, 1) - alpha.clone()) / ratio(i as i64, 1));
                }
                for i in 1..n - k {
                    let inv = invert_upper(&p_tilde(n, k, i, &x).unwrap()).unwrap();
                    let a = alpha.approx();
                    let cf = gfc_p_tilde_inverse(n, k, i, a).unwrap();
                    for (r, row) in inv.iter().enumerate() {
                        for (c, v) in row.iter().enumerate() {
                            let e = v.approx();
                            assert!((cf[r][c] - e).abs() <= 1e-10 * e.abs().max(1.0), "n={n} i={i} ({r},{c})");
                        }
                    }
                }
            }
        }
        let g = gfc_pfaffian_matrices(&spec(12, 6), 0.3f64).unwrap();
        let h = pfaffian_matrices(&spec(12, 6), &gfc_x(0.3f64, 7)).unwrap();
        for (a, b) in g.p.iter().flatten().flatten().zip(h.p.iter().flatten().flatten()) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let x = vec![0.0, 1.0, 1.0, 1.0];
        assert!(matches!(pfaffian_matrices(&spec(8, 5), &x), Err(Error::Singular(_))));
        assert!(matches!(apply_pfaffian(8, 5, 1, &x, &[1.0, 1.0, 1.0]), Err(Error::Singular(_))));
        // k = 1 makes n-i-l-1 vanish at the last pivot
        let y = vec![1.0; 5];
        assert!(matches!(p_tilde(5, 1, 1, &y), Err(Error::Singular(_))));
    }
}
