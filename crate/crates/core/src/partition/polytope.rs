use super::{enumerate_support, ProblemSpec};
use crate::error::{Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

/// Position of `sbar` relative to the Newton polytope `conv(support)`.
///
/// The point is in the relative interior iff it is a convex combination with
/// every weight positive, so we maximise the smallest weight `t`.
pub fn polytope_membership(sbar: &[f64], spec: &ProblemSpec) -> Result<Membership> {
    spec.check_len(sbar)?;
    let k_sum: f64 = sbar.iter().sum();
    let n_sum: f64 = sbar.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
    if (k_sum - spec.k as f64).abs() > TOL * spec.k as f64
        || (n_sum - spec.n as f64).abs() > TOL * spec.n as f64
        || sbar.iter().any(|&v| v < -TOL)
    {
        return Ok(Membership::Exterior);
    }
    let verts = enumerate_support(spec)?;
    if verts.is_empty() {
        return Ok(Membership::Exterior);
    }
    let m = verts.len();
    let coords: Vec<usize> = (2..spec.len()).collect();
    // columns: mu_1..mu_m, t ; lambda_j = mu_j + t
    let mut a = Vec::with_capacity(coords.len() + 1);
    let mut b = Vec::with_capacity(coords.len() + 1);
    for &c in &coords {
        let mut row: Vec<f64> = verts.iter().map(|v| v.0[c] as f64).collect();
        row.push(row.iter().sum());
        a.push(row);
        b.push(sbar[c]);
    }
    let mut conv = vec![1.0; m];
    conv.push(m as f64);
    a.push(conv);
    b.push(1.0);
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    Ok(match lp_max(&c, &a, &b) {
        Lp::Infeasible => Membership::Exterior,
        Lp::Optimal(t) if t > TOL => Membership::Interior,
        Lp::Optimal(_) => Membership::Boundary,
    })
}

enum Lp {
    Infeasible,
    Optimal(f64),
}

/// Dense two-phase simplex for `max c.z` s.t. `A z = b`, `z >= 0`, Bland's rule.
/// Assumes the problem is bounded.
fn lp_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Lp {
    let (rows, nv) = (a.len(), c.len());
    let width = nv + rows + 1;
    let mut t: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(r, (row, &rhs))| {
            let flip = if rhs < 0.0 { -1.0 } else { 1.0 };
            let mut v: Vec<f64> = row.iter().map(|x| x * flip).collect();
            v.extend((0..rows).map(|q| if q == r { 1.0 } else { 0.0 }));
            v.push(rhs * flip);
            v
        })
        .collect();
    let mut basis: Vec<usize> = (nv..nv + rows).collect();
    let phase1: Vec<f64> = (0..nv + rows).map(|j| if j >= nv { -1.0 } else { 0.0 }).collect();
    simplex(&mut t, &mut basis, &phase1, nv + rows);
    let infeas: f64 = basis.iter().zip(&t).filter(|(&bv, _)| bv >= nv).map(|(_, r)| r[width - 1]).sum();
    if infeas > TOL {
        return Lp::Infeasible;
    }
    // drive zero-level artificials out; rows that cannot pivot are redundant
    let mut r = 0;
    while r < t.len() {
        if basis[r] >= nv {
            match (0..nv).find(|&j| t[r][j].abs() > TOL) {
                Some(j) => pivot(&mut t, &mut basis, r, j),
                None => {
                    t.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    let mut obj = c.to_vec();
    obj.extend(std::iter::repeat_n(0.0, rows));
    simplex(&mut t, &mut basis, &obj, nv);
    Lp::Optimal(basis.iter().zip(&t).map(|(&bv, row)| obj[bv] * row[width - 1]).sum())
}

fn simplex(t: &mut [Vec<f64>], basis: &mut [usize], obj: &[f64], allowed: usize) {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    for _ in 0..100_000 {
        let entering = (0..allowed).find(|&j| {
            let rc = obj[j] - basis.iter().zip(t.iter()).map(|(&bv, row)| obj[bv] * row[j]).sum::<f64>();
            rc > TOL && !basis.contains(&j)
        });
        let Some(j) = entering else { return };
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in t.iter().enumerate() {
            if row[j] > TOL {
                let ratio = row[rhs] / row[j];
                let better = match best {
                    None => true,
                    Some((br, bq)) => ratio < bq - TOL || (ratio <= bq + TOL && basis[r] < basis[br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        match best {
            Some((r, _)) => pivot(t, basis, r, j),
            None => return,
        }
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, j: usize) {
    let p = t[r][j];
    t[r].iter_mut().for_each(|v| *v /= p);
    let prow = t[r].clone();
    for (q, row) in t.iter_mut().enumerate() {
        if q != r && row[j] != 0.0 {
            let f = row[j];
            row.iter_mut().zip(&prow).for_each(|(v, pv)| *v -= f * pv);
        }
    }
    basis[r] = j;
}

/// Exact rank of the centred support.
pub fn affine_dimension(spec: &ProblemSpec) -> Result<usize> {
    let verts = enumerate_support(spec)?;
    let Some(first) = verts.first() else { return Ok(0) };
    let mut echelon: Vec<(usize, Vec<i128>)> = Vec::new();
    for v in &verts[1..] {
        let mut w: Vec<i128> = v.0.iter().zip(&first.0).map(|(&a, &b)| a as i128 - b as i128).collect();
        for (col, row) in &echelon {
            if w[*col] != 0 {
                let (f, g) = (row[*col], w[*col]);
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi = f
                        .checked_mul(*wi)
                        .and_then(|a| g.checked_mul(*ri).and_then(|b| a.checked_sub(b)))
                        .ok_or_else(|| Error::Numeric("integer overflow in rank computation".into()))?;
                }
                let gcd = w.iter().fold(0i128, |acc, &x| acc.gcd(&x));
                if gcd > 1 {
                    w.iter_mut().for_each(|x| *x /= gcd);
                }
            }
        }
        if let Some(col) = w.iter().position(|&x| x != 0) {
            echelon.push((col, w));
        }
    }
    Ok(echelon.len())
}
