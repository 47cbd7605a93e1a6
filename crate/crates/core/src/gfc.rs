//! The generalised-factorial-coefficient curve `x_i(α) = (1-α)_{i-1} / i!`.

use crate::scalar::Real;

pub fn gfc_x<F: Real>(alpha: F, len: usize) -> Vec<F> {
    let mut x = Vec::with_capacity(len);
    let mut v = F::one();
    for i in 1..=len {
        if i > 1 {
            v = v * (F::of(i - 1) - alpha) / F::of(i);
        }
        x.push(v);
    }
    x
}

/// `∂_α ξ^i = Σ_{j=1}^{i-1} 1/(α-j)`, for `i = 1..len`.
pub fn gfc_tangent<F: Real>(alpha: F, len: usize) -> Vec<F> {
    let mut t = Vec::with_capacity(len);
    let mut acc = F::zero();
    for i in 1..=len {
        if i > 1 {
            acc = acc + (alpha - F::of(i - 1)).recip();
        }
        t.push(acc);
    }
    t
}
