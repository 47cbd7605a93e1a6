use crate::error::{domain, Result};
use crate::scalar::Real;

/// Generalised odds ratios `y_i = x_1^i x_{i+2} / x_2^{i+1}`, `i = 1..len-2`.
pub fn odds_from_x<F: Real>(x: &[F]) -> Result<Vec<F>> {
    if x.iter().any(|v| *v <= F::zero()) {
        return domain("odds ratios need strictly positive indeterminates");
    }
    if x.len() < 2 {
        return Ok(Vec::new());
    }
    let (l1, l2) = (x[0].ln(), x[1].ln());
    Ok((1..x.len() - 1)
        .map(|i| {
            let fi = F::of(i);
            (fi * l1 + x[i + 1].ln() - (fi + F::one()) * l2).exp()
        })
        .collect())
}

/// Torus gauge `x_1 = x_2 = 1`, `x_{i+2} = y_i`.
pub fn canonical_x<F: Real>(y: &[F]) -> Vec<F> {
    let mut x = vec![F::one(), F::one()];
    x.extend_from_slice(y);
    x
}

/// `x_i ↦ x_i s_1^{i-1} s_2`.
pub fn torus_act<F: Real>(x: &[F], s1: F, s2: F) -> Vec<F> {
    x.iter().enumerate().map(|(i, &v)| v * s1.powi(i as i32) * s2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfc::gfc_x;

    #[test]
    fn ones_give_unit_odds() {
        assert_eq!(odds_from_x(&[1.0; 6]).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn gfc_at_zero_is_harmonic() {
        let y = odds_from_x(&gfc_x(0.0f64, 4)).unwrap();
        assert!((y[0] - 4.0 / 3.0).abs() < 1e-14 && (y[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_and_torus_invariance() {
        let y: Vec<f64> = vec![0.3, 2.0, 7.5];
        let x = canonical_x(&y);
        let back = odds_from_x(&x).unwrap();
        assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-14));
        let moved = odds_from_x(&torus_act(&x, 2.0, 5.0)).unwrap();
        assert!(moved.iter().zip(&y).all(|(a, b)| ((a - b) / b).abs() < 1e-13));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(odds_from_x(&[1.0, 0.0, 1.0]).is_err());
    }
}
