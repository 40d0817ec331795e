//! Tridiagonal and cyclic tridiagonal solvers.
//!
//! The cyclic system is reduced to two ordinary tridiagonal solves with the
//! Sherman–Morrison formula.

/// Pivot smaller than this (relative to the diagonal scale) counts as breakdown.
const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Breakdown;

/// Solves `A x = rhs` for tridiagonal `A` with the Thomas algorithm.
///
/// `sub[i]` is `A[i+1][i]`, `sup[i]` is `A[i][i+1]`, both of length `n − 1`.
pub fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, Breakdown> {
    let n = diag.len();
    assert!(sub.len() + 1 == n && sup.len() + 1 == n && rhs.len() == n);
    let mut gam = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut bet = diag[0];
    if bet.abs() < PIVOT_FLOOR {
        return Err(Breakdown);
    }
    x[0] = rhs[0] / bet;
    for j in 1..n {
        gam[j] = sup[j - 1] / bet;
        bet = diag[j] - sub[j - 1] * gam[j];
        if bet.abs() < PIVOT_FLOOR || !bet.is_finite() {
            return Err(Breakdown);
        }
        x[j] = (rhs[j] - sub[j - 1] * x[j - 1]) / bet;
    }
    for j in (0..n - 1).rev() {
        x[j] -= gam[j + 1] * x[j + 1];
    }
    Ok(x)
}

/// Solves the cyclic tridiagonal system with corner entries
/// `A[0][n−1] = top_right` and `A[n−1][0] = bottom_left`. Needs `n ≥ 3`.
pub fn solve_cyclic(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    top_right: f64,
    bottom_left: f64,
    rhs: &[f64],
) -> Result<Vec<f64>, Breakdown> {
    let n = diag.len();
    assert!(n >= 3, "cyclic system needs at least three unknowns");
    let gamma = -diag[0];
    if gamma == 0.0 {
        return Err(Breakdown);
    }
    let mut bb = diag.to_vec();
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - top_right * bottom_left / gamma;
    let x = solve_tridiagonal(sub, &bb, sup, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = bottom_left;
    let z = solve_tridiagonal(sub, &bb, sup, &u)?;
    let ratio = top_right / gamma;
    let denom = 1.0 + z[0] + ratio * z[n - 1];
    if denom.abs() < PIVOT_FLOOR {
        return Err(Breakdown);
    }
    let fact = (x[0] + ratio * x[n - 1]) / denom;
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_apply(sub: &[f64], diag: &[f64], sup: &[f64], tr: f64, bl: f64, x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += sup[i] * x[i + 1];
                }
                if i == 0 {
                    v += tr * x[n - 1];
                }
                if i == n - 1 {
                    v += bl * x[0];
                }
                v
            })
            .collect()
    }

    #[test]
    fn periodic_laplacian_shift() {
        // (2 + s) on the diagonal, -1 off-diagonal and in the corners
        let n = 6;
        let diag = vec![2.5; n];
        let off = vec![-1.0; n - 1];
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let rhs = dense_apply(&off, &diag, &off, -1.0, -1.0, &x_true);
        let x = solve_cyclic(&off, &diag, &off, -1.0, -1.0, &rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_pivot_breaks_down() {
        let r = solve_tridiagonal(&[1.0], &[0.0, 1.0], &[1.0], &[1.0, 1.0]);
        assert_eq!(r, Err(Breakdown));
    }

    proptest! {
        #[test]
        fn diagonally_dominant_systems_solve(
            n in 3usize..40,
            seed in proptest::collection::vec(-1.0f64..1.0, 200),
            tr in -0.9f64..0.9,
            bl in -0.9f64..0.9,
        ) {
            let sub: Vec<f64> = seed[..n - 1].to_vec();
            let sup: Vec<f64> = seed[50..50 + n - 1].to_vec();
            let diag: Vec<f64> = (0..n).map(|i| 3.0 + seed[100 + i].abs()).collect();
            let x_true: Vec<f64> = seed[150..150 + n].to_vec();
            let rhs = dense_apply(&sub, &diag, &sup, tr, bl, &x_true);
            let x = solve_cyclic(&sub, &diag, &sup, tr, bl, &rhs).unwrap();
            for (a, b) in x.iter().zip(&x_true) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
