//! Fraction-free integer elimination.
//!
//! All intermediate values of Bareiss elimination are minors of the input, so
//! every division is exact. Matrices are dense, row-major, `i128`.

use num_rational::Ratio;

pub type Rational = Ratio<i128>;

/// Determinant by Bareiss elimination with row pivoting. `a` is consumed as
/// scratch space.
pub fn bareiss_det(a: &mut [i128], n: usize) -> i128 {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            match (k + 1..n).find(|&r| a[r * n + k] != 0) {
                Some(r) => {
                    for c in 0..n {
                        a.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return 0,
            }
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let aik = a[i * n + k];
            for j in k + 1..n {
                let v = pivot * a[i * n + j] - aik * a[k * n + j];
                debug_assert_eq!(v % prev, 0);
                a[i * n + j] = v / prev;
            }
            a[i * n + k] = 0;
        }
        prev = pivot;
    }
    sign * a[n * n - 1]
}

/// Determinant and scaled inverse of a symmetric positive semidefinite
/// matrix by fraction-free Gauss-Jordan elimination.
///
/// Returns `(d, r)` with `r = d * a^-1` (an integer matrix, `d = det(a)`), or
/// `None` when `a` is singular. No pivoting is needed: for a positive
/// semidefinite matrix a vanishing leading principal minor already implies
/// singularity.
pub fn psd_scaled_inverse(a: &[i128], n: usize) -> Option<(i128, Vec<i128>)> {
    debug_assert_eq!(a.len(), n * n);
    let w = 2 * n;
    let mut aug = vec![0i128; n * w];
    for i in 0..n {
        aug[i * w..i * w + n].copy_from_slice(&a[i * n..(i + 1) * n]);
        aug[i * w + n + i] = 1;
    }
    let mut prev = 1i128;
    for k in 0..n {
        let pivot = aug[k * w + k];
        if pivot == 0 {
            return None;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let aik = aug[i * w + k];
            for j in 0..w {
                if j == k {
                    continue;
                }
                let v = pivot * aug[i * w + j] - aik * aug[k * w + j];
                debug_assert_eq!(v % prev, 0);
                aug[i * w + j] = v / prev;
            }
            aug[i * w + k] = 0;
        }
        prev = pivot;
    }
    // Rows processed before the last step end with diagonal `det`; the last
    // pivot row keeps its step-(n-1) values, which already equal `det`.
    let det = prev;
    let mut r = vec![0i128; n * n];
    for i in 0..n {
        debug_assert_eq!(aug[i * w + i], det);
        r[i * n..(i + 1) * n].copy_from_slice(&aug[i * w + n..(i + 1) * w]);
    }
    Some((det, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: Gaussian elimination over the rationals.
    fn rational_inverse(a: &[i128], n: usize) -> Option<(Rational, Vec<Rational>)> {
        let mut m: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> = a[i * n..(i + 1) * n].iter().map(|&v| Rational::from_integer(v)).collect();
                row.extend((0..n).map(|j| Rational::from_integer((i == j) as i128)));
                row
            })
            .collect();
        let mut det = Rational::from_integer(1);
        for k in 0..n {
            let p = (k..n).find(|&r| m[r][k] != Rational::from_integer(0))?;
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            let piv = m[k][k];
            det *= piv;
            for x in m[k].iter_mut() {
                *x /= piv;
            }
            for i in 0..n {
                if i != k {
                    let f = m[i][k];
                    let pivot_row = m[k].clone();
                    for (x, p) in m[i].iter_mut().zip(pivot_row) {
                        *x -= p * f;
                    }
                }
            }
        }
        let inv = (0..n).flat_map(|i| m[i][n..].to_vec()).collect();
        Some((det, inv))
    }

    fn gram(rows: &[Vec<i128>]) -> (Vec<i128>, usize) {
        let n = rows[0].len();
        let mut g = vec![0; n * n];
        for r in rows {
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] += r[i] * r[j];
                }
            }
        }
        (g, n)
    }

    #[test]
    fn det_small() {
        let mut a = vec![2, 0, 1, 1, 3, 2, 1, 1, 2];
        assert_eq!(bareiss_det(&mut a, 3), 6);
        let mut b = vec![0, 1, 1, 0];
        assert_eq!(bareiss_det(&mut b, 2), -1);
        let mut c = vec![1, 2, 2, 4];
        assert_eq!(bareiss_det(&mut c, 2), 0);
    }

    #[test]
    fn scaled_inverse_singular() {
        let (g, n) = gram(&[vec![1, 1, 2], vec![1, -1, 0], vec![1, 1, 2]]);
        assert!(psd_scaled_inverse(&g, n).is_none());
    }

    proptest! {
        #[test]
        fn scaled_inverse_matches_rational_oracle(
            rows in prop::collection::vec(prop::collection::vec(-3i128..=3, 5), 4..9)
        ) {
            let (g, n) = gram(&rows);
            let oracle = rational_inverse(&g, n);
            match psd_scaled_inverse(&g, n) {
                None => prop_assert!(oracle.is_none() || oracle.unwrap().0 == Rational::from_integer(0)),
                Some((d, r)) => {
                    let (od, oinv) = oracle.expect("oracle agrees on nonsingularity");
                    prop_assert_eq!(Rational::from_integer(d), od);
                    for (x, y) in r.iter().zip(&oinv) {
                        prop_assert_eq!(Rational::new(*x, d), *y);
                    }
                    let mut scratch = g.clone();
                    prop_assert_eq!(bareiss_det(&mut scratch, n), d);
                }
            }
        }

        #[test]
        fn bareiss_matches_rational_oracle(a in prop::collection::vec(-5i128..=5, 16)) {
            let expected = rational_inverse(&a, 4).map_or(Rational::from_integer(0), |(d, _)| d);
            let mut scratch = a.clone();
            prop_assert_eq!(Rational::from_integer(bareiss_det(&mut scratch, 4)), expected);
        }
    }
}
