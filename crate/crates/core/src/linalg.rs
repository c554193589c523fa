//! Implicit-shift QL eigensolver for symmetric tridiagonal matrices.
//!
//! The excitation blocks diagonalized in this crate are symmetric tridiagonal
//! with dimension <= 16, so the classic QL iteration with implicit Wilkinson
//! shifts (EISPACK TQL2 lineage) is an exact fit; no dense solver is needed.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// Diagonalize a symmetric tridiagonal matrix in place.
///
/// `d` holds the diagonal (length n) and `e` the subdiagonal in `e[0..n-1]`
/// (`e[n-1]` is scratch). On return `d` contains the eigenvalues in ascending
/// order and column k of the row-major n x n matrix `z` holds the unit
/// eigenvector for `d[k]`. `z` must be the identity on input.
pub fn tridiag_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    assert_eq!(e.len(), n);
    assert_eq!(z.len(), n * n);
    if n <= 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // look for a negligible subdiagonal element to split the matrix
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::EigenConvergence { dim: n });
            }

            // implicit shift from the 2x2 at the l end
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;

            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // recover from underflow by dropping a negligible rotation
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.chunks_exact_mut(n) {
                    f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    sort_eigenpairs(d, z);
    Ok(())
}

/// Sort eigenvalues ascending and permute eigenvector columns to match.
/// Stable in the original column index so results are deterministic.
fn sort_eigenpairs(d: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap().then(a.cmp(&b)));
    let vals: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    d.copy_from_slice(&vals);
    let old = z.to_vec();
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            z[row * n + new_col] = old[row * n + old_col];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(diag: &[f64], off: &[f64]) {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut e = off.to_vec();
        e.push(0.0);
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        tridiag_eigen(&mut d, &mut e, &mut z).unwrap();

        let norm: f64 = diag
            .iter()
            .chain(off.iter())
            .fold(0.0f64, |a, &x| a.max(x.abs()))
            .max(1.0);
        // residual ||T v - lambda v|| per eigenpair
        for k in 0..n {
            for r in 0..n {
                let mut hv = diag[r] * z[r * n + k];
                if r > 0 {
                    hv += off[r - 1] * z[(r - 1) * n + k];
                }
                if r + 1 < n {
                    hv += off[r] * z[(r + 1) * n + k];
                }
                assert!(
                    (hv - d[k] * z[r * n + k]).abs() <= 1e-12 * norm,
                    "residual too large"
                );
            }
        }
        // orthonormality
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|r| z[r * n + a] * z[r * n + b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
        // ascending
        for k in 1..n {
            assert!(d[k] >= d[k - 1]);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let (delta, g) = (-1000.0f64, 100.0f64);
        let mut d = vec![0.0, delta];
        let mut e = vec![g, 0.0];
        let mut z = vec![1.0, 0.0, 0.0, 1.0];
        tridiag_eigen(&mut d, &mut e, &mut z).unwrap();
        let r = (delta * delta / 4.0 + g * g).sqrt();
        assert!((d[0] - (delta / 2.0 - r)).abs() < 1e-9);
        assert!((d[1] - (delta / 2.0 + r)).abs() < 1e-9);
    }

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let mut d = vec![3.0, 1.0, 2.0];
        let mut e = vec![0.0, 0.0, 0.0];
        let mut z = vec![0.0; 9];
        for i in 0..3 {
            z[i * 3 + i] = 1.0;
        }
        tridiag_eigen(&mut d, &mut e, &mut z).unwrap();
        assert_eq!(d, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn assorted_matrices() {
        check(&[0.0], &[]);
        check(&[1.0, -1.0], &[0.5]);
        check(&[0.0, -1000.0, -2250.0, -3750.0, -5500.0, -7500.0], &[
            1000.0, 1414.2, 1732.0, 2000.0, 2236.0,
        ]);
        check(&[1e9, 1e9 + 1.0, 1e9 + 2.0], &[1e-3, 1e3]);
        check(&[0.0; 6], &[100.0, 141.42, 173.2, 200.0, 223.6]);
    }
}
