//! Small dense linear algebra for `n <= MAX_DIM + 1`.

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// Solves `a x = b` in place; returns `None` when the matrix is numerically singular.
///
/// `scale` sets the pivot threshold: pivots below `1e-12 * scale` count as zero.
pub fn solve<const N: usize>(
    a: &mut [[f64; N]; N],
    b: &mut [f64; N],
    n: usize,
    scale: f64,
) -> Option<()> {
    for col in 0..n {
        let mut pivot = col;
        for i in col + 1..n {
            if a[i][col].abs() > a[pivot][col].abs() {
                pivot = i;
            }
        }
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(pivot, col);
        b.swap(pivot, col);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
    Some(())
}

/// Numerical rank of the rows of `m` (modified Gram-Schmidt with relative tolerance).
pub fn rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let scale = rows
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > rel_tol * scale {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_permutation() {
        let a = vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        assert_eq!(determinant(a), -2.0);
    }

    #[test]
    fn solve_small_system() {
        let mut a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let mut b = [3.0, 5.0, 5.0];
        solve(&mut a, &mut b, 3, 1.0).unwrap();
        for (x, want) in b.iter().zip([1.0, 1.0, 1.0]) {
            assert!((x - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_detects_collinear_rows() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(rank(&rows, 1e-10), 1);
    }
}
