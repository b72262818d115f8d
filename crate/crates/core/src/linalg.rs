//! Dense linear-algebra helpers on `nalgebra` matrices.
//!
//! The matrix exponential is scaling-and-squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 chosen from the 1-norm
//! (Higham 2005).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let mut u_inner = &id * b[1];
    let mut v = &id * b[0];
    let mut pow = id.clone();
    let m = b.len() - 1;
    let mut k = 2;
    while k <= m {
        pow = &pow * &a2;
        v += &pow * b[k];
        u_inner += &pow * b[k + 1];
        k += 2;
    }
    (a * u_inner, v)
}

fn pade13(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &B13;
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

/// Matrix exponential by scaling and squaring.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let nrm = norm1(a);
    let solve = |u: DMatrix<f64>, v: DMatrix<f64>| -> Result<DMatrix<f64>> {
        let p = &v + &u;
        let q = &v - &u;
        q.lu()
            .solve(&p)
            .ok_or_else(|| Error::EigenSolveFailure("singular Padé denominator".into()))
    };
    for (m, theta) in THETA {
        if nrm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, b);
            return solve(u, v);
        }
    }
    let s = (nrm / THETA_13).log2().ceil().max(0.0) as i32;
    let scaled = a / 2f64.powi(s);
    let (u, v) = pade13(&scaled);
    let mut r = solve(u, v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Integer power by repeated squaring.
pub fn matrix_power(a: &DMatrix<f64>, mut k: u64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Symmetric eigendecomposition with eigenvalues sorted descending.
pub fn sym_eigen_desc(s: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = s.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::<f64>::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn sym_max_eigenvalue(s: &DMatrix<f64>) -> f64 {
    let sym = (s + s.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `diag(d) * m * diag(1/d)`.
pub fn conjugate_diag(m: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| d[i] * m[(i, j)] / d[j])
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        let e = expm(&z).unwrap();
        assert!((e - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn expm_diagonal_all_degrees() {
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0, 40.0] {
            let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-scale, 0.3 * scale, -2.0 * scale]));
            let e = expm(&a).unwrap();
            for i in 0..3 {
                let want = a[(i, i)].exp();
                assert!((e[(i, i)] - want).abs() <= 1e-13 * want.max(1.0), "{scale} {i}");
            }
        }
    }

    #[test]
    fn expm_rotation() {
        let t = 2.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-13);
        assert!((e[(1, 0)] - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn expm_jordan_block() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 7.0, 0.0, -1.0]);
        let e = expm(&a).unwrap();
        let em1 = (-1f64).exp();
        assert!((e[(0, 1)] - 7.0 * em1).abs() < 1e-13);
        assert!((e[(0, 0)] - em1).abs() < 1e-14);
    }

    #[test]
    fn power_matches_repeated_product() {
        let a = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.4, 0.6]);
        let mut b = DMatrix::<f64>::identity(2, 2);
        for _ in 0..13 {
            b = &b * &a;
        }
        assert!((matrix_power(&a, 13) - b).amax() < 1e-15);
        assert_eq!(matrix_power(&a, 0), DMatrix::<f64>::identity(2, 2));
    }
}
