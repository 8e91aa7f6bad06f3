//! Brute-force references built without the library's operators.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// `−Σ σ_z(l)σ_z(l+1) + λ Σ σ_x(l)` with periodic bonds, as an explicit matrix.
pub fn dense_tfim(n: usize, lambda: f64) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let spin = |l: usize| if i >> (l % n) & 1 == 0 { 1.0 } else { -1.0 };
        h[(i, i)] = -(0..n).map(|l| spin(l) * spin(l + 1)).sum::<f64>();
        for l in 0..n {
            h[(i ^ (1 << l), i)] += lambda;
        }
    }
    h
}

/// Ascending eigenvalues and eigenvector columns of the explicit matrix.
pub fn dense_eigen(n: usize, lambda: f64) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(dense_tfim(n, lambda));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<f64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (vals, DMatrix::from_columns(&cols))
}

fn pauli_2x2(axis: usize) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        0 => DMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        1 => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        _ => DMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    }
}

/// `σ_axis` on a 1-based site as a Kronecker product; site 1 is the least significant bit.
pub fn dense_pauli(n: usize, axis: usize, site: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut m = DMatrix::<Complex64>::identity(1, 1);
    for l in (1..=n).rev() {
        let factor = if l == site { pauli_2x2(axis) } else { id.clone() };
        m = m.kronecker(&factor);
    }
    m
}

/// Connected correlations from explicit Pauli matrices, index `3(l−1) + α`.
pub fn dense_vcm(n: usize, psi: &DVector<Complex64>) -> DMatrix<Complex64> {
    let images: Vec<DVector<Complex64>> = (0..3 * n).map(|k| dense_pauli(n, k % 3, k / 3 + 1) * psi).collect();
    let means: Vec<Complex64> = images.iter().map(|v| psi.dotc(v)).collect();
    DMatrix::from_fn(3 * n, 3 * n, |a, b| images[a].dotc(&images[b]) - means[a] * means[b])
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn top_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Ground state in the sector `Π σ_x = sign` by power iteration on `c − H`.
///
/// The projection removes the quasi-degenerate partner in the other sector; the
/// iteration stops once successive vectors stop moving.
#[allow(clippy::needless_range_loop)]
pub fn power_ground_state(n: usize, lambda: f64, sign: f64) -> Vec<f64> {
    let dim = 1usize << n;
    let all = dim - 1;
    let diag: Vec<f64> = (0..dim)
        .map(|i| {
            let spin = |l: usize| if i >> (l % n) & 1 == 0 { 1.0 } else { -1.0 };
            -(0..n).map(|l| spin(l) * spin(l + 1)).sum::<f64>()
        })
        .collect();
    let shift = n as f64 * (1.0 + lambda.abs()) + 1.0;
    let project = |v: &mut Vec<f64>| {
        for i in 0..dim {
            let j = i ^ all;
            if i < j {
                let s = 0.5 * (v[i] + sign * v[j]);
                v[i] = s;
                v[j] = sign * s;
            }
        }
    };
    let normalize = |v: &mut Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64).collect();
    project(&mut v);
    normalize(&mut v);
    for it in 0..200_000 {
        let mut w = vec![0.0; dim];
        for i in 0..dim {
            let mut acc = (shift - diag[i]) * v[i];
            for l in 0..n {
                acc -= lambda * v[i ^ (1 << l)];
            }
            w[i] = acc;
        }
        project(&mut w);
        normalize(&mut w);
        let change = v.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        v = w;
        if change < 1e-14 && it > 100 {
            break;
        }
    }
    v
}
