//! Thin helpers over `nalgebra` for the complex dense algebra used throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `e^{jφ}`.
#[inline]
pub fn unit_phasor(phase: f64) -> C64 {
    let (s, c) = phase.sin_cos();
    C64::new(c, s)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real part of the trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// Replaces `m` by `(m + m^H) / 2`.
pub fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Largest deviation from Hermitian symmetry, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending with the
/// matching eigenvectors as columns.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Factor `F` with `F F^H = m` for a Hermitian PSD `m`, dropping eigenvalues
/// below `rel_floor * λ_max`.
pub fn psd_factor(m: &CMatrix, rel_floor: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let top = vals.iter().copied().fold(0.0_f64, f64::max);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] > rel_floor * top && vals[i] > 0.0)
        .collect();
    let mut f = CMatrix::zeros(m.nrows(), keep.len().max(1));
    for (c, &i) in keep.iter().enumerate() {
        let s = vals[i].sqrt();
        f.set_column(c, &(vecs.column(i) * C64::new(s, 0.0)));
    }
    f
}

/// Orthogonal projection of a Hermitian matrix onto the PSD cone.
pub fn project_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigh(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        let col = vecs.column(i);
        out.ger(C64::new(v, 0.0), &col, &col.conjugate(), ONE);
    }
    hermitize(&mut out);
    out
}

/// Numerical rank of `m`: singular values above `rel * σ_max`.
pub fn numerical_rank(m: &CMatrix, rel: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phasor_has_unit_modulus() {
        for k in 0..32 {
            let z = unit_phasor(0.37 * k as f64);
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eigh_reconstructs() {
        let m = CMatrix::from_fn(4, 4, |i, j| {
            C64::new((i + j) as f64, i as f64 - j as f64) + if i == j { ONE * 5.0 } else { ZERO }
        });
        let (vals, vecs) = hermitian_eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            4,
            vals.iter().map(|&v| C64::new(v, 0.0)),
        ));
        let back = &vecs * d * vecs.adjoint();
        assert!(frobenius_norm(&(back - &m)) < 1e-10);
    }

    #[test]
    fn psd_projection_clips_negative_part() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        let p = project_psd(&m);
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!(p[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn psd_factor_roundtrip() {
        let a = CMatrix::from_fn(5, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        let m = &a * a.adjoint();
        let f = psd_factor(&m, 1e-12);
        assert_eq!(f.ncols(), 2);
        assert!(frobenius_norm(&(&f * f.adjoint() - &m)) < 1e-9);
    }
}
