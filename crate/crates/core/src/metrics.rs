//! Rank, effective DoF and capacity of channel matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, CMatrix};

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Descending.
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    /// `(Σσ²)² / Σσ⁴` over the full spectrum.
    pub edof: f64,
    /// `σ_max² / σ_min²` over the retained values; infinite when nothing is retained.
    pub condition_number: f64,
    /// Set for the all-zero matrix.
    pub degenerate: bool,
}

/// `(Σσ²)² / Σσ⁴`, or 0 for an all-zero spectrum.
pub fn edof_of(singular_values: &[f64]) -> f64 {
    let s2: f64 = singular_values.iter().map(|s| s * s).sum();
    let s4: f64 = singular_values.iter().map(|s| s.powi(4)).sum();
    if s4 == 0.0 {
        0.0
    } else {
        s2 * s2 / s4
    }
}

pub fn spectrum(matrix: &CMatrix, rank_threshold: f64) -> Result<SpectrumReport> {
    if matrix.is_empty() {
        return Err(Error::InvalidParameter("spectrum of an empty matrix".into()));
    }
    if !(rank_threshold > 0.0 && rank_threshold < 1.0) {
        return Err(Error::InvalidParameter(format!("rank threshold must lie in (0, 1), got {rank_threshold}")));
    }
    Ok(spectrum_from_values(singular_values(matrix), rank_threshold))
}

/// Report built from precomputed descending singular values.
pub fn spectrum_from_values(singular_values: Vec<f64>, rank_threshold: f64) -> SpectrumReport {
    let top = singular_values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return SpectrumReport {
            singular_values,
            numerical_rank: 0,
            edof: 0.0,
            condition_number: f64::INFINITY,
            degenerate: true,
        };
    }
    let retained: Vec<f64> = singular_values.iter().copied().filter(|&s| s > rank_threshold * top).collect();
    let smallest = retained.last().copied().unwrap_or(top);
    SpectrumReport {
        numerical_rank: retained.len(),
        edof: edof_of(&singular_values),
        condition_number: (top / smallest).powi(2),
        degenerate: false,
        singular_values,
    }
}

/// `Ψ log₂(1 + snr / Ψ)`, zero at `Ψ = 0`.
pub fn capacity_edof_approx(edof: f64, snr: f64) -> f64 {
    if edof <= 0.0 {
        return 0.0;
    }
    edof * (snr / edof).ln_1p() / std::f64::consts::LN_2
}

/// `log₂ det(I + (snr / cols) M M^H)`.
pub fn capacity_exact(matrix: &CMatrix, snr: f64) -> f64 {
    capacity_from_values(&singular_values(matrix), matrix.ncols(), snr)
}

pub fn capacity_from_values(singular_values: &[f64], cols: usize, snr: f64) -> f64 {
    if cols == 0 {
        return 0.0;
    }
    let rho = snr / cols as f64;
    singular_values.iter().map(|s| (rho * s * s).ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, CVector};
    use proptest::prelude::*;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { C64::new(v[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn identity_spectrum() {
        let r = spectrum(&CMatrix::identity(4, 4), DEFAULT_RANK_THRESHOLD).unwrap();
        assert_eq!(r.numerical_rank, 4);
        assert!((r.edof - 4.0).abs() < 1e-12);
        assert!((r.condition_number - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = CVector::from_vec(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.1), C64::new(0.3, 0.0)]);
        let v = CVector::from_vec(vec![C64::new(0.2, -1.0), C64::new(2.0, 0.4)]);
        let m = &u * v.adjoint();
        let r = spectrum(&m, DEFAULT_RANK_THRESHOLD).unwrap();
        assert_eq!(r.numerical_rank, 1);
        assert!((r.edof - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_value_spectrum() {
        let r = spectrum(&diag(&[2f64.sqrt(), 1.0]), DEFAULT_RANK_THRESHOLD).unwrap();
        assert!((r.edof - 1.8).abs() < 1e-12);
        assert!((r.condition_number - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let r = spectrum(&CMatrix::zeros(3, 2), DEFAULT_RANK_THRESHOLD).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.numerical_rank, 0);
        assert_eq!(r.edof, 0.0);
        assert_eq!(capacity_exact(&CMatrix::zeros(3, 2), 5.0), 0.0);
    }

    #[test]
    fn bad_threshold_rejected() {
        assert!(spectrum(&CMatrix::identity(2, 2), 0.0).is_err());
        assert!(spectrum(&CMatrix::identity(2, 2), 1.0).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert!((capacity_edof_approx(1.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((capacity_edof_approx(2.0, 2.0) - 2.0).abs() < 1e-12);
        let want = 3.0 * (1.0f64 + 7.0 / 3.0).log2();
        assert!((capacity_edof_approx(3.0, 7.0) - want).abs() < 1e-12);
        assert!((want - 5.2109).abs() < 1e-4);
        assert_eq!(capacity_edof_approx(0.0, 3.0), 0.0);
        let n = 5;
        let c = capacity_exact(&CMatrix::identity(n, n), 3.0);
        assert!((c - n as f64 * (1.0 + 3.0 / n as f64).log2()).abs() < 1e-12);
        let c = capacity_exact(&diag(&[2.0, 1.0]), 2.0);
        assert!((c - (5f64.log2() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn high_snr_agreement_when_well_conditioned() {
        let m = diag(&[1.0, 0.9, 0.8, 0.75]);
        let r = spectrum(&m, DEFAULT_RANK_THRESHOLD).unwrap();
        assert!(r.condition_number < 2.0);
        let exact = capacity_exact(&m, 1e4);
        let approx = capacity_edof_approx(r.edof, 1e4);
        assert!((exact - approx).abs() / exact < 0.05);
    }

    #[test]
    fn edof_equals_rank_iff_flat() {
        let flat = spectrum(&diag(&[3.0, 3.0, 3.0]), DEFAULT_RANK_THRESHOLD).unwrap();
        assert!((flat.edof - flat.numerical_rank as f64).abs() < 1e-9);
        let tilted = spectrum(&diag(&[3.0, 3.0, 2.9]), DEFAULT_RANK_THRESHOLD).unwrap();
        assert!((tilted.edof - tilted.numerical_rank as f64).abs() > 1e-9);
    }

    proptest! {
        #[test]
        fn edof_scale_invariant(vals in proptest::collection::vec(0.01f64..10.0, 1..6), c in 0.01f64..100.0) {
            let a = edof_of(&vals);
            let scaled: Vec<f64> = vals.iter().map(|v| v * c).collect();
            prop_assert!((a - edof_of(&scaled)).abs() < 1e-9 * a);
            prop_assert!(a >= 1.0 - 1e-12 && a <= vals.len() as f64 + 1e-12);
        }

        #[test]
        fn approx_capacity_increasing(snr in 0.01f64..1e3, a in 0.01f64..100.0, gap in 1e-3f64..10.0) {
            prop_assert!(capacity_edof_approx(a + gap, snr) > capacity_edof_approx(a, snr));
        }
    }
}
