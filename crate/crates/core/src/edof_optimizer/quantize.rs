//! Projection of continuous phases onto the `b`-bit set `{0, 2π/2^b, ...}`.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Largest supported resolution; beyond this the grid is finer than `f64` phases.
pub const MAX_BITS: u32 = 48;

fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::InvalidParameter(format!("quantization bits must lie in 1..={MAX_BITS}, got {bits}")));
    }
    Ok(())
}

/// Nearest level in circular distance; ties go to the smaller level in `[0, 2π)`.
pub fn quantize_phase(phase: f64, bits: u32) -> Result<f64> {
    check_bits(bits)?;
    if !phase.is_finite() {
        return Err(Error::InvalidParameter("phase must be finite".into()));
    }
    let levels = 1u64 << bits;
    let step = TAU / levels as f64;
    let w = phase.rem_euclid(TAU);
    let lo = ((w / step).floor() as u64).min(levels - 1);
    let hi = (lo + 1) % levels;
    let d_lo = w - lo as f64 * step;
    let d_hi = (lo + 1) as f64 * step - w;
    // Distances within rounding of each other count as a tie.
    let pick = if (d_lo - d_hi).abs() <= 1e-12 * step {
        lo.min(hi)
    } else if d_lo < d_hi {
        lo
    } else {
        hi
    };
    Ok(pick as f64 * step)
}

pub fn quantize_phases(phases: &[f64], bits: u32) -> Result<Vec<f64>> {
    phases.iter().map(|&p| quantize_phase(p, bits)).collect()
}
