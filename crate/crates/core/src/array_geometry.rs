//! Planar DARISA arrays in wavelength-normalized coordinates.
//!
//! A transmit (receive) array is `M` (`N`) identical DARISAs of
//! `n_x × n_y` elements, tiled side by side along the x axis. Elements are
//! indexed row-major inside a DARISA and DARISA-major across the array, which
//! is the column order of the block-diagonal phase matrices downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Transmit,
    Receive,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Transmit => "transmit",
            Side::Receive => "receive",
        }
    }
}

/// Physical extent of an aperture in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aperture {
    pub x: f64,
    pub y: f64,
}

impl Aperture {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn area(&self) -> f64 {
        self.x * self.y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub side: Side,
    /// Elements per row of one DARISA.
    pub n_x: usize,
    /// Elements per column of one DARISA.
    pub n_y: usize,
    /// Element spacing in wavelengths, at most one half.
    pub spacing: f64,
    /// Number of DARISAs on this side (`M` transmit, `N` receive).
    pub darisa_count: usize,
}

impl ArrayConfig {
    pub fn new(side: Side, n_x: usize, n_y: usize, spacing: f64, darisa_count: usize) -> Result<Self> {
        let cfg = Self { side, n_x, n_y, spacing, darisa_count };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Square DARISAs of `side_wavelengths × side_wavelengths` sampled at
    /// `spacing`; the element count per row is rounded to the nearest integer.
    pub fn square(side: Side, side_wavelengths: f64, spacing: f64, darisa_count: usize) -> Result<Self> {
        if !(spacing > 0.0) || !side_wavelengths.is_finite() || side_wavelengths <= 0.0 {
            return Err(Error::InvalidArray(format!(
                "square DARISA needs positive size and spacing, got {side_wavelengths} and {spacing}"
            )));
        }
        let n = (side_wavelengths / spacing).round().max(1.0) as usize;
        Self::new(side, n, n, spacing, darisa_count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_y == 0 {
            return Err(Error::InvalidArray(format!(
                "element counts must be positive (n_x={}, n_y={})",
                self.n_x, self.n_y
            )));
        }
        if self.darisa_count == 0 {
            return Err(Error::InvalidArray("darisa_count must be positive".into()));
        }
        if !(self.spacing > 0.0 && self.spacing <= 0.5) {
            return Err(Error::InvalidArray(format!(
                "spacing must lie in (0, 0.5] wavelengths, got {}",
                self.spacing
            )));
        }
        Ok(())
    }

    /// Elements per DARISA (`N_t` or `N_r`).
    pub fn elements_per_darisa(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn total_elements(&self) -> usize {
        self.elements_per_darisa() * self.darisa_count
    }

    /// Aperture of a single DARISA, `(Δ n_x, Δ n_y)`.
    pub fn darisa_aperture(&self) -> Aperture {
        Aperture::new(self.spacing * self.n_x as f64, self.spacing * self.n_y as f64)
    }

    /// Aperture of the full tiled array, `(count Δ n_x, Δ n_y)`.
    pub fn array_aperture(&self) -> Aperture {
        let d = self.darisa_aperture();
        Aperture::new(d.x * self.darisa_count as f64, d.y)
    }
}

/// 1-based position of an element within the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementIndex {
    pub darisa: usize,
    pub local: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementLayout {
    pub positions: Vec<[f64; 3]>,
    pub index_map: Vec<ElementIndex>,
}

impl ElementLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Position of the 1-based global element `index`.
    pub fn position(&self, index: usize) -> Option<[f64; 3]> {
        index.checked_sub(1).and_then(|i| self.positions.get(i).copied())
    }

    /// Copy of the layout shifted by `offset`.
    pub fn translated(&self, offset: [f64; 3]) -> Self {
        Self {
            positions: self
                .positions
                .iter()
                .map(|p| [p[0] + offset[0], p[1] + offset[1], p[2] + offset[2]])
                .collect(),
            index_map: self.index_map.clone(),
        }
    }
}

pub fn element_positions(cfg: &ArrayConfig) -> Result<ElementLayout> {
    cfg.validate()?;
    let per = cfg.elements_per_darisa();
    let tile = cfg.n_x as f64 * cfg.spacing;
    let mut positions = Vec::with_capacity(cfg.total_elements());
    let mut index_map = Vec::with_capacity(cfg.total_elements());
    for d in 0..cfg.darisa_count {
        for local in 0..per {
            let ix = local % cfg.n_x;
            let iy = local / cfg.n_x;
            positions.push([
                d as f64 * tile + ix as f64 * cfg.spacing,
                iy as f64 * cfg.spacing,
                0.0,
            ]);
            index_map.push(ElementIndex { darisa: d + 1, local: local + 1 });
        }
    }
    Ok(ElementLayout { positions, index_map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_element_at_origin() {
        let cfg = ArrayConfig::new(Side::Transmit, 4, 4, 0.5, 1).unwrap();
        let lay = element_positions(&cfg).unwrap();
        assert_eq!(lay.position(1).unwrap(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn fifth_element_starts_second_row() {
        let cfg = ArrayConfig::new(Side::Transmit, 4, 4, 0.5, 1).unwrap();
        let lay = element_positions(&cfg).unwrap();
        assert_eq!(lay.position(5).unwrap(), [0.0, 0.5, 0.0]);
    }

    #[test]
    fn second_darisa_is_offset_by_its_width() {
        let cfg = ArrayConfig::new(Side::Receive, 2, 2, 0.25, 2).unwrap();
        let lay = element_positions(&cfg).unwrap();
        // Brute-force layout: enumerate every DARISA/row/column triple directly.
        let mut expected = Vec::new();
        for d in 0..2 {
            for y in 0..2 {
                for x in 0..2 {
                    expected.push([0.5 * d as f64 + 0.25 * x as f64, 0.25 * y as f64, 0.0]);
                }
            }
        }
        assert_eq!(lay.positions, expected);
        assert_eq!(lay.position(5).unwrap(), [0.5, 0.0, 0.0]);
        assert_eq!(lay.index_map[4], ElementIndex { darisa: 2, local: 1 });
    }

    #[test]
    fn apertures() {
        let cfg = ArrayConfig::new(Side::Transmit, 16, 8, 0.125, 4).unwrap();
        assert_eq!(cfg.darisa_aperture(), Aperture::new(2.0, 1.0));
        assert_eq!(cfg.array_aperture(), Aperture::new(8.0, 1.0));
    }

    #[test]
    fn rejects_invalid_configs() {
        assert!(ArrayConfig::new(Side::Transmit, 0, 4, 0.5, 1).is_err());
        assert!(ArrayConfig::new(Side::Transmit, 4, 0, 0.5, 1).is_err());
        assert!(ArrayConfig::new(Side::Transmit, 4, 4, 0.0, 1).is_err());
        assert!(ArrayConfig::new(Side::Transmit, 4, 4, -0.1, 1).is_err());
        assert!(ArrayConfig::new(Side::Transmit, 4, 4, 0.51, 1).is_err());
        assert!(ArrayConfig::new(Side::Transmit, 4, 4, 0.5, 0).is_err());
        let bad = ArrayConfig { side: Side::Receive, n_x: 2, n_y: 2, spacing: 0.7, darisa_count: 1 };
        assert!(element_positions(&bad).is_err());
    }

    #[test]
    fn square_helper_rounds_element_count() {
        let cfg = ArrayConfig::square(Side::Receive, 2.0, 0.125, 2).unwrap();
        assert_eq!((cfg.n_x, cfg.n_y), (16, 16));
    }

    proptest! {
        #[test]
        fn layout_properties(
            n_x in 1usize..6,
            n_y in 1usize..6,
            count in 1usize..4,
            spacing in 0.05f64..=0.5,
        ) {
            let cfg = ArrayConfig::new(Side::Transmit, n_x, n_y, spacing, count).unwrap();
            let lay = element_positions(&cfg).unwrap();
            prop_assert_eq!(lay.len(), n_x * n_y * count);
            prop_assert!(lay.positions.iter().all(|p| p[2] == 0.0));
            prop_assert_eq!(&lay, &element_positions(&cfg).unwrap());
            if lay.len() > 1 {
                let mut min_d = f64::INFINITY;
                for i in 0..lay.len() {
                    for j in (i + 1)..lay.len() {
                        let a = lay.positions[i];
                        let b = lay.positions[j];
                        min_d = min_d.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
                    }
                }
                prop_assert!((min_d - spacing).abs() < 1e-12);
            }
        }
    }
}
