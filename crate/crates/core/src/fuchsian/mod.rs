//! Fuchsian surface-group representations from Fenchel-Nielsen coordinates
//! and their quakebend deformations.

pub mod assembly;
pub mod decomposition;
pub mod hexagon;
pub mod words;

pub use assembly::{
    assemble_representation, quakebend_representation, reality_check, Assembly, RealityReport,
    SurfaceGroupRep,
};
pub use decomposition::{Curve, CurveEnd, CurveKind, PantsDecomposition};
pub use hexagon::{PantsGeometry, Reflection};
pub use words::Word;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fenchel-Nielsen coordinates on the Teichmueller space of a pants
/// decomposition: one positive length and one twist per curve, in hyperbolic
/// length units.
#[derive(Debug, Clone, PartialEq)]
pub struct FNCoords<T: Real> {
    pub lengths: Vec<T>,
    pub twists: Vec<T>,
}

impl<T: Real> FNCoords<T> {
    pub fn new(lengths: Vec<T>, twists: Vec<T>) -> Result<Self> {
        if lengths.len() != twists.len() {
            return Err(Error::CurveIndexOutOfRange {
                index: twists.len(),
                count: lengths.len(),
            });
        }
        for &l in &lengths {
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::NonPositiveLength {
                    value: l.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(FNCoords { lengths, twists })
    }

    pub fn matches(&self, pd: &PantsDecomposition) -> Result<()> {
        if self.lengths.len() != pd.curve_count() {
            return Err(Error::CurveIndexOutOfRange {
                index: self.lengths.len(),
                count: pd.curve_count(),
            });
        }
        Ok(())
    }
}

/// A weighted multicurve supported on pants curves: positive weights on
/// distinct curves of the decomposition, recording grafting heights (equal
/// to bending angles).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMulticurve<T: Real> {
    entries: Vec<(usize, T)>,
}

impl<T: Real> WeightedMulticurve<T> {
    pub fn empty() -> Self {
        WeightedMulticurve { entries: Vec::new() }
    }

    pub fn new(mut entries: Vec<(usize, T)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::UnsupportedCurve);
            }
        }
        for &(_, w) in &entries {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::NonPositiveWeight {
                    value: w.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(WeightedMulticurve { entries })
    }

    pub fn single(curve: usize, weight: T) -> Result<Self> {
        Self::new(vec![(curve, weight)])
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn weight_of(&self, curve: usize) -> Option<T> {
        self.entries
            .iter()
            .find(|&&(c, _)| c == curve)
            .map(|&(_, w)| w)
    }

    /// Checks every referenced curve exists in the decomposition.
    pub fn supported_on(&self, pd: &PantsDecomposition) -> Result<()> {
        for &(c, _) in &self.entries {
            if c >= pd.curve_count() {
                return Err(Error::CurveIndexOutOfRange {
                    index: c,
                    count: pd.curve_count(),
                });
            }
        }
        Ok(())
    }
}

/// Default desk-scale example: genus 2, lengths (1.5, 2.0, 1.2) and twists
/// (0.3, -0.1, 0.0) on the standard decomposition.
pub fn default_genus2() -> (PantsDecomposition, FNCoords<f64>) {
    let pd = PantsDecomposition::standard(2).expect("genus 2 is valid");
    let fnc = FNCoords::new(vec![1.5, 2.0, 1.2], vec![0.3, -0.1, 0.0]).expect("valid coords");
    (pd, fnc)
}
