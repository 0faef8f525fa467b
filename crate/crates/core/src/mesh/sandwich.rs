//! The energy sandwich: numerical verification that the harmonic-map
//! energy of a grafted surface is pinned between `(1/2) L` and
//! `(1/2) L + 4 pi (g - 1)`.
//!
//! For one grafted curve of weight `theta` and length `ell`, the chain
//! runs `(1/2) L <= L^2 / (2 E_mu) <= E_flow <= (1/2) L + 4 pi (g - 1)`
//! with `L = theta ell` and `E_mu` the certified extremal-length upper
//! bound; the middle term collapses to `(1/2) L` exactly, and the flow
//! energy is compared against both ends with a proportional margin that
//! absorbs the discretization error.

use crate::error::{Error, Result};
use crate::extremal::{extremal_length_upper, minsky_lower, weighted_extremal_length};
use crate::fuchsian::{FNCoords, PantsDecomposition, WeightedMulticurve};
use crate::grafting::{graft, multicurve_length};
use crate::kv::{push_line, sig17};
use crate::scalar::Real;

use super::{build_grafted_mesh, collapsing_map, harmonic_flow, EnergyReport};

/// Default mesh resolution for desk-scale runs.
pub const DEFAULT_RESOLUTION: f64 = 0.1;

/// Default energy-decrement tolerance of the harmonic flow.
pub const DEFAULT_FLOW_TOL: f64 = 1e-8;

/// Default sweep budget of the harmonic flow.
pub const DEFAULT_MAX_SWEEPS: usize = 2000;

/// Margin for the flow-energy comparisons, as a fraction of the upper
/// bound.
pub const EPSILON_FRACTION: f64 = 0.03;

/// Outcome of one sandwich run: the four chain values, the margin, and the
/// flow that produced the middle term.
#[derive(Debug, Clone)]
pub struct SandwichReport<T: Real> {
    /// `(1/2) L`, half the multicurve length.
    pub lower: T,
    /// `L^2 / (2 E_mu)` through the certified extremal-length bound.
    pub minsky: T,
    /// Discrete energy after the harmonic flow.
    pub flow_energy: T,
    /// `(1/2) L + 4 pi (g - 1)`.
    pub upper: T,
    /// Comparison margin, `EPSILON_FRACTION` of the upper bound.
    pub epsilon: T,
    /// Number of sweeps the flow ran.
    pub sweeps: usize,
    /// Full flow report, including the energy trace.
    pub flow: EnergyReport<T>,
}

impl<T: Real> SandwichReport<T> {
    /// The three chain comparisons: lower against Minsky, Minsky against
    /// the flow energy, flow energy against the upper bound. The exact
    /// algebraic link tolerates only rounding; the two energy links get
    /// the epsilon margin.
    pub fn links(&self) -> [bool; 3] {
        let tiny = T::from_f64_lossy(1e-12) * (T::one() + self.lower.abs());
        [
            self.lower <= self.minsky + tiny,
            self.minsky <= self.flow_energy + self.epsilon,
            self.flow_energy <= self.upper + self.epsilon,
        ]
    }

    pub fn passes(&self) -> bool {
        self.links().iter().all(|&ok| ok)
    }

    /// Key-value rendering: every chain quantity, the margin, the sweep
    /// count, and one pass/fail line per link.
    pub fn to_kv(&self) -> String {
        let f = |x: T| sig17(x.to_f64().unwrap_or(f64::NAN));
        let mut out = String::new();
        push_line(&mut out, "lower", f(self.lower));
        push_line(&mut out, "minsky", f(self.minsky));
        push_line(&mut out, "flow_energy", f(self.flow_energy));
        push_line(&mut out, "upper", f(self.upper));
        push_line(&mut out, "epsilon", f(self.epsilon));
        push_line(&mut out, "sweeps", self.sweeps);
        let links = self.links();
        let verdict = |ok: bool| if ok { "pass" } else { "fail" };
        push_line(&mut out, "link.lower_minsky", verdict(links[0]));
        push_line(&mut out, "link.minsky_flow", verdict(links[1]));
        push_line(&mut out, "link.flow_upper", verdict(links[2]));
        push_line(&mut out, "sandwich", verdict(self.passes()));
        out
    }
}

/// Builds the grafted surface, meshes it, flows the collapsing map, and
/// reports the energy sandwich. The multicurve may be empty (both lower
/// terms vanish) or a single weighted curve; more curves are out of scope
/// for the chain comparison.
pub fn sandwich_report<T: Real>(
    pd: &PantsDecomposition,
    coords: &FNCoords<T>,
    mu: &WeightedMulticurve<T>,
    resolution: T,
    max_sweeps: usize,
    tol: T,
) -> Result<SandwichReport<T>> {
    if mu.len() > 1 {
        return Err(Error::SandwichNeedsOneCurve { count: mu.len() });
    }
    let gs = graft(pd, coords, mu)?;
    let mesh = build_grafted_mesh(&gs, resolution)?;
    let map0 = collapsing_map(&gs, &mesh)?;

    let length = multicurve_length(coords, mu)?;
    let half = T::from_f64_lossy(0.5);
    let lower = half * length;
    let upper = lower + gs.base_area();
    let epsilon = T::from_f64_lossy(EPSILON_FRACTION) * upper;

    let minsky = match mu.entries().first() {
        None => T::zero(),
        Some(&(curve, theta)) => {
            let e_curve = extremal_length_upper(&gs, curve)?;
            let e_mu = weighted_extremal_length(e_curve, theta);
            minsky_lower(length, e_mu)?
        }
    };

    let (_, flow) = harmonic_flow(&mesh, &map0, max_sweeps, tol)?;
    Ok(SandwichReport {
        lower,
        minsky,
        flow_energy: flow.energy,
        upper,
        epsilon,
        sweeps: flow.trace.len().saturating_sub(1),
        flow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::default_genus2;
    use std::f64::consts::PI;

    fn coords_with_first_length(l: f64) -> (PantsDecomposition, FNCoords<f64>) {
        let pd = PantsDecomposition::standard(2).unwrap();
        let coords = FNCoords::new(vec![l, 2.0, 1.2], vec![0.3, -0.1, 0.0]).unwrap();
        (pd, coords)
    }

    #[test]
    fn default_grafted_case_passes() {
        let (pd, coords) = coords_with_first_length(1.0);
        let mu = WeightedMulticurve::single(0, 2.0 * PI).unwrap();
        let report = sandwich_report(&pd, &coords, &mu, 0.2, 400, 1e-7).unwrap();
        assert!(report.passes(), "links failed: {:?}", report.links());
        assert!((report.lower - PI).abs() < 1e-12);
        assert!((report.minsky - PI).abs() < 1e-9);
        assert!((report.upper - 5.0 * PI).abs() < 1e-12);
        assert!(report.flow_energy <= report.upper + report.epsilon);
        assert!(report.flow_energy >= report.lower - report.epsilon);
        assert!(report.sweeps >= 1);
    }

    #[test]
    fn empty_multicurve_degenerates_to_the_identity_bound() {
        // The flow barely moves off the identity here, so the discretization
        // error of the identity energy must fit inside the 3 percent band;
        // that takes a resolution of 0.15 or finer.
        let (pd, coords) = default_genus2();
        let mu = WeightedMulticurve::empty();
        let report = sandwich_report(&pd, &coords, &mu, 0.15, 50, 1e-8).unwrap();
        assert_eq!(report.lower, 0.0);
        assert_eq!(report.minsky, 0.0);
        assert!((report.upper - 4.0 * PI).abs() < 1e-12);
        assert!(report.passes());
        // The identity start is already discrete harmonic, so the flow
        // stops immediately and the energy stays at the identity energy,
        // inside the epsilon band around the surface area.
        assert!(report.sweeps <= 2);
        assert!((report.flow_energy - 4.0 * PI).abs() < report.epsilon);
    }

    #[test]
    fn more_than_one_curve_is_rejected() {
        let (pd, coords) = default_genus2();
        let mu =
            WeightedMulticurve::new(vec![(0, 2.0 * PI), (1, PI)]).unwrap();
        match sandwich_report(&pd, &coords, &mu, 0.25, 10, 1e-8) {
            Err(Error::SandwichNeedsOneCurve { count }) => assert_eq!(count, 2),
            other => panic!("expected SandwichNeedsOneCurve, got {other:?}"),
        }
    }

    #[test]
    fn report_kv_lists_links() {
        let (pd, coords) = coords_with_first_length(2.0);
        let mu = WeightedMulticurve::single(0, PI).unwrap();
        let report = sandwich_report(&pd, &coords, &mu, 0.25, 200, 1e-7).unwrap();
        let kv = report.to_kv();
        assert!(kv.contains("link.lower_minsky = pass"));
        assert!(kv.contains("link.minsky_flow = pass"));
        assert!(kv.contains("link.flow_upper = pass"));
        assert!(report.passes());
    }
}
