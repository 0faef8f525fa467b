//! Extremal-length bounds on the grafted surface and the harmonic-energy
//! lower bound they imply.
//!
//! The flat cylinder of height `theta` and circumference `ell` embeds in
//! the grafted surface, so the extremal length of its core curve is at
//! most `ell / theta`, the reciprocal modulus. Extremal length scales
//! quadratically under weighting, and a certified upper bound `E` for the
//! weighted curve turns into the energy lower bound `L^2 / (2 E)`. The two
//! scalings cancel exactly: feeding the cylinder bound through the chain
//! returns `(1/2) theta ell`, which is what pins the harmonic energy
//! between `(1/2) L` and `(1/2) L + 4 pi (g - 1)`.

use crate::error::{Error, Result};
use crate::grafting::GraftedSurface;
use crate::scalar::Real;

/// A pair of extremal-length bounds for one weight-one curve, each flagged
/// certified (a proved inequality) or heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ELBounds<T: Real> {
    pub lower_estimate: T,
    pub upper: T,
    pub lower_certified: bool,
    pub upper_certified: bool,
}

/// Certified upper bound `ell / theta` for the extremal length of a
/// grafted curve: an embedded annulus forces the extremal length of its
/// core below the reciprocal of its modulus.
pub fn extremal_length_upper<T: Real>(gs: &GraftedSurface<T>, curve: usize) -> Result<T> {
    let cyl = gs
        .cylinders
        .iter()
        .find(|c| c.curve == curve)
        .ok_or(Error::CurveNotGrafted { curve })?;
    Ok(cyl.circumference / cyl.height)
}

/// Extremal length of the weighted curve `theta gamma` from the extremal
/// length of `gamma`: quadratic scaling `theta^2 E`.
pub fn weighted_extremal_length<T: Real>(e_gamma: T, theta: T) -> T {
    theta * theta * e_gamma
}

/// Lower bound `L^2 / (2 E)` for the energy of any equivariant map in the
/// homotopy class, valid when `E` is a certified upper bound for the
/// extremal length of the multicurve of length `L`.
pub fn minsky_lower<T: Real>(l_mu: T, e_mu: T) -> Result<T> {
    if !(e_mu > T::zero()) || !e_mu.is_finite() {
        return Err(Error::NonPositiveExtremalLength {
            value: e_mu.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(l_mu * l_mu / (T::from_f64_lossy(2.0) * e_mu))
}

/// The composite `minsky_lower(theta ell, theta^2 (ell / theta))`, which
/// collapses algebraically to `(1/2) theta ell`.
pub fn chain_lower_bound<T: Real>(theta: T, ell: T) -> Result<T> {
    let e_mu = weighted_extremal_length(ell / theta, theta);
    minsky_lower(theta * ell, e_mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{FNCoords, PantsDecomposition, WeightedMulticurve};
    use crate::grafting::graft;
    use std::f64::consts::PI;

    fn grafted(theta: f64, ell: f64) -> GraftedSurface<f64> {
        let pd = PantsDecomposition::standard(2).unwrap();
        let fnc = FNCoords::new(vec![ell, 2.0, 1.2], vec![0.0, 0.0, 0.0]).unwrap();
        let mu = WeightedMulticurve::single(0, theta).unwrap();
        graft(&pd, &fnc, &mu).unwrap()
    }

    #[test]
    fn upper_bound_is_the_reciprocal_modulus() {
        let gs = grafted(2.0 * PI, 1.0);
        let e = extremal_length_upper(&gs, 0).unwrap();
        assert!((e - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((e - 0.15915).abs() < 1e-5);

        let square = grafted(0.8, 0.8);
        assert!((extremal_length_upper(&square, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doubling_the_weight_halves_the_upper_bound() {
        for &(theta, ell) in &[(1.0, 1.5), (PI, 0.4), (6.0, 2.0)] {
            let once = extremal_length_upper(&grafted(theta, ell), 0).unwrap();
            let twice = extremal_length_upper(&grafted(2.0 * theta, ell), 0).unwrap();
            assert!((once - 2.0 * twice).abs() <= 1e-15 * once);
        }
    }

    #[test]
    fn ungrafted_curves_have_no_cylinder_bound() {
        let gs = grafted(1.0, 1.0);
        assert!(extremal_length_upper(&gs, 1).is_err());
        assert!(extremal_length_upper(&gs, 99).is_err());
    }

    #[test]
    fn weighting_scales_extremal_length_quadratically() {
        assert_eq!(weighted_extremal_length(0.37, 1.0), 0.37);
        assert_eq!(weighted_extremal_length(0.5, 2.0), 2.0);
        assert_eq!(weighted_extremal_length(1.0, 3.0), 9.0);
    }

    #[test]
    fn energy_lower_bound_divides_length_squared_by_the_bound() {
        // theta = 2 pi, ell = 1: L = 2 pi and E = theta ell = 2 pi give pi.
        let l = 2.0 * PI;
        let e = weighted_extremal_length(1.0 / (2.0 * PI), 2.0 * PI);
        assert!((minsky_lower(l, e).unwrap() - PI).abs() < 1e-12);

        assert_eq!(minsky_lower(0.0, 1.0).unwrap(), 0.0);
        assert!(minsky_lower(1.0, 1e9).unwrap() < 1e-8);
        assert!(minsky_lower(1.0, 0.0).is_err());
        assert!(minsky_lower(1.0, -2.0).is_err());
    }

    #[test]
    fn bound_chain_collapses_to_half_the_multicurve_length() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let theta: f64 = (rng.gen_range(0.01f64.ln()..1000.0f64.ln())).exp();
            let ell: f64 = (rng.gen_range(0.01f64.ln()..100.0f64.ln())).exp();
            let half_l = 0.5 * theta * ell;
            let chained = chain_lower_bound(theta, ell).unwrap();
            assert!((chained - half_l).abs() <= 1e-12 * half_l.max(1.0));
        }
    }
}
