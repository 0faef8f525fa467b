//! The grafting surgery: inserting a flat cylinder into a hyperbolic
//! surface along each curve of a weighted multicurve.
//!
//! The result carries the Thurston metric, hyperbolic away from the
//! cylinders and flat on them, with total area
//! `4 pi (g - 1) + sum theta_i l_i`. Cylinder moduli feed the
//! extremal-length bounds, the holonomy of the underlying projective
//! structure is the quakebend representation along the same multicurve,
//! and the two-half-plane model gives the one case where the Thurston
//! metric has a closed form.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fuchsian::{
    quakebend_representation, reality_check, FNCoords, PantsDecomposition, SurfaceGroupRep,
    WeightedMulticurve,
};
use crate::kv::{push_line, sig17};
use crate::scalar::Real;

/// Flat right cylinder glued along one pants curve: circumference is the
/// hyperbolic length of the geodesic, height is the grafting weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder<T: Real> {
    pub curve: usize,
    pub circumference: T,
    pub height: T,
}

/// A hyperbolic surface grafted along a weighted multicurve, as a metric
/// object: the base surface in Fenchel-Nielsen coordinates plus one flat
/// cylinder per weighted curve.
#[derive(Debug, Clone)]
pub struct GraftedSurface<T: Real> {
    pub decomposition: PantsDecomposition,
    pub coords: FNCoords<T>,
    pub mu: WeightedMulticurve<T>,
    pub cylinders: Vec<Cylinder<T>>,
}

impl<T: Real> GraftedSurface<T> {
    pub fn genus(&self) -> usize {
        self.decomposition.genus
    }

    /// Hyperbolic area of the base surface, `4 pi (g - 1)`.
    pub fn base_area(&self) -> T {
        let four = T::from_f64_lossy(4.0);
        four * T::PI() * T::from_usize_lossy(self.decomposition.genus - 1)
    }

    /// Total Thurston-metric area, `4 pi (g - 1) + sum theta_i l_i`.
    pub fn area(&self) -> T {
        let flat = self
            .cylinders
            .iter()
            .fold(T::zero(), |acc, c| acc + c.height * c.circumference);
        self.base_area() + flat
    }

    /// Serializes to the key-value text format: decomposition size, the
    /// Fenchel-Nielsen coordinates, every cylinder, and the areas.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        push_line(&mut out, "surface", "grafted");
        push_line(&mut out, "genus", self.decomposition.genus);
        push_line(&mut out, "pants", self.decomposition.pants_count());
        push_line(&mut out, "curves", self.decomposition.curve_count());
        let f = |x: T| sig17(x.to_f64().unwrap_or(f64::NAN));
        for (i, &l) in self.coords.lengths.iter().enumerate() {
            push_line(&mut out, &format!("length.{i}"), f(l));
        }
        for (i, &t) in self.coords.twists.iter().enumerate() {
            push_line(&mut out, &format!("twist.{i}"), f(t));
        }
        push_line(&mut out, "cylinders", self.cylinders.len());
        for (i, c) in self.cylinders.iter().enumerate() {
            push_line(&mut out, &format!("cylinder.{i}.curve"), c.curve);
            push_line(
                &mut out,
                &format!("cylinder.{i}.circumference"),
                f(c.circumference),
            );
            push_line(&mut out, &format!("cylinder.{i}.height"), f(c.height));
        }
        push_line(&mut out, "base_area", f(self.base_area()));
        push_line(&mut out, "area", f(self.area()));
        out
    }
}

/// Grafts the surface along the multicurve: one cylinder per entry, with
/// the circumference read off the Fenchel-Nielsen length of the curve.
pub fn graft<T: Real>(
    pd: &PantsDecomposition,
    coords: &FNCoords<T>,
    mu: &WeightedMulticurve<T>,
) -> Result<GraftedSurface<T>> {
    coords.matches(pd)?;
    mu.supported_on(pd)?;
    let cylinders = mu
        .entries()
        .iter()
        .map(|&(curve, height)| Cylinder {
            curve,
            circumference: coords.lengths[curve],
            height,
        })
        .collect();
    Ok(GraftedSurface {
        decomposition: pd.clone(),
        coords: coords.clone(),
        mu: mu.clone(),
        cylinders,
    })
}

/// Holonomy of the projective structure underlying the graft: the
/// quakebend representation along the same weighted multicurve.
pub fn holonomy_of_graft<T: Real>(gs: &GraftedSurface<T>) -> Result<SurfaceGroupRep<T>> {
    Ok(quakebend_representation(&gs.decomposition, &gs.coords, &gs.mu)?.rep)
}

/// Hyperbolic length of the multicurve, `sum theta_i l_i`.
pub fn multicurve_length<T: Real>(
    coords: &FNCoords<T>,
    mu: &WeightedMulticurve<T>,
) -> Result<T> {
    let mut total = T::zero();
    for &(curve, weight) in mu.entries() {
        let l = *coords
            .lengths
            .get(curve)
            .ok_or(Error::CurveIndexOutOfRange {
                index: curve,
                count: coords.lengths.len(),
            })?;
        total += weight * l;
    }
    Ok(total)
}

/// Modulus of the flat cylinder of height `theta` and circumference `ell`,
/// the quotient of the sector `0 <= arg z <= theta` by `z -> exp(ell) z`.
pub fn annulus_modulus<T: Real>(theta: T, ell: T) -> Result<T> {
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::NonPositiveWeight {
            value: theta.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(ell > T::zero()) || !ell.is_finite() {
        return Err(Error::NonPositiveLength {
            value: ell.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(theta / ell)
}

/// Two half-planes through 0 and infinity meeting at angle `theta`: the
/// simplest grafted structure, whose Thurston metric is known in closed
/// form. The developed image is the sector `0 < arg z < theta + pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDiscDomain<T: Real> {
    angle: T,
}

impl<T: Real> TwoDiscDomain<T> {
    pub fn new(angle: T) -> Result<Self> {
        if !(angle > T::zero()) || !angle.is_finite() {
            return Err(Error::NonPositiveWeight {
                value: angle.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(TwoDiscDomain { angle })
    }

    pub fn angle(&self) -> T {
        self.angle
    }
}

/// Stratum of the Thurston metric on the two-disc domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoDiscRegion {
    /// Part of the first half-plane below the grafted sector: hyperbolic.
    HyperbolicFirst,
    /// The grafted sector between the two half-plane cores: flat.
    Flat,
    /// Part of the rotated half-plane above the sector: hyperbolic.
    HyperbolicSecond,
}

impl TwoDiscRegion {
    /// Tag used in CSV output.
    pub fn tag(self) -> &'static str {
        match self {
            TwoDiscRegion::HyperbolicFirst => "hyperbolic1",
            TwoDiscRegion::Flat => "flat",
            TwoDiscRegion::HyperbolicSecond => "hyperbolic2",
        }
    }
}

/// Thurston-metric density at polar coordinates `(r, phi)` of the
/// developed sector `0 < phi < theta + pi`. The angle may exceed `2 pi`
/// when `theta` does: the development unrolls the sheets.
///
/// The density is `1 / (r sin phi)` on the lower hyperbolic stratum
/// `phi <= pi/2`, `1 / r` on the flat sector, and `1 / (r sin(phi -
/// theta))` on the upper hyperbolic stratum `phi >= theta + pi/2`; the
/// three formulas agree on the two seams.
pub fn two_disc_density_polar<T: Real>(
    d: &TwoDiscDomain<T>,
    r: T,
    phi: T,
) -> Result<(T, TwoDiscRegion)> {
    let theta = d.angle;
    let inside = r > T::zero() && r.is_finite() && phi > T::zero() && phi < theta + T::PI();
    if !inside {
        return Err(Error::OutsideTwoDisc {
            radius: r.to_f64().unwrap_or(f64::NAN),
            angle: phi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let half = T::FRAC_PI_2();
    if phi <= half {
        Ok(((r * phi.sin()).recip(), TwoDiscRegion::HyperbolicFirst))
    } else if phi >= theta + half {
        Ok(((r * (phi - theta).sin()).recip(), TwoDiscRegion::HyperbolicSecond))
    } else {
        Ok((r.recip(), TwoDiscRegion::Flat))
    }
}

/// Thurston-metric density at a point of the developed two-disc domain,
/// with the argument of `z` taken in `(0, 2 pi]`.
pub fn two_disc_thurston_density<T: Real>(d: &TwoDiscDomain<T>, z: Complex<T>) -> Result<T> {
    let r = z.norm();
    let mut phi = z.arg();
    if phi <= T::zero() {
        phi += T::PI() + T::PI();
    }
    two_disc_density_polar(d, r, phi).map(|(density, _)| density)
}

/// Word length of the reality scan behind [`goldman_check`]: all reduced
/// words up to this length plus the pants-curve words.
pub const GOLDMAN_WORD_LEN: usize = 4;

/// Tests whether the grafted holonomy is Fuchsian by scanning traces of
/// short words: true when every trace is real within `tol`, which happens
/// exactly when every weight is a full turn (an integer multiple of
/// `2 pi`).
pub fn goldman_check<T: Real>(
    pd: &PantsDecomposition,
    coords: &FNCoords<T>,
    mu: &WeightedMulticurve<T>,
    tol: T,
) -> Result<bool> {
    let rep = quakebend_representation(pd, coords, mu)?.rep;
    Ok(reality_check(&rep, GOLDMAN_WORD_LEN, tol).all_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{assemble_representation, default_genus2};
    use std::f64::consts::PI;

    #[test]
    fn empty_multicurve_grafts_to_the_bare_surface() {
        let (pd, fnc) = default_genus2();
        let gs = graft(&pd, &fnc, &WeightedMulticurve::empty()).unwrap();
        assert!(gs.cylinders.is_empty());
        assert_eq!(gs.area(), gs.base_area());
        assert!((gs.area() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn single_full_turn_cylinder_adds_two_pi_of_area() {
        let pd = PantsDecomposition::standard(2).unwrap();
        let fnc = FNCoords::new(vec![1.0, 2.0, 1.2], vec![0.0, 0.0, 0.0]).unwrap();
        let mu = WeightedMulticurve::single(0, 2.0 * PI).unwrap();
        let gs = graft(&pd, &fnc, &mu).unwrap();
        assert_eq!(gs.cylinders.len(), 1);
        assert_eq!(gs.cylinders[0].curve, 0);
        assert_eq!(gs.cylinders[0].circumference, 1.0);
        assert_eq!(gs.cylinders[0].height, 2.0 * PI);
        assert!((gs.area() - 6.0 * PI).abs() < 1e-12);
        assert!((gs.area() - 18.8496).abs() < 1e-4);
    }

    #[test]
    fn area_adds_one_term_per_grafted_curve() {
        let pd = PantsDecomposition::standard(2).unwrap();
        let fnc = FNCoords::new(vec![1.0, 2.0, 1.2], vec![0.0, 0.0, 0.0]).unwrap();
        let mu = WeightedMulticurve::new(vec![(0, PI), (1, 2.0 * PI)]).unwrap();
        let gs = graft(&pd, &fnc, &mu).unwrap();
        assert!((gs.area() - (4.0 * PI + PI + 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn grafting_an_unknown_curve_is_an_error() {
        let (pd, fnc) = default_genus2();
        let mu = WeightedMulticurve::single(7, 1.0).unwrap();
        assert!(graft(&pd, &fnc, &mu).is_err());
        assert!(multicurve_length(&fnc, &mu).is_err());
    }

    #[test]
    fn circumferences_match_the_holonomy_translation_lengths() {
        let (pd, fnc) = default_genus2();
        let rep = assemble_representation(&pd, &fnc).unwrap().rep;
        let mu = WeightedMulticurve::new(vec![(0, 0.7), (2, 1.3)]).unwrap();
        let gs = graft(&pd, &fnc, &mu).unwrap();
        for c in &gs.cylinders {
            let l = rep.curve_length(c.curve).unwrap();
            assert!((l - c.circumference).abs() < 1e-9);
        }
    }

    #[test]
    fn multicurve_length_sums_weighted_lengths() {
        let fnc = FNCoords::new(vec![1.0, 2.0, 1.2], vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            multicurve_length(&fnc, &WeightedMulticurve::empty()).unwrap(),
            0.0
        );
        let one = WeightedMulticurve::single(0, 2.0 * PI).unwrap();
        assert!((multicurve_length(&fnc, &one).unwrap() - 2.0 * PI).abs() < 1e-12);
        let two = WeightedMulticurve::new(vec![(0, PI), (1, 2.0 * PI)]).unwrap();
        assert!((multicurve_length(&fnc, &two).unwrap() - 5.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn multicurve_length_is_linear_in_each_weight() {
        let (_, fnc) = default_genus2();
        let a = multicurve_length(&fnc, &WeightedMulticurve::single(1, 0.4).unwrap()).unwrap();
        let b = multicurve_length(&fnc, &WeightedMulticurve::single(1, 1.1).unwrap()).unwrap();
        let ab = multicurve_length(&fnc, &WeightedMulticurve::single(1, 1.5).unwrap()).unwrap();
        assert!((a + b - ab).abs() < 1e-12);
    }

    #[test]
    fn annulus_modulus_is_height_over_circumference() {
        assert!((annulus_modulus(2.0 * PI, 1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((annulus_modulus(0.73f64, 0.73).unwrap() - 1.0).abs() < 1e-12);
        assert!((annulus_modulus(PI, 2.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(annulus_modulus(0.0, 1.0).is_err());
        assert!(annulus_modulus(1.0, -2.0).is_err());
    }

    #[test]
    fn two_disc_density_matches_the_closed_forms() {
        let d = TwoDiscDomain::new(1.0).unwrap();
        let at = |z: Complex<f64>| two_disc_thurston_density(&d, z).unwrap();

        // Lower hyperbolic stratum: half-plane density 1 / (r sin phi).
        let z = Complex::from_polar(2.0, PI / 4.0);
        assert!((at(z) - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((at(z) - 0.70711).abs() < 1e-5);

        // Flat sector: density 1 / r.
        let z = Complex::from_polar(3.0, PI / 2.0 + 0.3);
        assert!((at(z) - 1.0 / 3.0).abs() < 1e-12);

        // Upper hyperbolic stratum: density 1 / (r sin(phi - theta)).
        let z = Complex::from_polar(0.5, 1.0 + PI - 0.2);
        assert!((at(z) - 1.0 / (0.5 * (PI - 0.2).sin())).abs() < 1e-12);

        // Seam point i: both adjacent formulas give 1.
        assert!((at(Complex::new(0.0, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_disc_regions_partition_the_sector() {
        let d = TwoDiscDomain::new(1.0).unwrap();
        let region = |phi: f64| two_disc_density_polar(&d, 1.0, phi).unwrap().1;
        assert_eq!(region(0.3), TwoDiscRegion::HyperbolicFirst);
        assert_eq!(region(PI / 2.0), TwoDiscRegion::HyperbolicFirst);
        assert_eq!(region(2.0), TwoDiscRegion::Flat);
        assert_eq!(region(1.0 + PI / 2.0), TwoDiscRegion::HyperbolicSecond);
        assert_eq!(region(1.0 + PI - 0.01), TwoDiscRegion::HyperbolicSecond);
    }

    #[test]
    fn wide_angles_unroll_past_a_full_turn() {
        // theta = 5 develops onto a sector wider than 2 pi; angles beyond
        // 2 pi are reachable only through the polar form.
        let d = TwoDiscDomain::new(5.0).unwrap();
        let (rho, region) = two_disc_density_polar(&d, 2.0, 7.0).unwrap();
        assert_eq!(region, TwoDiscRegion::HyperbolicSecond);
        assert!((rho - 1.0 / (2.0 * 2.0f64.sin())).abs() < 1e-12);

        // A negative-argument complex point wraps to the flat sector.
        let z = Complex::from_polar(1.0, -0.3);
        let rho = two_disc_thurston_density(&d, z).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_is_rejected_outside_the_sector() {
        let d = TwoDiscDomain::new(1.0).unwrap();
        assert!(two_disc_thurston_density(&d, Complex::new(0.0, 0.0)).is_err());
        assert!(two_disc_thurston_density(&d, Complex::from_polar(1.0, -0.3)).is_err());
        assert!(two_disc_density_polar(&d, 1.0, 1.0 + PI).is_err());
        assert!(two_disc_density_polar(&d, -1.0, 1.0).is_err());
        assert!(TwoDiscDomain::new(0.0).is_err());
    }

    #[test]
    fn density_is_continuous_across_both_seams() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let step = 1e-7;
        for _ in 0..100 {
            let theta: f64 = (rng.gen_range(0.05f64.ln()..(4.0 * PI).ln())).exp();
            let r: f64 = (rng.gen_range(0.1f64.ln()..10.0f64.ln())).exp();
            let d = TwoDiscDomain::new(theta).unwrap();
            let flat = 1.0 / r;

            for seam in [PI / 2.0, theta + PI / 2.0] {
                // One-sided formula values at the seam itself agree.
                let (rho, _) = two_disc_density_polar(&d, r, seam).unwrap();
                assert!((rho - flat).abs() <= 1e-12 * flat);
                assert!((1.0 / (r * (PI / 2.0).sin()) - flat).abs() <= 1e-12 * flat);

                // The jump across the seam vanishes with the step: the
                // density is continuous, merely non-smooth, there.
                let below = two_disc_density_polar(&d, r, seam - step).unwrap().0;
                let above = two_disc_density_polar(&d, r, seam + step).unwrap().0;
                assert!((below - above).abs() <= 1e-5 * flat);
            }
        }
    }

    #[test]
    fn holonomy_of_graft_is_the_quakebend_representation() {
        let (pd, fnc) = default_genus2();
        let mu = WeightedMulticurve::single(0, 2.0 * PI).unwrap();
        let gs = graft(&pd, &fnc, &mu).unwrap();
        let rep = holonomy_of_graft(&gs).unwrap();
        assert_eq!(rep.genus, 2);
        assert!(rep.relation_residual() < 1e-9);
        let direct = quakebend_representation(&pd, &fnc, &mu).unwrap().rep;
        for (g, h) in rep.generators.iter().zip(&direct.generators) {
            assert_eq!(g.distance_up_to_sign(h), 0.0);
        }
    }

    #[test]
    fn goldman_check_accepts_exactly_full_turns() {
        let (pd, fnc) = default_genus2();
        let check = |w: f64| {
            let mu = WeightedMulticurve::single(0, w).unwrap();
            goldman_check(&pd, &fnc, &mu, 1e-8).unwrap()
        };
        assert!(check(2.0 * PI));
        assert!(check(4.0 * PI));
        assert!(!check(3.0));
        // Shifting any weight by a full turn preserves the verdict.
        assert_eq!(check(1.7), check(1.7 + 2.0 * PI));
        assert_eq!(check(2.0 * PI), check(4.0 * PI));
    }

    #[test]
    fn serialization_lists_coordinates_and_cylinders() {
        let pd = PantsDecomposition::standard(2).unwrap();
        let fnc = FNCoords::new(vec![1.0, 2.0, 1.2], vec![0.0, 0.0, 0.0]).unwrap();
        let mu = WeightedMulticurve::single(0, 2.0 * PI).unwrap();
        let gs = graft(&pd, &fnc, &mu).unwrap();
        let kv = gs.to_kv();
        assert!(kv.contains("surface = grafted\n"));
        assert!(kv.contains("genus = 2\n"));
        assert!(kv.contains("cylinders = 1\n"));
        assert!(kv.contains("cylinder.0.curve = 0\n"));
        assert!(kv.contains(&format!("area = {}\n", sig17(6.0 * PI))));
        assert_eq!(kv, gs.to_kv());
    }
}
