//! Discrete Dirichlet energy of equivariant maps into the hyperbolic plane.
//!
//! The energy of a map `f` is the cotangent-weighted sum
//! `(1/4) sum_T sum_k cot(alpha_k) d(f_i, f_j)^2` over mesh triangles,
//! with the angles read off the domain metric of each chart and the
//! distances measured in the target. For the identity on an ungrafted
//! surface the sum reproduces the hyperbolic area `4 pi (g - 1)` up to the
//! usual quadratic discretization error; for the collapsing map the flat
//! cylinder part contributes exactly `(1/2) theta l`.

use num_complex::Complex;
use rayon::prelude::*;

use super::{triangle_cotangents, EnergyReport, EquivariantMap, MetricMesh, TriangleTag};
use crate::error::{Error, Result};
use crate::grafting::GraftedSurface;
use crate::moebius::h2;
use crate::scalar::Real;

/// Fixed chunk length for parallel sums, so the reduction tree does not
/// depend on scheduling and results stay bitwise reproducible.
const SUM_CHUNK: usize = 1024;

/// Cotangent weights of every triangle, in mesh order.
pub(crate) fn cotangent_table<T: Real>(mesh: &MetricMesh<T>) -> Result<Vec<[T; 3]>> {
    mesh.triangles.iter().map(triangle_cotangents).collect()
}

/// Hyperbolic-part and flat-part energies of the vertex values under the
/// precomputed cotangent table.
pub(crate) fn energy_breakdown<T: Real>(
    mesh: &MetricMesh<T>,
    cots: &[[T; 3]],
    values: &[Complex<T>],
) -> (T, T) {
    let quarter = T::from_f64_lossy(0.25);
    let partials: Vec<(T, T)> = mesh
        .triangles
        .par_chunks(SUM_CHUNK)
        .zip(cots.par_chunks(SUM_CHUNK))
        .map(|(tris, weights)| {
            let mut hyp = T::zero();
            let mut flat = T::zero();
            for (tri, c) in tris.iter().zip(weights.iter()) {
                let mut e = T::zero();
                for k in 0..3 {
                    let p = values[tri.vertices[(k + 1) % 3]];
                    let q = values[tri.vertices[(k + 2) % 3]];
                    let d = h2::dist(p, q);
                    e += c[k] * d * d;
                }
                match tri.tag {
                    TriangleTag::Hyperbolic => hyp += quarter * e,
                    TriangleTag::Flat => flat += quarter * e,
                }
            }
            (hyp, flat)
        })
        .collect();
    partials
        .into_iter()
        .fold((T::zero(), T::zero()), |acc, p| (acc.0 + p.0, acc.1 + p.1))
}

/// Discrete Dirichlet energy of the map, split into the contributions of
/// hyperbolic and flat charts. Errors on degenerate triangles, on a map of
/// the wrong size, and on values that produce a non-finite sum.
pub fn discrete_energy<T: Real>(
    mesh: &MetricMesh<T>,
    map: &EquivariantMap<T>,
) -> Result<EnergyReport<T>> {
    if map.values.len() != mesh.vertices.len() {
        return Err(Error::MeshValidation {
            detail: format!(
                "map carries {} values for {} vertices",
                map.values.len(),
                mesh.vertices.len()
            ),
        });
    }
    if map.transitions.len() != mesh.seams.len() {
        return Err(Error::MeshValidation {
            detail: format!(
                "map carries {} transitions for {} seam groups",
                map.transitions.len(),
                mesh.seams.len()
            ),
        });
    }
    let cots = cotangent_table(mesh)?;
    let (hyperbolic, flat) = energy_breakdown(mesh, &cots, &map.values);
    let energy = hyperbolic + flat;
    if !energy.is_finite() {
        return Err(Error::MeshValidation {
            detail: "map values produce a non-finite energy".to_string(),
        });
    }
    Ok(EnergyReport { energy, hyperbolic, flat, trace: Vec::new() })
}

/// Energy of the collapsing map in closed form: each cylinder contributes
/// `(1/2) theta l` and the hyperbolic part contributes its area.
pub fn collapsing_energy_closed_form<T: Real>(gs: &GraftedSurface<T>) -> T {
    let half = T::from_f64_lossy(0.5);
    let cylinders = gs
        .cylinders
        .iter()
        .fold(T::zero(), |acc, c| acc + half * c.height * c.circumference);
    cylinders + gs.base_area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{default_genus2, FNCoords, PantsDecomposition, WeightedMulticurve};
    use crate::grafting::graft;
    use crate::mesh::{
        build_grafted_mesh, collapsing_map, MeshTriangle, MeshVertex, Piece,
    };
    use crate::moebius::MoebiusMap;
    use std::f64::consts::PI;

    fn identity_energy(resolution: f64) -> f64 {
        let (pd, coords) = default_genus2();
        let gs = graft(&pd, &coords, &WeightedMulticurve::empty()).unwrap();
        let mesh = build_grafted_mesh(&gs, resolution).unwrap();
        let map = collapsing_map(&gs, &mesh).unwrap();
        let report = discrete_energy(&mesh, &map).unwrap();
        assert_eq!(report.flat, 0.0);
        assert_eq!(report.energy, report.hyperbolic);
        report.energy
    }

    #[test]
    fn identity_energy_matches_the_hyperbolic_area() {
        let four_pi = 4.0 * PI;
        let energy = identity_energy(0.1);
        assert!(
            (energy - four_pi).abs() / four_pi < 0.02,
            "identity energy {energy} is not within 2 percent of {four_pi}"
        );
    }

    #[test]
    fn refinement_shrinks_the_identity_energy_error() {
        let four_pi = 4.0 * PI;
        let coarse = (identity_energy(0.1) - four_pi).abs();
        let fine = (identity_energy(0.05) - four_pi).abs();
        assert!(
            fine <= 0.65 * coarse,
            "error went from {coarse} to {fine} under refinement"
        );
    }

    #[test]
    fn collapse_energy_hits_the_upper_bound() {
        let pd = PantsDecomposition::standard(2).unwrap();
        let coords = FNCoords::new(vec![1.0, 2.0, 1.2], vec![0.3, -0.1, 0.0]).unwrap();
        let theta = 2.0 * PI;
        let mu = WeightedMulticurve::single(0, theta).unwrap();
        let gs = graft(&pd, &coords, &mu).unwrap();
        let mesh = build_grafted_mesh(&gs, 0.1).unwrap();
        let map = collapsing_map(&gs, &mesh).unwrap();
        let report = discrete_energy(&mesh, &map).unwrap();

        let five_pi = 5.0 * PI;
        assert!((report.energy - five_pi).abs() / five_pi < 0.02);
        // The flat part is a telescoping sum over cylinder cells and equals
        // (1/2) theta l with no discretization error at all.
        let half_theta_l = 0.5 * theta * 1.0;
        assert!((report.flat - half_theta_l).abs() < 1e-9 * half_theta_l);
        let four_pi = 4.0 * PI;
        assert!((report.hyperbolic - four_pi).abs() / four_pi < 0.02);
    }

    #[test]
    fn closed_form_is_exact() {
        let (pd, coords) = default_genus2();
        let plain = graft(&pd, &coords, &WeightedMulticurve::empty()).unwrap();
        assert!((collapsing_energy_closed_form(&plain) - 4.0 * PI).abs() < 1e-12);

        let coords1 = FNCoords::new(vec![1.0, 2.0, 1.2], vec![0.3, -0.1, 0.0]).unwrap();
        let grafted = graft(
            &pd,
            &coords1,
            &WeightedMulticurve::single(0, 2.0 * PI).unwrap(),
        )
        .unwrap();
        assert!((collapsing_energy_closed_form(&grafted) - 5.0 * PI).abs() < 1e-12);

        let coords2 = FNCoords::new(vec![2.0, 2.0, 1.2], vec![0.0, 0.0, 0.0]).unwrap();
        let tall = graft(&pd, &coords2, &WeightedMulticurve::single(0, PI).unwrap()).unwrap();
        assert!((collapsing_energy_closed_form(&tall) - 5.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn constant_map_has_zero_energy() {
        let (pd, coords) = default_genus2();
        let gs = graft(&pd, &coords, &WeightedMulticurve::empty()).unwrap();
        let mesh = build_grafted_mesh(&gs, 0.3).unwrap();
        let map = EquivariantMap {
            values: vec![num_complex::Complex::new(0.0, 1.0); mesh.vertices.len()],
            transitions: mesh.seams.iter().map(|g| g.transition).collect(),
        };
        let report = discrete_energy(&mesh, &map).unwrap();
        assert_eq!(report.energy, 0.0);
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let ln2 = 2.0_f64.ln();
        let mesh = MetricMesh {
            pieces: vec![Piece::Hyperbolic { pants: 0, frame: MoebiusMap::identity() }],
            vertices: vec![
                MeshVertex { piece: 0, position: num_complex::Complex::new(0.0, 1.0) },
                MeshVertex { piece: 0, position: num_complex::Complex::new(0.0, 2.0) },
                MeshVertex { piece: 0, position: num_complex::Complex::new(0.0, 4.0) },
            ],
            triangles: vec![MeshTriangle {
                vertices: [0, 1, 2],
                lengths: [ln2, 2.0 * ln2, ln2],
                tag: TriangleTag::Hyperbolic,
            }],
            seams: vec![],
            genus: 2,
            resolution: 1.0,
        };
        let map = EquivariantMap {
            values: mesh.vertices.iter().map(|v| v.position).collect(),
            transitions: vec![],
        };
        assert!(discrete_energy(&mesh, &map).is_err());
    }
}
