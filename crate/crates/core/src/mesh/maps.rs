//! Reference equivariant maps used to seed the harmonic flow.
//!
//! The collapsing map keeps the hyperbolic pieces of the grafted surface
//! pointwise and squashes each flat cylinder onto its core geodesic, so its
//! energy realizes the upper bound `(1/2) theta l + 4 pi (g - 1)` up to the
//! discretization error of the hyperbolic part. On an ungrafted surface it
//! degenerates to the identity, the canonical zero-excess competitor.

use num_complex::Complex;

use super::{EquivariantMap, MetricMesh, Piece};
use crate::error::{Error, Result};
use crate::grafting::GraftedSurface;
use crate::scalar::Real;

/// Collapsing map of a grafted-surface mesh: hyperbolic vertices go to
/// their developed chart positions, cylinder vertices to the point of the
/// core geodesic under their own column. The result is exactly
/// equivariant for the seam transitions the mesh carries. Errors when the
/// mesh does not belong to the given surface.
pub fn collapsing_map<T: Real>(
    gs: &GraftedSurface<T>,
    mesh: &MetricMesh<T>,
) -> Result<EquivariantMap<T>> {
    let mismatch = |detail: String| Err(Error::MeshValidation { detail });
    if mesh.genus != gs.genus() {
        return mismatch(format!(
            "mesh has genus {} but the surface has genus {}",
            mesh.genus,
            gs.genus()
        ));
    }
    let close = |a: T, b: T| (a - b).abs() <= T::from_f64_lossy(1e-12) * (T::one() + a.abs());
    let mut flat_pieces = 0usize;
    for piece in &mesh.pieces {
        if let Piece::Flat { curve, circumference, height, .. } = piece {
            flat_pieces += 1;
            let cyl = gs.cylinders.iter().find(|c| c.curve == *curve);
            let consistent = cyl
                .map(|c| close(c.circumference, *circumference) && close(c.height, *height))
                .unwrap_or(false);
            if !consistent {
                return mismatch(format!("mesh cylinder on curve {curve} is not on the surface"));
            }
        }
    }
    if flat_pieces != gs.cylinders.len() {
        return mismatch(format!(
            "mesh has {flat_pieces} cylinder charts but the surface grafts {}",
            gs.cylinders.len()
        ));
    }

    let four = T::from_f64_lossy(4.0);
    let values = mesh
        .vertices
        .iter()
        .map(|v| match &mesh.pieces[v.piece] {
            Piece::Hyperbolic { frame, .. } => frame.apply_complex(v.position),
            Piece::Flat { frame, circumference, .. } => {
                // Column x lands on the boundary point of arclength x; the
                // height coordinate is forgotten.
                let core = Complex::new(T::zero(), (v.position.re - *circumference / four).exp());
                frame.apply_complex(core)
            }
        })
        .collect();
    let transitions = mesh.seams.iter().map(|g| g.transition).collect();
    Ok(EquivariantMap { values, transitions })
}
