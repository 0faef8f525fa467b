//! Synchronous discrete harmonic map flow on a grafted-surface mesh.
//!
//! Vertices identified by seam groups form orbits; one root value per
//! orbit is flowed and every member value is recovered through its gauge
//! map, so equivariance holds exactly after every sweep. A sweep replaces
//! each root value by a step toward the weighted Karcher mean of its
//! neighbors. The weights are flat cotangents of the vertex star lifted to
//! the tangent plane (radial edge lengths and intrinsic corner angles, far
//! sides replaced by chords): lifted stars tile a disc, so the weighted
//! log-sum vanishes identically at the discrete identity and the flow
//! keeps it fixed instead of chasing curvature residue. The reported
//! energy uses the intrinsic per-triangle cotangents; whenever a full step
//! would increase it, the step is halved until the sweep does not.

use num_complex::Complex;
use rayon::prelude::*;

use super::energy::{cotangent_table, energy_breakdown};
use super::{
    cotangents_of, triangle_angles, EnergyReport, EquivariantMap, MetricMesh, TraceRow,
};
use crate::error::{Error, Result};
use crate::moebius::{h2, MoebiusMap};
use crate::scalar::Real;

/// Shrink factor for the step length when a sweep would increase energy.
const DAMPING: f64 = 0.5;

/// Step lengths below this fraction of a full Karcher step count as no
/// motion and end the line search.
const MIN_STEP: f64 = 1e-12;

/// A weighted log-sum whose norm falls below this fraction of its total
/// term size is floating-point residue of a critical vertex; the vertex
/// does not move.
const SKIP_RESIDUAL: f64 = 1e-12;

/// Largest imaginary entry tolerated in a target transition.
const FUCHSIAN_TOL: f64 = 1e-8;

/// Largest seam violation tolerated in the initial map.
const INITIAL_RESIDUAL: f64 = 1e-6;

/// Union-find over mesh vertices carrying the gauge maps of the
/// identifications: `f(v) = to_parent[v](f(parent[v]))` for any map `f`
/// that satisfies the seam contracts.
struct Gauge<T: Real> {
    parent: Vec<usize>,
    to_parent: Vec<MoebiusMap<T>>,
}

impl<T: Real> Gauge<T> {
    fn new(n: usize) -> Self {
        Gauge {
            parent: (0..n).collect(),
            to_parent: vec![MoebiusMap::identity(); n],
        }
    }

    /// Root of `v` and the gauge map with `f(v) = m(f(root))`; compresses
    /// the path it walks.
    fn find(&mut self, v: usize) -> (usize, MoebiusMap<T>) {
        let mut chain = Vec::new();
        let mut node = v;
        while self.parent[node] != node {
            chain.push(node);
            node = self.parent[node];
        }
        let root = node;
        let mut acc = MoebiusMap::identity();
        for &link in chain.iter().rev() {
            acc = self.to_parent[link].compose(&acc);
            self.to_parent[link] = acc;
            self.parent[link] = root;
        }
        if v == root {
            (root, MoebiusMap::identity())
        } else {
            (root, self.to_parent[v])
        }
    }

    /// Records `f(b) = g(f(a))`. Joining two vertices already in one orbit
    /// checks that the new relation agrees with the recorded gauge.
    fn union(&mut self, a: usize, b: usize, g: &MoebiusMap<T>) -> Result<()> {
        let (ra, ma) = self.find(a);
        let (rb, mb) = self.find(b);
        if ra == rb {
            let expected = g.compose(&ma);
            if !mb.eq_up_to_sign(&expected, T::from_f64_lossy(1e-6)) {
                return Err(Error::MeshValidation {
                    detail: format!("seam identifications of vertices {a} and {b} are inconsistent"),
                });
            }
            return Ok(());
        }
        self.parent[rb] = ra;
        self.to_parent[rb] = mb.inverse().compose(g).compose(&ma);
        Ok(())
    }
}

/// One neighbor term of an orbit update: weight, the member vertex whose
/// value enters, and the pullback into the root frame.
struct GatherTerm<T: Real> {
    weight: T,
    neighbor: usize,
    pull: MoebiusMap<T>,
}

/// Flows the map toward the discrete harmonic representative by
/// synchronous Karcher-step sweeps, keeping the reported energy monotone
/// non-increasing. Stops when the per-sweep decrement drops below `tol`
/// or after `max_sweeps` sweeps. The trace records the initial state and
/// one row per sweep. Errors on a non-Fuchsian target, on an initial map
/// that is out of gauge, and on non-finite energies.
pub fn harmonic_flow<T: Real>(
    mesh: &MetricMesh<T>,
    map0: &EquivariantMap<T>,
    max_sweeps: usize,
    tol: T,
) -> Result<(EquivariantMap<T>, EnergyReport<T>)> {
    let n = mesh.vertices.len();
    if map0.values.len() != n {
        return Err(Error::MeshValidation {
            detail: format!("map carries {} values for {n} vertices", map0.values.len()),
        });
    }
    if map0.transitions.len() != mesh.seams.len() {
        return Err(Error::MeshValidation {
            detail: format!(
                "map carries {} transitions for {} seam groups",
                map0.transitions.len(),
                mesh.seams.len()
            ),
        });
    }

    let mut max_imag = T::zero();
    for g in &map0.transitions {
        for z in [g.a, g.b, g.c, g.d] {
            max_imag = max_imag.max(z.im.abs());
        }
    }
    if max_imag > T::from_f64_lossy(FUCHSIAN_TOL) {
        return Err(Error::TargetNotFuchsian {
            max_imag: max_imag.to_f64().unwrap_or(f64::NAN),
        });
    }
    let transitions: Vec<MoebiusMap<T>> = map0
        .transitions
        .iter()
        .map(|g| MoebiusMap::from_real(g.a.re, g.b.re, g.c.re, g.d.re))
        .collect::<Result<_>>()?;

    for (i, z) in map0.values.iter().enumerate() {
        if !(z.im > T::zero()) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::MeshValidation {
                detail: format!("initial value of vertex {i} is outside the upper half-plane"),
            });
        }
    }
    let residual = map0.seam_residual(mesh);
    if !(residual <= T::from_f64_lossy(INITIAL_RESIDUAL)) {
        return Err(Error::MeshValidation {
            detail: format!("initial map violates its seam identifications by {residual}"),
        });
    }

    let mut gauge = Gauge::new(n);
    for (group, g) in mesh.seams.iter().zip(transitions.iter()) {
        for (&a, &b) in group.from.iter().zip(group.to.iter()) {
            gauge.union(a, b, g)?;
        }
    }
    let mut root_index = vec![usize::MAX; n];
    let mut roots = Vec::new();
    let mut member = Vec::with_capacity(n);
    for v in 0..n {
        let (r, m) = gauge.find(v);
        if root_index[r] == usize::MAX {
            root_index[r] = roots.len();
            roots.push(r);
        }
        member.push((root_index[r], m));
    }

    // Per-orbit neighbor terms with tangent-lift flat cotangent weights.
    let mut gather: Vec<Vec<GatherTerm<T>>> = (0..roots.len()).map(|_| Vec::new()).collect();
    let two = T::from_f64_lossy(2.0);
    let four = T::from_f64_lossy(4.0);
    for tri in &mesh.triangles {
        let angles = triangle_angles(&tri.lengths, tri.tag).ok_or_else(|| Error::MeshValidation {
            detail: "degenerate triangle in the flow mesh".to_string(),
        })?;
        for c in 0..3 {
            let v = tri.vertices[c];
            let a = tri.vertices[(c + 1) % 3];
            let b = tri.vertices[(c + 2) % 3];
            let ra = tri.lengths[(c + 2) % 3];
            let rb = tri.lengths[(c + 1) % 3];
            let s_half = (angles[c] / two).sin();
            let chord = ((ra - rb) * (ra - rb) + four * ra * rb * s_half * s_half).sqrt();
            let cots = cotangents_of(&[chord, rb, ra], false).ok_or_else(|| {
                Error::MeshValidation {
                    detail: "degenerate tangent lift in the flow mesh".to_string(),
                }
            })?;
            let (ri, m_v) = (member[v].0, member[v].1);
            let pull = m_v.inverse();
            gather[ri].push(GatherTerm { weight: cots[2], neighbor: a, pull });
            gather[ri].push(GatherTerm { weight: cots[1], neighbor: b, pull });
        }
    }
    let weight_sums: Vec<T> = gather
        .iter()
        .map(|terms| terms.iter().fold(T::zero(), |acc, t| acc + t.weight))
        .collect();
    for (ri, &k) in weight_sums.iter().enumerate() {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::MeshValidation {
                detail: format!("orbit of vertex {} has weight sum {k}", roots[ri]),
            });
        }
    }

    let materialize = |x: &[Complex<T>]| -> Vec<Complex<T>> {
        member
            .par_iter()
            .map(|&(ri, ref m)| m.apply_complex(x[ri]))
            .collect()
    };

    let cots = cotangent_table(mesh)?;
    let mut x: Vec<Complex<T>> = roots.iter().map(|&r| map0.values[r]).collect();
    let mut values = materialize(&x);
    let (mut hyp, mut flat) = energy_breakdown(mesh, &cots, &values);
    let mut energy = hyp + flat;
    if !energy.is_finite() {
        return Err(Error::FlowDiverged { iteration: 0 });
    }
    let mut trace = vec![TraceRow { iteration: 0, energy, max_displacement: T::zero() }];

    for sweep in 1..=max_sweeps {
        let dirs: Vec<Complex<T>> = (0..roots.len())
            .into_par_iter()
            .map(|ri| {
                let base = x[ri];
                let mut sum = Complex::new(T::zero(), T::zero());
                let mut size = T::zero();
                for term in &gather[ri] {
                    let lg = h2::log(base, term.pull.apply_complex(values[term.neighbor]));
                    sum += Complex::new(term.weight * lg.re, term.weight * lg.im);
                    size += term.weight.abs() * lg.norm();
                }
                let norm = sum.norm();
                if !(norm > T::from_f64_lossy(SKIP_RESIDUAL) * size) {
                    return Complex::new(T::zero(), T::zero());
                }
                Complex::new(sum.re / weight_sums[ri], sum.im / weight_sums[ri])
            })
            .collect();
        let max_dir = dirs
            .iter()
            .fold(T::zero(), |acc, d| acc.max(d.norm()));

        let mut lambda = T::one();
        let (decrement, displacement) = loop {
            let candidate: Vec<Complex<T>> = x
                .par_iter()
                .zip(dirs.par_iter())
                .map(|(&p, &d)| {
                    if d.re == T::zero() && d.im == T::zero() {
                        p
                    } else {
                        h2::exp(p, Complex::new(lambda * d.re, lambda * d.im))
                    }
                })
                .collect();
            let new_values = materialize(&candidate);
            let (h, f) = energy_breakdown(mesh, &cots, &new_values);
            let e_new = h + f;
            if !e_new.is_finite() {
                return Err(Error::FlowDiverged { iteration: sweep });
            }
            if e_new <= energy {
                let drop = energy - e_new;
                x = candidate;
                values = new_values;
                hyp = h;
                flat = f;
                energy = e_new;
                break (drop, lambda * max_dir);
            }
            lambda *= T::from_f64_lossy(DAMPING);
            if lambda < T::from_f64_lossy(MIN_STEP) {
                break (T::zero(), T::zero());
            }
        };
        trace.push(TraceRow { iteration: sweep, energy, max_displacement: displacement });
        if decrement < tol {
            break;
        }
    }

    let out = EquivariantMap { values, transitions };
    debug_assert!(out.seam_residual(mesh) < T::from_f64_lossy(1e-9));
    Ok((out, EnergyReport { energy, hyperbolic: hyp, flat, trace }))
}
