//! Piecewise geodesic triangle meshes of grafted surfaces and equivariant
//! maps from them into a Fuchsian target.
//!
//! A mesh is a disjoint union of chart pieces: two hyperbolic charts per
//! pair of pants (the front hexagon and its reflected back copy, both drawn
//! in the same upper half-plane) and one flat chart per grafted cylinder.
//! Vertices that represent the same surface point in different charts are
//! recorded in seam groups; each group carries the target-group element `g`
//! with `f(to[j]) = g(f(from[j]))` for every equivariant map `f`. The mesh
//! itself is immutable once built; maps into the target vary over it.

pub mod build;
pub mod energy;
pub mod flow;
pub mod maps;
pub mod sandwich;

pub use build::build_grafted_mesh;
pub use energy::{collapsing_energy_closed_form, discrete_energy};
pub use flow::harmonic_flow;
pub use maps::collapsing_map;
pub use sandwich::{sandwich_report, SandwichReport};

use crate::error::{Error, Result};
use crate::kv;
use crate::moebius::{h2, MoebiusMap};
use crate::scalar::Real;
use num_complex::Complex;

/// Chart piece of a grafted-surface mesh.
#[derive(Debug, Clone)]
pub enum Piece<T: Real> {
    /// One hexagon half (front or back) of a pair of pants. `frame` is the
    /// pants placement; it carries chart positions to the target cover.
    Hyperbolic { pants: usize, frame: MoebiusMap<T> },
    /// Flat cylinder chart `[0, circumference] x [0, height]` for a grafted
    /// curve. `frame` maps the standard axis frame of the curve's first end
    /// into the target cover.
    Flat {
        curve: usize,
        frame: MoebiusMap<T>,
        circumference: T,
        height: T,
    },
}

impl<T: Real> Piece<T> {
    pub fn is_flat(&self) -> bool {
        matches!(self, Piece::Flat { .. })
    }
}

/// Mesh vertex: a chart reference and a position inside that chart.
#[derive(Debug, Clone, Copy)]
pub struct MeshVertex<T: Real> {
    pub piece: usize,
    pub position: Complex<T>,
}

/// Metric type of a triangle, matching the kind of its chart piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleTag {
    Hyperbolic,
    Flat,
}

/// Geodesic triangle with stored side lengths; `lengths[k]` is the side
/// opposite `vertices[k]`. All three vertices lie in one piece.
#[derive(Debug, Clone)]
pub struct MeshTriangle<T: Real> {
    pub vertices: [usize; 3],
    pub lengths: [T; 3],
    pub tag: TriangleTag,
}

/// Identification of two vertex lists across charts. Equivariant maps must
/// satisfy `f(to[j]) = transition(f(from[j]))` for every `j`; consecutive
/// entries run along the identified seam, so spacing is preserved.
#[derive(Debug, Clone)]
pub struct SeamGroup<T: Real> {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub transition: MoebiusMap<T>,
}

/// Triangle mesh of a grafted surface, cut into chart pieces and glued back
/// along seam groups.
#[derive(Debug, Clone)]
pub struct MetricMesh<T: Real> {
    pub pieces: Vec<Piece<T>>,
    pub vertices: Vec<MeshVertex<T>>,
    pub triangles: Vec<MeshTriangle<T>>,
    pub seams: Vec<SeamGroup<T>>,
    pub genus: usize,
    pub resolution: T,
}

/// Map from mesh vertices into the upper half-plane, equivariant with
/// respect to the seam transitions it carries (one per mesh seam group).
#[derive(Debug, Clone)]
pub struct EquivariantMap<T: Real> {
    pub values: Vec<Complex<T>>,
    pub transitions: Vec<MoebiusMap<T>>,
}

impl<T: Real> EquivariantMap<T> {
    /// Largest target-distance violation of the seam contracts.
    pub fn seam_residual(&self, mesh: &MetricMesh<T>) -> T {
        let mut worst = T::zero();
        for (group, g) in mesh.seams.iter().zip(self.transitions.iter()) {
            for (&a, &b) in group.from.iter().zip(group.to.iter()) {
                let image = g.apply_complex(self.values[a]);
                let r = h2::dist(image, self.values[b]);
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }
}

/// One row of a flow trace: state after `iteration` sweeps.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow<T: Real> {
    pub iteration: usize,
    pub energy: T,
    pub max_displacement: T,
}

/// Discrete Dirichlet energy of a map, split by chart metric, with the
/// per-sweep trace when the map came out of a flow.
#[derive(Debug, Clone)]
pub struct EnergyReport<T: Real> {
    pub energy: T,
    pub hyperbolic: T,
    pub flat: T,
    pub trace: Vec<TraceRow<T>>,
}

impl<T: Real> EnergyReport<T> {
    /// CSV rendering of the trace: `iteration,energy,max_displacement`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,energy,max_displacement\n");
        for row in &self.trace {
            out.push_str(&format!(
                "{},{},{}\n",
                row.iteration,
                kv::sig17(row.energy.to_f64().unwrap_or(f64::NAN)),
                kv::sig17(row.max_displacement.to_f64().unwrap_or(f64::NAN)),
            ));
        }
        out
    }
}

/// Differences `s - a`, `s - b`, `s - c` from the side lengths; all three
/// are positive exactly when the sides satisfy the strict triangle
/// inequality.
fn triangle_excesses<T: Real>(l: &[T; 3]) -> [T; 3] {
    let two = T::from_f64_lossy(2.0);
    [
        (l[1] + l[2] - l[0]) / two,
        (l[2] + l[0] - l[1]) / two,
        (l[0] + l[1] - l[2]) / two,
    ]
}

/// Half-angle tangents at the three vertices of a geodesic triangle with
/// the given side lengths; `None` for degenerate sides. Only differences of
/// lengths enter, so near-degenerate slivers stay accurate.
fn half_angle_tangents<T: Real>(l: &[T; 3], hyperbolic: bool) -> Option<[T; 3]> {
    let e = triangle_excesses(l);
    if !(e[0] > T::zero() && e[1] > T::zero() && e[2] > T::zero()) {
        return None;
    }
    let s = e[0] + e[1] + e[2];
    let g = |x: T| if hyperbolic { x.sinh() } else { x };
    let gs = g(s);
    let ge = [g(e[0]), g(e[1]), g(e[2])];
    let mut t = [T::zero(); 3];
    for k in 0..3 {
        let ratio = ge[(k + 1) % 3] * ge[(k + 2) % 3] / (gs * ge[k]);
        if !(ratio > T::zero()) || !ratio.is_finite() {
            return None;
        }
        t[k] = ratio.sqrt();
    }
    Some(t)
}

/// Interior angles from the side lengths.
pub(crate) fn triangle_angles<T: Real>(l: &[T; 3], tag: TriangleTag) -> Option<[T; 3]> {
    let two = T::from_f64_lossy(2.0);
    half_angle_tangents(l, tag == TriangleTag::Hyperbolic)
        .map(|t| [two * t[0].atan(), two * t[1].atan(), two * t[2].atan()])
}

/// Cotangent weights at the three vertices from the side lengths; `None`
/// on degenerate sides.
pub(crate) fn cotangents_of<T: Real>(l: &[T; 3], hyperbolic: bool) -> Option<[T; 3]> {
    let t = half_angle_tangents(l, hyperbolic)?;
    let two = T::from_f64_lossy(2.0);
    Some([
        (T::one() - t[0] * t[0]) / (two * t[0]),
        (T::one() - t[1] * t[1]) / (two * t[1]),
        (T::one() - t[2] * t[2]) / (two * t[2]),
    ])
}

/// Cotangent weights at the three vertices; errors on degenerate sides.
pub(crate) fn triangle_cotangents<T: Real>(tri: &MeshTriangle<T>) -> Result<[T; 3]> {
    cotangents_of(&tri.lengths, tri.tag == TriangleTag::Hyperbolic).ok_or_else(|| {
        Error::MeshValidation {
            detail: format!(
                "degenerate triangle with sides {}, {}, {}",
                tri.lengths[0], tri.lengths[1], tri.lengths[2]
            ),
        }
    })
}

/// Metric area of one triangle: angle deficit in the hyperbolic case, the
/// stable Heron product in the flat case. Degenerate sides count as zero.
pub(crate) fn triangle_area<T: Real>(tri: &MeshTriangle<T>) -> T {
    match tri.tag {
        TriangleTag::Hyperbolic => match triangle_angles(&tri.lengths, tri.tag) {
            Some(a) => T::PI() - a[0] - a[1] - a[2],
            None => T::zero(),
        },
        TriangleTag::Flat => {
            let mut s = tri.lengths;
            s.sort_by(|p, q| q.partial_cmp(p).unwrap_or(std::cmp::Ordering::Equal));
            let (a, b, c) = (s[0], s[1], s[2]);
            let term = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
            if term > T::zero() {
                term.sqrt() / T::from_f64_lossy(4.0)
            } else {
                T::zero()
            }
        }
    }
}

impl<T: Real> MetricMesh<T> {
    /// Chart distance between two vertex positions in the metric of the
    /// given piece.
    pub fn chart_distance(&self, piece: usize, p: Complex<T>, q: Complex<T>) -> T {
        match self.pieces[piece] {
            Piece::Hyperbolic { .. } => h2::dist(p, q),
            Piece::Flat { .. } => (p - q).norm(),
        }
    }

    fn vertex_distance(&self, a: usize, b: usize) -> T {
        let va = self.vertices[a];
        let vb = self.vertices[b];
        self.chart_distance(va.piece, va.position, vb.position)
    }

    /// Total metric area of all triangles.
    pub fn area(&self) -> T {
        let (h, f) = self.area_by_tag();
        h + f
    }

    /// Areas of the hyperbolic and flat parts.
    pub fn area_by_tag(&self) -> (T, T) {
        let mut hyp = T::zero();
        let mut flat = T::zero();
        for tri in &self.triangles {
            match tri.tag {
                TriangleTag::Hyperbolic => hyp += triangle_area(tri),
                TriangleTag::Flat => flat += triangle_area(tri),
            }
        }
        (hyp, flat)
    }

    /// Checks the structural invariants: indices in range, triangles inside
    /// a single piece with the matching tag, stored side lengths equal to
    /// chart distances, strict triangle inequalities, angle sums below pi on
    /// hyperbolic triangles and equal to pi on flat ones, and seam groups
    /// that pair equally long, equally spaced vertex lists.
    pub fn validate(&self) -> Result<()> {
        let tol = T::from_f64_lossy(1e-9);
        let fail = |detail: String| Err(Error::MeshValidation { detail });
        for (i, v) in self.vertices.iter().enumerate() {
            if v.piece >= self.pieces.len() {
                return fail(format!("vertex {i} references missing piece {}", v.piece));
            }
            if !v.position.re.is_finite() || !v.position.im.is_finite() {
                return fail(format!("vertex {i} has a non-finite position"));
            }
        }
        for (i, tri) in self.triangles.iter().enumerate() {
            for &v in &tri.vertices {
                if v >= self.vertices.len() {
                    return fail(format!("triangle {i} references missing vertex {v}"));
                }
            }
            let piece = self.vertices[tri.vertices[0]].piece;
            if tri.vertices.iter().any(|&v| self.vertices[v].piece != piece) {
                return fail(format!("triangle {i} spans more than one piece"));
            }
            let flat_piece = self.pieces[piece].is_flat();
            if flat_piece != (tri.tag == TriangleTag::Flat) {
                return fail(format!("triangle {i} tag disagrees with its piece"));
            }
            let e = triangle_excesses(&tri.lengths);
            for k in 0..3 {
                let l = tri.lengths[k];
                if !(l > T::zero()) || !l.is_finite() {
                    return fail(format!("triangle {i} has a bad side length {l}"));
                }
                if !(e[k] > T::zero()) {
                    return fail(format!(
                        "triangle {i} with sides {}, {}, {} violates the triangle inequality",
                        tri.lengths[0], tri.lengths[1], tri.lengths[2]
                    ));
                }
                let chart = self.vertex_distance(tri.vertices[(k + 1) % 3], tri.vertices[(k + 2) % 3]);
                if (chart - l).abs() > tol * (T::one() + l) {
                    return fail(format!(
                        "triangle {i} side {k} stored as {l} but measures {chart}"
                    ));
                }
            }
            let angles = match triangle_angles(&tri.lengths, tri.tag) {
                Some(a) => a,
                None => return fail(format!("triangle {i} is degenerate")),
            };
            let sum = angles[0] + angles[1] + angles[2];
            match tri.tag {
                TriangleTag::Hyperbolic => {
                    if sum > T::PI() + T::from_f64_lossy(1e-12) {
                        return fail(format!("hyperbolic triangle {i} has angle sum {sum}"));
                    }
                }
                TriangleTag::Flat => {
                    if (sum - T::PI()).abs() > tol {
                        return fail(format!("flat triangle {i} has angle sum {sum}"));
                    }
                }
            }
        }
        for (gi, group) in self.seams.iter().enumerate() {
            if group.from.len() != group.to.len() {
                return fail(format!("seam group {gi} pairs lists of unequal length"));
            }
            for (&a, &b) in group.from.iter().zip(group.to.iter()) {
                if a >= self.vertices.len() || b >= self.vertices.len() {
                    return fail(format!("seam group {gi} references a missing vertex"));
                }
            }
            let entries = [&group.transition.a, &group.transition.b, &group.transition.c, &group.transition.d];
            if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return fail(format!("seam group {gi} has a non-finite transition"));
            }
            for j in 0..group.from.len().saturating_sub(1) {
                let (a0, a1) = (group.from[j], group.from[j + 1]);
                let (b0, b1) = (group.to[j], group.to[j + 1]);
                let same_from = self.vertices[a0].piece == self.vertices[a1].piece;
                let same_to = self.vertices[b0].piece == self.vertices[b1].piece;
                if !(same_from && same_to) {
                    continue;
                }
                let da = self.vertex_distance(a0, a1);
                let db = self.vertex_distance(b0, b1);
                if (da - db).abs() > tol * (T::one() + da) {
                    return fail(format!(
                        "seam group {gi} entry {j} changes spacing from {da} to {db}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Plain-text dump: piece, vertex, triangle and seam tables, one record
    /// per line, floats at full precision.
    pub fn export_text(&self) -> String {
        let f = |x: T| kv::sig17(x.to_f64().unwrap_or(f64::NAN));
        let mut out = String::new();
        out.push_str(&format!("mesh genus {} resolution {}\n", self.genus, f(self.resolution)));
        out.push_str(&format!("pieces {}\n", self.pieces.len()));
        for (i, piece) in self.pieces.iter().enumerate() {
            match piece {
                Piece::Hyperbolic { pants, .. } => {
                    out.push_str(&format!("piece {i} hyperbolic pants {pants}\n"));
                }
                Piece::Flat { curve, circumference, height, .. } => {
                    out.push_str(&format!(
                        "piece {i} flat curve {curve} circumference {} height {}\n",
                        f(*circumference),
                        f(*height)
                    ));
                }
            }
        }
        out.push_str(&format!("vertices {}\n", self.vertices.len()));
        for (i, v) in self.vertices.iter().enumerate() {
            out.push_str(&format!(
                "vertex {i} piece {} {} {}\n",
                v.piece,
                f(v.position.re),
                f(v.position.im)
            ));
        }
        out.push_str(&format!("triangles {}\n", self.triangles.len()));
        for (i, t) in self.triangles.iter().enumerate() {
            let tag = match t.tag {
                TriangleTag::Hyperbolic => "hyperbolic",
                TriangleTag::Flat => "flat",
            };
            out.push_str(&format!(
                "triangle {i} {} {} {} {} {} {} {tag}\n",
                t.vertices[0],
                t.vertices[1],
                t.vertices[2],
                f(t.lengths[0]),
                f(t.lengths[1]),
                f(t.lengths[2])
            ));
        }
        out.push_str(&format!("seams {}\n", self.seams.len()));
        for (i, g) in self.seams.iter().enumerate() {
            let m = &g.transition;
            out.push_str(&format!(
                "seam {i} entries {} transition {} {} {} {} {} {} {} {}\n",
                g.from.len(),
                f(m.a.re),
                f(m.a.im),
                f(m.b.re),
                f(m.b.im),
                f(m.c.re),
                f(m.c.im),
                f(m.d.re),
                f(m.d.im)
            ));
            for (&a, &b) in g.from.iter().zip(g.to.iter()) {
                out.push_str(&format!("pair {a} {b}\n"));
            }
        }
        out
    }
}
