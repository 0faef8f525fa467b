//! Mesh builder for grafted surfaces.
//!
//! Each pair of pants is meshed as two hexagon charts in Fermi coordinates
//! about its slot-0 boundary: columns of vertices rise from the boundary
//! along fibers of constant arclength parameter, split adaptively so that
//! horizontal edges stay within a fixed multiple of the resolution, and a
//! ribbon of triangles stitches the column tops to the three far sides.
//! Grafted curves get flat cylinder charts whose columns line up with the
//! boundary vertices dictated to both neighboring hexagons, so every rim
//! identification pairs vertices one to one.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;

use super::{MeshTriangle, MeshVertex, MetricMesh, Piece, SeamGroup, TriangleTag};
use crate::error::{Error, Result};
use crate::fuchsian::assembly::{assemble_representation, Assembly};
use crate::fuchsian::hexagon::{PantsGeometry, JUNCTION_SEAM};
use crate::fuchsian::FNCoords;
use crate::grafting::GraftedSurface;
use crate::moebius::{h2, Circle, MoebiusMap};
use crate::scalar::Real;

/// Once a horizontal edge would exceed this multiple of the resolution, the
/// column pair splits and a new column starts between them.
const SPLIT_WIDTH: f64 = 1.1;

/// Columns stop this fraction of the resolution short of the far boundary
/// so the stitched band keeps honest triangles.
const TRIM_MARGIN: f64 = 0.7;

fn wrap<T: Real>(x: T, l: T) -> T {
    let w = x - (x / l).floor() * l;
    if w >= l {
        w - l
    } else {
        w
    }
}

fn wrap_distance<T: Real>(a: T, b: T, l: T) -> T {
    let d = wrap(a - b, l);
    if d + d > l {
        l - d
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CornerKind {
    Start,
    End,
}

/// One vertex column shared by a curve's two rims (and its flat cylinder,
/// when grafted), keyed by position `x` along the side-0 parameterization.
#[derive(Debug, Clone, Copy)]
struct ColumnInfo<T: Real> {
    x: T,
    a_corner: Option<CornerKind>,
    b_corner: Option<CornerKind>,
}

#[derive(Debug, Clone)]
struct CurveColumns<T: Real> {
    length: T,
    twist: T,
    cols: Vec<ColumnInfo<T>>,
}

impl<T: Real> CurveColumns<T> {
    /// Arclength parameter of column `j` on the given side of the curve,
    /// plus the number of whole turns the side-1 parameter wrapped.
    fn side_param(&self, side: usize, j: usize) -> (T, i32) {
        let col = self.cols[j];
        if side == 0 {
            return (col.x, 0);
        }
        let two = T::from_f64_lossy(2.0);
        let raw = self.twist + self.length / two - col.x;
        let t = match col.b_corner {
            Some(CornerKind::Start) => T::zero(),
            Some(CornerKind::End) => self.length / two,
            None => wrap(raw, self.length),
        };
        let m = ((t - raw) / self.length)
            .round()
            .to_i32()
            .unwrap_or(0);
        (t, m)
    }
}

/// Column positions along a curve: corner hits of both sides plus a
/// half-phase master grid at the resolution, deduplicated against corners.
fn curve_columns<T: Real>(coords: &FNCoords<T>, e: usize, h: T) -> CurveColumns<T> {
    let l = coords.lengths[e];
    let tau = coords.twists[e];
    let two = T::from_f64_lossy(2.0);
    let half = l / two;
    let one = T::one();
    let delta = T::from_f64_lossy(1e-9) * if l > one { l } else { one };
    let mut cols = vec![
        ColumnInfo { x: T::zero(), a_corner: Some(CornerKind::Start), b_corner: None },
        ColumnInfo { x: half, a_corner: Some(CornerKind::End), b_corner: None },
    ];
    for (xb, kind) in [(wrap(tau + half, l), CornerKind::Start), (wrap(tau, l), CornerKind::End)] {
        if let Some(existing) = cols.iter_mut().find(|c| wrap_distance(c.x, xb, l) <= delta) {
            existing.b_corner = Some(kind);
        } else {
            cols.push(ColumnInfo { x: xb, a_corner: None, b_corner: Some(kind) });
        }
    }
    let n = (l / h).ceil().to_usize().unwrap_or(1).max(1);
    for j in 0..n {
        let x = l * T::from_usize_lossy(2 * j + 1) / T::from_usize_lossy(2 * n);
        if cols.iter().any(|c| wrap_distance(c.x, x, l) <= delta) {
            continue;
        }
        cols.push(ColumnInfo { x, a_corner: None, b_corner: None });
    }
    cols.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap_or(std::cmp::Ordering::Equal));
    CurveColumns { length: l, twist: tau, cols }
}

/// Growing mesh: pieces, vertices and triangles, with lengths measured in
/// the owning chart at emission time.
struct MeshState<T: Real> {
    pieces: Vec<Piece<T>>,
    vertices: Vec<MeshVertex<T>>,
    triangles: Vec<MeshTriangle<T>>,
    seams: Vec<SeamGroup<T>>,
}

impl<T: Real> MeshState<T> {
    fn new() -> Self {
        MeshState { pieces: Vec::new(), vertices: Vec::new(), triangles: Vec::new(), seams: Vec::new() }
    }

    fn push_piece(&mut self, piece: Piece<T>) -> usize {
        self.pieces.push(piece);
        self.pieces.len() - 1
    }

    fn push_vertex(&mut self, piece: usize, position: Complex<T>) -> usize {
        self.vertices.push(MeshVertex { piece, position });
        self.vertices.len() - 1
    }

    fn side_lengths(&self, ids: [usize; 3]) -> [T; 3] {
        let piece = self.vertices[ids[0]].piece;
        let flat = self.pieces[piece].is_flat();
        let dist = |p: Complex<T>, q: Complex<T>| if flat { (p - q).norm() } else { h2::dist(p, q) };
        let mut lengths = [T::zero(); 3];
        for k in 0..3 {
            let p = self.vertices[ids[(k + 1) % 3]].position;
            let q = self.vertices[ids[(k + 2) % 3]].position;
            lengths[k] = dist(p, q);
        }
        lengths
    }

    /// A triangle all of whose vertices sit on one geodesic (boundary
    /// circles carry corner points and rim stations alike) has excess at
    /// the rounding floor, a few ulps of the longest side. The cutoff sits
    /// two orders above that floor, so bands as thin as the position
    /// arithmetic can represent still triangulate: a band of width `w`
    /// against a station gap `g` has excess of order `w^2 / g`.
    fn is_sliver(&self, ids: [usize; 3]) -> bool {
        let l = self.side_lengths(ids);
        let scale = l[0].max(l[1]).max(l[2]);
        let tol = T::from_f64_lossy(1e-14) * scale;
        for k in 0..3 {
            if l[(k + 1) % 3] + l[(k + 2) % 3] - l[k] <= tol {
                return true;
            }
        }
        false
    }

    fn emit(&mut self, ids: [usize; 3]) -> Result<()> {
        let lengths = self.side_lengths(ids);
        for k in 0..3 {
            if !(lengths[k] > T::zero()) {
                return Err(Error::MeshValidation {
                    detail: format!("zero-length edge between vertices {} and {}", ids[(k + 1) % 3], ids[(k + 2) % 3]),
                });
            }
        }
        let flat = self.pieces[self.vertices[ids[0]].piece].is_flat();
        let tag = if flat { TriangleTag::Flat } else { TriangleTag::Hyperbolic };
        self.triangles.push(MeshTriangle { vertices: ids, lengths, tag });
        Ok(())
    }
}

/// Vertex column of a hexagon chart: grid levels `level0..` at spacing `h`,
/// possibly topped by one off-grid point (wall columns end at the corner).
struct Column<T: Real> {
    s: T,
    level0: usize,
    /// Level of the last entry that sits exactly on the grid.
    full_top: usize,
    points: Vec<(T, usize)>,
}

impl<T: Real> Column<T> {
    fn top_id(&self) -> usize {
        self.points.last().expect("columns are nonempty").1
    }

    fn slice_from(&self, level: usize) -> &[(T, usize)] {
        &self.points[level - self.level0..]
    }

    fn slice_levels(&self, from: usize, to: usize) -> &[(T, usize)] {
        &self.points[from - self.level0..=to - self.level0]
    }
}

/// Staircase triangulation of the strip between two vertex columns that
/// share their bottom level; always advances the side whose next vertex is
/// lower. The final triangle edge joins the two column tops.
fn ladder<T: Real>(st: &mut MeshState<T>, left: &[(T, usize)], right: &[(T, usize)]) -> Result<()> {
    let (mut i, mut j) = (0, 0);
    while i + 1 < left.len() || j + 1 < right.len() {
        let advance_left = if i + 1 >= left.len() {
            false
        } else if j + 1 >= right.len() {
            true
        } else {
            left[i + 1].0 <= right[j + 1].0
        };
        if advance_left {
            st.emit([left[i].1, right[j].1, left[i + 1].1])?;
            i += 1;
        } else {
            st.emit([left[i].1, right[j].1, right[j + 1].1])?;
            j += 1;
        }
    }
    Ok(())
}

/// Merge triangulation of the band between two chains sorted by `s` that
/// share their first and last vertices. Triangles that repeat a shared
/// endpoint are skipped; when the `s`-preferred advance would emit a
/// sliver (three points on one boundary circle, e.g. a corner fanned
/// against rim stations of its own side), the other chain advances first.
/// Stretches where both advances degenerate are left open: there the band
/// is thinner than the excess the position arithmetic can resolve, so the
/// omitted area is below the rounding floor of anything computed on the
/// mesh, and stitching resumes as soon as the band widens again.
fn stitch<T: Real>(st: &mut MeshState<T>, lower: &[(T, usize)], upper: &[(T, usize)]) -> Result<()> {
    let (mut i, mut j) = (0, 0);
    while i + 1 < lower.len() || j + 1 < upper.len() {
        let can_lower = i + 1 < lower.len();
        let can_upper = j + 1 < upper.len();
        let prefer_lower = if !can_lower {
            false
        } else if !can_upper {
            true
        } else {
            lower[i + 1].0 <= upper[j + 1].0
        };
        let mut choice = None;
        for advance_lower in [prefer_lower, !prefer_lower] {
            if (advance_lower && !can_lower) || (!advance_lower && !can_upper) {
                continue;
            }
            let tri = if advance_lower {
                [lower[i].1, upper[j].1, lower[i + 1].1]
            } else {
                [lower[i].1, upper[j].1, upper[j + 1].1]
            };
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                choice = Some((advance_lower, None));
                break;
            }
            if !st.is_sliver(tri) {
                choice = Some((advance_lower, Some(tri)));
                break;
            }
        }
        match choice {
            Some((advance_lower, emitted)) => {
                if let Some(tri) = emitted {
                    st.emit(tri)?;
                }
                if advance_lower {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            None => {
                if prefer_lower {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
    }
    Ok(())
}

/// Rim and seam bookkeeping returned for one hexagon chart.
struct HexChart {
    /// Per slot, column key to rim vertex id (interior rim vertices only).
    rim: [HashMap<usize, usize>; 3],
    /// Vertex ids of the six corners in cyclic order.
    corners: [usize; 6],
    /// Per seam, vertex ids ordered from the seam's base corner.
    seam_lists: [Vec<usize>; 3],
}

impl HexChart {
    fn corner_start(&self, slot: usize) -> usize {
        self.corners[2 * slot]
    }

    fn corner_end(&self, slot: usize) -> usize {
        self.corners[[5usize, 1, 3][slot]]
    }
}

enum Base {
    Rim(usize),
    WallStart,
    WallEnd,
}

/// arccosh(1 + q) for q >= 0, accurate down to q near the underflow floor.
fn acosh1p<T: Real>(q: T) -> T {
    (q + (q * (q + T::from_f64_lossy(2.0))).sqrt()).ln_1p()
}

/// One far side of the hexagon as seen from the slot-0 axis: the geodesic
/// at perpendicular distance `clearance` whose foot sits at station `foot`.
/// The fiber at station `s` crosses it at depth
/// `atanh(tanh(clearance) cosh(s - foot))`, and the point at arclength `t`
/// along it (from the foot) sits at depth `asinh(sinh(clearance) cosh(t))`
/// and station `foot + asinh(sinh(t) / cosh(depth))`. These forms stay
/// fully accurate however thin the hexagon gets, where the half-plane
/// circle of the side would be indistinguishable from the axis itself.
struct FarProfile<T> {
    clearance: T,
    foot: T,
}

impl<T: Real> FarProfile<T> {
    fn at_arc(&self, t: T) -> (T, T) {
        let d = (self.clearance.sinh() * t.cosh()).asinh();
        (self.foot + (t.sinh() / d.cosh()).asinh(), d)
    }
}

struct HexFrame<'a, T: Real> {
    geometry: &'a PantsGeometry<T>,
    piece: usize,
    mirror: bool,
    quarter: T,
    h: T,
    margin: T,
    far: [FarProfile<T>; 3],
}

impl<'a, T: Real> HexFrame<'a, T> {
    fn place(&self, z: Complex<T>) -> Complex<T> {
        if self.mirror {
            self.geometry.sigma().apply(z)
        } else {
            z
        }
    }

    /// Point at arclength `s` along the slot-0 boundary and geodesic depth
    /// `d` into the hexagon, in front-chart coordinates.
    fn fermi(&self, s: T, d: T) -> Complex<T> {
        let r = (s - self.quarter).exp();
        Complex::new(r * d.tanh(), r / d.cosh())
    }

    /// Depth at which the fiber of `s` first meets one of the three far
    /// sides. Fibers that miss a side's geodesic are skipped.
    fn d_far(&self, s: T) -> T {
        let mut best = T::infinity();
        for profile in &self.far {
            let a = profile.clearance.tanh() * (s - profile.foot).cosh();
            if a < T::one() {
                let d = a.atanh();
                if d < best {
                    best = d;
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            T::zero()
        }
    }

    fn trimmed_levels(&self, dmin: T) -> usize {
        let room = dmin - self.margin;
        if room <= T::zero() {
            0
        } else {
            (room / self.h).floor().to_usize().unwrap_or(0)
        }
    }
}

fn round_circle<T: Real>(c: &Circle<T>) -> Result<(T, T)> {
    match c {
        Circle::Round { center, radius } => Ok((center.re, *radius)),
        Circle::Line { .. } => Err(Error::MeshValidation {
            detail: "expected a circular hexagon side, found a line".to_string(),
        }),
    }
}

/// Triangulates the strip between two columns from `j_bottom` up, splitting
/// whenever cells grow wider than the budget and there is room for a fresh
/// column between the two.
#[allow(clippy::too_many_arguments)]
fn mesh_strip<T: Real>(
    st: &mut MeshState<T>,
    frame: &HexFrame<T>,
    tops: &mut Vec<(T, usize)>,
    left: &Column<T>,
    right: &Column<T>,
    j_bottom: usize,
) -> Result<()> {
    let gap = right.s - left.s;
    let j_top = left.full_top.min(right.full_top);
    let budget = frame.h * T::from_f64_lossy(SPLIT_WIDTH);
    let mut j_split = None;
    let mut j = j_bottom + 1;
    while j <= j_top {
        if gap * (T::from_usize_lossy(j) * frame.h).cosh() > budget {
            j_split = Some(j);
            break;
        }
        j += 1;
    }
    let js = match j_split {
        None => {
            return ladder(st, left.slice_from(j_bottom), right.slice_from(j_bottom));
        }
        Some(js) => js,
    };
    ladder(st, left.slice_levels(j_bottom, js), right.slice_levels(j_bottom, js))?;
    let two = T::from_f64_lossy(2.0);
    let s_mid = (left.s + right.s) / two;
    let dmin = frame.d_far(left.s).min(frame.d_far(s_mid)).min(frame.d_far(right.s));
    let m_mid = frame.trimmed_levels(dmin);
    if m_mid <= js {
        return ladder(st, left.slice_from(js), right.slice_from(js));
    }
    let mut points = Vec::with_capacity(m_mid - js + 1);
    for level in js..=m_mid {
        let d = T::from_usize_lossy(level) * frame.h;
        let id = st.push_vertex(frame.piece, frame.place(frame.fermi(s_mid, d)));
        points.push((d, id));
    }
    let mid = Column { s: s_mid, level0: js, full_top: m_mid, points };
    st.emit([
        left.slice_levels(js, js)[0].1,
        right.slice_levels(js, js)[0].1,
        mid.points[0].1,
    ])?;
    tops.push((s_mid, mid.top_id()));
    mesh_strip(st, frame, tops, left, &mid, js)?;
    mesh_strip(st, frame, tops, &mid, right, js)
}

/// Meshes one hexagon chart (front or mirrored back copy) of a pair of
/// pants. `dictated` lists, per slot, the interior rim stations as pairs of
/// local arclength in `(0, length/2)` and column key, sorted by arclength.
fn mesh_hexagon<T: Real>(
    st: &mut MeshState<T>,
    piece: usize,
    geometry: &PantsGeometry<T>,
    dictated: &[Vec<(T, usize)>; 3],
    resolution: T,
    mirror: bool,
) -> Result<HexChart> {
    let two = T::from_f64_lossy(2.0);
    let four = T::from_f64_lossy(4.0);
    let l1 = geometry.lengths[0];
    let half = l1 / two;
    let frame = HexFrame {
        geometry,
        piece,
        mirror,
        quarter: l1 / four,
        h: resolution,
        margin: resolution * T::from_f64_lossy(TRIM_MARGIN),
        far: [
            round_circle(&geometry.axes[1])?,
            round_circle(&geometry.seam_circles[0])?,
            round_circle(&geometry.axes[2])?,
        ],
    };
    let mut rim: [HashMap<usize, usize>; 3] = [HashMap::new(), HashMap::new(), HashMap::new()];

    // Stations along the slot-0 boundary: the two wall feet plus every
    // dictated rim vertex.
    let mut stations: Vec<(T, Base)> = vec![(T::zero(), Base::WallStart), (half, Base::WallEnd)];
    for &(t, key) in &dictated[0] {
        stations.push((t, Base::Rim(key)));
    }
    stations.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
    let tiny = T::from_f64_lossy(1e-12) * if l1 > T::one() { l1 } else { T::one() };
    for w in stations.windows(2) {
        if w[1].0 - w[0].0 <= tiny {
            return Err(Error::MeshValidation {
                detail: "boundary stations collide along a hexagon base".to_string(),
            });
        }
    }

    // Wall depths are read off the corner positions; wall grids follow the
    // global level spacing with one final partial step.
    let depth_of = |p: Complex<T>| (p.re / p.norm()).atanh();
    let wall_start_len = depth_of(geometry.corner_end(1));
    let wall_end_len = depth_of(geometry.corner_start(2));
    if std::env::var("GRAFT_DEBUG_STITCH").is_ok() {
        eprintln!(
            "hexagon l={:?} mirror={mirror} walls=({:e}, {:e}) d_far(0)={:e} d_far(h/4)={:e} d_far(half/2)={:e}",
            geometry.lengths.map(|l| l.to_f64().unwrap()),
            wall_start_len.to_f64().unwrap(),
            wall_end_len.to_f64().unwrap(),
            frame.d_far(T::zero()).to_f64().unwrap(),
            frame.d_far(frame.h / four).to_f64().unwrap(),
            frame.d_far(half / two).to_f64().unwrap(),
        );
    }
    let wall_levels = |len: T| -> Vec<T> {
        let mut out = vec![T::zero()];
        let mut j = 1usize;
        loop {
            let d = T::from_usize_lossy(j) * frame.h;
            if d < len - frame.h * T::from_f64_lossy(1e-9) {
                out.push(d);
                j += 1;
            } else {
                break;
            }
        }
        out.push(len);
        out
    };

    let mut columns: Vec<Column<T>> = Vec::with_capacity(stations.len());
    for (s, base) in stations.iter() {
        let (levels, full_top) = match base {
            Base::WallStart => {
                let d = wall_levels(wall_start_len);
                let top = d.len() - 2;
                (d, top)
            }
            Base::WallEnd => {
                let d = wall_levels(wall_end_len);
                let top = d.len() - 2;
                (d, top)
            }
            Base::Rim(_) => {
                // Trim against a quarter-step window only: wider dips are
                // resampled by the strip splits, and tying the height to the
                // local fiber keeps neighboring column tops within a level
                // or two of each other, so the ladder fans stay short.
                let q = frame.h / four;
                let lo = (*s - q).max(T::zero());
                let hi = (*s + q).min(half);
                let dmin = frame.d_far(*s).min(frame.d_far(lo)).min(frame.d_far(hi));
                let m = frame.trimmed_levels(dmin);
                let d: Vec<T> = (0..=m).map(|j| T::from_usize_lossy(j) * frame.h).collect();
                (d, m)
            }
        };
        let mut points = Vec::with_capacity(levels.len());
        for &d in &levels {
            let id = st.push_vertex(piece, frame.place(frame.fermi(*s, d)));
            points.push((d, id));
        }
        if let Base::Rim(key) = base {
            rim[0].insert(*key, points[0].1);
        }
        columns.push(Column { s: *s, level0: 0, full_top, points });
    }

    let wall_start_list: Vec<usize> = columns[0].points.iter().map(|&(_, id)| id).collect();
    let wall_end_list: Vec<usize> = columns.last().unwrap().points.iter().map(|&(_, id)| id).collect();
    let p1 = wall_start_list[0];
    let p2 = *wall_start_list.last().unwrap();
    let p6 = wall_end_list[0];
    let p5 = *wall_end_list.last().unwrap();

    let mut tops: Vec<(T, usize)> = columns.iter().map(|c| (c.s, c.top_id())).collect();
    for pair in 0..columns.len() - 1 {
        let (a, b) = columns.split_at(pair + 1);
        mesh_strip(st, &frame, &mut tops, a.last().unwrap(), &b[0], 0)?;
    }

    // Far chain: both wall tops, the dictated rim vertices of slots 1 and 2,
    // and the seam-0 arc walked at uniform arclength. The chain is strictly
    // monotone in `s` because every far side crosses each fiber at most once.
    let s_of = |z: Complex<T>| z.norm().ln() + frame.quarter;
    let mut far_chain: Vec<(T, usize)> = vec![(T::zero(), p2), (half, p5)];
    for (slot, list) in [(1usize, &dictated[1]), (2usize, &dictated[2])] {
        for &(t, key) in list.iter() {
            let pos = geometry.boundary_front(slot, t);
            let id = st.push_vertex(piece, frame.place(pos));
            rim[slot].insert(key, id);
            far_chain.push((s_of(pos), id));
        }
    }

    let (c0, rho) = frame.far[1];
    let p3_pos = geometry.corner_start(1);
    let p4_pos = geometry.corner_end(2);
    let lambda = |p: Complex<T>| (p.im / (rho + p.re - c0)).ln();
    let (l3, l4) = (lambda(p3_pos), lambda(p4_pos));
    let arc = (l4 - l3).abs();
    let n0 = (arc / frame.h).ceil().to_usize().unwrap_or(1).max(1);
    let mut seam0_list = Vec::with_capacity(n0 + 1);
    for j in 0..=n0 {
        let lj = l3 + (l4 - l3) * T::from_usize_lossy(j) / T::from_usize_lossy(n0);
        let t = lj.exp();
        let den = T::one() + t * t;
        let pos = Complex::new(c0 + rho * (T::one() - t * t) / den, rho * two * t / den);
        let id = st.push_vertex(piece, frame.place(pos));
        seam0_list.push(id);
        far_chain.push((s_of(pos), id));
    }
    let p3 = seam0_list[0];
    let p4 = *seam0_list.last().unwrap();

    let sort_s = |v: &mut Vec<(T, usize)>| {
        v.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal))
    };
    sort_s(&mut tops);
    sort_s(&mut far_chain);
    stitch(st, &tops, &far_chain)?;

    Ok(HexChart {
        rim,
        corners: [p1, p2, p3, p4, p5, p6],
        seam_lists: [seam0_list, wall_end_list, wall_start_list],
    })
}

fn holonomy_power<T: Real>(hol: &MoebiusMap<T>, m: i32) -> MoebiusMap<T> {
    match m {
        0 => MoebiusMap::identity(),
        1 => *hol,
        -1 => hol.inverse(),
        _ => {
            let step = if m > 0 { *hol } else { hol.inverse() };
            let mut out = MoebiusMap::identity();
            for _ in 0..m.unsigned_abs() {
                out = out.compose(&step);
            }
            out
        }
    }
}

/// Builds the triangle mesh of a grafted surface at the given resolution:
/// two Fermi-coordinate hexagon charts per pair of pants, one flat chart
/// per grafted cylinder, and seam groups tying all charts together. Errors
/// if the resolution is not positive or leaves a cylinder with fewer than
/// two rings.
pub fn build_grafted_mesh<T: Real>(gs: &GraftedSurface<T>, resolution: T) -> Result<MetricMesh<T>> {
    if !(resolution > T::zero()) || !resolution.is_finite() {
        return Err(Error::NonPositiveLength {
            value: resolution.to_f64().unwrap_or(f64::NAN),
        });
    }
    for cyl in &gs.cylinders {
        let rings = (cyl.height / resolution).ceil().to_usize().unwrap_or(0);
        if rings < 2 {
            return Err(Error::ResolutionTooCoarse {
                resolution: resolution.to_f64().unwrap_or(f64::NAN),
                height: cyl.height.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let pd = &gs.decomposition;
    let coords = &gs.coords;
    let assembly: Assembly<T> = assemble_representation(pd, coords)?;
    let two = T::from_f64_lossy(2.0);
    let h = resolution;
    let mut st = MeshState::new();

    let pants_count = pd.pants_count();
    let mut hex_piece_ids = Vec::with_capacity(pants_count);
    for p in 0..pants_count {
        let front = st.push_piece(Piece::Hyperbolic { pants: p, frame: assembly.placements[p] });
        let back = st.push_piece(Piece::Hyperbolic { pants: p, frame: assembly.placements[p] });
        hex_piece_ids.push([front, back]);
    }

    let columns: Vec<CurveColumns<T>> =
        (0..pd.curve_count()).map(|e| curve_columns(coords, e, h)).collect();

    // Dictated rim stations per pants, chart half and slot.
    let mut dict: Vec<[[Vec<(T, usize)>; 3]; 2]> = (0..pants_count)
        .map(|_| std::array::from_fn(|_| std::array::from_fn(|_| Vec::new())))
        .collect();
    for (e, curve) in pd.curves.iter().enumerate() {
        let cc = &columns[e];
        let half_l = cc.length / two;
        for (side, end) in curve.ends.iter().enumerate() {
            for j in 0..cc.cols.len() {
                let corner = if side == 0 { cc.cols[j].a_corner } else { cc.cols[j].b_corner };
                if corner.is_some() {
                    continue;
                }
                let (t, _) = cc.side_param(side, j);
                if t < half_l {
                    dict[end.pants][0][end.slot].push((t, j));
                } else {
                    dict[end.pants][1][end.slot].push((cc.length - t, j));
                }
            }
        }
    }
    for per_pants in &mut dict {
        for per_half in per_pants.iter_mut() {
            for list in per_half.iter_mut() {
                list.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
            }
        }
    }

    let mut hexes: Vec<[HexChart; 2]> = Vec::with_capacity(pants_count);
    for p in 0..pants_count {
        let front = mesh_hexagon(&mut st, hex_piece_ids[p][0], &assembly.pants[p], &dict[p][0], h, false)?;
        let back = mesh_hexagon(&mut st, hex_piece_ids[p][1], &assembly.pants[p], &dict[p][1], h, true)?;
        hexes.push([front, back]);
    }

    // Front-to-back identifications along the three seams of each pants.
    for p in 0..pants_count {
        let q = assembly.placements[p];
        for s in 0..3 {
            let transition = q.compose(&assembly.pants[p].seam_crossing(s)).compose(&q.inverse());
            st.seams.push(SeamGroup {
                from: hexes[p][0].seam_lists[s].clone(),
                to: hexes[p][1].seam_lists[s].clone(),
                transition,
            });
        }
    }

    // Rim identifications per curve, bucketed by the deck factors that the
    // chart copies carry: back-half rim vertices sit one seam crossing away
    // from the front parameterization, and side-1 parameters may wrap.
    let j_map = MoebiusMap::from_real(T::zero(), -T::one(), T::one(), T::zero())?;
    for (e, curve) in pd.curves.iter().enumerate() {
        let cc = &columns[e];
        let l = cc.length;
        let fa = assembly.side_frame(curve.ends[0]);
        let fb = assembly.side_frame(curve.ends[1]);
        let glue_real = MoebiusMap::axis_translation(Complex::new(cc.twist, T::zero())).compose(&j_map);
        let g = fa.compose(&glue_real).compose(&fb.inverse());
        let hol = fa
            .compose(&MoebiusMap::axis_translation(Complex::new(l, T::zero())))
            .compose(&fa.inverse());
        let back_deck = |side: usize| -> MoebiusMap<T> {
            let end = curve.ends[side];
            let q = assembly.placements[end.pants];
            let seam = JUNCTION_SEAM[end.slot][1];
            q.compose(&assembly.pants[end.pants].seam_crossing(seam)).compose(&q.inverse())
        };
        // (vertex id, whether it lives in the back chart)
        let resolve = |side: usize, j: usize| -> (usize, bool) {
            let end = curve.ends[side];
            let chart = &hexes[end.pants];
            let corner = if side == 0 { cc.cols[j].a_corner } else { cc.cols[j].b_corner };
            match corner {
                Some(CornerKind::Start) => (chart[0].corner_start(end.slot), false),
                Some(CornerKind::End) => (chart[0].corner_end(end.slot), false),
                None => {
                    let (t, _) = cc.side_param(side, j);
                    if t < l / two {
                        (chart[0].rim[end.slot][&j], false)
                    } else {
                        (chart[1].rim[end.slot][&j], true)
                    }
                }
            }
        };

        let theta = gs.cylinders.iter().find(|c| c.curve == e).map(|c| c.height);
        match theta {
            Some(theta) => {
                let piece = st.push_piece(Piece::Flat {
                    curve: e,
                    frame: fa,
                    circumference: l,
                    height: theta,
                });
                let rings = (theta / h).ceil().to_usize().unwrap_or(2).max(2);
                let n_cols = cc.cols.len();
                let mut grid: Vec<Vec<usize>> = Vec::with_capacity(n_cols + 1);
                for j in 0..=n_cols {
                    let x = if j < n_cols { cc.cols[j].x } else { cc.cols[0].x + l };
                    let mut col = Vec::with_capacity(rings + 1);
                    for k in 0..=rings {
                        let y = theta * T::from_usize_lossy(k) / T::from_usize_lossy(rings);
                        col.push(st.push_vertex(piece, Complex::new(x, y)));
                    }
                    grid.push(col);
                }
                for j in 0..n_cols {
                    for k in 0..rings {
                        let (ll, lr) = (grid[j][k], grid[j + 1][k]);
                        let (ul, ur) = (grid[j][k + 1], grid[j + 1][k + 1]);
                        st.emit([ll, lr, ur])?;
                        st.emit([ll, ur, ul])?;
                    }
                }
                // Bottom rim to side 0 of the curve.
                let mut bottom: BTreeMap<bool, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
                for j in 0..n_cols {
                    let (rim_id, is_back) = resolve(0, j);
                    let entry = bottom.entry(is_back).or_default();
                    entry.0.push(rim_id);
                    entry.1.push(grid[j][0]);
                }
                for (is_back, (from, to)) in bottom {
                    let transition =
                        if is_back { back_deck(0).inverse() } else { MoebiusMap::identity() };
                    st.seams.push(SeamGroup { from, to, transition });
                }
                // Top rim to side 1, with the wrap count of each column.
                let mut top: BTreeMap<(bool, i32), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
                for j in 0..n_cols {
                    let (rim_id, is_back) = resolve(1, j);
                    let (_, m) = cc.side_param(1, j);
                    let entry = top.entry((is_back, m)).or_default();
                    entry.0.push(grid[j][rings]);
                    entry.1.push(rim_id);
                }
                for ((is_back, m), (from, to)) in top {
                    let deck = if is_back { back_deck(1) } else { MoebiusMap::identity() };
                    let transition = deck.compose(&g.inverse()).compose(&holonomy_power(&hol, -m));
                    st.seams.push(SeamGroup { from, to, transition });
                }
                // Wrap of the duplicated column.
                st.seams.push(SeamGroup {
                    from: grid[0].clone(),
                    to: grid[n_cols].clone(),
                    transition: hol,
                });
            }
            None => {
                let mut buckets: BTreeMap<(bool, bool, i32), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
                for j in 0..cc.cols.len() {
                    let (a_id, a_back) = resolve(0, j);
                    let (b_id, b_back) = resolve(1, j);
                    let (_, m) = cc.side_param(1, j);
                    let entry = buckets.entry((a_back, b_back, m)).or_default();
                    entry.0.push(a_id);
                    entry.1.push(b_id);
                }
                for ((a_back, b_back, m), (from, to)) in buckets {
                    let deck_a =
                        if a_back { back_deck(0).inverse() } else { MoebiusMap::identity() };
                    let deck_b = if b_back { back_deck(1) } else { MoebiusMap::identity() };
                    let transition = deck_b
                        .compose(&g.inverse())
                        .compose(&holonomy_power(&hol, -m))
                        .compose(&deck_a);
                    st.seams.push(SeamGroup { from, to, transition });
                }
            }
        }
    }

    let mesh = MetricMesh {
        pieces: st.pieces,
        vertices: st.vertices,
        triangles: st.triangles,
        seams: st.seams,
        genus: pd.genus,
        resolution,
    };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::default_genus2;
    use crate::fuchsian::WeightedMulticurve;
    use crate::grafting::graft;

    fn ungrafted_mesh(resolution: f64) -> MetricMesh<f64> {
        let (pd, coords) = default_genus2();
        let gs = graft(&pd, &coords, &WeightedMulticurve::empty()).unwrap();
        build_grafted_mesh(&gs, resolution).unwrap()
    }

    #[test]
    fn ungrafted_area_is_four_pi() {
        let mesh = ungrafted_mesh(0.1);
        let four_pi = 4.0 * std::f64::consts::PI;
        let area = mesh.area();
        // The charts tile geodesic hexagons exactly, so the area deficit is
        // pure floating-point noise, far below the 2 percent budget.
        assert!((area - four_pi).abs() / four_pi < 0.02);
        assert!((area - four_pi).abs() < 1e-8);
        let (hyp, flat) = mesh.area_by_tag();
        assert_eq!(flat, 0.0);
        assert!((hyp - area).abs() < 1e-12);
    }

    #[test]
    fn area_stays_exact_under_refinement() {
        // Triangles tile the hexagons exactly at every resolution, so the
        // area error is rounding noise proportional to the triangle count,
        // not a discretization error that refinement would shrink.
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!((ungrafted_mesh(0.1).area() - four_pi).abs() < 1e-10);
        assert!((ungrafted_mesh(0.05).area() - four_pi).abs() < 1e-10);
    }

    #[test]
    fn grafted_flat_area_matches_cylinder() {
        let (pd, coords) = default_genus2();
        let theta = 2.0 * std::f64::consts::PI;
        let mu = WeightedMulticurve::single(0, theta).unwrap();
        let gs = graft(&pd, &coords, &mu).unwrap();
        let mesh = build_grafted_mesh(&gs, 0.1).unwrap();
        let (hyp, flat) = mesh.area_by_tag();
        let expected_flat = theta * coords.lengths[0];
        assert!((flat - expected_flat).abs() / expected_flat < 1e-9);
        let four_pi = 4.0 * std::f64::consts::PI;
        assert!((hyp - four_pi).abs() / four_pi < 0.01);
        assert!((mesh.area() - gs.area()).abs() < 1e-8);
    }

    #[test]
    fn thin_cylinder_needs_finer_resolution() {
        let (pd, coords) = default_genus2();
        let mu = WeightedMulticurve::single(0, 0.05).unwrap();
        let gs = graft(&pd, &coords, &mu).unwrap();
        match build_grafted_mesh(&gs, 0.1) {
            Err(Error::ResolutionTooCoarse { .. }) => {}
            other => panic!("expected ResolutionTooCoarse, got {other:?}"),
        }
        assert!(build_grafted_mesh(&gs, 0.02).is_ok());
    }

    #[test]
    fn rim_vertices_sit_on_boundary_circles() {
        let (pd, coords) = default_genus2();
        let mu = WeightedMulticurve::single(2, 1.0).unwrap();
        let gs = graft(&pd, &coords, &mu).unwrap();
        let mesh = build_grafted_mesh(&gs, 0.1).unwrap();
        // Front-chart rim vertices of the grafted curve's side 0 lie on the
        // slot axis; for the standard decomposition curve 2 sits at slot 2
        // of pants 0 and slot 2 of pants 1.
        let assembly = assemble_representation(&pd, &coords).unwrap();
        let (xc, r) = round_circle(&assembly.pants[0].axes[2]).unwrap();
        let mut checked = 0;
        for v in &mesh.vertices {
            if v.piece != 0 {
                continue;
            }
            let on_circle = ((v.position - Complex::new(xc, 0.0)).norm() - r).abs() < 1e-9;
            if on_circle {
                checked += 1;
            }
        }
        // A length-1.2 curve at resolution 0.1 dictates six rim stations on
        // the front half, and the two hexagon corners sit on the same axis.
        assert!(checked >= 8, "expected rim vertices on the slot-2 axis circle, found {checked}");
    }

    #[test]
    fn validate_passes_for_grafted_default() {
        let (pd, coords) = default_genus2();
        let mu = WeightedMulticurve::single(0, 1.5).unwrap();
        let gs = graft(&pd, &coords, &mu).unwrap();
        let mesh = build_grafted_mesh(&gs, 0.1).unwrap();
        mesh.validate().unwrap();
        assert_eq!(mesh.genus, 2);
        // Two hexagon charts per pants plus one cylinder chart.
        assert_eq!(mesh.pieces.len(), 2 * pd.pants_count() + 1);
    }

    #[test]
    fn export_lists_every_table() {
        let mesh = ungrafted_mesh(0.3);
        let text = mesh.export_text();
        assert!(text.contains("pieces 4"));
        assert!(text.contains(&format!("vertices {}", mesh.vertices.len())));
        assert!(text.contains(&format!("triangles {}", mesh.triangles.len())));
        assert!(text.starts_with("mesh genus 2"));
    }
}
