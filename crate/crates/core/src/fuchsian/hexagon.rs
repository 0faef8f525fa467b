//! Exact pair-of-pants groups from reflections in three disjoint geodesics.
//!
//! For boundary lengths `(l1, l2, l3)` the three geodesics are half-circles
//! centered on the real axis: two concentric ones of radii `u = e^{l1/4}`
//! and `1/u`, and a third between them in the right half-plane. Reflecting
//! in them gives involutions `R1, R2, R3`; the products
//!
//! ```text
//! X1 = R2 R3,   X2 = R3 R1,   X3 = R1 R2
//! ```
//!
//! satisfy `X1 X2 X3 = 1` exactly and translate along the three boundary
//! geodesics of the pants by `l1, l2, l3`. The right-angled hexagon with
//! sides alternating between half boundary geodesics and seams is the front
//! half of the pants; its mirror image under `R1` is the back half.

use crate::error::{Error, Result};
use crate::moebius::{h2, Circle, MoebiusMap};
use crate::scalar::Real;
use num_complex::Complex;

/// A reflection of the hyperbolic plane, acting as `z -> mob(m)(conj z)`
/// with a real matrix `m` of determinant -1.
#[derive(Debug, Clone, Copy)]
pub struct Reflection<T: Real> {
    pub m: [[T; 2]; 2],
}

impl<T: Real> Reflection<T> {
    /// Reflection in the half-circle of radius `r` centered at real `c`.
    pub fn in_circle(c: T, r: T) -> Self {
        Reflection {
            m: [[c / r, (r * r - c * c) / r], [T::one() / r, -c / r]],
        }
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        let zc = z.conj();
        let num = Complex::new(self.m[0][0], T::zero()) * zc + Complex::new(self.m[0][1], T::zero());
        let den = Complex::new(self.m[1][0], T::zero()) * zc + Complex::new(self.m[1][1], T::zero());
        num / den
    }

    /// Orientation-preserving product of two reflections.
    pub fn compose(&self, other: &Reflection<T>) -> Result<MoebiusMap<T>> {
        let a = &self.m;
        let b = &other.m;
        MoebiusMap::from_real(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    /// Conjugates the reflection by a Moebius map with real entries,
    /// yielding the reflection of the transported circle.
    pub fn conjugated_by_real(&self, n: &MoebiusMap<T>) -> Reflection<T> {
        let na = [[n.a.re, n.b.re], [n.c.re, n.d.re]];
        let ni = [[n.d.re, -n.b.re], [-n.c.re, n.a.re]];
        let mul = |x: &[[T; 2]; 2], y: &[[T; 2]; 2]| {
            [
                [
                    x[0][0] * y[0][0] + x[0][1] * y[1][0],
                    x[0][0] * y[0][1] + x[0][1] * y[1][1],
                ],
                [
                    x[1][0] * y[0][0] + x[1][1] * y[1][0],
                    x[1][0] * y[0][1] + x[1][1] * y[1][1],
                ],
            ]
        };
        Reflection {
            m: mul(&mul(&na, &self.m), &ni),
        }
    }
}

/// Seam index crossed by the boundary circle of slot `k` at parameter 0 and
/// at parameter `l/2` (both 0-indexed): the corners bounding the front arc
/// lie on these seams.
pub const JUNCTION_SEAM: [[usize; 2]; 3] = [[2, 1], [0, 2], [1, 0]];

/// A hyperbolic pair of pants with labeled boundary lengths, its reflection
/// group data, hexagon corners, and one normalizing isometry per boundary
/// slot.
#[derive(Debug, Clone)]
pub struct PantsGeometry<T: Real> {
    pub lengths: [T; 3],
    /// Radii scale of the concentric seam circles.
    pub u: T,
    /// Center and radius of the third seam circle.
    pub c: T,
    pub rho: T,
    /// Reflections in the seams `gamma_1, gamma_2, gamma_3`.
    pub seams: [Reflection<T>; 3],
    pub seam_circles: [Circle<T>; 3],
    /// Boundary geodesics (the axes of `X1, X2, X3`).
    pub axes: [Circle<T>; 3],
    /// Boundary generators, `x[0] x[1] x[2] = 1` exactly.
    pub x: [MoebiusMap<T>; 3],
    /// Hexagon corners `P1..P6` in cyclic order: `P1` on axis 1 and seam 3,
    /// `P2` on seam 3 and axis 2, `P3` on axis 2 and seam 1, `P4` on seam 1
    /// and axis 3, `P5` on axis 3 and seam 2, `P6` on seam 2 and axis 1.
    pub corners: [Complex<T>; 6],
    /// Real isometries sending slot `k` to the standard frame: axis to the
    /// imaginary axis with `n x[k] n^{-1} = diag(e^{l/2}, e^{-l/2})` and the
    /// repelling-side corner to `i e^{-l/4}`.
    pub normalizers: [MoebiusMap<T>; 3],
    /// A point interior to the front hexagon.
    pub interior: Complex<T>,
}

fn real_c<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn imag_c<T: Real>(y: T) -> Complex<T> {
    Complex::new(T::zero(), y)
}

impl<T: Real> PantsGeometry<T> {
    pub fn new(l1: T, l2: T, l3: T) -> Result<Self> {
        for l in [l1, l2, l3] {
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::NonPositiveLength {
                    value: l.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let two = T::from_f64_lossy(2.0);
        let four = T::from_f64_lossy(4.0);
        let u = (l1 / four).exp();
        // Disjointness of the third circle from the concentric pair encodes
        // the two seam distances l2/2 and l3/2. The power of its center with
        // respect to the origin, c^2 - rho^2, is needed throughout; the
        // direct difference cancels catastrophically for long boundaries, so
        // it is kept in the all-positive form below.
        let den = u * (l3 / two).cosh() + (l2 / two).cosh() / u;
        let rho = (l1 / two).sinh() / den;
        let pow = (u * (l2 / two).cosh() + (l3 / two).cosh() / u) / den;
        let c = (rho * rho + pow).sqrt();

        let seams = [
            Reflection::in_circle(c, rho),
            Reflection::in_circle(T::zero(), u),
            Reflection::in_circle(T::zero(), u.recip()),
        ];
        let seam_circles = [
            Circle::round(real_c(c), rho)?,
            Circle::round(real_c(T::zero()), u)?,
            Circle::round(real_c(T::zero()), u.recip())?,
        ];
        let x = [
            seams[1].compose(&seams[2])?,
            seams[2].compose(&seams[0])?,
            seams[0].compose(&seams[1])?,
        ];

        // Boundary axes: axis 1 is the imaginary axis; the others are the
        // common perpendiculars of the seam pairs, circles orthogonal to
        // both, found from |center|^2 = radius^2 + r_seam^2.
        let x2c = (pow + u.powi(-2)) / (two * c);
        let r2 = (x2c * x2c - u.powi(-2)).sqrt();
        let x3c = (pow + u * u) / (two * c);
        let r3 = (x3c * x3c - u * u).sqrt();
        let axes = [
            Circle::line(real_c(T::zero()), imag_c(T::one()))?,
            Circle::round(real_c(x2c), r2)?,
            Circle::round(real_c(x3c), r3)?,
        ];

        // Orthogonality gives every corner in closed form: for circles of
        // radii r, s with centers d apart at a right angle, the corner sits
        // at height r s / d, offset r^2 / d from the first center. Taking
        // the offset from the smaller circle keeps the corner resolved when
        // the radii differ by many orders of magnitude.
        let crossing = |center_a: T, ra: T, center_b: T, rb: T| {
            let d = (center_b - center_a).abs();
            let x = if ra <= rb {
                let toward = if center_b > center_a { T::one() } else { -T::one() };
                center_a + toward * ra * ra / d
            } else {
                let toward = if center_a > center_b { T::one() } else { -T::one() };
                center_b + toward * rb * rb / d
            };
            Complex::new(x, ra * rb / d)
        };
        let p1 = imag_c(u.recip());
        let p6 = imag_c(u);
        let p2 = crossing(T::zero(), u.recip(), x2c, r2);
        let p3 = crossing(c, rho, x2c, r2);
        let p4 = crossing(c, rho, x3c, r3);
        let p5 = crossing(T::zero(), u, x3c, r3);
        let corners = [p1, p2, p3, p4, p5, p6];

        let interior = h2::interpolate(p1, corners[3], T::from_f64_lossy(0.5));

        // Axis endpoints for the slot frames, small one through the product
        // of the roots (the power of the origin) to dodge cancellation.
        let ends = [
            (T::zero(), T::infinity()),
            (x2c + r2, u.powi(-2) / (x2c + r2)),
            (x3c + r3, (u * u) / (x3c + r3)),
        ];
        let mut normalizers = [MoebiusMap::identity(); 3];
        let lens = [l1, l2, l3];
        for k in 1..3 {
            let (rep, att) = ends[k];
            normalizers[k] =
                slot_normalizer(rep, att, lens[k], corners[corner_start_index(k)])?;
        }

        let pants = PantsGeometry {
            lengths: lens,
            u,
            c,
            rho,
            seams,
            seam_circles,
            axes,
            x,
            corners,
            normalizers,
            interior,
        };
        pants.check_frames()?;
        Ok(pants)
    }

    /// Orientation checks tying the normalizers to the hexagon: the far
    /// corner of each boundary side sits at `i e^{+l/4}` (the translation
    /// moves from the start corner toward it) and the hexagon develops into
    /// the right half-plane.
    fn check_frames(&self) -> Result<()> {
        for k in 0..3 {
            let l = self.lengths[k];
            let n = &self.normalizers[k];
            let end = n.apply_complex(self.corners[corner_end_index(k)]);
            let expect = imag_c((l / T::from_f64_lossy(4.0)).exp());
            let err = (end - expect).norm() / expect.norm();
            if err > T::from_f64_lossy(1e-7) {
                return Err(Error::MeshValidation {
                    detail: format!(
                        "slot {k} frame: far corner off by relative {}",
                        err.to_f64().unwrap_or(f64::NAN)
                    ),
                });
            }
            if n.apply_complex(self.interior).re <= T::zero() {
                return Err(Error::MeshValidation {
                    detail: format!("slot {k} frame: hexagon not in right half-plane"),
                });
            }
        }
        Ok(())
    }

    /// Start corner (repelling side) of the boundary arc of slot `k` in the
    /// front hexagon.
    pub fn corner_start(&self, k: usize) -> Complex<T> {
        self.corners[corner_start_index(k)]
    }

    /// Far corner (attracting side) of that arc.
    pub fn corner_end(&self, k: usize) -> Complex<T> {
        self.corners[corner_end_index(k)]
    }

    /// Reflection across seam 1, folding the front hexagon onto the back.
    pub fn sigma(&self) -> &Reflection<T> {
        &self.seams[0]
    }

    /// Boundary point of slot `k` at arclength `t in [0, l/2]`, on the front
    /// hexagon side, measured from the start corner in the translation
    /// direction.
    pub fn boundary_front(&self, k: usize, t: T) -> Complex<T> {
        let quarter = self.lengths[k] / T::from_f64_lossy(4.0);
        self.normalizers[k]
            .inverse()
            .apply_complex(imag_c((t - quarter).exp()))
    }

    /// Boundary point at `t in [l/2, l]`, on the back hexagon side (the
    /// sigma mirror of the front point at `l - t`).
    pub fn boundary_back(&self, k: usize, t: T) -> Complex<T> {
        self.sigma().apply(self.boundary_front(k, self.lengths[k] - t))
    }

    /// Moebius identification of a seam point's front-chart value with its
    /// back-chart value: crossing seam 1 is the identity, seam 2 applies
    /// `x3`, seam 3 applies `x2^{-1}`.
    pub fn seam_crossing(&self, seam: usize) -> MoebiusMap<T> {
        match seam {
            0 => MoebiusMap::identity(),
            1 => self.x[2],
            _ => self.x[1].inverse(),
        }
    }
}

fn corner_start_index(k: usize) -> usize {
    // P1 for slot 1, P3 for slot 2, P5 for slot 3.
    2 * k
}

fn corner_end_index(k: usize) -> usize {
    // P6 for slot 1, P2 for slot 2, P4 for slot 3.
    [5, 1, 3][k]
}

/// Real isometry sending `rep` to `0`, `att` to `infinity`, and the given
/// on-axis corner to `i e^{-l/4}`. Requires `0 < att < rep`; for both
/// off-axis slots the attracting endpoint is the one nearer the origin.
fn slot_normalizer<T: Real>(rep: T, att: T, l: T, corner: Complex<T>) -> Result<MoebiusMap<T>> {
    // att < rep, so this determinant is positive and the map preserves the
    // upper half-plane.
    let m0 = MoebiusMap::from_real(T::one(), -rep, T::one(), -att)?;
    let zeta = m0.apply_complex(corner);
    // The corner lies on the axis, so its image is purely imaginary.
    debug_assert!(zeta.re.abs() <= T::from_f64_lossy(1e-7) * zeta.im.abs());
    let s = ((-l / T::from_f64_lossy(4.0)).exp() / zeta.im).sqrt();
    let scale = MoebiusMap::from_real(s, T::zero(), T::zero(), s.recip())?;
    Ok(scale.compose(&m0))
}
