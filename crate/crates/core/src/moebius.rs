//! Moebius transformations, circles and discs on the sphere at infinity,
//! totally geodesic planes in upper half-space, nearest-point projection,
//! and bending of a disc about a geodesic.
//!
//! Conventions used throughout:
//! * maps are normalized 2x2 complex matrices with determinant 1, equal up
//!   to a global sign;
//! * the point at infinity is a first-class value, never a large float;
//! * the hyperbolic plane is the upper half-plane `Im z > 0`, hyperbolic
//!   3-space is the upper half-space `t > 0` over the complex plane.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

/// A point of the Riemann sphere: a complex number or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint<T: Real> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    pub fn finite(re: T, im: T) -> Self {
        SpherePoint::Finite(Complex::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Complex conjugate; infinity is its own conjugate.
    pub fn conj(self) -> Self {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// The finite value, or an error for infinity.
    pub fn expect_finite(self) -> Result<Complex<T>> {
        match self {
            SpherePoint::Finite(z) => Ok(z),
            SpherePoint::Infinity => Err(Error::CoincidentPoints {
                which: "expected a finite point",
            }),
        }
    }

    /// Distance in the chordal metric of the sphere, used for approximate
    /// comparisons that must treat infinity symmetrically.
    pub fn chordal_distance(self, other: Self) -> T {
        fn lift<T: Real>(p: SpherePoint<T>) -> (T, T, T) {
            match p {
                SpherePoint::Finite(z) => {
                    let n = z.norm_sqr();
                    let d = n + T::one();
                    let two = T::from_f64_lossy(2.0);
                    (two * z.re / d, two * z.im / d, (n - T::one()) / d)
                }
                SpherePoint::Infinity => (T::zero(), T::zero(), T::one()),
            }
        }
        let (a1, a2, a3) = lift(self);
        let (b1, b2, b3) = lift(other);
        let d1 = a1 - b1;
        let d2 = a2 - b2;
        let d3 = a3 - b3;
        (d1 * d1 + d2 * d2 + d3 * d3).sqrt()
    }
}

/// Trace-based classification of a Moebius transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Identity => "identity",
            Classification::Elliptic => "elliptic",
            Classification::Parabolic => "parabolic",
            Classification::Loxodromic => "loxodromic",
        }
    }
}

/// Tolerance band around the classification boundaries `tr^2 in {0, 4}`.
pub fn default_classify_tol<T: Real>() -> T {
    T::from_f64_lossy(1e-10)
}

/// A fractional linear transformation, stored as a matrix of determinant 1.
///
/// Two maps are the same element of the transformation group when their
/// matrices agree up to a global sign; use [`MoebiusMap::eq_up_to_sign`].
#[derive(Debug, Clone, Copy)]
pub struct MoebiusMap<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> MoebiusMap<T> {
    /// Normalizes the matrix to determinant 1 (dividing by a square root of
    /// the determinant). Fails when the determinant vanishes relative to the
    /// entry scale.
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a
            .norm_sqr()
            .max(b.norm_sqr())
            .max(c.norm_sqr())
            .max(d.norm_sqr());
        let floor = scale * T::epsilon() * T::epsilon() * T::from_f64_lossy(256.0);
        if det.norm_sqr() <= floor || !det.norm_sqr().is_finite() {
            return Err(Error::SingularMatrix {
                det: det.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        let s = det.sqrt();
        Ok(MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn from_real(a: T, b: T, c: T, d: T) -> Result<Self> {
        let z = |x| Complex::new(x, T::zero());
        Self::new(z(a), z(b), z(c), z(d))
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex::new(T::one(), T::zero()),
            b: Complex::new(T::zero(), T::zero()),
            c: Complex::new(T::zero(), T::zero()),
            d: Complex::new(T::one(), T::zero()),
        }
    }

    /// `z -> lambda^2 z` as the matrix `diag(lambda, 1/lambda)`.
    pub fn diagonal(lambda: Complex<T>) -> Result<Self> {
        if lambda.norm_sqr() == T::zero() {
            return Err(Error::SingularMatrix { det: 0.0 });
        }
        Ok(MoebiusMap {
            a: lambda,
            b: Complex::new(T::zero(), T::zero()),
            c: Complex::new(T::zero(), T::zero()),
            d: lambda.inv(),
        })
    }

    /// The hyperbolic translation of length `l` along the imaginary axis,
    /// `diag(e^{l/2}, e^{-l/2})`. A complex `l` adds a rotation about the
    /// same axis (the quakebend factor).
    pub fn axis_translation(l: Complex<T>) -> Self {
        let half = l / Complex::new(T::from_f64_lossy(2.0), T::zero());
        MoebiusMap {
            a: half.exp(),
            b: Complex::new(T::zero(), T::zero()),
            c: Complex::new(T::zero(), T::zero()),
            d: (-half).exp(),
        }
    }

    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    /// Matrix product; `(m.compose(n))(z) = m(n(z))`.
    pub fn compose(&self, n: &Self) -> Self {
        MoebiusMap {
            a: self.a * n.a + self.b * n.c,
            b: self.a * n.b + self.b * n.d,
            c: self.c * n.a + self.d * n.c,
            d: self.c * n.b + self.d * n.d,
        }
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Entrywise complex conjugate. Composes anti-holomorphic maps:
    /// if `r(z) = m(conj z)` and `s(z) = n(conj z)` then
    /// `(r . s)(z) = (m.compose(&n.conj_entries()))(z)`.
    pub fn conj_entries(&self) -> Self {
        MoebiusMap {
            a: self.a.conj(),
            b: self.b.conj(),
            c: self.c.conj(),
            d: self.d.conj(),
        }
    }

    /// Largest entrywise absolute difference, minimized over the global sign.
    pub fn distance_up_to_sign(&self, other: &Self) -> T {
        let diff = |s: Complex<T>| {
            (self.a - s * other.a)
                .norm()
                .max((self.b - s * other.b).norm())
                .max((self.c - s * other.c).norm())
                .max((self.d - s * other.d).norm())
        };
        let one = Complex::new(T::one(), T::zero());
        diff(one).min(diff(-one))
    }

    pub fn eq_up_to_sign(&self, other: &Self, tol: T) -> bool {
        self.distance_up_to_sign(other) <= tol
    }

    /// True when every entry is real to within `tol` (the global sign does
    /// not affect this test).
    pub fn is_real(&self, tol: T) -> bool {
        self.a
            .im
            .abs()
            .max(self.b.im.abs())
            .max(self.c.im.abs())
            .max(self.d.im.abs())
            <= tol
    }

    pub fn apply(&self, p: SpherePoint<T>) -> SpherePoint<T> {
        match p {
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm_sqr() == T::zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
            SpherePoint::Infinity => {
                if self.c.norm_sqr() == T::zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
        }
    }

    /// Applies the map to a finite point expected to stay finite.
    pub fn apply_complex(&self, z: Complex<T>) -> Complex<T> {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn classify(&self) -> Classification {
        self.classify_with_tol(default_classify_tol::<T>())
    }

    pub fn classify_with_tol(&self, tol: T) -> Classification {
        let tr2 = self.trace() * self.trace();
        if tr2.im.abs() <= tol {
            let x = tr2.re;
            let four = T::from_f64_lossy(4.0);
            if (x - four).abs() <= tol {
                let id = Self::identity();
                if self.distance_up_to_sign(&id) <= tol.sqrt() {
                    return Classification::Identity;
                }
                return Classification::Parabolic;
            }
            if x >= -tol && x < four {
                return Classification::Elliptic;
            }
        }
        Classification::Loxodromic
    }

    /// Complex translation length `2 arccosh(tr/2)`: real part the hyperbolic
    /// translation distance, imaginary part the rotation angle. The real part
    /// does not depend on the sign ambiguity of the trace.
    pub fn complex_length(&self) -> Complex<T> {
        let half_tr = self.trace() / Complex::new(T::from_f64_lossy(2.0), T::zero());
        let l = half_tr.acosh() * Complex::new(T::from_f64_lossy(2.0), T::zero());
        if l.re < T::zero() {
            -l
        } else {
            l
        }
    }

    /// Hyperbolic translation distance of a loxodromic.
    pub fn translation_length(&self) -> Result<T> {
        match self.classify() {
            Classification::Loxodromic => Ok(self.complex_length().re),
            other => Err(Error::NoTranslationLength { kind: other.name() }),
        }
    }

    /// Both fixed points of a non-parabolic map, in no particular order.
    pub fn fixed_points(&self) -> Result<(SpherePoint<T>, SpherePoint<T>)> {
        match self.classify() {
            Classification::Loxodromic | Classification::Elliptic => {}
            other => {
                return Err(Error::NoTranslationLength { kind: other.name() });
            }
        }
        let two = Complex::new(T::from_f64_lossy(2.0), T::zero());
        if self.c.norm_sqr() == T::zero() {
            // One fixed point at infinity; the other solves az + b = dz.
            let other = self.b / (self.d - self.a);
            Ok((SpherePoint::Infinity, SpherePoint::Finite(other)))
        } else {
            let tr = self.trace();
            let disc = (tr * tr - two * two).sqrt();
            let s = self.a - self.d;
            // Quadratic roots of c z^2 + (d - a) z - b: take the larger
            // numerator first and recover the other root from the product
            // -b/c, which avoids the cancellation in s -+ disc.
            let big = if (s + disc).norm_sqr() >= (s - disc).norm_sqr() {
                s + disc
            } else {
                s - disc
            };
            let p = big / (two * self.c);
            let q = -self.b / (self.c * p);
            Ok((SpherePoint::Finite(p), SpherePoint::Finite(q)))
        }
    }

    /// Derivative modulus exceeds 1 away from an attracting fixed point; the
    /// attracting one has `|c z + d| > 1` (or `|a| > |d|` at infinity).
    fn is_attracting(&self, p: SpherePoint<T>) -> bool {
        match p {
            SpherePoint::Finite(z) => (self.c * z + self.d).norm() > T::one(),
            SpherePoint::Infinity => self.a.norm() > self.d.norm(),
        }
    }

    /// Axis of a loxodromic: its invariant geodesic, attracting endpoint second.
    pub fn axis(&self) -> Result<GeodesicH3<T>> {
        match self.classify() {
            Classification::Loxodromic => {}
            other => {
                return Err(Error::NoTranslationLength { kind: other.name() });
            }
        }
        let (p, q) = self.fixed_points()?;
        if self.is_attracting(q) {
            GeodesicH3::new(p, q)
        } else {
            GeodesicH3::new(q, p)
        }
    }

    /// The map sending `(p1, p2, p3)` to `(0, infinity, 1)`.
    pub fn to_standard_triple(
        p1: SpherePoint<T>,
        p2: SpherePoint<T>,
        p3: SpherePoint<T>,
    ) -> Result<Self> {
        let distinct = p1 != p2 && p2 != p3 && p1 != p3;
        if !distinct {
            return Err(Error::CoincidentPoints {
                which: "three-point map needs distinct points",
            });
        }
        use SpherePoint::{Finite, Infinity};
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        match (p1, p2, p3) {
            (Finite(z1), Finite(z2), Finite(z3)) => {
                Self::new(z3 - z2, -z1 * (z3 - z2), z3 - z1, -z2 * (z3 - z1))
            }
            (Infinity, Finite(z2), Finite(z3)) => Self::new(zero, z3 - z2, one, -z2),
            (Finite(z1), Infinity, Finite(z3)) => Self::new(one, -z1, zero, z3 - z1),
            (Finite(z1), Finite(z2), Infinity) => Self::new(one, -z1, one, -z2),
            _ => unreachable!("distinct points admit at most one infinity"),
        }
    }

    /// The unique map taking one ordered triple of distinct points to another.
    pub fn taking_triples(
        src: (SpherePoint<T>, SpherePoint<T>, SpherePoint<T>),
        dst: (SpherePoint<T>, SpherePoint<T>, SpherePoint<T>),
    ) -> Result<Self> {
        let s = Self::to_standard_triple(src.0, src.1, src.2)?;
        let d = Self::to_standard_triple(dst.0, dst.1, dst.2)?;
        Ok(d.inverse().compose(&s))
    }

    /// Elliptic rotation by `theta` about the geodesic from `p` to `q`,
    /// counterclockwise around `q` as seen in the plane: about `(0, inf)` it
    /// is `z -> e^{i theta} z`.
    pub fn elliptic_about(p: SpherePoint<T>, q: SpherePoint<T>, theta: T) -> Result<Self> {
        use SpherePoint::{Finite, Infinity};
        if p == q {
            return Err(Error::CoincidentPoints {
                which: "rotation axis needs distinct endpoints",
            });
        }
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let m = match (p, q) {
            (Finite(zp), Finite(zq)) => Self::new(one, -zp, one, -zq)?,
            (Infinity, Finite(zq)) => Self::new(zero, one, one, -zq)?,
            (Finite(zp), Infinity) => Self::new(one, -zp, zero, one)?,
            (Infinity, Infinity) => unreachable!(),
        };
        let half = theta / T::from_f64_lossy(2.0);
        let rot = MoebiusMap {
            a: Complex::new(half.cos(), half.sin()),
            b: zero,
            c: zero,
            d: Complex::new(half.cos(), -half.sin()),
        };
        Ok(m.inverse().compose(&rot).compose(&m))
    }

    /// Image of a circle or line, reconstructed through three image points.
    pub fn apply_circle(&self, circle: &Circle<T>) -> Result<Circle<T>> {
        let (p1, p2, p3) = circle.three_points();
        Circle::through_points(self.apply(p1), self.apply(p2), self.apply(p3))
    }

    /// Poincare extension to upper half-space. Isometric for the hyperbolic
    /// metric; assumes the stored normalization det = 1.
    pub fn apply_h3(&self, p: &H3Point<T>) -> H3Point<T> {
        let z = Complex::new(p.x1, p.x2);
        let t2 = p.t * p.t;
        let cz_d = self.c * z + self.d;
        let den = cz_d.norm_sqr() + self.c.norm_sqr() * t2;
        let num = (self.a * z + self.b) * cz_d.conj()
            + self.a * self.c.conj() * Complex::new(t2, T::zero());
        let w = num / Complex::new(den, T::zero());
        H3Point {
            x1: w.re,
            x2: w.im,
            t: p.t / den,
        }
    }
}

/// A point of upper half-space, `t > 0` strictly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H3Point<T: Real> {
    pub x1: T,
    pub x2: T,
    pub t: T,
}

impl<T: Real> H3Point<T> {
    pub fn new(x1: T, x2: T, t: T) -> Self {
        debug_assert!(t > T::zero(), "upper half-space needs t > 0");
        H3Point { x1, x2, t }
    }

    pub fn horizontal(&self) -> Complex<T> {
        Complex::new(self.x1, self.x2)
    }

    /// Hyperbolic distance in upper half-space, stable for nearby points.
    pub fn distance(&self, other: &Self) -> T {
        let dz = (self.horizontal() - other.horizontal()).norm_sqr();
        let dt = self.t - other.t;
        let num = (dz + dt * dt).sqrt();
        let two = T::from_f64_lossy(2.0);
        two * (num / (two * (self.t * other.t).sqrt())).asinh()
    }
}

/// A geodesic of hyperbolic 3-space, recorded by its distinct endpoints on
/// the sphere at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicH3<T: Real> {
    pub e1: SpherePoint<T>,
    pub e2: SpherePoint<T>,
}

impl<T: Real> GeodesicH3<T> {
    pub fn new(e1: SpherePoint<T>, e2: SpherePoint<T>) -> Result<Self> {
        if e1 == e2 {
            return Err(Error::CoincidentPoints {
                which: "geodesic endpoints must be distinct",
            });
        }
        Ok(GeodesicH3 { e1, e2 })
    }
}

/// A circle on the sphere: a proper Euclidean circle or a line (a circle
/// through infinity).
#[derive(Debug, Clone, Copy)]
pub enum Circle<T: Real> {
    Round { center: Complex<T>, radius: T },
    Line { anchor: Complex<T>, direction: Complex<T> },
}

impl<T: Real> Circle<T> {
    pub fn round(center: Complex<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::NonPositiveLength {
                value: radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Circle::Round { center, radius })
    }

    /// Line through `anchor`; the direction is normalized to modulus 1.
    pub fn line(anchor: Complex<T>, direction: Complex<T>) -> Result<Self> {
        let n = direction.norm();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::CoincidentPoints {
                which: "line direction must be nonzero",
            });
        }
        Ok(Circle::Line {
            anchor,
            direction: direction / Complex::new(n, T::zero()),
        })
    }

    pub fn unit() -> Self {
        Circle::Round {
            center: Complex::new(T::zero(), T::zero()),
            radius: T::one(),
        }
    }

    pub fn real_axis() -> Self {
        Circle::Line {
            anchor: Complex::new(T::zero(), T::zero()),
            direction: Complex::new(T::one(), T::zero()),
        }
    }

    /// Three distinct points on the circle, for mapping it through a
    /// transformation.
    pub fn three_points(&self) -> (SpherePoint<T>, SpherePoint<T>, SpherePoint<T>) {
        match *self {
            Circle::Round { center, radius } => {
                let r = Complex::new(radius, T::zero());
                let ir = Complex::new(T::zero(), radius);
                (
                    SpherePoint::Finite(center + r),
                    SpherePoint::Finite(center - r),
                    SpherePoint::Finite(center + ir),
                )
            }
            Circle::Line { anchor, direction } => (
                SpherePoint::Finite(anchor),
                SpherePoint::Finite(anchor + direction),
                SpherePoint::Infinity,
            ),
        }
    }

    /// Circle (or line) through three distinct sphere points.
    pub fn through_points(
        p1: SpherePoint<T>,
        p2: SpherePoint<T>,
        p3: SpherePoint<T>,
    ) -> Result<Self> {
        use SpherePoint::{Finite, Infinity};
        if p1 == p2 || p2 == p3 || p1 == p3 {
            return Err(Error::CoincidentPoints {
                which: "circle through three points needs them distinct",
            });
        }
        let (q1, q2) = match (p1, p2, p3) {
            (Infinity, Finite(a), Finite(b)) => (a, b),
            (Finite(a), Infinity, Finite(b)) => (a, b),
            (Finite(a), Finite(b), Infinity) => (a, b),
            (Finite(a), Finite(b), Finite(c)) => {
                let u = b - a;
                let v = c - a;
                let cross = u.re * v.im - u.im * v.re;
                let col_tol = T::epsilon() * T::from_f64_lossy(1e4);
                if cross.abs() <= col_tol * u.norm() * v.norm() {
                    return Circle::line(a, u);
                }
                // Circumcenter from the two perpendicular-bisector equations.
                let sa = a.norm_sqr();
                let r1 = b.norm_sqr() - sa;
                let r2 = c.norm_sqr() - sa;
                let two = T::from_f64_lossy(2.0);
                let det = two * two * cross;
                let cx = two * (r1 * v.im - r2 * u.im) / det;
                let cy = two * (r2 * u.re - r1 * v.re) / det;
                let center = Complex::new(cx, cy);
                return Circle::round(center, (a - center).norm());
            }
            _ => unreachable!("distinct points admit at most one infinity"),
        };
        Circle::line(q1, q2 - q1)
    }

    /// Signed distance of a point from the circle, zero on the circle.
    pub fn offset(&self, p: SpherePoint<T>) -> T {
        match (*self, p) {
            (Circle::Round { center, radius }, SpherePoint::Finite(z)) => {
                (z - center).norm() - radius
            }
            // Infinity is never on a proper circle.
            (Circle::Round { .. }, SpherePoint::Infinity) => T::infinity(),
            (Circle::Line { anchor, direction }, SpherePoint::Finite(z)) => {
                let w = z - anchor;
                direction.re * w.im - direction.im * w.re
            }
            (Circle::Line { .. }, SpherePoint::Infinity) => T::zero(),
        }
    }

    pub fn contains(&self, p: SpherePoint<T>, tol: T) -> bool {
        self.offset(p).abs() <= tol
    }
}

/// Unoriented intersection angle of two circles, in `[0, pi/2]`, computed
/// from the inversive distance. Lines are reduced to proper circles by a
/// Moebius change of coordinates first, which leaves the angle unchanged.
pub fn angle_between_circles<T: Real>(c1: &Circle<T>, c2: &Circle<T>) -> Result<T> {
    fn proper_pair<T: Real>(c1: &Circle<T>, c2: &Circle<T>) -> Result<((Complex<T>, T), (Complex<T>, T))> {
        if let (
            &Circle::Round { center: z1, radius: r1 },
            &Circle::Round { center: z2, radius: r2 },
        ) = (c1, c2)
        {
            return Ok(((z1, r1), (z2, r2)));
        }
        // Move some point lying on neither circle to infinity; both images
        // are then proper circles.
        for k in 0..8 {
            let x = T::from_f64_lossy(0.318 + 0.77 * k as f64);
            let y = T::from_f64_lossy(0.924 + 1.31 * k as f64);
            let p = SpherePoint::finite(x, y);
            let clearance = T::from_f64_lossy(1e-6);
            if c1.offset(p).abs() > clearance && c2.offset(p).abs() > clearance {
                // z -> 1/(z - p) sends the pivot to infinity, so both image
                // circles are proper.
                let inv = MoebiusMap::new(
                    Complex::new(T::zero(), T::zero()),
                    Complex::new(T::one(), T::zero()),
                    Complex::new(T::one(), T::zero()),
                    -Complex::new(x, y),
                )?;
                let i1 = inv.apply_circle(c1)?;
                let i2 = inv.apply_circle(c2)?;
                if let (
                    Circle::Round { center: z1, radius: r1 },
                    Circle::Round { center: z2, radius: r2 },
                ) = (i1, i2)
                {
                    return Ok(((z1, r1), (z2, r2)));
                }
            }
        }
        Err(Error::CoincidentPoints {
            which: "could not separate circles from the pivot point",
        })
    }

    let ((z1, r1), (z2, r2)) = proper_pair(c1, c2)?;
    let d2 = (z1 - z2).norm_sqr();
    let delta = (d2 - r1 * r1 - r2 * r2) / (T::from_f64_lossy(2.0) * r1 * r2);
    let tol = T::from_f64_lossy(1e-9);
    if delta.abs() > T::one() + tol {
        return Err(Error::NoIntersection {
            delta: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(delta.abs().min(T::one()).acos())
}

/// A totally geodesic plane in upper half-space: the hemisphere over a
/// proper circle, or the vertical half-plane over a line.
#[derive(Debug, Clone, Copy)]
pub enum Plane<T: Real> {
    Hemisphere { center: Complex<T>, radius: T },
    Vertical { anchor: Complex<T>, direction: Complex<T> },
}

/// The plane bounding the convex hull of the disc with the given boundary.
pub fn convex_hull_plane<T: Real>(c: &Circle<T>) -> Plane<T> {
    match *c {
        Circle::Round { center, radius } => Plane::Hemisphere { center, radius },
        Circle::Line { anchor, direction } => Plane::Vertical { anchor, direction },
    }
}

impl<T: Real> Plane<T> {
    pub fn boundary_circle(&self) -> Circle<T> {
        match *self {
            Plane::Hemisphere { center, radius } => Circle::Round { center, radius },
            Plane::Vertical { anchor, direction } => Circle::Line { anchor, direction },
        }
    }
}

/// Nearest-point projection of a sphere point onto a plane: the first
/// contact of the expanding horoball at the point with the plane. Over the
/// real axis it sends `x + iy` to `(x, 0, |y|)` exactly.
pub fn nearest_point_projection<T: Real>(zeta: SpherePoint<T>, plane: &Plane<T>) -> Result<H3Point<T>> {
    match *plane {
        Plane::Vertical { anchor, direction } => {
            let z = match zeta {
                SpherePoint::Infinity => return Err(Error::ProjectionOnBoundary),
                SpherePoint::Finite(z) => z,
            };
            let w = z - anchor;
            let along = direction.re * w.re + direction.im * w.im;
            let foot = anchor + direction * Complex::new(along, T::zero());
            let perp = z - foot;
            let t = perp.norm();
            if t == T::zero() {
                return Err(Error::ProjectionOnBoundary);
            }
            Ok(H3Point { x1: foot.re, x2: foot.im, t })
        }
        Plane::Hemisphere { center, radius } => {
            if zeta == SpherePoint::Infinity {
                // The horoball at infinity descends onto the hemisphere top.
                return Ok(H3Point { x1: center.re, x2: center.im, t: radius });
            }
            let r = Complex::new(radius, T::zero());
            let ir = Complex::new(T::zero(), radius);
            let m = MoebiusMap::to_standard_triple(
                SpherePoint::Finite(center - r),
                SpherePoint::Finite(center + r),
                SpherePoint::Finite(center + ir),
            )?;
            // m sends the boundary circle to a line through 0 and 1; its
            // direction is real, so the image plane is over the real axis.
            let image = m.apply(zeta);
            let z = match image {
                SpherePoint::Infinity => return Err(Error::ProjectionOnBoundary),
                SpherePoint::Finite(z) => z,
            };
            if z.im == T::zero() {
                return Err(Error::ProjectionOnBoundary);
            }
            let projected = H3Point { x1: z.re, x2: T::zero(), t: z.im.abs() };
            Ok(m.inverse().apply_h3(&projected))
        }
    }
}

/// A disc on the sphere: its boundary circle plus a sample interior point,
/// which pins down the side.
#[derive(Debug, Clone, Copy)]
pub struct Disc<T: Real> {
    pub boundary: Circle<T>,
    pub interior: SpherePoint<T>,
}

impl<T: Real> Disc<T> {
    pub fn new(boundary: Circle<T>, interior: SpherePoint<T>) -> Self {
        Disc { boundary, interior }
    }

    pub fn upper_half_plane() -> Self {
        Disc {
            boundary: Circle::real_axis(),
            interior: SpherePoint::finite(T::zero(), T::one()),
        }
    }

    pub fn unit_disc() -> Self {
        Disc {
            boundary: Circle::unit(),
            interior: SpherePoint::finite(T::zero(), T::zero()),
        }
    }
}

/// Result of bending a disc: the rotated disc and the sheet index
/// `floor(theta / pi)`, which distinguishes the sheets of a multi-sheeted
/// domain once the rotation passes the opposite half-plane.
#[derive(Debug, Clone, Copy)]
pub struct BentDisc<T: Real> {
    pub disc: Disc<T>,
    pub sheet: u32,
}

/// Rotates the disc by `theta` about the geodesic `l`, whose endpoints must
/// lie on the boundary circle (tolerance 1e-10). Bending the upper
/// half-plane about `(0, infinity)` by `theta` yields the half-plane over
/// the line `arg z = theta`.
pub fn bend_disc<T: Real>(d: &Disc<T>, l: &GeodesicH3<T>, theta: T) -> Result<BentDisc<T>> {
    if theta < T::zero() {
        return Err(Error::NonPositiveWeight {
            value: theta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let on_tol = T::from_f64_lossy(1e-10);
    if !d.boundary.contains(l.e1, on_tol) || !d.boundary.contains(l.e2, on_tol) {
        return Err(Error::CoincidentPoints {
            which: "bending geodesic endpoints must lie on the disc boundary",
        });
    }
    let rot = MoebiusMap::elliptic_about(l.e1, l.e2, theta)?;
    let boundary = rot.apply_circle(&d.boundary)?;
    let interior = rot.apply(d.interior);
    let sheet = (theta / T::PI())
        .floor()
        .to_f64()
        .map(|s| s as u32)
        .unwrap_or(0);
    Ok(BentDisc {
        disc: Disc { boundary, interior },
        sheet,
    })
}

/// Operations in the hyperbolic plane, modeled on the upper half-plane.
///
/// `log` and `exp` use the orthonormal frame at the base point obtained by
/// the affine recentering `z -> (z - Re p)/Im p`, which is an exact isometry
/// taking `p` to `i`; this keeps the computations stable even when chart
/// coordinates sit at scale `e^{+-30}`.
pub mod h2 {
    use super::*;

    /// Hyperbolic distance between upper half-plane points.
    pub fn dist<T: Real>(p: Complex<T>, q: Complex<T>) -> T {
        let two = T::from_f64_lossy(2.0);
        let num = (p - q).norm();
        two * (num / (two * (p.im * q.im).sqrt())).asinh()
    }

    /// Recenters `q` in the frame of `p`, sending `p` to `i`.
    fn recenter<T: Real>(p: Complex<T>, q: Complex<T>) -> Complex<T> {
        Complex::new((q.re - p.re) / p.im, q.im / p.im)
    }

    fn uncenter<T: Real>(p: Complex<T>, w: Complex<T>) -> Complex<T> {
        Complex::new(p.re + p.im * w.re, p.im * w.im)
    }

    /// Hyperboloid coordinates `(t, u, v)` of an upper half-plane point;
    /// `i` maps to `(1, 0, 0)`.
    fn hyperboloid<T: Real>(z: Complex<T>) -> (T, T, T) {
        let two = T::from_f64_lossy(2.0);
        let n = z.norm_sqr();
        let t = (n + T::one()) / (two * z.im);
        let u = (n - T::one()) / (two * z.im);
        let v = z.re / z.im;
        (t, u, v)
    }

    /// Riemannian logarithm: tangent vector at `p` pointing to `q`, with
    /// `|log| = dist(p, q)`, expressed as `horizontal + i * vertical` in the
    /// recentred orthonormal frame at `p`.
    pub fn log<T: Real>(p: Complex<T>, q: Complex<T>) -> Complex<T> {
        let zq = recenter(p, q);
        let (_, u, v) = hyperboloid(zq);
        let d = dist(p, q);
        let factor = if d < T::from_f64_lossy(1e-4) {
            // d/sinh d to fourth order; exact enough below the branch point.
            T::one() - d * d / T::from_f64_lossy(6.0)
        } else {
            d / d.sinh()
        };
        Complex::new(v * factor, u * factor)
    }

    /// Riemannian exponential at `p` of a tangent vector in the same frame
    /// `log` uses.
    pub fn exp<T: Real>(p: Complex<T>, w: Complex<T>) -> Complex<T> {
        let d = w.norm();
        if d == T::zero() {
            return p;
        }
        let (wu, wv) = (w.im / d, w.re / d);
        let t = d.cosh();
        let s = d.sinh();
        let (u, v) = (s * wu, s * wv);
        // Back from the hyperboloid: y = 1/(t - u), x = v y.
        let y = (t - u).recip();
        let x = v * y;
        uncenter(p, Complex::new(x, y))
    }

    /// Point a fraction `s` of the way along the geodesic from `p` to `q`.
    pub fn interpolate<T: Real>(p: Complex<T>, q: Complex<T>, s: T) -> Complex<T> {
        if s == T::zero() {
            return p;
        }
        if s == T::one() {
            return q;
        }
        exp(p, log(p, q) * Complex::new(s, T::zero()))
    }

    /// Applies a real Moebius map to an upper half-plane point, staying in
    /// complex (not sphere) coordinates.
    pub fn apply<T: Real>(m: &MoebiusMap<T>, z: Complex<T>) -> Complex<T> {
        m.apply_complex(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(l: f64) -> MoebiusMap<f64> {
        MoebiusMap::axis_translation(c64(l, 0.0))
    }

    #[test]
    fn classify_identity_loxodromic_elliptic_parabolic() {
        assert_eq!(
            MoebiusMap::<f64>::identity().classify(),
            Classification::Identity
        );
        assert_eq!(diag(1.0).classify(), Classification::Loxodromic);
        // z -> e^{i pi/3} z has trace 2 cos(pi/6), squared trace 3 < 4.
        let rot = MoebiusMap::elliptic_about(
            SpherePoint::finite(0.0, 0.0),
            SpherePoint::Infinity,
            std::f64::consts::FRAC_PI_3,
        )
        .unwrap();
        assert!((rot.trace().re - 2.0 * (std::f64::consts::FRAC_PI_6).cos()).abs() < EPS);
        assert_eq!(rot.classify(), Classification::Elliptic);
        let par = MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(par.classify(), Classification::Parabolic);
    }

    #[test]
    fn translation_length_matches_diagonal_model() {
        assert!((diag(3.0).translation_length().unwrap() - 3.0).abs() < EPS);
    }

    #[test]
    fn translation_length_of_trace_four() {
        // Any matrix of trace 4 translates by 2 arccosh(2).
        let lam = 2.0 + 3.0f64.sqrt();
        let m = MoebiusMap::from_real(lam, 0.0, 0.0, 1.0 / lam).unwrap();
        assert!((m.trace().re - 4.0).abs() < 1e-14);
        let expected = 2.6339157938496336; // 2 arccosh 2
        assert!((m.translation_length().unwrap() - expected).abs() < EPS);
    }

    #[test]
    fn translation_length_rejects_parabolic() {
        let par = MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        let err = par.translation_length().unwrap_err();
        assert!(err.to_string().contains("no positive translation length"));
    }

    #[test]
    fn axis_of_diagonal_and_conjugate() {
        let ax = diag(1.0).axis().unwrap();
        assert_eq!(ax.e1, SpherePoint::finite(0.0, 0.0));
        assert_eq!(ax.e2, SpherePoint::Infinity);

        let shift = MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        let m = shift.compose(&diag(1.0)).compose(&shift.inverse());
        let ax = m.axis().unwrap();
        match ax.e1 {
            SpherePoint::Finite(z) => assert!((z - c64(1.0, 0.0)).norm() < EPS),
            _ => panic!("expected finite repelling endpoint"),
        }
        assert_eq!(ax.e2, SpherePoint::Infinity);

        let rot = MoebiusMap::elliptic_about(
            SpherePoint::finite(0.0, 0.0),
            SpherePoint::Infinity,
            1.0,
        )
        .unwrap();
        assert!(rot.axis().is_err());
    }

    #[test]
    fn angle_of_lines_through_origin() {
        let l1 = Circle::real_axis();
        let l2 = Circle::line(c64(0.0, 0.0), c64(0.7f64.cos(), 0.7f64.sin())).unwrap();
        let angle = angle_between_circles(&l1, &l2).unwrap();
        assert!((angle - 0.7).abs() < 1e-9);
    }

    #[test]
    fn angle_of_unit_circle_and_real_axis_is_right() {
        let angle =
            angle_between_circles(&Circle::<f64>::unit(), &Circle::real_axis()).unwrap();
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn angle_of_two_unit_circles_at_distance_one() {
        // Inversive distance delta = -1/2; intersection angle pi/3.
        let c2 = Circle::round(c64(1.0, 0.0), 1.0).unwrap();
        let angle = angle_between_circles(&Circle::unit(), &c2).unwrap();
        assert!((angle - std::f64::consts::FRAC_PI_3).abs() < 1e-9);
    }

    #[test]
    fn disjoint_circles_report_no_intersection() {
        let c2 = Circle::round(c64(5.0, 0.0), 1.0).unwrap();
        let err = angle_between_circles(&Circle::unit(), &c2).unwrap_err();
        assert!(err.to_string().contains("no intersection"));
    }

    #[test]
    fn convex_hull_planes() {
        match convex_hull_plane(&Circle::<f64>::unit()) {
            Plane::Hemisphere { center, radius } => {
                assert_eq!(center, c64(0.0, 0.0));
                assert_eq!(radius, 1.0);
            }
            _ => panic!("expected hemisphere"),
        }
        match convex_hull_plane(&Circle::<f64>::real_axis()) {
            Plane::Vertical { .. } => {}
            _ => panic!("expected vertical plane"),
        }
        match convex_hull_plane(&Circle::round(c64(2.0, 0.0), 0.5).unwrap()) {
            Plane::Hemisphere { center, radius } => {
                assert_eq!(center, c64(2.0, 0.0));
                assert_eq!(radius, 0.5);
            }
            _ => panic!("expected hemisphere"),
        }
    }

    #[test]
    fn projection_to_plane_over_real_axis_is_exact() {
        let plane = convex_hull_plane(&Circle::real_axis());
        let p = nearest_point_projection(SpherePoint::finite(0.0, 1.0), &plane).unwrap();
        assert_eq!((p.x1, p.x2, p.t), (0.0, 0.0, 1.0));
        let p = nearest_point_projection(SpherePoint::finite(3.0, 2.0), &plane).unwrap();
        assert_eq!((p.x1, p.x2, p.t), (3.0, 0.0, 2.0));
        let err = nearest_point_projection(SpherePoint::finite(5.0, 0.0), &plane).unwrap_err();
        assert!(err.to_string().contains("projection undefined"));
    }

    #[test]
    fn projection_to_hemisphere() {
        let plane = convex_hull_plane(&Circle::<f64>::unit());
        // From the origin the expanding horoball first touches the top.
        let p = nearest_point_projection(SpherePoint::finite(0.0, 0.0), &plane).unwrap();
        assert!((p.x1.abs()).max(p.x2.abs()) < 1e-12);
        assert!((p.t - 1.0).abs() < 1e-12);
        let p = nearest_point_projection(SpherePoint::Infinity, &plane).unwrap();
        assert_eq!((p.x1, p.x2, p.t), (0.0, 0.0, 1.0));
    }

    #[test]
    fn projection_is_moebius_equivariant() {
        let g = MoebiusMap::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let plane = convex_hull_plane(&Circle::real_axis());
        let zeta = SpherePoint::finite(0.4, 1.3);
        let direct = nearest_point_projection(zeta, &plane).unwrap();
        let moved_plane = convex_hull_plane(&g.apply_circle(&Circle::real_axis()).unwrap());
        let via_image = nearest_point_projection(g.apply(zeta), &moved_plane).unwrap();
        let pushed = g.apply_h3(&direct);
        assert!(via_image.distance(&pushed) < 1e-9);
    }

    #[test]
    fn bend_upper_half_plane_examples() {
        let d = Disc::upper_half_plane();
        let l = GeodesicH3::new(SpherePoint::finite(0.0, 0.0), SpherePoint::Infinity).unwrap();

        let zero = bend_disc(&d, &l, 0.0).unwrap();
        match zero.disc.boundary {
            Circle::Line { anchor, direction } => {
                assert!(anchor.norm() < EPS);
                assert!(direction.im.abs() < EPS);
            }
            _ => panic!("expected a line"),
        }
        assert_eq!(zero.sheet, 0);

        let theta = std::f64::consts::FRAC_PI_3;
        let bent = bend_disc(&d, &l, theta).unwrap();
        match bent.disc.boundary {
            Circle::Line { anchor, direction } => {
                assert!(anchor.norm() < 1e-9 || (direction.im / direction.re - theta.tan()).abs() < 1e-9);
                let slope = direction.im.atan2(direction.re).rem_euclid(std::f64::consts::PI);
                assert!((slope - theta).abs() < 1e-9);
            }
            _ => panic!("expected a line"),
        }
        let angle = angle_between_circles(&d.boundary, &bent.disc.boundary).unwrap();
        assert!((angle - theta).abs() < 1e-9);
    }

    #[test]
    fn bend_unit_disc_about_real_diameter() {
        let d = Disc::unit_disc();
        let l = GeodesicH3::new(SpherePoint::finite(-1.0, 0.0), SpherePoint::finite(1.0, 0.0))
            .unwrap();
        let bent = bend_disc(&d, &l, std::f64::consts::FRAC_PI_2).unwrap();
        // The image circle still passes through the axis endpoints and meets
        // the unit circle at a right angle.
        assert!(bent.disc.boundary.contains(SpherePoint::finite(1.0, 0.0), 1e-9));
        assert!(bent.disc.boundary.contains(SpherePoint::finite(-1.0, 0.0), 1e-9));
        let angle = angle_between_circles(&Circle::unit(), &bent.disc.boundary).unwrap();
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn bend_composition_law() {
        let d = Disc::unit_disc();
        let l = GeodesicH3::new(SpherePoint::finite(-1.0, 0.0), SpherePoint::finite(1.0, 0.0))
            .unwrap();
        let (t1, t2) = (0.4, 0.9);
        let once = bend_disc(&d, &l, t1).unwrap();
        let twice = bend_disc(&once.disc, &l, t2).unwrap();
        let direct = bend_disc(&d, &l, t1 + t2).unwrap();
        let (p1, p2, p3) = direct.disc.boundary.three_points();
        for p in [p1, p2, p3] {
            assert!(twice.disc.boundary.contains(p, 1e-9));
        }
    }

    #[test]
    fn bend_sheet_index() {
        let d = Disc::upper_half_plane();
        let l = GeodesicH3::new(SpherePoint::finite(0.0, 0.0), SpherePoint::Infinity).unwrap();
        assert_eq!(bend_disc(&d, &l, 1.0).unwrap().sheet, 0);
        assert_eq!(bend_disc(&d, &l, 4.0).unwrap().sheet, 1);
        assert_eq!(bend_disc(&d, &l, 2.0 * std::f64::consts::PI).unwrap().sheet, 2);
    }

    #[test]
    fn bend_rejects_axis_off_boundary() {
        let d = Disc::upper_half_plane();
        let l = GeodesicH3::new(SpherePoint::finite(0.0, 1.0), SpherePoint::Infinity).unwrap();
        assert!(bend_disc(&d, &l, 0.3).is_err());
    }

    #[test]
    fn three_point_map_sends_triple_to_standard_positions() {
        let p1 = SpherePoint::finite(0.3, -0.4);
        let p2 = SpherePoint::finite(2.0, 1.0);
        let p3 = SpherePoint::finite(-1.0, 0.5);
        let m = MoebiusMap::to_standard_triple(p1, p2, p3).unwrap();
        assert!(m.apply(p1).chordal_distance(SpherePoint::finite(0.0, 0.0)) < 1e-12);
        assert!(m.apply(p2).chordal_distance(SpherePoint::Infinity) < 1e-12);
        assert!(m.apply(p3).chordal_distance(SpherePoint::finite(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn circle_through_points_recovers_unit_circle() {
        let c = Circle::through_points(
            SpherePoint::finite(1.0, 0.0),
            SpherePoint::finite(0.0, 1.0),
            SpherePoint::finite(-1.0, 0.0),
        )
        .unwrap();
        match c {
            Circle::Round { center, radius } => {
                assert!(center.norm() < EPS);
                assert!((radius - 1.0).abs() < EPS);
            }
            _ => panic!("expected round circle"),
        }
        let l = Circle::through_points(
            SpherePoint::finite(0.0, 0.0),
            SpherePoint::finite(1.0, 1.0),
            SpherePoint::finite(2.0, 2.0),
        )
        .unwrap();
        assert!(matches!(l, Circle::Line { .. }));
    }

    #[test]
    fn normalization_and_singularity() {
        let m = MoebiusMap::new(c64(3.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(3.0, 0.0))
            .unwrap();
        assert!((m.determinant() - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(MoebiusMap::new(c64(1.0, 0.0), c64(2.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0)).is_err());
    }

    #[test]
    fn h2_distance_along_imaginary_axis() {
        let d = h2::dist(c64(0.0, 1.0), c64(0.0, (3.0f64).exp()));
        assert!((d - 3.0).abs() < 1e-12);
        // Tiny separations keep full relative accuracy.
        let t = 1e-12;
        let d = h2::dist(c64(0.0, 1.0), c64(t, 1.0));
        assert!((d / t - 1.0).abs() < 1e-6);
    }

    #[test]
    fn h2_log_exp_round_trip() {
        let p = c64(0.7, 2.3);
        let q = c64(-4.0, 0.002);
        let w = h2::log(p, q);
        assert!((w.norm() - h2::dist(p, q)).abs() < 1e-10);
        let back = h2::exp(p, w);
        assert!(h2::dist(back, q) < 1e-9);
    }

    #[test]
    fn h2_interpolate_is_metrically_linear() {
        let p = c64(0.0, 1.0);
        let q = c64(3.0, 5.0);
        let total = h2::dist(p, q);
        let mid = h2::interpolate(p, q, 0.5);
        assert!((h2::dist(p, mid) - 0.5 * total).abs() < 1e-9);
        assert!((h2::dist(mid, q) - 0.5 * total).abs() < 1e-9);
    }

    #[test]
    fn h3_distance_and_isometry() {
        let p = H3Point::new(0.0, 0.0, 1.0);
        let q = H3Point::new(0.0, 0.0, (2.0f64).exp());
        assert!((p.distance(&q) - 2.0).abs() < 1e-12);
        let g = MoebiusMap::new(c64(1.2, 0.3), c64(0.1, -0.2), c64(0.0, 0.4), c64(0.9, 0.1))
            .unwrap();
        let r = H3Point::new(0.5, -0.3, 0.8);
        let d0 = p.distance(&r);
        let d1 = g.apply_h3(&p).distance(&g.apply_h3(&r));
        assert!((d0 - d1).abs() < 1e-10);
    }

    #[test]
    fn f32_smoke() {
        let m = MoebiusMap::<f32>::axis_translation(Complex::new(1.0f32, 0.0));
        assert_eq!(m.classify(), Classification::Loxodromic);
        let d = h2::dist(Complex::new(0.0f32, 1.0), Complex::new(0.0f32, 2.7182817));
        assert!((d - 1.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn prop_translation_length_is_conjugation_invariant(
            l in 0.2f64..4.0,
            ga in -2.0f64..2.0, gb in -2.0f64..2.0, gc in -2.0f64..2.0,
        ) {
            let gd = (1.0 + gb * gc) / if ga.abs() < 0.1 { 0.1 } else { ga };
            let g = match MoebiusMap::from_real(if ga.abs() < 0.1 { 0.1 } else { ga }, gb, gc, gd) {
                Ok(g) => g,
                Err(_) => return Ok(()),
            };
            let m = diag(l);
            let conj = g.compose(&m).compose(&g.inverse());
            let got = conj.translation_length().unwrap();
            prop_assert!((got - l).abs() < 1e-9);
        }

        #[test]
        fn prop_angle_is_moebius_invariant(
            x in -1.5f64..1.5, r in 0.6f64..2.5,
            ga in 0.2f64..2.0, gb in -2.0f64..2.0, gc in -1.0f64..1.0,
        ) {
            let c1 = Circle::unit();
            let c2 = Circle::round(c64(x, 0.3), r).unwrap();
            let angle = match angle_between_circles(&c1, &c2) {
                Ok(a) => a,
                Err(_) => return Ok(()), // disjoint sample
            };
            let gd = (1.0 + gb * gc) / ga;
            let g = MoebiusMap::from_real(ga, gb, gc, gd).unwrap();
            let i1 = g.apply_circle(&c1).unwrap();
            let i2 = g.apply_circle(&c2).unwrap();
            let moved = angle_between_circles(&i1, &i2).unwrap();
            prop_assert!((angle - moved).abs() < 1e-9);
        }

        #[test]
        fn prop_h2_dist_is_isometry_invariant(
            px in -3.0f64..3.0, py in 0.1f64..4.0,
            qx in -3.0f64..3.0, qy in 0.1f64..4.0,
            ga in 0.2f64..2.0, gb in -2.0f64..2.0, gc in -1.0f64..1.0,
        ) {
            let p = c64(px, py);
            let q = c64(qx, qy);
            let gd = (1.0 + gb * gc) / ga;
            let g = MoebiusMap::from_real(ga, gb, gc, gd).unwrap();
            let d0 = h2::dist(p, q);
            let d1 = h2::dist(h2::apply(&g, p), h2::apply(&g, q));
            prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0));
        }

        #[test]
        fn prop_exp_log_round_trip(
            px in -2.0f64..2.0, py in 0.2f64..3.0,
            wx in -3.0f64..3.0, wy in -3.0f64..3.0,
        ) {
            let p = c64(px, py);
            let w = c64(wx, wy);
            let q = h2::exp(p, w);
            let back = h2::log(p, q);
            prop_assert!((back - w).norm() < 1e-8 * (1.0 + w.norm()));
        }
    }
}
