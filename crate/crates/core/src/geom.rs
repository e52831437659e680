//! Exact planar geometry over Z[ψ]².

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goldfield::{AlgebraicNum, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("degenerate triangle {0:?}")]
    DegenerateTriangle(Box<[Point; 3]>),
    #[error("degenerate segment at {0:?}")]
    DegenerateSegment(Box<Point>),
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
}

/// A point with coordinates in Z[ψ]. Ordered lexicographically by real value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: AlgebraicNum,
    pub y: AlgebraicNum,
}

impl Point {
    pub fn new(x: AlgebraicNum, y: AlgebraicNum) -> Point {
        Point { x, y }
    }

    pub fn origin() -> Point {
        Point::default()
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn neg(&self) -> Point {
        Point::new(-&self.x, -&self.y)
    }

    pub fn scale(&self, k: &AlgebraicNum) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    pub fn mul_psi(&self) -> Point {
        Point::new(self.x.mul_psi(), self.y.mul_psi())
    }

    pub fn div_psi(&self) -> Point {
        Point::new(self.x.div_psi(), self.y.div_psi())
    }

    pub fn dot(&self, o: &Point) -> AlgebraicNum {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> AlgebraicNum {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> AlgebraicNum {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Point) -> AlgebraicNum {
        self.sub(o).norm2()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    /// True when `self` and `o` point the same way (both non-zero).
    pub fn same_direction(&self, o: &Point) -> bool {
        self.cross(o).is_zero() && self.dot(o).sign() == Sign::Positive
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.to_f64();
        write!(f, "({x:.6}, {y:.6})")
    }
}

/// Sign of the determinant of (q − p, r − p).
pub fn orient(p: &Point, q: &Point, r: &Point) -> Sign {
    q.sub(p).cross(&r.sub(p)).sign()
}

/// A planar isometry `p ↦ M·p + t` with M orthogonal over Z[ψ].
///
/// Serialized as `{"m": [m00, m01, m10, m11], "t": [tx, ty]}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    pub m00: AlgebraicNum,
    pub m01: AlgebraicNum,
    pub m10: AlgebraicNum,
    pub m11: AlgebraicNum,
    pub tx: AlgebraicNum,
    pub ty: AlgebraicNum,
}

#[derive(Serialize, Deserialize)]
struct IsometryJson {
    m: [AlgebraicNum; 4],
    t: [AlgebraicNum; 2],
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IsometryJson {
            m: [
                self.m00.clone(),
                self.m01.clone(),
                self.m10.clone(),
                self.m11.clone(),
            ],
            t: [self.tx.clone(), self.ty.clone()],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = IsometryJson::deserialize(d)?;
        let [m00, m01, m10, m11] = j.m;
        let [tx, ty] = j.t;
        Isometry::new(m00, m01, m10, m11, tx, ty).map_err(serde::de::Error::custom)
    }
}

impl Isometry {
    /// Checked constructor: MᵀM must be the identity exactly.
    pub fn new(
        m00: AlgebraicNum,
        m01: AlgebraicNum,
        m10: AlgebraicNum,
        m11: AlgebraicNum,
        tx: AlgebraicNum,
        ty: AlgebraicNum,
    ) -> Result<Isometry, GeomError> {
        let iso = Isometry {
            m00,
            m01,
            m10,
            m11,
            tx,
            ty,
        };
        if iso.is_orthogonal() {
            Ok(iso)
        } else {
            Err(GeomError::NotOrthogonal)
        }
    }

    pub fn identity() -> Isometry {
        Isometry::linear(
            AlgebraicNum::one(),
            AlgebraicNum::zero(),
            AlgebraicNum::zero(),
            AlgebraicNum::one(),
        )
    }

    fn linear(
        m00: AlgebraicNum,
        m01: AlgebraicNum,
        m10: AlgebraicNum,
        m11: AlgebraicNum,
    ) -> Isometry {
        Isometry {
            m00,
            m01,
            m10,
            m11,
            tx: AlgebraicNum::zero(),
            ty: AlgebraicNum::zero(),
        }
    }

    /// Counterclockwise rotation by a right angle.
    pub fn rotation90() -> Isometry {
        Isometry::linear(
            AlgebraicNum::zero(),
            AlgebraicNum::from_int(-1),
            AlgebraicNum::one(),
            AlgebraicNum::zero(),
        )
    }

    /// Rotation by π, i.e. the central symmetry about the origin.
    pub fn rotation180() -> Isometry {
        Isometry::rotation90().compose(&Isometry::rotation90())
    }

    pub fn reflect_x() -> Isometry {
        Isometry::linear(
            AlgebraicNum::one(),
            AlgebraicNum::zero(),
            AlgebraicNum::zero(),
            AlgebraicNum::from_int(-1),
        )
    }

    pub fn translation(v: &Point) -> Isometry {
        Isometry {
            tx: v.x.clone(),
            ty: v.y.clone(),
            ..Isometry::identity()
        }
    }

    /// The central symmetry about `c`.
    pub fn point_reflection(c: &Point) -> Isometry {
        let twice = c.add(c);
        Isometry::translation(&twice).compose(&Isometry::rotation180())
    }

    /// The isometry sending the origin to `origin` and the unit axes to `e1`, `e2`.
    /// Fails unless (e1, e2) is an orthonormal pair.
    pub fn from_frame(origin: &Point, e1: &Point, e2: &Point) -> Result<Isometry, GeomError> {
        Isometry::new(
            e1.x.clone(),
            e2.x.clone(),
            e1.y.clone(),
            e2.y.clone(),
            origin.x.clone(),
            origin.y.clone(),
        )
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &self.m00 * &p.x + &self.m01 * &p.y + &self.tx,
            &self.m10 * &p.x + &self.m11 * &p.y + &self.ty,
        )
    }

    /// Applies only the orthogonal part (for direction vectors).
    pub fn apply_linear(&self, v: &Point) -> Point {
        Point::new(
            &self.m00 * &v.x + &self.m01 * &v.y,
            &self.m10 * &v.x + &self.m11 * &v.y,
        )
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let t = self.apply(&Point::new(other.tx.clone(), other.ty.clone()));
        Isometry {
            m00: &self.m00 * &other.m00 + &self.m01 * &other.m10,
            m01: &self.m00 * &other.m01 + &self.m01 * &other.m11,
            m10: &self.m10 * &other.m00 + &self.m11 * &other.m10,
            m11: &self.m10 * &other.m01 + &self.m11 * &other.m11,
            tx: t.x,
            ty: t.y,
        }
    }

    pub fn invert(&self) -> Isometry {
        let lin = Isometry::linear(
            self.m00.clone(),
            self.m10.clone(),
            self.m01.clone(),
            self.m11.clone(),
        );
        let t = lin.apply(&Point::new(self.tx.clone(), self.ty.clone()));
        Isometry {
            tx: -t.x,
            ty: -t.y,
            ..lin
        }
    }

    pub fn det(&self) -> AlgebraicNum {
        &self.m00 * &self.m11 - &self.m01 * &self.m10
    }

    /// True for reflections (det = −1).
    pub fn is_reflection(&self) -> bool {
        self.det().sign() == Sign::Negative
    }

    pub fn is_orthogonal(&self) -> bool {
        let one = AlgebraicNum::one();
        &self.m00 * &self.m00 + &self.m10 * &self.m10 == one
            && &self.m01 * &self.m01 + &self.m11 * &self.m11 == one
            && (&self.m00 * &self.m01 + &self.m10 * &self.m11).is_zero()
    }

    pub fn translation_part(&self) -> Point {
        Point::new(self.tx.clone(), self.ty.clone())
    }

    /// Conjugation by a homothety about the origin with ratio ψᵏ:
    /// the map `p ↦ ψᵏ·g(ψ⁻ᵏ·p)`.
    pub fn conjugate_by_psi_scaling(&self, k: i32) -> Isometry {
        let s = AlgebraicNum::psi_pow(k);
        Isometry {
            tx: &self.tx * &s,
            ty: &self.ty * &s,
            ..self.clone()
        }
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Iso[{:.4} {:.4}; {:.4} {:.4} | {:.4}, {:.4}]",
            self.m00.to_f64(),
            self.m01.to_f64(),
            self.m10.to_f64(),
            self.m11.to_f64(),
            self.tx.to_f64(),
            self.ty.to_f64()
        )
    }
}

/// A closed segment with distinct endpoints. Direction matters for decorated sides.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Segment, GeomError> {
        if a == b {
            return Err(GeomError::DegenerateSegment(Box::new(a)));
        }
        Ok(Segment { a, b })
    }

    pub fn direction(&self) -> Point {
        self.b.sub(&self.a)
    }

    pub fn reversed(&self) -> Segment {
        Segment {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    pub fn length2(&self) -> AlgebraicNum {
        self.a.dist2(&self.b)
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        if orient(&self.a, &self.b, p) != Sign::Zero {
            return false;
        }
        let d = self.direction();
        let t = p.sub(&self.a).dot(&d);
        t.sign() != Sign::Negative && (&d.norm2() - &t).sign() != Sign::Negative
    }

    /// Containment in the open segment (endpoints excluded).
    pub fn contains_interior(&self, p: &Point) -> bool {
        p != &self.a && p != &self.b && self.contains(p)
    }

    pub fn is_collinear_with(&self, other: &Segment) -> bool {
        orient(&self.a, &self.b, &other.a) == Sign::Zero
            && orient(&self.a, &self.b, &other.b) == Sign::Zero
    }

    pub fn midpoint_f64(&self) -> (f64, f64) {
        let (ax, ay) = self.a.to_f64();
        let (bx, by) = self.b.to_f64();
        ((ax + bx) / 2.0, (ay + by) / 2.0)
    }
}

/// The common part of two collinear segments when it has positive length,
/// oriented along `s1`.
pub fn segment_overlap(s1: &Segment, s2: &Segment) -> Option<Segment> {
    if !s1.is_collinear_with(s2) {
        return None;
    }
    let d = s1.direction();
    let key = |p: &Point| p.sub(&s1.a).dot(&d);
    let (mut lo2, mut hi2) = (s2.a.clone(), s2.b.clone());
    if key(&lo2) > key(&hi2) {
        std::mem::swap(&mut lo2, &mut hi2);
    }
    let lo = if key(&lo2) > key(&s1.a) {
        lo2
    } else {
        s1.a.clone()
    };
    let hi = if key(&hi2) < key(&s1.b) {
        hi2
    } else {
        s1.b.clone()
    };
    if key(&lo) < key(&hi) {
        Some(Segment { a: lo, b: hi })
    } else {
        None
    }
}

/// A non-degenerate triangle with vertices stored counterclockwise.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Triangle {
    v: [Point; 3],
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point) -> Result<Triangle, GeomError> {
        match orient(&a, &b, &c) {
            Sign::Positive => Ok(Triangle { v: [a, b, c] }),
            Sign::Negative => Ok(Triangle { v: [a, c, b] }),
            Sign::Zero => Err(GeomError::DegenerateTriangle(Box::new([a, b, c]))),
        }
    }

    pub fn vertices(&self) -> &[Point; 3] {
        &self.v
    }

    /// Counterclockwise edges.
    pub fn edges(&self) -> [(&Point, &Point); 3] {
        [
            (&self.v[0], &self.v[1]),
            (&self.v[1], &self.v[2]),
            (&self.v[2], &self.v[0]),
        ]
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.edges()
            .iter()
            .all(|(a, b)| orient(a, b, p) != Sign::Negative)
    }

    pub fn contains_interior(&self, p: &Point) -> bool {
        self.edges()
            .iter()
            .all(|(a, b)| orient(a, b, p) == Sign::Positive)
    }

    /// Twice the area.
    pub fn double_area(&self) -> AlgebraicNum {
        self.v[1].sub(&self.v[0]).cross(&self.v[2].sub(&self.v[0]))
    }

    /// True iff the interiors intersect. Two convex polygons have disjoint
    /// interiors iff an edge line of one of them weakly separates them.
    pub fn overlaps(&self, other: &Triangle) -> bool {
        let separates = |t: &Triangle, u: &Triangle| {
            t.edges()
                .iter()
                .any(|(a, b)| u.v.iter().all(|p| orient(a, b, p) != Sign::Positive))
        };
        !(separates(self, other) || separates(other, self))
    }

    pub fn bbox_f64(&self) -> [f64; 4] {
        let mut b = [
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        ];
        for p in &self.v {
            let (x, y) = p.to_f64();
            b[0] = b[0].min(x);
            b[1] = b[1].min(y);
            b[2] = b[2].max(x);
            b[3] = b[3].max(y);
        }
        b
    }
}

/// Interior-intersection test on raw vertex triples.
pub fn triangles_overlap(t1: &[Point; 3], t2: &[Point; 3]) -> Result<bool, GeomError> {
    let a = Triangle::new(t1[0].clone(), t1[1].clone(), t1[2].clone())?;
    let b = Triangle::new(t2[0].clone(), t2[1].clone(), t2[2].clone())?;
    Ok(a.overlaps(&b))
}
