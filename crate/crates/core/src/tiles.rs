//! Proto-tiles, side decorations, decorated tiles and patches.
//!
//! Canonical proto-tiles have their right angle at the origin, the large leg
//! along +x and the small leg along +y:
//!
//! | shape | large leg | small leg | hypotenuse |
//! |-------|-----------|-----------|------------|
//! | L     | ψ²        | ψ³        | ψ          |
//! | S     | ψ³        | ψ⁴        | ψ²         |
//!
//! Each side has a designated direction: both legs run from the right-angle
//! vertex to their far end, the hypotenuse from the large-leg end to the
//! small-leg end. A side's arrow is stored relative to that direction, so a
//! decoration is intrinsic to the tile and is carried along by its placement.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{segment_overlap, GeomError, Isometry, Point, Segment, Triangle};
use crate::goldfield::{AlgebraicNum, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileShape {
    #[serde(rename = "S")]
    Small,
    #[serde(rename = "L")]
    Large,
}

impl TileShape {
    pub const ALL: [TileShape; 2] = [TileShape::Small, TileShape::Large];

    /// Exponents k of the side lengths ψᵏ as (large leg, small leg, hypotenuse).
    pub fn side_exponents(self) -> (i32, i32, i32) {
        match self {
            TileShape::Large => (2, 3, 1),
            TileShape::Small => (3, 4, 2),
        }
    }

    /// Right-angle vertex, large-leg end, small-leg end.
    pub fn canonical_vertices(self) -> [Point; 3] {
        let (ll, sl, _) = self.side_exponents();
        [
            Point::origin(),
            Point::new(AlgebraicNum::psi_pow(ll), AlgebraicNum::zero()),
            Point::new(AlgebraicNum::zero(), AlgebraicNum::psi_pow(sl)),
        ]
    }

    pub fn letter(self) -> char {
        match self {
            TileShape::Small => 'S',
            TileShape::Large => 'L',
        }
    }

    /// Required label parity (0 even, 1 odd) of each side.
    pub fn parity(self, side: SideId) -> u8 {
        match (self, side) {
            (TileShape::Large, SideId::LargeLeg) => 1,
            (TileShape::Large, _) => 0,
            (TileShape::Small, SideId::LargeLeg) => 0,
            (TileShape::Small, _) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SideId {
    #[serde(rename = "hyp")]
    Hyp,
    #[serde(rename = "lleg")]
    LargeLeg,
    #[serde(rename = "sleg")]
    SmallLeg,
}

impl SideId {
    pub const ALL: [SideId; 3] = [SideId::Hyp, SideId::LargeLeg, SideId::SmallLeg];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Indices into the canonical vertex triple of (start, end).
    pub fn endpoints(self) -> (usize, usize) {
        match self {
            SideId::LargeLeg => (0, 1),
            SideId::SmallLeg => (0, 2),
            SideId::Hyp => (1, 2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "fwd")]
    Forward,
    #[serde(rename = "bwd")]
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Possibly partial decoration of one side: a label in Z₄ and an arrow.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SideDecoration {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<Direction>,
}

impl SideDecoration {
    pub const NONE: SideDecoration = SideDecoration {
        label: None,
        dir: None,
    };

    pub fn full(label: u8, dir: Direction) -> SideDecoration {
        SideDecoration {
            label: Some(label % 4),
            dir: Some(dir),
        }
    }

    pub fn is_full(&self) -> bool {
        self.label.is_some() && self.dir.is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_none() && self.dir.is_none()
    }

    /// Agreement wherever both sides carry information.
    pub fn compatible(&self, other: &SideDecoration) -> bool {
        opt_agree(self.label, other.label) && opt_agree(self.dir, other.dir)
    }

    /// Union of the information, or `None` on a conflict.
    pub fn merge(&self, other: &SideDecoration) -> Option<SideDecoration> {
        if !self.compatible(other) {
            return None;
        }
        Some(SideDecoration {
            label: self.label.or(other.label),
            dir: self.dir.or(other.dir),
        })
    }

    pub fn shift_label(&self, by: i8) -> SideDecoration {
        SideDecoration {
            label: self.label.map(|l| ((l as i8 + by).rem_euclid(4)) as u8),
            dir: self.dir,
        }
    }
}

fn opt_agree<T: PartialEq>(a: Option<T>, b: Option<T>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TileError {
    #[error("tile {new:?} overlaps existing tile {existing:?}")]
    Overlap {
        new: Box<DecoratedTile>,
        existing: Box<DecoratedTile>,
    },
    #[error("label {label} on {side:?} of a {shape:?} tile violates the parity rule")]
    Parity {
        shape: TileShape,
        side: SideId,
        label: u8,
    },
    #[error("label {0} out of range 0..4")]
    LabelRange(u8),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A tile: proto-tile shape, placement and per-side decoration.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TileJson", into = "TileJson")]
pub struct DecoratedTile {
    pub shape: TileShape,
    pub placement: Isometry,
    pub sides: [SideDecoration; 3],
}

#[derive(Serialize, Deserialize)]
struct SidesJson {
    hyp: Option<SideDecoration>,
    lleg: Option<SideDecoration>,
    sleg: Option<SideDecoration>,
}

#[derive(Serialize, Deserialize)]
struct TileJson {
    shape: TileShape,
    iso: Isometry,
    sides: SidesJson,
}

impl From<DecoratedTile> for TileJson {
    fn from(t: DecoratedTile) -> TileJson {
        let s = |d: SideDecoration| if d.is_empty() { None } else { Some(d) };
        TileJson {
            shape: t.shape,
            iso: t.placement,
            sides: SidesJson {
                hyp: s(t.sides[SideId::Hyp.index()]),
                lleg: s(t.sides[SideId::LargeLeg.index()]),
                sleg: s(t.sides[SideId::SmallLeg.index()]),
            },
        }
    }
}

impl TryFrom<TileJson> for DecoratedTile {
    type Error = TileError;
    fn try_from(j: TileJson) -> Result<DecoratedTile, TileError> {
        let mut t = DecoratedTile::new(j.shape, j.iso);
        for (side, d) in [
            (SideId::Hyp, j.sides.hyp),
            (SideId::LargeLeg, j.sides.lleg),
            (SideId::SmallLeg, j.sides.sleg),
        ] {
            let d = d.unwrap_or_default();
            if let Some(l) = d.label {
                if l > 3 {
                    return Err(TileError::LabelRange(l));
                }
            }
            t.sides[side.index()] = d;
        }
        t.check_parity()?;
        Ok(t)
    }
}

impl fmt::Debug for DecoratedTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.vertices();
        write!(f, "{}{:?}{:?}{:?}", self.shape.letter(), v[0], v[1], v[2])?;
        for side in SideId::ALL {
            let d = self.sides[side.index()];
            if !d.is_empty() {
                let l = d.label.map_or("?".to_string(), |l| l.to_string());
                let a = match d.dir {
                    Some(Direction::Forward) => "+",
                    Some(Direction::Backward) => "-",
                    None => "?",
                };
                write!(f, " {side:?}={l}{a}")?;
            }
        }
        Ok(())
    }
}

/// Identity of a tile inside a patch: its shape and placed vertices. Orders
/// lexicographically by placed-vertex coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileKey {
    pub vertices: [Point; 3],
    pub shape: TileShape,
}

impl DecoratedTile {
    /// An undecorated tile.
    pub fn new(shape: TileShape, placement: Isometry) -> DecoratedTile {
        DecoratedTile {
            shape,
            placement,
            sides: [SideDecoration::NONE; 3],
        }
    }

    /// A tile given its right-angle vertex, large-leg end and small-leg end.
    pub fn from_vertices(
        shape: TileShape,
        right: &Point,
        large_end: &Point,
        small_end: &Point,
    ) -> Result<DecoratedTile, GeomError> {
        let (ll, sl, _) = shape.side_exponents();
        let e1 = large_end.sub(right).scale(&AlgebraicNum::psi_pow(-ll));
        let e2 = small_end.sub(right).scale(&AlgebraicNum::psi_pow(-sl));
        let iso = Isometry::from_frame(right, &e1, &e2)?;
        Ok(DecoratedTile::new(shape, iso))
    }

    pub fn with_side(mut self, side: SideId, d: SideDecoration) -> DecoratedTile {
        self.sides[side.index()] = d;
        self
    }

    /// Fully decorates the tile with (label, direction) for hyp, large leg, small leg.
    pub fn decorated(
        mut self,
        hyp: (u8, Direction),
        lleg: (u8, Direction),
        sleg: (u8, Direction),
    ) -> DecoratedTile {
        self.sides = [
            SideDecoration::full(hyp.0, hyp.1),
            SideDecoration::full(lleg.0, lleg.1),
            SideDecoration::full(sleg.0, sleg.1),
        ];
        self
    }

    pub fn side(&self, side: SideId) -> SideDecoration {
        self.sides[side.index()]
    }

    pub fn key(&self) -> TileKey {
        TileKey {
            vertices: self.vertices(),
            shape: self.shape,
        }
    }

    /// Placed (right-angle vertex, large-leg end, small-leg end).
    pub fn vertices(&self) -> [Point; 3] {
        self.shape
            .canonical_vertices()
            .map(|p| self.placement.apply(&p))
    }

    pub fn triangle(&self) -> Triangle {
        let [a, b, c] = self.vertices();
        Triangle::new(a, b, c).expect("placed proto-tiles are non-degenerate")
    }

    /// The placed side, directed by its designated start → end convention.
    pub fn side_segment(&self, side: SideId) -> Segment {
        let v = self.vertices();
        let (s, e) = side.endpoints();
        Segment {
            a: v[s].clone(),
            b: v[e].clone(),
        }
    }

    /// The side directed by its arrow, if the arrow is known.
    pub fn side_arrow(&self, side: SideId) -> Option<Segment> {
        let seg = self.side_segment(side);
        match self.sides[side.index()].dir? {
            Direction::Forward => Some(seg),
            Direction::Backward => Some(seg.reversed()),
        }
    }

    /// The stored arrow bit that makes this side point along `dir` (a vector
    /// parallel to the side).
    pub fn direction_along(&self, side: SideId, dir: &Point) -> Direction {
        if self.side_segment(side).direction().dot(dir).sign() == Sign::Positive {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }

    pub fn is_fully_decorated(&self) -> bool {
        self.sides.iter().all(|d| d.is_full())
    }

    pub fn is_undecorated(&self) -> bool {
        self.sides.iter().all(|d| d.is_empty())
    }

    pub fn undecorated(&self) -> DecoratedTile {
        DecoratedTile::new(self.shape, self.placement.clone())
    }

    /// Labels that are present must obey the parity rule.
    pub fn check_parity(&self) -> Result<(), TileError> {
        for side in SideId::ALL {
            if let Some(l) = self.sides[side.index()].label {
                if l % 2 != self.shape.parity(side) {
                    return Err(TileError::Parity {
                        shape: self.shape,
                        side,
                        label: l,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.triangle().contains(p)
    }

    pub fn sides_through(&self, p: &Point) -> Vec<SideId> {
        SideId::ALL
            .into_iter()
            .filter(|s| self.side_segment(*s).contains(p))
            .collect()
    }

    /// Keeps only the decorations of sides passing through `p`.
    pub fn restricted_to(&self, p: &Point) -> DecoratedTile {
        let mut t = self.undecorated();
        for s in self.sides_through(p) {
            t.sides[s.index()] = self.sides[s.index()];
        }
        t
    }

    pub fn transformed(&self, g: &Isometry) -> DecoratedTile {
        DecoratedTile {
            shape: self.shape,
            placement: g.compose(&self.placement),
            sides: self.sides,
        }
    }

    /// Twice the (positive) area.
    pub fn double_area(&self) -> AlgebraicNum {
        self.triangle().double_area()
    }

    pub fn same_placement(&self, other: &DecoratedTile) -> bool {
        self.shape == other.shape && self.placement == other.placement
    }
}

/// How two decorated sides sharing an interval disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MismatchKind {
    Label,
    Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeViolation {
    pub first: DecoratedTile,
    pub first_side: SideId,
    pub second: DecoratedTile,
    pub second_side: SideId,
    pub kind: MismatchKind,
}

/// Checks the matching condition between two sides: if their segments share
/// an interval of positive length, labels and geometric arrow directions must
/// agree wherever both are known.
pub fn side_mismatch(
    t: &DecoratedTile,
    s: SideId,
    u: &DecoratedTile,
    r: SideId,
) -> Option<MismatchKind> {
    let dt = t.side(s);
    let du = u.side(r);
    if dt.is_empty() || du.is_empty() {
        return None;
    }
    let seg_t = t.side_segment(s);
    let seg_u = u.side_segment(r);
    segment_overlap(&seg_t, &seg_u)?;
    if !opt_agree(dt.label, du.label) {
        return Some(MismatchKind::Label);
    }
    if let (Some(a), Some(b)) = (t.side_arrow(s), u.side_arrow(r)) {
        if a.direction().dot(&b.direction()).sign() != Sign::Positive {
            return Some(MismatchKind::Direction);
        }
    }
    None
}

const CELL: f64 = 0.5;
const EPS: f64 = 1e-7;

fn cells(b: [f64; 4]) -> impl Iterator<Item = (i64, i64)> {
    let x0 = ((b[0] - EPS) / CELL).floor() as i64;
    let y0 = ((b[1] - EPS) / CELL).floor() as i64;
    let x1 = ((b[2] + EPS) / CELL).floor() as i64;
    let y1 = ((b[3] + EPS) / CELL).floor() as i64;
    (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
}

fn bbox_meets(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a[0] <= b[2] + EPS && b[0] <= a[2] + EPS && a[1] <= b[3] + EPS && b[1] <= a[3] + EPS
}

/// A finite set of pairwise non-overlapping tiles, iterated in canonical order.
#[derive(Clone, Default)]
pub struct Patch {
    tiles: BTreeMap<TileKey, DecoratedTile>,
    boxes: HashMap<TileKey, [f64; 4]>,
    grid: HashMap<(i64, i64), Vec<TileKey>>,
}

impl PartialEq for Patch {
    fn eq(&self, other: &Patch) -> bool {
        self.tiles == other.tiles
    }
}

impl Eq for Patch {}

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.tiles.values()).finish()
    }
}

impl Patch {
    pub fn new() -> Patch {
        Patch::default()
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DecoratedTile> {
        self.tiles.values()
    }

    pub fn get(&self, key: &TileKey) -> Option<&DecoratedTile> {
        self.tiles.get(key)
    }

    /// The member with the same shape and placement as `t`, if any.
    pub fn find(&self, t: &DecoratedTile) -> Option<&DecoratedTile> {
        self.tiles.get(&t.key())
    }

    /// Builds a patch, rejecting overlapping tiles.
    pub fn from_tiles<I: IntoIterator<Item = DecoratedTile>>(tiles: I) -> Result<Patch, TileError> {
        let mut p = Patch::new();
        for t in tiles {
            p.add_tile(t)?;
        }
        Ok(p)
    }

    /// Builds a patch from tiles known to be pairwise non-overlapping.
    pub(crate) fn from_tiles_unchecked<I: IntoIterator<Item = DecoratedTile>>(tiles: I) -> Patch {
        let mut p = Patch::new();
        for t in tiles {
            p.insert_unchecked(t);
        }
        p
    }

    /// Inserts `t` unless it overlaps a member.
    pub fn add_tile(&mut self, t: DecoratedTile) -> Result<(), TileError> {
        if let Some(existing) = self.overlapping(&t.triangle()).into_iter().next() {
            return Err(TileError::Overlap {
                new: Box::new(t),
                existing: Box::new(existing.clone()),
            });
        }
        self.insert_unchecked(t);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, t: DecoratedTile) {
        let key = t.key();
        let bb = t.triangle().bbox_f64();
        if self.tiles.insert(key.clone(), t).is_none() {
            for c in cells(bb) {
                self.grid.entry(c).or_default().push(key.clone());
            }
            self.boxes.insert(key, bb);
        }
    }

    /// Replaces the decoration of a member tile.
    pub(crate) fn set_sides(&mut self, key: &TileKey, sides: [SideDecoration; 3]) {
        if let Some(t) = self.tiles.get_mut(key) {
            t.sides = sides;
        }
    }

    pub fn remove(&mut self, key: &TileKey) -> Option<DecoratedTile> {
        let t = self.tiles.remove(key)?;
        if let Some(bb) = self.boxes.remove(key) {
            for c in cells(bb) {
                if let Some(v) = self.grid.get_mut(&c) {
                    v.retain(|k| k != key);
                }
            }
        }
        Some(t)
    }

    /// Members whose bounding box meets `bb` (approximate pre-filter), in
    /// canonical order.
    pub fn near_bbox(&self, bb: [f64; 4]) -> Vec<&DecoratedTile> {
        let mut keys: BTreeSet<&TileKey> = BTreeSet::new();
        for c in cells(bb) {
            if let Some(v) = self.grid.get(&c) {
                for k in v {
                    if bbox_meets(&self.boxes[k], &bb) {
                        keys.insert(k);
                    }
                }
            }
        }
        keys.into_iter().map(|k| &self.tiles[k]).collect()
    }

    /// Members whose interior meets the interior of `tri`.
    pub fn overlapping(&self, tri: &Triangle) -> Vec<&DecoratedTile> {
        self.near_bbox(tri.bbox_f64())
            .into_iter()
            .filter(|t| t.triangle().overlaps(tri))
            .collect()
    }

    /// Members whose closed triangle contains `p`.
    pub fn tiles_containing(&self, p: &Point) -> Vec<&DecoratedTile> {
        let (x, y) = p.to_f64();
        self.near_bbox([x, y, x, y])
            .into_iter()
            .filter(|t| t.contains(p))
            .collect()
    }

    /// All tile vertices, sorted.
    pub fn vertices(&self) -> Vec<Point> {
        let set: BTreeSet<Point> = self.iter().flat_map(|t| t.vertices()).collect();
        set.into_iter().collect()
    }

    /// Sum of twice the tile areas.
    pub fn double_area(&self) -> AlgebraicNum {
        self.iter().map(|t| t.double_area()).sum()
    }

    pub fn transformed(&self, g: &Isometry) -> Patch {
        Patch::from_tiles_unchecked(self.iter().map(|t| t.transformed(g)))
    }

    pub fn undecorated(&self) -> Patch {
        Patch::from_tiles_unchecked(self.iter().map(|t| t.undecorated()))
    }

    /// Every pair of sides of distinct tiles sharing a positive-length
    /// interval whose known labels or arrows disagree.
    pub fn edge_consistency(&self) -> Vec<EdgeViolation> {
        let mut out = Vec::new();
        for t in self.iter() {
            let tk = t.key();
            for u in self.near_bbox(t.triangle().bbox_f64()) {
                if u.key() <= tk {
                    continue;
                }
                for s in SideId::ALL {
                    for r in SideId::ALL {
                        if let Some(kind) = side_mismatch(t, s, u, r) {
                            out.push(EdgeViolation {
                                first: t.clone(),
                                first_side: s,
                                second: u.clone(),
                                second_side: r,
                                kind,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct PatchJson {
    tiles: Vec<DecoratedTile>,
}

impl Serialize for Patch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PatchJson {
            tiles: self.iter().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Patch {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PatchJson::deserialize(d)?;
        Patch::from_tiles(j.tiles).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(k: i32) -> AlgebraicNum {
        AlgebraicNum::psi_pow(k)
    }

    fn pt(x: AlgebraicNum, y: AlgebraicNum) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn placed_vertices_of_canonical_tiles() {
        let l = DecoratedTile::new(TileShape::Large, Isometry::identity());
        assert_eq!(
            l.vertices(),
            [
                Point::origin(),
                pt(psi(2), AlgebraicNum::zero()),
                pt(AlgebraicNum::zero(), psi(3))
            ]
        );
        let s = DecoratedTile::new(TileShape::Small, Isometry::identity());
        assert_eq!(
            s.vertices(),
            [
                Point::origin(),
                pt(psi(3), AlgebraicNum::zero()),
                pt(AlgebraicNum::zero(), psi(4))
            ]
        );
        let shift = Point::new(AlgebraicNum::one(), AlgebraicNum::zero());
        let moved = l.transformed(&Isometry::translation(&shift));
        for (a, b) in moved.vertices().iter().zip(l.vertices().iter()) {
            assert_eq!(a, &b.add(&shift));
        }
    }

    #[test]
    fn side_lengths_are_powers_of_psi() {
        for shape in TileShape::ALL {
            let t = DecoratedTile::new(
                shape,
                Isometry::rotation90().compose(&Isometry::reflect_x()),
            );
            let (ll, sl, h) = shape.side_exponents();
            assert_eq!(t.side_segment(SideId::LargeLeg).length2(), psi(2 * ll));
            assert_eq!(t.side_segment(SideId::SmallLeg).length2(), psi(2 * sl));
            assert_eq!(t.side_segment(SideId::Hyp).length2(), psi(2 * h));
        }
    }

    #[test]
    fn side_segments_follow_convention() {
        let l = DecoratedTile::new(TileShape::Large, Isometry::identity());
        let ll = l.side_segment(SideId::LargeLeg);
        assert_eq!(
            (ll.a, ll.b),
            (Point::origin(), pt(psi(2), AlgebraicNum::zero()))
        );
        let h = l.side_segment(SideId::Hyp);
        assert_eq!(
            (h.a, h.b),
            (
                pt(psi(2), AlgebraicNum::zero()),
                pt(AlgebraicNum::zero(), psi(3))
            )
        );
        // A reflected copy keeps its bits; the placed arrow is transported.
        let d = l
            .clone()
            .with_side(SideId::Hyp, SideDecoration::full(2, Direction::Backward));
        let r = d.transformed(&Isometry::reflect_x());
        assert_eq!(r.side(SideId::Hyp), d.side(SideId::Hyp));
        let arrow = r.side_arrow(SideId::Hyp).unwrap();
        assert_eq!(arrow.a, pt(AlgebraicNum::zero(), -psi(3)));
    }

    #[test]
    fn from_vertices_recovers_placement() {
        let g = Isometry::translation(&pt(psi(-1), psi(3)))
            .compose(&Isometry::rotation90())
            .compose(&Isometry::reflect_x());
        for shape in TileShape::ALL {
            let t = DecoratedTile::new(shape, g.clone());
            let [r, a, b] = t.vertices();
            let u = DecoratedTile::from_vertices(shape, &r, &a, &b).unwrap();
            assert_eq!(u.placement, g);
        }
    }

    #[test]
    fn add_tile_detects_overlap() {
        let l = DecoratedTile::new(TileShape::Large, Isometry::identity());
        let mut p = Patch::new();
        p.add_tile(l.clone()).unwrap();
        assert_eq!(p.len(), 1);
        assert!(matches!(p.add_tile(l), Err(TileError::Overlap { .. })));
        // The mirror image across the x-axis only shares the large leg.
        let m = DecoratedTile::new(TileShape::Large, Isometry::reflect_x());
        p.add_tile(m).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn canonical_order_ignores_insertion_order() {
        let tiles: Vec<_> = [
            Isometry::identity(),
            Isometry::reflect_x(),
            Isometry::rotation180(),
            Isometry::rotation180().compose(&Isometry::reflect_x()),
        ]
        .into_iter()
        .map(|g| DecoratedTile::new(TileShape::Large, g))
        .collect();
        let a = Patch::from_tiles(tiles.clone()).unwrap();
        let b = Patch::from_tiles(tiles.into_iter().rev()).unwrap();
        let ka: Vec<_> = a.iter().map(|t| t.key()).collect();
        let kb: Vec<_> = b.iter().map(|t| t.key()).collect();
        assert_eq!(ka, kb);
    }

    #[test]
    fn edge_consistency_flags_label_and_direction() {
        let l = DecoratedTile::new(TileShape::Large, Isometry::identity());
        let m = DecoratedTile::new(TileShape::Large, Isometry::reflect_x());
        let fwd = |k| SideDecoration::full(k, Direction::Forward);
        let good = Patch::from_tiles([
            l.clone().with_side(SideId::LargeLeg, fwd(1)),
            m.clone().with_side(SideId::LargeLeg, fwd(1)),
        ])
        .unwrap();
        assert!(good.edge_consistency().is_empty());
        let labels = Patch::from_tiles([
            l.clone().with_side(SideId::LargeLeg, fwd(1)),
            m.clone().with_side(SideId::LargeLeg, fwd(3)),
        ])
        .unwrap();
        let v = labels.edge_consistency();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, MismatchKind::Label);
        let dirs = Patch::from_tiles([
            l.with_side(SideId::LargeLeg, fwd(1)),
            m.with_side(
                SideId::LargeLeg,
                SideDecoration::full(1, Direction::Backward),
            ),
        ])
        .unwrap();
        let v = dirs.edge_consistency();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, MismatchKind::Direction);
    }

    #[test]
    fn json_format() {
        let t = DecoratedTile::new(TileShape::Large, Isometry::identity()).decorated(
            (0, Direction::Forward),
            (1, Direction::Backward),
            (2, Direction::Forward),
        );
        let p = Patch::from_tiles([t]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            concat!(
                r#"{"tiles":[{"shape":"L","iso":{"m":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[1,0,0,0]],"t":[[0,0,0,0],[0,0,0,0]]},"#,
                r#""sides":{"hyp":{"label":0,"dir":"fwd"},"lleg":{"label":1,"dir":"bwd"},"sleg":{"label":2,"dir":"fwd"}}}]}"#
            )
        );
        let back: Patch = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_parity_violation() {
        let s = r#"{"tiles":[{"shape":"L","iso":{"m":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[1,0,0,0]],"t":[[0,0,0,0],[0,0,0,0]]},"sides":{"hyp":{"label":1,"dir":"fwd"},"lleg":null,"sleg":null}}]}"#;
        assert!(serde_json::from_str::<Patch>(s).is_err());
    }
}
