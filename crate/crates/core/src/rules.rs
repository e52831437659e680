//! Stars, crowns, their catalogs up to isometry, and the local rule L.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{orient, Isometry, Point};
use crate::goldfield::Sign;
use crate::subst::{
    admissible_seeds, decompose_with_roles, dvo_decompose_with, dvo_shift, homothety, Coloring5,
    DvoRule, DVO_RULE,
};
use crate::tiles::{
    DecoratedTile, Direction, EdgeViolation, Patch, SideDecoration, SideId, TileKey, TileShape,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RulesError {
    #[error("{0:?} is not a vertex of any tile")]
    NotAVertex(Point),
    #[error("star catalog is inconsistent: {0}")]
    Classification(String),
}

/// Angular sector of a tile at a point, as (start ray, end ray) counterclockwise.
fn wedge(t: &DecoratedTile, v: &Point) -> Option<(Point, Point)> {
    let [a, b, c] = t.vertices();
    let ccw = |p: &Point, q: &Point, r: &Point| {
        if orient(p, q, r) == Sign::Positive {
            (q.sub(p), r.sub(p))
        } else {
            (r.sub(p), q.sub(p))
        }
    };
    if *v == a {
        return Some(ccw(&a, &b, &c));
    }
    if *v == b {
        return Some(ccw(&b, &c, &a));
    }
    if *v == c {
        return Some(ccw(&c, &a, &b));
    }
    for (p, q, r) in [(&a, &b, &c), (&b, &c, &a), (&c, &a, &b)] {
        let seg = crate::geom::Segment {
            a: p.clone(),
            b: q.clone(),
        };
        if seg.contains_interior(v) {
            let fwd = q.sub(p);
            return Some(if orient(p, q, r) == Sign::Positive {
                (fwd.clone(), fwd.neg())
            } else {
                (fwd.neg(), fwd)
            });
        }
    }
    None
}

/// Whether the tiles cover a neighborhood of `v`. Tiles are assumed pairwise
/// non-overlapping, so their sectors close up around `v` exactly when every
/// end ray is also some start ray.
pub fn covers_neighborhood<'a, I>(tiles: I, v: &Point) -> bool
where
    I: IntoIterator<Item = &'a DecoratedTile>,
{
    let mut wedges = Vec::new();
    for t in tiles {
        if t.triangle().contains_interior(v) {
            return true;
        }
        if let Some(w) = wedge(t, v) {
            wedges.push(w);
        }
    }
    !wedges.is_empty()
        && wedges
            .iter()
            .all(|(_, end)| wedges.iter().any(|(start, _)| start.same_direction(end)))
}

/// All tiles containing a vertex, with decorations kept only on sides
/// through that vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: Point,
    pub tiles: Vec<DecoratedTile>,
    pub complete: bool,
}

pub fn extract_star(p: &Patch, v: &Point) -> Result<Star, RulesError> {
    let found = p.tiles_containing(v);
    if !found.iter().any(|t| t.vertices().contains(v)) {
        return Err(RulesError::NotAVertex(v.clone()));
    }
    Ok(star_from_tiles(v, found))
}

fn star_from_tiles<'a, I>(v: &Point, tiles: I) -> Star
where
    I: IntoIterator<Item = &'a DecoratedTile>,
{
    let tiles: Vec<DecoratedTile> = tiles.into_iter().map(|t| t.restricted_to(v)).collect();
    let complete = covers_neighborhood(&tiles, v);
    Star {
        center: v.clone(),
        tiles,
        complete,
    }
}

impl Star {
    pub fn transformed(&self, g: &Isometry) -> Star {
        Star {
            center: g.apply(&self.center),
            tiles: self.tiles.iter().map(|t| t.transformed(g)).collect(),
            complete: self.complete,
        }
    }

    /// Patch made of the star tiles.
    pub fn to_patch(&self) -> Patch {
        Patch::from_tiles_unchecked(self.tiles.iter().cloned())
    }

    /// The star at H(center) in the decomposition of the star's tiles.
    pub fn decompose(&self) -> Star {
        let c = homothety(&self.center);
        let children: Vec<DecoratedTile> = self
            .tiles
            .iter()
            .flat_map(|t| decompose_with_roles(t).into_iter().map(|(t, _)| t))
            .filter(|t| t.contains(&c))
            .collect();
        star_from_tiles(&c, &children)
    }

    /// Rays leaving the center along decorated sides, with the side label and
    /// whether the arrow points into the center.
    pub fn rays(&self) -> Vec<Ray> {
        let mut out: Vec<Ray> = Vec::new();
        for t in &self.tiles {
            for side in t.sides_through(&self.center) {
                let d = t.side(side);
                let Some(arrow) = t.side_arrow(side) else {
                    continue;
                };
                let seg = t.side_segment(side);
                let dir = arrow.direction();
                let mut push = |ray: Point| {
                    let incoming = ray.dot(&dir).sign() == Sign::Negative;
                    if !out.iter().any(|r| r.dir.same_direction(&ray)) {
                        out.push(Ray {
                            dir: ray,
                            label: d.label,
                            incoming,
                        });
                    }
                };
                if seg.a == self.center {
                    push(seg.b.sub(&seg.a));
                } else if seg.b == self.center {
                    push(seg.a.sub(&seg.b));
                } else {
                    push(seg.b.sub(&seg.a));
                    push(seg.a.sub(&seg.b));
                }
            }
        }
        out
    }

    /// The through-line carrying an arrow that enters and leaves the center
    /// with one label: (direction of the arrow, label).
    pub fn axes(&self) -> Vec<(Point, Option<u8>)> {
        let rays = self.rays();
        let mut out = Vec::new();
        for r in rays.iter().filter(|r| r.incoming) {
            let back = r.dir.neg();
            if let Some(o) = rays
                .iter()
                .find(|o| !o.incoming && o.dir.same_direction(&back) && o.label == r.label)
            {
                out.push((o.dir.clone(), r.label));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray {
    pub dir: Point,
    pub label: Option<u8>,
    pub incoming: bool,
}

/// A tile set with a center, expressed in a normalized frame. Two fragments
/// are congruent exactly when their keys are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FragmentKey<P> {
    pub center: Point,
    pub tiles: Vec<(TileKey, P)>,
}

pub type StarKey = FragmentKey<[SideDecoration; 3]>;
pub type ShapeKey = FragmentKey<()>;
pub type CrownKey = FragmentKey<u8>;

/// The least key over all frames putting one of the tiles in canonical
/// position, and every frame attaining it.
fn canonical_fragment<P: Clone + Ord>(
    center: &Point,
    items: &[(DecoratedTile, P)],
) -> (FragmentKey<P>, Vec<Isometry>) {
    let mut best: Option<(FragmentKey<P>, Vec<Isometry>)> = None;
    for (t, _) in items {
        let g = t.placement.invert();
        let mut tiles: Vec<(TileKey, P)> = items
            .iter()
            .map(|(u, p)| (u.transformed(&g).key(), p.clone()))
            .collect();
        tiles.sort();
        let key = FragmentKey {
            center: g.apply(center),
            tiles,
        };
        match &mut best {
            Some((b, frames)) if *b == key => frames.push(g),
            Some((b, _)) if *b < key => {}
            _ => best = Some((key, vec![g])),
        }
    }
    best.unwrap_or_else(|| {
        (
            FragmentKey {
                center: center.clone(),
                tiles: Vec::new(),
            },
            vec![Isometry::identity()],
        )
    })
}

pub fn canonical_star(s: &Star) -> StarKey {
    let items: Vec<_> = s.tiles.iter().map(|t| (t.clone(), t.sides)).collect();
    canonical_fragment(&s.center, &items).0
}

/// An isometry taking `s` to the canonical position of its decorated key.
pub fn canonical_star_frame(s: &Star) -> Isometry {
    let items: Vec<_> = s.tiles.iter().map(|t| (t.clone(), t.sides)).collect();
    canonical_fragment(&s.center, &items).1.swap_remove(0)
}

/// Key of the undecorated star, with the frames attaining it.
pub fn star_shape(s: &Star) -> (ShapeKey, Vec<Isometry>) {
    let items: Vec<_> = s.tiles.iter().map(|t| (t.clone(), ())).collect();
    canonical_fragment(&s.center, &items)
}

/// Legal star class: shape C₁..C₇ plus the decoration of its axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StarClass {
    pub shape_index: u8,
    pub axis_label: u8,
    /// Direction of the axis arrow in the canonical frame of the shape.
    pub axis_direction: Direction,
}

impl fmt::Display for StarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.axis_direction {
            Direction::Forward => '+',
            Direction::Backward => '-',
        };
        write!(f, "C{}[{}{}]", self.shape_index, self.axis_label, d)
    }
}

fn lex_positive(v: &Point) -> bool {
    match v.x.sign() {
        Sign::Positive => true,
        Sign::Negative => false,
        Sign::Zero => v.y.sign() == Sign::Positive,
    }
}

/// Identifying features of a star shape.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShapeFeatures {
    pub on_large_leg_of_large: bool,
    pub on_hyp_of_large: bool,
    pub smalls_share_small_leg: bool,
    pub larges_share_small_leg: bool,
    pub smalls_share_hyp: bool,
}

fn same_segment(t: &DecoratedTile, s: SideId, u: &DecoratedTile, r: SideId) -> bool {
    let a = t.side_segment(s);
    let b = u.side_segment(r);
    (a.a == b.a && a.b == b.b) || (a.a == b.b && a.b == b.a)
}

fn shares(star: &Star, shape: TileShape, side: SideId) -> bool {
    let ts: Vec<_> = star.tiles.iter().filter(|t| t.shape == shape).collect();
    ts.iter()
        .enumerate()
        .any(|(i, t)| ts[i + 1..].iter().any(|u| same_segment(t, side, u, side)))
}

pub fn shape_features(star: &Star) -> ShapeFeatures {
    let interior_on = |side: SideId| {
        star.tiles.iter().any(|t| {
            t.shape == TileShape::Large && t.side_segment(side).contains_interior(&star.center)
        })
    };
    ShapeFeatures {
        on_large_leg_of_large: interior_on(SideId::LargeLeg),
        on_hyp_of_large: interior_on(SideId::Hyp),
        smalls_share_small_leg: shares(star, TileShape::Small, SideId::SmallLeg),
        larges_share_small_leg: shares(star, TileShape::Large, SideId::SmallLeg),
        smalls_share_hyp: shares(star, TileShape::Small, SideId::Hyp),
    }
}

/// A classified legal star, stored in the canonical frame of its decorated
/// key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogStar {
    pub class: StarClass,
    pub key: StarKey,
    pub star: Star,
}

/// The legal stars: every complete star of a supertile, up to isometry.
#[derive(Clone, Debug, Default)]
pub struct StarCatalog {
    stars: Vec<CatalogStar>,
    index: BTreeMap<StarKey, usize>,
    shapes: BTreeMap<ShapeClassKey, u8>,
}

/// Undecorated shape plus axis label parity.
type ShapeClassKey = (ShapeKey, u8);

fn shape_class_key(s: &Star) -> Option<ShapeClassKey> {
    let axes = s.axes();
    let [(_, Some(label))] = axes.as_slice() else {
        return None;
    };
    Some((star_shape(s).0, label % 2))
}

/// Complete stars at all vertices of the patch.
pub fn complete_stars(p: &Patch) -> Vec<Star> {
    p.vertices()
        .par_iter()
        .filter_map(|v| {
            let s = star_from_tiles(v, p.tiles_containing(v));
            s.complete.then_some(s)
        })
        .collect()
}

/// Canonical complete stars of the given patches, one representative each.
pub fn collect_complete_stars<'a, I>(patches: I) -> BTreeMap<StarKey, Star>
where
    I: IntoIterator<Item = &'a Patch>,
{
    let mut out = BTreeMap::new();
    for p in patches {
        let found: Vec<(StarKey, Star)> = complete_stars(p)
            .into_par_iter()
            .map(|s| (canonical_star(&s), s))
            .collect();
        for (k, s) in found {
            out.entry(k).or_insert(s);
        }
    }
    out
}

/// Complete stars of supertiles of order ≤ `max_order` over all admissible
/// seeds, named and classified.
pub fn build_star_catalog(max_order: u32) -> Result<StarCatalog, RulesError> {
    let mut all = BTreeMap::new();
    for seed in admissible_seeds() {
        let seq = crate::subst::supertile_sequence(max_order, &seed)
            .expect("admissible seeds are decorated large tiles");
        for (k, s) in collect_complete_stars(seq.iter()) {
            all.entry(k).or_insert(s);
        }
    }
    StarCatalog::from_stars(all.into_values())
}

impl StarCatalog {
    /// Names shape classes C₁..C₇. A shape class is an undecorated star
    /// shape together with the parity of its axis label (two of the classes
    /// share one undecorated shape). C₁ is centered inside the large leg of a
    /// large tile, Cᵢ₊₁ is the image of Cᵢ under decomposition for i < 6, and
    /// the remaining class is C₇.
    pub fn from_stars<I: IntoIterator<Item = Star>>(stars: I) -> Result<StarCatalog, RulesError> {
        let err = |m: String| RulesError::Classification(m);
        let mut by_key: BTreeMap<StarKey, Star> = BTreeMap::new();
        for s in stars {
            if !s.complete {
                return Err(err("incomplete star".into()));
            }
            by_key.entry(canonical_star(&s)).or_insert(s);
        }
        let mut rep: BTreeMap<ShapeClassKey, Star> = BTreeMap::new();
        for s in by_key.values() {
            let k = shape_class_key(s).ok_or_else(|| err("star without a single axis".into()))?;
            rep.entry(k).or_insert_with(|| s.clone());
        }
        let mut image: BTreeMap<ShapeClassKey, ShapeClassKey> = BTreeMap::new();
        for (k, s) in &rep {
            let d = shape_class_key(&s.decompose())
                .ok_or_else(|| err("decomposed star without a single axis".into()))?;
            image.insert(k.clone(), d);
        }
        let c1: Vec<&ShapeClassKey> = rep
            .iter()
            .filter(|(_, s)| shape_features(s).on_large_leg_of_large)
            .map(|(k, _)| k)
            .collect();
        if c1.len() != 1 {
            return Err(err(format!("{} classes centered on a large leg", c1.len())));
        }
        let mut shapes: BTreeMap<ShapeClassKey, u8> = BTreeMap::new();
        let mut cur = c1[0].clone();
        for i in 1..=6u8 {
            if shapes.insert(cur.clone(), i).is_some() {
                return Err(err(format!("decomposition chain repeats at C{i}")));
            }
            cur = image
                .get(&cur)
                .ok_or_else(|| err("decomposition leaves the catalog".into()))?
                .clone();
        }
        for k in rep.keys() {
            if !shapes.contains_key(k) {
                let n = shapes.len() as u8 + 1;
                shapes.insert(k.clone(), n);
            }
        }
        let mut cat = StarCatalog {
            stars: Vec::new(),
            index: BTreeMap::new(),
            shapes,
        };
        let mut stars = Vec::new();
        for (k, s) in by_key {
            let class = cat
                .classify_shape(&s)
                .ok_or_else(|| err("star without axis".into()))?;
            let (_, frames) = canonical_fragment(
                &s.center,
                &s.tiles
                    .iter()
                    .map(|t| (t.clone(), t.sides))
                    .collect::<Vec<_>>(),
            );
            stars.push(CatalogStar {
                class,
                key: k,
                star: s.transformed(&frames[0]),
            });
        }
        stars.sort_by(|a, b| a.class.cmp(&b.class).then_with(|| a.key.cmp(&b.key)));
        for (i, s) in stars.iter().enumerate() {
            cat.index.insert(s.key.clone(), i);
        }
        cat.stars = stars;
        Ok(cat)
    }

    /// Class of a complete star from its shape and axis, whether or not the
    /// star itself is legal.
    fn classify_shape(&self, s: &Star) -> Option<StarClass> {
        let (sk, frames) = star_shape(s);
        let axes = s.axes();
        let [(dir, label)] = axes.as_slice() else {
            return None;
        };
        let label = (*label)?;
        let shape_index = *self.shapes.get(&(sk, label % 2))?;
        let forward = frames.iter().any(|g| lex_positive(&g.apply_linear(dir)));
        Some(StarClass {
            shape_index,
            axis_label: label,
            axis_direction: if forward {
                Direction::Forward
            } else {
                Direction::Backward
            },
        })
    }

    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    pub fn stars(&self) -> &[CatalogStar] {
        &self.stars
    }

    pub fn shape_count(&self) -> usize {
        self.shapes.len()
    }

    pub fn shape_index(&self, s: &Star) -> Option<u8> {
        self.shapes.get(&shape_class_key(s)?).copied()
    }

    pub fn keys(&self) -> BTreeSet<StarKey> {
        self.index.keys().cloned().collect()
    }

    /// The catalog entry congruent to `s`, if `s` is legal.
    pub fn lookup(&self, s: &Star) -> Option<&CatalogStar> {
        if !s.complete {
            return None;
        }
        self.index.get(&canonical_star(s)).map(|&i| &self.stars[i])
    }

    pub fn classify(&self, s: &Star) -> Option<StarClass> {
        self.lookup(s).map(|c| c.class)
    }

    pub fn get(&self, class: &StarClass) -> Option<&CatalogStar> {
        self.stars.iter().find(|c| c.class == *class)
    }

    pub fn of_shape(&self, shape_index: u8) -> impl Iterator<Item = &CatalogStar> {
        self.stars
            .iter()
            .filter(move |c| c.class.shape_index == shape_index)
    }

    /// Shape classes of the catalog as sizes, indexed by shape.
    pub fn shape_sizes(&self) -> BTreeMap<u8, usize> {
        let mut out = BTreeMap::new();
        for s in &self.stars {
            *out.entry(s.class.shape_index).or_insert(0) += 1;
        }
        out
    }

    /// Decomposition acting on classes.
    pub fn closure_map(&self) -> BTreeMap<StarClass, Option<StarClass>> {
        self.stars
            .iter()
            .map(|c| (c.class, self.classify(&c.star.decompose())))
            .collect()
    }
}

pub fn is_legal_star(s: &Star, catalog: &StarCatalog) -> bool {
    catalog.lookup(s).is_some()
}

/// Violations of rule L in a patch.
#[derive(Clone, Debug, Default)]
pub struct RuleReport {
    pub edge_violations: Vec<EdgeViolation>,
    pub illegal_stars: Vec<Star>,
}

impl RuleReport {
    pub fn is_empty(&self) -> bool {
        self.edge_violations.is_empty() && self.illegal_stars.is_empty()
    }
}

#[allow(non_snake_case)]
pub fn check_rule_L(p: &Patch, catalog: &StarCatalog) -> RuleReport {
    let illegal_stars = complete_stars(p)
        .into_par_iter()
        .filter(|s| !is_legal_star(s, catalog))
        .collect();
    RuleReport {
        edge_violations: p.edge_consistency(),
        illegal_stars,
    }
}

/// Checks the arrow pattern around the center of a legal star: arrows off
/// the axis point inward, except one or two outgoing arrows orthogonal to the
/// axis. Labels on the two sides of the axis follow n+1, n+2, n+3 and
/// n−1, n, n+1 for the inward arrow at the smaller acute angle, the inward
/// arrow at the larger acute angle and the outgoing arrow, where n is the
/// axis label.
pub fn arrow_pattern_holds(s: &Star) -> bool {
    let axes = s.axes();
    let [(axis, Some(n))] = axes.as_slice() else {
        return false;
    };
    let n = *n as i32;
    let rays = s.rays();
    let mut outgoing = 0;
    // Offsets (smaller acute, larger acute, outgoing) on each side.
    let mut sides: [Vec<(u8, i32)>; 2] = [Vec::new(), Vec::new()];
    for r in &rays {
        if r.dir.same_direction(axis) || r.dir.same_direction(&axis.neg()) {
            continue;
        }
        let Some(label) = r.label else { return false };
        let side = usize::from(axis.cross(&r.dir).sign() == Sign::Negative);
        let dot = r.dir.dot(axis);
        let kind = if !r.incoming {
            if !dot.is_zero() {
                return false;
            }
            outgoing += 1;
            2
        } else {
            if dot.is_zero() {
                return false;
            }
            // The smaller acute angle is below 45°: 2·dot² > |r|²·|axis|².
            let lhs = &(&dot * &dot) * &crate::goldfield::AlgebraicNum::from_int(2);
            let rhs = &r.dir.norm2() * &axis.norm2();
            if (&lhs - &rhs).sign() == Sign::Positive {
                0
            } else {
                1
            }
        };
        sides[side].push((kind, label as i32));
    }
    if !(1..=2).contains(&outgoing) {
        return false;
    }
    let matches = |side: &Vec<(u8, i32)>, base: [i32; 3]| {
        side.iter()
            .all(|(k, l)| (base[*k as usize] - l).rem_euclid(4) == 0)
    };
    let a = [n + 1, n + 2, n + 3];
    let b = [n - 1, n, n + 1];
    (matches(&sides[0], a) && matches(&sides[1], b))
        || (matches(&sides[0], b) && matches(&sides[1], a))
}

/// All tiles containing a vertex, with their five-color marks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crown {
    pub center: Point,
    pub tiles: Vec<(DecoratedTile, u8)>,
    pub complete: bool,
}

pub fn extract_crown(p: &Patch, c: &Coloring5, v: &Point) -> Result<Crown, RulesError> {
    let found = p.tiles_containing(v);
    if !found.iter().any(|t| t.vertices().contains(v)) {
        return Err(RulesError::NotAVertex(v.clone()));
    }
    let complete = covers_neighborhood(found.iter().copied(), v);
    Ok(Crown {
        center: v.clone(),
        tiles: found
            .into_iter()
            .map(|t| (t.undecorated(), c.marks.get(&t.key()).copied().unwrap_or(0)))
            .collect(),
        complete,
    })
}

pub fn canonical_crown(c: &Crown) -> CrownKey {
    canonical_fragment(&c.center, &c.tiles).0
}

fn shift_crown_key(k: &CrownKey, y: u8) -> CrownKey {
    let mut c = Coloring5::default();
    for (t, m) in &k.tiles {
        c.marks.insert(t.clone(), *m);
    }
    let shifted = dvo_shift(&c, y);
    let mut tiles: Vec<(TileKey, u8)> = shifted.marks.into_iter().collect();
    tiles.sort();
    // Shifting does not move tiles, but the least frame may change.
    let items: Vec<(DecoratedTile, u8)> = tiles
        .into_iter()
        .map(|(k, m)| {
            let [r, a, b] = &k.vertices;
            (
                DecoratedTile::from_vertices(k.shape, r, a, b)
                    .expect("catalog tiles are proto-tiles"),
                m,
            )
        })
        .collect();
    canonical_fragment(&k.center, &items).0
}

/// Complete crowns of five-colored supertiles of order ≤ `max_order`, over all
/// five seed colors.
pub fn build_crown_catalog(max_order: u32) -> BTreeSet<CrownKey> {
    build_crown_catalog_with(max_order, &DVO_RULE)
}

pub fn build_crown_catalog_with(max_order: u32, rule: &DvoRule) -> BTreeSet<CrownKey> {
    let mut out = BTreeSet::new();
    for mark in 0..5u8 {
        let seed = DecoratedTile::new(TileShape::Large, Isometry::identity());
        let mut c = Coloring5::default();
        c.marks.insert(seed.key(), mark);
        let mut p = Patch::from_tiles_unchecked([seed]);
        for _ in 0..max_order {
            (p, c) = dvo_decompose_with(&p, &c, rule);
            let found: Vec<CrownKey> = p
                .vertices()
                .par_iter()
                .filter_map(|v| {
                    let cr = extract_crown(&p, &c, v).ok()?;
                    cr.complete.then(|| canonical_crown(&cr))
                })
                .collect();
            out.extend(found);
        }
    }
    out
}

/// Orbits of the catalog under shifts, or `None` if some shift leaves it.
pub fn crown_classes(catalog: &BTreeSet<CrownKey>) -> Option<Vec<Vec<CrownKey>>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for k in catalog {
        if seen.contains(k) {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for y in 0..5 {
            let s = shift_crown_key(k, y);
            if !catalog.contains(&s) {
                return None;
            }
            orbit.insert(s);
        }
        seen.extend(orbit.iter().cloned());
        out.push(orbit.into_iter().collect());
    }
    Some(out)
}
