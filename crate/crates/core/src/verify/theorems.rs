//! Finite checks of the structural statements about supertiles: how
//! decomposition acts on legal stars, composition, extendability of boundary
//! stars, the covering observation, inner proto-tiles, where C₁ occurs, seed
//! recurrence, and the need for the star condition in rule L.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geom::{orient, Isometry, Point, Segment};
use crate::goldfield::AlgebraicNum;
use crate::rules::{complete_stars, extract_star, is_legal_star, StarCatalog, StarClass};
use crate::subst::{
    admissible_seeds, compose_interior, compose_patch, decompose_patch, homothety, homothety_inv,
    supertile, supertile_sequence,
};
use crate::tiles::{DecoratedTile, Direction, Patch, SideDecoration, SideId, TileShape};

use super::fits::FitIndex;

/// How decomposition acts on star classes.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    /// Image of every class, `None` when the image is not a catalog star.
    pub map: Vec<(StarClass, Option<StarClass>)>,
    /// Images of shape classes.
    pub shape_map: BTreeMap<u8, BTreeSet<u8>>,
    pub total: bool,
    pub c5_to_c6: bool,
    pub c7_to_c6: bool,
    /// C₆ and C₇ stars return to themselves after four decompositions.
    pub c6_c7_period_4: bool,
    /// Axis labels grow by one under every arrow.
    pub labels_increment: bool,
    pub passed: bool,
}

pub fn verify_closure(catalog: &StarCatalog) -> ClosureReport {
    let map = catalog.closure_map();
    let total = map.values().all(Option::is_some);
    let mut shape_map: BTreeMap<u8, BTreeSet<u8>> = BTreeMap::new();
    for (from, to) in &map {
        if let Some(to) = to {
            shape_map
                .entry(from.shape_index)
                .or_default()
                .insert(to.shape_index);
        }
    }
    let maps_to = |from: u8, to: u8| shape_map.get(&from) == Some(&BTreeSet::from([to]));
    let c5_to_c6 = maps_to(5, 6);
    let c7_to_c6 = maps_to(7, 6);
    let iterate =
        |c: StarClass, n: usize| (0..n).try_fold(c, |c, _| map.get(&c).copied().flatten());
    let c6_c7_period_4 = map
        .keys()
        .filter(|c| c.shape_index >= 6)
        .all(|c| iterate(*c, 4) == Some(*c));
    let labels_increment = map
        .iter()
        .all(|(f, t)| t.is_some_and(|t| t.axis_label == (f.axis_label + 1) % 4));
    let passed = total && c5_to_c6 && c7_to_c6 && c6_c7_period_4 && labels_increment;
    ClosureReport {
        map: map.into_iter().collect(),
        shape_map,
        total,
        c5_to_c6,
        c7_to_c6,
        c6_c7_period_4,
        labels_increment,
        passed,
    }
}

/// Composition of one supertile, compared with the supertile one order lower.
#[derive(Clone, Debug, Serialize)]
pub struct ComposedSupertile {
    pub order: u32,
    pub seed: usize,
    pub composed_tiles: usize,
    pub undecided: usize,
    /// Composed tiles missing from the lower-order supertile.
    pub foreign_tiles: usize,
    pub edge_violations: usize,
    pub illegal_stars: usize,
    /// Composed stars whose decomposition image is not the star actually
    /// found at the image center.
    pub class_mismatches: usize,
    /// C₁ centers that do not become side-interior points.
    pub c1_not_on_side: usize,
    /// Shape classes of complete stars centered at the right angle of a small tile.
    pub small_right_angle_shapes: BTreeSet<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub samples: usize,
    pub round_trip_failures: usize,
    pub supertiles: Vec<ComposedSupertile>,
    pub passed: bool,
}

/// A random fragment: the tiles whose centroids lie in a random disc.
fn random_fragment(p: &Patch, rng: &mut ChaCha8Rng) -> Patch {
    let tiles: Vec<&DecoratedTile> = p.iter().collect();
    let (cx, cy) = centroid(tiles[rng.random_range(0..tiles.len())]);
    let r: f64 = rng.random_range(0.3..3.0);
    Patch::from_tiles(
        tiles
            .into_iter()
            .filter(|t| {
                let (x, y) = centroid(t);
                (x - cx).hypot(y - cy) <= r
            })
            .cloned(),
    )
    .expect("sub-patch of a patch")
}

fn centroid(t: &DecoratedTile) -> (f64, f64) {
    let v = t.vertices().map(|p| p.to_f64());
    (
        (v[0].0 + v[1].0 + v[2].0) / 3.0,
        (v[0].1 + v[1].1 + v[2].1) / 3.0,
    )
}

pub fn compose_supertile(catalog: &StarCatalog, order: u32, seed: usize) -> ComposedSupertile {
    let seeds = admissible_seeds();
    let seq = supertile_sequence(order, &seeds[seed]).expect("admissible seed");
    let p = &seq[order as usize];
    let lower = &seq[order as usize - 1];
    let comp = compose_interior(p).expect("supertiles compose");
    let q = &comp.patch;
    let foreign_tiles = q
        .iter()
        .filter(|t| lower.find(t).is_none_or(|u| u.sides != t.sides))
        .count();
    let composed_stars = complete_stars(q);
    let illegal_stars = composed_stars
        .iter()
        .filter(|s| !is_legal_star(s, catalog))
        .count();
    let closure = catalog.closure_map();
    let class_mismatches = composed_stars
        .iter()
        .filter(|s| {
            let image = catalog
                .classify(s)
                .and_then(|c| closure.get(&c).copied().flatten());
            let actual = extract_star(p, &homothety(&s.center))
                .ok()
                .and_then(|s| catalog.classify(&s));
            image.is_none() || image != actual
        })
        .count();
    let stars = complete_stars(p);
    let mut c1_not_on_side = 0;
    let mut small_right_angle_shapes = BTreeSet::new();
    for s in &stars {
        let Some(class) = catalog.classify(s) else {
            continue;
        };
        if class.shape_index == 1 {
            let c = homothety_inv(&s.center);
            let holders = q.tiles_containing(&c);
            // Only centers inside the composed region are decided.
            if !holders.is_empty() && holders.iter().any(|t| t.vertices().contains(&c)) {
                c1_not_on_side += 1;
            }
        }
        if s.tiles
            .iter()
            .any(|t| t.shape == TileShape::Small && t.vertices()[0] == s.center)
        {
            small_right_angle_shapes.insert(class.shape_index);
        }
    }
    let report = crate::rules::check_rule_L(q, catalog);
    ComposedSupertile {
        order,
        seed,
        composed_tiles: q.len(),
        undecided: comp.undecided.len(),
        foreign_tiles,
        edge_violations: report.edge_violations.len(),
        illegal_stars: illegal_stars.max(report.illegal_stars.len()),
        class_mismatches,
        c1_not_on_side,
        small_right_angle_shapes,
    }
}

/// Round trips on `samples` random fragments of supertiles of order ≤ 12,
/// and full composition of supertiles of orders in `orders` for every seed.
pub fn verify_composition_theorem(
    catalog: &StarCatalog,
    samples: usize,
    orders: std::ops::RangeInclusive<u32>,
    rng_seed: u64,
) -> CompositionReport {
    let seeds = admissible_seeds();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let jobs: Vec<(u32, usize, u64)> = (0..samples)
        .map(|_| {
            (
                rng.random_range(3..=12),
                rng.random_range(0..seeds.len()),
                rng.random(),
            )
        })
        .collect();
    let round_trip_failures = jobs
        .par_iter()
        .filter(|&&(n, k, s)| {
            let p = supertile(n, &seeds[k]).expect("admissible seed");
            let f = random_fragment(&p, &mut ChaCha8Rng::seed_from_u64(s));
            compose_patch(&decompose_patch(&f)).ok().as_ref() != Some(&f)
        })
        .count();
    let cases: Vec<(u32, usize)> = orders
        .flat_map(|n| (0..seeds.len()).map(move |k| (n, k)))
        .collect();
    let supertiles: Vec<ComposedSupertile> = cases
        .into_iter()
        .map(|(n, k)| compose_supertile(catalog, n, k))
        .collect();
    let passed = round_trip_failures == 0
        && supertiles.iter().all(|s| {
            s.foreign_tiles == 0
                && s.edge_violations == 0
                && s.illegal_stars == 0
                && s.class_mismatches == 0
                && s.c1_not_on_side == 0
                && s.small_right_angle_shapes
                    .is_subset(&BTreeSet::from([1, 3]))
        });
    CompositionReport {
        samples,
        round_trip_failures,
        supertiles,
        passed,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtendabilityReport {
    pub max_order: u32,
    pub vertices_checked: usize,
    /// (seed, order, vertex) with no fitting star shape.
    pub failures: Vec<(usize, u32, Point)>,
    pub passed: bool,
}

/// Every star of a supertile, complete or not, extends to a legal star shape.
pub fn verify_supertile_extendability(
    catalog: &StarCatalog,
    max_order: u32,
) -> ExtendabilityReport {
    let bare = FitIndex::undecorated(catalog);
    let mut vertices_checked = 0;
    let mut failures = Vec::new();
    for (k, seed) in admissible_seeds().iter().enumerate() {
        let seq = supertile_sequence(max_order, seed).expect("admissible seed");
        for (n, p) in seq.iter().enumerate() {
            let p = p.undecorated();
            let verts = p.vertices();
            vertices_checked += verts.len();
            failures.extend(
                verts
                    .par_iter()
                    .filter(|v| bare.fits(&p, v).is_empty())
                    .map(|v| (k, n as u32, v.clone()))
                    .collect::<Vec<_>>(),
            );
        }
    }
    ExtendabilityReport {
        max_order,
        vertices_checked,
        passed: failures.is_empty(),
        failures,
    }
}

/// Altitude of the small tile: legs ψ³, ψ⁴ over hypotenuse ψ².
pub fn small_altitude() -> AlgebraicNum {
    AlgebraicNum::psi_pow(5)
}

/// Largest disc diameter D with h ≥ D / sin α + D, where sin α = ψ².
pub fn covering_diameter() -> f64 {
    let h = small_altitude().to_f64();
    let sin_alpha = AlgebraicNum::psi_pow(2).to_f64();
    h / (1.0 / sin_alpha + 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringReport {
    pub order: u32,
    pub samples: usize,
    pub diameter: f64,
    /// Disc centers whose disc is not inside a single star.
    pub failures: Vec<(f64, f64)>,
    pub passed: bool,
}

fn dist_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist_to_triangle(p: (f64, f64), v: [(f64, f64); 3]) -> f64 {
    let s = [
        cross(v[0], v[1], p),
        cross(v[1], v[2], p),
        cross(v[2], v[0], p),
    ];
    if s.iter().all(|&x| x >= 0.0) || s.iter().all(|&x| x <= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|i| dist_to_segment(p, v[i], v[(i + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

/// Discs of the threshold diameter at random positions inside supertile(`order`):
/// the tiles meeting each disc must all contain one vertex, so the disc lies
/// in the star at that vertex.
pub fn verify_covering(order: u32, samples: usize, rng_seed: u64) -> CoveringReport {
    verify_covering_with(order, samples, covering_diameter(), rng_seed)
}

/// The covering check for an arbitrary disc diameter.
pub fn verify_covering_with(order: u32, samples: usize, d: f64, rng_seed: u64) -> CoveringReport {
    let seed = &admissible_seeds()[0];
    let p = supertile(order, seed).expect("admissible seed");
    let outer = seed.vertices().map(|v| {
        let mut v = v;
        for _ in 0..order {
            v = homothety(&v);
        }
        v.to_f64()
    });
    let r = d / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut centers = Vec::with_capacity(samples);
    while centers.len() < samples {
        let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
        if a + b > 1.0 {
            (a, b) = (1.0 - a, 1.0 - b);
        }
        let c = (
            outer[0].0 + a * (outer[1].0 - outer[0].0) + b * (outer[2].0 - outer[0].0),
            outer[0].1 + a * (outer[1].1 - outer[0].1) + b * (outer[2].1 - outer[0].1),
        );
        if (0..3).all(|i| dist_to_segment(c, outer[i], outer[(i + 1) % 3]) > r) {
            centers.push(c);
        }
    }
    let failures: Vec<(f64, f64)> = centers
        .par_iter()
        .filter(|&&c| {
            let meeting: Vec<&DecoratedTile> = p
                .near_bbox([c.0 - r, c.1 - r, c.0 + r, c.1 + r])
                .into_iter()
                .filter(|t| dist_to_triangle(c, t.vertices().map(|v| v.to_f64())) < r)
                .collect();
            // The star at v holds every tile containing v, including tiles
            // with v inside a side.
            !meeting
                .iter()
                .flat_map(|t| t.vertices())
                .any(|v| meeting.iter().all(|t| t.contains(&v)))
        })
        .copied()
        .collect();
    CoveringReport {
        order,
        samples,
        diameter: d,
        passed: failures.is_empty(),
        failures,
    }
}

/// A decorated proto-tile: shape and the side decorations relative to the
/// designated side directions, which are invariant under isometries.
pub type ProtoTile = (TileShape, [SideDecoration; 3]);

#[derive(Clone, Debug, Serialize)]
pub struct InnerTiles {
    /// Cumulative (small, large) counts after each order.
    pub counts: Vec<(usize, usize)>,
    pub tiles: BTreeSet<ProtoTile>,
}

impl InnerTiles {
    pub fn small(&self) -> usize {
        self.tiles
            .iter()
            .filter(|t| t.0 == TileShape::Small)
            .count()
    }

    pub fn large(&self) -> usize {
        self.tiles
            .iter()
            .filter(|t| t.0 == TileShape::Large)
            .count()
    }

    /// First order from which the counts no longer change.
    pub fn stable_from(&self) -> usize {
        let last = self.counts.last().copied();
        self.counts
            .iter()
            .position(|&c| Some(c) == last)
            .unwrap_or(0)
    }
}

/// Decorated tiles with no side on the border of their supertile, over all
/// admissible seeds and orders ≤ `max_order`.
pub fn inner_tiles(max_order: u32) -> InnerTiles {
    let mut tiles = BTreeSet::new();
    let mut per_order = vec![BTreeSet::new(); max_order as usize + 1];
    for seed in admissible_seeds() {
        let seq = supertile_sequence(max_order, &seed).expect("admissible seed");
        let mut outer = seed.vertices();
        for (n, p) in seq.iter().enumerate() {
            let border: Vec<Segment> = (0..3)
                .map(|i| {
                    Segment::new(outer[i].clone(), outer[(i + 1) % 3].clone())
                        .expect("non-degenerate")
                })
                .collect();
            for t in p.iter() {
                let on_border = [SideId::Hyp, SideId::LargeLeg, SideId::SmallLeg]
                    .iter()
                    .any(|&s| {
                        let seg = t.side_segment(s);
                        border
                            .iter()
                            .any(|b| b.contains(&seg.a) && b.contains(&seg.b))
                    });
                if !on_border {
                    per_order[n].insert((t.shape, t.sides));
                }
            }
            outer = outer.map(|v| homothety(&v));
        }
    }
    let mut counts = Vec::new();
    for set in per_order {
        tiles.extend(set);
        let small = tiles
            .iter()
            .filter(|t: &&ProtoTile| t.0 == TileShape::Small)
            .count();
        counts.push((small, tiles.len() - small));
    }
    InnerTiles { counts, tiles }
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Report {
    /// C₁ classes among the complete stars of supertile(10).
    pub in_order_10: BTreeSet<StarClass>,
    /// C₁ classes with blue (label 3) axis in supertile(4).
    pub blue_in_order_4: BTreeSet<StarClass>,
    /// Smallest order containing a C₁ star.
    pub first_order: u32,
    /// Orders n + i − 1 at which the expected Cᵢ was missing.
    pub chain_failures: Vec<(StarClass, u32)>,
    pub passed: bool,
}

fn classes_in(p: &Patch, catalog: &StarCatalog) -> BTreeSet<StarClass> {
    complete_stars(p)
        .iter()
        .filter_map(|s| catalog.classify(s))
        .collect()
}

/// Where the four C₁ stars first occur in the supertiles of `seed`, and that
/// their decomposition images Cᵢ follow i − 1 orders later.
pub fn verify_c1_occurrences(catalog: &StarCatalog, seed: &DecoratedTile) -> C1Report {
    let seq = supertile_sequence(16, seed).expect("admissible seed");
    let found: Vec<BTreeSet<StarClass>> = seq.iter().map(|p| classes_in(p, catalog)).collect();
    let c1 = |n: usize| -> BTreeSet<StarClass> {
        found[n]
            .iter()
            .filter(|c| c.shape_index == 1)
            .copied()
            .collect()
    };
    let in_order_10 = c1(10);
    let blue_in_order_4: BTreeSet<StarClass> =
        c1(4).into_iter().filter(|c| c.axis_label == 3).collect();
    let first_order = (0..found.len())
        .find(|&n| !c1(n).is_empty())
        .unwrap_or(found.len()) as u32;
    let closure = catalog.closure_map();
    let mut chain_failures = Vec::new();
    for start in c1(first_order as usize) {
        let mut c = start;
        for i in 2..=7u32 {
            let Some(next) = closure.get(&c).copied().flatten() else {
                chain_failures.push((c, first_order + i - 1));
                break;
            };
            c = next;
            let n = (first_order + i - 1) as usize;
            if n < found.len() && !found[n].contains(&c) {
                chain_failures.push((c, n as u32));
            }
        }
    }
    let blue = catalog
        .of_shape(1)
        .filter(|c| c.class.axis_label == 3)
        .count();
    let passed = in_order_10.len() == 4
        && blue_in_order_4.len() == blue
        && blue > 0
        && chain_failures.is_empty();
    C1Report {
        in_order_10,
        blue_in_order_4,
        first_order,
        chain_failures,
        passed,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeedRecurrence {
    pub seed: DecoratedTile,
    /// Placement of a strictly interior copy of the seed in supertile(8).
    pub placement: Option<Isometry>,
    /// Interior copies found at order 8, including reflected ones.
    pub matches: usize,
    /// Supertile(8), mapped by the rescaled placement, lies inside supertile(16).
    pub nested: bool,
    pub passed: bool,
}

fn strictly_inside(t: &DecoratedTile, outer: &[Point; 3]) -> bool {
    t.vertices().iter().all(|v| {
        (0..3).all(|i| {
            orient(&outer[i], &outer[(i + 1) % 3], v) == orient(&outer[0], &outer[1], &outer[2])
        })
    })
}

/// Interior large tiles of supertile(`order`) carrying the seed's decoration.
pub fn seed_copies(seed: &DecoratedTile, order: u32) -> Vec<DecoratedTile> {
    let p = supertile(order, seed).expect("admissible seed");
    let outer = seed.vertices().map(|mut v| {
        for _ in 0..order {
            v = homothety(&v);
        }
        v
    });
    // Labels rise by one per decomposition; compare modulo that shift.
    let shift = (order % 4) as i8;
    let want: Vec<SideDecoration> = seed.sides.iter().map(|d| d.shift_label(shift)).collect();
    p.iter()
        .filter(|t| t.shape == TileShape::Large && t.sides.as_slice() == want.as_slice())
        .filter(|t| strictly_inside(t, &outer))
        .cloned()
        .collect()
}

/// Supertile(8) of `seed` contains a strictly interior, orientation-preserving
/// copy g(seed); then supertile(16) contains the rescaled copy of supertile(8).
pub fn verify_seed_recurrence(seed: &DecoratedTile) -> SeedRecurrence {
    let copies = seed_copies(seed, 8);
    let placement = copies
        .iter()
        .find(|t| !t.placement.is_reflection())
        .map(|t| t.placement.compose(&seed.placement.invert()));
    let nested = placement.as_ref().is_some_and(|g| {
        let s8 = supertile(8, seed).expect("admissible seed");
        let s16 = supertile(16, seed).expect("admissible seed");
        let big = g.conjugate_by_psi_scaling(-8);
        let inside = s8.iter().all(|t| {
            let u = t.transformed(&big);
            s16.find(&u).is_some_and(|w| w.sides == u.sides)
        });
        inside
    });
    SeedRecurrence {
        seed: seed.clone(),
        matches: copies.len(),
        passed: placement.is_some() && nested,
        placement,
        nested,
    }
}

/// The first admissible seed with a recurring interior copy at order 8.
pub fn recurrent_seed() -> Option<DecoratedTile> {
    admissible_seeds().into_iter().find(|s| {
        seed_copies(s, 8)
            .iter()
            .any(|t| !t.placement.is_reflection())
    })
}

/// Parity-admissible, fully decorated tiles of one shape at the canonical placement.
pub fn colored_tiles(shape: TileShape) -> Vec<DecoratedTile> {
    let dirs = [Direction::Forward, Direction::Backward];
    let base = DecoratedTile::new(shape, Isometry::identity());
    let mut out = Vec::new();
    for h in 0..4u8 {
        for l in 0..4u8 {
            for s in 0..4u8 {
                for dh in dirs {
                    for dl in dirs {
                        for ds in dirs {
                            let t = base.clone().decorated((h, dh), (l, dl), (s, ds));
                            if t.check_parity().is_ok() {
                                out.push(t);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Undecorated placements of `shape` sharing a full side with `t` from outside.
fn side_neighbors(t: &DecoratedTile, shape: TileShape) -> Vec<DecoratedTile> {
    let sides = [SideId::Hyp, SideId::LargeLeg, SideId::SmallLeg];
    let canon = DecoratedTile::new(shape, Isometry::identity());
    let tv = t.vertices();
    let mut out = Vec::new();
    for s1 in sides {
        let seg = t.side_segment(s1);
        let third = tv
            .iter()
            .find(|v| **v != seg.a && **v != seg.b)
            .expect("triangle");
        for s2 in sides {
            let seg2 = canon.side_segment(s2);
            if seg2.length2() != seg.length2() {
                continue;
            }
            let cv = canon.vertices();
            let x2 = cv
                .iter()
                .find(|v| **v != seg2.a && **v != seg2.b)
                .expect("triangle");
            let d2 = seg2.direction();
            let (ll, sl, hy) = shape.side_exponents();
            let k = match s2 {
                SideId::Hyp => hy,
                SideId::LargeLeg => ll,
                SideId::SmallLeg => sl,
            };
            let inv = AlgebraicNum::psi_pow(-2 * k);
            let along = &d2.dot(&x2.sub(&seg2.a)) * &inv;
            let off = &d2.cross(&x2.sub(&seg2.a)).abs() * &inv;
            // Map canonical vertex positions onto the shared side, both ways round.
            for (p, q) in [(&seg.a, &seg.b), (&seg.b, &seg.a)] {
                let d = q.sub(p);
                let perp = Point::new(-d.y.clone(), d.x.clone());
                for sign in [AlgebraicNum::one(), -AlgebraicNum::one()] {
                    let x = p.add(&d.scale(&along)).add(&perp.scale(&(&off * &sign)));
                    if orient(p, q, &x) == orient(p, q, third) {
                        continue;
                    }
                    let image = |v: &Point| {
                        if *v == seg2.a {
                            p.clone()
                        } else if *v == seg2.b {
                            q.clone()
                        } else {
                            x.clone()
                        }
                    };
                    let [r, a, b] = cv.each_ref().map(image);
                    if let Ok(n) = DecoratedTile::from_vertices(shape, &r, &a, &b) {
                        if !out.iter().any(|o: &DecoratedTile| o.same_placement(&n)) {
                            out.push(n);
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    /// Edge-consistent patch without complete stars.
    pub patch: Patch,
    pub decomposed: Patch,
    /// Complete stars of the decomposition that are not legal.
    pub illegal_centers: Vec<Point>,
    pub patches_searched: usize,
}

/// Searches two-tile patches (a colored tile at the canonical placement and a
/// colored neighbor across a full side) for an L-patch whose decomposition
/// has an illegal complete star. Returns the first hit in a fixed order.
pub fn find_counterexample(catalog: &StarCatalog) -> Option<Counterexample> {
    let shapes = [TileShape::Large, TileShape::Small];
    let colored: BTreeMap<TileShape, Vec<DecoratedTile>> =
        shapes.iter().map(|&s| (s, colored_tiles(s))).collect();
    let mut searched = 0;
    for &s1 in &shapes {
        for t1 in &colored[&s1] {
            for &s2 in &shapes {
                for n in side_neighbors(t1, s2) {
                    for c in &colored[&s2] {
                        let t2 = DecoratedTile {
                            sides: c.sides,
                            ..n.clone()
                        };
                        let Ok(p) = Patch::from_tiles([t1.clone(), t2]) else {
                            continue;
                        };
                        if !p.edge_consistency().is_empty() || !complete_stars(&p).is_empty() {
                            continue;
                        }
                        searched += 1;
                        let d = decompose_patch(&p);
                        let illegal_centers: Vec<Point> = complete_stars(&d)
                            .into_iter()
                            .filter(|s| !is_legal_star(s, catalog))
                            .map(|s| s.center)
                            .collect();
                        if !illegal_centers.is_empty() {
                            return Some(Counterexample {
                                patch: p,
                                decomposed: d,
                                illegal_centers,
                                patches_searched: searched,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}
