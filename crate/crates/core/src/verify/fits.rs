//! Which legal stars fit a patch at a vertex, and forcing: repeatedly adding
//! whatever every fitting star agrees on.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::geom::{Isometry, Point};
use crate::rules::{star_shape, Star, StarCatalog, StarClass};
use crate::tiles::{
    side_mismatch, DecoratedTile, Patch, SideDecoration, SideId, TileKey, TileShape,
};

/// A catalog star moved so that its center lands on a patch vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacedStar {
    pub class: StarClass,
    pub placement: Isometry,
    pub tiles: Vec<DecoratedTile>,
}

/// Catalog stars indexed by the position of their center relative to each
/// of their tiles, so candidate placements at a vertex are found by lookup.
#[derive(Clone, Debug)]
pub struct FitIndex {
    catalog: StarCatalog,
    stars: Vec<(StarClass, Star)>,
    decorated: bool,
    by_local_center: HashMap<(TileShape, Point), Vec<(usize, usize)>>,
}

impl FitIndex {
    pub fn new(catalog: &StarCatalog) -> FitIndex {
        let stars = catalog
            .stars()
            .iter()
            .map(|cs| (cs.class, cs.star.clone()))
            .collect();
        FitIndex::from_stars(catalog, stars, true)
    }

    /// Index over the undecorated shapes of the catalog stars, for reasoning
    /// that ignores labels and arrows. Each shape keeps the class of its
    /// first catalog star.
    pub fn undecorated(catalog: &StarCatalog) -> FitIndex {
        let mut seen = BTreeSet::new();
        let mut stars = Vec::new();
        for cs in catalog.stars() {
            let bare = Star {
                tiles: cs.star.tiles.iter().map(|t| t.undecorated()).collect(),
                ..cs.star.clone()
            };
            if seen.insert(star_shape(&bare).0) {
                stars.push((cs.class, bare));
            }
        }
        FitIndex::from_stars(catalog, stars, false)
    }

    fn from_stars(
        catalog: &StarCatalog,
        stars: Vec<(StarClass, Star)>,
        decorated: bool,
    ) -> FitIndex {
        let mut by_local_center: HashMap<(TileShape, Point), Vec<(usize, usize)>> = HashMap::new();
        for (i, (_, star)) in stars.iter().enumerate() {
            for (j, t) in star.tiles.iter().enumerate() {
                let local = t.placement.invert().apply(&star.center);
                by_local_center
                    .entry((t.shape, local))
                    .or_default()
                    .push((i, j));
            }
        }
        FitIndex {
            catalog: catalog.clone(),
            stars,
            decorated,
            by_local_center,
        }
    }

    pub fn is_decorated(&self) -> bool {
        self.decorated
    }

    /// The catalog star of a class as a patch, stripped of decorations when
    /// the index ignores them.
    pub fn star_patch(&self, class: &StarClass) -> Option<Patch> {
        let p = self.catalog.get(class)?.star.to_patch();
        Some(if self.decorated { p } else { p.undecorated() })
    }

    /// The indexed stars with their classes.
    pub fn stars(&self) -> &[(StarClass, Star)] {
        &self.stars
    }

    pub fn catalog(&self) -> &StarCatalog {
        &self.catalog
    }

    /// All placements of catalog stars centered at `v` that fit `p`.
    pub fn fits(&self, p: &Patch, v: &Point) -> Vec<PlacedStar> {
        let at_v = p.tiles_containing(v);
        let Some(t0) = at_v.first() else {
            return Vec::new();
        };
        let local = t0.placement.invert().apply(v);
        let Some(cands) = self.by_local_center.get(&(t0.shape, local)) else {
            return Vec::new();
        };
        let mut seen: BTreeSet<Vec<(TileKey, [SideDecoration; 3])>> = BTreeSet::new();
        let mut out = Vec::new();
        for &(i, j) in cands {
            let (class, star) = &self.stars[i];
            let g = t0.placement.compose(&star.tiles[j].placement.invert());
            let tiles: Vec<DecoratedTile> = star.tiles.iter().map(|t| t.transformed(&g)).collect();
            if !star_fits(p, &at_v, &tiles) {
                continue;
            }
            let mut sig: Vec<_> = tiles.iter().map(|t| (t.key(), t.sides)).collect();
            sig.sort();
            if seen.insert(sig) {
                out.push(PlacedStar {
                    class: *class,
                    placement: g,
                    tiles,
                });
            }
        }
        out
    }
}

fn star_fits(p: &Patch, at_v: &[&DecoratedTile], tiles: &[DecoratedTile]) -> bool {
    // Every patch tile at the center must be one of the star tiles.
    let keys: BTreeSet<TileKey> = tiles.iter().map(|t| t.key()).collect();
    if at_v.iter().any(|t| !keys.contains(&t.key())) {
        return false;
    }
    for t in tiles {
        match p.find(t) {
            Some(existing) => {
                if (0..3).any(|i| !t.sides[i].compatible(&existing.sides[i])) {
                    return false;
                }
            }
            None => {
                if !p.overlapping(&t.triangle()).is_empty() {
                    return false;
                }
            }
        }
        for s in SideId::ALL {
            if t.side(s).is_empty() {
                continue;
            }
            for u in p.near_bbox(t.triangle().bbox_f64()) {
                if SideId::ALL
                    .into_iter()
                    .any(|r| side_mismatch(t, s, u, r).is_some())
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Convenience wrapper building a fresh index.
pub fn enumerate_fits(p: &Patch, v: &Point, catalog: &StarCatalog) -> Vec<PlacedStar> {
    FitIndex::new(catalog).fits(p, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ForceStatus {
    /// Tiles were added but the budget ran out before a fixed point.
    Extended,
    Contradiction,
    Saturated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForceBudget {
    pub max_rounds: usize,
    pub max_fit_enumerations: usize,
}

impl Default for ForceBudget {
    fn default() -> Self {
        ForceBudget {
            max_rounds: 64,
            max_fit_enumerations: 100_000,
        }
    }
}

/// One vertex examination that changed the patch or failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub round: usize,
    pub vertex: Point,
    pub fits: Vec<StarClass>,
    pub added_tiles: usize,
    pub decorated_sides: usize,
    pub contradiction: bool,
}

#[derive(Clone, Debug)]
pub struct ForceResult {
    pub status: ForceStatus,
    pub patch: Patch,
    pub trace: Vec<TraceStep>,
    pub rounds: usize,
    pub fit_enumerations: usize,
    pub budget_exhausted: bool,
}

/// What every fit at a vertex agrees on: tiles present in all of them with
/// the side decorations common to all.
fn common_part(fits: &[PlacedStar]) -> Vec<DecoratedTile> {
    let Some((first, rest)) = fits.split_first() else {
        return Vec::new();
    };
    let mut common: BTreeMap<TileKey, DecoratedTile> =
        first.tiles.iter().map(|t| (t.key(), t.clone())).collect();
    for f in rest {
        let here: BTreeMap<TileKey, &DecoratedTile> =
            f.tiles.iter().map(|t| (t.key(), t)).collect();
        common.retain(|k, t| match here.get(k) {
            Some(u) => {
                for i in 0..3 {
                    let (a, b) = (t.sides[i], u.sides[i]);
                    t.sides[i] = SideDecoration {
                        label: if a.label == b.label { a.label } else { None },
                        dir: if a.dir == b.dir { a.dir } else { None },
                    };
                }
                true
            }
            None => false,
        });
    }
    common.into_values().collect()
}

/// Outcome of merging tiles into a patch.
#[derive(Debug, Default)]
pub(crate) struct Merge {
    pub(crate) added: Vec<DecoratedTile>,
    pub(crate) decorated: usize,
    pub(crate) conflict: bool,
}

pub(crate) fn merge_into(p: &mut Patch, tiles: &[DecoratedTile]) -> Merge {
    let mut m = Merge::default();
    for t in tiles {
        match p.find(t).cloned() {
            Some(existing) => {
                let mut sides = existing.sides;
                for (side, new) in sides.iter_mut().zip(&t.sides) {
                    match side.merge(new) {
                        Some(d) => {
                            if d != *side {
                                m.decorated += 1;
                            }
                            *side = d;
                        }
                        None => {
                            m.conflict = true;
                            return m;
                        }
                    }
                }
                if sides != existing.sides {
                    p.set_sides(&existing.key(), sides);
                    m.added.push(p.find(t).expect("present").clone());
                }
            }
            None => {
                if p.add_tile(t.clone()).is_err() {
                    m.conflict = true;
                    return m;
                }
                m.added.push(t.clone());
            }
        }
        // The new decorations must agree with every side they touch.
        let t = p.find(t).expect("present").clone();
        for s in SideId::ALL {
            if t.side(s).is_empty() {
                continue;
            }
            for u in p.near_bbox(t.triangle().bbox_f64()) {
                if u.key() != t.key()
                    && SideId::ALL
                        .into_iter()
                        .any(|r| side_mismatch(&t, s, u, r).is_some())
                {
                    m.conflict = true;
                    return m;
                }
            }
        }
    }
    m
}

/// Copies labels and arrows across sides sharing an interval until nothing
/// changes. Returns the tiles that changed, or `None` on a conflict.
pub fn propagate_decorations(p: &mut Patch) -> Option<Vec<DecoratedTile>> {
    let mut changed_keys: BTreeSet<TileKey> = BTreeSet::new();
    let mut queue: Vec<TileKey> = p.iter().map(|t| t.key()).collect();
    while let Some(k) = queue.pop() {
        let Some(t) = p.get(&k).cloned() else {
            continue;
        };
        for s in SideId::ALL {
            let d = t.side(s);
            if d.is_empty() {
                continue;
            }
            let seg = t.side_segment(s);
            let arrow = t.side_arrow(s).map(|a| a.direction());
            let neighbors: Vec<DecoratedTile> = p
                .near_bbox(t.triangle().bbox_f64())
                .into_iter()
                .filter(|u| u.key() != k)
                .cloned()
                .collect();
            for u in neighbors {
                for r in SideId::ALL {
                    let useg = u.side_segment(r);
                    if crate::geom::segment_overlap(&seg, &useg).is_none() {
                        continue;
                    }
                    let implied = SideDecoration {
                        label: d.label,
                        dir: arrow.as_ref().map(|a| u.direction_along(r, a)),
                    };
                    let cur = u.side(r);
                    let merged = cur.merge(&implied)?;
                    if merged != cur {
                        let mut sides = u.sides;
                        sides[r.index()] = merged;
                        p.set_sides(&u.key(), sides);
                        changed_keys.insert(u.key());
                        queue.push(u.key());
                    }
                }
            }
        }
    }
    Some(
        changed_keys
            .iter()
            .filter_map(|k| p.get(k).cloned())
            .collect(),
    )
}

/// Points within `radius` (in the max norm) of a tile.
fn near(bb: &[f64; 4], v: &(f64, f64), radius: f64) -> bool {
    v.0 >= bb[0] - radius && v.0 <= bb[2] + radius && v.1 >= bb[1] - radius && v.1 <= bb[3] + radius
}

/// Radius around a changed tile within which stars may see the change.
const INFLUENCE: f64 = 2.0;

/// Forcing to a fixed point. Fits at all pending vertices of a round are
/// computed against the same patch; their common parts are then committed
/// in vertex order.
pub fn force(p: &Patch, index: &FitIndex, budget: &ForceBudget) -> ForceResult {
    let mut patch = p.clone();
    let mut trace = Vec::new();
    let mut fit_enumerations = 0;
    let mut pending: BTreeSet<Point> = patch.vertices().into_iter().collect();
    let mut rounds = 0;
    let mut added_any = false;
    let finish = |status, patch, trace, rounds, fit_enumerations, budget_exhausted| ForceResult {
        status,
        patch,
        trace,
        rounds,
        fit_enumerations,
        budget_exhausted,
    };
    if propagate_decorations(&mut patch).is_none() {
        return finish(ForceStatus::Contradiction, patch, trace, 0, 0, false);
    }
    while !pending.is_empty() {
        if rounds >= budget.max_rounds
            || fit_enumerations + pending.len() > budget.max_fit_enumerations
        {
            let status = if added_any {
                ForceStatus::Extended
            } else {
                ForceStatus::Saturated
            };
            return finish(status, patch, trace, rounds, fit_enumerations, true);
        }
        rounds += 1;
        let verts: Vec<Point> = std::mem::take(&mut pending).into_iter().collect();
        fit_enumerations += verts.len();
        let found: Vec<(Point, Vec<PlacedStar>)> = verts
            .into_par_iter()
            .map(|v| {
                let f = index.fits(&patch, &v);
                (v, f)
            })
            .collect();
        let mut changed: Vec<DecoratedTile> = Vec::new();
        for (v, fits) in found {
            let classes: Vec<StarClass> = fits.iter().map(|f| f.class).collect();
            if fits.is_empty() {
                trace.push(TraceStep {
                    round: rounds,
                    vertex: v,
                    fits: classes,
                    added_tiles: 0,
                    decorated_sides: 0,
                    contradiction: true,
                });
                return finish(
                    ForceStatus::Contradiction,
                    patch,
                    trace,
                    rounds,
                    fit_enumerations,
                    false,
                );
            }
            let common = common_part(&fits);
            let before = patch.len();
            let m = merge_into(&mut patch, &common);
            if m.conflict || !m.added.is_empty() {
                trace.push(TraceStep {
                    round: rounds,
                    vertex: v.clone(),
                    fits: classes,
                    added_tiles: patch.len() - before,
                    decorated_sides: m.decorated,
                    contradiction: m.conflict,
                });
            }
            if m.conflict {
                return finish(
                    ForceStatus::Contradiction,
                    patch,
                    trace,
                    rounds,
                    fit_enumerations,
                    false,
                );
            }
            if patch.len() > before {
                added_any = true;
            }
            changed.extend(m.added);
        }
        match propagate_decorations(&mut patch) {
            Some(more) => changed.extend(more),
            None => {
                return finish(
                    ForceStatus::Contradiction,
                    patch,
                    trace,
                    rounds,
                    fit_enumerations,
                    false,
                );
            }
        }
        if changed.is_empty() {
            break;
        }
        let boxes: Vec<[f64; 4]> = changed.iter().map(|t| t.triangle().bbox_f64()).collect();
        for v in patch.vertices() {
            let vf = v.to_f64();
            if boxes.iter().any(|bb| near(bb, &vf, INFLUENCE)) {
                pending.insert(v);
            }
        }
    }
    finish(
        ForceStatus::Saturated,
        patch,
        trace,
        rounds,
        fit_enumerations,
        false,
    )
}

/// Result of trying to refute a patch by forcing with case splits.
#[derive(Clone, Debug, Serialize)]
pub struct Refutation {
    pub refuted: bool,
    /// Forcing runs performed, over all branches.
    pub forcings: usize,
    pub fit_enumerations: usize,
    /// Classes split on at each level of the first unrefuted branch, or of
    /// the whole search when refuted.
    pub splits: Vec<SplitRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitRecord {
    pub depth: u32,
    pub vertex: Point,
    pub cases: Vec<StarClass>,
}

/// Shows that `p` occurs in no L-tiling: forcing reaches a contradiction,
/// possibly after splitting on the stars fitting at one vertex (the one with
/// fewest fits, nearest `focus`) and refuting every case, up to `depth`
/// nested splits.
pub fn refute(
    p: &Patch,
    index: &FitIndex,
    budget: &ForceBudget,
    depth: u32,
    focus: &Point,
) -> Refutation {
    let mut r = Refutation {
        refuted: false,
        forcings: 0,
        fit_enumerations: 0,
        splits: Vec::new(),
    };
    r.refuted = refute_rec(p, index, budget, depth, 0, focus, &mut r);
    r
}

fn refute_rec(
    p: &Patch,
    index: &FitIndex,
    budget: &ForceBudget,
    depth: u32,
    level: u32,
    focus: &Point,
    r: &mut Refutation,
) -> bool {
    let f = force(p, index, budget);
    r.forcings += 1;
    r.fit_enumerations += f.fit_enumerations;
    if f.status == ForceStatus::Contradiction {
        return true;
    }
    if level >= depth {
        return false;
    }
    let Some((v, fits)) = split_vertex(&f.patch, index, focus) else {
        return false;
    };
    r.splits.push(SplitRecord {
        depth: level,
        vertex: v,
        cases: fits.iter().map(|f| f.class).collect(),
    });
    for fit in fits {
        let mut q = f.patch.clone();
        if merge_into(&mut q, &fit.tiles).conflict {
            continue;
        }
        if !refute_rec(&q, index, budget, depth, level + 1, focus, r) {
            return false;
        }
    }
    true
}

/// The vertex with the fewest (but at least two) fitting stars, ties broken
/// by distance to `focus` and then by vertex order.
pub fn split_vertex(
    p: &Patch,
    index: &FitIndex,
    focus: &Point,
) -> Option<(Point, Vec<PlacedStar>)> {
    let (fx, fy) = focus.to_f64();
    let mut cands: Vec<(usize, f64, Point, Vec<PlacedStar>)> = p
        .vertices()
        .into_par_iter()
        .filter_map(|v| {
            let fits = index.fits(p, &v);
            if fits.len() < 2 {
                return None;
            }
            let (x, y) = v.to_f64();
            let d = (x - fx).hypot(y - fy);
            Some((fits.len(), d, v, fits))
        })
        .collect();
    cands.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    cands.into_iter().next().map(|(_, _, v, f)| (v, f))
}

#[cfg(test)]
mod tests {
    use std::sync::OnceLock;

    use super::*;
    use crate::rules::{build_star_catalog, complete_stars};
    use crate::subst::{default_seed, supertile};
    use crate::verify::lemma::{decorated_start, partner_tiles, star_neighborhood};

    fn catalog() -> &'static StarCatalog {
        static CATALOG: OnceLock<StarCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| build_star_catalog(14).expect("catalog builds"))
    }

    fn index() -> &'static FitIndex {
        static INDEX: OnceLock<FitIndex> = OnceLock::new();
        INDEX.get_or_init(|| FitIndex::new(catalog()))
    }

    #[test]
    fn complete_star_has_exactly_its_own_fit() {
        let p = supertile(10, &default_seed()).unwrap();
        for s in complete_stars(&p) {
            let fits = index().fits(&p, &s.center);
            assert_eq!(fits.len(), 1);
            assert_eq!(Some(fits[0].class), catalog().classify(&s));
            assert_eq!(
                fits[0]
                    .placement
                    .apply(&catalog().get(&fits[0].class).unwrap().star.center),
                s.center
            );
        }
    }

    #[test]
    fn boundary_vertices_admit_a_fit() {
        // supertile(8) of the default seed recurs inside supertile(16), so
        // even its boundary stars extend to legal decorated stars.
        let p = supertile(8, &default_seed()).unwrap();
        for v in p.vertices() {
            assert!(!index().fits(&p, &v).is_empty(), "{v:?}");
        }
    }

    #[test]
    fn forcing_a_fragment_is_sound() {
        let p = supertile(12, &default_seed()).unwrap();
        let c = p.vertices()[p.vertices().len() / 2].clone();
        let (cx, cy) = c.to_f64();
        let frag = Patch::from_tiles(
            p.iter()
                .filter(|t| {
                    let (x, y) = t.vertices()[0].to_f64();
                    (x - cx).hypot(y - cy) < 0.8
                })
                .cloned(),
        )
        .unwrap();
        let r = force(&frag, index(), &ForceBudget::default());
        assert_ne!(r.status, ForceStatus::Contradiction);
        for t in r.patch.iter() {
            if p.overlapping(&t.triangle()).is_empty() {
                continue;
            }
            let truth = p.find(t).expect("forced tile is a true tile");
            assert!((0..3).all(|i| t.sides[i].compatible(&truth.sides[i])));
        }
    }

    #[test]
    fn forcing_is_deterministic() {
        let class = catalog().stars()[17].class;
        let a = star_neighborhood(&class, index(), &ForceBudget::default()).unwrap();
        let b = star_neighborhood(&class, index(), &ForceBudget::default()).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.patch, b.patch);
        assert_eq!(a.status, ForceStatus::Saturated);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let class = catalog().of_shape(5).next().unwrap().class;
        let tight = ForceBudget {
            max_rounds: 1,
            ..ForceBudget::default()
        };
        let r = star_neighborhood(&class, index(), &tight).unwrap();
        assert_eq!(r.status, ForceStatus::Extended);
        assert!(r.budget_exhausted);
    }

    #[test]
    fn red_tile_of_c5_forces_c3_then_fails() {
        let bare = FitIndex::undecorated(catalog());
        let partners = partner_tiles(catalog(), 16, &default_seed());
        let mut seen_c3 = false;
        for cs in catalog().of_shape(5) {
            let nb = star_neighborhood(&cs.class, &bare, &ForceBudget::default()).unwrap();
            let mut start = decorated_start(&cs.class, index(), &nb.patch).unwrap();
            let red = &partners[&cs.class].red;
            assert_eq!(red.len(), 1);
            start.add_tile(red[0].clone()).unwrap();
            let small = ForceBudget::default();
            let large = ForceBudget {
                max_rounds: 256,
                max_fit_enumerations: 1_000_000,
            };
            let r = force(&start, index(), &small);
            assert_eq!(r.status, ForceStatus::Contradiction, "{}", cs.class);
            assert_eq!(
                force(&start, index(), &large).status,
                ForceStatus::Contradiction
            );
            let last = r.trace.last().unwrap();
            assert!(last.contradiction && last.fits.is_empty());
            seen_c3 |= r.trace.iter().any(|s| {
                s.added_tiles > 0 && !s.fits.is_empty() && s.fits.iter().all(|c| c.shape_index == 3)
            });
        }
        assert!(seen_c3);
    }
}
