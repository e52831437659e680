//! Forced neighborhoods of legal stars and the composition lemma: around a
//! star Cᵢ (i ≥ 2) the composition partners of its tiles are forced (green)
//! and certain alternative partners are excluded (red).
//!
//! Green and red tiles are derived from supertiles: for every occurrence of a
//! class, each star tile's composition partner is either present (green) or,
//! for a large tile left unpaired, absent although its region is not covered
//! by the star (red). Only tiles with the same verdict at every occurrence
//! are kept.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::geom::{Isometry, Point};
use crate::rules::{
    canonical_star_frame, complete_stars, star_shape, ShapeKey, StarCatalog, StarClass,
};
use crate::subst::{large_partner, small_partner, supertile};
use crate::tiles::{DecoratedTile, Patch, TileKey, TileShape};

use super::fits::{
    force, merge_into, refute, FitIndex, ForceBudget, ForceResult, ForceStatus, Refutation,
    SplitRecord,
};

/// Saturated forcing of the bare catalog star.
pub fn star_neighborhood(
    class: &StarClass,
    index: &FitIndex,
    budget: &ForceBudget,
) -> Option<ForceResult> {
    Some(force(&index.star_patch(class)?, index, budget))
}

/// Shape classes sharing each undecorated star shape (C₆ and C₇ share one).
pub fn shape_classes(catalog: &StarCatalog) -> BTreeMap<ShapeKey, BTreeSet<u8>> {
    let mut out: BTreeMap<ShapeKey, BTreeSet<u8>> = BTreeMap::new();
    for cs in catalog.stars() {
        out.entry(star_shape(&cs.star).0)
            .or_default()
            .insert(cs.class.shape_index);
    }
    out
}

/// Complete stars of a patch counted by their possible shape classes, for
/// patches whose decorations are partial or absent.
pub fn stars_by_shape(p: &Patch, catalog: &StarCatalog) -> BTreeMap<Vec<u8>, usize> {
    let shapes = shape_classes(catalog);
    let mut out = BTreeMap::new();
    for s in complete_stars(p) {
        let key = shapes
            .get(&star_shape(&s).0)
            .map(|c| c.iter().copied().collect())
            .unwrap_or_default();
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

/// True when some half-turn maps the patch onto itself, ignoring decorations.
pub fn is_centrally_symmetric(p: &Patch) -> bool {
    let p = p.undecorated();
    let Some(t0) = p.iter().next() else {
        return true;
    };
    let [r0, ..] = t0.vertices();
    let symmetric = p.iter().filter(|u| u.shape == t0.shape).any(|u| {
        let [ru, ..] = u.vertices();
        let g = Isometry::translation(&r0.add(&ru)).compose(&Isometry::rotation180());
        p.iter().all(|t| p.find(&t.transformed(&g)).is_some())
    });
    symmetric
}

/// Forced stars described for each shape class: (shape class, minimum
/// number of complete stars of that class in the neighborhood). C₆ and C₇
/// cannot be told apart without labels and count together under 6.
pub fn described_stars(shape_index: u8) -> &'static [(u8, usize)] {
    match shape_index {
        1 => &[(1, 2)],
        2 => &[(2, 2)],
        3 => &[(3, 2)],
        4 => &[(4, 2), (1, 2)],
        5 => &[(5, 2), (1, 2), (2, 2)],
        _ => &[(1, 2), (2, 2), (3, 1)],
    }
}

/// Summary of a shape-forced neighborhood.
#[derive(Clone, Debug, Serialize)]
pub struct NeighborhoodReport {
    pub class: StarClass,
    pub tiles: usize,
    pub status: ForceStatus,
    pub centrally_symmetric: bool,
    /// Complete stars by possible shape classes.
    pub stars: Vec<(Vec<u8>, usize)>,
    /// The forced stars described for the class are present.
    pub described: bool,
}

pub fn neighborhood_report(
    class: &StarClass,
    bare: &FitIndex,
    budget: &ForceBudget,
) -> Option<NeighborhoodReport> {
    let nb = star_neighborhood(class, bare, budget)?;
    let stars = stars_by_shape(&nb.patch, bare.catalog());
    let count = |shape: u8| -> usize {
        stars
            .iter()
            .filter(|(k, _)| k.contains(&shape) || (shape == 6 && k.contains(&7)))
            .map(|(_, n)| n)
            .sum()
    };
    let described = described_stars(class.shape_index)
        .iter()
        .all(|&(shape, n)| count(shape) >= n);
    Some(NeighborhoodReport {
        class: *class,
        tiles: nb.patch.len(),
        status: nb.status,
        centrally_symmetric: is_centrally_symmetric(&nb.patch),
        stars: stars.into_iter().collect(),
        described,
    })
}

/// Comparison of a neighborhood with the true tiles around every occurrence
/// of its star in a supertile.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Soundness {
    pub occurrences: usize,
    pub tiles_checked: usize,
    /// Neighborhood tiles contradicting the supertile at some occurrence.
    pub wrong: usize,
}

/// Maps `neighborhood` (in the frame of the catalog star of `class`) onto
/// every occurrence of the class in `truth`. Tiles over regions the supertile
/// covers must be supertile tiles with compatible decorations.
pub fn neighborhood_soundness(
    class: &StarClass,
    neighborhood: &Patch,
    catalog: &StarCatalog,
    truth: &Patch,
) -> Soundness {
    let mut out = Soundness::default();
    for s in complete_stars(truth) {
        if catalog.classify(&s) != Some(*class) {
            continue;
        }
        out.occurrences += 1;
        let back = canonical_star_frame(&s).invert();
        for t in neighborhood.iter() {
            let u = t.transformed(&back);
            if truth.overlapping(&u.triangle()).is_empty() {
                continue;
            }
            out.tiles_checked += 1;
            let ok = truth
                .find(&u)
                .is_some_and(|w| (0..3).all(|i| u.sides[i].compatible(&w.sides[i])));
            if !ok {
                out.wrong += 1;
            }
        }
    }
    out
}

/// Green and red tiles of one class, in the frame of its catalog star.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartnerTiles {
    pub green: Vec<DecoratedTile>,
    pub red: Vec<DecoratedTile>,
    /// Partners present at some occurrences and absent at others.
    pub undetermined: Vec<DecoratedTile>,
    pub occurrences: usize,
}

fn tile_of(k: &TileKey) -> DecoratedTile {
    let [r, a, b] = &k.vertices;
    DecoratedTile::from_vertices(k.shape, r, a, b).expect("keys come from tiles")
}

/// Occurrences and per-tile (green, red) counts of one class.
type Tally = (usize, BTreeMap<TileKey, (usize, usize)>);

/// Partner tiles for every class, from the complete stars of supertile(`order`)
/// over the given seed.
pub fn partner_tiles(
    catalog: &StarCatalog,
    order: u32,
    seed: &DecoratedTile,
) -> BTreeMap<StarClass, PartnerTiles> {
    let p = supertile(order, seed).expect("seed is a decorated large tile");
    let mut agg: BTreeMap<StarClass, Tally> = BTreeMap::new();
    for s in complete_stars(&p) {
        let Some(class) = catalog.classify(&s) else {
            continue;
        };
        let g: Isometry = canonical_star_frame(&s);
        let star_patch = s.to_patch();
        let mut marks = Vec::new();
        let mut inside = true;
        for t in &s.tiles {
            let partner = match t.shape {
                TileShape::Small => small_partner(t),
                TileShape::Large => large_partner(t),
            };
            if star_patch.find(&partner).is_some() {
                continue;
            }
            if p.find(&partner).is_some() {
                marks.push((partner.transformed(&g).key(), true));
            } else if p.overlapping(&partner.triangle()).is_empty() {
                inside = false;
            } else if star_patch.overlapping(&partner.triangle()).is_empty() {
                marks.push((partner.transformed(&g).key(), false));
            }
        }
        if !inside {
            continue;
        }
        let e = agg.entry(class).or_default();
        e.0 += 1;
        for (k, green) in marks {
            let c = e.1.entry(k).or_default();
            if green {
                c.0 += 1;
            } else {
                c.1 += 1;
            }
        }
    }
    agg.into_iter()
        .map(|(class, (n, counts))| {
            let mut out = PartnerTiles {
                occurrences: n,
                ..PartnerTiles::default()
            };
            for (k, (g, r)) in counts {
                if g == n {
                    out.green.push(tile_of(&k));
                } else if r == n {
                    out.red.push(tile_of(&k));
                } else {
                    out.undetermined.push(tile_of(&k));
                }
            }
            (class, out)
        })
        .collect()
}

/// Verdict on one class.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCase {
    pub class: StarClass,
    /// Tiles of the neighborhood forced without labels and arrows.
    pub neighborhood_tiles: usize,
    pub green: usize,
    /// Green tiles already in the neighborhood.
    pub green_in_neighborhood: usize,
    /// Green tiles outside the neighborhood, each shown forced by refuting
    /// every star at one of its vertices that leaves it out.
    pub green_by_refutation: Vec<Refutation>,
    pub red: Vec<Refutation>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub cases: Vec<LemmaCase>,
    pub passed: bool,
}

/// Nested case splits allowed when refuting.
pub const SPLIT_DEPTH: u32 = 4;

fn no_refutation() -> Refutation {
    Refutation {
        refuted: false,
        forcings: 0,
        fit_enumerations: 0,
        splits: Vec::new(),
    }
}

/// Shows that a green tile missing from `start` must be there: split on the
/// stars fitting at one of its vertices that already belongs to the patch;
/// every case not containing the tile is refuted.
fn force_green(
    start: &Patch,
    tile: &DecoratedTile,
    index: &FitIndex,
    budget: &ForceBudget,
    center: &Point,
) -> Refutation {
    let verts = start.vertices();
    let mut best: Option<Refutation> = None;
    for v in tile.vertices() {
        if verts.binary_search(&v).is_err() {
            continue;
        }
        let fits = index.fits(start, &v);
        let mut total = Refutation {
            refuted: true,
            forcings: 0,
            fit_enumerations: 0,
            splits: vec![SplitRecord {
                depth: 0,
                vertex: v.clone(),
                cases: fits.iter().map(|f| f.class).collect(),
            }],
        };
        for f in &fits {
            if f.tiles.iter().any(|t| t.key() == tile.key()) {
                continue;
            }
            let mut q = start.clone();
            if merge_into(&mut q, &f.tiles).conflict {
                continue;
            }
            let r = refute(&q, index, budget, SPLIT_DEPTH - 1, center);
            total.forcings += r.forcings;
            total.fit_enumerations += r.fit_enumerations;
            total.splits.extend(r.splits);
            if !r.refuted {
                total.refuted = false;
                break;
            }
        }
        if total.refuted {
            return total;
        }
        best.get_or_insert(total);
    }
    best.unwrap_or_else(no_refutation)
}

/// The decorated catalog star together with its undecorated neighborhood.
pub fn decorated_start(class: &StarClass, index: &FitIndex, neighborhood: &Patch) -> Option<Patch> {
    let mut p = index.catalog().get(class)?.star.to_patch();
    for t in neighborhood.iter() {
        if p.find(t).is_none() {
            p.add_tile(t.undecorated()).ok()?;
        }
    }
    Some(p)
}

/// Checks one class. The neighborhood is forced from shapes alone (`bare`);
/// missing green tiles and red tiles are then settled with labels and
/// arrows (`index`).
pub fn verify_lemma_case(
    class: &StarClass,
    partners: &PartnerTiles,
    index: &FitIndex,
    bare: &FitIndex,
    budget: &ForceBudget,
) -> LemmaCase {
    let center = index
        .catalog()
        .get(class)
        .map(|c| c.star.center.clone())
        .unwrap_or_else(Point::origin);
    let nb = star_neighborhood(class, bare, budget).expect("class is in the catalog");
    let mut case = LemmaCase {
        class: *class,
        neighborhood_tiles: nb.patch.len(),
        green: partners.green.len(),
        green_in_neighborhood: 0,
        green_by_refutation: Vec::new(),
        red: Vec::new(),
        passed: nb.status == ForceStatus::Saturated,
    };
    let Some(start) = decorated_start(class, index, &nb.patch) else {
        case.passed = false;
        return case;
    };
    for g in &partners.green {
        if nb.patch.find(g).is_some() {
            case.green_in_neighborhood += 1;
        } else {
            let r = force_green(&start, g, index, budget, &center);
            case.passed &= r.refuted;
            case.green_by_refutation.push(r);
        }
    }
    for red in &partners.red {
        let mut q = start.clone();
        let r = if q.add_tile(red.clone()).is_err() {
            Refutation {
                refuted: true,
                ..no_refutation()
            }
        } else {
            refute(&q, index, budget, SPLIT_DEPTH, &center)
        };
        case.passed &= r.refuted;
        case.red.push(r);
    }
    case
}

/// Runs the lemma for every class C₂..C₇ in the catalog.
pub fn verify_lemma1(
    index: &FitIndex,
    bare: &FitIndex,
    partners: &BTreeMap<StarClass, PartnerTiles>,
    budget: &ForceBudget,
) -> LemmaReport {
    let cases: Vec<LemmaCase> = index
        .catalog()
        .stars()
        .iter()
        .filter(|c| c.class.shape_index >= 2)
        .map(|c| {
            let empty = PartnerTiles::default();
            let pt = partners.get(&c.class).unwrap_or(&empty);
            let mut case = verify_lemma_case(&c.class, pt, index, bare, budget);
            // Every class must have been observed in the sample supertile.
            case.passed &= pt.occurrences > 0;
            case
        })
        .collect();
    let passed = cases.iter().all(|c| c.passed);
    LemmaReport { cases, passed }
}

/// One of the patches shown not to occur in any L-tiling.
#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub name: String,
    pub class: StarClass,
    pub seed_tiles: usize,
    pub refutation: Refutation,
}

/// The seeds of the three hard cases: (a) C₃ with its red tile, (b) C₄ with
/// its red tile, (c) C₇ with C₂ placed at the vertex of its missing green
/// tile where only C₂, C₃ and C₄ fit. Each seed is the decorated star plus
/// its undecorated neighborhood.
pub fn claim_seeds(
    index: &FitIndex,
    bare: &FitIndex,
    partners: &BTreeMap<StarClass, PartnerTiles>,
    budget: &ForceBudget,
) -> Vec<(String, StarClass, Patch)> {
    let mut out = Vec::new();
    for (name, shape) in [("a", 3u8), ("b", 4)] {
        for cs in index.catalog().of_shape(shape) {
            let Some(pt) = partners.get(&cs.class) else {
                continue;
            };
            let nb = star_neighborhood(&cs.class, bare, budget).expect("catalog class");
            let Some(start) = decorated_start(&cs.class, index, &nb.patch) else {
                continue;
            };
            for red in &pt.red {
                let mut q = start.clone();
                if q.add_tile(red.clone()).is_ok() {
                    out.push((name.to_string(), cs.class, q));
                }
            }
        }
    }
    for cs in index.catalog().of_shape(7) {
        let Some(pt) = partners.get(&cs.class) else {
            continue;
        };
        let nb = star_neighborhood(&cs.class, bare, budget).expect("catalog class");
        let Some(start) = decorated_start(&cs.class, index, &nb.patch) else {
            continue;
        };
        let verts = start.vertices();
        for g in pt.green.iter().filter(|g| nb.patch.find(g).is_none()) {
            for v in g.vertices() {
                if verts.binary_search(&v).is_err() {
                    continue;
                }
                for f in index.fits(&start, &v) {
                    if f.class.shape_index == 2 {
                        let mut q = start.clone();
                        if !merge_into(&mut q, &f.tiles).conflict {
                            out.push(("c".to_string(), cs.class, q));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn verify_claims(
    index: &FitIndex,
    bare: &FitIndex,
    partners: &BTreeMap<StarClass, PartnerTiles>,
    budget: &ForceBudget,
) -> Vec<ClaimResult> {
    claim_seeds(index, bare, partners, budget)
        .into_iter()
        .map(|(name, class, seed)| {
            let center = index
                .catalog()
                .get(&class)
                .expect("catalog class")
                .star
                .center
                .clone();
            ClaimResult {
                name,
                class,
                seed_tiles: seed.len(),
                refutation: refute(&seed, index, budget, SPLIT_DEPTH, &center),
            }
        })
        .collect()
}
