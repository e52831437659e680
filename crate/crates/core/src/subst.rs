//! The substitution on golden right triangles: decomposition, composition,
//! supertiles, and the five-color variant with its shift.
//!
//! Decomposition cuts every large tile along its altitude, keeps small tiles
//! whole, and then applies the reference homothety H (ratio ψ⁻¹ about the
//! origin). Decorated tiles get every label incremented mod 4; the altitude is
//! labeled 0 and points from its foot to the right-angle vertex.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geom::Point;
use crate::goldfield::AlgebraicNum;
use crate::tiles::{DecoratedTile, Direction, Patch, SideDecoration, SideId, TileKey, TileShape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstError {
    #[error("tile {0:?} is not fully decorated")]
    PartialDecoration(Box<DecoratedTile>),
    #[error("seed {0:?} must be a large tile")]
    SeedNotLarge(Box<DecoratedTile>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error("tile {0:?} has no composition partner")]
    NotComposable(Box<DecoratedTile>),
    #[error("the composition partner of tile {0:?} lies outside the patch")]
    Boundary(Box<DecoratedTile>),
}

/// Applies H: scaling by ψ⁻¹ about the origin.
pub fn homothety(p: &Point) -> Point {
    p.div_psi()
}

/// Applies H⁻¹: scaling by ψ about the origin.
pub fn homothety_inv(p: &Point) -> Point {
    p.mul_psi()
}

/// Foot of the altitude of the canonical large tile: (ψ⁶, ψ⁵).
pub fn canonical_altitude_foot() -> Point {
    Point::new(AlgebraicNum::psi_pow(6), AlgebraicNum::psi_pow(5))
}

/// Where a child tile came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChildRole {
    /// A small tile rescaled into a large one.
    Grown,
    /// The large half of a cut large tile.
    LargeHalf,
    /// The small half of a cut large tile.
    SmallHalf,
}

fn altitude() -> SideDecoration {
    SideDecoration::full(0, Direction::Forward)
}

fn carry(d: SideDecoration, flip: bool) -> SideDecoration {
    let d = d.shift_label(1);
    SideDecoration {
        label: d.label,
        dir: if flip {
            d.dir.map(Direction::flip)
        } else {
            d.dir
        },
    }
}

/// Decomposition of a single tile, propagating whatever decoration is
/// present. Children are returned with their role.
pub fn decompose_with_roles(t: &DecoratedTile) -> Vec<(DecoratedTile, ChildRole)> {
    let [r, a, b] = t.vertices();
    let hyp = t.side(SideId::Hyp);
    let lleg = t.side(SideId::LargeLeg);
    let sleg = t.side(SideId::SmallLeg);
    match t.shape {
        TileShape::Small => {
            let mut c = DecoratedTile::from_vertices(
                TileShape::Large,
                &homothety(&r),
                &homothety(&a),
                &homothety(&b),
            )
            .expect("scaled small tile is a large tile");
            c.sides = [carry(hyp, false), carry(lleg, false), carry(sleg, false)];
            vec![(c, ChildRole::Grown)]
        }
        TileShape::Large => {
            let f = t.placement.apply(&canonical_altitude_foot());
            let (hf, ha, hr, hb) = (homothety(&f), homothety(&a), homothety(&r), homothety(&b));
            // Large half: right angle at the foot, large leg on the parent
            // hypotenuse, small leg on the altitude.
            let mut large = DecoratedTile::from_vertices(TileShape::Large, &hf, &ha, &hr)
                .expect("large half is a large tile");
            large.sides[SideId::Hyp.index()] = carry(lleg, true);
            large.sides[SideId::LargeLeg.index()] = carry(hyp, true);
            large.sides[SideId::SmallLeg.index()] = altitude();
            // Small half: large leg on the altitude, small leg on the parent
            // hypotenuse.
            let mut small = DecoratedTile::from_vertices(TileShape::Small, &hf, &hr, &hb)
                .expect("small half is a small tile");
            small.sides[SideId::Hyp.index()] = carry(sleg, false);
            small.sides[SideId::LargeLeg.index()] = altitude();
            small.sides[SideId::SmallLeg.index()] = carry(hyp, false);
            vec![(large, ChildRole::LargeHalf), (small, ChildRole::SmallHalf)]
        }
    }
}

/// Decorated decomposition of one fully decorated tile.
pub fn decompose_tile(t: &DecoratedTile) -> Result<Patch, SubstError> {
    if !t.is_fully_decorated() {
        return Err(SubstError::PartialDecoration(Box::new(t.clone())));
    }
    Ok(Patch::from_tiles_unchecked(
        decompose_with_roles(t).into_iter().map(|(c, _)| c),
    ))
}

/// Decomposition of a whole patch. Partial decorations are carried through.
pub fn decompose_patch(p: &Patch) -> Patch {
    Patch::from_tiles_unchecked(
        p.iter()
            .flat_map(|t| decompose_with_roles(t).into_iter().map(|(c, _)| c)),
    )
}

/// The n-fold decomposition of a fully decorated large seed.
pub fn supertile(n: u32, seed: &DecoratedTile) -> Result<Patch, SubstError> {
    if seed.shape != TileShape::Large {
        return Err(SubstError::SeedNotLarge(Box::new(seed.clone())));
    }
    if !seed.is_fully_decorated() {
        return Err(SubstError::PartialDecoration(Box::new(seed.clone())));
    }
    let mut p = Patch::from_tiles_unchecked([seed.clone()]);
    for _ in 0..n {
        p = decompose_patch(&p);
    }
    Ok(p)
}

/// All supertiles of orders 0..=n of one seed.
pub fn supertile_sequence(n: u32, seed: &DecoratedTile) -> Result<Vec<Patch>, SubstError> {
    let mut out = vec![supertile(0, seed)?];
    for _ in 0..n {
        let next = decompose_patch(out.last().expect("non-empty"));
        out.push(next);
    }
    Ok(out)
}

/// The eight parity-admissible labelings of a large tile, all arrows forward.
pub fn admissible_seeds() -> Vec<DecoratedTile> {
    let mut out = Vec::new();
    for hyp in [0u8, 2] {
        for lleg in [1u8, 3] {
            for sleg in [0u8, 2] {
                out.push(seed_tile(
                    (hyp, Direction::Forward),
                    (lleg, Direction::Forward),
                    (sleg, Direction::Forward),
                ));
            }
        }
    }
    out
}

#[derive(serde::Deserialize)]
struct SeedFile {
    tile: DecoratedTile,
}

/// The default seed, read from `data/default_seed.json`: the admissible
/// labeling whose supertile of order 8 contains an interior copy of itself.
pub fn default_seed() -> DecoratedTile {
    let f: SeedFile = serde_json::from_str(include_str!("../data/default_seed.json"))
        .expect("bundled seed file parses");
    f.tile
}

/// A canonical large tile with the given (label, arrow) per hyp, large leg, small leg.
pub fn seed_tile(
    hyp: (u8, Direction),
    lleg: (u8, Direction),
    sleg: (u8, Direction),
) -> DecoratedTile {
    DecoratedTile::new(TileShape::Large, crate::geom::Isometry::identity())
        .decorated(hyp, lleg, sleg)
}

/// Every parity-admissible decorated large tile (8 labelings × 8 arrow choices).
pub fn all_colored_large_tiles() -> Vec<DecoratedTile> {
    let dirs = [Direction::Forward, Direction::Backward];
    let mut out = Vec::new();
    for base in admissible_seeds() {
        for d0 in dirs {
            for d1 in dirs {
                for d2 in dirs {
                    let mut t = base.clone();
                    t.sides[SideId::Hyp.index()].dir = Some(d0);
                    t.sides[SideId::LargeLeg.index()].dir = Some(d1);
                    t.sides[SideId::SmallLeg.index()].dir = Some(d2);
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Partner of a small tile under composition: the large tile sharing the
/// small tile's large leg as its own small leg, the two forming a golden
/// right triangle.
pub fn small_partner(s: &DecoratedTile) -> DecoratedTile {
    let [f, r, b] = s.vertices();
    // |FA| / |FB| = ψ³ / ψ⁵ = ψ⁻².
    let a = f.add(&f.sub(&b).scale(&AlgebraicNum::psi_pow(-2)));
    DecoratedTile::from_vertices(TileShape::Large, &f, &a, &r).expect("partner is a large tile")
}

/// Partner of a large tile under composition (the inverse of `small_partner`).
pub fn large_partner(l: &DecoratedTile) -> DecoratedTile {
    let [f, a, r] = l.vertices();
    let b = f.add(&f.sub(&a).scale(&AlgebraicNum::psi_pow(2)));
    DecoratedTile::from_vertices(TileShape::Small, &f, &r, &b).expect("partner is a small tile")
}

fn uncarry(d: SideDecoration, flip: bool) -> SideDecoration {
    let d = d.shift_label(-1);
    SideDecoration {
        label: d.label,
        dir: if flip {
            d.dir.map(Direction::flip)
        } else {
            d.dir
        },
    }
}

/// Result of composing a patch while tolerating its boundary.
#[derive(Clone, Debug)]
pub struct Composition {
    pub patch: Patch,
    /// Tiles whose composition cannot be decided inside the patch.
    pub undecided: Vec<DecoratedTile>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strict,
    Interior,
}

/// Inverse of `decompose_patch`. Every small tile must merge with its large
/// partner; remaining large tiles shrink into small tiles.
pub fn compose_patch(p: &Patch) -> Result<Patch, ComposeError> {
    compose(p, Mode::Strict).map(|c| c.patch)
}

/// Composition of the part of `p` whose composition is determined by `p`:
/// small tiles whose partner region is outside the patch, and large tiles
/// whose possible small partner region is outside the patch, are left out and
/// reported in `undecided`.
pub fn compose_interior(p: &Patch) -> Result<Composition, ComposeError> {
    compose(p, Mode::Interior)
}

fn compose(p: &Patch, mode: Mode) -> Result<Composition, ComposeError> {
    let mut out = Vec::new();
    let mut undecided = Vec::new();
    let mut used: BTreeSet<TileKey> = BTreeSet::new();
    for s in p.iter().filter(|t| t.shape == TileShape::Small) {
        let want = small_partner(s);
        let Some(l) = p.find(&want) else {
            let blocked = !p.overlapping(&want.triangle()).is_empty();
            if blocked {
                return Err(ComposeError::NotComposable(Box::new(s.clone())));
            }
            match mode {
                Mode::Strict => return Err(ComposeError::Boundary(Box::new(s.clone()))),
                Mode::Interior => {
                    undecided.push(s.clone());
                    continue;
                }
            }
        };
        // The two halves of the hypotenuse must agree.
        let from_large = uncarry(l.side(SideId::LargeLeg), true);
        let from_small = uncarry(s.side(SideId::SmallLeg), false);
        let Some(hyp) = from_large.merge(&from_small) else {
            return Err(ComposeError::NotComposable(Box::new(s.clone())));
        };
        let [_, a, _] = l.vertices();
        let [_, r, b] = s.vertices();
        let mut parent = DecoratedTile::from_vertices(
            TileShape::Large,
            &homothety_inv(&r),
            &homothety_inv(&a),
            &homothety_inv(&b),
        )
        .expect("merged pair is a large tile");
        parent.sides[SideId::Hyp.index()] = hyp;
        parent.sides[SideId::LargeLeg.index()] = uncarry(l.side(SideId::Hyp), true);
        parent.sides[SideId::SmallLeg.index()] = uncarry(s.side(SideId::Hyp), false);
        used.insert(l.key());
        out.push(parent);
    }
    for l in p.iter().filter(|t| t.shape == TileShape::Large) {
        if used.contains(&l.key()) {
            continue;
        }
        if mode == Mode::Interior {
            let partner = large_partner(l);
            if p.overlapping(&partner.triangle()).is_empty() {
                undecided.push(l.clone());
                continue;
            }
        }
        let [r, a, b] = l.vertices();
        let mut child = DecoratedTile::from_vertices(
            TileShape::Small,
            &homothety_inv(&r),
            &homothety_inv(&a),
            &homothety_inv(&b),
        )
        .expect("shrunk large tile is a small tile");
        child.sides = l.sides.map(|d| uncarry(d, false));
        out.push(child);
    }
    Ok(Composition {
        patch: Patch::from_tiles_unchecked(out),
        undecided,
    })
}

/// A mark in Z₅ for every tile of a patch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coloring5 {
    pub marks: BTreeMap<TileKey, u8>,
}

/// Affine maps x ↦ m·x + c (mod 5) driving the five-color substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DvoRule {
    pub large_half: (u8, u8),
    pub small_half: (u8, u8),
    pub grown: (u8, u8),
}

/// The five-color rule: a large tile colored x splits into a large tile 2x
/// and a small tile 4x + 1; a small tile colored x grows into a large tile x.
pub const DVO_RULE: DvoRule = DvoRule {
    large_half: (2, 0),
    small_half: (4, 1),
    grown: (1, 0),
};

impl DvoRule {
    fn apply(&self, role: ChildRole, x: u8) -> u8 {
        let (m, c) = match role {
            ChildRole::Grown => self.grown,
            ChildRole::LargeHalf => self.large_half,
            ChildRole::SmallHalf => self.small_half,
        };
        ((m as u16 * x as u16 + c as u16) % 5) as u8
    }
}

/// Five-color decomposition; geometry is exactly that of `decompose_patch`.
pub fn dvo_decompose(p: &Patch, c: &Coloring5) -> (Patch, Coloring5) {
    dvo_decompose_with(p, c, &DVO_RULE)
}

pub fn dvo_decompose_with(p: &Patch, c: &Coloring5, rule: &DvoRule) -> (Patch, Coloring5) {
    let mut tiles = Vec::new();
    let mut marks = BTreeMap::new();
    for t in p.iter() {
        let x = c.marks.get(&t.key()).copied().unwrap_or(0);
        for (child, role) in decompose_with_roles(t) {
            marks.insert(child.key(), rule.apply(role, x));
            tiles.push(child.undecorated());
        }
    }
    (Patch::from_tiles_unchecked(tiles), Coloring5 { marks })
}

/// Adds y to every large mark and 2y to every small mark.
pub fn dvo_shift(c: &Coloring5, y: u8) -> Coloring5 {
    Coloring5 {
        marks: c
            .marks
            .iter()
            .map(|(k, &m)| {
                let add = match k.shape {
                    TileShape::Large => y,
                    TileShape::Small => 2 * y,
                };
                (k.clone(), ((m as u16 + add as u16) % 5) as u8)
            })
            .collect(),
    }
}

/// σⁿ of the canonical large tile marked `mark`.
pub fn dvo_supertile(n: u32, mark: u8, rule: &DvoRule) -> (Patch, Coloring5) {
    let seed = DecoratedTile::new(TileShape::Large, crate::geom::Isometry::identity());
    let mut c = Coloring5::default();
    c.marks.insert(seed.key(), mark % 5);
    let mut p = Patch::from_tiles_unchecked([seed]);
    for _ in 0..n {
        (p, c) = dvo_decompose_with(&p, &c, rule);
    }
    (p, c)
}

/// Tile counts (large, small) of σⁿ(L) by the substitution matrix.
pub fn tile_counts(n: u32) -> (u64, u64) {
    let (mut l, mut s) = (1u64, 0u64);
    for _ in 0..n {
        (l, s) = (l + s, l);
    }
    (l, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_seed_is_admissible() {
        let s = default_seed();
        assert!(admissible_seeds().contains(&s));
        assert_eq!(
            s,
            seed_tile(
                (0, Direction::Forward),
                (3, Direction::Forward),
                (0, Direction::Forward)
            )
        );
    }
    use crate::geom::Isometry;
    use crate::goldfield::Sign;

    fn psi(k: i32) -> AlgebraicNum {
        AlgebraicNum::psi_pow(k)
    }

    fn seed() -> DecoratedTile {
        seed_tile(
            (0, Direction::Forward),
            (1, Direction::Forward),
            (2, Direction::Backward),
        )
    }

    #[test]
    fn altitude_foot() {
        let f = canonical_altitude_foot();
        assert_eq!(
            f,
            Point::new(
                AlgebraicNum::new(-1, 0, 2, 0),
                AlgebraicNum::new(0, 1, 0, -1)
            )
        );
        let a = Point::new(psi(2), AlgebraicNum::zero());
        assert_eq!(f.dist2(&a), psi(6));
        // F lies on the hypotenuse and OF is orthogonal to it.
        let l = DecoratedTile::new(TileShape::Large, Isometry::identity());
        let hyp = l.side_segment(SideId::Hyp);
        assert!(hyp.contains_interior(&f));
        assert!(f.dot(&hyp.direction()).is_zero());
    }

    #[test]
    fn small_tile_grows_with_incremented_labels() {
        let s = DecoratedTile::new(TileShape::Small, Isometry::identity()).decorated(
            (1, Direction::Forward),
            (0, Direction::Backward),
            (3, Direction::Forward),
        );
        let p = decompose_tile(&s).unwrap();
        assert_eq!(p.len(), 1);
        let c = p.iter().next().unwrap();
        assert_eq!(c.shape, TileShape::Large);
        assert_eq!(
            c.side(SideId::Hyp),
            SideDecoration::full(2, Direction::Forward)
        );
        assert_eq!(
            c.side(SideId::LargeLeg),
            SideDecoration::full(1, Direction::Backward)
        );
        assert_eq!(
            c.side(SideId::SmallLeg),
            SideDecoration::full(0, Direction::Forward)
        );
        c.check_parity().unwrap();
        assert_eq!(c.placement, Isometry::identity());
    }

    #[test]
    fn large_tile_children_keep_parity_and_geometry() {
        for t in all_colored_large_tiles() {
            let p = decompose_tile(&t).unwrap();
            assert_eq!(p.len(), 2);
            for c in p.iter() {
                c.check_parity().unwrap();
            }
            assert!(p.edge_consistency().is_empty());
            // Children tile H(parent).
            assert_eq!(p.double_area(), &t.double_area() * &psi(-2));
        }
    }

    #[test]
    fn children_arrows_follow_parent_arrows() {
        let t = seed().transformed(&Isometry::rotation90().compose(&Isometry::reflect_x()));
        for (c, _) in decompose_with_roles(&t) {
            for side in SideId::ALL {
                let seg = c.side_segment(side);
                let arrow = c.side_arrow(side).unwrap().direction();
                // Compare against the parent side containing this child side.
                let pa = homothety_inv(&seg.a);
                let pb = homothety_inv(&seg.b);
                let parent_side = SideId::ALL.into_iter().find(|s| {
                    let ps = t.side_segment(*s);
                    ps.contains(&pa) && ps.contains(&pb)
                });
                match parent_side {
                    Some(ps) => {
                        let pa = t.side_arrow(ps).unwrap().direction();
                        assert_eq!(arrow.dot(&pa).sign(), Sign::Positive);
                        assert_eq!(
                            c.side(side).label.unwrap(),
                            (t.side(ps).label.unwrap() + 1) % 4
                        );
                    }
                    None => {
                        // The altitude points at the right-angle vertex.
                        let r = homothety(&t.vertices()[0]);
                        assert_eq!(c.side_arrow(side).unwrap().b, r);
                        assert_eq!(c.side(side).label, Some(0));
                    }
                }
            }
        }
    }

    #[test]
    fn supertile_counts() {
        assert_eq!(supertile(0, &seed()).unwrap().len(), 1);
        let p5 = supertile(5, &seed()).unwrap();
        let large = p5.iter().filter(|t| t.shape == TileShape::Large).count();
        assert_eq!((large, p5.len() - large), (8, 5));
        assert_eq!(tile_counts(16), (1597, 987));
        assert!(matches!(
            supertile(
                3,
                &DecoratedTile::new(TileShape::Small, Isometry::identity())
            ),
            Err(SubstError::SeedNotLarge(_))
        ));
    }

    #[test]
    fn compose_inverts_decompose() {
        let seq = supertile_sequence(10, &seed()).unwrap();
        for w in seq.windows(2) {
            assert_eq!(compose_patch(&w[1]).unwrap(), w[0]);
        }
        let mut p = seq[10].clone();
        for _ in 0..10 {
            p = compose_patch(&p).unwrap();
        }
        assert_eq!(p, seq[0]);
    }

    #[test]
    fn single_small_tile_has_no_composition() {
        let s = DecoratedTile::new(TileShape::Small, Isometry::identity());
        let p = Patch::from_tiles([s]).unwrap();
        assert!(matches!(compose_patch(&p), Err(ComposeError::Boundary(_))));
        let c = compose_interior(&p).unwrap();
        assert!(c.patch.is_empty());
        assert_eq!(c.undecided.len(), 1);
    }

    #[test]
    fn blocked_partner_is_not_composable() {
        let s = DecoratedTile::new(TileShape::Small, Isometry::identity());
        // Occupy the partner region with a misplaced small tile.
        let partner = small_partner(&s);
        let [f, _, r] = partner.vertices();
        let blocker = DecoratedTile::from_vertices(
            TileShape::Small,
            &f,
            &r,
            &f.add(&f.sub(&s.vertices()[2])),
        )
        .unwrap();
        let p = Patch::from_tiles([s, blocker]).unwrap();
        assert!(matches!(
            compose_patch(&p),
            Err(ComposeError::NotComposable(_))
        ));
    }

    #[test]
    fn partners_are_inverse() {
        let s = DecoratedTile::new(TileShape::Small, Isometry::rotation90());
        assert_eq!(large_partner(&small_partner(&s)).key(), s.key());
    }

    #[test]
    fn dvo_shift_examples() {
        let (_, c) = dvo_supertile(4, 3, &DVO_RULE);
        assert_eq!(dvo_shift(&c, 0), c);
        for y in 0..5 {
            assert_eq!(dvo_shift(&dvo_shift(&c, y), (5 - y) % 5), c);
        }
    }

    #[test]
    fn dvo_geometry_matches_plain_decomposition() {
        let (p, c) = dvo_supertile(7, 2, &DVO_RULE);
        let plain = supertile(7, &seed()).unwrap().undecorated();
        assert_eq!(p, plain);
        assert_eq!(c.marks.len(), p.len());
    }
}
