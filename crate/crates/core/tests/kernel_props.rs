use goldtri::geom::{orient, segment_overlap};
use goldtri::subst::{all_colored_large_tiles, decompose_tile, supertile};
use goldtri::{AlgebraicNum, DecoratedTile, Isometry, Point, Segment, Sign, Triangle};
use proptest::prelude::*;

fn num() -> impl Strategy<Value = AlgebraicNum> {
    prop::array::uniform4(-1000i64..1000).prop_map(|[a, b, c, d]| AlgebraicNum::new(a, b, c, d))
}

fn small_num() -> impl Strategy<Value = AlgebraicNum> {
    prop::array::uniform4(-6i64..6).prop_map(|[a, b, c, d]| AlgebraicNum::new(a, b, c, d))
}

fn point() -> impl Strategy<Value = Point> {
    (small_num(), small_num()).prop_map(|(x, y)| Point::new(x, y))
}

fn sign_of(n: i128) -> i8 {
    n.signum() as i8
}

/// Sign of p + q√5.
fn sign_sqrt5(p: i128, q: i128) -> i8 {
    let (sp, sq) = (sign_of(p), sign_of(q));
    if sp == 0 || sq == 0 || sp == sq {
        return if sp != 0 { sp } else { sq };
    }
    // Opposite signs: the larger square wins.
    match (p * p).cmp(&(5 * q * q)) {
        std::cmp::Ordering::Greater => sp,
        std::cmp::Ordering::Less => sq,
        std::cmp::Ordering::Equal => 0,
    }
}

/// Exact sign of c₀ + c₁ψ + c₂ψ² + c₃ψ³ from ψ² = (√5 − 1)/2: write the
/// number as A + Bψ with A, B ∈ ℚ(√5) and compare A² with B²ψ².
fn oracle_sign(c: [i64; 4]) -> i8 {
    let [c0, c1, c2, c3] = c.map(i128::from);
    // 2A = p + q√5, 2B = r + s√5.
    let (p, q) = (2 * c0 - c2, c2);
    let (r, s) = (2 * c1 - c3, c3);
    let sa = sign_sqrt5(p, q);
    let sb = sign_sqrt5(r, s);
    if sb == 0 || sa == sb {
        return if sa != 0 { sa } else { sb };
    }
    if sa == 0 {
        return sb;
    }
    // 4A² = P + Q√5, 4B² = X + Y√5, 8B²ψ² = (5Y − X) + (X − Y)√5.
    let (pp, qq) = (p * p + 5 * q * q, 2 * p * q);
    let (x, y) = (r * r + 5 * s * s, 2 * r * s);
    let d = sign_sqrt5(2 * pp - (5 * y - x), 2 * qq - (x - y));
    match d {
        1 => sa,
        -1 => sb,
        _ => 0,
    }
}

fn as_i8(s: Sign) -> i8 {
    s.as_i8()
}

/// Placements drawn from a supertile cover many orientations.
fn placements() -> Vec<Isometry> {
    supertile(9, &all_colored_large_tiles()[0])
        .unwrap()
        .iter()
        .map(|t| t.placement.clone())
        .collect()
}

fn isometry() -> impl Strategy<Value = Isometry> {
    let pool = placements();
    (0..pool.len(), point(), any::<bool>()).prop_map(move |(i, t, flip)| {
        let g = Isometry::translation(&t).compose(&pool[i]);
        if flip {
            g.compose(&Isometry::reflect_x())
        } else {
            g
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_axioms(a in num(), b in num(), c in num()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, AlgebraicNum::zero());
        prop_assert_eq!(&a * &AlgebraicNum::one(), a.clone());
    }

    #[test]
    fn sign_of_product(a in num(), b in num()) {
        prop_assert_eq!(as_i8((&a * &b).sign()), as_i8(a.sign()) * as_i8(b.sign()));
    }

    #[test]
    fn sign_matches_exact_oracle(c in prop::array::uniform4(-1000i64..1000)) {
        let [a, b, x, d] = c;
        prop_assert_eq!(as_i8(AlgebraicNum::new(a, b, x, d).sign()), oracle_sign(c));
    }

    #[test]
    fn psi_powers_are_units(n in -40i32..40) {
        prop_assert_eq!(&AlgebraicNum::psi_pow(n) * &AlgebraicNum::psi_pow(-n), AlgebraicNum::one());
    }

    #[test]
    fn orientation_is_antisymmetric(p in point(), q in point(), r in point()) {
        prop_assert_eq!(as_i8(orient(&p, &q, &r)), -as_i8(orient(&q, &p, &r)));
        prop_assert_eq!(orient(&p, &q, &r), orient(&q, &r, &p));
    }

    #[test]
    fn isometries_preserve_distance(g in isometry(), p in point(), q in point()) {
        prop_assert_eq!(g.apply(&p).dist2(&g.apply(&q)), p.dist2(&q));
        prop_assert_eq!(g.invert().apply(&g.apply(&p)), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn overlap_is_symmetric(a in point(), b in point(), c in point(), d in point(), e in point(), f in point()) {
        if let (Ok(t1), Ok(t2)) = (Triangle::new(a, b, c), Triangle::new(d, e, f)) {
            prop_assert_eq!(t1.overlaps(&t2), t2.overlaps(&t1));
        }
    }

    #[test]
    fn segment_overlap_is_symmetric(a in point(), b in point(), c in point(), d in point()) {
        if let (Ok(s1), Ok(s2)) = (Segment::new(a.clone(), b), Segment::new(c, d)) {
            let x = segment_overlap(&s1, &s2).map(|s| s.length2());
            let y = segment_overlap(&s2, &s1).map(|s| s.length2());
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn decomposition_scales_area_by_psi_minus_2(i in 0usize..64, g in isometry()) {
        let t = all_colored_large_tiles()[i].clone();
        let t = DecoratedTile { placement: g.compose(&t.placement), ..t };
        let children = decompose_tile(&t).unwrap();
        prop_assert_eq!(children.double_area(), &t.double_area() * &AlgebraicNum::psi_pow(-2));
    }
}

#[test]
fn psi_inverse_identity() {
    let psi = AlgebraicNum::psi();
    let inv = &psi + &AlgebraicNum::psi_pow(3);
    assert_eq!(&psi * &inv, AlgebraicNum::one());
}

#[test]
fn oracle_agrees_on_known_values() {
    // 2ψ² − 1 ≈ 0.236 and 5ψ − 4 ≈ −0.069.
    assert_eq!(oracle_sign([0, 0, 0, 0]), 0);
    assert_eq!(oracle_sign([-1, 0, 2, 0]), 1);
    assert_eq!(oracle_sign([-4, 5, 0, 0]), -1);
}
