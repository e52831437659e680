//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every check is exact; the only tolerances are the sample counts
//! and RNG seeds pinned below.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use goldtri::rules::{
    build_crown_catalog, build_star_catalog, check_rule_L, complete_stars, crown_classes,
};
use goldtri::subst::{
    admissible_seeds, all_colored_large_tiles, decompose_tile, default_seed, dvo_shift,
    dvo_supertile, supertile, supertile_sequence, DVO_RULE,
};
use goldtri::verify::report::{self, Context, Target};
use goldtri::verify::theorems::{
    covering_diameter, find_counterexample, inner_tiles, verify_c1_occurrences, verify_closure,
    verify_composition_theorem, verify_covering, verify_seed_recurrence,
};
use goldtri::{AlgebraicNum, DecoratedTile, Isometry, Point, TileShape};

const COMPOSITION_SAMPLES: usize = 100;
const COVERING_SAMPLES: usize = 10_000;
const KERNEL_CASES: usize = 10_000;
const RNG_SEED: u64 = 1;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn star_catalog() -> Check {
    let c14 = build_star_catalog(14).map_err(|e| e.to_string())?;
    let c16 = build_star_catalog(16).map_err(|e| e.to_string())?;
    let sizes = c16.shape_sizes();
    let same = c14.keys() == c16.keys()
        && c14
            .stars()
            .iter()
            .map(|s| s.class)
            .eq(c16.stars().iter().map(|s| s.class));
    ensure(
        c16.len() == 28 && sizes.len() == 7 && sizes.values().all(|&n| n == 4) && same,
        format!(
            "{} stars, shape classes {:?}, orders 14 and 16 identical: {same}",
            c16.len(),
            sizes
        ),
    )
}

fn crowns() -> Check {
    let c = build_crown_catalog(12);
    let classes = crown_classes(&c);
    let sizes: Option<BTreeSet<usize>> = classes.as_ref().map(|v| v.iter().map(Vec::len).collect());
    ensure(
        c.len() == 65
            && classes.as_ref().map(Vec::len) == Some(13)
            && sizes == Some(BTreeSet::from([5])),
        format!(
            "{} crowns, {:?} shift classes",
            c.len(),
            classes.map(|v| v.len())
        ),
    )
}

fn supertile_legality(cx: &Context) -> Check {
    let seeds = admissible_seeds();
    let bad: Vec<(usize, usize)> = seeds
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, s)| {
            let seq = supertile_sequence(16, s).expect("admissible seed");
            seq.into_iter()
                .enumerate()
                .filter(|(_, p)| !check_rule_L(p, &cx.catalog).is_empty())
                .map(move |(n, _)| (k, n))
                .collect::<Vec<_>>()
        })
        .collect();
    ensure(
        seeds.len() == 8 && bad.is_empty(),
        format!(
            "{} seeds x orders 0..=16, violations at {:?}",
            seeds.len(),
            bad
        ),
    )
}

fn closure(cx: &Context) -> Check {
    let r = verify_closure(&cx.catalog);
    ensure(
        r.passed,
        format!(
            "C5->C6 {}, C7->C6 {}, C6/C7 period 4 {}, labels +1 {}",
            r.c5_to_c6, r.c7_to_c6, r.c6_c7_period_4, r.labels_increment
        ),
    )
}

fn composition(cx: &Context) -> Check {
    let r = verify_composition_theorem(&cx.catalog, COMPOSITION_SAMPLES, 4..=12, RNG_SEED);
    let small: BTreeSet<u8> = r
        .supertiles
        .iter()
        .flat_map(|s| s.small_right_angle_shapes.iter().copied())
        .collect();
    let interior_faults: usize = r
        .supertiles
        .iter()
        .map(|s| {
            s.foreign_tiles
                + s.edge_violations
                + s.illegal_stars
                + s.class_mismatches
                + s.c1_not_on_side
        })
        .sum();
    ensure(
        r.passed,
        format!(
            "{} round trips, {} failures; {} composed supertiles, {} interior faults; small right-angle stars {:?}",
            r.samples,
            r.round_trip_failures,
            r.supertiles.len(),
            interior_faults,
            small
        ),
    )
}

fn via_report(target: Target, cx: &Context) -> Check {
    let o = report::run(target, cx);
    let failed: Vec<&String> = o.trace.iter().filter(|l| l.contains("FAILED")).collect();
    ensure(
        o.passed,
        format!("{} cases, failing: {:?}", o.trace.len(), failed),
    )
}

fn lemma_and_claims(cx: &Context) -> Check {
    let lemma = via_report(Target::Lemma1, cx);
    let claims = via_report(Target::Claims, cx);
    match (lemma, claims) {
        (Ok(a), Ok(b)) => Ok(format!("lemma {a}; claims {b}")),
        (a, b) => Err(format!("lemma {a:?}; claims {b:?}")),
    }
}

fn counterexample(cx: &Context) -> Check {
    let Some(c) = find_counterexample(&cx.catalog) else {
        return Err("no counterexample found".into());
    };
    let l_patch =
        check_rule_L(&c.patch, &cx.catalog).is_empty() && complete_stars(&c.patch).is_empty();
    let illegal = check_rule_L(&c.decomposed, &cx.catalog).illegal_stars.len();
    ensure(
        l_patch && illegal > 0 && illegal == c.illegal_centers.len(),
        format!(
            "{}-tile L-patch without complete stars, {illegal} illegal stars after decomposition",
            c.patch.len()
        ),
    )
}

fn inner() -> Check {
    let r = inner_tiles(14);
    ensure(
        r.small() == 7 && r.large() == 15 && r.stable_from() < r.counts.len() - 1,
        format!(
            "{} small + {} large, stable from order {}",
            r.small(),
            r.large(),
            r.stable_from()
        ),
    )
}

fn c1(cx: &Context) -> Check {
    let r = verify_c1_occurrences(&cx.catalog, &default_seed());
    ensure(
        r.passed,
        format!(
            "{} C1 classes at order 10, {} blue-axis at order 4, chain failures {}",
            r.in_order_10.len(),
            r.blue_in_order_4.len(),
            r.chain_failures.len()
        ),
    )
}

fn seed_recurrence() -> Check {
    let r = verify_seed_recurrence(&default_seed());
    ensure(
        r.placement.is_some(),
        format!(
            "{} strictly interior copies at order 8, nested at order 16: {}",
            r.matches, r.nested
        ),
    )
}

fn pow_mod5(b: u32, e: u32) -> u8 {
    (0..e).fold(1u32, |acc, _| acc * b % 5) as u8
}

fn dvo_affine() -> Check {
    let mut faults = 0;
    let mut tiles = 0;
    for i in 0..=12u32 {
        let runs: Vec<_> = (0..5u8).map(|k| dvo_supertile(i, k, &DVO_RULE).1).collect();
        for (key, &b) in &runs[0].marks {
            let a = match key.shape {
                TileShape::Large => pow_mod5(2, i),
                TileShape::Small => pow_mod5(2, i + 1),
            };
            tiles += 1;
            for (k, run) in runs.iter().enumerate() {
                if run.marks.get(key) != Some(&((a * k as u8 + b) % 5)) {
                    faults += 1;
                }
            }
        }
        let step = pow_mod5(3, i);
        for k in 0..5u8 {
            for y in 0..5u8 {
                let moved = &runs[((k + step * y) % 5) as usize];
                if *moved != dvo_shift(&runs[k as usize], y) {
                    faults += 1;
                }
            }
        }
    }
    ensure(
        faults == 0,
        format!("orders 0..=12, {tiles} tiles, {faults} faults"),
    )
}

fn covering() -> Check {
    let r = verify_covering(14, COVERING_SAMPLES, RNG_SEED);
    ensure(
        r.samples == COVERING_SAMPLES
            && r.failures.is_empty()
            && (r.diameter - covering_diameter()).abs() < 1e-12,
        format!(
            "D = {:.6}, {} discs, {} failures",
            r.diameter,
            r.samples,
            r.failures.len()
        ),
    )
}

fn random_num(rng: &mut ChaCha8Rng) -> AlgebraicNum {
    let c: [i64; 4] = std::array::from_fn(|_| rng.random_range(-10_000..10_000));
    AlgebraicNum::new(c[0], c[1], c[2], c[3])
}

fn kernel() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let mut faults = Vec::new();
    for _ in 0..KERNEL_CASES {
        let (a, b, c) = (
            random_num(&mut rng),
            random_num(&mut rng),
            random_num(&mut rng),
        );
        let ring = &a + &b == &b + &a
            && &a * &b == &b * &a
            && &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && &(&a + &b) - &b == a;
        if !ring {
            faults.push("ring axioms");
        }
        if (&a * &b).sign().as_i8() != a.sign().as_i8() * b.sign().as_i8() {
            faults.push("sign of product");
        }
    }
    let psi = AlgebraicNum::psi();
    if &psi * &(&psi + &AlgebraicNum::psi_pow(3)) != AlgebraicNum::one() {
        faults.push("unit inverse");
    }
    let pool: Vec<Isometry> = supertile(9, &default_seed())
        .expect("default seed")
        .iter()
        .map(|t| t.placement.clone())
        .collect();
    let colored = all_colored_large_tiles();
    let ratio = AlgebraicNum::psi_pow(-2);
    for _ in 0..KERNEL_CASES {
        let g = &pool[rng.random_range(0..pool.len())];
        let shift = Point::new(random_num(&mut rng), random_num(&mut rng));
        let g = Isometry::translation(&shift).compose(g);
        let t = &colored[rng.random_range(0..colored.len())];
        let t = DecoratedTile {
            placement: g.compose(&t.placement),
            ..t.clone()
        };
        let children = decompose_tile(&t).expect("colored tile");
        if children.double_area() != &t.double_area() * &ratio {
            faults.push("area ratio");
        }
    }
    let kinds: BTreeSet<&str> = faults.iter().copied().collect();
    ensure(
        faults.is_empty(),
        format!(
            "{KERNEL_CASES} random cases per property, {} faults {:?}",
            faults.len(),
            kinds
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cx = match Context::new() {
        Ok(cx) => cx,
        Err(e) => {
            eprintln!("cannot build the star catalog: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        ("star catalog", Box::new(star_catalog)),
        ("crown catalog", Box::new(crowns)),
        ("supertile legality", Box::new(|| supertile_legality(&cx))),
        ("closure", Box::new(|| closure(&cx))),
        ("composition", Box::new(|| composition(&cx))),
        (
            "forced neighborhoods",
            Box::new(|| via_report(Target::Neighborhoods, &cx)),
        ),
        ("green and red tiles", Box::new(|| lemma_and_claims(&cx))),
        ("counterexample", Box::new(|| counterexample(&cx))),
        ("inner proto-tiles", Box::new(inner)),
        ("C1 occurrences", Box::new(|| c1(&cx))),
        ("seed recurrence", Box::new(seed_recurrence)),
        ("five-color marks", Box::new(dvo_affine)),
        ("covering", Box::new(covering)),
        ("kernel properties", Box::new(kernel)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, msg) = match check() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!(
            "{tag} {:>2} {name}: {msg} ({:.1}s)",
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
