//! Named verification targets with machine-readable results and a short
//! human-readable trace.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::rules::{build_star_catalog, RulesError, StarCatalog, StarClass};
use crate::subst::default_seed;

use super::fits::{FitIndex, ForceBudget};
use super::lemma::{
    neighborhood_report, neighborhood_soundness, partner_tiles, star_neighborhood, verify_claims,
    verify_lemma1, PartnerTiles,
};
use super::theorems::{
    find_counterexample, inner_tiles, verify_c1_occurrences, verify_closure,
    verify_composition_theorem, verify_covering, verify_seed_recurrence,
    verify_supertile_extendability,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Lemma1,
    Claims,
    Neighborhoods,
    Closure,
    Composition,
    Extendability,
    Covering,
    Inner,
    C1,
    Seed,
    Counterexample,
}

impl Target {
    pub const ALL: [Target; 11] = [
        Target::Closure,
        Target::Composition,
        Target::Extendability,
        Target::Covering,
        Target::Inner,
        Target::C1,
        Target::Seed,
        Target::Counterexample,
        Target::Neighborhoods,
        Target::Lemma1,
        Target::Claims,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Lemma1 => "lemma1",
            Target::Claims => "claims",
            Target::Neighborhoods => "neighborhoods",
            Target::Closure => "closure",
            Target::Composition => "composition",
            Target::Extendability => "extendability",
            Target::Covering => "covering",
            Target::Inner => "inner",
            Target::C1 => "c1",
            Target::Seed => "seed",
            Target::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Target, String> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown target {s:?}"))
    }
}

/// Outcome of one target.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub target: Target,
    pub passed: bool,
    /// Human-readable lines.
    pub trace: Vec<String>,
    pub details: Value,
}

/// Shared inputs: the star catalog, both fit indices and the green/red tiles.
pub struct Context {
    pub catalog: StarCatalog,
    pub index: FitIndex,
    pub bare: FitIndex,
    pub partners: BTreeMap<StarClass, PartnerTiles>,
    pub budget: ForceBudget,
}

/// Catalog order used for verification; the catalog is complete from order 14.
pub const CATALOG_ORDER: u32 = 14;
/// Supertile order from which green and red tiles are read.
pub const PARTNER_ORDER: u32 = 16;

impl Context {
    pub fn new() -> Result<Context, RulesError> {
        let catalog = build_star_catalog(CATALOG_ORDER)?;
        let partners = partner_tiles(&catalog, PARTNER_ORDER, &default_seed());
        Ok(Context {
            index: FitIndex::new(&catalog),
            bare: FitIndex::undecorated(&catalog),
            catalog,
            partners,
            budget: ForceBudget::default(),
        })
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn run(target: Target, cx: &Context) -> Outcome {
    let mut trace = Vec::new();
    let (passed, details) = match target {
        Target::Closure => {
            let r = verify_closure(&cx.catalog);
            for (from, to) in &r.map {
                let to = to.map_or("none".to_string(), |c| c.to_string());
                trace.push(format!("{from} -> {to}"));
            }
            (r.passed, to_value(&r))
        }
        Target::Composition => {
            let r = verify_composition_theorem(&cx.catalog, 100, 4..=12, 1);
            trace.push(format!(
                "round trips: {} samples, {} failures",
                r.samples, r.round_trip_failures
            ));
            for s in r.supertiles.iter().filter(|s| s.seed == 0) {
                trace.push(format!(
                    "order {}: {} composed tiles, {} undecided, small right-angle stars {:?}",
                    s.order, s.composed_tiles, s.undecided, s.small_right_angle_shapes
                ));
            }
            (r.passed, to_value(&r))
        }
        Target::Extendability => {
            let r = verify_supertile_extendability(&cx.catalog, 12);
            trace.push(format!(
                "{} vertices, {} without a fitting shape",
                r.vertices_checked,
                r.failures.len()
            ));
            (r.passed, to_value(&r))
        }
        Target::Covering => {
            let r = verify_covering(14, 10_000, 1);
            trace.push(format!(
                "D = {:.6}: {} discs, {} failures",
                r.diameter,
                r.samples,
                r.failures.len()
            ));
            (r.passed, to_value(&r))
        }
        Target::Inner => {
            let r = inner_tiles(14);
            let ok = r.small() == 7 && r.large() == 15 && r.stable_from() < r.counts.len() - 1;
            trace.push(format!(
                "{} small + {} large, stable from order {}",
                r.small(),
                r.large(),
                r.stable_from()
            ));
            (ok, to_value(&r))
        }
        Target::C1 => {
            let r = verify_c1_occurrences(&cx.catalog, &default_seed());
            trace.push(format!(
                "order 10: {} C1 classes; order 4: {} blue-axis C1 classes; first C1 at order {}",
                r.in_order_10.len(),
                r.blue_in_order_4.len(),
                r.first_order
            ));
            (r.passed, to_value(&r))
        }
        Target::Seed => {
            let r = verify_seed_recurrence(&default_seed());
            trace.push(format!(
                "{} interior copies at order 8, nested at order 16: {}",
                r.matches, r.nested
            ));
            (r.passed, to_value(&r))
        }
        Target::Counterexample => match find_counterexample(&cx.catalog) {
            Some(c) => {
                trace.push(format!(
                    "{}-tile L-patch without complete stars; decomposition has {} illegal stars ({} patches searched)",
                    c.patch.len(),
                    c.illegal_centers.len(),
                    c.patches_searched
                ));
                (true, to_value(&c))
            }
            None => {
                trace.push("no counterexample found".into());
                (false, Value::Null)
            }
        },
        Target::Neighborhoods => {
            let truth =
                crate::subst::supertile(PARTNER_ORDER, &default_seed()).expect("default seed");
            let mut ok = true;
            let mut cases = Vec::new();
            for cs in cx.catalog.stars() {
                let r =
                    neighborhood_report(&cs.class, &cx.bare, &cx.budget).expect("catalog class");
                let full =
                    star_neighborhood(&cs.class, &cx.index, &cx.budget).expect("catalog class");
                let contains = r.tiles > 0
                    && star_neighborhood(&cs.class, &cx.bare, &cx.budget)
                        .expect("catalog class")
                        .patch
                        .iter()
                        .all(|t| full.patch.find(t).is_some());
                let sound = neighborhood_soundness(&cs.class, &full.patch, &cx.catalog, &truth);
                let symmetric_ok = cs.class.shape_index > 5 || r.centrally_symmetric;
                let case_ok = r.described && symmetric_ok && contains && sound.wrong == 0;
                ok &= case_ok;
                trace.push(format!(
                    "{}: {} shape-forced tiles, {} decorated, symmetric {}, described stars {}, {} occurrences: {}",
                    cs.class,
                    r.tiles,
                    full.patch.len(),
                    r.centrally_symmetric,
                    r.described,
                    sound.occurrences,
                    verdict(case_ok)
                ));
                cases.push(
                    json!({"report": r, "decorated_tiles": full.patch.len(), "soundness": sound}),
                );
            }
            (ok, Value::Array(cases))
        }
        Target::Lemma1 => {
            let r = verify_lemma1(&cx.index, &cx.bare, &cx.partners, &cx.budget);
            for c in &r.cases {
                trace.push(format!(
                    "{}: {} tiles, green {}/{} in neighborhood, {} forced by splitting, {} red refuted: {}",
                    c.class,
                    c.neighborhood_tiles,
                    c.green_in_neighborhood,
                    c.green,
                    c.green_by_refutation.len(),
                    c.red.len(),
                    verdict(c.passed)
                ));
            }
            (r.passed, to_value(&r))
        }
        Target::Claims => {
            let r = verify_claims(&cx.index, &cx.bare, &cx.partners, &cx.budget);
            for c in &r {
                trace.push(format!(
                    "({}) {}: {} seed tiles, {} forcings, {} fit enumerations: {}",
                    c.name,
                    c.class,
                    c.seed_tiles,
                    c.refutation.forcings,
                    c.refutation.fit_enumerations,
                    verdict(c.refutation.refuted)
                ));
            }
            let names: std::collections::BTreeSet<&str> =
                r.iter().map(|c| c.name.as_str()).collect();
            let ok = names.len() == 3 && r.iter().all(|c| c.refutation.refuted);
            (ok, to_value(&r))
        }
    };
    Outcome {
        target,
        passed,
        trace,
        details,
    }
}
