use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand};

use goldtri::rules::{
    build_crown_catalog, build_star_catalog, check_rule_L, crown_classes, StarCatalog,
};
use goldtri::shell::{catalog_json, load_patch, render_svg, save_patch, write_file, RenderStyle};
use goldtri::subst::{compose_patch, decompose_patch, default_seed, seed_tile, supertile};
use goldtri::verify::lemma::star_neighborhood;
use goldtri::verify::report::{self, Target, CATALOG_ORDER};
use goldtri::verify::{FitIndex, ForceBudget};
use goldtri::{DecoratedTile, Direction, Patch, StarClass};

#[derive(Parser)]
#[command(
    name = "goldtri",
    version,
    about = "Decorated golden-triangle tilings: supertiles, legal stars and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the supertile of order N.
    Supertile {
        #[arg(long)]
        order: u32,
        /// Seed decoration as hyp,lleg,sleg labels, each optionally followed
        /// by + or - for the arrow (default: the bundled seed).
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose a patch K times.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
    /// Compose a patch K times.
    Compose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
    /// Check rule L: matching side decorations and legal complete stars.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build the catalog of legal stars.
    Stars {
        #[arg(long, default_value_t = 16)]
        max_order: u32,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Build the catalog of five-colored crowns.
    Crowns {
        #[arg(long, default_value_t = 12)]
        max_order: u32,
    },
    /// Force the neighborhood of a legal star.
    Neighborhood {
        /// Class such as C3 (first variant) or C3[1+].
        #[arg(long)]
        star: String,
        #[arg(long)]
        out: PathBuf,
        /// Force from star shapes only, ignoring labels and arrows.
        #[arg(long)]
        shapes: bool,
    },
    /// Run verification targets.
    Verify {
        #[arg(long, default_value = "all")]
        target: String,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Render a patch as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_arrows: bool,
        #[arg(long, default_value_t = 200.0)]
        scale: f64,
    },
}

/// Failure of a check, as opposed to a usage or I/O error.
struct Failed;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("GOLDTRI_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: GOLDTRI_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli.command) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_seed(s: &str) -> Result<DecoratedTile> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [h, l, sl] = parts.as_slice() else {
        bail!("seed must be three comma-separated sides, e.g. 0+,3+,0+");
    };
    let side = |p: &str| -> Result<(u8, Direction)> {
        let (num, dir) = match p.strip_suffix('+') {
            Some(n) => (n, Direction::Forward),
            None => match p.strip_suffix('-') {
                Some(n) => (n, Direction::Backward),
                None => (p, Direction::Forward),
            },
        };
        let label: u8 = num.parse().with_context(|| format!("bad label {p:?}"))?;
        if label > 3 {
            bail!("label {label} out of range 0..4");
        }
        Ok((label, dir))
    };
    let t = seed_tile(side(h)?, side(l)?, side(sl)?);
    t.check_parity()?;
    Ok(t)
}

fn catalog() -> Result<StarCatalog> {
    Ok(build_star_catalog(CATALOG_ORDER)?)
}

fn parse_class(catalog: &StarCatalog, s: &str) -> Result<StarClass> {
    catalog
        .stars()
        .iter()
        .map(|c| c.class)
        .find(|c| c.to_string() == s || format!("C{}", c.shape_index) == s)
        .ok_or_else(|| anyhow!("unknown star {s:?}; expected C1..C7 or a variant such as C3[1+]"))
}

fn repeat(p: Patch, times: u32, f: impl Fn(&Patch) -> Result<Patch>) -> Result<Patch> {
    (0..times).try_fold(p, |p, _| f(&p))
}

fn run(cmd: Command) -> Result<Result<(), Failed>> {
    match cmd {
        Command::Supertile { order, seed, out } => {
            let seed = match seed {
                Some(s) => parse_seed(&s)?,
                None => default_seed(),
            };
            let p = supertile(order, &seed)?;
            save_patch(&p, &out)?;
            println!("{} tiles", p.len());
        }
        Command::Decompose { input, out, times } => {
            let p = repeat(load_patch(&input)?, times, |p| Ok(decompose_patch(p)))?;
            save_patch(&p, &out)?;
            println!("{} tiles", p.len());
        }
        Command::Compose { input, out, times } => {
            let p = repeat(load_patch(&input)?, times, |p| Ok(compose_patch(p)?))?;
            save_patch(&p, &out)?;
            println!("{} tiles", p.len());
        }
        Command::Check { input } => {
            let p = load_patch(&input)?;
            let r = check_rule_L(&p, &catalog()?);
            for v in &r.edge_violations {
                println!("edge violation: {v:?}");
            }
            for s in &r.illegal_stars {
                println!("illegal star at {:?}", s.center);
            }
            println!(
                "{} tiles, {} edge violations, {} illegal stars",
                p.len(),
                r.edge_violations.len(),
                r.illegal_stars.len()
            );
            if !r.is_empty() {
                return Ok(Err(Failed));
            }
        }
        Command::Stars { max_order, dump } => {
            let c = build_star_catalog(max_order)?;
            println!("{}", c.len());
            for (shape, n) in c.shape_sizes() {
                let names: Vec<String> = c.of_shape(shape).map(|s| s.class.to_string()).collect();
                println!("C{shape}: {n} ({})", names.join(" "));
            }
            if let Some(path) = dump {
                let text = serde_json::to_string_pretty(&catalog_json(&c))? + "\n";
                write_file(&path, &text)?;
            }
        }
        Command::Crowns { max_order } => {
            let c = build_crown_catalog(max_order);
            println!("{}", c.len());
            match crown_classes(&c) {
                Some(classes) => println!("{} classes", classes.len()),
                None => {
                    println!("shift closure fails");
                    return Ok(Err(Failed));
                }
            }
        }
        Command::Neighborhood { star, out, shapes } => {
            let c = catalog()?;
            let class = parse_class(&c, &star)?;
            let index = if shapes {
                FitIndex::undecorated(&c)
            } else {
                FitIndex::new(&c)
            };
            let r = star_neighborhood(&class, &index, &ForceBudget::default())
                .ok_or_else(|| anyhow!("{class} is not in the catalog"))?;
            save_patch(&r.patch, &out)?;
            println!(
                "{class}: {} tiles, {:?} after {} rounds",
                r.patch.len(),
                r.status,
                r.rounds
            );
        }
        Command::Verify {
            target,
            report: path,
        } => {
            let targets: Vec<Target> = if target == "all" {
                Target::ALL.to_vec()
            } else {
                vec![target.parse().map_err(|e: String| anyhow!(e))?]
            };
            let cx = report::Context::new()?;
            let mut outcomes = Vec::new();
            for t in targets {
                let o = report::run(t, &cx);
                for line in &o.trace {
                    println!("  {line}");
                }
                println!("{}: {}", t, if o.passed { "PASS" } else { "FAIL" });
                outcomes.push(o);
            }
            if let Some(path) = path {
                let text = serde_json::to_string_pretty(&outcomes)? + "\n";
                write_file(&path, &text)?;
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(Err(Failed));
            }
        }
        Command::Render {
            input,
            out,
            no_arrows,
            scale,
        } => {
            if !(scale.is_finite() && scale > 0.0) {
                bail!("scale must be positive");
            }
            let p = load_patch(&input)?;
            let style = RenderStyle {
                arrows: !no_arrows,
                scale,
                ..RenderStyle::default()
            };
            write_file(&out, &render_svg(&p, &style))?;
        }
    }
    Ok(Ok(()))
}
