use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use freqcube::catalog::{read_catalog, render_tables, write_catalog, CatalogFile};
use freqcube::classifier::{classify_with, count_via_semis, enumerate_all, ClassifyOptions, Kind};
use freqcube::hypercube::{classify_set, layers, CodeSet};
use freqcube::split::{
    construct_nonsplittable, is_splittable, layer_splittability_census, nonsplittable_cycle,
    odd_cycle_color_check,
};
use freqcube::symmetry::{canonical_form, frequency_cube_counts};
use freqcube::testing_sets::{
    derive_testing_set, find_special_unitrades, reconstruct, upper_bound, verify_testing_set,
};
use freqcube::Error;

#[derive(Parser)]
#[command(name = "freqcube", version, about = "Classify double-MDS-codes and frequency hypercubes in H(n,4)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify sets of one kind up to equivalence and write a catalog.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_kind)]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Resume from `<out>.journal`.
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, short)]
        verbose: bool,
    },
    /// Recount a catalog through semi-codes and compare both totals.
    Validate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Render the tables of one or more catalogs.
    Tables {
        #[arg(long, num_args = 1.., required = true)]
        catalogs: Vec<PathBuf>,
    },
    /// Compare splittability of each class with that of its layers.
    SplitCensus {
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Print the non-splittable code with splittable layers.
    Construct {
        #[arg(long, required = true)]
        nonsplittable: bool,
        #[arg(long)]
        n: usize,
    },
    /// Derive testing sets from special unitrades.
    Testset {
        #[arg(long)]
        n: usize,
        /// A dmds catalog and a unitrade catalog, in any order.
        #[arg(long, num_args = 1.., required = true)]
        catalogs: Vec<PathBuf>,
        #[arg(long)]
        verify: bool,
        /// Write the testing set here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the upper bound exponent `α_n`.
    Bound {
        #[arg(long)]
        n: usize,
    },
    /// Classify one set given as a hex string in a file.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit code 1 marks a failed validation.
#[derive(Debug)]
struct Mismatch(String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn mismatch(msg: impl Into<String>) -> anyhow::Error {
    Mismatch(msg.into()).into()
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("FREQCUBE_THREADS") {
        let t: usize = v.parse().with_context(|| format!("FREQCUBE_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    Ok(())
}

fn journal_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".journal");
    PathBuf::from(s)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match cli.cmd {
        Cmd::Classify { n, kind, shards, resume, out, verbose } => {
            let opts = ClassifyOptions {
                shards: shards.max(1),
                journal: (shards > 1 || resume).then(|| journal_path(&out)),
                resume,
                verbose,
            };
            let c = classify_with(n, kind, &opts)?;
            let cat = CatalogFile::new(n, kind, c.classes.clone())?;
            write_catalog(&out, &cat)?;
            println!("n={n} kind={kind}");
            println!("total: {}", c.total());
            println!("classes: {}", c.classes.len());
            println!("isotopy classes: {}", c.isotopy_classes());
            println!("equivalent to complement: {}", c.classes.iter().filter(|r| r.equiv_to_complement).count());
            println!("semi-code classes: {}", c.semis.len());
            println!("double count: {} = {}", c.count.via_semis, c.count.via_classes);
            if kind == Kind::DoubleMds {
                let r = frequency_cube_counts(&c.classes)?;
                println!("equivalence classes of frequency cubes: {}", r.cube_classes);
                println!("isotopy classes of frequency cubes: {}", r.cube_isotopy_classes);
            }
        }
        Cmd::Validate { n, catalog } => {
            let cat = read_catalog(&catalog)?;
            if cat.n != n {
                bail!("catalog has n={}, expected {n}", cat.n);
            }
            let (semis, via_semis) = count_via_semis(n, cat.kind)?;
            let via_classes = cat.total();
            println!("semi-code classes: {}", semis.len());
            println!("sum M_i R_i: {via_semis}");
            println!("sum |G|/|Aut|: {via_classes}");
            if via_semis != via_classes {
                return Err(mismatch("double count differs"));
            }
            println!("ok");
        }
        Cmd::Tables { catalogs } => {
            let cats = catalogs.iter().map(|p| read_catalog(p)).collect::<Result<Vec<_>, _>>()?;
            print!("{}", render_tables(&cats)?);
        }
        Cmd::SplitCensus { catalog } => {
            let cat = read_catalog(&catalog)?;
            if cat.kind != Kind::DoubleMds {
                bail!("split-census needs a dmds catalog");
            }
            let r = layer_splittability_census(&cat.records)?;
            println!("classes: {}", r.entries.len());
            println!("splittable: {}", r.splittable);
            println!("non-splittable with splittable layers: {}", r.exceptional);
            for e in r.entries.iter().filter(|e| !e.splittable && e.layers_splittable) {
                println!("  {}", e.rep.to_hex());
            }
            if r.violations > 0 {
                return Err(mismatch(format!("{} splittable classes with a non-splittable layer", r.violations)));
            }
        }
        Cmd::Construct { n, .. } => {
            let s = construct_nonsplittable(n)?;
            let cycle = nonsplittable_cycle(n)?;
            let kind = classify_set(&s);
            let split = is_splittable(&s)?.splittable;
            let mut layers_ok = true;
            for d in 0..n {
                for v in 0..4 {
                    layers_ok &= is_splittable(&freqcube::hypercube::layer(&s, d, v)?)?.splittable;
                }
            }
            let on_cycle = cycle.iter().all(|p| s.contains_point(p));
            let odd = odd_cycle_color_check(&cycle)?;
            println!("{}", s.to_hex());
            println!("double-MDS: {}", kind.is_double_mds);
            println!("splittable: {split}");
            println!("all layers splittable: {layers_ok}");
            let pts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
            println!("cycle ({}): {}", cycle.len(), pts.join(" "));
            println!("cycle in code: {on_cycle}, colour check: {odd}");
            if !(kind.is_double_mds && !split && layers_ok && on_cycle && odd) {
                return Err(mismatch("construction check failed"));
            }
        }
        Cmd::Testset { n, catalogs, verify, out } => {
            if n != 3 {
                bail!("testset supports n=3 only");
            }
            let cats = catalogs.iter().map(|p| read_catalog(p)).collect::<Result<Vec<_>, _>>()?;
            let uni = cats
                .iter()
                .find(|c| c.kind == Kind::Unitrade && c.n == n)
                .context("no unitrade catalog for this n")?;
            let codes = enumerate_all(n, Kind::DoubleMds)?;
            let special = find_special_unitrades(&uni.records, &codes)?;
            println!("special unitrades: {}", special.len());
            let mut failed = false;
            for (i, d) in special.iter().enumerate() {
                let t = derive_testing_set(d)?;
                println!("D{}: size {} k_D {} hex {}", i + 1, d.d.len(), d.k_d, d.d.to_hex());
                println!("  testing set size {}", t.len());
                if verify {
                    let ok = verify_testing_set(&t, &codes)?;
                    let dmds = cats.iter().find(|c| c.kind == Kind::DoubleMds && c.n == n);
                    let mut round = true;
                    if let Some(cat) = dmds {
                        let tset = &t.points;
                        for r in &cat.records {
                            round &= reconstruct(&t, &r.rep.intersection(tset))? == r.rep;
                        }
                    }
                    println!("  verified over {} codes: {ok}, reconstruction: {round}", codes.len());
                    failed |= !(ok && round);
                }
                if i == 0 {
                    if let Some(path) = &out {
                        std::fs::write(path, t.to_text())?;
                    }
                }
            }
            if failed {
                return Err(mismatch("testing set verification failed"));
            }
        }
        Cmd::Bound { n } => {
            let b = upper_bound(n)?;
            println!("alpha_{n} = {:.15}", b.alpha);
            println!("testing set size = {}", b.bound_bits);
        }
        Cmd::Check { file } => {
            let text = std::fs::read_to_string(&file)?;
            let hex: String = text
                .lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .flat_map(|l| l.split_whitespace())
                .next()
                .unwrap_or_default()
                .to_string();
            let s = CodeSet::from_hex_any(&hex)?;
            let k = classify_set(&s);
            println!("n: {}", s.dim());
            println!("size: {}", s.len());
            println!("double-MDS: {} double-code: {} unitrade: {}", k.is_double_mds, k.is_double_code, k.is_unitrade);
            if k.is_double_code {
                println!("splittable: {}", is_splittable(&s)?.splittable);
                let layer_split = layers(&s)?.iter().all(|l| is_splittable(l).map(|r| r.splittable).unwrap_or(false));
                println!("first-coordinate layers splittable: {layer_split}");
            }
            if s.dim() <= 4 {
                let (rep, g) = canonical_form(&s)?;
                println!("canonical: {} ({})", rep.to_hex(), if rep == s { "is canonical" } else { "not canonical" });
                println!("|Aut| = {}·{} ({})", g.perm_type, g.atop_order, g.aut_order);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.downcast_ref::<Mismatch>().is_some()
                || matches!(e.downcast_ref::<Error>(), Some(Error::Validation(_)));
            ExitCode::from(if validation { 1 } else { 2 })
        }
    }
}
