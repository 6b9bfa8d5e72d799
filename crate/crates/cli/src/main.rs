//! molscope: enumeration, classification and exact counting of mutually
//! orthogonal latin squares of small order.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use molscope::counting::{self, KnownCount};
use molscope::fixtures;
use molscope::io;
use molscope::latin::{count_distinct_pairs, LatinSquare};
use molscope::mols::MolsList;
use molscope::oracle;
use molscope::plex::{self, Profile};
use molscope::random::{random_latin_square, SplitMix64};
use molscope::species;
use num_bigint::BigInt;
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "molscope", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-square report: transversals, mates, symmetry, substructures.
    Analyze {
        /// Square file (n lines of n symbols; '#' comments allowed).
        file: PathBuf,
        /// Skip the minimum-maximal-family statistic (alpha).
        #[arg(long)]
        no_alpha: bool,
    },
    /// Count (and optionally emit) the orthogonal mates with natural first
    /// row.
    Mates {
        file: PathBuf,
        /// Print the mates themselves.
        #[arg(long)]
        emit: bool,
        /// Stop after this many mates when emitting.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Count the p-plexes of a square or MOLS file.
    Plexes {
        file: PathBuf,
        #[arg(short, default_value = "1")]
        p: usize,
    },
    /// Count the p-partitions of a square or MOLS file.
    Partitions {
        file: PathBuf,
        #[arg(short, default_value = "1")]
        p: usize,
    },
    /// Emit every extension of a MOLS file by one more square.
    Extend {
        file: PathBuf,
        /// Print whole extended lists instead of just the new squares.
        #[arg(long)]
        full: bool,
    },
    /// Report whether a MOLS file is maximal.
    Maximal { file: PathBuf },
    /// Run the census of one order and verify it against the embedded
    /// expected values.
    Census(CensusArgs),
    /// Exact counting identities.
    Count(CountArgs),
    /// Check the embedded order-10 triple.
    VerifyOrder10,
    /// Compare the bit-parallel search against the exact-cover solver.
    BenchOracle {
        #[arg(short, default_value = "8")]
        n: usize,
        #[arg(long, default_value = "50")]
        count: usize,
        #[arg(long, default_value = "12345")]
        seed: u64,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(short)]
    n: usize,
    /// Largest set size to build (default: n - 1).
    #[arg(long)]
    kmax: Option<usize>,
    /// Allow the long-running order-8 census.
    #[arg(long)]
    extended: bool,
    /// Results directory.
    #[arg(long, default_value = "census")]
    out: PathBuf,
    /// Worker threads (default: MOLSCOPE_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CountArgs {
    /// Which identity to evaluate: switch, reps or aspects.
    #[arg(long)]
    theorem: Option<String>,
    /// Mate statistics for a whole order instead of a theorem.
    #[arg(long)]
    stats: bool,
    #[arg(short)]
    n: Option<usize>,
    #[arg(short)]
    k: Option<usize>,
    /// Known count of reduced sets.
    #[arg(long)]
    rs: Option<String>,
    /// Known count of reduced lists.
    #[arg(long)]
    rl: Option<String>,
    /// Known count of all lists.
    #[arg(long)]
    al: Option<String>,
    /// Known count of all sets.
    #[arg(long = "as")]
    r#as: Option<String>,
    /// Autoparatopism group orders, comma separated.
    #[arg(long)]
    par: Option<String>,
    /// File with one group order per line.
    #[arg(long)]
    reps_file: Option<PathBuf>,
    /// MOLS file holding a pair, for the aspect-multiplicity identity.
    #[arg(long)]
    mols: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn threads_or_default(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("MOLSCOPE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

fn read_square(path: &PathBuf) -> Result<LatinSquare> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(io::parse_square(&text)?)
}

fn read_mols(path: &PathBuf) -> Result<MolsList> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(io::parse_mols(&text)?)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Analyze { file, no_alpha } => analyze(&file, no_alpha),
        Command::Mates { file, emit, limit } => mates(&file, emit, limit),
        Command::Plexes { file, p } => plexes(&file, p),
        Command::Partitions { file, p } => partitions(&file, p),
        Command::Extend { file, full } => extend(&file, full),
        Command::Maximal { file } => maximal(&file),
        Command::Census(args) => {
            let threads = threads_or_default(args.threads);
            let outcome = molscope_cli::runner::run_census(
                args.n,
                args.kmax,
                args.extended,
                &args.out,
                threads,
            )?;
            for (name, ok) in &outcome.checks {
                println!("{}: {name}", if *ok { "PASS" } else { "FAIL" });
            }
            if outcome.failures > 0 {
                bail!(
                    "{} checks failed against the expected values",
                    outcome.failures
                );
            }
            println!("census n={}: all checks passed", args.n);
            Ok(())
        }
        Command::Count(args) => count(&args),
        Command::VerifyOrder10 => verify_order10(),
        Command::BenchOracle { n, count, seed } => bench_oracle(n, count, seed),
    }
}

fn analyze(file: &PathBuf, no_alpha: bool) -> Result<()> {
    let square = read_square(file)?;
    let n = square.order();
    let cat = plex::enumerate_plexes(&Profile::for_square(&square), 1)?;
    let transversals = cat.len() as u64;
    let theta = plex::count_partitions(&cat, 1)?;
    let alpha = if no_alpha || transversals == 0 {
        None
    } else {
        Some(plex::alpha(&square)?)
    };
    let (_, counts) = species::min_reduced_member(&square);
    let sub3 = if n >= 6 {
        Some(square.count_subsquares(3)?)
    } else {
        None
    };
    print!(
        "order={n} transversals={transversals} theta={theta} alpha={}",
        alpha.map_or_else(|| "-".into(), |a| a.to_string())
    );
    print!(" intercalates={}", square.count_intercalates());
    if let Some(s3) = sub3 {
        print!(" subsquares3={s3}");
    }
    println!(
        " par={} atp={} rigid={}",
        counts.par,
        counts.atp,
        counts.par == 1
    );
    Ok(())
}

fn mates(file: &PathBuf, emit: bool, limit: Option<u64>) -> Result<()> {
    let square = read_square(file)?;
    let list = MolsList::single(square.clone());
    if !emit {
        println!("theta={}", list.extension_count()?);
        return Ok(());
    }
    let mut shown = 0u64;
    list.for_each_extension(|ext| {
        let mate = ext.squares().last().expect("extension appends a square");
        assert!(molscope::latin::are_orthogonal(&square, mate));
        println!("# mate {shown}");
        print!("{}", io::format_square(mate));
        println!();
        shown += 1;
        if limit.is_some_and(|l| shown >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    println!("# emitted {shown} mates");
    Ok(())
}

fn plexes(file: &PathBuf, p: usize) -> Result<()> {
    let mols = read_mols(file)?;
    let count = plex::count_plexes(&mols.profile()?, p)?;
    println!("plexes p={p} count={count}");
    Ok(())
}

fn partitions(file: &PathBuf, p: usize) -> Result<()> {
    let mols = read_mols(file)?;
    let cat = plex::enumerate_plexes(&mols.profile()?, p)?;
    let count = plex::count_partitions(&cat, p)?;
    println!("partitions p={p} count={count}");
    Ok(())
}

fn extend(file: &PathBuf, full: bool) -> Result<()> {
    let mols = read_mols(file)?;
    let mut count = 0u64;
    mols.for_each_extension(|ext| {
        println!("# extension {count}");
        if full {
            print!("{}", io::format_mols(&ext));
        } else {
            print!(
                "{}",
                io::format_square(ext.squares().last().expect("appended"))
            );
        }
        println!();
        count += 1;
        ControlFlow::Continue(())
    })?;
    println!("# {count} extensions");
    Ok(())
}

fn maximal(file: &PathBuf) -> Result<()> {
    let mols = read_mols(file)?;
    let count = mols.extension_count()?;
    if count == 0 {
        println!("MAXIMAL");
    } else {
        println!("EXTENDABLE extensions={count}");
    }
    Ok(())
}

fn count(args: &CountArgs) -> Result<()> {
    if args.stats {
        let n = args.n.context("--stats needs -n")?;
        let threads = threads_or_default(args.threads);
        let catalogue = molscope::census::generate_species_reps(n, threads)?;
        let reps: Vec<(u64, BigInt)> = catalogue
            .species
            .iter()
            .map(|s| (s.theta, s.par.clone()))
            .collect();
        let (p_mate, e_theta) = counting::random_ls_stats(n, &reps)?;
        println!("{p_mate} {e_theta}");
        return Ok(());
    }
    match args.theorem.as_deref() {
        Some("switch") => {
            let n = args.n.context("switch needs -n")?;
            let k = args.k.context("switch needs -k")?;
            let known = if let Some(v) = &args.rs {
                KnownCount::ReducedSets(v.parse()?)
            } else if let Some(v) = &args.rl {
                KnownCount::ReducedLists(v.parse()?)
            } else if let Some(v) = &args.al {
                KnownCount::AllLists(v.parse()?)
            } else if let Some(v) = &args.r#as {
                KnownCount::AllSets(v.parse()?)
            } else {
                bail!("switch needs one of --rs/--rl/--al/--as");
            };
            let quad = counting::switch_counts(n, k, known)?;
            println!(
                "RS={} RL={} AL={} AS={}",
                quad.reduced_sets, quad.reduced_lists, quad.all_lists, quad.all_sets
            );
        }
        Some("reps") => {
            let n = args.n.context("reps needs -n")?;
            let k = args.k.context("reps needs -k")?;
            let mut pars: Vec<BigInt> = Vec::new();
            if let Some(csv) = &args.par {
                for tok in csv.split(',') {
                    pars.push(tok.trim().parse()?);
                }
            }
            if let Some(path) = &args.reps_file {
                for line in std::fs::read_to_string(path)?.lines() {
                    let line = line.trim();
                    if !line.is_empty() && !line.starts_with('#') {
                        pars.push(line.parse()?);
                    }
                }
            }
            if pars.is_empty() {
                bail!("reps needs --par or --reps-file");
            }
            println!("{}", counting::reduced_sets_from_reps(n, k, &pars)?);
        }
        Some("aspects") => {
            let path = args.mols.as_ref().context("aspects needs --mols")?;
            let pair = read_mols(path)?;
            if pair.len() != 2 {
                bail!("aspect multiplicity is defined for pairs");
            }
            println!("{}", counting::aspect_multiplicity(&pair));
        }
        Some(other) => bail!("unknown theorem {other:?}; use switch, reps or aspects"),
        None => bail!("nothing to do; pass --theorem or --stats"),
    }
    Ok(())
}

fn verify_order10() -> Result<()> {
    let a = fixtures::order10_a();
    let b = fixtures::order10_b();
    let c = fixtures::order10_c();
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {name}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    check("A orthogonal to B", molscope::latin::are_orthogonal(&a, &b));
    check("A orthogonal to C", molscope::latin::are_orthogonal(&a, &c));
    check(
        "B/C overlay gives 91 distinct pairs",
        count_distinct_pairs(&b, &c)? == 91,
    );

    // Duplicated overlay pairs only involve symbols 7, 8, 9 of C.
    let n = 10;
    let mut seen = vec![0u32; n * n];
    for i in 0..n * n {
        let code = b.cells()[i] as usize * n + c.cells()[i] as usize;
        seen[code] += 1;
    }
    let dup_ok = (0..n * n).all(|code| seen[code] <= 1 || code % n >= 7);
    check("duplicated pairs confined to symbols 7-9 of C", dup_ok);

    let pair = MolsList::new(vec![a.clone(), b.clone()])?;
    // The overlay argument: the cells where C takes symbol t < 7 are seven
    // pairwise disjoint common transversals of A and B. The printed pair
    // has 14 common transversals in total.
    let commons = pair.common_transversals()?;
    check(
        "A and B have 14 common transversals in total",
        commons.len() == 14,
    );
    check(
        "the exact-cover engine agrees on the count",
        oracle::transversal_instance(&pair).count_solutions() == 14,
    );
    check(
        "the largest disjoint family has 7 transversals",
        pair.max_disjoint_common_transversals()? == 7,
    );
    let c_classes_disjoint = (0..7u8).all(|t| {
        let cells: Vec<usize> = (0..100).filter(|&i| c.cells()[i] == t).collect();
        let mut a_syms = 0u16;
        let mut b_syms = 0u16;
        for &i in &cells {
            a_syms |= 1 << a.cells()[i];
            b_syms |= 1 << b.cells()[i];
        }
        a_syms == 0x3ff && b_syms == 0x3ff
    });
    check(
        "C's symbol classes 0..6 are common transversals of A,B",
        c_classes_disjoint,
    );
    check("no triple extends the A,B pair", pair.is_maximal()?);

    let sigma = fixtures::order10_automorphism();
    check(
        "A admits (0)(123)(456)(789)",
        fixtures::has_automorphism(&a, &sigma),
    );
    check(
        "B admits (0)(123)(456)(789)",
        fixtures::has_automorphism(&b, &sigma),
    );
    check(
        "C admits (0)(123)(456)(789)",
        fixtures::has_automorphism(&c, &sigma),
    );

    if !all_ok {
        bail!("order-10 verification failed");
    }
    Ok(())
}

fn bench_oracle(n: usize, count: usize, seed: u64) -> Result<()> {
    let mut rng = SplitMix64::new(seed);
    let squares: Vec<LatinSquare> = (0..count)
        .map(|_| random_latin_square(n, &mut rng))
        .collect();

    let start = Instant::now();
    let mut plex_total = 0u64;
    for sq in &squares {
        let cat = plex::enumerate_plexes(&Profile::for_square(sq), 1)?;
        plex_total += plex::count_partitions(&cat, 1)?;
    }
    let plex_time = start.elapsed();

    let start = Instant::now();
    let mut dlx_total = 0u64;
    for sq in &squares {
        let m = MolsList::single(sq.clone());
        let cat = plex::enumerate_plexes(&Profile::for_square(sq), 1)?;
        let inst = oracle::partition_instance(cat.plexes(), n);
        let tr = oracle::transversal_instance(&m);
        assert_eq!(tr.count_solutions() as usize, cat.len());
        dlx_total += inst.count_solutions();
    }
    let dlx_time = start.elapsed();

    if plex_total != dlx_total {
        bail!("partition counts disagree: {plex_total} vs {dlx_total}");
    }
    println!(
        "n={n} squares={count} partitions={plex_total} plex={plex_time:?} dlx={dlx_time:?} ratio={:.2}",
        dlx_time.as_secs_f64() / plex_time.as_secs_f64().max(1e-9)
    );
    Ok(())
}
