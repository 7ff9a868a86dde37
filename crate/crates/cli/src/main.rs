use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use classpoly::arith::PrimeField;
use classpoly::classgroup::{default_generator_norms, height_bound, polycyclic_presentation};
use classpoly::crt::CrtConfig;
use classpoly::curves::{find_trace_curve, TraceSearchOptions};
use classpoly::pipeline::{
    check_discriminant, cm_construct, hilbert_class_poly, select_usable_primes, CmSign, JobConfig,
};
use classpoly::primeselect::{rank_torsion, CrtPrime, SelectionConfig};
use classpoly::volcano::ModPolyDb;

/// Hilbert class polynomials mod P and CM curves.
///
/// Without a subcommand, computes H_D mod P and prints it as a header line
/// `D <D> P <P> h <h>` followed by `<k> <coefficient>` for k = 0..h.
#[derive(Parser, Debug)]
#[command(name = "classpoly", version, args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// discriminant D < -4
    #[arg(short = 'D', allow_hyphen_values = true, required = true)]
    d: Option<i64>,
    /// modulus P; 0 for coefficients over Z
    #[arg(short = 'P', required = true)]
    modulus: Option<BigUint>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// modular polynomial database (default: the built-in one)
    #[arg(long)]
    phi_db: Option<PathBuf>,
    /// write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    selection: SelectionArgs,
    /// lg P above which the hybrid CRT is used when P < M
    #[arg(long)]
    hybrid_bits: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct SelectionArgs {
    /// stop growing z once S_z holds more than k*b bits
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    /// z grows by a factor 1 + delta
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
}

impl SelectionArgs {
    fn config(&self) -> SelectionConfig {
        SelectionConfig {
            k: self.k,
            delta: self.delta,
            ..SelectionConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Elliptic curve over F_q with End = O_D; prints "A B q N" for y^2 = x^3 + Ax + B.
    Cm {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
        #[arg(short = 'q')]
        q: u64,
        /// `+` for N = q + 1 - t, `-` for N = q + 1 + t
        #[arg(long, default_value = "+", value_parser = parse_sign)]
        sign: CmSign,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Prints the selected CRT primes as "p t v plan ratio".
    SelectPrimes {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
        /// target bits (default: the height bound of H_D)
        #[arg(long)]
        b: Option<u64>,
        #[command(flatten)]
        selection: SelectionArgs,
    },
    /// Prints D and h, then "l r s" for each generator of the presentation.
    Presentation {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
        /// candidate norms in order (default: increasing norm)
        #[arg(long, value_delimiter = ',')]
        norms: Option<Vec<u64>>,
    },
    /// Finds a curve with trace +-t over F_p; prints "j curves_tested".
    TraceSearch {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 't')]
        t: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verifies every modular polynomial in the database.
    PhiCheck {
        #[arg(long)]
        phi_db: Option<PathBuf>,
    },
}

fn parse_sign(s: &str) -> std::result::Result<CmSign, String> {
    match s {
        "+" => Ok(CmSign::Plus),
        "-" => Ok(CmSign::Minus),
        _ => Err(format!("expected + or -, got {s}")),
    }
}

fn phi_check(db: &ModPolyDb) -> Result<()> {
    let mut bad = 0;
    for l in db.levels() {
        match db.check(l) {
            Ok(()) => println!("{l} ok"),
            Err(e) => {
                println!("{l} FAILED: {e}");
                bad += 1;
            }
        }
    }
    if bad > 0 {
        bail!("{bad} modular polynomials failed");
    }
    Ok(())
}

fn run_classpoly(args: RunArgs) -> Result<()> {
    let (Some(d), Some(modulus)) = (args.d, args.modulus) else {
        bail!("-D and -P are required");
    };
    let mut config = JobConfig::new(d, modulus);
    config.jobs = args.jobs.max(1);
    config.seed = args.seed;
    config.phi_db = args.phi_db;
    config.out = args.out.clone();
    config.selection = args.selection.config();
    if let Some(bits) = args.hybrid_bits {
        config.crt = Some(CrtConfig {
            hybrid_bits: bits,
            ..CrtConfig::for_discriminant(d)
        });
    }
    let result = hilbert_class_poly(&config)?;
    let s = &result.stats;
    log::info!(
        "h={} b={} primes={} crt={:?} curves={} vertices={} {:.2}s",
        result.h,
        s.b,
        s.primes,
        s.crt_mode,
        s.curves_tested,
        s.vertices,
        s.seconds
    );
    if args.out.is_none() {
        print!("{}", result.to_text());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let Some(command) = cli.command else {
        return run_classpoly(cli.run);
    };
    match command {
        Command::Cm { d, q, sign, jobs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = cm_construct(d, q, sign, jobs.max(1), &mut rng)?;
            println!("{} {} {} {}", c.a, c.b, c.q, c.order);
        }
        Command::SelectPrimes { d, b, selection } => {
            let db = ModPolyDb::global()?;
            check_discriminant(d, db)?;
            let b = match b {
                Some(b) => b,
                None => height_bound(d)?.b,
            };
            let sel = select_usable_primes(d, b, &selection.config(), db)?;
            for c in &sel.primes {
                println!("{} {} {} {} {:.2}", c.p, c.t, c.v, c.plan.label(), c.plan.ratio());
            }
        }
        Command::Presentation { d, norms } => {
            let order = match norms {
                Some(n) => n,
                None => default_generator_norms(d)?,
            };
            let pres = polycyclic_presentation(d, &order)?;
            println!("{d} {}", pres.class_number);
            for i in 0..pres.norms.len() {
                println!("{} {} {}", pres.norms[i], pres.rel_orders[i], pres.relations[i]);
            }
        }
        Command::TraceSearch { p, t, seed } => {
            let f = PrimeField::new(p)?;
            if t == 0 || (t as u128).pow(2) >= 4 * p as u128 {
                bail!("need 0 < t < 2 sqrt(p)");
            }
            let cp = CrtPrime {
                p,
                t,
                v: 1,
                rho_inv: 1.into(),
                plan: rank_torsion(p, t),
                benefit: (p as f64).log2(),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = find_trace_curve(&f, &cp, &TraceSearchOptions::default(), &mut rng)?;
            println!("{} {}", f.to_u64(r.j), r.curves_tested);
        }
        Command::PhiCheck { phi_db } => match phi_db {
            Some(p) => phi_check(&ModPolyDb::from_file(&p).with_context(|| format!("loading {}", p.display()))?)?,
            None => phi_check(ModPolyDb::global()?)?,
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
