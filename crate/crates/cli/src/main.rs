use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use postman_core::classical::{
    check_bcpp_solution, check_mcpp_solution, solve_dcpp, solve_mcpp_edges, solve_ucpp, CppSolution,
};
use postman_core::decomp::{build_cut_decomposition, check_cut_properties};
use postman_core::dp::{solve_bcpp_with, BcppOptions};
use postman_core::gen::{gen_bcpp, gen_mcpp};
use postman_core::graph::{Demand, UndirectedMultigraph};
use postman_core::io::{parse_instance, parse_solution, write_decomposition, write_instance, write_solution, FormatError, Instance};
use postman_core::karc::solve_karc;
use postman_core::oracle::{oracle_bcpp, oracle_mcpp};
use postman_core::troad::{find_troad, small_cuts_reference};
use postman_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "postman", version, about = "Chinese Postman solvers for mixed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        #[arg(long, value_enum, default_value_t = Alg::Auto)]
        alg: Alg,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a closed walk.
        #[arg(long)]
        walk: bool,
        /// Use the decomposition DP even when a road exists (bcpp only).
        #[arg(long)]
        force_dp: bool,
        /// Largest edge count accepted by the edge-enumeration algorithm.
        #[arg(long, default_value_t = 20)]
        max_edges: usize,
    },
    /// Check a solution file against an instance file.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        solution: PathBuf,
    },
    /// Write a seeded random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        arcs: usize,
        /// Number of unit demands (bcpp).
        #[arg(long, default_value_t = 0)]
        p: u64,
        #[arg(long)]
        max_weight: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the small-cut decomposition of a bcpp instance.
    Decompose {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Run a seeded cross-check suite.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Alg {
    /// ucpp or dcpp for pure graphs, bcpp for demand instances, else arcs.
    Auto,
    Ucpp,
    Dcpp,
    Edges,
    Arcs,
    Bcpp,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Mcpp,
    Bcpp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Mixed instances: arc algorithm, edge algorithm and oracle agree.
    Small,
    /// Road existence against small-cut enumeration.
    Duality,
    /// Decomposition properties on balanced instances.
    Decomp,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge(_) => 3,
            Error::WrongKind { .. } | Error::InvalidParameter(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(inst: &Instance, alg: Alg, force_dp: bool, max_edges: usize) -> Result<CppSolution, Failure> {
    match inst {
        Instance::Bcpp(g, t) => match alg {
            Alg::Auto | Alg::Bcpp => Ok(solve_bcpp_with(g, t, BcppOptions { force_dp })?.solution),
            Alg::Oracle => Ok(oracle_bcpp(g, t)?),
            _ => Err(Failure::usage("bcpp instances take --alg auto, bcpp or oracle")),
        },
        Instance::Mcpp(g) => {
            let alg = match alg {
                Alg::Auto if g.arcs().is_empty() => Alg::Ucpp,
                Alg::Auto if g.edges().is_empty() => Alg::Dcpp,
                Alg::Auto => Alg::Arcs,
                other => other,
            };
            Ok(match alg {
                Alg::Ucpp => solve_ucpp(g)?,
                Alg::Dcpp => solve_dcpp(g)?,
                Alg::Edges => {
                    if g.edges().len() > max_edges {
                        return Err(Failure {
                            code: 3,
                            message: format!("{} edges exceed --max-edges {max_edges}", g.edges().len()),
                        });
                    }
                    solve_mcpp_edges(g)?
                }
                Alg::Arcs => solve_karc(g)?,
                Alg::Oracle => oracle_mcpp(g)?,
                Alg::Bcpp => return Err(Failure::usage("--alg bcpp needs a bcpp instance")),
                Alg::Auto => unreachable!("resolved above"),
            })
        }
    }
}

fn verify(inst: &Instance, sol: &CppSolution) -> Result<(), String> {
    match inst {
        Instance::Mcpp(g) => check_mcpp_solution(g, sol),
        Instance::Bcpp(g, t) => check_bcpp_solution(g, t, sol),
    }
}

fn decompose(inst: &Instance) -> Result<String, Failure> {
    let Instance::Bcpp(g, t) = inst else {
        return Err(Failure::usage("decompose needs a bcpp instance"));
    };
    match build_cut_decomposition(g, t) {
        Some(cd) => Ok(write_decomposition(g, &cd)),
        None => Ok("# a road exists; the small-cut union is empty\ncprime:\nfcut:\n".into()),
    }
}

/// Runs `check` on every index in `0..count` over `jobs` threads and
/// returns the failures in index order.
fn run_parallel<F>(count: usize, jobs: usize, check: F) -> Vec<(usize, String)>
where
    F: Fn(usize) -> Result<(), String> + Sync,
{
    let jobs = jobs.clamp(1, count.max(1));
    let mut failures: Vec<(usize, String)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let check = &check;
                s.spawn(move || {
                    (j..count).step_by(jobs).filter_map(|i| check(i).err().map(|e| (i, e))).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    });
    failures.sort();
    failures
}

fn bench_small(i: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
    let n = rng.random_range(3..=6usize);
    let arcs = rng.random_range(0..=3usize);
    let links = rng.random_range((n - 1).max(arcs)..=(n * (n - 1) / 2).min(9));
    let g = gen_mcpp(n, links - arcs, arcs, 3, rng.random()).map_err(|e| e.to_string())?;
    let oracle = oracle_mcpp(&g).map_err(|e| e.to_string())?.weight;
    let arcs = solve_karc(&g).map_err(|e| e.to_string())?.weight;
    let edges = solve_mcpp_edges(&g).map_err(|e| e.to_string())?.weight;
    if arcs != oracle || edges != oracle {
        return Err(format!("arcs {arcs}, edges {edges}, oracle {oracle}"));
    }
    Ok(())
}

fn bench_duality(i: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
    let n = rng.random_range(2..=6usize);
    let mut h = UndirectedMultigraph::new(n);
    for _ in 0..rng.random_range(1..=6) {
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        h.add(u, v, rng.random_range(1..=2));
    }
    let mut t = vec![0i64; n];
    for _ in 0..rng.random_range(1..=4) {
        let s = rng.random_range(0..n);
        t[s] += 1;
        t[(s + rng.random_range(1..n)) % n] -= 1;
    }
    let t = Demand::new(t);
    let road = find_troad(&h, &t).is_some();
    let cuts = small_cuts_reference(&h, &t).len();
    if road != (cuts == 0) {
        return Err(format!("road {road} with {cuts} small cuts"));
    }
    Ok(())
}

fn bench_decomp(i: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
    let n = rng.random_range(2..=7usize);
    let extra = rng.random_range(0..=((n * (n - 1) / 2).min(9) - (n - 1)).min(3));
    let (g, t) = gen_bcpp(n, n - 1 + extra, rng.random_range(1..=4), 4, rng.random()).map_err(|e| e.to_string())?;
    if let Some(cd) = build_cut_decomposition(&g, &t) {
        check_cut_properties(&g, &cd)?;
    }
    Ok(())
}

fn bench(suite: Suite, jobs: usize, count: usize, seed: u64) -> Result<(), Failure> {
    let start = Instant::now();
    let check: fn(usize, u64) -> Result<(), String> = match suite {
        Suite::Small => bench_small,
        Suite::Duality => bench_duality,
        Suite::Decomp => bench_decomp,
    };
    let failures = run_parallel(count, jobs, |i| check(i, seed));
    for (i, reason) in &failures {
        println!("instance {i}: {reason}");
    }
    println!("{} of {count} passed in {:.2}s", count - failures.len(), start.elapsed().as_secs_f64());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{} instances failed", failures.len())))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { alg, input, output, walk, force_dp, max_edges } => {
            let inst = parse_instance(&read(&input)?)?;
            let mut sol = solve(&inst, alg, force_dp, max_edges)?;
            if walk {
                sol = sol.with_walk()?;
            }
            emit(output.as_deref(), &write_solution(&sol))
        }
        Command::Verify { input, solution } => {
            let inst = parse_instance(&read(&input)?)?;
            let sol = parse_solution(&read(&solution)?, inst.graph().n())?;
            verify(&inst, &sol).map_err(Failure::invalid)?;
            println!("valid");
            Ok(())
        }
        Command::Gen { kind, n, edges, arcs, p, max_weight, seed, output } => {
            let inst = match kind {
                Kind::Mcpp => Instance::Mcpp(gen_mcpp(n, edges, arcs, max_weight, seed)?),
                Kind::Bcpp => {
                    let (g, t) = gen_bcpp(n, edges, p, max_weight, seed)?;
                    Instance::Bcpp(g, t)
                }
            };
            emit(output.as_deref(), &write_instance(&inst))
        }
        Command::Decompose { input } => {
            let inst = parse_instance(&read(&input)?)?;
            print!("{}", decompose(&inst)?);
            Ok(())
        }
        Command::Bench { suite, jobs, count, seed } => bench(suite, jobs, count, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
