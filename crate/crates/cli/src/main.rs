//! `lattice-tsp`: shortest vectors, tour bounds, scans and Kronecker
//! constants of two-dimensional modular lattices.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 precision cap.

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use lattice_tsp::scan::{run_scan, ScanMode};
use lattice_tsp::table::{table_rows, write_table_csv};
use lattice_tsp_core::error::Error as CoreError;
use lattice_tsp_core::exactint::shortest_vector_oracle;
use lattice_tsp_core::jacobiperron::{convergence_report, jacobi_perron, verify_unimodular, PreciseReal};
use lattice_tsp_core::kronecker::kronecker_tour_bounds;
use lattice_tsp_core::modlattice::ModularLattice;
use lattice_tsp_core::tsp::{
    brute_force_tour, exact_tour, serpentine_tour, tour_bounds, triangle_bounds, write_tour_csv,
    write_tour_svg, TourBounds,
};
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::env;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process;

#[derive(Parser)]
#[command(
    name = "lattice-tsp",
    version,
    about = "Shortest vectors, traveling-salesman tour bounds and Kronecker constants of two-dimensional modular lattices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shortest vector, lambda^2 and the constant f of L_{N,a,b}
    Svec {
        n: i64,
        a: i64,
        b: i64,
        /// Cross-check against the O(N) brute-force oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Tour-length bounds for L_{N,a,b} (refined triangle form with --triangle)
    Bounds {
        n: i64,
        a: i64,
        b: i64,
        /// Use the refined triangle bracket (requires a = 1)
        #[arg(long)]
        triangle: bool,
    },
    /// f_max(N) sweep over all pairs (a,b) for 2 <= N <= max-n
    Scan {
        #[arg(long = "max-n")]
        max_n: i64,
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
        /// Continue from the last complete row of OUT
        #[arg(long)]
        resume: bool,
        /// Sweep only a = 1 (approximation)
        #[arg(long)]
        fast: bool,
    },
    /// Convergent constants for the pair (cbrt(k), cbrt(k^2)) mod 1
    Table1 {
        #[arg(long, default_value_t = 91)]
        k: u64,
        #[arg(long, default_value_t = 16)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a tour over the lattice points as CSV or SVG
    Tour {
        n: i64,
        a: i64,
        b: i64,
        #[arg(long, value_enum, default_value_t = Emit::Csv)]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Provably optimal tour via dynamic programming (N <= 18)
        #[arg(long)]
        exact: bool,
    },
    /// Kronecker tour-length bounds at convergent index i
    Kron {
        #[arg(long, default_value_t = 91)]
        k: u64,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// Cross-check reductions and tour solvers against brute-force oracles
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long = "max-n", default_value_t = 5000)]
        max_n: i64,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Csv,
    Svg,
}

fn main() {
    if let Ok(workers) = env::var("LATTICE_TSP_WORKERS") {
        match workers.parse::<usize>() {
            Ok(w) if w > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build_global()
                    .ok();
            }
            _ => eprintln!("ignoring LATTICE_TSP_WORKERS={workers:?} (want a positive integer)"),
        }
    }
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        process::exit(exit_code(&err));
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::PrecisionCap { .. }) => 4,
        Some(CoreError::Io(_)) => 3,
        Some(_) => 2,
        None if err.downcast_ref::<io::Error>().is_some() => 3,
        None => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Svec { n, a, b, oracle } => cmd_svec(n, a, b, oracle),
        Cmd::Bounds { n, a, b, triangle } => cmd_bounds(n, a, b, triangle),
        Cmd::Scan {
            max_n,
            out,
            resume,
            fast,
        } => cmd_scan(max_n, &out, resume, fast),
        Cmd::Table1 { k, iters, out } => cmd_table1(k, iters, out.as_ref()),
        Cmd::Tour {
            n,
            a,
            b,
            emit,
            out,
            exact,
        } => cmd_tour(n, a, b, emit, out.as_ref(), exact),
        Cmd::Kron { k, i, delta } => cmd_kron(k, i, delta),
        Cmd::OracleCheck { count, max_n, seed } => cmd_oracle_check(count, max_n, seed),
    }
}

fn out_writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(CoreError::from)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_svec(n: i64, a: i64, b: i64, oracle: bool) -> Result<()> {
    let l = ModularLattice::new(n, a, b)?;
    let basis = l.reduced_basis();
    let v = basis.shortest_vector();
    println!("lattice: L_{{{n},{a},{b}}}");
    println!("shortest vector: ({}, {})", v.x, v.y);
    println!("lambda_sq: {}", basis.lambda_sq());
    println!("lambda: {:.6}", l.lambda());
    println!("f: {:.6} (f_sq = {}/{})", l.f_constant(), basis.lambda_sq(), n);
    println!("contains_shortest_vector: {}", l.contains_shortest_vector());
    if oracle {
        let w = shortest_vector_oracle(n, a, b)?;
        let agree = w == v && w.norm_sq() == basis.lambda_sq();
        println!(
            "oracle: ({}, {}) lambda_sq {} [{}]",
            w.x,
            w.y,
            w.norm_sq(),
            if agree { "agree" } else { "MISMATCH" }
        );
        println!("distinct points: {}", l.has_distinct_points());
        if !agree {
            process::exit(1);
        }
    }
    Ok(())
}

fn print_bounds(b: &TourBounds, n: i64, lambda_sq: i128) {
    println!("scale: unit_square (tour length / (N * sqrt(N)))");
    println!("lower: {:.6}", b.lower);
    println!("upper: {:.6}", b.upper);
    println!("lambda: {:.6} (lambda_sq = {lambda_sq}, N = {n})", b.lambda);
    println!("k: {}", b.k);
    println!("f: {:.6}", b.f);
}

fn cmd_bounds(n: i64, a: i64, b: i64, triangle: bool) -> Result<()> {
    let lattice;
    if triangle {
        if a != 1 {
            return Err(CoreError::InvalidParameter(format!(
                "--triangle applies to lattices with a = 1, got a = {a}"
            ))
            .into());
        }
        let tb = triangle_bounds(n, b)?;
        println!("bounds: triangle bracket for L_{{{n},1,{b}}}");
        print_bounds(&tb, n, 1 + (b as i128) * (b as i128));
        lattice = ModularLattice::new(n, 1, b)?;
    } else {
        lattice = ModularLattice::new(n, a, b)?;
        let tb = tour_bounds(&lattice);
        println!("bounds: shortest-distance bracket for L_{{{n},{a},{b}}}");
        print_bounds(&tb, n, lattice.lambda_sq());
    }
    let d = lattice.line_decomposition();
    println!("lines: {} (torus cycles: {})", d.k(), d.torus_cycles);
    Ok(())
}

fn cmd_scan(max_n: i64, out: &Path, resume: bool, fast: bool) -> Result<()> {
    let mode = if fast {
        eprintln!("fast mode: sweeping a = 1 only; maximizers with a != 1 are missed");
        ScanMode::FastRowOne
    } else {
        ScanMode::Full
    };
    let summary = run_scan(out, max_n, resume, mode)?;
    if let Some(from) = summary.resumed_from {
        eprintln!("resumed at N = {from}");
    }
    eprintln!(
        "scan: N=2..{} rows={} pairs={} distinct_lattices={} -> {}",
        summary.max_n,
        summary.rows,
        summary.stats.pairs,
        summary.stats.classes,
        out.display()
    );
    Ok(())
}

fn cmd_table1(k: u64, iters: usize, out: Option<&PathBuf>) -> Result<()> {
    let rows = table_rows(k, iters)?;
    let mut w = out_writer(out)?;
    write_table_csv(&mut w, k, &rows).map_err(CoreError::from)?;
    Ok(())
}

fn cmd_tour(n: i64, a: i64, b: i64, emit: Emit, out: Option<&PathBuf>, exact: bool) -> Result<()> {
    let l = ModularLattice::new(n, a, b)?;
    let points = l.points();
    let (tour, kind) = if exact {
        (exact_tour(&points)?, "exact")
    } else {
        (serpentine_tour(&l), "serpentine")
    };
    let mut w = out_writer(out)?;
    match emit {
        Emit::Csv => write_tour_csv(&mut w, &points, &tour, kind).map_err(CoreError::from)?,
        Emit::Svg => write_tour_svg(&mut w, &points, &tour).map_err(CoreError::from)?,
    }
    drop(w);
    eprintln!(
        "tour: kind={kind} points={} length={:.6} normalized={:.6}",
        points.len(),
        tour.length,
        tour.length / (n as f64 * (n as f64).sqrt())
    );
    Ok(())
}

fn cmd_kron(k: u64, i: usize, delta: f64) -> Result<()> {
    if i == 0 {
        return Err(CoreError::InvalidParameter("--i must be >= 1".into()).into());
    }
    let alpha = PreciseReal::cube_root_frac(k, 1, 192)?;
    let beta = PreciseReal::cube_root_frac(k, 2, 192)?;
    let convergents = jacobi_perron(&alpha, &beta, i)?;
    let conv = convergents.last().expect("i >= 1");
    let bounds = kronecker_tour_bounds(conv, delta)?;
    let report = convergence_report(&alpha, &beta, &convergents);
    let rep = report.last().expect("i >= 1");
    println!("pair: alpha = cbrt({k}) mod 1 = {:.6}, beta = cbrt({k}^2) mod 1 = {:.6}", alpha.to_f64(), beta.to_f64());
    println!("convergent {i}: q={} p={} r={}", conv.q, conv.p, conv.r);
    println!(
        "lambda_sq: {} lambda: {:.6} f: {:.6} (N = {})",
        bounds.lambda_sq, bounds.lambda, bounds.f, bounds.n
    );
    println!(
        "K bounds (L / sqrt(N)): [{:.6}, {:.6}] at delta = {}",
        bounds.lower, bounds.upper, bounds.delta
    );
    println!(
        "errors: |alpha - p/q| = {:.3e}, |beta - r/q| = {:.3e}, delta_hat = {:.4}",
        rep.err_alpha, rep.err_beta, rep.delta_hat
    );
    if bounds.vacuous {
        println!("flag: vacuous range (N^delta <= 5, the lower bound is non-positive)");
    }
    Ok(())
}

fn cmd_oracle_check(count: usize, max_n: i64, seed: u64) -> Result<()> {
    if max_n < 2 {
        return Err(CoreError::InvalidParameter("--max-n must be >= 2".into()).into());
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..count {
        let n = rng.gen_range(2..=max_n);
        let (a, b) = loop {
            let a = rng.gen_range(1..n.max(2));
            let b = rng.gen_range(1..n.max(2));
            if n.gcd(&a).gcd(&b) == 1 {
                break (a, b);
            }
        };
        let l = ModularLattice::new(n, a, b)?;
        let reduced = l.reduced_basis().shortest_vector();
        let oracle = shortest_vector_oracle(n, a, b)?;
        if reduced != oracle || reduced.norm_sq() != oracle.norm_sq() {
            eprintln!("MISMATCH at ({n},{a},{b}): reduction {reduced} vs oracle {oracle}");
            mismatches += 1;
        }
    }
    println!("svp: {count} random lattices with N <= {max_n}, {mismatches} mismatches");

    let mut tour_mismatches = 0usize;
    for _ in 0..20 {
        let pts: Vec<_> = (0..8)
            .map(|_| {
                lattice_tsp_core::exactint::IntVec2::new(rng.gen_range(0..40), rng.gen_range(0..40))
            })
            .collect();
        let dp = exact_tour(&pts)?;
        let bf = brute_force_tour(&pts)?;
        if (dp.length - bf.length).abs() > 1e-9 {
            eprintln!("MISMATCH on tour oracle: dp {} vs brute force {}", dp.length, bf.length);
            tour_mismatches += 1;
        }
    }
    println!("tsp: 20 random 8-point instances, {tour_mismatches} mismatches");

    let alpha = PreciseReal::cube_root_frac(91, 1, 192)?;
    let beta = PreciseReal::cube_root_frac(91, 2, 192)?;
    let conv = jacobi_perron(&alpha, &beta, 16)?;
    let unimodular = verify_unimodular(&conv);
    println!("jacobi-perron: 16 convergent matrices unimodular: {unimodular}");

    if mismatches > 0 || tour_mismatches > 0 || !unimodular {
        process::exit(1);
    }
    Ok(())
}
