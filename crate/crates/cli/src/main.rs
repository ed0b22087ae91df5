use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use nng_delaunay::bench::{bench_one, to_csv};
use nng_delaunay::driver::{dedup, run, DEFAULT_ROUND_BASE};
use nng_delaunay::generate::{generate, Distribution2d};
use nng_delaunay::io::{parse_points, parse_triangles, write_points, write_triangles};
use nng_delaunay::nng::compute_spread;
use nng_delaunay::oracle::{brute_delaunay, check_delaunay_property, check_euler, BRUTE_DELAUNAY_CAP};
use nng_delaunay::svg::render_svg;

#[derive(Parser)]
#[command(name = "nngdt", version, about = "Delaunay triangulation with nearest-neighbor-graph point location")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random point set.
    Generate {
        /// uniform-square, clustered or grid-jitter.
        #[arg(long)]
        dist: Distribution2d,
        #[arg(long, short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout if omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Triangulate a point file.
    Triangulate {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Size of the first round.
        #[arg(long, default_value_t = DEFAULT_ROUND_BASE)]
        round_base: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Per-round, per-phase counters as CSV.
        #[arg(long)]
        counters: Option<PathBuf>,
    },
    /// Check a triangle file against its points.
    Verify {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        triangles: PathBuf,
    },
    /// Time and count work over sizes and seeds, as CSV.
    Bench {
        #[arg(long, default_value = "uniform-square")]
        dist: Distribution2d,
        /// Comma-separated point counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Number of seeds per size (seeds 0..k).
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_ROUND_BASE)]
        round_base: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the spread (max over min pairwise distance) of a point file.
    Spread {
        #[arg(long, short)]
        input: PathBuf,
    },
}

fn read_points(path: &Path) -> Result<Vec<nng_delaunay::Point>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_points(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(path) => write(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Returns whether everything checked out.
fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate { dist, n, seed, output } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            emit(output.as_deref(), &write_points(&generate(dist, n, seed)))?;
        }
        Command::Triangulate {
            input,
            output,
            seed,
            round_base,
            svg,
            counters,
        } => {
            let points = read_points(&input)?;
            let result = run(&points, seed, round_base)?;
            for &(index, existing) in &result.dedup.duplicates {
                eprintln!(
                    "note: input point {} repeats point {} and was dropped",
                    index + 1,
                    result.dedup.kept[existing.index()] + 1
                );
            }
            let triangles = result.triangles();
            write(&output, &write_triangles(&triangles))?;
            if let Some(path) = svg {
                write(&path, &render_svg(&result.points, &triangles))?;
            }
            if let Some(path) = counters {
                write(&path, &result.counters.to_csv())?;
            }
        }
        Command::Verify { points, triangles } => {
            let (points, _) = dedup(&read_points(&points)?)?;
            let text = fs::read_to_string(&triangles).with_context(|| format!("reading {}", triangles.display()))?;
            let tris = parse_triangles(&text, points.len()).with_context(|| format!("parsing {}", triangles.display()))?;
            let report = check_delaunay_property(&points, &tris).merge(check_euler(&points, &tris));
            for v in report.violations.iter().take(10) {
                println!("violation: {v}");
            }
            if report.violations.len() > 10 {
                println!("... {} violations in total", report.violations.len());
            }
            if !report.passed {
                return Ok(false);
            }
            if points.len() <= BRUTE_DELAUNAY_CAP {
                let mut ours = tris.clone();
                for t in &mut ours {
                    let m = (0..3).min_by_key(|&i| t[i]).unwrap();
                    *t = [t[m], t[(m + 1) % 3], t[(m + 2) % 3]];
                }
                ours.sort_unstable();
                // Cocircular inputs admit several answers; the property
                // checks above already cover those.
                if ours != brute_delaunay(&points)? {
                    println!("note: differs from the brute-force triangulation (cocircular points)");
                }
            }
            println!("ok: {} points, {} triangles", points.len(), tris.len());
        }
        Command::Bench {
            dist,
            sizes,
            seeds,
            round_base,
            output,
        } => {
            let mut rows = Vec::new();
            for &n in &sizes {
                for seed in 0..seeds {
                    rows.push(bench_one(dist, n, seed, round_base)?);
                }
            }
            emit(output.as_deref(), &to_csv(&rows))?;
        }
        Command::Spread { input } => {
            let (points, _) = dedup(&read_points(&input)?)?;
            let s = compute_spread(&points)?;
            println!("spread {:?}", s.value);
            println!("min_distance {:?}", s.min_distance);
            println!("max_distance {:?}", s.max_distance);
            println!("approximation_factor {:?}", s.approximation_factor);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
