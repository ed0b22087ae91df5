//! Instrumented benchmark runs.

use std::fmt::Write;
use std::time::Instant;

use crate::driver::run;
use crate::error::Result;
use crate::generate::{generate, Distribution2d};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub dist: Distribution2d,
    pub n: usize,
    pub seed: u64,
    pub c: usize,
    pub rounds: usize,
    pub nng_builds: usize,
    pub nng_input: usize,
    pub history_visits: u64,
    pub walk_steps: u64,
    pub conflict_tests: u64,
    pub cavity_triangles: u64,
    pub wall_ms: f64,
}

impl BenchRow {
    /// History visits, walk steps and conflict tests per point.
    pub fn work_per_point(&self) -> f64 {
        (self.history_visits + self.walk_steps + self.conflict_tests) as f64 / self.n as f64
    }
}

/// Generates `n` points with `seed` and triangulates them once.
pub fn bench_one(dist: Distribution2d, n: usize, seed: u64, c: usize) -> Result<BenchRow> {
    let points = generate(dist, n, seed);
    let start = Instant::now();
    let r = run(&points, seed, c)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let total = r.counters.total();
    Ok(BenchRow {
        dist,
        n,
        seed,
        c,
        rounds: r.plan.m(),
        nng_builds: r.counters.nng_builds(),
        nng_input: r.counters.rounds.iter().flat_map(|rc| &rc.nng_builds).map(|b| b.size).sum(),
        history_visits: total.history_visits,
        walk_steps: total.walk_steps,
        conflict_tests: total.conflict_tests,
        cavity_triangles: total.cavity_triangles,
        wall_ms,
    })
}

pub const CSV_HEADER: &str = "dist,n,seed,c,rounds,nng_builds,nng_input,history_visits,walk_steps,conflict_tests,cavity_triangles,wall_ms,work_per_n";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{:.3},{:.4}",
            r.dist,
            r.n,
            r.seed,
            r.c,
            r.rounds,
            r.nng_builds,
            r.nng_input,
            r.history_visits,
            r.walk_steps,
            r.conflict_tests,
            r.cavity_triangles,
            r.wall_ms,
            r.work_per_point()
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_one_row_per_run() {
        let rows: Vec<BenchRow> = (0..2)
            .map(|s| bench_one(Distribution2d::UniformSquare, 500, s, 32).unwrap())
            .collect();
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().all(|l| l.split(',').count() == 13));
        assert!(rows.iter().all(|r| r.work_per_point() > 1.0));
    }
}
