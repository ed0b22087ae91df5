use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nng_delaunay::geometry::{in_circle, orient2d};
use nng_delaunay::io::{parse_points, parse_triangles, write_triangles};
use nng_delaunay::{PointId, Sign};

fn nngdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nngdt"))
        .args(args)
        .output()
        .expect("failed to start nngdt")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn generate(dir: &Path, dist: &str, n: usize, seed: u64) -> String {
    let p = path(dir, &format!("{dist}-{n}-{seed}.txt"));
    let out = nngdt(&["generate", "--dist", dist, "-n", &n.to_string(), "--seed", &seed.to_string(), "-o", &p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "clustered", 500, 4);
    let b = path(dir.path(), "again.txt");
    assert!(nngdt(&["generate", "--dist", "clustered", "-n", "500", "--seed", "4", "-o", &b]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let small = generate(dir.path(), "uniform-square", 4, 1);
    let pts = parse_points(&fs::read_to_string(small).unwrap()).unwrap();
    assert_eq!(pts.len(), 4);
    assert!(pts.iter().all(|p| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y)));
}

#[test]
fn triangulate_then_verify_every_generator() {
    let dir = tempfile::tempdir().unwrap();
    for dist in ["uniform-square", "clustered", "grid-jitter"] {
        for seed in 0..5 {
            let p = generate(dir.path(), dist, 1000, seed);
            let t = path(dir.path(), "t.txt");
            let out = nngdt(&["triangulate", "-i", &p, "-o", &t, "--seed", &seed.to_string()]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            let out = nngdt(&["verify", "--points", &p, "--triangles", &t]);
            assert!(out.status.success(), "{dist} {seed}: {}", String::from_utf8_lossy(&out.stdout));
        }
    }
}

#[test]
fn triangulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "uniform-square", 3000, 9);
    let mut files = Vec::new();
    for run in 0..2 {
        let t = path(dir.path(), &format!("t{run}.txt"));
        let c = path(dir.path(), &format!("c{run}.csv"));
        let s = path(dir.path(), &format!("s{run}.svg"));
        let out = nngdt(&[
            "triangulate", "-i", &p, "-o", &t, "--seed", "5", "--round-base", "16", "--counters", &c, "--svg", &s,
        ]);
        assert!(out.status.success());
        files.push([t, c, s].map(|f| fs::read(f).unwrap()));
    }
    assert_eq!(files[0], files[1]);
    let csv = String::from_utf8(files[0][1].clone()).unwrap();
    assert!(csv.starts_with("round,phase,"));
    for phase in ["nng-build", "history", "walk", "insert"] {
        assert!(csv.lines().any(|l| l.split(',').nth(1) == Some(phase)), "{phase}");
    }
}

#[test]
fn verify_reports_a_flipped_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "uniform-square", 200, 2);
    let t = path(dir.path(), "t.txt");
    assert!(nngdt(&["triangulate", "-i", &p, "-o", &t]).status.success());
    let points = parse_points(&fs::read_to_string(&p).unwrap()).unwrap();
    let mut tris = parse_triangles(&fs::read_to_string(&t).unwrap(), points.len()).unwrap();

    // Find an interior edge a-b with apexes c (left) and d (right) whose
    // quadrilateral is convex and not cocircular, then flip it to c-d.
    let at = |id: PointId| points[id.index()];
    let mut flipped = false;
    'outer: for i in 0..tris.len() {
        for e in 0..3 {
            let (a, b, c) = (tris[i][e], tris[i][(e + 1) % 3], tris[i][(e + 2) % 3]);
            for j in 0..tris.len() {
                for f in 0..3 {
                    if tris[j][f] == b && tris[j][(f + 1) % 3] == a {
                        let d = tris[j][(f + 2) % 3];
                        let convex = orient2d(at(a), at(d), at(c)) == Sign::Positive
                            && orient2d(at(d), at(b), at(c)) == Sign::Positive;
                        if convex && in_circle(at(a), at(b), at(c), at(d)).unwrap() == Sign::Negative {
                            tris[i] = [a, d, c];
                            tris[j] = [d, b, c];
                            flipped = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    assert!(flipped);
    let bad = path(dir.path(), "bad.txt");
    fs::write(&bad, write_triangles(&tris)).unwrap();
    let out = nngdt(&["verify", "--points", &p, "--triangles", &bad]);
    assert!(!out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("empty-circumcircle"), "{stdout}");
    assert!(stdout.contains("inside circumcircle of triangle"), "{stdout}");
}

#[test]
fn bad_input_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "bad.txt");
    fs::write(&p, "0 0\n1 0\n0 one\n").unwrap();
    let t = path(dir.path(), "t.txt");
    let out = nngdt(&["triangulate", "-i", &p, "-o", &t]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("line 3"), "{err}");

    fs::write(&p, "0 0\n1 1\n2 2\n3 3\n").unwrap();
    let out = nngdt(&["triangulate", "-i", &p, "-o", &t]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("collinear"));

    let out = nngdt(&["triangulate", "-i", &p, "-o", &t, "--round-base", "2"]);
    assert!(!out.status.success());
    let out = nngdt(&["generate", "--dist", "gaussian", "-n", "5"]);
    assert!(!out.status.success());
    let out = nngdt(&["frobnicate"]);
    assert!(!out.status.success());
}

#[test]
fn duplicates_are_dropped_with_a_note() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "dup.txt");
    fs::write(&p, "# square with a repeat\n0 0\n1 0\n1 1\n0 0\n0 1\n").unwrap();
    let t = path(dir.path(), "t.txt");
    let out = nngdt(&["triangulate", "-i", &p, "-o", &t]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("repeats point 1"));
    let tris = fs::read_to_string(&t).unwrap();
    assert_eq!(tris.lines().count(), 2);
    assert!(nngdt(&["verify", "--points", &p, "--triangles", &t]).status.success());
}

#[test]
fn square_svg_has_five_edges() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "sq.txt");
    fs::write(&p, "0 0\n1 0\n1 1\n0 1\n").unwrap();
    let t = path(dir.path(), "t.txt");
    let s = path(dir.path(), "s.svg");
    assert!(nngdt(&["triangulate", "-i", &p, "-o", &t, "--svg", &s]).status.success());
    assert_eq!(fs::read_to_string(&s).unwrap().matches("<line").count(), 5);
}

#[test]
fn bench_and_spread() {
    let out = nngdt(&["bench", "--dist", "grid-jitter", "--sizes", "500,1000", "--seeds", "2"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().next().unwrap().ends_with("wall_ms,work_per_n"));

    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "three.txt");
    fs::write(&p, "0 0\n1 0\n3 0\n").unwrap();
    let out = nngdt(&["spread", "-i", &p]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("spread 3.0\n"));
}
