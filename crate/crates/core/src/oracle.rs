//! Brute-force oracles and structural checkers.
//!
//! These share the predicates with the main code path but none of its data
//! structures.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{in_circle_ccw, orient2d, Point, PointId, Sign};
use crate::nng::NngGraph;

/// Largest input `brute_delaunay` is meant for (it is quartic).
pub const BRUTE_DELAUNAY_CAP: usize = 250;
/// Largest input `brute_nng` is meant for (it is quadratic).
pub const BRUTE_NNG_CAP: usize = 5000;
/// Up to this many points the empty-circle check compares every triangle
/// against every point; above it, edges are checked locally.
pub const EXHAUSTIVE_CIRCLE_CAP: usize = 3000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.witness)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl OracleReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        OracleReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(mut self, other: OracleReport) -> Self {
        self.violations.extend(other.violations);
        self.passed = self.violations.is_empty();
        self
    }
}

fn check_distinct(points: &[Point]) -> Result<()> {
    let mut seen: HashMap<(u64, u64), usize> = HashMap::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        // +0.0 and -0.0 are the same point.
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        if let Some(&j) = seen.get(&key) {
            return Err(Error::DuplicatePoint {
                point: PointId(i as u32),
                existing: PointId(j as u32),
            });
        }
        seen.insert(key, i);
    }
    Ok(())
}

/// Every triangle whose open circumdisk is empty, with cocircular groups
/// reduced to one triangulation: candidates are taken in sorted order and
/// kept only if they do not overlap an already kept triangle.
pub fn brute_delaunay(points: &[Point]) -> Result<Vec<[PointId; 3]>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints { need: 3, got: n });
    }
    check_distinct(points)?;
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let tri = match orient2d(points[i], points[j], points[k]) {
                    Sign::Positive => [i, j, k],
                    Sign::Negative => [i, k, j],
                    Sign::Zero => continue,
                };
                let [a, b, c] = tri.map(|v| points[v]);
                let empty = (0..n)
                    .filter(|&l| l != i && l != j && l != k)
                    .all(|l| in_circle_ccw(a, b, c, points[l]) != Sign::Positive);
                if empty {
                    candidates.push(tri.map(|v| v as u32));
                }
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::AllCollinear);
    }
    let mut kept: Vec<[u32; 3]> = Vec::new();
    for t in candidates {
        if kept.iter().all(|k| interiors_disjoint(points, k, &t)) {
            kept.push(t);
        }
    }
    let mut out: Vec<[PointId; 3]> = kept.into_iter().map(|t| rotate_min(t).map(PointId)).collect();
    out.sort_unstable();
    Ok(out)
}

fn rotate_min(v: [u32; 3]) -> [u32; 3] {
    let m = (0..3).min_by_key(|&i| v[i]).unwrap();
    [v[m], v[(m + 1) % 3], v[(m + 2) % 3]]
}

/// Two counter-clockwise triangles have disjoint interiors iff the line of
/// some edge of one of them has the other on its closed outer side.
fn interiors_disjoint(points: &[Point], s: &[u32; 3], t: &[u32; 3]) -> bool {
    let separated = |a: &[u32; 3], b: &[u32; 3]| {
        (0..3).any(|e| {
            let (x, y) = (points[a[e] as usize], points[a[(e + 1) % 3] as usize]);
            b.iter().all(|&v| orient2d(x, y, points[v as usize]) != Sign::Positive)
        })
    };
    separated(s, t) || separated(t, s)
}

/// All-pairs nearest neighbors with ties broken by the smaller id.
pub fn brute_nng(points: &[Point], ids: &[PointId]) -> Result<NngGraph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    check_distinct(points)?;
    let nn = (0..n)
        .map(|i| {
            let mut best: Option<(f64, PointId, usize)> = None;
            for j in (0..n).filter(|&j| j != i) {
                let cand = (points[i].dist2(&points[j]), ids[j], j);
                let better = match best {
                    None => true,
                    Some((d, id, _)) => cand.0 < d || (cand.0 == d && cand.1 < id),
                };
                if better {
                    best = Some(cand);
                }
            }
            best.unwrap().2 as u32
        })
        .collect();
    Ok(NngGraph { ids: ids.to_vec(), nn })
}

/// Checks that `triangles` is a triangulation of the convex hull of `points`
/// whose triangles all have empty open circumdisks.
///
/// Above [`EXHAUSTIVE_CIRCLE_CAP`] points the circumdisk test is applied to
/// every interior edge instead; for a valid triangulation, locally Delaunay
/// edges everywhere imply the global property.
pub fn check_delaunay_property(points: &[Point], triangles: &[[PointId; 3]]) -> OracleReport {
    let mut v = Vec::new();
    let n = points.len();
    let mut edges: HashMap<(u32, u32), usize> = HashMap::with_capacity(3 * triangles.len());
    let mut used = vec![false; n];
    for (ti, t) in triangles.iter().enumerate() {
        if t.iter().any(|id| id.index() >= n) {
            v.push(Violation {
                check: "vertex-range",
                witness: format!("triangle {ti} {:?}", t.map(|p| p.0)),
            });
            continue;
        }
        let [a, b, c] = t.map(|id| points[id.index()]);
        if orient2d(a, b, c) != Sign::Positive {
            v.push(Violation {
                check: "orientation",
                witness: format!("triangle {ti} {:?} is not counter-clockwise", t.map(|p| p.0)),
            });
            continue;
        }
        for e in 0..3 {
            used[t[e].index()] = true;
            let key = (t[e].0, t[(e + 1) % 3].0);
            if let Some(other) = edges.insert(key, ti) {
                v.push(Violation {
                    check: "edge-multiplicity",
                    witness: format!("directed edge {key:?} in triangles {other} and {ti}"),
                });
            }
        }
    }
    if !v.is_empty() {
        return OracleReport::from_violations(v);
    }
    if let Some(p) = used.iter().position(|&u| !u) {
        v.push(Violation {
            check: "coverage",
            witness: format!("point {p} is not a vertex of any triangle"),
        });
    }
    for (&(x, y), &ti) in &edges {
        if edges.contains_key(&(y, x)) {
            continue;
        }
        // Boundary edge: must be a hull edge.
        let (px, py) = (points[x as usize], points[y as usize]);
        if let Some(w) = (0..n).find(|&w| orient2d(px, py, points[w]) == Sign::Negative) {
            v.push(Violation {
                check: "hull",
                witness: format!("boundary edge ({x}, {y}) of triangle {ti} has point {w} outside"),
            });
            break;
        }
    }

    let circle = |ti: usize, l: usize| {
        let t = triangles[ti];
        let [a, b, c] = t.map(|id| points[id.index()]);
        in_circle_ccw(a, b, c, points[l]) == Sign::Positive
    };
    if n <= EXHAUSTIVE_CIRCLE_CAP {
        'tri: for (ti, t) in triangles.iter().enumerate() {
            for l in 0..n {
                if !t.iter().any(|id| id.index() == l) && circle(ti, l) {
                    v.push(Violation {
                        check: "empty-circumcircle",
                        witness: format!("point {l} inside circumcircle of triangle {ti} {:?}", t.map(|p| p.0)),
                    });
                    continue 'tri;
                }
            }
        }
    } else {
        for (ti, t) in triangles.iter().enumerate() {
            for e in 0..3 {
                let (x, y) = (t[e].0, t[(e + 1) % 3].0);
                let Some(&other) = edges.get(&(y, x)) else { continue };
                let apex = triangles[other].iter().find(|id| id.0 != x && id.0 != y).unwrap();
                if circle(ti, apex.index()) {
                    v.push(Violation {
                        check: "empty-circumcircle",
                        witness: format!(
                            "point {} inside circumcircle of triangle {ti} {:?}",
                            apex.0,
                            t.map(|p| p.0)
                        ),
                    });
                }
            }
        }
    }
    OracleReport::from_violations(v)
}

/// Number of points on the convex hull boundary (collinear boundary points
/// included), by gift wrapping.
pub fn hull_size(points: &[Point]) -> usize {
    if points.len() < 3 {
        return points.len();
    }
    let start = (0..points.len())
        .min_by(|&a, &b| {
            let (p, q) = (points[a], points[b]);
            p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x))
        })
        .unwrap();
    let mut corners = vec![start];
    let mut cur = start;
    loop {
        let mut next = if cur == 0 { 1 } else { 0 };
        for cand in 0..points.len() {
            if cand == cur {
                continue;
            }
            match orient2d(points[cur], points[next], points[cand]) {
                Sign::Negative => next = cand,
                Sign::Zero if points[cur].dist2(&points[cand]) > points[cur].dist2(&points[next]) => next = cand,
                _ => {}
            }
        }
        if next == start {
            break;
        }
        corners.push(next);
        cur = next;
        if corners.len() > points.len() {
            break;
        }
    }
    if corners.len() < 3 {
        return corners.len();
    }
    let mut on_boundary = vec![false; points.len()];
    for &c in &corners {
        on_boundary[c] = true;
    }
    for k in 0..corners.len() {
        let (a, b) = (points[corners[k]], points[corners[(k + 1) % corners.len()]]);
        for (i, p) in points.iter().enumerate() {
            if !on_boundary[i] && orient2d(a, b, *p) == Sign::Zero && crate::delaunay::strictly_between(a, b, *p) {
                on_boundary[i] = true;
            }
        }
    }
    on_boundary.iter().filter(|&&b| b).count()
}

/// Checks `#triangles = 2n - 2 - h`.
pub fn check_euler(points: &[Point], triangles: &[[PointId; 3]]) -> OracleReport {
    let n = points.len();
    let h = hull_size(points);
    let expected = (2 * n).saturating_sub(2 + h);
    let mut v = Vec::new();
    if triangles.len() != expected {
        v.push(Violation {
            check: "euler",
            witness: format!("n = {n}, h = {h}: expected {expected} triangles, found {}", triangles.len()),
        });
    }
    OracleReport::from_violations(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&p| p.into()).collect()
    }

    fn ids(v: &[[u32; 3]]) -> Vec<[PointId; 3]> {
        v.iter().map(|t| t.map(PointId)).collect()
    }

    #[test]
    fn three_points_one_triangle() {
        let p = pts(&[(0., 0.), (1., 0.), (0., 1.)]);
        assert_eq!(brute_delaunay(&p).unwrap(), ids(&[[0, 1, 2]]));
        let p = pts(&[(0., 0.), (0., 1.), (1., 0.)]);
        assert_eq!(brute_delaunay(&p).unwrap(), ids(&[[0, 2, 1]]));
    }

    #[test]
    fn unit_square_both_diagonals_valid() {
        let p = pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        let t = brute_delaunay(&p).unwrap();
        assert_eq!(t.len(), 2);
        let one = ids(&[[0, 1, 2], [0, 2, 3]]);
        let other = ids(&[[0, 1, 3], [1, 2, 3]]);
        assert!(check_delaunay_property(&p, &one).passed);
        assert!(check_delaunay_property(&p, &other).passed);
        assert!(check_euler(&p, &t).passed);
    }

    #[test]
    fn wrong_diagonal_is_reported() {
        // Kite: the short diagonal (1, 3) is Delaunay.
        let p = pts(&[(0., 0.), (1., -0.3), (2., 0.), (1., 0.3)]);
        let good = brute_delaunay(&p).unwrap();
        assert_eq!(good, ids(&[[0, 1, 3], [1, 2, 3]]));
        let bad = ids(&[[0, 1, 2], [0, 2, 3]]);
        let r = check_delaunay_property(&p, &bad);
        assert!(!r.passed);
        assert_eq!(r.violations[0].check, "empty-circumcircle");
        assert!(r.violations[0].witness.contains("point"));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(brute_delaunay(&pts(&[(0., 0.), (1., 1.)])), Err(Error::TooFewPoints { .. })));
        assert!(matches!(
            brute_delaunay(&pts(&[(0., 0.), (1., 1.), (2., 2.)])),
            Err(Error::AllCollinear)
        ));
        assert!(matches!(
            brute_delaunay(&pts(&[(0., 0.), (1., 0.), (0., 0.)])),
            Err(Error::DuplicatePoint { .. })
        ));
        assert!(brute_nng(&pts(&[(0., 0.), (0., 0.)]), &[PointId(0), PointId(1)]).is_err());
    }

    #[test]
    fn brute_nng_examples() {
        let p = pts(&[(0., 0.), (1., 0.), (5., 0.)]);
        let g = brute_nng(&p, &[PointId(0), PointId(1), PointId(2)]).unwrap();
        assert_eq!(g.nn, vec![1, 0, 1]);
        let p = pts(&[(0., 0.), (1., 0.), (-1., 0.)]);
        let g = brute_nng(&p, &[PointId(0), PointId(1), PointId(2)]).unwrap();
        assert_eq!(g.nn[0], 1);
    }

    #[test]
    fn euler_examples() {
        let square = pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        assert_eq!(hull_size(&square), 4);
        assert!(check_euler(&square, &ids(&[[0, 1, 2], [0, 2, 3]])).passed);
        let fan = pts(&[(0., 0.), (3., 0.), (0., 3.), (1., 1.)]);
        assert_eq!(hull_size(&fan), 3);
        let t = brute_delaunay(&fan).unwrap();
        assert_eq!(t.len(), 3);
        assert!(check_euler(&fan, &t).passed);
        assert!(!check_euler(&fan, &t[..2]).passed);
    }

    #[test]
    fn hull_counts_collinear_boundary_points() {
        let p = pts(&[(0., 0.), (1., 0.), (2., 0.), (2., 2.), (0., 2.), (1., 1.)]);
        assert_eq!(hull_size(&p), 5);
        let t = brute_delaunay(&p).unwrap();
        assert!(check_euler(&p, &t).passed);
        assert!(check_delaunay_property(&p, &t).passed);
    }

    #[test]
    fn missing_triangle_breaks_the_hull() {
        let p = pts(&[(0., 0.), (3., 0.), (0., 3.), (1., 1.)]);
        let t = brute_delaunay(&p).unwrap();
        let r = check_delaunay_property(&p, &t[1..]);
        assert!(!r.passed);
    }

    #[test]
    fn brute_delaunay_random_passes_checks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p: Vec<Point> = (0..40).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        let t = brute_delaunay(&p).unwrap();
        assert!(check_delaunay_property(&p, &t).passed);
        assert!(check_euler(&p, &t).passed);
    }
}
