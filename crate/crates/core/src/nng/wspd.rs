//! Well-separated pair decomposition on a compressed quadtree.

use crate::error::{Error, Result};
use crate::nng::quadtree::{CompressedQuadtree, NodeKind};

pub const DEFAULT_SEPARATION: f64 = 2.5;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct WspdPair {
    pub a: u32,
    pub b: u32,
    pub separation: f64,
}

fn well_separated(tree: &CompressedQuadtree, a: usize, b: usize, s: f64) -> bool {
    let (na, nb) = (&tree.nodes[a], &tree.nodes[b]);
    na.box_distance(nb) >= s * na.radius().max(nb.radius())
}

/// Decomposes all point pairs of `tree` into well-separated node pairs with
/// separation `s > 2`.
///
/// Pairs are found by the usual split recursion: for every node, each pair of
/// its children is refined by splitting the side with the larger radius until
/// the two sides are well separated.
pub fn compute_wspd(tree: &CompressedQuadtree, s: f64) -> Result<Vec<WspdPair>> {
    if s.is_nan() || s <= 2.0 {
        return Err(Error::InvalidParameter(format!("separation must exceed 2, got {s}")));
    }
    let mut out = Vec::new();
    let mut work: Vec<(usize, usize)> = Vec::new();
    for node in &tree.nodes {
        let kids = node.children();
        for i in kids.clone() {
            for j in i + 1..kids.end {
                work.push((i, j));
            }
        }
        while let Some((a, b)) = work.pop() {
            if well_separated(tree, a, b, s) {
                out.push(WspdPair {
                    a: a as u32,
                    b: b as u32,
                    separation: s,
                });
                continue;
            }
            let (na, nb) = (&tree.nodes[a], &tree.nodes[b]);
            let split_a = match (na.kind == NodeKind::Point, nb.kind == NodeKind::Point) {
                (false, true) => true,
                (true, false) => false,
                (false, false) => na.radius() >= nb.radius(),
                // Two distinct points are always separated; equal points have
                // distance and radius zero and are caught above.
                (true, true) => unreachable!("point pairs are well separated"),
            };
            if split_a {
                work.extend(na.children().map(|c| (c, b)));
            } else {
                work.extend(nb.children().map(|c| (a, c)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{quantize, Point};
    use crate::nng::morton::{morton_key, radix_sort};
    use crate::nng::quadtree::build_compressed_quadtree;

    fn tree_of(points: &[Point], bits: u32) -> CompressedQuadtree {
        let q = quantize(points, bits).unwrap();
        let keys: Vec<_> = q.cells.iter().map(|&(x, y)| morton_key(x, y, bits).unwrap()).collect();
        let order = radix_sort(&keys);
        build_compressed_quadtree(points, &keys, &order).unwrap()
    }

    /// Counts how often each unordered point pair is covered and checks the
    /// separation of every pair on true coordinates.
    fn check(points: &[Point], tree: &CompressedQuadtree, pairs: &[WspdPair]) {
        let n = points.len();
        let mut cover = vec![0u32; n * n];
        for p in pairs {
            let (na, nb) = (&tree.nodes[p.a as usize], &tree.nodes[p.b as usize]);
            assert!(na.box_distance(nb) >= p.separation * na.radius().max(nb.radius()));
            for &i in tree.points_of(p.a as usize) {
                for &j in tree.points_of(p.b as usize) {
                    let (i, j) = (i.min(j) as usize, i.max(j) as usize);
                    cover[i * n + j] += 1;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(cover[i * n + j], 1, "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn two_points_one_pair() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        let t = tree_of(&pts, 3);
        let pairs = compute_wspd(&t, 2.5).unwrap();
        assert_eq!(pairs.len(), 1);
        check(&pts, &t, &pairs);
    }

    #[test]
    fn two_clusters() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(0.0, 0.1),
            Point::new(10.0, 0.0),
            Point::new(10.0, 0.1),
        ];
        let t = tree_of(&pts, 4);
        let pairs = compute_wspd(&t, 2.5).unwrap();
        check(&pts, &t, &pairs);
        // The four cross-cluster point pairs come from one node pair.
        let cross: Vec<_> = pairs
            .iter()
            .filter(|p| t.nodes[p.a as usize].len() == 2 && t.nodes[p.b as usize].len() == 2)
            .collect();
        assert_eq!(cross.len(), 1);
    }

    #[test]
    fn separation_must_exceed_two() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        let t = tree_of(&pts, 3);
        assert!(compute_wspd(&t, 2.0).is_err());
        assert!(compute_wspd(&t, f64::NAN).is_err());
    }

    #[test]
    fn buckets_are_split_into_points() {
        // Low resolution forces many shared keys.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point> = (0..120).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        let t = tree_of(&pts, 2);
        let pairs = compute_wspd(&t, 2.5).unwrap();
        check(&pts, &t, &pairs);
    }
}
