//! Exact nearest-neighbor graphs, their components, and the spread diagnostic.

use crate::error::{Error, Result};
use crate::geometry::{bounding_box, quantize, Point, PointId};
use crate::nng::morton::{morton_key, radix_sort, MortonKey};
use crate::nng::quadtree::{build_compressed_quadtree, CompressedQuadtree, NodeKind, ROOT};

/// Directed 1-nearest-neighbor graph over a subset of points.
///
/// Vertices are addressed by their local index into `ids`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NngGraph {
    pub ids: Vec<PointId>,
    /// `nn[i]` is the local index of the nearest neighbor of `ids[i]`.
    pub nn: Vec<u32>,
}

impl NngGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn nn_id(&self, local: usize) -> PointId {
        self.ids[self.nn[local] as usize]
    }

    /// Undirected adjacency in compressed row form: neighbors of `i` are
    /// `targets[offsets[i]..offsets[i + 1]]`, each edge listed once per end.
    pub fn undirected_adjacency(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.len();
        let mut degree = vec![0u32; n + 1];
        for (i, &j) in self.nn.iter().enumerate() {
            // A mutual pair contributes a single undirected edge.
            if self.nn[j as usize] as usize == i && j as usize > i {
                continue;
            }
            degree[i] += 1;
            degree[j as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n] as usize];
        for (i, &j) in self.nn.iter().enumerate() {
            if self.nn[j as usize] as usize == i && j as usize > i {
                continue;
            }
            targets[fill[i] as usize] = j;
            fill[i] += 1;
            targets[fill[j as usize] as usize] = i as u32;
            fill[j as usize] += 1;
        }
        (offsets, targets)
    }
}

/// Quantization resolution used for a subset of `n` points.
pub fn quantization_bits(n: usize) -> u32 {
    let log = usize::BITS - n.max(1).saturating_sub(1).leading_zeros();
    (log + 2).clamp(1, u64::BITS / 2)
}

/// Exact nearest neighbors of `points[i]` for all `i`, where `ids[i]` names
/// the point; ties in distance go to the smaller id.
pub fn nearest_neighbor_graph(points: &[Point], ids: &[PointId]) -> Result<NngGraph> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    if ids.len() != n {
        return Err(Error::InvalidParameter("ids and points differ in length".into()));
    }
    let bits = quantization_bits(n);
    let q = quantize(points, bits)?;
    let keys: Vec<MortonKey> = q
        .cells
        .iter()
        .map(|&(x, y)| morton_key(x, y, bits))
        .collect::<Result<_>>()?;
    let order = radix_sort(&keys);
    let tree = build_compressed_quadtree(points, &keys, &order)?;

    let mut nn = vec![0u32; n];
    let mut stack: Vec<u32> = Vec::new();
    for (pos, &i) in tree.order.iter().enumerate() {
        let i = i as usize;
        // Morton neighbors give a cheap first bound.
        let mut best = Best::NONE;
        for other in [pos.checked_sub(1), Some(pos + 1)].into_iter().flatten() {
            if let Some(&j) = tree.order.get(other) {
                best.offer(points[i].dist2(&points[j as usize]), ids[j as usize], j);
            }
        }
        nearest_in_tree(&tree, points, ids, i, &mut best, &mut stack);
        nn[i] = best.local;
    }
    Ok(NngGraph { ids: ids.to_vec(), nn })
}

#[derive(Copy, Clone)]
struct Best {
    d2: f64,
    id: PointId,
    local: u32,
}

impl Best {
    const NONE: Best = Best {
        d2: f64::INFINITY,
        id: PointId(u32::MAX),
        local: u32::MAX,
    };

    #[inline]
    fn offer(&mut self, d2: f64, id: PointId, local: u32) {
        if d2 < self.d2 || (d2 == self.d2 && id < self.id) {
            *self = Best { d2, id, local };
        }
    }
}

fn nearest_in_tree(
    tree: &CompressedQuadtree,
    points: &[Point],
    ids: &[PointId],
    query: usize,
    best: &mut Best,
    stack: &mut Vec<u32>,
) {
    let p = points[query];
    stack.clear();
    stack.push(ROOT as u32);
    while let Some(at) = stack.pop() {
        let node = &tree.nodes[at as usize];
        // Equal distance may still hide a smaller id, so only prune on `>`.
        if node.dist2_to(&p) > best.d2 {
            continue;
        }
        if node.kind == NodeKind::Point {
            let j = tree.order[node.start as usize];
            if j as usize != query {
                best.offer(p.dist2(&points[j as usize]), ids[j as usize], j);
            }
            continue;
        }
        let base = stack.len();
        stack.extend(node.children().map(|c| c as u32));
        // Nearest child on top.
        stack[base..].sort_unstable_by(|&a, &b| {
            let da = tree.nodes[a as usize].dist2_to(&p);
            let db = tree.nodes[b as usize].dist2_to(&p);
            db.total_cmp(&da)
        });
    }
}

/// Weakly connected components of an [`NngGraph`].
#[derive(Clone, Debug)]
pub struct Components {
    /// Component index of every local vertex.
    pub component_of: Vec<u32>,
    /// Members of component `c` are `members[offsets[c]..offsets[c + 1]]`,
    /// local indices in increasing order.
    pub offsets: Vec<u32>,
    pub members: Vec<u32>,
    /// Whether the component has a vertex of the already-inserted set.
    pub has_s: Vec<bool>,
    /// For components without such a vertex: the member with the smallest id.
    pub first_t: Vec<Option<PointId>>,
}

impl Components {
    pub fn len(&self) -> usize {
        self.has_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.has_s.is_empty()
    }

    pub fn members_of(&self, c: usize) -> &[u32] {
        &self.members[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a as usize] < self.rank[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        if self.rank[a as usize] == self.rank[b as usize] {
            self.rank[a as usize] += 1;
        }
    }
}

/// Groups the vertices of `g` into the components of its undirected version.
/// `in_s` tells whether a point belongs to the already-inserted set.
pub fn connected_components(g: &NngGraph, in_s: impl Fn(PointId) -> bool) -> Components {
    let n = g.len();
    let mut dsu = DisjointSet::new(n);
    for (i, &j) in g.nn.iter().enumerate() {
        dsu.union(i as u32, j);
    }
    let mut component_of = vec![u32::MAX; n];
    let mut roots: Vec<u32> = Vec::new();
    let mut sizes: Vec<u32> = Vec::new();
    for i in 0..n {
        let r = dsu.find(i as u32) as usize;
        if component_of[r] == u32::MAX {
            component_of[r] = roots.len() as u32;
            roots.push(r as u32);
            sizes.push(0);
        }
        let c = component_of[r];
        component_of[i] = c;
        sizes[c as usize] += 1;
    }
    let count = roots.len();
    let mut offsets = vec![0u32; count + 1];
    for c in 0..count {
        offsets[c + 1] = offsets[c] + sizes[c];
    }
    let mut fill = offsets.clone();
    let mut members = vec![0u32; n];
    let mut has_s = vec![false; count];
    let mut min_t: Vec<Option<PointId>> = vec![None; count];
    for (i, (&c, &id)) in component_of.iter().zip(&g.ids).enumerate() {
        let c = c as usize;
        members[fill[c] as usize] = i as u32;
        fill[c] += 1;
        if in_s(id) {
            has_s[c] = true;
        } else if min_t[c].is_none_or(|m| id < m) {
            min_t[c] = Some(id);
        }
    }
    let first_t = min_t
        .into_iter()
        .zip(&has_s)
        .map(|(t, &s)| if s { None } else { t })
        .collect();
    Components {
        component_of,
        offsets,
        members,
        has_s,
        first_t,
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Spread {
    /// `max_distance / min_distance`.
    pub value: f64,
    /// Exact smallest pairwise distance.
    pub min_distance: f64,
    /// Bounding-box diagonal; overestimates the diameter by at most
    /// `approximation_factor`.
    pub max_distance: f64,
    pub approximation_factor: f64,
}

/// Ratio of the largest to the smallest pairwise distance, with the largest
/// distance estimated by the bounding-box diagonal.
pub fn compute_spread(points: &[Point]) -> Result<Spread> {
    let ids: Vec<PointId> = (0..points.len() as u32).map(PointId).collect();
    let g = nearest_neighbor_graph(points, &ids)?;
    let mut min2 = f64::INFINITY;
    let mut witness = (0, 0);
    for (i, &j) in g.nn.iter().enumerate() {
        let d2 = points[i].dist2(&points[j as usize]);
        if d2 < min2 {
            min2 = d2;
            witness = (i, j as usize);
        }
    }
    if min2 == 0.0 {
        let (a, b) = (witness.0.max(witness.1), witness.0.min(witness.1));
        return Err(Error::DuplicatePoint {
            point: PointId(a as u32),
            existing: PointId(b as u32),
        });
    }
    let (lo, hi) = bounding_box(points);
    let max_distance = lo.dist2(&hi).sqrt();
    let min_distance = min2.sqrt();
    Ok(Spread {
        value: max_distance / min_distance,
        min_distance,
        max_distance,
        approximation_factor: std::f64::consts::SQRT_2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn ids(n: usize) -> Vec<PointId> {
        (0..n as u32).map(PointId).collect()
    }

    fn brute(points: &[Point], ids: &[PointId]) -> Vec<u32> {
        (0..points.len())
            .map(|i| {
                let mut best = Best::NONE;
                for j in 0..points.len() {
                    if i != j {
                        best.offer(points[i].dist2(&points[j]), ids[j], j as u32);
                    }
                }
                best.local
            })
            .collect()
    }

    #[test]
    fn three_collinear() {
        let pts = [Point::new(0., 0.), Point::new(1., 0.), Point::new(5., 0.)];
        let g = nearest_neighbor_graph(&pts, &ids(3)).unwrap();
        assert_eq!(g.nn, vec![1, 0, 1]);
        let c = connected_components(&g, |_| false);
        assert_eq!(c.len(), 1);
        assert_eq!(c.first_t, vec![Some(PointId(0))]);
    }

    #[test]
    fn tie_goes_to_smaller_id() {
        let pts = [Point::new(0., 0.), Point::new(1., 0.), Point::new(-1., 0.)];
        let g = nearest_neighbor_graph(&pts, &ids(3)).unwrap();
        assert_eq!(g.nn[0], 1);
        // Same geometry with ids swapped around.
        let g = nearest_neighbor_graph(&pts, &[PointId(5), PointId(9), PointId(2)]).unwrap();
        assert_eq!(g.nn[0], 2);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            nearest_neighbor_graph(&[Point::new(0., 0.)], &ids(1)),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &n in &[2usize, 3, 10, 500, 2000] {
            let pts: Vec<Point> = (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect();
            let mut shuffled_ids = ids(n);
            shuffled_ids.reverse();
            let g = nearest_neighbor_graph(&pts, &shuffled_ids).unwrap();
            assert_eq!(g.nn, brute(&pts, &shuffled_ids), "n = {n}");
        }
    }

    #[test]
    fn integer_grid_ties() {
        let pts: Vec<Point> = (0..12).flat_map(|i| (0..9).map(move |j| Point::new(i as f64, j as f64))).collect();
        let id = ids(pts.len());
        let g = nearest_neighbor_graph(&pts, &id).unwrap();
        assert_eq!(g.nn, brute(&pts, &id));
    }

    #[test]
    fn component_flags() {
        let pts = [
            Point::new(0., 0.),
            Point::new(0.1, 0.),
            Point::new(50., 0.),
            Point::new(50.1, 0.),
        ];
        let g = nearest_neighbor_graph(&pts, &ids(4)).unwrap();
        let c = connected_components(&g, |id| id == PointId(1));
        assert_eq!(c.len(), 2);
        assert_eq!(c.has_s, vec![true, false]);
        assert_eq!(c.first_t, vec![None, Some(PointId(2))]);
    }

    #[test]
    fn first_t_is_the_minimum_id() {
        let pts = [Point::new(0., 0.), Point::new(1., 0.), Point::new(2.5, 0.)];
        let g = nearest_neighbor_graph(&pts, &[PointId(7), PointId(3), PointId(9)]).unwrap();
        let c = connected_components(&g, |_| false);
        assert_eq!(c.len(), 1);
        assert_eq!(c.first_t[0], Some(PointId(3)));
    }

    #[test]
    fn adjacency_lists_each_edge_once_per_end() {
        let pts = [Point::new(0., 0.), Point::new(1., 0.), Point::new(5., 0.)];
        let g = nearest_neighbor_graph(&pts, &ids(3)).unwrap();
        let (off, tgt) = g.undirected_adjacency();
        assert_eq!(off, vec![0, 1, 3, 4]);
        let mut n1 = tgt[1..3].to_vec();
        n1.sort();
        assert_eq!(n1, vec![0, 2]);
    }

    #[test]
    fn spread_examples() {
        let s = compute_spread(&[Point::new(0., 0.), Point::new(1., 0.)]).unwrap();
        assert_eq!(s.value, 1.0);
        let s = compute_spread(&[Point::new(0., 0.), Point::new(1., 0.), Point::new(3., 0.)]).unwrap();
        assert_eq!(s.value, 3.0);
        assert!(compute_spread(&[Point::new(1., 1.), Point::new(1., 1.), Point::new(0., 0.)]).is_err());
    }

    #[test]
    fn spread_min_distance_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let pts: Vec<Point> = (0..1000).map(|_| Point::new(rng.gen(), rng.gen())).collect();
        let s = compute_spread(&pts).unwrap();
        let mut min2 = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                min2 = min2.min(pts[i].dist2(&pts[j]));
            }
        }
        assert_eq!(s.min_distance, min2.sqrt());
    }

    #[test]
    fn quantization_bits_rule() {
        assert_eq!(quantization_bits(2), 3);
        assert_eq!(quantization_bits(4), 4);
        assert_eq!(quantization_bits(5), 5);
        assert_eq!(quantization_bits(1 << 20), 22);
        assert_eq!(quantization_bits(usize::MAX), 32);
    }
}
