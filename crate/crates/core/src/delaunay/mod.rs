//! Incremental Delaunay triangulation that keeps its full history.
//!
//! Every triangle ever created stays in an append-only store together with
//! its creation and death times, so the store doubles as the history DAG
//! (Delaunay tree). Times are counts of inserted points. The convex hull is
//! closed by a single symbolic vertex at infinity: each hull edge `u -> w`
//! (outside on its left) carries an infinite triangle `[u, w, INF]`.
//!
//! Triangles killed by one insertion all point at the star of triangles that
//! insertion created. These stars are contiguous in the store, so a child
//! list is a single index range.

mod locate;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{in_circle_ccw, orient2d, Point, PointId, Sign};

pub use locate::{Anchor, WalkOutcome};

/// Vertex index of the symbolic vertex at infinity.
pub const INFINITE: u32 = u32::MAX;
/// `died_at` of a triangle that is still alive.
pub const ALIVE: u32 = u32::MAX;
/// Sentinel for "no triangle".
pub const NONE: u32 = u32::MAX;

pub type TriIndex = u32;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Finite(PointId),
    Infinite,
}

impl Vertex {
    fn from_raw(v: u32) -> Vertex {
        if v == INFINITE {
            Vertex::Infinite
        } else {
            Vertex::Finite(PointId(v))
        }
    }
}

/// One node of the history DAG.
#[derive(Clone, Debug)]
pub struct HistoryTriangle {
    /// Counter-clockwise; the infinite vertex, if any, is always last.
    pub v: [u32; 3],
    pub created_at: u32,
    pub died_at: u32,
    /// Children are `first_child..first_child + child_count`.
    pub first_child: u32,
    pub child_count: u32,
    /// `nbr[i]` lies across the edge opposite `v[i]`. Only maintained while
    /// the triangle is alive; frozen at death.
    pub nbr: [u32; 3],
}

impl HistoryTriangle {
    pub fn is_infinite(&self) -> bool {
        self.v[2] == INFINITE
    }

    pub fn is_alive(&self) -> bool {
        self.died_at == ALIVE
    }

    pub fn alive_at(&self, time: u32) -> bool {
        self.created_at <= time && time < self.died_at
    }

    pub fn vertices(&self) -> [Vertex; 3] {
        self.v.map(Vertex::from_raw)
    }

    pub fn children(&self) -> std::ops::Range<u32> {
        self.first_child..self.first_child + self.child_count
    }

    pub fn has_vertex(&self, v: u32) -> bool {
        self.v.contains(&v)
    }

    fn index_of(&self, v: u32) -> Option<usize> {
        self.v.iter().position(|&x| x == v)
    }
}

/// Work tallies accumulated by the location and insertion routines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    /// History DAG nodes descended through.
    pub history_visits: u64,
    /// Conflict predicates evaluated while locating.
    pub conflict_tests: u64,
    /// Triangles visited by walks, including rotations around a start vertex.
    pub walk_steps: u64,
    /// Number of walks performed.
    pub walks: u64,
    /// Triangles removed by insertions.
    pub cavity_triangles: u64,
    pub insertions: u64,
    /// Straight-walk triangles in conflict with neither walk endpoint.
    pub walk_conflict_violations: u64,
    /// Walks that had to leave the straight line (degenerate configurations).
    pub walk_fallbacks: u64,
    /// History descents that found no conflicting child and searched the
    /// whole subtree instead.
    pub history_fallbacks: u64,
}

impl Tally {
    pub fn location_work(&self) -> u64 {
        self.history_visits + self.walk_steps + self.conflict_tests
    }
}

impl std::ops::Sub for Tally {
    type Output = Tally;
    fn sub(self, o: Tally) -> Tally {
        Tally {
            history_visits: self.history_visits - o.history_visits,
            conflict_tests: self.conflict_tests - o.conflict_tests,
            walk_steps: self.walk_steps - o.walk_steps,
            walks: self.walks - o.walks,
            cavity_triangles: self.cavity_triangles - o.cavity_triangles,
            insertions: self.insertions - o.insertions,
            walk_conflict_violations: self.walk_conflict_violations - o.walk_conflict_violations,
            walk_fallbacks: self.walk_fallbacks - o.walk_fallbacks,
            history_fallbacks: self.history_fallbacks - o.history_fallbacks,
        }
    }
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Tally) {
        self.history_visits += o.history_visits;
        self.conflict_tests += o.conflict_tests;
        self.walk_steps += o.walk_steps;
        self.walks += o.walks;
        self.cavity_triangles += o.cavity_triangles;
        self.insertions += o.insertions;
        self.walk_conflict_violations += o.walk_conflict_violations;
        self.walk_fallbacks += o.walk_fallbacks;
        self.history_fallbacks += o.history_fallbacks;
    }
}

/// The triangulation frozen at a round boundary.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub round: usize,
    /// Number of points inserted when the snapshot was taken.
    pub time: u32,
    /// Store indices of the alive triangles, ascending.
    pub alive: Vec<TriIndex>,
    /// Adjacency at `time`, as positions into `alive`.
    pub neighbors: Vec<[u32; 3]>,
    /// For each vertex id below `time`: position of one incident triangle.
    pub incident: Vec<u32>,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn position_of(&self, t: TriIndex) -> Option<u32> {
        self.alive.binary_search(&t).ok().map(|i| i as u32)
    }

    /// Store index of a triangle containing vertex `v`.
    pub fn incident_triangle(&self, v: PointId) -> Option<TriIndex> {
        self.incident.get(v.index()).map(|&i| self.alive[i as usize])
    }
}

/// Insertion-order permutation that moves the first point not collinear with
/// the first two to position 2. Points must be pairwise distinct.
pub fn bootstrap_order(points: &[Point]) -> Result<Vec<usize>> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    let k = (2..points.len())
        .find(|&k| orient2d(points[0], points[1], points[k]) != Sign::Zero)
        .ok_or(Error::AllCollinear)?;
    let mut order = Vec::with_capacity(points.len());
    order.extend([0, 1, k]);
    order.extend((2..points.len()).filter(|&i| i != k));
    Ok(order)
}

#[derive(Clone, Debug)]
pub struct TriangulationState {
    /// All points, in insertion order. The first `clock` are inserted.
    points: Vec<Point>,
    tris: Vec<HistoryTriangle>,
    clock: u32,
    /// One alive triangle per inserted vertex.
    incident: Vec<u32>,
    finite_alive: usize,
    infinite_alive: usize,
    snapshots: Vec<Snapshot>,
    /// Count straight-walk triangles that conflict with neither endpoint.
    pub check_walk_conflicts: bool,
    // Scratch reused across insertions.
    cavity_mark: Vec<u32>,
    cavity_epoch: u32,
    cavity: Vec<u32>,
    boundary: Vec<(u32, u32, u32, u32)>,
    spokes: HashMap<(u32, u32), (u32, u8)>,
    snapshot_scratch: Vec<u32>,
}

impl TriangulationState {
    /// Starts a triangulation from the first three points, which must not be
    /// collinear (see [`bootstrap_order`]). The remaining points are inserted
    /// later, in order.
    pub fn bootstrap(points: Vec<Point>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TooFewPoints {
                need: 3,
                got: points.len(),
            });
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let (a, mut b, mut c) = (0u32, 1u32, 2u32);
        match orient2d(points[0], points[1], points[2]) {
            Sign::Positive => {}
            Sign::Negative => std::mem::swap(&mut b, &mut c),
            Sign::Zero => return Err(Error::AllCollinear),
        }
        let mut state = TriangulationState {
            points,
            tris: Vec::new(),
            clock: 3,
            incident: vec![0; 3],
            finite_alive: 1,
            infinite_alive: 3,
            snapshots: Vec::new(),
            check_walk_conflicts: true,
            cavity_mark: Vec::new(),
            cavity_epoch: 0,
            cavity: Vec::new(),
            boundary: Vec::new(),
            spokes: HashMap::new(),
            snapshot_scratch: Vec::new(),
        };
        let verts = [[a, b, c], [b, a, INFINITE], [c, b, INFINITE], [a, c, INFINITE]];
        for v in verts {
            state.tris.push(HistoryTriangle {
                v,
                created_at: 3,
                died_at: ALIVE,
                first_child: 0,
                child_count: 0,
                nbr: [NONE; 3],
            });
        }
        let mut edges = HashMap::new();
        for (t, tri) in state.tris.iter().enumerate() {
            for i in 0..3 {
                edges.insert((tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]), (t as u32, i));
            }
        }
        for t in 0..4 {
            for i in 0..3 {
                let v = state.tris[t].v;
                let (x, y) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                state.tris[t].nbr[i] = edges[&(y, x)].0;
            }
        }
        Ok(state)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> Point {
        self.points[id.index()]
    }

    /// Number of points inserted so far.
    pub fn clock(&self) -> u32 {
        self.clock
    }

    pub fn history(&self) -> &[HistoryTriangle] {
        &self.tris
    }

    pub fn triangle(&self, t: TriIndex) -> &HistoryTriangle {
        &self.tris[t as usize]
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, round: usize) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.round == round)
    }

    /// The four bootstrap triangles; every point conflicts with one of them.
    pub fn roots(&self) -> std::ops::Range<TriIndex> {
        0..4
    }

    pub fn finite_alive(&self) -> usize {
        self.finite_alive
    }

    /// Number of hull vertices (equal to the number of hull edges).
    pub fn hull_size(&self) -> usize {
        self.infinite_alive
    }

    /// Checks `#finite triangles = 2n - 2 - h` for the current triangulation.
    pub fn euler_holds(&self) -> bool {
        let n = self.clock as usize;
        self.finite_alive + 2 + self.infinite_alive == 2 * n
    }

    /// Whether `p` conflicts with triangle `t`: strictly inside its
    /// circumcircle, or for an infinite triangle, strictly beyond its hull
    /// edge or on the open hull edge.
    pub fn conflict(&self, t: TriIndex, p: Point) -> bool {
        let v = self.tris[t as usize].v;
        let a = self.points[v[0] as usize];
        let b = self.points[v[1] as usize];
        if v[2] == INFINITE {
            match orient2d(a, b, p) {
                Sign::Positive => true,
                Sign::Negative => false,
                Sign::Zero => strictly_between(a, b, p),
            }
        } else {
            let c = self.points[v[2] as usize];
            in_circle_ccw(a, b, c, p) == Sign::Positive
        }
    }

    /// Inserts point `id` (which must be the next point in insertion order)
    /// starting from `hint`, a triangle from some earlier time that is in
    /// conflict with it.
    pub fn insert(&mut self, id: PointId, hint: TriIndex, tally: &mut Tally) -> Result<()> {
        if id.0 != self.clock {
            return Err(Error::InvalidParameter(format!(
                "point {id} inserted out of order, expected {}",
                self.clock
            )));
        }
        let p = self.points[id.index()];
        let start = self.history_locate_conflict(p, hint, self.clock, tally)?;
        self.grow_cavity(start, p, tally);
        self.retriangulate(id.0);
        tally.insertions += 1;
        debug_assert!(self.euler_holds());
        Ok(())
    }

    /// Inserts the next point, locating it from the history roots.
    pub fn insert_from_roots(&mut self, id: PointId, tally: &mut Tally) -> Result<()> {
        let p = self.points[id.index()];
        let root = self.conflicting_root(p, tally)?;
        self.insert(id, root, tally)
    }

    pub(crate) fn conflicting_root(&self, p: Point, tally: &mut Tally) -> Result<TriIndex> {
        for r in self.roots() {
            tally.conflict_tests += 1;
            if self.conflict(r, p) {
                return Ok(r);
            }
        }
        let existing = self.tris[0].v.iter().find(|&&v| self.points[v as usize] == p);
        Err(match existing {
            Some(&v) => Error::CoincidentVertex { existing: PointId(v) },
            None => Error::Internal("no bootstrap triangle conflicts with the point".into()),
        })
    }

    fn grow_cavity(&mut self, start: TriIndex, p: Point, tally: &mut Tally) {
        if self.cavity_mark.len() < self.tris.len() {
            self.cavity_mark.resize(self.tris.len(), 0);
        }
        self.cavity_epoch += 1;
        // Marks: epoch*2 = in cavity, epoch*2+1 = tested, not in cavity.
        let inside = self.cavity_epoch * 2;
        let outside = inside + 1;
        self.cavity.clear();
        self.boundary.clear();
        self.cavity.push(start);
        self.cavity_mark[start as usize] = inside;
        let mut head = 0;
        while head < self.cavity.len() {
            let c = self.cavity[head];
            head += 1;
            let tri = &self.tris[c as usize];
            for i in 0..3 {
                let n = tri.nbr[i];
                let mark = self.cavity_mark[n as usize];
                let in_cavity = if mark == inside {
                    true
                } else if mark == outside {
                    false
                } else {
                    tally.conflict_tests += 1;
                    if self.conflict(n, p) {
                        self.cavity_mark[n as usize] = inside;
                        self.cavity.push(n);
                        true
                    } else {
                        self.cavity_mark[n as usize] = outside;
                        false
                    }
                };
                if !in_cavity {
                    let (x, y) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
                    self.boundary.push((x, y, c, n));
                }
            }
        }
        tally.cavity_triangles += self.cavity.len() as u64;
    }

    /// Replaces the current cavity by the star of `p` over its boundary.
    fn retriangulate(&mut self, p: u32) {
        let time = p + 1;
        let first = self.tris.len() as u32;
        let count = self.boundary.len() as u32;
        self.spokes.clear();
        for k in 0..self.boundary.len() {
            let (x, y, _dead, outside) = self.boundary[k];
            let v = if y == INFINITE {
                [p, x, INFINITE]
            } else if x == INFINITE {
                [y, p, INFINITE]
            } else {
                [x, y, p]
            };
            let t = first + k as u32;
            let ip = v.iter().position(|&w| w == p).unwrap();
            let mut nbr = [NONE; 3];
            nbr[ip] = outside;
            // Point the outside triangle back at the new one.
            let out = &mut self.tris[outside as usize];
            let j = (0..3)
                .find(|&j| out.v[(j + 1) % 3] == y && out.v[(j + 2) % 3] == x)
                .expect("outside triangle shares the boundary edge");
            out.nbr[j] = t;
            for slot in [(ip + 1) % 3, (ip + 2) % 3] {
                let (a, b) = (v[(slot + 1) % 3], v[(slot + 2) % 3]);
                self.spokes.insert((a, b), (t, slot as u8));
            }
            self.tris.push(HistoryTriangle {
                v,
                created_at: time,
                died_at: ALIVE,
                first_child: 0,
                child_count: 0,
                nbr,
            });
        }
        for k in 0..count {
            let t = first + k;
            let v = self.tris[t as usize].v;
            let ip = v.iter().position(|&w| w == p).unwrap();
            for slot in [(ip + 1) % 3, (ip + 2) % 3] {
                let (a, b) = (v[(slot + 1) % 3], v[(slot + 2) % 3]);
                let (other, _) = self.spokes[&(b, a)];
                self.tris[t as usize].nbr[slot] = other;
            }
        }
        let mut finite_removed = 0;
        for &c in &self.cavity {
            let tri = &mut self.tris[c as usize];
            tri.died_at = time;
            tri.first_child = first;
            tri.child_count = count;
            if tri.v[2] != INFINITE {
                finite_removed += 1;
            }
        }
        let infinite_removed = self.cavity.len() - finite_removed;
        let mut finite_added = 0;
        for k in 0..count {
            let t = first + k;
            let v = self.tris[t as usize].v;
            if v[2] != INFINITE {
                finite_added += 1;
            }
            for &w in &v {
                if w != INFINITE {
                    if w as usize >= self.incident.len() {
                        self.incident.resize(w as usize + 1, 0);
                    }
                    self.incident[w as usize] = t;
                }
            }
        }
        let infinite_added = count as usize - finite_added;
        self.finite_alive = self.finite_alive + finite_added - finite_removed;
        self.infinite_alive = self.infinite_alive + infinite_added - infinite_removed;
        self.clock = time;
    }

    /// Freezes the current triangulation as the snapshot of `round`.
    pub fn take_snapshot(&mut self, round: usize) -> &Snapshot {
        let time = self.clock;
        let alive: Vec<u32> = self
            .tris
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_alive())
            .map(|(i, _)| i as u32)
            .collect();
        if self.snapshot_scratch.len() < self.tris.len() {
            self.snapshot_scratch.resize(self.tris.len(), NONE);
        }
        for (pos, &t) in alive.iter().enumerate() {
            self.snapshot_scratch[t as usize] = pos as u32;
        }
        let neighbors = alive
            .iter()
            .map(|&t| self.tris[t as usize].nbr.map(|n| self.snapshot_scratch[n as usize]))
            .collect();
        let incident = self.incident[..time as usize]
            .iter()
            .map(|&t| self.snapshot_scratch[t as usize])
            .collect();
        self.snapshots.push(Snapshot {
            round,
            time,
            alive,
            neighbors,
            incident,
        });
        self.snapshots.last().unwrap()
    }

    /// Alive finite triangles as point-id triples, each rotated so the
    /// smallest id comes first (orientation kept), sorted.
    pub fn triangles(&self) -> Vec<[PointId; 3]> {
        let mut out: Vec<[PointId; 3]> = self
            .tris
            .iter()
            .filter(|t| t.is_alive() && !t.is_infinite())
            .map(|t| canonical(t.v).map(PointId))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Rotates a triple so that its smallest entry comes first.
pub fn canonical(v: [u32; 3]) -> [u32; 3] {
    let m = (0..3).min_by_key(|&i| v[i]).unwrap();
    [v[m], v[(m + 1) % 3], v[(m + 2) % 3]]
}

/// For `p` collinear with `a` and `b`: whether it lies strictly between them.
pub(crate) fn strictly_between(a: Point, b: Point, p: Point) -> bool {
    if a.x != b.x {
        (a.x < p.x && p.x < b.x) || (b.x < p.x && p.x < a.x)
    } else {
        (a.y < p.y && p.y < b.y) || (b.y < p.y && p.y < a.y)
    }
}
