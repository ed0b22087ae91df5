//! Point location: history descent, local search over conflicts, and walks
//! through a snapshot.

use std::collections::{HashSet, VecDeque};

use super::{strictly_between, Snapshot, Tally, TriIndex, TriangulationState, INFINITE, NONE};
use crate::error::{Error, Result};
use crate::geometry::{orient2d, point_in_triangle, Containment, Point, PointId, Sign};

/// Where a walk starts.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Anchor {
    /// A located point: `source` lies in (or conflicts with) `triangle`.
    Triangle { triangle: TriIndex, source: Point },
    /// A vertex of the snapshot.
    Vertex(PointId),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct WalkOutcome {
    pub triangle: TriIndex,
    /// Triangles visited, including the rotation around a start vertex.
    pub steps: u64,
}

impl TriangulationState {
    /// Descends the history from `start` (in conflict with `p`) to a triangle
    /// alive at `target_time` that is still in conflict with `p`.
    pub fn history_locate_conflict(
        &self,
        p: Point,
        start: TriIndex,
        target_time: u32,
        tally: &mut Tally,
    ) -> Result<TriIndex> {
        let first = &self.tris[start as usize];
        if first.created_at > target_time {
            return Err(Error::InvalidParameter(format!(
                "triangle {start} created at {} is younger than target time {target_time}",
                first.created_at
            )));
        }
        tally.conflict_tests += 1;
        if !self.conflict(start, p) {
            return Err(self.no_conflict_error(start, p));
        }
        let mut t = start;
        loop {
            let tri = &self.tris[t as usize];
            if tri.died_at > target_time {
                return Ok(t);
            }
            tally.history_visits += 1;
            let mut next = None;
            for c in tri.children() {
                tally.conflict_tests += 1;
                if self.conflict(c, p) {
                    next = Some(c);
                    break;
                }
            }
            match next {
                Some(c) => t = c,
                None => {
                    tally.history_fallbacks += 1;
                    return self.search_subtree(t, p, target_time, tally);
                }
            }
        }
    }

    fn no_conflict_error(&self, t: TriIndex, p: Point) -> Error {
        match self.coincident_vertex(t, p) {
            Some(existing) => Error::CoincidentVertex { existing },
            None => Error::NotInConflict { triangle: t },
        }
    }

    fn coincident_vertex(&self, t: TriIndex, p: Point) -> Option<PointId> {
        self.tris[t as usize]
            .v
            .iter()
            .find(|&&v| v != INFINITE && self.points[v as usize] == p)
            .map(|&v| PointId(v))
    }

    /// Exhaustive descent below `t`, used only when no child of a dead
    /// conflicting triangle conflicts with `p`.
    fn search_subtree(&self, t: TriIndex, p: Point, target_time: u32, tally: &mut Tally) -> Result<TriIndex> {
        let mut seen = HashSet::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            tally.history_visits += 1;
            let tri = &self.tris[u as usize];
            if let Some(existing) = self.coincident_vertex(u, p) {
                return Err(Error::CoincidentVertex { existing });
            }
            if tri.alive_at(target_time) {
                tally.conflict_tests += 1;
                if self.conflict(u, p) {
                    return Ok(u);
                }
            } else if tri.died_at <= target_time {
                stack.extend(tri.children());
            }
        }
        Err(Error::Internal(format!("history below triangle {t} has no conflict at time {target_time}")))
    }

    /// Locates a conflict of `p` at `target_time` starting from the history
    /// roots.
    pub fn locate_from_roots(&self, p: Point, target_time: u32, tally: &mut Tally) -> Result<TriIndex> {
        let root = self.conflicting_root(p, tally)?;
        self.history_locate_conflict(p, root, target_time, tally)
    }

    /// Store index of the triangle of `snap` containing `p`, given the
    /// snapshot position `pos` of a candidate; `None` if it does not contain
    /// `p`. Infinite triangles contain the points they conflict with. A point
    /// on an edge resolves to the lower-indexed of the two triangles.
    fn resolve(&self, snap: &Snapshot, pos: u32, p: Point) -> Result<Option<TriIndex>> {
        let t = snap.alive[pos as usize];
        let tri = &self.tris[t as usize];
        let [a, b, c] = tri.v;
        let (pa, pb) = (self.points[a as usize], self.points[b as usize]);
        if c == INFINITE {
            return Ok(match orient2d(pa, pb, p) {
                Sign::Positive => Some(t),
                Sign::Zero if strictly_between(pa, pb, p) => {
                    let other = snap.alive[snap.neighbors[pos as usize][2] as usize];
                    Some(t.min(other))
                }
                _ => None,
            });
        }
        let pc = self.points[c as usize];
        match point_in_triangle(p, pa, pb, pc) {
            Containment::Inside => Ok(Some(t)),
            Containment::OnEdge(e) => {
                let other = snap.alive[snap.neighbors[pos as usize][e.opposite_vertex()] as usize];
                Ok(Some(t.min(other)))
            }
            Containment::AtVertex(i) => Err(Error::CoincidentVertex {
                existing: PointId(tri.v[i]),
            }),
            Containment::Outside => Ok(None),
        }
    }

    /// Searches the conflict region of `p` in `snap` outward from `t` until
    /// reaching the triangle that contains `p`.
    pub fn conflict_to_containing(&self, p: Point, t: TriIndex, snap: &Snapshot, tally: &mut Tally) -> Result<TriIndex> {
        let start = snap
            .position_of(t)
            .ok_or_else(|| Error::InvalidParameter(format!("triangle {t} is not alive at time {}", snap.time)))?;
        tally.conflict_tests += 1;
        if !self.conflict(t, p) {
            return Err(self.no_conflict_error(t, p));
        }
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(pos) = queue.pop_front() {
            if let Some(found) = self.resolve(snap, pos, p)? {
                return Ok(found);
            }
            for &n in &snap.neighbors[pos as usize] {
                if seen.insert(n) {
                    tally.conflict_tests += 1;
                    if self.conflict(snap.alive[n as usize], p) {
                        queue.push_back(n);
                    }
                }
            }
        }
        Err(Error::Internal(format!("conflict region of triangle {t} holds no containing triangle")))
    }

    /// Walks through `snap` along the segment from the anchor to `q` and
    /// returns the triangle containing `q`. When `q` lies outside the hull the
    /// result is the infinite triangle of the hull edge the walk leaves by.
    pub fn walk_locate(&self, snap: &Snapshot, from: Anchor, q: Point, tally: &mut Tally) -> Result<WalkOutcome> {
        let mut steps = 0u64;
        let result = match from {
            Anchor::Triangle { triangle, source } => {
                let pos = snap.position_of(triangle).ok_or_else(|| {
                    Error::InvalidParameter(format!("triangle {triangle} is not alive at time {}", snap.time))
                })?;
                if self.tris[triangle as usize].is_infinite() {
                    // The source lies outside the hull, so there is no
                    // segment to follow through finite triangles yet.
                    self.visibility_walk(snap, pos, q, &mut steps)
                } else {
                    self.straight_walk(snap, pos, NONE, source, INFINITE, q, &mut steps, tally)
                }
            }
            Anchor::Vertex(v) => self.walk_from_vertex(snap, v, q, &mut steps, tally),
        };
        tally.walk_steps += steps;
        tally.walks += 1;
        Ok(WalkOutcome {
            triangle: result?,
            steps,
        })
    }

    fn walk_from_vertex(&self, snap: &Snapshot, v: PointId, q: Point, steps: &mut u64, tally: &mut Tally) -> Result<TriIndex> {
        let start = *snap
            .incident
            .get(v.index())
            .ok_or_else(|| Error::InvalidParameter(format!("vertex {v} is not in the snapshot")))?;
        let s = self.points[v.index()];
        if s == q {
            return Err(Error::CoincidentVertex { existing: v });
        }
        let mut cur = start;
        loop {
            *steps += 1;
            if let Some(found) = self.resolve(snap, cur, q)? {
                return Ok(found);
            }
            let tri = &self.tris[snap.alive[cur as usize] as usize];
            let i = tri.index_of(v.0).expect("rotation stays around the vertex");
            if !tri.is_infinite() {
                let a = self.points[tri.v[(i + 1) % 3] as usize];
                let b = self.points[tri.v[(i + 2) % 3] as usize];
                if orient2d(s, a, q) != Sign::Negative && orient2d(s, b, q) == Sign::Negative {
                    // The segment leaves through the edge opposite `v`.
                    let next = snap.neighbors[cur as usize][i];
                    return self.straight_walk(snap, next, cur, s, v.0, q, steps, tally);
                }
            }
            cur = snap.neighbors[cur as usize][(i + 1) % 3];
            if cur == start {
                break;
            }
        }
        tally.walk_fallbacks += 1;
        self.visibility_walk(snap, start, q, steps)
    }

    #[allow(clippy::too_many_arguments)]
    fn straight_walk(
        &self,
        snap: &Snapshot,
        mut cur: u32,
        mut prev: u32,
        s: Point,
        source_vertex: u32,
        q: Point,
        steps: &mut u64,
        tally: &mut Tally,
    ) -> Result<TriIndex> {
        let cap = snap.len() + 8;
        for _ in 0..cap {
            *steps += 1;
            if let Some(found) = self.resolve(snap, cur, q)? {
                return Ok(found);
            }
            let t = snap.alive[cur as usize];
            let tri = &self.tris[t as usize];
            if tri.is_infinite() {
                break;
            }
            if self.check_walk_conflicts && !tri.has_vertex(source_vertex) && !self.conflict(t, s) && !self.conflict(t, q)
            {
                tally.walk_conflict_violations += 1;
            }
            let mut exit = None;
            for i in 0..3 {
                let n = snap.neighbors[cur as usize][i];
                if n == prev {
                    continue;
                }
                let x = self.points[tri.v[(i + 1) % 3] as usize];
                let y = self.points[tri.v[(i + 2) % 3] as usize];
                if orient2d(x, y, q) != Sign::Negative {
                    continue;
                }
                let ox = orient2d(s, q, x);
                let oy = orient2d(s, q, y);
                if ox != Sign::Positive && oy != Sign::Negative && !(ox == Sign::Zero && oy == Sign::Zero) {
                    exit = Some(n);
                    break;
                }
            }
            match exit {
                Some(n) => {
                    prev = cur;
                    cur = n;
                }
                None => break,
            }
        }
        tally.walk_fallbacks += 1;
        self.visibility_walk(snap, cur, q, steps)
    }

    /// Moves to any neighbor across an edge separating the current triangle
    /// from `q`. Terminates on Delaunay triangulations; a linear scan backs
    /// it up regardless.
    fn visibility_walk(&self, snap: &Snapshot, mut cur: u32, q: Point, steps: &mut u64) -> Result<TriIndex> {
        let mut prev = NONE;
        for _ in 0..4 * snap.len() + 16 {
            *steps += 1;
            if let Some(found) = self.resolve(snap, cur, q)? {
                return Ok(found);
            }
            let tri = &self.tris[snap.alive[cur as usize] as usize];
            let nbrs = snap.neighbors[cur as usize];
            let next = if tri.is_infinite() {
                let x = self.points[tri.v[0] as usize];
                let y = self.points[tri.v[1] as usize];
                if orient2d(x, y, q) == Sign::Negative {
                    nbrs[2]
                } else if beyond_second(x, y, q) {
                    nbrs[0]
                } else {
                    nbrs[1]
                }
            } else {
                let mut candidates = (0..3).filter(|&i| {
                    let x = self.points[tri.v[(i + 1) % 3] as usize];
                    let y = self.points[tri.v[(i + 2) % 3] as usize];
                    orient2d(x, y, q) == Sign::Negative
                });
                let first = candidates.next().expect("q is outside the triangle");
                let pick = if nbrs[first] == prev {
                    candidates.next().unwrap_or(first)
                } else {
                    first
                };
                nbrs[pick]
            };
            prev = cur;
            cur = next;
        }
        for pos in 0..snap.len() as u32 {
            *steps += 1;
            if let Some(found) = self.resolve(snap, pos, q)? {
                return Ok(found);
            }
        }
        Err(Error::Internal("no triangle of the snapshot contains the point".into()))
    }

    /// Linear scan of `snap` for the triangle containing `p` (same edge and
    /// hull conventions as the walks).
    pub fn scan_containing(&self, snap: &Snapshot, p: Point) -> Result<TriIndex> {
        for pos in 0..snap.len() as u32 {
            if let Some(found) = self.resolve(snap, pos, p)? {
                return Ok(found);
            }
        }
        Err(Error::Internal("no triangle of the snapshot contains the point".into()))
    }
}

/// For `q` collinear with `x -> y` and not between them: whether `q` lies
/// beyond `y` rather than before `x`.
fn beyond_second(x: Point, y: Point, q: Point) -> bool {
    if x.x != y.x {
        (y.x > x.x) == (q.x > x.x)
    } else {
        (y.y > x.y) == (q.y > x.y)
    }
}
