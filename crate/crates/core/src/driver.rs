//! End-to-end construction: rounds of doubling size, each located through a
//! cascade of nearest-neighbor graphs and inserted with history hints.

use std::collections::HashMap;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delaunay::{bootstrap_order, canonical, Anchor, Tally, TriIndex, TriangulationState};
use crate::error::{Error, Result};
use crate::geometry::{point_in_triangle, Containment, Point, PointId};
use crate::nng::{connected_components, nearest_neighbor_graph, Components, NngGraph};

/// Default size of the first round.
pub const DEFAULT_ROUND_BASE: usize = 32;

/// Round sizes `c, 2c, 4c, ...`, the last round taking whatever is left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundPlan {
    pub c: usize,
    /// `boundaries[k - 1] = |S_k|`, strictly increasing, ending at `N`.
    pub boundaries: Vec<usize>,
}

impl RoundPlan {
    /// Number of rounds.
    pub fn m(&self) -> usize {
        self.boundaries.len()
    }

    pub fn n(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    /// `|S_j|`, with `|S_0| = 0`.
    pub fn s_size(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.boundaries[j - 1]
        }
    }

    /// Insertion positions of round `k` (1-based).
    pub fn round(&self, k: usize) -> Range<usize> {
        self.s_size(k - 1)..self.s_size(k)
    }

    pub fn sizes(&self) -> Vec<usize> {
        (1..=self.m()).map(|k| self.round(k).len()).collect()
    }
}

pub fn plan_rounds(n: usize, c: usize) -> Result<RoundPlan> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if c < 3 {
        return Err(Error::InvalidParameter(format!("round base must be at least 3, got {c}")));
    }
    let mut boundaries = vec![n.min(c)];
    let mut size = c;
    while *boundaries.last().unwrap() < n {
        let done = *boundaries.last().unwrap();
        size *= 2;
        if n - done <= size {
            boundaries.push(n);
        } else {
            boundaries.push(done + size);
        }
    }
    Ok(RoundPlan { c, boundaries })
}

/// One nearest-neighbor graph built during a cascade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NngBuild {
    pub level: usize,
    /// `|T_j| + |S_j|`.
    pub size: usize,
    pub components: usize,
    /// `|T_{j-1}|`, the representatives promoted by this build.
    pub promoted: usize,
}

/// Work done in one round, split by phase.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundCounters {
    pub round: usize,
    pub size: usize,
    pub nng_builds: Vec<NngBuild>,
    /// Locating the lowest level and lifting each level one round up.
    pub history: Tally,
    /// Walks along graph edges.
    pub walk: Tally,
    /// Final insertions, starting from the located triangles.
    pub insert: Tally,
    /// Components visited in the ascending phase, and how many had a seed.
    pub walked_components: usize,
    pub seeded_components: usize,
}

impl RoundCounters {
    pub fn total(&self) -> Tally {
        let mut t = self.history;
        t += self.walk;
        t += self.insert;
        t
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub rounds: Vec<RoundCounters>,
}

impl Counters {
    pub fn total(&self) -> Tally {
        let mut t = Tally::default();
        for r in &self.rounds {
            t += r.total();
        }
        t
    }

    /// History visits, walk steps and conflict tests over the whole run.
    pub fn location_work(&self) -> u64 {
        self.total().location_work()
    }

    pub fn nng_builds(&self) -> usize {
        self.rounds.iter().map(|r| r.nng_builds.len()).sum()
    }

    /// CSV keyed by round and phase.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "round,phase,points,nng_builds,nng_input,history_visits,walk_steps,walks,conflict_tests,cavity_triangles,insertions\n",
        );
        for r in &self.rounds {
            let nng_input: usize = r.nng_builds.iter().map(|b| b.size).sum();
            out.push_str(&format!("{},nng-build,{},{},{},0,0,0,0,0,0\n", r.round, r.size, r.nng_builds.len(), nng_input));
            for (phase, t) in [("history", &r.history), ("walk", &r.walk), ("insert", &r.insert)] {
                out.push_str(&format!(
                    "{},{phase},{},0,0,{},{},{},{},{},{}\n",
                    r.round,
                    r.size,
                    t.history_visits,
                    t.walk_steps,
                    t.walks,
                    t.conflict_tests,
                    t.cavity_triangles,
                    t.insertions
                ));
            }
        }
        out
    }
}

/// A level's graph and its components, kept from the descending cascade for
/// the ascending walks.
#[derive(Clone, Debug)]
pub struct LevelGraph {
    pub graph: NngGraph,
    pub components: Components,
}

/// The hierarchy `R_k = T_{k-1} ⊇ T_{k-2} ⊇ ... ⊇ T_base` of one round.
#[derive(Clone, Debug)]
pub struct LevelSets {
    pub round: usize,
    /// `t[j]` is `T_j` (sorted ids); empty below `base`.
    pub t: Vec<Vec<PointId>>,
    /// `graphs[j]` is `NNG(T_j ∪ S_j)` for every level that built one.
    pub graphs: Vec<Option<LevelGraph>>,
    /// Lowest level reached: `0`, or the first level that came out empty.
    pub base: usize,
}

/// Builds the level sets of round `k >= 2`. `points` are in insertion order.
pub fn build_level_sets(k: usize, plan: &RoundPlan, points: &[Point], counters: &mut RoundCounters) -> Result<LevelSets> {
    if k < 2 || k > plan.m() {
        return Err(Error::InvalidParameter(format!("no level sets for round {k}")));
    }
    let mut t: Vec<Vec<PointId>> = vec![Vec::new(); k];
    let mut graphs: Vec<Option<LevelGraph>> = (0..k).map(|_| None).collect();
    t[k - 1] = plan.round(k).map(|i| PointId(i as u32)).collect();
    let mut j = k - 1;
    while j > 0 && !t[j].is_empty() {
        let s = plan.s_size(j);
        let ids: Vec<PointId> = (0..s as u32).map(PointId).chain(t[j].iter().copied()).collect();
        let local: Vec<Point> = ids.iter().map(|id| points[id.index()]).collect();
        let graph = nearest_neighbor_graph(&local, &ids)?;
        let components = connected_components(&graph, |id| id.index() < s);
        let mut promoted: Vec<PointId> = components.first_t.iter().flatten().copied().collect();
        promoted.sort_unstable();
        if 2 * promoted.len() > t[j].len() {
            return Err(Error::Internal(format!(
                "round {k} level {j}: {} representatives from {} points",
                promoted.len(),
                t[j].len()
            )));
        }
        counters.nng_builds.push(NngBuild {
            level: j,
            size: ids.len(),
            components: components.len(),
            promoted: promoted.len(),
        });
        t[j - 1] = promoted;
        graphs[j] = Some(LevelGraph { graph, components });
        j -= 1;
    }
    Ok(LevelSets {
        round: k,
        t,
        graphs,
        base: j,
    })
}

/// Locates every point of round `k` in `DT(S_{k-1})`, returning one
/// triangle per point of the round (in insertion order). Points outside the
/// hull get a conflicting infinite triangle.
pub fn locate_ascending(
    state: &TriangulationState,
    plan: &RoundPlan,
    levels: &LevelSets,
    counters: &mut RoundCounters,
) -> Result<Vec<TriIndex>> {
    let k = levels.round;
    let range = plan.round(k);
    let off = range.start;
    let points = state.points();
    let mut loc = vec![crate::delaunay::NONE; range.len()];
    let snapshot = |j: usize| {
        state
            .snapshot(j)
            .ok_or_else(|| Error::Internal(format!("missing snapshot of round {j}")))
    };

    let base = levels.base;
    if !levels.t[base].is_empty() {
        let snap = snapshot(base + 1)?;
        for &p in &levels.t[base] {
            let q = points[p.index()];
            let t = state.locate_from_roots(q, snap.time, &mut counters.history)?;
            loc[p.index() - off] = state.conflict_to_containing(q, t, snap, &mut counters.history)?;
        }
    }

    let mut in_lower = vec![false; range.len()];
    for j in base..k - 1 {
        let snap = snapshot(j + 1)?;
        if j > base {
            for &p in &levels.t[j] {
                let q = points[p.index()];
                let from = loc[p.index() - off];
                let t = state.history_locate_conflict(q, from, snap.time, &mut counters.history)?;
                loc[p.index() - off] = state.conflict_to_containing(q, t, snap, &mut counters.history)?;
            }
        }
        in_lower.iter_mut().for_each(|b| *b = false);
        for &p in &levels.t[j] {
            in_lower[p.index() - off] = true;
        }

        let level = levels.graphs[j + 1]
            .as_ref()
            .ok_or_else(|| Error::Internal(format!("round {k}: no graph at level {}", j + 1)))?;
        let ids = &level.graph.ids;
        let s = plan.s_size(j + 1);
        let located = |local: u32| {
            let id = ids[local as usize].index();
            id < s || in_lower[id - off]
        };
        let (offsets, targets) = level.graph.undirected_adjacency();
        let mut visited = vec![false; ids.len()];
        let mut stack = Vec::new();
        for c in 0..level.components.len() {
            counters.walked_components += 1;
            let seed = level
                .components
                .members_of(c)
                .iter()
                .copied()
                .filter(|&m| located(m))
                .min_by_key(|&m| ids[m as usize]);
            let Some(seed) = seed else {
                return Err(Error::Internal(format!(
                    "round {k} level {}: component {c} has no located vertex",
                    j + 1
                )));
            };
            counters.seeded_components += 1;
            visited[seed as usize] = true;
            stack.push(seed);
            while let Some(u) = stack.pop() {
                let uid = ids[u as usize];
                for &w in &targets[offsets[u as usize] as usize..offsets[u as usize + 1] as usize] {
                    if visited[w as usize] {
                        continue;
                    }
                    visited[w as usize] = true;
                    if !located(w) {
                        let anchor = if uid.index() < s {
                            Anchor::Vertex(uid)
                        } else {
                            Anchor::Triangle {
                                triangle: loc[uid.index() - off],
                                source: points[uid.index()],
                            }
                        };
                        let wid = ids[w as usize].index();
                        loc[wid - off] = state.walk_locate(snap, anchor, points[wid], &mut counters.walk)?.triangle;
                    }
                    stack.push(w);
                }
            }
        }
    }

    let snap = snapshot(k - 1)?;
    for (i, &t) in loc.iter().enumerate() {
        let q = points[off + i];
        let tri = state.triangle(t);
        let ok = snap.position_of(t).is_some()
            && if tri.is_infinite() {
                state.conflict(t, q)
            } else {
                let [a, b, c] = tri.v.map(|v| points[v as usize]);
                point_in_triangle(q, a, b, c) != Containment::Outside
            };
        if !ok {
            return Err(Error::Internal(format!(
                "round {k}: triangle {t} located for point {} does not contain it",
                off + i
            )));
        }
    }
    Ok(loc)
}

/// Input points after removing exact duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DedupReport {
    /// `kept[i]` is the input index of deduplicated point `i`.
    pub kept: Vec<usize>,
    /// `(input index, deduplicated id it repeats)`.
    pub duplicates: Vec<(usize, PointId)>,
}

/// Drops repeated points (first occurrence wins). Rejects non-finite input.
pub fn dedup(points: &[Point]) -> Result<(Vec<Point>, DedupReport)> {
    if let Some(index) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut seen: HashMap<(u64, u64), PointId> = HashMap::with_capacity(points.len());
    let mut out = Vec::with_capacity(points.len());
    let mut report = DedupReport::default();
    for (i, p) in points.iter().enumerate() {
        let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
        match seen.get(&key) {
            Some(&id) => report.duplicates.push((i, id)),
            None => {
                seen.insert(key, PointId(out.len() as u32));
                out.push(*p);
                report.kept.push(i);
            }
        }
    }
    Ok((out, report))
}

/// A finished construction.
#[derive(Clone, Debug)]
pub struct Run {
    /// Deduplicated input, in input order.
    pub points: Vec<Point>,
    pub dedup: DedupReport,
    /// `insertion_order[i]` is the deduplicated id inserted `i`-th.
    pub insertion_order: Vec<u32>,
    pub plan: RoundPlan,
    pub counters: Counters,
    pub state: TriangulationState,
}

impl Run {
    /// Delaunay triangles over deduplicated ids, each rotated so the smallest
    /// id comes first, sorted.
    pub fn triangles(&self) -> Vec<[PointId; 3]> {
        let mut out: Vec<[PointId; 3]> = self
            .state
            .triangles()
            .into_iter()
            .map(|t| canonical(t.map(|v| self.insertion_order[v.index()])).map(PointId))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Deduplicates, shuffles with `seed` and moves a non-collinear triple to
/// the front. Returns the deduplicated points, the report, and the order.
fn prepare(points: &[Point], seed: u64) -> Result<(Vec<Point>, DedupReport, Vec<u32>)> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (unique, report) = dedup(points)?;
    if unique.len() < 3 {
        return Err(Error::TooFewPoints {
            need: 3,
            got: unique.len(),
        });
    }
    let mut shuffled: Vec<u32> = (0..unique.len() as u32).collect();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let in_order: Vec<Point> = shuffled.iter().map(|&i| unique[i as usize]).collect();
    let order = bootstrap_order(&in_order)?.into_iter().map(|i| shuffled[i]).collect();
    Ok((unique, report, order))
}

/// Builds the Delaunay triangulation of `points`, inserting in an order
/// drawn from `seed`, in rounds of doubling size starting at `c`.
pub fn run(points: &[Point], seed: u64, c: usize) -> Result<Run> {
    let (unique, dedup, order) = prepare(points, seed)?;
    let ordered: Vec<Point> = order.iter().map(|&i| unique[i as usize]).collect();
    let (state, plan, counters) = run_in_order(ordered, c)?;
    Ok(Run {
        points: unique,
        dedup,
        insertion_order: order,
        plan,
        counters,
        state,
    })
}

/// [`run`] without deduplication or shuffling: `points` are inserted in the
/// given order and must be distinct, with the first three not collinear.
pub fn run_in_order(points: Vec<Point>, c: usize) -> Result<(TriangulationState, RoundPlan, Counters)> {
    let plan = plan_rounds(points.len(), c)?;
    let mut state = TriangulationState::bootstrap(points)?;
    let mut counters = Counters::default();

    let mut first = RoundCounters {
        round: 1,
        size: plan.round(1).len(),
        ..RoundCounters::default()
    };
    for i in 3..plan.s_size(1) {
        state.insert_from_roots(PointId(i as u32), &mut first.insert)?;
    }
    state.take_snapshot(1);
    counters.rounds.push(first);

    for k in 2..=plan.m() {
        let mut rc = RoundCounters {
            round: k,
            size: plan.round(k).len(),
            ..RoundCounters::default()
        };
        let levels = build_level_sets(k, &plan, state.points(), &mut rc)?;
        let hints = locate_ascending(&state, &plan, &levels, &mut rc)?;
        for (i, hint) in plan.round(k).zip(hints) {
            state.insert(PointId(i as u32), hint, &mut rc.insert)?;
        }
        state.take_snapshot(k);
        counters.rounds.push(rc);
    }
    Ok((state, plan, counters))
}

/// Plain randomized incremental construction: the same insertion order as
/// [`run`], every point located from the history roots.
pub fn run_plain(points: &[Point], seed: u64) -> Result<Run> {
    let (unique, dedup, order) = prepare(points, seed)?;
    let n = unique.len();
    let plan = RoundPlan {
        c: n,
        boundaries: vec![n],
    };
    let ordered: Vec<Point> = order.iter().map(|&i| unique[i as usize]).collect();
    let mut state = TriangulationState::bootstrap(ordered)?;
    let mut rc = RoundCounters {
        round: 1,
        size: n,
        ..RoundCounters::default()
    };
    for i in 3..n {
        state.insert_from_roots(PointId(i as u32), &mut rc.insert)?;
    }
    Ok(Run {
        points: unique,
        dedup,
        insertion_order: order,
        plan,
        counters: Counters { rounds: vec![rc] },
        state,
    })
}

/// Violations of the per-round bounds on graph builds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostReport {
    pub passed: bool,
    pub violations: Vec<String>,
}

/// Checks that round `k` built at most `k - 1` graphs, that the graph at
/// level `j` had at most `2^(j+1) c` points (at most `N` for the top level of
/// the last round) and that every level at most halved.
pub fn validate_cost_profile(counters: &Counters, plan: &RoundPlan) -> CostReport {
    let mut violations = Vec::new();
    for (i, r) in counters.rounds.iter().enumerate() {
        let k = i + 1;
        if r.nng_builds.len() > k.saturating_sub(1) {
            violations.push(format!("round {k}: {} graph builds", r.nng_builds.len()));
        }
        for b in &r.nng_builds {
            let bound = if k == plan.m() && b.level == k - 1 {
                plan.n()
            } else {
                plan.c << (b.level + 1)
            };
            if b.size > bound {
                violations.push(format!("round {k} level {}: graph on {} points exceeds {bound}", b.level, b.size));
            }
            let t = b.size - plan.s_size(b.level);
            if 2 * b.promoted > t {
                violations.push(format!("round {k} level {}: {} promoted from {t}", b.level, b.promoted));
            }
        }
        if r.seeded_components != r.walked_components {
            violations.push(format!(
                "round {k}: {} of {} components seeded",
                r.seeded_components, r.walked_components
            ));
        }
    }
    CostReport {
        passed: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::oracle::{brute_delaunay, check_delaunay_property, check_euler};

    fn uniform(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect()
    }

    #[test]
    fn plan_examples() {
        assert_eq!(plan_rounds(100, 4).unwrap().sizes(), vec![4, 8, 16, 32, 40]);
        assert_eq!(plan_rounds(12, 4).unwrap().sizes(), vec![4, 8]);
        assert_eq!(plan_rounds(3, 4).unwrap().sizes(), vec![3]);
        assert_eq!(plan_rounds(32, 32).unwrap().sizes(), vec![32]);
        assert_eq!(plan_rounds(33, 32).unwrap().sizes(), vec![32, 1]);
        assert!(plan_rounds(0, 4).is_err());
        assert!(plan_rounds(10, 2).is_err());
    }

    /// After r full rounds |S_r| = (2^r - 1) c, and the last round absorbs
    /// anything up to its nominal size, so m is the least r with
    /// (2^r - 1) c >= N, i.e. 2^r >= N/c + 1.
    #[test]
    fn round_count_matches_closed_form() {
        for c in 3..=64usize {
            for n in 1..=5000usize {
                let plan = plan_rounds(n, c).unwrap();
                let sizes = plan.sizes();
                let mut m = 0;
                while ((1usize << m) - 1) * c < n {
                    m += 1;
                }
                assert_eq!(plan.m(), m.max(1), "n {n} c {c}");
                assert_eq!(sizes.iter().sum::<usize>(), n);
                assert_eq!(sizes[0], n.min(c));
                for w in sizes.windows(2) {
                    assert!(w[1] <= 2 * w[0]);
                }
                for w in sizes[..sizes.len() - 1].windows(2) {
                    assert_eq!(w[1], 2 * w[0]);
                }
            }
        }
    }

    #[test]
    fn matches_brute_force_and_plain_insertion() {
        for seed in 0..10 {
            let p = uniform(150, seed);
            let r = run(&p, seed, 4).unwrap();
            let t = r.triangles();
            assert_eq!(t, brute_delaunay(&p).unwrap(), "seed {seed}");
            let plain = run_plain(&p, seed).unwrap();
            assert_eq!(t, plain.triangles());
            assert!(validate_cost_profile(&r.counters, &r.plan).passed);
            let total = r.counters.total();
            assert_eq!(total.history_fallbacks, 0);
            assert_eq!(total.walk_fallbacks, 0);
            assert_eq!(total.walk_conflict_violations, 0);
        }
    }

    #[test]
    fn seeds_give_the_same_triangulation() {
        let p = uniform(500, 77);
        let a = run(&p, 1, 8).unwrap().triangles();
        let b = run(&p, 2, 8).unwrap().triangles();
        assert_eq!(a, b);
        assert!(check_delaunay_property(&p, &a).passed);
        assert!(check_euler(&p, &a).passed);
    }

    #[test]
    fn counters_are_consistent() {
        let p = uniform(3000, 5);
        let r = run(&p, 5, 32).unwrap();
        let walked: usize = r
            .counters
            .rounds
            .iter()
            .map(|rc| rc.walk.walks as usize)
            .sum();
        let total = r.counters.total();
        assert!(total.walk_steps >= walked as u64);
        assert!(walked > 0);
        assert_eq!(total.insertions, 2997);
        for (i, rc) in r.counters.rounds.iter().enumerate() {
            assert!(rc.nng_builds.len() <= i);
            assert_eq!(rc.round, i + 1);
        }
        let csv = r.counters.to_csv();
        assert_eq!(csv.lines().count(), 1 + 4 * r.plan.m());
    }

    #[test]
    fn dedup_reports_duplicates() {
        let p = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(-0.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let (u, rep) = dedup(&p).unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(rep.kept, vec![0, 1, 3]);
        assert_eq!(rep.duplicates, vec![(2, PointId(0)), (4, PointId(2))]);
        let r = run(&p, 0, 4).unwrap();
        assert_eq!(r.triangles(), vec![[PointId(0), PointId(1), PointId(2)]]);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(run(&[], 0, 4), Err(Error::EmptyInput)));
        let line: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(run(&line, 0, 4), Err(Error::AllCollinear)));
        let two = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(run(&two, 0, 4), Err(Error::TooFewPoints { .. })));
        let bad = [Point::new(0.0, 0.0), Point::new(f64::INFINITY, 0.0), Point::new(0.0, 1.0)];
        assert!(matches!(run(&bad, 0, 4), Err(Error::NonFinite { index: 1 })));
    }

    #[test]
    fn collinear_prefix_is_handled() {
        let mut p: Vec<Point> = (0..20).map(|i| Point::new(i as f64, 0.0)).collect();
        p.push(Point::new(5.0, 3.0));
        p.push(Point::new(12.0, -4.0));
        for seed in 0..5 {
            let t = run(&p, seed, 3).unwrap().triangles();
            assert!(check_delaunay_property(&p, &t).passed);
            assert!(check_euler(&p, &t).passed);
        }
    }

    /// Round 3 of a 4 + 8 + 16 plan is a far cluster of four groups, each
    /// made of two tight pairs: the pairs are components of the top graph,
    /// the groups are components one level down.
    fn two_cluster_instance() -> Vec<Point> {
        let mut p = uniform(12, 3);
        for g in 0..4 {
            let cx = 1000.0 + 1000.0 * g as f64;
            for (dx, dy) in [(0.0, 0.0), (10.0, 0.0), (0.0, 1.0), (10.0, 1.5)] {
                p.push(Point::new(cx + dx, dy));
            }
        }
        p
    }

    #[test]
    fn cascade_on_far_cluster() {
        let p = two_cluster_instance();
        let plan = plan_rounds(p.len(), 4).unwrap();
        assert_eq!(plan.sizes(), vec![4, 8, 16]);
        let mut rc = RoundCounters::default();
        let levels = build_level_sets(3, &plan, &p, &mut rc).unwrap();
        assert_eq!(levels.base, 0);
        assert_eq!(levels.t[2].len(), 16);
        assert_eq!(levels.t[1].len(), 8);
        assert_eq!(levels.t[0].len(), 4);
        // The first point of each pair, then of each group.
        let expected1: Vec<PointId> = (0..4).flat_map(|g| [12 + 4 * g, 13 + 4 * g]).map(PointId).collect();
        assert_eq!(levels.t[1], expected1);
        let expected0: Vec<PointId> = (0..4).map(|g| PointId(12 + 4 * g)).collect();
        assert_eq!(levels.t[0], expected0);
        assert_eq!(rc.nng_builds.len(), 2);

        let (state, plan, counters) = run_in_order(p.clone(), 4).unwrap();
        assert!(validate_cost_profile(&counters, &plan).passed);
        let last = &counters.rounds[2];
        assert!(last.history.history_visits > 0);
        assert_eq!(last.seeded_components, last.walked_components);
        let t: Vec<[PointId; 3]> = state.triangles();
        assert!(check_delaunay_property(&p, &t).passed);
    }

    #[test]
    fn cascade_stops_when_every_component_touches_s() {
        // Round 2 interleaves the round-1 points closely, so every new point's
        // component reaches an old one.
        let mut p = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        for q in p.clone() {
            p.push(Point::new(q.x + 0.01, q.y + 0.02));
            p.push(Point::new(q.x - 0.02, q.y + 0.01));
        }
        let plan = plan_rounds(p.len(), 4).unwrap();
        let mut rc = RoundCounters::default();
        let levels = build_level_sets(2, &plan, &p, &mut rc).unwrap();
        assert!(levels.t[0].is_empty());
        assert_eq!(levels.base, 0);
        assert_eq!(rc.nng_builds.len(), 1);
        let (state, _, counters) = run_in_order(p.clone(), 4).unwrap();
        assert_eq!(counters.rounds[1].history.history_visits, 0);
        assert!(counters.rounds[1].walk.walks > 0);
        assert!(check_delaunay_property(&p, &state.triangles()).passed);
    }

    #[test]
    fn clustered_input_matches_plain() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let centers: Vec<Point> = (0..6).map(|_| Point::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0))).collect();
        let p: Vec<Point> = (0..2000)
            .map(|i| {
                let c = centers[i % centers.len()];
                Point::new(c.x + rng.gen_range(-0.5..0.5), c.y + rng.gen_range(-0.5..0.5))
            })
            .collect();
        for seed in 0..3 {
            let r = run(&p, seed, 8).unwrap();
            assert_eq!(r.triangles(), run_plain(&p, seed).unwrap().triangles());
            assert!(validate_cost_profile(&r.counters, &r.plan).passed);
            assert_eq!(r.counters.total().walk_conflict_violations, 0);
        }
    }
}
