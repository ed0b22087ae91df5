//! Compressed quadtree over Morton-sorted points.
//!
//! Construction is one stack pass over the sorted keys: the level at which two
//! consecutive keys separate decides where a new branching cell is opened, so
//! no re-sorting happens after the radix sort. Nodes are then renumbered in
//! breadth-first order so that the children of every node are contiguous.
//!
//! Points that share a quantized key form a bucket cell. The bucket is the
//! quadtree leaf for that key; its members hang below it as point nodes so
//! that pair decompositions can still separate them.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::nng::morton::MortonKey;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Branching cell with 2 to 4 children.
    Cell,
    /// Leaf cell holding several points with the same key.
    Bucket,
    /// A single point.
    Point,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: NodeKind,
    /// Cell side is `2^level` grid units; point and bucket nodes have level 0.
    pub level: u32,
    pub anchor: MortonKey,
    pub first_child: u32,
    pub child_count: u32,
    /// Range into [`CompressedQuadtree::order`].
    pub start: u32,
    pub end: u32,
    /// Bounding box of the true coordinates below this node.
    pub lo: Point,
    pub hi: Point,
}

impl Node {
    pub fn children(&self) -> std::ops::Range<usize> {
        self.first_child as usize..(self.first_child + self.child_count) as usize
    }

    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Half the diagonal of the true bounding box.
    pub fn radius(&self) -> f64 {
        let dx = self.hi.x - self.lo.x;
        let dy = self.hi.y - self.lo.y;
        0.5 * (dx * dx + dy * dy).sqrt()
    }

    /// Squared distance from `p` to the bounding box.
    #[inline]
    pub fn dist2_to(&self, p: &Point) -> f64 {
        let dx = (self.lo.x - p.x).max(0.0).max(p.x - self.hi.x);
        let dy = (self.lo.y - p.y).max(0.0).max(p.y - self.hi.y);
        dx * dx + dy * dy
    }

    /// Distance between the bounding boxes of two nodes.
    pub fn box_distance(&self, other: &Node) -> f64 {
        let dx = (other.lo.x - self.hi.x).max(0.0).max(self.lo.x - other.hi.x);
        let dy = (other.lo.y - self.hi.y).max(0.0).max(self.lo.y - other.hi.y);
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct CompressedQuadtree {
    pub nodes: Vec<Node>,
    /// Point indices in Morton order; node ranges index into this.
    pub order: Vec<u32>,
    /// Node index of the point node for each input point.
    pub point_node: Vec<u32>,
    /// Number of quadtree cells (branching cells, buckets and singleton
    /// leaves) created by the stack pass, excluding bucket members.
    pub cells_created: usize,
}

pub const ROOT: usize = 0;

struct Pending {
    kind: NodeKind,
    level: u32,
    anchor: MortonKey,
    kids: [u32; 4],
    nkids: u8,
    start: u32,
    end: u32,
}

/// Builds the compressed quadtree of `points` whose keys are `keys` and whose
/// Morton order is `order` (as produced by [`radix_sort`](super::radix_sort)).
pub fn build_compressed_quadtree(
    points: &[Point],
    keys: &[MortonKey],
    order: &[u32],
) -> Result<CompressedQuadtree> {
    if points.is_empty() || order.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() != keys.len() || order.len() != points.len() {
        return Err(Error::InvalidParameter("points, keys and order differ in length".into()));
    }
    debug_assert!(order.windows(2).all(|w| keys[w[0] as usize] <= keys[w[1] as usize]));

    let key_at = |pos: usize| keys[order[pos] as usize];
    let mut pending: Vec<Pending> = Vec::new();
    let mut spine: Vec<u32> = Vec::new();

    let mut pos = 0usize;
    let mut prev_key: Option<MortonKey> = None;
    while pos < order.len() {
        let key = key_at(pos);
        let mut end = pos + 1;
        while end < order.len() && key_at(end) == key {
            end += 1;
        }
        let leaf = pending.len() as u32;
        pending.push(Pending {
            kind: if end - pos == 1 { NodeKind::Point } else { NodeKind::Bucket },
            level: 0,
            anchor: key,
            kids: [0; 4],
            nkids: 0,
            start: pos as u32,
            end: end as u32,
        });

        if let Some(prev) = prev_key {
            let level = prev.common_level(key);
            let mut last: Option<u32> = None;
            while let Some(&top) = spine.last() {
                if pending[top as usize].level >= level {
                    break;
                }
                spine.pop();
                if let Some(child) = last {
                    push_kid(&mut pending[top as usize], child);
                }
                last = Some(top);
            }
            let last = last.expect("the previous leaf is on the spine below any branching level");
            match spine.last() {
                Some(&top) if pending[top as usize].level == level => {
                    push_kid(&mut pending[top as usize], last);
                }
                _ => {
                    let cell = pending.len() as u32;
                    let mut node = Pending {
                        kind: NodeKind::Cell,
                        level,
                        anchor: key.cell_anchor(level),
                        kids: [0; 4],
                        nkids: 0,
                        start: 0,
                        end: 0,
                    };
                    push_kid(&mut node, last);
                    pending.push(node);
                    spine.push(cell);
                }
            }
        }
        spine.push(leaf);
        prev_key = Some(key);
        pos = end;
    }
    let mut last: Option<u32> = None;
    while let Some(top) = spine.pop() {
        if let Some(child) = last {
            push_kid(&mut pending[top as usize], child);
        }
        last = Some(top);
    }
    let root = last.expect("nonempty input");
    let cells_created = pending.len();

    // Breadth-first renumbering; bucket members become point nodes.
    let mut nodes: Vec<Node> = Vec::with_capacity(2 * points.len());
    let mut source: Vec<u32> = Vec::with_capacity(2 * points.len());
    let mut point_node = vec![u32::MAX; points.len()];
    let blank = |kind, level, anchor, start, end| Node {
        kind,
        level,
        anchor,
        first_child: 0,
        child_count: 0,
        start,
        end,
        lo: Point::default(),
        hi: Point::default(),
    };
    let r = &pending[root as usize];
    nodes.push(blank(r.kind, r.level, r.anchor, r.start, r.end));
    source.push(root);
    let mut head = 0;
    while head < nodes.len() {
        let src = source[head];
        let first = nodes.len() as u32;
        if src != u32::MAX {
            let p = &pending[src as usize];
            match p.kind {
                NodeKind::Cell => {
                    for &k in &p.kids[..p.nkids as usize] {
                        let c = &pending[k as usize];
                        nodes.push(blank(c.kind, c.level, c.anchor, c.start, c.end));
                        source.push(k);
                    }
                }
                NodeKind::Bucket => {
                    for at in p.start..p.end {
                        nodes.push(blank(NodeKind::Point, 0, p.anchor, at, at + 1));
                        source.push(u32::MAX);
                    }
                }
                NodeKind::Point => {}
            }
        }
        let count = nodes.len() as u32 - first;
        let node = &mut nodes[head];
        node.first_child = first;
        node.child_count = count;
        head += 1;
    }

    // Children follow their parents, so a reverse sweep sees children first.
    for i in (0..nodes.len()).rev() {
        if nodes[i].kind == NodeKind::Point {
            let at = nodes[i].start as usize;
            let p = points[order[at] as usize];
            point_node[order[at] as usize] = i as u32;
            nodes[i].lo = p;
            nodes[i].hi = p;
            continue;
        }
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (first, count) = (nodes[i].first_child as usize, nodes[i].child_count as usize);
        let mut start = u32::MAX;
        let mut end = 0;
        for c in &nodes[first..first + count] {
            lo.x = lo.x.min(c.lo.x);
            lo.y = lo.y.min(c.lo.y);
            hi.x = hi.x.max(c.hi.x);
            hi.y = hi.y.max(c.hi.y);
            start = start.min(c.start);
            end = end.max(c.end);
        }
        let node = &mut nodes[i];
        node.lo = lo;
        node.hi = hi;
        node.start = start;
        node.end = end;
    }

    Ok(CompressedQuadtree {
        nodes,
        order: order.to_vec(),
        point_node,
        cells_created,
    })
}

fn push_kid(node: &mut Pending, kid: u32) {
    assert!(node.nkids < 4, "a quadtree cell has at most four children");
    node.kids[node.nkids as usize] = kid;
    node.nkids += 1;
}

impl CompressedQuadtree {
    pub fn root(&self) -> &Node {
        &self.nodes[ROOT]
    }

    /// Input indices of the points below `node`.
    pub fn points_of(&self, node: usize) -> &[u32] {
        let n = &self.nodes[node];
        &self.order[n.start as usize..n.end as usize]
    }
}
