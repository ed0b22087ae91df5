//! Sort-based nearest-neighbor machinery: Morton keys, radix sort, compressed
//! quadtree, well-separated pairs, exact nearest-neighbor graphs.

mod graph;
mod morton;
mod quadtree;
mod wspd;

pub use graph::{
    compute_spread, connected_components, nearest_neighbor_graph, quantization_bits, Components,
    NngGraph, Spread,
};
pub use morton::{morton_key, radix_sort, MortonKey};
pub use quadtree::{build_compressed_quadtree, CompressedQuadtree, Node, NodeKind, ROOT};
pub use wspd::{compute_wspd, WspdPair, DEFAULT_SEPARATION};
