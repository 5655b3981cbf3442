//! Simple undirected graphs on at most 64 vertices, stored as dense bitset rows.
//!
//! Vertices are `0..n`. Each row of the adjacency matrix is a `u64`, which keeps
//! degree and cut counts down to a handful of popcounts.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest vertex count a [`Graph`] can hold.
pub const MAX_VERTICES: usize = 64;

/// Largest vertex count supported by the single-byte graph6 size header.
pub const MAX_GRAPH6_VERTICES: usize = 62;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Graph on `n` vertices without edges. `n = 0` is allowed here so that
    /// graph6 input such as `?` can be represented; builders reject it.
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return invalid(format!("at most {MAX_VERTICES} vertices supported, got {n}"));
        }
        Ok(Graph { n, rows: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return invalid(format!("edge ({u},{v}) out of range for n={}", self.n));
        }
        if u == v {
            return invalid(format!("self-loop at vertex {u}"));
        }
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
        Ok(())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Neighbourhood of `v` as a bitmask.
    #[inline]
    pub fn neighbor_mask(&self, v: usize) -> u64 {
        self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.rows[v])
    }

    /// Edges as `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| bits(self.rows[u] & !low_mask(u + 1)).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn has_edges(&self) -> bool {
        self.rows.iter().any(|&r| r != 0)
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn min_degree(&self) -> Option<usize> {
        (0..self.n).map(|v| self.degree(v)).min()
    }

    pub fn complement(&self) -> Graph {
        let full = low_mask(self.n);
        let rows = (0..self.n).map(|v| !self.rows[v] & full & !(1 << v)).collect();
        Graph { n: self.n, rows }
    }

    /// Number of edges with one endpoint in `a` and the other in `b`.
    /// The two sets must be disjoint.
    pub fn edges_between(&self, a: &[usize], b: &[usize]) -> Result<usize> {
        let ma = self.vertex_mask(a)?;
        let mb = self.vertex_mask(b)?;
        if ma & mb != 0 {
            return invalid("edges_between requires disjoint vertex sets");
        }
        Ok(self.edges_between_masks(ma, mb))
    }

    pub(crate) fn edges_between_masks(&self, a: u64, b: u64) -> usize {
        bits(a).map(|u| (self.rows[u] & b).count_ones() as usize).sum()
    }

    pub(crate) fn vertex_mask(&self, set: &[usize]) -> Result<u64> {
        let mut mask = 0u64;
        for &v in set {
            if v >= self.n {
                return invalid(format!("vertex {v} out of range for n={}", self.n));
            }
            mask |= 1 << v;
        }
        Ok(mask)
    }

    /// Encode as graph6 (no header, no trailing newline).
    pub fn to_graph6(&self) -> Result<String> {
        if self.n > MAX_GRAPH6_VERTICES {
            return invalid(format!(
                "graph6 output limited to {MAX_GRAPH6_VERTICES} vertices, got {}",
                self.n
            ));
        }
        let mut out = String::with_capacity(1 + (self.n * self.n / 12) + 1);
        out.push((self.n as u8 + 63) as char);
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = acc << 1 | self.has_edge(i, j) as u8;
                filled += 1;
                if filled == 6 {
                    out.push((acc + 63) as char);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push(((acc << (6 - filled)) + 63) as char);
        }
        Ok(out)
    }

    /// Decode a single graph6 string. An optional `>>graph6<<` header and
    /// surrounding whitespace are accepted.
    pub fn from_graph6(text: &str) -> Result<Graph> {
        let trimmed = text.trim();
        let lead = text.len() - text.trim_start().len();
        let (body, header_len) = match trimmed.strip_prefix(">>graph6<<") {
            Some(rest) => (rest, 10),
            None => (trimmed, 0),
        };
        let base = lead + header_len;
        let bytes = body.as_bytes();
        let parse_err = |offset: usize, message: String| Error::Graph6 {
            offset: base + offset,
            message,
        };
        let first = *bytes
            .first()
            .ok_or_else(|| parse_err(0, "empty input".into()))?;
        if first == b'~' {
            return Err(parse_err(0, "multi-byte size headers (n > 62) are not supported".into()));
        }
        if !(63..=125).contains(&first) {
            return Err(parse_err(0, format!("invalid size byte 0x{first:02x}")));
        }
        let n = (first - 63) as usize;
        let nbits = n * n.saturating_sub(1) / 2;
        let expected = 1 + nbits.div_ceil(6);
        if bytes.len() < expected {
            return Err(parse_err(
                bytes.len(),
                format!("truncated: expected {expected} bytes for n={n}, got {}", bytes.len()),
            ));
        }
        if bytes.len() > expected {
            return Err(parse_err(
                expected,
                format!("trailing data: expected {expected} bytes for n={n}"),
            ));
        }
        let mut g = Graph::empty(n)?;
        let mut k = 0usize;
        for (pos, &b) in bytes.iter().enumerate().skip(1) {
            if !(63..=126).contains(&b) {
                return Err(parse_err(pos, format!("invalid data byte 0x{b:02x}")));
            }
            let word = b - 63;
            for shift in (0..6).rev() {
                let bit = word >> shift & 1;
                if k >= nbits {
                    if bit != 0 {
                        return Err(parse_err(pos, "nonzero padding bit".into()));
                    }
                } else if bit == 1 {
                    let (i, j) = upper_triangle_pair(k);
                    g.rows[i] |= 1 << j;
                    g.rows[j] |= 1 << i;
                }
                k += 1;
            }
        }
        Ok(g)
    }
}

/// Map the `k`-th bit of the graph6 stream to its vertex pair `(i, j)`, `i < j`,
/// in column order: (0,1), (0,2), (1,2), (0,3), ...
fn upper_triangle_pair(k: usize) -> (usize, usize) {
    let mut j = 1;
    let mut start = 0;
    while start + j <= k {
        start += j;
        j += 1;
    }
    (k - start, j)
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterate over set bit positions of `mask`, lowest first.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return invalid("complete_graph requires n >= 1");
    }
    Ok(Graph::empty(n)?.complement())
}

/// `K_{r,s}` with parts `0..r` and `r..r+s`.
pub fn complete_bipartite(r: usize, s: usize) -> Result<Graph> {
    if r == 0 || s == 0 {
        return invalid("complete_bipartite requires both parts nonempty");
    }
    let mut g = Graph::empty(r + s)?;
    for u in 0..r {
        for v in r..r + s {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

pub fn path_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return invalid("path_graph requires n >= 1");
    }
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return invalid("cycle_graph requires n >= 3");
    }
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_counts() {
        let k4 = complete_graph(4).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert!(k4.degrees().iter().all(|&d| d == 3));
        assert_eq!(complete_graph(1).unwrap().edge_count(), 0);
        assert_eq!(complete_graph(9).unwrap().edge_count(), 36);
        assert!(complete_graph(0).is_err());
    }

    #[test]
    fn complete_bipartite_counts() {
        let k22 = complete_bipartite(2, 2).unwrap();
        assert_eq!(k22.edge_count(), 4);
        assert!(k22.degrees().iter().all(|&d| d == 2));
        assert_eq!(complete_bipartite(1, 5).unwrap().degrees(), vec![5, 1, 1, 1, 1, 1]);
        let k36 = complete_bipartite(3, 6).unwrap();
        assert_eq!((k36.order(), k36.edge_count()), (9, 18));
        assert!(complete_bipartite(0, 3).is_err());
        assert!(complete_bipartite(3, 0).is_err());
    }

    #[test]
    fn complements() {
        let k4 = complete_graph(4).unwrap();
        assert_eq!(k4.complement(), Graph::empty(4).unwrap());
        let two_k2 = complete_bipartite(2, 2).unwrap().complement();
        assert_eq!(two_k2, Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap());
    }

    #[test]
    fn edges_between_examples() {
        let k22 = complete_bipartite(2, 2).unwrap();
        assert_eq!(k22.edges_between(&[0, 1], &[2, 3]).unwrap(), 4);
        assert_eq!(k22.edges_between(&[], &[2, 3]).unwrap(), 0);
        let p4 = path_graph(4).unwrap();
        assert_eq!(p4.edges_between(&[0, 3], &[1, 2]).unwrap(), 2);
        assert!(p4.edges_between(&[0, 1], &[1, 2]).is_err());
        assert!(p4.edges_between(&[0], &[7]).is_err());
    }

    #[test]
    fn graph6_known_strings() {
        assert_eq!(Graph::from_graph6("C~").unwrap(), complete_graph(4).unwrap());
        assert_eq!(Graph::from_graph6("C?").unwrap(), Graph::empty(4).unwrap());
        // Strings below were produced by networkx.to_graph6_bytes.
        assert_eq!(path_graph(4).unwrap().to_graph6().unwrap(), "Ch");
        assert_eq!(complete_bipartite(2, 2).unwrap().to_graph6().unwrap(), "C]");
        assert_eq!(cycle_graph(6).unwrap().to_graph6().unwrap(), "EhEG");
        assert_eq!(complete_bipartite(1, 5).unwrap().to_graph6().unwrap(), "Esa?");
        assert_eq!(complete_bipartite(3, 6).unwrap().to_graph6().unwrap(), "HFzfFB_");
        assert_eq!(Graph::from_graph6(">>graph6<<C~\n").unwrap(), complete_graph(4).unwrap());
    }

    #[test]
    fn graph6_errors_carry_offsets() {
        match Graph::from_graph6("C") {
            Err(Error::Graph6 { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("{other:?}"),
        }
        match Graph::from_graph6("C~~") {
            Err(Error::Graph6 { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        match Graph::from_graph6("C\x20") {
            Err(Error::Graph6 { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("{other:?}"),
        }
        // n = 4 has 6 bits, so the single data byte carries no padding; n = 5
        // has 10 bits and two padding bits in the second byte.
        assert!(matches!(Graph::from_graph6("D?@"), Err(Error::Graph6 { offset: 2, .. })));
        assert!(Graph::from_graph6("").is_err());
        assert!(Graph::from_graph6("~?@").is_err());
    }

    #[test]
    fn upper_triangle_order() {
        let pairs: Vec<_> = (0..6).map(upper_triangle_pair).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]);
    }
}
