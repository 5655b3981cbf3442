//! Partial-transpose graphs and the vertex degree condition.

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::labeling::{TensorShape, VertexLabeling};

/// Grouping of a shape's factors into a left block (`V`, size `p`) and a
/// right block (`W`, size `q`). Coordinates inside each block are mixed radix
/// in the shape's factor order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteSplit {
    shape: TensorShape,
    left: Vec<usize>,
    right: Vec<usize>,
    p: usize,
    q: usize,
    to_vw: Vec<(usize, usize)>,
    from_vw: Vec<usize>,
}

impl BipartiteSplit {
    /// `left` lists the factor positions merged into `V`; the rest form `W`.
    pub fn new(shape: &TensorShape, left: &[usize]) -> Result<Self> {
        let m = shape.len();
        let mut in_left = vec![false; m];
        for &i in left {
            if i >= m || in_left[i] {
                return invalid(format!("bad factor list {left:?} for shape {shape}"));
            }
            in_left[i] = true;
        }
        let left: Vec<usize> = (0..m).filter(|&i| in_left[i]).collect();
        let right: Vec<usize> = (0..m).filter(|&i| !in_left[i]).collect();
        if left.is_empty() || right.is_empty() {
            return invalid("both sides of a split need at least one factor");
        }
        let factors = shape.factors();
        let p: usize = left.iter().map(|&i| factors[i]).product();
        let q: usize = right.iter().map(|&i| factors[i]).product();
        let n = shape.size();
        let mut to_vw = Vec::with_capacity(n);
        let mut from_vw = vec![0; n];
        for f in 0..n {
            let c = shape.coords(f);
            let v = left.iter().fold(0, |acc, &i| acc * factors[i] + c[i]);
            let w = right.iter().fold(0, |acc, &i| acc * factors[i] + c[i]);
            to_vw.push((v, w));
            from_vw[v * q + w] = f;
        }
        Ok(BipartiteSplit { shape: shape.clone(), left, right, p, q, to_vw, from_vw })
    }

    /// The split of a two-factor shape: first factor against second.
    pub fn bipartite(shape: &TensorShape) -> Result<Self> {
        if shape.len() != 2 {
            return invalid(format!("shape {shape} is not bipartite"));
        }
        BipartiteSplit::new(shape, &[0])
    }

    /// Factor `i` against the merge of all others, for every `i`.
    pub fn single_factor_cuts(shape: &TensorShape) -> Vec<BipartiteSplit> {
        (0..shape.len())
            .map(|i| BipartiteSplit::new(shape, &[i]).expect("m >= 2 so both sides are nonempty"))
            .collect()
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn left_factors(&self) -> &[usize] {
        &self.left
    }

    pub fn right_factors(&self) -> &[usize] {
        &self.right
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// 0-based `(v, w)` of a flat tuple index.
    #[inline]
    pub fn split_index(&self, flat: usize) -> (usize, usize) {
        self.to_vw[flat]
    }

    /// Flat tuple index of 0-based `(v, w)`.
    #[inline]
    pub fn join(&self, v: usize, w: usize) -> usize {
        self.from_vw[v * self.q + w]
    }

    /// True when both splits induce the same unordered bipartition of factors.
    pub fn same_cut(&self, other: &BipartiteSplit) -> bool {
        self.shape == other.shape
            && ((self.left == other.left) || (self.left == other.right))
    }

    pub fn describe(&self) -> String {
        let side = |fs: &[usize]| {
            let parts: Vec<String> = fs.iter().map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", parts.join(","))
        };
        format!("{}|{} ({}x{})", side(&self.left), side(&self.right), self.p, self.q)
    }

    fn check(&self, g: &Graph, lab: &VertexLabeling) -> Result<()> {
        if lab.shape() != &self.shape {
            return invalid(format!(
                "labeling shape {} does not match split shape {}",
                lab.shape(),
                self.shape
            ));
        }
        if g.order() != lab.len() {
            return invalid(format!("labeling covers {} vertices, graph has {}", lab.len(), g.order()));
        }
        Ok(())
    }

    /// Image of the edge `{a, b}` under the partial-transpose edge map.
    #[inline]
    fn transpose_edge(&self, lab: &VertexLabeling, a: usize, b: usize) -> (usize, usize) {
        let (u, v) = self.to_vw[lab.index_of(a)];
        let (w, y) = self.to_vw[lab.index_of(b)];
        (lab.vertex_at(self.join(u, y)), lab.vertex_at(self.join(w, v)))
    }
}

/// The graph with edge `{(u,y),(w,v)}` for every edge `{(u,v),(w,y)}` of `g`.
pub fn partial_transpose_graph(g: &Graph, lab: &VertexLabeling, split: &BipartiteSplit) -> Result<Graph> {
    split.check(g, lab)?;
    let mut out = Graph::empty(g.order())?;
    for (a, b) in g.edges() {
        let (x, y) = split.transpose_edge(lab, a, b);
        out.add_edge(x, y)?;
    }
    Ok(out)
}

/// Degrees in the partial-transpose graph, without materializing it.
pub fn pt_degrees(g: &Graph, lab: &VertexLabeling, split: &BipartiteSplit) -> Result<Vec<usize>> {
    split.check(g, lab)?;
    let mut deg = vec![0; g.order()];
    for (a, b) in g.edges() {
        let (x, y) = split.transpose_edge(lab, a, b);
        deg[x] += 1;
        deg[y] += 1;
    }
    Ok(deg)
}

/// Whether every vertex keeps its degree in the partial-transpose graph.
pub fn degree_condition(g: &Graph, lab: &VertexLabeling, split: &BipartiteSplit) -> Result<bool> {
    let pt = pt_degrees(g, lab, split)?;
    Ok((0..g.order()).all(|v| g.degree(v) == pt[v]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    pub degrees: Vec<usize>,
    pub pt_degrees: Vec<usize>,
}

impl DegreeReport {
    pub fn holds(&self) -> bool {
        self.degrees == self.pt_degrees
    }

    /// Vertices whose degree changes.
    pub fn violations(&self) -> Vec<usize> {
        (0..self.degrees.len()).filter(|&v| self.degrees[v] != self.pt_degrees[v]).collect()
    }
}

pub fn degree_report(g: &Graph, lab: &VertexLabeling, split: &BipartiteSplit) -> Result<DegreeReport> {
    Ok(DegreeReport { degrees: g.degrees(), pt_degrees: pt_degrees(g, lab, split)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, complete_graph, path_graph};

    fn s22() -> TensorShape {
        "2x2".parse().unwrap()
    }

    #[test]
    fn k22_is_fixed() {
        let g = complete_bipartite(2, 2).unwrap();
        // parts {0,1} and {2,3}; label 0->(1,1), 2->(1,2), 3->(2,1), 1->(2,2)
        // so that the parts become {(1,1),(2,2)} and {(1,2),(2,1)}.
        let lab = VertexLabeling::new(s22(), vec![0, 3, 1, 2]).unwrap();
        let split = BipartiteSplit::bipartite(&s22()).unwrap();
        assert_eq!(partial_transpose_graph(&g, &lab, &split).unwrap(), g);
        assert!(degree_condition(&g, &lab, &split).unwrap());
    }

    #[test]
    fn p4_example() {
        let g = path_graph(4).unwrap();
        let lab = VertexLabeling::identity(s22());
        let split = BipartiteSplit::bipartite(&s22()).unwrap();
        let pt = partial_transpose_graph(&g, &lab, &split).unwrap();
        assert_eq!(pt, Graph::from_edges(4, &[(0, 1), (0, 3), (2, 3)]).unwrap());
        assert_eq!(pt.degree(0), 2);
        assert!(!degree_condition(&g, &lab, &split).unwrap());
        let report = degree_report(&g, &lab, &split).unwrap();
        assert_eq!(report.pt_degrees, vec![2, 1, 1, 2]);
        assert_eq!(report.violations(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn complete_graph_always_holds() {
        let s: TensorShape = "2x3".parse().unwrap();
        let g = complete_graph(6).unwrap();
        for split in BipartiteSplit::single_factor_cuts(&s) {
            let lab = VertexLabeling::new(s.clone(), vec![3, 1, 4, 0, 5, 2]).unwrap();
            assert!(degree_condition(&g, &lab, &split).unwrap());
        }
    }

    #[test]
    fn split_coordinates() {
        let s: TensorShape = "2x3x2".parse().unwrap();
        let split = BipartiteSplit::new(&s, &[1]).unwrap();
        assert_eq!((split.p(), split.q()), (3, 4));
        assert_eq!(split.right_factors(), &[0, 2]);
        for f in 0..12 {
            let (v, w) = split.split_index(f);
            assert_eq!(split.join(v, w), f);
        }
        // tuple (2,3,1): v = 2, w = 1*2 + 0 = 2
        let f = s.flatten(&[2, 3, 1]).unwrap();
        assert_eq!(split.split_index(f), (2, 2));
        assert!(BipartiteSplit::new(&s, &[0, 1, 2]).is_err());
        assert!(BipartiteSplit::new(&s, &[]).is_err());
        assert!(BipartiteSplit::new(&s, &[3]).is_err());
        let other = BipartiteSplit::new(&s, &[0, 2]).unwrap();
        assert!(split.same_cut(&other));
    }

    #[test]
    fn mismatched_inputs() {
        let g = path_graph(4).unwrap();
        let s: TensorShape = "2x3".parse().unwrap();
        let lab = VertexLabeling::identity(s22());
        let split = BipartiteSplit::bipartite(&s).unwrap();
        assert!(partial_transpose_graph(&g, &lab, &split).is_err());
    }
}
