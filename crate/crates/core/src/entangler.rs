//! Entangling labelings for noncomplete graphs.
//!
//! For a split `p x q` with `p >= 3` and minimum degree `d >= q`, the
//! construction picks a minimum-degree pivot `x`, a set `U` of `q` vertices
//! containing `x`, and a set `W` of `p - 1` vertices outside `U` with many
//! edges into `U`. Labeling `U` as `(1, w_i)` with `x = (1, 1)` and `W` as
//! `(j, 1)` makes every `x`-`U` edge and every `U`-`W` edge land on `x` in the
//! partial-transpose graph, so `deg_pT(x) = e({x}, U) + e(U, W) > d`.
//!
//! Everything else (`d < q`, `p = 2`) goes through [`fallback_search`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::labeling::{enumerate_labelings, labeling_count, TensorShape, VertexLabeling};
use crate::pigeonhole::{select_boxes, BoxDistribution};
use crate::pt_graph::{pt_degrees, BipartiteSplit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `0 < s < p - 1`
    Case1,
    /// `p - 1 <= s < k`
    Case2,
    /// `s = 0`
    Case3,
    FallbackSearch,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Case1 => "CASE1",
            CaseTag::Case2 => "CASE2",
            CaseTag::Case3 => "CASE3",
            CaseTag::FallbackSearch => "FALLBACK_SEARCH",
        }
    }
}

/// `k = q(p-1)`, `t = q(d-q+1) = r k + s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseArithmetic {
    pub k: usize,
    pub t: usize,
    pub r: usize,
    pub s: usize,
}

impl CaseArithmetic {
    pub fn new(p: usize, q: usize, d: usize) -> Option<Self> {
        if d < q || p < 2 {
            return None;
        }
        let k = q * (p - 1);
        let t = q * (d - q + 1);
        Some(CaseArithmetic { k, t, r: t / k, s: t % k })
    }

    pub fn case(&self, p: usize) -> CaseTag {
        if self.s == 0 {
            CaseTag::Case3
        } else if self.s < p - 1 {
            CaseTag::Case1
        } else {
            CaseTag::Case2
        }
    }

    /// Lower bound on `e(U, W)` the case guarantees.
    pub fn case_bound(&self, p: usize) -> usize {
        match self.case(p) {
            CaseTag::Case1 => self.r * (p - 1) + self.s,
            CaseTag::Case2 => (self.r + 1) * (p - 1),
            _ => self.r * (p - 1) + 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EntanglingCertificate {
    pub labeling: VertexLabeling,
    pub split: BipartiteSplit,
    pub case: CaseTag,
    pub pivot: usize,
    /// `U`, pivot first. Empty for search results.
    pub u_set: Vec<usize>,
    /// `W`, in the order labelled `(2,1), (3,1), ...`. Empty for search results.
    pub w_set: Vec<usize>,
    pub min_degree: usize,
    pub arithmetic: Option<CaseArithmetic>,
    pub pivot_degree: usize,
    pub pivot_pt_degree: usize,
    /// `e({x}, U)` and `e(U, W)` for constructive cases.
    pub edges_pivot_u: usize,
    pub edges_u_w: usize,
    /// `e(U, V \ U)` for constructive cases.
    pub edges_u_out: usize,
}

pub fn entangling_labeling(g: &Graph, split: &BipartiteSplit) -> Result<EntanglingCertificate> {
    let (p, q) = (split.p(), split.q());
    split.shape().check_order(g.order())?;
    if !g.has_edges() {
        return Err(Error::EmptyGraph);
    }
    if g.is_complete() {
        return Err(Error::NoEntanglingLabeling);
    }
    if p < 3 {
        return Err(Error::Precondition(format!("a split with p >= 3, got {}", split.describe())));
    }
    let d = g.min_degree().expect("n >= 4");
    let arith = CaseArithmetic::new(p, q, d)
        .ok_or_else(|| Error::Precondition(format!("minimum degree d >= q, got d={d}, q={q}")))?;
    let case = arith.case(p);
    let x = (0..g.order()).find(|&v| g.degree(v) == d).expect("minimum is attained");

    let mut u_set = vec![x];
    let neighbors = g.neighbors(x);
    if case == CaseTag::Case3 {
        let y = (0..g.order())
            .find(|&v| v != x && !g.has_edge(x, v))
            .expect("noncomplete graph has a non-neighbour of a minimum-degree vertex");
        u_set.push(y);
        u_set.extend(neighbors.take(q - 2));
    } else {
        u_set.extend(neighbors.take(q - 1));
    }
    let u_mask = g.vertex_mask(&u_set)?;
    let outside: Vec<usize> = (0..g.order()).filter(|&v| u_mask >> v & 1 == 0).collect();
    let weights = outside.iter().map(|&v| (g.neighbor_mask(v) & u_mask).count_ones() as u64).collect();
    let chosen = select_boxes(&BoxDistribution::new(weights)?, p - 1)?;
    let w_set: Vec<usize> = chosen.boxes.iter().map(|&i| outside[i]).collect();

    let mut perm = vec![usize::MAX; g.order()];
    let mut taken = vec![false; g.order()];
    let mut place = |vertex: usize, v: usize, w: usize| {
        let flat = split.join(v, w);
        perm[vertex] = flat;
        taken[flat] = true;
    };
    for (i, &vertex) in u_set.iter().enumerate() {
        place(vertex, 0, i);
    }
    for (j, &vertex) in w_set.iter().enumerate() {
        place(vertex, j + 1, 0);
    }
    let mut free = (0..g.order()).filter(|&f| !taken[f]);
    for slot in perm.iter_mut().filter(|f| **f == usize::MAX) {
        *slot = free.next().expect("bijection has room");
    }
    let labeling = VertexLabeling::new(split.shape().clone(), perm)?;

    let edges_pivot_u = g.edges_between(&[x], &u_set[1..])?;
    let edges_u_w = g.edges_between(&u_set, &w_set)?;
    let edges_u_out = g.edges_between_masks(u_mask, !u_mask & crate::graph::low_mask(g.order()));
    let pivot_pt_degree = pt_degrees(g, &labeling, split)?[x];

    let cert = EntanglingCertificate {
        labeling,
        split: split.clone(),
        case,
        pivot: x,
        u_set,
        w_set,
        min_degree: d,
        arithmetic: Some(arith),
        pivot_degree: d,
        pivot_pt_degree,
        edges_pivot_u,
        edges_u_w,
        edges_u_out,
    };
    check_construction(&cert, p, q)?;
    Ok(cert)
}

/// Runtime checks of the counting argument on a constructed certificate.
fn check_construction(c: &EntanglingCertificate, p: usize, q: usize) -> Result<()> {
    let fail = |msg: String| Err(Error::CertificateCheck(msg));
    let a = c.arithmetic.expect("constructive certificate");
    let d = c.min_degree;
    if a.r * a.k + a.s != a.t || a.t != q * (d + 1 - q) {
        return fail(format!("arithmetic {a:?} inconsistent with d={d}"));
    }
    let pivot_u_expected = if c.case == CaseTag::Case3 { q - 2 } else { q - 1 };
    if c.edges_pivot_u != pivot_u_expected {
        return fail(format!("e(x,U) = {}, expected {pivot_u_expected}", c.edges_pivot_u));
    }
    let out_bound = if c.case == CaseTag::Case3 { a.t + 2 } else { a.t };
    if c.edges_u_out < out_bound {
        return fail(format!("e(U, V\\U) = {} below {out_bound}", c.edges_u_out));
    }
    if c.edges_u_w < a.case_bound(p) {
        return fail(format!("e(U,W) = {} below case bound {}", c.edges_u_w, a.case_bound(p)));
    }
    if c.pivot_pt_degree != c.edges_pivot_u + c.edges_u_w {
        return fail(format!(
            "deg_pT(x) = {} but e(x,U) + e(U,W) = {}",
            c.pivot_pt_degree,
            c.edges_pivot_u + c.edges_u_w
        ));
    }
    if c.pivot_pt_degree <= d {
        return fail(format!("deg_pT(x) = {} does not exceed d = {d}", c.pivot_pt_degree));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Reduced enumeration is used when it has at most this many labelings;
    /// otherwise this many random labelings are drawn.
    pub labelings: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { labelings: 1_000_000, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Box<EntanglingCertificate>),
    /// `exhaustive` means every labeling orbit was checked, so none exists.
    NotFound { tried: u64, exhaustive: bool },
}

/// Look for a labeling violating the degree condition under `split`.
pub fn fallback_search(g: &Graph, split: &BipartiteSplit, budget: SearchBudget) -> Result<SearchOutcome> {
    split.shape().check_order(g.order())?;
    if !g.has_edges() {
        return Err(Error::EmptyGraph);
    }
    if g.is_complete() {
        return Err(Error::NoEntanglingLabeling);
    }
    if budget.labelings == 0 {
        return invalid("search budget must be at least 1");
    }
    let (p, q) = (split.p(), split.q());
    let split_shape = TensorShape::new(vec![p, q])?;
    let mut tried = 0u64;
    let hit = |lab: VertexLabeling| -> Result<Option<EntanglingCertificate>> {
        let pt = pt_degrees(g, &lab, split)?;
        Ok((0..g.order()).find(|&v| pt[v] != g.degree(v)).map(|x| EntanglingCertificate {
            labeling: lab,
            split: split.clone(),
            case: CaseTag::FallbackSearch,
            pivot: x,
            u_set: Vec::new(),
            w_set: Vec::new(),
            min_degree: g.min_degree().unwrap_or(0),
            arithmetic: None,
            pivot_degree: g.degree(x),
            pivot_pt_degree: pt[x],
            edges_pivot_u: 0,
            edges_u_w: 0,
            edges_u_out: 0,
        }))
    };

    if labeling_count(&split_shape, true) <= budget.labelings {
        // Orbits of the two-block shape: permutations inside V, inside W, and
        // the V/W swap when p = q all preserve the degree condition.
        for two_block in enumerate_labelings(g.order(), &split_shape, true)? {
            tried += 1;
            let perm = two_block
                .as_permutation()
                .iter()
                .map(|&f| split.join(f / q, f % q))
                .collect();
            if let Some(cert) = hit(VertexLabeling::new(split.shape().clone(), perm)?)? {
                return Ok(SearchOutcome::Found(Box::new(cert)));
            }
        }
        return Ok(SearchOutcome::NotFound { tried, exhaustive: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    while tried < budget.labelings {
        tried += 1;
        if let Some(cert) = hit(VertexLabeling::random(split.shape().clone(), &mut rng))? {
            return Ok(SearchOutcome::Found(Box::new(cert)));
        }
    }
    Ok(SearchOutcome::NotFound { tried, exhaustive: false })
}

/// Split handed to the construction for a shape: the largest single factor
/// `>= 3` against the rest, or for all-2 shapes with `m >= 3` every factor but
/// the last against the last. Two-qubit shapes get their only split.
pub fn construction_split(shape: &TensorShape) -> BipartiteSplit {
    let factors = shape.factors();
    let best = (0..factors.len())
        .filter(|&i| factors[i] >= 3)
        .max_by_key(|&i| (factors[i], std::cmp::Reverse(i)));
    let left: Vec<usize> = match best {
        Some(i) => vec![i],
        None if factors.len() >= 3 => (0..factors.len() - 1).collect(),
        None => vec![0],
    };
    BipartiteSplit::new(shape, &left).expect("valid factor list")
}

/// Construct an entangling labeling when the counting argument applies and
/// search otherwise.
pub fn entangle(g: &Graph, shape: &TensorShape, budget: SearchBudget) -> Result<EntanglingCertificate> {
    shape.check_order(g.order())?;
    if !g.has_edges() {
        return Err(Error::EmptyGraph);
    }
    if g.is_complete() {
        return Err(Error::NoEntanglingLabeling);
    }
    let split = construction_split(shape);
    let d = g.min_degree().expect("n >= 4");
    if split.p() >= 3 && d >= split.q() {
        return entangling_labeling(g, &split);
    }
    match fallback_search(g, &split, budget)? {
        SearchOutcome::Found(cert) => Ok(*cert),
        SearchOutcome::NotFound { tried, exhaustive } => Err(Error::SearchExhausted { tried, exhaustive }),
    }
}
