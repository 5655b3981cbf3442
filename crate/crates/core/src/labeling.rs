//! Tensor shapes, vertex labelings and labeling enumeration.
//!
//! A labeling maps every vertex to a tuple in `{1..p1} x ... x {1..pm}`. It is
//! stored as the permutation `perm[v] = flatten(tuple(v))`, where flattening is
//! mixed radix with the first factor most significant (Kronecker order).
//!
//! Reduced enumeration yields one labeling per orbit of the tuple-space group
//! generated by permutations inside each factor and swaps of equal-size
//! factors. That group acts on tuples faithfully, so it acts freely on
//! bijections and every orbit has exactly [`TensorShape::group_order`] members.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::MAX_VERTICES;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorShape {
    factors: Vec<usize>,
}

impl TensorShape {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.len() < 2 {
            return invalid("a tensor shape needs at least two factors");
        }
        if let Some(&p) = factors.iter().find(|&&p| p < 2) {
            return invalid(format!("every factor must be >= 2, got {p}"));
        }
        let n = factors.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p));
        match n {
            Some(n) if n <= MAX_VERTICES => Ok(TensorShape { factors }),
            _ => invalid(format!("shape {factors:?} exceeds {MAX_VERTICES} vertices")),
        }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Product of the factors.
    pub fn size(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn check_order(&self, n: usize) -> Result<()> {
        if self.size() != n {
            return invalid(format!("shape {self} has {} entries, graph has {n} vertices", self.size()));
        }
        Ok(())
    }

    /// Mixed-radix index of a 1-based tuple.
    pub fn flatten(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.factors.len() {
            return invalid(format!("tuple {tuple:?} does not match shape {self}"));
        }
        let mut idx = 0;
        for (&t, &p) in tuple.iter().zip(&self.factors) {
            if t == 0 || t > p {
                return invalid(format!("tuple component {t} outside 1..={p}"));
            }
            idx = idx * p + (t - 1);
        }
        Ok(idx)
    }

    /// Inverse of [`flatten`](Self::flatten); returns a 1-based tuple.
    pub fn unflatten(&self, index: usize) -> Result<Vec<usize>> {
        if index >= self.size() {
            return invalid(format!("index {index} outside 0..{}", self.size()));
        }
        Ok(self.coords(index).into_iter().map(|c| c + 1).collect())
    }

    /// 0-based coordinates of a flat index (no range check).
    pub(crate) fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &p) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % p;
            index /= p;
        }
        out
    }

    pub(crate) fn index_of(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.factors).fold(0, |acc, (&c, &p)| acc * p + c)
    }

    /// Order of the reduction group: `prod(p_i!) * prod(multiplicity!)`.
    pub fn group_order(&self) -> u64 {
        let within: u64 = self.factors.iter().map(|&p| factorial(p)).product();
        within * self.factor_permutations().len() as u64
    }

    /// Permutations `pi` of factor positions with `factors[pi[i]] == factors[i]`.
    pub(crate) fn factor_permutations(&self) -> Vec<Vec<usize>> {
        permutations(self.factors.len())
            .into_iter()
            .filter(|pi| pi.iter().enumerate().all(|(i, &j)| self.factors[i] == self.factors[j]))
            .collect()
    }

    /// Every element of the reduction group as a permutation of flat indices.
    pub fn symmetry_group(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let value_perms: Vec<Vec<Vec<usize>>> =
            self.factors.iter().map(|&p| permutations(p)).collect();
        let mut group = Vec::new();
        for pi in self.factor_permutations() {
            // Cartesian product over per-factor value permutations.
            let mut choice = vec![0usize; self.factors.len()];
            loop {
                let g: Vec<usize> = (0..n)
                    .map(|f| {
                        let c = self.coords(f);
                        let mut out = vec![0; c.len()];
                        for i in 0..c.len() {
                            out[pi[i]] = value_perms[i][choice[i]][c[i]];
                        }
                        self.index_of(&out)
                    })
                    .collect();
                group.push(g);
                let mut i = 0;
                while i < choice.len() {
                    choice[i] += 1;
                    if choice[i] < value_perms[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
            }
        }
        group
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for TensorShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .trim()
            .split(['x', 'X'])
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad shape component {part:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        TensorShape::new(factors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexLabeling {
    shape: TensorShape,
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl VertexLabeling {
    /// `perm[v]` is the flat tuple index assigned to vertex `v`.
    pub fn new(shape: TensorShape, perm: Vec<usize>) -> Result<Self> {
        let n = shape.size();
        if perm.len() != n {
            return invalid(format!("labeling has {} entries, shape {shape} needs {n}", perm.len()));
        }
        let mut inverse = vec![usize::MAX; n];
        for (v, &f) in perm.iter().enumerate() {
            if f >= n || inverse[f] != usize::MAX {
                return invalid(format!("labeling {perm:?} is not a permutation of 0..{n}"));
            }
            inverse[f] = v;
        }
        Ok(VertexLabeling { shape, perm, inverse })
    }

    pub fn identity(shape: TensorShape) -> Self {
        let perm: Vec<usize> = (0..shape.size()).collect();
        VertexLabeling { inverse: perm.clone(), shape, perm }
    }

    /// Build from 1-based tuples, one per vertex.
    pub fn from_tuples(shape: TensorShape, tuples: &[Vec<usize>]) -> Result<Self> {
        let perm = tuples.iter().map(|t| shape.flatten(t)).collect::<Result<Vec<_>>>()?;
        VertexLabeling::new(shape, perm)
    }

    pub fn random<R: Rng + ?Sized>(shape: TensorShape, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..shape.size()).collect();
        perm.shuffle(rng);
        VertexLabeling::new(shape, perm).expect("shuffle yields a permutation")
    }

    /// Parse a permutation line `s(0) s(1) ... s(n-1)`.
    pub fn parse_line(line: &str, shape: TensorShape) -> Result<Self> {
        let perm = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad labeling entry {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        VertexLabeling::new(shape, perm)
    }

    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self.perm.iter().map(|f| f.to_string()).collect();
        parts.join(" ")
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_permutation(&self) -> &[usize] {
        &self.perm
    }

    #[inline]
    pub fn index_of(&self, vertex: usize) -> usize {
        self.perm[vertex]
    }

    #[inline]
    pub fn vertex_at(&self, index: usize) -> usize {
        self.inverse[index]
    }

    /// 1-based tuple of `vertex`.
    pub fn tuple(&self, vertex: usize) -> Vec<usize> {
        self.shape.coords(self.perm[vertex]).into_iter().map(|c| c + 1).collect()
    }

    /// Apply a tuple-space permutation `g` (on flat indices): the result labels
    /// `v` with `g(perm[v])`.
    pub fn act(&self, g: &[usize]) -> Result<Self> {
        VertexLabeling::new(self.shape.clone(), self.perm.iter().map(|&f| g[f]).collect())
    }
}

/// Stream of labelings of `n` vertices with the given shape.
pub fn enumerate_labelings(n: usize, shape: &TensorShape, reduced: bool) -> Result<Labelings> {
    shape.check_order(n)?;
    let inner = if reduced {
        Inner::Reduced(ReducedLabelings::new(shape))
    } else {
        Inner::Full { perm: (0..n).collect(), done: false }
    };
    Ok(Labelings { shape: shape.clone(), inner })
}

/// Number of labelings an enumeration will yield.
pub fn labeling_count(shape: &TensorShape, reduced: bool) -> u64 {
    let all = factorial(shape.size());
    if reduced {
        all / shape.group_order()
    } else {
        all
    }
}

pub struct Labelings {
    shape: TensorShape,
    inner: Inner,
}

enum Inner {
    Full { perm: Vec<usize>, done: bool },
    Reduced(ReducedLabelings),
}

impl Iterator for Labelings {
    type Item = VertexLabeling;

    fn next(&mut self) -> Option<VertexLabeling> {
        let perm = match &mut self.inner {
            Inner::Full { perm, done } => {
                if *done {
                    return None;
                }
                let out = perm.clone();
                *done = !next_permutation(perm);
                out
            }
            Inner::Reduced(r) => r.next_perm()?,
        };
        let mut inverse = vec![0; perm.len()];
        for (v, &f) in perm.iter().enumerate() {
            inverse[f] = v;
        }
        Some(VertexLabeling { shape: self.shape.clone(), perm, inverse })
    }
}

/// Depth-first generation of orbit-minimal labelings in lexicographic order.
///
/// Within-factor minimality is equivalent to every coordinate sequence
/// `coord_i(perm[0]), coord_i(perm[1]), ...` being a restricted-growth string;
/// this is enforced while descending. Factor swaps are checked at the leaves.
struct ReducedLabelings {
    shape: TensorShape,
    coords: Vec<Vec<usize>>,
    swaps: Vec<Vec<usize>>,
    perm: Vec<usize>,
    next: Vec<usize>,
    used: u64,
    // max coordinate seen so far per factor, one row per depth (+1 offset so -1 fits as 0)
    seen: Vec<Vec<usize>>,
    done: bool,
}

impl ReducedLabelings {
    fn new(shape: &TensorShape) -> Self {
        let n = shape.size();
        let m = shape.len();
        let swaps = shape
            .factor_permutations()
            .into_iter()
            .filter(|pi| pi.iter().enumerate().any(|(i, &j)| i != j))
            .collect();
        ReducedLabelings {
            coords: (0..n).map(|f| shape.coords(f)).collect(),
            shape: shape.clone(),
            swaps,
            perm: Vec::with_capacity(n),
            next: vec![0; n + 1],
            used: 0,
            seen: vec![vec![0; m]; n + 1],
            done: false,
        }
    }

    fn next_perm(&mut self) -> Option<Vec<usize>> {
        let n = self.coords.len();
        while !self.done {
            let depth = self.perm.len();
            if depth == n {
                let leaf = self.perm.clone();
                let last = self.perm.pop().expect("depth n > 0");
                self.used &= !(1 << last);
                if self.swap_minimal(&leaf) {
                    return Some(leaf);
                }
                continue;
            }
            let start = self.next[depth];
            let found = (start..n).find(|&f| {
                self.used >> f & 1 == 0
                    && self.coords[f].iter().zip(&self.seen[depth]).all(|(&c, &s)| c <= s)
            });
            match found {
                Some(f) => {
                    self.next[depth] = f + 1;
                    self.perm.push(f);
                    self.used |= 1 << f;
                    let row: Vec<usize> = self.coords[f]
                        .iter()
                        .zip(&self.seen[depth])
                        .map(|(&c, &s)| s.max(c + 1))
                        .collect();
                    self.seen[depth + 1] = row;
                    self.next[depth + 1] = 0;
                }
                None => {
                    if depth == 0 {
                        self.done = true;
                    } else {
                        let last = self.perm.pop().expect("depth > 0");
                        self.used &= !(1 << last);
                    }
                }
            }
        }
        None
    }

    fn swap_minimal(&self, perm: &[usize]) -> bool {
        self.swaps.iter().all(|pi| {
            let image = rg_normalize(&self.shape, &self.coords, perm, Some(pi));
            image.as_slice() >= perm
        })
    }
}

/// Move factor `i` to position `pi[i]` (if given), then relabel every
/// coordinate in order of first appearance along the vertex sequence.
fn rg_normalize(
    shape: &TensorShape,
    coords: &[Vec<usize>],
    perm: &[usize],
    pi: Option<&[usize]>,
) -> Vec<usize> {
    let m = shape.len();
    let mut relabel: Vec<Vec<usize>> = shape.factors().iter().map(|&p| vec![usize::MAX; p]).collect();
    let mut next_val = vec![0usize; m];
    let mut out = Vec::with_capacity(perm.len());
    let mut moved = vec![0usize; m];
    for &f in perm {
        let c = &coords[f];
        for i in 0..m {
            let pos = pi.map_or(i, |pi| pi[i]);
            moved[pos] = c[i];
        }
        for (pos, value) in moved.iter_mut().enumerate() {
            let slot = &mut relabel[pos][*value];
            if *slot == usize::MAX {
                *slot = next_val[pos];
                next_val[pos] += 1;
            }
            *value = *slot;
        }
        out.push(shape.index_of(&moved));
    }
    out
}

/// Lexicographically smallest member of the labeling's orbit.
pub fn canonical_form(labeling: &VertexLabeling) -> VertexLabeling {
    let shape = labeling.shape();
    let coords: Vec<Vec<usize>> = (0..shape.size()).map(|f| shape.coords(f)).collect();
    let best = shape
        .factor_permutations()
        .iter()
        .map(|pi| rg_normalize(shape, &coords, labeling.as_permutation(), Some(pi)))
        .min()
        .expect("identity is always a factor permutation");
    VertexLabeling::new(shape.clone(), best).expect("normalization preserves bijectivity")
}

/// Advance to the next permutation in lexicographic order; false after the last.
pub(crate) fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

pub(crate) fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}
