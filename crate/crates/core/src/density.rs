//! Laplacian density matrices and the PPT test.
//!
//! Matrices carry integer numerators and a single positive denominator
//! `2|E|`. Positive semidefiniteness is decided on the integer numerator, which
//! has the same verdict as the normalized matrix.
//!
//! `is_ppt` has two tiers. A floating symmetric eigensolve decides when the
//! smallest eigenvalue is clear of the tolerance band; everything inside the
//! band goes to the exact tier, which reads the signs of the integer
//! characteristic polynomial. NPT verdicts always carry an integer witness
//! vector whose quadratic form is checked exactly.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Scalar, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::labeling::VertexLabeling;
use crate::pt_graph::BipartiteSplit;

/// Default band around zero inside which the floating tier abstains.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// `L = D - A` with rows and columns ordered by flat tuple index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplacianMatrix {
    entries: DMatrix<i64>,
    edge_count: usize,
}

impl LaplacianMatrix {
    pub fn entries(&self) -> &DMatrix<i64> {
        &self.entries
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn trace(&self) -> i64 {
        self.entries.trace()
    }
}

pub fn laplacian(g: &Graph, lab: &VertexLabeling) -> Result<LaplacianMatrix> {
    if g.order() != lab.len() {
        return invalid(format!("labeling covers {} vertices, graph has {}", lab.len(), g.order()));
    }
    if !g.has_edges() {
        return Err(Error::EmptyGraph);
    }
    let n = g.order();
    let mut entries = DMatrix::<i64>::zeros(n, n);
    for v in 0..n {
        let i = lab.index_of(v);
        entries[(i, i)] = g.degree(v) as i64;
        for u in g.neighbors(v) {
            entries[(i, lab.index_of(u))] = -1;
        }
    }
    Ok(LaplacianMatrix { entries, edge_count: g.edge_count() })
}

/// `numerator / denominator` with `tr(numerator) = denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityMatrix {
    numerator: DMatrix<i64>,
    denominator: i64,
}

impl DensityMatrix {
    pub fn numerator(&self) -> &DMatrix<i64> {
        &self.numerator
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn dim(&self) -> usize {
        self.numerator.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Ratio<i64> {
        Ratio::new(self.numerator[(i, j)], self.denominator)
    }

    pub fn trace(&self) -> Ratio<i64> {
        Ratio::new(self.numerator.trace(), self.denominator)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let d = self.denominator as f64;
        self.numerator.map(|x| x as f64 / d)
    }

    pub fn is_psd_exact(&self) -> bool {
        is_psd_exact(&self.numerator)
    }

    /// Row-major `num/den` text, one matrix row per line, fractions reduced.
    pub fn to_rational_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let r = self.entry(i, j);
                    format!("{}/{}", r.numer(), r.denom())
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

pub fn normalize(l: &LaplacianMatrix) -> Result<DensityMatrix> {
    let trace = l.trace();
    if trace <= 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(DensityMatrix { numerator: l.entries.clone(), denominator: trace })
}

pub fn density_matrix(g: &Graph, lab: &VertexLabeling) -> Result<DensityMatrix> {
    normalize(&laplacian(g, lab)?)
}

/// Entry `((u,v),(w,y))` of the result is entry `((u,y),(w,v))` of `m`.
pub fn matrix_partial_transpose<T: Scalar>(m: &DMatrix<T>, split: &BipartiteSplit) -> Result<DMatrix<T>> {
    let n = split.shape().size();
    if m.nrows() != n || m.ncols() != n {
        return invalid(format!(
            "matrix is {}x{}, split {} needs {n}x{n}",
            m.nrows(),
            m.ncols(),
            split.describe()
        ));
    }
    Ok(DMatrix::from_fn(n, n, |row, col| {
        let (u, v) = split.split_index(row);
        let (w, y) = split.split_index(col);
        m[(split.join(u, y), split.join(w, v))].clone()
    }))
}

/// Coefficients of `det(xI - m)`, highest degree first, by Berkowitz's
/// division-free recurrence. Runs in `i128` and retries with big integers on
/// overflow.
pub fn characteristic_polynomial(m: &DMatrix<i64>) -> Vec<BigInt> {
    let small = m.map(|x| x as i128);
    if let Some(c) = berkowitz(&small) {
        return c.into_iter().map(BigInt::from).collect();
    }
    let big = m.map(BigInt::from);
    berkowitz(&big).expect("big integer arithmetic does not overflow")
}

fn berkowitz<T>(m: &DMatrix<T>) -> Option<Vec<T>>
where
    T: Scalar + Zero + One + CheckedAdd + CheckedSub + CheckedMul,
{
    let n = m.nrows();
    let neg = |x: &T| T::zero().checked_sub(x);
    let dot = |a: &[T], b: &[T]| -> Option<T> {
        a.iter().zip(b).try_fold(T::zero(), |acc, (x, y)| acc.checked_add(&x.checked_mul(y)?))
    };
    let mut poly = vec![T::one()];
    for r in 0..n {
        // Toeplitz column for the leading (r+1)x(r+1) block: 1, -a, -R C, -R S C, ...
        let row: Vec<T> = (0..r).map(|j| m[(r, j)].clone()).collect();
        let mut col: Vec<T> = (0..r).map(|i| m[(i, r)].clone()).collect();
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(T::one());
        toeplitz.push(neg(&m[(r, r)])?);
        for _ in 0..r {
            toeplitz.push(neg(&dot(&row, &col)?)?);
            let next: Option<Vec<T>> = (0..r)
                .map(|i| {
                    let srow: Vec<T> = (0..r).map(|j| m[(i, j)].clone()).collect();
                    dot(&srow, &col)
                })
                .collect();
            col = next?;
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = T::zero();
            for (j, c) in poly.iter().enumerate().take(i + 1) {
                acc = acc.checked_add(&toeplitz[i - j].checked_mul(c)?)?;
            }
            next.push(acc);
        }
        poly = next;
    }
    Some(poly)
}

/// A real symmetric matrix is PSD iff the coefficients of its characteristic
/// polynomial alternate in sign (zeros allowed).
pub fn is_psd_exact(m: &DMatrix<i64>) -> bool {
    characteristic_polynomial(m)
        .iter()
        .enumerate()
        .all(|(i, c)| if i % 2 == 0 { !c.is_negative() } else { !c.is_positive() })
}

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix.
pub fn min_eigenpair(m: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    (lambda, eig.eigenvectors.column(idx).iter().copied().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Float,
    Exact,
}

/// Integer vector `x` with `x^T M x < 0` for the partial-transposed numerator `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NptWitness {
    pub vector: Vec<i64>,
    /// `x^T M x` on the integer numerator; divide by the denominator for `x^T rho^pT x`.
    pub quadratic_form: i128,
}

#[derive(Clone, Debug)]
pub struct PptOutcome {
    pub ppt: bool,
    /// Smallest eigenvalue of the normalized partial transpose (floating).
    pub lambda_min: f64,
    pub decided_by: Tier,
    pub witness: Option<NptWitness>,
}

pub fn is_ppt(rho: &DensityMatrix, split: &BipartiteSplit) -> Result<PptOutcome> {
    is_ppt_with_tolerance(rho, split, DEFAULT_TOLERANCE)
}

pub fn is_ppt_with_tolerance(rho: &DensityMatrix, split: &BipartiteSplit, tolerance: f64) -> Result<PptOutcome> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return invalid(format!("tolerance must be positive, got {tolerance}"));
    }
    let pt = matrix_partial_transpose(rho.numerator(), split)?;
    let scaled = pt.map(|x| x as f64 / rho.denominator() as f64);
    let (lambda_min, eigvec) = min_eigenpair(&scaled);
    if lambda_min > tolerance {
        return Ok(PptOutcome { ppt: true, lambda_min, decided_by: Tier::Float, witness: None });
    }
    if lambda_min < -tolerance {
        if let Some(witness) = npt_witness(&pt, Some(&eigvec)) {
            return Ok(PptOutcome { ppt: false, lambda_min, decided_by: Tier::Float, witness: Some(witness) });
        }
    }
    let ppt = is_psd_exact(&pt);
    let witness = if ppt { None } else { npt_witness(&pt, Some(&eigvec)) };
    Ok(PptOutcome { ppt, lambda_min, decided_by: Tier::Exact, witness })
}

/// PPT verdict from the exact tier alone.
pub fn is_ppt_exact(rho: &DensityMatrix, split: &BipartiteSplit) -> Result<bool> {
    Ok(is_psd_exact(&matrix_partial_transpose(rho.numerator(), split)?))
}

fn quadratic_form(m: &DMatrix<i64>, x: &[i64]) -> Option<i128> {
    let n = m.nrows();
    let mut acc: i128 = 0;
    for i in 0..n {
        for j in 0..n {
            let term = (m[(i, j)] as i128).checked_mul(x[i] as i128)?.checked_mul(x[j] as i128)?;
            acc = acc.checked_add(term)?;
        }
    }
    Some(acc)
}

/// Round the eigenvector at increasing precision until the exact quadratic
/// form is negative. If that fails and `1^T M 1 = 0` with `M 1 != 0`, use
/// `x = c 1 - M 1`, whose form `-2c|M1|^2 + (M1)^T M (M1)` is negative for large `c`.
pub fn npt_witness(m: &DMatrix<i64>, eigvec: Option<&[f64]>) -> Option<NptWitness> {
    if let Some(v) = eigvec {
        for bits in [8, 16, 24, 32, 40] {
            let scale = (1u64 << bits) as f64;
            let x: Vec<i64> = v.iter().map(|c| (c * scale).round() as i64).collect();
            if let Some(q) = quadratic_form(m, &x) {
                if q < 0 {
                    return Some(NptWitness { vector: x, quadratic_form: q });
                }
            }
        }
    }
    let n = m.nrows();
    let ones = vec![1i64; n];
    let r: Vec<i64> = (0..n).map(|i| m.row(i).iter().sum()).collect();
    if quadratic_form(m, &ones)? != 0 || r.iter().all(|&x| x == 0) {
        return None;
    }
    let norm2: i128 = r.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let rmr = quadratic_form(m, &r)?;
    let c = (rmr.max(0) / (2 * norm2) + 1) as i64;
    let x: Vec<i64> = r.iter().map(|&ri| c - ri).collect();
    let q = quadratic_form(m, &x)?;
    (q < 0).then_some(NptWitness { vector: x, quadratic_form: q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, complete_graph, path_graph};
    use crate::labeling::TensorShape;

    fn s22() -> TensorShape {
        "2x2".parse().unwrap()
    }

    #[test]
    fn k2_laplacian_and_density() {
        // K2 plus two isolated vertices; the K2 block sits in the top-left corner.
        let g4 = Graph::from_edges(4, &[(0, 1)]).unwrap();
        let l = laplacian(&g4, &VertexLabeling::identity(s22())).unwrap();
        assert_eq!(l.entries().view((0, 0), (2, 2)), DMatrix::from_row_slice(2, 2, &[1, -1, -1, 1]));
        let rho = normalize(&l).unwrap();
        assert_eq!(rho.entry(0, 0), Ratio::new(1, 2));
        assert_eq!(rho.entry(0, 1), Ratio::new(-1, 2));
        assert_eq!(rho.trace(), Ratio::from_integer(1));
    }

    #[test]
    fn k22_trace() {
        let g = complete_bipartite(2, 2).unwrap();
        let l = laplacian(&g, &VertexLabeling::identity(s22())).unwrap();
        assert!((0..4).all(|i| l.entries()[(i, i)] == 2));
        assert_eq!(l.trace(), 8);
        let split = BipartiteSplit::bipartite(&s22()).unwrap();
        let out = is_ppt(&normalize(&l).unwrap(), &split).unwrap();
        assert!(out.ppt);
    }

    #[test]
    fn empty_graph_rejected() {
        let g = Graph::empty(4).unwrap();
        assert_eq!(laplacian(&g, &VertexLabeling::identity(s22())), Err(Error::EmptyGraph));
    }

    #[test]
    fn k4_spectrum() {
        let rho = density_matrix(&complete_graph(4).unwrap(), &VertexLabeling::identity(s22())).unwrap();
        let eig = SymmetricEigen::new(rho.to_f64());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        // det(xI - 4(I - J/4)) for K4 numerator: x (x-4)^3
        let c = characteristic_polynomial(rho.numerator());
        let want: Vec<BigInt> = [1, -12, 48, -64, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(c, want);
    }

    #[test]
    fn p4_is_npt_with_witness() {
        let g = path_graph(4).unwrap();
        let rho = density_matrix(&g, &VertexLabeling::identity(s22())).unwrap();
        let split = BipartiteSplit::bipartite(&s22()).unwrap();
        let out = is_ppt(&rho, &split).unwrap();
        assert!(!out.ppt);
        assert!(out.lambda_min < -1e-3);
        let w = out.witness.unwrap();
        let pt = matrix_partial_transpose(rho.numerator(), &split).unwrap();
        assert_eq!(quadratic_form(&pt, &w.vector), Some(w.quadratic_form));
        assert!(w.quadratic_form < 0);
        assert!(!is_ppt_exact(&rho, &split).unwrap());
    }

    #[test]
    fn algebraic_witness_without_eigenvector() {
        let g = path_graph(4).unwrap();
        let rho = density_matrix(&g, &VertexLabeling::identity(s22())).unwrap();
        let split = BipartiteSplit::bipartite(&s22()).unwrap();
        let pt = matrix_partial_transpose(rho.numerator(), &split).unwrap();
        let w = npt_witness(&pt, None).unwrap();
        assert!(w.quadratic_form < 0);
    }

    #[test]
    fn partial_transpose_basics() {
        let split = BipartiteSplit::bipartite(&s22()).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1i64, 2, 3, 4]));
        assert_eq!(matrix_partial_transpose(&d, &split).unwrap(), d);
        let m = DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as i64);
        let once = matrix_partial_transpose(&m, &split).unwrap();
        assert_ne!(once, m);
        assert_eq!(matrix_partial_transpose(&once, &split).unwrap(), m);
        assert!(matrix_partial_transpose(&DMatrix::<i64>::zeros(3, 3), &split).is_err());
    }

    #[test]
    fn berkowitz_small_cases() {
        let m = DMatrix::from_row_slice(2, 2, &[2i64, 1, 1, 2]);
        let c: Vec<BigInt> = [1, -4, 3].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(characteristic_polynomial(&m), c);
        assert!(is_psd_exact(&m));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1i64, 2, 2, 1]);
        assert!(!is_psd_exact(&indefinite));
        let m3 = DMatrix::from_row_slice(3, 3, &[1i64, 2, 3, 4, 5, 6, 7, 8, 10]);
        // det(xI - m3) = x^3 - 16x^2 - 12x + 3
        let c3: Vec<BigInt> = [1, -16, -12, 3].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(characteristic_polynomial(&m3), c3);
    }

    #[test]
    fn big_integer_fallback() {
        // Entries near i64::MAX overflow i128 products inside the recurrence.
        let big = i64::MAX / 2;
        let m = DMatrix::from_row_slice(3, 3, &[big, big, 0, big, big, big, 0, big, big]);
        let c = characteristic_polynomial(&m);
        let b = BigInt::from(big);
        // trace, sum of principal 2-minors, determinant
        assert_eq!(c[1], -(&b * BigInt::from(3)));
        assert_eq!(c[2], &b * &b);
        assert_eq!(c[3], &b * &b * &b);
    }

    #[test]
    fn rational_dump() {
        let g = Graph::from_edges(4, &[(0, 1)]).unwrap();
        let rho = density_matrix(&g, &VertexLabeling::identity(s22())).unwrap();
        let text = rho.to_rational_text();
        assert_eq!(text.lines().next().unwrap(), "1/2 -1/2 0/1 0/1");
        assert_eq!(text.lines().count(), 4);
    }
}
