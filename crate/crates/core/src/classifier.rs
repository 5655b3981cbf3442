//! Per-labeling verdicts and graph classes S / SE / E.
//!
//! A labeling is ENTANGLED when some probed cut violates the degree condition
//! (equivalently, is NPT). When every cut keeps degrees, each partial
//! transpose is the Laplacian of the partial-transpose graph and hence PSD;
//! the labeling is then SEPARABLE only if a sufficiency rule applies and
//! UNKNOWN otherwise.
//!
//! Sufficiency rules:
//! * two-factor shape with a factor of size 2 (degree condition is sufficient);
//! * `K_n`, `K_{2,2}` and its complement, separable under every labeling;
//! * two-factor shape whose Laplacian is block-uniform along one factor:
//!   diagonal blocks all `C`, off-diagonal blocks all `O`. Then
//!   `L = (I - J/p) ⊗ (C - O) + (J/p) ⊗ (C + (p-1) O)`, a sum of products of
//!   PSD matrices whenever both right-hand factors are PSD.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{is_ppt_exact, is_psd_exact, laplacian, normalize};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::labeling::{enumerate_labelings, TensorShape, VertexLabeling};
use crate::pt_graph::{pt_degrees, BipartiteSplit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Separable,
    Entangled,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Separable => "SEPARABLE",
            Verdict::Entangled => "ENTANGLED",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparabilityReason {
    /// Two-factor shape with a factor of size 2 and the degree condition.
    QubitFactor,
    /// `K_n`, `K_{2,2}` or its complement.
    SeparableFamily,
    /// Laplacian block-uniform along the given factor (0-based position).
    BlockUniform { factor: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerdictCertificate {
    /// Cut index into [`LabelingVerdict::cuts`] and a vertex whose degree changes.
    DegreeViolation { cut: usize, vertex: usize, degree: usize, pt_degree: usize },
    Separable(SeparabilityReason),
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Probe {
    /// Partial-transpose graph degrees.
    #[default]
    DegreeCondition,
    /// Exact characteristic-polynomial PSD test of the matrix partial transpose.
    ExactPpt,
}

#[derive(Clone, Debug)]
pub struct CutResult {
    pub split: BipartiteSplit,
    pub ppt: bool,
}

#[derive(Clone, Debug)]
pub struct LabelingVerdict {
    pub labeling: VertexLabeling,
    pub verdict: Verdict,
    pub certificate: VerdictCertificate,
    pub cuts: Vec<CutResult>,
}

/// Cuts probed for a shape: the single split of a two-factor shape, or every
/// single-factor-vs-rest split otherwise.
pub fn probe_cuts(shape: &TensorShape) -> Vec<BipartiteSplit> {
    if shape.len() == 2 {
        vec![BipartiteSplit::bipartite(shape).expect("two factors")]
    } else {
        BipartiteSplit::single_factor_cuts(shape)
    }
}

pub fn verdict(g: &Graph, lab: &VertexLabeling, shape: &TensorShape) -> Result<LabelingVerdict> {
    verdict_with(g, lab, shape, Probe::DegreeCondition)
}

pub fn verdict_with(g: &Graph, lab: &VertexLabeling, shape: &TensorShape, probe: Probe) -> Result<LabelingVerdict> {
    let cuts = probe_cuts(shape);
    verdict_on_cuts(g, lab, shape, &cuts, probe)
}

fn verdict_on_cuts(
    g: &Graph,
    lab: &VertexLabeling,
    shape: &TensorShape,
    cuts: &[BipartiteSplit],
    probe: Probe,
) -> Result<LabelingVerdict> {
    if lab.shape() != shape {
        return invalid(format!("labeling shape {} differs from {shape}", lab.shape()));
    }
    shape.check_order(g.order())?;
    if !g.has_edges() {
        return Err(Error::EmptyGraph);
    }
    let mut results = Vec::with_capacity(cuts.len());
    let mut certificate = VerdictCertificate::None;
    let rho = match probe {
        Probe::ExactPpt => Some(normalize(&laplacian(g, lab)?)?),
        Probe::DegreeCondition => None,
    };
    for (i, split) in cuts.iter().enumerate() {
        let pt = pt_degrees(g, lab, split)?;
        let violation = (0..g.order()).find(|&v| pt[v] != g.degree(v));
        let ppt = match &rho {
            Some(rho) => is_ppt_exact(rho, split)?,
            None => violation.is_none(),
        };
        if !ppt && certificate == VerdictCertificate::None {
            // An NPT cut always moves some degree: (L^pT) 1 = d - d_pT.
            let vertex = violation.ok_or_else(|| {
                Error::CertificateCheck(format!("cut {} is NPT but keeps every degree", split.describe()))
            })?;
            certificate = VerdictCertificate::DegreeViolation {
                cut: i,
                vertex,
                degree: g.degree(vertex),
                pt_degree: pt[vertex],
            };
        }
        results.push(CutResult { split: split.clone(), ppt });
    }
    let verdict = if certificate != VerdictCertificate::None {
        Verdict::Entangled
    } else if let Some(reason) = sufficiency(g, lab, shape)? {
        certificate = VerdictCertificate::Separable(reason);
        Verdict::Separable
    } else {
        Verdict::Unknown
    };
    Ok(LabelingVerdict { labeling: lab.clone(), verdict, certificate, cuts: results })
}

/// Sufficiency rules, tried after every cut is known to be PPT.
fn sufficiency(g: &Graph, lab: &VertexLabeling, shape: &TensorShape) -> Result<Option<SeparabilityReason>> {
    if in_separable_family(g) {
        return Ok(Some(SeparabilityReason::SeparableFamily));
    }
    if shape.len() != 2 {
        return Ok(None);
    }
    if shape.factors().contains(&2) {
        return Ok(Some(SeparabilityReason::QubitFactor));
    }
    let l = laplacian(g, lab)?;
    let split = BipartiteSplit::bipartite(shape)?;
    for factor in 0..2 {
        if block_uniform_separable(l.entries(), &split, factor) {
            return Ok(Some(SeparabilityReason::BlockUniform { factor }));
        }
    }
    Ok(None)
}

/// `K_n` for any `n`; `K_{2,2}` and `2K_2` for `n = 4`.
pub fn in_separable_family(g: &Graph) -> bool {
    if g.is_complete() {
        return true;
    }
    if g.order() != 4 {
        return false;
    }
    let deg = g.degrees();
    (g.edge_count() == 4 && deg.iter().all(|&d| d == 2)) || (g.edge_count() == 2 && deg.iter().all(|&d| d == 1))
}

fn block_uniform_separable(l: &DMatrix<i64>, split: &BipartiteSplit, factor: usize) -> bool {
    let (outer, inner) = if factor == 0 { (split.p(), split.q()) } else { (split.q(), split.p()) };
    let index = |block: usize, within: usize| {
        if factor == 0 {
            split.join(block, within)
        } else {
            split.join(within, block)
        }
    };
    let block = |a: usize, b: usize| DMatrix::from_fn(inner, inner, |i, j| l[(index(a, i), index(b, j))]);
    let diag = block(0, 0);
    let off = block(0, 1);
    for a in 0..outer {
        for b in 0..outer {
            let expected = if a == b { &diag } else { &off };
            if &block(a, b) != expected {
                return false;
            }
        }
    }
    let spread = &diag - &off;
    let mean = &diag + &off * (outer as i64 - 1);
    is_psd_exact(&spread) && is_psd_exact(&mean)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GraphClass {
    /// Every labeling separable.
    S,
    /// Both behaviours occur.
    SE,
    /// Every labeling entangled.
    E,
    /// No entangled labeling; some PPT labelings lack a separability proof.
    SCandidate,
    /// Entangled labelings found, the rest undecided, or the enumeration was cut short.
    Unresolved,
}

impl GraphClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphClass::S => "S",
            GraphClass::SE => "SE",
            GraphClass::E => "E",
            GraphClass::SCandidate => "S_CANDIDATE",
            GraphClass::Unresolved => "UNRESOLVED",
        }
    }

    fn from_counts(sep: u64, ent: u64, unk: u64, complete: bool) -> GraphClass {
        match (sep > 0, ent > 0, unk > 0) {
            (true, true, _) => GraphClass::SE,
            _ if !complete => GraphClass::Unresolved,
            (false, true, false) => GraphClass::E,
            (_, true, true) => GraphClass::Unresolved,
            (_, false, false) => GraphClass::S,
            (_, false, true) => GraphClass::SCandidate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub reduced: bool,
    /// Stop after examining this many labelings (representatives when reduced).
    pub budget: Option<u64>,
    pub probe: Probe,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { reduced: true, budget: None, probe: Probe::DegreeCondition }
    }
}

#[derive(Clone, Debug)]
pub struct GraphClassReport {
    pub graph: Graph,
    pub shape: TensorShape,
    pub class: GraphClass,
    /// Verdict counts over all labelings; reduced enumeration weights each
    /// representative by its orbit size.
    pub n_separable: u64,
    pub n_entangled: u64,
    pub n_unknown: u64,
    pub witness_separable: Option<VertexLabeling>,
    pub witness_entangled: Option<VertexLabeling>,
    pub examined: u64,
    pub complete: bool,
}

pub fn classify(g: &Graph, shape: &TensorShape, opts: ClassifyOptions) -> Result<GraphClassReport> {
    shape.check_order(g.order())?;
    if !g.has_edges() {
        return Err(Error::EmptyGraph);
    }
    let cuts = probe_cuts(shape);
    let weight = if opts.reduced { shape.group_order() } else { 1 };
    let (mut sep, mut ent, mut unk) = (0u64, 0u64, 0u64);
    let (mut witness_separable, mut witness_entangled) = (None, None);
    let mut examined = 0u64;
    let mut complete = true;
    for lab in enumerate_labelings(g.order(), shape, opts.reduced)? {
        if opts.budget.is_some_and(|b| examined >= b) {
            complete = false;
            break;
        }
        examined += 1;
        let v = verdict_on_cuts(g, &lab, shape, &cuts, opts.probe)?;
        match v.verdict {
            Verdict::Separable => {
                sep += weight;
                witness_separable.get_or_insert(lab);
            }
            Verdict::Entangled => {
                ent += weight;
                witness_entangled.get_or_insert(lab);
            }
            Verdict::Unknown => unk += weight,
        }
    }
    Ok(GraphClassReport {
        graph: g.clone(),
        shape: shape.clone(),
        class: GraphClass::from_counts(sep, ent, unk, complete),
        n_separable: sep,
        n_entangled: ent,
        n_unknown: unk,
        witness_separable,
        witness_entangled,
        examined,
        complete,
    })
}

/// One output row of a scan, in input order.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub line_number: usize,
    pub input: String,
    pub result: std::result::Result<GraphClassReport, Error>,
    pub elapsed_ms: u128,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    line: usize,
    graph6: &'a str,
    n: Option<usize>,
    shape: String,
    class: Option<&'static str>,
    n_separable: Option<u64>,
    n_entangled: Option<u64>,
    n_unknown: Option<u64>,
    witness_sep: Option<String>,
    witness_ent: Option<String>,
    complete: bool,
    elapsed_ms: Option<u128>,
    error: Option<String>,
}

impl ScanRow {
    pub fn is_error(&self) -> bool {
        self.result.is_err()
    }

    pub fn is_incomplete(&self) -> bool {
        matches!(&self.result, Ok(r) if !r.complete)
    }

    /// `graph6 n shape class n_sep n_ent n_unk witness_sep witness_ent elapsed_ms`,
    /// tab separated. Without `timing` the last column is `-` so output is
    /// reproducible byte for byte.
    pub fn to_tsv(&self, shape: &TensorShape, timing: bool) -> String {
        let elapsed = if timing { self.elapsed_ms.to_string() } else { "-".into() };
        let line = |l: &Option<VertexLabeling>| l.as_ref().map_or("-".to_string(), |l| l.to_line());
        match &self.result {
            Ok(r) => format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                self.input,
                r.graph.order(),
                shape,
                r.class.as_str(),
                r.n_separable,
                r.n_entangled,
                r.n_unknown,
                line(&r.witness_separable),
                line(&r.witness_entangled),
                elapsed
            ),
            Err(_) => format!("{}\t-\t{}\tERROR\t-\t-\t-\t-\t-\t{}", self.input, shape, elapsed),
        }
    }

    pub fn to_json(&self, shape: &TensorShape, timing: bool) -> String {
        let line = |l: &Option<VertexLabeling>| l.as_ref().map(|l| l.to_line());
        let row = match &self.result {
            Ok(r) => JsonRow {
                line: self.line_number,
                graph6: &self.input,
                n: Some(r.graph.order()),
                shape: shape.to_string(),
                class: Some(r.class.as_str()),
                n_separable: Some(r.n_separable),
                n_entangled: Some(r.n_entangled),
                n_unknown: Some(r.n_unknown),
                witness_sep: line(&r.witness_separable),
                witness_ent: line(&r.witness_entangled),
                complete: r.complete,
                elapsed_ms: timing.then_some(self.elapsed_ms),
                error: None,
            },
            Err(e) => JsonRow {
                line: self.line_number,
                graph6: &self.input,
                n: None,
                shape: shape.to_string(),
                class: None,
                n_separable: None,
                n_entangled: None,
                n_unknown: None,
                witness_sep: None,
                witness_ent: None,
                complete: false,
                elapsed_ms: timing.then_some(self.elapsed_ms),
                error: Some(e.to_string()),
            },
        };
        serde_json::to_string(&row).expect("plain data serializes")
    }
}

/// Classify every graph6 line. Blank lines are skipped; malformed lines
/// become error rows. Rows come back in input order.
pub fn scan<S: AsRef<str> + Sync>(lines: &[S], shape: &TensorShape, opts: ClassifyOptions) -> Vec<ScanRow> {
    let work: Vec<(usize, &str)> = lines
        .iter()
        .enumerate()
        .map(|(i, l)| (i + 1, l.as_ref().trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    work.par_iter()
        .map(|&(line_number, input)| {
            let start = Instant::now();
            let result = Graph::from_graph6(input).and_then(|g| classify(&g, shape, opts));
            ScanRow { line_number, input: input.to_string(), result, elapsed_ms: start.elapsed().as_millis() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, complete_graph, path_graph};

    fn s22() -> TensorShape {
        "2x2".parse().unwrap()
    }

    #[test]
    fn p4_verdicts() {
        let g = path_graph(4).unwrap();
        let ent = verdict(&g, &VertexLabeling::identity(s22()), &s22()).unwrap();
        assert_eq!(ent.verdict, Verdict::Entangled);
        assert!(matches!(ent.certificate, VerdictCertificate::DegreeViolation { vertex: 0, degree: 1, pt_degree: 2, .. }));
        // 0->(1,1), 1->(2,2), 2->(1,2), 3->(2,1)
        let lab = VertexLabeling::new(s22(), vec![0, 3, 1, 2]).unwrap();
        let sep = verdict(&g, &lab, &s22()).unwrap();
        assert_eq!(sep.verdict, Verdict::Separable);
        assert_eq!(sep.certificate, VerdictCertificate::Separable(SeparabilityReason::QubitFactor));
    }

    #[test]
    fn k22_always_separable() {
        let g = complete_bipartite(2, 2).unwrap();
        for lab in enumerate_labelings(4, &s22(), false).unwrap() {
            assert_eq!(verdict(&g, &lab, &s22()).unwrap().verdict, Verdict::Separable);
        }
    }

    #[test]
    fn small_classes() {
        let opts = ClassifyOptions::default();
        assert_eq!(classify(&complete_graph(4).unwrap(), &s22(), opts).unwrap().class, GraphClass::S);
        assert_eq!(classify(&complete_bipartite(1, 3).unwrap(), &s22(), opts).unwrap().class, GraphClass::E);
        let p4 = classify(&path_graph(4).unwrap(), &s22(), opts).unwrap();
        assert_eq!(p4.class, GraphClass::SE);
        assert_eq!(p4.n_separable + p4.n_entangled + p4.n_unknown, 24);
        assert!(matches!(classify(&Graph::empty(4).unwrap(), &s22(), opts), Err(Error::EmptyGraph)));
    }

    #[test]
    fn budget_marks_incomplete() {
        let opts = ClassifyOptions { budget: Some(1), ..ClassifyOptions::default() };
        let r = classify(&complete_graph(6).unwrap(), &"2x3".parse().unwrap(), opts).unwrap();
        assert!(!r.complete);
        assert_eq!(r.class, GraphClass::Unresolved);
        assert_eq!(r.examined, 1);
    }

    #[test]
    fn class_table() {
        use GraphClass::*;
        assert_eq!(GraphClass::from_counts(1, 1, 0, true), SE);
        assert_eq!(GraphClass::from_counts(1, 1, 5, false), SE);
        assert_eq!(GraphClass::from_counts(0, 3, 0, true), E);
        assert_eq!(GraphClass::from_counts(0, 3, 1, true), Unresolved);
        assert_eq!(GraphClass::from_counts(3, 0, 0, true), S);
        assert_eq!(GraphClass::from_counts(0, 0, 3, true), SCandidate);
        assert_eq!(GraphClass::from_counts(2, 0, 3, true), SCandidate);
        assert_eq!(GraphClass::from_counts(3, 0, 0, false), Unresolved);
    }

    #[test]
    fn block_uniform_rule_on_k36() {
        // Part of size 3 on the first column: {(1,1),(2,1),(3,1)}.
        let s33: TensorShape = "3x3".parse().unwrap();
        let g = complete_bipartite(3, 6).unwrap();
        let tuples: Vec<Vec<usize>> = vec![
            vec![1, 1], vec![2, 1], vec![3, 1],
            vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 3], vec![3, 2], vec![3, 3],
        ];
        let lab = VertexLabeling::from_tuples(s33.clone(), &tuples).unwrap();
        let v = verdict(&g, &lab, &s33).unwrap();
        assert_eq!(v.verdict, Verdict::Separable);
        assert_eq!(v.certificate, VerdictCertificate::Separable(SeparabilityReason::BlockUniform { factor: 0 }));
    }

    #[test]
    fn scan_rows_keep_order_and_errors() {
        let lines = ["C~", "", "C?", "C]", "bogus!"];
        let rows = scan(&lines, &s22(), ClassifyOptions::default());
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().map(|r| r.line_number).collect::<Vec<_>>(), vec![1, 3, 4, 5]);
        assert!(rows[1].is_error());
        assert!(rows[3].is_error());
        assert_eq!(rows[0].to_tsv(&s22(), false), "C~\t4\t2x2\tS\t24\t0\t0\t0 1 2 3\t-\t-");
        assert!(rows[3].to_json(&s22(), false).contains("\"error\""));
    }
}
