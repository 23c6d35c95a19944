//! Matrix models: hw_n as strictly upper-triangular matrices, sp_{2n+2} in
//! block form with its Cartan subalgebra and root vectors, and the
//! Heisenberg–Weyl subalgebra spanned by `x_k`, `y_k`, `z`.
//!
//! Every generator here has integer entries, so bracket identities are
//! checked with exact equality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, ONE};
use crate::report::{Check, VerificationReport};
use crate::rootsys::{build_phi, Root};

/// `x·P + y·Q + t·Z` in hw_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HWElement {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
}

impl HWElement {
    pub fn zero(n: usize) -> Self {
        HWElement {
            x: vec![0.0; n],
            y: vec![0.0; n],
            t: 0.0,
        }
    }

    /// `P_k`, 1-based.
    pub fn p(n: usize, k: usize) -> Self {
        let mut e = Self::zero(n);
        e.x[k - 1] = 1.0;
        e
    }

    /// `Q_k`, 1-based.
    pub fn q(n: usize, k: usize) -> Self {
        let mut e = Self::zero(n);
        e.y[k - 1] = 1.0;
        e
    }

    pub fn z(n: usize) -> Self {
        HWElement { t: 1.0, ..Self::zero(n) }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn neg(&self) -> Self {
        HWElement {
            x: self.x.iter().map(|v| -v).collect(),
            y: self.y.iter().map(|v| -v).collect(),
            t: -self.t,
        }
    }

    /// `[a, b] = (a.x·b.y − b.x·a.y) Z`.
    pub fn bracket(&self, other: &HWElement) -> HWElement {
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        HWElement {
            t: dot(&self.x, &other.y) - dot(&other.x, &self.y),
            ..Self::zero(self.n())
        }
    }

    fn check_shape(&self) -> Result<()> {
        if self.x.len() == self.y.len() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "x has length {} but y has length {}",
                self.x.len(),
                self.y.len()
            )))
        }
    }
}

/// The `(n+2)×(n+2)` matrix with `x` in the top row, `y` in the last column
/// and `t` in the top-right corner.
pub fn hw_matrix(el: &HWElement) -> Result<ComplexMatrix> {
    el.check_shape()?;
    let n = el.n();
    let mut m = ComplexMatrix::zeros(n + 2, n + 2);
    for k in 0..n {
        m[(0, k + 1)] = el.x[k].into();
        m[(k + 1, n + 1)] = el.y[k].into();
    }
    m[(0, n + 1)] = el.t.into();
    Ok(m)
}

/// `exp(hw_matrix(el))` in closed form: identity plus the element, with
/// corner entry `t + x·y/2`.
pub fn hw_exp(el: &HWElement) -> Result<ComplexMatrix> {
    let mut m = hw_matrix(el)?;
    let n = el.n();
    for i in 0..n + 2 {
        m[(i, i)] = ONE;
    }
    let xy: f64 = el.x.iter().zip(&el.y).map(|(a, b)| a * b).sum();
    m[(0, n + 1)] = (el.t + 0.5 * xy).into();
    Ok(m)
}

/// Labeled matrices realizing a generating set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRep {
    pub dimension: usize,
    pub labels: Vec<String>,
    pub matrices: Vec<ComplexMatrix>,
}

impl GeneratorRep {
    pub fn new(dimension: usize, labels: Vec<String>, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.len() != matrices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} matrices",
                labels.len(),
                matrices.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidParameter(format!("duplicate label `{l}`")));
            }
        }
        if let Some(m) = matrices.iter().find(|m| m.shape() != (dimension, dimension)) {
            return Err(Error::DimensionMismatch {
                op: "GeneratorRep::new",
                left: (dimension, dimension),
                right: m.shape(),
            });
        }
        Ok(GeneratorRep {
            dimension,
            labels,
            matrices,
        })
    }

    pub fn get(&self, label: &str) -> Result<&ComplexMatrix> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.matrices[i])
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ComplexMatrix)> {
        self.labels.iter().map(String::as_str).zip(&self.matrices)
    }

    /// Sub-family with the given labels, in the given order.
    pub fn restrict(&self, labels: &[String]) -> Result<GeneratorRep> {
        let mats = labels.iter().map(|l| self.get(l).cloned()).collect::<Result<Vec<_>>>()?;
        GeneratorRep::new(self.dimension, labels.to_vec(), mats)
    }

    /// Block-diagonal direct sum with `other` over the same labels.
    pub fn direct_sum(&self, other: &GeneratorRep) -> Result<GeneratorRep> {
        if self.labels != other.labels {
            return Err(Error::InvalidParameter("direct sum needs identical labels".into()));
        }
        let d = self.dimension + other.dimension;
        let mats = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| {
                let mut m = ComplexMatrix::zeros(d, d);
                for i in 0..a.rows() {
                    for j in 0..a.cols() {
                        m[(i, j)] = a[(i, j)];
                    }
                }
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        m[(a.rows() + i, a.cols() + j)] = b[(i, j)];
                    }
                }
                m
            })
            .collect();
        GeneratorRep::new(d, self.labels.clone(), mats)
    }
}

/// Labels `P_1..P_n, Q_1..Q_n, Z`.
pub fn hw_labels(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|k| format!("P_{k}")).collect();
    v.extend((1..=n).map(|k| format!("Q_{k}")));
    v.push("Z".into());
    v
}

/// Labels `x_1..x_n, y_1..y_n, z`.
pub fn embedding_labels(n: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=n).map(|k| format!("x_{k}")).collect();
    v.extend((1..=n).map(|k| format!("y_{k}")));
    v.push("z".into());
    v
}

/// The basis `P_k, Q_k, Z` of hw_n as matrices.
pub fn hw_basis(n: usize) -> Result<GeneratorRep> {
    let mut mats: Vec<ComplexMatrix> = Vec::new();
    for k in 1..=n {
        mats.push(hw_matrix(&HWElement::p(n, k))?);
    }
    for k in 1..=n {
        mats.push(hw_matrix(&HWElement::q(n, k))?);
    }
    mats.push(hw_matrix(&HWElement::z(n))?);
    GeneratorRep::new(n + 2, hw_labels(n), mats)
}

/// Checks the Heisenberg relations `[P_k,Q_l] = δ_kl Z`, all other brackets
/// zero, on a family whose labels follow `p`, `q`, `z` naming (for example
/// `P_k/Q_k/Z` or `x_k/y_k/z`). Comparisons are exact.
pub fn heisenberg_relations(
    rep: &GeneratorRep,
    n: usize,
    names: (&str, &str, &str),
    anchor: &str,
) -> Result<VerificationReport> {
    let (pn, qn, zn) = names;
    let p: Vec<&ComplexMatrix> = (1..=n).map(|k| rep.get(&format!("{pn}_{k}"))).collect::<Result<_>>()?;
    let q: Vec<&ComplexMatrix> = (1..=n).map(|k| rep.get(&format!("{qn}_{k}"))).collect::<Result<_>>()?;
    let z = rep.get(zn)?;
    let zero = ComplexMatrix::zeros(rep.dimension, rep.dimension);
    let mut report = VerificationReport::new("heisenberg-relations");
    let mut exact = |name: String, lhs: ComplexMatrix, rhs: &ComplexMatrix| {
        let diff = lhs.max_abs_diff(rhs).unwrap_or(f64::INFINITY);
        let check = Check::exact(name, anchor, diff == 0.0);
        report.push(if diff == 0.0 {
            check
        } else {
            check.with_detail(format!("max deviation {diff:e}"))
        });
    };
    for k in 0..n {
        for l in 0..n {
            let rhs = if k == l { z } else { &zero };
            exact(
                format!("[{pn}_{},{qn}_{}]", k + 1, l + 1),
                p[k].commutator(q[l])?,
                rhs,
            );
        }
    }
    for k in 0..n {
        for l in (k + 1)..n {
            exact(format!("[{pn}_{},{pn}_{}]", k + 1, l + 1), p[k].commutator(p[l])?, &zero);
            exact(format!("[{qn}_{},{qn}_{}]", k + 1, l + 1), q[k].commutator(q[l])?, &zero);
        }
    }
    for k in 0..n {
        exact(format!("[{zn},{pn}_{}]", k + 1), z.commutator(p[k])?, &zero);
        exact(format!("[{zn},{qn}_{}]", k + 1), z.commutator(q[k])?, &zero);
    }
    Ok(report)
}

/// Heisenberg relations on the matrix model of hw_n.
pub fn commutation_table(n: usize) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut r = heisenberg_relations(&hw_basis(n)?, n, ("P", "Q", "Z"), "hw_n commutation relations")?;
    r.suite = "commutation-table".into();
    Ok(r)
}

/// An element of sp_{2n+2} given by its matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticElement {
    pub matrix: ComplexMatrix,
}

impl SymplecticElement {
    /// `XᵀJ + JX == 0`, compared exactly.
    pub fn is_symplectic(&self) -> bool {
        let d = self.matrix.rows();
        if !d.is_multiple_of(2) || !self.matrix.is_square() {
            return false;
        }
        let j = j_matrix(d / 2 - 1);
        let lhs = &(&self.matrix.transpose() * &j) + &(&j * &self.matrix);
        lhs.is_zero()
    }
}

/// `J = [[0, I], [−I, 0]]` of size `2n+2`.
pub fn j_matrix(n: usize) -> ComplexMatrix {
    let r = n + 1;
    let mut j = ComplexMatrix::zeros(2 * r, 2 * r);
    for k in 0..r {
        j[(k, r + k)] = ONE;
        j[(r + k, k)] = -ONE;
    }
    j
}

/// Root vector `X_α` in sp_{2n+2}:
/// `ε_k − ε_l` puts `E_kl` in the A block and `−E_lk` in the `−Aᵀ` block,
/// `±(ε_k + ε_l)` puts `E_kl + E_lk` in the B (resp. C) block, and `±2ε_k`
/// puts `E_kk` in the B (resp. C) block.
pub fn root_vector(alpha: &Root, n: usize) -> Result<SymplecticElement> {
    let r = n + 1;
    if alpha.rank() != r || !build_phi(n)?.contains(alpha) {
        return Err(Error::InvalidRoot(format!("{alpha} is not a root of C_{r}")));
    }
    let mut m = ComplexMatrix::zeros(2 * r, 2 * r);
    let nz: Vec<(usize, i32)> = alpha
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    match *nz.as_slice() {
        [(k, 2)] => m[(k, r + k)] = ONE,
        [(k, -2)] => m[(r + k, k)] = ONE,
        [(k, 1), (l, 1)] => {
            m[(k, r + l)] = ONE;
            m[(l, r + k)] = ONE;
        }
        [(k, -1), (l, -1)] => {
            m[(r + k, l)] = ONE;
            m[(r + l, k)] = ONE;
        }
        [(a, ca), (b, _)] => {
            let (k, l) = if ca == 1 { (a, b) } else { (b, a) };
            m[(k, l)] = ONE;
            m[(r + l, r + k)] = -ONE;
        }
        _ => unreachable!("validated root"),
    }
    Ok(SymplecticElement { matrix: m })
}

/// `H_k = diag(e_k, −e_k)`, 1-based `k`.
pub fn cartan_element(n: usize, t: &[i64]) -> ComplexMatrix {
    let r = n + 1;
    let mut h = ComplexMatrix::zeros(2 * r, 2 * r);
    for (k, &v) in t.iter().enumerate().take(r) {
        h[(k, k)] = (v as f64).into();
        h[(r + k, r + k)] = (-(v as f64)).into();
    }
    h
}

/// Basis `H_1..H_{n+1}` of the diagonal Cartan subalgebra.
pub fn cartan_basis(n: usize) -> Vec<ComplexMatrix> {
    (0..=n)
        .map(|k| {
            let mut t = vec![0; n + 1];
            t[k] = 1;
            cartan_element(n, &t)
        })
        .collect()
}

/// `[H, X_α] = α(H) X_α` exactly, for every Cartan basis element and root.
pub fn cartan_eigen_check(n: usize) -> Result<VerificationReport> {
    let phi = build_phi(n)?;
    let mut report = VerificationReport::new("cartan-eigen");
    for (k, h) in cartan_basis(n).iter().enumerate() {
        let mut t = vec![0; n + 1];
        t[k] = 1;
        for alpha in phi.iter() {
            let x = root_vector(alpha, n)?.matrix;
            let lhs = h.commutator(&x)?;
            let rhs = x.scale_real(alpha.eval(&t) as f64);
            report.push(Check::exact(
                format!("[H_{},X_{alpha}]", k + 1),
                "root space decomposition",
                lhs == rhs,
            ));
        }
    }
    Ok(report)
}

/// `x_k = X_{ε1−ε_{k+1}}`, `y_k = X_{ε1+ε_{k+1}}`, `z = 2 X_{2ε1}` in
/// sp_{2n+2}, labelled `x_k`, `y_k`, `z`.
pub fn hw_embedding(n: usize) -> Result<GeneratorRep> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let r = n + 1;
    let mut mats = Vec::with_capacity(2 * n + 1);
    for k in 2..=r {
        mats.push(root_vector(&Root::diff(r, 1, k)?, n)?.matrix);
    }
    for k in 2..=r {
        mats.push(root_vector(&Root::sum(r, 1, k)?, n)?.matrix);
    }
    mats.push(root_vector(&Root::long(r, 1)?, n)?.matrix.scale_real(2.0));
    GeneratorRep::new(2 * r, embedding_labels(n), mats)
}

/// Image of `x·P + y·Q + t·Z` under `P_k ↦ x_k`, `Q_k ↦ y_k`, `Z ↦ z`.
pub fn embed_element(el: &HWElement) -> Result<ComplexMatrix> {
    el.check_shape()?;
    let n = el.n();
    let rep = hw_embedding(n)?;
    let mut m = ComplexMatrix::zeros(rep.dimension, rep.dimension);
    let coeffs = el.x.iter().chain(&el.y).chain(std::iter::once(&el.t));
    for (c, g) in coeffs.zip(&rep.matrices) {
        m = &m + &g.scale_real(*c);
    }
    Ok(m)
}

/// Heisenberg relations for the embedded generators, their symplectic
/// membership, and linear independence.
pub fn embedding_check(n: usize) -> Result<VerificationReport> {
    let rep = hw_embedding(n)?;
    let mut report = heisenberg_relations(&rep, n, ("x", "y", "z"), "embedded Heisenberg-Weyl subalgebra")?;
    report.suite = "embedding".into();
    for (label, m) in rep.iter() {
        let ok = SymplecticElement { matrix: m.clone() }.is_symplectic();
        report.push(Check::exact(format!("symplectic {label}"), "sp block form", ok));
    }
    let dim = crate::numkernel::linalg::span_dimension(&rep.matrices, 1e-12)?;
    report.push(
        Check::exact("span dimension", "embedded Heisenberg-Weyl subalgebra", dim == 2 * n + 1)
            .with_detail(format!("{dim}")),
    );
    let phi = build_phi(n)?;
    let all_symplectic = phi
        .iter()
        .map(|a| root_vector(a, n).map(|x| x.is_symplectic()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|b| b);
    report.push(Check::exact("every root vector symplectic", "sp block form", all_symplectic));
    Ok(report)
}
