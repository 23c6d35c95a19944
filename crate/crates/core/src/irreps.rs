//! Finite-dimensional irreducible representations of sp_{2n+2}: the
//! defining module, symmetric powers, and the primitive part of Λ².
//!
//! Generator labels are `H_1..H_{n+1}`, one `X[α]` per root α, then the
//! Heisenberg–Weyl images `x_k`, `y_k`, `z`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{nullspace, ComplexMatrix, ZERO};
use crate::report::{Check, VerificationReport};
use crate::rootsys::build_phi;
use crate::sympembed::{cartan_basis, embedding_labels, hw_embedding, j_matrix, root_vector, GeneratorRep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family_tag", rename_all = "snake_case")]
pub enum Family {
    Defining,
    Sym { k: usize },
    PrimitiveWedge2,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Defining => write!(f, "defining"),
            Family::Sym { k } => write!(f, "sym{k}"),
            Family::PrimitiveWedge2 => write!(f, "primitive_wedge2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub generators: GeneratorRep,
    #[serde(skip)]
    action: Action,
}

#[derive(Debug, Clone, PartialEq, Default)]
enum Action {
    #[default]
    Identity,
    Sym(SymBasis),
    Wedge0 { kernel: ComplexMatrix },
}

impl Representation {
    pub fn dimension(&self) -> usize {
        self.generators.dimension
    }

    /// Image of an arbitrary matrix of gl_{2n+2} under the functor defining
    /// this module. Linear, and a Lie homomorphism on sp_{2n+2}.
    pub fn image(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = 2 * self.n + 2;
        if x.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                op: "Representation::image",
                left: (d, d),
                right: x.shape(),
            });
        }
        Ok(match &self.action {
            Action::Identity => x.clone(),
            Action::Sym(basis) => basis.derivation(x),
            Action::Wedge0 { kernel } => {
                let full = wedge2_derivation(x);
                kernel.adjoint().matmul(&full)?.matmul(kernel)?
            }
        })
    }

    /// Checks `ρ([A,B]) = [ρ(A),ρ(B)]` over all generator pairs.
    pub fn bracket_residual(&self) -> Result<f64> {
        let d = 2 * self.n + 2;
        let pre = sp_generators(self.n)?;
        let mut worst: f64 = 0.0;
        for (i, (_, a)) in pre.iter().enumerate() {
            for (_, b) in pre.iter().skip(i + 1) {
                let lhs = self.image(&a.commutator(b)?)?;
                let rhs = self.image(a)?.commutator(&self.image(b)?)?;
                let scale = 1.0f64.max(rhs.max_abs());
                worst = worst.max(lhs.max_abs_diff(&rhs).unwrap_or(f64::INFINITY) / scale);
            }
        }
        debug_assert_eq!(pre.dimension, d);
        Ok(worst)
    }

    /// `‖ρ(X)K − K·ρ₀(X)‖` for the primitive Λ² kernel; zero otherwise.
    pub fn invariance_residual(&self) -> Result<f64> {
        match &self.action {
            Action::Wedge0 { kernel } => {
                let mut worst: f64 = 0.0;
                for (_, x) in sp_generators(self.n)?.iter() {
                    let full = wedge2_derivation(x);
                    let moved = full.matmul(kernel)?;
                    let back = kernel.matmul(&kernel.adjoint().matmul(&moved)?)?;
                    worst = worst.max(moved.max_abs_diff(&back).unwrap_or(f64::INFINITY));
                }
                Ok(worst)
            }
            _ => Ok(0.0),
        }
    }
}

/// Cartan basis and all root vectors of sp_{2n+2}, followed by the
/// Heisenberg–Weyl generators.
pub fn sp_generators(n: usize) -> Result<GeneratorRep> {
    let d = 2 * n + 2;
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for (k, h) in cartan_basis(n).into_iter().enumerate() {
        labels.push(format!("H_{}", k + 1));
        mats.push(h);
    }
    for alpha in build_phi(n)?.iter() {
        labels.push(format!("X[{alpha}]"));
        mats.push(root_vector(alpha, n)?.matrix);
    }
    let hw = hw_embedding(n)?;
    labels.extend(hw.labels.iter().cloned());
    mats.extend(hw.matrices.iter().cloned());
    GeneratorRep::new(d, labels, mats)
}

fn from_action(family: Family, n: usize, action: Action) -> Result<Representation> {
    let base = sp_generators(n)?;
    let mut rep = Representation {
        family,
        n,
        generators: base.clone(),
        action,
    };
    let mats = base.matrices.iter().map(|m| rep.image(m)).collect::<Result<Vec<_>>>()?;
    let dim = mats.first().map(ComplexMatrix::rows).unwrap_or(0);
    rep.generators = GeneratorRep::new(dim, base.labels, mats)?;
    Ok(rep)
}

pub fn defining_rep(n: usize) -> Result<Representation> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    from_action(Family::Defining, n, Action::Identity)
}

/// Degree-`k` multisets of basis indices, lexicographically ordered.
#[derive(Debug, Clone, PartialEq)]
struct SymBasis {
    monomials: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl SymBasis {
    fn new(d: usize, k: usize) -> Self {
        let mut monomials = Vec::new();
        let mut cur = vec![0usize; k];
        loop {
            monomials.push(cur.clone());
            // Next non-decreasing sequence.
            let Some(pos) = (0..k).rev().find(|&i| cur[i] + 1 < d) else {
                break;
            };
            let v = cur[pos] + 1;
            for c in &mut cur[pos..] {
                *c = v;
            }
        }
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        SymBasis { monomials, index }
    }

    /// Leibniz action on monomials: sum over slots of the single-slot action.
    fn derivation(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let dim = self.monomials.len();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (col, mono) in self.monomials.iter().enumerate() {
            for slot in 0..mono.len() {
                if slot > 0 && mono[slot] == mono[slot - 1] {
                    // Equal factors contribute identically; counted below.
                    continue;
                }
                let mult = mono.iter().filter(|&&i| i == mono[slot]).count() as f64;
                let i = mono[slot];
                for j in 0..x.rows() {
                    let c = x[(j, i)];
                    if c == ZERO {
                        continue;
                    }
                    let mut m = mono.clone();
                    m[slot] = j;
                    m.sort_unstable();
                    out[(self.index[&m], col)] += c * mult;
                }
            }
        }
        out
    }
}

pub fn sym_power_rep(base: &Representation, k: usize) -> Result<Representation> {
    if base.family != Family::Defining {
        return Err(Error::InvalidParameter("symmetric powers need the defining module".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let basis = SymBasis::new(2 * base.n + 2, k);
    from_action(Family::Sym { k }, base.n, Action::Sym(basis))
}

fn wedge_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect()
}

/// Action on Λ² in the basis `e_i ∧ e_j`, `i < j`.
fn wedge2_derivation(x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    let pairs = wedge_pairs(d);
    let pos: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut out = ComplexMatrix::zeros(pairs.len(), pairs.len());
    let mut add = |a: usize, b: usize, c, col: usize| {
        if a == b {
            return;
        }
        let (row, sign) = if a < b { (pos[&(a, b)], 1.0) } else { (pos[&(b, a)], -1.0) };
        out[(row, col)] += c * sign;
    };
    for (col, &(i, j)) in pairs.iter().enumerate() {
        for r in 0..d {
            add(r, j, x[(r, i)], col);
            add(i, r, x[(r, j)], col);
        }
    }
    out
}

/// Kernel of `v ∧ w ↦ vᵀJw` inside Λ².
pub fn primitive_wedge2_rep(base: &Representation) -> Result<Representation> {
    if base.family != Family::Defining {
        return Err(Error::InvalidParameter("primitive wedge square needs the defining module".into()));
    }
    let j = j_matrix(base.n);
    let pairs = wedge_pairs(2 * base.n + 2);
    let contraction = ComplexMatrix::from_fn(1, pairs.len(), |_, c| j[pairs[c]]);
    let kernel = nullspace(&contraction, 1e-9)?;
    from_action(Family::PrimitiveWedge2, base.n, Action::Wedge0 { kernel })
}

/// Generator images for the given labels.
pub fn restrict(rep: &Representation, labels: &[String]) -> Result<GeneratorRep> {
    rep.generators.restrict(labels)
}

/// Restriction to the embedded Heisenberg–Weyl subalgebra.
pub fn restrict_to_hw(rep: &Representation) -> Result<GeneratorRep> {
    restrict(rep, &embedding_labels(rep.n))
}

pub fn build(family: Family, n: usize) -> Result<Representation> {
    let base = defining_rep(n)?;
    match family {
        Family::Defining => Ok(base),
        Family::Sym { k } => sym_power_rep(&base, k),
        Family::PrimitiveWedge2 => primitive_wedge2_rep(&base),
    }
}

/// Homomorphism, nilpotency of `z`, tracelessness and the restricted
/// Heisenberg relations for one module.
pub fn representation_check(rep: &Representation) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(format!("irrep-{}-n{}", rep.family, rep.n));
    r.push(Check::within(
        "bracket homomorphism",
        "finite-dimensional irreducible module",
        rep.bracket_residual()?,
        1e-10,
    ));
    if rep.family == Family::PrimitiveWedge2 {
        r.push(Check::within("kernel invariance", "primitive wedge square", rep.invariance_residual()?, 1e-10));
    }
    let trace = rep
        .generators
        .matrices
        .iter()
        .map(|m| m.trace().norm())
        .fold(0.0, f64::max);
    r.push(Check::within("traceless images", "simplicity of sp", trace, 1e-10));
    let z = rep.generators.get("z")?;
    let eig = crate::numkernel::eigenvalues(z)?;
    let spread = eig.iter().map(|e| e.norm()).fold(0.0, f64::max);
    r.push(Check::within("z nilpotent", "trace obstruction to a scalar centre", spread, 1e-8));
    let hw = restrict_to_hw(rep)?;
    let (x1, y1) = (hw.get("x_1")?, hw.get("y_1")?);
    let res = x1.commutator(y1)?.max_abs_diff(z).unwrap_or(f64::INFINITY);
    r.push(Check::within("[x_1,y_1] = z", "embedded Heisenberg-Weyl subalgebra", res, 1e-10));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions() {
        assert_eq!(defining_rep(1).unwrap().dimension(), 4);
        let base = defining_rep(1).unwrap();
        assert_eq!(sym_power_rep(&base, 2).unwrap().dimension(), 10);
        assert_eq!(sym_power_rep(&base, 3).unwrap().dimension(), 20);
        assert_eq!(primitive_wedge2_rep(&base).unwrap().dimension(), 5);
        let base2 = defining_rep(2).unwrap();
        assert_eq!(primitive_wedge2_rep(&base2).unwrap().dimension(), 14);
        for k in 1..=4 {
            assert_eq!(sym_power_rep(&base2, k).unwrap().dimension(), binom(5 + k, k));
        }
    }

    #[test]
    fn rejections() {
        let base = defining_rep(1).unwrap();
        assert!(sym_power_rep(&base, 0).is_err());
        let s2 = sym_power_rep(&base, 2).unwrap();
        assert!(sym_power_rep(&s2, 2).is_err());
        assert!(defining_rep(0).is_err());
    }

    #[test]
    fn sym1_is_defining() {
        let base = defining_rep(1).unwrap();
        let s1 = sym_power_rep(&base, 1).unwrap();
        assert_eq!(s1.generators.matrices, base.generators.matrices);
    }

    #[test]
    fn sym_entries_are_integers() {
        let base = defining_rep(1).unwrap();
        let s3 = sym_power_rep(&base, 3).unwrap();
        for m in &s3.generators.matrices {
            assert!(m.as_integer(0.0).is_some());
        }
    }

    #[test]
    fn all_families_pass_checks() {
        for n in 1..=2 {
            let base = defining_rep(n).unwrap();
            let mut reps = vec![base.clone(), primitive_wedge2_rep(&base).unwrap()];
            for k in 2..=3 {
                reps.push(sym_power_rep(&base, k).unwrap());
            }
            for rep in &reps {
                let r = representation_check(rep).unwrap();
                assert!(r.passed(), "{}", r.to_text());
            }
        }
    }

    #[test]
    fn restriction_selects() {
        let rep = defining_rep(1).unwrap();
        let hw = restrict_to_hw(&rep).unwrap();
        assert_eq!(hw.len(), 3);
        assert_eq!(hw.dimension, 4);
        let z = hw.get("z").unwrap();
        assert_eq!(z[(0, 2)].re, 2.0);
        assert_eq!(z.entries().iter().filter(|c| c.norm() > 0.0).count(), 1);
        assert!(matches!(restrict(&rep, &["w".to_string()]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn json_carries_family() {
        let base = defining_rep(1).unwrap();
        let rep = sym_power_rep(&base, 2).unwrap();
        let j = serde_json::to_value(&rep).unwrap();
        assert_eq!(j["family_tag"], "sym");
        assert_eq!(j["k"], 2);
        assert_eq!(j["n"], 1);
        assert_eq!(j["generators"]["dimension"], 10);
    }
}
