//! Indecomposability of a module over a matrix Lie algebra.
//!
//! A module is indecomposable iff its commutant algebra `A` is local, i.e.
//! `A / rad A` is one-dimensional. The radical comes from the trace form on
//! the left-regular representation; a random-spectrum test serves as an
//! independent oracle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::linalg::{cluster_eigenvalues, inner, nullspace_detailed, project_onto_orthonormal};
use crate::numkernel::{eigenvalues, ComplexMatrix};
use crate::report::{Check, VerificationReport};
use crate::sympembed::GeneratorRep;

pub const COMMUTANT_TOL: f64 = 1e-9;
pub const CLUSTER_RADIUS: f64 = 1e-6;
pub const CLOSURE_TOL: f64 = 1e-8;
pub const IDEMPOTENT_TOL: f64 = 1e-8;
const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantAlgebra {
    pub dimension_of_module: usize,
    /// Frobenius-orthonormal basis.
    pub basis: Vec<ComplexMatrix>,
    pub radical_dimension: usize,
}

impl CommutantAlgebra {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Real-linear combination of the basis.
    pub fn combine(&self, coeffs: &[f64]) -> ComplexMatrix {
        let d = self.dimension_of_module;
        let mut m = ComplexMatrix::zeros(d, d);
        for (b, &c) in self.basis.iter().zip(coeffs) {
            for (e, x) in m.entries_mut().iter_mut().zip(b.entries()) {
                *e += x * c;
            }
        }
        m
    }

    /// Distance of the identity from the span of the basis.
    pub fn identity_residual(&self) -> f64 {
        let d = self.dimension_of_module;
        let id = ComplexMatrix::identity(d).vectorize();
        let basis = self.stacked();
        project_onto_orthonormal(&basis, &id).1 / (d as f64).sqrt()
    }

    fn stacked(&self) -> ComplexMatrix {
        let d = self.dimension_of_module;
        let cols: Vec<Vec<Complex64>> = self.basis.iter().map(ComplexMatrix::vectorize).collect();
        ComplexMatrix::from_fn(d * d, cols.len(), |i, j| cols[j][i])
    }
}

fn commutation_operator(gens: &GeneratorRep) -> ComplexMatrix {
    let d = gens.dimension;
    let k = gens.len();
    let mut op = ComplexMatrix::zeros(k * d * d, d * d);
    for (g, m) in gens.matrices.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                let row = g * d * d + i * d + j;
                // (CM − MC)_ij = Σ_l C_il M_lj − M_il C_lj
                for l in 0..d {
                    op[(row, i * d + l)] += m[(l, j)];
                    op[(row, l * d + j)] -= m[(i, l)];
                }
            }
        }
    }
    op
}

/// Solution space of `C·M_i = M_i·C` for every generator, with its radical.
pub fn commutant(gens: &GeneratorRep) -> Result<CommutantAlgebra> {
    let d = gens.dimension;
    let basis: Vec<ComplexMatrix> = if gens.is_empty() {
        (0..d * d)
            .map(|idx| {
                let mut m = ComplexMatrix::zeros(d, d);
                m[(idx / d, idx % d)] = 1.0.into();
                m
            })
            .collect()
    } else {
        let ns = nullspace_detailed(&commutation_operator(gens), COMMUTANT_TOL)?;
        if ns.ambiguous {
            return Err(Error::Inconclusive(format!(
                "commutant rank sits within a factor 10 of the threshold {COMMUTANT_TOL:e}"
            )));
        }
        (0..ns.basis.cols())
            .map(|c| {
                let v = ns.basis.col(c);
                ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
            })
            .collect()
    };
    let mut alg = CommutantAlgebra {
        dimension_of_module: d,
        basis,
        radical_dimension: 0,
    };
    alg.radical_dimension = radical_of(&alg)?;
    Ok(alg)
}

/// Structure constants `γ[a][b][c]` with `B_a B_b = Σ_c γ_abc B_c`, and the
/// worst relative residual of that expansion.
fn structure_constants(alg: &CommutantAlgebra) -> Result<(Vec<Vec<Vec<Complex64>>>, f64)> {
    let basis = alg.stacked();
    let mut worst: f64 = 0.0;
    let mut gamma = Vec::with_capacity(alg.dimension());
    for a in &alg.basis {
        let mut row = Vec::with_capacity(alg.dimension());
        for b in &alg.basis {
            let prod = a.matmul(b)?.vectorize();
            let (coeffs, res) = project_onto_orthonormal(&basis, &prod);
            worst = worst.max(res / 1.0f64.max(crate::numkernel::linalg::norm(&prod)));
            row.push(coeffs);
        }
        gamma.push(row);
    }
    Ok((gamma, worst))
}

/// Dimension of `{a : tr(L_a L_b) = 0 ∀ b}` with `L` the left-regular
/// representation; in characteristic zero this is the Jacobson radical.
pub fn radical_of(alg: &CommutantAlgebra) -> Result<usize> {
    let n = alg.dimension();
    if n == 0 {
        return Ok(0);
    }
    let (gamma, residual) = structure_constants(alg)?;
    if residual > CLOSURE_TOL {
        return Err(Error::NotMultiplicativelyClosed { residual });
    }
    // L_a[c][b] = γ_abc
    let left: Vec<ComplexMatrix> = (0..n)
        .map(|a| ComplexMatrix::from_fn(n, n, |c, b| gamma[a][b][c]))
        .collect();
    let mut g = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let t = left[a].matmul(&left[b])?.trace();
            g[(a, b)] = t;
            g[(b, a)] = t;
        }
    }
    if g.is_zero() {
        return Ok(n);
    }
    let ns = nullspace_detailed(&g, COMMUTANT_TOL)?;
    if ns.ambiguous {
        return Err(Error::Inconclusive(format!(
            "trace form rank sits within a factor 10 of the threshold {COMMUTANT_TOL:e}"
        )));
    }
    Ok(n - ns.rank)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub indecomposable: bool,
    pub commutant_dimension: usize,
    pub radical_dimension: usize,
    /// Nontrivial idempotent in the commutant when decomposable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotent: Option<ComplexMatrix>,
}

impl Verdict {
    /// Rank of the certificate idempotent, read off its trace.
    pub fn idempotent_rank(&self) -> Option<usize> {
        self.idempotent.as_ref().map(|e| e.trace().re.round() as usize)
    }
}

pub fn decide(gens: &GeneratorRep) -> Result<Verdict> {
    decide_with_seed(gens, DEFAULT_SEED)
}

pub fn decide_with_seed(gens: &GeneratorRep, seed: u64) -> Result<Verdict> {
    decide_in(&commutant(gens)?, gens, seed)
}

/// [`decide_with_seed`] with a precomputed commutant of `gens`.
pub fn decide_in(alg: &CommutantAlgebra, gens: &GeneratorRep, seed: u64) -> Result<Verdict> {
    let semisimple = alg.dimension() - alg.radical_dimension;
    if semisimple == 1 {
        return Ok(Verdict {
            indecomposable: true,
            commutant_dimension: alg.dimension(),
            radical_dimension: alg.radical_dimension,
            idempotent: None,
        });
    }
    let e = split_idempotent(alg, gens, seed)?;
    Ok(Verdict {
        indecomposable: false,
        commutant_dimension: alg.dimension(),
        radical_dimension: alg.radical_dimension,
        idempotent: Some(e),
    })
}

fn random_element(alg: &CommutantAlgebra, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let coeffs: Vec<f64> = (0..alg.dimension()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    alg.combine(&coeffs)
}

fn clusters_of(m: &ComplexMatrix, alg_dim: usize) -> Result<Vec<crate::numkernel::linalg::EigenCluster>> {
    let eig = eigenvalues(m)?;
    Ok(cluster_eigenvalues(&eig, CLUSTER_RADIUS, m.frobenius_norm(), alg_dim))
}

/// Spectral projection of a random commutant element with at least two
/// eigenvalue clusters: Lagrange interpolation of the indicator of one
/// cluster, then refined by `e ← 3e² − 2e³`.
fn split_idempotent(alg: &CommutantAlgebra, gens: &GeneratorRep, seed: u64) -> Result<ComplexMatrix> {
    let d = alg.dimension_of_module;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..32 {
        let c = random_element(alg, &mut rng);
        let clusters = clusters_of(&c, alg.dimension())?;
        if clusters.len() < 2 {
            continue;
        }
        let target = clusters[0].center;
        let id = ComplexMatrix::identity(d);
        let mut e = id.clone();
        for other in &clusters[1..] {
            let factor = (&c - &id.scale(other.center)).scale(1.0 / (target - other.center));
            e = e.matmul(&factor)?;
        }
        for _ in 0..100 {
            let e2 = e.matmul(&e)?;
            if e2.max_abs_diff(&e).unwrap_or(f64::INFINITY) < 1e-14 * d as f64 {
                break;
            }
            let e3 = e2.matmul(&e)?;
            e = &e2.scale_real(3.0) - &e3.scale_real(2.0);
        }
        if certificate_valid(&e, gens)? {
            return Ok(e);
        }
    }
    Err(Error::Inconclusive(
        "semisimple quotient has dimension > 1 but no splitting idempotent was found".into(),
    ))
}

/// `‖e² − e‖ < tol`, `e` commutes with every generator, and `e ∉ {0, I}`.
pub fn certificate_valid(e: &ComplexMatrix, gens: &GeneratorRep) -> Result<bool> {
    let d = gens.dimension;
    let idem = e.matmul(e)?.max_abs_diff(e).unwrap_or(f64::INFINITY);
    let mut comm: f64 = 0.0;
    for m in &gens.matrices {
        let scale = 1.0f64.max(m.max_abs()) * 1.0f64.max(e.max_abs());
        comm = comm.max(e.commutator(m)?.max_abs() / scale);
    }
    let rank = e.trace().re;
    let nontrivial = rank > 0.5 && rank < d as f64 - 0.5;
    Ok(idem < IDEMPOTENT_TOL && comm < IDEMPOTENT_TOL && nontrivial)
}

/// True iff every sampled random real combination of the basis has a
/// single eigenvalue cluster (the algebra is local).
pub fn cross_check_spectrum(alg: &CommutantAlgebra, samples: usize, seed: u64) -> Result<bool> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let c = random_element(alg, &mut rng);
        if clusters_of(&c, alg.dimension())?.len() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative deviation of the projection onto the span of `alg` from `m`.
pub fn membership_residual(alg: &CommutantAlgebra, m: &ComplexMatrix) -> f64 {
    let v = m.vectorize();
    let (_, res) = project_onto_orthonormal(&alg.stacked(), &v);
    res / inner(&v, &v).re.sqrt().max(1e-300)
}

/// Verdict against `expect_indecomposable`, spectral cross-check and (when
/// decomposable) certificate for one module. Numerical ambiguity marks the
/// report inconclusive.
pub fn indecomp_report(
    name: &str,
    gens: &GeneratorRep,
    expect_indecomposable: bool,
    seed: u64,
) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(format!("indecomp-{name}"));
    let anchor = "remains indecomposable upon restriction";
    let outcome = commutant(gens).and_then(|alg| {
        let v = decide_in(&alg, gens, seed)?;
        let local = cross_check_spectrum(&alg, 20, seed)?;
        Ok((v, local))
    });
    let (v, local) = match outcome {
        Ok(x) => x,
        Err(Error::Inconclusive(why)) => {
            r.inconclusive = true;
            r.push(Check::exact(format!("verdict dim {}", gens.dimension), anchor, false).with_detail(why));
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let label = if v.indecomposable { "indecomposable" } else { "decomposable" };
    let pass = v.indecomposable == expect_indecomposable;
    r.push(Check::exact(format!("verdict dim {}", gens.dimension), anchor, pass).with_detail(format!(
        "{label}; commutant {}, radical {}",
        v.commutant_dimension, v.radical_dimension
    )));
    r.push(Check::exact(
        "spectral oracle agrees",
        "local commutant algebra",
        local == v.indecomposable,
    ));
    if let Some(e) = &v.idempotent {
        r.push(
            Check::exact("idempotent certificate", "direct sum decomposition", certificate_valid(e, gens)?)
                .with_detail(format!("rank {}", v.idempotent_rank().unwrap_or(0))),
        );
    }
    Ok(r)
}
