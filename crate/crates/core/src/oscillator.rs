//! One Schrödinger oscillator in the Hermite basis `ψ_n^λ`: truncated
//! matrices for `Q`, `P`, `Z`, ladder operators, the Hamiltonian
//! `H̃ = ½(P² + Q²)`, and the grid realization of `dπ_λ`.
//!
//! In this basis `dπ_λ(Q) = i·u` and `dπ_λ(P) = λ·∂_u` are tridiagonal, so
//! truncation to `N` functions only disturbs the last row and column.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{gauss_hermite, ComplexMatrix, QuadratureRule, I, ONE};
use crate::report::{Check, VerificationReport};
use crate::sympembed::GeneratorRep;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasisSpec {
    pub lambda: f64,
    pub truncation: usize,
    pub quad_nodes: usize,
}

impl HermiteBasisSpec {
    /// Requires `λ > 0`, `N ≥ 2` and `m ≥ 2N`.
    pub fn new(lambda: f64, truncation: usize, quad_nodes: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if truncation < 2 {
            return Err(Error::InvalidParameter(format!("truncation must be at least 2, got {truncation}")));
        }
        if quad_nodes < 2 * truncation {
            return Err(Error::InvalidParameter(format!(
                "need at least 2N = {} quadrature nodes, got {quad_nodes}",
                2 * truncation
            )));
        }
        Ok(HermiteBasisSpec {
            lambda,
            truncation,
            quad_nodes,
        })
    }

    /// Default node count `4N`.
    pub fn with_truncation(lambda: f64, truncation: usize) -> Result<Self> {
        Self::new(lambda, truncation, 4 * truncation)
    }

    pub fn rule(&self) -> Result<QuadratureRule> {
        gauss_hermite(self.lambda, self.quad_nodes)
    }
}

/// `ψ_n^λ(u)·exp(u²/2λ)` for `n < count`, by the normalized recurrence
/// `h_{n+1} = √(2/(n+1))·x·h_n − √(n/(n+1))·h_{n−1}`, `x = u/√λ`.
pub fn hermite_poly_values(lambda: f64, count: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let x = u / lambda.sqrt();
    let h0 = (std::f64::consts::PI * lambda).powf(-0.25);
    out.push(h0);
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * x * h0);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// `ψ_n^λ(u)` for `n < count`.
pub fn hermite_values(lambda: f64, count: usize, u: f64) -> Vec<f64> {
    let x = u / lambda.sqrt();
    // Fold the Gaussian into the seed values so large |u| underflows
    // gracefully instead of overflowing the polynomial part first.
    let g = (-0.5 * x * x).exp();
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push((std::f64::consts::PI * lambda).powf(-0.25) * g);
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

pub fn hermite_eval(spec: &HermiteBasisSpec, n: usize, u: f64) -> Result<f64> {
    if n >= spec.truncation {
        return Err(Error::IndexOutOfRange {
            index: n,
            truncation: spec.truncation,
        });
    }
    Ok(hermite_values(spec.lambda, n + 1, u)[n])
}

/// `N×N` matrix with `√(n+1)` at `(n, n+1)`.
fn lowering(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_fn(n, n, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

/// Truncated `dπ_λ(Q)`, `dπ_λ(P)`, `dπ_λ(Z)` for any `λ ≠ 0`, over the
/// basis `ψ_n^{|λ|}`: `Q = i·u`, `P = λ·∂_u`, `Z = iλ·I`.
pub fn schrodinger_matrices(lambda: f64, truncation: usize) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be nonzero, got {lambda}")));
    }
    let a = lowering(truncation);
    let ad = a.transpose();
    let abs = lambda.abs();
    // u = √(|λ|/2)(a + a†),  ∂_u = (a − a†)/√(2|λ|)
    let q = (&a + &ad).scale(I * (abs / 2.0).sqrt());
    let p = (&a - &ad).scale_real(lambda / (2.0 * abs).sqrt());
    let z = ComplexMatrix::identity(truncation).scale(I * lambda);
    Ok((q, p, z))
}

/// Labels `Q_1`, `P_1`, `Z`.
pub fn op_matrices(spec: &HermiteBasisSpec) -> Result<GeneratorRep> {
    let (q, p, z) = schrodinger_matrices(spec.lambda, spec.truncation)?;
    GeneratorRep::new(
        spec.truncation,
        vec!["Q_1".into(), "P_1".into(), "Z".into()],
        vec![q, p, z],
    )
}

/// `(â, â†)` with `â` carrying `√(n+1)` on the superdiagonal.
pub fn ladder_matrices(spec: &HermiteBasisSpec) -> (ComplexMatrix, ComplexMatrix) {
    let a = lowering(spec.truncation);
    let ad = a.transpose();
    (a, ad)
}

/// Diagonal of `[â, â†]` for the truncated ladders, in integer arithmetic.
/// The entries of `â` are `√(n+1)`, so every product of matching entries is
/// the integer `n+1`: the result is `1` except `1 − N` in the top corner.
pub fn ladder_commutator_exact(truncation: usize) -> Vec<i64> {
    let sq = |i: usize| -> i64 { if i + 1 < truncation { (i + 1) as i64 } else { 0 } };
    (0..truncation).map(|i| sq(i) - i as i64).collect()
}

/// `H̃ = ½(P² + Q²)` from the truncated matrices.
pub fn hamiltonian(spec: &HermiteBasisSpec) -> Result<ComplexMatrix> {
    let (q, p, _) = schrodinger_matrices(spec.lambda, spec.truncation)?;
    Ok((&(&p * &p) + &(&q * &q)).scale_real(0.5))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    pub lambda: f64,
    pub truncation: usize,
    pub coeffs: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(spec: &HermiteBasisSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.truncation {
            return Err(Error::DimensionMismatch {
                op: "WaveFunction::new",
                left: (spec.truncation, 1),
                right: (coeffs.len(), 1),
            });
        }
        Ok(WaveFunction {
            lambda: spec.lambda,
            truncation: spec.truncation,
            coeffs,
        })
    }

    pub fn basis(spec: &HermiteBasisSpec, n: usize) -> Result<Self> {
        if n >= spec.truncation {
            return Err(Error::IndexOutOfRange {
                index: n,
                truncation: spec.truncation,
            });
        }
        let mut c = vec![Complex64::new(0.0, 0.0); spec.truncation];
        c[n] = ONE;
        Self::new(spec, c)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        hermite_values(self.lambda, self.truncation, u)
            .iter()
            .zip(&self.coeffs)
            .map(|(h, c)| c * h)
            .sum()
    }

    /// Samples on the quadrature nodes of `spec`.
    pub fn to_grid(&self, spec: &HermiteBasisSpec) -> Result<Grid> {
        let rule = spec.rule()?;
        Ok(Grid {
            values: rule.nodes.iter().map(|&u| self.eval(u)).collect(),
            nodes: rule.nodes,
        })
    }
}

/// Function values on a node set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Hermite coefficients of a grid function sampled on `spec`'s nodes.
pub fn project_grid(spec: &HermiteBasisSpec, grid: &Grid) -> Result<WaveFunction> {
    let rule = spec.rule()?;
    if grid.nodes.len() != rule.len() {
        return Err(Error::DimensionMismatch {
            op: "project_grid",
            left: (rule.len(), 1),
            right: (grid.nodes.len(), 1),
        });
    }
    let n = spec.truncation;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for ((&u, &w), &f) in rule.nodes.iter().zip(&rule.weights).zip(&grid.values) {
        // ∫ f ψ_n = Σ w_j f(u_j) ψ_n(u_j) e^{u_j²/λ}; split the Gaussian
        // between ψ_n's polynomial part and f.
        let poly = hermite_poly_values(spec.lambda, n, u);
        let g = (0.5 * u * u / spec.lambda).exp();
        for (c, h) in coeffs.iter_mut().zip(&poly) {
            *c += f * (w * h * g);
        }
    }
    WaveFunction::new(spec, coeffs)
}

/// `dπ_λ(X)` on grid samples: `Q` multiplies by `iu`, `Z` by `iλ`, and `P`
/// differentiates through the Hermite coefficients.
pub fn dpi_action(spec: &HermiteBasisSpec, label: &str, grid: &Grid) -> Result<Grid> {
    let values = match label {
        "Q" | "Q_1" => grid.nodes.iter().zip(&grid.values).map(|(&u, &f)| I * u * f).collect(),
        "Z" => grid.values.iter().map(|&f| I * spec.lambda * f).collect(),
        "P" | "P_1" => {
            let wf = project_grid(spec, grid)?;
            let (_, p, _) = schrodinger_matrices(spec.lambda, spec.truncation)?;
            let moved = WaveFunction::new(spec, p.apply(&wf.coeffs)?)?;
            grid.nodes.iter().map(|&u| moved.eval(u)).collect()
        }
        other => return Err(Error::UnknownLabel(other.to_string())),
    };
    Ok(Grid {
        nodes: grid.nodes.clone(),
        values,
    })
}

/// `⟨ψ_m, ψ_n⟩` by quadrature.
pub fn basis_gram(spec: &HermiteBasisSpec) -> Result<ComplexMatrix> {
    let rule = spec.rule()?;
    let n = spec.truncation;
    let table: Vec<Vec<f64>> = rule.nodes.iter().map(|&u| hermite_poly_values(spec.lambda, n, u)).collect();
    Ok(ComplexMatrix::from_real_fn(n, n, |a, b| {
        table.iter().zip(&rule.weights).map(|(h, w)| w * h[a] * h[b]).sum()
    }))
}

/// Truncation-aware checks of the oscillator identities.
pub fn oscillator_report(spec: &HermiteBasisSpec) -> Result<VerificationReport> {
    let n = spec.truncation;
    let lambda = spec.lambda;
    let mut r = VerificationReport::new("oscillator");
    let rep = op_matrices(spec)?;
    let (q, p, z) = (rep.get("Q_1")?, rep.get("P_1")?, rep.get("Z")?);
    let comm = p.commutator(q)?;
    let target = ComplexMatrix::identity(n).scale(I * lambda);
    let safe = (comm.leading_block(n - 1, n - 1))
        .max_abs_diff(&target.leading_block(n - 1, n - 1))
        .unwrap_or(f64::INFINITY);
    r.push(Check::within("[P,Q] = iλ on safe block", "Heisenberg-Weyl commutation relations", safe, 1e-12));
    let corner = comm[(n - 1, n - 1)] - I * lambda * (1.0 - n as f64);
    r.push(
        Check::within(
            "[P,Q] corner = iλ(1−N)",
            "truncated ladder commutator",
            corner.norm(),
            4.0 * f64::EPSILON * lambda * n as f64,
        )
        .with_detail(format!("corner {}", comm[(n - 1, n - 1)])),
    );
    // [P, Q] = iλ[â, â†] with the integer ladder commutator.
    let exact = ladder_commutator_exact(n);
    let corner_exact = I * (lambda * exact[n - 1] as f64) == I * (lambda * (1.0 - n as f64));
    let rest_exact = exact[..n - 1].iter().all(|&d| d == 1);
    r.push(Check::exact(
        "[P,Q] corner exact on the integer ladder path",
        "truncated ladder commutator",
        corner_exact && rest_exact,
    ));
    let zc = z.commutator(q)?.max_abs().max(z.commutator(p)?.max_abs());
    r.push(Check::exact("Z central", "centre of hw", zc == 0.0));

    let h = hamiltonian(spec)?;
    let mut worst: f64 = 0.0;
    for k in 0..n - 1 {
        let col = h.col(k);
        let want = -lambda * (k as f64 + 0.5);
        for (i, v) in col.iter().enumerate() {
            let expected = if i == k { want } else { 0.0 };
            worst = worst.max((v - expected).norm());
        }
    }
    r.push(Check::within("H̃ e_n = −λ(n+½) e_n, n ≤ N−2", "harmonic oscillator Hamiltonian", worst, 1e-12));
    let top = h[(n - 1, n - 1)].re;
    let artifact = (top + lambda * (n as f64 - 0.5)).abs();
    r.push(
        Check::above("top row is a truncation artifact", "harmonic oscillator Hamiltonian", artifact, 1e-6)
            .with_detail(format!("H̃[N−1,N−1] = {top}")),
    );

    let (a, ad) = ladder_matrices(spec);
    let s = (2.0 * lambda).sqrt();
    let a_from = (&q.scale(-I) + p).scale_real(1.0 / s);
    let ad_from = (&q.scale(-I) - p).scale_real(1.0 / s);
    let ladder = a.max_abs_diff(&a_from).unwrap().max(ad.max_abs_diff(&ad_from).unwrap());
    r.push(Check::within("ladders from Q and P", "raising and lowering operators", ladder, 1e-14));
    let ground = a.col(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    r.push(Check::exact("â ψ₀ = 0", "ground state", ground == 0.0));

    let gram = basis_gram(spec)?;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(n)).unwrap();
    r.push(Check::within("basis orthonormality", "Hermite basis", dev, 1e-10));
    Ok(r)
}
