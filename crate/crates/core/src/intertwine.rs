//! Tensor products of two Schrödinger representations.
//!
//! For `λ + μ ≠ 0` the change of variables
//! `(UF)(u, v) = |λ+μ|^{-1/2} F((λu+v)/(λ+μ), (μu−v)/(λ+μ))` intertwines
//! `dπ_λ ⊗ dπ_μ` with `dπ_{λ+μ} ⊗ 1`. For `μ = −λ` the rotation
//! `(u ± v)/√2` splits the action into commuting multiplication and
//! differentiation parts. The lowest-weight states of `dπ_λ ⊗ dπ_μ` are
//! the images of `(ξ₁ − ξ₂)^k` in the Hermite product basis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numkernel::linalg::spectral_norm;
use crate::numkernel::{gauss_hermite, ComplexMatrix, I, ZERO};
use crate::oscillator::{hamiltonian, hermite_poly_values, hermite_values, schrodinger_matrices, HermiteBasisSpec};
use crate::report::{Check, VerificationReport};
use crate::sympembed::GeneratorRep;

/// Gram deviation beyond which an assembled operator is rejected.
pub const UNDERRESOLVED_GRAM: f64 = 1e-6;

/// Coefficients over `ψ_p^{|λ|} ⊗ ψ_q^{|μ|}`, entry `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductWaveFunction {
    pub lambda: f64,
    pub mu: f64,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub coeffs: ComplexMatrix,
}

impl ProductWaveFunction {
    pub fn new(lambda: f64, mu: f64, coeffs: ComplexMatrix) -> Result<Self> {
        if lambda == 0.0 || mu == 0.0 || !lambda.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("basis parameters must be nonzero, got ({lambda}, {mu})")));
        }
        if !coeffs.is_square() || coeffs.rows() == 0 {
            return Err(Error::DimensionMismatch {
                op: "product wave function",
                left: coeffs.shape(),
                right: (coeffs.rows(), coeffs.rows()),
            });
        }
        Ok(ProductWaveFunction {
            lambda,
            mu,
            truncation: coeffs.rows(),
            coeffs,
        })
    }

    pub fn zeros(lambda: f64, mu: f64, truncation: usize) -> Result<Self> {
        Self::new(lambda, mu, ComplexMatrix::zeros(truncation, truncation))
    }

    /// `ψ_p ⊗ ψ_q`.
    pub fn basis(lambda: f64, mu: f64, truncation: usize, p: usize, q: usize) -> Result<Self> {
        if p >= truncation || q >= truncation {
            return Err(Error::IndexOutOfRange {
                index: p.max(q),
                truncation,
            });
        }
        let mut f = Self::zeros(lambda, mu, truncation)?;
        f.coeffs[(p, q)] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.frobenius_norm()
    }

    pub fn inner(&self, other: &ProductWaveFunction) -> Result<Complex64> {
        self.same_space(other)?;
        Ok(self
            .coeffs
            .entries()
            .iter()
            .zip(other.coeffs.entries())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn same_space(&self, other: &ProductWaveFunction) -> Result<()> {
        if self.lambda != other.lambda || self.mu != other.mu || self.truncation != other.truncation {
            return Err(Error::InvalidParameter(format!(
                "wave functions live on different bases: ({}, {}, {}) vs ({}, {}, {})",
                self.lambda, self.mu, self.truncation, other.lambda, other.mu, other.truncation
            )));
        }
        Ok(())
    }

    pub fn eval(&self, u: f64, v: f64) -> Complex64 {
        let n = self.truncation;
        let hu = hermite_values(self.lambda.abs(), n, u);
        let hv = hermite_values(self.mu.abs(), n, v);
        let mut s = ZERO;
        for (p, a) in hu.iter().enumerate() {
            for (q, b) in hv.iter().enumerate() {
                s += self.coeffs[(p, q)] * (a * b);
            }
        }
        s
    }

    fn with_coeffs(&self, coeffs: ComplexMatrix) -> Self {
        ProductWaveFunction { coeffs, ..self.clone() }
    }

    /// Largest index `max(p, q)` with a nonzero coefficient.
    fn top_index(&self) -> Option<usize> {
        let n = self.truncation;
        (0..n * n)
            .filter(|&i| self.coeffs.entries()[i] != ZERO)
            .map(|i| (i / n).max(i % n))
            .max()
    }
}

/// `X ⊗ I + I ⊗ Y` applied to a coefficient matrix: `X C + C Yᵀ`.
fn tensor_sum_apply(x: &ComplexMatrix, y: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    &(x * c) + &(c * &y.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerSpec {
    pub lambda: f64,
    pub mu: f64,
    /// Basis parameter `ν` of the auxiliary output factor.
    pub output_aux_parameter: f64,
    pub truncation: usize,
    pub quad_nodes: usize,
    /// Output basis size per factor. Equal to `truncation` when `λμ > 0`,
    /// where `U` preserves total degree.
    pub output_truncation: usize,
}

impl IntertwinerSpec {
    /// `ν = |λμ(λ+μ)|`. For `λμ < 0` the image of a finite Hermite block is
    /// not finite, so the output basis and node count are enlarged to
    /// [`opposite_sign_output`] and [`opposite_sign_nodes`].
    pub fn new(lambda: f64, mu: f64, truncation: usize, quad_nodes: usize) -> Result<Self> {
        let (out, nodes) = if lambda * mu > 0.0 {
            (truncation, quad_nodes)
        } else {
            (
                opposite_sign_output(truncation).max(truncation),
                opposite_sign_nodes(truncation).max(quad_nodes),
            )
        };
        Self::with_output(lambda, mu, truncation, nodes, out)
    }

    pub fn with_output(lambda: f64, mu: f64, truncation: usize, quad_nodes: usize, output_truncation: usize) -> Result<Self> {
        if lambda == 0.0 || mu == 0.0 || !lambda.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("λ and μ must be nonzero, got ({lambda}, {mu})")));
        }
        if lambda + mu == 0.0 {
            return Err(Error::WrongPath(format!(
                "λ + μ = 0 for ({lambda}, {mu}); use the zero-sum construction"
            )));
        }
        if truncation < 2 || output_truncation < truncation {
            return Err(Error::InvalidParameter(format!(
                "need 2 ≤ N ≤ output truncation, got N = {truncation}, output {output_truncation}"
            )));
        }
        if quad_nodes < truncation {
            return Err(Error::InvalidParameter(format!(
                "need at least N = {truncation} quadrature nodes, got {quad_nodes}"
            )));
        }
        Ok(IntertwinerSpec {
            lambda,
            mu,
            output_aux_parameter: (lambda * mu * (lambda + mu)).abs(),
            truncation,
            quad_nodes,
            output_truncation,
        })
    }

    pub fn sum(&self) -> f64 {
        self.lambda + self.mu
    }
}

/// Output basis size used for opposite-sign pairs.
pub fn opposite_sign_output(truncation: usize) -> usize {
    7 * truncation
}

/// Node count used for opposite-sign pairs.
pub fn opposite_sign_nodes(truncation: usize) -> usize {
    12 * truncation
}

/// Linear substitution `x = a·(u, v)`, `y = b·(u, v)` with a constant
/// Jacobian factor, between product Hermite bases.
struct Substitution {
    input: (f64, f64),
    output: (f64, f64),
    x: [f64; 2],
    y: [f64; 2],
    prefactor: f64,
}

impl Substitution {
    /// Quadratic form `A u² + 2B uv + C v²` of the full integrand exponent.
    fn exponent(&self) -> (f64, f64, f64) {
        let (ax, ay) = self.input;
        let (bu, bv) = self.output;
        let a = self.x[0] * self.x[0] / (2.0 * ax) + self.y[0] * self.y[0] / (2.0 * ay) + 1.0 / (2.0 * bu);
        let b = self.x[0] * self.x[1] / (2.0 * ax) + self.y[0] * self.y[1] / (2.0 * ay);
        let c = self.x[1] * self.x[1] / (2.0 * ax) + self.y[1] * self.y[1] / (2.0 * ay) + 1.0 / (2.0 * bv);
        (a, b, c)
    }

    /// Matrix with rows `a·n_out + b` and columns `p·n_in + q`. The
    /// quadrature is a tensor Gauss–Hermite rule fitted to the marginals
    /// of the integrand's Gaussian, which makes it exact when the
    /// substitution maps product Gaussians to product Gaussians.
    fn assemble(&self, n_in: usize, n_out: usize, m: usize, exec: Exec) -> Result<ComplexMatrix> {
        let (a, b, c) = self.exponent();
        let det = a * c - b * b;
        if !(det > 0.0) {
            return Err(Error::InvalidParameter("substitution exponent is not positive definite".into()));
        }
        let ru = gauss_hermite(c / det, m)?;
        let rv = gauss_hermite(a / det, m)?;
        let wu = ru.unweighted();
        let wv = rv.unweighted();
        let (ax, ay) = self.input;
        let (bu, bv) = self.output;

        let au: Vec<f64> = ru.nodes.iter().flat_map(|&u| hermite_poly_values(bu, n_out, u)).collect();
        let bvals: Vec<f64> = rv.nodes.iter().flat_map(|&v| hermite_poly_values(bv, n_out, v)).collect();
        let mut weight = vec![0.0; m * m];
        let mut xs = vec![0.0; m * m * n_in];
        let mut ys = vec![0.0; m * m * n_in];
        for (i, &u) in ru.nodes.iter().enumerate() {
            for (k, &v) in rv.nodes.iter().enumerate() {
                let j = i * m + k;
                let e = a * u * u + 2.0 * b * u * v + c * v * v;
                weight[j] = self.prefactor * wu[i] * wv[k] * (-e).exp();
                let x = self.x[0] * u + self.x[1] * v;
                let y = self.y[0] * u + self.y[1] * v;
                xs[j * n_in..(j + 1) * n_in].copy_from_slice(&hermite_poly_values(ax, n_in, x));
                ys[j * n_in..(j + 1) * n_in].copy_from_slice(&hermite_poly_values(ay, n_in, y));
            }
        }

        let columns = exec.map_range(n_in * n_in, |col| {
            let (p, q) = (col / n_in, col % n_in);
            // t[i][b] = Σ_k g_ik B_b(v_k)
            let mut t = vec![0.0; m * n_out];
            for i in 0..m {
                let row = &mut t[i * n_out..(i + 1) * n_out];
                for k in 0..m {
                    let j = i * m + k;
                    let g = weight[j] * xs[j * n_in + p] * ys[j * n_in + q];
                    if g == 0.0 {
                        continue;
                    }
                    for (r, bb) in row.iter_mut().zip(&bvals[k * n_out..(k + 1) * n_out]) {
                        *r += g * bb;
                    }
                }
            }
            let mut out = vec![0.0; n_out * n_out];
            for i in 0..m {
                let ai = &au[i * n_out..(i + 1) * n_out];
                let ti = &t[i * n_out..(i + 1) * n_out];
                for (aa, &av) in ai.iter().enumerate() {
                    if av == 0.0 {
                        continue;
                    }
                    for (o, &tv) in out[aa * n_out..(aa + 1) * n_out].iter_mut().zip(ti) {
                        *o += av * tv;
                    }
                }
            }
            out
        });
        Ok(ComplexMatrix::from_real_fn(n_out * n_out, n_in * n_in, |r, c| columns[c][r]))
    }
}

/// Columns `p·N + q` with `p + q ≤ limit`.
fn block_columns(n: usize, limit: usize) -> Vec<usize> {
    (0..n * n).filter(|&c| c / n + c % n <= limit).collect()
}

fn gram_deviation(m: &ComplexMatrix, cols: &[usize]) -> Result<f64> {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let s = m.select(&rows, cols);
    let g = s.adjoint().matmul(&s)?;
    Ok(g.max_abs_diff(&ComplexMatrix::identity(cols.len())).unwrap_or(f64::INFINITY))
}

/// Discretized `U_{λ,μ}`, immutable once assembled.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub spec: IntertwinerSpec,
    /// Rows `a·N_out + b`, columns `p·N + q`.
    pub matrix: ComplexMatrix,
    /// Gram deviation on the block `p + q ≤ N − 4`.
    pub gram_deviation: f64,
}

type CacheKey = (u64, u64, usize, usize, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Intertwiner>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Intertwiner>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl Intertwiner {
    pub fn assemble(spec: IntertwinerSpec, exec: Exec) -> Result<Self> {
        let (l, m) = (spec.lambda, spec.mu);
        let s = spec.sum();
        let sub = Substitution {
            input: (l.abs(), m.abs()),
            output: (s.abs(), spec.output_aux_parameter),
            x: [l / s, 1.0 / s],
            y: [m / s, -1.0 / s],
            prefactor: s.abs().powf(-0.5),
        };
        let n = spec.truncation;
        let matrix = sub.assemble(n, spec.output_truncation, spec.quad_nodes, exec)?;
        let gram = gram_deviation(&matrix, &block_columns(n, n.saturating_sub(4)))?;
        if !(gram <= UNDERRESOLVED_GRAM) {
            return Err(Error::QuadratureUnderresolved { deviation: gram });
        }
        Ok(Intertwiner {
            spec,
            matrix,
            gram_deviation: gram,
        })
    }

    /// Shared instance per spec; assembled on first use.
    pub fn cached(spec: IntertwinerSpec, exec: Exec) -> Result<Arc<Self>> {
        let key = (
            spec.lambda.to_bits(),
            spec.mu.to_bits(),
            spec.truncation,
            spec.quad_nodes,
            spec.output_truncation,
        );
        if let Some(hit) = cache().lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let built = Arc::new(Self::assemble(spec, exec)?);
        cache().lock().expect("cache lock").entry(key).or_insert(built.clone());
        Ok(built)
    }

    /// Drops every cached instance.
    pub fn clear_cache() {
        cache().lock().expect("cache lock").clear();
    }

    fn check_input(&self, f: &ProductWaveFunction) -> Result<()> {
        let s = &self.spec;
        if f.lambda != s.lambda || f.mu != s.mu || f.truncation != s.truncation {
            return Err(Error::InvalidParameter(format!(
                "input must live on ({}, {}, {}), got ({}, {}, {})",
                s.lambda, s.mu, s.truncation, f.lambda, f.mu, f.truncation
            )));
        }
        Ok(())
    }

    /// Output over `ψ_a^{|λ+μ|} ⊗ ψ_b^ν`.
    pub fn apply(&self, f: &ProductWaveFunction) -> Result<ProductWaveFunction> {
        self.check_input(f)?;
        let n_out = self.spec.output_truncation;
        let v = self.matrix.apply(&f.coeffs.vectorize())?;
        ProductWaveFunction::new(
            self.spec.sum(),
            self.spec.output_aux_parameter,
            ComplexMatrix::from_row_major(n_out, n_out, v)?,
        )
    }

    fn operators(&self, label: &str) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        let s = &self.spec;
        let pick = |lambda: f64, n: usize| -> Result<ComplexMatrix> {
            let (q, p, z) = schrodinger_matrices(lambda, n)?;
            match label {
                "Q" | "Q_1" => Ok(q),
                "P" | "P_1" => Ok(p),
                "Z" => Ok(z),
                other => Err(Error::UnknownLabel(other.to_string())),
            }
        };
        Ok((
            pick(s.lambda, s.truncation)?,
            pick(s.mu, s.truncation)?,
            pick(s.sum(), s.output_truncation)?,
        ))
    }

    /// `U (X⊗I + I⊗X) F − (X⊗I) U F` for one input.
    fn defect(&self, ops: &(ComplexMatrix, ComplexMatrix, ComplexMatrix), f: &ProductWaveFunction) -> Result<ComplexMatrix> {
        let (xl, xm, xs) = ops;
        let left = self.apply(&f.with_coeffs(tensor_sum_apply(xl, xm, &f.coeffs)))?;
        let right = xs.matmul(&self.apply(f)?.coeffs)?;
        Ok(&left.coeffs - &right)
    }

    /// `max_F ‖U·X_tot F − (X ⊗ I)·U F‖ / ‖F‖` over `testset`.
    pub fn intertwining_residual(&self, label: &str, testset: &[ProductWaveFunction]) -> Result<f64> {
        let ops = self.operators(label)?;
        let mut worst: f64 = 0.0;
        for f in testset {
            let n = f.norm();
            if n == 0.0 {
                continue;
            }
            worst = worst.max(self.defect(&ops, f)?.frobenius_norm() / n);
        }
        Ok(worst)
    }

    /// Operator norm of the defect on the span of `ψ_p ⊗ ψ_q`, `p + q ≤ N − 2`.
    pub fn safe_block_residual(&self, label: &str) -> Result<f64> {
        let ops = self.operators(label)?;
        let defects = safe_test_set(self.spec.lambda, self.spec.mu, self.spec.truncation)?
            .iter()
            .map(|f| self.defect(&ops, f).map(|d| ComplexMatrix::column(&d.vectorize())))
            .collect::<Result<Vec<_>>>()?;
        spectral_norm(&ComplexMatrix::hstack(&defects)?)
    }

    /// Coefficient of `ψ₀ ⊗ ψ₀` in `U(ψ₀ ⊗ ψ₀)` and the norm of the rest.
    pub fn ground_state_image(&self) -> Result<(Complex64, f64)> {
        let s = &self.spec;
        let g = self.apply(&ProductWaveFunction::basis(s.lambda, s.mu, s.truncation, 0, 0)?)?;
        let top = g.coeffs[(0, 0)];
        let rest = (g.norm().powi(2) - top.norm_sqr()).max(0.0).sqrt();
        Ok((top, rest))
    }
}

/// Basis functions `ψ_p ⊗ ψ_q` with `p + q ≤ N − 2`.
pub fn safe_test_set(lambda: f64, mu: f64, truncation: usize) -> Result<Vec<ProductWaveFunction>> {
    block_columns(truncation, truncation.saturating_sub(2))
        .into_iter()
        .map(|c| ProductWaveFunction::basis(lambda, mu, truncation, c / truncation, c % truncation))
        .collect()
}

/// Assembles (or reuses) `U_{λ,μ}` and applies it.
pub fn apply_u(spec: IntertwinerSpec, f: &ProductWaveFunction) -> Result<ProductWaveFunction> {
    Intertwiner::cached(spec, Exec::default())?.apply(f)
}

/// Checks for one pair: unitarity, intertwining of `Q`, `P`, `Z`, and the
/// ground-state image when `λμ > 0`.
pub fn intertwiner_report(spec: IntertwinerSpec, exec: Exec) -> Result<VerificationReport> {
    let u = Intertwiner::cached(spec, exec)?;
    let tag = format!("({}, {})", spec.lambda, spec.mu);
    let mut r = VerificationReport::new(format!("intertwine{tag}"));
    r.push(
        Check::within(
            format!("U unitary on p+q ≤ N−4 {tag}"),
            "unitarity of the intertwiner",
            u.gram_deviation,
            1e-7,
        )
        .with_detail(format!("output truncation {}, nodes {}", spec.output_truncation, spec.quad_nodes)),
    );
    for label in ["Q", "P", "Z"] {
        let res = u.safe_block_residual(label)?;
        let tol = if label == "Z" { 1e-12 } else { 1e-7 };
        r.push(Check::within(
            format!("U intertwines {label} {tag}"),
            "unitary equivalence of tensor products",
            res,
            tol,
        ));
    }
    if spec.lambda * spec.mu > 0.0 {
        let (top, rest) = u.ground_state_image()?;
        let dev = (top - 1.0).norm().max(rest);
        r.push(
            Check::within(
                format!("U maps Gaussian to Gaussian {tag}"),
                "ground state of the tensor product",
                dev,
                1e-9,
            )
            .with_detail(format!("ν = {}", spec.output_aux_parameter)),
        );
    }
    Ok(r)
}

/// Applies an operator coordinatewise to `n` independent coordinate pairs.
pub fn lift_coordinatewise(op: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let mut out = op.clone();
    for _ in 1..n {
        out = out.kron(op);
    }
    out
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` in slot `k` of `n`, acting on spaces of
/// dimension `dim` in the other slots.
pub fn embed_in_coordinate(op: &ComplexMatrix, n: usize, k: usize, dim: usize) -> Result<ComplexMatrix> {
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, truncation: n });
    }
    let id = ComplexMatrix::identity(dim);
    let mut out = if k == 0 { op.clone() } else { id.clone() };
    for slot in 1..n {
        out = out.kron(if slot == k { op } else { &id });
    }
    Ok(out)
}

/// Rotation `(RF)(u, v) = F((u+v)/√2, (u−v)/√2)` on the product basis
/// `ψ^{|λ|} ⊗ ψ^{|λ|}`. Total degree is preserved, so the truncation is
/// exact on every total-degree level below `N`.
pub fn rotation_matrix(lambda: f64, truncation: usize, quad_nodes: usize, exec: Exec) -> Result<ComplexMatrix> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("λ must be nonzero, got {lambda}")));
    }
    let a = lambda.abs();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sub = Substitution {
        input: (a, a),
        output: (a, a),
        x: [h, h],
        y: [h, -h],
        prefactor: 1.0,
    };
    sub.assemble(truncation, truncation, quad_nodes, exec)
}

/// Zero-sum case `(λ, −λ)`: the central action vanishes, and after the
/// rotation `Q` acts by `√2·Q` on the first factor and `P` by `√2·P` on the
/// second. Returns `σ` and `τ` on the leading `N−1` output functions.
pub fn zero_case_operators(
    lambda: f64,
    truncation: usize,
    quad_nodes: usize,
    exec: Exec,
) -> Result<(GeneratorRep, GeneratorRep, VerificationReport)> {
    let n = truncation;
    if n < 3 {
        return Err(Error::InvalidParameter(format!("truncation must be at least 3, got {n}")));
    }
    let mut report = VerificationReport::new("zero-case");
    let (ql, pl, zl) = schrodinger_matrices(lambda, n)?;
    let (qm, pm, zm) = schrodinger_matrices(-lambda, n)?;
    let id = ComplexMatrix::identity(n);
    let central = &zl.kron(&id) + &id.kron(&zm);
    report.push(Check::exact("central action is zero", "trivial central character", central.is_zero()));

    let r = rotation_matrix(lambda, n, quad_nodes, exec)?;
    let safe = block_columns(n, n - 2);
    let unit = gram_deviation(&r, &block_columns(n, n - 1))?;
    if !(unit <= UNDERRESOLVED_GRAM) {
        return Err(Error::QuadratureUnderresolved { deviation: unit });
    }
    report.push(Check::within("rotation unitary", "orthogonal change of variables", unit, 1e-7));

    let rh = r.adjoint();
    let conj = |x: &ComplexMatrix, y: &ComplexMatrix| -> Result<ComplexMatrix> {
        r.matmul(&(&x.kron(&id) + &id.kron(y)))?.matmul(&rh)
    };
    let d = n - 1;
    let mut sigma = Vec::new();
    let mut tau = Vec::new();
    let mut factor: f64 = 0.0;
    for (x, y) in [(&ql, &qm), (&pl, &pm), (&zl, &zm)] {
        let c = conj(x, y)?;
        let at = |a: usize, b: usize, a2: usize, b2: usize| c[(a * n + b, a2 * n + b2)];
        let half = at(0, 0, 0, 0) * 0.5;
        let s = ComplexMatrix::from_fn(d, d, |a, a2| at(a, 0, a2, 0) - if a == a2 { half } else { ZERO });
        let t = ComplexMatrix::from_fn(d, d, |b, b2| at(0, b, 0, b2) - if b == b2 { half } else { ZERO });
        for &col in &safe {
            let (a2, b2) = (col / n, col % n);
            for a in 0..d {
                for b in 0..d {
                    let mut want = ZERO;
                    if b == b2 {
                        want += s[(a, a2)];
                    }
                    if a == a2 {
                        want += t[(b, b2)];
                    }
                    factor = factor.max((at(a, b, a2, b2) - want).norm());
                }
            }
        }
        sigma.push(s);
        tau.push(t);
    }
    report.push(Check::within(
        "rotated action splits as σ⊗I + I⊗τ",
        "conjugated generators",
        factor,
        1e-7,
    ));

    let s2 = std::f64::consts::SQRT_2;
    let (q1, p1, _) = schrodinger_matrices(lambda, n)?;
    let q_ref = q1.leading_block(d, d).scale_real(s2);
    let p_ref = p1.leading_block(d, d).scale_real(s2);
    report.push(Check::within(
        "σ(Q) = √2·Q",
        "multiplication operator",
        sigma[0].max_abs_diff(&q_ref).unwrap(),
        1e-7,
    ));
    report.push(Check::within(
        "τ(P) = √2·P",
        "differentiation operator",
        tau[1].max_abs_diff(&p_ref).unwrap(),
        1e-7,
    ));
    report.push(Check::within("σ(P) = 0", "multiplication operator", sigma[1].max_abs(), 1e-7));
    report.push(Check::within("τ(Q) = 0", "differentiation operator", tau[0].max_abs(), 1e-7));
    let idd = ComplexMatrix::identity(d);
    let comm = sigma[0].kron(&idd).commutator(&idd.kron(&tau[1]))?.max_abs();
    report.push(Check::within(
        "[σ(Q)⊗I, I⊗τ(P)] = 0",
        "abelian quotient by the centre",
        comm,
        1e-10,
    ));

    let labels = || vec!["Q".to_string(), "P".to_string(), "Z".to_string()];
    let sigma = GeneratorRep::new(d, labels(), sigma)?;
    let tau = GeneratorRep::new(d, labels(), tau)?;
    Ok((sigma, tau, report))
}

/// `integer · √radicand`, kept exact until conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surd {
    pub integer: i64,
    pub radicand: u128,
}

impl Surd {
    pub fn to_f64(self) -> f64 {
        if self.radicand == 1 {
            self.integer as f64
        } else {
            self.integer as f64 * (self.radicand as f64).sqrt()
        }
    }
}

/// Exact coefficients `(p, k−p, C(k,p)(−1)^{k−p}√(p!(k−p)!))`, `p`
/// descending.
pub fn lowest_weight_exact(k: usize) -> Result<Vec<(usize, usize, Surd)>> {
    let overflow = || Error::InvalidParameter(format!("lowest weight {k} exceeds exact integer range"));
    let factorial = |n: usize| -> Option<u128> { (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i)) };
    let mut out = Vec::with_capacity(k + 1);
    let mut binom: i64 = 1;
    for p in (0..=k).rev() {
        // binom = C(k, p), updated from C(k, p+1)
        if p < k {
            binom = binom.checked_mul((p + 1) as i64).ok_or_else(overflow)? / (k - p) as i64;
        }
        let q = k - p;
        let radicand = factorial(p)
            .zip(factorial(q))
            .and_then(|(a, b)| a.checked_mul(b))
            .ok_or_else(overflow)?;
        let sign = if q.is_multiple_of(2) { 1 } else { -1 };
        out.push((p, q, Surd { integer: sign * binom, radicand }));
    }
    Ok(out)
}

/// The state killed by `â⊗1 + 1⊗â` at total degree `k`, unnormalized.
pub fn lowest_weight(k: usize, lambda: f64, mu: f64, truncation: usize) -> Result<ProductWaveFunction> {
    if k >= truncation {
        return Err(Error::IndexOutOfRange { index: k, truncation });
    }
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::InvalidParameter(format!("λ and μ must be positive, got ({lambda}, {mu})")));
    }
    let mut f = ProductWaveFunction::zeros(lambda, mu, truncation)?;
    for (p, q, c) in lowest_weight_exact(k)? {
        f.coeffs[(p, q)] = c.to_f64().into();
    }
    Ok(f)
}

fn ladder(truncation: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_fn(truncation, truncation, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

/// `‖(â⊗I + I⊗â) F‖ / ‖F‖`.
pub fn annihilator_check(f: &ProductWaveFunction) -> f64 {
    let a = ladder(f.truncation);
    tensor_sum_apply(&a, &a, &f.coeffs).frobenius_norm() / f.norm()
}

/// `steps` applications of `â†⊗I + I⊗â†`.
pub fn ladder_up(f: &ProductWaveFunction, steps: usize) -> Result<ProductWaveFunction> {
    let n = f.truncation;
    if let Some(top) = f.top_index() {
        if top + steps >= n {
            return Err(Error::TruncationOverflow {
                occupied: top,
                steps,
                truncation: n,
            });
        }
    }
    let ad = ladder(n).transpose();
    let mut c = f.coeffs.clone();
    for _ in 0..steps {
        c = tensor_sum_apply(&ad, &ad, &c);
    }
    Ok(f.with_coeffs(c))
}

/// `(Z⊗I + I⊗Z) F` on the coefficient level.
pub fn central_action(f: &ProductWaveFunction) -> Result<ProductWaveFunction> {
    let (_, _, zl) = schrodinger_matrices(f.lambda, f.truncation)?;
    let (_, _, zm) = schrodinger_matrices(f.mu, f.truncation)?;
    Ok(f.with_coeffs(tensor_sum_apply(&zl, &zm, &f.coeffs)))
}

/// Rayleigh quotient `c` of `H̃⊗I + I⊗H̃` at `F` and the relative residual
/// `‖H F − c F‖ / ‖F‖`.
pub fn product_hamiltonian_residual(f: &ProductWaveFunction) -> Result<(f64, f64)> {
    let hl = hamiltonian(&HermiteBasisSpec::with_truncation(f.lambda.abs(), f.truncation)?)?;
    let hm = hamiltonian(&HermiteBasisSpec::with_truncation(f.mu.abs(), f.truncation)?)?;
    let hf = f.with_coeffs(tensor_sum_apply(&hl, &hm, &f.coeffs));
    let nn = f.norm().powi(2);
    let c = f.inner(&hf)?.re / nn;
    let resid = (&hf.coeffs - &f.coeffs.scale_real(c)).frobenius_norm() / nn.sqrt();
    Ok((c, resid))
}

/// Tensor grid of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl SampleGrid {
    /// `count` equispaced points on `[−2.5√λ, 2.5√λ] × [−2.5√μ, 2.5√μ]`.
    pub fn uniform(lambda: f64, mu: f64, count: usize) -> Self {
        let axis = |s: f64| -> Vec<f64> {
            let r = 2.5 * s.sqrt();
            if count < 2 {
                return vec![0.0; count];
            }
            (0..count)
                .map(|i| -r + 2.0 * r * i as f64 / (count - 1) as f64)
                .collect()
        };
        SampleGrid {
            u: axis(lambda),
            v: axis(mu),
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, axis) in [("u", &self.u), ("v", &self.v)] {
            if axis.iter().any(|x| !x.is_finite()) {
                return Err(Error::DegenerateGrid(format!("{name} axis has non-finite points")));
            }
            let lo = axis.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if axis.len() < 2 || !(hi > lo) {
                return Err(Error::DegenerateGrid(format!("{name} axis needs two distinct points")));
            }
        }
        Ok(())
    }
}

/// Physicists' Hermite polynomial `H_k(z)`.
pub fn hermite_h(k: usize, z: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..k {
        let next = 2.0 * z * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `exp(−u²/2λ − v²/2μ)·H_k((√λ v − √μ u)/√(2λμ))`.
pub fn closed_form(k: usize, lambda: f64, mu: f64, u: f64, v: f64) -> f64 {
    let z = (lambda.sqrt() * v - mu.sqrt() * u) / (2.0 * lambda * mu).sqrt();
    (-u * u / (2.0 * lambda) - v * v / (2.0 * mu)).exp() * hermite_h(k, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormFit {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    pub fitted_scale: f64,
    pub deviation: f64,
}

/// Compares the synthesized lowest weight `k` with [`closed_form`] after
/// fitting one scalar at the grid point where the closed form is largest.
/// The deviation is `max|s − c·f| / max|s|` over the grid.
pub fn closed_form_check(k: usize, lambda: f64, mu: f64, truncation: usize, grid: &SampleGrid) -> Result<ClosedFormFit> {
    grid.validate()?;
    let f = lowest_weight(k, lambda, mu, truncation)?;
    let mut samples = Vec::with_capacity(grid.u.len() * grid.v.len());
    for &u in &grid.u {
        for &v in &grid.v {
            samples.push((f.eval(u, v).re, closed_form(k, lambda, mu, u, v)));
        }
    }
    let &(s0, c0) = samples
        .iter()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("grid is nonempty");
    if c0 == 0.0 {
        return Err(Error::DegenerateGrid("closed form vanishes on every sample".into()));
    }
    let scale = s0 / c0;
    let smax = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    let dev = samples.iter().map(|(s, c)| (s - scale * c).abs()).fold(0.0, f64::max) / smax;
    Ok(ClosedFormFit {
        k,
        lambda,
        mu,
        fitted_scale: scale,
        deviation: dev,
    })
}

/// Rows `(k, p, q, coefficient)` for `k ≤ k_max`, `p` descending in each `k`.
pub fn table1_rows(k_max: usize) -> Result<Vec<(usize, usize, usize, f64)>> {
    let mut rows = Vec::new();
    for k in 0..=k_max {
        for (p, q, c) in lowest_weight_exact(k)? {
            rows.push((k, p, q, c.to_f64()));
        }
    }
    Ok(rows)
}

pub fn table1_csv(k_max: usize) -> Result<String> {
    let mut out = String::from("k,p,q,coefficient\n");
    for (k, p, q, c) in table1_rows(k_max)? {
        out.push_str(&format!("{k},{p},{q},{c}\n"));
    }
    Ok(out)
}

pub fn table2_csv(fits: &[ClosedFormFit]) -> String {
    let mut out = String::from("k,lambda,mu,fitted_scale,deviation\n");
    for f in fits {
        out.push_str(&format!("{},{},{},{:e},{:e}\n", f.k, f.lambda, f.mu, f.fitted_scale, f.deviation));
    }
    out
}

/// Lowest-weight checks over several `(λ, μ)` pairs.
pub fn lowest_weight_report(
    k_max: usize,
    pairs: &[(f64, f64)],
    truncation: usize,
    grid_points: usize,
) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("lowest-weights");
    let expected: [&[f64]; 3] = [&[1.0], &[1.0, -1.0], &[2f64.sqrt(), -2.0, 2f64.sqrt()]];
    let mut table: f64 = 0.0;
    for (k, want) in expected.iter().enumerate() {
        let got: Vec<f64> = lowest_weight_exact(k)?.iter().map(|c| c.2.to_f64()).collect();
        table = table.max(got.iter().zip(*want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        if got.len() != want.len() {
            table = f64::INFINITY;
        }
    }
    r.push(Check::within("coefficients for k ≤ 2", "lowest weight polynomials", table, 1e-12));

    let top = k_max.min(truncation.saturating_sub(2));
    for &(l, m) in pairs {
        let tag = format!("({l}, {m})");
        let mut ann: f64 = 0.0;
        let mut z: f64 = 0.0;
        let mut ladder_orth: f64 = 0.0;
        let mut h_min = f64::INFINITY;
        let mut h_max: f64 = 0.0;
        for k in 0..=top {
            let f = lowest_weight(k, l, m, truncation)?;
            ann = ann.max(annihilator_check(&f));
            let zf = central_action(&f)?;
            z = z.max((&zf.coeffs - &f.coeffs.scale(I * (l + m))).max_abs() / f.coeffs.max_abs());
            if k < top {
                let up = ladder_up(&f, 1)?;
                let next = lowest_weight(k + 1, l, m, truncation)?;
                ladder_orth = ladder_orth.max(up.inner(&next)?.norm() / (up.norm() * next.norm()));
            }
            if k >= 1 {
                let (_, res) = product_hamiltonian_residual(&f)?;
                h_min = h_min.min(res);
                h_max = h_max.max(res);
            }
        }
        r.push(Check::within(format!("Â kills LW(k) {tag}"), "annihilated by the total lowering operator", ann, 1e-12));
        r.push(Check::within(format!("Z acts by i(λ+μ) {tag}"), "central eigenvalue of lowest weights", z, 1e-14));
        r.push(Check::within(
            format!("raised LW(k) ⊥ LW(k+1) {tag}"),
            "repeated application of the raising operator",
            ladder_orth,
            1e-10,
        ));
        if top >= 1 {
            if l != m {
                r.push(Check::above(
                    format!("LW(k≥1) not an eigenvector of H̃₁+H̃₂ {tag}"),
                    "not a ground state for the sum of oscillators",
                    h_min,
                    0.1,
                ));
            } else {
                r.push(Check::within(
                    format!("LW(k) eigenvector of H̃₁+H̃₂ {tag}"),
                    "circular oscillator",
                    h_max,
                    1e-10,
                ));
            }
        }
        for k in 0..=2.min(top) {
            let fit = closed_form_check(k, l, m, truncation, &SampleGrid::uniform(l, m, grid_points))?;
            r.push(
                Check::within(
                    format!("closed form k={k} {tag}"),
                    "lowest weight states as explicit functions",
                    fit.deviation,
                    1e-8,
                )
                .with_detail(format!("fitted scale {:e}", fit.fitted_scale)),
            );
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: f64, m: f64) -> IntertwinerSpec {
        IntertwinerSpec::new(l, m, 12, 64).unwrap()
    }

    #[test]
    fn zero_sum_is_wrong_path() {
        assert!(matches!(IntertwinerSpec::new(2.0, -2.0, 12, 64), Err(Error::WrongPath(_))));
    }

    #[test]
    fn gaussian_exponent_completion() {
        // x²/2λ + y²/2μ = u²/2(λ+μ) + v²/2ν with ν = λμ(λ+μ), coefficientwise.
        for (l, m) in [(1.0, 2.0), (2.0, 1.0), (0.5, 3.7), (-1.0, -2.5)] {
            let s: f64 = l + m;
            let nu = l * m * s;
            let uu = (l / s).powi(2) / (2.0 * l) + (m / s).powi(2) / (2.0 * m);
            let uv = (l / s) * (1.0 / s) / l - (m / s) * (1.0 / s) / m;
            let vv = (1.0 / s).powi(2) / (2.0 * l) + (1.0 / s).powi(2) / (2.0 * m);
            assert!((uu - 1.0 / (2.0 * s)).abs() < 1e-15);
            assert!(uv.abs() < 1e-15);
            assert!((vv - 1.0 / (2.0 * nu)).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_maps_to_gaussian() {
        for (l, m) in [(1.0, 2.0), (2.0, 1.0), (0.5, 3.7)] {
            let u = Intertwiner::assemble(spec(l, m), Exec::default()).unwrap();
            let (top, rest) = u.ground_state_image().unwrap();
            assert!((top - 1.0).norm() < 1e-9, "{top}");
            assert!(rest < 1e-9);
        }
    }

    #[test]
    fn residual_examples() {
        let u = Intertwiner::cached(spec(1.0, 2.0), Exec::default()).unwrap();
        let set = safe_test_set(1.0, 2.0, 12).unwrap();
        assert!(u.intertwining_residual("Z", &set).unwrap() < 1e-12);
        assert!(u.intertwining_residual("Q", &set).unwrap() < 1e-8);
        let u = Intertwiner::cached(spec(0.5, 3.7), Exec::default()).unwrap();
        let set = safe_test_set(0.5, 3.7, 12).unwrap();
        assert!(u.intertwining_residual("P", &set).unwrap() < 1e-8);
    }

    #[test]
    fn all_pairs_pass() {
        for (l, m) in [(1.0, 2.0), (2.0, 1.0), (0.5, 3.7), (-1.0, 3.0), (5.0, -2.0)] {
            let r = intertwiner_report(spec(l, m), Exec::default()).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn unitarity_on_random_safe_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = Intertwiner::cached(spec(1.0, 2.0), Exec::default()).unwrap();
        let mut f = ProductWaveFunction::zeros(1.0, 2.0, 12).unwrap();
        for p in 0..12 {
            for q in 0..12 - p {
                f.coeffs[(p, q)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let g = u.apply(&f).unwrap();
        assert!((g.norm() - f.norm()).abs() < 1e-8 * f.norm());
    }

    #[test]
    fn output_matches_pointwise_substitution() {
        let (l, m) = (1.0, 2.0);
        let u = Intertwiner::cached(spec(l, m), Exec::default()).unwrap();
        let f = ProductWaveFunction::basis(l, m, 12, 2, 1).unwrap();
        let g = u.apply(&f).unwrap();
        let s = l + m;
        for (uu, vv) in [(0.3, -0.7), (1.2, 2.0), (-0.5, 0.1)] {
            let want = f.eval((l * uu + vv) / s, (m * uu - vv) / s) / s.sqrt();
            assert!((g.eval(uu, vv) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let s = IntertwinerSpec::new(1.0, 2.0, 6, 24).unwrap();
        let a = Intertwiner::assemble(s, Exec::Sequential).unwrap();
        let b = Intertwiner::assemble(s, Exec::Parallel).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn underresolved_quadrature_is_flagged() {
        let s = IntertwinerSpec::with_output(-1.0, 3.0, 12, 12, 12).unwrap();
        assert!(matches!(
            Intertwiner::assemble(s, Exec::default()),
            Err(Error::QuadratureUnderresolved { .. })
        ));
    }

    #[test]
    fn two_coordinates_by_kronecker_lifting() {
        let (l, m) = (1.0, 2.0);
        let n = 5;
        let u1 = Intertwiner::assemble(IntertwinerSpec::new(l, m, n, 20).unwrap(), Exec::default()).unwrap();
        let u2 = lift_coordinatewise(&u1.matrix, 2);
        let (ql, _, _) = schrodinger_matrices(l, n).unwrap();
        let (qm, _, _) = schrodinger_matrices(m, n).unwrap();
        let (qs, _, _) = schrodinger_matrices(l + m, n).unwrap();
        let id = ComplexMatrix::identity(n);
        let pair = &ql.kron(&id) + &id.kron(&qm);
        let x_in = embed_in_coordinate(&pair, 2, 1, n * n).unwrap();
        let x_out = embed_in_coordinate(&qs.kron(&id), 2, 1, n * n).unwrap();
        let safe = block_columns(n, n - 2);
        let cols: Vec<usize> = safe.iter().flat_map(|&a| safe.iter().map(move |&b| a * n * n + b)).collect();
        let rows: Vec<usize> = (0..n.pow(4)).collect();
        let lhs = u2.matmul(&x_in).unwrap().select(&rows, &cols);
        let rhs = x_out.matmul(&u2).unwrap().select(&rows, &cols);
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
    }

    #[test]
    fn zero_case() {
        for lambda in [1.0, -2.5] {
            let (sigma, tau, r) = zero_case_operators(lambda, 12, 48, Exec::default()).unwrap();
            assert!(r.passed(), "{}", r.to_text());
            assert_eq!(sigma.dimension, 11);
            assert!(tau.get("Z").unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn table1_entries() {
        let r2 = 2f64.sqrt();
        let want: [&[f64]; 3] = [&[1.0], &[1.0, -1.0], &[r2, -2.0, r2]];
        for (k, w) in want.iter().enumerate() {
            let f = lowest_weight(k, 1.0, 2.0, 12).unwrap();
            let got: Vec<f64> = (0..=k).rev().map(|p| f.coeffs[(p, k - p)].re).collect();
            assert_eq!(got.len(), w.len());
            for (a, b) in got.iter().zip(*w) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(
            lowest_weight_exact(2).unwrap(),
            vec![
                (2, 0, Surd { integer: 1, radicand: 2 }),
                (1, 1, Surd { integer: -2, radicand: 1 }),
                (0, 2, Surd { integer: 1, radicand: 2 }),
            ]
        );
        let csv = table1_csv(5).unwrap();
        assert!(csv.contains("\n2,1,1,-2\n"));
        assert_eq!(csv.lines().count(), 1 + (1..=6).sum::<usize>());
        assert!(lowest_weight(12, 1.0, 2.0, 12).is_err());
    }

    #[test]
    fn annihilator_examples() {
        for (l, m) in [(0.5, 1.0), (1.0, 2.0), (3.7, 0.2)] {
            for k in 0..=10 {
                assert!(annihilator_check(&lowest_weight(k, l, m, 12).unwrap()) < 1e-12);
            }
        }
        let mut f = ProductWaveFunction::basis(1.0, 2.0, 4, 1, 0).unwrap();
        f.coeffs[(0, 1)] = 1.0.into();
        assert!((annihilator_check(&f) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(annihilator_check(&ProductWaveFunction::basis(1.0, 2.0, 4, 0, 0).unwrap()), 0.0);
    }

    #[test]
    fn ladder_examples() {
        let g = lowest_weight(0, 1.0, 2.0, 6).unwrap();
        let up = ladder_up(&g, 1).unwrap();
        assert_eq!(up.coeffs[(1, 0)], up.coeffs[(0, 1)]);
        assert!(up.coeffs[(1, 0)].re > 0.0);
        assert!((up.norm().powi(2) - 2.0).abs() < 1e-15);
        let lw1 = lowest_weight(1, 1.0, 2.0, 6).unwrap();
        assert!(up.inner(&lw1).unwrap().norm() < 1e-12);
        let z = central_action(&ladder_up(&g, 3).unwrap()).unwrap();
        let up3 = ladder_up(&g, 3).unwrap();
        assert!((&z.coeffs - &up3.coeffs.scale(I * 3.0)).max_abs() < 1e-14);
        assert!(matches!(ladder_up(&lowest_weight(3, 1.0, 2.0, 6).unwrap(), 3), Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn closed_forms() {
        for (l, m) in [(0.5, 1.0), (1.0, 2.0), (3.7, 0.2)] {
            let grid = SampleGrid::uniform(l, m, 15);
            for (k, tol) in [(0, 1e-10), (1, 1e-9), (2, 1e-8)] {
                let fit = closed_form_check(k, l, m, 12, &grid).unwrap();
                assert!(fit.deviation < tol, "k={k} ({l},{m}) {}", fit.deviation);
            }
        }
        let flat = SampleGrid { u: vec![0.0, 0.0], v: vec![0.0, 1.0] };
        assert!(matches!(closed_form_check(1, 1.0, 2.0, 12, &flat), Err(Error::DegenerateGrid(_))));
    }

    #[test]
    fn table2_second_row_expression() {
        // H_2 argument expands to λv² − 2√(λμ)uv + μu² − λμ up to a constant.
        let (l, m): (f64, f64) = (1.3, 0.4);
        for (u, v) in [(0.2, -1.0), (1.5, 0.7)] {
            let lhs = closed_form(2, l, m, u, v) / (-u * u / (2.0 * l) - v * v / (2.0 * m)).exp();
            let expr = l * v * v - 2.0 * (l * m).sqrt() * u * v + m * u * u - l * m;
            assert!((lhs - 2.0 / (l * m) * expr).abs() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_observation() {
        for k in 1..=6 {
            let (_, r) = product_hamiltonian_residual(&lowest_weight(k, 1.0, 2.0, 12).unwrap()).unwrap();
            assert!(r > 0.1);
            let (c, r) = product_hamiltonian_residual(&lowest_weight(k, 1.5, 1.5, 12).unwrap()).unwrap();
            assert!(r < 1e-10);
            assert!((c + 1.5 * (k as f64 + 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn lowest_weight_report_passes() {
        let r = lowest_weight_report(10, &[(0.5, 1.0), (1.0, 2.0), (3.7, 0.2), (1.0, 1.0)], 12, 15).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn json_shape() {
        let f = lowest_weight(1, 1.0, 2.0, 3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&f).unwrap();
        assert_eq!(v["N"], 3);
        let back: ProductWaveFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
