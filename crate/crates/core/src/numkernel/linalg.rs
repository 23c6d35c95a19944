//! Dense decompositions on [`ComplexMatrix`], backed by nalgebra's complex
//! SVD and Schur routines.

use nalgebra::linalg::{Schur, SVD};
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_ITER: usize = 100_000;

/// Singular values (descending) and right singular vectors of `a`.
///
/// Wide inputs are padded with zero rows so that a full set of right
/// singular vectors is always returned.
pub fn singular_values_and_vectors(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (r, c) = a.shape();
    if c == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let padded = if r < c {
        let mut m = DMatrix::<Complex64>::zeros(c, c);
        m.view_mut((0, 0), (r, c)).copy_from(&a.to_nalgebra());
        m
    } else {
        a.to_nalgebra()
    };
    let svd = SVD::try_new(padded, false, true, f64::EPSILON, MAX_ITER).ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    // `try_new` sorts descending; keep that contract explicit.
    debug_assert!(sv.windows(2).all(|w| w[0] >= w[1]));
    sv.truncate(c);
    // Right singular vectors as columns.
    let v = ComplexMatrix::from_fn(c, c, |i, j| v_t[(j, i)].conj());
    Ok((sv, v))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values_and_vectors(a)?.0.first().copied().unwrap_or(0.0))
}

/// Result of a thresholded nullspace computation.
#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Orthonormal kernel basis as columns (`cols x k`).
    pub basis: ComplexMatrix,
    pub singular_values: Vec<f64>,
    /// Numerical rank used for the cut.
    pub rank: usize,
    /// True when some relative singular value falls within a factor of ten
    /// of the threshold, i.e. the rank decision sits on a numerical cliff.
    pub ambiguous: bool,
}

/// Orthonormal basis of `{v : |a v| <= tol |a| |v|}`.
pub fn nullspace(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    Ok(nullspace_detailed(a, tol)?.basis)
}

/// Rank cut by relative singular value threshold. When singular values
/// cluster near `tol` (within a factor of ten), the cut is placed at the
/// largest multiplicative gap inside that band.
pub fn nullspace_detailed(a: &ComplexMatrix, tol: f64) -> Result<Nullspace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("nullspace tolerance {tol} must be positive")));
    }
    let c = a.cols();
    let (sv, v) = singular_values_and_vectors(a)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let (rank, ambiguous) = if smax == 0.0 {
        (0, false)
    } else {
        rank_cut(&sv.iter().map(|s| s / smax).collect::<Vec<_>>(), tol)
    };
    let kernel: Vec<usize> = (rank..c).collect();
    let all: Vec<usize> = (0..c).collect();
    Ok(Nullspace {
        basis: v.select(&all, &kernel),
        singular_values: sv,
        rank,
        ambiguous,
    })
}

/// Rank from relative singular values sorted descending.
fn rank_cut(rel: &[f64], tol: f64) -> (usize, bool) {
    let plain = rel.iter().filter(|&&s| s > tol).count();
    let band: Vec<usize> = (0..rel.len())
        .filter(|&i| rel[i] > tol / 10.0 && rel[i] < tol * 10.0)
        .collect();
    if band.is_empty() {
        return (plain, false);
    }
    // Candidate cut positions: after index i means rank i+1. Consider cuts
    // bordering the band and pick the largest gap ratio.
    let lo = band[0].saturating_sub(1);
    let hi = (*band.last().unwrap() + 1).min(rel.len());
    let mut best = (plain, 0.0f64);
    for cut in lo..=hi {
        let above = if cut == 0 { f64::INFINITY } else { rel[cut - 1] };
        let below = if cut >= rel.len() { 0.0 } else { rel[cut] };
        let ratio = if below == 0.0 { f64::INFINITY } else { above / below };
        if ratio > best.1 {
            best = (cut, ratio);
        }
    }
    (best.0, true)
}

/// Eigenvalues via the complex Schur form, sorted by (re, im).
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eigenvalues",
            left: a.shape(),
            right: a.shape(),
        });
    }
    let d = a.rows();
    if d == 0 {
        return Ok(Vec::new());
    }
    // The deflation test is relative to the diagonal, so a nearly nilpotent
    // input never deflates; shifting by the norm keeps the diagonal away
    // from zero. Exactly defective inputs can still stall the shifted QR
    // sweep, in which case a small deterministic perturbation is applied,
    // growing from roundoff level until the sweep converges.
    let scale = a.frobenius_norm();
    let shift = scale + 1.0;
    let mut eig = None;
    for attempt in 0..6i32 {
        let mut m = a.to_nalgebra();
        for i in 0..d {
            m[(i, i)] += shift;
        }
        if attempt > 0 {
            let size = 4.0 * f64::EPSILON * shift * 100f64.powi(attempt - 1);
            for (k, z) in m.iter_mut().enumerate() {
                // Deterministic pseudo-random signs and magnitudes.
                let h = (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11;
                let u = h as f64 / (1u64 << 53) as f64 - 0.5;
                *z += Complex64::new(size * u, size * (0.5 - u).abs());
            }
        }
        if let Some(schur) = Schur::try_new(m, f64::EPSILON, MAX_ITER) {
            let (_, t) = schur.unpack();
            eig = Some((0..d).map(|i| t[(i, i)] - shift).collect::<Vec<Complex64>>());
            break;
        }
    }
    let mut eig = eig.ok_or(Error::NoConvergence)?;
    eig.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(eig)
}

/// Group of eigenvalues regarded as one spectral point.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub center: Complex64,
    pub members: Vec<Complex64>,
}

/// Single-linkage clustering of eigenvalues.
///
/// Two eigenvalues join when closer than `radius`. A group of `m`
/// eigenvalues may also spread as far as a size-`m` Jordan block does under
/// a backward error of `scale * eps`, about `scale * (m * eps)^(1/m)`, with
/// `m` capped at `max_block`. Components are found at the reach for their
/// size and re-split at the reach for each smaller component until stable.
pub fn cluster_eigenvalues(
    eig: &[Complex64],
    radius: f64,
    scale: f64,
    max_block: usize,
) -> Vec<EigenCluster> {
    let reach = |m: usize| {
        let m = m.min(max_block);
        let defect = if m > 1 {
            4.0 * scale * (m as f64 * f64::EPSILON).powf(1.0 / m as f64)
        } else {
            0.0
        };
        radius.max(defect)
    };
    let mut done = Vec::new();
    let mut pending = vec![eig.to_vec()];
    while let Some(group) = pending.pop() {
        let parts = link_components(&group, reach(group.len()));
        if parts.len() == 1 {
            done.push(group);
        } else {
            pending.extend(parts);
        }
    }
    done.sort_by(|a, b| a[0].re.total_cmp(&b[0].re).then(a[0].im.total_cmp(&b[0].im)));
    done.into_iter()
        .filter(|m| !m.is_empty())
        .map(|members| {
            let center = members.iter().sum::<Complex64>() / members.len() as f64;
            EigenCluster { center, members }
        })
        .collect()
}

fn link_components(points: &[Complex64], reach: f64) -> Vec<Vec<Complex64>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() < reach {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for i in 0..n {
        let r = find(&mut label, i);
        groups.entry(r).or_default().push(points[i]);
    }
    groups.into_values().collect()
}

/// Orthonormalize columns (modified Gram-Schmidt, two passes) and drop
/// columns whose residual norm falls below `tol`.
pub fn orthonormal_columns(a: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..a.cols() {
        let mut v = a.col(j);
        let norm0 = norm(&v);
        for _ in 0..2 {
            for q in &basis {
                let p = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv > tol * norm0.max(1e-300) && nv > 0.0 {
            basis.push(v.iter().map(|z| z / nv).collect());
        }
    }
    let rows = a.rows();
    ComplexMatrix::from_fn(rows, basis.len(), |i, j| basis[j][i])
}

/// `<a, b> = sum conj(a_i) b_i`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares coefficients of `target` in the span of the orthonormal
/// columns of `basis`, together with the residual norm.
pub fn project_onto_orthonormal(basis: &ComplexMatrix, target: &[Complex64]) -> (Vec<Complex64>, f64) {
    let coeffs: Vec<Complex64> = (0..basis.cols()).map(|j| inner(&basis.col(j), target)).collect();
    let mut resid = target.to_vec();
    for (j, c) in coeffs.iter().enumerate() {
        for (i, r) in resid.iter_mut().enumerate() {
            *r -= c * basis[(i, j)];
        }
    }
    (coeffs, norm(&resid))
}

/// Solve `a x = b` for square `a` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            op: "solve",
            left: a.shape(),
            right: (b.len(), 1),
        });
    }
    let lu = a.to_nalgebra().lu();
    let rhs = nalgebra::DVector::from_column_slice(b);
    lu.solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::InvalidParameter("singular system".into()))
}

/// Inverse of a square matrix.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "inverse",
            left: a.shape(),
            right: a.shape(),
        });
    }
    a.to_nalgebra()
        .try_inverse()
        .map(|m| ComplexMatrix::from_nalgebra(&m))
        .ok_or_else(|| Error::InvalidParameter("singular matrix".into()))
}

/// Max |a v| / |v| over the columns of `basis`, relative to |a|.
pub fn relative_kernel_residual(a: &ComplexMatrix, basis: &ComplexMatrix) -> Result<f64> {
    let an = spectral_norm(a)?;
    if an == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for j in 0..basis.cols() {
        let v = basis.col(j);
        let av = a.apply(&v)?;
        worst = worst.max(norm(&av) / (an * norm(&v)));
    }
    Ok(worst)
}

/// Dimension of the span of `mats`, each flattened to a vector; singular
/// values below `tol` times the largest count as zero.
pub fn span_dimension(mats: &[ComplexMatrix], tol: f64) -> Result<usize> {
    if mats.is_empty() {
        return Ok(0);
    }
    let len = mats[0].rows() * mats[0].cols();
    let cols: Vec<Vec<Complex64>> = mats.iter().map(ComplexMatrix::vectorize).collect();
    if cols.iter().any(|c| c.len() != len) {
        return Err(Error::DimensionMismatch {
            op: "span_dimension",
            left: (len, 1),
            right: (cols.iter().map(Vec::len).find(|&l| l != len).unwrap_or(0), 1),
        });
    }
    let stacked = ComplexMatrix::from_fn(len, cols.len(), |i, j| cols[j][i]);
    let (sv, _) = singular_values_and_vectors(&stacked)?;
    let top = sv.first().copied().unwrap_or(0.0);
    Ok(sv.iter().filter(|&&s| s > tol * top && s > 0.0).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::matrix::{ONE, ZERO};

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let ns = nullspace(&ComplexMatrix::zeros(3, 3), 1e-10).unwrap();
        assert_eq!(ns.cols(), 3);
    }

    #[test]
    fn identity_kernel_is_empty() {
        let ns = nullspace(&ComplexMatrix::identity(3), 1e-10).unwrap();
        assert_eq!(ns.cols(), 0);
    }

    #[test]
    fn projector_kernel_has_two_vectors() {
        let p = ComplexMatrix::diag(&[ONE, ZERO, ZERO]);
        let ns = nullspace(&p, 1e-10).unwrap();
        assert_eq!(ns.cols(), 2);
        assert!(relative_kernel_residual(&p, &ns).unwrap() < 1e-12);
    }

    #[test]
    fn wide_matrix_kernel() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0, 0.0]]);
        let ns = nullspace(&a, 1e-12).unwrap();
        assert_eq!(ns.shape(), (4, 3));
        assert!(relative_kernel_residual(&a, &ns).unwrap() < 1e-14);
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(nullspace(&ComplexMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn ambiguity_flagged_near_threshold() {
        let a = ComplexMatrix::diag(&[ONE, Complex64::new(2e-9, 0.0)]);
        let ns = nullspace_detailed(&a, 1e-9).unwrap();
        assert!(ns.ambiguous);
        let clear = nullspace_detailed(&ComplexMatrix::diag(&[ONE, ZERO]), 1e-9).unwrap();
        assert!(!clear.ambiguous);
        assert_eq!(clear.rank, 1);
    }

    #[test]
    fn diagonal_eigenvalues() {
        let d = ComplexMatrix::diag(&[
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]);
        let e = eigenvalues(&d).unwrap();
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_eigenvalues_vanish() {
        let mut n = ComplexMatrix::zeros(2, 2);
        n[(0, 1)] = ONE;
        let e = eigenvalues(&n).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn eigenvalues_reject_non_square() {
        assert!(eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn clustering_merges_jordan_spread() {
        // Perturbed 4x4 Jordan block: eigenvalues spread ~1e-4 around 1.
        let spread: Vec<Complex64> = (0..4)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 * k as f64;
                Complex64::new(1.0 + 1e-4 * t.cos(), 1e-4 * t.sin())
            })
            .collect();
        assert_eq!(cluster_eigenvalues(&spread, 1e-6, 1.0, 4).len(), 1);
        assert_eq!(cluster_eigenvalues(&spread, 1e-6, 1.0, 1).len(), 4);
        let split = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(cluster_eigenvalues(&split, 1e-6, 1.0, 2).len(), 2);
    }

    #[test]
    fn solve_and_inverse() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = solve(&a, &[ONE, ONE]).unwrap();
        assert!((x[0] - 0.4).norm() < 1e-14 && (x[1] - 0.2).norm() < 1e-14);
        let inv = inverse(&a).unwrap();
        let prod = a.matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-14);
    }
}
