//! Complex matrix kernels shared by every other module: Hermitian
//! eigendecomposition, SVD, positive-definite solves, and pseudo-inverses.
//!
//! All factorizations apply a canonical phase convention to their column
//! vectors: the entry of largest magnitude (first on ties) is rotated to be
//! real and non-negative. This makes repeated decompositions of the same
//! input bit-identical, which the bus protocol relies on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvector columns, phase-canonicalized.
    pub eigenvectors: CMat,
}

/// Full singular value decomposition `A = U Σ Vᴴ` with square unitary factors.
#[derive(Debug, Clone)]
pub struct SvdDecomposition {
    pub u: CMat,
    /// `min(m, n)` singular values, descending and non-negative.
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

pub fn check_finite(a: &CMat) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_hermitian(a: &CMat) -> Result<()> {
    let residual = frobenius(&(a - a.adjoint()));
    let bound = 1e-12 * (frobenius(a) + 1.0);
    if residual > bound {
        return Err(Error::NotHermitian { residual, bound });
    }
    Ok(())
}

/// Rotates a column so that its largest-magnitude entry (first on ties) is
/// real and non-negative. Returns the applied unit phase factor.
fn canonical_phase(col: &CVec) -> C64 {
    let mut pivot = 0usize;
    let mut best = 0.0f64;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm_sqr();
        if mag > best {
            best = mag;
            pivot = i;
        }
    }
    let z = col[pivot];
    let mag = z.norm();
    if mag == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z.conj() / mag
    }
}

fn canonicalize_columns(m: &mut CMat) {
    for j in 0..m.ncols() {
        let phase = canonical_phase(&m.column(j).into_owned());
        for i in 0..m.nrows() {
            m[(i, j)] *= phase;
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before factorization; inputs that deviate from
/// Hermitian symmetry by more than `1e-12` relative are rejected.
pub fn hermitian_eig(a: &CMat) -> Result<EigDecomposition> {
    check_finite(a)?;
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig expects a square non-empty matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_hermitian(a)?;
    let sym = (a + a.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let d = a.nrows();

    // Stable descending sort over the factorization's order.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMat::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    canonicalize_columns(&mut eigenvectors);
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Extends `r` orthonormal columns of length `dim` to a full orthonormal
/// basis by Gram-Schmidt over the standard basis vectors.
fn complete_basis(partial: &CMat) -> CMat {
    let dim = partial.nrows();
    let r = partial.ncols();
    let mut full = CMat::zeros(dim, dim);
    full.view_mut((0, 0), (dim, r)).copy_from(partial);
    let mut have = r;
    for i in 0..dim {
        if have == dim {
            break;
        }
        let mut cand = CVec::zeros(dim);
        cand[i] = C64::new(1.0, 0.0);
        // Two projection passes for orthogonality against the kept set.
        for _ in 0..2 {
            for j in 0..have {
                let col = full.column(j);
                let coeff: C64 = col.iter().zip(cand.iter()).map(|(u, c)| u.conj() * c).sum();
                for k in 0..dim {
                    cand[k] -= coeff * full[(k, j)];
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            let phase = canonical_phase(&cand);
            for k in 0..dim {
                full[(k, have)] = cand[k] * phase / norm;
            }
            have += 1;
        }
    }
    assert_eq!(have, dim, "basis completion failed");
    full
}

/// Full SVD with singular values sorted descending. The phase convention is
/// applied to the columns of `U`, with `V` rotated consistently so that
/// `A = U Σ Vᴴ` is preserved.
pub fn svd(a: &CMat) -> Result<SvdDecomposition> {
    let mut dec = svd_thin(a)?;
    dec.u = complete_basis(&dec.u);
    dec.v = complete_basis(&dec.v);
    Ok(dec)
}

/// Thin SVD: `U` is m × min(m, n), `V` is n × min(m, n). The leading columns
/// are bit-identical to those of [`svd`]; skipping the basis completion
/// matters on wide channel matrices.
pub(crate) fn svd_thin(a: &CMat) -> Result<SvdDecomposition> {
    check_finite(a)?;
    let (m, n) = (a.nrows(), a.ncols());
    let r = m.min(n);
    let fact = a.clone().svd(true, true);
    let u_thin = fact.u.expect("svd requested u");
    let v_t = fact.v_t.expect("svd requested v_t");

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| {
        fact.singular_values[j]
            .partial_cmp(&fact.singular_values[i])
            .unwrap()
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| fact.singular_values[i]).collect();

    let mut u_sorted = CMat::zeros(m, r);
    let mut v_sorted = CMat::zeros(n, r);
    let v_thin = v_t.adjoint();
    for (dst, &src) in order.iter().enumerate() {
        u_sorted.set_column(dst, &u_thin.column(src));
        v_sorted.set_column(dst, &v_thin.column(src));
    }
    for j in 0..r {
        let phase = canonical_phase(&u_sorted.column(j).into_owned());
        for i in 0..m {
            u_sorted[(i, j)] *= phase;
        }
        for i in 0..n {
            v_sorted[(i, j)] *= phase;
        }
    }
    Ok(SvdDecomposition {
        u: u_sorted,
        singular_values,
        v: v_sorted,
    })
}

/// Solves `G X = B` for Hermitian positive-definite `G` via Cholesky.
///
/// Positive definiteness is checked against a trace-relative threshold;
/// failure maps to `SingularGram` and signals a rank-deficient effective
/// channel.
pub fn hpd_solve(g: &CMat, b: &CMat) -> Result<CMat> {
    check_finite(g)?;
    check_finite(b)?;
    let d = g.nrows();
    if g.ncols() != d || b.nrows() != d {
        return Err(Error::DimensionMismatch(format!(
            "hpd_solve: G is {}x{}, B has {} rows",
            d,
            g.ncols(),
            b.nrows()
        )));
    }
    check_hermitian(g)?;
    let trace: f64 = (0..d).map(|i| g[(i, i)].re).sum();
    let threshold = 1e-12 * trace / d as f64;
    let eig = hermitian_eig(g)?;
    let min_eig = *eig.eigenvalues.last().unwrap();
    if min_eig <= threshold {
        return Err(Error::SingularGram { min_eig, threshold });
    }
    let sym = (g + g.adjoint()).scale(0.5);
    let chol = sym.cholesky().ok_or(Error::SingularGram {
        min_eig,
        threshold,
    })?;
    Ok(chol.solve(b))
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv(a: &CMat, tol: f64) -> Result<CMat> {
    check_finite(a)?;
    if tol < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "pinv tolerance must be non-negative, got {tol}"
        )));
    }
    let dec = svd_thin(a)?;
    let (m, n) = (a.nrows(), a.ncols());
    let r = m.min(n);
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = tol * sigma_max;
    let mut out = CMat::zeros(n, m);
    for j in 0..r {
        let s = dec.singular_values[j];
        if s > cutoff && s > 0.0 {
            let inv = 1.0 / s;
            // out += inv * v_j u_jᴴ
            let vj = dec.v.column(j);
            let uj = dec.u.column(j);
            for col in 0..m {
                let scale = uj[col].conj() * inv;
                for row in 0..n {
                    out[(row, col)] += vj[row] * scale;
                }
            }
        }
    }
    Ok(out)
}

/// Default relative singular-value cutoff for [`pinv`].
pub const PINV_DEFAULT_TOL: f64 = 1e-12;
