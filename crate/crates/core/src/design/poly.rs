//! Dense polynomial helpers. Coefficients are stored lowest degree first.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn eval_real(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_complex(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Degree after dropping exactly-zero leading coefficients (`None` for the
/// zero polynomial).
pub fn degree(coeffs: &[Complex64]) -> Option<usize> {
    coeffs.iter().rposition(|c| c.norm() != 0.0)
}

/// Monomial coefficients of `Σ c_j T_j(t)`.
pub fn chebyshev_to_monomial(cheb: &[f64]) -> Vec<f64> {
    let n = cheb.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = vec![0.0; n];
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];
    prev[0] = 1.0;
    out[0] += cheb[0];
    if n > 1 {
        cur[1] = 1.0;
        out[1] += cheb[1];
    }
    for &c in cheb.iter().skip(2) {
        let mut next = vec![0.0; n];
        for k in 0..n - 1 {
            next[k + 1] += 2.0 * cur[k];
        }
        for k in 0..n {
            next[k] -= prev[k];
        }
        for k in 0..n {
            out[k] += c * next[k];
        }
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Coefficients of `q(x) = p(alpha·x + beta)`.
pub fn compose_affine(coeffs: &[f64], alpha: f64, beta: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(coeffs.len());
    for &c in coeffs.iter().rev() {
        // out = out·(alpha x + beta) + c
        let mut next = vec![0.0; out.len() + 1];
        for (k, &o) in out.iter().enumerate() {
            next[k] += beta * o;
            next[k + 1] += alpha * o;
        }
        next[0] += c;
        out = next;
    }
    out.truncate(coeffs.len());
    out
}

/// Evaluates `T_0(t) .. T_{n-1}(t)`.
pub fn chebyshev_row(t: f64, n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n);
    if n > 0 {
        row.push(1.0);
    }
    if n > 1 {
        row.push(t);
    }
    for k in 2..n {
        let v = 2.0 * t * row[k - 1] - row[k - 2];
        row.push(v);
    }
    row
}

/// Roots of a polynomial via the eigenvalues of its companion matrix,
/// refined by a few Newton steps on the original coefficients.
///
/// Exactly-zero leading coefficients are dropped first; a constant
/// polynomial has no roots.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let Some(deg) = degree(coeffs) else {
        return Err(Error::SingularSystem {
            stage: "root finding",
            hint: "zero polynomial".into(),
        });
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let poly = &coeffs[..=deg];
    let dpoly = derivative(poly);
    let lowest = poly.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
    if lowest == 0 && poly[0].norm() > poly[deg].norm() {
        // bottom-heavy: roots of the reversed polynomial are the reciprocals
        let reversed: Vec<Complex64> = poly.iter().rev().copied().collect();
        let inv = companion_eigenvalues(&reversed, deg)?;
        return Ok(inv.iter().map(|&r| polish(poly, &dpoly, 1.0 / r)).collect());
    }
    let eigen = companion_eigenvalues(poly, deg)?;
    Ok(eigen.iter().map(|&r| polish(poly, &dpoly, r)).collect())
}

fn companion_eigenvalues(coeffs: &[Complex64], deg: usize) -> Result<Vec<Complex64>> {
    let lead = coeffs[deg];
    let mut companion = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = Schur::try_new(companion, 1e-15, 100_000).ok_or(Error::SingularSystem {
        stage: "root finding",
        hint: "companion eigenvalues did not converge".into(),
    })?;
    let eigen = schur.eigenvalues().ok_or(Error::SingularSystem {
        stage: "root finding",
        hint: "companion eigenvalues unavailable".into(),
    })?;
    Ok(eigen.iter().copied().collect())
}

fn polish(poly: &[Complex64], dpoly: &[Complex64], mut x: Complex64) -> Complex64 {
    let mut fx = eval_complex(poly, x).norm();
    for _ in 0..8 {
        let d = eval_complex(dpoly, x);
        if d.norm() == 0.0 {
            break;
        }
        let cand = x - eval_complex(poly, x) / d;
        let fc = eval_complex(poly, cand).norm();
        if !(fc < fx) {
            break;
        }
        x = cand;
        fx = fc;
    }
    x
}

/// Snaps nearly-real roots onto the real axis and makes complex roots
/// exact conjugate pairs. Intended for polynomials with real coefficients.
pub fn conjugate_close(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = roots[i];
        let tol = 1e-9 * r.norm().max(1.0);
        if r.im.abs() <= tol {
            roots[i] = Complex64::new(r.re, 0.0);
            continue;
        }
        let partner = (0..n).filter(|&j| !used[j]).min_by(|&a, &b| {
            (roots[a] - r.conj())
                .norm()
                .total_cmp(&(roots[b] - r.conj()).norm())
        });
        if let Some(j) = partner {
            used[j] = true;
            let upper = Complex64::new(
                0.5 * (r.re + roots[j].re),
                0.5 * (r.im.abs() + roots[j].im.abs()),
            );
            roots[i] = if r.im > 0.0 { upper } else { upper.conj() };
            roots[j] = roots[i].conj();
        }
    }
}

/// Expands `Π (1 − x / r_k)`, the monic-at-zero polynomial with the given
/// roots. Real when the roots are closed under conjugation.
pub fn from_roots_unit_constant(roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        out = mul(&out, &[Complex64::new(1.0, 0.0), -1.0 / r]);
    }
    out
}

/// Weighted least-squares solve `min ‖diag(w)(A x − b)‖` via SVD. Returns
/// the minimum-norm solution when `A` is rank deficient.
pub fn weighted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, sqrt_w: &[f64]) -> Result<DVector<f64>> {
    let mut aw = a.clone();
    let mut bw = b.clone();
    for (i, &w) in sqrt_w.iter().enumerate() {
        aw.row_mut(i).scale_mut(w);
        bw[i] *= w;
    }
    lstsq(&aw, &bw)
}

pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem {
            stage: "least squares",
            hint: "non-finite entries".into(),
        });
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-14 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps).map_err(|e| Error::SingularSystem {
        stage: "least squares",
        hint: e.to_string(),
    })
}

pub fn lstsq_complex(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    if a.iter()
        .chain(b.iter())
        .any(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::SingularSystem {
            stage: "least squares",
            hint: "non-finite entries".into(),
        });
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-14 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps).map_err(|e| Error::SingularSystem {
        stage: "least squares",
        hint: e.to_string(),
    })
}

/// Numerical rank of `a` at relative tolerance `rtol`.
pub fn rank(a: &DMatrix<f64>, rtol: f64) -> usize {
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.max();
    sv.iter().filter(|&&s| s > rtol * smax).count()
}
