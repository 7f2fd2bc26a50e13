//! Shared dense complex linear algebra helpers.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Real matrix promoted to complex entries.
pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| cr(x))
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().cloned().unwrap_or(0.0)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().cloned().unwrap_or(0.0)
}

/// Numerical rank with relative singular-value cutoff.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&s0) if s0 == 0.0 => 0,
        Some(&s0) => sv.iter().take_while(|&&s| s > rel_tol * s0).count(),
    }
}

/// Orthonormal basis of the kernel, as matrix columns. Singular vectors with
/// σ ≤ rel_tol·σ_max count as kernel directions.
pub fn kernel_basis(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut cols: Vec<CVec> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= rel_tol * smax || smax == 0.0 {
            cols.push(v_t.row(i).adjoint());
        }
    }
    // v_t has min(nrows, ncols) rows; directions beyond the rank of the
    // rectangular factorization are also kernel vectors.
    if v_t.nrows() < n {
        // Complete the basis by projecting away the row space of v_t.
        let mut basis: Vec<CVec> = (0..v_t.nrows()).map(|i| v_t.row(i).adjoint()).collect();
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = cr(1.0);
            for b in &basis {
                let coeff = b.dotc(&e);
                e -= b * coeff;
            }
            let nrm = e.norm();
            if nrm > 1e-8 {
                let e = e / cr(nrm);
                basis.push(e.clone());
                cols.push(e);
            }
        }
    }
    let mut out = CMat::zeros(n, cols.len());
    for (j, col) in cols.iter().enumerate() {
        out.set_column(j, col);
    }
    out
}

/// Orthogonal projection onto the column span of an orthonormal basis.
pub fn projector_from_onb(basis: &CMat) -> CMat {
    if basis.ncols() == 0 {
        return CMat::zeros(basis.nrows(), basis.nrows());
    }
    basis * basis.adjoint()
}

/// Hermitian part (M + M†)/2.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// ‖M − M†‖ in the spectral norm.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix. The input
/// is symmetrized first so tiny non-Hermitian noise cannot poison the solver.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let se = nalgebra::linalg::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(m.nrows(), m.ncols());
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Solve M X = RHS by LU; `None` when M is singular to working precision.
pub fn solve(m: &CMat, rhs: &CMat) -> Option<CMat> {
    m.clone().lu().solve(rhs)
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Moore–Penrose pseudoinverse with relative cutoff.
pub fn pseudo_inverse(m: &CMat, rel_tol: f64) -> CMat {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.pseudo_inverse(rel_tol * smax.max(f64::MIN_POSITIVE))
        .expect("pseudo_inverse with requested factors")
}

/// Horizontal concatenation (A | B).
pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let mut m = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

/// Vertical concatenation (A; B).
pub fn vcat(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.ncols());
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    m
}

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
/// Returns (argmin, min). `f` may return +inf to mark excluded points.
pub fn golden_min(mut lo: f64, mut hi: f64, x_tol: f64, f: &mut dyn FnMut(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > x_tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    if f1 <= f2 && f1 <= fm {
        (x1, f1)
    } else if f2 <= fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Bisection for a continuous increasing function: returns x with g(x) = target.
pub fn bisect_increasing(mut lo: f64, mut hi: f64, target: f64, tol: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    debug_assert!(g(lo) <= target && g(hi) >= target);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one_matrix() {
        let v = CMat::from_row_slice(1, 3, &[c(1.0, 2.0), c(-1.0, 0.5), c(0.0, 3.0)]);
        let m = v.adjoint() * &v;
        let ker = kernel_basis(&m, 1e-10);
        assert_eq!(ker.ncols(), 2);
        assert!(max_abs(&(&m * &ker)) < 1e-10);
        // Orthonormal columns.
        let gram = ker.adjoint() * &ker;
        assert!(max_abs(&(&gram - CMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn kernel_of_wide_matrix_includes_unseen_directions() {
        // 1x3 matrix: SVD returns a single right singular vector; the kernel
        // completion must still produce two orthonormal directions.
        let m = CMat::from_row_slice(1, 3, &[cr(1.0), cr(1.0), cr(0.0)]);
        let ker = kernel_basis(&m, 1e-12);
        assert_eq!(ker.ncols(), 2);
        assert!(max_abs(&(&m * &ker)) < 1e-12);
    }

    #[test]
    fn hermitian_eigen_sorted() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[cr(2.0), c(0.0, 1.0), c(0.0, -1.0), cr(2.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let d = CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|&x| cr(x))));
        assert!(max_abs(&(&vecs * d * vecs.adjoint() - m)) < 1e-12);
    }

    #[test]
    fn golden_min_finds_parabola_vertex() {
        let (x, v) = golden_min(0.0, 2.0, 1e-12, &mut |x| (x - 0.7) * (x - 0.7) + 0.25);
        assert!((x - 0.7).abs() < 1e-8);
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bisect_hits_target() {
        let x = bisect_increasing(0.0, 10.0, 2.0, 1e-13, &|x| x * x);
        assert!((x - 2.0_f64.sqrt()).abs() < 1e-12);
    }
}
