//! Boundary-condition pairs `(A, B)` and everything derived from them:
//! validation, equivalence, the Kuchment canonical form `(P_ker B, L)`,
//! scattering matrices `S(k)`, inertia indices of `AB†`, per-vertex (local)
//! assembly, entrywise-positivity classification and the form matrices
//! `P_M`, `Q_M` on the doubled trace space.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::MetricGraph;
use crate::linalg::{
    c, cr, hcat, hermitian_eigen, hermitian_eigenvalues, hermitian_part, hermiticity_residual,
    kernel_basis, max_abs, projector_from_onb, pseudo_inverse, rank, singular_values, solve,
    spectral_norm, to_complex, vcat, CMat, C64, I,
};
use crate::{Error, Result};

/// Relative singular-value cutoff for rank and kernel decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Refusal distance to the spectrum of L when evaluating S(iκ).
pub const SPEC_L_GUARD: f64 = 1e-8;
/// Entrywise sign tolerance for the orderings ≽ / ≻.
pub const SIGN_TOL: f64 = 1e-9;

/// JSON description of boundary conditions. Complex entries are `[re, im]`
/// pairs; `local` blocks are indexed by vertex id and sized `deg(v)`, with
/// rows/columns ordered like the vertex's slots in the endpoint index.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BcSpec {
    Standard,
    Matrices {
        #[serde(rename = "A")]
        a: Vec<Vec<(f64, f64)>>,
        #[serde(rename = "B")]
        b: Vec<Vec<(f64, f64)>>,
    },
    Local { blocks: BTreeMap<String, LocalBlockSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalBlockSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<(f64, f64)>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<(f64, f64)>>,
}

fn matrix_from_rows(rows: &[Vec<(f64, f64)>]) -> Result<CMat> {
    let n = rows.len();
    let mut m = CMat::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidConfig(format!(
                "matrix row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &(re, im)) in row.iter().enumerate() {
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

impl BcSpec {
    pub fn build(&self, g: &MetricGraph) -> Result<BoundaryConditions> {
        match self {
            BcSpec::Standard => Ok(BoundaryConditions::standard(g)),
            BcSpec::Matrices { a, b } => {
                BoundaryConditions::new(g, matrix_from_rows(a)?, matrix_from_rows(b)?)
            }
            BcSpec::Local { blocks } => {
                let mut ordered = Vec::with_capacity(g.vertex_count());
                for v in 0..g.vertex_count() {
                    let spec = blocks.get(g.vertex_id(v)).ok_or_else(|| {
                        Error::InvalidConfig(format!("missing local block for vertex `{}`", g.vertex_id(v)))
                    })?;
                    ordered.push((matrix_from_rows(&spec.a)?, matrix_from_rows(&spec.b)?));
                }
                BoundaryConditions::from_local_blocks(g, &ordered)
            }
        }
    }
}

/// Counts of positive / negative / zero eigenvalues of `AB†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

/// The equivalent pair `(P + L, P^⊥)` with `P` the orthogonal projection
/// onto `Ker B` and `L` Hermitian vanishing on `Ker B`.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    p: CMat,
    l: CMat,
    /// ‖L − L†‖ before symmetrization, a validity diagnostic.
    pub hermiticity_residual: f64,
}

impl CanonicalForm {
    pub fn projector_ker_b(&self) -> &CMat {
        &self.p
    }

    pub fn projector_ran_b_dagger(&self) -> CMat {
        CMat::identity(self.p.nrows(), self.p.ncols()) - &self.p
    }

    pub fn l(&self) -> &CMat {
        &self.l
    }

    pub fn a_hat(&self) -> CMat {
        &self.p + &self.l
    }

    pub fn b_hat(&self) -> CMat {
        self.projector_ran_b_dagger()
    }

    /// Eigenvalues of L, ascending.
    pub fn l_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.l)
    }

    /// ‖L₊‖: the largest eigenvalue of L clamped below at zero.
    pub fn l_plus_norm(&self) -> f64 {
        self.l_eigenvalues().last().cloned().unwrap_or(0.0).max(0.0)
    }

    /// Positive eigenvalues of L with multiplicities (clustered at `tol`).
    pub fn positive_l_eigenvalues(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for lam in self.l_eigenvalues() {
            if lam > tol {
                match out.last_mut() {
                    Some((v, m)) if (lam - *v).abs() <= tol * (1.0 + lam.abs()) => *m += 1,
                    _ => out.push((lam, 1)),
                }
            }
        }
        out
    }
}

/// Entrywise positivity classification of `I + S(iκ)` over a κ grid.
#[derive(Debug, Clone, Serialize)]
pub struct PositivityClass {
    /// Smallest grid κ from which all entries stay ≥ -SIGN_TOL.
    pub positive_from: Option<f64>,
    /// Smallest grid κ from which all entries stay > SIGN_TOL.
    pub strictly_positive_from: Option<f64>,
    /// Smallest grid κ from which every per-vertex block is entrywise
    /// positive; `None` when no locality witness is available.
    pub locally_strictly_positive_from: Option<f64>,
    pub grid_lo: f64,
    pub grid_hi: f64,
    /// How the large-κ tail is covered beyond the grid.
    pub tail: TailCertificate,
    pub method: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailCertificate {
    /// Grid evidence only.
    GridOnly,
    /// Ker B = 0 and L entrywise nonnegative: I + S(iκ) = 2Σ(L/κ)ⁿ ≽ 0
    /// for all κ > ‖L‖.
    EntrywiseNonnegativeL,
    /// Ker B = 0 and all off-diagonal entries of L positive: the expansion
    /// is entrywise positive for all large κ.
    PositiveOffDiagonalL,
}

/// A validated boundary-condition pair on the endpoint basis of a graph.
#[derive(Debug, Clone)]
pub struct BoundaryConditions {
    a: CMat,
    b: CMat,
    dim: usize,
    /// Per-vertex blocks (A(v), B(v)) when the pair was assembled locally.
    locality: Option<Vec<(CMat, CMat)>>,
}

impl BoundaryConditions {
    /// Validate `(A, B)`: square of the trace dimension, maximal rank of the
    /// horizontal concatenation, and Hermitian `AB†`.
    ///
    /// On a single-vertex graph every valid pair is local; the whole pair is
    /// then recorded as that vertex's block.
    pub fn new(g: &MetricGraph, a: CMat, b: CMat) -> Result<Self> {
        let locality = if g.vertex_count() == 1 { Some(vec![(a.clone(), b.clone())]) } else { None };
        Self::with_locality(g.kdim(), a, b, locality)
    }

    fn with_locality(
        dim: usize,
        a: CMat,
        b: CMat,
        locality: Option<Vec<(CMat, CMat)>>,
    ) -> Result<Self> {
        if a.nrows() != dim || a.ncols() != dim || b.nrows() != dim || b.ncols() != dim {
            return Err(Error::BcDimension { expected: dim, rows: a.nrows(), cols: a.ncols() });
        }
        if dim == 0 {
            return Ok(BoundaryConditions { a, b, dim, locality });
        }
        let stacked = hcat(&a, &b);
        let r = rank(&stacked, RANK_TOL);
        if r < dim {
            return Err(Error::BcRankDeficient { rank: r, dim });
        }
        let ab = &a * b.adjoint();
        let scale = spectral_norm(&ab).max(1.0);
        let res = hermiticity_residual(&ab);
        if res > 1e-9 * scale {
            return Err(Error::BcNonHermitian { residual: res });
        }
        Ok(BoundaryConditions { a, b, dim, locality })
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_local(&self) -> bool {
        self.locality.is_some()
    }

    pub fn local_blocks(&self) -> Option<&[(CMat, CMat)]> {
        self.locality.as_deref()
    }

    /// ψ = 0 at every endpoint.
    pub fn dirichlet(g: &MetricGraph) -> Self {
        let n = g.kdim();
        Self::new(g, CMat::identity(n, n), CMat::zeros(n, n)).expect("Dirichlet pair is valid")
    }

    /// ψ' = 0 at every endpoint.
    pub fn neumann(g: &MetricGraph) -> Self {
        let n = g.kdim();
        Self::new(g, CMat::zeros(n, n), CMat::identity(n, n)).expect("Neumann pair is valid")
    }

    /// `A = H`, `B = I` with Hermitian `H` (delta-type coupling). On a star
    /// this is the Robin family of the closed-form heat kernel.
    pub fn robin(g: &MetricGraph, h: &CMat) -> Result<Self> {
        let n = g.kdim();
        let res = hermiticity_residual(h);
        if res > 1e-12 * spectral_norm(h).max(1.0) {
            return Err(Error::NotHermitian(res));
        }
        Self::new(g, h.clone(), CMat::identity(n, n))
    }

    /// Standard (Kirchhoff) conditions: continuity at each vertex plus a
    /// vanishing sum of inward derivatives. Degree-1 vertices degenerate to
    /// Neumann.
    pub fn standard(g: &MetricGraph) -> Self {
        let blocks: Vec<(CMat, CMat)> =
            (0..g.vertex_count()).map(|v| standard_block(g.degree(v))).collect();
        Self::from_local_blocks(g, &blocks).expect("standard blocks are valid")
    }

    /// Assemble a global pair from per-vertex blocks `(A(v), B(v))` of size
    /// `deg(v)`, scattered to the vertex's slot indices.
    pub fn from_local_blocks(g: &MetricGraph, blocks: &[(CMat, CMat)]) -> Result<Self> {
        let n = g.kdim();
        if blocks.len() != g.vertex_count() {
            return Err(Error::InvalidConfig(format!(
                "{} blocks for {} vertices",
                blocks.len(),
                g.vertex_count()
            )));
        }
        let mut a = CMat::zeros(n, n);
        let mut b = CMat::zeros(n, n);
        for (v, (av, bv)) in blocks.iter().enumerate() {
            let d = g.degree(v);
            if av.nrows() != d || av.ncols() != d || bv.nrows() != d || bv.ncols() != d {
                return Err(Error::BlockDimension {
                    vertex: g.vertex_id(v).to_string(),
                    got: av.nrows().max(bv.nrows()),
                    expected: d,
                });
            }
            let stacked = hcat(av, bv);
            if rank(&stacked, RANK_TOL) < d {
                return Err(Error::BlockInvalid {
                    vertex: g.vertex_id(v).to_string(),
                    source: Box::new(Error::BcRankDeficient { rank: rank(&stacked, RANK_TOL), dim: d }),
                });
            }
            let ab = av * bv.adjoint();
            let res = hermiticity_residual(&ab);
            if res > 1e-9 * spectral_norm(&ab).max(1.0) {
                return Err(Error::BlockInvalid {
                    vertex: g.vertex_id(v).to_string(),
                    source: Box::new(Error::BcNonHermitian { residual: res }),
                });
            }
            let slots = g.endpoint_index().vertex_slots(v);
            for (r, &gr) in slots.iter().enumerate() {
                for (cidx, &gc) in slots.iter().enumerate() {
                    a[(gr, gc)] = av[(r, cidx)];
                    b[(gr, gc)] = bv[(r, cidx)];
                }
            }
        }
        Self::with_locality(n, a, b, Some(blocks.to_vec()))
    }

    /// The vertex scattering matrix `S(k) = -(A + ikB)^{-1}(A - ikB)`.
    ///
    /// Unitary for real k ≠ 0 and Hermitian for k = iκ with κ > 0 away from
    /// the spectrum of L; evaluation within the guard distance of a singular
    /// `A + ikB` is refused because such κ are spectral data.
    pub fn scattering(&self, k: C64) -> Result<CMat> {
        if k.norm() == 0.0 {
            return Err(Error::ZeroSpectralParameter);
        }
        scattering_of_pair(&self.a, &self.b, k)
    }

    /// Scattering block of vertex `v` from the locality witness.
    pub fn local_scattering(&self, v: usize, k: C64) -> Result<CMat> {
        let blocks = self.locality.as_ref().ok_or(Error::NotLocal)?;
        let (av, bv) = &blocks[v];
        scattering_of_pair(av, bv, k)
    }

    /// Kuchment canonical form: `P = P_ker B`, `L = B⁺ A P^⊥`.
    pub fn canonical_form(&self) -> CanonicalForm {
        let ker = kernel_basis(&self.b, RANK_TOL);
        let p = projector_from_onb(&ker);
        let p_perp = CMat::identity(self.dim, self.dim) - &p;
        let l_raw = pseudo_inverse(&self.b, RANK_TOL) * &self.a * &p_perp;
        let res = hermiticity_residual(&l_raw);
        CanonicalForm { p, l: hermitian_part(&l_raw), hermiticity_residual: res }
    }

    /// Do two pairs carve out the same maximal isotropic subspace?
    /// Decided by comparing orthogonal projections onto `Ker (A, B)`.
    pub fn equivalent(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let k1 = kernel_basis(&hcat(&self.a, &self.b), RANK_TOL);
        let k2 = kernel_basis(&hcat(&other.a, &other.b), RANK_TOL);
        let p1 = projector_from_onb(&k1);
        let p2 = projector_from_onb(&k2);
        spectral_norm(&(p1 - p2)) <= 1e-8
    }

    /// Inertia of the Hermitian matrix `AB†`.
    pub fn inertia(&self) -> Inertia {
        let ab = &self.a * self.b.adjoint();
        let eig = hermitian_eigenvalues(&ab);
        let scale = eig.iter().fold(0.0f64, |m, &x| m.max(x.abs())).max(1.0);
        let tol = 1e-10 * scale;
        let n_plus = eig.iter().filter(|&&x| x > tol).count();
        let n_minus = eig.iter().filter(|&&x| x < -tol).count();
        Inertia { n_plus, n_minus, n_zero: self.dim - n_plus - n_minus }
    }

    /// Form matrices on the doubled trace space:
    /// `P_M = W† G^{-1} W` with `W = (-B, A)`, `G = AA† + BB†`, and
    /// `Q_M = -W† G^{-1} (AB†) G^{-1} W`.
    pub fn form_matrices(&self) -> (CMat, CMat) {
        let g = &self.a * self.a.adjoint() + &self.b * self.b.adjoint();
        let w = hcat(&(-&self.b), &self.a);
        let ginv_w = solve(&g, &w).expect("G is positive definite for valid (A,B)");
        let p_m = w.adjoint() * &ginv_w;
        let ab = &self.a * self.b.adjoint();
        let q_m = -(ginv_w.adjoint() * ab * &ginv_w);
        (p_m, q_m)
    }

    /// Classify entrywise positivity of `I + S(iκ)` on an ascending κ grid.
    /// Every grid point must lie above `max(spec L, 0)`.
    pub fn positivity_class(&self, kappa_grid: &[f64]) -> Result<PositivityClass> {
        if kappa_grid.is_empty() {
            return Err(Error::InvalidConfig("empty κ grid".into()));
        }
        let cf = self.canonical_form();
        let l_eigs = cf.l_eigenvalues();
        let l_top = l_eigs.last().cloned().unwrap_or(0.0).max(0.0);
        for &kappa in kappa_grid {
            if let Some(dist) =
                l_eigs.iter().map(|&l| (kappa - l).abs()).min_by(|a, b| a.partial_cmp(b).unwrap())
            {
                if dist < SPEC_L_GUARD {
                    return Err(Error::GridHitsSpectrumOfL { kappa, dist });
                }
            }
            if kappa <= l_top {
                return Err(Error::InvalidConfig(format!(
                    "κ grid point {kappa} is not above max(spec L, 0) = {l_top}"
                )));
            }
        }

        let mut positive = vec![false; kappa_grid.len()];
        let mut strict = vec![false; kappa_grid.len()];
        let mut local_strict: Option<Vec<bool>> =
            self.locality.as_ref().map(|_| vec![false; kappa_grid.len()]);
        for (idx, &kappa) in kappa_grid.iter().enumerate() {
            let s = self.scattering(c(0.0, kappa))?;
            let one_plus = CMat::identity(self.dim, self.dim) + &s;
            positive[idx] = entrywise_nonnegative(&one_plus);
            strict[idx] = entrywise_positive(&one_plus);
            if let (Some(flags), Some(blocks)) = (local_strict.as_mut(), self.locality.as_ref()) {
                let mut all = true;
                for (v, _) in blocks.iter().enumerate() {
                    let sv = self.local_scattering(v, c(0.0, kappa))?;
                    let block = CMat::identity(sv.nrows(), sv.ncols()) + sv;
                    if !entrywise_positive(&block) {
                        all = false;
                        break;
                    }
                }
                flags[idx] = all;
            }
        }

        let from_index = |flags: &[bool]| -> Option<f64> {
            let mut start = None;
            for (i, &ok) in flags.iter().enumerate() {
                if ok {
                    if start.is_none() {
                        start = Some(i);
                    }
                } else {
                    start = None;
                }
            }
            start.map(|i| kappa_grid[i])
        };

        let ker_b_trivial = rank(&self.b, RANK_TOL) == self.dim;
        let tail = if ker_b_trivial {
            let l = cf.l();
            if entrywise_positive_offdiag(l) {
                TailCertificate::PositiveOffDiagonalL
            } else if entrywise_nonnegative(l) {
                TailCertificate::EntrywiseNonnegativeL
            } else {
                TailCertificate::GridOnly
            }
        } else {
            TailCertificate::GridOnly
        };
        let method = match tail {
            TailCertificate::GridOnly => {
                "entrywise sign checks on the κ grid; no tail expansion available".to_string()
            }
            TailCertificate::EntrywiseNonnegativeL => format!(
                "grid checks plus the expansion I+S(iκ) = 2Σ(L/κ)ⁿ with L ≽ 0, valid for κ > ‖L‖ = {:.6}",
                spectral_norm(cf.l())
            ),
            TailCertificate::PositiveOffDiagonalL => format!(
                "grid checks plus the expansion I+S(iκ) = 2Σ(L/κ)ⁿ with positive off-diagonal L, valid for large κ (‖L‖ = {:.6})",
                spectral_norm(cf.l())
            ),
        };
        Ok(PositivityClass {
            positive_from: from_index(&positive),
            strictly_positive_from: from_index(&strict),
            locally_strictly_positive_from: local_strict.as_deref().and_then(from_index),
            grid_lo: kappa_grid[0],
            grid_hi: *kappa_grid.last().unwrap(),
            tail,
            method,
        })
    }
}

fn scattering_of_pair(a: &CMat, b: &CMat, k: C64) -> Result<CMat> {
    let ikb = b.map(|x| x * I * k);
    let m = a + &ikb;
    let rhs = a - &ikb;
    let sv = singular_values(&m);
    let smax = sv.first().cloned().unwrap_or(0.0);
    let smin = sv.last().cloned().unwrap_or(0.0);
    if smax == 0.0 || smin < SPEC_L_GUARD * smax {
        return Err(Error::ScatteringSingular { k_re: k.re, k_im: k.im, kappa: k.im });
    }
    let x = solve(&m, &rhs).ok_or(Error::ScatteringSingular { k_re: k.re, k_im: k.im, kappa: k.im })?;
    Ok(-x)
}

/// The standard block at a vertex of degree `d`: continuity rows plus a
/// derivative-sum row; `d = 1` degenerates to the Neumann block.
pub fn standard_block(d: usize) -> (CMat, CMat) {
    let mut a = CMat::zeros(d, d);
    let mut b = CMat::zeros(d, d);
    for r in 0..d.saturating_sub(1) {
        a[(r, r)] = cr(1.0);
        a[(r, r + 1)] = cr(-1.0);
    }
    for cidx in 0..d {
        b[(d - 1, cidx)] = cr(1.0);
    }
    (a, b)
}

fn entrywise_nonnegative(m: &CMat) -> bool {
    m.iter().all(|z| z.im.abs() <= SIGN_TOL && z.re >= -SIGN_TOL)
}

fn entrywise_positive(m: &CMat) -> bool {
    m.iter().all(|z| z.im.abs() <= SIGN_TOL && z.re > SIGN_TOL)
}

fn entrywise_positive_offdiag(m: &CMat) -> bool {
    if m.nrows() < 2 {
        return false;
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                let z = m[(i, j)];
                if z.im.abs() > SIGN_TOL || z.re <= SIGN_TOL {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MetricGraph;

    fn diag(entries: &[f64]) -> CMat {
        let n = entries.len();
        CMat::from_fn(n, n, |i, j| if i == j { cr(entries[i]) } else { cr(0.0) })
    }

    #[test]
    fn dirichlet_and_neumann_are_valid() {
        let g = MetricGraph::star(3);
        let d = BoundaryConditions::dirichlet(&g);
        let n = BoundaryConditions::neumann(&g);
        assert!(BoundaryConditions::new(&g, d.a.clone(), d.b.clone()).is_ok());
        assert!(BoundaryConditions::new(&g, n.a.clone(), n.b.clone()).is_ok());
        // (I, I) is also valid: full rank and AB† = I Hermitian.
        assert!(BoundaryConditions::new(&g, CMat::identity(3, 3), CMat::identity(3, 3)).is_ok());
    }

    #[test]
    fn zero_pair_rejected() {
        let g = MetricGraph::star(2);
        let z = CMat::zeros(2, 2);
        assert!(matches!(
            BoundaryConditions::new(&g, z.clone(), z),
            Err(Error::BcRankDeficient { rank: 0, .. })
        ));
    }

    #[test]
    fn non_hermitian_ab_rejected() {
        let g = MetricGraph::star(2);
        // A = [[0,1],[0,0]], B = I: AB† = A not Hermitian.
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = cr(1.0);
        a[(1, 0)] = cr(2.0);
        let r = BoundaryConditions::new(&g, a, CMat::identity(2, 2));
        assert!(matches!(r, Err(Error::BcNonHermitian { .. })));
    }

    #[test]
    fn scattering_dirichlet_neumann() {
        let g = MetricGraph::star(2);
        let k = c(0.7, 0.0);
        let s_d = BoundaryConditions::dirichlet(&g).scattering(k).unwrap();
        let s_n = BoundaryConditions::neumann(&g).scattering(k).unwrap();
        assert!(max_abs(&(&s_d + CMat::identity(2, 2))) < 1e-14);
        assert!(max_abs(&(&s_n - CMat::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn scattering_standard_star_deg3() {
        let g = MetricGraph::star(3);
        let bc = BoundaryConditions::standard(&g);
        for &k in &[c(0.3, 0.0), c(2.0, 0.0), c(0.0, 5.0)] {
            let s = bc.scattering(k).unwrap();
            let expect = CMat::from_fn(3, 3, |i, j| {
                cr(2.0 / 3.0 - if i == j { 1.0 } else { 0.0 })
            });
            assert!(max_abs(&(s - expect)) < 1e-12, "at k = {k}");
        }
    }

    #[test]
    fn canonical_form_dirichlet() {
        let g = MetricGraph::star(3);
        let cf = BoundaryConditions::dirichlet(&g).canonical_form();
        assert!(max_abs(&(cf.projector_ker_b() - CMat::identity(3, 3))) < 1e-12);
        assert!(max_abs(cf.l()) < 1e-12);
    }

    #[test]
    fn canonical_form_robin_star() {
        let g = MetricGraph::star(3);
        let h = diag(&[1.0, -2.0, 0.0]);
        let bc = BoundaryConditions::robin(&g, &h).unwrap();
        let cf = bc.canonical_form();
        assert!(max_abs(cf.projector_ker_b()) < 1e-12);
        assert!(max_abs(&(cf.l() - &h)) < 1e-12);
        assert_eq!(bc.inertia(), Inertia { n_plus: 1, n_minus: 1, n_zero: 1 });
    }

    #[test]
    fn canonical_form_standard_deg3() {
        // B has rank 1; Ker B is the 2-dim span of the difference vectors and
        // A·B† = 0 forces L = 0.
        let g = MetricGraph::star(3);
        let bc = BoundaryConditions::standard(&g);
        let cf = bc.canonical_form();
        assert!(max_abs(cf.l()) < 1e-12);
        // Projection onto span{(1,-1,0), (0,1,-1)} = complement of (1,1,1)/√3.
        let ones = CMat::from_fn(3, 3, |_, _| cr(1.0 / 3.0));
        let expect = CMat::identity(3, 3) - ones;
        assert!(max_abs(&(cf.projector_ker_b() - expect)) < 1e-12);
        // P² = P = P†, L·P = 0.
        let p = cf.projector_ker_b();
        assert!(max_abs(&(p * p - p)) < 1e-12);
        assert!(hermiticity_residual(p) < 1e-12);
        // Round trip: (Â, B̂) is equivalent to (A, B).
        let hat = BoundaryConditions::new(&g, cf.a_hat(), cf.b_hat()).unwrap();
        assert!(bc.equivalent(&hat));
    }

    #[test]
    fn equivalence_scaling_and_contrast() {
        let g = MetricGraph::star(3);
        let bc = BoundaryConditions::standard(&g);
        let scaled = BoundaryConditions::new(&g, bc.a() * cr(2.0), bc.b() * cr(2.0)).unwrap();
        assert!(bc.equivalent(&scaled));
        let d = BoundaryConditions::dirichlet(&g);
        let n = BoundaryConditions::neumann(&g);
        assert!(!d.equivalent(&n));
    }

    #[test]
    fn inertia_dirichlet_and_standard() {
        let g = MetricGraph::star(3);
        assert_eq!(
            BoundaryConditions::dirichlet(&g).inertia(),
            Inertia { n_plus: 0, n_minus: 0, n_zero: 3 }
        );
        assert_eq!(
            BoundaryConditions::standard(&g).inertia(),
            Inertia { n_plus: 0, n_minus: 0, n_zero: 3 }
        );
    }

    #[test]
    fn standard_block_shapes() {
        let (a2, b2) = standard_block(2);
        let ea = CMat::from_row_slice(2, 2, &[cr(1.0), cr(-1.0), cr(0.0), cr(0.0)]);
        let eb = CMat::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(1.0), cr(1.0)]);
        assert!(max_abs(&(a2 - ea)) < 1e-15);
        assert!(max_abs(&(b2 - eb)) < 1e-15);
        let (a1, b1) = standard_block(1);
        assert!(max_abs(&a1) < 1e-15);
        assert!(max_abs(&(b1 - CMat::identity(1, 1))) < 1e-15);
    }

    #[test]
    fn local_assembly_matches_make_standard_on_star() {
        let g = MetricGraph::star(3);
        let bc1 = BoundaryConditions::standard(&g);
        let bc2 = BoundaryConditions::from_local_blocks(&g, &[standard_block(3)]).unwrap();
        assert!(max_abs(&(bc1.a() - bc2.a())) < 1e-15);
        assert!(max_abs(&(bc1.b() - bc2.b())) < 1e-15);
    }

    #[test]
    fn local_assembly_robin_interval() {
        let g = MetricGraph::interval(1.0);
        let blocks = vec![
            (CMat::from_element(1, 1, cr(1.0)), CMat::identity(1, 1)),
            (CMat::from_element(1, 1, cr(2.0)), CMat::identity(1, 1)),
        ];
        let bc = BoundaryConditions::from_local_blocks(&g, &blocks).unwrap();
        assert!(max_abs(&(bc.a() - diag(&[1.0, 2.0]))) < 1e-15);
        assert!(max_abs(&(bc.b() - CMat::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn local_assembly_dirichlet_blocks() {
        let g = MetricGraph::interval_with_lead(1.0);
        let blocks: Vec<(CMat, CMat)> = (0..2)
            .map(|v| {
                let d = g.degree(v);
                (CMat::identity(d, d), CMat::zeros(d, d))
            })
            .collect();
        let bc = BoundaryConditions::from_local_blocks(&g, &blocks).unwrap();
        assert!(bc.equivalent(&BoundaryConditions::dirichlet(&g)));
    }

    #[test]
    fn block_dimension_mismatch_rejected() {
        let g = MetricGraph::star(3);
        let r = BoundaryConditions::from_local_blocks(&g, &[standard_block(2)]);
        assert!(matches!(r, Err(Error::BlockDimension { .. })));
    }

    #[test]
    fn form_matrices_dirichlet_neumann_robin() {
        let g = MetricGraph::star(2);
        let (p_d, q_d) = BoundaryConditions::dirichlet(&g).form_matrices();
        // Projects onto the derivative block; Q vanishes.
        let mut expect = CMat::zeros(4, 4);
        expect[(2, 2)] = cr(1.0);
        expect[(3, 3)] = cr(1.0);
        assert!(max_abs(&(&p_d - &expect)) < 1e-12);
        assert!(max_abs(&q_d) < 1e-12);

        let (p_n, q_n) = BoundaryConditions::neumann(&g).form_matrices();
        let mut expect_n = CMat::zeros(4, 4);
        expect_n[(0, 0)] = cr(1.0);
        expect_n[(1, 1)] = cr(1.0);
        assert!(max_abs(&(&p_n - &expect_n)) < 1e-12);
        assert!(max_abs(&q_n) < 1e-12);

        // 1x1 Robin: Q_M has eigenvalues {0, -1/2}: inertia (0, 1, 1).
        let g1 = MetricGraph::star(1);
        let bc = BoundaryConditions::robin(&g1, &CMat::identity(1, 1)).unwrap();
        let (p_m, q_m) = bc.form_matrices();
        assert!(max_abs(&(&p_m * &p_m - &p_m)) < 1e-12);
        let eig = hermitian_eigenvalues(&q_m);
        assert!((eig[0] + 0.5).abs() < 1e-12);
        assert!(eig[1].abs() < 1e-12);
    }

    #[test]
    fn positivity_standard_star() {
        let g = MetricGraph::star(3);
        let bc = BoundaryConditions::standard(&g);
        let grid: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
        let class = bc.positivity_class(&grid).unwrap();
        assert_eq!(class.strictly_positive_from, Some(0.5));
        assert_eq!(class.locally_strictly_positive_from, Some(0.5));
        assert_eq!(class.positive_from, Some(0.5));
    }

    #[test]
    fn positivity_dirichlet_not_strict() {
        let g = MetricGraph::star(2);
        let bc = BoundaryConditions::dirichlet(&g);
        let grid = [1.0, 2.0, 4.0];
        let class = bc.positivity_class(&grid).unwrap();
        assert_eq!(class.positive_from, Some(1.0));
        assert_eq!(class.strictly_positive_from, None);
    }

    #[test]
    fn positivity_robin_positive_offdiagonal() {
        let g = MetricGraph::star(2);
        let h = CMat::from_row_slice(2, 2, &[cr(-0.5), cr(0.8), cr(0.8), cr(0.3)]);
        let bc = BoundaryConditions::robin(&g, &h).unwrap();
        let grid: Vec<f64> = (1..=30).map(|i| 1.0 + 0.5 * i as f64).collect();
        let class = bc.positivity_class(&grid).unwrap();
        assert_eq!(class.tail, TailCertificate::PositiveOffDiagonalL);
        assert!(class.strictly_positive_from.is_some());
    }

    #[test]
    fn grid_on_spectrum_of_l_rejected() {
        let g = MetricGraph::star(2);
        let h = diag(&[1.0, 3.0]);
        let bc = BoundaryConditions::robin(&g, &h).unwrap();
        assert!(matches!(
            bc.positivity_class(&[3.0 + 1e-10, 5.0]),
            Err(Error::GridHitsSpectrumOfL { .. })
        ));
    }

    #[test]
    fn scattering_refused_on_spectrum_of_l() {
        let g = MetricGraph::star(1);
        let bc = BoundaryConditions::robin(&g, &CMat::from_element(1, 1, cr(2.0))).unwrap();
        // A - κB singular at κ = 2.
        assert!(matches!(bc.scattering(c(0.0, 2.0)), Err(Error::ScatteringSingular { .. })));
        assert!(bc.scattering(c(0.0, 2.1)).is_ok());
    }
}
