//! A small dense semidefinite-programming solver.
//!
//! Problems are in standard form
//!
//! ```text
//! minimize ⟨C, X⟩   subject to ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! maximize bᵀy      subject to Σ y_i A_i + Z = C,  Z ⪰ 0
//! ```
//!
//! and are solved by a primal-dual path-following method on the homogeneous
//! self-dual embedding, with the HKM search direction and Mehrotra's
//! predictor-corrector. The embedding gives infeasibility certificates for
//! free: when the iterates drift towards `τ = 0` the dual (or primal) part of
//! the iterate becomes an improving ray.
//!
//! Constraint matrices are stored sparsely; the iterates are dense.

use std::collections::HashMap;

use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse symmetric matrix, stored as its upper triangle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix { dim, entries: (0..dim).map(|i| (i, i, 1.0)).collect() }
    }

    /// The matrix with `v` at `(i, j)` and `(j, i)`.
    pub fn single(dim: usize, i: usize, j: usize, v: f64) -> Self {
        let mut m = SymMatrix::zeros(dim);
        m.add(i, j, v);
        m
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let n = m.nrows();
        let mut out = SymMatrix::zeros(n);
        for j in 0..n {
            for i in 0..=j {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
                if m[(i, j)] != 0.0 {
                    out.entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `v` to the `(i, j)` and `(j, i)` entries (once on the diagonal).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.dim && j < self.dim, "index out of range");
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((i, j, v));
    }

    /// Upper-triangle entries with duplicates merged and zeros dropped.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut merged: HashMap<(usize, usize), f64> = HashMap::new();
        for &(i, j, v) in &self.entries {
            *merged.entry((i, j)).or_insert(0.0) += v;
        }
        let mut out: Vec<_> = merged.into_iter().filter(|&(_, v)| v != 0.0).map(|((i, j), v)| (i, j, v)).collect();
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries().is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v;
            }
        }
        m
    }

    /// `⟨self, x⟩ = tr(self · x)` for symmetric `x`.
    pub fn inner(&self, x: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(i, j, v)| if i == j { v * x[(i, j)] } else { v * (x[(i, j)] + x[(j, i)]) }).sum()
    }
}

/// One PSD variable of size `dim`, linear equality constraints and a linear
/// objective (zero for pure feasibility).
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    dim: usize,
    constraints: Vec<(SymMatrix, f64)>,
    objective: SymMatrix,
}

impl SdpProblem {
    pub fn new(dim: usize) -> Self {
        SdpProblem { dim, constraints: Vec::new(), objective: SymMatrix::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[(SymMatrix, f64)] {
        &self.constraints
    }

    pub fn objective(&self) -> &SymMatrix {
        &self.objective
    }

    pub fn add_constraint(&mut self, a: SymMatrix, b: f64) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::Dimension(format!("constraint of size {} in a problem of size {}", a.dim(), self.dim)));
        }
        self.constraints.push((a, b));
        Ok(())
    }

    pub fn set_objective(&mut self, c: SymMatrix) -> Result<()> {
        if c.dim() != self.dim {
            return Err(Error::Dimension(format!("objective of size {} in a problem of size {}", c.dim(), self.dim)));
        }
        self.objective = c;
        Ok(())
    }

    /// `(⟨A_1, X⟩ - b_1, ...)`.
    pub fn primal_residual(&self, x: &DMatrix<f64>) -> Vec<f64> {
        self.constraints.iter().map(|(a, b)| a.inner(x) - b).collect()
    }

    /// `Σ y_i A_i`.
    pub fn adjoint(&self, y: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for ((a, _), &yi) in self.constraints.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for &(i, j, v) in &a.entries {
                out[(i, j)] += yi * v;
                if i != j {
                    out[(j, i)] += yi * v;
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { gap_tol: 1e-8, feas_tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalLimit,
}

/// Certificate attached to an `INFEASIBLE` answer.
#[derive(Clone, Debug, PartialEq)]
pub enum InfeasibilityRay {
    /// No feasible `X`: `bᵀy = 1` and `Z = -Σ y_i A_i ⪰ 0`.
    Primal { y: Vec<f64>, z: DMatrix<f64> },
    /// The primal objective is unbounded below: `⟨C, X⟩ = -1`,
    /// `⟨A_i, X⟩ = 0` and `X ⪰ 0`.
    Dual { x: DMatrix<f64> },
}

impl InfeasibilityRay {
    /// Checks the certificate inequalities to `tol`.
    pub fn check(&self, prob: &SdpProblem, tol: f64) -> bool {
        match self {
            InfeasibilityRay::Primal { y, z } => {
                if y.len() != prob.constraints.len() {
                    return false;
                }
                let by: f64 = prob.constraints.iter().zip(y).map(|((_, b), yi)| b * yi).sum();
                let s = -prob.adjoint(y);
                (by - 1.0).abs() <= tol && min_eigenvalue(&s) >= -tol && (&s - z).amax() <= tol
            }
            InfeasibilityRay::Dual { x } => {
                let cx = prob.objective.inner(x);
                let res = prob.constraints.iter().map(|(a, _)| a.inner(x).abs()).fold(0.0, f64::max);
                (cx + 1.0).abs() <= tol && res <= tol && min_eigenvalue(x) >= -tol
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub z: DMatrix<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual| / (1 + |primal| + |dual|)`.
    pub gap: f64,
    /// `max_i |⟨A_i, X⟩ - b_i|`.
    pub primal_residual: f64,
    /// Largest entry of `|Σ y_i A_i + Z - C|`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub ray: Option<InfeasibilityRay>,
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Constraint in full (both triangles) coordinate form.
struct Sparse {
    entries: Vec<(usize, usize, f64)>,
}

impl Sparse {
    fn from_sym(a: &SymMatrix) -> Self {
        let mut entries = Vec::new();
        for (i, j, v) in a.entries() {
            entries.push((i, j, v));
            if i != j {
                entries.push((j, i, v));
            }
        }
        Sparse { entries }
    }

    fn inner(&self, x: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(i, j, v)| v * x[(i, j)]).sum()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

enum Pruned {
    Kept(Vec<usize>),
    /// Dependent constraints with inconsistent right-hand sides; `y` is the
    /// combination with `Σ y_i A_i ≈ 0` and `bᵀy = 1`.
    Inconsistent(Vec<f64>),
}

/// Drops linearly dependent constraints.
///
/// Constraints that share no matrix entry are orthogonal, so the rank test
/// runs by modified Gram-Schmidt inside each connected component of the
/// "shares an entry" graph.
fn prune(prob: &SdpProblem, feas_tol: f64) -> Pruned {
    let m = prob.constraints.len();
    let vectors: Vec<Vec<((usize, usize), f64)>> = prob
        .constraints
        .iter()
        .map(|(a, _)| {
            a.entries()
                .into_iter()
                .map(|(i, j, v)| ((i, j), if i == j { v } else { v * std::f64::consts::SQRT_2 }))
                .collect()
        })
        .collect();
    let mut key_index: HashMap<(usize, usize), usize> = HashMap::new();
    for v in &vectors {
        for (k, _) in v {
            let next = key_index.len();
            key_index.entry(*k).or_insert(next);
        }
    }
    let nkeys = key_index.len();
    // Nodes 0..m are constraints, m.. are matrix entries.
    let mut uf = UnionFind((0..m + nkeys).collect());
    for (c, v) in vectors.iter().enumerate() {
        for (k, _) in v {
            uf.union(c, m + key_index[k]);
        }
    }
    let mut components: HashMap<usize, Vec<usize>> = HashMap::new();
    for c in 0..m {
        let r = uf.find(c);
        components.entry(r).or_default().push(c);
    }
    let mut comps: Vec<Vec<usize>> = components.into_values().collect();
    comps.sort();

    let mut kept = Vec::with_capacity(m);
    for comp in comps {
        if comp.len() == 1 {
            let c = comp[0];
            if !vectors[c].is_empty() {
                kept.push(c);
                continue;
            }
            let b = prob.constraints[c].1;
            if b.abs() > feas_tol {
                let mut y = vec![0.0; m];
                y[c] = 1.0 / b;
                return Pruned::Inconsistent(y);
            }
            continue;
        }
        let mut local: HashMap<(usize, usize), usize> = HashMap::new();
        for &c in &comp {
            for (k, _) in &vectors[c] {
                let next = local.len();
                local.entry(*k).or_insert(next);
            }
        }
        let width = local.len();
        // Orthonormal rows q, with q = Σ coef_j a_{comp[j]} and beta = Σ coef_j b.
        let mut basis: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
        for (pos, &c) in comp.iter().enumerate() {
            let mut a = vec![0.0; width];
            for (k, v) in &vectors[c] {
                a[local[k]] = *v;
            }
            let norm0 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut coef = vec![0.0; comp.len()];
            coef[pos] = 1.0;
            let mut beta = prob.constraints[c].1;
            for _ in 0..2 {
                for (q, qc, qb) in &basis {
                    let t: f64 = a.iter().zip(q).map(|(x, y)| x * y).sum();
                    if t == 0.0 {
                        continue;
                    }
                    for (x, y) in a.iter_mut().zip(q) {
                        *x -= t * y;
                    }
                    for (x, y) in coef.iter_mut().zip(qc) {
                        *x -= t * y;
                    }
                    beta -= t * qb;
                }
            }
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-10 * norm0.max(1.0) {
                for x in a.iter_mut() {
                    *x /= norm;
                }
                for x in coef.iter_mut() {
                    *x /= norm;
                }
                basis.push((a, coef, beta / norm));
                kept.push(c);
            } else if beta.abs() > feas_tol {
                let mut y = vec![0.0; m];
                for (j, &cj) in comp.iter().enumerate() {
                    y[cj] = coef[j] / beta;
                }
                return Pruned::Inconsistent(y);
            }
        }
    }
    kept.sort_unstable();
    Pruned::Kept(kept)
}

struct Iterate {
    x: DMatrix<f64>,
    y: DVector<f64>,
    z: DMatrix<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    dx: DMatrix<f64>,
    dy: DVector<f64>,
    dz: DMatrix<f64>,
    dtau: f64,
    dkappa: f64,
}

/// Data fixed for one iteration: the Schur complement and helpers.
struct Linearization<'a> {
    cons: &'a [Sparse],
    b: &'a DVector<f64>,
    x: &'a DMatrix<f64>,
    zinv: DMatrix<f64>,
    schur: Schur,
    q: DVector<f64>,
    /// `C - 𝒜*q`.
    r: DMatrix<f64>,
}

impl Linearization<'_> {
    fn op(&self, w: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.cons.len(), self.cons.iter().map(|a| a.inner(w)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        adjoint(self.cons, y, self.x.nrows())
    }

    /// Solves the embedded Newton system for targets
    /// `rc = σμZ⁻¹ - X (- corrector)`, `rk = σμ - τκ (- corrector)` and
    /// residual reduction `eta`.
    ///
    /// The direction is affine in `Δτ`. Both parts are formed explicitly and
    /// the `τ` equation is written in terms of `r = C - 𝒜*q`, which avoids
    /// subtracting two quantities of order `1/μ`.
    fn direction(&self, it: &Iterate, res: &Residuals, eta: f64, rc: &DMatrix<f64>, rk: f64) -> Direction {
        let xrdz = self.x * &res.rd * &self.zinv;
        let h1 = &res.rp * eta - self.op(rc) + self.op(&xrdz) * eta;
        let p = self.schur.solve(&h1);
        let dz_p = &res.rd * eta - self.adjoint(&p);
        let dx_p = symmetrize(&(rc - self.x * &dz_p * &self.zinv));
        let xrz = symmetrize(&(self.x * &self.r * &self.zinv));
        let num = rk / it.tau + eta * res.rg - self.b.dot(&p) + dot_m(&self.r, &dx_p) + eta * self.q.dot(&res.rp);
        let den = it.kappa / it.tau + dot_m(&self.r, &xrz);
        let dtau = num / den;
        let mut dy = p + &self.q * dtau;
        let mut dz = dz_p + &self.r * dtau;
        let mut dx = dx_p - xrz * dtau;
        // Iterative refinement of the primal equations, which X ΔZ Z⁻¹ loses
        // to rounding once Z⁻¹ is large. The correction is taken in the
        // metric of the Newton system so that it respects the cone.
        for _ in 0..2 {
            let r = &res.rp * eta + self.b * dtau - self.op(&dx);
            let w = self.schur.solve(&r);
            let aw = self.adjoint(&w);
            dx += symmetrize(&(self.x * &aw * &self.zinv));
            dy += &w;
            dz -= aw;
        }
        let dkappa = (rk - it.kappa * dtau) / it.tau;
        Direction { dx, dy, dz, dtau, dkappa }
    }
}

struct Residuals {
    rp: DVector<f64>,
    rd: DMatrix<f64>,
    rg: f64,
}

fn adjoint(cons: &[Sparse], y: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, n);
    for (a, &yi) in cons.iter().zip(y.iter()) {
        for &(i, j, v) in &a.entries {
            out[(i, j)] += yi * v;
        }
    }
    out
}

/// `|p - d| / (1 + |p| + |d|)`.
pub(crate) fn relative_gap(p: f64, d: f64) -> f64 {
    (p - d).abs() / (1.0 + p.abs() + d.abs())
}

fn dot_m(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α ≤ 1/0.95`-ish such that `x + α dx ⪰ 0` (infinite if no limit).
fn max_step_psd(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> Option<f64> {
    let chol = x.clone().cholesky()?;
    let l = chol.l();
    let t = l.solve_lower_triangular(dx)?;
    let s = l.solve_lower_triangular(&t.transpose())?;
    let lam = min_eigenvalue(&s);
    Some(if lam < 0.0 { -1.0 / lam } else { f64::INFINITY })
}

fn max_step_scalar(v: f64, dv: f64) -> f64 {
    if dv < 0.0 {
        -v / dv
    } else {
        f64::INFINITY
    }
}

fn step_length(it: &Iterate, d: &Direction) -> Option<f64> {
    let ax = max_step_psd(&it.x, &d.dx)?;
    let az = max_step_psd(&it.z, &d.dz)?;
    Some(ax.min(az).min(max_step_scalar(it.tau, d.dtau)).min(max_step_scalar(it.kappa, d.dkappa)))
}

fn schur_complement(cons: &[Sparse], x: &DMatrix<f64>, zinv: &DMatrix<f64>) -> DMatrix<f64> {
    let m = cons.len();
    let mut s = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for &(a, b, v) in &cons[i].entries {
                for &(c, d, w) in &cons[j].entries {
                    acc += v * w * x[(b, c)] * zinv[(d, a)];
                }
            }
            s[(i, j)] = acc;
            s[(j, i)] = acc;
        }
    }
    s
}

/// The Schur complement with a (possibly regularized) Cholesky factor.
struct Schur {
    matrix: DMatrix<f64>,
    factor: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Schur {
    /// Solves with the regularized factor, then refines against the exact
    /// matrix.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.factor.solve(rhs);
        for _ in 0..2 {
            let r = rhs - &self.matrix * &x;
            x += self.factor.solve(&r);
        }
        x
    }
}

fn factor_schur(matrix: DMatrix<f64>) -> Option<Schur> {
    let mut s = matrix.clone();
    let m = s.nrows();
    let scale = (0..m).map(|i| s[(i, i)].abs()).fold(1.0, f64::max);
    let mut reg = 1e-12 * scale;
    for _ in 0..6 {
        for i in 0..m {
            s[(i, i)] += reg;
        }
        if let Some(factor) = s.clone().cholesky() {
            return Some(Schur { matrix, factor });
        }
        reg *= 100.0;
    }
    None
}

/// Solves `prob`.
pub fn solve(prob: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = prob.dim;
    for (a, _) in &prob.constraints {
        if a.dim() != n {
            return Err(Error::Dimension(format!("constraint of size {} in a problem of size {}", a.dim(), n)));
        }
    }
    if prob.objective.dim() != n {
        return Err(Error::Dimension(format!("objective of size {} in a problem of size {}", prob.objective.dim(), n)));
    }
    let m_all = prob.constraints.len();
    let c = prob.objective.to_dense();

    let kept = match prune(prob, opts.feas_tol) {
        Pruned::Kept(k) => k,
        Pruned::Inconsistent(y) => {
            let z = -prob.adjoint(&y);
            return Ok(SdpSolution {
                status: SdpStatus::Infeasible,
                x: DMatrix::zeros(n, n),
                y: y.clone(),
                z: z.clone(),
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                gap: f64::NAN,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                iterations: 0,
                ray: Some(InfeasibilityRay::Primal { y, z }),
            });
        }
    };
    if kept.len() < m_all {
        debug!("sdp: pruned {} dependent constraints", m_all - kept.len());
    }
    let cons: Vec<Sparse> = kept.iter().map(|&i| Sparse::from_sym(&prob.constraints[i].0)).collect();
    let b = DVector::from_iterator(kept.len(), kept.iter().map(|&i| prob.constraints[i].1));
    let m = cons.len();
    let op = |w: &DMatrix<f64>| DVector::from_iterator(m, cons.iter().map(|a| a.inner(w)));

    // Start from multiples of the identity sized to the data, which keeps
    // the initial infeasibility small relative to μ.
    let nf = n as f64;
    let norms: Vec<f64> = cons.iter().map(|a| a.entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt()).collect();
    let xi_x = (0..m).map(|i| nf * (1.0 + b[i].abs()) / (1.0 + norms[i])).fold(10f64.max(nf.sqrt()), f64::max);
    let xi_z = norms.iter().cloned().fold(c.norm(), f64::max).max(10f64.max(nf.sqrt()));
    let mut it = Iterate {
        x: DMatrix::identity(n, n) * xi_x,
        y: DVector::zeros(m),
        z: DMatrix::identity(n, n) * xi_z,
        tau: 1.0,
        kappa: 1.0,
    };

    let expand_y = |y: &DVector<f64>| {
        let mut full = vec![0.0; m_all];
        for (k, &i) in kept.iter().enumerate() {
            full[i] = y[k];
        }
        full
    };

    let finish = |it: &Iterate, status: SdpStatus, iterations: usize, ray: Option<InfeasibilityRay>| {
        let x = &it.x / it.tau;
        let y = &it.y / it.tau;
        let z = &it.z / it.tau;
        let yfull = expand_y(&y);
        let primal_residual = prob.primal_residual(&x).iter().map(|r| r.abs()).fold(0.0, f64::max);
        let dual_residual = (prob.adjoint(&yfull) + &z - &c).amax();
        let primal_objective = dot_m(&c, &x);
        let dual_objective = b.dot(&y);
        SdpSolution {
            status,
            x,
            y: yfull,
            z,
            primal_objective,
            dual_objective,
            gap: relative_gap(primal_objective, dual_objective),
            primal_residual,
            dual_residual,
            iterations,
            ray,
        }
    };

    let mut stalls = 0;
    for iter in 0..opts.max_iter {
        let ax = op(&it.x);
        let aty = adjoint(&cons, &it.y, n);
        let res = Residuals {
            rp: &b * it.tau - &ax,
            rd: &c * it.tau - &aty - &it.z,
            rg: it.kappa + dot_m(&c, &it.x) - b.dot(&it.y),
        };
        let cx = dot_m(&c, &it.x);
        let by = b.dot(&it.y);
        let mu = (dot_m(&it.x, &it.z) + it.tau * it.kappa) / (n as f64 + 1.0);
        if !mu.is_finite() || !it.tau.is_finite() || it.x.iter().any(|v| !v.is_finite()) {
            return Ok(finish(&it, SdpStatus::NumericalLimit, iter, None));
        }

        let pres = (&ax / it.tau - &b).amax();
        let dres = res.rd.amax() / it.tau;
        let gap = relative_gap(cx / it.tau, by / it.tau);
        debug!(
            "sdp {iter}: tau={:.3e} kappa={:.3e} mu={:.3e} pres={:.3e} dres={:.3e} gap={:.3e}",
            it.tau, it.kappa, mu, pres, dres, gap
        );
        if pres <= opts.feas_tol && dres <= opts.feas_tol && gap <= opts.gap_tol {
            return Ok(finish(&it, SdpStatus::Optimal, iter, None));
        }
        if by > 0.0 {
            let yr = &it.y / by;
            let s = -adjoint(&cons, &yr, n);
            if min_eigenvalue(&s) >= -opts.feas_tol {
                let y = expand_y(&yr);
                let z = -prob.adjoint(&y);
                return Ok(finish(&it, SdpStatus::Infeasible, iter, Some(InfeasibilityRay::Primal { y, z })));
            }
        }
        if cx < 0.0 {
            let xr = &it.x / (-cx);
            if op(&xr).amax() <= opts.feas_tol {
                return Ok(finish(&it, SdpStatus::Infeasible, iter, Some(InfeasibilityRay::Dual { x: xr })));
            }
        }

        let zinv = match it.z.clone().cholesky() {
            Some(ch) => symmetrize(&ch.inverse()),
            None => return Ok(finish(&it, SdpStatus::NumericalLimit, iter, None)),
        };
        let schur = match factor_schur(schur_complement(&cons, &it.x, &zinv)) {
            Some(s) => s,
            None => return Ok(finish(&it, SdpStatus::NumericalLimit, iter, None)),
        };
        let u = op(&(&it.x * &c * &zinv));
        let q = schur.solve(&(&u + &b));
        let r = &c - adjoint(&cons, &q, n);
        let lin = Linearization { cons: &cons, b: &b, x: &it.x, zinv, schur, q, r };

        // Predictor.
        let rc_aff = -&it.x;
        let aff = lin.direction(&it, &res, 1.0, &rc_aff, -it.tau * it.kappa);
        let alpha_aff = match step_length(&it, &aff) {
            Some(a) => a.min(1.0),
            None => return Ok(finish(&it, SdpStatus::NumericalLimit, iter, None)),
        };
        let mu_aff = (dot_m(&(&it.x + &aff.dx * alpha_aff), &(&it.z + &aff.dz * alpha_aff))
            + (it.tau + alpha_aff * aff.dtau) * (it.kappa + alpha_aff * aff.dkappa))
            / (n as f64 + 1.0);
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rc = &lin.zinv * (sigma * mu) - &it.x - symmetrize(&(&aff.dx * &aff.dz * &lin.zinv));
        let rk = sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa;
        let d = lin.direction(&it, &res, 1.0 - sigma, &rc, rk);
        let alpha = match step_length(&it, &d) {
            Some(a) => (0.95 * a).min(1.0),
            None => return Ok(finish(&it, SdpStatus::NumericalLimit, iter, None)),
        };
        debug!(
            "sdp step: alpha_aff={alpha_aff:.3e} sigma={sigma:.3e} alpha={alpha:.3e} dtau={:.3e} dkappa={:.3e}",
            d.dtau, d.dkappa
        );
        if alpha < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                return Ok(finish(&it, SdpStatus::NumericalLimit, iter, None));
            }
        } else {
            stalls = 0;
        }
        it.x = symmetrize(&(&it.x + &d.dx * alpha));
        it.y += &d.dy * alpha;
        it.z = symmetrize(&(&it.z + &d.dz * alpha));
        it.tau += alpha * d.dtau;
        it.kappa += alpha * d.dkappa;
        // The embedding is scale invariant; keep the iterate bounded.
        let scale = it.x.amax().max(it.z.amax()).max(it.tau).max(it.kappa);
        if scale > 1e8 {
            it.x /= scale;
            it.y /= scale;
            it.z /= scale;
            it.tau /= scale;
            it.kappa /= scale;
        }
    }
    Ok(finish(&it, SdpStatus::NumericalLimit, opts.max_iter, None))
}
