//! Functionals and states on a matrix algebra.
//!
//! A functional is carried by a matrix `rho` through the trace pairing
//! phi(a) = tr(rho a). Projecting rho* onto the algebra span gives a
//! canonical representative inside the algebra whose trace norm equals the
//! dual norm of phi exactly, block by block. On top of that live the
//! sequential Hahn-Banach extension (real-linear steps along a dense
//! sequence, with gamma pinned to the left endpoint of the admissible
//! interval), norm-attaining / faithful / tracial states, characters and the
//! Gelfand transform of commutative algebras, extreme-point analysis, and
//! separation of convex hulls.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};
use crate::mat::{c, hermitian_eig, operator_norm, trace_norm, CMatrix, MatError, Tol};
use crate::optim::{ellipsoid_linear_min, ellipsoid_min_convex, min_norm_point};

/// Default slack for state invariant checks. Extensions produced by the
/// optimization-backed routines are states only up to their optimization
/// tolerance, which is coarser than the matrix-level tolerance.
pub const STATE_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum StateError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("functional exceeds the norm bound {bound:.6e} (certificate excess {excess:.3e})")]
    NormBoundViolated { excess: f64, bound: f64 },
    /// The admissible interval for the next value collapsed. Analytically it
    /// is nonempty whenever the current functional respects the bound, so
    /// this signals numerical failure. If no norm-bounded extension was found
    /// at all, `alpha` reports the smallest achievable extension norm and
    /// `beta` the bound it exceeds.
    #[error("extension interval is empty: alpha {alpha:.6e} > beta {beta:.6e}")]
    IntervalEmpty { alpha: f64, beta: f64 },
    #[error("empty input list")]
    EmptyList,
    #[error("algebra is not commutative")]
    NotCommutative,
    #[error("algebra is not unital")]
    NotUnital,
    #[error("state check `{check}` failed by {defect:.3e}")]
    NotAState { check: &'static str, defect: f64 },
    #[error("sequence item {index} has operator norm {norm:.6} > 1")]
    SequenceItemTooLarge { index: usize, norm: f64 },
    #[error("convex hulls overlap within tolerance")]
    NotSeparable,
}

/// Linear functional phi(m) = tr(rho m) on the ambient matrix space.
#[derive(Debug, Clone)]
pub struct Functional {
    pub rho: CMatrix,
}

impl Functional {
    pub fn new(rho: CMatrix) -> Self {
        Functional { rho }
    }

    pub fn value(&self, m: &CMatrix) -> Complex64 {
        let d = self.rho.rows();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.rho[(i, j)] * m[(j, i)];
            }
        }
        acc
    }

    /// Unique representative inside the algebra with the same values on it.
    /// Orthogonal projection under the trace pairing; applied to rho*, so the
    /// result transposes back into trace-against form.
    pub fn canonical(&self, a: &Algebra) -> CMatrix {
        a.span().project(&self.rho.adjoint()).adjoint()
    }
}

/// A state: positive functional of norm one. `block_canonical` is the
/// canonical representative, which for a state is positive semidefinite with
/// trace one and block-diagonal along the Wedderburn decomposition.
#[derive(Debug, Clone)]
pub struct State {
    functional: Functional,
    block_canonical: CMatrix,
}

impl State {
    pub fn new(a: &Algebra, rho: CMatrix) -> Result<Self, StateError> {
        State::with_slack(a, rho, STATE_SLACK)
    }

    /// Builds a state, verifying unit value, hermiticity of the canonical
    /// representative, and positivity, each within `slack`.
    pub fn with_slack(a: &Algebra, rho: CMatrix, slack: f64) -> Result<Self, StateError> {
        let functional = Functional::new(rho);
        let can = functional.canonical(a);
        let scale = can.frobenius().max(1.0);
        let herm = can.hermitian_deviation();
        if herm > slack * scale {
            return Err(StateError::NotAState { check: "hermitian", defect: herm });
        }
        let can = can.add(&can.adjoint()).scale_re(0.5);
        let unit_val = functional.value(a.unit());
        let unit_defect = (unit_val - c(1.0, 0.0)).norm();
        if unit_defect > slack {
            return Err(StateError::NotAState { check: "unit value", defect: unit_defect });
        }
        let eig = hermitian_eig(&can, a.tol())?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -slack {
            return Err(StateError::NotAState { check: "positivity", defect: -min });
        }
        Ok(State { functional, block_canonical: can })
    }

    pub fn value(&self, m: &CMatrix) -> Complex64 {
        self.functional.value(m)
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn block_canonical(&self) -> &CMatrix {
        &self.block_canonical
    }
}

/// Vector state v* (.) v for a unit vector in the range of the algebra unit.
pub fn vector_state(a: &Algebra, v: &[Complex64]) -> Result<State, StateError> {
    let d = a.ambient_dim();
    assert_eq!(v.len(), d);
    let nn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let rho = CMatrix::from_fn(d, d, |i, j| v[j].conj() * v[i] / nn);
    State::with_slack(a, rho, STATE_SLACK)
}

/// Deterministic random state: random weights over the blocks, a random
/// density inside each.
pub fn random_state<R: Rng>(a: &Algebra, rng: &mut R) -> Result<State, StateError> {
    let d = a.ambient_dim();
    let mut weights: Vec<f64> = a.blocks().iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut rho = CMatrix::zeros(d, d);
    for (block, w) in a.blocks().iter().zip(weights.iter()) {
        let g = crate::mat::random::matrix(block.size, rng);
        let q = g.mul(&g.adjoint());
        let t = q.trace().re;
        let dens = q.scale_re(w / t);
        rho = rho.add(&block.embed(&dens).scale_re(1.0 / block.multiplicity as f64));
    }
    State::with_slack(a, rho, STATE_SLACK)
}

/// Finite stand-in for a dense sequence of the unit ball: an ordered list of
/// matrices of operator norm at most one.
#[derive(Debug, Clone)]
pub struct DenseSequence {
    items: Vec<CMatrix>,
}

impl DenseSequence {
    pub fn new(a: &Algebra, items: Vec<CMatrix>) -> Result<Self, StateError> {
        if items.is_empty() {
            return Err(StateError::EmptyList);
        }
        for (index, m) in items.iter().enumerate() {
            let norm = operator_norm(m, a.tol())?;
            if norm > 1.0 + a.tol().eps {
                return Err(StateError::SequenceItemTooLarge { index, norm });
            }
        }
        Ok(DenseSequence { items })
    }

    /// The algebra basis and its imaginary multiples, normalized. Enough to
    /// drive every extension to a functional on the whole algebra.
    pub fn from_algebra(a: &Algebra) -> Self {
        let mut items = Vec::with_capacity(2 * a.dim());
        for b in a.basis() {
            let n = operator_norm(b, a.tol()).unwrap_or(1.0).max(1.0);
            items.push(b.scale_re(1.0 / n));
        }
        for b in a.basis() {
            let n = operator_norm(b, a.tol()).unwrap_or(1.0).max(1.0);
            items.push(b.scale(c(0.0, 1.0 / n)));
        }
        DenseSequence { items }
    }

    pub fn items(&self) -> &[CMatrix] {
        &self.items
    }
}

/// Dual norm of the functional on the algebra: the trace norm of the
/// canonical representative. Exact, because the representative splits along
/// the blocks and the dual of the operator norm on a full block is the trace
/// norm.
pub fn functional_norm(a: &Algebra, phi: &Functional) -> Result<f64, StateError> {
    Ok(trace_norm(&phi.canonical(a), a.tol())?)
}

/// Sum_n 2^{-n} |phi(x_n) - psi(x_n)| over the sequence, n starting at 1.
pub fn state_metric(seq: &DenseSequence, phi: &Functional, psi: &Functional) -> f64 {
    let mut weight = 0.5;
    let mut acc = 0.0;
    for item in seq.items() {
        acc += weight * (phi.value(item) - psi.value(item)).norm();
        weight *= 0.5;
    }
    acc
}

/// The current domain of the extension, as a real vector space: a Frobenius
/// orthonormal basis of the constrained directions, the functional's values
/// on it, an orthonormal basis of the complement inside the algebra (the
/// directions a bounded extension is still free to choose), and the canonical
/// representative of the partial functional.
struct RealDomain {
    basis: Vec<CMatrix>,
    vals: Vec<f64>,
    free: Vec<CMatrix>,
    sigma: CMatrix,
}

impl RealDomain {
    /// Coordinates of the projection and the orthogonal residual, with one
    /// re-orthogonalization pass.
    fn project_residual(&self, w: &CMatrix) -> (Vec<f64>, CMatrix) {
        let mut coords = vec![0.0; self.basis.len()];
        let mut r = w.clone();
        for _ in 0..2 {
            for (t, e) in self.basis.iter().enumerate() {
                let ct = e.inner(&r).re;
                coords[t] += ct;
                r = r.sub(&e.scale_re(ct));
            }
        }
        (coords, r)
    }

    fn value(&self, coords: &[f64]) -> f64 {
        coords.iter().zip(self.vals.iter()).map(|(a, b)| a * b).sum()
    }

    /// Completes the constrained basis to an orthonormal basis of the whole
    /// algebra over the reals and assembles the canonical representative.
    fn complete(&mut self, a: &Algebra) {
        let d = self.sigma.rows();
        self.sigma = CMatrix::zeros(d, d);
        for (e, v) in self.basis.iter().zip(self.vals.iter()) {
            self.sigma = self.sigma.add(&e.scale_re(*v));
        }
        self.free.clear();
        for b in a.basis() {
            for w in [b.clone(), b.scale(c(0.0, 1.0))] {
                let mut v = w;
                for _ in 0..2 {
                    for e in self.basis.iter().chain(self.free.iter()) {
                        let o = e.inner(&v).re;
                        v = v.sub(&e.scale_re(o));
                    }
                }
                let n = v.frobenius();
                if n > 1e-8 {
                    self.free.push(v.scale_re(1.0 / n));
                }
            }
        }
    }

    /// Adds a constrained direction and removes it from the free complement.
    fn push(&mut self, r_hat: CMatrix, val: f64) {
        self.sigma = self.sigma.add(&r_hat.scale_re(val));
        let old = std::mem::take(&mut self.free);
        for w in old {
            let mut v = w;
            for _ in 0..2 {
                let o = r_hat.inner(&v).re;
                v = v.sub(&r_hat.scale_re(o));
                for k in &self.free {
                    let o = k.inner(&v).re;
                    v = v.sub(&k.scale_re(o));
                }
            }
            let n = v.frobenius();
            if n > 1e-8 {
                self.free.push(v.scale_re(1.0 / n));
            }
        }
        self.basis.push(r_hat);
        self.vals.push(val);
    }
}

/// Trace norm together with a subgradient at `m`: the polar factor U V* of
/// the singular value decomposition, restricted to the nonsingular part.
fn trace_norm_subgradient(m: &CMatrix, tol: Tol) -> Result<(f64, CMatrix), MatError> {
    let d = m.rows();
    let gram = m.adjoint_mul(m);
    let gram = gram.add(&gram.adjoint()).scale_re(0.5);
    let eig = hermitian_eig(&gram, tol)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let cut = 1e-12 * (1.0 + top);
    let mut tn = 0.0;
    let mut g = CMatrix::zeros(d, d);
    for j in 0..d {
        let s = eig.values[j].max(0.0).sqrt();
        tn += s;
        if s > cut {
            let v = eig.vectors.column(j);
            let mut u = vec![c(0.0, 0.0); d];
            for (i, ui) in u.iter_mut().enumerate() {
                let mut acc = c(0.0, 0.0);
                for (k, vk) in v.iter().enumerate() {
                    acc += m[(i, k)] * vk;
                }
                *ui = acc / s;
            }
            for i in 0..d {
                for k in 0..d {
                    g[(i, k)] += u[i] * v[k].conj();
                }
            }
        }
    }
    Ok((tn, g))
}

/// Iteration budget for an n-dimensional ellipsoid program. The volume-based
/// gap shrinks like exp(-k / (2n(n+1))); the factor covers the ratio between
/// the start radius and the slack ball left by the bound relaxation.
fn ellipsoid_budget(n: usize, factor: usize) -> usize {
    2 * n * (n + 1) * factor + 800
}

/// Total relative slack spent on relaxing the norm bound across all steps.
/// Each step gets a strictly larger bound than the one its witness satisfied,
/// so the admissible set always keeps a small interior ball and the
/// feasibility cuts cannot starve. The certified norm of the result stays
/// within this factor of the requested bound.
const BOUND_SLACK: f64 = 3e-8;

/// Extremal value of psi(x) over all extensions psi of the current partial
/// functional with trace norm at most `m_relaxed`. Extensions correspond to
/// representatives sigma = dom.sigma + sum xi_j f_j over the free complement,
/// with psi(x) = <sigma, x> linear in xi and the norm constraint convex, so
/// the ellipsoid method localizes the optimum at a guaranteed rate. Returns
/// None when no admissible point was found.
fn admissible_endpoint(
    dom: &RealDomain,
    x: &CMatrix,
    m_relaxed: f64,
    tol: Tol,
    minimize: bool,
    factor: usize,
    radius_bump: f64,
) -> Option<f64> {
    let n = dom.free.len();
    let d = x.rows();
    let sign = if minimize { 1.0 } else { -1.0 };
    let c0 = dom.sigma.inner(x).re;
    let cvec: Vec<f64> = dom.free.iter().map(|f| sign * f.inner(x).re).collect();
    let mut sig = CMatrix::zeros(d, d);
    let mut oracle = |xi: &[f64], sub: &mut [f64]| -> f64 {
        for i in 0..d {
            for j in 0..d {
                let mut acc = dom.sigma[(i, j)];
                for (t, fm) in xi.iter().zip(dom.free.iter()) {
                    acc += fm[(i, j)] * *t;
                }
                sig[(i, j)] = acc;
            }
        }
        let tn = match trace_norm(&sig, tol) {
            Ok(v) => v,
            Err(_) => return f64::INFINITY,
        };
        if tn > m_relaxed && !sub.is_empty() {
            if let Ok((_, g)) = trace_norm_subgradient(&sig, tol) {
                for (s, fm) in sub.iter_mut().zip(dom.free.iter()) {
                    *s = g.inner(fm).re;
                }
            }
        }
        tn - m_relaxed
    };
    // Any admissible sigma has Frobenius norm at most its trace norm, and
    // dom.sigma is the projection of one, so the coordinates live in a ball
    // of radius 2 m_relaxed. The bump enlarges the ball on retries; a fresh
    // radius also changes the whole cut trajectory.
    let radius = (2.5 + radius_bump) * m_relaxed + 1e-9;
    let res = ellipsoid_linear_min(n, &cvec, &mut oracle, radius, ellipsoid_budget(n, factor))?;
    Some(c0 + sign * res.value)
}

/// Smallest trace norm among all extensions of the current partial
/// functional. Used for the a-priori bound check and for infeasibility
/// reports; the projection dom.sigma itself is an extension, which bounds
/// the search radius.
fn min_extension_norm(dom: &RealDomain, tol: Tol) -> f64 {
    let n = dom.free.len();
    let d = dom.sigma.rows();
    let base = trace_norm(&dom.sigma, tol).unwrap_or(f64::INFINITY);
    if n == 0 || !base.is_finite() {
        return base;
    }
    let mut sig = CMatrix::zeros(d, d);
    let mut oracle = |xi: &[f64], sub: &mut [f64]| -> f64 {
        for i in 0..d {
            for j in 0..d {
                let mut acc = dom.sigma[(i, j)];
                for (t, fm) in xi.iter().zip(dom.free.iter()) {
                    acc += fm[(i, j)] * *t;
                }
                sig[(i, j)] = acc;
            }
        }
        match trace_norm_subgradient(&sig, tol) {
            Ok((tn, g)) => {
                for (s, fm) in sub.iter_mut().zip(dom.free.iter()) {
                    *s = g.inner(fm).re;
                }
                tn
            }
            Err(_) => f64::INFINITY,
        }
    };
    let radius = 2.5 * base + 1e-9;
    let (_, val) = ellipsoid_min_convex(n, &mut oracle, radius, ellipsoid_budget(n, 45));
    val.min(base)
}

/// One real-linear extension step of the sequential construction.
#[derive(Debug, Clone)]
pub struct ExtensionStep {
    /// Index into the dense sequence, or None for a basis completion step.
    pub item: Option<usize>,
    /// Chosen value gamma = alpha (left endpoint).
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Frobenius distance from the item to the previous domain.
    pub residual: f64,
}

/// Result of the sequential extension.
#[derive(Debug, Clone)]
pub struct Extension {
    pub functional: Functional,
    pub steps: Vec<ExtensionStep>,
    /// Sequence items skipped because they were already in the domain span.
    pub skipped: Vec<usize>,
    pub completion_steps: usize,
    /// Exact dual norm of the result on the algebra.
    pub certified_norm: f64,
    /// Largest deviation of the result from the prescribed subspace values.
    pub restriction_residual: f64,
}

enum StepOutcome {
    Skipped,
    Extended(ExtensionStep),
}

fn extend_one(
    dom: &mut RealDomain,
    m_relaxed: f64,
    x: &CMatrix,
    opt_tol: f64,
    tol: Tol,
) -> Result<StepOutcome, StateError> {
    let (coords, r) = dom.project_residual(x);
    let rn = r.frobenius();
    if rn <= 1e-9 * (1.0 + x.frobenius()) {
        return Ok(StepOutcome::Skipped);
    }
    // The left endpoint needs full accuracy; the right one only certifies
    // that the interval is nonempty, and any admissible value it finds
    // already lies above the true left endpoint.
    let mut alpha = admissible_endpoint(dom, x, m_relaxed, tol, true, 45, 0.0);
    let mut beta = admissible_endpoint(dom, x, m_relaxed, tol, false, 12, 0.0);
    // Near a tight bound the admissible set shrinks to a sliver that the
    // first budget can miss or localize too coarsely. Endpoints are values
    // at evaluated admissible points, so merging reruns only improves them.
    for (factor, bump) in [(150, 0.9), (420, 2.3)] {
        let settled = matches!((alpha, beta), (Some(a), Some(b)) if a <= b + opt_tol);
        if settled {
            break;
        }
        let a2 = admissible_endpoint(dom, x, m_relaxed, tol, true, factor, bump);
        let b2 = admissible_endpoint(dom, x, m_relaxed, tol, false, factor, bump);
        alpha = match (alpha, a2) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        beta = match (beta, b2) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
    let (Some(alpha), Some(beta)) = (alpha, beta) else {
        return Err(StateError::IntervalEmpty {
            alpha: min_extension_norm(dom, tol),
            beta: m_relaxed,
        });
    };
    if alpha > beta + opt_tol {
        return Err(StateError::IntervalEmpty { alpha, beta });
    }
    // The left endpoint estimate comes from an admissible witness, so taking
    // it as the new value keeps the extension inside the relaxed bound no
    // matter how tight the optimization got.
    let gamma = alpha;
    let predicted = dom.value(&coords);
    dom.push(r.scale_re(1.0 / rn), (gamma - predicted) / rn);
    Ok(StepOutcome::Extended(ExtensionStep { item: None, gamma, alpha, beta, residual: rn }))
}

/// Sequential Hahn-Banach extension.
///
/// The functional given by `phi_on_y` on the span of `subspace` is extended
/// to the whole algebra without exceeding the norm bound `m_bound`. Work
/// happens over the real scalars: the domain grows one real direction at a
/// time, first through the dense sequence, then through the algebra basis
/// (largest residual first) until the domain is everything. At each step the
/// chosen value is the left endpoint alpha of the admissible interval,
/// found by minimizing psi(x) over the norm-bounded extensions of the partial
/// functional; the right endpoint beta is computed the same way as a
/// certificate that the interval is nonempty. Items already in the span are
/// skipped and recorded. The complex functional is recovered from the real
/// one at the end, and its dual norm is certified exactly.
pub fn hahn_banach_extend(
    a: &Algebra,
    subspace: &[CMatrix],
    phi_on_y: &[Complex64],
    m_bound: f64,
    seq: &DenseSequence,
    opt_tol: f64,
) -> Result<Extension, StateError> {
    assert_eq!(subspace.len(), phi_on_y.len());
    let d = a.ambient_dim();
    let tol = a.tol();

    // Seed the real domain with y and iy for every prescribed element. On a
    // dependent combination the prescribed value must match the one already
    // forced by linearity; a mismatch means the functional has no finite
    // norm on Y.
    let mut dom = RealDomain {
        basis: Vec::new(),
        vals: Vec::new(),
        free: Vec::new(),
        sigma: CMatrix::zeros(d, d),
    };
    for (y, &val) in subspace.iter().zip(phi_on_y) {
        a.element(y.clone())?;
        for (w, target) in [(y.clone(), val.re), (y.scale(c(0.0, 1.0)), -val.im)] {
            let (coords, r) = dom.project_residual(&w);
            let rn = r.frobenius();
            let predicted = dom.value(&coords);
            if rn > 1e-8 * (1.0 + w.frobenius()) {
                dom.basis.push(r.scale_re(1.0 / rn));
                dom.vals.push((target - predicted) / rn);
            } else {
                let mismatch = (target - predicted).abs();
                if mismatch > 1e-7 * (1.0 + m_bound) {
                    return Err(StateError::NormBoundViolated {
                        excess: mismatch,
                        bound: m_bound,
                    });
                }
            }
        }
    }

    dom.complete(a);

    // Norm precondition: the smallest extension norm equals the norm of the
    // functional on Y, so a value clearly above the bound convicts.
    if !dom.basis.is_empty() {
        let least = min_extension_norm(&dom, tol);
        if least > m_bound * (1.0 + opt_tol.max(1e-7)) + 1e-12 {
            return Err(StateError::NormBoundViolated {
                excess: least - m_bound,
                bound: m_bound,
            });
        }
    }

    // Every extension step consumes one free direction, so the number of
    // remaining steps is known and the bound can grow by an equal share of
    // the slack each time. A step's program then always contains a small
    // ball around the witness of the previous step, even when that witness
    // sits exactly on the previous bound.
    let total = (2 * a.dim() - dom.basis.len()).max(1);
    let mut done = 0usize;
    let next_bound = |done: usize| {
        let frac = (done + 1) as f64 / total as f64;
        m_bound * (1.0 + BOUND_SLACK * frac) + 1e-13 * frac
    };

    let mut steps = Vec::new();
    let mut skipped = Vec::new();
    for (idx, x) in seq.items().iter().enumerate() {
        match extend_one(&mut dom, next_bound(done), x, opt_tol, tol)? {
            StepOutcome::Skipped => skipped.push(idx),
            StepOutcome::Extended(mut step) => {
                step.item = Some(idx);
                steps.push(step);
                done += 1;
            }
        }
    }

    // Completion: remaining directions of the algebra, largest residual
    // first so late steps keep the residual denominators as large as
    // possible.
    let mut candidates: Vec<CMatrix> = Vec::with_capacity(2 * a.dim());
    for b in a.basis() {
        candidates.push(b.clone());
        candidates.push(b.scale(c(0.0, 1.0)));
    }
    let mut completion_steps = 0usize;
    loop {
        let mut best = None;
        let mut best_rn = 0.0;
        for (i, w) in candidates.iter().enumerate() {
            let rn = dom.project_residual(w).1.frobenius();
            if rn > best_rn {
                best_rn = rn;
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        if best_rn <= 1e-9 * (1.0 + candidates[i].frobenius()) {
            break;
        }
        match extend_one(&mut dom, next_bound(done), &candidates[i].clone(), opt_tol, tol)? {
            StepOutcome::Skipped => break,
            StepOutcome::Extended(step) => {
                steps.push(step);
                completion_steps += 1;
                done += 1;
            }
        }
        candidates.swap_remove(i);
    }
    assert_eq!(dom.basis.len(), 2 * a.dim(), "domain must close over the whole algebra");
    assert!(dom.free.is_empty(), "free complement must be exhausted");

    // Recover the complex functional. The real functional is u(w) =
    // <sigma, w> with sigma in the algebra, and psi(b) = u(b) - i u(ib)
    // collapses to psi(b) = tr(sigma* b), so sigma* is the density.
    let functional = Functional::new(dom.sigma.adjoint());
    let mut restriction_residual = 0.0_f64;
    for (y, &val) in subspace.iter().zip(phi_on_y) {
        restriction_residual = restriction_residual.max((functional.value(y) - val).norm());
    }
    let certified_norm = functional_norm(a, &functional)?;
    Ok(Extension {
        functional,
        steps,
        skipped,
        completion_steps,
        certified_norm,
        restriction_residual,
    })
}

/// Both routes to a state with psi(x* x) = ||x||^2.
#[derive(Debug)]
pub struct NormAttainment {
    /// Top-eigenvector vector state of x* x.
    pub state: State,
    /// State produced by extending (1, x*x) |-> (1, ||x||^2) from its span.
    pub extension_state: State,
    pub vector_value: f64,
    pub extension_value: f64,
    pub norm_squared: f64,
    pub extension: Extension,
}

/// Builds a state attaining the norm of x, by the eigenvector route and by
/// the extension route, and cross-checks the two.
pub fn norm_attaining_state(a: &Algebra, x: &CMatrix) -> Result<NormAttainment, StateError> {
    if !a.is_unital() {
        return Err(StateError::NotUnital);
    }
    a.element(x.clone())?;
    let tol = a.tol();
    let xx = x.adjoint().mul(x);
    let norm_squared = operator_norm(x, tol)?.powi(2);

    // Eigenvector route. For x = 0 any state attains the value; take the top
    // eigenvector of the unit so the vector stays inside the algebra range.
    let target = if norm_squared > 100.0 * tol.eps { &xx } else { a.unit() };
    let eig = hermitian_eig(&target.add(&target.adjoint()).scale_re(0.5), tol)?;
    let v = eig.vectors.column(target.rows() - 1);
    let state = vector_state(a, &v)?;
    let vector_value = state.value(&xx).re;

    // Extension route: the functional (1, ||x||^2) on span{1, x*x} has norm
    // exactly one, attained at the unit.
    let seq = DenseSequence::from_algebra(a);
    let subspace = [a.unit().clone(), xx.clone()];
    let values = [c(1.0, 0.0), c(norm_squared, 0.0)];
    let extension = hahn_banach_extend(a, &subspace, &values, 1.0, &seq, 1e-6)?;
    let extension_value = extension.functional.value(&xx).re;
    // The prescribed data is *-real, so the hermitian part of the extension
    // is an extension of the same data with the same or smaller norm; it
    // keeps the attained value and clears the state checks.
    let rho = &extension.functional.rho;
    let extension_state = State::with_slack(a, rho.add(&rho.adjoint()).scale_re(0.5), 1e-4)?;

    Ok(NormAttainment {
        state,
        extension_state,
        vector_value,
        extension_value,
        norm_squared,
        extension,
    })
}

/// Abstract density matrices of the functional, one per block: entry (j, k)
/// is phi(e_kj). Positive semidefinite exactly when phi is positive, and
/// phi(x) = sum_i tr(rho_i x_i) over the block compressions.
pub(crate) fn block_densities(a: &Algebra, phi: &Functional) -> Vec<CMatrix> {
    let can = phi.canonical(a);
    a.blocks()
        .iter()
        .map(|b| b.compress(&can).scale_re(b.multiplicity as f64))
        .collect()
}

/// Weighted sum of the given states with geometric weights 2^{-n}, the last
/// weight doubled so the total is one.
#[derive(Debug)]
pub struct FaithfulState {
    pub state: State,
    pub weights: Vec<f64>,
    pub faithful: bool,
    /// Smallest eigenvalue across the abstract block densities.
    pub min_block_eigenvalue: f64,
}

pub fn faithful_state(a: &Algebra, states: &[State]) -> Result<FaithfulState, StateError> {
    if states.is_empty() {
        return Err(StateError::EmptyList);
    }
    let n = states.len();
    let mut weights: Vec<f64> = (1..=n).map(|k| 0.5_f64.powi(k as i32)).collect();
    weights[n - 1] *= 2.0;
    let d = a.ambient_dim();
    let mut rho = CMatrix::zeros(d, d);
    for (s, w) in states.iter().zip(weights.iter()) {
        rho = rho.add(&s.block_canonical().scale_re(*w));
    }
    let state = State::with_slack(a, rho, STATE_SLACK)?;
    let mut min_eig = f64::INFINITY;
    for dens in block_densities(a, state.functional()) {
        let dens = dens.add(&dens.adjoint()).scale_re(0.5);
        let eig = hermitian_eig(&dens, a.tol())?;
        min_eig = min_eig.min(eig.values.first().copied().unwrap_or(0.0));
    }
    let faithful = min_eig > a.tol().eps;
    Ok(FaithfulState { state, weights, faithful, min_block_eigenvalue: min_eig })
}

/// Characters of a commutative algebra: one per block, evaluation against
/// the normalized minimal central projection.
pub fn pure_states(a: &Algebra) -> Result<Vec<State>, StateError> {
    if !a.is_unital() {
        return Err(StateError::NotUnital);
    }
    if !a.is_commutative() {
        return Err(StateError::NotCommutative);
    }
    let mut chars = Vec::with_capacity(a.blocks().len());
    for b in a.blocks() {
        let t = b.projection.trace().re;
        let rho = b.projection.scale_re(1.0 / t);
        chars.push(State::with_slack(a, rho, 1e-7)?);
    }
    Ok(chars)
}

/// The Gelfand transform of a commutative unital algebra: the character
/// space and the evaluation table of the basis, with the defects of the
/// isomorphism properties measured.
#[derive(Debug)]
pub struct GelfandTransform {
    pub characters: Vec<State>,
    /// table[j][i] = chi_i(basis_j).
    pub table: Vec<Vec<Complex64>>,
    /// max over basis of | sup_i |chi_i(b)| - ||b|| |.
    pub isometry_defect: f64,
    pub mult_defect: f64,
    pub star_defect: f64,
}

pub fn gelfand_transform(a: &Algebra) -> Result<GelfandTransform, StateError> {
    let characters = pure_states(a)?;
    let tol = a.tol();
    let table: Vec<Vec<Complex64>> = a
        .basis()
        .iter()
        .map(|b| characters.iter().map(|ch| ch.value(b)).collect())
        .collect();
    let mut isometry_defect = 0.0_f64;
    for (b, row) in a.basis().iter().zip(table.iter()) {
        let sup = row.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        isometry_defect = isometry_defect.max((sup - operator_norm(b, tol)?).abs());
    }
    let mut mult_defect = 0.0_f64;
    let mut star_defect = 0.0_f64;
    for (j, bj) in a.basis().iter().enumerate() {
        for (i, ch) in characters.iter().enumerate() {
            star_defect = star_defect.max((ch.value(&bj.adjoint()) - table[j][i].conj()).norm());
            for (k, bk) in a.basis().iter().enumerate() {
                let prod = ch.value(&bj.mul(bk));
                mult_defect = mult_defect.max((prod - table[j][i] * table[k][i]).norm());
            }
        }
    }
    Ok(GelfandTransform { characters, table, isometry_defect, mult_defect, star_defect })
}

/// Spectral decomposition of a state into extreme states: per block, the
/// eigenvectors of the abstract density, weighted by its eigenvalues.
pub fn krein_milman_decompose(
    a: &Algebra,
    s: &State,
) -> Result<Vec<(f64, State)>, StateError> {
    let floor = a.tol().eps;
    let mut parts = Vec::new();
    for (block, dens) in a.blocks().iter().zip(block_densities(a, s.functional())) {
        let dens = dens.add(&dens.adjoint()).scale_re(0.5);
        let eig = hermitian_eig(&dens, a.tol())?;
        for p in (0..block.size).rev() {
            let w = eig.values[p];
            if w <= floor {
                continue;
            }
            let v = eig.vectors.column(p);
            let outer = CMatrix::from_fn(block.size, block.size, |i, j| v[i] * v[j].conj());
            let rho = block.embed(&outer).scale_re(1.0 / block.multiplicity as f64);
            parts.push((w, State::with_slack(a, rho, 1e-7)?));
        }
    }
    Ok(parts)
}

#[derive(Debug)]
pub struct ExtremeWitness {
    pub left: State,
    pub right: State,
    pub distance: f64,
}

#[derive(Debug)]
pub struct ExtremeCheck {
    pub extreme: bool,
    pub witness: Option<ExtremeWitness>,
}

/// A state is extreme exactly when its canonical representative is rank one
/// inside a single block. Otherwise two distinct states with the given one
/// as midpoint are produced from the top two spectral components.
pub fn is_extreme(a: &Algebra, s: &State) -> Result<ExtremeCheck, StateError> {
    let significant = 10.0 * a.tol().eps;
    let mut parts = krein_milman_decompose(a, s)?;
    parts.retain(|(w, _)| *w > significant);
    if parts.len() <= 1 {
        return Ok(ExtremeCheck { extreme: true, witness: None });
    }
    parts.sort_by(|x, y| y.0.total_cmp(&x.0));
    let delta = parts[1].0;
    let shift = parts[0]
        .1
        .block_canonical()
        .sub(parts[1].1.block_canonical())
        .scale_re(delta);
    let left = State::with_slack(a, s.block_canonical().add(&shift), STATE_SLACK)?;
    let right = State::with_slack(a, s.block_canonical().sub(&shift), STATE_SLACK)?;
    let seq = DenseSequence::from_algebra(a);
    let distance = state_metric(&seq, left.functional(), right.functional());
    Ok(ExtremeCheck { extreme: false, witness: Some(ExtremeWitness { left, right, distance }) })
}

/// The tracial states: one normalized block trace per block; the tracial
/// state set is their simplex. `trace_residual` is the worst deviation of
/// tau(xy) from tau(yx) over deterministic random pairs from the algebra.
#[derive(Debug)]
pub struct TracialStates {
    pub states: Vec<State>,
    pub trace_residual: f64,
}

pub fn tracial_state_set(a: &Algebra) -> Result<TracialStates, StateError> {
    if !a.is_unital() {
        return Err(StateError::NotUnital);
    }
    let mut states = Vec::with_capacity(a.blocks().len());
    for b in a.blocks() {
        let t = b.projection.trace().re;
        states.push(State::with_slack(a, b.projection.scale_re(1.0 / t), 1e-7)?);
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7ace_7ace);
    let mut trace_residual = 0.0_f64;
    for _ in 0..12 {
        let x = random_algebra_element(a, &mut rng);
        let y = random_algebra_element(a, &mut rng);
        let comm = x.mul(&y).sub(&y.mul(&x));
        for s in &states {
            trace_residual = trace_residual.max(s.value(&comm).norm());
        }
    }
    Ok(TracialStates { states, trace_residual })
}

/// Random element of the algebra with standard-normal-ish complex coords.
pub fn random_algebra_element<R: Rng>(a: &Algebra, rng: &mut R) -> CMatrix {
    let d = a.ambient_dim();
    let mut m = CMatrix::zeros(d, d);
    for b in a.basis() {
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        m = m.add(&b.scale(z));
    }
    m
}

/// Separating functional between two convex hulls in R^k.
#[derive(Debug)]
pub struct Separation {
    /// Unit normal phi with phi(x) < r <= phi(y) on the hulls.
    pub normal: Vec<f64>,
    pub threshold: f64,
    /// inf over B of phi minus sup over A of phi; at least the hull distance.
    pub margin: f64,
}

pub fn separating_functional(
    points_a: &[Vec<f64>],
    points_b: &[Vec<f64>],
    tol: f64,
) -> Result<Separation, StateError> {
    if points_a.is_empty() || points_b.is_empty() {
        return Err(StateError::EmptyList);
    }
    let k = points_a[0].len();
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(x, y)| x * y).sum() };
    let mut diffs = Vec::with_capacity(points_a.len() * points_b.len());
    for pa in points_a {
        assert_eq!(pa.len(), k);
        for pb in points_b {
            assert_eq!(pb.len(), k);
            diffs.push(pa.iter().zip(pb).map(|(x, y)| x - y).collect::<Vec<f64>>());
        }
    }
    let scale = diffs.iter().map(|p| dot(p, p).sqrt()).fold(1.0_f64, f64::max);
    let (w, _) = min_norm_point(&diffs, 1e-12);
    let dist = dot(&w, &w).sqrt();
    if dist <= tol * scale {
        return Err(StateError::NotSeparable);
    }
    let normal: Vec<f64> = w.iter().map(|v| -v / dist).collect();
    let sup_a = points_a.iter().map(|p| dot(&normal, p)).fold(f64::NEG_INFINITY, f64::max);
    let inf_b = points_b.iter().map(|p| dot(&normal, p)).fold(f64::INFINITY, f64::min);
    Ok(Separation {
        normal,
        threshold: 0.5 * (sup_a + inf_b),
        margin: inf_b - sup_a,
    })
}
