//! GNS construction: a state phi turns the algebra into a pre-Hilbert space
//! through the pairing <a, b> = phi(b* a). Quotienting by the null space
//! N_phi = { a : phi(a* a) = 0 } leaves a genuine Hilbert space on which the
//! algebra acts by left multiplication, with the class of the unit as a
//! cyclic vector. For a faithful state the action is isometric.

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError};
use crate::mat::{c, operator_norm, CMatrix, MatError};
use crate::states::{State, StateError};

#[derive(Debug, Error)]
pub enum GnsError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    State(#[from] StateError),
    /// A quotient basis candidate had squared length between the drop and
    /// keep thresholds, so the rank of the Gram matrix is not decidable at
    /// the working tolerance.
    #[error("rank decision ambiguous: candidate {index} has squared length {value:.3e}")]
    AmbiguousRank { index: usize, value: f64 },
    #[error("no states given")]
    EmptyList,
}

/// Hilbert-space data of the construction: representation matrices for the
/// algebra basis, the class of the unit, and the quotient basis written back
/// as ambient matrices.
#[derive(Debug, Clone)]
pub struct GnsRep {
    pub hilbert_dim: usize,
    /// Dimension of the null space N_phi.
    pub null_dim: usize,
    /// One hilbert_dim x hilbert_dim matrix per algebra basis element, in
    /// basis order.
    pub rep_basis: Vec<CMatrix>,
    /// Coordinates of the class of the unit; a unit vector.
    pub xi: Vec<Complex64>,
    /// Orthonormal basis of the quotient, as representatives in the algebra.
    pub quotient_basis: Vec<CMatrix>,
}

impl GnsRep {
    /// Representation matrix of an arbitrary algebra member, by linearity
    /// over the stored basis matrices.
    pub fn rep(&self, a: &Algebra, x: &CMatrix) -> Result<CMatrix, GnsError> {
        let el = a.element(x.clone())?;
        let h = self.hilbert_dim;
        let mut out = CMatrix::zeros(h, h);
        for (ct, m) in el.coords.iter().zip(self.rep_basis.iter()) {
            out = out.add(&m.scale(*ct));
        }
        Ok(out)
    }

    /// <xi, m xi> for a matrix acting on the representation space.
    pub fn vector_value(&self, m: &CMatrix) -> Complex64 {
        let h = self.hilbert_dim;
        let mut acc = c(0.0, 0.0);
        for i in 0..h {
            for j in 0..h {
                acc += self.xi[i].conj() * m[(i, j)] * self.xi[j];
            }
        }
        acc
    }
}

/// GNS representation of a state.
///
/// The Gram matrix of the algebra basis under the state pairing is factored
/// by a deterministic Gram-Schmidt pass in basis order; candidates whose
/// squared length stays below the tolerance are null directions and are
/// dropped, and a candidate inside the band between the tolerance and 100x
/// the tolerance aborts with AmbiguousRank, since a rank decision there
/// would be noise. Left multiplication then acts on the surviving
/// orthonormal classes.
pub fn gns(a: &Algebra, phi: &State) -> Result<GnsRep, GnsError> {
    let m = a.dim();
    let basis = a.basis();
    let rho_adj = phi.functional().rho.adjoint();

    // gram[(i, j)] = phi(b_j* b_i) = <b_i, b_j>, assembled row-block-wise:
    // phi(b_j* w) = tr((b_j rho*)* w).
    let frames: Vec<CMatrix> = basis.iter().map(|b| b.mul(&rho_adj)).collect();
    let mut gram = CMatrix::zeros(m, m);
    for (i, b) in basis.iter().enumerate() {
        for (j, f) in frames.iter().enumerate() {
            gram[(i, j)] = f.inner(b);
        }
    }
    let pair = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                acc += u[i] * v[j].conj() * gram[(i, j)];
            }
        }
        acc
    };

    let eps = a.tol().eps;
    let mut kept: Vec<Vec<Complex64>> = Vec::new();
    for t in 0..m {
        let mut v = vec![c(0.0, 0.0); m];
        v[t] = c(1.0, 0.0);
        for _ in 0..2 {
            for e in &kept {
                let o = pair(&v, e);
                for (vi, ei) in v.iter_mut().zip(e.iter()) {
                    *vi -= o * ei;
                }
            }
        }
        let nsq = pair(&v, &v).re;
        if nsq <= eps {
            continue;
        }
        if nsq < 100.0 * eps {
            return Err(GnsError::AmbiguousRank { index: t, value: nsq });
        }
        let scale = 1.0 / nsq.sqrt();
        for vi in v.iter_mut() {
            *vi *= scale;
        }
        kept.push(v);
    }
    let h = kept.len();
    let null_dim = m - h;

    let quotient_basis: Vec<CMatrix> = kept
        .iter()
        .map(|v| {
            let mut e = CMatrix::zeros(a.ambient_dim(), a.ambient_dim());
            for (ct, b) in v.iter().zip(basis.iter()) {
                e = e.add(&b.scale(*ct));
            }
            e
        })
        .collect();

    // rep(x)[(i, j)] = <x e_j, e_i> = phi(e_i* x e_j) = tr((e_i rho*)* x e_j).
    let keys: Vec<CMatrix> = quotient_basis.iter().map(|e| e.mul(&rho_adj)).collect();
    let mut rep_basis = Vec::with_capacity(m);
    for b in basis {
        let mut mtx = CMatrix::zeros(h, h);
        for (j, e) in quotient_basis.iter().enumerate() {
            let w = b.mul(e);
            for (i, k) in keys.iter().enumerate() {
                mtx[(i, j)] = k.inner(&w);
            }
        }
        rep_basis.push(mtx);
    }

    // xi_i = <1, e_i> = phi(e_i*).
    let xi: Vec<Complex64> = quotient_basis.iter().map(|e| phi.value(&e.adjoint())).collect();

    Ok(GnsRep { hilbert_dim: h, null_dim, rep_basis, xi, quotient_basis })
}

/// Block-diagonal sum of the GNS representations of the given states. The
/// summed vector is the normalized concatenation of the cyclic vectors, so
/// its matrix coefficients average the states.
pub fn direct_sum_rep(a: &Algebra, states: &[State]) -> Result<GnsRep, GnsError> {
    if states.is_empty() {
        return Err(GnsError::EmptyList);
    }
    let parts: Vec<GnsRep> = states.iter().map(|s| gns(a, s)).collect::<Result<_, _>>()?;
    let h: usize = parts.iter().map(|p| p.hilbert_dim).sum();
    let null_dim: usize = parts.iter().map(|p| p.null_dim).sum();
    let mut rep_basis = Vec::with_capacity(a.dim());
    for t in 0..a.dim() {
        let mut mtx = CMatrix::zeros(h, h);
        let mut off = 0;
        for p in &parts {
            let hp = p.hilbert_dim;
            for i in 0..hp {
                for j in 0..hp {
                    mtx[(off + i, off + j)] = p.rep_basis[t][(i, j)];
                }
            }
            off += hp;
        }
        rep_basis.push(mtx);
    }
    let scale = 1.0 / (parts.len() as f64).sqrt();
    let mut xi = Vec::with_capacity(h);
    let mut quotient_basis = Vec::with_capacity(h);
    for p in parts {
        xi.extend(p.xi.into_iter().map(|z| z * scale));
        quotient_basis.extend(p.quotient_basis);
    }
    Ok(GnsRep { hilbert_dim: h, null_dim, rep_basis, xi, quotient_basis })
}

/// One test element's worth of evidence that a family of states sees the
/// norm.
#[derive(Debug, Clone)]
pub struct RepresentabilityEntry {
    pub norm_squared: f64,
    /// sup over the states of phi(x* x).
    pub sup_value: f64,
    /// norm_squared - sup_value; nonpositive means the norm is attained.
    pub deficit: f64,
}

#[derive(Debug, Clone)]
pub struct Representability {
    pub entries: Vec<RepresentabilityEntry>,
    pub passes: bool,
}

/// Checks, element by element, whether the states determine the norm on the
/// test set: every deficit must stay within 1e-6 of scale. A family passing
/// this check on a spanning set acts isometrically in the direct sum.
pub fn representability_certificate(
    a: &Algebra,
    states: &[State],
    test_set: &[CMatrix],
) -> Result<Representability, GnsError> {
    let mut entries = Vec::with_capacity(test_set.len());
    let mut passes = true;
    for x in test_set {
        a.element(x.clone())?;
        let xx = x.adjoint_mul(x);
        let norm_squared = operator_norm(x, a.tol())?.powi(2);
        let sup_value = states
            .iter()
            .map(|s| s.value(&xx).re)
            .fold(0.0_f64, f64::max);
        let deficit = norm_squared - sup_value;
        if deficit > 1e-6 * norm_squared {
            passes = false;
        }
        entries.push(RepresentabilityEntry { norm_squared, sup_value, deficit });
    }
    Ok(Representability { entries, passes })
}
