//! Projections from dense operator data. A self-adjoint operator whose
//! spectrum avoids 1/2 rounds to a projection through the step function that
//! is 0 below 1/2 and 1 above; applied to the self-adjoint parts of an
//! operator sequence this produces a projection list that inherits density.
//! Joining the ranges of a rank-one projection sequence gives an increasing
//! flag whose increments are rank-one and mutually orthogonal, and an
//! eps-separated family indexed against a net by nearest-element lookup
//! yields an injective index map.

use num_complex::Complex64;
use thiserror::Error;

use crate::mat::{hermitian_eig, CMatrix, MatError, Tol};

#[derive(Debug, Error)]
pub enum ProjError {
    #[error(transparent)]
    Mat(#[from] MatError),
    /// An eigenvalue sits inside the guard band around 1/2, where the step
    /// function is discontinuous and rounding would be noise.
    #[error("eigenvalue {value:.6} lies within the guard band around 1/2")]
    SpectralGapViolation { value: f64 },
    #[error("input {index} is not a projection (defect {defect:.3e})")]
    NotProjection { index: usize, defect: f64 },
    #[error("input {index} has rank {rank}, expected rank one")]
    NotRankOne { index: usize, rank: usize },
    #[error("no net element within eps/2 of point {index} (closest distance {closest:.6e})")]
    NetTooCoarse { index: usize, closest: f64 },
    #[error("operator sequence must be nonempty")]
    EmptyList,
    #[error("eps is {eps}, expected a value in {expected}")]
    BadEps { eps: f64, expected: &'static str },
}

/// Finite stand-in for a dense operator sequence.
#[derive(Debug, Clone)]
pub struct OperatorSequence {
    items: Vec<CMatrix>,
}

impl OperatorSequence {
    pub fn new(items: Vec<CMatrix>) -> Result<Self, ProjError> {
        if items.is_empty() {
            return Err(ProjError::EmptyList);
        }
        Ok(OperatorSequence { items })
    }

    pub fn items(&self) -> &[CMatrix] {
        &self.items
    }
}

/// Width of the excluded band around 1/2, in units of the tolerance.
const GUARD: f64 = 10.0;

/// Rounds a self-adjoint matrix to the nearest projection through the step
/// function vanishing below 1/2.
///
/// Refuses when an eigenvalue falls within the guard band around 1/2: the
/// step function is only continuous on spectra avoiding 1/2, and inside the
/// band the rounding direction would be decided by noise.
pub fn nearest_projection(s: &CMatrix, tol: Tol) -> Result<CMatrix, ProjError> {
    let sym = s.hermitian_part();
    let eig = hermitian_eig(&sym, tol)?;
    let band = GUARD * tol.eps;
    for &v in &eig.values {
        if (v - 0.5).abs() <= band {
            return Err(ProjError::SpectralGapViolation { value: v });
        }
    }
    Ok(eig.map(|v| if v < 0.5 { 0.0 } else { 1.0 }))
}

/// Why an item of the sequence produced no projection.
#[derive(Debug, Clone)]
pub struct SkippedItem {
    pub index: usize,
    /// The offending eigenvalue of the self-adjoint part.
    pub eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct DenseProjections {
    /// (sequence index, rounded projection) for the items that passed the
    /// gap test.
    pub emitted: Vec<(usize, CMatrix)>,
    pub skipped: Vec<SkippedItem>,
}

/// Rounds the self-adjoint part of every sequence item that clears the gap
/// test. If some item is within eps of a projection P, its rounding is
/// within 2·eps of P, so density of the sequence gives density of the
/// output among projections.
pub fn dense_projections(
    seq: &OperatorSequence,
    eps: f64,
    tol: Tol,
) -> Result<DenseProjections, ProjError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(ProjError::BadEps { eps, expected: "(0, 1/2)" });
    }
    let mut emitted = Vec::new();
    let mut skipped = Vec::new();
    for (index, t) in seq.items().iter().enumerate() {
        let s = t.hermitian_part();
        match nearest_projection(&s, tol) {
            Ok(p) => emitted.push((index, p)),
            Err(ProjError::SpectralGapViolation { value }) => {
                skipped.push(SkippedItem { index, eigenvalue: value });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DenseProjections { emitted, skipped })
}

/// Flag of joined ranges of a rank-one projection sequence.
#[derive(Debug, Clone)]
pub struct FlagSequence {
    /// Q_n = projection onto the span of the first n ranges.
    pub flags: Vec<CMatrix>,
    /// First n (1-based) with Q_n equal to the final flag.
    pub stabilization: usize,
    /// The nonzero increments Q_n - Q_{n-1} (with Q_0 = 0), each of rank
    /// one and mutually orthogonal.
    pub differences: Vec<CMatrix>,
}

/// Joins the ranges of rank-one projections one at a time, tracking when the
/// flag stops growing. Range vectors are orthonormalized in input order, so
/// the output is deterministic.
pub fn flag_sequence(projections: &[CMatrix], tol: Tol) -> Result<FlagSequence, ProjError> {
    if projections.is_empty() {
        return Err(ProjError::EmptyList);
    }
    let d = projections[0].rows();
    let mut onb: Vec<Vec<Complex64>> = Vec::new();
    let mut flags = Vec::with_capacity(projections.len());
    let mut differences = Vec::new();
    let mut ranks = Vec::with_capacity(projections.len());
    let mut current = CMatrix::zeros(d, d);
    for (index, p) in projections.iter().enumerate() {
        let defect = p.mul(p).sub(p).max_abs().max(p.hermitian_deviation());
        if defect > GUARD * tol.eps {
            return Err(ProjError::NotProjection { index, defect });
        }
        let eig = hermitian_eig(&p.hermitian_part(), tol)?;
        let rank = eig.values.iter().filter(|&&v| v > 0.5).count();
        if rank != 1 {
            return Err(ProjError::NotRankOne { index, rank });
        }
        let mut u = eig.vectors.column(d - 1);
        for _ in 0..2 {
            for e in &onb {
                let o: Complex64 =
                    e.iter().zip(u.iter()).map(|(ei, ui)| ei.conj() * ui).sum();
                for (ui, ei) in u.iter_mut().zip(e.iter()) {
                    *ui -= o * ei;
                }
            }
        }
        let rn = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if rn > 1e-7 {
            for z in u.iter_mut() {
                *z /= rn;
            }
            let inc = CMatrix::from_fn(d, d, |i, j| u[i] * u[j].conj());
            current = current.add(&inc);
            differences.push(inc);
            onb.push(u);
        }
        flags.push(current.clone());
        ranks.push(onb.len());
    }
    let final_rank = *ranks.last().unwrap();
    let stabilization = ranks.iter().position(|&r| r == final_rank).unwrap() + 1;
    Ok(FlagSequence { flags, stabilization, differences })
}

/// For every point, the least index of a net element within eps/2. On an
/// eps-separated family the resulting map is injective: two points sharing
/// an index would be within eps of each other.
pub fn epsilon_discrete_index<T>(
    points: &[T],
    net: &[T],
    eps: f64,
    dist: impl Fn(&T, &T) -> f64,
) -> Result<Vec<usize>, ProjError> {
    if !(eps > 0.0) {
        return Err(ProjError::BadEps { eps, expected: "(0, inf)" });
    }
    let mut out = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let mut closest = f64::INFINITY;
        let mut found = None;
        for (n, y) in net.iter().enumerate() {
            let dv = dist(p, y);
            if dv < eps / 2.0 {
                found = Some(n);
                break;
            }
            closest = closest.min(dv);
        }
        match found {
            Some(n) => out.push(n),
            None => return Err(ProjError::NetTooCoarse { index, closest }),
        }
    }
    Ok(out)
}
