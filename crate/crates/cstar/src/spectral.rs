//! Spectra, joint spectra, and functional calculus.
//!
//! Single-element spectra come from the general eigensolver, so non-normal
//! elements are fine. Joint spectra of commuting normal families are read
//! off a simultaneous diagonalization and can be cross-checked against an
//! independent route: a tuple lies in the joint spectrum exactly when the
//! two-sided ideal generated by the shifted elements is proper, and
//! [`ideal_dimension`] measures that by span closure.

use crate::algebra::{Algebra, AlgebraError, Element, SpanBasis, SpanOutcome};
use crate::mat::{self, CMatrix, MatError};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("element is not self-adjoint: |x - x*| = {deviation:.3e}")]
    NotSelfAdjoint { deviation: f64 },
    #[error("element is not positive: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },
    #[error("element is not invertible: min eigenvalue {min_eig:.3e}")]
    NotInvertible { min_eig: f64 },
    #[error("function undefined at joint-spectrum point {point:?}")]
    FunctionUndefinedOnSpectrum { point: Vec<Complex64> },
    #[error("polynomial arity {got} does not match the family size {want}")]
    ArityMismatch { got: usize, want: usize },
}

fn lex_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
}

/// Deduplicates within radius `r`, keeping lexicographic order.
fn dedup_points(mut pts: Vec<Complex64>, r: f64) -> Vec<Complex64> {
    pts.sort_by(lex_cmp);
    let mut out: Vec<Complex64> = Vec::new();
    for p in pts {
        if out.iter().all(|q| (p - q).norm() > r) {
            out.push(p);
        }
    }
    out
}

/// Eigenvalues of the element, deduplicated at `100 * eps` and sorted by
/// real then imaginary part.
pub fn spectrum(a: &Algebra, x: &Element) -> Result<Vec<Complex64>, SpectralError> {
    let tol = a.tol();
    let eigs = mat::general_eigenvalues(&x.matrix, tol)?;
    Ok(dedup_points(eigs, 100.0 * tol.eps))
}

/// The norms |x^n|^(1/n) for n = 1..=n_max, their minimum, and the largest
/// eigenvalue modulus. For normal x the sequence is constant at the spectral
/// radius; for self-adjoint x so is the n = 2^k subsequence.
#[derive(Debug, Clone)]
pub struct RadiusReport {
    pub norms: Vec<f64>,
    pub limit_candidate: f64,
    pub max_abs_eig: f64,
}

pub fn spectral_radius_sequence(
    a: &Algebra,
    x: &Element,
    n_max: usize,
) -> Result<RadiusReport, SpectralError> {
    assert!(n_max >= 1);
    let tol = a.tol();
    let mut norms = Vec::with_capacity(n_max);
    let mut power = x.matrix.clone();
    for n in 1..=n_max {
        let nrm = mat::operator_norm(&power, tol)?;
        norms.push(nrm.powf(1.0 / n as f64));
        if n < n_max {
            power = power.mul(&x.matrix);
        }
    }
    let limit_candidate = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let eigs = mat::general_eigenvalues(&x.matrix, tol)?;
    let max_abs_eig = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(RadiusReport { norms, limit_candidate, max_abs_eig })
}

/// Joint diagonalization data for a commuting normal family.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    /// Unitary whose columns are joint eigenvectors.
    pub unitary: CMatrix,
    /// Co-located diagonal tuples, one per ambient index, snapped to their
    /// deduplicated representative.
    pub tuples_by_index: Vec<Vec<Complex64>>,
    /// Deduplicated joint-spectrum points, sorted lexicographically.
    pub points: Vec<Vec<Complex64>>,
}

fn tuple_lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let c = lex_cmp(x, y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

fn tuple_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Joint spectrum of a commuting normal family, read off the co-located
/// diagonals of a simultaneous diagonalization.
pub fn joint_spectrum(
    a: &Algebra,
    xs: &[Element],
    seed: u64,
) -> Result<JointSpectrum, SpectralError> {
    assert!(!xs.is_empty(), "empty family");
    let tol = a.tol();
    let mats: Vec<CMatrix> = xs.iter().map(|x| x.matrix.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = mat::simultaneous_diag(&mats, tol, &mut rng)?;
    let d = u.rows();
    let diags: Vec<Vec<Complex64>> = mats
        .iter()
        .map(|m| {
            let c = m.compress(&u);
            (0..d).map(|i| c[(i, i)]).collect()
        })
        .collect();
    let raw: Vec<Vec<Complex64>> = (0..d)
        .map(|i| diags.iter().map(|dg| dg[i]).collect())
        .collect();

    let radius = 100.0 * tol.eps;
    let mut points: Vec<Vec<Complex64>> = Vec::new();
    let mut assignment: Vec<usize> = Vec::with_capacity(d);
    for t in &raw {
        match points.iter().position(|p| tuple_dist(p, t) <= radius) {
            Some(k) => assignment.push(k),
            None => {
                points.push(t.clone());
                assignment.push(points.len() - 1);
            }
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| tuple_lex_cmp(&points[i], &points[j]));
    let rankof: Vec<usize> = {
        let mut r = vec![0; points.len()];
        for (new_idx, &old) in order.iter().enumerate() {
            r[old] = new_idx;
        }
        r
    };
    let sorted_points: Vec<Vec<Complex64>> = order.iter().map(|&i| points[i].clone()).collect();
    let tuples_by_index: Vec<Vec<Complex64>> = assignment
        .iter()
        .map(|&k| sorted_points[rankof[k]].clone())
        .collect();

    Ok(JointSpectrum { unitary: u, tuples_by_index, points: sorted_points })
}

/// Ideal-route membership test for the joint spectrum.
///
/// The proper-ideal characterization lives in the algebra the tuple itself
/// generates: a tuple is in the joint spectrum exactly when the shifted
/// elements x_j - lambda_j 1 generate a proper two-sided ideal of
/// C*(x_1, ..., x_n, 1). The oracle builds that algebra once and measures
/// ideal dimensions by span closure of b (x_j - lambda_j 1) b' over basis
/// pairs. It never touches the joint diagonalization, so it stays an
/// independent cross-check.
#[derive(Debug)]
pub struct IdealOracle {
    sub: Algebra,
    mats: Vec<CMatrix>,
}

impl IdealOracle {
    pub fn new(a: &Algebra, xs: &[Element]) -> Result<Self, SpectralError> {
        assert!(!xs.is_empty());
        let mats: Vec<CMatrix> = xs.iter().map(|x| x.matrix.clone()).collect();
        let mut gens = mats.clone();
        gens.push(a.unit().clone());
        let sub = crate::algebra::generate(
            &crate::algebra::AlgebraPresentation {
                ambient_dim: a.ambient_dim(),
                generators: gens,
                unital: a.is_unital(),
            },
            a.tol(),
            0,
        )?;
        Ok(IdealOracle { sub, mats })
    }

    /// Dimension of C*(x_1, ..., x_n, 1).
    pub fn algebra_dim(&self) -> usize {
        self.sub.dim()
    }

    /// Dimension of the two-sided ideal generated by the shifted tuple.
    pub fn ideal_dimension(&self, lambda: &[Complex64]) -> Result<usize, SpectralError> {
        assert_eq!(self.mats.len(), lambda.len());
        let tol = self.sub.tol();
        let lo = tol.eps;
        let hi = 100.0 * tol.eps;
        let shifted: Vec<CMatrix> = self
            .mats
            .iter()
            .zip(lambda.iter())
            .map(|(x, l)| x.sub(&self.sub.unit().scale(*l)))
            .collect();
        let mut span = SpanBasis::new();
        for g in &shifted {
            for b in self.sub.basis() {
                for b2 in self.sub.basis() {
                    let cand = b.mul(g).mul(b2);
                    if let SpanOutcome::Ambiguous { residual } = span.offer(&cand, lo, hi) {
                        return Err(
                            AlgebraError::NumericalRankAmbiguity { residual, lo, hi }.into()
                        );
                    }
                }
            }
        }
        Ok(span.len())
    }

    pub fn contains(&self, lambda: &[Complex64]) -> Result<bool, SpectralError> {
        Ok(self.ideal_dimension(lambda)? < self.sub.dim())
    }
}

/// A *-polynomial in n commuting variables and their conjugates.
#[derive(Debug, Clone)]
pub struct StarPolynomial {
    pub n_vars: usize,
    /// (coefficient, powers of z_j, powers of conj(z_j)).
    pub terms: Vec<(Complex64, Vec<u32>, Vec<u32>)>,
}

impl StarPolynomial {
    pub fn new(n_vars: usize, terms: Vec<(Complex64, Vec<u32>, Vec<u32>)>) -> Self {
        for (_, p, q) in &terms {
            assert_eq!(p.len(), n_vars);
            assert_eq!(q.len(), n_vars);
        }
        StarPolynomial { n_vars, terms }
    }

    /// Single-variable polynomial with the given coefficients, constant first.
    pub fn in_one_var(coeffs: &[Complex64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (c, vec![k as u32], vec![0u32]))
            .collect();
        StarPolynomial { n_vars: 1, terms }
    }

    pub fn eval_points(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.n_vars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, p, q) in &self.terms {
            let mut t = *c;
            for (j, zj) in z.iter().enumerate() {
                t *= zj.powu(p[j]) * zj.conj().powu(q[j]);
            }
            acc += t;
        }
        acc
    }

    /// Evaluates on a commuting family, conjugates taken as adjoints.
    pub fn eval_matrices(&self, xs: &[CMatrix], unit: &CMatrix) -> CMatrix {
        assert_eq!(xs.len(), self.n_vars);
        let d = unit.rows();
        let mut acc = CMatrix::zeros(d, d);
        for (c, p, q) in &self.terms {
            let mut t = unit.scale(*c);
            for (j, xj) in xs.iter().enumerate() {
                t = t.mul(&xj.pow(p[j] as usize));
                t = t.mul(&xj.adjoint().pow(q[j] as usize));
            }
            acc = acc.add(&t);
        }
        acc
    }
}

/// Two-route spectral mapping data: the spectrum of f(x, x*) against the
/// image of the joint spectrum under f.
#[derive(Debug, Clone)]
pub struct SpectralMappingReport {
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub hausdorff: f64,
}

pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_sided = |from: &[Complex64], to: &[Complex64]| -> f64 {
        from.iter()
            .map(|p| to.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Compares sigma(f(x, x*)) computed from the evaluated matrix with
/// f applied to the joint spectrum. The two routes are independent: the left
/// side never sees the joint diagonalization.
pub fn spectral_mapping_check(
    a: &Algebra,
    xs: &[Element],
    f: &StarPolynomial,
    seed: u64,
) -> Result<SpectralMappingReport, SpectralError> {
    if f.n_vars != xs.len() {
        return Err(SpectralError::ArityMismatch { got: f.n_vars, want: xs.len() });
    }
    let tol = a.tol();
    let mats: Vec<CMatrix> = xs.iter().map(|x| x.matrix.clone()).collect();
    let evaluated = f.eval_matrices(&mats, &CMatrix::identity(a.ambient_dim()));
    let lhs = dedup_points(mat::general_eigenvalues(&evaluated, tol)?, 100.0 * tol.eps);
    let js = joint_spectrum(a, xs, seed)?;
    let rhs = dedup_points(
        js.points.iter().map(|p| f.eval_points(p)).collect(),
        100.0 * tol.eps,
    );
    let hd = hausdorff(&lhs, &rhs);
    Ok(SpectralMappingReport { lhs, rhs, hausdorff: hd })
}

/// Continuous functional calculus on a commuting normal family: applies `f`
/// to the deduplicated joint-spectrum points and reassembles through the
/// joint eigenbasis. Returns an element of the algebra.
pub fn functional_calculus(
    a: &Algebra,
    xs: &[Element],
    f: impl Fn(&[Complex64]) -> Option<Complex64>,
    seed: u64,
) -> Result<Element, SpectralError> {
    let js = joint_spectrum(a, xs, seed)?;
    let mut values: Vec<Complex64> = Vec::with_capacity(js.points.len());
    for p in &js.points {
        match f(p) {
            Some(v) if v.re.is_finite() && v.im.is_finite() => values.push(v),
            _ => return Err(SpectralError::FunctionUndefinedOnSpectrum { point: p.clone() }),
        }
    }
    let diag: Vec<Complex64> = js
        .tuples_by_index
        .iter()
        .map(|t| {
            let k = js.points.iter().position(|p| std::ptr::eq(p.as_slice(), t.as_slice()) || tuple_dist(p, t) == 0.0)
                .expect("tuple snapped to a point");
            values[k]
        })
        .collect();
    let m = js.unitary.mul(&CMatrix::diag_complex(&diag)).mul(&js.unitary.adjoint());
    Ok(a.element(m)?)
}

/// Positive and negative parts of a self-adjoint element, via the scalar
/// functions max(t, 0) and -min(t, 0).
pub fn pos_neg_parts(a: &Algebra, x: &Element) -> Result<(Element, Element), SpectralError> {
    let tol = a.tol();
    let dev = x.matrix.hermitian_deviation();
    if dev > 100.0 * tol.eps * x.matrix.frobenius().max(1.0) {
        return Err(SpectralError::NotSelfAdjoint { deviation: dev });
    }
    let eig = mat::hermitian_eig(&x.matrix.hermitian_part(), tol)?;
    let pos = eig.map(|t| t.max(0.0));
    let neg = eig.map(|t| (-t).max(0.0));
    Ok((a.element(pos)?, a.element(neg)?))
}

/// x^alpha for positive x. Exponents alpha <= 0 require the element to be
/// invertible (smallest eigenvalue above eps).
pub fn positive_power(a: &Algebra, x: &Element, alpha: f64) -> Result<Element, SpectralError> {
    let tol = a.tol();
    let dev = x.matrix.hermitian_deviation();
    if dev > 100.0 * tol.eps * x.matrix.frobenius().max(1.0) {
        return Err(SpectralError::NotSelfAdjoint { deviation: dev });
    }
    let eig = mat::hermitian_eig(&x.matrix.hermitian_part(), tol)?;
    let min_eig = eig.values.first().copied().unwrap_or(0.0);
    if min_eig < -tol.eps {
        return Err(SpectralError::NotPositive { min_eig });
    }
    if alpha <= 0.0 && min_eig <= tol.eps {
        return Err(SpectralError::NotInvertible { min_eig });
    }
    let m = eig.map(|t| if t <= 0.0 { 0.0 } else { t.powf(alpha) });
    Ok(a.element(m)?)
}
