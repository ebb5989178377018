//! Dense complex matrices and the eigensolvers everything else is built on.
//!
//! Matrices are row-major `Vec<Complex64>` with dimensions capped at 64.
//! Hermitian eigenproblems are solved by cyclic Jacobi rotations with a
//! deterministic sweep order, general eigenvalues by Hessenberg reduction
//! followed by shifted QR. Randomness (the mixing coefficients used by
//! [`simultaneous_diag`]) always comes from a generator supplied by the
//! caller, so identical seeds give identical output.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Hard cap on matrix dimensions. Everything here is desk scale; the cap
/// keeps accidental quadratic blowups from hanging a session.
pub const DIM_CAP: usize = 64;

/// Numerical tolerance carried through every computation.
///
/// `eps` is the base scale: residual acceptance is typically `10 * eps`,
/// cluster and dedup decisions `100 * eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub eps: f64,
}

impl Tol {
    /// Requires `0 < eps < 1`.
    pub fn new(eps: f64) -> Result<Self, MatError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(MatError::BadTolerance { eps });
        }
        Ok(Tol { eps })
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol { eps: 1e-9 }
    }
}

#[derive(Debug, Error)]
pub enum MatError {
    #[error("tolerance eps must lie in (0, 1), got {eps}")]
    BadTolerance { eps: f64 },
    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("matrix is not Hermitian: |h - h*| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge: off-diagonal mass {off:.3e} after {sweeps} sweeps")]
    NoConvergence { off: f64, sweeps: usize },
    #[error("family members {i} and {j} do not commute: |[a_i, a_j]| = {deviation:.3e}")]
    NotCommuting { i: usize, j: usize, deviation: f64 },
    #[error("family member {index} is not normal: |a a* - a* a| = {deviation:.3e}")]
    NotNormal { index: usize, deviation: f64 },
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= DIM_CAP && cols <= DIM_CAP, "dimension above cap");
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from nested rows; panics when the rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = CMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = CMatrix::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn diag_complex(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        m
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a *= s;
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut m = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    /// a* b, the adjoint of `self` times `other`.
    pub fn adjoint_mul(&self, other: &CMatrix) -> CMatrix {
        self.adjoint().mul(other)
    }

    /// Frobenius norm, sqrt(trace(m* m)).
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Trace pairing <a, b> = trace(a* b).
    pub fn inner(&self, other: &CMatrix) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Hermitian part (m + m*)/2.
    pub fn hermitian_part(&self) -> CMatrix {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// Skew part mapped to a Hermitian matrix, (m - m*)/(2i).
    pub fn skew_part_hermitian(&self) -> CMatrix {
        self.sub(&self.adjoint()).scale(Complex64::new(0.0, -0.5))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius()
    }

    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(n_rows: usize, cols: &[Vec<Complex64>]) -> CMatrix {
        let mut m = CMatrix::zeros(n_rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n_rows, "column length mismatch");
            for i in 0..n_rows {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// v* m v for a frame v with orthonormal columns.
    pub fn compress(&self, frame: &CMatrix) -> CMatrix {
        frame.adjoint().mul(&self.mul(frame))
    }

    /// Matrix power by repeated multiplication; n = 0 gives the identity.
    pub fn pow(&self, n: usize) -> CMatrix {
        assert!(self.is_square());
        let mut acc = CMatrix::identity(self.rows);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Mass of the off-diagonal part in the Frobenius norm.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix: `h = vectors diag(values) vectors*`,
/// values ascending, columns phase-normalized so the largest entry is real positive.
#[derive(Debug, Clone)]
pub struct EigH {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigH {
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::diag(&self.values);
        self.vectors.mul(&d).mul(&self.vectors.adjoint())
    }

    /// Applies a real function to the eigenvalues and reassembles.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = CMatrix::diag(&self.values.iter().map(|&x| f(x)).collect::<Vec<_>>());
        self.vectors.mul(&d).mul(&self.vectors.adjoint())
    }
}

fn check_square_capped(m: &CMatrix) -> Result<usize, MatError> {
    assert!(m.is_square(), "expected a square matrix");
    if m.rows() > DIM_CAP {
        return Err(MatError::DimensionCap { dim: m.rows(), cap: DIM_CAP });
    }
    Ok(m.rows())
}

/// Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps run over pivots (p, q), p < q, in row-major order until the
/// off-diagonal mass is at machine scale. The sweep order is fixed, so the
/// output is a deterministic function of the input.
pub fn hermitian_eig(h: &CMatrix, tol: Tol) -> Result<EigH, MatError> {
    let n = check_square_capped(h)?;
    let scale = h.frobenius().max(1.0);
    let dev = h.hermitian_deviation();
    if dev > tol.eps * scale {
        return Err(MatError::NotHermitian { deviation: dev });
    }

    // Work on the exactly Hermitian average so roundoff in the input cannot
    // leak into the iteration.
    let mut a = h.add(&h.adjoint()).scale_re(0.5);
    let mut v = CMatrix::identity(n);

    let target = f64::EPSILON * scale * (n as f64);
    let max_sweeps = 64;
    let mut sweeps = 0;
    while a.off_diagonal_mass() > target && sweeps < max_sweeps {
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    let off = a.off_diagonal_mass();
    if off > 10.0 * tol.eps * scale {
        return Err(MatError::NoConvergence { off, sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let cols: Vec<Vec<Complex64>> = order.iter().map(|&j| v.column(j)).collect();
    let mut vectors = CMatrix::from_columns(n, &cols);
    normalize_column_phases(&mut vectors);
    Ok(EigH { values, vectors })
}

/// One Jacobi rotation zeroing the (p, q) entry of the Hermitian matrix `a`,
/// accumulating the unitary into `v`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let w = h.norm();
    if w == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase factor turning the 2x2 pivot block real symmetric, then a real
    // rotation with the smaller-angle root of t^2 + 2 tau t - 1 = 0.
    let ph = h / w;
    let tau = (aqq - app) / (2.0 * w);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cth = 1.0 / (1.0 + t * t).sqrt();
    let sth = t * cth;

    // u = diag(1, conj(ph)) . [[c, s], [-s, c]]
    let u11 = Complex64::new(cth, 0.0);
    let u12 = Complex64::new(sth, 0.0);
    let u21 = -ph.conj() * sth;
    let u22 = ph.conj() * cth;

    let n = a.rows();
    // a <- u* a (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u11.conj() * apk + u21.conj() * aqk;
        a[(q, k)] = u12.conj() * apk + u22.conj() * aqk;
    }
    // a <- a u (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u11 + akq * u21;
        a[(k, q)] = akp * u12 + akq * u22;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    let dpp = a[(p, p)].re;
    let dqq = a[(q, q)].re;
    a[(p, p)] = Complex64::new(dpp, 0.0);
    a[(q, q)] = Complex64::new(dqq, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u11 + vkq * u21;
        v[(k, q)] = vkp * u12 + vkq * u22;
    }
}

/// Multiplies each column by a unit phase so its largest-modulus entry is
/// real and positive. Pins down the output when eigenvalues are simple.
fn normalize_column_phases(m: &mut CMatrix) {
    for j in 0..m.cols() {
        let mut best = 0usize;
        let mut best_norm = -1.0;
        for i in 0..m.rows() {
            let nv = m[(i, j)].norm();
            if nv > best_norm + 1e-14 {
                best_norm = nv;
                best = i;
            }
        }
        if best_norm <= 0.0 {
            continue;
        }
        let ph = m[(best, j)] / m[(best, j)].norm();
        let corr = ph.conj();
        for i in 0..m.rows() {
            let v = m[(i, j)] * corr;
            m[(i, j)] = v;
        }
    }
}

/// Eigenvalues (ascending) of a 1x1, 2x2, or 3x3 Hermitian matrix in closed
/// form: mean-shift plus the quadratic formula, or Cardano's trigonometric
/// form of the characteristic cubic. Norm computations call this on every
/// line-search evaluation, where the Jacobi loop would dominate.
fn hermitian_eigvals_small(h: &CMatrix) -> Option<Vec<f64>> {
    match h.rows() {
        1 => Some(vec![h[(0, 0)].re]),
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let mid = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + h[(0, 1)].norm_sqr()).sqrt();
            Some(vec![mid - r, mid + r])
        }
        3 => {
            let q = (h[(0, 0)].re + h[(1, 1)].re + h[(2, 2)].re) / 3.0;
            let p2 = (h[(0, 0)].re - q).powi(2)
                + (h[(1, 1)].re - q).powi(2)
                + (h[(2, 2)].re - q).powi(2)
                + 2.0 * (h[(0, 1)].norm_sqr() + h[(0, 2)].norm_sqr() + h[(1, 2)].norm_sqr());
            if p2 <= 0.0 {
                return Some(vec![q, q, q]);
            }
            let p = (p2 / 6.0).sqrt();
            let b = |i: usize, j: usize| -> Complex64 {
                let shift = if i == j { c(q, 0.0) } else { Complex64::ZERO };
                (h[(i, j)] - shift) / p
            };
            let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
                - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
                + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
            let r = (det.re / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let hi = q + 2.0 * p * phi.cos();
            let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
            let mid = 3.0 * q - hi - lo;
            Some(vec![lo, mid, hi])
        }
        _ => None,
    }
}

fn singular_values_squared(m: &CMatrix, tol: Tol) -> Result<Vec<f64>, MatError> {
    if m.rows() > DIM_CAP || m.cols() > DIM_CAP {
        return Err(MatError::DimensionCap { dim: m.rows().max(m.cols()), cap: DIM_CAP });
    }
    let g = m.adjoint().mul(m);
    let g = g.add(&g.adjoint()).scale_re(0.5);
    if let Some(vals) = hermitian_eigvals_small(&g) {
        return Ok(vals);
    }
    Ok(hermitian_eig(&g, tol)?.values)
}

/// Largest singular value, computed as sqrt of the top eigenvalue of m* m.
pub fn operator_norm(m: &CMatrix, tol: Tol) -> Result<f64, MatError> {
    let vals = singular_values_squared(m, tol)?;
    let top = vals.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix, tol: Tol) -> Result<f64, MatError> {
    let vals = singular_values_squared(m, tol)?;
    Ok(vals.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// Unitary simultaneously diagonalizing a family of commuting normal matrices.
///
/// The family is split into Hermitian parts (a + a*)/2 and (a - a*)/(2i); a
/// random real mix of the parts is diagonalized, and eigenvalue clusters with
/// gap below `100 * tol.eps` are refined recursively with fresh coefficients.
/// The mixing coefficients come from `rng`, so the caller's seed fixes the
/// result.
pub fn simultaneous_diag<R: Rng>(
    family: &[CMatrix],
    tol: Tol,
    rng: &mut R,
) -> Result<CMatrix, MatError> {
    assert!(!family.is_empty(), "empty family");
    let n = check_square_capped(&family[0])?;
    for m in family {
        assert_eq!(m.rows(), n, "family members must share dimensions");
        assert!(m.is_square());
    }
    for (i, m) in family.iter().enumerate() {
        let dev = m.mul(&m.adjoint()).sub(&m.adjoint().mul(m)).frobenius();
        let scale = m.frobenius().powi(2).max(1.0);
        if dev > 1e3 * tol.eps * scale {
            return Err(MatError::NotNormal { index: i, deviation: dev });
        }
    }
    for i in 0..family.len() {
        for j in (i + 1)..family.len() {
            let dev = family[i].commutator(&family[j]).frobenius();
            let scale = (family[i].frobenius() * family[j].frobenius()).max(1.0);
            if dev > 1e3 * tol.eps * scale {
                return Err(MatError::NotCommuting { i, j, deviation: dev });
            }
        }
    }

    let mut parts: Vec<CMatrix> = Vec::new();
    for m in family {
        let re = m.hermitian_part();
        let im = m.skew_part_hermitian();
        if re.frobenius() > tol.eps {
            parts.push(re);
        }
        if im.frobenius() > tol.eps {
            parts.push(im);
        }
    }
    if parts.is_empty() {
        return Ok(CMatrix::identity(n));
    }

    let frame = CMatrix::identity(n);
    let depth_cap = 2 * parts.len() + 8;
    let u = refine_frame(&parts, frame, tol, rng, depth_cap)?;

    for (i, m) in family.iter().enumerate() {
        let compressed = m.compress(&u);
        let off = compressed.off_diagonal_mass();
        let scale = m.frobenius().max(1.0);
        if off > 10.0 * tol.eps * scale {
            return Err(MatError::NotNormal { index: i, deviation: off });
        }
    }
    Ok(u)
}

fn refine_frame<R: Rng>(
    parts: &[CMatrix],
    frame: CMatrix,
    tol: Tol,
    rng: &mut R,
    depth: usize,
) -> Result<CMatrix, MatError> {
    let k = frame.cols();
    if k <= 1 {
        return Ok(frame);
    }
    if depth == 0 {
        return Err(MatError::NoConvergence { off: f64::NAN, sweeps: 0 });
    }

    let compressed: Vec<CMatrix> = parts.iter().map(|p| p.compress(&frame)).collect();
    // All restrictions scalar: any orthonormal basis of this subspace works.
    if compressed.iter().all(|m| is_near_scalar(m, tol)) {
        return Ok(frame);
    }

    let mut mix = CMatrix::zeros(k, k);
    for m in &compressed {
        let coeff = rng.gen_range(-1.0..1.0);
        mix = mix.add(&m.scale_re(coeff));
    }
    let mix = mix.add(&mix.adjoint()).scale_re(0.5);
    let eig = hermitian_eig(&mix, tol)?;
    let rotated = frame.mul(&eig.vectors);

    let spread = (eig.values.last().unwrap() - eig.values[0]).max(1.0);
    let gap = 100.0 * tol.eps * spread;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && (eig.values[end] - eig.values[end - 1]).abs() < gap {
            end += 1;
        }
        if end - start == 1 {
            cols.push(rotated.column(start));
        } else {
            let sub = CMatrix::from_columns(
                rotated.rows(),
                &(start..end).map(|j| rotated.column(j)).collect::<Vec<_>>(),
            );
            let refined = refine_frame(parts, sub, tol, rng, depth - 1)?;
            for j in 0..refined.cols() {
                cols.push(refined.column(j));
            }
        }
        start = end;
    }
    Ok(CMatrix::from_columns(rotated.rows(), &cols))
}

fn is_near_scalar(m: &CMatrix, tol: Tol) -> bool {
    let k = m.rows();
    let mean = m.trace() / (k as f64);
    let dev = m.sub(&CMatrix::identity(k).scale(mean)).frobenius();
    dev <= 10.0 * tol.eps * m.frobenius().max(1.0)
}

/// Eigenvalues of a general square complex matrix, sorted by real part then
/// imaginary part. Hessenberg reduction followed by Wilkinson-shifted QR.
pub fn general_eigenvalues(m: &CMatrix, tol: Tol) -> Result<Vec<Complex64>, MatError> {
    let n = check_square_capped(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let scale = m.frobenius().max(1.0);
    let mut h = hessenberg(m);
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);

    let mut hi = n - 1;
    let mut iter_budget = 60 * n;
    loop {
        // Deflate converged subdiagonal entries.
        loop {
            if hi == 0 {
                eigs.push(h[(0, 0)]);
                break;
            }
            let sub = h[(hi, hi - 1)].norm();
            let local = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            if sub <= f64::EPSILON * local.max(scale * 1e-4) {
                eigs.push(h[(hi, hi)]);
                hi -= 1;
            } else {
                break;
            }
        }
        if hi == 0 && eigs.len() == n {
            break;
        }
        if eigs.len() >= n {
            break;
        }

        // Active block [lo, hi]: walk up until a negligible subdiagonal.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * local.max(scale * 1e-4) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            eigs.push(h[(hi, hi)]);
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }

        if iter_budget == 0 {
            return Err(MatError::NoConvergence { off: h[(hi, hi - 1)].norm(), sweeps: 60 * n });
        }
        iter_budget -= 1;

        // Wilkinson shift from the trailing 2x2 of the active block.
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let cc = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let tr = a + d;
        let det = a * d - b * cc;
        let disc = (tr * tr - det * 4.0).sqrt();
        let l1 = (tr + disc) * 0.5;
        let l2 = (tr - disc) * 0.5;
        let mut shift = if (l1 - d).norm() <= (l2 - d).norm() { l1 } else { l2 };
        if iter_budget % 17 == 0 {
            // Exceptional shift breaks rare stall cycles.
            shift = d + Complex64::new(cc.norm(), 0.0);
        }

        qr_step(&mut h, lo, hi, shift);
    }

    eigs.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    if eigs.len() != n {
        return Err(MatError::NoConvergence { off: f64::NAN, sweeps: 60 * n });
    }
    let _ = tol;
    Ok(eigs)
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        // x = h[k+1 .., k]
        let mut norm_x = 0.0;
        for i in (k + 1)..n {
            norm_x += h[(i, k)].norm_sqr();
        }
        let norm_x = norm_x.sqrt();
        if norm_x <= 1e-300 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        // v = x + phase * |x| e_1
        let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(0.0, 0.0)).collect();
        for i in (k + 1)..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] += phase * norm_x;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= 1e-300 {
            continue;
        }
        // h <- P h P with P = I - 2 v v* / (v* v)
        // Left: h -= (2/vnorm2) v (v* h)
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in (k + 1)..n {
                dot += v[i].conj() * h[(i, j)];
            }
            let f = dot * (2.0 / vnorm2);
            for i in (k + 1)..n {
                let sub = v[i] * f;
                h[(i, j)] -= sub;
            }
        }
        // Right: h -= (2/vnorm2) (h v) v*
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                dot += h[(i, j)] * v[j];
            }
            let f = dot * (2.0 / vnorm2);
            for j in (k + 1)..n {
                let sub = f * v[j].conj();
                h[(i, j)] -= sub;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// One explicit shifted QR step on the active block via Givens rotations.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.rows();
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    // QR by Givens on the subdiagonal, recording rotations.
    let mut rots: Vec<(usize, Complex64, Complex64)> = Vec::new();
    for i in lo..hi {
        let a = h[(i, i)];
        let b = h[(i + 1, i)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r <= 1e-300 {
            rots.push((i, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
            continue;
        }
        let cg = a / r;
        let sg = b / r;
        rots.push((i, cg, sg));
        // Apply G* to rows i, i+1: G = [[c, -conj(s)], [s, conj(c)]] with G* [a b]^T = [r 0]^T
        for j in i..n {
            let x = h[(i, j)];
            let y = h[(i + 1, j)];
            h[(i, j)] = cg.conj() * x + sg.conj() * y;
            h[(i + 1, j)] = -sg * x + cg * y;
        }
    }
    // RQ: apply rotations on the right.
    for &(i, cg, sg) in &rots {
        for kk in lo..=(i + 1).min(hi) {
            let x = h[(kk, i)];
            let y = h[(kk, i + 1)];
            h[(kk, i)] = x * cg + y * sg;
            h[(kk, i + 1)] = -x * sg.conj() + y * cg.conj();
        }
        if i + 2 <= hi {
            let x = h[(i + 2, i)];
            let y = h[(i + 2, i + 1)];
            h[(i + 2, i)] = x * cg + y * sg;
            h[(i + 2, i + 1)] = -x * sg.conj() + y * cg.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Deterministic random matrix helpers shared by tests and the CLI.
pub mod random {
    use super::*;
    use rand::Rng;

    pub fn matrix<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    pub fn hermitian<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
        let m = matrix(n, rng);
        m.hermitian_part()
    }

    /// Haar-ish random unitary: Gram-Schmidt applied to a random matrix.
    pub fn unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
        let m = matrix(n, rng);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = m.column(j);
            for e in &cols {
                let dot: Complex64 = e.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, ei) in v.iter_mut().zip(e.iter()) {
                    *vi -= dot * ei;
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm > 1e-8, "random matrix numerically singular");
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
        CMatrix::from_columns(n, &cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tol {
        Tol::default()
    }

    #[test]
    fn pauli_x_eigendecomposition() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let eig = hermitian_eig(&m, tol()).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let residual = eig.reconstruct().sub(&m).frobenius();
        assert!(residual < 1e-12, "residual {residual}");
    }

    #[test]
    fn eig_matches_trace_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 8, 13] {
            let h = random::hermitian(n, &mut rng);
            let eig = hermitian_eig(&h, tol()).unwrap();
            let sum: f64 = eig.values.iter().sum();
            assert!((sum - h.trace().re).abs() < 1e-10);
            let sq: f64 = eig.values.iter().map(|l| l * l).sum();
            assert!((sq - h.frobenius().powi(2)).abs() < 1e-9);
            // Unitarity of the eigenvector matrix.
            let gram = eig.vectors.adjoint().mul(&eig.vectors);
            assert!(gram.sub(&CMatrix::identity(n)).frobenius() < 1e-12);
            assert!(eig.reconstruct().sub(&h).frobenius() < 1e-11);
            // Ascending order.
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1] + 1e-14);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(matches!(hermitian_eig(&m, tol()), Err(MatError::NotHermitian { .. })));
    }

    #[test]
    fn trace_norm_matches_closed_form_2x2() {
        // Independent oracle: singular values of a 2x2 from the trace and
        // determinant of m* m.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random::matrix(2, &mut rng);
            let g = m.adjoint().mul(&m);
            let t = g.trace().re;
            let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
            let disc = (t * t / 4.0 - det).max(0.0).sqrt();
            let l1 = (t / 2.0 + disc).max(0.0);
            let l2 = (t / 2.0 - disc).max(0.0);
            let oracle = l1.sqrt() + l2.sqrt();
            let got = trace_norm(&m, tol()).unwrap();
            assert!((got - oracle).abs() < 1e-10, "trace norm {got} vs oracle {oracle}");
            let op = operator_norm(&m, tol()).unwrap();
            assert!((op - l1.sqrt()).abs() < 1e-10);
            assert!(op <= got + 1e-12);
        }
    }

    #[test]
    fn small_closed_form_eigenvalues_match_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=3 {
            for _ in 0..60 {
                let h = random::hermitian(n, &mut rng);
                let fast = hermitian_eigvals_small(&h).unwrap();
                let slow = hermitian_eig(&h, tol()).unwrap().values;
                let scale = h.frobenius().max(1.0);
                for (f, s) in fast.iter().zip(slow.iter()) {
                    assert!((f - s).abs() < 1e-12 * scale, "dim {n}: {f} vs {s}");
                }
            }
        }
    }

    #[test]
    fn operator_norm_of_projection_is_one() {
        let p = CMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ]);
        assert!((operator_norm(&p, tol()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_eigenvalues_nilpotent_and_companion() {
        let nil = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let eigs = general_eigenvalues(&nil, tol()).unwrap();
        assert_eq!(eigs.len(), 2);
        for e in &eigs {
            assert!(e.norm() < 1e-8);
        }

        // Companion matrix of z^3 - 1: eigenvalues are the cube roots of 1.
        let comp = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let eigs = general_eigenvalues(&comp, tol()).unwrap();
        let mut expect = vec![
            c(1.0, 0.0),
            c(-0.5, 3.0f64.sqrt() / 2.0),
            c(-0.5, -3.0f64.sqrt() / 2.0),
        ];
        expect.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
        for (got, want) in eigs.iter().zip(expect.iter()) {
            assert!((got - want).norm() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn general_eigenvalues_agree_with_hermitian_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 4, 7, 12] {
            let h = random::hermitian(n, &mut rng);
            let mut viaqr = general_eigenvalues(&h, tol()).unwrap();
            viaqr.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
            let viaj = hermitian_eig(&h, tol()).unwrap().values;
            for (a, b) in viaqr.iter().zip(viaj.iter()) {
                assert!((a.re - b).abs() < 1e-8 && a.im.abs() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn simultaneous_diag_commuting_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random::unitary(5, &mut rng);
        let d1 = CMatrix::diag(&[1.0, 1.0, 2.0, 3.0, 3.0]);
        let d2 = CMatrix::diag_complex(&[c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0), c(2.0, 0.0), c(5.0, 0.0)]);
        let a = u.mul(&d1).mul(&u.adjoint());
        let b = u.mul(&d2).mul(&u.adjoint());
        let w = simultaneous_diag(&[a.clone(), b.clone()], tol(), &mut rng).unwrap();
        for m in [&a, &b] {
            let off = m.compress(&w).off_diagonal_mass();
            assert!(off < 1e-9, "off-diagonal mass {off}");
        }
        let gram = w.adjoint().mul(&w);
        assert!(gram.sub(&CMatrix::identity(5)).frobenius() < 1e-12);
    }

    #[test]
    fn simultaneous_diag_rejects_noncommuting() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let z = CMatrix::diag(&[1.0, -1.0]);
        let err = simultaneous_diag(&[x, z], tol(), &mut rng);
        assert!(matches!(err, Err(MatError::NotCommuting { .. })));
    }

    #[test]
    fn simultaneous_diag_rejects_nonnormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let nil = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let err = simultaneous_diag(&[nil], tol(), &mut rng);
        assert!(matches!(err, Err(MatError::NotNormal { .. })));
    }

    #[test]
    fn dimension_cap_enforced() {
        let m = CMatrix::zeros(64, 64);
        assert!(hermitian_eig(&m, tol()).is_ok());
        // Construction beyond the cap is refused at the type level (panics),
        // and the solvers refuse dim > 64.
        let err = Tol::new(0.0);
        assert!(err.is_err());
    }

    #[test]
    fn normal_matrix_diagonalized_by_simdiag() {
        // A single normal (non-Hermitian) matrix is a commuting family of one.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = random::unitary(4, &mut rng);
        let d = CMatrix::diag_complex(&[c(1.0, 1.0), c(-1.0, 0.5), c(0.0, -2.0), c(3.0, 0.0)]);
        let x = u.mul(&d).mul(&u.adjoint());
        let w = simultaneous_diag(&[x.clone()], tol(), &mut rng).unwrap();
        assert!(x.compress(&w).off_diagonal_mass() < 1e-9);
    }
}
