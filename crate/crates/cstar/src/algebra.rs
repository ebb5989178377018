//! Concrete *-subalgebras of M_d(C): generation, membership, block structure.
//!
//! An [`Algebra`] is stored as an orthonormal basis (trace pairing
//! `<a, b> = trace(a* b)`) of its linear span together with its Wedderburn
//! blocks. Each block records a minimal central projection, the abstract
//! block size n, the multiplicity m of the block inside the ambient space,
//! and a full system of matrix units, so later modules can move between an
//! element and its abstract block matrices.

use crate::mat::{self, CMatrix, MatError, Tol, DIM_CAP};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("presentation has no generators and no unit")]
    EmptyPresentation,
    #[error("candidate residual {residual:.3e} sits inside the ambiguous band [{lo:.3e}, {hi:.3e}]")]
    NumericalRankAmbiguity { residual: f64, lo: f64, hi: f64 },
    #[error("membership residual {residual:.3e} is ambiguous")]
    AmbiguousMembership { residual: f64 },
    #[error("matrix is not in the algebra: residual {residual:.3e}")]
    NotInAlgebra { residual: f64 },
    #[error("element is not self-adjoint: |x - x*| = {deviation:.3e}")]
    NotSelfAdjoint { deviation: f64 },
    #[error("block decomposition failed: {reason}")]
    BlockFailure { reason: String },
}

/// Generators for an algebra inside M_d(C).
#[derive(Debug, Clone)]
pub struct AlgebraPresentation {
    pub ambient_dim: usize,
    pub generators: Vec<CMatrix>,
    /// When set, the ambient identity is adjoined.
    pub unital: bool,
}

/// One Wedderburn block, isomorphic to M_size embedded with a multiplicity.
#[derive(Debug, Clone)]
pub struct Block {
    /// Minimal central projection supporting the block.
    pub projection: CMatrix,
    /// Abstract block size n (the block is a copy of M_n).
    pub size: usize,
    /// Multiplicity m of the block in the ambient space; trace(projection) = n m.
    pub multiplicity: usize,
    /// Matrix units e_jk, row-major, with e_jk e_pq = delta_kp e_jq.
    units: Vec<CMatrix>,
}

impl Block {
    pub fn unit(&self, j: usize, k: usize) -> &CMatrix {
        &self.units[j * self.size + k]
    }

    /// Abstract n x n matrix of `m` in this block:
    /// entry (j, k) = trace(e_kj m) / multiplicity.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        let n = self.size;
        CMatrix::from_fn(n, n, |j, k| {
            self.unit(k, j).mul(m).trace() / (self.multiplicity as f64)
        })
    }

    /// Embeds an abstract n x n block matrix back into the ambient space.
    pub fn embed(&self, small: &CMatrix) -> CMatrix {
        assert_eq!(small.rows(), self.size);
        let d = self.projection.rows();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..self.size {
            for k in 0..self.size {
                out = out.add(&self.unit(j, k).scale(small[(j, k)]));
            }
        }
        out
    }
}

/// Orthonormal span of matrices under the trace pairing.
///
/// Used for closure loops, membership tests, and ideal dimension counts.
#[derive(Debug, Clone, Default)]
pub struct SpanBasis {
    vecs: Vec<CMatrix>,
}

/// Outcome of offering a candidate to a [`SpanBasis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpanOutcome {
    Added,
    InSpan,
    Ambiguous { residual: f64 },
}

impl SpanBasis {
    pub fn new() -> Self {
        SpanBasis { vecs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn vectors(&self) -> &[CMatrix] {
        &self.vecs
    }

    pub fn coords(&self, m: &CMatrix) -> Vec<Complex64> {
        self.vecs.iter().map(|b| b.inner(m)).collect()
    }

    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.rows(), m.cols());
        for b in &self.vecs {
            out = out.add(&b.scale(b.inner(m)));
        }
        out
    }

    pub fn residual(&self, m: &CMatrix) -> f64 {
        m.sub(&self.project(m)).frobenius()
    }

    /// Gram-Schmidt step: adds the candidate when its residual clears `hi`,
    /// drops it below `lo`, reports the ambiguous band otherwise.
    pub fn offer(&mut self, m: &CMatrix, lo: f64, hi: f64) -> SpanOutcome {
        let mut r = m.sub(&self.project(m));
        let mut norm = r.frobenius();
        if norm > hi {
            // Re-orthogonalize once; plain Gram-Schmidt drifts for long bases.
            r = r.sub(&self.project(&r));
            norm = r.frobenius();
            self.vecs.push(r.scale_re(1.0 / norm));
            SpanOutcome::Added
        } else if norm < lo {
            SpanOutcome::InSpan
        } else {
            SpanOutcome::Ambiguous { residual: norm }
        }
    }
}

/// A *-subalgebra of M_d(C) with its block structure.
#[derive(Debug, Clone)]
pub struct Algebra {
    ambient_dim: usize,
    tol: Tol,
    unital: bool,
    basis: SpanBasis,
    /// Unit of the algebra (the ambient identity when `unital`).
    unit: CMatrix,
    blocks: Vec<Block>,
}

/// Element of an algebra: the matrix together with its coordinates in the
/// algebra's orthonormal basis.
#[derive(Debug, Clone)]
pub struct Element {
    pub matrix: CMatrix,
    pub coords: Vec<Complex64>,
}

/// Span closure of the presentation: adjoints first, then pairwise products,
/// repeated until nothing new appears. Deterministic insertion order.
pub fn generate(p: &AlgebraPresentation, tol: Tol, seed: u64) -> Result<Algebra, AlgebraError> {
    let d = p.ambient_dim;
    if d > DIM_CAP {
        return Err(AlgebraError::DimensionCap { dim: d, cap: DIM_CAP });
    }
    if p.generators.is_empty() && !p.unital {
        return Err(AlgebraError::EmptyPresentation);
    }
    for g in &p.generators {
        assert_eq!((g.rows(), g.cols()), (d, d), "generator shape mismatch");
    }

    let lo = tol.eps;
    let hi = 100.0 * tol.eps;
    let mut basis = SpanBasis::new();
    let offer = |basis: &mut SpanBasis, m: &CMatrix| -> Result<bool, AlgebraError> {
        match basis.offer(m, lo, hi) {
            SpanOutcome::Added => Ok(true),
            SpanOutcome::InSpan => Ok(false),
            SpanOutcome::Ambiguous { residual } => {
                Err(AlgebraError::NumericalRankAmbiguity { residual, lo, hi })
            }
        }
    };

    if p.unital {
        offer(&mut basis, &CMatrix::identity(d))?;
    }
    for g in &p.generators {
        offer(&mut basis, g)?;
    }

    loop {
        let mut added = false;
        let snapshot = basis.vectors().to_vec();
        for b in &snapshot {
            added |= offer(&mut basis, &b.adjoint())?;
        }
        let snapshot = basis.vectors().to_vec();
        for x in &snapshot {
            for y in &snapshot {
                added |= offer(&mut basis, &x.mul(y))?;
            }
        }
        if !added {
            break;
        }
        assert!(basis.len() <= d * d, "span exceeded full matrix algebra");
    }

    let unit = if p.unital {
        CMatrix::identity(d)
    } else {
        algebra_unit(&basis, d, tol)?
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = wedderburn_blocks(&basis, &unit, d, tol, &mut rng)?;
    let dim: usize = blocks.iter().map(|b| b.size * b.size).sum();
    if dim != basis.len() {
        return Err(AlgebraError::BlockFailure {
            reason: format!("block sizes account for dim {dim}, basis has {}", basis.len()),
        });
    }

    Ok(Algebra { ambient_dim: d, tol, unital: p.unital, basis, unit, blocks })
}

/// Unit of a possibly non-unital subalgebra: the orthogonal projection onto
/// the joint range of the basis, which for a *-closed span is the algebra's
/// identity.
fn algebra_unit(basis: &SpanBasis, d: usize, tol: Tol) -> Result<CMatrix, AlgebraError> {
    let mut range: Vec<Vec<Complex64>> = Vec::new();
    for b in basis.vectors() {
        for j in 0..d {
            let mut v = b.column(j);
            for e in &range {
                let dot: Complex64 = e.iter().zip(v.iter()).map(|(a, w)| a.conj() * w).sum();
                for (vi, ei) in v.iter_mut().zip(e.iter()) {
                    *vi -= dot * ei;
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 100.0 * tol.eps {
                for vi in v.iter_mut() {
                    *vi /= norm;
                }
                range.push(v);
            }
        }
    }
    let mut e = CMatrix::zeros(d, d);
    for v in &range {
        for i in 0..d {
            for j in 0..d {
                e[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    let residual = basis.residual(&e);
    if residual > 100.0 * tol.eps {
        return Err(AlgebraError::BlockFailure {
            reason: format!("support projection not inside the span, residual {residual:.3e}"),
        });
    }
    Ok(e)
}

fn wedderburn_blocks<R: Rng>(
    basis: &SpanBasis,
    unit: &CMatrix,
    d: usize,
    tol: Tol,
    rng: &mut R,
) -> Result<Vec<Block>, AlgebraError> {
    let dim = basis.len();
    if dim == 0 {
        return Ok(Vec::new());
    }

    // Center: kernel of c -> ([sum c_j b_j, b_i])_i via the Gram matrix of
    // commutators.
    let bs = basis.vectors();
    let mut gram = CMatrix::zeros(dim, dim);
    let mut comms: Vec<Vec<CMatrix>> = Vec::with_capacity(dim);
    for bj in bs {
        comms.push(bs.iter().map(|bi| bj.commutator(bi)).collect());
    }
    for j in 0..dim {
        for l in j..dim {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                s += comms[j][i].inner(&comms[l][i]);
            }
            gram[(j, l)] = s;
            gram[(l, j)] = s.conj();
        }
    }
    let eig = mat::hermitian_eig(&gram, tol)?;
    let lam_max: f64 = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    let thresh = (100.0 * tol.eps).powi(2) * lam_max;
    let center_coords: Vec<Vec<Complex64>> = (0..dim)
        .filter(|&i| eig.values[i] <= thresh)
        .map(|i| eig.vectors.column(i))
        .collect();
    let center_dim = center_coords.len();
    if center_dim == 0 {
        return Err(AlgebraError::BlockFailure { reason: "empty center".into() });
    }
    let center_mats: Vec<CMatrix> = center_coords
        .iter()
        .map(|c| {
            let mut m = CMatrix::zeros(d, d);
            for (coef, b) in c.iter().zip(bs.iter()) {
                m = m.add(&b.scale(*coef));
            }
            m
        })
        .collect();

    // Self-adjoint spanning set of the center.
    let mut sa: Vec<CMatrix> = Vec::new();
    for m in &center_mats {
        let h = m.hermitian_part();
        if h.frobenius() > tol.eps {
            sa.push(h);
        }
        let k = m.skew_part_hermitian();
        if k.frobenius() > tol.eps {
            sa.push(k);
        }
    }

    // Random self-adjoint central element with as many distinct eigenvalues
    // as the center has dimensions; its spectral clusters give the minimal
    // central projections. Retries cover unlucky coefficient draws.
    let mut projections: Option<Vec<CMatrix>> = None;
    for _attempt in 0..8 {
        let mut z = CMatrix::zeros(d, d);
        for h in &sa {
            z = z.add(&h.scale_re(rng.gen_range(-1.0..1.0)));
        }
        // Shift by the unit so the off-algebra kernel stays at eigenvalue 0.
        z = z.add(&unit.scale_re(4.0 * z.frobenius().max(1.0)));
        let eig = mat::hermitian_eig(&z, tol)?;
        let spread = (eig.values.last().unwrap() - eig.values[0]).max(1.0);
        let gap = 100.0 * tol.eps * spread;
        let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &v) in eig.values.iter().enumerate() {
            match clusters.last_mut() {
                Some((rep, idxs)) if (v - *rep).abs() < gap => {
                    idxs.push(i);
                    *rep = v;
                }
                _ => clusters.push((v, vec![i])),
            }
        }
        let nonzero: Vec<&(f64, Vec<usize>)> =
            clusters.iter().filter(|(v, _)| v.abs() > gap.max(1e-6)).collect();
        if nonzero.len() != center_dim {
            continue;
        }
        let mut ps = Vec::with_capacity(center_dim);
        let mut ok = true;
        for (_, idxs) in &nonzero {
            let mut p = CMatrix::zeros(d, d);
            for &i in idxs.iter() {
                let col = eig.vectors.column(i);
                for r in 0..d {
                    for cidx in 0..d {
                        p[(r, cidx)] += col[r] * col[cidx].conj();
                    }
                }
            }
            if basis.residual(&p) > 100.0 * tol.eps {
                ok = false;
                break;
            }
            ps.push(p);
        }
        if ok {
            projections = Some(ps);
            break;
        }
    }
    let projections = projections.ok_or_else(|| AlgebraError::BlockFailure {
        reason: "could not split the center into minimal projections".into(),
    })?;

    let mut blocks = Vec::with_capacity(projections.len());
    for p in projections {
        let block = build_block(basis, &p, d, tol, rng)?;
        blocks.push(block);
    }
    Ok(blocks)
}

/// Builds the matrix units of the block under a minimal central projection.
fn build_block<R: Rng>(
    basis: &SpanBasis,
    p: &CMatrix,
    d: usize,
    tol: Tol,
    rng: &mut R,
) -> Result<Block, AlgebraError> {
    // Basis of the compression p A p.
    let mut comp = SpanBasis::new();
    for b in basis.vectors() {
        let cand = p.mul(b).mul(p);
        match comp.offer(&cand, tol.eps, 100.0 * tol.eps) {
            SpanOutcome::Ambiguous { residual } => {
                return Err(AlgebraError::NumericalRankAmbiguity {
                    residual,
                    lo: tol.eps,
                    hi: 100.0 * tol.eps,
                })
            }
            _ => {}
        }
    }
    let block_dim = comp.len();
    let n = (block_dim as f64).sqrt().round() as usize;
    if n * n != block_dim {
        return Err(AlgebraError::BlockFailure {
            reason: format!("compression dimension {block_dim} is not a square"),
        });
    }
    let rank = p.trace().re.round() as usize;
    if rank == 0 || rank % n != 0 {
        return Err(AlgebraError::BlockFailure {
            reason: format!("projection rank {rank} incompatible with block size {n}"),
        });
    }
    let mult = rank / n;

    // Minimal projections: spectral clusters of a generic self-adjoint
    // element of the compression, shifted to keep block eigenvalues positive.
    let sa: Vec<CMatrix> = comp
        .vectors()
        .iter()
        .flat_map(|m| [m.hermitian_part(), m.skew_part_hermitian()])
        .filter(|h| h.frobenius() > tol.eps)
        .collect();
    let mut minimal: Option<Vec<CMatrix>> = None;
    for _attempt in 0..8 {
        let mut z = CMatrix::zeros(d, d);
        for h in &sa {
            z = z.add(&h.scale_re(rng.gen_range(-1.0..1.0)));
        }
        z = z.add(&p.scale_re(4.0 * z.frobenius().max(1.0)));
        let eig = mat::hermitian_eig(&z, tol)?;
        let spread = (eig.values.last().unwrap() - eig.values[0]).max(1.0);
        let gap = 100.0 * tol.eps * spread;
        let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &v) in eig.values.iter().enumerate() {
            match clusters.last_mut() {
                Some((rep, idxs)) if (v - *rep).abs() < gap => {
                    idxs.push(i);
                    *rep = v;
                }
                _ => clusters.push((v, vec![i])),
            }
        }
        let nonzero: Vec<&(f64, Vec<usize>)> =
            clusters.iter().filter(|(v, _)| v.abs() > gap.max(1e-6)).collect();
        if nonzero.len() != n || nonzero.iter().any(|(_, idxs)| idxs.len() != mult) {
            continue;
        }
        let mut qs = Vec::with_capacity(n);
        for (_, idxs) in &nonzero {
            let mut q = CMatrix::zeros(d, d);
            for &i in idxs.iter() {
                let col = eig.vectors.column(i);
                for r in 0..d {
                    for cidx in 0..d {
                        q[(r, cidx)] += col[r] * col[cidx].conj();
                    }
                }
            }
            qs.push(q);
        }
        minimal = Some(qs);
        break;
    }
    let qs = minimal.ok_or_else(|| AlgebraError::BlockFailure {
        reason: format!("could not find {n} minimal projections in a block"),
    })?;

    // Partial isometries w_j : range(q_j) -> range(q_1), then
    // e_jk = w_j* w_k.
    let mut ws: Vec<CMatrix> = Vec::with_capacity(n);
    ws.push(qs[0].clone());
    for q in qs.iter().skip(1) {
        // Best-conditioned connector q_1 b q over the algebra basis.
        let mut best: Option<CMatrix> = None;
        let mut best_norm = 0.0;
        for b in basis.vectors() {
            let v = qs[0].mul(b).mul(q);
            let nv = v.frobenius();
            if nv > best_norm {
                best_norm = nv;
                best = Some(v);
            }
        }
        let v = best.filter(|_| best_norm > 100.0 * tol.eps).ok_or_else(|| {
            AlgebraError::BlockFailure { reason: "disconnected minimal projections".into() }
        })?;
        // Polar part: w = v (v* v)^{-1/2} on the support of v* v.
        let g = v.adjoint().mul(&v);
        let g = g.add(&g.adjoint()).scale_re(0.5);
        let eig = mat::hermitian_eig(&g, tol)?;
        let top = eig.values.last().copied().unwrap_or(0.0);
        let cut = (100.0 * tol.eps).powi(2) * top.max(1.0);
        let isqrt = eig.map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });
        let w = v.mul(&isqrt);
        ws.push(w);
    }

    let mut units = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            units.push(ws[j].adjoint().mul(&ws[k]));
        }
    }

    // Defensive checks: units multiply correctly and live in the algebra.
    let check = 1e-6_f64.max(1000.0 * tol.eps);
    for j in 0..n {
        for k in 0..n {
            let e = &units[j * n + k];
            if basis.residual(e) > check {
                return Err(AlgebraError::BlockFailure {
                    reason: "matrix unit escaped the algebra".into(),
                });
            }
            let dev = e.adjoint().sub(&units[k * n + j]).frobenius();
            if dev > check {
                return Err(AlgebraError::BlockFailure {
                    reason: format!("matrix units not *-consistent, deviation {dev:.3e}"),
                });
            }
        }
    }
    let mut esum = CMatrix::zeros(d, d);
    for j in 0..n {
        esum = esum.add(&units[j * n + j]);
    }
    if esum.sub(p).frobenius() > check {
        return Err(AlgebraError::BlockFailure {
            reason: "diagonal matrix units do not sum to the block projection".into(),
        });
    }

    Ok(Block { projection: p.clone(), size: n, multiplicity: mult, units })
}

impl Algebra {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn tol(&self) -> Tol {
        self.tol
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn basis(&self) -> &[CMatrix] {
        self.basis.vectors()
    }

    pub fn span(&self) -> &SpanBasis {
        &self.basis
    }

    pub fn unit(&self) -> &CMatrix {
        &self.unit
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|b| b.size == 1)
    }

    /// Membership test. `Ok(Some(coords))` when the residual clears the
    /// acceptance band, `Ok(None)` when clearly outside, an error inside the
    /// ambiguous band.
    pub fn member(&self, m: &CMatrix) -> Result<Option<Vec<Complex64>>, AlgebraError> {
        assert_eq!((m.rows(), m.cols()), (self.ambient_dim, self.ambient_dim));
        let residual = self.basis.residual(m);
        if residual <= 10.0 * self.tol.eps {
            Ok(Some(self.basis.coords(m)))
        } else if residual > 100.0 * self.tol.eps {
            Ok(None)
        } else {
            Err(AlgebraError::AmbiguousMembership { residual })
        }
    }

    /// Wraps a matrix as an element, or fails with the membership residual.
    pub fn element(&self, m: CMatrix) -> Result<Element, AlgebraError> {
        match self.member(&m)? {
            Some(coords) => Ok(Element { matrix: m, coords }),
            None => Err(AlgebraError::NotInAlgebra { residual: self.basis.residual(&m) }),
        }
    }

    pub fn element_from_coords(&self, coords: &[Complex64]) -> Element {
        assert_eq!(coords.len(), self.dim());
        let mut m = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (c, b) in coords.iter().zip(self.basis.vectors()) {
            m = m.add(&b.scale(*c));
        }
        Element { matrix: m, coords: coords.to_vec() }
    }

    pub fn unit_element(&self) -> Element {
        self.element(self.unit.clone()).expect("unit is in the algebra")
    }

    /// Positivity: self-adjoint within tolerance and spectrum above -eps.
    pub fn is_positive(&self, x: &Element) -> Result<bool, AlgebraError> {
        let dev = x.matrix.hermitian_deviation();
        if dev > 100.0 * self.tol.eps * x.matrix.frobenius().max(1.0) {
            return Err(AlgebraError::NotSelfAdjoint { deviation: dev });
        }
        let eig = mat::hermitian_eig(&x.matrix.hermitian_part(), self.tol)?;
        Ok(eig.values.iter().all(|&l| l >= -self.tol.eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::c;
    use crate::mat::random;
    use rand::SeedableRng;

    fn present(d: usize, gens: Vec<CMatrix>) -> AlgebraPresentation {
        AlgebraPresentation { ambient_dim: d, generators: gens, unital: true }
    }

    #[test]
    fn diagonal_algebra_in_m2() {
        let g = CMatrix::diag(&[1.0, -1.0]);
        let a = generate(&present(2, vec![g]), Tol::default(), 0).unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(a.blocks().len(), 2);
        for b in a.blocks() {
            assert_eq!(b.size, 1);
            assert_eq!(b.multiplicity, 1);
        }
        assert!(a.is_commutative());
        // Pauli x is not diagonal.
        let x = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(a.member(&x).unwrap().is_none());
        assert!(a.member(&CMatrix::identity(2)).unwrap().is_some());
    }

    #[test]
    fn single_nilpotent_generates_full_m2() {
        let g = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let a = generate(&present(2, vec![g]), Tol::default(), 0).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(a.blocks().len(), 1);
        assert_eq!(a.blocks()[0].size, 2);
        assert_eq!(a.blocks()[0].multiplicity, 1);
        assert!(!a.is_commutative());
    }

    #[test]
    fn block_sizes_square_sum_to_dim() {
        // M_2 + M_1 inside M_3.
        let g1 = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let g2 = CMatrix::diag(&[0.0, 0.0, 1.0]);
        let a = generate(&present(3, vec![g1, g2]), Tol::default(), 0).unwrap();
        assert_eq!(a.dim(), 5);
        let mut sizes: Vec<usize> = a.blocks().iter().map(|b| b.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
        let total: usize = a.blocks().iter().map(|b| b.size * b.size).sum();
        assert_eq!(total, a.dim());
    }

    #[test]
    fn multiplicity_two_copy_of_m2_in_m4() {
        // a |-> diag(a, a) embedding of M_2.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let g = random::matrix(2, &mut rng);
        let mut emb = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                emb[(i, j)] = g[(i, j)];
                emb[(i + 2, j + 2)] = g[(i, j)];
            }
        }
        let a = generate(&present(4, vec![emb]), Tol::default(), 1).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(a.blocks().len(), 1);
        let b = &a.blocks()[0];
        assert_eq!(b.size, 2);
        assert_eq!(b.multiplicity, 2);
        // Matrix units behave like elementary matrices.
        for j in 0..2 {
            for k in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        let prod = b.unit(j, k).mul(b.unit(p, q));
                        let expect = if k == p {
                            b.unit(j, q).clone()
                        } else {
                            CMatrix::zeros(4, 4)
                        };
                        assert!(prod.sub(&expect).frobenius() < 1e-9);
                    }
                }
            }
        }
        // Compression respects the unit system.
        let small = b.compress(b.unit(0, 1));
        assert!((small[(0, 1)] - c(1.0, 0.0)).norm() < 1e-9);
        assert!(small[(0, 0)].norm() < 1e-9);
        // Embed then compress round-trips.
        let abstract_m = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, 0.0)],
            vec![c(0.0, -1.0), c(3.0, 0.0)],
        ]);
        let back = b.compress(&b.embed(&abstract_m));
        assert!(back.sub(&abstract_m).frobenius() < 1e-9);
    }

    #[test]
    fn scalars_only() {
        let a = generate(
            &AlgebraPresentation { ambient_dim: 3, generators: vec![], unital: true },
            Tol::default(),
            0,
        )
        .unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.blocks().len(), 1);
        assert_eq!(a.blocks()[0].size, 1);
        assert_eq!(a.blocks()[0].multiplicity, 3);
    }

    #[test]
    fn nonunital_corner_algebra() {
        // M_1 + 0 inside M_2: unit is diag(1, 0), not the ambient identity.
        let g = CMatrix::diag(&[1.0, 0.0]);
        let a = generate(
            &AlgebraPresentation { ambient_dim: 2, generators: vec![g.clone()], unital: false },
            Tol::default(),
            0,
        )
        .unwrap();
        assert_eq!(a.dim(), 1);
        assert!(a.unit().sub(&g).frobenius() < 1e-9);
    }

    #[test]
    fn positivity_checks() {
        let gx = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let a = generate(&present(2, vec![gx.clone()]), Tol::default(), 0).unwrap();
        let pos = a.element(CMatrix::diag(&[1.0, 0.0])).unwrap();
        assert!(a.is_positive(&pos).unwrap());
        let neg = a.element(CMatrix::diag(&[1.0, -0.5])).unwrap();
        assert!(!a.is_positive(&neg).unwrap());
        let nil = a.element(gx).unwrap();
        assert!(matches!(a.is_positive(&nil), Err(AlgebraError::NotSelfAdjoint { .. })));
    }

    #[test]
    fn full_matrix_algebra_block() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g1 = random::matrix(3, &mut rng);
        let g2 = random::matrix(3, &mut rng);
        let a = generate(&present(3, vec![g1, g2]), Tol::default(), 7).unwrap();
        assert_eq!(a.dim(), 9);
        assert_eq!(a.blocks().len(), 1);
        assert_eq!(a.blocks()[0].size, 3);
        // Basis is orthonormal under the trace pairing.
        for (i, x) in a.basis().iter().enumerate() {
            for (j, y) in a.basis().iter().enumerate() {
                let ip = x.inner(y);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(want, 0.0)).norm() < 1e-10);
            }
        }
    }
}
