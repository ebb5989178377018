//! Exact finite truncations of the Boolean-string algebra. Level n is the
//! diagonal algebra over the 2^n binary strings, generated by the bit
//! indicators p_{k,b} (block k holds the complementary pair p_{k,0},
//! p_{k,1}). Everything here runs in exact rational arithmetic: the uniform
//! trace takes the value 2^-|F| on a transversal monomial, states form a
//! (2^n - 1)-simplex whose restriction tower sums sibling weights, and the
//! purity sets K_n are decided exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Largest supported truncation level; the string count doubles per level.
pub const LEVEL_CAP: usize = 16;
/// Largest level for the trace representation (dimension 2^n).
pub const GNS_LEVEL_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum RussellError {
    #[error("level {level} outside supported range 1..={cap}")]
    LevelCap { level: usize, cap: usize },
    #[error("element has {got} coordinates, level {level} needs {expected}")]
    WrongLength { level: usize, expected: usize, got: usize },
    #[error("block {block} outside 1..={level}")]
    BadBlock { block: usize, level: usize },
    #[error("block {block} appears twice in the monomial")]
    DuplicateBlock { block: usize },
    #[error("bit {0} is not 0 or 1")]
    BadBit(u8),
    #[error("levels {0} and {1} do not match")]
    LevelMismatch(usize, usize),
    #[error("weights are not a state: {reason}")]
    NotAState { reason: &'static str },
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// One truncation level. Strings are indexed 0..2^n with the bit of block k
/// (1-based) stored at position k-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RussellTruncation {
    level: usize,
}

/// Element of a truncation: one rational coordinate per string. The algebra
/// operations are pointwise, and adjoints are trivial since the coordinates
/// are real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RussellElement {
    pub level: usize,
    pub coords: Vec<BigRational>,
}

pub fn build_truncation(n: usize) -> Result<RussellTruncation, RussellError> {
    if n == 0 || n > LEVEL_CAP {
        return Err(RussellError::LevelCap { level: n, cap: LEVEL_CAP });
    }
    Ok(RussellTruncation { level: n })
}

impl RussellTruncation {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Complex dimension of the algebra, 2^n.
    pub fn dim(&self) -> usize {
        1 << self.level
    }

    pub fn unit(&self) -> RussellElement {
        RussellElement { level: self.level, coords: vec![rat(1); self.dim()] }
    }

    pub fn zero(&self) -> RussellElement {
        RussellElement { level: self.level, coords: vec![rat(0); self.dim()] }
    }

    /// Indicator of the strings whose block-k bit equals b.
    pub fn generator(&self, block: usize, bit: u8) -> Result<RussellElement, RussellError> {
        if block == 0 || block > self.level {
            return Err(RussellError::BadBlock { block, level: self.level });
        }
        if bit > 1 {
            return Err(RussellError::BadBit(bit));
        }
        let coords = (0..self.dim())
            .map(|s| if (s >> (block - 1)) & 1 == bit as usize { rat(1) } else { rat(0) })
            .collect();
        Ok(RussellElement { level: self.level, coords })
    }

    /// Product of generators over a transversal: at most one bit choice per
    /// block. The result is the indicator of a cylinder set.
    pub fn monomial(&self, choices: &[(usize, u8)]) -> Result<RussellElement, RussellError> {
        let mut seen = vec![false; self.level + 1];
        let mut out = self.unit();
        for &(block, bit) in choices {
            if block == 0 || block > self.level {
                return Err(RussellError::BadBlock { block, level: self.level });
            }
            if seen[block] {
                return Err(RussellError::DuplicateBlock { block });
            }
            seen[block] = true;
            out = out.mul(&self.generator(block, bit)?)?;
        }
        Ok(out)
    }

    pub fn element(&self, coords: Vec<BigRational>) -> Result<RussellElement, RussellError> {
        if coords.len() != self.dim() {
            return Err(RussellError::WrongLength {
                level: self.level,
                expected: self.dim(),
                got: coords.len(),
            });
        }
        Ok(RussellElement { level: self.level, coords })
    }
}

impl RussellElement {
    fn check_level(&self, other: &RussellElement) -> Result<(), RussellError> {
        if self.level != other.level {
            return Err(RussellError::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    pub fn add(&self, other: &RussellElement) -> Result<RussellElement, RussellError> {
        self.check_level(other)?;
        let coords =
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(RussellElement { level: self.level, coords })
    }

    pub fn mul(&self, other: &RussellElement) -> Result<RussellElement, RussellError> {
        self.check_level(other)?;
        let coords =
            self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).collect();
        Ok(RussellElement { level: self.level, coords })
    }

    pub fn scale(&self, s: &BigRational) -> RussellElement {
        RussellElement {
            level: self.level,
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_projection(&self) -> bool {
        self.coords.iter().all(|a| a.is_zero() || a.is_one())
    }

    /// Operator (sup) norm, exact.
    pub fn sup_norm(&self) -> BigRational {
        self.coords.iter().map(|a| a.abs()).max().unwrap_or_else(|| rat(0))
    }
}

/// The uniform trace: the mean of the coordinates. On a transversal
/// monomial over F this is exactly 2^-|F|, and it is tracial and a state.
pub fn tau(t: &RussellTruncation, x: &RussellElement) -> Result<BigRational, RussellError> {
    if x.level != t.level {
        return Err(RussellError::LevelMismatch(x.level, t.level));
    }
    let sum: BigRational = x.coords.iter().sum();
    Ok(sum / BigRational::from_integer(BigInt::from(t.dim() as u64)))
}

/// A state on a truncation: nonnegative rational weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationState {
    pub level: usize,
    pub weights: Vec<BigRational>,
}

impl TruncationState {
    pub fn new(level: usize, weights: Vec<BigRational>) -> Result<Self, RussellError> {
        let dim = 1usize << level;
        if weights.len() != dim {
            return Err(RussellError::WrongLength { level, expected: dim, got: weights.len() });
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(RussellError::NotAState { reason: "negative weight" });
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(RussellError::NotAState { reason: "weights do not sum to one" });
        }
        Ok(TruncationState { level, weights })
    }

    /// Point mass at one string: an extreme point of the simplex.
    pub fn point_mass(level: usize, string: usize) -> Result<Self, RussellError> {
        let dim = 1usize << level;
        if string >= dim {
            return Err(RussellError::WrongLength { level, expected: dim, got: string });
        }
        let mut weights = vec![rat(0); dim];
        weights[string] = rat(1);
        Ok(TruncationState { level, weights })
    }

    pub fn uniform(level: usize) -> Self {
        let dim = 1usize << level;
        let w = BigRational::new(BigInt::one(), BigInt::from(dim as u64));
        TruncationState { level, weights: vec![w; dim] }
    }

    pub fn value(&self, x: &RussellElement) -> Result<BigRational, RussellError> {
        if x.level != self.level {
            return Err(RussellError::LevelMismatch(x.level, self.level));
        }
        Ok(self.weights.iter().zip(&x.coords).map(|(w, a)| w * a).sum())
    }

    pub fn is_point_mass(&self) -> bool {
        self.weights.iter().any(|w| w.is_one())
    }
}

/// Restriction along the inclusion of level n into level n+1: the weight of
/// a string is the sum of the weights of its two one-bit extensions. Exact,
/// and point masses restrict to point masses.
pub fn restrict_state(s: &TruncationState) -> Result<TruncationState, RussellError> {
    if s.level == 0 {
        return Err(RussellError::LevelCap { level: 0, cap: LEVEL_CAP });
    }
    let half = 1usize << (s.level - 1);
    let weights = (0..half).map(|u| &s.weights[u] + &s.weights[u + half]).collect();
    Ok(TruncationState { level: s.level - 1, weights })
}

/// Membership in K_n: the n-fold restriction of the state is pure (a point
/// mass). Decreasing in n: purity at level n+1 forces purity at level n.
pub fn k_set_member(s: &TruncationState, n: usize) -> Result<bool, RussellError> {
    if n > s.level {
        return Err(RussellError::LevelMismatch(n, s.level));
    }
    let mut cur = s.clone();
    while cur.level > n {
        cur = restrict_state(&cur)?;
    }
    Ok(cur.is_point_mass())
}

/// The trace representation of a truncation. Elements act as multiplication
/// operators on the 2^n string coordinates, so the representation is the
/// identity on coordinates, faithful, and exactly isometric; the cyclic
/// vector has all squared amplitudes equal to 2^-n (stored squared to stay
/// rational).
#[derive(Debug, Clone)]
pub struct TauGns {
    pub level: usize,
    pub hilbert_dim: usize,
    /// Squared amplitudes of the cyclic vector.
    pub xi_squared: Vec<BigRational>,
}

pub fn gns_of_tau(t: &RussellTruncation) -> Result<TauGns, RussellError> {
    if t.level > GNS_LEVEL_CAP {
        return Err(RussellError::LevelCap { level: t.level, cap: GNS_LEVEL_CAP });
    }
    let dim = t.dim();
    let w = BigRational::new(BigInt::one(), BigInt::from(dim as u64));
    Ok(TauGns { level: t.level, hilbert_dim: dim, xi_squared: vec![w; dim] })
}

impl TauGns {
    /// Diagonal of the multiplication operator of x; the representation map
    /// itself.
    pub fn rep_diagonal(&self, x: &RussellElement) -> Result<Vec<BigRational>, RussellError> {
        if x.level != self.level {
            return Err(RussellError::LevelMismatch(x.level, self.level));
        }
        Ok(x.coords.clone())
    }

    /// Operator norm of the represented element; equals sup_norm(x) exactly.
    pub fn rep_norm(&self, x: &RussellElement) -> Result<BigRational, RussellError> {
        if x.level != self.level {
            return Err(RussellError::LevelMismatch(x.level, self.level));
        }
        Ok(x.sup_norm())
    }

    /// <xi, rep(x) xi> = sum of coordinates weighted by the squared
    /// amplitudes; equals the trace of x exactly.
    pub fn vector_value(&self, x: &RussellElement) -> Result<BigRational, RussellError> {
        if x.level != self.level {
            return Err(RussellError::LevelMismatch(x.level, self.level));
        }
        Ok(self.xi_squared.iter().zip(&x.coords).map(|(w, a)| w * a).sum())
    }
}

/// Verifies the splitting of level n+m across the first n and last m blocks:
/// under the index bijection s = low + high * 2^n the generators of the big
/// truncation factor as tensor products with the unit, and dimensions match.
pub fn tensor_decomposition_check(n: usize, m: usize) -> Result<bool, RussellError> {
    let big = build_truncation(n + m)?;
    let left = build_truncation(n)?;
    let right = build_truncation(m)?;
    if big.dim() != left.dim() * right.dim() {
        return Ok(false);
    }
    let kron = |a: &RussellElement, b: &RussellElement| -> RussellElement {
        let mut coords = Vec::with_capacity(big.dim());
        for high in 0..right.dim() {
            for low in 0..left.dim() {
                coords.push(&a.coords[low] * &b.coords[high]);
            }
        }
        RussellElement { level: big.level(), coords }
    };
    for bit in [0u8, 1u8] {
        for k in 1..=n {
            let expect = kron(&left.generator(k, bit)?, &right.unit());
            if big.generator(k, bit)? != expect {
                return Ok(false);
            }
        }
        for k in 1..=m {
            let expect = kron(&left.unit(), &right.generator(k, bit)?);
            if big.generator(n + k, bit)? != expect {
                return Ok(false);
            }
        }
    }
    // Multiplicativity across the split: one mixed monomial checked exactly.
    if n >= 1 && m >= 1 {
        let mixed = big.monomial(&[(1, 0), (n + 1, 1)])?;
        let expect = kron(&left.generator(1, 0)?, &right.generator(1, 1)?);
        if mixed != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(2))
    }

    #[test]
    fn level_one_generators_are_the_coordinate_indicators() {
        let t = build_truncation(1).unwrap();
        let p0 = t.generator(1, 0).unwrap();
        let p1 = t.generator(1, 1).unwrap();
        assert_eq!(p0.coords, vec![rat(1), rat(0)]);
        assert_eq!(p1.coords, vec![rat(0), rat(1)]);
        assert_eq!(p0.add(&p1).unwrap(), t.unit());
        assert!(p0.mul(&p1).unwrap().coords.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn generators_are_selfadjoint_idempotents_at_level_three() {
        let t = build_truncation(3).unwrap();
        assert_eq!(t.dim(), 8);
        for k in 1..=3 {
            for b in [0, 1] {
                let p = t.generator(k, b).unwrap();
                assert!(p.is_projection());
                assert_eq!(p.mul(&p).unwrap(), p);
                let q = t.generator(k, 1 - b).unwrap();
                assert_eq!(p.add(&q).unwrap(), t.unit());
                assert!(p.mul(&q).unwrap().coords.iter().all(|x| x.is_zero()));
            }
        }
        // Distinct blocks commute (pointwise products always do).
        let a = t.generator(1, 0).unwrap();
        let b = t.generator(3, 1).unwrap();
        assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn trace_of_monomials_is_two_to_minus_f() {
        let t = build_truncation(4).unwrap();
        assert_eq!(tau(&t, &t.unit()).unwrap(), rat(1));
        let one = t.monomial(&[(2, 1)]).unwrap();
        assert_eq!(tau(&t, &one).unwrap(), half());
        let two = t.monomial(&[(1, 0), (3, 1)]).unwrap();
        assert_eq!(tau(&t, &two).unwrap(), half() * half());
        let four = t.monomial(&[(1, 0), (2, 0), (3, 1), (4, 1)]).unwrap();
        assert_eq!(
            tau(&t, &four).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(16))
        );
    }

    #[test]
    fn trace_is_a_tracial_state() {
        let t = build_truncation(3).unwrap();
        let x = t
            .element((0..8).map(|i| BigRational::new(BigInt::from(i), BigInt::from(3))).collect())
            .unwrap();
        let y = t.monomial(&[(2, 0)]).unwrap();
        assert_eq!(
            tau(&t, &x.mul(&y).unwrap()).unwrap(),
            tau(&t, &y.mul(&x).unwrap()).unwrap()
        );
        // Positive on squares, one on the unit.
        let sq = x.mul(&x).unwrap();
        assert!(!tau(&t, &sq).unwrap().is_negative());
    }

    #[test]
    fn monomial_rejects_duplicate_blocks_and_bad_indices() {
        let t = build_truncation(2).unwrap();
        assert!(matches!(
            t.monomial(&[(1, 0), (1, 1)]),
            Err(RussellError::DuplicateBlock { block: 1 })
        ));
        assert!(matches!(t.generator(3, 0), Err(RussellError::BadBlock { .. })));
        assert!(matches!(t.generator(1, 2), Err(RussellError::BadBit(2))));
        assert!(matches!(build_truncation(17), Err(RussellError::LevelCap { .. })));
        assert!(matches!(build_truncation(0), Err(RussellError::LevelCap { .. })));
    }

    #[test]
    fn restriction_sums_sibling_weights() {
        let s = TruncationState::new(
            2,
            vec![
                BigRational::new(BigInt::from(1), BigInt::from(8)),
                BigRational::new(BigInt::from(3), BigInt::from(8)),
                BigRational::new(BigInt::from(2), BigInt::from(8)),
                BigRational::new(BigInt::from(2), BigInt::from(8)),
            ],
        )
        .unwrap();
        let r = restrict_state(&s).unwrap();
        assert_eq!(r.level, 1);
        assert_eq!(
            r.weights,
            vec![
                BigRational::new(BigInt::from(3), BigInt::from(8)),
                BigRational::new(BigInt::from(5), BigInt::from(8)),
            ]
        );
        let total: BigRational = r.weights.iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn point_masses_restrict_to_point_masses() {
        for string in 0..8 {
            let s = TruncationState::point_mass(3, string).unwrap();
            let r = restrict_state(&s).unwrap();
            assert!(r.is_point_mass());
            // The surviving string is the prefix (low bits).
            assert!(r.weights[string % 4].is_one());
        }
    }

    #[test]
    fn uniform_state_restricts_to_uniform() {
        let s = TruncationState::uniform(4);
        let r = restrict_state(&s).unwrap();
        assert_eq!(r, TruncationState::uniform(3));
    }

    #[test]
    fn restriction_tower_is_functorial() {
        let s = TruncationState::new(
            3,
            vec![
                rat(0),
                BigRational::new(BigInt::from(1), BigInt::from(4)),
                rat(0),
                BigRational::new(BigInt::from(1), BigInt::from(4)),
                BigRational::new(BigInt::from(1), BigInt::from(2)),
                rat(0),
                rat(0),
                rat(0),
            ],
        )
        .unwrap();
        let two_step = restrict_state(&restrict_state(&s).unwrap()).unwrap();
        // Direct two-level pairwise summation over the four extensions.
        let direct: Vec<BigRational> = (0..2)
            .map(|u| {
                (0..4).map(|h| s.weights[u + 2 * h].clone()).sum()
            })
            .collect();
        assert_eq!(two_step.weights, direct);
    }

    #[test]
    fn k_sets_are_decreasing() {
        // A state pure on the first two blocks but mixed on the third.
        let mut w = vec![rat(0); 8];
        w[1] = half();
        w[5] = half();
        let s = TruncationState::new(3, w).unwrap();
        assert!(!k_set_member(&s, 3).unwrap());
        assert!(k_set_member(&s, 2).unwrap());
        assert!(k_set_member(&s, 1).unwrap());
        // Point masses are in every K_n.
        let p = TruncationState::point_mass(3, 6).unwrap();
        for n in 1..=3 {
            assert!(k_set_member(&p, n).unwrap());
        }
        // The trace is already mixed at level one.
        let u = TruncationState::uniform(3);
        assert!(!k_set_member(&u, 1).unwrap());
        // Decreasing family on every vertex-pair mixture of the 8-simplex.
        for i in 0..8usize {
            for j in 0..8usize {
                let mut w = vec![rat(0); 8];
                w[i] = &w[i] + half();
                w[j] = &w[j] + half();
                let s = TruncationState::new(3, w).unwrap();
                for n in 1..3 {
                    if k_set_member(&s, n + 1).unwrap() {
                        assert!(k_set_member(&s, n).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn pure_states_are_the_point_masses() {
        // Extreme points of the simplex: exactly the 2^n point masses; any
        // other state splits as a proper convex combination.
        let level = 2;
        let dim = 1 << level;
        for string in 0..dim {
            let s = TruncationState::point_mass(level, string).unwrap();
            assert!(s.is_point_mass());
        }
        let mixed = TruncationState::uniform(level);
        assert!(!mixed.is_point_mass());
    }

    #[test]
    fn trace_rep_is_faithful_isometric_with_constant_cyclic_vector() {
        let t = build_truncation(3).unwrap();
        let g = gns_of_tau(&t).unwrap();
        assert_eq!(g.hilbert_dim, 8);
        let p = t.generator(1, 0).unwrap();
        assert_eq!(g.rep_diagonal(&p).unwrap(), p.coords);
        let x = t
            .element((0..8).map(|i| BigRational::new(BigInt::from(i - 4), BigInt::from(5))).collect())
            .unwrap();
        assert_eq!(g.rep_norm(&x).unwrap(), x.sup_norm());
        assert_eq!(g.vector_value(&x).unwrap(), tau(&t, &x).unwrap());
        let xi_total: BigRational = g.xi_squared.iter().sum();
        assert!(xi_total.is_one());
        assert!(matches!(
            gns_of_tau(&build_truncation(9).unwrap()),
            Err(RussellError::LevelCap { .. })
        ));
    }

    #[test]
    fn level_one_rep_sends_first_generator_to_diag_one_zero() {
        let t = build_truncation(1).unwrap();
        let g = gns_of_tau(&t).unwrap();
        let p = t.generator(1, 0).unwrap();
        assert_eq!(g.rep_diagonal(&p).unwrap(), vec![rat(1), rat(0)]);
    }

    #[test]
    fn tensor_split_matches_generators() {
        assert!(tensor_decomposition_check(1, 1).unwrap());
        assert!(tensor_decomposition_check(2, 3).unwrap());
        assert!(tensor_decomposition_check(4, 4).unwrap());
    }

    #[test]
    fn state_validation_is_exact() {
        assert!(matches!(
            TruncationState::new(1, vec![half(), half() + half()]),
            Err(RussellError::NotAState { .. })
        ));
        assert!(matches!(
            TruncationState::new(1, vec![-half(), half() + rat(1)]),
            Err(RussellError::NotAState { reason: "negative weight" })
        ));
        assert!(TruncationState::new(1, vec![half(), half()]).is_ok());
    }
}
