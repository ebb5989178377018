//! Deterministic derivative-free optimizers used by the state machinery.
//!
//! Two tools live here. [`concave_max`] maximizes a concave function of a
//! few real variables by direction-set ascent: cyclic exact line searches
//! plus Powell-style accumulated directions, which cope with the kinks that
//! operator-norm objectives have. [`min_norm_point`] is Wolfe's algorithm
//! for the smallest-norm point of a polytope, used to separate convex hulls.
//! Both are fully deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact maximization of a concave function along a line: golden section
/// after doubling out a bracket, then recentering on the plateau of
/// near-maximal values. Concave slices can be flat on an interval; taking
/// the plateau midpoint costs at most the slack in value and is what lets
/// the ascent escape max-type kinks. Returns (t, f(x + t dir)).
fn line_max(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    dir: &[f64],
    step0: f64,
    t_tol: f64,
) -> (f64, f64) {
    let eval = |t: f64, f: &mut dyn FnMut(&[f64]) -> f64| {
        let y: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, d)| a + t * d).collect();
        f(&y)
    };
    let f0 = eval(0.0, f);

    // Bracket the maximum: expand in whichever direction improves. Expansion
    // is capped: suprema approached along a ray (norm-bound objectives can be
    // asymptotically flat) are evaluated at the cap, where the O(1/cap)
    // truncation is still far above the O(cap * eps) cancellation noise.
    const BRACKET_CAP: f64 = 1e8;
    let mut step = step0;
    let mut a;
    let mut b;
    let mut fb;
    let fp = eval(step, f);
    let fm = eval(-step, f);
    let bracket;
    if fp >= f0 && fp >= fm {
        a = 0.0;
        b = step;
        fb = fp;
        let mut found = None;
        for _ in 0..200 {
            step = b - a;
            let c = (b + step).min(BRACKET_CAP);
            if c <= b {
                found = Some((a, b));
                break;
            }
            let fc = eval(c, f);
            if fc < fb {
                found = Some((a, c));
                break;
            }
            a = b;
            b = c;
            fb = fc;
        }
        bracket = found.unwrap_or((a, b));
    } else if fm >= f0 {
        a = 0.0;
        b = -step;
        fb = fm;
        let mut found = None;
        for _ in 0..200 {
            step = b - a;
            let c = (b + step).max(-BRACKET_CAP);
            if c >= b {
                found = Some((b, a));
                break;
            }
            let fc = eval(c, f);
            if fc < fb {
                found = Some((c, a));
                break;
            }
            a = b;
            b = c;
            fb = fc;
        }
        bracket = found.unwrap_or((b, a));
    } else {
        bracket = (-step, step);
    }

    let (t_star, f_star) = golden(f, x, dir, bracket.0, bracket.1, t_tol);

    // Plateau recentering: bisect for the endpoints of {t : f(t) >= f* - slack}
    // inside the bracket and move to their midpoint. Probe first so the
    // bisections only run when a flat stretch is actually there; on smooth
    // slices the probes drop and the golden point stands.
    let slack = 1e-13 * (1.0 + f_star.abs());
    let probe = 1e-3 * (1.0 + t_star.abs());
    let flat_left = eval(t_star - probe, f) >= f_star - slack;
    let flat_right = eval(t_star + probe, f) >= f_star - slack;
    if !flat_left && !flat_right {
        return (t_star, f_star);
    }
    let mut left = t_star;
    if flat_left {
        let mut lo = bracket.0.min(t_star - probe);
        let mut hi = t_star - probe;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if eval(mid, f) >= f_star - slack {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < t_tol {
                break;
            }
        }
        left = hi;
    }
    let mut right = t_star;
    if flat_right {
        let mut lo2 = t_star + probe;
        let mut hi2 = bracket.1.max(t_star + probe);
        for _ in 0..60 {
            let mid = 0.5 * (lo2 + hi2);
            if eval(mid, f) >= f_star - slack {
                lo2 = mid;
            } else {
                hi2 = mid;
            }
            if hi2 - lo2 < t_tol {
                break;
            }
        }
        right = lo2;
    }
    let t_mid = 0.5 * (left + right);
    let f_mid = eval(t_mid, f);
    if f_mid >= f_star - slack {
        (t_mid, f_mid)
    } else {
        (t_star, f_star)
    }
}

/// Golden-section search for the maximum of a concave slice on [a, b].
fn golden(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x: &[f64],
    dir: &[f64],
    mut a: f64,
    mut b: f64,
    t_tol: f64,
) -> (f64, f64) {
    let eval = |t: f64, f: &mut dyn FnMut(&[f64]) -> f64| {
        let y: Vec<f64> = x.iter().zip(dir.iter()).map(|(v, d)| v + t * d).collect();
        f(&y)
    };
    const PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - PHI * (b - a);
    let mut d = a + PHI * (b - a);
    let mut fc = eval(c, f);
    let mut fd = eval(d, f);
    while (b - a).abs() > t_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - PHI * (b - a);
            fc = eval(c, f);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + PHI * (b - a);
            fd = eval(d, f);
        }
    }
    let t = 0.5 * (a + b);
    (t, eval(t, f))
}

/// Result of a concave maximization.
#[derive(Debug, Clone)]
pub struct MaxResult {
    pub argmax: Vec<f64>,
    pub value: f64,
}

/// Maximizes a concave function on R^k by Powell-style direction-set ascent.
///
/// `x0` is the start, `step0` the initial line-search scale. The routine
/// runs rounds of exact line maximizations along the current direction set,
/// then adds the accumulated round direction. Deterministic; cost is
/// O(rounds * k) line searches.
pub fn concave_max(
    k: usize,
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step0: f64,
    rounds: usize,
    t_tol: f64,
) -> MaxResult {
    assert_eq!(x0.len(), k);
    if k == 0 {
        return MaxResult { argmax: Vec::new(), value: f(&[]) };
    }
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut best_x = x.clone();
    let mut best_f = fx;
    // Fixed seed: the random stall-escape directions are part of the
    // deterministic contract.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba11);

    let sweep = |x: &mut Vec<f64>,
                     fx: &mut f64,
                     best_x: &mut Vec<f64>,
                     best_f: &mut f64,
                     dirs: &[Vec<f64>],
                     f: &mut dyn FnMut(&[f64]) -> f64| {
        for d in dirs {
            let (t, ft) = line_max(f, x, d, step0, t_tol);
            let slack = 1e-13 * (1.0 + fx.abs());
            // Ties are accepted: plateau recentering moves the point without
            // improving the value, which is exactly what unsticks kinks. But
            // a tie with a microscopic step is just line-search noise at a
            // kink; taking those moves masks stalls behind phantom gains.
            let significant = ft > *fx + slack || t.abs() > 1e3 * t_tol;
            if ft >= *fx - slack && significant {
                for (xi, di) in x.iter_mut().zip(d.iter()) {
                    *xi += t * di;
                }
                *fx = ft;
                if ft > *best_f {
                    *best_f = ft;
                    *best_x = x.clone();
                }
            }
        }
    };

    let coords: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut d = vec![0.0; k];
            d[i] = 1.0;
            d
        })
        .collect();

    for _round in 0..rounds {
        let x_start = x.clone();
        let f_start = fx;
        sweep(&mut x, &mut fx, &mut best_x, &mut best_f, &coords, f);

        // Pattern move: one extra line search along the net displacement of
        // the sweep picks up diagonal valleys the axes cannot follow. The
        // coordinate set itself is never replaced, so it cannot degenerate.
        let disp: Vec<f64> = x.iter().zip(x_start.iter()).map(|(a, b)| a - b).collect();
        let norm: f64 = disp.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > t_tol && k > 1 {
            let dir: Vec<f64> = disp.iter().map(|v| v / norm).collect();
            sweep(&mut x, &mut fx, &mut best_x, &mut best_f, &[dir], f);
        }

        let move_floor = 10.0 * k as f64 * t_tol;
        let dist = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
        };
        let gained = fx - f_start > 1e-15 * (1.0 + fx.abs());
        if !gained && dist(&x, &x_start) <= move_floor {
            // Stalled on the axes. Kinks of max-type objectives can block
            // every coordinate line while an oblique line still ascends, so
            // try oblique lines before concluding: pairwise diagonals when k
            // is small enough to afford them, then a few random batches.
            let mut escaped = false;
            let mut oblique: Vec<Vec<Vec<f64>>> = Vec::new();
            if k <= 12 {
                let mut diag = Vec::new();
                for i in 0..k {
                    for j in (i + 1)..k {
                        for sign in [1.0, -1.0] {
                            let mut d = vec![0.0; k];
                            d[i] = std::f64::consts::FRAC_1_SQRT_2;
                            d[j] = sign * std::f64::consts::FRAC_1_SQRT_2;
                            diag.push(d);
                        }
                    }
                }
                oblique.push(diag);
            }
            for _ in 0..3 {
                let batch: Vec<Vec<f64>> = (0..2 * k + 2)
                    .map(|_| {
                        let mut d: Vec<f64> =
                            (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let n: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if n > 0.0 {
                            for v in d.iter_mut() {
                                *v /= n;
                            }
                        } else {
                            d[0] = 1.0;
                        }
                        d
                    })
                    .collect();
                oblique.push(batch);
            }
            for batch in &oblique {
                let fx_before = fx;
                let x_before = x.clone();
                sweep(&mut x, &mut fx, &mut best_x, &mut best_f, batch, f);
                if fx - fx_before > 1e-15 * (1.0 + fx.abs())
                    || dist(&x, &x_before) > move_floor
                {
                    escaped = true;
                    break;
                }
            }
            if !escaped {
                break;
            }
        }
    }
    if fx > best_f {
        best_f = fx;
        best_x = x;
    }
    MaxResult { argmax: best_x, value: best_f }
}

/// Shrinking ellipsoid for central cuts in R^n. `p` is the shape matrix of
/// the current ellipsoid {y : (y-x) p^{-1} (y-x) <= 1}, stored dense.
struct Ellipsoid {
    n: usize,
    x: Vec<f64>,
    p: Vec<f64>,
}

impl Ellipsoid {
    fn new(n: usize, radius: f64) -> Self {
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = radius * radius;
        }
        Ellipsoid { n, x: vec![0.0; n], p }
    }

    /// Central cut keeping the half space {y : d . (y - x) <= 0}. Returns
    /// false once the ellipsoid has collapsed numerically.
    fn cut(&mut self, d: &[f64]) -> bool {
        let n = self.n;
        if n == 1 {
            // One dimension: exact interval halving.
            let r = self.p[0].sqrt();
            if !(r > 1e-300) {
                return false;
            }
            let half = 0.5 * r;
            self.x[0] -= half * d[0].signum();
            self.p[0] = half * half;
            return true;
        }
        let mut pd = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.p[i * n + j] * d[j];
            }
            pd[i] = acc;
        }
        let s2: f64 = d.iter().zip(pd.iter()).map(|(a, b)| a * b).sum();
        if !(s2 > 1e-300) || !s2.is_finite() {
            return false;
        }
        let s = s2.sqrt();
        let nf = n as f64;
        for (xi, pdi) in self.x.iter_mut().zip(pd.iter()) {
            *xi -= pdi / ((nf + 1.0) * s);
        }
        let grow = nf * nf / (nf * nf - 1.0);
        let shrink = 2.0 / (nf + 1.0) / s2;
        for i in 0..n {
            for j in 0..n {
                self.p[i * n + j] = grow * (self.p[i * n + j] - shrink * pd[i] * pd[j]);
            }
        }
        // Symmetrize to keep roundoff from accumulating a skew part.
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (self.p[i * n + j] + self.p[j * n + i]);
                self.p[i * n + j] = m;
                self.p[j * n + i] = m;
            }
        }
        true
    }
}

/// Minimizes a convex function over the ball of the given radius by the
/// ellipsoid method with subgradient cuts. The oracle returns f(x) and
/// writes a subgradient into its slot. Deterministic; accuracy is governed
/// by the iteration budget (the gap shrinks like exp(-k / (2 n (n+1)))).
pub fn ellipsoid_min_convex(
    n: usize,
    f: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
    radius: f64,
    iters: usize,
) -> (Vec<f64>, f64) {
    if n == 0 {
        let v = f(&[], &mut []);
        return (Vec::new(), v);
    }
    let mut e = Ellipsoid::new(n, radius);
    let mut grad = vec![0.0; n];
    let mut best_x = e.x.clone();
    let mut best_f = f64::INFINITY;
    for _ in 0..iters {
        let v = f(&e.x, &mut grad);
        if v < best_f {
            best_f = v;
            best_x = e.x.clone();
        }
        let gn: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn == 0.0 {
            return (e.x.clone(), v);
        }
        if !e.cut(&grad.clone()) {
            break;
        }
    }
    (best_x, best_f)
}

/// Result of a constrained linear minimization.
#[derive(Debug, Clone)]
pub struct LinearMinResult {
    pub argmin: Vec<f64>,
    pub value: f64,
}

/// Minimizes c . x over {x : g(x) <= 0, |x| <= radius} by the ellipsoid
/// method. The oracle returns g(x) and writes a subgradient; feasibility
/// cuts are applied while g > 0, objective cuts otherwise. Returns None when
/// no feasible point was visited, which certifies (numerical) infeasibility
/// at the given budget.
pub fn ellipsoid_linear_min(
    n: usize,
    c: &[f64],
    g: &mut dyn FnMut(&[f64], &mut [f64]) -> f64,
    radius: f64,
    iters: usize,
) -> Option<LinearMinResult> {
    if n == 0 {
        let gv = g(&[], &mut []);
        return if gv <= 0.0 { Some(LinearMinResult { argmin: Vec::new(), value: 0.0 }) } else { None };
    }
    let mut e = Ellipsoid::new(n, radius);
    let mut grad = vec![0.0; n];
    let mut best: Option<LinearMinResult> = None;
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    for _ in 0..iters {
        let gv = g(&e.x, &mut grad);
        let d: Vec<f64> = if gv > 0.0 {
            grad.clone()
        } else {
            let v = dot(c, &e.x);
            if best.as_ref().map_or(true, |b| v < b.value) {
                best = Some(LinearMinResult { argmin: e.x.clone(), value: v });
            }
            c.to_vec()
        };
        let dn: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if dn == 0.0 {
            break;
        }
        if !e.cut(&d) {
            break;
        }
    }
    best
}

/// Wolfe's minimum-norm-point algorithm over the convex hull of `points`.
///
/// Returns the minimizer and its convex coefficients. Terminates when the
/// support test holds up to `tol` relative to the point scale.
pub fn min_norm_point(points: &[Vec<f64>], tol: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(!points.is_empty());
    let dim = points[0].len();
    let n = points.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let scale = points
        .iter()
        .map(|p| dot(p, p).sqrt())
        .fold(0.0_f64, f64::max)
        .max(1.0);

    // Start from the shortest input point.
    let mut start = 0;
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let nn = dot(p, p);
        if nn < best {
            best = nn;
            start = i;
        }
    }
    let mut support: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];

    let current = |support: &[usize], lambda: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; dim];
        for (&i, &l) in support.iter().zip(lambda.iter()) {
            for (wd, pd) in w.iter_mut().zip(points[i].iter()) {
                *wd += l * pd;
            }
        }
        w
    };

    for _outer in 0..(10 * (n + dim) + 100) {
        let w = current(&support, &lambda);
        let wnorm2 = dot(&w, &w);
        // Most violating vertex.
        let mut j = 0;
        let mut val = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            let v = dot(&w, p);
            if v < val {
                val = v;
                j = i;
            }
        }
        if val >= wnorm2 - tol * scale * scale || wnorm2 <= (tol * scale).powi(2) {
            break;
        }
        if !support.contains(&j) {
            support.push(j);
            lambda.push(0.0);
        }

        // Inner loop: project onto the affine hull, walk back into the simplex.
        for _inner in 0..(n + dim + 10) {
            let alpha = affine_min_norm(points, &support);
            if alpha.iter().all(|&a| a > -1e-12) {
                lambda = alpha.iter().map(|&a| a.max(0.0)).collect();
                let s: f64 = lambda.iter().sum();
                for l in lambda.iter_mut() {
                    *l /= s;
                }
                break;
            }
            // Step toward alpha until the first coefficient hits zero.
            let mut theta = 1.0_f64;
            for (&l, &a) in lambda.iter().zip(alpha.iter()) {
                if a < l {
                    let t = l / (l - a);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            for (l, &a) in lambda.iter_mut().zip(alpha.iter()) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            // Drop zeroed vertices.
            let mut keep_support = Vec::new();
            let mut keep_lambda = Vec::new();
            for (&i, &l) in support.iter().zip(lambda.iter()) {
                if l > 1e-12 {
                    keep_support.push(i);
                    keep_lambda.push(l);
                }
            }
            if keep_support.is_empty() {
                keep_support.push(support[0]);
                keep_lambda.push(1.0);
            }
            support = keep_support;
            lambda = keep_lambda;
            let s: f64 = lambda.iter().sum();
            for l in lambda.iter_mut() {
                *l /= s;
            }
        }
    }

    let w = current(&support, &lambda);
    let mut full = vec![0.0; n];
    for (&i, &l) in support.iter().zip(lambda.iter()) {
        full[i] += l;
    }
    (w, full)
}

/// Minimum-norm point of the affine hull of the chosen points: solves the
/// KKT system with a bordered Gram matrix by Gaussian elimination.
fn affine_min_norm(points: &[Vec<f64>], support: &[usize]) -> Vec<f64> {
    let m = support.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    // System: [ 0   1^T ] [mu]     [1]
    //         [ 1    G  ] [alpha]  [0]
    let size = m + 1;
    let mut aug = vec![vec![0.0; size + 1]; size];
    aug[0][0] = 0.0;
    for j in 0..m {
        aug[0][j + 1] = 1.0;
        aug[j + 1][0] = 1.0;
    }
    aug[0][size] = 1.0;
    for i in 0..m {
        for j in 0..m {
            aug[i + 1][j + 1] = dot(&points[support[i]], &points[support[j]]);
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..size {
        let mut piv = col;
        for r in (col + 1)..size {
            if aug[r][col].abs() > aug[piv][col].abs() {
                piv = r;
            }
        }
        aug.swap(col, piv);
        let p = aug[col][col];
        if p.abs() < 1e-300 {
            continue;
        }
        for r in 0..size {
            if r != col {
                let factor = aug[r][col] / p;
                for cc in col..=size {
                    aug[r][cc] -= factor * aug[col][cc];
                }
            }
        }
    }
    (0..m)
        .map(|j| {
            let p = aug[j + 1][j + 1];
            if p.abs() < 1e-300 {
                0.0
            } else {
                aug[j + 1][size] / p
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_maximum() {
        // f(x) = -(x - c)^T A (x - c) with diagonal A.
        let c = [1.0, -2.0, 0.5, 3.0, -0.25];
        let mut f = |x: &[f64]| -> f64 {
            -x.iter()
                .zip(c.iter())
                .enumerate()
                .map(|(i, (xi, ci))| (1.0 + i as f64) * (xi - ci) * (xi - ci))
                .sum::<f64>()
        };
        let r = concave_max(5, &mut f, &[0.0; 5], 1.0, 60, 1e-13);
        for (got, want) in r.argmax.iter().zip(c.iter()) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert!(r.value.abs() < 1e-16);
    }

    #[test]
    fn piecewise_linear_roofline() {
        // The desk extension objective: sup_t t - max(|t - 1|, |t|) = 0.
        let mut f = |x: &[f64]| -> f64 { x[0] - (x[0] - 1.0).abs().max(x[0].abs()) };
        let r = concave_max(1, &mut f, &[0.0], 0.5, 40, 1e-13);
        assert!(r.value.abs() < 1e-12, "sup {:.3e}", r.value);
    }

    #[test]
    fn nonsmooth_chebyshev_center() {
        // Maximize -max_i |x_i - c_i|; kinks everywhere near the optimum.
        let c = [0.3, -0.7, 1.1];
        let mut f = |x: &[f64]| -> f64 {
            -x.iter()
                .zip(c.iter())
                .map(|(xi, ci)| (xi - ci).abs())
                .fold(0.0_f64, f64::max)
        };
        let r = concave_max(3, &mut f, &[0.0; 3], 1.0, 80, 1e-13);
        assert!(r.value > -1e-10, "value {:.3e}", r.value);
    }

    #[test]
    fn stalls_on_axes_escape_through_diagonal() {
        // -(|x - y| + 0.1 |x + y|) blocks both axis lines at (1, 1): only a
        // move along the diagonal improves. Maximum 0 at the origin.
        let mut f = |x: &[f64]| -> f64 { -((x[0] - x[1]).abs() + 0.1 * (x[0] + x[1]).abs()) };
        let r = concave_max(2, &mut f, &[1.0, 1.0], 1.0, 60, 1e-13);
        assert!(r.value > -1e-10, "value {:.3e}", r.value);
    }

    #[test]
    fn min_norm_simplex() {
        let pts = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let (w, coeffs) = min_norm_point(&pts, 1e-12);
        for wi in &w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-9);
        }
        for ci in &coeffs {
            assert!((ci - 1.0 / 3.0).abs() < 1e-7);
        }
    }

    #[test]
    fn min_norm_segment_off_origin() {
        let pts = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let (w, _) = min_norm_point(&pts, 1e-12);
        assert!((w[0] - 1.0).abs() < 1e-9);
        assert!(w[1].abs() < 1e-9);
    }

    #[test]
    fn min_norm_hull_contains_origin() {
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let (w, _) = min_norm_point(&pts, 1e-12);
        assert!(w[0].abs() < 1e-6 && w[1].abs() < 1e-6);
    }

    #[test]
    fn ellipsoid_linear_over_euclidean_ball() {
        // min 3x + 4y on the unit disc is -5, at (-3/5, -4/5).
        let c = [3.0, 4.0];
        let mut g = |x: &[f64], sub: &mut [f64]| -> f64 {
            sub[0] = 2.0 * x[0];
            sub[1] = 2.0 * x[1];
            x[0] * x[0] + x[1] * x[1] - 1.0
        };
        let r = ellipsoid_linear_min(2, &c, &mut g, 2.0, 4000).unwrap();
        assert!((r.value + 5.0).abs() < 1e-7, "value {:.9}", r.value);
        assert!((r.argmin[0] + 0.6).abs() < 1e-3 && (r.argmin[1] + 0.8).abs() < 1e-3);
    }

    #[test]
    fn ellipsoid_linear_polyhedral_corner() {
        // min x + y over the sup-norm unit square: -2 at the corner (-1,-1),
        // where the constraint has a kink.
        let c = [1.0, 1.0];
        let mut g = |x: &[f64], sub: &mut [f64]| -> f64 {
            let (a, b) = (x[0].abs(), x[1].abs());
            sub[0] = 0.0;
            sub[1] = 0.0;
            if a >= b {
                sub[0] = x[0].signum();
            } else {
                sub[1] = x[1].signum();
            }
            a.max(b) - 1.0
        };
        let r = ellipsoid_linear_min(2, &c, &mut g, 3.0, 6000).unwrap();
        assert!((r.value + 2.0).abs() < 1e-7, "value {:.9}", r.value);
    }

    #[test]
    fn ellipsoid_detects_infeasible() {
        let c = [1.0];
        let mut g = |x: &[f64], sub: &mut [f64]| -> f64 {
            sub[0] = 2.0 * x[0];
            x[0] * x[0] + 1.0
        };
        assert!(ellipsoid_linear_min(1, &c, &mut g, 2.0, 500).is_none());
    }

    #[test]
    fn ellipsoid_convex_min_l1() {
        // |x - a|_1 minimized over a ball containing a.
        let a = [0.3, -0.2, 0.5, 0.1];
        let mut f = |x: &[f64], sub: &mut [f64]| -> f64 {
            let mut v = 0.0;
            for i in 0..4 {
                v += (x[i] - a[i]).abs();
                sub[i] = (x[i] - a[i]).signum();
            }
            v
        };
        let (arg, v) = ellipsoid_min_convex(4, &mut f, 2.0, 8000);
        assert!(v < 1e-7, "value {v:.3e}");
        for i in 0..4 {
            assert!((arg[i] - a[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn ellipsoid_one_dimensional() {
        // min -x subject to |x| <= 1: value -1 at x = 1.
        let c = [-1.0];
        let mut g = |x: &[f64], sub: &mut [f64]| -> f64 {
            sub[0] = x[0].signum();
            x[0].abs() - 1.0
        };
        let r = ellipsoid_linear_min(1, &c, &mut g, 4.0, 300).unwrap();
        assert!((r.value + 1.0).abs() < 1e-9, "value {:.12}", r.value);
    }
}
