//! One runner per subcommand.
//!
//! Each runner returns the `results` payload and an ordered list of named
//! checks; the caller wraps them into the report envelope. Runners never
//! print and never read the clock, so output depends only on inputs, flags,
//! and seed.

use cstar::algebra::{self, Algebra};
use cstar::gns;
use cstar::mat::{self, CMatrix, Tol};
use cstar::projections;
use cstar::russell::{self, TruncationState};
use cstar::spectral::{self, StarPolynomial};
use cstar::states::{self, State};
use cstar::trees::{self, BranchSearch, InputSequence, Tree, WellFoundedness};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use serde_json::{json, Value};

use crate::report::Checks;
use crate::spec::ParsedSpec;

pub struct Ctx {
    pub tol: Tol,
    pub seed: u64,
    pub depth_budget: usize,
}

pub type CmdResult = Result<(Value, Checks), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn load_algebra(spec: &ParsedSpec, ctx: &Ctx) -> Result<Algebra, String> {
    algebra::generate(&spec.presentation, ctx.tol, ctx.seed).map_err(err)
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn sorted_pairs(mut zs: Vec<Complex64>) -> Vec<Value> {
    zs.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    zs.into_iter().map(pair).collect()
}

/// Hermiticity decided exactly on the rational entries of the spec file.
fn exact_hermitian(g: &[Vec<crate::spec::Quad>]) -> bool {
    let d = g.len();
    for i in 0..d {
        for j in 0..d {
            let a = g[i][j];
            let b = g[j][i];
            if Rational64::new(a[0], a[1]) != Rational64::new(b[0], b[1])
                || Rational64::new(a[2], a[3]) != -Rational64::new(b[2], b[3])
            {
                return false;
            }
        }
    }
    true
}

/// Spectra and the norm-power route to the spectral radius, per generator.
pub fn spectrum_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let mut checks = Checks::default();
    let mut gens = Vec::new();
    for (i, g) in spec.presentation.generators.iter().enumerate() {
        let x = a.element(g.clone()).map_err(err)?;
        let points = spectral::spectrum(&a, &x).map_err(err)?;
        let radius = spectral::spectral_radius_sequence(&a, &x, 16).map_err(err)?;
        let scale = 1.0 + radius.norms[0];
        checks.leq(
            format!("radius_formula_gen{i}"),
            (radius.limit_candidate - radius.max_abs_eig).abs(),
            1e-4 * scale,
        );
        if exact_hermitian(&spec.exact[i]) {
            let dyadic: Vec<f64> = [0usize, 1, 3, 7, 15].iter().map(|&k| radius.norms[k]).collect();
            let spread = dyadic.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - dyadic.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.leq(format!("selfadjoint_dyadic_norms_gen{i}"), spread, 1e-9 * scale);
        }
        let xx = a.element(g.adjoint().mul(g)).map_err(err)?;
        let xx_points = spectral::spectrum(&a, &xx).map_err(err)?;
        let off = xx_points.iter().map(|z| (-z.re).max(z.im.abs())).fold(0.0, f64::max);
        checks.leq(format!("positive_spectrum_gen{i}"), off, 1e-7 * (1.0 + scale * scale));
        gens.push(json!({
            "generator": i,
            "spectrum": sorted_pairs(points),
            "power_norms": radius.norms,
            "radius_limit": radius.limit_candidate,
            "max_abs_eigenvalue": radius.max_abs_eig,
        }));
    }
    let results = json!({
        "ambient_dim": a.ambient_dim(),
        "algebra_dim": a.dim(),
        "generators": gens,
    });
    Ok((results, checks))
}

/// Joint spectrum of the generator family, cross-checked against the
/// maximal-ideal route and against joint diagonalization.
pub fn jspec_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let xs: Vec<algebra::Element> = spec
        .presentation
        .generators
        .iter()
        .map(|g| a.element(g.clone()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let js = spectral::joint_spectrum(&a, &xs, ctx.seed).map_err(err)?;
    let oracle = spectral::IdealOracle::new(&a, &xs).map_err(err)?;
    let mut checks = Checks::default();
    let mut inside = 0usize;
    for p in &js.points {
        if oracle.contains(p).map_err(err)? {
            inside += 1;
        }
    }
    checks.push(
        "points_in_ideal_oracle",
        inside == js.points.len(),
        format!("{inside} of {} points lie in proper maximal ideals", js.points.len()),
    );
    let d = a.ambient_dim();
    for (j, x) in xs.iter().enumerate() {
        let entries: Vec<Complex64> = (0..d).map(|k| js.tuples_by_index[k][j]).collect();
        let diag = CMatrix::diag_complex(&entries);
        let rebuilt = js.unitary.mul(&diag).mul(&js.unitary.adjoint());
        let resid = rebuilt.sub(&x.matrix).max_abs();
        checks.leq(
            format!("joint_diagonalization_gen{j}"),
            resid,
            1e-6 * (1.0 + x.matrix.max_abs()),
        );
    }
    let results = json!({
        "ambient_dim": d,
        "algebra_dim": a.dim(),
        "point_count": js.points.len(),
        "points": js.points.iter().map(|p| Value::Array(p.iter().map(|&z| pair(z)).collect())).collect::<Vec<_>>(),
    });
    Ok((results, checks))
}

/// Functional calculus on the first generator: spectral mapping for a fixed
/// *-polynomial, sup-norm isometry, and the positive square root of x* x.
pub fn calculus_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let g0 = spec.presentation.generators.first().ok_or("spec lists no generators")?;
    let x = a.element(g0.clone()).map_err(err)?;
    let xs = [x];
    let mut checks = Checks::default();

    // f(z) = z^2 + (1/2) conj(z) + 1
    let f = StarPolynomial::new(
        1,
        vec![
            (Complex64::new(1.0, 0.0), vec![2], vec![0]),
            (Complex64::new(0.5, 0.0), vec![0], vec![1]),
            (Complex64::new(1.0, 0.0), vec![0], vec![0]),
        ],
    );
    let mapping = spectral::spectral_mapping_check(&a, &xs, &f, ctx.seed).map_err(err)?;
    let scale = 1.0 + mapping.lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    checks.leq("spectral_mapping_hausdorff", mapping.hausdorff, 1e-8 * scale);

    let applied =
        spectral::functional_calculus(&a, &xs, |p| Some(f.eval_points(p)), ctx.seed).map_err(err)?;
    let js = spectral::joint_spectrum(&a, &xs, ctx.seed).map_err(err)?;
    let sup = js.points.iter().map(|p| f.eval_points(p).norm()).fold(0.0, f64::max);
    let norm_applied = mat::operator_norm(&applied.matrix, ctx.tol).map_err(err)?;
    checks.leq("calculus_isometry", (norm_applied - sup).abs(), 1e-9 * (1.0 + sup));

    let p = a.element(g0.adjoint().mul(g0)).map_err(err)?;
    let root = spectral::positive_power(&a, &p, 0.5).map_err(err)?;
    let resid = root.matrix.mul(&root.matrix).sub(&p.matrix).max_abs();
    checks.leq("square_root_squares_back", resid, 1e-9 * (1.0 + p.matrix.max_abs()));
    let root_eig = mat::hermitian_eig(&root.matrix.hermitian_part(), ctx.tol).map_err(err)?;
    let min_eig = root_eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(
        "square_root_positive",
        min_eig >= -1e-9 * (1.0 + norm_applied),
        format!("min eigenvalue {min_eig:.3e}"),
    );

    let results = json!({
        "polynomial": "z^2 + (1/2) conj(z) + 1",
        "mapped_spectrum": sorted_pairs(mapping.lhs.clone()),
        "image_of_spectrum": sorted_pairs(mapping.rhs.clone()),
        "hausdorff_distance": mapping.hausdorff,
        "calculus_norm": norm_applied,
        "spectrum_sup": sup,
    });
    Ok((results, checks))
}

/// Vector states over the nonzero columns of the algebra unit; their
/// weighted sum is the candidate faithful state.
fn unit_column_states(a: &Algebra) -> Result<Vec<State>, String> {
    let u = a.unit();
    let d = a.ambient_dim();
    let mut out = Vec::new();
    for k in 0..d {
        let v = u.column(k);
        let nn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if nn > 1e-9 {
            out.push(states::vector_state(a, &v).map_err(err)?);
        }
    }
    if out.is_empty() {
        return Err("the algebra unit has no nonzero columns".into());
    }
    Ok(out)
}

/// Norm attainment through both routes, a faithful state, and its extreme
/// decomposition.
pub fn states_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let mut checks = Checks::default();
    let mut attainment = Vec::new();
    for (i, g) in spec.presentation.generators.iter().enumerate().take(4) {
        let na = states::norm_attaining_state(&a, g).map_err(err)?;
        let scale = 1.0 + na.norm_squared;
        checks.push(
            format!("state_attains_norm_gen{i}"),
            na.vector_value >= na.norm_squared * (1.0 - 1e-6) - 1e-12,
            format!("psi(x* x) = {:.12e}, ||x||^2 = {:.12e}", na.vector_value, na.norm_squared),
        );
        checks.leq(
            format!("routes_agree_gen{i}"),
            (na.vector_value - na.extension_value).abs(),
            1e-6 * scale,
        );
        checks.leq(
            format!("extension_restriction_gen{i}"),
            na.extension.restriction_residual,
            1e-12 * scale,
        );
        checks.push(
            format!("extension_norm_certified_gen{i}"),
            na.extension.certified_norm <= 1.0 + 1e-6,
            format!("dual norm {:.12}", na.extension.certified_norm),
        );
        attainment.push(json!({
            "generator": i,
            "norm_squared": na.norm_squared,
            "vector_route": na.vector_value,
            "extension_route": na.extension_value,
            "certified_dual_norm": na.extension.certified_norm,
            "extension_steps": na.extension.steps.len(),
        }));
    }

    let columns = unit_column_states(&a)?;
    let faithful = states::faithful_state(&a, &columns).map_err(err)?;
    checks.push(
        "faithful_state",
        faithful.faithful,
        format!("min block eigenvalue {:.3e}", faithful.min_block_eigenvalue),
    );
    let parts = states::krein_milman_decompose(&a, &faithful.state).map_err(err)?;
    let wsum: f64 = parts.iter().map(|(w, _)| w).sum();
    checks.leq("extreme_weights_sum_to_one", (wsum - 1.0).abs(), 1e-9);
    let d = a.ambient_dim();
    let mut recombined = CMatrix::zeros(d, d);
    for (w, s) in &parts {
        recombined = recombined.add(&s.block_canonical().scale_re(*w));
    }
    checks.leq(
        "extreme_decomposition_recombines",
        recombined.sub(faithful.state.block_canonical()).max_abs(),
        1e-8,
    );

    let results = json!({
        "algebra_dim": a.dim(),
        "attainment": attainment,
        "faithful_min_block_eigenvalue": faithful.min_block_eigenvalue,
        "extreme_components": parts.len(),
        "extreme_weights": parts.iter().map(|(w, _)| *w).collect::<Vec<f64>>(),
    });
    Ok((results, checks))
}

/// GNS representation of a faithful state, with unit, multiplicativity,
/// isometry, and vector-state checks on a basis sample.
pub fn gns_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let columns = unit_column_states(&a)?;
    let faithful = states::faithful_state(&a, &columns).map_err(err)?;
    let rep = gns::gns(&a, &faithful.state).map_err(err)?;
    let mut checks = Checks::default();

    checks.eq_usize("null_space_of_faithful_state", rep.null_dim, 0);
    let unit_rep = rep.rep(&a, a.unit()).map_err(err)?;
    checks.leq(
        "represents_unit_as_identity",
        unit_rep.sub(&CMatrix::identity(rep.hilbert_dim)).max_abs(),
        1e-9,
    );

    let sample: Vec<&CMatrix> = a.basis().iter().take(8).collect();
    let images: Vec<CMatrix> = sample
        .iter()
        .map(|b| rep.rep(&a, b))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut hom = 0.0f64;
    for (bi, ri) in sample.iter().zip(&images) {
        for (bj, rj) in sample.iter().zip(&images) {
            let prod_rep = rep.rep(&a, &bi.mul(bj)).map_err(err)?;
            hom = hom.max(prod_rep.sub(&ri.mul(rj)).max_abs());
        }
    }
    checks.leq("multiplicative_on_basis_sample", hom, 1e-9);

    let mut iso = 0.0f64;
    let mut vec_defect = 0.0f64;
    for (b, rb) in sample.iter().zip(&images) {
        let nb = mat::operator_norm(b, ctx.tol).map_err(err)?;
        let nr = mat::operator_norm(rb, ctx.tol).map_err(err)?;
        iso = iso.max((nb - nr).abs());
        vec_defect = vec_defect.max((rep.vector_value(rb) - faithful.state.value(b)).norm());
    }
    checks.leq("isometric_on_basis_sample", iso, 1e-6);
    checks.leq("cyclic_vector_recovers_state", vec_defect, 1e-9);

    let results = json!({
        "algebra_dim": a.dim(),
        "hilbert_dim": rep.hilbert_dim,
        "null_dim": rep.null_dim,
        "max_multiplicativity_defect": hom,
        "max_isometry_defect": iso,
        "max_vector_state_defect": vec_defect,
    });
    Ok((results, checks))
}

/// Characters of a commutative algebra and the quality of the transform.
pub fn gelfand_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let gt = states::gelfand_transform(&a).map_err(err)?;
    let mut checks = Checks::default();
    checks.eq_usize("character_count_equals_dim", gt.characters.len(), a.dim());
    checks.leq("transform_isometry", gt.isometry_defect, 1e-8);
    checks.leq("transform_multiplicative", gt.mult_defect, 1e-9);
    checks.leq("transform_star", gt.star_defect, 1e-9);
    let table: Vec<Value> = gt
        .table
        .iter()
        .map(|row| Value::Array(row.iter().map(|&z| pair(z)).collect()))
        .collect();
    let results = json!({
        "algebra_dim": a.dim(),
        "characters": gt.characters.len(),
        "transform_table": table,
        "isometry_defect": gt.isometry_defect,
        "mult_defect": gt.mult_defect,
        "star_defect": gt.star_defect,
    });
    Ok((results, checks))
}

/// Runs the projection-rounding scan over the unit-ball self-adjoint parts
/// of the algebra basis, then builds the flag of an eigenvector family.
pub fn projections_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let eps = 0.05f64;
    let mut items = Vec::new();
    for b in a.basis() {
        let h = b.hermitian_part();
        let n = mat::operator_norm(&h, ctx.tol).map_err(err)?;
        items.push(if n > 1.0 { h.scale_re(1.0 / n) } else { h });
    }
    let seq = projections::OperatorSequence::new(items.clone()).map_err(err)?;
    let dense = projections::dense_projections(&seq, eps, ctx.tol).map_err(err)?;
    let mut checks = Checks::default();
    let mut proj_defect = 0.0f64;
    let mut refix = 0.0f64;
    let mut distance = 0.0f64;
    for (idx, p) in &dense.emitted {
        proj_defect = proj_defect.max(p.mul(p).sub(p).max_abs()).max(p.hermitian_deviation());
        let again = projections::nearest_projection(p, ctx.tol).map_err(err)?;
        refix = refix.max(again.sub(p).max_abs());
        distance = distance.max(p.sub(&items[*idx]).max_abs());
    }
    checks.leq("emitted_are_projections", proj_defect, 1e-8);
    checks.leq("rounding_fixes_projections", refix, 1e-9);
    let band = dense
        .skipped
        .iter()
        .map(|s| (s.eigenvalue - 0.5).abs())
        .fold(0.0, f64::max);
    checks.leq("skipped_only_inside_guard_band", band, 10.0 * ctx.tol.eps);

    let g0 = spec.presentation.generators.first().ok_or("spec lists no generators")?;
    let eig = mat::hermitian_eig(&g0.hermitian_part(), ctx.tol).map_err(err)?;
    let d = a.ambient_dim();
    let rank_ones: Vec<CMatrix> = (0..d)
        .map(|k| {
            let v = eig.vectors.column(k);
            CMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj())
        })
        .collect();
    let flag = projections::flag_sequence(&rank_ones, ctx.tol).map_err(err)?;
    checks.eq_usize("flag_stabilizes_at_ambient_dim", flag.stabilization, d);
    let mut orth = 0.0f64;
    for i in 0..flag.differences.len() {
        for j in 0..i {
            orth = orth.max(flag.differences[i].mul(&flag.differences[j]).max_abs());
        }
    }
    checks.leq("flag_increments_orthogonal", orth, 1e-9);

    let results = json!({
        "scan_length": a.basis().len(),
        "gap_parameter": eps,
        "max_distance_to_source": distance,
        "emitted": dense.emitted.iter().map(|(i, _)| *i).collect::<Vec<usize>>(),
        "skipped": dense
            .skipped
            .iter()
            .map(|s| json!({"index": s.index, "eigenvalue": s.eigenvalue}))
            .collect::<Vec<Value>>(),
        "flag_stabilization": flag.stabilization,
        "flag_increments": flag.differences.len(),
    });
    Ok((results, checks))
}

fn dyadic(k: usize) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(1u64) << k)
}

fn rational_str(q: &BigRational) -> String {
    q.to_string()
}

/// Exact finite truncation at the requested level: trace values, state
/// restrictions, K-set membership, the trace representation, and the tensor
/// splitting.
pub fn russell_cmd(level: usize, _ctx: &Ctx) -> CmdResult {
    let t = russell::build_truncation(level).map_err(err)?;
    let mut checks = Checks::default();

    // Trace of a monomial depends only on how many blocks it pins.
    let subsets: Vec<Vec<usize>> = if level <= 8 {
        let mut all = Vec::with_capacity(1 << level);
        for mask in 0usize..(1 << level) {
            all.push((1..=level).filter(|b| mask >> (b - 1) & 1 == 1).collect());
        }
        all
    } else {
        (0..=level).map(|k| (1..=k).collect()).collect()
    };
    let mut tau_ok = true;
    let mut tau_detail = format!("{} monomials verified exactly", subsets.len());
    for f_set in &subsets {
        let choices: Vec<(usize, u8)> = f_set.iter().map(|&b| (b, 0u8)).collect();
        let m = t.monomial(&choices).map_err(err)?;
        let got = russell::tau(&t, &m).map_err(err)?;
        if got != dyadic(f_set.len()) {
            tau_ok = false;
            tau_detail = format!("mismatch at |F| = {}", f_set.len());
            break;
        }
    }
    checks.push("trace_dyadic_on_monomials", tau_ok, tau_detail);

    if level <= 10 {
        let mut extreme_ok = true;
        for s in 0..(1usize << level) {
            let mut st = TruncationState::point_mass(level, s).map_err(err)?;
            while st.level > 1 {
                st = russell::restrict_state(&st).map_err(err)?;
                if !st.is_point_mass() {
                    extreme_ok = false;
                }
            }
        }
        checks.push(
            "extreme_points_restrict_to_extreme_points",
            extreme_ok,
            format!("{} vertices, all levels down to 1", 1usize << level),
        );
    }

    let mut u = TruncationState::uniform(level);
    let mut uniform_ok = true;
    while u.level > 1 {
        u = russell::restrict_state(&u).map_err(err)?;
        if u.weights != TruncationState::uniform(u.level).weights {
            uniform_ok = false;
        }
    }
    checks.push("trace_state_restricts_to_trace_state", uniform_ok, "exact".into());

    // K_m membership tables for a fixed sample of states. Membership must be
    // downward closed in m.
    let mut sample: Vec<(String, TruncationState)> = vec![
        ("uniform".into(), TruncationState::uniform(level)),
        ("point_mass_0".into(), TruncationState::point_mass(level, 0).map_err(err)?),
    ];
    if level >= 2 {
        let dim = 1usize << level;
        let mut w = vec![BigRational::from_integer(BigInt::from(0)); dim];
        w[0] = dyadic(1);
        w[dim / 2] = dyadic(1);
        sample.push((
            "top_block_mix".into(),
            TruncationState::new(level, w).map_err(err)?,
        ));
    }
    let mut k_tables = Vec::new();
    for (name, st) in &sample {
        let members: Vec<bool> = (1..=level)
            .map(|m| russell::k_set_member(st, m))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let monotone = members.windows(2).all(|w| w[0] || !w[1]);
        checks.push(
            format!("k_sets_nested_{name}"),
            monotone,
            format!("membership by level: {members:?}"),
        );
        k_tables.push(json!({"state": name, "k_member": members}));
    }

    let mut rep_dim = Value::Null;
    if level <= 8 {
        let g = russell::gns_of_tau(&t).map_err(err)?;
        let mut iso = true;
        let mut vec_ok = true;
        for block in 1..=level {
            for bit in [0u8, 1] {
                let p = t.generator(block, bit).map_err(err)?;
                if g.rep_norm(&p).map_err(err)? != p.sup_norm() {
                    iso = false;
                }
                if g.vector_value(&p).map_err(err)? != russell::tau(&t, &p).map_err(err)? {
                    vec_ok = false;
                }
            }
        }
        checks.push("trace_representation_isometric", iso, "exact on generators".into());
        checks.push("trace_representation_recovers_trace", vec_ok, "exact on generators".into());
        let total: BigRational = g.xi_squared.iter().cloned().sum();
        checks.push(
            "trace_representation_unit_vector",
            total == BigRational::from_integer(BigInt::from(1)),
            format!("|xi|^2 = {}", rational_str(&total)),
        );
        rep_dim = json!(g.hilbert_dim);
    }

    if (2..=8).contains(&level) {
        let split = russell::tensor_decomposition_check(1, level - 1).map_err(err)?;
        checks.push(
            "tensor_splitting",
            split,
            format!("level {level} = 1 + {}", level - 1),
        );
    }

    let tau_table: Vec<Value> = (0..=level)
        .map(|k| json!({"pinned_blocks": k, "tau": rational_str(&dyadic(k))}))
        .collect();
    let results = json!({
        "level": level,
        "dim": t.dim(),
        "tau_by_pinned_blocks": tau_table,
        "k_membership": k_tables,
        "trace_representation_dim": rep_dim,
    });
    Ok((results, checks))
}

fn fmt_node(n: &[u64]) -> String {
    if n.is_empty() {
        "()".into()
    } else {
        n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Rank table of a finite tree listed in a file.
pub fn trees_rank_cmd(text: &str, _ctx: &Ctx) -> CmdResult {
    let t = trees::parse_nat_tree(text).map_err(err)?;
    let table = t.rank_table();
    let mut checks = Checks::default();
    checks.eq_usize("rank_decrease_violations", table.decrease_violations(), 0);
    let ranks: Vec<Value> = table
        .iter()
        .map(|(n, r)| json!({"node": fmt_node(n), "rank": r}))
        .collect();
    let results = json!({
        "node_count": t.len(),
        "depth": t.depth(),
        "root_rank": table.root_rank(),
        "ranks": ranks,
    });
    Ok((results, checks))
}

/// Well-foundedness verdict for a listed tree, under the depth budget.
pub fn trees_wellfounded_cmd(text: &str, ctx: &Ctx) -> CmdResult {
    let t = trees::parse_nat_tree(text).map_err(err)?;
    let node_count = t.len();
    let depth = t.depth();
    let verdict = trees::is_wellfounded(&Tree::Explicit(t), ctx.depth_budget).map_err(err)?;
    let mut checks = Checks::default();
    let results = match verdict {
        WellFoundedness::WellFounded(table) => {
            checks.eq_usize("rank_decrease_violations", table.decrease_violations(), 0);
            checks.push(
                "verdict_reached",
                true,
                format!("well-founded with root rank {:?}", table.root_rank()),
            );
            json!({
                "outcome": "well_founded",
                "node_count": node_count,
                "depth": depth,
                "root_rank": table.root_rank(),
            })
        }
        WellFoundedness::InfiniteBranchWitness(path) => {
            checks.push("verdict_reached", true, format!("witness {}", fmt_node(&path)));
            json!({"outcome": "infinite_branch", "witness": fmt_node(&path)})
        }
        WellFoundedness::Unknown(path) => {
            checks.push(
                "verdict_reached",
                false,
                format!("budget exhausted along {}", fmt_node(&path)),
            );
            json!({"outcome": "unknown", "frontier": fmt_node(&path)})
        }
    };
    Ok((results, checks))
}

/// Branch search through the section of a listed pair tree at an input
/// sequence. A finite listing can report exhaustion or run out of budget; it
/// can never certify an infinite branch.
pub fn trees_member_cmd(text: &str, x: &InputSequence, ctx: &Ctx) -> CmdResult {
    let t = trees::parse_pair_tree(text).map_err(err)?;
    let tree = Tree::Explicit(t);
    let outcome = trees::analytic_membership(&tree, x, ctx.depth_budget).map_err(err)?;
    let mut checks = Checks::default();
    let results = match &outcome {
        BranchSearch::WitnessBranch(path) => {
            checks.push("search_concluded", true, format!("witness {}", fmt_node(path)));
            json!({"outcome": "witness_branch", "witness": fmt_node(path)})
        }
        BranchSearch::NoBranchExhausted => {
            let section = trees::section_tree(&tree, x).map_err(err)?;
            let wf = matches!(
                trees::is_wellfounded(&section, ctx.depth_budget).map_err(err)?,
                WellFoundedness::WellFounded(_)
            );
            checks.push(
                "exhausted_section_is_wellfounded",
                wf,
                "section tree ranked without budget cutoff".into(),
            );
            json!({"outcome": "no_branch"})
        }
        BranchSearch::Unknown(path) => {
            checks.push(
                "search_concluded",
                true,
                format!("inconclusive at depth {}", path.len()),
            );
            json!({"outcome": "unknown", "frontier": fmt_node(path)})
        }
    };
    Ok((results, checks))
}

/// Full certification: structure, faithful state, GNS, representability by
/// extreme states, and the commutative transform when it applies.
pub fn certify_cmd(spec: &ParsedSpec, ctx: &Ctx) -> CmdResult {
    let a = load_algebra(spec, ctx)?;
    let mut checks = Checks::default();

    let blocks: Vec<Value> = a
        .blocks()
        .iter()
        .map(|b| json!({"size": b.size, "multiplicity": b.multiplicity}))
        .collect();
    let dim_from_blocks: usize = a.blocks().iter().map(|b| b.size * b.size).sum();
    checks.eq_usize("block_sizes_account_for_dim", dim_from_blocks, a.dim());

    let columns = unit_column_states(&a)?;
    let faithful = states::faithful_state(&a, &columns).map_err(err)?;
    checks.push(
        "faithful_state",
        faithful.faithful,
        format!("min block eigenvalue {:.3e}", faithful.min_block_eigenvalue),
    );

    let rep = gns::gns(&a, &faithful.state).map_err(err)?;
    checks.eq_usize("gns_null_space", rep.null_dim, 0);
    let mut iso = 0.0f64;
    let mut vec_defect = 0.0f64;
    for b in a.basis() {
        let rb = rep.rep(&a, b).map_err(err)?;
        let nb = mat::operator_norm(b, ctx.tol).map_err(err)?;
        let nr = mat::operator_norm(&rb, ctx.tol).map_err(err)?;
        iso = iso.max((nb - nr).abs());
        vec_defect = vec_defect.max((rep.vector_value(&rb) - faithful.state.value(b)).norm());
    }
    checks.leq("gns_isometric_on_basis", iso, 1e-6);
    checks.leq("gns_vector_state_on_basis", vec_defect, 1e-9);

    let parts = states::krein_milman_decompose(&a, &faithful.state).map_err(err)?;
    let extreme_count = parts.len();
    let mut family: Vec<State> = parts.into_iter().map(|(_, s)| s).collect();
    for b in a.basis() {
        family.push(states::norm_attaining_state(&a, b).map_err(err)?.state);
    }
    let cert = gns::representability_certificate(&a, &family, a.basis()).map_err(err)?;
    let worst = cert.entries.iter().map(|e| e.deficit).fold(f64::NEG_INFINITY, f64::max);
    checks.push(
        "norms_attained_over_state_family",
        cert.passes,
        format!("max deficit {worst:.3e} over {} elements", cert.entries.len()),
    );

    let commutative = a.is_commutative();
    if commutative {
        let gt = states::gelfand_transform(&a).map_err(err)?;
        checks.eq_usize("character_count_equals_dim", gt.characters.len(), a.dim());
        checks.leq("transform_isometry", gt.isometry_defect, 1e-8);
    }

    let results = json!({
        "ambient_dim": a.ambient_dim(),
        "algebra_dim": a.dim(),
        "commutative": commutative,
        "blocks": blocks,
        "hilbert_dim": rep.hilbert_dim,
        "extreme_components": extreme_count,
        "state_family_size": family.len(),
        "max_representability_deficit": worst,
    });
    Ok((results, checks))
}
