//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Exits nonzero when any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cone_audit_core::geometry::{
    cone_equal, cone_included, second_order_step_oracle, tangent_step_oracle, PolyhedralCone,
    Polyhedron,
};
use cone_audit_core::kernel::{int, ratio, to_f64, RationalMatrix, RationalVector};
use cone_audit_core::objectives::fixtures::{self, FixtureConstraint, PiecewiseMonomialGradient};
use cone_audit_core::objectives::QuadraticObjective;
use cone_audit_core::optimality::{
    check_c1, check_c2_copositivity, check_qp, classical_second_order_check, critical_cone,
    theorem33_check_smooth, CopositivityConfig, CopositivityStatus, SetDescription, Verdict,
};
use cone_audit_core::ssd::{
    estimate_calmness, ssd_interval_1d_example_family, ssd_membership, theorem41_check,
    Candidates, MeshSpec, SsdQuery, Theorem41Outcome,
};

type Check = Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn core<T>(r: cone_audit_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn v(entries: &[i64]) -> RationalVector {
    RationalVector::from_ints(entries)
}

// Random corpus.

struct Instance {
    d: Polyhedron,
    x: RationalVector,
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, range: i64) -> RationalVector {
    v(&(0..n).map(|_| rng.gen_range(-range..=range)).collect::<Vec<_>>())
}

/// Random polyhedron built around a chosen point, so that the point is
/// feasible and about half of the inequality rows are active there.
fn random_instance(rng: &mut ChaCha8Rng, max_dim: usize) -> Instance {
    let n = rng.gen_range(1..=max_dim);
    let x = random_vector(rng, n, 2);
    let p = rng.gen_range(0..=8);
    let e = rng.gen_range(0..=2.min(n - 1));
    let mut ineq = Vec::new();
    let mut bounds = Vec::new();
    for _ in 0..p {
        let row = random_vector(rng, n, 3);
        let slack = if rng.gen_bool(0.5) { int(0) } else { ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)) };
        bounds.push(row.dot(&x) + slack);
        ineq.push(row);
    }
    let mut eq = Vec::new();
    let mut rhs = Vec::new();
    for _ in 0..e {
        let row = random_vector(rng, n, 2);
        rhs.push(row.dot(&x));
        eq.push(row);
    }
    let d = Polyhedron::new(
        RationalMatrix::from_rows(n, eq).unwrap(),
        RationalVector::new(rhs),
        RationalMatrix::from_rows(n, ineq).unwrap(),
        RationalVector::new(bounds),
    )
    .unwrap();
    Instance { d, x }
}

fn corpus(seed: u64, count: usize, max_dim: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, max_dim)).collect()
}

/// Random directions, biased towards the tangent cone: raw integer vectors
/// and nonnegative combinations of the cone's generators.
fn random_directions(rng: &mut ChaCha8Rng, t: &PolyhedralCone, count: usize) -> Vec<RationalVector> {
    let n = t.dim();
    let gens = t.generators().unwrap().all_directions();
    (0..count)
        .map(|i| {
            if i % 2 == 0 || gens.is_empty() {
                random_vector(rng, n, 3)
            } else {
                gens.iter().fold(RationalVector::zeros(n), |acc, g| {
                    acc.axpy(&int(rng.gen_range(0..=2)), g)
                })
            }
        })
        .collect()
}

// Criteria.

fn criterion1() -> Check {
    let d = Polyhedron::nonnegative_orthant(2);
    let x = v(&[0, 0]);
    let t = core(d.tangent_cone(&x))?;
    let t2 = core(d.second_order_tangent_set(&x, &v(&[1, 0])))?.cone;
    let half_plane = core(PolyhedralCone::from_inequalities(
        RationalMatrix::from_int_rows(2, &[&[0, -1]]).unwrap(),
    ))?;
    ensure(core(cone_equal(&t2, &half_plane))?.is_equal(), "T2 is not {w | w2 >= 0}")?;
    ensure(core(cone_equal(&t, &PolyhedralCone::nonnegative_orthant(2)))?.is_equal(), "T is not the orthant")?;
    ensure(core(cone_included(&t, &t2))?, "T is not inside T2")?;
    let cmp = core(cone_equal(&t, &t2))?;
    match cmp {
        cone_audit_core::geometry::ConeEquality::Differ { witness, in_first: false } => {
            ensure(witness == v(&[-1, 0]), format!("escape witness {witness}"))?;
            Ok(format!("T ⊊ T2, witness {witness}"))
        }
        other => Err(format!("unexpected comparison {other:?}")),
    }
}

fn criterion2() -> Check {
    let f = fixtures::ex31();
    let FixtureConstraint::Smooth(c) = &f.constraint else {
        return Err("ex31 constraint is not smooth".into());
    };
    let x = f.point("x1").unwrap();
    let r = core(theorem33_check_smooth(&f.objective, c, x, &[0.0, 1.0], 1e-9))?;
    ensure(r.first_order.holds(), "first-order does not hold")?;
    let SetDescription::Affine(t2) = &r.second_order_tangent else {
        return Err("second-order tangent set is not a half-space".into());
    };
    let expected = -6.0 / (4.0 * 3f64.sqrt());
    ensure((t2.rhs - expected).abs() <= 1e-9, format!("T2 rhs {} vs {expected}", t2.rhs))?;
    ensure(r.tangent_gradient.holds(), "gradient condition on T2 does not hold")?;
    let margin = r.classical.margin.as_ref().map(|m| m.to_f64()).unwrap_or(f64::NAN);
    ensure(r.classical.holds() && (margin - 4.0).abs() <= 1e-9, format!("classical margin {margin}"))?;
    let quad = r.curvature.margin.as_ref().map(|m| m.to_f64()).unwrap_or(f64::NAN);
    ensure(r.curvature.fails() && (quad + 2.0).abs() <= 1e-9, format!("curvature {quad}"))?;
    Ok(format!("T2 rhs {:.12}, classical margin {margin}, curvature {quad}", t2.rhs))
}

fn criterion3() -> Check {
    let f = fixtures::ex32();
    let FixtureConstraint::Smooth(c) = &f.constraint else {
        return Err("ex32 constraint is not smooth".into());
    };
    let x = f.point("x2").unwrap();
    let r = core(theorem33_check_smooth(&f.objective, c, x, &[0.0, 1.0], 1e-12))?;
    let SetDescription::Affine(t2) = &r.second_order_tangent else {
        return Err("second-order tangent set is not a hyperplane".into());
    };
    ensure((t2.rhs - 2.0).abs() <= 1e-12, format!("T2 rhs {}", t2.rhs))?;
    let lin = r.tangent_gradient.margin.as_ref().map(|m| m.to_f64()).unwrap_or(f64::NAN);
    ensure((lin - 4.0).abs() <= 1e-12, format!("gradient on T2 {lin}"))?;
    let margin = r.classical.margin.as_ref().map(|m| m.to_f64()).unwrap_or(f64::NAN);
    ensure(r.classical.holds() && (margin - 2.0).abs() <= 1e-12, format!("classical margin {margin}"))?;
    let quad = r.curvature.margin.as_ref().map(|m| m.to_f64()).unwrap_or(f64::NAN);
    ensure(r.curvature.fails() && (quad + 2.0).abs() <= 1e-12, format!("curvature {quad}"))?;
    Ok(format!("T2 rhs {}, <grad f, w> = {lin}, classical margin {margin}, curvature {quad}", t2.rhs))
}

fn criterion4() -> Check {
    let family = PiecewiseMonomialGradient::EX41;
    let interval = core(ssd_interval_1d_example_family(&family, 0.0, 1.0))?;
    ensure(interval.lower == -1.0 && interval.upper == 0.0, format!("interval {interval:?}"))?;
    let f = fixtures::ex41();
    let mesh = MeshSpec::default();
    let mut agree = 0;
    let mut total = 0;
    for dir in [0.0, 1.0, 2.0] {
        let exact = core(ssd_interval_1d_example_family(&family, 0.0, dir))?;
        for z in [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5] {
            let query = SsdQuery {
                objective: f.objective.clone(),
                point: vec![0.0],
                direction: vec![dir],
                candidate: vec![z],
            };
            let member = core(ssd_membership(&query, &mesh))?.is_member();
            total += 1;
            if member == exact.contains(z, 0.0) {
                agree += 1;
            }
        }
    }
    ensure(agree == total, format!("membership agrees on {agree}/{total}"))?;
    let report = core(theorem41_check(
        &f.objective,
        &Polyhedron::nonnegative_orthant(1),
        &v(&[0]),
        &v(&[1]),
        &Candidates::Samples(vec![vec![-1.0]]),
        &mesh,
        1e-9,
    ))?;
    ensure(report.outcome == Theorem41Outcome::HypothesisViolated, format!("outcome {:?}", report.outcome))?;
    let pairing = report.pairings[0].margin.as_ref().map(|m| m.to_f64()).unwrap_or(f64::NAN);
    ensure(pairing == -1.0, format!("<z, v> = {pairing}"))?;
    ensure(
        report.gradient_condition.as_ref().is_some_and(|r| r.holds()),
        "gradient condition on T2 does not hold",
    )?;
    let calm = core(estimate_calmness(&f.objective, &[0.0], 0.5, 10_000))?;
    ensure(calm.ell <= 1.0 + 1e-6, format!("calmness {}", calm.ell))?;
    Ok(format!(
        "interval [-1, 0], grid {agree}/{total}, <z, v> = {pairing}, calmness {:.6}",
        calm.ell
    ))
}

fn criterion5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut first = (0, 0);
    let mut second = (0, 0);
    for inst in corpus(0xc5, 200, 5) {
        let t = core(inst.d.tangent_cone(&inst.x))?;
        for dir in random_directions(&mut rng, &t, 10) {
            first.1 += 1;
            if core(tangent_step_oracle(&inst.d, &inst.x, &dir))? == core(t.contains(&dir))? {
                first.0 += 1;
            }
        }
        for g in core(t.generators())?.all_directions() {
            let t2 = core(inst.d.second_order_tangent_set(&inst.x, &g))?.cone;
            for w in random_directions(&mut rng, &t2, 4) {
                second.1 += 1;
                if core(second_order_step_oracle(&inst.d, &inst.x, &g, &w))? == core(t2.contains(&w))? {
                    second.0 += 1;
                }
            }
        }
    }
    ensure(first.0 == first.1, format!("first-order agreement {}/{}", first.0, first.1))?;
    ensure(second.0 == second.1, format!("second-order agreement {}/{}", second.0, second.1))?;
    Ok(format!(
        "tangent {}/{}, second-order tangent {}/{}",
        first.0, first.1, second.0, second.1
    ))
}

fn criterion6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut equal, mut total) = (0, 0);
    for inst in corpus(0xc5, 200, 5) {
        let t = core(inst.d.tangent_cone(&inst.x))?;
        let gens = core(t.generators())?.clone();
        let mut dirs = random_directions(&mut rng, &t, 10);
        for l in &gens.lineality {
            dirs.push(l.clone());
            dirs.push(l.axpy(&int(rng.gen_range(-2..=2)), gens.lineality.last().unwrap()));
        }
        for dir in dirs {
            if !(core(t.contains(&dir))? && core(t.contains(&dir.neg()))?) {
                continue;
            }
            total += 1;
            let plus = core(inst.d.second_order_tangent_set(&inst.x, &dir))?.cone;
            let minus = core(inst.d.second_order_tangent_set(&inst.x, &dir.neg()))?.cone;
            if core(cone_equal(&plus, &minus))?.is_equal() {
                equal += 1;
            }
        }
    }
    ensure(total > 0, "no bidirectional tangent directions in the corpus")?;
    ensure(equal == total, format!("{equal}/{total}"))?;
    Ok(format!("{equal}/{total} bidirectional directions"))
}

fn criterion7() -> Check {
    let mut ok = 0;
    for inst in corpus(0xc7, 100, 5) {
        let t = core(inst.d.tangent_cone(&inst.x))?;
        let n = core(inst.d.normal_cone(&inst.x))?;
        if core(cone_equal(&core(t.polar())?, &n))?.is_equal()
            && core(cone_equal(&core(n.polar())?, &t))?.is_equal()
        {
            ok += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bipolar = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let rows: Vec<RationalVector> = (0..rng.gen_range(0..=7)).map(|_| random_vector(&mut rng, n, 3)).collect();
        let eqs: Vec<RationalVector> = (0..rng.gen_range(0..=1)).map(|_| random_vector(&mut rng, n, 2)).collect();
        let k = core(PolyhedralCone::new(
            RationalMatrix::from_rows(n, eqs).unwrap(),
            RationalMatrix::from_rows(n, rows).unwrap(),
        ))?;
        let back = core(core(k.polar())?.polar())?;
        if core(cone_equal(&back, &k))?.is_equal()
            && core(back.generators())? == core(k.generators())?
        {
            bipolar += 1;
        }
    }
    ensure(ok == 100 && bipolar == 100, format!("polarity {ok}/100, bipolarity {bipolar}/100"))?;
    Ok(format!("polarity {ok}/100, bipolarity {bipolar}/100"))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> RationalMatrix {
    let mut entries = vec![int(0); n * n];
    for i in 0..n {
        for j in i..n {
            let value = int(rng.gen_range(-3..=3));
            entries[i * n + j] = value.clone();
            entries[j * n + i] = value;
        }
    }
    RationalMatrix::new(n, n, entries).unwrap()
}

/// Nonnegative combination of active rows plus a random equality
/// multiple: a gradient for which the first-order condition holds.
fn stationary_gradient(rng: &mut ChaCha8Rng, inst: &Instance) -> RationalVector {
    let n = inst.d.dim();
    let active = inst.d.active_set(&inst.x).unwrap().indices;
    let mut g = RationalVector::zeros(n);
    for i in active {
        g = g.axpy(&int(-rng.gen_range(0..=2)), &inst.d.ineq_matrix().row_vector(i));
    }
    for i in 0..inst.d.eq_matrix().nrows() {
        g = g.axpy(&int(rng.gen_range(-2..=2)), &inst.d.eq_matrix().row_vector(i));
    }
    g
}

fn critical_directions(k: &PolyhedralCone) -> Vec<RationalVector> {
    let gens = k.generators().unwrap();
    let mut out = gens.all_directions();
    out.push(gens.rays.iter().fold(RationalVector::zeros(k.dim()), |acc, r| acc.add(r)));
    out
}

fn criterion8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut total, mut failing_c1) = (0, 0, 0);
    for inst in corpus(0xc8, 100, 4) {
        let n = inst.d.dim();
        let m = random_symmetric(&mut rng, n);
        let grad = if rng.gen_bool(0.6) {
            stationary_gradient(&mut rng, &inst)
        } else {
            random_vector(&mut rng, n, 3)
        };
        let t = core(inst.d.tangent_cone(&inst.x))?;
        let k = core(critical_cone(&grad, &t))?;
        for dir in critical_directions(&k) {
            let t2 = core(inst.d.second_order_tangent_set(&inst.x, &dir))?.cone;
            let quad = core(m.quadratic_form(&dir))?;
            let classical = core(classical_second_order_check(&grad, &quad, &t2))?.holds();
            let c1 = core(check_c1(&grad, &t2))?.holds();
            if !c1 {
                failing_c1 += 1;
            }
            total += 1;
            if classical == (c1 && quad >= int(0)) {
                agree += 1;
            }
        }
    }
    ensure(agree == total, format!("{agree}/{total}"))?;
    Ok(format!("{agree}/{total} directions ({failing_c1} with c1 failing)"))
}

fn subsets(p: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << p)).map(move |mask| (0..p).filter(|i| mask & (1 << i) != 0).collect())
}

/// A KKT point of the convex QP by enumerating active sets, with the
/// multipliers nonnegative and the point feasible.
fn kkt_point(q: &QuadraticObjective, d: &Polyhedron) -> Option<RationalVector> {
    let n = d.dim();
    let e = d.eq_matrix().nrows();
    for s in subsets(d.inequality_count()) {
        let ineq = d.ineq_matrix().select_rows(&s);
        let m = s.len() + e;
        // [M  Cᵀ] [x]   [−q]
        // [C  0 ] [λ] = [ b]
        let size = n + m;
        let constraints = ineq.vstack(d.eq_matrix()).ok()?;
        let mut data = vec![int(0); size * size];
        let mut rhs = vec![int(0); size];
        for i in 0..n {
            for j in 0..n {
                data[i * size + j] = q.matrix().get(i, j).clone();
            }
            for r in 0..m {
                data[i * size + n + r] = constraints.get(r, i).clone();
                data[(n + r) * size + i] = constraints.get(r, i).clone();
            }
            rhs[i] = -q.linear()[i].clone();
        }
        for (r, &row) in s.iter().enumerate() {
            rhs[n + r] = d.ineq_rhs()[row].clone();
        }
        for r in 0..e {
            rhs[n + s.len() + r] = d.eq_rhs()[r].clone();
        }
        let system = RationalMatrix::new(size, size, data).ok()?;
        let Some(sol) = system.solve(&RationalVector::new(rhs)).ok()? else {
            continue;
        };
        let x = RationalVector::new(sol.as_slice()[..n].to_vec());
        let lambda_ok = sol.as_slice()[n..n + s.len()].iter().all(|l| *l >= int(0));
        if lambda_ok && d.contains(&x).ok()? {
            return Some(x);
        }
    }
    None
}

fn criterion9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let config = CopositivityConfig::default();
    let (mut verified, mut holds, mut attempts) = (0, 0, 0);
    while verified < 50 && attempts < 2000 {
        attempts += 1;
        let inst = random_instance(&mut rng, 3);
        let n = inst.d.dim();
        let b = RationalMatrix::from_rows(n, (0..n).map(|_| random_vector(&mut rng, n, 2)).collect()).unwrap();
        let m = b.transpose().mul(&b).unwrap();
        let q = QuadraticObjective::new(m, random_vector(&mut rng, n, 3), int(0)).unwrap();
        let Some(x) = kkt_point(&q, &inst.d) else {
            continue;
        };
        verified += 1;
        let report = core(check_qp(&q, &inst.d, &x, &config))?;
        if report.verdict() == Verdict::Holds {
            holds += 1;
        }
    }
    ensure(verified == 50, format!("only {verified} minimizers found in {attempts} attempts"))?;
    ensure(holds == 50, format!("{holds}/50 hold"))?;
    Ok(format!("{holds}/50 minimizers ({attempts} instances drawn)"))
}

fn criterion10() -> Check {
    let config = CopositivityConfig::default();
    let orthant = PolyhedralCone::nonnegative_orthant(2);
    let sym = |rows: &[&[i64]]| RationalMatrix::from_int_rows(2, rows).unwrap();
    let identity = core(check_c2_copositivity(&sym(&[&[1, 0], &[0, 1]]), &orthant, &config))?;
    ensure(identity.holds(), "I2 on the orthant")?;
    let swap = core(check_c2_copositivity(&sym(&[&[0, 1], &[1, 0]]), &orthant, &config))?;
    ensure(swap.holds(), "[[0,1],[1,0]] on the orthant")?;
    let indefinite = core(check_c2_copositivity(&sym(&[&[1, 0], &[0, -1]]), &orthant, &config))?;
    ensure(indefinite.fails() && core(indefinite.recheck())?, "diag(1,-1) on the orthant")?;
    let line = core(PolyhedralCone::new(
        RationalMatrix::from_int_rows(2, &[&[1, 0]]).unwrap(),
        RationalMatrix::empty(2),
    ))?;
    let m = sym(&[&[-4, 0], &[0, -2]]);
    let result = core(cone_audit_core::optimality::copositivity(&m, &line, &config))?;
    ensure(result.status == CopositivityStatus::NotCopositive, "diag(-4,-2) on {v1 = 0}")?;
    let w = result.witness.clone().ok_or("no witness")?;
    ensure(w == v(&[0, 1]) || w == v(&[0, -1]), format!("witness {w}"))?;
    ensure(core(m.quadratic_form(&w))? < int(0), "witness does not violate")?;
    Ok(format!("4/4, witness {w} with value {}", to_f64(&core(m.quadratic_form(&w))?)))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("1 second-order tangent set on the orthant", criterion1, Duration::from_secs(1)),
        ("2 level-set inequality, float regime", criterion2, Duration::from_secs(1)),
        ("3 level-set equality", criterion3, Duration::from_secs(1)),
        ("4 kink counterexample", criterion4, Duration::from_secs(5)),
        ("5 step oracles versus cone formulas", criterion5, Duration::from_secs(60)),
        ("6 second-order tangent symmetry", criterion6, Duration::from_secs(30)),
        ("7 polarity and bipolarity", criterion7, Duration::from_secs(30)),
        ("8 classical condition on cones", criterion8, Duration::from_secs(30)),
        ("9 convex QP minimizers", criterion9, Duration::from_secs(60)),
        ("10 copositivity unit set", criterion10, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let within = elapsed <= budget;
        match (&result, within) {
            (Ok(detail), true) => println!("PASS criterion {name}: {detail} [{elapsed:.2?} / {budget:?}]"),
            (Ok(detail), false) => {
                failed += 1;
                println!("FAIL criterion {name}: over time budget, {detail} [{elapsed:.2?} / {budget:?}]")
            }
            (Err(why), _) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{elapsed:.2?} / {budget:?}]")
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

