//! Acceptance criteria, one line per criterion. Criteria listed in `EXPECTED_FAIL`
//! are known to be unattainable; the run exits nonzero only on an unexpected
//! failure or an unexpected pass.

mod common;

use std::time::Instant;

use almost_grassmann::coframe::{gauge_transform_constant, torsion_field, GridSpec, Layout};
use almost_grassmann::curvature::{determinant_guards, BSolver, CRoute, CSolver, BG_SLOTS, BL_SLOTS};
use almost_grassmann::geometry::{flat_coframe, perturbed_coframe, ChartFactors, WebFixture};
use almost_grassmann::tensor::{IndexedTensor, Signature, SlotSpec};
use almost_grassmann::torsion::{gauge_shift, torsion_from_raw, GaugeShift, GroupElement, RawCoefficients};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPECTED_FAIL: [u32; 1] = [9];
const SAMPLES: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sigs() -> Vec<Signature> {
    let mut v = Vec::new();
    for p in 2..=4 {
        for q in 2..=4 {
            v.push(Signature::new(p, q).unwrap());
        }
    }
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut oracle_gap): (f64, f64) = (0.0, 0.0);
    for s in sigs() {
        for _ in 0..SAMPLES {
            let u = RawCoefficients::random(s, &mut rng);
            let t = match torsion_from_raw(&u, 1e-12) {
                Ok(t) => t,
                Err(e) => return outcome(false, format!("{s}: {e}")),
            };
            let (g, l) = common::torsion_traces(&t.a);
            worst = worst.max(g).max(l).max(common::pair_antisymmetry(&t.a));
            oracle_gap = oracle_gap.max(common::max_diff(&t.a, &common::project(u.tensor())));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-12 && oracle_gap <= 1e-12 && secs < 10.0,
        format!("max residual {worst:.1e}, gap to loop oracle {oracle_gap:.1e}, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for s in sigs() {
        for _ in 0..SAMPLES {
            let a = torsion_from_raw(&RawCoefficients::random(s, &mut rng), 1e-12).unwrap().a;
            let again = torsion_from_raw(&RawCoefficients::new(a.clone(), 1e-12).unwrap(), 1e-12).unwrap().a;
            worst = worst.max(common::max_diff(&again, &a));
        }
    }
    outcome(worst <= 1e-13, format!("max error {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut moved: f64 = f64::INFINITY;
    for s in sigs() {
        for _ in 0..SAMPLES {
            let u = RawCoefficients::random(s, &mut rng);
            let shifted = gauge_shift(&u, &GaugeShift::random(s, &mut rng)).unwrap();
            moved = moved.min(common::max_diff(shifted.tensor(), u.tensor()));
            let a0 = torsion_from_raw(&u, 1e-12).unwrap().a;
            let a1 = torsion_from_raw(&shifted, 1e-12).unwrap().a;
            worst = worst.max(common::max_diff(&a0, &a1));
        }
    }
    outcome(
        worst <= 1e-11 && moved > 1e-3,
        format!("max change {worst:.1e}, smallest raw shift {moved:.1e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut dec, mut van, mut tr, mut gap): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for s in sigs() {
        for _ in 0..SAMPLES {
            let t = torsion_from_raw(&RawCoefficients::random(s, &mut rng), 1e-12).unwrap();
            dec = dec.max(common::max_diff(&t.a_alpha.add(&t.a_beta).unwrap(), &t.a));
            let (oa, ob) = common::split(&t.a);
            gap = gap.max(common::max_diff(&oa, &t.a_alpha)).max(common::max_diff(&ob, &t.a_beta));
            if s.p() == 2 {
                van = van.max(t.a_alpha.max_abs());
            }
            if s.q() == 2 {
                van = van.max(t.a_beta.max_abs());
            }
            for sub in [&t.a_alpha, &t.a_beta] {
                let (g, l) = common::torsion_traces(sub);
                tr = tr.max(g).max(l);
            }
        }
    }
    outcome(
        dec <= 1e-14 && van <= 1e-11 && tr <= 1e-12 && gap <= 1e-14,
        format!("decomposition {dec:.1e}, low-signature subtensors {van:.1e}, subtensor traces {tr:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut mismatches = Vec::new();
    for p in 2..=6i64 {
        for q in 2..=6i64 {
            let g = determinant_guards(Signature::new(p as usize, q as usize).unwrap());
            let block = |n: i64, sym: bool| -> i64 {
                let m = if sym {
                    vec![vec![n, 1, 1], vec![1, n, 1], vec![1, 1, n]]
                } else {
                    vec![vec![-n, 1, 1], vec![-1, n, -1], vec![1, 1, -n]]
                };
                common::det_i64(&m)
            };
            let closed = [
                (q - 1) * (q - 1) * (q + 2),
                (q + 1) * (q + 1) * (q - 2),
                (p - 1) * (p - 1) * (p + 2),
                (p + 1) * (p + 1) * (p - 2),
                (p + q) * (p + q) - 4,
            ];
            let dets = [
                block(q, true),
                block(q, false),
                block(p, true),
                block(p, false),
                common::det_i64(&[vec![p + q, 2], vec![2, p + q]]),
            ];
            let got = [g.sym_latin, g.alt_latin, g.sym_greek, g.alt_greek, g.mixed];
            if got != closed || dets != closed {
                mismatches.push(format!("({p},{q})"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "25 signatures, exact".into()
        } else {
            format!("mismatch at {}", mismatches.join(" "))
        },
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = Signature::new(3, 3).unwrap();
    let solver = BSolver::new(s).unwrap();
    let space = solver.constraint_space();
    let (mut b1, mut b2) = space[0].clone();
    b1 = b1.scale(0.0);
    b2 = b2.scale(0.0);
    for (x1, x2) in &space {
        let w = rng.random_range(-1.0..1.0);
        b1 = IndexedTensor::combine(&[1.0, w], &[&b1, x1]).unwrap();
        b2 = IndexedTensor::combine(&[1.0, w], &[&b2, x2]).unwrap();
    }
    let planted_ok = common::b_condition_residual(&b1, &b2) <= 1e-12;
    let sol = solver.solve(&common::lhs_b(&b1, &b2)).unwrap();
    let b_err = common::max_diff(&sol.b1, &b1).max(common::max_diff(&sol.b2, &b2)) / b1.max_abs().max(b2.max_abs());

    let c = common::random_c(s, || rng.random_range(-1.0..1.0));
    let csol = CSolver::new(s).unwrap().solve(&common::lhs_c_greek(&c), &common::lhs_c_latin(&c)).unwrap();
    let c_err = common::max_diff(&csol.c, &c) / c.max_abs();

    let kernel_q2 = BSolver::new(Signature::new(3, 2).unwrap()).unwrap().kernel_dim();
    let s23 = Signature::new(2, 3).unwrap();
    let zero = |slots: &str| IndexedTensor::zeros(s23, SlotSpec::parse(slots).unwrap());
    let greek_disabled = CSolver::new(s23)
        .unwrap()
        .solve(&zero(BG_SLOTS), &zero(BL_SLOTS))
        .unwrap()
        .disabled_routes
        .contains(&CRoute::Greek);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        planted_ok && b_err <= 1e-9 && c_err <= 1e-9 && kernel_q2 > 0 && greek_disabled && secs < 60.0,
        format!(
            "b error {b_err:.1e}, c error {c_err:.1e}, b kernel at (3,2) {kernel_q2}, Greek c route disabled at (2,3): {greek_disabled}, {secs:.1} s"
        ),
    )
}

fn criterion_7() -> Outcome {
    let s = Signature::new(3, 3).unwrap();
    let mut g = GridSpec::cube(9, -0.2, 0.2, 9);
    let mut sups = Vec::new();
    for _ in 0..4 {
        let l = Layout::star(&g, 2).unwrap();
        let f = flat_coframe(s, &g, &l, ChartFactors::Analytic { amplitude: 0.3 }).unwrap();
        sups.push(torsion_field(&f, 1e-12).unwrap().sup_a);
        g = g.refined();
    }
    let orders: Vec<f64> = sups.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let finest = *sups.last().unwrap();
    outcome(
        orders.iter().all(|o| (o - 2.0).abs() <= 0.3) && finest <= 1e-6,
        format!(
            "sup-norms {}, orders {}",
            sups.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(" "),
            orders.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn criterion_8() -> Outcome {
    let s = Signature::new(3, 3).unwrap();
    let g = GridSpec::cube(9, -0.3, 0.3, 7);
    let f = perturbed_coframe(s, &g, &Layout::star(&g, 1).unwrap(), 0.2).unwrap();
    let lam = GroupElement {
        scale: 2.0,
        ..GroupElement::identity(s)
    };
    let a0 = torsion_field(&f, 1e-12).unwrap();
    let a1 = torsion_field(&gauge_transform_constant(&f, &lam, 1e-10).unwrap(), 1e-12).unwrap();
    let a = &a0.torsion[0].a;
    let halved = IndexedTensor::from_fn(s, a.spec().clone(), |x| 0.5 * a.get(x));
    let err = common::max_diff(&a1.torsion[0].a, &halved) / halved.max_abs();
    outcome(err <= 1e-8 && a.max_abs() > 1e-3, format!("relative error {err:.1e}, |a| = {:.2e}", a.max_abs()))
}

fn web_check(name: &str) -> (bool, String) {
    let text = std::fs::read_to_string(common::fixture(&format!("webs/{name}.json"))).unwrap();
    let fx: WebFixture = serde_json::from_str(&text).unwrap();
    let mut betas = Vec::new();
    let mut alphas = Vec::new();
    for level in 0..3 {
        let f = fx.coframe(level, 2).unwrap();
        let tf = torsion_field(&f, 1e-12).unwrap();
        let t = tf.at(&f.grid().center_index()).unwrap();
        betas.push(t.a_beta.max_abs());
        alphas.push(tf.sup_alpha);
    }
    let floor = fx.a_beta_reference.map_or(1e-6, |r| 0.9 * r);
    let ok = betas.iter().all(|b| *b >= floor) && alphas.iter().all(|a| *a <= 1e-10);
    let detail = format!(
        "{name}: |a_beta| {} (bound {floor:.1e}), |a_alpha| <= {:.1e}",
        betas.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(" "),
        alphas.iter().fold(0.0f64, |m, v| m.max(*v))
    );
    (ok, detail)
}

fn web_criterion(names: &[&str]) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for n in names {
        let (ok, d) = web_check(n);
        pass &= ok;
        details.push(d);
    }
    outcome(pass, details.join("; "))
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Outcome)> = vec![
        (1, "projection satisfies trace conditions and antisymmetry", criterion_1),
        (2, "projection is idempotent", criterion_2),
        (3, "torsion is invariant under fiber shifts", criterion_3),
        (4, "subtensor decomposition and low-signature vanishing", criterion_4),
        (5, "determinant guards match closed forms", criterion_5),
        (6, "b and c solvers recover planted values", criterion_6),
        (7, "flat model torsion converges at second order", criterion_7),
        (8, "torsion has weight -1 under homotheties", criterion_8),
        (9, "stored (2,2) three-webs keep a_beta bounded below", || {
            web_criterion(&["polynomial_q2", "transcendental_q2"])
        }),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let r = run();
        let expected_fail = EXPECTED_FAIL.contains(&id);
        let status = match (r.pass, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (expected)",
            (true, true) => {
                unexpected += 1;
                "PASS (unexpected)"
            }
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("{status} criterion {id}: {name} [{}]", r.detail);
    }
    let extra = web_criterion(&["polynomial_q3", "transcendental_q3"]);
    if !extra.pass {
        unexpected += 1;
    }
    println!(
        "{} supplementary 9 (q = 3): stored three-webs keep a_beta bounded below with a_alpha = 0 [{}]",
        if extra.pass { "PASS" } else { "FAIL" },
        extra.detail
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
