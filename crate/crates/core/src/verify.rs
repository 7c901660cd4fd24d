//! Seeded property suites with per-property pass counts.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_field, Tolerances};
use crate::coframe::{gauge_transform_constant, torsion_field, GridSpec, Layout};
use crate::curvature::{determinant_guards, homogeneous_blocks};
use crate::error::Result;
use crate::geometry::{
    flat_coframe, generators, numerical_rank, perturbed_coframe, pluecker_embed, second_fundamental_forms,
    segre_membership, segre_param, web_coframe, ChartFactors, SegrePoint, ThreeWeb,
};
use crate::tensor::Signature;
use crate::torsion::{
    gauge_shift, project, torsion_from_raw, transform, CoefficientSet, GaugeShift, GroupElement, RawCoefficients,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Geometry,
    Pipeline,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Largest observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
}

impl PropertyResult {
    fn new(name: &str, tolerance: f64) -> Self {
        PropertyResult {
            name: name.into(),
            trials: 0,
            passed: 0,
            worst: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, value: f64) {
        self.trials += 1;
        if value.is_nan() {
            self.worst = f64::NAN;
            return;
        }
        if !self.worst.is_nan() {
            self.worst = self.worst.max(value);
        }
        if value <= self.tolerance {
            self.passed += 1;
        }
    }

    fn check(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }

    pub fn ok(&self) -> bool {
        self.trials > 0 && self.passed == self.trials
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub reps: usize,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
}

pub fn run_suite(suite: Suite, seed: u64, reps: usize, tol: Tolerances) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let properties = match suite {
        Suite::Core => core_suite(&mut rng, reps, tol)?,
        Suite::Geometry => geometry_suite(&mut rng, reps),
        Suite::Pipeline => pipeline_suite(&mut rng, reps, tol)?,
    };
    let passed = properties.iter().all(PropertyResult::ok);
    Ok(SuiteReport {
        suite,
        seed,
        reps,
        properties,
        passed,
    })
}

fn rel(t: f64, scale: f64) -> f64 {
    t / scale.max(1.0)
}

fn core_suite(rng: &mut ChaCha8Rng, reps: usize, tol: Tolerances) -> Result<Vec<PropertyResult>> {
    let mut traces = PropertyResult::new("projection satisfies trace conditions", tol.constraint);
    let mut idem = PropertyResult::new("projection is idempotent", 1e-13);
    let mut gauge = PropertyResult::new("torsion invariant under fiber shifts", 1e-11);
    let mut decomp = PropertyResult::new("a = a_alpha + a_beta", 1e-14);
    let mut vanish = PropertyResult::new("a_alpha = 0 at p = 2, a_beta = 0 at q = 2", 1e-11);
    let mut sub = PropertyResult::new("subtensors trace-free", tol.constraint);
    let mut cov = PropertyResult::new("torsion covariant under the structure group", 1e-10);
    let mut guards = PropertyResult::new("guards equal block determinants", 0.5);
    for p in 2..=4 {
        for q in 2..=4 {
            let s = Signature::new(p, q)?;
            for _ in 0..reps {
                let u = RawCoefficients::random(s, rng);
                let scale = u.tensor().max_abs();
                let t = torsion_from_raw(&u, 1.0)?;
                let c = t.constraints;
                traces.record(rel(c.greek_trace.max(c.latin_trace).max(c.pair_antisymmetry), scale));
                let again = project(&RawCoefficients::new(t.a.clone(), 1e-12)?, CoefficientSet::Standard);
                idem.record(rel(again.max_abs_diff(&t.a)?, scale));
                let shifted = gauge_shift(&u, &GaugeShift::random(s, rng))?;
                let ts = torsion_from_raw(&shifted, 1.0)?;
                gauge.record(rel(ts.a.max_abs_diff(&t.a)?, scale));
                decomp.record(rel(c.decomposition, scale));
                let mut v: f64 = 0.0;
                if p == 2 {
                    v = v.max(t.a_alpha.max_abs());
                }
                if q == 2 {
                    v = v.max(t.a_beta.max_abs());
                }
                vanish.record(rel(v, scale));
                sub.record(rel(c.subtensor_traces, scale));
                let g = GroupElement::random(s, rng);
                let ug = RawCoefficients::antisymmetrized(&g.act(u.tensor(), 1)?)?;
                let tg = torsion_from_raw(&ug, 1.0)?;
                let expect = transform(&t.a, &g)?;
                cov.record(rel(tg.a.max_abs_diff(&expect)?, expect.max_abs()));
            }
        }
    }
    for p in 2..=6 {
        for q in 2..=6 {
            let gd = determinant_guards(Signature::new(p, q)?);
            let (sym_q, alt_q) = homogeneous_blocks(q);
            let (sym_p, alt_p) = homogeneous_blocks(p);
            for (closed, det) in [
                (gd.sym_latin, sym_q.determinant()),
                (gd.alt_latin, alt_q.determinant()),
                (gd.sym_greek, sym_p.determinant()),
                (gd.alt_greek, alt_p.determinant()),
            ] {
                guards.record((closed as f64 - det).abs());
            }
        }
    }
    Ok(vec![traces, idem, gauge, decomp, vanish, sub, cov, guards])
}

fn rand_vec(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

fn geometry_suite(rng: &mut ChaCha8Rng, reps: usize) -> Vec<PropertyResult> {
    let mut member = PropertyResult::new("parametrized points lie on the cone", 0.0);
    let mut generic = PropertyResult::new("generic matrices are not on the cone", 0.0);
    let mut forms = PropertyResult::new("second fundamental forms vanish iff on the cone", 0.0);
    let mut line = PropertyResult::new("generators meet in a common line", 0.0);
    let mut quadric = PropertyResult::new("Pluecker quadric in G(2,4)", 1e-12);
    let mut rows = PropertyResult::new("row operations rescale Pluecker coordinates", 1e-10);
    for _ in 0..reps {
        let p = rng.random_range(2..=5);
        let q = rng.random_range(2..=5);
        let t = rand_vec(p, rng);
        let s = rand_vec(q, rng);
        let z = segre_param(&t, &s);
        member.check(segre_membership(&z, 1e-10));
        let zg = DMatrix::from_fn(p, q, |_, _| rng.random_range(-1.0..1.0));
        let on = segre_membership(&SegrePoint { z: zg.clone() }, 1e-10);
        generic.check(!on);
        let zero_forms = |m: &DMatrix<f64>| {
            let scale = m.norm().powi(2).max(f64::MIN_POSITIVE);
            second_fundamental_forms(m).iter().all(|f| f.value.abs() <= 1e-12 * scale)
        };
        forms.check(zero_forms(&z.z) && zero_forms(&zg) == on);
        let (pp, qq) = generators(&t, &s);
        let both = DMatrix::from_fn(p * q, p + q, |r, c| if c < p { pp[(r, c)] } else { qq[(r, c - p)] });
        line.check(numerical_rank(&both, 1e-10) == p + q - 1);

        let b = DMatrix::from_fn(2, 4, |_, _| rng.random_range(-1.0..1.0));
        if let Ok(pt) = pluecker_embed(&b) {
            let x = &pt.coordinates;
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).powi(2).max(1.0);
            quadric.record((x[0] * x[5] - x[1] * x[4] + x[2] * x[3]).abs() / scale);
            let g = DMatrix::from_fn(2, 2, |r, c| if r == c { 1.0 } else { rng.random_range(-1.0..1.0) });
            let det = g.determinant();
            if let Ok(pg) = pluecker_embed(&(&g * &b)) {
                let err = pg
                    .coordinates
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - det * b).abs())
                    .fold(0.0, f64::max);
                rows.record(err / scale.sqrt());
            }
        }
    }
    vec![member, generic, forms, line, quadric, rows]
}

fn pipeline_suite(rng: &mut ChaCha8Rng, reps: usize, tol: Tolerances) -> Result<Vec<PropertyResult>> {
    let mut flat = PropertyResult::new("flat fixtures have vanishing torsion", tol.pipeline);
    let mut verdict = PropertyResult::new("flat fixture at (3,3) is judged flat", 0.0);
    let mut order = PropertyResult::new("flat torsion converges at second order", 0.3);
    let mut weight = PropertyResult::new("homothety scales torsion by 1/lambda", 1e-8);
    let mut cov = PropertyResult::new("constant gauge transforms act tensorially", 1e-8);
    let mut web = PropertyResult::new("three-webs have a_alpha = 0", tol.pipeline);
    for (p, q) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let s = Signature::new(p, q)?;
        let g = GridSpec::cube(s.n(), -0.3, 0.3, 9);
        let l = Layout::star(&g, 2)?;
        let f = flat_coframe(s, &g, &l, ChartFactors::Affine { amplitude: 0.1 })?;
        flat.record(torsion_field(&f, tol.constraint)?.sup_a);
        if (p, q) == (3, 3) {
            verdict.check(analyze_field(&f, tol)?.verdict.flat);
        }
    }
    {
        let s = Signature::new(2, 3)?;
        let mut g = GridSpec::cube(6, -0.2, 0.2, 9);
        let mut prev: Option<f64> = None;
        for _ in 0..4 {
            let f = flat_coframe(s, &g, &Layout::star(&g, 1)?, ChartFactors::Analytic { amplitude: 0.3 })?;
            let e = torsion_field(&f, tol.constraint)?.sup_a;
            if let Some(pe) = prev {
                order.record(((pe / e).log2() - 2.0).abs());
            }
            prev = Some(e);
            g = g.refined();
        }
    }
    for (p, q) in [(2, 3), (3, 2)] {
        let s = Signature::new(p, q)?;
        let g = GridSpec::cube(s.n(), -0.3, 0.3, 7);
        let l = Layout::star(&g, 1)?;
        let f = perturbed_coframe(s, &g, &l, 0.2)?;
        let t0 = torsion_field(&f, tol.constraint)?;
        let a0 = &t0.torsion[0].a;
        let lam = GroupElement {
            scale: 2.0,
            ..GroupElement::identity(s)
        };
        let t1 = torsion_field(&gauge_transform_constant(&f, &lam, 1e-10)?, tol.constraint)?;
        weight.record(t1.torsion[0].a.max_abs_diff(&a0.scale(0.5))? / (0.5 * a0.max_abs()));
        for _ in 0..reps.clamp(1, 10) {
            let el = GroupElement::random(s, rng);
            let tg = torsion_field(&gauge_transform_constant(&f, &el, 1e-10)?, tol.constraint)?;
            let expect = transform(a0, &el)?;
            cov.record(tg.torsion[0].a.max_abs_diff(&expect)? / expect.max_abs());
        }
    }
    for q in [2, 3] {
        let s = Signature::new(2, q)?;
        let g = GridSpec::cube(2 * q, -0.3, 0.3, 9);
        let l = Layout::star(&g, 1)?;
        for w in [ThreeWeb::Polynomial { epsilon: 0.5 }, ThreeWeb::Transcendental { epsilon: 0.5 }] {
            web.record(torsion_field(&web_coframe(s, w, &g, &l)?, tol.constraint)?.sup_alpha);
        }
    }
    Ok(vec![flat, verdict, order, weight, cov, web])
}
