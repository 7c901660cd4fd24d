//! End-to-end analysis of a sampled coframe field: torsion at every interior
//! node, Pfaffian derivatives one layer further in, the second-order objects
//! where the stencil allows, and an aggregate verdict.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coframe::{b_derivative_field, pfaffian_field, torsion_field, CoframeField};
use crate::curvature::{
    derivative_residual, determinant_guards, flatness_verdict, CurvatureSolver, CurvatureSuite, DeterminantGuards,
    Rule, TorsionJet, Verdict, MAX_DENSE_N,
};
use crate::error::{Error, Result};
use crate::tensor::Signature;
use crate::torsion::{torsion_from_raw, RawCoefficients, TorsionTensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Algebraic identities (trace conditions, antisymmetry).
    pub constraint: f64,
    /// Vanishing tests on computed objects.
    pub pipeline: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            constraint: 1e-12,
            pipeline: 1e-10,
        }
    }
}

/// How much of the jet is available at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Torsion,
    TruncatedJet,
    FullJet,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct StageResiduals {
    /// Trace conditions and pair antisymmetry of the torsion, relative.
    pub torsion_constraints: f64,
    pub derivative_antisymmetry: f64,
    pub b_residual: Option<f64>,
    pub b_relative_residual: Option<f64>,
    pub c_residual: Option<f64>,
    pub c_relative_residual: Option<f64>,
}

/// Sup-norms over the nodes where each object is available.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Norms {
    pub a: f64,
    pub a_alpha: f64,
    pub a_beta: f64,
    pub b_alpha1: Option<f64>,
    pub b_alpha2: Option<f64>,
    pub b_beta1: Option<f64>,
    pub b_beta2: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldAnalysis {
    pub signature: Signature,
    pub nodes: usize,
    pub torsion_nodes: usize,
    pub jet_nodes: usize,
    pub full_jet_nodes: usize,
    pub guards: DeterminantGuards,
    pub residuals: StageResiduals,
    pub norms: Norms,
    /// Depth of the nodes the verdict is taken over.
    pub verdict_depth: Depth,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn max_opt(acc: Option<f64>, v: f64) -> Option<f64> {
    Some(acc.map_or(v, |a| a.max(v)))
}

fn merge(verdicts: Vec<Verdict>) -> Verdict {
    let mut it = verdicts.into_iter();
    let mut out = it.next().expect("at least one node");
    let mut notes: BTreeSet<String> = out.notes.drain(..).collect();
    for v in it {
        for (flag, rule, other, other_rule) in [
            (&mut out.flat, &mut out.flat_rule, v.flat, v.flat_rule),
            (&mut out.alpha_semiintegrable, &mut out.alpha_rule, v.alpha_semiintegrable, v.alpha_rule),
            (&mut out.beta_semiintegrable, &mut out.beta_rule, v.beta_semiintegrable, v.beta_rule),
        ] {
            // A definite failure anywhere outranks an undecided node.
            let take = match (*flag, other) {
                (true, false) => true,
                (false, false) => *rule == Rule::Undetermined && other_rule != Rule::Undetermined,
                (true, true) => *rule == Rule::ImpliedByFlatness,
                (false, true) => false,
            };
            if take {
                *rule = other_rule;
            }
            *flag &= other;
        }
        for (k, r) in v.residuals {
            let e = out.residuals.entry(k).or_insert(0.0);
            *e = e.max(r);
        }
        notes.extend(v.notes);
    }
    out.notes = notes.into_iter().collect();
    out
}

/// Verdict from the torsion alone where the flatness test needs second-order
/// objects: only definite failures are decided.
fn torsion_only(t: &TorsionTensor, tol: f64) -> Verdict {
    let s = t.signature();
    let (a, a_alpha, a_beta) = (t.a.max_abs(), t.a_alpha.max_abs(), t.a_beta.max_abs());
    let decide = |norm: f64, applies: bool, rule: Rule| {
        if applies && norm > tol { rule } else { Rule::Undetermined }
    };
    let mut notes = vec!["semiintegrability undetermined without second-order objects".to_string()];
    if a <= tol {
        notes.push(format!("flatness in signature {s} undetermined without second-order objects"));
    }
    Verdict {
        flat: false,
        alpha_semiintegrable: false,
        beta_semiintegrable: false,
        flat_rule: decide(a, true, Rule::TorsionAndCurvature),
        alpha_rule: decide(a_alpha, s.p() > 2, Rule::AlphaFirstAndSecondOrder),
        beta_rule: decide(a_beta, s.q() > 2, Rule::BetaFirstAndSecondOrder),
        tolerance: tol,
        residuals: [("a", a), ("a_alpha", a_alpha), ("a_beta", a_beta)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        notes,
    }
}

fn torsion_tier(torsion: &[TorsionTensor], tol: f64) -> Result<Verdict> {
    let vs = torsion
        .iter()
        .map(|t| match flatness_verdict(t, None, tol) {
            Err(Error::InsufficientData(_)) => Ok(torsion_only(t, tol)),
            v => v,
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(vs))
}

/// Analysis of raw structure coefficients at a single point: the torsion and
/// whatever the torsion alone decides.
pub fn analyze_raw(u: &RawCoefficients, tol: Tolerances) -> Result<FieldAnalysis> {
    let s = u.signature();
    let t = torsion_from_raw(u, tol.constraint)?;
    let norms = Norms {
        a: t.a.max_abs(),
        a_alpha: t.a_alpha.max_abs(),
        a_beta: t.a_beta.max_abs(),
        ..Default::default()
    };
    let residuals = StageResiduals {
        torsion_constraints: t.constraints.max(),
        ..Default::default()
    };
    let verdict = torsion_tier(std::slice::from_ref(&t), tol.pipeline)?;
    Ok(FieldAnalysis {
        signature: s,
        nodes: 1,
        torsion_nodes: 1,
        jet_nodes: 0,
        full_jet_nodes: 0,
        guards: determinant_guards(s),
        residuals,
        norms,
        verdict_depth: Depth::Torsion,
        verdict,
        notes: vec!["single point: no derivatives available".into()],
    })
}

/// Runs the full pipeline on a field.
pub fn analyze_field(f: &CoframeField, tol: Tolerances) -> Result<FieldAnalysis> {
    let s = f.signature();
    let guards = determinant_guards(s);
    let mut notes = Vec::new();
    let tf = torsion_field(f, tol.constraint)?;
    if tf.nodes.is_empty() {
        return Err(Error::GridTooCoarse("no node has a full central-difference stencil".into()));
    }
    let mut residuals = StageResiduals {
        torsion_constraints: tf.torsion.iter().map(|t| t.constraints.max()).fold(0.0, f64::max),
        ..Default::default()
    };
    let mut norms = Norms {
        a: tf.sup_a,
        a_alpha: tf.sup_alpha,
        a_beta: tf.sup_beta,
        ..Default::default()
    };

    let jets = match pfaffian_field(&tf, f) {
        Ok(j) => j,
        Err(Error::GridTooCoarse(msg)) => {
            notes.push(format!("no Pfaffian derivatives: {msg}"));
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    for (_, j) in &jets {
        residuals.derivative_antisymmetry = residuals.derivative_antisymmetry.max(derivative_residual(&j.derivative)?);
    }

    let jet_nodes = jets.len();
    let mut full_jet_nodes = 0;
    let mut suites: Vec<(Depth, TorsionJet, CurvatureSuite)> = Vec::new();
    if !jets.is_empty() && s.n() > MAX_DENSE_N {
        notes.push(format!("second-order objects skipped: pq = {} exceeds {MAX_DENSE_N}", s.n()));
    } else if !jets.is_empty() {
        let solver = CurvatureSolver::new(s)?;
        let first = crate::par::map(&jets, |(_, j)| solver.suite(j))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let nodes: Vec<Vec<usize>> = jets.iter().map(|(n, _)| n.clone()).collect();
        let b: Vec<_> = first.iter().map(|su| (su.b1.clone(), su.b2.clone())).collect();
        let bder = b_derivative_field(f, &nodes, &b)?;
        full_jet_nodes = bder.len();
        if bder.is_empty() {
            notes.push("c not computed: derivatives of b need one more interior layer".into());
            for ((_, j), mut su) in jets.into_iter().zip(first) {
                su.c = None;
                su.c_diagnostics = None;
                su.c_routes.clear();
                su.notes.retain(|n| !n.starts_with("truncated jet") && !n.starts_with("c solution"));
                suites.push((Depth::TruncatedJet, j, su));
            }
        } else {
            let full = crate::par::map(&bder, |(node, bg, bl)| -> Result<(Depth, TorsionJet, CurvatureSuite)> {
                let (_, j) = jets.iter().find(|(n, _)| n == node).expect("jet node");
                let j = j.clone().with_b_derivative(bg.clone(), bl.clone())?;
                let su = solver.suite(&j)?;
                Ok((Depth::FullJet, j, su))
            });
            for r in full {
                suites.push(r?);
            }
        }
        notes.push("b and c are gauge-approximate: Pfaffian derivatives omit the connection correction".into());
    }

    let (verdict_depth, verdict) = if suites.is_empty() {
        (Depth::Torsion, torsion_tier(&tf.torsion, tol.pipeline)?)
    } else {
        for (_, _, su) in &suites {
            let so = su.semi_objects()?;
            norms.b_alpha1 = max_opt(norms.b_alpha1, so.b_alpha1.max_abs());
            norms.b_alpha2 = max_opt(norms.b_alpha2, so.b_alpha2.max_abs());
            norms.b_beta1 = max_opt(norms.b_beta1, so.b_beta1.max_abs());
            norms.b_beta2 = max_opt(norms.b_beta2, so.b_beta2.max_abs());
            residuals.b_residual = max_opt(residuals.b_residual, su.b_diagnostics.residual);
            residuals.b_relative_residual = max_opt(residuals.b_relative_residual, su.b_diagnostics.relative_residual);
            if let Some(c) = &su.c {
                norms.c = max_opt(norms.c, c.max_abs());
            }
            if let Some(d) = &su.c_diagnostics {
                residuals.c_residual = max_opt(residuals.c_residual, d.residual);
                residuals.c_relative_residual = max_opt(residuals.c_relative_residual, d.relative_residual);
            }
        }
        let vs = suites
            .iter()
            .map(|(_, j, su)| flatness_verdict(&j.torsion, Some(su), tol.pipeline))
            .collect::<Result<Vec<_>>>()?;
        let mut v = merge(vs);
        for (_, _, su) in &suites {
            v.notes.extend(su.notes.iter().cloned());
        }
        v.notes.sort();
        v.notes.dedup();
        (suites[0].0, v)
    };

    Ok(FieldAnalysis {
        signature: s,
        nodes: f.nodes().len(),
        torsion_nodes: tf.nodes.len(),
        jet_nodes,
        full_jet_nodes,
        guards,
        residuals,
        norms,
        verdict_depth,
        verdict,
        notes,
    })
}
