use std::fmt::Write as _;

use almost_grassmann::analysis::{Depth, FieldAnalysis, StageResiduals, Tolerances};
use almost_grassmann::coframe::GridSpec;
use almost_grassmann::curvature::{DeterminantGuards, Verdict};
use almost_grassmann::tensor::Signature;
use almost_grassmann::verify::SuiteReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

impl InputHash {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let mut hex = String::with_capacity(64);
        for b in digest.iter() {
            write!(hex, "{b:02x}").expect("writing to a string");
        }
        InputHash { path: path.into(), sha256: hex }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub inputs: Vec<InputHash>,
    pub tolerances: Tolerances,
    pub grid: Option<GridSpec>,
    pub layout: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    CoframeField,
    RawCoefficients,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeCounts {
    pub sampled: usize,
    pub torsion: usize,
    pub jet: usize,
    pub full_jet: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionNorms {
    pub a: f64,
    pub a_alpha: f64,
    pub a_beta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureNorms {
    pub b_alpha1: Option<f64>,
    pub b_alpha2: Option<f64>,
    pub b_beta1: Option<f64>,
    pub b_beta2: Option<f64>,
    pub c: Option<f64>,
}

/// Everything `analyze` writes. Contains no timestamps, so equal inputs give
/// byte-identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub signature: Signature,
    pub input: InputKind,
    pub depth: Depth,
    pub nodes: NodeCounts,
    pub residuals: StageResiduals,
    pub torsion_norms: TorsionNorms,
    pub curvature_norms: CurvatureNorms,
    pub guards: DeterminantGuards,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn new(input: InputKind, r: FieldAnalysis, provenance: Provenance) -> Self {
        let mut notes = r.notes;
        notes.extend(r.guards.notes());
        AnalysisReport {
            signature: r.signature,
            input,
            depth: r.verdict_depth,
            nodes: NodeCounts {
                sampled: r.nodes,
                torsion: r.torsion_nodes,
                jet: r.jet_nodes,
                full_jet: r.full_jet_nodes,
            },
            residuals: r.residuals,
            torsion_norms: TorsionNorms {
                a: r.norms.a,
                a_alpha: r.norms.a_alpha,
                a_beta: r.norms.a_beta,
            },
            curvature_norms: CurvatureNorms {
                b_alpha1: r.norms.b_alpha1,
                b_alpha2: r.norms.b_alpha2,
                b_beta1: r.norms.b_beta1,
                b_beta2: r.norms.b_beta2,
                c: r.norms.c,
            },
            guards: r.guards,
            verdict: r.verdict,
            notes,
            provenance,
        }
    }

    pub fn table(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
        let v = &self.verdict;
        let mut out = String::new();
        let mut line = |k: &str, val: String| {
            let _ = writeln!(out, "{k:<24} {val}");
        };
        line("signature", format!("({}, {})", self.signature.p(), self.signature.q()));
        line("depth", format!("{:?}", self.depth));
        line(
            "nodes",
            format!(
                "{} sampled, {} torsion, {} jet, {} full jet",
                self.nodes.sampled, self.nodes.torsion, self.nodes.jet, self.nodes.full_jet
            ),
        );
        line("|a|", format!("{:.3e}", self.torsion_norms.a));
        line("|a_alpha|", format!("{:.3e}", self.torsion_norms.a_alpha));
        line("|a_beta|", format!("{:.3e}", self.torsion_norms.a_beta));
        let c = &self.curvature_norms;
        line("|b_alpha1| |b_alpha2|", format!("{} {}", opt(c.b_alpha1), opt(c.b_alpha2)));
        line("|b_beta1| |b_beta2|", format!("{} {}", opt(c.b_beta1), opt(c.b_beta2)));
        line("|c|", opt(c.c));
        line("flat", format!("{} ({:?})", v.flat, v.flat_rule));
        line("alpha-semiintegrable", format!("{} ({:?})", v.alpha_semiintegrable, v.alpha_rule));
        line("beta-semiintegrable", format!("{} ({:?})", v.beta_semiintegrable, v.beta_rule));
        for n in self.notes.iter().chain(&v.notes) {
            line("note", n.clone());
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GuardReport {
    pub p: usize,
    pub q: usize,
    #[serde(flatten)]
    pub guards: DeterminantGuards,
    pub b1_unique: bool,
    pub b2_unique: bool,
    pub c_greek_route: bool,
    pub c_latin_route: bool,
    pub notes: Vec<String>,
}

impl GuardReport {
    pub fn new(s: Signature, guards: DeterminantGuards) -> Self {
        GuardReport {
            p: s.p(),
            q: s.q(),
            guards,
            b1_unique: guards.b1_unique(),
            b2_unique: guards.b2_unique(),
            c_greek_route: guards.c_greek_route(),
            c_latin_route: guards.c_latin_route(),
            notes: guards.notes(),
        }
    }

    pub fn table(&self) -> String {
        let g = &self.guards;
        let mut out = String::new();
        for (name, formula, v) in [
            ("sym_latin", "(q-1)^2 (q+2)", g.sym_latin),
            ("alt_latin", "(q+1)^2 (q-2)", g.alt_latin),
            ("sym_greek", "(p-1)^2 (p+2)", g.sym_greek),
            ("alt_greek", "(p+1)^2 (p-2)", g.alt_greek),
            ("mixed", "(p+q)^2 - 4", g.mixed),
        ] {
            let _ = writeln!(out, "{name:<10} {formula:<14} {v}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        out
    }
}

pub fn suite_table(r: &SuiteReport) -> String {
    let mut out = String::new();
    for p in &r.properties {
        let mark = if p.ok() { "ok  " } else { "FAIL" };
        let _ = writeln!(
            out,
            "{mark} {:>4}/{:<4} worst {:.2e} (tol {:.0e})  {}",
            p.passed, p.trials, p.worst, p.tolerance, p.name
        );
    }
    let _ = writeln!(out, "{}", if r.passed { "all properties passed" } else { "some properties failed" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_known_input() {
        let h = InputHash::of("x", b"abc");
        assert_eq!(h.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
