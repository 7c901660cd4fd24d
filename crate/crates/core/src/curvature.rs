//! Second-order objects and the integrability tests.
//!
//! The objects `b¹`, `b²` and `c` are recovered from the Pfaffian derivatives
//! of the torsion by solving the linear systems obtained from prolongation.
//! The systems are assembled in reduced coordinates (one unknown per
//! independent component) and solved by constrained least squares; the
//! singular values of the restricted operator decide uniqueness.
//!
//! Layouts:
//!
//! | object | slots | antisymmetric pairs |
//! |---|---|---|
//! | Pfaffian derivative `a'`, `A` | `(i, β, γ, δ; α, j, k, l)` | `(β j), (γ k), (δ l)` after alternation |
//! | `b²` | `(β, γ, δ; α, k, l)` | `(γ k), (δ l)` |
//! | `b¹` | `(i, γ, δ; j, k, l)` | `(γ k), (δ l)` |
//! | `c` | `(α, β, γ; i, j, k)` | `(α i), (β j), (γ k)` |
//! | `B_G` | `(β, γ, δ, ε; α, k, l, m)` | `(γ k), (δ l), (ε m)` |
//! | `B_L` | `(i, γ, δ, ε; j, k, l, m)` | `(γ k), (δ l), (ε m)` |

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lsq::{ConstrainedSolver, SolveDiagnostics};
use crate::tensor::{Alphabet, IndexedTensor, Signature, SlotSpec};
use crate::torsion::TorsionTensor;

pub const JET_SLOTS: &str = "L^ G^ G^ G^ G_ L_ L_ L_";
pub const B2_SLOTS: &str = "G^ G^ G^ G_ L_ L_";
pub const B1_SLOTS: &str = "L^ G^ G^ L_ L_ L_";
pub const C_SLOTS: &str = "G^ G^ G^ L_ L_ L_";
pub const BG_SLOTS: &str = "G^ G^ G^ G^ G_ L_ L_ L_";
pub const BL_SLOTS: &str = "L^ G^ G^ G^ L_ L_ L_ L_";

/// Pairs alternated in the eight-slot objects.
pub const TRIPLE: [(usize, usize); 3] = [(1, 5), (2, 6), (3, 7)];
const B_PAIRS: [(usize, usize); 2] = [(1, 4), (2, 5)];
const C_PAIRS: [(usize, usize); 3] = [(0, 3), (1, 4), (2, 5)];

/// Largest signature handled by the dense solvers.
pub const MAX_DENSE_N: usize = 10;

fn spec(s: &str) -> SlotSpec {
    SlotSpec::parse(s).expect("static slot spec")
}

fn check(t: &IndexedTensor, s: &str, what: &str) -> Result<()> {
    if *t.spec() != spec(s) {
        return Err(Error::SpecMismatch(format!("{what}: expected {s}, found {}", t.spec())));
    }
    Ok(())
}

fn alt3(t: &IndexedTensor) -> IndexedTensor {
    t.alternate_vertical_pairs(&TRIPLE).expect("eight-slot object")
}

/// Torsion together with its first Pfaffian derivatives at one point.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionJet {
    pub torsion: TorsionTensor,
    /// `a'^{iβγδ}_{αjkl}`: derivative of `a^{iβγ}_{αjk}` along the form `ω^l_δ`.
    pub derivative: IndexedTensor,
    /// Pfaffian derivatives of `(b²,b¹)` along `ω^m_ε`, slots as `B_G` and `B_L`.
    /// Absent in a truncated jet, where they are taken as zero.
    pub b_derivative: Option<(IndexedTensor, IndexedTensor)>,
}

impl TorsionJet {
    pub fn new(torsion: TorsionTensor, derivative: IndexedTensor) -> Result<Self> {
        check(&derivative, JET_SLOTS, "torsion derivative")?;
        torsion.signature().check_same(&derivative.signature())?;
        Ok(TorsionJet {
            torsion,
            derivative,
            b_derivative: None,
        })
    }

    pub fn with_b_derivative(mut self, greek: IndexedTensor, latin: IndexedTensor) -> Result<Self> {
        check(&greek, BG_SLOTS, "b² derivative")?;
        check(&latin, BL_SLOTS, "b¹ derivative")?;
        self.b_derivative = Some((greek, latin));
        Ok(self)
    }

    pub fn signature(&self) -> Signature {
        self.torsion.signature()
    }

    pub fn is_truncated(&self) -> bool {
        self.b_derivative.is_none()
    }
}

/// Determinants of the homogeneous blocks met while solving for `b` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeterminantGuards {
    /// `(q-1)²(q+2)`
    pub sym_latin: i64,
    /// `(q+1)²(q-2)`
    pub alt_latin: i64,
    /// `(p-1)²(p+2)`
    pub sym_greek: i64,
    /// `(p+1)²(p-2)`
    pub alt_greek: i64,
    /// `(p+q)² - 4`
    pub mixed: i64,
}

pub fn determinant_guards(s: Signature) -> DeterminantGuards {
    let (p, q) = (s.p() as i64, s.q() as i64);
    DeterminantGuards {
        sym_latin: (q - 1) * (q - 1) * (q + 2),
        alt_latin: (q + 1) * (q + 1) * (q - 2),
        sym_greek: (p - 1) * (p - 1) * (p + 2),
        alt_greek: (p + 1) * (p + 1) * (p - 2),
        mixed: (p + q) * (p + q) - 4,
    }
}

impl DeterminantGuards {
    /// `b²` is determined uniquely.
    pub fn b2_unique(&self) -> bool {
        self.alt_latin != 0
    }

    /// `b¹` is determined uniquely.
    pub fn b1_unique(&self) -> bool {
        self.alt_greek != 0
    }

    pub fn c_greek_route(&self) -> bool {
        self.alt_greek != 0
    }

    pub fn c_latin_route(&self) -> bool {
        self.alt_latin != 0
    }

    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if !self.b2_unique() {
            notes.push("b² route non-unique (q = 2)".to_string());
            notes.push("c Latin route disabled".to_string());
        }
        if !self.b1_unique() {
            notes.push("b¹ route non-unique (p = 2)".to_string());
            notes.push("c Greek route disabled".to_string());
        }
        notes
    }
}

/// Symmetric and alternating 3x3 blocks of the homogeneous cyclic system in
/// range `n`: the three cyclic arrangements of a three-index object, split by
/// the symmetry of the remaining index pair.
pub fn homogeneous_blocks(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = n as f64;
    let sym = DMatrix::from_row_slice(3, 3, &[n, 1.0, 1.0, 1.0, n, 1.0, 1.0, 1.0, n]);
    let alt = DMatrix::from_row_slice(3, 3, &[-n, 1.0, 1.0, -1.0, n, -1.0, 1.0, 1.0, -n]);
    (sym, alt)
}

/// `A = -Alt(a') - 2 Alt(a^{iβε}_{αjm} a^{mγδ}_{εkl})`.
pub fn assemble_a(jet: &TorsionJet) -> Result<IndexedTensor> {
    let a = &jet.torsion.a;
    let quad = a
        .contract_with(a, &[(2, 3), (5, 0)])?
        .permute(&[0, 1, 4, 5, 2, 3, 6, 7])?;
    IndexedTensor::combine(&[-1.0, -2.0], &[&alt3(&jet.derivative), &alt3(&quad)])
}

/// The linear operator `(b¹, b²) ↦ Alt(δ^i_j b²^{βγδ}_{αkl} - δ^β_α b¹^{iγδ}_{jkl})`.
pub fn lhs_b(b1: &IndexedTensor, b2: &IndexedTensor) -> Result<IndexedTensor> {
    check(b1, B1_SLOTS, "b¹")?;
    check(b2, B2_SLOTS, "b²")?;
    let s = b1.signature();
    let dl = IndexedTensor::delta(s, Alphabet::Latin);
    let dg = IndexedTensor::delta(s, Alphabet::Greek);
    let t2 = dl.tensor_product(b2)?.permute(&[0, 2, 3, 4, 5, 1, 6, 7])?;
    let t1 = dg.tensor_product(b1)?.permute(&[2, 0, 3, 4, 1, 5, 6, 7])?;
    Ok(alt3(&t2.sub(&t1)?))
}

/// Residuals of the linear conditions on `(b¹, b²)`: pair antisymmetry,
/// vanishing traces and the normalization of the mixed trace.
pub fn b_constraints(b1: &IndexedTensor, b2: &IndexedTensor) -> Result<Vec<IndexedTensor>> {
    check(b1, B1_SLOTS, "b¹")?;
    check(b2, B2_SLOTS, "b²")?;
    let w = b2.contract(1, 3)?.sub(&b1.contract(0, 4)?)?;
    Ok(vec![
        b2.add(&b2.swap_pairs(B_PAIRS[0], B_PAIRS[1])?)?,
        b1.add(&b1.swap_pairs(B_PAIRS[0], B_PAIRS[1])?)?,
        b2.contract(0, 3)?,
        b1.contract(0, 3)?,
        w.add(&w.permute(&[1, 0, 3, 2])?)?,
    ])
}

/// One unknown per independent component of a tensor antisymmetric under
/// exchanging two vertical pairs.
struct PairParams {
    template: IndexedTensor,
    /// For each component: `(unknown, sign)` or `None` on the pair diagonal.
    map: Vec<Option<(usize, f64)>>,
    count: usize,
}

impl PairParams {
    fn new(template: IndexedTensor, a: (usize, usize), b: (usize, usize)) -> Self {
        let s = template.signature();
        let q = s.q();
        let mut map = vec![None; template.len()];
        let mut count = 0;
        let mut pending = Vec::new();
        template.for_each_index(|idx, flat| {
            let pa = idx[a.0] * q + idx[a.1];
            let pb = idx[b.0] * q + idx[b.1];
            if pa < pb {
                map[flat] = Some((count, 1.0));
                count += 1;
            } else if pa > pb {
                let mut sw = idx.to_vec();
                sw.swap(a.0, b.0);
                sw.swap(a.1, b.1);
                pending.push((flat, template.offset(&sw)));
            }
        });
        for (flat, partner) in pending {
            let (k, _) = map[partner].expect("partner has lower pair order");
            map[flat] = Some((k, -1.0));
        }
        PairParams { template, map, count }
    }

    fn expand(&self, x: &[f64]) -> IndexedTensor {
        let mut t = self.template.clone();
        for (v, m) in t.components_mut().iter_mut().zip(&self.map) {
            *v = m.map_or(0.0, |(k, sgn)| sgn * x[k]);
        }
        t
    }

    fn unit(&self, k: usize) -> IndexedTensor {
        let mut t = self.template.clone();
        for (v, m) in t.components_mut().iter_mut().zip(&self.map) {
            *v = match m {
                Some((j, sgn)) if *j == k => *sgn,
                _ => 0.0,
            };
        }
        t
    }

    #[cfg(test)]
    fn reduce(&self, t: &IndexedTensor) -> Vec<f64> {
        let mut x = vec![0.0; self.count];
        for (v, m) in t.components().iter().zip(&self.map) {
            if let Some((k, sgn)) = m {
                if *sgn > 0.0 {
                    x[*k] = *v;
                }
            }
        }
        x
    }
}

/// Components of an eight-slot object with strictly increasing pairs; for a
/// tensor alternating in the three pairs these determine all others.
fn triple_rows(template: &IndexedTensor) -> Vec<usize> {
    let q = template.signature().q();
    let mut rows = Vec::new();
    template.for_each_index(|idx, flat| {
        let ord: Vec<usize> = TRIPLE.iter().map(|&(g, l)| idx[g] * q + idx[l]).collect();
        if ord[0] < ord[1] && ord[1] < ord[2] {
            rows.push(flat);
        }
    });
    rows
}

fn check_size(s: Signature) -> Result<()> {
    if s.n() > MAX_DENSE_N {
        return Err(Error::SystemTooLarge(format!(
            "dense second-order solvers support pq <= {MAX_DENSE_N}, got pq = {}",
            s.n()
        )));
    }
    Ok(())
}

fn gather(t: &IndexedTensor, rows: &[usize]) -> DVector<f64> {
    DVector::from_iterator(rows.len(), rows.iter().map(|&r| t.components()[r]))
}

fn flatten(parts: &[IndexedTensor]) -> Vec<f64> {
    parts.iter().flat_map(|t| t.components().iter().copied()).collect()
}

fn columns<F: Fn(usize) -> (Vec<f64>, Vec<f64>) + Sync + Send>(n: usize, f: F) -> Vec<(Vec<f64>, Vec<f64>)> {
    let ks: Vec<usize> = (0..n).collect();
    crate::par::map(&ks, |&k| f(k))
}

fn assemble(cols: Vec<(Vec<f64>, Vec<f64>)>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = cols.len();
    let rows_op = cols.first().map_or(0, |c| c.0.len());
    let rows_cons = cols.first().map_or(0, |c| c.1.len());
    let mut op = DMatrix::zeros(rows_op, n);
    let mut cons = DMatrix::zeros(rows_cons, n);
    for (k, (o, c)) in cols.into_iter().enumerate() {
        op.set_column(k, &DVector::from_vec(o));
        cons.set_column(k, &DVector::from_vec(c));
    }
    (op, cons)
}

#[derive(Debug, Clone, Serialize)]
pub struct BSolution {
    pub b1: IndexedTensor,
    pub b2: IndexedTensor,
    pub diagnostics: SolveDiagnostics,
}

/// Factorized `b` system for one signature.
pub struct BSolver {
    p1: PairParams,
    p2: PairParams,
    rows: Vec<usize>,
    solver: ConstrainedSolver,
}

impl BSolver {
    pub fn new(s: Signature) -> Result<Self> {
        check_size(s)?;
        let p1 = PairParams::new(IndexedTensor::zeros(s, spec(B1_SLOTS)), B_PAIRS[0], B_PAIRS[1]);
        let p2 = PairParams::new(IndexedTensor::zeros(s, spec(B2_SLOTS)), B_PAIRS[0], B_PAIRS[1]);
        let rows = triple_rows(&IndexedTensor::zeros(s, spec(JET_SLOTS)));
        let (n1, n2) = (p1.count, p2.count);
        let zero1 = p1.template.clone();
        let zero2 = p2.template.clone();
        let cols = columns(n1 + n2, |k| {
            let (b1, b2) = if k < n1 {
                (p1.unit(k), zero2.clone())
            } else {
                (zero1.clone(), p2.unit(k - n1))
            };
            let l = lhs_b(&b1, &b2).expect("b layouts");
            let op: Vec<f64> = rows.iter().map(|&r| l.components()[r]).collect();
            (op, flatten(&b_constraints(&b1, &b2).expect("b layouts")))
        });
        let (op, cons) = assemble(cols);
        Ok(BSolver {
            p1,
            p2,
            rows,
            solver: ConstrainedSolver::new(op, &cons),
        })
    }

    fn split(&self, x: &[f64]) -> (IndexedTensor, IndexedTensor) {
        let n1 = self.p1.count;
        (self.p1.expand(&x[..n1]), self.p2.expand(&x[n1..]))
    }

    /// Solves `lhs_b(b¹, b²) = rhs` under the linear conditions of [`b_constraints`].
    pub fn solve(&self, rhs: &IndexedTensor) -> Result<BSolution> {
        check(rhs, JET_SLOTS, "b right-hand side")?;
        self.p1.template.signature().check_same(&rhs.signature())?;
        let (x, diagnostics) = self.solver.solve(&gather(rhs, &self.rows));
        let (b1, b2) = self.split(x.as_slice());
        Ok(BSolution { b1, b2, diagnostics })
    }

    /// Basis of homogeneous solutions `(b¹, b²)`.
    pub fn kernel(&self) -> Vec<(IndexedTensor, IndexedTensor)> {
        let k = self.solver.kernel();
        (0..k.ncols()).map(|j| self.split(k.column(j).as_slice())).collect()
    }

    pub fn kernel_dim(&self) -> usize {
        self.solver.kernel_dim()
    }

    /// Basis of the space cut out by the linear conditions alone.
    pub fn constraint_space(&self) -> Vec<(IndexedTensor, IndexedTensor)> {
        let z = self.solver.null_space();
        (0..z.ncols()).map(|j| self.split(z.column(j).as_slice())).collect()
    }
}

pub fn solve_b(rhs: &IndexedTensor) -> Result<BSolution> {
    BSolver::new(rhs.signature())?.solve(rhs)
}

/// Right-hand sides `(B_G, B_L)` of the `c` equations.
pub fn assemble_b(jet: &TorsionJet, b1: &IndexedTensor, b2: &IndexedTensor) -> Result<(IndexedTensor, IndexedTensor)> {
    check(b1, B1_SLOTS, "b¹")?;
    check(b2, B2_SLOTS, "b²")?;
    let s = jet.signature();
    let (p, q) = (s.p() as f64, s.q() as f64);
    let k = (p + q) / (p * q);
    let a = &jet.torsion.a;
    let (dg, dl) = match &jet.b_derivative {
        Some((g, l)) => (g.clone(), l.clone()),
        None => (
            IndexedTensor::zeros(s, spec(BG_SLOTS)),
            IndexedTensor::zeros(s, spec(BL_SLOTS)),
        ),
    };
    let qg = b2
        .contract_with(a, &[(2, 3), (5, 0)])?
        .permute(&[0, 1, 4, 5, 2, 3, 6, 7])?;
    let greek = IndexedTensor::combine(&[k, -2.0 * k], &[&alt3(&dg), &alt3(&qg)])?;
    let ql = b1
        .contract_with(a, &[(1, 3), (4, 0)])?
        .permute(&[0, 4, 5, 1, 2, 6, 7, 3])?;
    let latin = IndexedTensor::combine(&[-k, -2.0 * k], &[&alt3(&dl), &alt3(&ql)])?;
    Ok((greek, latin))
}

/// `c ↦ Alt(δ^ε_α c^{βγδ}_{mkl})`, layout of `B_G`.
pub fn lhs_c_greek(c: &IndexedTensor) -> Result<IndexedTensor> {
    check(c, C_SLOTS, "c")?;
    let d = IndexedTensor::delta(c.signature(), Alphabet::Greek);
    Ok(alt3(&d.tensor_product(c)?.permute(&[2, 3, 4, 0, 1, 6, 7, 5])?))
}

/// `c ↦ Alt(δ^i_m c^{εγδ}_{jkl})`, layout of `B_L`.
pub fn lhs_c_latin(c: &IndexedTensor) -> Result<IndexedTensor> {
    check(c, C_SLOTS, "c")?;
    let d = IndexedTensor::delta(c.signature(), Alphabet::Latin);
    Ok(alt3(&d.tensor_product(c)?.permute(&[0, 3, 4, 2, 5, 6, 7, 1])?))
}

/// Residuals of the linear conditions on `c`: pair antisymmetry and vanishing
/// total alternation over its three pairs.
pub fn c_constraints(c: &IndexedTensor) -> Result<Vec<IndexedTensor>> {
    check(c, C_SLOTS, "c")?;
    Ok(vec![
        c.add(&c.swap_pairs(C_PAIRS[1], C_PAIRS[2])?)?,
        c.alternate_vertical_pairs(&C_PAIRS)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CRoute {
    Greek,
    Latin,
}

#[derive(Debug, Clone, Serialize)]
pub struct CSolution {
    pub c: IndexedTensor,
    pub routes: Vec<CRoute>,
    pub disabled_routes: Vec<CRoute>,
    pub diagnostics: SolveDiagnostics,
}

/// Factorized `c` system for one signature. Uses whichever routes are
/// uniquely solvable; with neither available both are stacked and the
/// minimum-norm solution is returned.
pub struct CSolver {
    pc: PairParams,
    rows_g: Vec<usize>,
    rows_l: Vec<usize>,
    used: Vec<CRoute>,
    routes: Vec<CRoute>,
    disabled: Vec<CRoute>,
    solver: ConstrainedSolver,
}

impl CSolver {
    pub fn new(s: Signature) -> Result<Self> {
        check_size(s)?;
        let guards = determinant_guards(s);
        let mut routes = Vec::new();
        let mut disabled = Vec::new();
        for (r, ok) in [(CRoute::Greek, guards.c_greek_route()), (CRoute::Latin, guards.c_latin_route())] {
            if ok {
                routes.push(r);
            } else {
                disabled.push(r);
            }
        }
        let used = if routes.is_empty() {
            vec![CRoute::Greek, CRoute::Latin]
        } else {
            routes.clone()
        };
        let pc = PairParams::new(IndexedTensor::zeros(s, spec(C_SLOTS)), C_PAIRS[1], C_PAIRS[2]);
        let rows_g = triple_rows(&IndexedTensor::zeros(s, spec(BG_SLOTS)));
        let rows_l = triple_rows(&IndexedTensor::zeros(s, spec(BL_SLOTS)));
        let cols = columns(pc.count, |k| {
            let c = pc.unit(k);
            let mut op = Vec::new();
            for r in &used {
                let (t, rows) = match r {
                    CRoute::Greek => (lhs_c_greek(&c).expect("c layout"), &rows_g),
                    CRoute::Latin => (lhs_c_latin(&c).expect("c layout"), &rows_l),
                };
                op.extend(rows.iter().map(|&i| t.components()[i]));
            }
            (op, flatten(&c_constraints(&c).expect("c layout")))
        });
        let (op, cons) = assemble(cols);
        Ok(CSolver {
            pc,
            rows_g,
            rows_l,
            used,
            routes,
            disabled,
            solver: ConstrainedSolver::new(op, &cons),
        })
    }

    pub fn solve(&self, greek: &IndexedTensor, latin: &IndexedTensor) -> Result<CSolution> {
        check(greek, BG_SLOTS, "B_G")?;
        check(latin, BL_SLOTS, "B_L")?;
        let s = self.pc.template.signature();
        s.check_same(&greek.signature())?;
        s.check_same(&latin.signature())?;
        let mut rhs = Vec::new();
        for r in &self.used {
            match r {
                CRoute::Greek => rhs.extend(gather(greek, &self.rows_g).iter()),
                CRoute::Latin => rhs.extend(gather(latin, &self.rows_l).iter()),
            }
        }
        let (x, diagnostics) = self.solver.solve(&DVector::from_vec(rhs));
        Ok(CSolution {
            c: self.pc.expand(x.as_slice()),
            routes: self.routes.clone(),
            disabled_routes: self.disabled.clone(),
            diagnostics,
        })
    }
}

pub fn solve_c(greek: &IndexedTensor, latin: &IndexedTensor) -> Result<CSolution> {
    CSolver::new(greek.signature())?.solve(greek, latin)
}

/// Subobjects of `b` and `c` entering the semiintegrability tests.
#[derive(Debug, Clone, Serialize)]
pub struct SemiObjects {
    /// `b¹` symmetrized over its lower Latin slots.
    pub b_alpha1: IndexedTensor,
    /// `b²` alternated over its upper Greek slots.
    pub b_alpha2: IndexedTensor,
    /// `b¹` alternated over its lower Latin slots.
    pub b_beta1: IndexedTensor,
    /// `b²` symmetrized over its upper Greek slots.
    pub b_beta2: IndexedTensor,
    pub c_alpha: Option<IndexedTensor>,
    pub c_beta: Option<IndexedTensor>,
}

pub fn semi_objects(b1: &IndexedTensor, b2: &IndexedTensor, c: Option<&IndexedTensor>) -> Result<SemiObjects> {
    check(b1, B1_SLOTS, "b¹")?;
    check(b2, B2_SLOTS, "b²")?;
    let (c_alpha, c_beta) = match c {
        Some(c) => (
            Some(c.alternate_slots(&[0, 1, 2])?.symmetrize_slots(&[3, 4, 5])?),
            Some(c.symmetrize_slots(&[0, 1, 2])?.alternate_slots(&[3, 4, 5])?),
        ),
        None => (None, None),
    };
    Ok(SemiObjects {
        b_alpha1: b1.symmetrize_slots(&[3, 4, 5])?,
        b_alpha2: b2.alternate_slots(&[0, 1, 2])?,
        b_beta1: b1.alternate_slots(&[3, 4, 5])?,
        b_beta2: b2.symmetrize_slots(&[0, 1, 2])?,
        c_alpha,
        c_beta,
    })
}

/// All second-order objects at one point.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSuite {
    pub b1: IndexedTensor,
    pub b2: IndexedTensor,
    pub c: Option<IndexedTensor>,
    pub b_diagnostics: SolveDiagnostics,
    pub c_diagnostics: Option<SolveDiagnostics>,
    pub c_routes: Vec<CRoute>,
    pub truncated_jet: bool,
    pub notes: Vec<String>,
}

impl CurvatureSuite {
    /// A suite with given `b` and `c` and no solver history.
    pub fn planted(b1: IndexedTensor, b2: IndexedTensor, c: Option<IndexedTensor>) -> Result<Self> {
        check(&b1, B1_SLOTS, "b¹")?;
        check(&b2, B2_SLOTS, "b²")?;
        if let Some(c) = &c {
            check(c, C_SLOTS, "c")?;
        }
        let n = b1.len() + b2.len();
        Ok(CurvatureSuite {
            b1,
            b2,
            c,
            b_diagnostics: SolveDiagnostics {
                equations: 0,
                unknowns: n,
                constrained_dim: n,
                sigma_max: 0.0,
                sigma_min: 0.0,
                kernel_dim: 0,
                unique: true,
                residual: 0.0,
                relative_residual: 0.0,
                rhs_norm: 0.0,
            },
            c_diagnostics: None,
            c_routes: Vec::new(),
            truncated_jet: false,
            notes: vec!["planted values".into()],
        })
    }

    pub fn semi_objects(&self) -> Result<SemiObjects> {
        semi_objects(&self.b1, &self.b2, self.c.as_ref())
    }
}

/// Both factorized systems for one signature.
pub struct CurvatureSolver {
    pub b: BSolver,
    pub c: CSolver,
}

impl CurvatureSolver {
    pub fn new(s: Signature) -> Result<Self> {
        Ok(CurvatureSolver {
            b: BSolver::new(s)?,
            c: CSolver::new(s)?,
        })
    }

    /// Solves for `b` and then `c` from a torsion jet.
    pub fn suite(&self, jet: &TorsionJet) -> Result<CurvatureSuite> {
        let guards = determinant_guards(jet.signature());
        let bs = self.b.solve(&assemble_a(jet)?)?;
        let (bg, bl) = assemble_b(jet, &bs.b1, &bs.b2)?;
        let cs = self.c.solve(&bg, &bl)?;
        let mut notes = guards.notes();
        if jet.is_truncated() {
            notes.push("truncated jet: derivatives of b taken as zero".into());
        }
        if !bs.diagnostics.unique {
            notes.push(format!(
                "b solution non-unique: kernel dimension {}",
                bs.diagnostics.kernel_dim
            ));
        }
        if !cs.diagnostics.unique {
            notes.push(format!(
                "c solution non-unique: kernel dimension {}",
                cs.diagnostics.kernel_dim
            ));
        }
        Ok(CurvatureSuite {
            b1: bs.b1,
            b2: bs.b2,
            c: Some(cs.c),
            b_diagnostics: bs.diagnostics,
            c_diagnostics: Some(cs.diagnostics),
            c_routes: cs.routes,
            truncated_jet: jet.is_truncated(),
            notes,
        })
    }
}

pub fn curvature_suite(jet: &TorsionJet) -> Result<CurvatureSuite> {
    CurvatureSolver::new(jet.signature())?.suite(jet)
}

/// Criterion used for one flag of a [`Verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `p, q > 2`: flat iff the torsion vanishes.
    TorsionOnly,
    /// `p = 2` or `q = 2`: flat iff torsion and both curvature objects vanish.
    TorsionAndCurvature,
    /// `p > 2`: α-semiintegrable iff `a_α`, `b_α¹`, `b_α²` vanish.
    AlphaFirstAndSecondOrder,
    /// `p = 2`: α-semiintegrable iff `b_α¹` vanishes.
    AlphaSecondOrder,
    /// `q > 2`: β-semiintegrable iff `a_β`, `b_β¹`, `b_β²` vanish.
    BetaFirstAndSecondOrder,
    /// `q = 2`: β-semiintegrable iff `b_β²` vanishes.
    BetaSecondOrder,
    /// Implied by flatness.
    ImpliedByFlatness,
    /// Second-order objects unavailable; the flag is not decided.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub flat: bool,
    pub alpha_semiintegrable: bool,
    pub beta_semiintegrable: bool,
    pub flat_rule: Rule,
    pub alpha_rule: Rule,
    pub beta_rule: Rule,
    pub tolerance: f64,
    pub residuals: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

fn insert(res: &mut BTreeMap<String, f64>, key: &str, t: &IndexedTensor) -> f64 {
    let v = t.max_abs();
    res.insert(key.to_string(), v);
    v
}

fn evaluate(torsion: &TorsionTensor, suite: Option<&CurvatureSuite>, tol: f64) -> Result<Verdict> {
    let s = torsion.signature();
    let (p, q) = (s.p(), s.q());
    let mut res = BTreeMap::new();
    let mut notes = Vec::new();
    let a = insert(&mut res, "a", &torsion.a);
    let a_alpha = insert(&mut res, "a_alpha", &torsion.a_alpha);
    let a_beta = insert(&mut res, "a_beta", &torsion.a_beta);
    let low = p == 2 || q == 2;

    let semi = match suite {
        Some(suite) => {
            s.check_same(&suite.b1.signature())?;
            let so = suite.semi_objects()?;
            let b1 = insert(&mut res, "b1", &suite.b1);
            let b2 = insert(&mut res, "b2", &suite.b2);
            let ba1 = insert(&mut res, "b_alpha1", &so.b_alpha1);
            let ba2 = insert(&mut res, "b_alpha2", &so.b_alpha2);
            let bb1 = insert(&mut res, "b_beta1", &so.b_beta1);
            let bb2 = insert(&mut res, "b_beta2", &so.b_beta2);
            let c = match &suite.c {
                Some(c) => {
                    insert(&mut res, "c_alpha", so.c_alpha.as_ref().expect("c present"));
                    insert(&mut res, "c_beta", so.c_beta.as_ref().expect("c present"));
                    insert(&mut res, "c", c)
                }
                None => {
                    notes.push("c unavailable; flatness decided from a and b".into());
                    0.0
                }
            };
            // With a nonzero kernel, b is known only modulo free components:
            // a flag is decided only when the torsion alone settles it.
            let free = suite.b_diagnostics.kernel_dim > 0;
            if free {
                notes.push(format!(
                    "b not determined by the torsion jet (kernel dimension {}); curvature-dependent flags undetermined",
                    suite.b_diagnostics.kernel_dim
                ));
            }
            let decide = |first: Option<f64>, second: f64, rule: Rule| match first {
                Some(t) if t > tol => (false, rule),
                _ if free => (false, Rule::Undetermined),
                first => (first.unwrap_or(0.0).max(second) <= tol, rule),
            };
            let (alpha, alpha_rule) = if p > 2 {
                decide(Some(a_alpha), ba1.max(ba2), Rule::AlphaFirstAndSecondOrder)
            } else {
                decide(None, ba1, Rule::AlphaSecondOrder)
            };
            let (beta, beta_rule) = if q > 2 {
                decide(Some(a_beta), bb1.max(bb2), Rule::BetaFirstAndSecondOrder)
            } else {
                decide(None, bb2, Rule::BetaSecondOrder)
            };
            let flat = decide(Some(a), b1.max(b2).max(c), Rule::TorsionAndCurvature);
            Some((alpha, alpha_rule, beta, beta_rule, flat))
        }
        None => None,
    };

    let (flat, flat_rule) = if low {
        let Some((.., flat)) = semi else {
            return Err(Error::InsufficientData(format!(
                "flatness in signature {s} needs the second-order objects"
            )));
        };
        flat
    } else {
        (a <= tol, Rule::TorsionOnly)
    };

    let (mut alpha, mut alpha_rule, mut beta, mut beta_rule) = match semi {
        Some((al, ar, be, br, _)) => (al, ar, be, br),
        None => {
            notes.push("semiintegrability undetermined without second-order objects".into());
            (false, Rule::Undetermined, false, Rule::Undetermined)
        }
    };
    if flat {
        if !(alpha && beta) {
            notes.push("semiintegrability forced by flatness".into());
        }
        if !alpha {
            alpha = true;
            alpha_rule = Rule::ImpliedByFlatness;
        }
        if !beta {
            beta = true;
            beta_rule = Rule::ImpliedByFlatness;
        }
    }
    Ok(Verdict {
        flat,
        alpha_semiintegrable: alpha,
        beta_semiintegrable: beta,
        flat_rule,
        alpha_rule,
        beta_rule,
        tolerance: tol,
        residuals: res,
        notes,
    })
}

/// Flatness test. For `p, q > 2` the torsion suffices; otherwise the
/// second-order objects are required.
pub fn flatness_verdict(torsion: &TorsionTensor, suite: Option<&CurvatureSuite>, tol: f64) -> Result<Verdict> {
    evaluate(torsion, suite, tol)
}

/// α- and β-semiintegrability tests; always needs the second-order objects.
pub fn semiintegrability(torsion: &TorsionTensor, suite: &CurvatureSuite, tol: f64) -> Result<Verdict> {
    evaluate(torsion, Some(suite), tol)
}

/// Pfaffian derivative layout helper: the zero jet derivative for `s`.
pub fn zero_derivative(s: Signature) -> IndexedTensor {
    IndexedTensor::zeros(s, spec(JET_SLOTS))
}

/// Checks that `a'` has the antisymmetry inherited from the torsion.
pub fn derivative_residual(d: &IndexedTensor) -> Result<f64> {
    check(d, JET_SLOTS, "torsion derivative")?;
    d.pair_antisymmetry_residual((1, 5), (2, 6))
}

/// Builds a jet from a torsion tensor and derivative, validating both.
pub fn jet_from_parts(a: IndexedTensor, derivative: IndexedTensor, tol: f64) -> Result<TorsionJet> {
    let t = TorsionTensor::from_tensor(a, tol)?;
    let r = derivative_residual(&derivative)?;
    let bound = tol * derivative.max_abs().max(1.0);
    if r > bound {
        return Err(Error::ConstraintViolation {
            what: "pair antisymmetry of torsion derivative".into(),
            residual: r,
            tolerance: bound,
        });
    }
    TorsionJet::new(t, derivative)
}
