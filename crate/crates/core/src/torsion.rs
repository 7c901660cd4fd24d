//! First-order structure tensor: projection of raw structure coefficients onto
//! the gauge-invariant torsion and its splitting into the two subtensors.
//!
//! Component layout for raw coefficients and torsion: slots `(i, β, γ; α, j, k)`,
//! i.e. `L^ G^ G^ G_ L_ L_`, with antisymmetry under exchanging the vertical
//! pairs `(β, j)` and `(γ, k)`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{Alphabet, IndexedTensor, Signature, SlotSpec, Variance};

pub const TORSION_SLOTS: &str = "L^ G^ G^ G_ L_ L_";
pub const PAIRS: [(usize, usize); 2] = [(1, 4), (2, 5)];

pub fn torsion_spec() -> SlotSpec {
    SlotSpec::parse(TORSION_SLOTS).expect("static slot spec")
}

fn scale_of(t: &IndexedTensor) -> f64 {
    t.max_abs().max(1.0)
}

fn check_spec(t: &IndexedTensor) -> Result<()> {
    if *t.spec() != torsion_spec() {
        return Err(Error::SpecMismatch(format!(
            "expected {TORSION_SLOTS}, found {}",
            t.spec()
        )));
    }
    Ok(())
}

fn alt(t: &IndexedTensor) -> IndexedTensor {
    t.alternate_vertical_pairs(&PAIRS).expect("torsion-shaped tensor")
}

/// Raw structure coefficients `u`, antisymmetric under the vertical pair swap.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RawCoefficients(IndexedTensor);

impl RawCoefficients {
    /// Validates pair antisymmetry to `tol` relative to the largest component.
    pub fn new(u: IndexedTensor, tol: f64) -> Result<Self> {
        check_spec(&u)?;
        let residual = u.pair_antisymmetry_residual(PAIRS[0], PAIRS[1])?;
        let bound = tol * scale_of(&u);
        if residual > bound {
            return Err(Error::ConstraintViolation {
                what: "pair antisymmetry of raw coefficients".into(),
                residual,
                tolerance: bound,
            });
        }
        Ok(RawCoefficients(u))
    }

    /// Projects an arbitrary tensor onto the pair-antisymmetric ones.
    pub fn antisymmetrized(t: &IndexedTensor) -> Result<Self> {
        check_spec(t)?;
        Ok(RawCoefficients(alt(t)))
    }

    pub fn random<R: Rng>(signature: Signature, rng: &mut R) -> Self {
        let t = IndexedTensor::from_fn(signature, torsion_spec(), |_| rng.random_range(-1.0..1.0));
        RawCoefficients(alt(&t))
    }

    pub fn tensor(&self) -> &IndexedTensor {
        &self.0
    }

    pub fn into_tensor(self) -> IndexedTensor {
        self.0
    }

    pub fn signature(&self) -> Signature {
        self.0.signature()
    }
}

/// Traces of the raw coefficients entering the projection.
#[derive(Debug, Clone)]
pub struct RawTraces {
    /// `u^{βγ}_{αk}`, slots `G^ G^ G_ L_`.
    pub greek: IndexedTensor,
    /// `u^{iγ}_{jk}`, slots `L^ G^ L_ L_`.
    pub latin: IndexedTensor,
    /// `u^γ_k = u^{σγ}_{σk}`, slots `G^ L_`.
    pub vector: IndexedTensor,
    /// `ũ^γ_k = u^{lγ}_{kl}`, slots `G^ L_`.
    pub vector_tilde: IndexedTensor,
}

pub fn raw_traces(u: &RawCoefficients) -> RawTraces {
    let t = u.tensor();
    let greek = t.contract(0, 4).expect("latin trace");
    let latin = t.contract(1, 3).expect("greek trace");
    let vector = latin.contract(0, 2).expect("double trace");
    let vector_tilde = latin.contract(0, 3).expect("double trace");
    RawTraces {
        greek,
        latin,
        vector,
        vector_tilde,
    }
}

/// Coefficients of the three correction terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSet {
    /// `(q, p, q - p)`: the set satisfying the trace conditions.
    #[default]
    Standard,
    /// `(p, q, p - q)`: an alternative printing; fails the trace conditions
    /// and is kept only for comparison.
    Transposed,
}

impl CoefficientSet {
    fn values(self, s: Signature) -> (f64, f64, f64) {
        let (p, q) = (s.p() as f64, s.q() as f64);
        match self {
            CoefficientSet::Standard => (q, p, q - p),
            CoefficientSet::Transposed => (p, q, p - q),
        }
    }
}

/// The correction objects `x`, `y`, `z` with `a = u + x + y + z`.
#[derive(Debug, Clone)]
pub struct Corrections {
    pub x: IndexedTensor,
    pub y: IndexedTensor,
    pub z: IndexedTensor,
}

pub fn corrections(u: &RawCoefficients, set: CoefficientSet) -> Corrections {
    let s = u.signature();
    let (p, q) = (s.p() as f64, s.q() as f64);
    let (cx, cy, sz) = set.values(s);
    let tr = raw_traces(u);
    let dl = IndexedTensor::delta(s, Alphabet::Latin);
    let dg = IndexedTensor::delta(s, Alphabet::Greek);

    // δ^i_j (cx u^{βγ}_{αk} + u^{γβ}_{αk})
    let w = IndexedTensor::combine(&[cx, 1.0], &[&tr.greek, &tr.greek.permute(&[1, 0, 2, 3]).unwrap()]).unwrap();
    let t1 = dl.tensor_product(&w).unwrap().permute(&[0, 2, 3, 4, 1, 5]).unwrap();
    let x = alt(&t1).scale(-2.0 / (q * q - 1.0));

    // δ^β_α (cy u^{iγ}_{jk} + u^{iγ}_{kj})
    let v = IndexedTensor::combine(&[cy, 1.0], &[&tr.latin, &tr.latin.permute(&[0, 1, 3, 2]).unwrap()]).unwrap();
    let t2 = dg.tensor_product(&v).unwrap().permute(&[2, 0, 3, 1, 4, 5]).unwrap();
    let y = alt(&t2).scale(-2.0 / (p * p - 1.0));

    // δ^i_j δ^β_α and δ^i_k δ^β_α times the two vectors
    let dd = dl.tensor_product(&dg).unwrap();
    let jk = |vec: &IndexedTensor| dd.tensor_product(vec).unwrap().permute(&[0, 2, 4, 3, 1, 5]).unwrap();
    let kj = |vec: &IndexedTensor| dd.tensor_product(vec).unwrap().permute(&[0, 2, 4, 3, 5, 1]).unwrap();
    let t3 = IndexedTensor::combine(
        &[p * q - 1.0, p * q - 1.0, sz, sz],
        &[
            &jk(&tr.vector),
            &kj(&tr.vector_tilde),
            &jk(&tr.vector_tilde),
            &kj(&tr.vector),
        ],
    )
    .unwrap();
    let z = alt(&t3).scale(2.0 / ((p * p - 1.0) * (q * q - 1.0)));
    Corrections { x, y, z }
}

/// Residuals of the defining constraints of a torsion tensor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ConstraintResiduals {
    pub pair_antisymmetry: f64,
    /// Largest `|a^{iαγ}_{αjk}|`.
    pub greek_trace: f64,
    /// Largest `|a^{iβγ}_{αik}|`.
    pub latin_trace: f64,
    /// Largest violation of `a = a_α + a_β`.
    pub decomposition: f64,
    /// Largest trace of either subtensor.
    pub subtensor_traces: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        [
            self.pair_antisymmetry,
            self.greek_trace,
            self.latin_trace,
            self.decomposition,
            self.subtensor_traces,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn trace_residuals(a: &IndexedTensor) -> Result<(f64, f64)> {
    check_spec(a)?;
    Ok((a.contract(1, 3)?.max_abs(), a.contract(0, 4)?.max_abs()))
}

/// The torsion tensor and its two subtensors.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionTensor {
    pub a: IndexedTensor,
    pub a_alpha: IndexedTensor,
    pub a_beta: IndexedTensor,
    pub constraints: ConstraintResiduals,
}

impl TorsionTensor {
    /// Builds from a tensor already satisfying the torsion constraints.
    pub fn from_tensor(a: IndexedTensor, tol: f64) -> Result<Self> {
        let (a_alpha, a_beta) = decompose(&a, tol)?;
        let constraints = residuals(&a, &a_alpha, &a_beta)?;
        let bound = tol * scale_of(&a);
        for (what, r) in [
            ("greek trace of torsion", constraints.greek_trace),
            ("latin trace of torsion", constraints.latin_trace),
            ("trace of torsion subtensors", constraints.subtensor_traces),
        ] {
            if r > bound {
                return Err(Error::ConstraintViolation {
                    what: what.into(),
                    residual: r,
                    tolerance: bound,
                });
            }
        }
        Ok(TorsionTensor {
            a,
            a_alpha,
            a_beta,
            constraints,
        })
    }

    pub fn signature(&self) -> Signature {
        self.a.signature()
    }
}

fn residuals(a: &IndexedTensor, a_alpha: &IndexedTensor, a_beta: &IndexedTensor) -> Result<ConstraintResiduals> {
    let (greek_trace, latin_trace) = trace_residuals(a)?;
    let decomposition = a_alpha.add(a_beta)?.max_abs_diff(a)?;
    let subtensor_traces = [
        a_alpha.contract(1, 3)?.max_abs(),
        a_alpha.contract(0, 4)?.max_abs(),
        a_beta.contract(1, 3)?.max_abs(),
        a_beta.contract(0, 4)?.max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(ConstraintResiduals {
        pair_antisymmetry: a.pair_antisymmetry_residual(PAIRS[0], PAIRS[1])?,
        greek_trace,
        latin_trace,
        decomposition,
        subtensor_traces,
    })
}

/// Projects raw coefficients onto the torsion tensor.
pub fn torsion_from_raw(u: &RawCoefficients, tol: f64) -> Result<TorsionTensor> {
    torsion_from_raw_with(u, CoefficientSet::Standard, tol)
}

/// As [`torsion_from_raw`] with an explicit coefficient set. Fails with a
/// constraint violation when the result does not satisfy the trace conditions.
pub fn torsion_from_raw_with(u: &RawCoefficients, set: CoefficientSet, tol: f64) -> Result<TorsionTensor> {
    let a = project(u, set);
    let scale = scale_of(u.tensor());
    let (g, l) = trace_residuals(&a)?;
    let bound = tol * scale;
    if g.max(l) > bound {
        return Err(Error::ConstraintViolation {
            what: "trace conditions after projection".into(),
            residual: g.max(l),
            tolerance: bound,
        });
    }
    let (a_alpha, a_beta) = split(&a);
    let constraints = residuals(&a, &a_alpha, &a_beta)?;
    Ok(TorsionTensor {
        a,
        a_alpha,
        a_beta,
        constraints,
    })
}

/// The projection itself, without any validation of the result.
pub fn project(u: &RawCoefficients, set: CoefficientSet) -> IndexedTensor {
    let c = corrections(u, set);
    IndexedTensor::combine(&[1.0, 1.0, 1.0, 1.0], &[u.tensor(), &c.x, &c.y, &c.z]).unwrap()
}

fn split(a: &IndexedTensor) -> (IndexedTensor, IndexedTensor) {
    (
        a.symmetrize_slots(&[4, 5]).expect("lower latin slots"),
        a.symmetrize_slots(&[1, 2]).expect("upper greek slots"),
    )
}

/// Splits a torsion tensor into `(a_α, a_β)`: symmetric in the lower Latin
/// slots and symmetric in the upper Greek slots respectively.
pub fn decompose(a: &IndexedTensor, tol: f64) -> Result<(IndexedTensor, IndexedTensor)> {
    check_spec(a)?;
    let residual = a.pair_antisymmetry_residual(PAIRS[0], PAIRS[1])?;
    let bound = tol * scale_of(a);
    if residual > bound {
        return Err(Error::ConstraintViolation {
            what: "pair antisymmetry of torsion".into(),
            residual,
            tolerance: bound,
        });
    }
    Ok(split(a))
}

/// Fiber-coordinate shift of the raw coefficients. Adding it changes `u` but
/// leaves the torsion unchanged.
#[derive(Debug, Clone)]
pub struct GaugeShift {
    /// `π^{βγ}_{αk}`, slots `G^ G^ G_ L_`.
    pub greek: IndexedTensor,
    /// `π^{iγ}_{jk}`, slots `L^ G^ L_ L_`.
    pub latin: IndexedTensor,
    /// `π^γ_k`, slots `G^ L_`.
    pub mixed: IndexedTensor,
}

impl GaugeShift {
    pub fn zero(s: Signature) -> Self {
        GaugeShift {
            greek: IndexedTensor::zeros(s, SlotSpec::parse("G^ G^ G_ L_").unwrap()),
            latin: IndexedTensor::zeros(s, SlotSpec::parse("L^ G^ L_ L_").unwrap()),
            mixed: IndexedTensor::zeros(s, SlotSpec::parse("G^ L_").unwrap()),
        }
    }

    pub fn random<R: Rng>(s: Signature, rng: &mut R) -> Self {
        let mut g = GaugeShift::zero(s);
        for t in [&mut g.greek, &mut g.latin, &mut g.mixed] {
            t.components_mut().iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        }
        g
    }

    /// The shift tensor added to `u`, in torsion layout.
    pub fn tensor(&self) -> Result<IndexedTensor> {
        let s = self.greek.signature();
        s.check_same(&self.latin.signature())?;
        s.check_same(&self.mixed.signature())?;
        let dl = IndexedTensor::delta(s, Alphabet::Latin);
        let dg = IndexedTensor::delta(s, Alphabet::Greek);
        // δ^i_j π^{βγ}_{αk}
        let t1 = dl.tensor_product(&self.greek)?.permute(&[0, 2, 3, 4, 1, 5])?;
        // δ^β_α π^{iγ}_{jk}
        let t2 = dg.tensor_product(&self.latin)?.permute(&[2, 0, 3, 1, 4, 5])?;
        // δ^i_k δ^γ_α π^β_j: product slots (i,k,γ,α,β,j)
        let t3 = dl
            .tensor_product(&dg)?
            .tensor_product(&self.mixed)?
            .permute(&[0, 4, 2, 3, 5, 1])?;
        let sum = IndexedTensor::combine(&[1.0, 1.0, 1.0], &[&t1, &t2, &t3])?;
        Ok(alt(&sum))
    }
}

/// Adds a fiber shift to raw coefficients.
pub fn gauge_shift(u: &RawCoefficients, shift: &GaugeShift) -> Result<RawCoefficients> {
    u.signature().check_same(&shift.greek.signature())?;
    let shifted = u.tensor().add(&shift.tensor()?)?;
    Ok(RawCoefficients(alt(&shifted)))
}

/// Constant element `(A, B, λ)` of the structure group acting on the coframe
/// by `ω ↦ λ A ω B`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub greek: DMatrix<f64>,
    pub latin: DMatrix<f64>,
    pub scale: f64,
}

impl GroupElement {
    pub fn identity(s: Signature) -> Self {
        GroupElement {
            greek: DMatrix::identity(s.p(), s.p()),
            latin: DMatrix::identity(s.q(), s.q()),
            scale: 1.0,
        }
    }

    pub fn new(greek: DMatrix<f64>, latin: DMatrix<f64>, scale: f64, tol: f64) -> Result<Self> {
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::InvalidScale(scale));
        }
        for m in [&greek, &latin] {
            if !m.is_square() {
                return Err(Error::SpecMismatch("group matrices must be square".into()));
            }
            let det = m.determinant();
            if (det - 1.0).abs() > tol {
                return Err(Error::NotUnimodular(det));
            }
        }
        Ok(GroupElement { greek, latin, scale })
    }

    /// Random unimodular factors with entries near the identity.
    pub fn random<R: Rng>(s: Signature, rng: &mut R) -> Self {
        let mut unimodular = |d: usize| {
            let m = DMatrix::from_fn(d, d, |r, c| {
                let e: f64 = rng.random_range(-0.4..0.4);
                if r == c { 1.0 + e } else { e }
            });
            let det = m.determinant();
            let m = if det < 0.0 {
                let mut m = m;
                m.row_mut(0).neg_mut();
                m
            } else {
                m
            };
            let det = m.determinant();
            m / det.powf(1.0 / d as f64)
        };
        let greek = unimodular(s.p());
        let latin = unimodular(s.q());
        let scale = rng.random_range(0.5..2.0);
        GroupElement { greek, latin, scale }
    }

    /// Matrix acting on the flattened coframe: `E' = λ (A ⊗ Bᵀ) E`.
    pub fn coframe_matrix(&self) -> DMatrix<f64> {
        self.greek.kronecker(&self.latin.transpose()) * self.scale
    }

    /// Tensorial action with weight `-weight` in the scale factor.
    pub fn act(&self, t: &IndexedTensor, weight: i32) -> Result<IndexedTensor> {
        let a_inv_t = self
            .greek
            .clone()
            .try_inverse()
            .ok_or(Error::NotUnimodular(0.0))?
            .transpose();
        let b_inv = self.latin.clone().try_inverse().ok_or(Error::NotUnimodular(0.0))?;
        let b_t = self.latin.transpose();
        let mut out = t.clone();
        for (k, slot) in t.spec().slots().iter().enumerate() {
            let m = match (slot.alphabet, slot.variance) {
                (Alphabet::Greek, Variance::Down) => &self.greek,
                (Alphabet::Greek, Variance::Up) => &a_inv_t,
                (Alphabet::Latin, Variance::Down) => &b_inv,
                (Alphabet::Latin, Variance::Up) => &b_t,
            };
            out = out.transform_slot(k, m)?;
        }
        Ok(out.scale(self.scale.powi(-weight)))
    }
}

/// Torsion of the rescaled coframe `λ ω`.
pub fn scale_weight(a: &IndexedTensor, lambda: f64) -> Result<IndexedTensor> {
    if !lambda.is_finite() || lambda == 0.0 {
        return Err(Error::InvalidScale(lambda));
    }
    Ok(a.scale(1.0 / lambda))
}

/// Torsion of the coframe transformed by a constant group element.
pub fn transform(a: &IndexedTensor, g: &GroupElement) -> Result<IndexedTensor> {
    check_spec(a)?;
    g.act(a, 1)
}
