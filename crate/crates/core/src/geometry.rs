//! The flat model: Segre cones, Grassmann (Plücker) coordinates, second
//! fundamental forms, and generators of sampled test structures.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coframe::{CoframeField, GridSpec, Layout};
use crate::error::{Error, Result};
use crate::tensor::Signature;

pub const DEFAULT_CONE_TOL: f64 = 1e-10;

/// Tangent vector `z^i_α` in an adapted frame, stored as a `p×q` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegrePoint {
    pub z: DMatrix<f64>,
}

impl SegrePoint {
    pub fn new(z: DMatrix<f64>) -> Result<Self> {
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(z.iter().position(|v| !v.is_finite()).unwrap_or(0)));
        }
        Ok(SegrePoint { z })
    }
}

fn singular_values(z: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = z.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Rank at most one, relative to the largest singular value. The vertex
/// `z = 0` is a member.
pub fn segre_membership(z: &SegrePoint, tol: f64) -> bool {
    let sv = singular_values(&z.z);
    match sv.as_slice() {
        [] | [_] => true,
        [s1, s2, ..] => *s1 == 0.0 || *s2 <= tol * s1,
    }
}

/// `z^i_α = t_α s^i`.
pub fn segre_param(t: &DVector<f64>, s: &DVector<f64>) -> SegrePoint {
    SegrePoint { z: t * s.transpose() }
}

/// Factors `(t, s)` of a rank-one point with `|t| = |s|`.
pub fn segre_factors(z: &SegrePoint, tol: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    let svd = z.z.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (mut k1, mut s1, mut s2) = (0, 0.0f64, 0.0f64);
    for (k, &s) in sv.iter().enumerate() {
        if s > s1 {
            s2 = s1;
            s1 = s;
            k1 = k;
        } else if s > s2 {
            s2 = s;
        }
    }
    if s1 == 0.0 {
        return Ok((DVector::zeros(z.z.nrows()), DVector::zeros(z.z.ncols())));
    }
    if s2 > tol * s1 {
        return Err(Error::NotRankOne(s2 / s1));
    }
    let u = svd.u.as_ref().expect("left vectors").column(k1).into_owned();
    let v = svd.v_t.as_ref().expect("right vectors").row(k1).transpose();
    let r = s1.sqrt();
    Ok((u * r, v * r))
}

/// The two generators through `t ⊗ s`: the `p`-plane `{t' ⊗ s}` and the
/// `q`-plane `{t ⊗ s'}`, as columns of flattened `p×q` matrices (Greek slowest).
pub fn generators(t: &DVector<f64>, s: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (p, q) = (t.len(), s.len());
    let flat = |m: DMatrix<f64>| DVector::from_iterator(p * q, (0..p).flat_map(|a| (0..q).map(move |i| (a, i))).map(|(a, i)| m[(a, i)]));
    let pplane: Vec<DVector<f64>> = (0..p)
        .map(|a| {
            let mut e = DVector::zeros(p);
            e[a] = 1.0;
            flat(e * s.transpose())
        })
        .collect();
    let qplane: Vec<DVector<f64>> = (0..q)
        .map(|i| {
            let mut e = DVector::zeros(q);
            e[i] = 1.0;
            flat(t * e.transpose())
        })
        .collect();
    (DMatrix::from_columns(&pplane), DMatrix::from_columns(&qplane))
}

/// Numerical rank relative to the largest singular value.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values(m);
    let s1 = sv.first().copied().unwrap_or(0.0);
    if s1 == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * s1).count()
}

/// Grassmann coordinates of the `p`-plane spanned by the rows of a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlueckerPoint {
    /// Maximal minors, column subsets in lexicographic order.
    pub coordinates: Vec<f64>,
    pub reference_basis: DMatrix<f64>,
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn pluecker_embed(basis: &DMatrix<f64>) -> Result<PlueckerPoint> {
    let (p, n) = basis.shape();
    if p == 0 || p > n || numerical_rank(basis, 1e-12) < p {
        return Err(Error::SpecMismatch(format!("basis of shape {p}x{n} is rank-deficient")));
    }
    let coordinates = subsets(n, p)
        .into_iter()
        .map(|cols| basis.select_columns(&cols).determinant())
        .collect();
    Ok(PlueckerPoint {
        coordinates,
        reference_basis: basis.clone(),
    })
}

/// One value `ω^{ij}_{αβ} = dz^i_α dz^j_β - dz^j_α dz^i_β` with `α<β`, `i<j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalFormValue {
    pub alpha: usize,
    pub beta: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

pub fn second_fundamental_forms(dz: &DMatrix<f64>) -> Vec<FundamentalFormValue> {
    let (p, q) = dz.shape();
    let mut out = Vec::new();
    for alpha in 0..p {
        for beta in alpha + 1..p {
            for i in 0..q {
                for j in i + 1..q {
                    let value = dz[(alpha, i)] * dz[(beta, j)] - dz[(alpha, j)] * dz[(beta, i)];
                    out.push(FundamentalFormValue { alpha, beta, i, j, value });
                }
            }
        }
    }
    out
}

/// Chart-dependent factors `A(x)`, `B(x)` of a flat coframe `ω = A(x) dX B(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChartFactors {
    Identity,
    /// Factors affine in `x`; the coframe is quadratic and central differences
    /// are exact on it.
    Affine { amplitude: f64 },
    /// Trigonometric factors; discretization error is `O(h²)`.
    Analytic { amplitude: f64 },
}

fn pattern(r: usize, c: usize, mu: usize, salt: f64) -> f64 {
    (1.3 * r as f64 + 2.1 * c as f64 + 0.7 * mu as f64 + salt).sin()
}

impl ChartFactors {
    /// `(A(x), B(x))`.
    pub fn factors(&self, s: Signature, x: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let (p, q) = (s.p(), s.q());
        match *self {
            ChartFactors::Identity => (DMatrix::identity(p, p), DMatrix::identity(q, q)),
            ChartFactors::Affine { amplitude } => {
                let lin = |d: usize, salt: f64| {
                    DMatrix::from_fn(d, d, |r, c| {
                        let v: f64 = x.iter().enumerate().map(|(mu, xm)| pattern(r, c, mu, salt) * xm).sum();
                        if r == c { 1.0 + amplitude * v } else { amplitude * v }
                    })
                };
                (lin(p, 0.3), lin(q, 1.9))
            }
            ChartFactors::Analytic { amplitude } => {
                let ana = |d: usize, salt: f64| {
                    DMatrix::from_fn(d, d, |r, c| {
                        let arg: f64 = x.iter().enumerate().map(|(mu, xm)| pattern(r, c, mu, salt) * xm).sum();
                        let v = (arg + salt).sin() - salt.sin();
                        if r == c { 1.0 + amplitude * v } else { amplitude * v }
                    })
                };
                (ana(p, 0.3), ana(q, 1.9))
            }
        }
    }
}

/// Coframe of the Grassmann structure on the standard affine chart, with the
/// coordinate differentials `dX` conjugated by the chart factors.
pub fn flat_coframe(s: Signature, grid: &GridSpec, layout: &Layout, factors: ChartFactors) -> Result<CoframeField> {
    CoframeField::from_fn(s, grid.clone(), layout.clone(), |x| {
        let (a, b) = factors.factors(s, x);
        a.kronecker(&b.transpose())
    })
}

/// A flat coframe composed with a fixed non-integrable affine perturbation
/// `I + ε Σ x^μ P_μ`. Quadratic in `x`, so the discrete pipeline is exact up
/// to roundoff.
pub fn perturbed_coframe(s: Signature, grid: &GridSpec, layout: &Layout, epsilon: f64) -> Result<CoframeField> {
    let n = s.n();
    let factors = ChartFactors::Affine { amplitude: 0.1 };
    CoframeField::from_fn(s, grid.clone(), layout.clone(), |x| {
        let (a, b) = factors.factors(s, x);
        let pert = DMatrix::from_fn(n, n, |r, c| {
            let v: f64 = x.iter().enumerate().map(|(mu, xm)| pattern(r, c, mu, 0.77) * xm).sum();
            if r == c { 1.0 + epsilon * v } else { epsilon * v }
        });
        a.kronecker(&b.transpose()) * pert
    })
}

/// A field of normal covectors whose kernel is the tangent plane of one
/// foliation: rows span the annihilator, shape `((p-1)q) × pq`.
pub trait NormalField: Sync {
    fn normals(&self, x: &[f64]) -> DMatrix<f64>;
}

/// Normals affine in the coordinates: `N(x) = N₀ + Σ x^μ N_μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineNormals {
    pub constant: Vec<Vec<f64>>,
    #[serde(default)]
    pub linear: Vec<Vec<Vec<f64>>>,
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, |v| v.len());
    if rows.iter().any(|v| v.len() != c) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl AffineNormals {
    fn check(&self, s: Signature) -> Result<()> {
        let (r, c) = ((s.p() - 1) * s.q(), s.n());
        let ok = |m: &Vec<Vec<f64>>| m.len() == r && m.iter().all(|row| row.len() == c);
        if !ok(&self.constant) || !self.linear.iter().all(ok) || self.linear.len() > c {
            return Err(Error::Parse(format!("foliation normals must be {r}x{c} matrices")));
        }
        Ok(())
    }
}

impl NormalField for AffineNormals {
    fn normals(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = rows_to_matrix(&self.constant).expect("validated");
        for (mu, lin) in self.linear.iter().enumerate() {
            m += rows_to_matrix(lin).expect("validated") * x[mu];
        }
        m
    }
}

/// `p+1` foliations read from a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoliationFile {
    pub p: usize,
    pub q: usize,
    pub foliations: Vec<AffineNormals>,
}

impl FoliationFile {
    pub fn validate(&self) -> Result<Signature> {
        let s = Signature::new(self.p, self.q)?;
        if self.foliations.len() != s.p() + 1 {
            return Err(Error::Parse(format!(
                "expected {} foliations, found {}",
                s.p() + 1,
                self.foliations.len()
            )));
        }
        for f in &self.foliations {
            f.check(s)?;
        }
        Ok(s)
    }
}

/// Built-in three-webs on `R^{2q}` with coordinates `(x, y)`, given by the
/// foliations `x = const`, `y = const`, `f(x, y) = const`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThreeWeb {
    /// `f = x + y`.
    Parallel,
    /// `f^i = x^i + y^i + ε (x^i y^{i+1} + (x^{i+1})² y^i)`.
    Polynomial { epsilon: f64 },
    /// `f^i = x^i + y^i + ε sin(x^{i+1} + 2 y^i + 1) exp(x^i y^{i+1} / 2)`.
    Transcendental { epsilon: f64 },
}

impl ThreeWeb {
    /// Jacobians `(∂f/∂x, ∂f/∂y)` at `(x, y)`.
    pub fn jacobians(&self, x: &[f64], y: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let q = x.len();
        let nx = |i: usize| (i + 1) % q;
        let mut fx = DMatrix::identity(q, q);
        let mut fy = DMatrix::identity(q, q);
        match *self {
            ThreeWeb::Parallel => {}
            ThreeWeb::Polynomial { epsilon: e } => {
                for i in 0..q {
                    let k = nx(i);
                    fx[(i, i)] += e * y[k];
                    fx[(i, k)] += e * 2.0 * x[k] * y[i];
                    fy[(i, k)] += e * x[i];
                    fy[(i, i)] += e * x[k] * x[k];
                }
            }
            ThreeWeb::Transcendental { epsilon: e } => {
                for i in 0..q {
                    let k = nx(i);
                    let arg = x[k] + 2.0 * y[i] + 1.0;
                    let ex = (0.5 * x[i] * y[k]).exp();
                    let (sn, cs) = arg.sin_cos();
                    fx[(i, k)] += e * cs * ex;
                    fx[(i, i)] += e * sn * ex * 0.5 * y[k];
                    fy[(i, i)] += e * cs * ex * 2.0;
                    fy[(i, k)] += e * sn * ex * 0.5 * x[i];
                }
            }
        }
        (fx, fy)
    }

    /// The three normal fields of the web in signature `(2, q)`.
    pub fn foliations(&self, q: usize) -> Vec<Box<dyn NormalField + Send>> {
        let web = *self;
        let first = DMatrix::from_fn(q, 2 * q, |r, c| if c == r { 1.0 } else { 0.0 });
        let second = DMatrix::from_fn(q, 2 * q, |r, c| if c == q + r { 1.0 } else { 0.0 });
        vec![
            Box::new(ConstantNormals(first)),
            Box::new(ConstantNormals(second)),
            Box::new(ThirdFoliation { web, q }),
        ]
    }
}

struct ConstantNormals(DMatrix<f64>);

impl NormalField for ConstantNormals {
    fn normals(&self, _x: &[f64]) -> DMatrix<f64> {
        self.0.clone()
    }
}

struct ThirdFoliation {
    web: ThreeWeb,
    q: usize,
}

impl NormalField for ThirdFoliation {
    fn normals(&self, x: &[f64]) -> DMatrix<f64> {
        let q = self.q;
        let (fx, fy) = self.web.jacobians(&x[..q], &x[q..]);
        let mut m = DMatrix::zeros(q, 2 * q);
        m.view_mut((0, 0), (q, q)).copy_from(&fx);
        m.view_mut((0, q), (q, q)).copy_from(&fy);
        m
    }
}

/// Basis of the kernel of `n` as columns.
fn kernel_basis(n: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    crate::lsq::null_space(n, dim)
}

const GENERAL_POSITION_COND: f64 = 1e8;

fn condition(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&a), Some(&b)) if b > 0.0 => a / b,
        _ => f64::INFINITY,
    }
}

/// Adapted frame at `x` from the tangent planes of `p+1` foliations. The
/// columns `e^α_i` span the `α`-th plane, and `Σ_α e^α_i` spans the last.
fn web_frame(
    s: Signature,
    fields: &[&dyn NormalField],
    reference: &[DMatrix<f64>],
    x: &[f64],
) -> Result<DMatrix<f64>> {
    let (p, q, n) = (s.p(), s.q(), s.n());
    let mut planes = Vec::with_capacity(p + 1);
    for (f, r) in fields.iter().zip(reference) {
        let nrm = f.normals(x);
        let gram = &nrm * nrm.transpose();
        let inv = gram.try_inverse().ok_or_else(|| Error::NotGeneralPosition(x.to_vec()))?;
        let proj = DMatrix::identity(n, n) - nrm.transpose() * inv * &nrm;
        planes.push(proj * r);
    }
    let mut k = DMatrix::zeros(n, p * q);
    for a in 0..p {
        k.view_mut((0, a * q), (n, q)).copy_from(&planes[a]);
    }
    if condition(&k) > GENERAL_POSITION_COND {
        return Err(Error::NotGeneralPosition(x.to_vec()));
    }
    let c = k.clone().lu().solve(&planes[p]).ok_or_else(|| Error::NotGeneralPosition(x.to_vec()))?;
    let mut frame = DMatrix::zeros(n, n);
    for a in 0..p {
        let ca = c.view((a * q, 0), (q, q)).into_owned();
        if condition(&ca) > GENERAL_POSITION_COND {
            return Err(Error::NotGeneralPosition(x.to_vec()));
        }
        frame.view_mut((0, a * q), (n, q)).copy_from(&(&planes[a] * ca));
    }
    Ok(frame)
}

/// Coframe adapted to the Segre cone field of a `(p+1)`-web given by normal
/// fields. The kernel bases are fixed at the grid center and carried along by
/// orthogonal projection, so the coframe is smooth in `x`.
pub fn web_coframe_from_normals(
    s: Signature,
    fields: &[&dyn NormalField],
    grid: &GridSpec,
    layout: &Layout,
) -> Result<CoframeField> {
    if fields.len() != s.p() + 1 {
        return Err(Error::Parse(format!("expected {} foliations, found {}", s.p() + 1, fields.len())));
    }
    grid.validate(s.n())?;
    let center = grid.position(&grid.center_index());
    let reference: Vec<DMatrix<f64>> = fields
        .iter()
        .map(|f| {
            let k = kernel_basis(&f.normals(&center), s.n());
            if k.ncols() != s.q() {
                return Err(Error::NotGeneralPosition(center.clone()));
            }
            Ok(k)
        })
        .collect::<Result<_>>()?;
    CoframeField::try_from_fn(s, grid.clone(), layout.clone(), |x| {
        let f = web_frame(s, fields, &reference, x)?;
        f.try_inverse().ok_or_else(|| Error::NotGeneralPosition(x.to_vec()))
    })
}

/// Coframe induced by a built-in three-web, signature `(2, q)`.
pub fn web_coframe(s: Signature, web: ThreeWeb, grid: &GridSpec, layout: &Layout) -> Result<CoframeField> {
    if s.p() != 2 {
        return Err(Error::Parse(format!(
            "built-in three-webs need p = 2, got p = {}; supply foliation normals",
            s.p()
        )));
    }
    let fols = web.foliations(s.q());
    let refs: Vec<&dyn NormalField> = fols.iter().map(|b| b.as_ref() as &dyn NormalField).collect();
    web_coframe_from_normals(s, &refs, grid, layout)
}

/// Coframe induced by foliations read from a file.
pub fn web_coframe_from_file(file: &FoliationFile, grid: &GridSpec, layout: &Layout) -> Result<CoframeField> {
    let s = file.validate()?;
    let refs: Vec<&dyn NormalField> = file.foliations.iter().map(|f| f as &dyn NormalField).collect();
    web_coframe_from_normals(s, &refs, grid, layout)
}

/// A stored three-web example with its reference grid and regression values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WebFixture {
    pub name: String,
    pub q: usize,
    pub web: ThreeWeb,
    pub grid: GridSpec,
    /// `‖a_β‖∞` at the grid center on the reference grid, if nonzero.
    #[serde(default)]
    pub a_beta_reference: Option<f64>,
}

impl WebFixture {
    pub fn signature(&self) -> Result<Signature> {
        Signature::new(2, self.q)
    }

    /// The web coframe on the reference grid refined `level` times, sampled
    /// on the star of the given radius around the center.
    pub fn coframe(&self, level: usize, radius: usize) -> Result<CoframeField> {
        let mut g = self.grid.clone();
        for _ in 0..level {
            g = g.refined();
        }
        let layout = Layout::star(&g, radius)?;
        web_coframe(self.signature()?, self.web, &g, &layout)
    }
}
