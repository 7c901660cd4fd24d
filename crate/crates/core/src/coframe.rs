//! Sampled adapted coframes on a box in `R^{pq}` and the finite-difference
//! pipeline from a field to raw structure coefficients, torsion and its
//! Pfaffian derivatives.
//!
//! A frame at a node is the matrix `E` with `ω^i_α = Σ_μ E[(α q + i, μ)] dx^μ`.
//! Connection forms are never estimated: raw coefficients are read off in the
//! gauge where they vanish, and the projection onto the torsion removes the
//! resulting ambiguity.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::TorsionJet;
use crate::error::{Error, Result};
use crate::tensor::{Alphabet, IndexedTensor, Signature, Slot, SlotSpec, Variance};
use crate::torsion::{torsion_from_raw, torsion_spec, GroupElement, RawCoefficients, TorsionTensor};

pub const MIN_NODES: usize = 5;
pub const MAX_CONDITION: f64 = 1e8;
pub const MAX_FULL_NODES: usize = 1 << 20;

/// Uniform lattice on an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl GridSpec {
    pub fn cube(dim: usize, lo: f64, hi: f64, nodes: usize) -> Self {
        GridSpec {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
            nodes: vec![nodes; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.lo.len() != dim || self.hi.len() != dim || self.nodes.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "grid has {}/{}/{} entries for lo/hi/nodes, expected {dim}",
                self.lo.len(),
                self.hi.len(),
                self.nodes.len()
            )));
        }
        for k in 0..dim {
            if !(self.lo[k].is_finite() && self.hi[k].is_finite() && self.lo[k] < self.hi[k]) {
                return Err(Error::InvalidGrid(format!("axis {k}: need lo < hi")));
            }
            if self.nodes[k] < MIN_NODES {
                return Err(Error::GridTooCoarse(format!(
                    "axis {k} has {} nodes, at least {MIN_NODES} required",
                    self.nodes[k]
                )));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| (self.hi[k] - self.lo[k]) / (self.nodes[k] - 1) as f64)
            .collect()
    }

    pub fn position(&self, idx: &[usize]) -> Vec<f64> {
        let h = self.spacing();
        idx.iter().enumerate().map(|(k, &i)| self.lo[k] + h[k] * i as f64).collect()
    }

    pub fn center_index(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n / 2).collect()
    }

    /// Same box with the spacing halved.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            nodes: self.nodes.iter().map(|n| 2 * (n - 1) + 1).collect(),
        }
    }

    fn total_nodes(&self) -> Option<usize> {
        self.nodes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n))
    }
}

/// Which lattice nodes carry a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Layout {
    Full,
    Sparse { indices: Vec<Vec<usize>> },
}

impl Layout {
    /// Nodes within lattice L1-distance `radius` of the grid center. Radius 2
    /// is the smallest that supports a Pfaffian derivative at the center.
    pub fn star(grid: &GridSpec, radius: usize) -> Result<Layout> {
        fn rec(k: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if k == cur.len() {
                out.push(cur.clone());
                return;
            }
            for step in -(left as i64)..=(left as i64) {
                cur[k] = step;
                rec(k + 1, left - step.unsigned_abs() as usize, cur, out);
            }
            cur[k] = 0;
        }
        let center = grid.center_index();
        let mut offsets = Vec::new();
        rec(0, radius, &mut vec![0; grid.dim()], &mut offsets);
        let mut indices = Vec::new();
        for off in offsets {
            let idx: Option<Vec<usize>> = center
                .iter()
                .zip(&off)
                .zip(&grid.nodes)
                .map(|((&c, &o), &n)| {
                    let v = c as i64 + o;
                    (v >= 0 && v < n as i64).then_some(v as usize)
                })
                .collect();
            if let Some(idx) = idx {
                indices.push(idx);
            }
        }
        Ok(Layout::Sparse { indices })
    }

    pub fn node_indices(&self, grid: &GridSpec) -> Result<Vec<Vec<usize>>> {
        match self {
            Layout::Full => {
                let total = grid
                    .total_nodes()
                    .filter(|&t| t <= MAX_FULL_NODES)
                    .ok_or_else(|| Error::InvalidGrid(format!("full layout exceeds {MAX_FULL_NODES} nodes; use a sparse layout")))?;
                let mut out = Vec::with_capacity(total);
                let mut idx = vec![0; grid.dim()];
                loop {
                    out.push(idx.clone());
                    let mut k = grid.dim();
                    loop {
                        if k == 0 {
                            return Ok(out);
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < grid.nodes[k] {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
            Layout::Sparse { indices } => {
                for idx in indices {
                    if idx.len() != grid.dim() || idx.iter().zip(&grid.nodes).any(|(i, n)| i >= n) {
                        return Err(Error::InvalidGrid(format!("node {idx:?} outside the grid")));
                    }
                }
                Ok(indices.clone())
            }
        }
    }
}

fn condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min > 0.0 { max / min } else { f64::INFINITY }
}

/// Coframes sampled at lattice nodes.
#[derive(Debug, Clone)]
pub struct CoframeField {
    signature: Signature,
    grid: GridSpec,
    layout: Layout,
    nodes: Vec<Vec<usize>>,
    frames: Vec<DMatrix<f64>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl CoframeField {
    pub fn new(signature: Signature, grid: GridSpec, layout: Layout, frames: Vec<DMatrix<f64>>) -> Result<Self> {
        grid.validate(signature.n())?;
        let nodes = layout.node_indices(&grid)?;
        if nodes.len() != frames.len() {
            return Err(Error::ComponentCount {
                expected: nodes.len(),
                found: frames.len(),
            });
        }
        let n = signature.n();
        let mut lookup = HashMap::with_capacity(nodes.len());
        for (k, (idx, e)) in nodes.iter().zip(&frames).enumerate() {
            if e.shape() != (n, n) {
                return Err(Error::SpecMismatch(format!("frame at {idx:?} is {}x{}, expected {n}x{n}", e.nrows(), e.ncols())));
            }
            if e.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(k));
            }
            let cond = condition(e);
            if !cond.is_finite() {
                return Err(Error::SingularFrame(idx.clone()));
            }
            if cond >= MAX_CONDITION {
                return Err(Error::IllConditioned { node: idx.clone(), cond });
            }
            if lookup.insert(idx.clone(), k).is_some() {
                return Err(Error::InvalidGrid(format!("node {idx:?} listed twice")));
            }
        }
        Ok(CoframeField {
            signature,
            grid,
            layout,
            nodes,
            frames,
            lookup,
        })
    }

    pub fn try_from_fn(
        signature: Signature,
        grid: GridSpec,
        layout: Layout,
        f: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Sync + Send,
    ) -> Result<Self> {
        grid.validate(signature.n())?;
        let nodes = layout.node_indices(&grid)?;
        let frames = crate::par::map(&nodes, |idx| f(&grid.position(idx)))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        CoframeField::new(signature, grid, layout, frames)
    }

    pub fn from_fn(
        signature: Signature,
        grid: GridSpec,
        layout: Layout,
        f: impl Fn(&[f64]) -> DMatrix<f64> + Sync + Send,
    ) -> Result<Self> {
        CoframeField::try_from_fn(signature, grid, layout, |x| Ok(f(x)))
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn nodes(&self) -> &[Vec<usize>] {
        &self.nodes
    }

    pub fn frames(&self) -> &[DMatrix<f64>] {
        &self.frames
    }

    pub fn frame_at(&self, idx: &[usize]) -> Option<&DMatrix<f64>> {
        self.lookup.get(idx).map(|&k| &self.frames[k])
    }

    fn neighbours(&self, k: usize) -> Option<Vec<(usize, usize)>> {
        neighbours(&self.nodes[k], &self.lookup)
    }
}

/// For each axis, the ids of the `-1` and `+1` neighbours, if all exist.
fn neighbours(idx: &[usize], lookup: &HashMap<Vec<usize>, usize>) -> Option<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(idx.len());
    let mut probe = idx.to_vec();
    for mu in 0..idx.len() {
        if idx[mu] == 0 {
            return None;
        }
        probe[mu] = idx[mu] - 1;
        let lo = *lookup.get(&probe)?;
        probe[mu] = idx[mu] + 1;
        let hi = *lookup.get(&probe)?;
        probe[mu] = idx[mu];
        out.push((lo, hi));
    }
    Some(out)
}

/// Coordinate components `D[A][μ][ν]` of `dω^A = Σ_{μ<ν} D[A][μ][ν] dx^μ ∧ dx^ν`
/// at the nodes where central differences are available.
#[derive(Debug, Clone)]
pub struct TwoFormField {
    pub nodes: Vec<Vec<usize>>,
    /// Row-major `n × n × n` per node, antisymmetric in the last two.
    pub coefficients: Vec<Vec<f64>>,
    n: usize,
}

impl TwoFormField {
    pub fn get(&self, node: usize, a: usize, mu: usize, nu: usize) -> f64 {
        self.coefficients[node][(a * self.n + mu) * self.n + nu]
    }
}

pub fn exterior_derivative(f: &CoframeField) -> TwoFormField {
    let n = f.signature.n();
    let h = f.grid.spacing();
    let interior: Vec<(usize, Vec<(usize, usize)>)> = (0..f.nodes.len())
        .filter_map(|k| f.neighbours(k).map(|nb| (k, nb)))
        .collect();
    let coefficients = crate::par::map(&interior, |(_, nb)| {
        let de: Vec<DMatrix<f64>> = nb
            .iter()
            .enumerate()
            .map(|(mu, &(lo, hi))| (&f.frames[hi] - &f.frames[lo]) / (2.0 * h[mu]))
            .collect();
        let mut d = vec![0.0; n * n * n];
        for a in 0..n {
            for mu in 0..n {
                for nu in 0..n {
                    d[(a * n + mu) * n + nu] = de[mu][(a, nu)] - de[nu][(a, mu)];
                }
            }
        }
        d
    });
    TwoFormField {
        nodes: interior.iter().map(|(k, _)| f.nodes[*k].clone()).collect(),
        coefficients,
        n,
    }
}

/// Raw coefficients at the nodes of a two-form field.
#[derive(Debug, Clone)]
pub struct RawField {
    pub nodes: Vec<Vec<usize>>,
    pub raw: Vec<RawCoefficients>,
}

fn raw_at(s: Signature, d: &[f64], e: &DMatrix<f64>, node: &[usize]) -> Result<RawCoefficients> {
    let n = s.n();
    let finv = e.clone().try_inverse().ok_or_else(|| Error::SingularFrame(node.to_vec()))?;
    // M_A = ½ Fᵀ D_A F: components of dω^A on ω^P ∧ ω^Q (summed over all P, Q).
    let mut m = Vec::with_capacity(n);
    for a in 0..n {
        let da = DMatrix::from_fn(n, n, |mu, nu| d[(a * n + mu) * n + nu]);
        m.push(finv.transpose() * da * &finv * 0.5);
    }
    let u = IndexedTensor::from_fn(s, torsion_spec(), |x| {
        let (i, beta, gamma, alpha, j, k) = (x[0], x[1], x[2], x[3], x[4], x[5]);
        m[s.flat(alpha, i)][(s.flat(beta, j), s.flat(gamma, k))]
    });
    RawCoefficients::antisymmetrized(&u)
}

pub fn raw_structure_coeffs(f: &CoframeField) -> Result<RawField> {
    let s = f.signature;
    let d = exterior_derivative(f);
    let ids: Vec<usize> = (0..d.nodes.len()).collect();
    let raw = crate::par::map(&ids, |&k| {
        let e = f.frame_at(&d.nodes[k]).expect("node of the field");
        raw_at(s, &d.coefficients[k], e, &d.nodes[k])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RawField { nodes: d.nodes, raw })
}

/// Torsion at every node with a central-difference stencil.
#[derive(Debug, Clone)]
pub struct TorsionField {
    pub signature: Signature,
    pub nodes: Vec<Vec<usize>>,
    pub torsion: Vec<TorsionTensor>,
    pub sup_raw: f64,
    pub sup_a: f64,
    pub sup_alpha: f64,
    pub sup_beta: f64,
}

impl TorsionField {
    pub fn at(&self, idx: &[usize]) -> Option<&TorsionTensor> {
        self.nodes.iter().position(|n| n == idx).map(|k| &self.torsion[k])
    }
}

pub fn torsion_field(f: &CoframeField, tol: f64) -> Result<TorsionField> {
    let rf = raw_structure_coeffs(f)?;
    let torsion = crate::par::map(&rf.raw, |u| torsion_from_raw(u, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let sup = |g: &dyn Fn(&TorsionTensor) -> f64| torsion.iter().map(g).fold(0.0, f64::max);
    Ok(TorsionField {
        signature: f.signature,
        sup_raw: rf.raw.iter().map(|u| u.tensor().max_abs()).fold(0.0, f64::max),
        sup_a: sup(&|t| t.a.max_abs()),
        sup_alpha: sup(&|t| t.a_alpha.max_abs()),
        sup_beta: sup(&|t| t.a_beta.max_abs()),
        nodes: rf.nodes,
        torsion,
    })
}

/// Pfaffian derivative of a tensor sampled at `±e_μ` neighbours of a node
/// with inverse frame `finv`. The new upper Greek index is inserted after the
/// upper slots and the new lower Latin index appended.
pub fn pfaffian_derivative(
    finv: &DMatrix<f64>,
    spacing: &[f64],
    neighbours: &[(&IndexedTensor, &IndexedTensor)],
) -> Result<IndexedTensor> {
    let (lo0, _) = neighbours.first().ok_or(Error::InsufficientData("no neighbours".into()))?;
    let s = lo0.signature();
    let n = s.n();
    if neighbours.len() != n || spacing.len() != n || finv.shape() != (n, n) {
        return Err(Error::SpecMismatch("stencil does not match the signature".into()));
    }
    let base = lo0.spec().slots().to_vec();
    let uppers = base.iter().take_while(|sl| sl.variance == Variance::Up).count();
    let mut slots = base.clone();
    slots.insert(uppers, Slot::new(Variance::Up, Alphabet::Greek));
    slots.push(Slot::new(Variance::Down, Alphabet::Latin));
    let spec = SlotSpec::new(slots)?;
    let da: Vec<Vec<f64>> = neighbours
        .iter()
        .zip(spacing)
        .map(|((lo, hi), h)| {
            lo.check_compatible(hi)?;
            lo.check_compatible(lo0)?;
            Ok(lo.components().iter().zip(hi.components()).map(|(x, y)| (y - x) / (2.0 * h)).collect())
        })
        .collect::<Result<_>>()?;
    // g[P][c] = Σ_μ F[μ][P] ∂_μ t[c]
    let len = lo0.len();
    let g: Vec<Vec<f64>> = (0..n)
        .map(|pp| {
            let mut row = vec![0.0; len];
            for (mu, d) in da.iter().enumerate() {
                let w = finv[(mu, pp)];
                row.iter_mut().zip(d).for_each(|(r, v)| *r += w * v);
            }
            row
        })
        .collect();
    let last = spec.rank() - 1;
    let mut idx = Vec::with_capacity(base.len());
    Ok(IndexedTensor::from_fn(s, spec, |x| {
        idx.clear();
        idx.extend(x[..uppers].iter().chain(&x[uppers + 1..last]).copied());
        g[s.flat(x[uppers], x[last])][lo0.offset(&idx)]
    }))
}

fn stencils<'a, T>(
    nodes: &[Vec<usize>],
    values: &'a [T],
) -> Vec<(usize, Vec<(&'a T, &'a T)>)> {
    let lookup: HashMap<Vec<usize>, usize> = nodes.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
    (0..nodes.len())
        .filter_map(|k| {
            neighbours(&nodes[k], &lookup).map(|nb| (k, nb.into_iter().map(|(lo, hi)| (&values[lo], &values[hi])).collect()))
        })
        .collect()
}

fn inverse_frame(f: &CoframeField, node: &[usize]) -> Result<DMatrix<f64>> {
    let e = f.frame_at(node).ok_or_else(|| Error::InvalidGrid(format!("node {node:?} not in the field")))?;
    e.clone().try_inverse().ok_or_else(|| Error::SingularFrame(node.to_vec()))
}

/// Pfaffian derivatives of the torsion along the coframe, at every node whose
/// axis neighbours all carry torsion. The connection correction is omitted.
pub fn pfaffian_field(tf: &TorsionField, f: &CoframeField) -> Result<Vec<(Vec<usize>, TorsionJet)>> {
    tf.signature.check_same(&f.signature)?;
    let h = f.grid.spacing();
    let a: Vec<&IndexedTensor> = tf.torsion.iter().map(|t| &t.a).collect();
    let eligible = stencils(&tf.nodes, &a);
    if eligible.is_empty() {
        return Err(Error::GridTooCoarse(
            "no node has torsion at all axis neighbours; two interior layers are needed".into(),
        ));
    }
    crate::par::map(&eligible, |(k, nb)| {
        let node = &tf.nodes[*k];
        let nb: Vec<_> = nb.iter().map(|(lo, hi)| (**lo, **hi)).collect();
        let d = pfaffian_derivative(&inverse_frame(f, node)?, &h, &nb)?;
        Ok((node.clone(), TorsionJet::new(tf.torsion[*k].clone(), d)?))
    })
    .into_iter()
    .collect()
}

/// Pfaffian derivatives of `(b², b¹)` sampled at `nodes`, in the slot layout
/// expected by [`TorsionJet::with_b_derivative`].
pub fn b_derivative_field(
    f: &CoframeField,
    nodes: &[Vec<usize>],
    b: &[(IndexedTensor, IndexedTensor)],
) -> Result<Vec<(Vec<usize>, IndexedTensor, IndexedTensor)>> {
    let h = f.grid.spacing();
    let eligible = stencils(nodes, b);
    crate::par::map(&eligible, |(k, nb)| {
        let finv = inverse_frame(f, &nodes[*k])?;
        let greek: Vec<_> = nb.iter().map(|(lo, hi)| (&lo.1, &hi.1)).collect();
        let latin: Vec<_> = nb.iter().map(|(lo, hi)| (&lo.0, &hi.0)).collect();
        Ok((
            nodes[*k].clone(),
            pfaffian_derivative(&finv, &h, &greek)?,
            pfaffian_derivative(&finv, &h, &latin)?,
        ))
    })
    .into_iter()
    .collect()
}

/// Applies `ω ↦ λ(x) A(x) ω B(x)` nodewise.
pub fn gauge_transform(
    f: &CoframeField,
    g: impl Fn(&[f64]) -> GroupElement + Sync + Send,
    tol: f64,
) -> Result<CoframeField> {
    let ids: Vec<usize> = (0..f.nodes.len()).collect();
    let frames = crate::par::map(&ids, |&k| {
        let x = f.grid.position(&f.nodes[k]);
        let el = g(&x);
        let el = GroupElement::new(el.greek, el.latin, el.scale, tol)?;
        Ok(el.coframe_matrix() * &f.frames[k])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    CoframeField::new(f.signature, f.grid.clone(), f.layout.clone(), frames)
}

pub fn gauge_transform_constant(f: &CoframeField, g: &GroupElement, tol: f64) -> Result<CoframeField> {
    gauge_transform(f, |_| g.clone(), tol)
}

/// Serialized field: header plus frames inline or in a binary side file of
/// little-endian IEEE-754 doubles, frames in node order, each row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldFile {
    pub p: usize,
    pub q: usize,
    pub grid: GridSpec,
    pub layout: Layout,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<Vec<Vec<f64>>>,
    /// Path of the binary frame data, relative to the header.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<String>,
}

fn row_major(e: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = e.shape();
    (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| e[(i, j)]).collect()
}

impl CoframeField {
    pub fn to_file(&self) -> FieldFile {
        FieldFile {
            p: self.signature.p(),
            q: self.signature.q(),
            grid: self.grid.clone(),
            layout: self.layout.clone(),
            frames: Some(self.frames.iter().map(row_major).collect()),
            binary: None,
        }
    }

    fn from_rows(header: &FieldFile, rows: Vec<Vec<f64>>) -> Result<Self> {
        let s = Signature::new(header.p, header.q)?;
        let n = s.n();
        let frames = rows
            .into_iter()
            .map(|r| {
                if r.len() != n * n {
                    return Err(Error::ComponentCount {
                        expected: n * n,
                        found: r.len(),
                    });
                }
                Ok(DMatrix::from_row_slice(n, n, &r))
            })
            .collect::<Result<Vec<_>>>()?;
        CoframeField::new(s, header.grid.clone(), header.layout.clone(), frames)
    }

    pub fn from_file(file: FieldFile, base: &Path) -> Result<Self> {
        match (&file.frames, &file.binary) {
            (Some(rows), None) => CoframeField::from_rows(&file, rows.clone()),
            (None, Some(bin)) => {
                let bytes = std::fs::read(base.join(bin))?;
                if bytes.len() % 8 != 0 {
                    return Err(Error::Parse("binary frame data is not a whole number of doubles".into()));
                }
                let vals: Vec<f64> = bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
                    .collect();
                let n = file.p * file.q;
                if n == 0 || vals.len() % (n * n) != 0 {
                    return Err(Error::Parse("binary frame data has the wrong length".into()));
                }
                let rows = vals.chunks(n * n).map(|c| c.to_vec()).collect();
                CoframeField::from_rows(&file, rows)
            }
            _ => Err(Error::Parse("field file needs exactly one of `frames` or `binary`".into())),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(&self.to_file())?)?;
        Ok(())
    }

    /// Writes a JSON header at `path` and the frames to `path` with extension `.bin`.
    pub fn write_binary(&self, path: &Path) -> Result<PathBuf> {
        let bin = path.with_extension("bin");
        let mut header = self.to_file();
        header.frames = None;
        header.binary = Some(
            bin.file_name()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Parse("binary path is not valid UTF-8".into()))?
                .to_string(),
        );
        let mut bytes = Vec::with_capacity(self.frames.len() * self.signature.n().pow(2) * 8);
        for e in &self.frames {
            for v in row_major(e) {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        std::fs::write(&bin, bytes)?;
        std::fs::write(path, serde_json::to_string(&header)?)?;
        Ok(bin)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: FieldFile = serde_json::from_str(&text)?;
        CoframeField::from_file(file, path.parent().unwrap_or(Path::new(".")))
    }
}
