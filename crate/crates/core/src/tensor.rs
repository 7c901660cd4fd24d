//! Indexed tensors over the two index alphabets of an almost Grassmann
//! structure: Greek indices run over `0..p`, Latin indices over `0..q`.
//!
//! Components are stored densely in row-major order, first slot slowest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SLOTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < 2 || q < 2 {
            return Err(Error::InvalidSignature { p, q });
        }
        Ok(Signature { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Dimension of the underlying manifold.
    pub fn n(&self) -> usize {
        self.p * self.q
    }

    pub fn range(&self, alphabet: Alphabet) -> usize {
        match alphabet {
            Alphabet::Greek => self.p,
            Alphabet::Latin => self.q,
        }
    }

    /// Flat position of the coframe form with Greek index `alpha` and Latin index `i`.
    pub fn flat(&self, alpha: usize, i: usize) -> usize {
        alpha * self.q + i
    }

    /// Inverse of [`Signature::flat`]: returns `(alpha, i)`.
    pub fn split(&self, mu: usize) -> (usize, usize) {
        (mu / self.q, mu % self.q)
    }

    pub fn check_same(&self, other: &Signature) -> Result<()> {
        if self != other {
            return Err(Error::SignatureMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={})", self.p, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    Greek,
    Latin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub variance: Variance,
    pub alphabet: Alphabet,
}

impl Slot {
    pub const fn new(variance: Variance, alphabet: Alphabet) -> Self {
        Slot { variance, alphabet }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.alphabet {
            Alphabet::Greek => 'G',
            Alphabet::Latin => 'L',
        };
        let v = match self.variance {
            Variance::Up => '^',
            Variance::Down => '_',
        };
        write!(f, "{a}{v}")
    }
}

/// Ordered list of slots. Written compactly as e.g. `"L^ G^ G^ G_ L_ L_"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotSpec(Vec<Slot>);

impl SlotSpec {
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        if slots.len() > MAX_SLOTS {
            return Err(Error::TooManySlots(slots.len()));
        }
        Ok(SlotSpec(slots))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let slots = text
            .split_whitespace()
            .map(|tok| {
                let mut chars = tok.chars();
                let alphabet = match chars.next() {
                    Some('G') => Alphabet::Greek,
                    Some('L') => Alphabet::Latin,
                    _ => return Err(Error::Parse(format!("bad slot token {tok:?}"))),
                };
                let variance = match (chars.next(), chars.next()) {
                    (Some('^'), None) => Variance::Up,
                    (Some('_'), None) => Variance::Down,
                    _ => return Err(Error::Parse(format!("bad slot token {tok:?}"))),
                };
                Ok(Slot::new(variance, alphabet))
            })
            .collect::<Result<Vec<_>>>()?;
        SlotSpec::new(slots)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, slot: usize) -> Result<Slot> {
        self.0.get(slot).copied().ok_or(Error::SlotOutOfRange {
            slot,
            rank: self.0.len(),
        })
    }
}

impl fmt::Display for SlotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexedTensor {
    signature: Signature,
    spec: SlotSpec,
    dims: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<f64>,
}

fn layout(signature: &Signature, spec: &SlotSpec) -> (Vec<usize>, Vec<usize>) {
    let dims: Vec<usize> = spec.slots().iter().map(|s| signature.range(s.alphabet)).collect();
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    (dims, strides)
}

/// Advances a multi-index in row-major order; returns false after the last one.
fn advance(idx: &mut [usize], dims: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// All permutations of `0..k` with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut all = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut all);
    all.into_iter()
        .map(|perm| {
            let mut inversions = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if perm[a] > perm[b] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (perm, sign)
        })
        .collect()
}

impl IndexedTensor {
    pub fn zeros(signature: Signature, spec: SlotSpec) -> Self {
        let (dims, strides) = layout(&signature, &spec);
        let len = dims.iter().product();
        IndexedTensor {
            signature,
            spec,
            dims,
            strides,
            data: vec![0.0; len],
        }
    }

    pub fn from_components(signature: Signature, spec: SlotSpec, data: Vec<f64>) -> Result<Self> {
        let (dims, strides) = layout(&signature, &spec);
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::ComponentCount {
                expected,
                found: data.len(),
            });
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(IndexedTensor {
            signature,
            spec,
            dims,
            strides,
            data,
        })
    }

    pub fn from_fn(signature: Signature, spec: SlotSpec, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = IndexedTensor::zeros(signature, spec);
        if t.data.is_empty() {
            return t;
        }
        let mut idx = vec![0; t.rank()];
        let mut flat = 0;
        loop {
            t.data[flat] = f(&idx);
            flat += 1;
            if !advance(&mut idx, &t.dims) {
                break;
            }
        }
        t
    }

    /// Kronecker delta with one upper and one lower slot of the given alphabet.
    pub fn delta(signature: Signature, alphabet: Alphabet) -> Self {
        let spec = SlotSpec(vec![
            Slot::new(Variance::Up, alphabet),
            Slot::new(Variance::Down, alphabet),
        ]);
        IndexedTensor::from_fn(signature, spec, |i| if i[0] == i[1] { 1.0 } else { 0.0 })
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn spec(&self) -> &SlotSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    pub fn components_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_components(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    /// Calls `f(multi_index, flat_index)` for every component.
    pub fn for_each_index(&self, mut f: impl FnMut(&[usize], usize)) {
        let mut idx = vec![0; self.rank()];
        let mut flat = 0;
        loop {
            f(&idx, flat);
            flat += 1;
            if !advance(&mut idx, &self.dims) {
                break;
            }
        }
    }

    fn check_slot(&self, slot: usize) -> Result<Slot> {
        self.spec.get(slot)
    }

    pub fn check_compatible(&self, other: &IndexedTensor) -> Result<()> {
        self.signature.check_same(&other.signature)?;
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        Ok(())
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn add(&self, other: &IndexedTensor) -> Result<Self> {
        IndexedTensor::combine(&[1.0, 1.0], &[self, other])
    }

    pub fn sub(&self, other: &IndexedTensor) -> Result<Self> {
        IndexedTensor::combine(&[1.0, -1.0], &[self, other])
    }

    /// Linear combination `sum_k coeffs[k] * tensors[k]` of tensors of one spec.
    pub fn combine(coeffs: &[f64], tensors: &[&IndexedTensor]) -> Result<Self> {
        if coeffs.len() != tensors.len() || tensors.is_empty() {
            return Err(Error::SpecMismatch(format!(
                "{} coefficients for {} tensors",
                coeffs.len(),
                tensors.len()
            )));
        }
        let first = tensors[0];
        let mut out = IndexedTensor::zeros(first.signature, first.spec.clone());
        for (c, t) in coeffs.iter().zip(tensors) {
            first.check_compatible(t)?;
            for (o, v) in out.data.iter_mut().zip(&t.data) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &IndexedTensor) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Reorders slots: slot `s` of the result is slot `order[s]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let rank = self.rank();
        let mut seen = vec![false; rank];
        if order.len() != rank {
            return Err(Error::SpecMismatch(format!(
                "permutation of length {} for rank {rank}",
                order.len()
            )));
        }
        for &o in order {
            if o >= rank || seen[o] {
                return Err(Error::SpecMismatch(format!("invalid slot permutation {order:?}")));
            }
            seen[o] = true;
        }
        let slots = order.iter().map(|&o| self.spec.0[o]).collect();
        let spec = SlotSpec(slots);
        let strides: Vec<usize> = order.iter().map(|&o| self.strides[o]).collect();
        let mut out = IndexedTensor::zeros(self.signature, spec);
        let data = &self.data;
        let mut result = std::mem::take(&mut out.data);
        out.for_each_index(|idx, flat| {
            let src: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            result[flat] = data[src];
        });
        out.data = result;
        Ok(out)
    }

    /// Averages over all permutations of the given units of slots, where a
    /// unit is a group of slots moved together. `signed` selects alternation.
    fn unit_average(&self, units: &[Vec<usize>], signed: bool) -> Self {
        let perms = permutations(units.len());
        let norm = perms.len() as f64;
        let mut out = IndexedTensor::zeros(self.signature, self.spec.clone());
        let mut result = std::mem::take(&mut out.data);
        let mut src = vec![0; self.rank()];
        self.for_each_index(|idx, flat| {
            let mut acc = 0.0;
            for (perm, sign) in &perms {
                src.copy_from_slice(idx);
                for (s, unit) in units.iter().enumerate() {
                    for (r, &slot) in unit.iter().enumerate() {
                        src[slot] = idx[units[perm[s]][r]];
                    }
                }
                let v = self.data[self.offset(&src)];
                acc += if signed { sign * v } else { v };
            }
            result[flat] = acc / norm;
        });
        out.data = result;
        out
    }

    fn check_distinct(&self, slots: &[usize]) -> Result<()> {
        for (k, &s) in slots.iter().enumerate() {
            self.check_slot(s)?;
            if slots[..k].contains(&s) {
                return Err(Error::MalformedPair(format!("slot {s} referenced twice")));
            }
        }
        Ok(())
    }

    /// Alternation over vertical pairs: each pair is (Greek slot, Latin slot),
    /// and the pairs are permuted as units with the sign of the permutation.
    pub fn alternate_vertical_pairs(&self, pairs: &[(usize, usize)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::MalformedPair("at least two pairs are required".into()));
        }
        let flat: Vec<usize> = pairs.iter().flat_map(|&(g, l)| [g, l]).collect();
        self.check_distinct(&flat)?;
        let (g0, l0) = (self.check_slot(pairs[0].0)?, self.check_slot(pairs[0].1)?);
        for &(g, l) in pairs {
            let (gs, ls) = (self.check_slot(g)?, self.check_slot(l)?);
            if gs.alphabet != Alphabet::Greek || ls.alphabet != Alphabet::Latin {
                return Err(Error::MalformedPair(format!(
                    "pair ({g}, {l}) must be (Greek slot, Latin slot), found ({gs}, {ls})"
                )));
            }
            if gs.variance != g0.variance || ls.variance != l0.variance {
                return Err(Error::MalformedPair(format!(
                    "pair ({g}, {l}) has slot types ({gs}, {ls}) but the first pair has ({g0}, {l0})"
                )));
            }
        }
        let units: Vec<Vec<usize>> = pairs.iter().map(|&(g, l)| vec![g, l]).collect();
        Ok(self.unit_average(&units, true))
    }

    fn check_homogeneous(&self, slots: &[usize]) -> Result<()> {
        if slots.is_empty() {
            return Err(Error::SpecMismatch("empty slot list".into()));
        }
        self.check_distinct(slots)?;
        let first = self.check_slot(slots[0])?;
        for &s in slots {
            let sl = self.check_slot(s)?;
            if sl.alphabet != first.alphabet {
                return Err(Error::AlphabetMismatch(format!("slots {slots:?} mix alphabets")));
            }
            if sl.variance != first.variance {
                return Err(Error::VarianceMismatch(format!("slots {slots:?} mix variances")));
            }
        }
        Ok(())
    }

    pub fn symmetrize_slots(&self, slots: &[usize]) -> Result<Self> {
        self.check_homogeneous(slots)?;
        let units: Vec<Vec<usize>> = slots.iter().map(|&s| vec![s]).collect();
        Ok(self.unit_average(&units, false))
    }

    pub fn alternate_slots(&self, slots: &[usize]) -> Result<Self> {
        self.check_homogeneous(slots)?;
        let units: Vec<Vec<usize>> = slots.iter().map(|&s| vec![s]).collect();
        Ok(self.unit_average(&units, true))
    }

    /// Trace over an upper slot and a lower slot of the same alphabet.
    pub fn contract(&self, upper: usize, lower: usize) -> Result<Self> {
        let u = self.check_slot(upper)?;
        let l = self.check_slot(lower)?;
        if upper == lower {
            return Err(Error::SpecMismatch("cannot contract a slot with itself".into()));
        }
        if u.alphabet != l.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "cannot contract {u} with {l}"
            )));
        }
        if u.variance != Variance::Up || l.variance != Variance::Down {
            return Err(Error::VarianceMismatch(format!(
                "contraction needs an upper then a lower slot, found {u} and {l}"
            )));
        }
        let keep: Vec<usize> = (0..self.rank()).filter(|&s| s != upper && s != lower).collect();
        let spec = SlotSpec(keep.iter().map(|&s| self.spec.0[s]).collect());
        let mut out = IndexedTensor::zeros(self.signature, spec);
        let range = self.dims[upper];
        let diag_stride = self.strides[upper] + self.strides[lower];
        let keep_strides: Vec<usize> = keep.iter().map(|&s| self.strides[s]).collect();
        let mut result = std::mem::take(&mut out.data);
        let run = |idx: &[usize], flat: usize, result: &mut Vec<f64>| {
            let base: usize = idx.iter().zip(&keep_strides).map(|(i, s)| i * s).sum();
            result[flat] = (0..range).map(|r| self.data[base + r * diag_stride]).sum();
        };
        if out.rank() == 0 {
            run(&[], 0, &mut result);
        } else {
            out.for_each_index(|idx, flat| run(idx, flat, &mut result));
        }
        out.data = result;
        Ok(out)
    }

    /// Outer product: the slots of `self` followed by the slots of `other`.
    pub fn tensor_product(&self, other: &IndexedTensor) -> Result<Self> {
        self.signature.check_same(&other.signature)?;
        let mut slots = self.spec.0.clone();
        slots.extend_from_slice(&other.spec.0);
        let spec = SlotSpec::new(slots)?;
        let mut out = IndexedTensor::zeros(self.signature, spec);
        let m = other.data.len();
        for (a, va) in self.data.iter().enumerate() {
            for (b, vb) in other.data.iter().enumerate() {
                out.data[a * m + b] = va * vb;
            }
        }
        Ok(out)
    }

    /// Outer product followed by the listed contractions, without forming the
    /// intermediate product. Each pair names a slot of `self` and a slot of
    /// `other` with the same alphabet and opposite variance. Remaining slots of
    /// `self` come first, then remaining slots of `other`.
    pub fn contract_with(&self, other: &IndexedTensor, pairs: &[(usize, usize)]) -> Result<Self> {
        self.signature.check_same(&other.signature)?;
        let left: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let right: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        self.check_distinct(&left)?;
        other.check_distinct(&right)?;
        for &(a, b) in pairs {
            let (sa, sb) = (self.check_slot(a)?, other.check_slot(b)?);
            if sa.alphabet != sb.alphabet {
                return Err(Error::AlphabetMismatch(format!("cannot contract {sa} with {sb}")));
            }
            if sa.variance == sb.variance {
                return Err(Error::VarianceMismatch(format!("cannot contract {sa} with {sb}")));
            }
        }
        let keep_a: Vec<usize> = (0..self.rank()).filter(|s| !left.contains(s)).collect();
        let keep_b: Vec<usize> = (0..other.rank()).filter(|s| !right.contains(s)).collect();
        let mut slots: Vec<Slot> = keep_a.iter().map(|&s| self.spec.0[s]).collect();
        slots.extend(keep_b.iter().map(|&s| other.spec.0[s]));
        let spec = SlotSpec::new(slots)?;

        let summed_dims: Vec<usize> = left.iter().map(|&s| self.dims[s]).collect();
        let summed_a: Vec<usize> = left.iter().map(|&s| self.strides[s]).collect();
        let summed_b: Vec<usize> = right.iter().map(|&s| other.strides[s]).collect();
        let mut sums: Vec<(usize, usize)> = Vec::new();
        let mut k = vec![0; pairs.len()];
        loop {
            let oa = k.iter().zip(&summed_a).map(|(i, s)| i * s).sum();
            let ob = k.iter().zip(&summed_b).map(|(i, s)| i * s).sum();
            sums.push((oa, ob));
            if k.is_empty() || !advance(&mut k, &summed_dims) {
                break;
            }
        }

        let na = keep_a.len();
        let strides_a: Vec<usize> = keep_a.iter().map(|&s| self.strides[s]).collect();
        let strides_b: Vec<usize> = keep_b.iter().map(|&s| other.strides[s]).collect();
        let mut out = IndexedTensor::zeros(self.signature, spec);
        let mut result = std::mem::take(&mut out.data);
        let run = |idx: &[usize], flat: usize, result: &mut Vec<f64>| {
            let ba: usize = idx[..na].iter().zip(&strides_a).map(|(i, s)| i * s).sum();
            let bb: usize = idx[na..].iter().zip(&strides_b).map(|(i, s)| i * s).sum();
            result[flat] = sums
                .iter()
                .map(|(oa, ob)| self.data[ba + oa] * other.data[bb + ob])
                .sum();
        };
        if out.rank() == 0 {
            run(&[], 0, &mut result);
        } else {
            out.for_each_index(|idx, flat| run(idx, flat, &mut result));
        }
        out.data = result;
        Ok(out)
    }

    /// Applies `m` along one slot: `out[.., x, ..] = sum_y m[(x, y)] * t[.., y, ..]`.
    pub fn transform_slot(&self, slot: usize, m: &nalgebra::DMatrix<f64>) -> Result<Self> {
        self.check_slot(slot)?;
        let d = self.dims[slot];
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::SpecMismatch(format!(
                "{}x{} matrix applied to a slot of range {d}",
                m.nrows(),
                m.ncols()
            )));
        }
        let stride = self.strides[slot];
        let mut out = self.clone();
        self.for_each_index(|idx, flat| {
            let x = idx[slot];
            let base = flat - x * stride;
            out.data[flat] = (0..d).map(|y| m[(x, y)] * self.data[base + y * stride]).sum();
        });
        Ok(out)
    }

    /// Largest violation of antisymmetry under exchanging the two vertical pairs.
    pub fn pair_antisymmetry_residual(&self, a: (usize, usize), b: (usize, usize)) -> Result<f64> {
        let swapped = self.swap_pairs(a, b)?;
        Ok(self
            .data
            .iter()
            .zip(&swapped.data)
            .fold(0.0, |m, (x, y)| m.max((x + y).abs())))
    }

    /// Exchanges two vertical pairs of slots.
    pub fn swap_pairs(&self, a: (usize, usize), b: (usize, usize)) -> Result<Self> {
        self.check_distinct(&[a.0, a.1, b.0, b.1])?;
        let (sa0, sa1, sb0, sb1) = (
            self.check_slot(a.0)?,
            self.check_slot(a.1)?,
            self.check_slot(b.0)?,
            self.check_slot(b.1)?,
        );
        if sa0 != sb0 || sa1 != sb1 {
            return Err(Error::MalformedPair(format!(
                "pairs ({}, {}) and ({}, {}) have different slot types",
                a.0, a.1, b.0, b.1
            )));
        }
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.swap(a.0, b.0);
        order.swap(a.1, b.1);
        self.permute(&order)
    }
}

/// Serialized form of an [`IndexedTensor`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    pub p: usize,
    pub q: usize,
    pub slots: Vec<Slot>,
    pub components: Vec<f64>,
}

impl From<&IndexedTensor> for TensorFile {
    fn from(t: &IndexedTensor) -> Self {
        TensorFile {
            p: t.signature.p,
            q: t.signature.q,
            slots: t.spec.0.clone(),
            components: t.data.clone(),
        }
    }
}

impl TryFrom<TensorFile> for IndexedTensor {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        let sig = Signature::new(f.p, f.q)?;
        IndexedTensor::from_components(sig, SlotSpec::new(f.slots)?, f.components)
    }
}

impl Serialize for IndexedTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexedTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = TensorFile::deserialize(d)?;
        IndexedTensor::try_from(f).map_err(serde::de::Error::custom)
    }
}
