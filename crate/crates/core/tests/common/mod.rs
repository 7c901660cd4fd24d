//! Reference implementations written with explicit index loops, sharing no
//! code with the library beyond component storage.

#![allow(dead_code)]

use almost_grassmann::tensor::{IndexedTensor, Signature};

pub const PERMS3: [([usize; 3], f64); 6] = [
    ([0, 1, 2], 1.0),
    ([1, 2, 0], 1.0),
    ([2, 0, 1], 1.0),
    ([1, 0, 2], -1.0),
    ([0, 2, 1], -1.0),
    ([2, 1, 0], -1.0),
];

/// Calls `f` on every index tuple of a tensor with the given per-slot ranges.
pub fn each(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0; dims.len()];
    if dims.contains(&0) {
        return;
    }
    loop {
        f(&idx);
        let mut k = dims.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn d(a: usize, b: usize) -> f64 {
    if a == b { 1.0 } else { 0.0 }
}

/// Torsion projection `a = u + x + y + z`, slots `(i, β, γ, α, j, k)`.
pub fn project(u: &IndexedTensor) -> IndexedTensor {
    let s = u.signature();
    let (p, q) = (s.p(), s.q());
    let (pf, qf) = (p as f64, q as f64);
    let g = |i, b, c, a, j, k| u.get(&[i, b, c, a, j, k]);
    // Traces over the Latin pair (i, j) and the Greek pair (β, α).
    let tg = |b: usize, c: usize, a: usize, k: usize| (0..q).map(|i| g(i, b, c, a, i, k)).sum::<f64>();
    let tl = |i: usize, c: usize, j: usize, k: usize| (0..p).map(|a| g(i, a, c, a, j, k)).sum::<f64>();
    let v = |c: usize, k: usize| (0..q).map(|i| tl(i, c, i, k)).sum::<f64>();
    let vt = |c: usize, k: usize| (0..q).map(|l| tl(l, c, k, l)).sum::<f64>();
    let x0 = |i, b, c, a, j, k| d(i, j) * (qf * tg(b, c, a, k) + tg(c, b, a, k));
    let y0 = |i, b, c, a, j, k| d(b, a) * (pf * tl(i, c, j, k) + tl(i, c, k, j));
    let z0 = |i, b, c, a, j, k| {
        d(b, a)
            * ((pf * qf - 1.0) * (d(i, j) * v(c, k) + d(i, k) * vt(c, j))
                + (qf - pf) * (d(i, j) * vt(c, k) + d(i, k) * v(c, j)))
    };
    let alt = |f: &dyn Fn(usize, usize, usize, usize, usize, usize) -> f64, x: &[usize]| {
        0.5 * (f(x[0], x[1], x[2], x[3], x[4], x[5]) - f(x[0], x[2], x[1], x[3], x[5], x[4]))
    };
    let cx = -2.0 / (qf * qf - 1.0);
    let cy = -2.0 / (pf * pf - 1.0);
    let cz = 2.0 / ((pf * pf - 1.0) * (qf * qf - 1.0));
    IndexedTensor::from_fn(s, u.spec().clone(), |x| {
        u.get(x) + cx * alt(&x0, x) + cy * alt(&y0, x) + cz * alt(&z0, x)
    })
}

/// `(max |Σ_α a^{iαγ}_{αjk}|, max |Σ_i a^{iβγ}_{αik}|)`.
pub fn torsion_traces(a: &IndexedTensor) -> (f64, f64) {
    let s = a.signature();
    let (p, q) = (s.p(), s.q());
    let mut greek: f64 = 0.0;
    each(&[q, p, q, q], |x| {
        let (i, c, j, k) = (x[0], x[1], x[2], x[3]);
        greek = greek.max((0..p).map(|al| a.get(&[i, al, c, al, j, k])).sum::<f64>().abs());
    });
    let mut latin: f64 = 0.0;
    each(&[p, p, p, q], |x| {
        let (b, c, al, k) = (x[0], x[1], x[2], x[3]);
        latin = latin.max((0..q).map(|i| a.get(&[i, b, c, al, i, k])).sum::<f64>().abs());
    });
    (greek, latin)
}

/// `max |a^{iβγ}_{αjk} + a^{iγβ}_{αkj}|`.
pub fn pair_antisymmetry(a: &IndexedTensor) -> f64 {
    let mut r: f64 = 0.0;
    each(a.dims(), |x| {
        r = r.max((a.get(x) + a.get(&[x[0], x[2], x[1], x[3], x[5], x[4]])).abs());
    });
    r
}

/// `(a_α, a_β)`: symmetric parts in `(j, k)` and in `(β, γ)`.
pub fn split(a: &IndexedTensor) -> (IndexedTensor, IndexedTensor) {
    let s = a.signature();
    let alpha = IndexedTensor::from_fn(s, a.spec().clone(), |x| {
        0.5 * (a.get(x) + a.get(&[x[0], x[1], x[2], x[3], x[5], x[4]]))
    });
    let beta = IndexedTensor::from_fn(s, a.spec().clone(), |x| {
        0.5 * (a.get(x) + a.get(&[x[0], x[2], x[1], x[3], x[4], x[5]]))
    });
    (alpha, beta)
}

/// Alternation over the vertical pairs `(1,5), (2,6), (3,7)` of an
/// eight-slot tensor.
pub fn alt3(t: &IndexedTensor) -> IndexedTensor {
    IndexedTensor::from_fn(t.signature(), t.spec().clone(), |x| {
        let mut acc = 0.0;
        for (perm, sign) in PERMS3 {
            let mut y = x.to_vec();
            for r in 0..3 {
                y[1 + r] = x[1 + perm[r]];
                y[5 + r] = x[5 + perm[r]];
            }
            acc += sign * t.get(&y);
        }
        acc / 6.0
    })
}

fn jet_like(s: Signature, spec: &str, f: impl FnMut(&[usize]) -> f64) -> IndexedTensor {
    IndexedTensor::from_fn(s, almost_grassmann::tensor::SlotSpec::parse(spec).unwrap(), f)
}

/// `Alt(δ^i_j b²^{βγδ}_{αkl} - δ^β_α b¹^{iγδ}_{jkl})`.
pub fn lhs_b(b1: &IndexedTensor, b2: &IndexedTensor) -> IndexedTensor {
    let s = b1.signature();
    let t = jet_like(s, "L^ G^ G^ G^ G_ L_ L_ L_", |x| {
        let (i, be, ga, de, al, j, k, l) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]);
        d(i, j) * b2.get(&[be, ga, de, al, k, l]) - d(be, al) * b1.get(&[i, ga, de, j, k, l])
    });
    alt3(&t)
}

/// `Alt(δ^ε_α c^{βγδ}_{mkl})`, slots `(β, γ, δ, ε; α, k, l, m)`.
pub fn lhs_c_greek(c: &IndexedTensor) -> IndexedTensor {
    let t = jet_like(c.signature(), "G^ G^ G^ G^ G_ L_ L_ L_", |x| {
        let (be, ga, de, ep, al, k, l, m) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]);
        d(ep, al) * c.get(&[be, ga, de, m, k, l])
    });
    alt3(&t)
}

/// `Alt(δ^i_m c^{εγδ}_{jkl})`, slots `(i, γ, δ, ε; j, k, l, m)`.
pub fn lhs_c_latin(c: &IndexedTensor) -> IndexedTensor {
    let t = jet_like(c.signature(), "L^ G^ G^ G^ L_ L_ L_ L_", |x| {
        let (i, ga, de, ep, j, k, l, m) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]);
        d(i, m) * c.get(&[ep, ga, de, j, k, l])
    });
    alt3(&t)
}

/// Random `c` with pair antisymmetry in `(γ k), (δ l)` and vanishing total
/// alternation over `(β m), (γ k), (δ l)`.
pub fn random_c(s: Signature, mut next: impl FnMut() -> f64) -> IndexedTensor {
    let spec = almost_grassmann::tensor::SlotSpec::parse("G^ G^ G^ L_ L_ L_").unwrap();
    let raw = IndexedTensor::from_fn(s, spec.clone(), |_| next());
    let anti = IndexedTensor::from_fn(s, spec.clone(), |x| {
        0.5 * (raw.get(x) - raw.get(&[x[0], x[2], x[1], x[3], x[5], x[4]]))
    });
    let total = IndexedTensor::from_fn(s, spec.clone(), |x| {
        let mut acc = 0.0;
        for (perm, sign) in PERMS3 {
            let y = [x[perm[0]], x[perm[1]], x[perm[2]], x[3 + perm[0]], x[3 + perm[1]], x[3 + perm[2]]];
            acc += sign * anti.get(&y);
        }
        acc / 6.0
    });
    IndexedTensor::from_fn(s, spec, |x| anti.get(x) - total.get(x))
}

/// Residuals of the linear conditions on `(b¹, b²)`.
pub fn b_condition_residual(b1: &IndexedTensor, b2: &IndexedTensor) -> f64 {
    let s = b1.signature();
    let (p, q) = (s.p(), s.q());
    let mut r: f64 = 0.0;
    each(b2.dims(), |x| {
        r = r.max((b2.get(x) + b2.get(&[x[0], x[2], x[1], x[3], x[5], x[4]])).abs());
    });
    each(b1.dims(), |x| {
        r = r.max((b1.get(x) + b1.get(&[x[0], x[2], x[1], x[3], x[5], x[4]])).abs());
    });
    each(&[p, p, q, q], |x| {
        let t: f64 = (0..p).map(|a| b2.get(&[a, x[0], x[1], a, x[2], x[3]])).sum();
        r = r.max(t.abs());
    });
    each(&[p, p, q, q], |x| {
        let t: f64 = (0..q).map(|j| b1.get(&[j, x[0], x[1], j, x[2], x[3]])).sum();
        r = r.max(t.abs());
    });
    // w^{βδ}_{kl} = Σ_α b²^{βαδ}_{αkl} - Σ_i b¹^{iβδ}_{kil}, with w + wᵀ = 0.
    let w = |b: usize, de: usize, k: usize, l: usize| {
        (0..p).map(|a| b2.get(&[b, a, de, a, k, l])).sum::<f64>() - (0..q).map(|i| b1.get(&[i, b, de, k, i, l])).sum::<f64>()
    };
    each(&[p, p, q, q], |x| {
        r = r.max((w(x[0], x[1], x[2], x[3]) + w(x[1], x[0], x[3], x[2])).abs());
    });
    r
}

/// Determinant by cofactor expansion.
pub fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| *v).collect())
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            sign * m[0][c] * det_i64(&minor)
        })
        .sum()
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &IndexedTensor, b: &IndexedTensor) -> f64 {
    max_abs(a.components().iter().zip(b.components()).map(|(x, y)| x - y))
}

/// Path of a file in the repository's fixture directory.
pub fn fixture(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}
