mod common;

use almost_grassmann::geometry::{
    generators, numerical_rank, pluecker_embed, second_fundamental_forms, segre_factors, segre_membership,
    segre_param, subsets, SegrePoint, DEFAULT_CONE_TOL,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Largest 2×2 minor relative to the largest entry squared.
fn minor_oracle(z: &DMatrix<f64>) -> f64 {
    let scale = z.amax().powi(2);
    let mut worst: f64 = 0.0;
    for a in 0..z.nrows() {
        for b in a + 1..z.nrows() {
            for i in 0..z.ncols() {
                for j in i + 1..z.ncols() {
                    worst = worst.max((z[(a, i)] * z[(b, j)] - z[(a, j)] * z[(b, i)]).abs());
                }
            }
        }
    }
    worst / scale
}

#[test]
fn membership_agrees_with_minors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, q) in [(2, 2), (2, 3), (3, 2), (3, 4), (4, 4)] {
        for _ in 0..50 {
            let pt = segre_param(&random_vector(&mut rng, p), &random_vector(&mut rng, q));
            assert!(minor_oracle(&pt.z) < 1e-14);
            assert!(segre_membership(&pt, DEFAULT_CONE_TOL));

            let generic = SegrePoint::new(random_matrix(&mut rng, p, q)).unwrap();
            assert!(minor_oracle(&generic.z) > 1e-6);
            assert!(!segre_membership(&generic, DEFAULT_CONE_TOL));
        }
    }
}

#[test]
fn vertex_is_a_member() {
    assert!(segre_membership(&SegrePoint::new(DMatrix::zeros(3, 2)).unwrap(), DEFAULT_CONE_TOL));
}

#[test]
fn factors_reproduce_the_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let pt = segre_param(&random_vector(&mut rng, 3), &random_vector(&mut rng, 4));
        let (t, s) = segre_factors(&pt, DEFAULT_CONE_TOL).unwrap();
        assert!((t * s.transpose() - &pt.z).amax() < 1e-12);
    }
    let generic = SegrePoint::new(random_matrix(&mut rng, 3, 3)).unwrap();
    assert!(segre_factors(&generic, DEFAULT_CONE_TOL).is_err());
}

#[test]
fn pluecker_coordinates_satisfy_the_quadric() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let basis = random_matrix(&mut rng, 2, 4);
        let c = pluecker_embed(&basis).unwrap().coordinates;
        // Subsets in order 01, 02, 03, 12, 13, 23.
        let quadric = c[0] * c[5] - c[1] * c[4] + c[2] * c[3];
        assert!(quadric.abs() < 1e-13, "{quadric}");
    }
}

#[test]
fn pluecker_coordinates_are_minors() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let basis = random_matrix(&mut rng, 3, 5);
    let pt = pluecker_embed(&basis).unwrap();
    for (cols, v) in subsets(5, 3).iter().zip(&pt.coordinates) {
        let m: Vec<Vec<f64>> = (0..3).map(|r| cols.iter().map(|&c| basis[(r, c)]).collect()).collect();
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        assert!((det - v).abs() < 1e-13);
    }
    // Row operations rescale every coordinate by the same determinant.
    let g = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 0.5, 1.0, 0.0, 1.0]);
    let moved = pluecker_embed(&(&g * &basis)).unwrap();
    let det = g.determinant();
    for (a, b) in moved.coordinates.iter().zip(&pt.coordinates) {
        assert!((a - det * b).abs() < 1e-12);
    }
    assert!(pluecker_embed(&DMatrix::zeros(2, 4)).is_err());
}

#[test]
fn fundamental_forms_vanish_exactly_on_the_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (p, q) in [(2, 2), (3, 3), (2, 4)] {
        for _ in 0..30 {
            let on = segre_param(&random_vector(&mut rng, p), &random_vector(&mut rng, q)).z;
            let off = random_matrix(&mut rng, p, q);
            for (dz, member) in [(on, true), (off, false)] {
                let worst = second_fundamental_forms(&dz).iter().fold(0.0f64, |m, v| m.max(v.value.abs()));
                let sv = dz.clone().singular_values();
                let mut sv: Vec<f64> = sv.iter().copied().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                let rank_one = sv[1] <= 1e-12 * sv[0];
                assert_eq!(rank_one, member);
                assert_eq!(worst < 1e-14, member);
            }
        }
    }
    assert_eq!(second_fundamental_forms(&DMatrix::zeros(3, 4)).len(), 3 * 6);
}

#[test]
fn generators_meet_in_a_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for (p, q) in [(2, 2), (2, 3), (3, 4)] {
        let t = random_vector(&mut rng, p);
        let s = random_vector(&mut rng, q);
        let (pp, qp) = generators(&t, &s);
        assert_eq!(numerical_rank(&pp, 1e-12), p);
        assert_eq!(numerical_rank(&qp, 1e-12), q);
        let both = DMatrix::from_columns(&pp.column_iter().chain(qp.column_iter()).map(|c| c.into_owned()).collect::<Vec<_>>());
        assert_eq!(numerical_rank(&both, 1e-10), p + q - 1);
        // Every column of either plane lies on the cone.
        for plane in [&pp, &qp] {
            for c in plane.column_iter() {
                let z = DMatrix::from_row_iterator(p, q, c.iter().copied());
                assert!(segre_membership(&SegrePoint::new(z).unwrap(), DEFAULT_CONE_TOL));
            }
        }
    }
}
