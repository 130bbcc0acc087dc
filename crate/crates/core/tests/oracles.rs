//! Independent second routes for quantities the library computes one way.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use szabo::linalg::{char_poly, max_abs, numerical_rank};
use szabo::nullcone::{linear_annihilator_space_dim, szabo_cubic};
use szabo::space::{PseudoSpace, Signature};
use szabo::spectral::char_poly_p;
use szabo::symmetry::{acdt_dimension, act_dimension, szabo_map_kernel_dim, DenseProjector};
use szabo::tensor::{
    project_to_acdt, project_to_act, validate_acdt, AcdtTensor, ActTensor, CoeffArray,
};

fn gaussian(m: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(m, |_, _| StandardNormal.sample(rng))
}

fn basis(m: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(m);
    e[i] = 1.0;
    e
}

#[test]
fn szabo_matches_direct_summation() {
    let space = PseudoSpace::new(2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..10 {
        let r = AcdtTensor::random(space, seed);
        let d = r.coeffs();
        let v = gaussian(5, &mut rng);
        let s = r.szabo(&v);
        for y in 0..5 {
            for z in 0..5 {
                let lhs = space.inner(&s.apply(&basis(5, y)), &basis(5, z)).unwrap();
                let mut rhs = 0.0;
                for a in 0..5 {
                    for b in 0..5 {
                        for c in 0..5 {
                            rhs += d.get(&[y, a, b, z, c]) * v[a] * v[b] * v[c];
                        }
                    }
                }
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                    "{lhs} {rhs}"
                );
            }
        }
    }
}

#[test]
fn jacobi_matches_direct_summation() {
    let space = PseudoSpace::new(1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..10 {
        let r = ActTensor::random(space, seed);
        let v = gaussian(3, &mut rng);
        let j = r.jacobi(&v);
        for y in 0..3 {
            for z in 0..3 {
                let lhs = space.inner(&j.apply(&basis(3, y)), &basis(3, z)).unwrap();
                let mut rhs = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        rhs += r.coeffs().get(&[y, a, b, z]) * v[a] * v[b];
                    }
                }
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
        assert_eq!(r.jacobi(&-&v).matrix(), j.matrix());
        assert!(
            max_abs(&(r.jacobi(&(&v * 2.0)).into_matrix() - j.matrix() * 4.0))
                <= 1e-12 * max_abs(j.matrix()).max(1.0)
        );
    }
}

#[test]
fn alternating_projection_equals_dense_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 2..=3 {
        for order in [4, 5] {
            let dense = DenseProjector::new(m, order).unwrap();
            let t = CoeffArray::random(m, order, &mut rng);
            let alt = if order == 4 {
                project_to_act(&t, 1e-13, 10_000).unwrap()
            } else {
                project_to_acdt(&t, 1e-13, 10_000).unwrap()
            };
            assert!(
                alt.max_abs_diff(&dense.apply(&t)) <= 1e-10,
                "m={m} order={order}"
            );
        }
    }
}

#[test]
fn dense_rank_matches_exact_dimension() {
    for m in 2..=3 {
        assert_eq!(
            DenseProjector::new(m, 4).unwrap().rank(),
            act_dimension(m).unwrap()
        );
        assert_eq!(
            DenseProjector::new(m, 5).unwrap().rank(),
            acdt_dimension(m).unwrap()
        );
    }
    // 2 and 15, frozen from the dense oracle
    assert_eq!(acdt_dimension(2).unwrap(), 2);
    assert_eq!(acdt_dimension(3).unwrap(), 15);
}

#[test]
fn exact_dimensions_follow_closed_forms() {
    for m in 1..=6 {
        assert_eq!(act_dimension(m).unwrap(), m * m * (m * m - 1) / 12);
        assert_eq!(
            acdt_dimension(m).unwrap(),
            m * m * (m * m - 1) * (m + 2) / 24
        );
    }
}

#[test]
fn projection_is_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in 2..=4 {
        let t = CoeffArray::random(m, 5, &mut rng);
        let t2 = CoeffArray::random(m, 5, &mut rng);
        let pt = project_to_acdt(&t, 1e-13, 10_000).unwrap();
        let pt2 = project_to_acdt(&t2, 1e-13, 10_000).unwrap();
        let inner = t.sub(&pt).dot(&pt2);
        assert!(inner.abs() <= 1e-9, "m={m}: {inner}");
    }
}

/// Floating-point rank of the Szabó map on an orthonormal basis of the
/// class image, for every signature of dimension `m`.
fn float_szabo_map_nullities(m: usize) -> Vec<(Signature, usize)> {
    let dense = DenseProjector::new(m, 5).unwrap();
    let eig = dense.matrix().symmetric_eigen();
    let image: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .collect();
    assert_eq!(image.len(), dense.rank());
    Signature::all_with_dim(m, m)
        .into_iter()
        .map(|sig| {
            let space = PseudoSpace::from_signature(sig);
            let cols: Vec<DVector<f64>> = image
                .iter()
                .map(|&c| {
                    let t = CoeffArray::from_vec(
                        m,
                        5,
                        eig.eigenvectors.column(c).iter().copied().collect(),
                    )
                    .unwrap();
                    let r = AcdtTensor::new(space, t, 1e-9).unwrap();
                    DVector::from_column_slice(szabo_cubic(&r).coeffs())
                })
                .collect();
            let map = DMatrix::from_columns(&cols);
            (sig, image.len() - numerical_rank(&map, 1e-9))
        })
        .collect()
}

#[test]
fn szabo_map_is_injective_float_route() {
    for m in 2..=3 {
        for (sig, nullity) in float_szabo_map_nullities(m) {
            let space = PseudoSpace::from_signature(sig);
            assert_eq!(nullity, szabo_map_kernel_dim(&space).unwrap(), "{sig}");
            assert_eq!(nullity, 0);
        }
    }
}

/// Annihilator dimension from constraints sampled at random points.
fn float_annihilator_dim(space: &PseudoSpace, rng: &mut ChaCha8Rng) -> usize {
    let m = space.dim();
    let g = |i: usize| space.signature.sign(i);
    let n = m.pow(3);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for _ in 0..(3 * m) {
        let x = gaussian(m, rng);
        // g f(x) symmetric
        for i in 0..m {
            for j in (i + 1)..m {
                let mut row = vec![0.0; n];
                for a in 0..m {
                    row[(i * m + j) * m + a] += g(i) * x[a];
                    row[(j * m + i) * m + a] -= g(j) * x[a];
                }
                rows.push(row);
            }
        }
        // f(x) x = 0
        for i in 0..m {
            let mut row = vec![0.0; n];
            for j in 0..m {
                for a in 0..m {
                    row[(i * m + j) * m + a] += x[a] * x[j];
                }
            }
            rows.push(row);
        }
    }
    let mat = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    n - numerical_rank(&mat, 1e-10)
}

#[test]
fn annihilator_float_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for sig in Signature::all_with_dim(1, 4) {
        let space = PseudoSpace::from_signature(sig);
        assert_eq!(
            float_annihilator_dim(&space, &mut rng),
            linear_annihilator_space_dim(&space).unwrap(),
            "{sig}"
        );
    }
}

#[test]
fn char_poly_matches_determinants() {
    let space = PseudoSpace::new(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..5 {
        let r = AcdtTensor::random(space, seed);
        let v = DVector::from_vec(vec![0.2, -0.1, 1.0, 0.3]);
        let c = char_poly_p(&r, &v).unwrap();
        let s = r.szabo(&v).into_matrix();
        let n = space.inner(&v, &v).unwrap();
        let p = &s * &s / n.powi(3);
        for _ in 0..5 {
            let t: f64 = StandardNormal.sample(&mut rng);
            let det = (&p - DMatrix::identity(4, 4) * t).determinant();
            let val: f64 = c.iter().rev().fold(0.0, |acc, k| acc * t + k);
            assert!(
                (det - val).abs() <= 1e-9 * det.abs().max(1.0),
                "{det} {val}"
            );
        }
        // direct route on S^2 itself, for spacelike unit v
        let vu = &v / n.sqrt();
        let s2 = r.szabo(&vu).into_matrix();
        let direct = char_poly(&(&s2 * &s2));
        let via = char_poly_p(&r, &vu).unwrap();
        for (a, b) in direct.iter().zip(&via) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}

#[test]
fn validate_single_entry_examples() {
    let mut t = CoeffArray::zeros(2, 5);
    t.set(&[0, 0, 0, 0, 0], 1.0);
    assert_eq!(validate_acdt(&t).unwrap().antisymmetry, 1.0);
}
