mod common;

use common::{dim, direct_fourier_slices, gaussian, random_shaped, rng};
use proptest::prelude::*;
use tubal_core::{
    conj_transpose, fft3, identity_tensor, ifft3, standard_basis, tproduct, tproduct_naive, Norm, Tensor3,
};

fn tensor_strategy(max: usize) -> impl Strategy<Value = Tensor3> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(|(n1, n2, n3)| {
        proptest::collection::vec(-10.0f64..10.0, n1 * n2 * n3)
            .prop_map(move |data| Tensor3::from_vec(n1, n2, n3, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fft_round_trip(a in tensor_strategy(8)) {
        let back = ifft3(&fft3(&a)).unwrap();
        prop_assert!(back.relative_error(&a).unwrap() < 1e-12);
    }

    #[test]
    fn parseval(a in tensor_strategy(8)) {
        let lhs = a.norm(Norm::Frobenius).powi(2) * a.n3() as f64;
        let rhs = fft3(&a).energy();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1e-300));
    }

    #[test]
    fn conjugate_symmetry(a in tensor_strategy(8)) {
        let f = fft3(&a);
        let (n1, n2, n3) = a.shape();
        for k in 1..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    let d = f.get(i, j, k) - f.get(i, j, n3 - k).conj();
                    prop_assert!(d.norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn transpose_is_involution(a in tensor_strategy(6)) {
        prop_assert_eq!(conj_transpose(&conj_transpose(&a)), a);
    }
}

#[test]
fn fft_matches_direct_sum() {
    let mut r = rng(1);
    for _ in 0..20 {
        let a = random_shaped(&mut r, 4, 4, 9);
        let f = fft3(&a);
        for (k, s) in direct_fourier_slices(&a).iter().enumerate() {
            for j in 0..a.n2() {
                for i in 0..a.n1() {
                    assert!((f.get(i, j, k) - s[(i, j)]).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn tproduct_agrees_with_convolution() {
    let mut r = rng(2);
    for _ in 0..200 {
        let (n1, n2, n4, n3) = (dim(&mut r, 6), dim(&mut r, 6), dim(&mut r, 6), dim(&mut r, 6));
        let a = gaussian(&mut r, n1, n2, n3);
        let b = gaussian(&mut r, n2, n4, n3);
        let fast = tproduct(&a, &b).unwrap();
        let slow = tproduct_naive(&a, &b).unwrap();
        assert!(fast.relative_error(&slow).unwrap() < 1e-10);
    }
}

#[test]
fn tproduct_is_associative() {
    let mut r = rng(3);
    for _ in 0..50 {
        let (n1, n2, n4, n5, n3) = (dim(&mut r, 5), dim(&mut r, 5), dim(&mut r, 5), dim(&mut r, 5), dim(&mut r, 6));
        let a = gaussian(&mut r, n1, n2, n3);
        let b = gaussian(&mut r, n2, n4, n3);
        let c = gaussian(&mut r, n4, n5, n3);
        let left = tproduct(&tproduct(&a, &b).unwrap(), &c).unwrap();
        let right = tproduct(&a, &tproduct(&b, &c).unwrap()).unwrap();
        assert!(left.relative_error(&right).unwrap() < 1e-10);
    }
}

#[test]
fn identity_on_both_sides() {
    let mut r = rng(4);
    for _ in 0..30 {
        let (n1, n2, n3) = (dim(&mut r, 6), dim(&mut r, 6), dim(&mut r, 6));
        let a = gaussian(&mut r, n1, n2, n3);
        let left = tproduct(&identity_tensor(n1, n3).unwrap(), &a).unwrap();
        let right = tproduct(&a, &identity_tensor(n2, n3).unwrap()).unwrap();
        assert!(left.relative_error(&a).unwrap() < 1e-12);
        assert!(right.relative_error(&a).unwrap() < 1e-12);
    }
}

#[test]
fn transpose_reverses_products() {
    let mut r = rng(5);
    for _ in 0..50 {
        let (n1, n2, n4, n3) = (dim(&mut r, 6), dim(&mut r, 6), dim(&mut r, 6), dim(&mut r, 6));
        let a = gaussian(&mut r, n1, n2, n3);
        let b = gaussian(&mut r, n2, n4, n3);
        let lhs = conj_transpose(&tproduct(&a, &b).unwrap());
        let rhs = tproduct(&conj_transpose(&b), &conj_transpose(&a)).unwrap();
        assert!(lhs.relative_error(&rhs).unwrap() < 1e-10);
    }
    // the fixed 2x3x4 by 3x2x4 case
    let a = gaussian(&mut r, 2, 3, 4);
    let b = gaussian(&mut r, 3, 2, 4);
    let lhs = conj_transpose(&tproduct(&a, &b).unwrap());
    let rhs = tproduct(&conj_transpose(&b), &conj_transpose(&a)).unwrap();
    assert!(lhs.relative_error(&rhs).unwrap() < 1e-10);
}

#[test]
fn basis_extracts_transposed_rows() {
    let mut r = rng(6);
    let a = gaussian(&mut r, 4, 3, 5);
    for i in 0..4 {
        let e = standard_basis(i, 4, 5).unwrap();
        let got = tproduct_naive(&conj_transpose(&a), &e).unwrap();
        let expected = conj_transpose(&a.sub_block(i, 0, 1, 3).unwrap());
        assert_eq!(got.shape(), (3, 1, 5));
        assert!(got.relative_error(&expected).unwrap() < 1e-14);
    }
}

#[test]
fn l112_two_ways() {
    let mut r = rng(7);
    for _ in 0..20 {
        let a = random_shaped(&mut r, 6, 6, 6);
        // per-tube accumulation through the tube accessor
        let mut by_tube = 0.0;
        for i in 0..a.n1() {
            for j in 0..a.n2() {
                by_tube += a.tube(i, j).0.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
        }
        assert!((a.norm(Norm::L112) - by_tube).abs() <= 1e-12 * by_tube);
    }
}
