mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::hodge_checks::{defining_identity, double_star, product_identities, Fixture};
use common::{names, random_form, random_point, rel_diff, twisted_metric};
use sugra::exprlang::Chart;
use sugra::exterior::{hodge_std, KForm};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn chart(n: usize) -> Chart {
    Chart::new(&names("c", n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wedge_is_graded_commutative_and_associative(seed in any::<u64>(), ka in 0usize..4, kb in 0usize..4, kc in 0usize..3) {
        let mut r = rng(seed);
        let c = chart(6);
        let all: Vec<usize> = (0..6).collect();
        let a = random_form(&mut r, &c, ka, &all, &all, 3);
        let b = random_form(&mut r, &c, kb, &all, &all, 3);
        let f = random_form(&mut r, &c, kc, &all, &all, 2);
        let p = random_point(&mut r, &[(-1.0, 1.0); 6]);
        let ab = a.wedge(&b).unwrap().eval(&p).unwrap();
        let ba = b.wedge(&a).unwrap().eval(&p).unwrap();
        let s = if (ka * kb) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(rel_diff(&ab, &ba.scale(s)) < 1e-12);
        let left = a.wedge(&b).unwrap().wedge(&f).unwrap().eval(&p).unwrap();
        let right = a.wedge(&b.wedge(&f).unwrap()).unwrap().eval(&p).unwrap();
        prop_assert!(rel_diff(&left, &right) < 1e-12);
        // bilinearity
        let sum = a.add(&a.scale_const(2.0)).unwrap().wedge(&b).unwrap().eval(&p).unwrap();
        prop_assert!(rel_diff(&sum, &ab.scale(3.0)) < 1e-12);
    }

    #[test]
    fn d_squared_vanishes_and_leibniz_holds(seed in any::<u64>(), ka in 0usize..4, kb in 0usize..4, n in 5usize..12) {
        let mut r = rng(seed);
        let c = chart(n);
        let all: Vec<usize> = (0..n).collect();
        let a = random_form(&mut r, &c, ka, &all, &all, 3);
        let b = random_form(&mut r, &c, kb, &all, &all, 3);
        let p = random_point(&mut r, &vec![(-1.0, 1.0); n]);
        prop_assert!(a.ext_d().ext_d().eval(&p).unwrap().max_abs().0 < 1e-9);
        let lhs = a.wedge(&b).unwrap().ext_d().eval(&p).unwrap();
        let s = if ka % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.ext_d().wedge(&b).unwrap()
            .add(&a.wedge(&b.ext_d()).unwrap().scale_const(s)).unwrap()
            .eval(&p).unwrap();
        prop_assert!(rel_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn hodge_defining_identity_and_double_star_small(seed in any::<u64>(), k in 0usize..7, six in any::<bool>()) {
        let mut r = rng(seed);
        let (n, p, q) = if six { (6, 0, 6) } else { (5, 1, 4) };
        let k = k.min(n);
        let c = chart(n);
        let m = twisted_metric(&mut r, &c, p, q);
        let all: Vec<usize> = (0..n).collect();
        let a = random_form(&mut r, &c, k, &all, &all, 2);
        let b = random_form(&mut r, &c, k, &all, &all, 2);
        let pt = random_point(&mut r, &vec![(-1.0, 1.0); n]);
        prop_assert!(defining_identity(&m, &a, &b, &pt) < 1e-9);
        prop_assert!(double_star(&m, &a, &pt) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hodge_identities_on_eleven_dimensional_product(seed in any::<u64>(), k in 0usize..12) {
        let mut r = rng(seed);
        let fx = Fixture::new(&mut r);
        let all: Vec<usize> = (0..11).collect();
        let a = random_form(&mut r, &fx.chart, k, &all, &all, 2);
        let b = random_form(&mut r, &fx.chart, k, &all, &all, 2);
        let pt = fx.point(&mut r);
        prop_assert!(defining_identity(&fx.h, &a, &b, &pt) < 1e-9);
        prop_assert!(double_star(&fx.h, &a, &pt) < 1e-9);
    }

    #[test]
    fn product_hodge_identities(seed in any::<u64>(), kt in 0usize..6, k in 0usize..7) {
        let mut r = rng(seed);
        let fx = Fixture::new(&mut r);
        let res = product_identities(&fx, &mut r, kt, k);
        for (i, v) in res.iter().enumerate() {
            prop_assert!(*v < 1e-9, "identity {} residual {}", i, v);
        }
    }
}

#[test]
fn zero_forms_flow_through_everything() {
    let mut r = rng(1);
    let c = chart(5);
    let m = twisted_metric(&mut r, &c, 1, 4);
    let z = KForm::zero(&c, 2);
    assert!(hodge_std(&z, &m).unwrap().is_zero());
    assert!(z.ext_d().is_zero());
    assert!(z.wedge(&KForm::dx(&c, 0)).unwrap().is_zero());
}
