//! Algebraic laws checked on random inputs.

use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use sos_cert::gram;
use sos_cert::linalg::QMatrix;
use sos_cert::parse::parse_poly;
use sos_cert::poly::{Monomial, Poly};
use sos_cert::quotient::Quotient;
use sos_cert::Rational;

fn names() -> Vec<String> {
    vec!["x".into(), "y".into()]
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn poly(max_deg: u32) -> impl Strategy<Value = Poly> {
    proptest::collection::vec(((0..=max_deg), (0..=max_deg), rational()), 0..6).prop_map(move |terms| {
        let mut p = Poly::zero(2);
        for (a, b, c) in terms {
            if a + b <= max_deg {
                p.add_term(Monomial(vec![a, b]), c);
            }
        }
        p
    })
}

fn two_points() -> Quotient {
    let n = names();
    Quotient::new(&[parse_poly("x^2 + y^2 - 1", &n).unwrap(), parse_poly("y^2 - x - 1", &n).unwrap()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(3), b in poly(3), c in poly(2)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn print_parse_roundtrip(a in poly(4)) {
        let n = names();
        prop_assert_eq!(parse_poly(&a.fmt_with(&n), &n).unwrap(), a);
    }

    #[test]
    fn normal_form_is_a_ring_map(a in poly(3), b in poly(3)) {
        let q = two_points();
        let na = q.normal_form(&a);
        prop_assert_eq!(q.normal_form(&na), na.clone());
        let nb = q.normal_form(&b);
        prop_assert_eq!(q.normal_form(&(&a * &b)), q.normal_form(&(&na * &nb)));
        prop_assert!(q.contains(&(&a - &na)));
    }

    // Jacobi: sign changes in 1, Δ_1, …, Δ_d count the negative eigenvalues.
    #[test]
    fn minors_count_negative_eigenvalues(entries in proptest::collection::vec(-9i64..=9, 21)) {
        let d = 6;
        let mut q: QMatrix = vec![vec![Rational::zero(); d]; d];
        let mut it = entries.into_iter();
        for i in 0..d {
            for j in i..d {
                let v = Rational::from_integer(it.next().unwrap().into());
                q[i][j] = v.clone();
                q[j][i] = v;
            }
        }
        let minors = gram::leading_minors(&q);
        prop_assume!(minors.len() == d && minors.iter().all(|m| !m.is_zero()));
        let mut changes = 0;
        let mut prev_neg = false;
        for m in &minors {
            if m.is_negative() != prev_neg {
                changes += 1;
            }
            prev_neg = m.is_negative();
        }
        let qf = DMatrix::from_fn(d, d, |i, j| q[i][j].to_f64().unwrap());
        let negatives = qf.symmetric_eigenvalues().iter().filter(|&&e| e < 0.0).count();
        prop_assert_eq!(changes, negatives);
    }
}
