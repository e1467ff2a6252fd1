//! Property tests for the exact rational-function algebra.

use hgf_core::ratfun::{parse_expression, Rat, RationalFunction, SparsePolynomial, VarSet};
use num::BigInt;
use proptest::prelude::*;

fn vars() -> VarSet {
    VarSet::new(&["x", "y", "z"])
}

/// Random sparse polynomial with small integer/rational coefficients.
fn arb_poly() -> impl Strategy<Value = SparsePolynomial> {
    let term = (
        prop::collection::vec(0u32..3, 3),
        (-9i64..=9).prop_filter("nonzero", |n| *n != 0),
        1i64..=4,
    );
    prop::collection::vec(term, 1..6).prop_map(|terms| {
        let v = vars();
        let mut p = SparsePolynomial::zero(&v);
        for (exps, num, den) in terms {
            let mut mono = SparsePolynomial::constant(&v, Rat::new(num, den));
            for (i, &e) in exps.iter().enumerate() {
                mono = mono.mul(&SparsePolynomial::variable(&v, i).pow(e)).unwrap();
            }
            p = p.add(&mono).unwrap();
        }
        p
    })
}

fn arb_ratfun() -> impl Strategy<Value = RationalFunction> {
    (arb_poly(), arb_poly())
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| RationalFunction::new(n, d))
}

/// Points kept away from the poles of every function under test.
fn admissible(fs: &[&RationalFunction], p: &[f64]) -> bool {
    fs.iter().all(|f| f.denom().evaluate(p).map(|d| d.abs() > 0.1).unwrap_or(false))
}

fn arb_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn evaluation_is_a_homomorphism(f in arb_ratfun(), g in arb_ratfun(), p in arb_point()) {
        let sum = f.add(&g).unwrap();
        let prod = f.mul(&g).unwrap();
        prop_assume!(admissible(&[&f, &g, &sum, &prod], &p));
        let fv = f.evaluate(&p).unwrap();
        let gv = g.evaluate(&p).unwrap();

        let sv = sum.evaluate(&p).unwrap();
        let scale = 1.0f64.max(fv.abs()).max(gv.abs()).max(sv.abs());
        prop_assert!((sv - (fv + gv)).abs() <= 1e-12 * scale,
            "sum: {sv} vs {}", fv + gv);

        let pv = prod.evaluate(&p).unwrap();
        let scale = 1.0f64.max(pv.abs()).max((fv * gv).abs());
        prop_assert!((pv - fv * gv).abs() <= 1e-12 * scale,
            "product: {pv} vs {}", fv * gv);
    }

    #[test]
    fn derivative_matches_finite_differences(f in arb_ratfun(), p in arb_point(), idx in 0usize..3) {
        let df = f.differentiate(idx);
        prop_assume!(admissible(&[&f, &df], &p));

        // Richardson-extrapolated central difference, step 1e-5.
        let h = 1e-5;
        let eval_shift = |delta: f64| {
            let mut q = p.clone();
            q[idx] += delta;
            f.evaluate(&q)
        };
        let d1 = match (eval_shift(h), eval_shift(-h)) {
            (Ok(a), Ok(b)) => (a - b) / (2.0 * h),
            _ => return Err(TestCaseError::reject("pole near sample")),
        };
        let d2 = match (eval_shift(h / 2.0), eval_shift(-h / 2.0)) {
            (Ok(a), Ok(b)) => (a - b) / h,
            _ => return Err(TestCaseError::reject("pole near sample")),
        };
        let fd = (4.0 * d2 - d1) / 3.0;

        let exact = df.evaluate(&p).unwrap();
        let scale = 1.0f64.max(exact.abs()).max(fd.abs());
        prop_assert!((exact - fd).abs() <= 1e-6 * scale, "exact {exact} vs fd {fd}");
    }

    #[test]
    fn print_parse_is_a_fixed_point(f in arb_ratfun()) {
        let v = vars();
        let printed = f.to_string();
        let reparsed = parse_expression(&printed, &v).unwrap();
        prop_assert_eq!(&reparsed.to_string(), &printed);
        prop_assert!(reparsed.equivalent(&f).unwrap(), "reparse of `{}` differs", printed);
    }

    #[test]
    fn exact_scalar_addition_matches_bigint_reference(
        a in -1_000_000i64..1_000_000, b in 1i64..1_000_000,
        c in -1_000_000i64..1_000_000, d in 1i64..1_000_000,
    ) {
        let sum = &Rat::new(a, b) + &Rat::new(c, d);
        // Independent route: unreduced big-integer cross multiplication.
        let lhs = sum.numer() * BigInt::from(b) * BigInt::from(d);
        let rhs = (BigInt::from(a) * BigInt::from(d) + BigInt::from(c) * BigInt::from(b)) * sum.denom();
        prop_assert_eq!(lhs, rhs);

        let prod = &Rat::new(a, b) * &Rat::new(c, d);
        let lhs = prod.numer() * BigInt::from(b) * BigInt::from(d);
        let rhs = BigInt::from(a) * BigInt::from(c) * prod.denom();
        prop_assert_eq!(lhs, rhs);
    }
}
