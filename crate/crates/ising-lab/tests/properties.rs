//! Property tests for the exact polynomial layer and the Möbius identities.

use proptest::prelude::*;

use ising_lab::numerics::{Cplx, GaussRat, PrecisionContext, RatPoly};

fn gauss_rat() -> impl Strategy<Value = GaussRat> {
    (-20i64..20, 1i64..12, -20i64..20, 1i64..12)
        .prop_map(|(a, b, c, d)| GaussRat::from_parts(a, b, c, d))
}

fn rat_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(gauss_rat(), 1..=max_deg + 1).prop_map(RatPoly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// divide_exact inverts multiplication exactly.
    #[test]
    fn divide_undoes_multiply(p in rat_poly(6), d in rat_poly(4)) {
        prop_assume!(!d.is_zero());
        let prod = p.mul(&d);
        let q = prod.divide_exact(&d).unwrap();
        prop_assert_eq!(q, p);
    }

    /// Shifting by a and then by -a is the identity.
    #[test]
    fn taylor_shift_roundtrip(p in rat_poly(7), a in gauss_rat()) {
        let back = p.taylor_shift(&a).taylor_shift(&(-&a));
        prop_assert_eq!(back, p);
    }

    /// Formal exp of the truncated log reproduces p/p(0) through degree m,
    /// exactly over the rationals.
    #[test]
    fn exp_log_identity(p in rat_poly(6)) {
        prop_assume!(!p.coeffs[0].is_zero());
        let m = p.degree();
        let a = p.log_truncate(m).unwrap();
        // exp of a formal series with zero constant term
        let mut e = vec![GaussRat::one()];
        for k in 1..=m {
            let mut s = GaussRat::zero();
            for j in 1..=k {
                let term = &(&GaussRat::from_int(j as i64) * &a[j]) * &e[k - j];
                s = &s + &term;
            }
            e.push(&s / &GaussRat::from_int(k as i64));
        }
        let p0 = &p.coeffs[0];
        for k in 0..=m {
            let want = &p.coeffs[k] / p0;
            prop_assert_eq!(&e[k], &want);
        }
    }

    /// The series-composition identity behind every recursion here:
    /// (h(z)-1)/(h(z)+1) = phi(beta) phi(z) wherever both sides are finite.
    #[test]
    fn h_identity(br in -3.0f64..3.0, bi in -3.0f64..3.0, zr in -3.0f64..3.0, zi in -3.0f64..3.0) {
        let ctx = PrecisionContext::default();
        let beta = Cplx::from_f64(&ctx, br, bi);
        let z = Cplx::from_f64(&ctx, zr, zi);
        let one = Cplx::one(&ctx);
        let den = &beta + &z;
        prop_assume!(den.norm().to_f64() > 1e-3);
        let h = &(&(&beta * &z) + &one) / &den;
        prop_assume!((&h + &one).norm().to_f64() > 1e-3);
        prop_assume!((&z + &one).norm().to_f64() > 1e-3);
        prop_assume!((&beta + &one).norm().to_f64() > 1e-3);
        let lhs = &(&h - &one) / &(&h + &one);
        let rhs = &(&(&beta - &one) / &(&beta + &one)) * &(&(&z - &one) / &(&z + &one));
        prop_assert!(lhs.approx_eq(&rhs, &ctx.float(1e-12)));
    }
}
