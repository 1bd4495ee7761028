use proptest::prelude::*;

use convlim::duals::{pair_measure, pair_sequence, MeasureFunctional, SequenceFunctional};
use convlim::hilbert::inner_product;
use convlim::limcore::{check_lambda_limit, sup_norm, x_norm};
use convlim::report::format_f64;
use convlim::vecops::{conjugate_exponent, norm_p};
use convlim::{
    Atom, CompositeNorm, CoreNorm, ExtendedReal, GridFunction, LimFunctionHalf, LimSequence, MeasureDomain,
    SignedMeasure,
};

fn half() -> impl Strategy<Value = LimFunctionHalf> {
    (prop::collection::vec((0.1f64..3.0, -5.0f64..5.0), 1..8), -5.0f64..5.0).prop_map(|(pts, a)| {
        let mut t = 0.0;
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        for (i, (gap, v)) in pts.into_iter().enumerate() {
            if i > 0 {
                t += gap;
            }
            breaks.push(t);
            values.push(vec![v]);
        }
        breaks.push(t + 1.0);
        values.push(vec![0.0]);
        LimFunctionHalf::new(GridFunction::new(1, breaks, values).unwrap(), vec![a]).unwrap()
    })
}

fn atoms() -> impl Strategy<Value = SignedMeasure> {
    prop::collection::vec((prop::option::weighted(0.9, 0.0f64..20.0), -3.0f64..3.0), 0..6).prop_map(|raw| {
        let atoms = raw
            .into_iter()
            .map(|(t, w)| Atom::new(t.map_or(ExtendedReal::PosInf, ExtendedReal::finite), vec![w]))
            .collect();
        SignedMeasure::atoms_only(MeasureDomain::Half, 1, atoms).unwrap()
    })
}

fn finite_atoms() -> impl Strategy<Value = SignedMeasure> {
    prop::collection::vec((0.0f64..20.0, -3.0f64..3.0), 0..6).prop_map(|raw| {
        let atoms = raw.into_iter().map(|(t, w)| Atom::new(t, vec![w])).collect();
        SignedMeasure::atoms_only(MeasureDomain::Half, 1, atoms).unwrap()
    })
}

fn sequence(len: usize) -> impl Strategy<Value = LimSequence> {
    (prop::collection::vec(-4.0f64..4.0, len), -4.0f64..4.0).prop_map(|(head, limit)| LimSequence::new(head, limit))
}

proptest! {
    #[test]
    fn sup_norm_between_sum_and_a_third_of_it(x in half()) {
        let s = sup_norm(&x);
        let sum = x_norm(&x, CompositeNorm::Sum, CoreNorm::Sup).unwrap();
        prop_assert!(s <= sum + 1e-12);
        prop_assert!(sum <= 3.0 * s + 1e-12);
    }

    #[test]
    fn composite_norms_ordered(x in half(), p in 1.0f64..8.0) {
        let core = CoreNorm::Lp { p: 2.0 };
        let max = x_norm(&x, CompositeNorm::Max, core).unwrap();
        let pc = x_norm(&x, CompositeNorm::PComposite { p }, core).unwrap();
        let sum = x_norm(&x, CompositeNorm::Sum, core).unwrap();
        prop_assert!(max <= pc + 1e-12 && pc <= sum + 1e-12 && sum <= 2.0 * max + 1e-12);
    }

    #[test]
    fn measure_pairing_linear_in_x(mu in finite_atoms(), alpha in -3.0f64..3.0, x in half(), y in half(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = MeasureFunctional::new(mu, vec![alpha]).unwrap();
        let z = x.lin_comb(a, &y, b).unwrap();
        let lhs = pair_measure(&f, &z).unwrap();
        let rhs = a * pair_measure(&f, &x).unwrap() + b * pair_measure(&f, &y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn measure_pairing_bounded(mu in finite_atoms(), alpha in -3.0f64..3.0, x in half()) {
        let tv = mu.total_variation().total;
        let f = MeasureFunctional::new(mu, vec![alpha]).unwrap();
        let v = pair_measure(&f, &x).unwrap().abs();
        prop_assert!(v <= (2.0 * tv + alpha.abs()) * sup_norm(&x) + 1e-12);
    }

    #[test]
    fn jordan_parts_add_up_to_total_variation(mu in atoms()) {
        let (pos, neg) = mu.jordan_decompose().unwrap();
        prop_assert!(pos.is_nonnegative() && neg.is_nonnegative());
        let tv = mu.total_variation().total;
        prop_assert!((tv - pos.mass()[0] - neg.mass()[0]).abs() <= 1e-12);
        prop_assert!(mu.mass()[0].abs() <= tv + 1e-12);
    }

    #[test]
    fn lambda_violation_shrinks(x in half(), eps in 1e-3f64..2.0, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let core = x.core();
        let a = x.limit();
        let samples = GridFunction::new(1, core.breaks().to_vec(), core.values().iter().map(|v| vec![v[0] + a[0]]).collect()).unwrap();
        let end = *core.breaks().last().unwrap();
        let (n1, n2) = (end * u.min(v), end * u.max(v));
        let m1 = check_lambda_limit(&samples, a, eps, n1).unwrap();
        let m2 = check_lambda_limit(&samples, a, eps, n2).unwrap();
        let m3 = check_lambda_limit(&samples, a, 2.0 * eps, n1).unwrap();
        prop_assert!(m2 <= m1 + 1e-12 && m3 <= m1 + 1e-12);
    }

    #[test]
    fn cauchy_schwarz(x in half(), y in half()) {
        let xy = inner_product(&x, &y).unwrap();
        let xx = inner_product(&x, &x).unwrap();
        let yy = inner_product(&y, &y).unwrap();
        prop_assert!(xx >= 0.0);
        prop_assert!(xy * xy <= xx * yy * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn sequence_holder((x, y) in (0usize..10).prop_flat_map(|n| (sequence(n), prop::collection::vec(-4.0f64..4.0, n))),
                       alpha in -4.0f64..4.0, p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY])) {
        let f = SequenceFunctional::new(y, alpha);
        let bound = norm_p(&f.y, conjugate_exponent(p)) * norm_p(&x.head, p) + alpha.abs() * x.limit.abs();
        prop_assert!(pair_sequence(&f, &x).abs() <= bound * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn float_format_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = format_f64(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }
}
