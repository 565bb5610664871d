use std::f64::consts::PI;

use cascadix::fredholm::{
    index_morse_bott, index_weighted, morse_bott_breakdown, weighted_breakdown, Decoration, Puncture, PunctureSign,
    PuncturedProblem, Weight,
};
use cascadix::spectrum::{cz_perturbed, spectrum_window, AsymptoticOperator, PerturbationSide};
use proptest::prelude::*;

fn operators() -> impl Strategy<Value = AsymptoticOperator> {
    prop_oneof![
        (1u32..4).prop_map(|rank| AsymptoticOperator::ComplexLinear { rank }),
        (0.0f64..30.0).prop_map(|c| AsymptoticOperator::VerticalC { c }),
    ]
}

fn signs() -> impl Strategy<Value = PunctureSign> {
    prop_oneof![Just(PunctureSign::Positive), Just(PunctureSign::Negative)]
}

fn weights() -> impl Strategy<Value = Weight> {
    prop_oneof![Just(Weight::Decay), Just(Weight::Growth)]
}

fn weighted_problem() -> impl Strategy<Value = PuncturedProblem> {
    (1u32..3).prop_flat_map(|rank| {
        let op = move |o: AsymptoticOperator| match o {
            AsymptoticOperator::ComplexLinear { .. } => AsymptoticOperator::ComplexLinear { rank },
            other if rank == 1 => other,
            _ => AsymptoticOperator::ComplexLinear { rank },
        };
        (
            prop::collection::vec((signs(), operators(), weights()), 1..5),
            -3i64..4,
        )
            .prop_map(move |(ps, c1)| {
                let punctures = ps
                    .into_iter()
                    .map(|(s, o, w)| Puncture::new(s, op(o), Decoration::Weighted(w)))
                    .collect();
                PuncturedProblem::new(rank, c1, punctures).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn eigenvalues_solve_the_characteristic_equation(c in 0.0f64..40.0, half in 1.0f64..40.0) {
        let op = AsymptoticOperator::vertical(c).unwrap();
        for p in spectrum_window(op, -half, half).unwrap() {
            let k = p.fourier_mode as f64;
            let l = p.eigenvalue;
            let residual = if k == 0.0 { l * (l + c) } else { l * l + c * l - 4.0 * PI * PI * k * k };
            prop_assert!(residual.abs() < 1e-8 * (1.0 + l * l), "C {} lambda {}", c, l);
            prop_assert!(l >= -half && l <= half);
        }
    }

    #[test]
    fn winding_is_monotone(op in operators(), half in 1.0f64..60.0) {
        let pts = spectrum_window(op, -half, half).unwrap();
        prop_assert!(pts.windows(2).all(|w| w[0].eigenvalue < w[1].eigenvalue));
        prop_assert!(pts.windows(2).all(|w| w[0].winding <= w[1].winding));
        let mult: u32 = pts.iter().filter(|p| p.eigenvalue == 0.0).map(|p| p.multiplicity).sum();
        prop_assert_eq!(mult, op.kernel_dim());
    }

    #[test]
    fn perturbation_sides_differ_by_kernel(op in operators()) {
        let up = cz_perturbed(op, PerturbationSide::PlusSmall);
        let down = cz_perturbed(op, PerturbationSide::MinusSmall);
        prop_assert_eq!(down - up, op.kernel_dim() as i64);
    }

    #[test]
    fn weighted_and_subspace_forms_agree(p in weighted_problem()) {
        prop_assert_eq!(index_weighted(&p).unwrap(), index_morse_bott(&p));
        let w = weighted_breakdown(&p).unwrap();
        let m = morse_bott_breakdown(&p);
        prop_assert_eq!(w.total, m.total);
        let sum: i64 = w.terms.iter().map(|t| t.contribution).sum();
        prop_assert_eq!(w.total, w.rank as i64 * w.euler_characteristic + 2 * w.rel_c1 + sum);
    }

    #[test]
    fn flipping_a_weight_moves_index_by_kernel(p in weighted_problem(), pick in 0usize..8) {
        let i = pick % p.punctures().len();
        let mut punctures = p.punctures().to_vec();
        let before = index_weighted(&p).unwrap();
        let Decoration::Weighted(w) = punctures[i].decoration else { unreachable!() };
        let flipped = match w { Weight::Decay => Weight::Growth, Weight::Growth => Weight::Decay };
        punctures[i].decoration = Decoration::Weighted(flipped);
        let q = PuncturedProblem::new(p.rank(), p.rel_c1(), punctures.clone()).unwrap();
        let after = index_weighted(&q).unwrap();
        let kernel = punctures[i].operator.kernel_dim() as i64;
        let expected = if flipped == Weight::Growth { kernel } else { -kernel };
        prop_assert_eq!(after - before, expected);
    }
}
