use barron_gauge::{
    barron_cost_upper, chi_eval, ft_profile, ft_triangular, normalize_neuron, spectral_upper, ActivationPower, Atom,
    DomainSpec, NeuronForm, TwoLayerNetwork,
};
use proptest::prelude::*;

fn domain(dim: usize) -> impl Strategy<Value = DomainSpec> {
    prop_oneof![
        prop::collection::vec(0.1f64..3.0, dim).prop_map(|h| DomainSpec::Box { halfwidths: h }),
        (0.1f64..3.0).prop_map(move |r| DomainSpec::ball(r, dim)),
        prop::collection::vec(prop::collection::vec(-2.0f64..2.0, dim), dim..dim + 3).prop_filter_map(
            "degenerate polytope",
            move |mut v| {
                let neg: Vec<Vec<f64>> = v.iter().map(|x| x.iter().map(|c| -c).collect()).collect();
                v.extend(neg);
                let d = DomainSpec::SymmetricPolytope { vertices: v };
                d.validate().ok().map(|_| d)
            }
        ),
    ]
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, dim)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn support_norm_is_a_norm(
        (dom, u, v, t) in (1usize..5).prop_flat_map(|d| (domain(d), vector(d), vector(d), -4.0f64..4.0))
    ) {
        let nu = dom.support_norm(&u).unwrap();
        let nv = dom.support_norm(&v).unwrap();
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = u.iter().map(|a| t * a).collect();
        prop_assert!(nu >= 0.0);
        prop_assert!(dom.support_norm(&sum).unwrap() <= (nu + nv) * (1.0 + 1e-12) + 1e-12);
        prop_assert!(close(dom.support_norm(&scaled).unwrap(), t.abs() * nu, 1e-12));
        prop_assert_eq!(dom.support_norm(&vec![0.0; u.len()]).unwrap(), 0.0);
    }

    #[test]
    fn normalisation_preserves_the_neuron(
        (dom, w, x) in (1usize..5).prop_flat_map(|d| (domain(d), vector(d), vector(d))),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        s in 1u32..4,
    ) {
        let s = ActivationPower(s);
        let x: Vec<f64> = x.iter().map(|c| c * 0.1).collect();
        let before = a * s.activate(w.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + b);
        match normalize_neuron(s, &dom, a, &w, b).unwrap() {
            NeuronForm::Normalized(n) => {
                prop_assert!(close(dom.support_norm(&n.w).unwrap(), 1.0, 1e-12));
                let after = n.a * s.activate(n.w.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + n.b);
                prop_assert!((before - after).abs() <= 1e-9 * (1.0 + before.abs()));
            }
            NeuronForm::Constant { value } => prop_assert!((value - before).abs() <= 1e-12),
        }
    }

    #[test]
    fn path_cost_is_rescaling_invariant(
        (dom, ws) in (1usize..4).prop_flat_map(|d| (domain(d), prop::collection::vec(vector(d), 1..6))),
        seeds in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 0.2f64..5.0), 6),
        s in 1u32..4,
    ) {
        let s = ActivationPower(s);
        let atoms: Vec<Atom> = ws.iter().zip(&seeds).map(|(w, (a, b, _))| Atom::new(*a, w.clone(), *b)).collect();
        let rescaled: Vec<Atom> = atoms
            .iter()
            .zip(&seeds)
            .map(|(at, (_, _, c))| {
                Atom::new(at.a / c.powi(s.get() as i32), at.w.iter().map(|x| x * c).collect(), at.b * c)
            })
            .collect();
        let n1 = TwoLayerNetwork::new(s, atoms).unwrap();
        let n2 = TwoLayerNetwork::new(s, rescaled).unwrap();
        prop_assert!(close(barron_cost_upper(&n1, &dom).unwrap(), barron_cost_upper(&n2, &dom).unwrap(), 1e-10));
    }

    #[test]
    fn chi_is_even_and_bounded(z in -3.0f64..3.0) {
        let c = chi_eval(z);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert_eq!(c, chi_eval(-z));
    }

    #[test]
    fn triangular_transform_is_even_and_nonnegative(xi in -1e3f64..1e3) {
        prop_assert!(ft_triangular(xi) >= 0.0);
        prop_assert_eq!(ft_triangular(xi), ft_triangular(-xi));
    }

    #[test]
    fn transform_of_real_profile_is_hermitian(s in 0u32..4, b in -2.5f64..2.5, xi in 0.0f64..60.0) {
        let p = ft_profile(ActivationPower(s), b, xi, 1e-10).unwrap();
        let m = ft_profile(ActivationPower(s), b, -xi, 1e-10).unwrap();
        prop_assert!((p.value - m.value.conj()).norm() <= 1e-10 * p.value.norm().max(1e-3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectral_bound_is_rescaling_invariant(
        a in -2.0f64..2.0,
        b in -1.5f64..1.5,
        c in 0.3f64..3.0,
        s in 1u32..3,
    ) {
        let dom = DomainSpec::unit_interval();
        let sp = ActivationPower(s);
        let n1 = TwoLayerNetwork::new(sp, vec![Atom::new(a, vec![1.0], b)]).unwrap();
        let n2 = TwoLayerNetwork::new(sp, vec![Atom::new(a / c.powi(s as i32), vec![c], b * c)]).unwrap();
        let v1 = spectral_upper(&n1, &dom, 0.3, 1e-6).unwrap();
        let v2 = spectral_upper(&n2, &dom, 0.3, 1e-6).unwrap();
        prop_assert!(close(v1, v2, 1e-5), "{v1} vs {v2}");
    }
}
