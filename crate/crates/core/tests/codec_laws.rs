use mcndgen_core::io::*;
use mcndgen_core::model::{Arc, Commodity, DetInstance, Family, Graph, RandomizationSelection, ScenarioMatrix};
use mcndgen_core::moments::{CorrelationMatrix, MomentTargets, Moments};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        (0u32..1000).prop_map(f64::from),
        0.0f64..1e6,
        1e-300f64..1e-200,
        1e15f64..1e22,
    ]
}

fn pair(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 1..n).prop_map(move |(a, off)| (a, (a + off) % n))
}

fn instance() -> impl Strategy<Value = DetInstance> {
    (2usize..7, 0usize..8, 0usize..5, any::<bool>()).prop_flat_map(|(n, na, nk, use_b)| {
        (
            prop::collection::vec(pair(n), na),
            prop::collection::vec((pair(n), value()), nk),
            prop::collection::vec(value(), na),
            prop::collection::vec(value(), na),
            prop::collection::vec(value(), na * nk),
            prop::collection::vec(value(), na * nk),
        )
            .prop_map(move |(arcs, coms, f, u, c, b)| DetInstance {
                graph: Graph {
                    node_count: n,
                    arcs: arcs.into_iter().map(|(tail, head)| Arc { tail, head }).collect(),
                },
                commodities: coms
                    .into_iter()
                    .map(|((origin, destination), demand)| Commodity {
                        origin,
                        destination,
                        demand,
                    })
                    .collect(),
                fixed_cost: f,
                capacity: u,
                var_cost: c,
                com_capacity: use_b.then_some(b),
            })
    })
}

fn probabilities(s: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1u32..100, s).prop_map(|w| {
        let total: f64 = w.iter().map(|&v| f64::from(v)).sum();
        let mut p: Vec<f64> = w.iter().map(|&v| f64::from(v) / total).collect();
        // push the rounding residue into the last entry
        let rest: f64 = p[..p.len() - 1].iter().sum();
        *p.last_mut().unwrap() = 1.0 - rest;
        p
    })
}

fn scenario_matrix() -> impl Strategy<Value = ScenarioMatrix> {
    (1usize..6, 1usize..8).prop_flat_map(|(n, s)| {
        (prop::collection::vec(-1e6f64..1e6, n * s), probabilities(s))
            .prop_map(move |(v, p)| ScenarioMatrix::new(n, s, v, p).unwrap())
    })
}

fn correlation() -> impl Strategy<Value = CorrelationMatrix> {
    // A A^T + I, scaled to unit diagonal, is always positive definite
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
            let a = DMatrix::from_vec(n, n, v);
            let s = &a * a.transpose() + DMatrix::identity(n, n);
            let mut r = DMatrix::from_fn(n, n, |i, j| s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt());
            for i in 0..n {
                r[(i, i)] = 1.0;
                for j in 0..i {
                    r[(j, i)] = r[(i, j)];
                }
            }
            CorrelationMatrix::new(r).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn std_round_trip(inst in instance()) {
        let text = write_std(&inst).unwrap();
        prop_assert_eq!(read_std(&text).unwrap(), inst.clone());
        // deterministic bytes
        prop_assert_eq!(write_std(&inst).unwrap(), text.clone());
        // readers accept CRLF
        prop_assert_eq!(read_std(&text.replace('\n', "\r\n")).unwrap(), inst);
    }

    #[test]
    fn graph_round_trip(inst in instance()) {
        prop_assert_eq!(read_graph(&write_graph(&inst.graph)).unwrap(), inst.graph);
    }

    #[test]
    fn moments_round_trip(rows in prop::collection::vec((-1e6f64..1e6, 1e-6f64..1e6, -3.0f64..3.0, 0.0f64..10.0), 1..20)) {
        let t = MomentTargets::new(
            rows.into_iter().map(|(m, s, g, k)| Moments::new(m, s, g, 1.0 + g * g + k)).collect(),
        ).unwrap();
        prop_assert_eq!(read_moments(&write_moments(&t)).unwrap(), t);
    }

    #[test]
    fn corr_round_trip(r in correlation()) {
        prop_assert_eq!(read_corr(&write_corr(&r)).unwrap(), r);
    }

    #[test]
    fn probs_and_hkwmat_round_trip(m in scenario_matrix()) {
        let p = read_probs(&write_probs(m.probabilities())).unwrap();
        prop_assert_eq!(&p[..], m.probabilities());
        let back = read_hkwmat(&write_hkwmat(&m)).unwrap();
        prop_assert_eq!(back.values(), m.values());
        prop_assert_eq!((back.variable_count(), back.scenario_count()), (m.variable_count(), m.scenario_count()));
    }

    #[test]
    fn stochastic_round_trip(inst in instance(), seed in any::<u64>(), s in 1usize..5) {
        let sel = RandomizationSelection::for_instance(&[Family::Demand, Family::ArcCapacity], &inst);
        let n = sel.variable_count();
        prop_assume!(n > 0);
        let mut rng = mcndgen_core::prng::Pcg32::new(seed, 1);
        let values: Vec<f64> = (0..n * s).map(|_| rng.uniform_real(0.0, 500.0).unwrap()).collect();
        let m = ScenarioMatrix::equiprobable(n, s, values).unwrap();
        let text = write_stochastic(&inst, &sel, &m).unwrap();
        let blocks = read_stochastic(&text).unwrap();
        prop_assert_eq!(blocks.len(), s);
        for (t, b) in blocks.iter().enumerate() {
            prop_assert_eq!(b.probability, m.probabilities()[t]);
            let expect = mcndgen_core::model::unflatten(&inst, &sel, &m.column(t)).unwrap();
            prop_assert_eq!(&b.instance, &expect);
            // only selected families differ from the base
            prop_assert_eq!(&b.instance.fixed_cost, &inst.fixed_cost);
            prop_assert_eq!(&b.instance.var_cost, &inst.var_cost);
            prop_assert_eq!(&b.instance.com_capacity, &inst.com_capacity);
            prop_assert_eq!(&b.instance.graph, &inst.graph);
        }
    }
}
