use hubo_gas::boolpoly::{index_to_bits, Polynomial};
use hubo_gas::problems::*;
use proptest::prelude::{prop_assert_eq, proptest, Just, ProptestConfig};
use proptest::strategy::Strategy as Gen;

fn graphs() -> Vec<(usize, Vec<(usize, usize)>)> {
    vec![
        (3, vec![(0, 1), (1, 2), (0, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3)]),
        (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)]),
        (5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]),
    ]
}

fn colorings(v: usize, i: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..i.pow(v as u32)).map(move |mut c| {
        (0..v)
            .map(|_| {
                let col = c % i + 1;
                c /= i;
                col
            })
            .collect()
    })
}

fn all_formulations(g: &GcpInstance) -> Vec<Formulation> {
    let mut f = vec![gcp_qubo(g).unwrap()];
    if g.num_colors() >= 2 {
        for s in [Strategy::Asc, Strategy::Dsc, Strategy::Pf] {
            f.push(gcp_hubo(g, s).unwrap());
        }
        f.push(gcp_hubo_or(g).unwrap());
        f.push(gcp_hubo_or_with(g, OrOptions { factored_constraints: true }).unwrap());
    }
    f
}

#[test]
fn valid_colorings_score_their_conflicts() {
    for (v, edges) in graphs() {
        for i in 1..=4 {
            let g = GcpInstance::new(v, edges.clone(), i).unwrap();
            let forms = all_formulations(&g);
            for col in colorings(v, i) {
                let conflicts = g.conflicts(&col) as i64;
                for f in &forms {
                    let bits = f.encode(&col).unwrap();
                    assert_eq!(f.evaluate(&bits).unwrap(), conflicts, "{} {col:?}", f.strategy());
                    assert_eq!(f.decode(&bits).unwrap().indices(), Some(col.clone()));
                }
            }
        }
    }
}

#[test]
fn factored_and_expanded_forms_agree() {
    for (v, edges) in graphs() {
        let g = GcpInstance::new(v, edges, 3).unwrap();
        for f in all_formulations(&g) {
            let p = f.polynomial();
            let e = f.circuit_polynomial().unwrap();
            let e = e.polynomial();
            let (pc, ec) = (p.compile().unwrap(), e.compile().unwrap());
            for x in 0..1u64 << p.num_vars() {
                assert_eq!(pc.eval(x), ec.eval(x));
            }
        }
    }
}

/// Infeasible assignments score strictly above a zero-conflict optimum.
fn feasibility_gap(f: &Formulation) -> bool {
    let c = f.polynomial().compile().unwrap();
    (0..1u64 << f.num_vars()).all(|x| {
        let bits = index_to_bits(x, f.num_vars());
        f.decode(&bits).unwrap().indices().is_some() || c.eval(x) > 0
    })
}

#[test]
fn feasibility_gap_at_default_penalties() {
    for (v, edges) in graphs() {
        let g = GcpInstance::new(v, edges, 4).unwrap();
        if g.optimum() != 0 {
            continue;
        }
        for f in all_formulations(&g) {
            assert!(feasibility_gap(&f), "{}", f.strategy());
        }
    }
}

#[test]
fn unit_even_weight_penalty_loses_the_gap() {
    let g = GcpInstance::new(5, graphs()[3].1.clone(), 4)
        .unwrap()
        .with_penalties(GcpPenalties::unit());
    let f = gcp_hubo_or(&g).unwrap();
    assert!(!feasibility_gap(&f));
    assert!(f.brute_force_min().unwrap().1 < 0);
}

#[test]
fn dominating_penalties_recover_the_domain_optimum() {
    for (v, edges) in graphs() {
        for i in 1..=4 {
            let g = GcpInstance::new(v, edges.clone(), i).unwrap();
            let g = g.clone().with_penalties(GcpPenalties::dominating(g.max_degree()));
            let opt = g.optimum() as i64;
            for f in all_formulations(&g) {
                let (x, val) = f.brute_force_min().unwrap();
                assert_eq!(val, opt, "{} V={v} I={i}", f.strategy());
                let col = f.decode_solution(&index_to_bits(x, f.num_vars())).unwrap().unwrap();
                assert_eq!(g.conflicts(&col) as i64, opt);
            }
        }
    }
}

#[test]
fn brute_force_on_constant() {
    let p = Polynomial::constant_only(3, -2);
    assert_eq!(brute_force_min(&p).unwrap(), (0, -2));
}

fn weights(n: usize) -> impl Gen<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(0i64..10, n * (n - 1) / 2).prop_map(move |upper| {
        let mut w = vec![vec![0; n]; n];
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                w[u][v] = upper[k];
                w[v][u] = upper[k];
                k += 1;
            }
        }
        w
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tsp_formulations_find_the_shortest_tour(w in (3usize..=4).prop_flat_map(weights)) {
        let t = TspInstance::new(w).unwrap();
        let t = t.clone().with_penalties(TspPenalties::dominating(&t));
        let opt = t.optimum();
        let mut forms = vec![tsp_qubo(&t).unwrap()];
        for s in [Strategy::Asc, Strategy::Dsc, Strategy::Pf] {
            forms.push(tsp_hubo(&t, s).unwrap());
        }
        for f in forms {
            let (x, val) = f.brute_force_min().unwrap();
            prop_assert_eq!(val, opt);
            let tour = f.decode_solution(&index_to_bits(x, f.num_vars())).unwrap().unwrap();
            prop_assert_eq!(t.tour_length(&tour), opt);
        }
    }

    #[test]
    fn tsp_encoded_tours_score_their_length(w in weights(4), perm in Just(vec![1usize, 2, 3, 4]).prop_shuffle()) {
        let t = TspInstance::new(w).unwrap();
        let order = tour_from_positions(&perm).unwrap();
        let len = t.tour_length(&order);
        let mut forms = vec![tsp_qubo(&t).unwrap()];
        for s in [Strategy::Asc, Strategy::Dsc, Strategy::Pf] {
            forms.push(tsp_hubo(&t, s).unwrap());
        }
        for f in forms {
            prop_assert_eq!(f.evaluate(&f.encode(&perm).unwrap()).unwrap(), len);
        }
    }
}

#[test]
fn tsp_unit_penalties_can_undercut_tours() {
    // long edges make skipping a visit slot cheaper than any tour
    let t: TspInstance = "3\n50 50\n50\n".parse().unwrap();
    let f = tsp_hubo(&t, Strategy::Asc).unwrap();
    assert!(f.brute_force_min().unwrap().1 < t.optimum());
}
