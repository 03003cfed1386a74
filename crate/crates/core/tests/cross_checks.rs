//! Cross-module checks: moves against invariants, generator corpora against
//! the lattice and rationality modules, and the identities that tie the two
//! d computations together.


use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plumb_core::invariants::{discharge_path, DischargeOutcome};
use plumb_core::lattice::CharVector;
use plumb_core::*;

type Rat = BigRational;

fn graph(s: &str) -> PlumbingGraph {
    PlumbingGraph::parse(s).unwrap()
}

fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

fn corpus(count: usize, max_vertices: usize, weight_min: i64, seed: u64) -> Vec<PlumbingGraph> {
    let params = GeneratorParams {
        max_vertices,
        weight_min,
        seed,
        count,
        require_rational: true,
    };
    generate_candidates(&params).unwrap().collect()
}

/// Multiset of mubar values over spin structures.
fn mubar_multiset(g: &PlumbingGraph) -> Vec<BigInt> {
    let q = build_intersection_form(g);
    let mut out: Vec<BigInt> = enumerate_wu_sets(g, &q)
        .unwrap()
        .iter()
        .map(|s| mubar(g, s).unwrap().mubar)
        .collect();
    out.sort();
    out
}

/// Multiset of d values over all spin-c classes.
fn d_multiset(g: &PlumbingGraph) -> Vec<Rat> {
    let q = build_intersection_form(g);
    let mut out: Vec<Rat> = enumerate_spinc_classes(&q)
        .unwrap()
        .iter()
        .map(|c| d_oracle(g, c, false).unwrap().d)
        .collect();
    out.sort();
    out
}

#[test]
fn blow_down_examples_preserve_boundary_invariants() {
    // (-3)-(-1)-(-3) blows down to (-2)-(-2)
    let before = graph("vertices: a:-3 b:-1 c:-3\nedges: a-b b-c");
    let after = blow_down_normalize(&before).unwrap();
    assert_eq!(after, graph("vertices: a:-2 c:-2\nedges: a-c"));
    let det_before = lattice_summary(&build_intersection_form(&before)).det;
    let det_after = lattice_summary(&build_intersection_form(&after)).det;
    assert_eq!(det_before.magnitude(), det_after.magnitude());
    assert_eq!(mubar_multiset(&before), mubar_multiset(&after));
    assert_eq!(d_multiset(&before), d_multiset(&after));

    // (-1)-(-3) blows down to a single (-2)
    let before = graph("vertices: a:-1 b:-3\nedges: a-b");
    let after = blow_down_normalize(&before).unwrap();
    assert_eq!(after.len(), 1);
    assert_eq!(after.weight(0), -2);
    assert_eq!(mubar_multiset(&before), mubar_multiset(&after));
    assert_eq!(d_multiset(&before), d_multiset(&after));
}

/// Insert a (-1)-vertex into a graph without changing its boundary: either
/// on an edge (splitting it) or as a new leaf, compensating the weights.
fn blow_up(g: &PlumbingGraph, choice: usize) -> PlumbingGraph {
    let mut vertices: Vec<(String, i64)> = g
        .vertices()
        .iter()
        .map(|v| (v.id.clone(), v.weight))
        .collect();
    let mut edges: Vec<(String, String)> = g
        .edges()
        .map(|(a, b)| (g.id(a).to_string(), g.id(b).to_string()))
        .collect();
    let fresh = "blowup".to_string();
    let total = g.edge_count() + g.len();
    let pick = choice % total.max(1);
    if pick < g.edge_count() {
        let (a, b) = g.edges().nth(pick).unwrap();
        edges.retain(|(x, y)| {
            !((x == g.id(a) && y == g.id(b)) || (x == g.id(b) && y == g.id(a)))
        });
        vertices[a].1 -= 1;
        vertices[b].1 -= 1;
        vertices.push((fresh.clone(), -1));
        edges.push((g.id(a).to_string(), fresh.clone()));
        edges.push((fresh, g.id(b).to_string()));
    } else {
        let at = pick - g.edge_count();
        vertices[at].1 -= 1;
        vertices.push((fresh.clone(), -1));
        edges.push((g.id(at).to_string(), fresh));
    }
    PlumbingGraph::new(vertices, &edges).unwrap()
}

#[test]
fn blow_down_inverts_blow_up_on_corpus() {
    for (i, g) in corpus(25, 5, -4, 91).into_iter().enumerate() {
        let up = blow_up(&g, i * 7 + 1);
        let down = blow_down_normalize(&up).unwrap();
        assert_eq!(down, g, "round trip failed on {}", g.to_plumb());
        assert_eq!(mubar_multiset(&up), mubar_multiset(&g));
    }
}

#[test]
fn blow_up_preserves_d_multiset_on_small_corpus() {
    for (i, g) in corpus(8, 4, -3, 17).into_iter().enumerate() {
        let up = blow_up(&g, i + 2);
        assert_eq!(d_multiset(&up), d_multiset(&g), "{}", g.to_plumb());
    }
}

#[test]
fn framing_reduction_preserves_mubar_and_d() {
    // every (graph, Wu set, vertex) triple where the reduction applies
    let mut exercised = 0;
    let mut graphs = corpus(40, 6, -5, 5);
    graphs.push(graph("vertices: a:-2 c:-2 b:-2\nedges: a-c c-b"));
    for g in graphs {
        let q = build_intersection_form(&g);
        for wu in enumerate_wu_sets(&g, &q).unwrap() {
            if m_counter(&g, &wu) == 0 {
                continue;
            }
            for v in 0..g.len() {
                if wu.members.contains(&v) {
                    continue;
                }
                let in_set = g
                    .neighbours(v)
                    .iter()
                    .filter(|n| wu.members.contains(n))
                    .count() as i64;
                if in_set != -g.weight(v) {
                    continue;
                }
                let (g2, s2) = framing_reduction_step(&g, &wu.members, v).unwrap();
                let q2 = build_intersection_form(&g2);
                let c2 = wu_char_vector(&g2, &q2, &s2).unwrap();
                // evaluations are unchanged; the lattice changed
                assert_eq!(c2, wu.char_vector);
                let wu2 = enumerate_wu_sets(&g2, &q2)
                    .unwrap()
                    .into_iter()
                    .find(|w| w.members == s2)
                    .expect("carried set is still a Wu set");
                let before = mubar(&g, &wu).unwrap().mubar;
                let after = mubar(&g2, &wu2).unwrap().mubar;
                assert_eq!(before, after);
                let d_before = d_oracle(&g, &wu.char_vector, false).unwrap().d;
                let d_after = d_oracle(&g2, &c2, false).unwrap().d;
                assert_eq!(d_before, d_after);
                assert_eq!(d_path(&g2, &c2, false).unwrap().d, d_after);
                exercised += 1;
            }
        }
    }
    assert!(exercised >= 3, "fixtures exercised only {exercised} reductions");
}

#[test]
fn disjoint_union_shifts_mubar_up_and_d_down() {
    let mut graphs = vec![PlumbingGraph::empty()];
    graphs.extend(corpus(20, 5, -4, 23));
    for g in graphs {
        let q = build_intersection_form(&g);
        for wu in enumerate_wu_sets(&g, &q).unwrap() {
            let (g1, s1) = disjoint_union_with_rp3(&g, &wu.members);
            let q1 = build_intersection_form(&g1);
            let wu1 = enumerate_wu_sets(&g1, &q1)
                .unwrap()
                .into_iter()
                .find(|w| w.members == s1)
                .expect("extended set is a Wu set");
            let before = mubar(&g, &wu).unwrap().mubar;
            let after = mubar(&g1, &wu1).unwrap().mubar;
            assert_eq!(after, before + BigInt::one());
            let d_before = d_oracle(&g, &wu.char_vector, false).unwrap().d;
            let d_after = d_oracle(&g1, &wu1.char_vector, false).unwrap().d;
            assert_eq!(d_after, d_before - rat(1, 4));
        }
    }
}

#[test]
fn wu_count_three_ways_on_corpus() {
    for g in corpus(60, 8, -9, 2) {
        let q = build_intersection_form(&g);
        let trace = reduce_mod2(&g);
        let summary = lattice_summary(&q);
        let sets = enumerate_wu_sets(&g, &q).unwrap();
        assert_eq!(sets.len(), 1 << trace.q, "{}", g.to_plumb());
        assert_eq!(summary.dim_h1_mod2, trace.q, "{}", g.to_plumb());
        let lifted = plumb_core::spin::enumerate_wu_sets_by_lifting(&g, &q).unwrap();
        assert_eq!(sets, lifted, "{}", g.to_plumb());
    }
}

#[test]
fn rational_corpus_satisfies_lemma_precheck() {
    for g in corpus(60, 8, -9, 31) {
        assert!(lemma_precheck(&g), "{}", g.to_plumb());
    }
}

#[test]
fn spinc_class_count_matches_det_on_small_corpus() {
    for g in corpus(25, 5, -3, 47) {
        let q = build_intersection_form(&g);
        let det = lattice_summary(&q).det.magnitude().to_usize().unwrap();
        let classes = enumerate_spinc_classes(&q).unwrap();
        assert_eq!(classes.len(), det, "{}", g.to_plumb());
    }
}

#[test]
fn laufer_final_cycle_is_scan_order_independent_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for g in corpus(100, 6, -5, 13) {
        let forward: Vec<usize> = (0..g.len()).collect();
        let reference =
            rationality::laufer_rationality_with(&g, &forward, rationality::DEFAULT_ITER_CAP)
                .unwrap();
        let mut reversed = forward.clone();
        reversed.reverse();
        let mut shuffled = forward.clone();
        shuffled.shuffle(&mut rng);
        for order in [reversed, shuffled] {
            let t = rationality::laufer_rationality_with(&g, &order, rationality::DEFAULT_ITER_CAP)
                .unwrap();
            assert_eq!(t.verdict, reference.verdict, "{}", g.to_plumb());
            assert_eq!(t.final_cycle, reference.final_cycle, "{}", g.to_plumb());
        }
    }
}

#[test]
fn discharge_is_pivot_order_independent_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in corpus(12, 6, -4, 71) {
        let q = build_intersection_form(&g);
        let classes = enumerate_spinc_classes(&q).unwrap();
        for class in classes.iter().take(4) {
            let canonical: Vec<usize> = (0..g.len()).collect();
            let reference = discharge_path(&q, class, &canonical, 100_000).unwrap();
            for _ in 0..20 {
                let mut order = canonical.clone();
                order.shuffle(&mut rng);
                let other = discharge_path(&q, class, &order, 100_000).unwrap();
                match (&reference, &other) {
                    (
                        DischargeOutcome::Terminal { vector: a, .. },
                        DischargeOutcome::Terminal { vector: b, .. },
                    ) => {
                        let sa = char_square(&q, a).unwrap();
                        let sb = char_square(&q, b).unwrap();
                        assert_eq!(sa, sb, "{}", g.to_plumb());
                    }
                    (DischargeOutcome::Dead { .. }, DischargeOutcome::Dead { .. }) => {}
                    _ => panic!("pivot order changed the outcome on {}", g.to_plumb()),
                }
            }
        }
    }
}

#[test]
fn conjugation_symmetry_of_d() {
    for g in corpus(20, 5, -4, 3) {
        let q = build_intersection_form(&g);
        for class in enumerate_spinc_classes(&q).unwrap().iter().take(6) {
            let d1 = d_oracle(&g, class, false).unwrap().d;
            let d2 = d_oracle(&g, &class.negated(), false).unwrap().d;
            assert_eq!(d1, d2, "{}", g.to_plumb());
        }
        // spin classes are self-conjugate
        for wu in enumerate_wu_sets(&g, &q).unwrap() {
            assert!(
                same_spinc(&q, &wu.char_vector, &wu.char_vector.negated()).unwrap(),
                "{}",
                g.to_plumb()
            );
        }
    }
}

#[test]
fn main_theorem_on_a_quick_corpus() {
    for g in corpus(40, 6, -5, 77) {
        let report = verify_theorem(&g).unwrap();
        assert!(report.pass, "counterexample: {}", g.to_plumb());
    }
}

#[test]
fn spin_classes_sit_inside_spinc_classes() {
    for g in corpus(15, 5, -3, 55) {
        let q = build_intersection_form(&g);
        let wu = enumerate_wu_sets(&g, &q).unwrap();
        let classes = enumerate_spinc_classes(&q).unwrap();
        // each Wu set matches exactly one class representative
        for s in &wu {
            let matches = classes
                .iter()
                .filter(|c| same_spinc(&q, c, &s.char_vector).unwrap())
                .count();
            assert_eq!(matches, 1, "{}", g.to_plumb());
        }
        // self-conjugate classes are exactly the Wu classes
        let self_conjugate = classes
            .iter()
            .filter(|c| same_spinc(&q, c, &c.negated()).unwrap())
            .count();
        assert_eq!(self_conjugate, wu.len(), "{}", g.to_plumb());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parse_serialize_roundtrip(seed in 0u64..10_000) {
        let params = GeneratorParams {
            max_vertices: 7,
            weight_min: -6,
            seed,
            count: 1,
            require_rational: false,
        };
        let g = generate_candidates(&params).unwrap().next().unwrap();
        let text = g.to_plumb();
        let parsed = PlumbingGraph::parse(&text).unwrap();
        prop_assert_eq!(&g, &parsed);
        prop_assert_eq!(text, parsed.to_plumb());
    }

    #[test]
    fn char_square_discharge_identity(seed in 0u64..10_000) {
        // K^2 + 4 K_i + 4 n_i = (K + 2 Q e_i)^2 at every vertex
        let params = GeneratorParams {
            max_vertices: 6,
            weight_min: -5,
            seed,
            count: 1,
            require_rational: true,
        };
        let g = generate_candidates(&params).unwrap().next().unwrap();
        let q = build_intersection_form(&g);
        let base: Vec<i64> = (0..g.len() as i64).map(|i| {
            g.weight(i as usize) + 2 * ((seed as i64 % 5) - 2 + i)
        }).collect();
        let k = CharVector::from_i64(&base);
        let square = char_square(&q, &k).unwrap();
        for i in 0..g.len() {
            let mut shifted = k.0.clone();
            for j in 0..g.len() {
                let t = q.entry(j, i) * 2;
                shifted[j] += t;
            }
            let expect = &square
                + Rat::from(BigInt::from(4) * &k.0[i])
                + Rat::from(BigInt::from(4 * g.weight(i)));
            prop_assert_eq!(char_square(&q, &CharVector(shifted)).unwrap(), expect);
        }
    }
}
