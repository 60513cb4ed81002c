//! Randomized invariant checks, all exact: no tolerances anywhere.

use gqm_core::abelian::{check_freeindex, smith_normal_form, tensor, FinAbGroup, IntMatrix};
use gqm_core::chains::{
    boundary2, fill_norm_lp, full_finite_support, integral_fill_norm, verify_dual_certificate,
    witness_commutator_chain, Chain1,
};
use gqm_core::commlength::{cl_mixed, cl_plain, SearchConfig};
use gqm_core::fixtures;
use gqm_core::group::{commutator_subgroup, Element, Group};
use gqm_core::hom::GroupContext;
use gqm_core::qm::{counting_qm, counting_qm_homogenized, extend_by_section, symmetrize};
use gqm_core::word::{Letter, Word};
use gqm_core::{rat, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;

type Raw = Vec<(usize, bool)>;

fn raw_word(max_len: usize, gens: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec((0..gens, any::<bool>()), 0..=max_len)
}

fn elem(group: &Group, raw: &[(usize, bool)]) -> Element {
    let letters = raw.iter().map(|&(gen, inv)| Letter { gen, inv }).collect();
    group.canonicalize(&Word { letters }).expect("indices are in range")
}

fn all_kinds() -> Vec<Group> {
    vec![
        fixtures::free2(),
        fixtures::d4(),
        fixtures::z2_star_z3_context().unwrap().group().clone(),
        fixtures::f2_swap_semidirect(),
        fixtures::f2_swap_context().unwrap().quotient_group().clone(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_inverse_cancels(raw in raw_word(8, 2)) {
        for group in all_kinds() {
            let gens = group.gen_names().len();
            let clipped: Raw = raw.iter().map(|&(g, i)| (g % gens, i)).collect();
            let x = elem(&group, &clipped);
            prop_assert!(x.mul(&x.inv()).unwrap().is_identity());
            prop_assert!(x.inv().mul(&x).unwrap().is_identity());
        }
    }

    #[test]
    fn quotient_maps_are_homomorphisms(a in raw_word(6, 5), b in raw_word(6, 5)) {
        for ctx in [
            fixtures::d4_rotation_context().unwrap(),
            fixtures::z2_star_z3_context().unwrap(),
            fixtures::f2_swap_context().unwrap(),
        ] {
            let group = ctx.group();
            let gens = group.gen_names().len();
            let xa = elem(group, &a.iter().map(|&(g, i)| (g % gens, i)).collect::<Raw>());
            let xb = elem(group, &b.iter().map(|&(g, i)| (g % gens, i)).collect::<Raw>());
            let q = ctx.quotient();
            prop_assert_eq!(
                q.eval(&xa.mul(&xb).unwrap()).unwrap(),
                q.eval(&xa).unwrap().mul(&q.eval(&xb).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn kernel_is_normal(g in raw_word(6, 5), u in raw_word(4, 5), v in raw_word(4, 5)) {
        for ctx in [
            fixtures::d4_rotation_context().unwrap(),
            fixtures::z2_star_z3_context().unwrap(),
            fixtures::f2_swap_context().unwrap(),
        ] {
            let group = ctx.group();
            let gens = group.gen_names().len();
            let clip = |r: &Raw| r.iter().map(|&(g, i)| (g % gens, i)).collect::<Raw>();
            let xg = elem(group, &clip(&g));
            // The quotients are abelian, so commutators land in the kernel.
            let h = elem(group, &clip(&u)).commutator(&elem(group, &clip(&v))).unwrap();
            prop_assert!(ctx.in_normal_subgroup(&h).unwrap());
            prop_assert!(ctx.in_normal_subgroup(&xg.mul(&h).unwrap().mul(&xg.inv()).unwrap()).unwrap());
        }
    }

    #[test]
    fn commutator_identities(a in raw_word(5, 2), b in raw_word(5, 2)) {
        for group in all_kinds() {
            let gens = group.gen_names().len();
            let clip = |r: &Raw| r.iter().map(|&(g, i)| (g % gens, i)).collect::<Raw>();
            let g = elem(&group, &clip(&a));
            let h = elem(&group, &clip(&b));
            let ghg = g.mul(&h).unwrap().mul(&g.inv()).unwrap();
            prop_assert_eq!(g.commutator(&h).unwrap(), ghg.commutator(&g.inv()).unwrap());
            prop_assert_eq!(h.commutator(&g).unwrap(), g.inv().commutator(&ghg).unwrap());
        }
    }

    #[test]
    fn witness_chain_boundary_is_sound(a in raw_word(5, 2), b in raw_word(5, 2)) {
        let group = fixtures::free2();
        let ctx = GroupContext::trivial(group.clone()).unwrap();
        let g = elem(&group, &a);
        let h = elem(&group, &b);
        let comm = g.commutator(&h).unwrap();
        let chain = witness_commutator_chain(&ctx, &g, &h).unwrap();
        // The boundary is the basis element [g,h] even when the
        // commutator degenerates to the identity.
        let mut expected = Chain1::zero();
        expected.add(comm, rat(1, 1));
        prop_assert_eq!(boundary2(&chain).unwrap(), expected);
    }

    #[test]
    fn homogenization_consistency(a in raw_word(6, 2), n in 1u32..4) {
        let group = fixtures::free2();
        let names = group.gen_names().to_vec();
        let x = elem(&group, &a);
        let pat = group.parse("a b").unwrap().word().clone();
        let f = counting_qm(&pat, &names).unwrap();
        let d = rat(3, 1); // safe certified bound for this short pattern
        let fn1 = f.eval(&x.pow(n as i64)).unwrap() / rat(n as i64, 1);
        let fn2 = f.eval(&x.pow(2 * n as i64)).unwrap() / rat(2 * n as i64, 1);
        let slack = &d * (rat(1, n as i64) + rat(1, 2 * n as i64));
        prop_assert!((fn1 - fn2).abs() <= slack);
    }

    #[test]
    fn symmetrized_is_invariant(a in raw_word(6, 3)) {
        let ctx = fixtures::f2_swap_context().unwrap();
        let group = ctx.group();
        let gens = group.gen_names().len();
        let x = elem(group, &a.iter().map(|&(g, i)| (g % gens, i)).collect::<Raw>());
        let names = group.gen_names().to_vec();
        let pat = group.parse("a b").unwrap().word().clone();
        let f = counting_qm_homogenized(&pat, &names).unwrap();
        let z = group.parse("z").unwrap();
        let sym = symmetrize(&f, &ctx, &[group.identity(), z.clone()]).unwrap();
        prop_assert_eq!(sym.eval(&z.conj(&x).unwrap()).unwrap(), sym.eval(&x).unwrap());
    }

    #[test]
    fn restriction_is_quasi_invariant(g_raw in raw_word(4, 3), u in raw_word(3, 2), v in raw_word(3, 2)) {
        // An N-quasimorphism with two-sided bound D″
        // moves by at most 2·D″ under conjugation of kernel elements.
        let ctx = fixtures::f2_swap_context().unwrap();
        let group = ctx.group();
        let names = group.gen_names().to_vec();
        let pat = group.parse("a b").unwrap().word().clone();
        let f = counting_qm_homogenized(&pat, &names).unwrap().with_d_upper(rat(1, 1));
        let qg = ctx.quotient_group();
        let mut transversal = BTreeMap::new();
        transversal.insert(qg.identity(), (group.identity(), Rational::zero()));
        transversal.insert(qg.parse("t").unwrap(), (group.parse("z").unwrap(), Rational::zero()));
        let ext = extend_by_section(&f, &ctx, &transversal).unwrap();
        let dpp = ext.dpp_upper.clone().unwrap();
        let gens = group.gen_names().len();
        let g = elem(group, &g_raw.iter().map(|&(x, i)| (x % gens, i)).collect::<Raw>());
        // x ranges over kernel elements (the fiber free group).
        let x = elem(group, &u).commutator(&elem(group, &v)).unwrap();
        let moved = (ext.eval(&g.conj(&x).unwrap()).unwrap() - ext.eval(&x).unwrap()).abs();
        prop_assert!(moved <= rat(2, 1) * dpp);
    }

    #[test]
    fn snf_roundtrip(rows in prop::collection::vec(prop::collection::vec(-9i64..10, 4), 3)) {
        let m = IntMatrix::from_rows(rows);
        let (d, u, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert_eq!(u.det().abs(), BigInt::one());
        prop_assert_eq!(v.det().abs(), BigInt::one());
        // Diagonal with a divisibility chain.
        for i in 0..d.rows {
            for j in 0..d.cols {
                if i != j {
                    prop_assert!(d[(i, j)].is_zero());
                }
            }
        }
        for t in 1..d.rows.min(d.cols) {
            let prev = &d[(t - 1, t - 1)];
            let cur = &d[(t, t)];
            prop_assert!(!(cur.is_zero() && !prev.is_zero()) || prev.is_zero());
            if !prev.is_zero() {
                prop_assert!((cur % prev).is_zero());
            } else {
                prop_assert!(cur.is_zero());
            }
        }
    }

    #[test]
    fn tensor_is_symmetric(a in prop::collection::vec(0i64..12, 0..4), b in prop::collection::vec(0i64..12, 0..4)) {
        let lift = |v: &Vec<i64>| FinAbGroup {
            invariant_factors: v.iter().map(|&x| BigInt::from(x)).collect(),
        };
        prop_assert_eq!(tensor(&lift(&a), &lift(&b)), tensor(&lift(&b), &lift(&a)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn freeindex_sweep(n in 2usize..7, m in 2usize..7) {
        let a = fixtures::cyclic_table(n, "x");
        let b = fixtures::cyclic_table(m, "y");
        let (ok, _, _) = check_freeindex(&a, &b).unwrap();
        prop_assert!(ok);
        let d3 = fixtures::dihedral_table(3);
        let (ok, _, _) = check_freeindex(&a, &d3).unwrap();
        prop_assert!(ok);
    }
}

fn mixed_members(ctx: &GroupContext) -> Vec<Element> {
    let elems = ctx.group().elements().unwrap();
    let normal: Vec<Element> = elems
        .iter()
        .filter(|e| ctx.in_normal_subgroup(e).unwrap())
        .cloned()
        .collect();
    commutator_subgroup(ctx.group(), &elems, &normal, gqm_core::DEFAULT_ELEMENT_CAP).unwrap()
}

#[test]
fn balls_are_monotone_and_inversion_closed() {
    for group in all_kinds() {
        let mut prev: Vec<Element> = Vec::new();
        for radius in 0..=3usize {
            let ball = group.ball(radius, gqm_core::DEFAULT_ELEMENT_CAP).unwrap();
            for x in &prev {
                assert!(ball.contains(x), "ball shrank at radius {radius}");
            }
            for x in &ball {
                assert!(ball.contains(&x.inv()), "ball not inversion-closed");
            }
            prev = ball;
        }
    }
}

#[test]
fn finite_fill_norm_properties() {
    for ctx in [
        fixtures::d4_rotation_context().unwrap(),
        fixtures::s3_alternating_context().unwrap(),
    ] {
        let support = full_finite_support(&ctx).unwrap();
        let members = mixed_members(&ctx);
        let cfg = SearchConfig::default();
        let norm = |x: &Element| -> Rational {
            if x.is_identity() {
                return Rational::zero();
            }
            fill_norm_lp(&ctx, &Chain1::single(x.clone()), &support).unwrap().value
        };
        for x in &members {
            if x.is_identity() {
                continue;
            }
            let fill = fill_norm_lp(&ctx, &Chain1::single(x.clone()), &support).unwrap();
            // Strong duality and weak duality for a scaled-down dual.
            let (feasible, obj) =
                verify_dual_certificate(&ctx, &fill.dual, &support, &Chain1::single(x.clone()))
                    .unwrap();
            assert!(feasible);
            assert_eq!(obj, fill.value);
            let weaker: BTreeMap<Element, Rational> =
                fill.dual.iter().map(|(e, v)| (e.clone(), v / rat(2, 1))).collect();
            let (feasible, obj) =
                verify_dual_certificate(&ctx, &weaker, &support, &Chain1::single(x.clone()))
                    .unwrap();
            assert!(feasible);
            assert!(obj <= fill.value);
            // Mixed-length sandwich.
            let cl = cl_mixed(&ctx, x, &cfg).unwrap();
            let bound = rat(4 * cl.value.unwrap() as i64 - 1, 1);
            assert!(fill.value <= bound);
            // Support monotonicity: dropping support pairs never helps.
            let half: Vec<_> = support
                .iter()
                .filter(|p| {
                    p.first == *x
                        || p.second == *x
                        || (!p.first.is_identity() && !p.second.is_identity())
                })
                .cloned()
                .collect();
            if let Ok(sub) = fill_norm_lp(&ctx, &Chain1::single(x.clone()), &half) {
                assert!(sub.value >= fill.value);
            }
            // Integral chains can never beat the relaxation.
            let (int_norm, _) = integral_fill_norm(&ctx, x, &support, 10_000).unwrap();
            assert!(Rational::from(int_norm) >= fill.value);
        }
        // Subadditivity of the induced norm, plus one, on [G,N] pairs.
        for x in &members {
            for y in &members {
                let xy = x.mul(y).unwrap();
                assert!(norm(&xy) <= norm(x) + norm(y) + Rational::one());
            }
        }
    }
}

#[test]
fn finite_length_properties() {
    let cfg = SearchConfig::default();
    for ctx in [
        fixtures::d4_rotation_context().unwrap(),
        fixtures::s3_alternating_context().unwrap(),
    ] {
        let members = mixed_members(&ctx);
        let elems = ctx.group().elements().unwrap();
        for x in &members {
            let mixed = cl_mixed(&ctx, x, &cfg).unwrap();
            let plain = cl_plain(ctx.group(), x, &cfg).unwrap();
            let mv = mixed.value.unwrap();
            assert!(plain.value.unwrap() <= mv, "plain length exceeded mixed at {x}");
            mixed.verify(&ctx, x).unwrap();
            // Conjugation invariance of the mixed length.
            for g in &elems {
                let conj = cl_mixed(&ctx, &g.conj(x).unwrap(), &cfg).unwrap();
                assert_eq!(conj.value.unwrap(), mv, "conjugation changed the length at {x}");
            }
            // Subadditivity over powers.
            for m in 1..=3i64 {
                for n in 1..=3i64 {
                    let cm = cl_mixed(&ctx, &x.pow(m), &cfg).unwrap().value.unwrap();
                    let cn = cl_mixed(&ctx, &x.pow(n), &cfg).unwrap().value.unwrap();
                    let cmn = cl_mixed(&ctx, &x.pow(m + n), &cfg).unwrap().value.unwrap();
                    assert!(cmn <= cm + cn);
                }
            }
        }
    }
}

#[test]
fn search_length_monotone_in_budget() {
    let group = fixtures::free2();
    let ctx = GroupContext::trivial(group.clone()).unwrap();
    let x = group.parse("[a,b] [b,a a]").unwrap();
    let mut prev: Option<usize> = None;
    for max_factors in [2usize, 3, 4] {
        let cfg = SearchConfig { max_factors, ..SearchConfig::default() };
        let res = cl_mixed(&ctx, &x, &cfg).unwrap();
        if let Some(v) = res.value {
            if let Some(p) = prev {
                assert!(v <= p, "value grew with a larger budget");
            }
            prev = Some(v);
        }
    }
    assert!(prev.is_some(), "search never found the product of two commutators");
}

#[test]
fn surface_counts_follow_chain_mass() {
    let group = fixtures::free4();
    let ctx = GroupContext::trivial(group.clone()).unwrap();
    let a = group.parse("a").unwrap();
    let b = group.parse("b").unwrap();
    let c = group.parse("c").unwrap();
    let d = group.parse("d").unwrap();
    for pairs in [vec![(a.clone(), b.clone())], vec![(a, b), (c, d)]] {
        let mut x = group.identity();
        for (g, h) in &pairs {
            x = x.mul(&g.commutator(h).unwrap()).unwrap();
        }
        let built = gqm_core::surfaces::build_from_decomposition(&ctx, &pairs, &x).unwrap();
        let chain = gqm_core::surfaces::decomposition_chain(&ctx, &pairs, &x).unwrap();
        let s = built.surface.triangles.len();
        assert!(Rational::from(BigInt::from(s as i64)) <= chain.l1());
        let report = gqm_core::surfaces::validate(&built.surface, &ctx).unwrap();
        // Two ways to compute the genus must agree for one boundary and
        // one vertex: χ = p − e + s = 1 − 2g and s = 4g + 2p − 3.
        let g = report.genus.unwrap();
        assert_eq!(s as i64, 4 * g + 2 * (report.vertices as i64) - 3);
    }
}
