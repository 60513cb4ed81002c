//! Self-verification suite: each check exercises a certified identity or
//! bound end to end on the shipped fixtures and reports pass/fail with a
//! human-readable detail line. The CLI's `verify` command and the
//! release-gating integration test both run through here.

use crate::chains::{
    boundary2, fill_norm_lp, support_in_ball, verify_dual_certificate, witness_commutator_chain,
    Chain1,
};
use crate::commlength::{
    cl_mixed, compute_section_constants, rewrite_matched_commutator_products, ClKind, SearchConfig,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::group::{commutator_subgroup, Element, Group};
use crate::hom::GroupContext;
use crate::qm::{bavard_lower, counting_qm_homogenized, defect_lower, extend_by_averaging,
    extend_by_section, symmetrize, VirtualSection};
use crate::surfaces::{build_from_chain, build_from_decomposition, validate};
use crate::word::{Letter, Word};
use crate::{rat, Rational, DEFAULT_ELEMENT_CAP};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

const NAMES: [&str; 11] = [
    "finite-group length oracle",
    "witness-chain boundary identity",
    "filling-norm sandwich and duality",
    "stable length of the basic free commutator",
    "separation element bounds",
    "surface census and genus",
    "commutator rewriting bound",
    "free-product quotient comparison",
    "quasimorphism extension bounds",
    "section constants on finite fixtures",
    "lower bounds never exceed upper bounds",
];

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let checks: [fn(u64) -> Result<String>; 11] = [
        check_finite_oracle,
        check_witness_boundaries,
        check_fill_sandwich,
        check_basic_scl,
        check_separation,
        check_surfaces,
        check_rewriting,
        check_freeproduct,
        check_extensions,
        check_section_constants,
        check_bound_order,
    ];
    checks
        .iter()
        .zip(NAMES)
        .enumerate()
        .map(|(i, (f, name))| {
            let start = Instant::now();
            let (passed, detail) = match f(seed) {
                Ok(d) => (true, d),
                Err(e) => (false, e.to_string()),
            };
            CriterionResult { index: i + 1, name, passed, detail, millis: start.elapsed().as_millis() }
        })
        .collect()
}

fn fail(msg: String) -> Error {
    Error::PreconditionViolated(msg)
}

fn random_element(group: &Group, rng: &mut ChaCha8Rng, max_len: usize) -> Result<Element> {
    let gens = group.gen_names().len();
    let len = rng.gen_range(0..=max_len);
    let letters: Vec<Letter> = (0..len)
        .map(|_| Letter { gen: rng.gen_range(0..gens), inv: rng.gen_bool(0.5) })
        .collect();
    group.canonicalize(&Word { letters })
}

/// Exact mixed lengths on small finite fixtures against a direct oracle
/// that multiplies out every product of at most three mixed commutators.
fn check_finite_oracle(_seed: u64) -> Result<String> {
    let mut checked = 0usize;
    for ctx in [fixtures::d4_rotation_context()?, fixtures::s3_alternating_context()?] {
        let group = ctx.group();
        let elems = group.elements()?;
        let normal: Vec<Element> = elems
            .iter()
            .filter(|e| ctx.in_normal_subgroup(e).unwrap_or(false))
            .cloned()
            .collect();
        let mut comms = Vec::new();
        for g in &elems {
            for h in &normal {
                comms.push(g.commutator(h)?);
            }
        }
        comms.sort();
        comms.dedup();
        // Oracle: grow product sets level by level, no shortcuts.
        let mut oracle: BTreeMap<Element, usize> = BTreeMap::new();
        oracle.insert(group.identity(), 0);
        let mut level = vec![group.identity()];
        for d in 1..=3usize {
            let mut next = Vec::new();
            for p in &level {
                for c in &comms {
                    let q = p.mul(c)?;
                    if !oracle.contains_key(&q) {
                        oracle.insert(q.clone(), d);
                        next.push(q);
                    }
                }
            }
            level = next;
        }
        let members = commutator_subgroup(group, &elems, &normal, DEFAULT_ELEMENT_CAP)?;
        let cfg = SearchConfig::default();
        for x in &members {
            let res = cl_mixed(&ctx, x, &cfg)?;
            if res.kind != ClKind::Exact {
                return Err(fail(format!("expected an exact length at {x}")));
            }
            if res.value != oracle.get(x).copied() {
                return Err(fail(format!(
                    "length {:?} disagrees with oracle {:?} at {x}",
                    res.value,
                    oracle.get(x)
                )));
            }
            res.verify(&ctx, x)?;
            checked += 1;
        }
    }
    Ok(format!("{checked} elements matched the brute-force oracle"))
}

/// 200 random witness chains: boundary equals the commutator, mass 3.
fn check_witness_boundaries(seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f2 = GroupContext::trivial(fixtures::free2())?;
    let d4 = fixtures::d4_rotation_context()?;
    let zz = fixtures::z2_star_z3_context()?;
    let mut count = 0usize;
    while count < 200 {
        // Degenerate pairs (commuting g, h) have collapsing chains; the
        // identity is checked on pairs with a nontrivial commutator.
        let (ctx, g, h) = match count % 3 {
            0 => {
                let g = random_element(f2.group(), &mut rng, 5)?;
                let h = random_element(f2.group(), &mut rng, 5)?;
                (&f2, g, h)
            }
            1 => {
                let elems = d4.group().elements()?;
                let g = elems[rng.gen_range(0..elems.len())].clone();
                let rots: Vec<&Element> = elems
                    .iter()
                    .filter(|e| d4.in_normal_subgroup(e).unwrap_or(false))
                    .collect();
                let h = rots[rng.gen_range(0..rots.len())].clone();
                (&d4, g, h)
            }
            _ => {
                // Any commutator lies in the kernel of the abelian quotient.
                let g = random_element(zz.group(), &mut rng, 5)?;
                let u = random_element(zz.group(), &mut rng, 4)?;
                let v = random_element(zz.group(), &mut rng, 4)?;
                (&zz, g, u.commutator(&v)?)
            }
        };
        let comm = g.commutator(&h)?;
        if comm.is_identity() {
            continue;
        }
        let chain = witness_commutator_chain(ctx, &g, &h)?;
        let b = boundary2(&chain)?;
        let mut expected = Chain1::zero();
        expected.add(comm.clone(), rat(1, 1));
        if b != expected {
            return Err(fail(format!("boundary mismatch for ({g}, {h})")));
        }
        if chain.l1() != rat(3, 1) {
            return Err(fail(format!("mass {} instead of 3 for ({g}, {h})", chain.l1())));
        }
        count += 1;
    }
    Ok("200 random witness chains verified".into())
}

fn fixture_fill_cases() -> Result<Vec<(GroupContext, Element, SearchConfig)>> {
    let f2 = GroupContext::trivial(fixtures::free2())?;
    let x_f2 = f2.group().parse("[a,b]")?;
    let d4 = fixtures::d4_rotation_context()?;
    let x_d4 = d4.group().parse("r r")?;
    let s3 = fixtures::s3_alternating_context()?;
    let x_s3 = s3.group().parse("r")?;
    let zz = fixtures::z2_star_z3_context()?;
    // The shortest kernel elements of the free product have length 4, so
    // the commutator search needs a radius-4 ball to see any of them.
    let x_zz = zz.group().parse("[z,[z,c]]")?;
    let deep = SearchConfig { ball_radius: 4, ..SearchConfig::default() };
    Ok(vec![
        (f2, x_f2, SearchConfig::default()),
        (d4, x_d4, SearchConfig::default()),
        (s3, x_s3, SearchConfig::default()),
        (zz, x_zz, deep),
    ])
}

/// Every element a commutator-decomposition witness chain touches:
/// enough support vertices to make the restricted LP feasible at any
/// radius.
fn witness_vertices(ctx: &GroupContext, witness: &[(Element, Element)]) -> Result<Vec<Element>> {
    let mut out = Vec::new();
    let mut partial = ctx.group().identity();
    for (g, h) in witness {
        let comm = g.commutator(h)?;
        out.extend([g.clone(), h.clone(), g.mul(h)?, h.mul(g)?, comm.clone(), partial.clone()]);
        partial = partial.mul(&comm)?;
        out.push(partial.clone());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Restricted filling norms: value ≤ 4·cl − 1, exact strong duality, and
/// monotone improvement as the support radius grows through 2, 3, 4.
fn check_fill_sandwich(_seed: u64) -> Result<String> {
    let mut lines = Vec::new();
    for (ctx, x, cfg) in fixture_fill_cases()? {
        let cl = cl_mixed(&ctx, &x, &cfg)?;
        let cl_upper = cl
            .value
            .ok_or_else(|| fail(format!("no length bound for {x}")))?;
        let extras = witness_vertices(
            &ctx,
            cl.witness.as_ref().ok_or_else(|| fail(format!("no witness for {x}")))?,
        )?;
        let target = Chain1::single(x.clone());
        let mut prev: Option<Rational> = None;
        let mut last = Rational::zero();
        for radius in [2usize, 3, 4] {
            let support = support_in_ball(&ctx, radius, &extras, DEFAULT_ELEMENT_CAP)?;
            let fill = fill_norm_lp(&ctx, &target, &support)?;
            let cap = rat(4 * cl_upper as i64 - 1, 1);
            if fill.value > cap {
                return Err(fail(format!(
                    "fill value {} exceeds 4·cl−1 = {cap} for {x}",
                    fill.value
                )));
            }
            let (feasible, objective) =
                verify_dual_certificate(&ctx, &fill.dual, &support, &target)?;
            if !feasible || objective != fill.value {
                return Err(fail(format!("dual certificate failed for {x} at radius {radius}")));
            }
            if let Some(p) = &prev {
                if fill.value > *p {
                    return Err(fail(format!(
                        "value grew from {p} to {} when the radius grew for {x}",
                        fill.value
                    )));
                }
            }
            prev = Some(fill.value.clone());
            last = fill.value;
        }
        lines.push(format!("{x}: {last}"));
    }
    Ok(format!("radius-4 values — {}", lines.join("; ")))
}

/// The basic free commutator: certified lower bound exactly 1/2 and an
/// LP upper bound in [1/2, 1] that does not grow with the radius.
fn check_basic_scl(_seed: u64) -> Result<String> {
    let ctx = GroupContext::trivial(fixtures::free2())?;
    let group = ctx.group();
    let x = group.parse("[a,b]")?;
    let names = group.gen_names().to_vec();
    let f = counting_qm_homogenized(&group.parse("a b")?.word().clone(), &names)?
        .with_d_upper(rat(1, 1));
    let lower = bavard_lower(&rat(1, 1), &f.eval(&x)?)?;
    if lower != rat(1, 2) {
        return Err(fail(format!("lower bound {lower} instead of 1/2")));
    }
    let x2 = x.pow(2);
    let extras = vec![x.clone(), x2.clone()];
    let target = Chain1::single(x2);
    let mut uppers = Vec::new();
    for radius in [3usize, 4] {
        let support = support_in_ball(&ctx, radius, &extras, DEFAULT_ELEMENT_CAP)?;
        let fill = fill_norm_lp(&ctx, &target, &support)?;
        // scl(x) ≤ (‖x²‖′ + 1) / 8.
        uppers.push((fill.value + rat(1, 1)) / rat(8, 1));
    }
    if uppers[1] > uppers[0] {
        return Err(fail(format!(
            "upper bound grew from {} to {} with the radius",
            uppers[0], uppers[1]
        )));
    }
    let u = uppers[1].clone();
    if u < lower || u > rat(1, 1) {
        return Err(fail(format!("upper bound {u} outside [1/2, 1]")));
    }
    Ok(format!("lower 1/2, LP upper {u}"))
}

fn symmetrized_candidates(ctx: &GroupContext) -> Result<Vec<crate::qm::Quasimorphism>> {
    let group = ctx.group();
    let names = group.gen_names().to_vec();
    let reps = vec![group.identity(), group.parse("z")?];
    let mut out = Vec::new();
    for pat in ["a", "b", "a b", "a B", "a a b", "a b a B"] {
        let f = counting_qm_homogenized(&group.parse(pat)?.word().clone(), &names)?;
        out.push(symmetrize(&f, ctx, &reps)?);
    }
    Ok(out)
}

/// The separation element x: x^{2n} = [z, x⁻ⁿ] symbolically, so every
/// even power is a single mixed commutator, while every symmetrized
/// homogeneous candidate certifies nothing below 0.
fn check_separation(_seed: u64) -> Result<String> {
    let ctx = fixtures::f2_swap_context()?;
    let group = ctx.group();
    let x = fixtures::separation_element(&ctx)?;
    let z = group.parse("z")?;
    let mut best_upper: Option<Rational> = None;
    for n in 1..=4i64 {
        let lhs = x.pow(2 * n);
        let rhs = z.commutator(&x.pow(-n))?;
        if lhs != rhs {
            return Err(fail(format!("x^{} differs from [z, x^-{n}]", 2 * n)));
        }
        if !ctx.in_normal_subgroup(&x.pow(-n))? {
            return Err(Error::NonNormalArgument);
        }
        if lhs.is_identity() {
            return Err(fail("even power collapsed to the identity".into()));
        }
        // cl(x^{2n}) = 1 exactly, hence scl(x) ≤ 1/(2n).
        let upper = Rational::new(BigInt::from(1), BigInt::from(2 * n));
        if best_upper.as_ref().map_or(true, |b| upper < *b) {
            best_upper = Some(upper);
        }
    }
    for f in symmetrized_candidates(&ctx)? {
        let v = f.eval(&x)?;
        if !v.is_zero() {
            return Err(fail(format!("candidate {} sees {v} at the separation element", f.name)));
        }
    }
    Ok(format!(
        "even powers are single mixed commutators; best upper bound {}, all candidate lower bounds 0",
        best_upper.unwrap()
    ))
}

/// Decomposition surfaces for one to three commutators, with both Euler
/// identities, plus the genus-1 surface of the basic witness chain.
fn check_surfaces(_seed: u64) -> Result<String> {
    for m in 1..=3usize {
        let names: Vec<String> = (0..2 * m)
            .map(|i| {
                char::from(b'a' + i as u8).to_string()
            })
            .collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let group = fixtures::free(&name_refs);
        let ctx = GroupContext::trivial(group.clone())?;
        let mut pairs = Vec::new();
        let mut x = group.identity();
        for j in 0..m {
            let g = group.generator(2 * j)?;
            let h = group.generator(2 * j + 1)?;
            x = x.mul(&g.commutator(&h)?)?;
            pairs.push((g, h));
        }
        let built = build_from_decomposition(&ctx, &pairs, &x)?;
        let report = validate(&built.surface, &ctx)?;
        let s = report.triangle_count as i64;
        let e = report.edge_count as i64;
        let p = report.vertices as i64;
        let g = report.genus.ok_or_else(|| fail("no genus".into()))?;
        if (s, e, p, g) != (4 * m as i64 - 1, 6 * m as i64 - 1, 1, m as i64) {
            return Err(fail(format!("census ({s},{e},{p},g={g}) wrong for m={m}")));
        }
        if s - e + p != 1 - 2 * g || 1 + 2 * (e - 1) != 3 * s {
            return Err(fail(format!("Euler identities fail for m={m}")));
        }
        if !report.connected || report.boundary_edge_count != 1 || !report.gn_labelled {
            return Err(fail(format!("structural flags wrong for m={m}")));
        }
    }
    let ctx = GroupContext::trivial(fixtures::free2())?;
    let a = ctx.group().parse("a")?;
    let b = ctx.group().parse("b")?;
    let x = a.commutator(&b)?;
    let chain = witness_commutator_chain(&ctx, &a, &b)?;
    let built = build_from_chain(&ctx, &chain, &x)?;
    let report = validate(&built.surface, &ctx)?;
    if !report.connected || report.genus != Some(1) || report.boundary_edge_count != 1 {
        return Err(fail("witness-chain surface is not a connected genus-1 surface".into()));
    }
    Ok("censuses 3/5/1, 7/11/1, 11/17/1 with genus 1, 2, 3; witness chain gives genus 1".into())
}

/// Random rewriting instances: the witness multiplies back exactly and
/// uses at most three mixed commutators per input quadruple.
fn check_rewriting(seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7));
    let f4 = GroupContext::trivial(fixtures::free4())?;
    let d4 = fixtures::d4_rotation_context()?;
    for trial in 0..100usize {
        let (ctx, max_len) = if trial % 2 == 0 { (&f4, 3) } else { (&d4, 2) };
        let k = rng.gen_range(1..=3usize);
        let mut quads = Vec::new();
        for _ in 0..k {
            let f = random_element(ctx.group(), &mut rng, max_len)?;
            let g = random_element(ctx.group(), &mut rng, max_len)?;
            // α, β must match f, g in the quotient: multiply by kernel
            // elements, here commutators (the quotients are abelian).
            let u = random_element(ctx.group(), &mut rng, 2)?;
            let v = random_element(ctx.group(), &mut rng, 2)?;
            let alpha = f.mul(&u.commutator(&v)?)?;
            let w = random_element(ctx.group(), &mut rng, 2)?;
            let y = random_element(ctx.group(), &mut rng, 2)?;
            let beta = g.mul(&w.commutator(&y)?)?;
            quads.push((f, g, alpha, beta));
        }
        let (target, bound, witness) = rewrite_matched_commutator_products(ctx, &quads)?;
        if bound != 3 * k || witness.len() > bound {
            return Err(fail(format!("witness length {} exceeds 3k = {}", witness.len(), 3 * k)));
        }
        let mut prod = ctx.group().identity();
        for (g, h) in &witness {
            if !ctx.in_normal_subgroup(h)? {
                return Err(Error::NonNormalArgument);
            }
            prod = prod.mul(&g.commutator(h)?)?;
        }
        if prod != target {
            return Err(Error::ProductMismatch);
        }
    }
    Ok("100 random rewriting instances verified".into())
}

/// The two independent computations of N/[G,N] for free products agree
/// on all pairs from the shipped table list.
fn check_freeproduct(_seed: u64) -> Result<String> {
    let tables = vec![
        fixtures::cyclic_table(2, "z"),
        fixtures::cyclic_table(3, "c"),
        fixtures::cyclic_table(4, "p"),
        fixtures::cyclic_table(6, "q"),
        fixtures::dihedral_table(3),
        fixtures::klein_table(),
    ];
    let mut pairs_checked = 0usize;
    for a in &tables {
        for b in &tables {
            let (ok, lhs, rhs) = crate::abelian::check_freeindex(a, b)?;
            if !ok {
                return Err(fail(format!("sides disagree: {lhs} vs {rhs}")));
            }
            pairs_checked += 1;
        }
    }
    let (_, v46, _) =
        crate::abelian::check_freeindex(&fixtures::cyclic_table(4, "p"), &fixtures::cyclic_table(6, "q"))?;
    if v46.invariant_factors != vec![BigInt::from(2)] {
        return Err(fail(format!("Z/4 with Z/6 gave {v46} instead of Z/2")));
    }
    let (_, v23, _) =
        crate::abelian::check_freeindex(&fixtures::cyclic_table(2, "z"), &fixtures::cyclic_table(3, "c"))?;
    if !v23.invariant_factors.is_empty() {
        return Err(fail(format!("Z/2 with Z/3 gave {v23} instead of the trivial group")));
    }
    Ok(format!("{pairs_checked} table pairs agree on both sides"))
}

fn swap_context_qm(ctx: &GroupContext) -> Result<crate::qm::Quasimorphism> {
    let group = ctx.group();
    let names = group.gen_names().to_vec();
    let f = counting_qm_homogenized(&group.parse("a b")?.word().clone(), &names)?
        .with_d_upper(rat(1, 1));
    symmetrize(&f, ctx, &[group.identity(), group.parse("z")?])
}

/// Both extension constructions restrict exactly on a radius-5 ball and
/// stay within their recorded defect bounds on sampled pairs.
fn check_extensions(_seed: u64) -> Result<String> {
    let ctx = fixtures::f2_swap_context()?;
    let group = ctx.group();
    let f = swap_context_qm(&ctx)?;
    let qg = ctx.quotient_group();
    let q_id = qg.identity();
    let q_z = qg.parse("t")?;
    let mut t = BTreeMap::new();
    t.insert(q_id.clone(), group.identity());
    t.insert(q_z.clone(), group.parse("z")?);
    let vs = VirtualSection::new(&ctx, vec![], vec![q_id.clone(), q_z.clone()], t)?;
    let avg = extend_by_averaging(&f, &ctx, &vs)?;

    let mut transversal = BTreeMap::new();
    transversal.insert(q_id, (group.identity(), Rational::zero()));
    transversal.insert(q_z, (group.parse("z")?, Rational::zero()));
    let sec = extend_by_section(&f, &ctx, &transversal)?;

    let ball = group.ball(5, DEFAULT_ELEMENT_CAP)?;
    let mut restricted = 0usize;
    for h in &ball {
        if !ctx.in_normal_subgroup(h)? {
            continue;
        }
        let fv = f.eval(h)?;
        if avg.eval(h)? != fv || sec.eval(h)? != fv {
            return Err(fail(format!("an extension fails to restrict to f at {h}")));
        }
        restricted += 1;
    }

    let samples = crate::qm::ball_pairs(group, 2, DEFAULT_ELEMENT_CAP)?;
    // The averaging extension records an ordinary defect bound; the
    // section extension records a bound on the N-defect (multiplying by
    // kernel elements on either side), so each is sampled accordingly.
    let bound = avg.d_upper.clone().ok_or(Error::MissingDefectBound)?;
    let (sampled, _) = defect_lower(&avg, &samples)?;
    if sampled > bound {
        return Err(fail(format!(
            "averaging extension shows defect at least {sampled}, above the recorded {bound}"
        )));
    }
    let bound = sec.dpp_upper.clone().ok_or(Error::MissingDefectBound)?;
    let mut n_samples = Vec::new();
    for (g, h) in &samples {
        if ctx.in_normal_subgroup(h)? {
            n_samples.push((g.clone(), h.clone()));
        }
    }
    let (sampled, _) = crate::qm::nqm_defect_lower(&sec, &ctx, &n_samples)?;
    if sampled > bound {
        return Err(fail(format!(
            "section extension shows N-defect at least {sampled}, above the recorded {bound}"
        )));
    }
    Ok(format!(
        "both extensions restrict exactly on {restricted} ball elements and respect their bounds"
    ))
}

/// Section of the quotient map picking the shortlex-least preimage of
/// each quotient element; the default section for finite contexts.
pub fn shortlex_section(ctx: &GroupContext) -> Result<BTreeMap<Element, Element>> {
    let mut out = BTreeMap::new();
    for g in ctx.group().elements()? {
        let q = ctx.quotient().eval(&g)?;
        out.entry(q).or_insert(g);
    }
    Ok(out)
}

/// Section constants verify the mixed-vs-plain length comparison on both
/// finite fixture contexts.
fn check_section_constants(_seed: u64) -> Result<String> {
    let mut lines = Vec::new();
    for (label, ctx) in [
        ("dihedral-8", fixtures::d4_rotation_context()?),
        ("symmetric-3", fixtures::s3_alternating_context()?),
    ] {
        let section = shortlex_section(&ctx)?;
        let data = compute_section_constants(&ctx, &section, 1_000_000)?;
        lines.push(format!("{label}: M(s) = {}, C(s) = {}", data.ms, data.cs));
    }
    Ok(lines.join("; "))
}

/// Every certified lower bound stays at or below every upper bound for
/// the same element: the basic free commutator, the separation element,
/// and a finite rotation.
fn check_bound_order(_seed: u64) -> Result<String> {
    let mut checked = 0usize;
    // Basic free commutator: lower 1/2 against search and LP uppers.
    {
        let ctx = GroupContext::trivial(fixtures::free2())?;
        let group = ctx.group();
        let x = group.parse("[a,b]")?;
        let names = group.gen_names().to_vec();
        let f = counting_qm_homogenized(&group.parse("a b")?.word().clone(), &names)?;
        let lower = bavard_lower(&rat(1, 1), &f.eval(&x)?)?;
        let cl = cl_mixed(&ctx, &x, &SearchConfig::default())?;
        let search_upper = rat(cl.value.unwrap() as i64, 1);
        let support = support_in_ball(&ctx, 2, &[x.clone()], DEFAULT_ELEMENT_CAP)?;
        let lp_upper = crate::chains::scl_upper_from_fill(&ctx, &x, 1, &support)?;
        for u in [&search_upper, &lp_upper] {
            if lower > *u {
                return Err(fail(format!("lower {lower} exceeds upper {u} for {x}")));
            }
            checked += 1;
        }
    }
    // Separation element: all candidate lowers are 0, upper 1/8.
    {
        let ctx = fixtures::f2_swap_context()?;
        let x = fixtures::separation_element(&ctx)?;
        let upper = rat(1, 8);
        for f in symmetrized_candidates(&ctx)? {
            let lower = bavard_lower(&rat(1, 1), &f.eval(&x)?)?;
            if lower > upper {
                return Err(fail(format!("lower {lower} exceeds upper {upper} for {x}")));
            }
            checked += 1;
        }
    }
    // Finite rotation: vanishing stable length, lower must be 0.
    {
        let ctx = fixtures::d4_rotation_context()?;
        let x = ctx.group().parse("r r")?;
        // x has order 2, so cl(x²) = 0 and the stable length is 0.
        let report = crate::commlength::scl_mixed_report(
            &ctx,
            &x,
            &SearchConfig::default(),
            &[1, 2, 4],
            None,
        )?;
        let upper = report.upper.ok_or_else(|| fail("no upper bound".into()))?;
        if report.lower > upper {
            return Err(fail(format!("lower {} exceeds upper {upper} for {x}", report.lower)));
        }
        if !upper.is_zero() {
            return Err(fail(format!("stable length of an order-2 rotation should be 0, got {upper}")));
        }
        checked += 1;
    }
    Ok(format!("{checked} lower/upper pairs in order"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_indices_line_up() {
        assert_eq!(NAMES.len(), 11);
    }
}
