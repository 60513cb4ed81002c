//! Commutator-length computation: exact values on finite groups by
//! breadth-first search over the commutator Cayley growth, upper bounds by
//! bounded search on infinite groups, lower bounds from quasimorphism
//! values, plus the rewriting identity and section constants used to
//! compare plain and mixed lengths.

use crate::error::{Error, Result};
use crate::group::{commutator_subgroup, subgroup_closure, Element, Group};
use crate::hom::GroupContext;
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub ball_radius: usize,
    pub max_factors: usize,
    pub element_cap: usize,
    pub meet_in_middle: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            ball_radius: 2,
            max_factors: 3,
            element_cap: crate::DEFAULT_ELEMENT_CAP,
            meet_in_middle: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClKind {
    Exact,
    UpperBound,
    NotFound,
}

#[derive(Debug, Clone)]
pub struct ClResult {
    pub kind: ClKind,
    pub value: Option<usize>,
    /// Pairs (g, h) with h in N and x = ∏ [gᵢ, hᵢ].
    pub witness: Option<Vec<(Element, Element)>>,
}

impl ClResult {
    fn exact(value: usize, witness: Vec<(Element, Element)>) -> Self {
        ClResult { kind: ClKind::Exact, value: Some(value), witness: Some(witness) }
    }

    fn upper(value: usize, witness: Vec<(Element, Element)>) -> Self {
        ClResult { kind: ClKind::UpperBound, value: Some(value), witness: Some(witness) }
    }

    fn not_found() -> Self {
        ClResult { kind: ClKind::NotFound, value: None, witness: None }
    }

    /// Re-multiplies the witness and checks membership of each h.
    pub fn verify(&self, ctx: &GroupContext, x: &Element) -> Result<()> {
        let Some(witness) = &self.witness else { return Ok(()) };
        let mut prod = ctx.group().identity();
        for (g, h) in witness {
            if !ctx.in_normal_subgroup(h)? {
                return Err(Error::NonNormalArgument);
            }
            prod = prod.mul(&g.commutator(h)?)?;
        }
        if &prod != x {
            return Err(Error::ProductMismatch);
        }
        if let Some(v) = self.value {
            if witness.len() > v {
                return Err(Error::ProductMismatch);
            }
        }
        Ok(())
    }
}

/// Deduplicated nontrivial commutators [g,h], g from `gs`, h from `hs`,
/// keyed by value with the shortlex-least generating pair retained.
fn commutator_generators(
    gs: &[Element],
    hs: &[Element],
) -> Result<BTreeMap<Element, (Element, Element)>> {
    let mut out = BTreeMap::new();
    for g in gs {
        for h in hs {
            let c = g.commutator(h)?;
            if c.is_identity() {
                continue;
            }
            out.entry(c).or_insert_with(|| (g.clone(), h.clone()));
        }
    }
    Ok(out)
}

/// BFS distances (and witness parents) from the identity in the Cayley
/// graph generated by the given commutators. Exhausts the reachable set.
fn bfs_distances(
    group: &Group,
    comms: &BTreeMap<Element, (Element, Element)>,
    cap: usize,
) -> Result<HashMap<Element, (usize, Option<(Element, Element, Element)>)>> {
    // parent triple: (previous element, g, h) with current = previous·[g,h]
    let mut dist: HashMap<Element, (usize, Option<(Element, Element, Element)>)> = HashMap::new();
    dist.insert(group.identity(), (0, None));
    let mut frontier = vec![group.identity()];
    let mut d = 0usize;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for e in &frontier {
            for (c, (g, h)) in comms {
                let p = e.mul(c)?;
                if !dist.contains_key(&p) {
                    if dist.len() >= cap {
                        return Err(Error::ResourceLimit(format!(
                            "commutator search exceeded cap {cap}"
                        )));
                    }
                    dist.insert(p.clone(), (d, Some((e.clone(), g.clone(), h.clone()))));
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    Ok(dist)
}

fn witness_from_parents(
    dist: &HashMap<Element, (usize, Option<(Element, Element, Element)>)>,
    x: &Element,
) -> Vec<(Element, Element)> {
    let mut pairs = Vec::new();
    let mut cur = x.clone();
    while let Some((_, Some((prev, g, h)))) = dist.get(&cur) {
        pairs.push((g.clone(), h.clone()));
        cur = prev.clone();
    }
    pairs.reverse();
    pairs
}

/// Mixed commutator length of x: least n with x a product of n
/// commutators [g,h], h ∈ N. Exact on finite groups; bounded search with
/// honest `UpperBound`/`NotFound` labels elsewhere.
pub fn cl_mixed(ctx: &GroupContext, x: &Element, cfg: &SearchConfig) -> Result<ClResult> {
    if x.group() != ctx.group() {
        return Err(Error::GroupMismatch);
    }
    if x.is_identity() {
        return Ok(ClResult::exact(0, Vec::new()));
    }
    if let Some(order) = ctx.group().order() {
        if order <= cfg.element_cap {
            return cl_mixed_finite(ctx, x, cfg);
        }
    }
    cl_mixed_search(ctx, x, cfg)
}

fn cl_mixed_finite(ctx: &GroupContext, x: &Element, cfg: &SearchConfig) -> Result<ClResult> {
    let elems = ctx.group().elements()?;
    let mut normal = Vec::new();
    for e in &elems {
        if ctx.in_normal_subgroup(e)? {
            normal.push(e.clone());
        }
    }
    let comms = commutator_generators(&elems, &normal)?;
    let dist = bfs_distances(ctx.group(), &comms, cfg.element_cap)?;
    match dist.get(x) {
        None => Ok(ClResult::not_found()),
        Some((d, _)) => {
            let witness = witness_from_parents(&dist, x);
            let res = ClResult::exact(*d, witness);
            res.verify(ctx, x)?;
            Ok(res)
        }
    }
}

fn cl_mixed_search(ctx: &GroupContext, x: &Element, cfg: &SearchConfig) -> Result<ClResult> {
    let ball = ctx.group().ball(cfg.ball_radius, cfg.element_cap)?;
    let mut normal = Vec::new();
    for e in &ball {
        if ctx.in_normal_subgroup(e)? {
            normal.push(e.clone());
        }
    }
    let comms = commutator_generators(&ball, &normal)?;
    let depth = if cfg.meet_in_middle {
        cfg.max_factors.div_ceil(2)
    } else {
        cfg.max_factors
    };
    // Bounded BFS with parents.
    let mut dist: HashMap<Element, (usize, Option<(Element, Element, Element)>)> = HashMap::new();
    dist.insert(ctx.group().identity(), (0, None));
    let mut frontier = vec![ctx.group().identity()];
    for d in 1..=depth {
        let mut next = Vec::new();
        for e in &frontier {
            for (c, (g, h)) in &comms {
                let p = e.mul(c)?;
                if !dist.contains_key(&p) {
                    if dist.len() >= cfg.element_cap {
                        return Err(Error::ResourceLimit(format!(
                            "commutator search exceeded cap {}",
                            cfg.element_cap
                        )));
                    }
                    dist.insert(p.clone(), (d, Some((e.clone(), g.clone(), h.clone()))));
                    next.push(p);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    if !cfg.meet_in_middle {
        return Ok(match dist.get(x) {
            Some(_) => {
                let witness = witness_from_parents(&dist, x);
                let res = ClResult::upper(witness.len(), witness);
                res.verify(ctx, x)?;
                res
            }
            None => ClResult::not_found(),
        });
    }
    // x = u·v with both halves in the table; scan u in shortlex order for
    // determinism and keep the least total length.
    let mut best: Option<(usize, Element)> = None;
    let mut keys: Vec<&Element> = dist.keys().collect();
    keys.sort();
    for u in keys {
        let (du, _) = dist[u];
        let v = u.inv().mul(x)?;
        if let Some((dv, _)) = dist.get(&v) {
            let total = du + dv;
            if best.as_ref().map_or(true, |(b, _)| total < *b) {
                best = Some((total, u.clone()));
            }
        }
    }
    match best {
        None => Ok(ClResult::not_found()),
        Some((total, u)) => {
            let mut witness = witness_from_parents(&dist, &u);
            witness.extend(witness_from_parents(&dist, &u.inv().mul(x)?));
            let res = ClResult::upper(total, witness);
            res.verify(ctx, x)?;
            Ok(res)
        }
    }
}

/// Plain commutator length: N = G.
pub fn cl_plain(group: &Group, x: &Element, cfg: &SearchConfig) -> Result<ClResult> {
    let ctx = GroupContext::trivial(group.clone())?;
    let x = ctx.group().canonicalize(x.word())?;
    cl_mixed(&ctx, &x, cfg)
}

/// Lower bound for the mixed commutator length from a homogeneous
/// invariant quasimorphism: any product of m commutators has |f| at most
/// (2m−1)·D(f), so m ≥ (|f(x)|/D + 1)/2 rounded up.
pub fn cl_lower_from_qm(defect_upper: &Rational, f_at_x: &Rational) -> Result<BigInt> {
    if !defect_upper.is_positive() {
        return Err(Error::NonpositiveDefect);
    }
    let bound = (f_at_x.abs() / defect_upper + Rational::one()) / Rational::from(BigInt::from(2));
    Ok(bound.ceil().to_integer())
}

/// Certified two-sided report for the stable mixed commutator length.
#[derive(Debug, Clone)]
pub struct SclReport {
    pub lower: Rational,
    pub upper: Option<Rational>,
    /// (power n, result for xⁿ) for each requested power.
    pub power_results: Vec<(u32, ClResult)>,
    /// True when the upper bound came from an exact finite computation.
    pub upper_exact_cl: bool,
}

/// Upper bounds scl from cl(xⁿ)/n over the given powers (valid since
/// cl(x^{m+n}) ≤ cl(x^m) + cl(x^n), so the limit is the infimum); the
/// lower bound is the caller's best quasimorphism certificate, if any.
pub fn scl_mixed_report(
    ctx: &GroupContext,
    x: &Element,
    cfg: &SearchConfig,
    powers: &[u32],
    qm_lower: Option<Rational>,
) -> Result<SclReport> {
    let mut upper: Option<Rational> = None;
    let mut upper_exact = false;
    let mut power_results = Vec::new();
    for &n in powers {
        if n == 0 {
            continue;
        }
        let xn = x.pow(n as i64);
        let res = cl_mixed(ctx, &xn, cfg)?;
        if let Some(v) = res.value {
            let bound = Rational::new(BigInt::from(v), BigInt::from(n));
            if upper.as_ref().map_or(true, |u| bound < *u) {
                upper = Some(bound);
                upper_exact = res.kind == ClKind::Exact;
            }
        }
        power_results.push((n, res));
    }
    let lower = qm_lower.unwrap_or_else(Rational::zero);
    if let Some(u) = &upper {
        if lower > *u {
            return Err(Error::PreconditionViolated(format!(
                "certified lower bound {lower} exceeds upper bound {u}"
            )));
        }
    }
    Ok(SclReport { lower, upper, power_results, upper_exact_cl: upper_exact })
}

/// Rewrites ∏[fᵢ,gᵢ]·(∏[αᵢ,βᵢ])⁻¹ as a product of 3k mixed commutators,
/// given q(fᵢ) = q(αᵢ) and q(gᵢ) = q(βᵢ). For a single quadruple, with
/// h₁ = α⁻¹f and h₂ = β⁻¹g (both in N):
///
///   [f,g][α,β]⁻¹ = (αβ)·[β⁻¹,h₁][h₁,h₂][h₂,α⁻¹]·(αβ)⁻¹,
///
/// and the third factor is put into mixed form via
/// [h₂,α⁻¹] = [h₂α⁻¹, h₂⁻¹]. Induction peels quadruples off the front.
pub fn rewrite_matched_commutator_products(
    ctx: &GroupContext,
    quads: &[(Element, Element, Element, Element)],
) -> Result<(Element, usize, Vec<(Element, Element)>)> {
    let q = ctx.quotient();
    for (f, g, alpha, beta) in quads {
        if q.eval(f)? != q.eval(alpha)? || q.eval(g)? != q.eval(beta)? {
            return Err(Error::PreconditionViolated(
                "quotient images of the paired entries must agree".into(),
            ));
        }
    }
    let id = ctx.group().identity();
    let mut fg_prod = id.clone();
    let mut ab_prod = id.clone();
    for (f, g, alpha, beta) in quads {
        fg_prod = fg_prod.mul(&f.commutator(g)?)?;
        ab_prod = ab_prod.mul(&alpha.commutator(beta)?)?;
    }
    let y = fg_prod.mul(&ab_prod.inv())?;
    if !ctx.in_normal_subgroup(&y)? {
        return Err(Error::PreconditionViolated("rewritten product left the kernel".into()));
    }

    // y_k = (P_{k-1} · c_k · P_{k-1}⁻¹) · y_{k-1} with c_k the 3-commutator
    // rewrite of [f_k,g_k][α_k,β_k]⁻¹ and P the running [f,g] prefix.
    let mut witness: Vec<(Element, Element)> = Vec::new();
    let mut prefix_stack = Vec::new();
    let mut p = id.clone();
    for (f, g, _, _) in quads.iter().take(quads.len().saturating_sub(1)) {
        p = p.mul(&f.commutator(g)?)?;
        prefix_stack.push(p.clone());
    }
    for (k, (f, g, alpha, beta)) in quads.iter().enumerate().rev() {
        let conj = if k == 0 { id.clone() } else { prefix_stack[k - 1].clone() };
        let h1 = alpha.inv().mul(f)?;
        let h2 = beta.inv().mul(g)?;
        let w = alpha.mul(beta)?;
        let base_pairs = [
            (beta.inv(), h1.clone()),
            (h1.clone(), h2.clone()),
            (h2.mul(&alpha.inv())?, h2.inv()),
        ];
        let mut block = Vec::new();
        for (u, v) in base_pairs {
            let cu = conj.mul(&w)?.conj(&u)?;
            let cv = conj.mul(&w)?.conj(&v)?;
            block.push((cu, cv));
        }
        witness.extend(block);
    }

    // The witness must reproduce y exactly.
    let mut prod = id;
    for (u, v) in &witness {
        if !ctx.in_normal_subgroup(v)? {
            return Err(Error::NonNormalArgument);
        }
        prod = prod.mul(&u.commutator(v)?)?;
    }
    if prod != y {
        return Err(Error::ProductMismatch);
    }
    Ok((y, 3 * quads.len(), witness))
}

/// In a finite group W, any sequence of #W elements has a contiguous
/// window with trivial product; found by a prefix-product collision.
/// Returns 1-based (i, j) with wᵢ·…·wⱼ = e.
pub fn pigeonhole_window(w_group: &Group, ws: &[Element]) -> Result<(usize, usize)> {
    let order = w_group
        .order()
        .ok_or_else(|| Error::PreconditionViolated("pigeonhole needs a finite group".into()))?;
    if ws.len() != order {
        return Err(Error::PreconditionViolated(format!(
            "need exactly {order} elements, got {}",
            ws.len()
        )));
    }
    let mut prefixes: HashMap<Element, usize> = HashMap::new();
    let mut p = w_group.identity();
    prefixes.insert(p.clone(), 0);
    for (idx, w) in ws.iter().enumerate() {
        p = p.mul(w)?;
        if let Some(&start) = prefixes.get(&p) {
            return Ok((start + 1, idx + 1));
        }
        prefixes.insert(p.clone(), idx + 1);
    }
    unreachable!("{} prefixes in a group of order {} must collide", order + 1, order);
}

/// Strips a central, quotient-compatible part from β: returns b = t(β)⁻¹β
/// and checks the commutator identity [α,β] = [α,b] as elements.
/// Centrality of t(β) is verified against every group generator.
pub fn central_section_reduce(
    ctx: &GroupContext,
    alpha: &Element,
    beta: &Element,
    t_of_beta: &Element,
) -> Result<Element> {
    for i in 0..ctx.group().spec().gen_count() {
        let gen = ctx.group().generator(i)?;
        if gen.mul(t_of_beta)? != t_of_beta.mul(&gen)? {
            return Err(Error::CentralityViolated(format!(
                "t(β) fails to commute with generator {gen}"
            )));
        }
    }
    let q = ctx.quotient();
    if q.eval(t_of_beta)? != q.eval(beta)? {
        return Err(Error::PreconditionViolated(
            "t(β) must have the same quotient image as β".into(),
        ));
    }
    let b = t_of_beta.inv().mul(beta)?;
    if alpha.commutator(beta)? != alpha.commutator(&b)? {
        return Err(Error::CentralityViolated(
            "commutator changed after stripping the central part".into(),
        ));
    }
    Ok(b)
}

/// Data attached to a set-theoretic section s: Q → G of the quotient map.
#[derive(Debug, Clone)]
pub struct SectionData {
    /// (q, s(q)) pairs in shortlex order on Q.
    pub section: Vec<(Element, Element)>,
    pub generated_subgroup: Vec<Element>,
    pub ms: usize,
    pub cs: Rational,
}

/// Computes the subgroup G(s) = ⟨s(Q)⟩, the size M(s) of
/// W(s) = [G(s),G(s)] / ([G(s),G(s)] ∩ [G,N]), and the constant
///
///   C(s) = max { cl(∏ᵢ [αᵢ,βᵢ]) / k : 1 ≤ k ≤ M(s), αᵢ,βᵢ ∈ s(Q),
///                ∏ᵢ [αᵢ,βᵢ] ∈ [G,N] },
///
/// then verifies cl_{G,N}(x) ≤ (C(s)+3)·cl_G(x) on all of [G,N].
/// G must be finite; tuple enumeration is cut off by `tuple_budget`.
pub fn compute_section_constants(
    ctx: &GroupContext,
    section: &BTreeMap<Element, Element>,
    tuple_budget: usize,
) -> Result<SectionData> {
    let group = ctx.group();
    if group.order().is_none() {
        return Err(Error::ResourceLimit("section constants need a finite group".into()));
    }
    let q_elems = ctx.quotient_group().elements()?;
    let mut s_images = Vec::new();
    for qe in &q_elems {
        let img = section
            .get(qe)
            .ok_or_else(|| Error::MissingValue(format!("section value at {qe}")))?;
        if &ctx.quotient().eval(img)? != qe {
            return Err(Error::PreconditionViolated(format!(
                "section value at {qe} does not project back"
            )));
        }
        if qe.is_identity() && !img.is_identity() {
            return Err(Error::PreconditionViolated(
                "section must send the identity to the identity".into(),
            ));
        }
        s_images.push(img.clone());
    }
    let cap = crate::DEFAULT_ELEMENT_CAP;
    let gs = subgroup_closure(group, &s_images, cap)?;
    let gs_comm = commutator_subgroup(group, &gs, &gs, cap)?;

    let elems = group.elements()?;
    let mut normal = Vec::new();
    for e in &elems {
        if ctx.in_normal_subgroup(e)? {
            normal.push(e.clone());
        }
    }
    let gn = commutator_subgroup(group, &elems, &normal, cap)?;
    let inter: Vec<Element> = gs_comm.iter().filter(|e| gn.binary_search(e).is_ok()).cloned().collect();
    let ms = gs_comm.len() / inter.len();

    // Exact mixed distances once, reused for C(s) and the final sweep.
    let comms = commutator_generators(&elems, &normal)?;
    let mixed_dist = bfs_distances(group, &comms, cap)?;

    // All commutators of section-image pairs, with multiplicity collapsed.
    let mut pair_comms = Vec::new();
    for a in &s_images {
        for b in &s_images {
            pair_comms.push(a.commutator(b)?);
        }
    }
    pair_comms.sort();
    pair_comms.dedup();

    let mut cs = Rational::zero();
    let mut budget = tuple_budget;
    // DFS over tuples of length ≤ M(s). Tuples with a proper prefix
    // already in [G,N] split into shorter ones and cannot raise the max.
    fn dfs(
        prods: &[Element],
        gn: &[Element],
        mixed_dist: &HashMap<Element, (usize, Option<(Element, Element, Element)>)>,
        current: Element,
        depth: usize,
        max_depth: usize,
        prefix_split: bool,
        cs: &mut Rational,
        budget: &mut usize,
    ) -> Result<()> {
        if depth > 0 && gn.binary_search(&current).is_ok() {
            if !prefix_split {
                if let Some((d, _)) = mixed_dist.get(&current) {
                    let ratio = Rational::new(BigInt::from(*d), BigInt::from(depth));
                    if ratio > *cs {
                        *cs = ratio;
                    }
                }
            }
            if depth == max_depth {
                return Ok(());
            }
            // Deeper tuples through this point are split by the prefix.
            for c in prods {
                if *budget == 0 {
                    return Err(Error::ResourceLimit("section-constant tuple budget".into()));
                }
                *budget -= 1;
                dfs(prods, gn, mixed_dist, current.mul(c)?, depth + 1, max_depth, true, cs, budget)?;
            }
            return Ok(());
        }
        if depth == max_depth {
            return Ok(());
        }
        for c in prods {
            if *budget == 0 {
                return Err(Error::ResourceLimit("section-constant tuple budget".into()));
            }
            *budget -= 1;
            dfs(
                prods,
                gn,
                mixed_dist,
                current.mul(c)?,
                depth + 1,
                max_depth,
                prefix_split,
                cs,
                budget,
            )?;
        }
        Ok(())
    }
    dfs(
        &pair_comms,
        &gn,
        &mixed_dist,
        group.identity(),
        0,
        ms,
        false,
        &mut cs,
        &mut budget,
    )?;

    // Verify the comparison inequality on all of [G,N].
    let plain_comms = commutator_generators(&elems, &elems)?;
    let plain_dist = bfs_distances(group, &plain_comms, cap)?;
    let factor = &cs + Rational::from(BigInt::from(3));
    for x in &gn {
        let md = mixed_dist
            .get(x)
            .map(|(d, _)| *d)
            .ok_or_else(|| Error::PreconditionViolated("element of [G,N] unreachable".into()))?;
        let pd = plain_dist
            .get(x)
            .map(|(d, _)| *d)
            .ok_or_else(|| Error::PreconditionViolated("element of [G,N] outside [G,G]".into()))?;
        if Rational::from(BigInt::from(md)) > &factor * Rational::from(BigInt::from(pd)) {
            return Err(Error::PreconditionViolated(format!(
                "comparison inequality fails at {x}: {md} > (C+3)·{pd}"
            )));
        }
    }

    Ok(SectionData {
        section: q_elems.into_iter().zip(s_images).collect(),
        generated_subgroup: gs,
        ms,
        cs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat;

    #[test]
    fn identity_is_exact_zero() {
        let ctx = fixtures::d4_rotation_context().unwrap();
        let res = cl_mixed(&ctx, &ctx.group().identity(), &SearchConfig::default()).unwrap();
        assert_eq!(res.kind, ClKind::Exact);
        assert_eq!(res.value, Some(0));
    }

    #[test]
    fn d4_r2_is_one_mixed_commutator() {
        let ctx = fixtures::d4_rotation_context().unwrap();
        let r2 = ctx.group().parse("r2").unwrap();
        let res = cl_mixed(&ctx, &r2, &SearchConfig::default()).unwrap();
        assert_eq!(res.kind, ClKind::Exact);
        assert_eq!(res.value, Some(1));
        res.verify(&ctx, &r2).unwrap();
        // [G,N] = {e, r²}: everything else is unreachable.
        let r = ctx.group().parse("r").unwrap();
        let res = cl_mixed(&ctx, &r, &SearchConfig::default()).unwrap();
        assert_eq!(res.kind, ClKind::NotFound);
    }

    #[test]
    fn free_commutator_upper_bounds() {
        let g = fixtures::free2();
        let x = g.parse("[a,b]").unwrap();
        let cfg = SearchConfig { ball_radius: 1, max_factors: 2, ..Default::default() };
        let res = cl_plain(&g, &x, &cfg).unwrap();
        assert_eq!(res.kind, ClKind::UpperBound);
        assert_eq!(res.value, Some(1));

        let x2 = g.parse("[a,b]^2").unwrap();
        let cfg = SearchConfig { ball_radius: 3, max_factors: 2, ..Default::default() };
        let res = cl_plain(&g, &x2, &cfg).unwrap();
        res.verify(&GroupContext::trivial(g).unwrap(), &x2).unwrap();
        assert_eq!(res.value, Some(2));
    }

    #[test]
    fn qm_lower_bound_arithmetic() {
        assert_eq!(cl_lower_from_qm(&rat(1, 1), &rat(0, 1)).unwrap(), BigInt::from(1));
        assert_eq!(cl_lower_from_qm(&rat(1, 1), &rat(3, 1)).unwrap(), BigInt::from(2));
        assert!(cl_lower_from_qm(&rat(0, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn scl_report_finite_collapses() {
        let ctx = fixtures::d4_rotation_context().unwrap();
        let r2 = ctx.group().parse("r2").unwrap();
        let rep =
            scl_mixed_report(&ctx, &r2, &SearchConfig::default(), &[1, 2], None).unwrap();
        // r² squares to e, so the n = 2 term gives upper bound 0.
        assert_eq!(rep.upper, Some(rat(0, 1)));
        assert_eq!(rep.lower, rat(0, 1));
    }

    #[test]
    fn rewrite_empty_and_equal_pairs() {
        let ctx = fixtures::f2_swap_context().unwrap();
        let (y, bound, w) = rewrite_matched_commutator_products(&ctx, &[]).unwrap();
        assert!(y.is_identity());
        assert_eq!(bound, 0);
        assert!(w.is_empty());

        let g = ctx.group();
        let f = g.parse("z a").unwrap();
        let h = g.parse("b z").unwrap();
        let (y, bound, w) =
            rewrite_matched_commutator_products(&ctx, &[(f.clone(), h.clone(), f, h)]).unwrap();
        assert!(y.is_identity());
        assert_eq!(bound, 3);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn rewrite_nontrivial_instance() {
        let ctx = fixtures::f2_swap_context().unwrap();
        let g = ctx.group();
        let alpha = g.parse("z").unwrap();
        let beta = g.parse("a z b").unwrap();
        let f = g.parse("a b z").unwrap(); // same quotient image as α
        let gg = g.parse("b a z a").unwrap(); // same quotient image as β
        let (y, bound, w) = rewrite_matched_commutator_products(&ctx, &[(f, gg, alpha, beta)]).unwrap();
        assert!(ctx.in_normal_subgroup(&y).unwrap());
        assert_eq!(bound, 3);
        assert!(w.len() <= 3);
    }

    #[test]
    fn pigeonhole_examples() {
        let w = fixtures::cyclic(2, "z");
        let one = w.parse("z").unwrap();
        assert_eq!(pigeonhole_window(&w, &[one.clone(), one]).unwrap(), (1, 2));
        let w3 = fixtures::cyclic(3, "c");
        let c = w3.parse("c").unwrap();
        assert_eq!(
            pigeonhole_window(&w3, &[c.clone(), c.clone(), c]).unwrap(),
            (1, 3)
        );
        let e = w3.identity();
        assert_eq!(
            pigeonhole_window(&w3, &[e.clone(), e.clone(), e]).unwrap(),
            (1, 1)
        );
    }

    #[test]
    fn section_constants_d4() {
        let ctx = fixtures::d4_rotation_context().unwrap();
        let q = ctx.quotient_group();
        let mut section = BTreeMap::new();
        section.insert(q.identity(), ctx.group().identity());
        section.insert(q.parse("t").unwrap(), ctx.group().parse("s").unwrap());
        let data = compute_section_constants(&ctx, &section, 1_000_000).unwrap();
        // ⟨e, s⟩ is abelian, so W(s) is trivial and C(s) = 0.
        assert_eq!(data.ms, 1);
        assert_eq!(data.cs, rat(0, 1));
        assert_eq!(data.generated_subgroup.len(), 2);
    }
}
