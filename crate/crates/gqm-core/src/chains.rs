//! Sparse exact-rational chains over group-element pairs, the boundary
//! map ∂(g₁,g₂) = g₂ − g₁g₂ + g₁, and the restricted ℓ¹ filling norm as
//! an exact LP with primal and dual certificates.
//!
//! Admissible pairs have a coordinate in the normal subgroup N; the
//! filling norm of x is the least ℓ¹ mass of a 2-chain with boundary x,
//! restricted to a finite support of admissible pairs. Restricted values
//! are upper bounds on the true norm and shrink as the support grows.

use crate::error::{Error, Result};
use crate::group::Element;
use crate::hom::GroupContext;
use crate::simplex::{self, LpProblem};
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// An ordered pair of group elements generating the 2-chain module.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pair2 {
    pub first: Element,
    pub second: Element,
}

impl Pair2 {
    pub fn new(first: Element, second: Element) -> Self {
        Pair2 { first, second }
    }

    /// A pair is admissible when either coordinate lies in N.
    pub fn admissible(&self, ctx: &GroupContext) -> Result<bool> {
        Ok(ctx.in_normal_subgroup(&self.first)? || ctx.in_normal_subgroup(&self.second)?)
    }
}

impl std::fmt::Display for Pair2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// Sparse rational 1-chain on group elements.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain1 {
    pub terms: BTreeMap<Element, Rational>,
}

impl Chain1 {
    pub fn zero() -> Self {
        Chain1::default()
    }

    pub fn single(x: Element) -> Self {
        let mut c = Chain1::zero();
        c.add(x, Rational::one());
        c
    }

    pub fn add(&mut self, x: Element, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(x).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn l1(&self) -> Rational {
        self.terms.values().map(|v| v.abs()).sum()
    }
}

/// Sparse rational 2-chain on admissible pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain2 {
    pub terms: BTreeMap<Pair2, Rational>,
}

impl Chain2 {
    pub fn zero() -> Self {
        Chain2::default()
    }

    pub fn add(&mut self, p: Pair2, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(p.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn l1(&self) -> Rational {
        self.terms.values().map(|v| v.abs()).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|v| v.is_integer())
    }

    /// Every pair admissible for the context.
    pub fn check_admissible(&self, ctx: &GroupContext) -> Result<()> {
        for p in self.terms.keys() {
            if !p.admissible(ctx)? {
                return Err(Error::PreconditionViolated(format!(
                    "pair {p} has no coordinate in the normal subgroup"
                )));
            }
        }
        Ok(())
    }
}

/// Linear extension of ∂(g₁,g₂) = g₂ − g₁g₂ + g₁.
pub fn boundary2(c: &Chain2) -> Result<Chain1> {
    let mut out = Chain1::zero();
    for (p, coeff) in &c.terms {
        let prod = p.first.mul(&p.second)?;
        out.add(p.second.clone(), coeff.clone());
        out.add(prod, -coeff.clone());
        out.add(p.first.clone(), coeff.clone());
    }
    Ok(out)
}

/// The 3-term chain ([g,h], hg) − (g,h) + (h,g), whose boundary is the
/// single commutator [g,h]. Shows that a commutator has filling norm ≤ 3.
pub fn witness_commutator_chain(ctx: &GroupContext, g: &Element, h: &Element) -> Result<Chain2> {
    if !ctx.in_normal_subgroup(h)? {
        return Err(Error::PreconditionViolated(
            "second commutator argument must lie in the normal subgroup".into(),
        ));
    }
    let comm = g.commutator(h)?;
    let hg = h.mul(g)?;
    let mut c = Chain2::zero();
    c.add(Pair2::new(comm, hg), Rational::one());
    c.add(Pair2::new(g.clone(), h.clone()), -Rational::one());
    c.add(Pair2::new(h.clone(), g.clone()), Rational::one());
    Ok(c)
}

/// Product-closed admissible support: all admissible pairs (g₁,g₂) with
/// g₁, g₂ and g₁g₂ in the radius ball enlarged by `extras`. Closure under
/// products keeps the LP row count proportional to the vertex set while
/// still containing every witness chain whose elements fit in the set.
pub fn support_in_ball(
    ctx: &GroupContext,
    radius: usize,
    extras: &[Element],
    cap: usize,
) -> Result<Vec<Pair2>> {
    let mut verts = ctx.group().ball(radius, cap)?;
    for x in extras {
        if !verts.contains(x) {
            verts.push(x.clone());
        }
    }
    verts.sort();
    verts.dedup();
    let mut out = Vec::new();
    for g1 in &verts {
        for g2 in &verts {
            let p = Pair2::new(g1.clone(), g2.clone());
            if !p.admissible(ctx)? {
                continue;
            }
            if verts.binary_search(&g1.mul(g2)?).is_ok() {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// All admissible pairs of a finite group.
pub fn full_finite_support(ctx: &GroupContext) -> Result<Vec<Pair2>> {
    let elems = ctx.group().elements()?;
    let mut out = Vec::new();
    for g1 in &elems {
        for g2 in &elems {
            let p = Pair2::new(g1.clone(), g2.clone());
            if p.admissible(ctx)? {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Result of a restricted filling-norm LP.
#[derive(Debug, Clone)]
pub struct FillResult {
    pub value: Rational,
    pub witness: Chain2,
    pub dual: BTreeMap<Element, Rational>,
    pub support: Vec<Pair2>,
}

fn boundary_rows(support: &[Pair2], target: &Chain1) -> Result<Vec<Element>> {
    let mut rows: std::collections::BTreeSet<Element> = target.terms.keys().cloned().collect();
    for p in support {
        rows.insert(p.first.clone());
        rows.insert(p.second.clone());
        rows.insert(p.first.mul(&p.second)?);
    }
    Ok(rows.into_iter().collect())
}

fn pair_column(p: &Pair2, row_of: &BTreeMap<Element, usize>) -> Result<Vec<(usize, Rational)>> {
    let mut col: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut push = |e: Element, v: Rational| {
        let r = row_of[&e];
        let entry = col.entry(r).or_insert_with(Rational::zero);
        *entry += v;
    };
    push(p.second.clone(), Rational::one());
    push(p.first.mul(&p.second)?, -Rational::one());
    push(p.first.clone(), Rational::one());
    Ok(col.into_iter().filter(|(_, v)| !v.is_zero()).collect())
}

/// Minimizes the ℓ¹ mass of a chain on `support` with boundary `target`,
/// exactly. The value is an upper bound on the unrestricted norm and is
/// nonincreasing under support enlargement. The dual vector satisfies
/// |y(g₂) − y(g₁g₂) + y(g₁)| ≤ 1 on every support pair and pairs with the
/// target to the optimal value (strong duality, checked exactly).
pub fn fill_norm_lp(ctx: &GroupContext, target: &Chain1, support: &[Pair2]) -> Result<FillResult> {
    for p in support {
        if !p.admissible(ctx)? {
            return Err(Error::PreconditionViolated(format!("inadmissible support pair {p}")));
        }
    }
    if target.is_zero() && support.is_empty() {
        return Ok(FillResult {
            value: Rational::zero(),
            witness: Chain2::zero(),
            dual: BTreeMap::new(),
            support: Vec::new(),
        });
    }
    let rows = boundary_rows(support, target)?;
    let row_of: BTreeMap<Element, usize> =
        rows.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    // Split coefficients: variable 2k is the positive part of pair k,
    // variable 2k+1 the negative part; objective is the sum of both.
    let mut columns = Vec::with_capacity(2 * support.len());
    for p in support {
        let col = pair_column(p, &row_of)?;
        let neg: Vec<(usize, Rational)> = col.iter().map(|(r, v)| (*r, -v.clone())).collect();
        columns.push(col);
        columns.push(neg);
    }
    let mut rhs = vec![Rational::zero(); rows.len()];
    for (e, v) in &target.terms {
        rhs[row_of[e]] = v.clone();
    }
    let lp = LpProblem { costs: vec![Rational::one(); 2 * support.len()], columns, rhs };
    let sol = simplex::solve(&lp, 200_000)?;
    let mut witness = Chain2::zero();
    for (k, p) in support.iter().enumerate() {
        let net = &sol.primal[2 * k] - &sol.primal[2 * k + 1];
        witness.add(p.clone(), net);
    }
    if &boundary2(&witness)? != target {
        return Err(Error::BoundaryMismatch);
    }
    let dual: BTreeMap<Element, Rational> =
        rows.iter().cloned().zip(sol.dual.iter().cloned()).collect();
    Ok(FillResult { value: sol.objective, witness, dual, support: support.to_vec() })
}

/// Checks a dual vector: feasibility of every support constraint and the
/// pairing with the target. Feasible duals lower-bound the restricted LP.
pub fn verify_dual_certificate(
    _ctx: &GroupContext,
    dual: &BTreeMap<Element, Rational>,
    support: &[Pair2],
    target: &Chain1,
) -> Result<(bool, Rational)> {
    let get = |e: &Element| -> Result<Rational> {
        dual.get(e)
            .cloned()
            .ok_or_else(|| Error::MissingValue(format!("dual value for {e}")))
    };
    let mut feasible = true;
    for p in support {
        let v = get(&p.second)? - get(&p.first.mul(&p.second)?)? + get(&p.first)?;
        if v.abs() > Rational::one() {
            feasible = false;
        }
    }
    let mut objective = Rational::zero();
    for (e, c) in &target.terms {
        objective += get(e)? * c;
    }
    Ok((feasible, objective))
}

/// Minimal ℓ¹ mass over *integer* chains with boundary x on the support,
/// by branch and bound over the LP relaxation.
pub fn integral_fill_norm(
    ctx: &GroupContext,
    x: &Element,
    support: &[Pair2],
    node_budget: usize,
) -> Result<(BigInt, Chain2)> {
    if x.is_identity() {
        return Ok((BigInt::zero(), Chain2::zero()));
    }
    let target = Chain1::single(x.clone());
    // The LP relaxation seeds the search: its ceiling is the first mass
    // level that can possibly carry an integer chain, and its
    // infeasibility settles infeasibility outright.
    let lp = fill_norm_lp(ctx, &target, support)?;
    if lp.witness.is_integral() {
        return Ok((lp.value.to_integer(), lp.witness));
    }
    let start: BigInt = lp.value.ceil().to_integer().max(BigInt::one());
    let start = usize::try_from(&start)
        .map_err(|_| Error::ResourceLimit("relaxation value out of range".into()))?;

    // Signed unit columns as sparse boundary increments.
    let mut columns: Vec<(usize, i8, BTreeMap<Element, BigInt>)> = Vec::new();
    for (k, p) in support.iter().enumerate() {
        let mut col: BTreeMap<Element, BigInt> = BTreeMap::new();
        for (e, sign) in [
            (p.second.clone(), 1),
            (p.first.mul(&p.second)?, -1),
            (p.first.clone(), 1),
        ] {
            *col.entry(e).or_default() += BigInt::from(sign);
        }
        col.retain(|_, v| !v.is_zero());
        let neg: BTreeMap<Element, BigInt> = col.iter().map(|(e, v)| (e.clone(), -v)).collect();
        columns.push((k, 1, col));
        columns.push((k, -1, neg));
    }

    // LP feasibility over ℚ does not imply an integer chain exists;
    // decide lattice feasibility exactly via Smith normal form of the
    // boundary matrix before searching, so the level loop below only
    // runs when it terminates.
    {
        let row_index: BTreeMap<Element, usize> = columns
            .iter()
            .flat_map(|(_, _, col)| col.keys().cloned())
            .chain(target.terms.keys().cloned())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut a = crate::abelian::IntMatrix::zero(row_index.len(), support.len());
        for (k, sign, col) in &columns {
            if *sign < 0 {
                continue;
            }
            for (e, v) in col {
                a[(row_index[e], *k)] = v.clone();
            }
        }
        let (d, u, _) = crate::abelian::smith_normal_form(&a);
        let mut b = vec![BigInt::zero(); row_index.len()];
        for (e, v) in &target.terms {
            b[row_index[e]] = v.to_integer();
        }
        for i in 0..row_index.len() {
            let y: BigInt = (0..row_index.len()).map(|j| &u[(i, j)] * &b[j]).sum();
            let divisible = if i < support.len() && !d[(i, i)].is_zero() {
                (&y % &d[(i, i)]).is_zero()
            } else {
                y.is_zero()
            };
            if !divisible {
                return Err(Error::Infeasible);
            }
        }
    }

    // Depth-first cover of the residual boundary, one unit of mass per
    // step, branching over the signed pairs that touch the residual's
    // least element. Each unit changes the residual's mass by at most 3,
    // which gives the admissible pruning bound.
    struct Search<'a> {
        columns: &'a [(usize, i8, BTreeMap<Element, BigInt>)],
        nodes: usize,
        budget: usize,
    }
    impl Search<'_> {
        fn dive(
            &mut self,
            residual: &mut BTreeMap<Element, BigInt>,
            remaining: usize,
            chosen: &mut Vec<(usize, i8)>,
        ) -> Result<bool> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::ResourceLimit(format!(
                    "integral norm branch-and-bound exceeded {} nodes",
                    self.budget
                )));
            }
            if residual.is_empty() {
                return Ok(true);
            }
            let mass: BigInt = residual.values().map(|v| v.abs()).sum();
            if mass > BigInt::from(3 * remaining as i64) {
                return Ok(false);
            }
            let pivot = residual.keys().next().expect("nonempty").clone();
            for (k, sign, col) in self.columns {
                if !col.contains_key(&pivot) {
                    continue;
                }
                for (e, v) in col {
                    let entry = residual.entry(e.clone()).or_default();
                    *entry -= v;
                    if entry.is_zero() {
                        residual.remove(e);
                    }
                }
                chosen.push((*k, *sign));
                if self.dive(residual, remaining - 1, chosen)? {
                    return Ok(true);
                }
                chosen.pop();
                for (e, v) in col {
                    let entry = residual.entry(e.clone()).or_default();
                    *entry += v;
                    if entry.is_zero() {
                        residual.remove(e);
                    }
                }
            }
            Ok(false)
        }
    }

    let base_residual: BTreeMap<Element, BigInt> = target
        .terms
        .iter()
        .map(|(e, v)| (e.clone(), v.to_integer()))
        .collect();
    let mut search = Search { columns: &columns, nodes: 0, budget: node_budget };
    let mut level = start;
    loop {
        let mut residual = base_residual.clone();
        let mut chosen = Vec::new();
        if search.dive(&mut residual, level, &mut chosen)? {
            let mut witness = Chain2::zero();
            for (k, sign) in &chosen {
                witness.add(support[*k].clone(), Rational::from(BigInt::from(*sign)));
            }
            if boundary2(&witness)? != target {
                return Err(Error::BoundaryMismatch);
            }
            let value = witness.l1().to_integer();
            debug_assert!(Rational::from(value.clone()) >= lp.value);
            return Ok((value, witness));
        }
        level += 1;
    }
}

/// Upper bound on the stable mixed commutator length from one filling-norm
/// solve: scl(x) ≤ (‖xⁿ‖′ + 1)/(4n). Valid because aₙ = ‖xⁿ‖′ + 1 is
/// subadditive, the filling norm is its limit aₙ/n, and the stable length
/// is a quarter of the filling norm.
pub fn scl_upper_from_fill(
    ctx: &GroupContext,
    x: &Element,
    n: u32,
    support: &[Pair2],
) -> Result<Rational> {
    if n == 0 {
        return Err(Error::PreconditionViolated("power must be at least 1".into()));
    }
    let xn = x.pow(n as i64);
    let fill = fill_norm_lp(ctx, &Chain1::single(xn), support)?;
    Ok((fill.value + Rational::one()) / Rational::from(BigInt::from(4 * n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat;

    #[test]
    fn boundary_of_witness_is_commutator() {
        let ctx = GroupContext::trivial(fixtures::free2()).unwrap();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let c = witness_commutator_chain(&ctx, &g, &h).unwrap();
        assert_eq!(c.l1(), rat(3, 1));
        let b = boundary2(&c).unwrap();
        assert_eq!(b, Chain1::single(ctx.group().parse("[a,b]").unwrap()));
    }

    #[test]
    fn boundary_cancels_pair_difference() {
        let ctx = GroupContext::trivial(fixtures::free2()).unwrap();
        let a = ctx.group().parse("a").unwrap();
        let b = ctx.group().parse("b").unwrap();
        let mut c = Chain2::zero();
        c.add(Pair2::new(a.clone(), b.clone()), rat(1, 1));
        c.add(Pair2::new(a, b), rat(-1, 1));
        assert!(c.is_zero());
        assert!(boundary2(&c).unwrap().is_zero());
    }

    #[test]
    fn witness_chain_is_lp_feasible() {
        let ctx = GroupContext::trivial(fixtures::free2()).unwrap();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let comm = g.commutator(&h).unwrap();
        let chain = witness_commutator_chain(&ctx, &g, &h).unwrap();
        let support: Vec<Pair2> = chain.terms.keys().cloned().collect();
        let res = fill_norm_lp(&ctx, &Chain1::single(comm.clone()), &support).unwrap();
        assert!(res.value <= rat(3, 1));
        let (feasible, obj) =
            verify_dual_certificate(&ctx, &res.dual, &support, &Chain1::single(comm)).unwrap();
        assert!(feasible);
        assert_eq!(obj, res.value);
    }

    #[test]
    fn infeasible_outside_mixed_commutators() {
        // a itself is not a boundary: the quotient by N sees it.
        let ctx = fixtures::f2_swap_context().unwrap();
        let z = ctx.group().parse("z").unwrap();
        let support = support_in_ball(&ctx, 2, &[], 100_000).unwrap();
        let err = fill_norm_lp(&ctx, &Chain1::single(z), &support).unwrap_err();
        assert!(matches!(err, Error::Infeasible));
    }

    #[test]
    fn integral_matches_lp_on_commutator() {
        let ctx = GroupContext::trivial(fixtures::free2()).unwrap();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let comm = g.commutator(&h).unwrap();
        let chain = witness_commutator_chain(&ctx, &g, &h).unwrap();
        let support: Vec<Pair2> = chain.terms.keys().cloned().collect();
        let (v, w) = integral_fill_norm(&ctx, &comm, &support, 100).unwrap();
        assert_eq!(v, BigInt::from(3));
        assert!(w.is_integral());
    }

    #[test]
    fn finite_group_fill_r2() {
        let ctx = fixtures::d4_rotation_context().unwrap();
        let r2 = ctx.group().parse("r2").unwrap();
        let support = full_finite_support(&ctx).unwrap();
        let res = fill_norm_lp(&ctx, &Chain1::single(r2.clone()), &support).unwrap();
        // r² = [s,r] has mixed commutator length 1, so the norm is ≤ 3.
        assert!(res.value <= rat(3, 1));
        assert!(res.value > rat(0, 1));
        let (v, _) = integral_fill_norm(&ctx, &r2, &support, 50_000).unwrap();
        assert!(Rational::from(v) >= res.value);
    }
}
