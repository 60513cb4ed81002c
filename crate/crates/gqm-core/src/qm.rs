//! Quasimorphism calculus: counting quasimorphisms on free generators,
//! exact homogenization for counting patterns, sampled defect lower
//! bounds with witnesses, symmetrization, extensions from the normal
//! subgroup to the whole group, and duality lower bounds.
//!
//! Defect *upper* bounds are certified inputs supplied by the caller; the
//! code only ever computes witnessed lower bounds itself, so no empirical
//! supremum is silently promoted to a certificate.

use crate::error::{Error, Result};
use crate::group::{subgroup_closure, Element, Group};
use crate::hom::GroupContext;
use crate::word::{Letter, Word};
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(&Element) -> Result<Rational> + Send + Sync>;

#[derive(Clone)]
pub struct Quasimorphism {
    pub name: String,
    eval: Evaluator,
    /// Asserted by the constructor or caller, never inferred from samples.
    pub homogeneous: bool,
    pub g_invariant: bool,
    /// Caller-supplied certified upper bounds on D, D′ and D″.
    pub d_upper: Option<Rational>,
    pub dprime_upper: Option<Rational>,
    pub dpp_upper: Option<Rational>,
}

impl std::fmt::Debug for Quasimorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Quasimorphism")
            .field("name", &self.name)
            .field("homogeneous", &self.homogeneous)
            .field("g_invariant", &self.g_invariant)
            .field("d_upper", &self.d_upper)
            .finish()
    }
}

impl Quasimorphism {
    pub fn new(name: impl Into<String>, eval: Evaluator) -> Self {
        Quasimorphism {
            name: name.into(),
            eval,
            homogeneous: false,
            g_invariant: false,
            d_upper: None,
            dprime_upper: None,
            dpp_upper: None,
        }
    }

    pub fn eval(&self, x: &Element) -> Result<Rational> {
        (self.eval)(x)
    }

    pub fn with_d_upper(mut self, d: Rational) -> Self {
        self.d_upper = Some(d);
        self
    }

    pub fn asserted_homogeneous(mut self) -> Self {
        self.homogeneous = true;
        self
    }

    pub fn asserted_g_invariant(mut self) -> Self {
        self.g_invariant = true;
        self
    }
}

fn require_reduced(pattern: &Word) -> Result<()> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    for w in pattern.letters.windows(2) {
        if w[0].gen == w[1].gen && w[0].inv != w[1].inv {
            return Err(Error::PreconditionViolated("counting pattern must be reduced".into()));
        }
    }
    Ok(())
}

fn occurrences(haystack: &[Letter], needle: &[Letter]) -> i64 {
    if needle.is_empty() || haystack.len() < needle.len() {
        return 0;
    }
    let mut count = 0;
    for w in haystack.windows(needle.len()) {
        if w == needle {
            count += 1;
        }
    }
    count
}

/// Signed occurrence count of a pattern in a reduced letter sequence:
/// occurrences of the pattern minus occurrences of its inverse, with
/// overlapping occurrences counted.
pub fn count_signed(letters: &[Letter], pattern: &Word) -> i64 {
    let inv = pattern.inverse();
    occurrences(letters, &pattern.letters) - occurrences(letters, &inv.letters)
}

/// The counting quasimorphism of a reduced pattern, evaluated on the
/// canonical (reduced) word of an element. A homomorphism for
/// single-letter patterns.
pub fn counting_qm(pattern: &Word, names: &[String]) -> Result<Quasimorphism> {
    require_reduced(pattern)?;
    let pat = pattern.clone();
    let name = format!("count[{}]", pattern.display(names));
    Ok(Quasimorphism::new(
        name,
        Arc::new(move |x: &Element| {
            Ok(Rational::from(BigInt::from(count_signed(&x.word().letters, &pat))))
        }),
    ))
}

/// Cyclic reduction: x = u·c·u⁻¹ with c cyclically reduced; returns c.
fn cyclic_core(letters: &[Letter]) -> Vec<Letter> {
    let mut core = letters.to_vec();
    while core.len() >= 2 && core[0] == core[core.len() - 1].inverse() {
        core.pop();
        core.remove(0);
    }
    core
}

/// Exact homogenized value of a counting quasimorphism: the per-period
/// growth of the signed count along powers of the cyclically reduced
/// core. Conjugation-invariant and antisymmetric under inversion.
pub fn counting_homogenized_value(pattern: &Word, x: &Element) -> Result<Rational> {
    require_reduced(pattern)?;
    let core = cyclic_core(&x.word().letters);
    if core.is_empty() {
        return Ok(Rational::zero());
    }
    // Counts in c^m grow affinely in m once m·|c| dominates the pattern
    // length; the slope is the homogenized value per period.
    let m = pattern.len() / core.len() + 2;
    let mut small = Vec::new();
    for _ in 0..m {
        small.extend(core.iter().copied());
    }
    let mut big = small.clone();
    big.extend(core.iter().copied());
    let rate = count_signed(&big, pattern) - count_signed(&small, pattern);
    Ok(Rational::from(BigInt::from(rate)))
}

/// Homogenized counting quasimorphism with exact evaluation.
pub fn counting_qm_homogenized(pattern: &Word, names: &[String]) -> Result<Quasimorphism> {
    require_reduced(pattern)?;
    let pat = pattern.clone();
    let name = format!("hom-count[{}]", pattern.display(names));
    Ok(Quasimorphism::new(
        name,
        Arc::new(move |x: &Element| counting_homogenized_value(&pat, x)),
    )
    .asserted_homogeneous())
}

/// Finite-step homogenization estimate f(xⁿ)/n together with the a-priori
/// error bound D(f)/n; needs a certified defect upper bound.
pub fn homogenize_estimate(
    f: &Quasimorphism,
    x: &Element,
    n_max: u32,
) -> Result<(Rational, Rational)> {
    if n_max == 0 {
        return Err(Error::PreconditionViolated("need at least one power".into()));
    }
    let d = f.d_upper.clone().ok_or(Error::MissingDefectBound)?;
    let n = Rational::from(BigInt::from(n_max));
    let estimate = f.eval(&x.pow(n_max as i64))? / &n;
    Ok((estimate, d / n))
}

/// Witnessed lower bound on the defect D(f) over a sample of pairs.
pub fn defect_lower(
    f: &Quasimorphism,
    samples: &[(Element, Element)],
) -> Result<(Rational, Option<(Element, Element)>)> {
    let mut best = Rational::zero();
    let mut witness = None;
    for (g1, g2) in samples {
        let v = (f.eval(&g1.mul(g2)?)? - f.eval(g1)? - f.eval(g2)?).abs();
        if v > best {
            best = v;
            witness = Some((g1.clone(), g2.clone()));
        }
    }
    Ok((best, witness))
}

/// Witnessed lower bound on the conjugation deviation D′(f) over samples
/// (g, x) with x in N.
pub fn conjugation_defect_lower(
    f: &Quasimorphism,
    ctx: &GroupContext,
    samples: &[(Element, Element)],
) -> Result<(Rational, Option<(Element, Element)>)> {
    let mut best = Rational::zero();
    let mut witness = None;
    for (g, x) in samples {
        if !ctx.in_normal_subgroup(x)? {
            return Err(Error::NonNormalSample);
        }
        let v = (f.eval(&g.conj(x)?)? - f.eval(x)?).abs();
        if v > best {
            best = v;
            witness = Some((g.clone(), x.clone()));
        }
    }
    Ok((best, witness))
}

/// Witnessed lower bound on the two-sided defect D″(f) over samples
/// (g, x) with x in N: both orders g·x and x·g are tested.
pub fn nqm_defect_lower(
    f: &Quasimorphism,
    ctx: &GroupContext,
    samples: &[(Element, Element)],
) -> Result<(Rational, Option<(Element, Element)>)> {
    let mut best = Rational::zero();
    let mut witness = None;
    for (g, x) in samples {
        if !ctx.in_normal_subgroup(x)? {
            return Err(Error::NonNormalSample);
        }
        let fg = f.eval(g)?;
        let fx = f.eval(x)?;
        let v1 = (f.eval(&g.mul(x)?)? - &fg - &fx).abs();
        let v2 = (f.eval(&x.mul(g)?)? - &fg - &fx).abs();
        let v = v1.max(v2);
        if v > best {
            best = v;
            witness = Some((g.clone(), x.clone()));
        }
    }
    Ok((best, witness))
}

/// Averages f over conjugation by the given coset representatives, which
/// must form a subgroup mapping bijectively onto the quotient (so the
/// average is exactly invariant under each listed conjugation). Preserves
/// homogeneity; the defect bound of the summands carries over.
pub fn symmetrize(
    f: &Quasimorphism,
    ctx: &GroupContext,
    reps: &[Element],
) -> Result<Quasimorphism> {
    if reps.is_empty() {
        return Err(Error::NotClosed);
    }
    // Closed under multiplication and inverse, as elements.
    for a in reps {
        if !reps.contains(&a.inv()) {
            return Err(Error::NotClosed);
        }
        for b in reps {
            if !reps.contains(&a.mul(b)?) {
                return Err(Error::NotClosed);
            }
        }
    }
    // The representatives must hit each quotient element at most once,
    // otherwise the "automorphism list" repeats entries.
    let mut images = Vec::new();
    for r in reps {
        images.push(ctx.quotient().eval(r)?);
    }
    images.sort();
    let before = images.len();
    images.dedup();
    if images.len() != before {
        return Err(Error::NotClosed);
    }
    let inner = f.clone();
    let reps = reps.to_vec();
    let n = Rational::from(BigInt::from(reps.len() as i64));
    let mut out = Quasimorphism::new(
        format!("sym[{}]", f.name),
        Arc::new(move |x: &Element| {
            let mut acc = Rational::zero();
            for r in &reps {
                acc += inner.eval(&r.conj(x)?)?;
            }
            Ok(acc / &n)
        }),
    );
    out.homogeneous = f.homogeneous;
    out.d_upper = f.d_upper.clone();
    out.g_invariant = f.g_invariant;
    Ok(out)
}

/// Extends f from N to G through a set-theoretic transversal:
/// f′(s·h) = f′(s) + f(h). The transversal maps quotient elements to
/// representatives with prescribed f′-values; the identity must map to
/// the identity with value 0. For homogeneous f the extension satisfies
/// D″(f′) = D(f), which is recorded as the two-sided bound.
pub fn extend_by_section(
    f: &Quasimorphism,
    ctx: &GroupContext,
    transversal: &BTreeMap<Element, (Element, Rational)>,
) -> Result<Quasimorphism> {
    for (qe, (rep, val)) in transversal {
        if &ctx.quotient().eval(rep)? != qe {
            return Err(Error::NotTransversal);
        }
        if qe.is_identity() && (!rep.is_identity() || !val.is_zero()) {
            return Err(Error::NotTransversal);
        }
    }
    if let Some(order) = ctx.quotient_group().order() {
        if transversal.len() != order {
            return Err(Error::NotTransversal);
        }
    }
    let inner = f.clone();
    let ctx2 = ctx.clone();
    let table = transversal.clone();
    let mut out = Quasimorphism::new(
        format!("sect[{}]", f.name),
        Arc::new(move |g: &Element| {
            let lambda = ctx2.quotient().eval(g)?;
            let (rep, val) = table
                .get(&lambda)
                .ok_or_else(|| Error::MissingValue(format!("transversal value at {lambda}")))?;
            let h = rep.inv().mul(g)?;
            Ok(val.clone() + inner.eval(&h)?)
        }),
    );
    if f.homogeneous {
        out.dpp_upper = f.d_upper.clone();
    }
    Ok(out)
}

/// A homomorphic section on a finite-index subgroup Λ of the quotient,
/// completed by coset representatives: t(λ·b) = s(λ)·s′(b).
#[derive(Debug, Clone)]
pub struct VirtualSection {
    pub lambda_gens: Vec<Element>,
    pub b_reps: Vec<Element>,
    /// Full set-theoretic section table t: Q → G.
    pub t: BTreeMap<Element, Element>,
}

impl VirtualSection {
    /// Verifies: t is a section (q∘t = id), Λ·B tiles Q exactly once,
    /// t is homomorphic on Λ, and t(λ·b) = t(λ)·t(b).
    pub fn new(
        ctx: &GroupContext,
        lambda_gens: Vec<Element>,
        b_reps: Vec<Element>,
        t: BTreeMap<Element, Element>,
    ) -> Result<VirtualSection> {
        let q_group = ctx.quotient_group();
        if q_group.order().is_none() {
            return Err(Error::InfiniteCosetSpace);
        }
        let q_elems = q_group.elements()?;
        for qe in &q_elems {
            let img = t
                .get(qe)
                .ok_or_else(|| Error::MissingValue(format!("section value at {qe}")))?;
            if &ctx.quotient().eval(img)? != qe {
                return Err(Error::NotTransversal);
            }
        }
        let lambda = subgroup_closure(q_group, &lambda_gens, crate::DEFAULT_ELEMENT_CAP)?;
        let mut covered = std::collections::BTreeSet::new();
        for l in &lambda {
            for b in &b_reps {
                if !covered.insert(l.mul(b)?) {
                    return Err(Error::NotTransversal);
                }
            }
        }
        if covered.len() != q_elems.len() {
            return Err(Error::NotTransversal);
        }
        for l1 in &lambda {
            for l2 in &lambda {
                if t[&l1.mul(l2)?] != t[l1].mul(&t[l2])? {
                    return Err(Error::NotTransversal);
                }
            }
            for b in &b_reps {
                if t[&l1.mul(b)?] != t[l1].mul(&t[b])? {
                    return Err(Error::NotTransversal);
                }
            }
        }
        Ok(VirtualSection { lambda_gens, b_reps, t })
    }
}

/// Averaging extension of f from N to G:
/// f′(g) = (1/#B)·Σ_b f(g·t(b·q(g))⁻¹·t(b)). Restricts to f on N exactly;
/// the recorded defect bound is D(f) + 3·D′(f) (just D(f) when f is
/// homogeneous, whose homogeneity makes D′ vanish).
pub fn extend_by_averaging(
    f: &Quasimorphism,
    ctx: &GroupContext,
    vs: &VirtualSection,
) -> Result<Quasimorphism> {
    let inner = f.clone();
    let ctx2 = ctx.clone();
    let vs2 = vs.clone();
    let nb = Rational::from(BigInt::from(vs.b_reps.len() as i64));
    let mut out = Quasimorphism::new(
        format!("avg[{}]", f.name),
        Arc::new(move |g: &Element| {
            let qg = ctx2.quotient().eval(g)?;
            let mut acc = Rational::zero();
            for b in &vs2.b_reps {
                let tb = &vs2.t[b];
                let tbq = &vs2.t[&b.mul(&qg)?];
                let arg = g.mul(&tbq.inv())?.mul(tb)?;
                acc += inner.eval(&arg)?;
            }
            Ok(acc / &nb)
        }),
    );
    out.d_upper = match (&f.d_upper, &f.dprime_upper) {
        (Some(d), Some(dp)) => Some(d + Rational::from(BigInt::from(3)) * dp),
        (Some(d), None) if f.homogeneous && f.g_invariant => Some(d.clone()),
        (Some(d), None) if f.homogeneous => Some(d.clone()),
        _ => None,
    };
    Ok(out)
}

/// Duality lower bound: scl(x) ≥ |f(x)| / (2·D) for homogeneous invariant
/// f with certified defect bound D.
pub fn bavard_lower(d_upper: &Rational, f_at_x: &Rational) -> Result<Rational> {
    if !d_upper.is_positive() {
        return Err(Error::NonpositiveDefect);
    }
    Ok(f_at_x.abs() / (Rational::from(BigInt::from(2)) * d_upper))
}

/// Commutator-value check: homogeneous invariant f satisfies
/// |f([g,h])| ≤ D(f) for h in N. A violation falsifies the assertions or
/// the supplied bound; the offending pair is returned.
pub fn commutator_value_check(
    f: &Quasimorphism,
    ctx: &GroupContext,
    d_upper: &Rational,
    samples: &[(Element, Element)],
) -> Result<std::result::Result<(), (Element, Element)>> {
    for (g, h) in samples {
        if !ctx.in_normal_subgroup(h)? {
            return Err(Error::NonNormalSample);
        }
        if f.eval(&g.commutator(h)?)?.abs() > *d_upper {
            return Ok(Err((g.clone(), h.clone())));
        }
    }
    Ok(Ok(()))
}

/// All pairs from a ball, a convenient defect sample.
pub fn ball_pairs(group: &Group, radius: usize, cap: usize) -> Result<Vec<(Element, Element)>> {
    let ball = group.ball(radius, cap)?;
    let mut out = Vec::new();
    for a in &ball {
        for b in &ball {
            out.push((a.clone(), b.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rat;

    fn pat(s: &str) -> Word {
        let g = fixtures::free2();
        crate::word::parse_word(s, &g.gen_names().to_vec()).unwrap()
    }

    fn names() -> Vec<String> {
        fixtures::free2().gen_names().to_vec()
    }

    #[test]
    fn counting_values() {
        let g = fixtures::free2();
        let f = counting_qm(&pat("a b"), &names()).unwrap();
        assert_eq!(f.eval(&g.parse("a b a b").unwrap()).unwrap(), rat(2, 1));
        assert_eq!(f.eval(&g.parse("B A").unwrap()).unwrap(), rat(-1, 1));
        assert_eq!(f.eval(&g.parse("[a,b]").unwrap()).unwrap(), rat(1, 1));
    }

    #[test]
    fn single_letter_is_homomorphism() {
        let g = fixtures::free2();
        let f = counting_qm(&pat("a"), &names()).unwrap();
        let (d, _) = defect_lower(&f, &ball_pairs(&g, 2, 10_000).unwrap()).unwrap();
        assert_eq!(d, rat(0, 1));
    }

    #[test]
    fn empty_or_unreduced_pattern_rejected() {
        assert!(matches!(counting_qm(&Word::empty(), &names()), Err(Error::EmptyPattern)));
        assert!(counting_qm(&pat("a A"), &names()).is_err());
    }

    #[test]
    fn homogenized_commutator_value() {
        let g = fixtures::free2();
        let x = g.parse("[a,b]").unwrap();
        assert_eq!(counting_homogenized_value(&pat("a b"), &x).unwrap(), rat(1, 1));
        assert_eq!(counting_homogenized_value(&pat("a b"), &x.pow(3)).unwrap(), rat(3, 1));
        assert_eq!(counting_homogenized_value(&pat("a b"), &x.inv()).unwrap(), rat(-1, 1));
        // Conjugation invariance of the homogenization.
        let conj = g.parse("b a").unwrap().conj(&x).unwrap();
        assert_eq!(counting_homogenized_value(&pat("a b"), &conj).unwrap(), rat(1, 1));
    }

    #[test]
    fn homogenize_estimate_converges() {
        let g = fixtures::free2();
        let f = counting_qm(&pat("a b"), &names()).unwrap().with_d_upper(rat(3, 1));
        let x = g.parse("[a,b]").unwrap();
        let (est, err) = homogenize_estimate(&f, &x, 8).unwrap();
        assert_eq!(err, rat(3, 8));
        assert!((est - rat(1, 1)).abs() <= rat(3, 8));
    }

    #[test]
    fn symmetrized_vanishes_on_antisymmetric_element() {
        let ctx = fixtures::f2_swap_context().unwrap();
        let g = ctx.group();
        let f = counting_qm_homogenized(&pat("a b"), &names()).unwrap();
        let reps = vec![g.identity(), g.parse("z").unwrap()];
        let sym = symmetrize(&f, &ctx, &reps).unwrap();
        let x = fixtures::separation_element(&ctx).unwrap();
        // z·x·z = x⁻¹ forces every symmetrized homogeneous value to 0.
        assert_eq!(sym.eval(&x).unwrap(), rat(0, 1));
        // Exact invariance under the listed conjugations.
        let v1 = sym.eval(&g.parse("a b").unwrap()).unwrap();
        let v2 = sym.eval(&g.parse("z").unwrap().conj(&g.parse("a b").unwrap()).unwrap()).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn symmetrize_requires_closure() {
        let ctx = fixtures::f2_swap_context().unwrap();
        let f = counting_qm(&pat("a b"), &names()).unwrap();
        let reps = vec![ctx.group().parse("z").unwrap()]; // missing identity
        assert!(matches!(symmetrize(&f, &ctx, &reps), Err(Error::NotClosed)));
    }

    #[test]
    fn section_extension_restricts_exactly() {
        let ctx = fixtures::f2_swap_context().unwrap();
        let g = ctx.group();
        let q = ctx.quotient_group();
        let f = counting_qm_homogenized(&pat("a b"), &names()).unwrap();
        let mut tr = BTreeMap::new();
        tr.insert(q.identity(), (g.identity(), rat(0, 1)));
        tr.insert(q.parse("t").unwrap(), (g.parse("z").unwrap(), rat(0, 1)));
        let ext = extend_by_section(&f, &ctx, &tr).unwrap();
        for w in ["a", "b a", "[a,b]", "a b A"] {
            let x = g.parse(w).unwrap();
            assert_eq!(ext.eval(&x).unwrap(), f.eval(&x).unwrap());
        }
        // On the nontrivial coset: f′(z·h) = f(h).
        let zh = g.parse("z a b").unwrap();
        assert_eq!(ext.eval(&zh).unwrap(), f.eval(&g.parse("b a").unwrap()).unwrap());
    }

    #[test]
    fn averaging_extension_restricts_exactly() {
        let ctx = fixtures::f2_swap_context().unwrap();
        let g = ctx.group();
        let q = ctx.quotient_group();
        let f = counting_qm_homogenized(&pat("a b"), &names()).unwrap().with_d_upper(rat(1, 1));
        let mut t = BTreeMap::new();
        t.insert(q.identity(), g.identity());
        t.insert(q.parse("t").unwrap(), g.parse("z").unwrap());
        let vs =
            VirtualSection::new(&ctx, vec![], vec![q.identity(), q.parse("t").unwrap()], t)
                .unwrap();
        let ext = extend_by_averaging(&f, &ctx, &vs).unwrap();
        for w in ["a", "b a", "[a,b]", "a b a B"] {
            let x = g.parse(w).unwrap();
            assert_eq!(ext.eval(&x).unwrap(), f.eval(&x).unwrap());
        }
        assert_eq!(ext.d_upper, Some(rat(1, 1)));
    }

    #[test]
    fn bavard_and_commutator_check() {
        assert_eq!(bavard_lower(&rat(1, 1), &rat(1, 1)).unwrap(), rat(1, 2));
        assert_eq!(bavard_lower(&rat(2, 1), &rat(0, 1)).unwrap(), rat(0, 1));
        assert!(bavard_lower(&rat(0, 1), &rat(1, 1)).is_err());

        let ctx = crate::hom::GroupContext::trivial(fixtures::free2()).unwrap();
        let f = counting_qm_homogenized(&pat("a b"), &names()).unwrap();
        let g = ctx.group();
        let samples = vec![
            (g.parse("a").unwrap(), g.parse("b").unwrap()),
            (g.parse("b a").unwrap(), g.parse("a b").unwrap()),
        ];
        assert!(commutator_value_check(&f, &ctx, &rat(1, 1), &samples).unwrap().is_ok());
    }
}
