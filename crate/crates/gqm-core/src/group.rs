//! Group element representation, canonical forms and basic operations.
//!
//! Supported group classes: free groups, finite groups given by
//! multiplication table, free products, direct products, and semidirect
//! products of a fiber by a finite acting group. Every class has a
//! terminating canonical-form procedure, so element equality is decidable.

use crate::error::{Error, Result};
use crate::word::{parse_word, Letter, Word};
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

/// A finite group presented by its multiplication table. Every element is
/// its own named generator; canonical words have at most one letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTable {
    pub elements: Vec<String>,
    /// Row-major: table[i][j] = index of elements[i] * elements[j].
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
}

impl FiniteTable {
    pub fn new(elements: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidSpec("finite group needs at least one element".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidSpec("multiplication table must be square".into()));
        }
        for row in &table {
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidSpec("table entry out of range".into()));
                }
            }
        }
        // Latin square check.
        for i in 0..n {
            let row: BTreeSet<usize> = table[i].iter().copied().collect();
            let col: BTreeSet<usize> = (0..n).map(|j| table[j][i]).collect();
            if row.len() != n || col.len() != n {
                return Err(Error::InvalidSpec(format!(
                    "table is not a Latin square at index {i}"
                )));
            }
        }
        // Identity.
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or_else(|| Error::InvalidSpec("table has no identity".into()))?;
        // Inverses.
        let mut inverse = vec![0usize; n];
        for i in 0..n {
            let inv = (0..n)
                .find(|&j| table[i][j] == identity && table[j][i] == identity)
                .ok_or_else(|| Error::InvalidSpec(format!("element {i} has no inverse")))?;
            inverse[i] = inv;
        }
        // Associativity.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidSpec(format!(
                            "table is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteTable { elements, table, identity, inverse })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }
}

/// Specification of a supported group.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupSpec {
    Free { gens: Vec<String> },
    Finite(FiniteTable),
    FreeProduct(Vec<GroupSpec>),
    Direct(Vec<GroupSpec>),
    /// Semidirect product fiber ⋊ acting, acting finite. `action[k][x]` is
    /// the image of fiber generator `x` under conjugation by acting
    /// element `k`, as a word in fiber generators.
    SemidirectByFinite {
        fiber: Box<GroupSpec>,
        acting: FiniteTable,
        action: Vec<Vec<Word>>,
    },
}

impl GroupSpec {
    /// Number of declared generators (finite groups: all elements).
    pub fn gen_count(&self) -> usize {
        match self {
            GroupSpec::Free { gens } => gens.len(),
            GroupSpec::Finite(t) => t.len(),
            GroupSpec::FreeProduct(fs) | GroupSpec::Direct(fs) => {
                fs.iter().map(|f| f.gen_count()).sum()
            }
            GroupSpec::SemidirectByFinite { fiber, acting, .. } => {
                fiber.gen_count() + acting.len()
            }
        }
    }

    pub fn gen_names(&self) -> Vec<String> {
        match self {
            GroupSpec::Free { gens } => gens.clone(),
            GroupSpec::Finite(t) => t.elements.clone(),
            GroupSpec::FreeProduct(fs) | GroupSpec::Direct(fs) => {
                fs.iter().flat_map(|f| f.gen_names()).collect()
            }
            GroupSpec::SemidirectByFinite { fiber, acting, .. } => {
                let mut names = fiber.gen_names();
                names.extend(acting.elements.iter().cloned());
                names
            }
        }
    }

    /// Order of the group when finite.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::Free { gens } => {
                if gens.is_empty() {
                    Some(1)
                } else {
                    None
                }
            }
            GroupSpec::Finite(t) => Some(t.len()),
            GroupSpec::FreeProduct(fs) => {
                // Infinite as soon as two factors are nontrivial.
                let mut orders = Vec::new();
                for f in fs {
                    orders.push(f.order()?);
                }
                let nontrivial = orders.iter().filter(|&&o| o > 1).count();
                match nontrivial {
                    0 => Some(1),
                    1 => Some(orders.iter().product()),
                    _ => None,
                }
            }
            GroupSpec::Direct(fs) => {
                let mut prod = 1usize;
                for f in fs {
                    prod = prod.checked_mul(f.order()?)?;
                }
                Some(prod)
            }
            GroupSpec::SemidirectByFinite { fiber, acting, .. } => {
                Some(fiber.order()? * acting.len())
            }
        }
    }

    /// Validates the structural invariants that `FiniteTable::new` cannot
    /// see: generator-name uniqueness and semidirect action coherence.
    pub fn validate(&self) -> Result<()> {
        let names = self.gen_names();
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() {
                return Err(Error::InvalidSpec("empty generator name".into()));
            }
            if !seen.insert(n.clone()) {
                return Err(Error::InvalidSpec(format!("duplicate generator name {n:?}")));
            }
        }
        for (i, a) in names.iter().enumerate() {
            for (j, b) in names.iter().enumerate() {
                if i != j && a.to_uppercase() == *b {
                    return Err(Error::InvalidSpec(format!(
                        "generator names {a:?} and {b:?} collide under inverse casing"
                    )));
                }
            }
        }
        self.validate_inner()
    }

    fn validate_inner(&self) -> Result<()> {
        match self {
            GroupSpec::Free { .. } | GroupSpec::Finite(_) => Ok(()),
            GroupSpec::FreeProduct(fs) | GroupSpec::Direct(fs) => {
                for f in fs {
                    f.validate_inner()?;
                }
                Ok(())
            }
            GroupSpec::SemidirectByFinite { fiber, acting, action } => {
                fiber.validate_inner()?;
                let fg = fiber.gen_count();
                if action.len() != acting.len() {
                    return Err(Error::InvalidSpec(
                        "action must give images for every acting element".into(),
                    ));
                }
                for imgs in action {
                    if imgs.len() != fg {
                        return Err(Error::InvalidSpec(
                            "action must give an image for every fiber generator".into(),
                        ));
                    }
                    for w in imgs {
                        for l in &w.letters {
                            if l.gen >= fg {
                                return Err(Error::InvalidSpec(
                                    "action image uses a non-fiber generator".into(),
                                ));
                            }
                        }
                    }
                }
                // Identity acts trivially.
                for x in 0..fg {
                    let img = fiber.canonicalize_letters(&action[acting.identity][x].letters)?;
                    if img != vec![Letter::new(x, false)] {
                        return Err(Error::InvalidSpec(
                            "identity of the acting group must act trivially".into(),
                        ));
                    }
                }
                // Images are automorphisms compatible with the table:
                // act_{gh} = act_g ∘ act_h on generators (inverses are the
                // case h = g^{-1}).
                for g in 0..acting.len() {
                    for h in 0..acting.len() {
                        let gh = acting.table[g][h];
                        for x in 0..fg {
                            let via_h = &action[h][x];
                            let composed = apply_action_word(&action[g], via_h);
                            let lhs = fiber.canonicalize_letters(&composed.letters)?;
                            let rhs = fiber.canonicalize_letters(&action[gh][x].letters)?;
                            if lhs != rhs {
                                return Err(Error::InvalidSpec(format!(
                                    "action is not compatible with the acting table at ({g},{h})"
                                )));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Offsets of factor generator ranges, for composite kinds.
    fn factor_offsets(factors: &[GroupSpec]) -> Vec<usize> {
        let mut offs = Vec::with_capacity(factors.len() + 1);
        let mut acc = 0;
        for f in factors {
            offs.push(acc);
            acc += f.gen_count();
        }
        offs.push(acc);
        offs
    }

    /// Canonical form of a word, as letters. Total and terminating for all
    /// supported kinds; idempotent.
    pub fn canonicalize_letters(&self, letters: &[Letter]) -> Result<Vec<Letter>> {
        let count = self.gen_count();
        for l in letters {
            if l.gen >= count {
                return Err(Error::InvalidGenerator { index: l.gen, count });
            }
        }
        Ok(match self {
            GroupSpec::Free { .. } => free_reduce(letters),
            GroupSpec::Finite(t) => {
                let mut state = t.identity;
                for l in letters {
                    let k = if l.inv { t.inverse[l.gen] } else { l.gen };
                    state = t.table[state][k];
                }
                if state == t.identity {
                    Vec::new()
                } else {
                    vec![Letter::new(state, false)]
                }
            }
            GroupSpec::FreeProduct(fs) => {
                let offs = Self::factor_offsets(fs);
                // Stack of syllables (factor index, canonical global letters).
                let mut stack: Vec<(usize, Vec<Letter>)> = Vec::new();
                for &l in letters {
                    let f = offs.partition_point(|&o| o <= l.gen) - 1;
                    if let Some(top) = stack.last_mut() {
                        if top.0 == f {
                            top.1.push(l);
                            let local = shift_letters(&top.1, offs[f], false);
                            let canon = fs[f].canonicalize_letters(&local)?;
                            top.1 = shift_letters(&canon, offs[f], true);
                            if top.1.is_empty() {
                                stack.pop();
                            }
                            continue;
                        }
                    }
                    let local = [Letter::new(l.gen - offs[f], l.inv)];
                    let canon = fs[f].canonicalize_letters(&local)?;
                    let glob = shift_letters(&canon, offs[f], true);
                    if !glob.is_empty() {
                        stack.push((f, glob));
                    }
                }
                stack.into_iter().flat_map(|(_, w)| w).collect()
            }
            GroupSpec::Direct(fs) => {
                let offs = Self::factor_offsets(fs);
                let mut out = Vec::new();
                for (f, spec) in fs.iter().enumerate() {
                    let local: Vec<Letter> = letters
                        .iter()
                        .filter(|l| l.gen >= offs[f] && l.gen < offs[f + 1])
                        .map(|l| Letter::new(l.gen - offs[f], l.inv))
                        .collect();
                    let canon = spec.canonicalize_letters(&local)?;
                    out.extend(shift_letters(&canon, offs[f], true));
                }
                out
            }
            GroupSpec::SemidirectByFinite { fiber, acting, action } => {
                let fg = fiber.gen_count();
                let mut fiber_letters: Vec<Letter> = Vec::new();
                let mut gamma = acting.identity;
                for &l in letters {
                    if l.gen < fg {
                        if gamma == acting.identity {
                            fiber_letters.push(l);
                        } else {
                            let img = &action[gamma][l.gen];
                            if l.inv {
                                fiber_letters.extend(img.inverse().letters);
                            } else {
                                fiber_letters.extend(img.letters.iter().copied());
                            }
                        }
                    } else {
                        let k = l.gen - fg;
                        let k = if l.inv { acting.inverse[k] } else { k };
                        gamma = acting.table[gamma][k];
                    }
                }
                let mut out = fiber.canonicalize_letters(&fiber_letters)?;
                if gamma != acting.identity {
                    out.push(Letter::new(fg + gamma, false));
                }
                out
            }
        })
    }
}

fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if let Some(&top) = stack.last() {
            if top.gen == l.gen && top.inv != l.inv {
                stack.pop();
                continue;
            }
        }
        stack.push(l);
    }
    stack
}

fn shift_letters(letters: &[Letter], off: usize, up: bool) -> Vec<Letter> {
    letters
        .iter()
        .map(|l| Letter::new(if up { l.gen + off } else { l.gen - off }, l.inv))
        .collect()
}

fn apply_action_word(images: &[Word], w: &Word) -> Word {
    let mut out = Vec::new();
    for l in &w.letters {
        let img = &images[l.gen];
        if l.inv {
            out.extend(img.inverse().letters);
        } else {
            out.extend(img.letters.iter().copied());
        }
    }
    Word::from_letters(out)
}

/// A validated group, shared by its elements.
#[derive(Debug, Clone)]
pub struct Group {
    spec: Arc<GroupSpec>,
    names: Arc<Vec<String>>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec
    }
}
impl Eq for Group {}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Group> {
        spec.validate()?;
        let names = Arc::new(spec.gen_names());
        Ok(Group { spec: Arc::new(spec), names })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn gen_names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> Option<usize> {
        self.spec.order()
    }

    pub fn is_finite(&self) -> bool {
        self.spec.order().is_some()
    }

    pub fn identity(&self) -> Element {
        Element { group: self.clone(), word: Word::empty() }
    }

    pub fn canonicalize(&self, w: &Word) -> Result<Element> {
        let letters = self.spec.canonicalize_letters(&w.letters)?;
        Ok(Element { group: self.clone(), word: Word::from_letters(letters) })
    }

    pub fn generator(&self, i: usize) -> Result<Element> {
        self.canonicalize(&Word::from_letters(vec![Letter::new(i, false)]))
    }

    pub fn parse(&self, s: &str) -> Result<Element> {
        let w = parse_word(s, &self.names)?;
        self.canonicalize(&w)
    }

    /// Generators and their inverses, canonicalized and deduplicated,
    /// identity removed, shortlex order.
    pub fn generating_set(&self) -> Result<Vec<Element>> {
        let mut set = BTreeSet::new();
        for i in 0..self.spec.gen_count() {
            let g = self.generator(i)?;
            let gi = g.inv();
            if !g.is_identity() {
                set.insert(g);
            }
            if !gi.is_identity() {
                set.insert(gi);
            }
        }
        Ok(set.into_iter().collect())
    }

    /// All elements of word length at most `radius` in the declared
    /// generators, shortlex order. Deterministic.
    pub fn ball(&self, radius: usize, cap: usize) -> Result<Vec<Element>> {
        let gens = self.generating_set()?;
        let mut seen: HashSet<Element> = HashSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for e in &frontier {
                for g in &gens {
                    let p = e.mul(g)?;
                    if seen.insert(p.clone()) {
                        if seen.len() > cap {
                            return Err(Error::ResourceLimit(format!(
                                "ball enumeration exceeded cap {cap}"
                            )));
                        }
                        next.push(p);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        let mut out: Vec<Element> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// All elements of a finite group, shortlex order.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let order = self
            .order()
            .ok_or_else(|| Error::ResourceLimit("group is not finite".into()))?;
        self.ball(usize::MAX >> 1, order.max(4))
    }
}

/// A group element in canonical form.
#[derive(Debug, Clone)]
pub struct Element {
    group: Group,
    word: Word,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word && self.group == other.group
    }
}
impl Eq for Element {}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.word.hash(state);
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word.shortlex_cmp(&other.word)
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.word.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", self.word.display(self.group.gen_names()))
        }
    }
}

impl Element {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    fn check_same_group(&self, other: &Element) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.check_same_group(other)?;
        self.group.canonicalize(&self.word.concat(&other.word))
    }

    pub fn inv(&self) -> Element {
        self.group
            .canonicalize(&self.word.inverse())
            .expect("canonical word stays valid under inversion")
    }

    pub fn pow(&self, n: i64) -> Element {
        let base = if n >= 0 { self.clone() } else { self.inv() };
        let mut acc = self.group.identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base).expect("same group");
        }
        acc
    }

    /// ghg⁻¹h⁻¹.
    pub fn commutator(&self, other: &Element) -> Result<Element> {
        self.check_same_group(other)?;
        self.mul(other)?.mul(&self.inv())?.mul(&other.inv())
    }

    /// g x g⁻¹.
    pub fn conj(&self, x: &Element) -> Result<Element> {
        self.check_same_group(x)?;
        self.mul(x)?.mul(&self.inv())
    }
}

/// Subgroup generated by `gens` inside a finite ambient group.
pub fn subgroup_closure(group: &Group, gens: &[Element], cap: usize) -> Result<Vec<Element>> {
    let mut set: BTreeSet<Element> = BTreeSet::new();
    set.insert(group.identity());
    let mut work: Vec<Element> = vec![group.identity()];
    let gens: Vec<Element> = gens
        .iter()
        .flat_map(|g| [g.clone(), g.inv()])
        .filter(|g| !g.is_identity())
        .collect();
    while let Some(e) = work.pop() {
        for g in &gens {
            let p = e.mul(g)?;
            if set.insert(p.clone()) {
                if set.len() > cap {
                    return Err(Error::ResourceLimit(format!(
                        "subgroup closure exceeded cap {cap}"
                    )));
                }
                work.push(p);
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Closure of a subset under left and right multiplication by a fixed
/// generating set is not needed; commutator subgroups are computed as the
/// closure of the commutator set. See `subgroup_closure`.
pub fn commutator_subgroup(
    group: &Group,
    left: &[Element],
    right: &[Element],
    cap: usize,
) -> Result<Vec<Element>> {
    let mut comms: BTreeSet<Element> = BTreeSet::new();
    for g in left {
        for h in right {
            comms.insert(g.commutator(h)?);
        }
    }
    let gens: Vec<Element> = comms.into_iter().collect();
    subgroup_closure(group, &gens, cap)
}

/// Hash-consed element lookup map keyed by canonical word, used by
/// searches over finite groups.
pub fn index_elements(elements: &[Element]) -> HashMap<Element, usize> {
    elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
}
