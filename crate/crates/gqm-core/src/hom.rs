//! Homomorphisms defined by generator images, and quotient contexts with
//! decidable normal-subgroup membership.

use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec};
use crate::word::Word;

/// A verified homomorphism given by generator images.
#[derive(Debug, Clone)]
pub struct Homomorphism {
    domain: Group,
    codomain: Group,
    images: Vec<Element>,
}

impl Homomorphism {
    /// Builds the map and verifies every defining relation of the domain:
    /// multiplication-table relations for finite (sub)groups, commutation
    /// between direct factors, and conjugation-action relations in
    /// semidirect products. Free factors impose no relations.
    pub fn new(domain: Group, codomain: Group, images: Vec<Element>) -> Result<Homomorphism> {
        if images.len() != domain.spec().gen_count() {
            return Err(Error::InvalidSpec(format!(
                "homomorphism needs {} generator images, got {}",
                domain.spec().gen_count(),
                images.len()
            )));
        }
        for img in &images {
            if img.group() != &codomain {
                return Err(Error::GroupMismatch);
            }
        }
        let hom = Homomorphism { domain, codomain, images };
        hom.verify_relations(hom.domain.spec(), 0)?;
        Ok(hom)
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }

    pub fn codomain(&self) -> &Group {
        &self.codomain
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    fn image_of(&self, gen: usize) -> &Element {
        &self.images[gen]
    }

    /// Image of a word over domain generators shifted by `off`.
    fn eval_letters(&self, letters: &[crate::word::Letter], off: usize) -> Result<Element> {
        let mut acc = self.codomain.identity();
        for l in letters {
            let img = self.image_of(l.gen + off);
            let img = if l.inv { img.inv() } else { img.clone() };
            acc = acc.mul(&img)?;
        }
        Ok(acc)
    }

    fn verify_relations(&self, spec: &GroupSpec, off: usize) -> Result<()> {
        match spec {
            GroupSpec::Free { .. } => Ok(()),
            GroupSpec::Finite(t) => {
                for i in 0..t.len() {
                    for j in 0..t.len() {
                        let lhs = self.image_of(off + i).mul(self.image_of(off + j))?;
                        let rhs = self.image_of(off + t.table[i][j]);
                        if &lhs != rhs {
                            return Err(Error::InvalidSpec(format!(
                                "images break the table relation at ({i},{j})"
                            )));
                        }
                    }
                }
                // The identity element must map to the identity; implied by
                // the relation e·e = e only up to idempotents, so check it.
                if !self.image_of(off + t.identity).is_identity() {
                    return Err(Error::InvalidSpec(
                        "identity generator must map to the identity".into(),
                    ));
                }
                Ok(())
            }
            GroupSpec::FreeProduct(fs) => {
                let mut o = off;
                for f in fs {
                    self.verify_relations(f, o)?;
                    o += f.gen_count();
                }
                Ok(())
            }
            GroupSpec::Direct(fs) => {
                let mut offs = Vec::new();
                let mut o = off;
                for f in fs {
                    self.verify_relations(f, o)?;
                    offs.push((o, f.gen_count()));
                    o += f.gen_count();
                }
                // Images of distinct factors must commute.
                for (i, &(oi, ni)) in offs.iter().enumerate() {
                    for &(oj, nj) in offs.iter().skip(i + 1) {
                        for a in oi..oi + ni {
                            for b in oj..oj + nj {
                                let ab = self.image_of(a).mul(self.image_of(b))?;
                                let ba = self.image_of(b).mul(self.image_of(a))?;
                                if ab != ba {
                                    return Err(Error::InvalidSpec(
                                        "images of direct factors must commute".into(),
                                    ));
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
            GroupSpec::SemidirectByFinite { fiber, acting, action } => {
                self.verify_relations(fiber, off)?;
                let fg = fiber.gen_count();
                let acting_off = off + fg;
                // Acting-table relations.
                for i in 0..acting.len() {
                    for j in 0..acting.len() {
                        let lhs = self
                            .image_of(acting_off + i)
                            .mul(self.image_of(acting_off + j))?;
                        let rhs = self.image_of(acting_off + acting.table[i][j]);
                        if &lhs != rhs {
                            return Err(Error::InvalidSpec(format!(
                                "images break the acting-table relation at ({i},{j})"
                            )));
                        }
                    }
                }
                if !self.image_of(acting_off + acting.identity).is_identity() {
                    return Err(Error::InvalidSpec(
                        "identity generator must map to the identity".into(),
                    ));
                }
                // Conjugation relations: s(γ)·x·s(γ)⁻¹ = act_γ(x).
                for gamma in 0..acting.len() {
                    let s = self.image_of(acting_off + gamma).clone();
                    for x in 0..fg {
                        let lhs = s.conj(self.image_of(off + x))?;
                        let rhs = self.eval_letters(&action[gamma][x].letters, off)?;
                        if lhs != rhs {
                            return Err(Error::InvalidSpec(format!(
                                "images break the action relation for acting element {gamma}, fiber generator {x}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, g: &Element) -> Result<Element> {
        if g.group() != &self.domain {
            return Err(Error::GroupMismatch);
        }
        self.eval_letters(&g.word().letters, 0)
    }

    pub fn eval_word(&self, w: &Word) -> Result<Element> {
        self.eval_letters(&w.letters, 0)
    }
}

/// A group together with a quotient map; the normal subgroup is the
/// kernel, so membership is decided by evaluating the quotient map.
#[derive(Debug, Clone)]
pub struct GroupContext {
    group: Group,
    quotient: Homomorphism,
    quotient_group: Group,
}

impl GroupContext {
    pub fn new(group: Group, quotient: Homomorphism) -> Result<GroupContext> {
        if quotient.domain() != &group {
            return Err(Error::GroupMismatch);
        }
        let quotient_group = quotient.codomain().clone();
        Ok(GroupContext { group, quotient, quotient_group })
    }

    /// The context with N = G: everything maps to the one-element group.
    pub fn trivial(group: Group) -> Result<GroupContext> {
        let q = Group::new(GroupSpec::Finite(crate::group::FiniteTable::new(
            vec!["e".into()],
            vec![vec![0]],
        )?))?;
        let images = vec![q.identity(); group.spec().gen_count()];
        let quotient = Homomorphism::new(group.clone(), q, images)?;
        GroupContext::new(group, quotient)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn quotient(&self) -> &Homomorphism {
        &self.quotient
    }

    pub fn quotient_group(&self) -> &Group {
        &self.quotient_group
    }

    pub fn in_normal_subgroup(&self, g: &Element) -> Result<bool> {
        Ok(self.quotient.eval(g)?.is_identity())
    }

    /// Whether the quotient is the one-element group, i.e. N = G.
    pub fn is_full(&self) -> bool {
        self.quotient_group.order() == Some(1)
    }
}
