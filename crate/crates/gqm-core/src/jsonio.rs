//! JSON serialization for group specs, contexts, chains, duals, surfaces
//! and quasimorphism configurations. Words are stored as display strings
//! over named generators (uppercase = inverse), rationals as "p/q".

use crate::chains::{Chain1, Chain2, Pair2};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteTable, Group, GroupSpec};
use crate::hom::{GroupContext, Homomorphism};
use crate::qm::{counting_qm, counting_qm_homogenized, extend_by_averaging, extend_by_section,
    symmetrize, Quasimorphism, VirtualSection};
use crate::surfaces::{DeltaSurface, EdgeInfo, Triangle};
use crate::word::Word;
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_str(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
        None => Ok(Rational::from(parse_int(s)?)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpecJson {
    Free { generators: Vec<String> },
    Finite { elements: Vec<String>, table: Vec<Vec<usize>> },
    FreeProduct { factors: Vec<GroupSpecJson> },
    Direct { factors: Vec<GroupSpecJson> },
    Semidirect {
        fiber: Box<GroupSpecJson>,
        acting_elements: Vec<String>,
        acting_table: Vec<Vec<usize>>,
        /// action[k][x]: word over fiber generators, the image of fiber
        /// generator x under the k-th acting element.
        action: Vec<Vec<String>>,
    },
}

impl GroupSpecJson {
    pub fn to_spec(&self) -> Result<GroupSpec> {
        match self {
            GroupSpecJson::Free { generators } => {
                Ok(GroupSpec::Free { gens: generators.clone() })
            }
            GroupSpecJson::Finite { elements, table } => {
                Ok(GroupSpec::Finite(FiniteTable::new(elements.clone(), table.clone())?))
            }
            GroupSpecJson::FreeProduct { factors } => Ok(GroupSpec::FreeProduct(
                factors.iter().map(|f| f.to_spec()).collect::<Result<_>>()?,
            )),
            GroupSpecJson::Direct { factors } => Ok(GroupSpec::Direct(
                factors.iter().map(|f| f.to_spec()).collect::<Result<_>>()?,
            )),
            GroupSpecJson::Semidirect { fiber, acting_elements, acting_table, action } => {
                let fiber_spec = fiber.to_spec()?;
                let fiber_names = fiber_spec.gen_names();
                let fiber_group = Group::new(fiber_spec.clone())?;
                let mut rows = Vec::with_capacity(action.len());
                for row in action {
                    if row.len() != fiber_names.len() {
                        return Err(Error::InvalidSpec("action row arity mismatch".into()));
                    }
                    let words: Vec<Word> = row
                        .iter()
                        .map(|s| fiber_group.parse(s).map(|e| e.word().clone()))
                        .collect::<Result<_>>()?;
                    rows.push(words);
                }
                Ok(GroupSpec::SemidirectByFinite {
                    fiber: Box::new(fiber_spec),
                    acting: FiniteTable::new(acting_elements.clone(), acting_table.clone())?,
                    action: rows,
                })
            }
        }
    }

    pub fn from_spec(spec: &GroupSpec) -> GroupSpecJson {
        match spec {
            GroupSpec::Free { gens } => GroupSpecJson::Free { generators: gens.clone() },
            GroupSpec::Finite(t) => GroupSpecJson::Finite {
                elements: t.elements.clone(),
                table: t.table.clone(),
            },
            GroupSpec::FreeProduct(fs) => GroupSpecJson::FreeProduct {
                factors: fs.iter().map(GroupSpecJson::from_spec).collect(),
            },
            GroupSpec::Direct(fs) => GroupSpecJson::Direct {
                factors: fs.iter().map(GroupSpecJson::from_spec).collect(),
            },
            GroupSpec::SemidirectByFinite { fiber, acting, action } => {
                let fiber_names = fiber.gen_names();
                GroupSpecJson::Semidirect {
                    fiber: Box::new(GroupSpecJson::from_spec(fiber)),
                    acting_elements: acting.elements.clone(),
                    acting_table: acting.table.clone(),
                    action: action
                        .iter()
                        .map(|row| row.iter().map(|w| w.display(&fiber_names)).collect())
                        .collect(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomJson {
    pub codomain: GroupSpecJson,
    /// One word per domain generator, over the codomain's generators.
    pub images: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContextJson {
    pub group: GroupSpecJson,
    /// Absent quotient means N = G (plain commutator setting).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<HomJson>,
}

impl ContextJson {
    pub fn to_context(&self) -> Result<GroupContext> {
        let group = Group::new(self.group.to_spec()?)?;
        match &self.quotient {
            None => GroupContext::trivial(group),
            Some(h) => {
                let codomain = Group::new(h.codomain.to_spec()?)?;
                if h.images.len() != group.gen_names().len() {
                    return Err(Error::InvalidSpec(format!(
                        "{} images for {} generators",
                        h.images.len(),
                        group.gen_names().len()
                    )));
                }
                let images: Vec<Element> =
                    h.images.iter().map(|s| codomain.parse(s)).collect::<Result<_>>()?;
                let q = Homomorphism::new(group.clone(), codomain, images)?;
                GroupContext::new(group, q)
            }
        }
    }

    pub fn from_context(ctx: &GroupContext) -> ContextJson {
        let group = GroupSpecJson::from_spec(ctx.group().spec());
        let quotient = if ctx.is_full() {
            None
        } else {
            let q = ctx.quotient();
            let names = ctx.quotient_group().gen_names().to_vec();
            Some(HomJson {
                codomain: GroupSpecJson::from_spec(ctx.quotient_group().spec()),
                images: q.images().iter().map(|e| e.word().display(&names)).collect(),
            })
        };
        ContextJson { group, quotient }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainTermJson {
    pub pair: [String; 2],
    pub coeff: String,
}

pub fn chain2_to_json(c: &Chain2, group: &Group) -> Vec<ChainTermJson> {
    let names = group.gen_names().to_vec();
    c.terms
        .iter()
        .map(|(p, coeff)| ChainTermJson {
            pair: [p.first.word().display(&names), p.second.word().display(&names)],
            coeff: rational_to_string(coeff),
        })
        .collect()
}

pub fn chain2_from_json(terms: &[ChainTermJson], group: &Group) -> Result<Chain2> {
    let mut c = Chain2::zero();
    for t in terms {
        let first = group.parse(&t.pair[0])?;
        let second = group.parse(&t.pair[1])?;
        c.add(Pair2::new(first, second), rational_from_str(&t.coeff)?);
    }
    Ok(c)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualTermJson {
    pub element: String,
    pub value: String,
}

pub fn dual_to_json(dual: &BTreeMap<Element, Rational>, group: &Group) -> Vec<DualTermJson> {
    let names = group.gen_names().to_vec();
    dual.iter()
        .map(|(e, v)| DualTermJson {
            element: e.word().display(&names),
            value: rational_to_string(v),
        })
        .collect()
}

pub fn dual_from_json(
    terms: &[DualTermJson],
    group: &Group,
) -> Result<BTreeMap<Element, Rational>> {
    let mut out = BTreeMap::new();
    for t in terms {
        out.insert(group.parse(&t.element)?, rational_from_str(&t.value)?);
    }
    Ok(out)
}

pub fn chain1_to_json(c: &Chain1, group: &Group) -> Vec<DualTermJson> {
    let names = group.gen_names().to_vec();
    c.terms
        .iter()
        .map(|(e, v)| DualTermJson {
            element: e.word().display(&names),
            value: rational_to_string(v),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleJson {
    pub sign: i8,
    pub faces: [usize; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceJson {
    pub triangles: Vec<TriangleJson>,
    pub edges: Vec<EdgeJson>,
    pub boundary: Vec<usize>,
}

pub fn surface_to_json(s: &DeltaSurface, group: &Group) -> SurfaceJson {
    let names = group.gen_names().to_vec();
    SurfaceJson {
        triangles: s
            .triangles
            .iter()
            .map(|t| TriangleJson { sign: t.sign, faces: t.faces })
            .collect(),
        edges: s
            .edges
            .iter()
            .map(|e| EdgeJson { label: e.label.word().display(&names) })
            .collect(),
        boundary: s.boundary_edges.clone(),
    }
}

pub fn surface_from_json(j: &SurfaceJson, group: &Group) -> Result<DeltaSurface> {
    let mut edges = Vec::with_capacity(j.edges.len());
    for e in &j.edges {
        edges.push(EdgeInfo { label: group.parse(&e.label)? });
    }
    let triangles = j
        .triangles
        .iter()
        .map(|t| {
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::MalformedComplex(format!("sign {}", t.sign)));
            }
            Ok(Triangle { sign: t.sign, faces: t.faces })
        })
        .collect::<Result<_>>()?;
    Ok(DeltaSurface { triangles, edges, boundary_edges: j.boundary.clone() })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QmJson {
    Counting {
        pattern: String,
        #[serde(default)]
        homogenized: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        defect_bound: Option<String>,
    },
    Symmetrized {
        base: Box<QmJson>,
        /// Conjugating representatives (as words in G), one per listed
        /// automorphism; must form a subgroup transversal.
        autos: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        defect_bound: Option<String>,
    },
    Extended {
        method: ExtensionMethod,
        base: Box<QmJson>,
        /// Section method: quotient element → (representative word, value).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transversal: Option<Vec<TransversalEntryJson>>,
        /// Averaging method: a virtual section of the quotient map.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_gens: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b_reps: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        section: Option<Vec<SectionEntryJson>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMethod {
    Averaging,
    Section,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransversalEntryJson {
    pub quotient: String,
    pub representative: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionEntryJson {
    pub quotient: String,
    pub image: String,
}

/// Builds the quasimorphism a config describes, attaching any supplied
/// certified defect bound. Counting patterns are words in G's generators.
pub fn qm_from_json(j: &QmJson, ctx: &GroupContext) -> Result<Quasimorphism> {
    let group = ctx.group();
    let names = group.gen_names().to_vec();
    match j {
        QmJson::Counting { pattern, homogenized, defect_bound } => {
            let pat = group.parse(pattern)?.word().clone();
            let mut f = if *homogenized {
                counting_qm_homogenized(&pat, &names)?
            } else {
                counting_qm(&pat, &names)?
            };
            if let Some(d) = defect_bound {
                f = f.with_d_upper(rational_from_str(d)?);
            }
            Ok(f)
        }
        QmJson::Symmetrized { base, autos, defect_bound } => {
            let inner = qm_from_json(base, ctx)?;
            let reps: Vec<Element> =
                autos.iter().map(|s| group.parse(s)).collect::<Result<_>>()?;
            let mut f = symmetrize(&inner, ctx, &reps)?;
            if let Some(d) = defect_bound {
                f = f.with_d_upper(rational_from_str(d)?);
            }
            Ok(f)
        }
        QmJson::Extended { method, base, transversal, lambda_gens, b_reps, section } => {
            let inner = qm_from_json(base, ctx)?;
            match method {
                ExtensionMethod::Section => {
                    let entries = transversal.as_ref().ok_or_else(|| {
                        Error::InvalidSpec("section extension needs a transversal".into())
                    })?;
                    let mut map = BTreeMap::new();
                    for e in entries {
                        map.insert(
                            ctx.quotient_group().parse(&e.quotient)?,
                            (group.parse(&e.representative)?, rational_from_str(&e.value)?),
                        );
                    }
                    extend_by_section(&inner, ctx, &map)
                }
                ExtensionMethod::Averaging => {
                    let (lg, br, sec) = match (lambda_gens, b_reps, section) {
                        (Some(l), Some(b), Some(s)) => (l, b, s),
                        _ => {
                            return Err(Error::InvalidSpec(
                                "averaging extension needs lambda_gens, b_reps and section"
                                    .into(),
                            ))
                        }
                    };
                    let qg = ctx.quotient_group();
                    let lambda: Vec<Element> =
                        lg.iter().map(|s| qg.parse(s)).collect::<Result<_>>()?;
                    let breps: Vec<Element> =
                        br.iter().map(|s| qg.parse(s)).collect::<Result<_>>()?;
                    let mut t = BTreeMap::new();
                    for e in sec {
                        t.insert(qg.parse(&e.quotient)?, group.parse(&e.image)?);
                    }
                    let vs = VirtualSection::new(ctx, lambda, breps, t)?;
                    extend_by_averaging(&inner, ctx, &vs)
                }
            }
        }
    }
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn save_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
