//! Triangulated labelled surfaces realizing commutator decompositions.
//!
//! A surface is a Δ-complex of signed triangles whose directed edges carry
//! group labels multiplying coherently around every triangle
//! (label(∂₁σ) = label(∂₀σ)·label(∂₂σ)) with at least one N-labelled face
//! per triangle. Surfaces are built from integral 2-chains by matching
//! opposite-sign face slots, or directly from a commutator decomposition;
//! genus counts then mirror commutator lengths.

use crate::chains::{boundary2, witness_commutator_chain, Chain1, Chain2, Pair2};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::hom::GroupContext;
use num_traits::Signed;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct Triangle {
    /// Orientation sign ε ∈ {+1, −1}.
    pub sign: i8,
    /// faces[i] = edge id of the i-th face ∂ᵢσ.
    pub faces: [usize; 3],
}

#[derive(Debug, Clone)]
pub struct EdgeInfo {
    pub label: Element,
}

#[derive(Debug, Clone)]
pub struct DeltaSurface {
    pub triangles: Vec<Triangle>,
    pub edges: Vec<EdgeInfo>,
    pub boundary_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceReport {
    pub connected: bool,
    pub orientable: bool,
    pub boundary_edge_count: usize,
    pub vertices: usize,
    pub edge_count: usize,
    pub triangle_count: usize,
    /// Genus from χ = p − e + s = 1 − 2g; only defined for connected
    /// surfaces whose boundary is a single edge.
    pub genus: Option<i64>,
    pub gn_labelled: bool,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Boundary-orientation sign of face slot i under the formula
/// ∂(g₁,g₂) = g₂ − g₁g₂ + g₁: faces 0 and 2 enter positively.
fn slot_sign(tri_sign: i8, i: usize) -> i32 {
    let s = if i == 1 { -1 } else { 1 };
    tri_sign as i32 * s
}

/// Corner indices of the endpoints of face i, as (start, end) corners of
/// the triangle [v0, v1, v2]: ∂₀ = v1→v2, ∂₁ = v0→v2, ∂₂ = v0→v1.
fn face_endpoints(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Checks every structural and labelling invariant and computes the
/// census. Fails with `MalformedComplex` on the first structural
/// violation; the (G,N) labelling condition is reported as a flag.
pub fn validate(surface: &DeltaSurface, ctx: &GroupContext) -> Result<SurfaceReport> {
    let s = surface.triangles.len();
    let e = surface.edges.len();
    for t in &surface.triangles {
        if t.sign != 1 && t.sign != -1 {
            return Err(Error::MalformedComplex("triangle sign must be ±1".into()));
        }
        for &f in &t.faces {
            if f >= e {
                return Err(Error::MalformedComplex(format!("face edge id {f} out of range")));
            }
        }
    }
    for b in &surface.boundary_edges {
        if *b >= e {
            return Err(Error::MalformedComplex(format!("boundary edge id {b} out of range")));
        }
    }
    // Coherence and the (G,N) condition.
    let mut gn_labelled = true;
    for (k, t) in surface.triangles.iter().enumerate() {
        let l0 = &surface.edges[t.faces[0]].label;
        let l1 = &surface.edges[t.faces[1]].label;
        let l2 = &surface.edges[t.faces[2]].label;
        // ∂₂ is the first path segment, ∂₀ the second, ∂₁ the composite:
        // for a triangle coming from a pair (g₁,g₂) this reads g₁g₂ = g₁·g₂.
        let prod = l2
            .mul(l0)
            .map_err(|_| Error::MalformedComplex("label group mismatch".into()))?;
        if &prod != l1 {
            return Err(Error::MalformedComplex(format!(
                "triangle {k} labels do not multiply coherently"
            )));
        }
        if !(ctx.in_normal_subgroup(l0)? || ctx.in_normal_subgroup(l2)?) {
            gn_labelled = false;
        }
    }
    // Slot counts per edge.
    let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); e];
    for (k, t) in surface.triangles.iter().enumerate() {
        for i in 0..3 {
            slots[t.faces[i]].push((k, i));
        }
    }
    let boundary_set: std::collections::BTreeSet<usize> =
        surface.boundary_edges.iter().copied().collect();
    if boundary_set.len() != surface.boundary_edges.len() {
        return Err(Error::MalformedComplex("duplicate boundary edge".into()));
    }
    let mut orientable = true;
    for (eid, sl) in slots.iter().enumerate() {
        let expected = if boundary_set.contains(&eid) { 1 } else { 2 };
        if sl.len() != expected {
            return Err(Error::MalformedComplex(format!(
                "edge {eid} is used by {} face slots, expected {expected}",
                sl.len()
            )));
        }
        if sl.len() == 2 {
            let a = slot_sign(surface.triangles[sl[0].0].sign, sl[0].1);
            let b = slot_sign(surface.triangles[sl[1].0].sign, sl[1].1);
            if a + b != 0 {
                orientable = false;
            }
        }
    }
    // Connectivity over the dual graph.
    let mut tri_ds = DisjointSet::new(s.max(1));
    for sl in &slots {
        if sl.len() == 2 {
            tri_ds.union(sl[0].0, sl[1].0);
        }
    }
    let connected = if s == 0 {
        true
    } else {
        let root = tri_ds.find(0);
        (1..s).all(|k| tri_ds.find(k) == root)
    };
    // Vertices: identify triangle corners along glued edges. Glued slots
    // carry the same directed label, so start maps to start.
    let mut corner_ds = DisjointSet::new(3 * s);
    for sl in &slots {
        if sl.len() == 2 {
            let (t1, i1) = sl[0];
            let (t2, i2) = sl[1];
            let (s1, e1) = face_endpoints(i1);
            let (s2, e2) = face_endpoints(i2);
            corner_ds.union(3 * t1 + s1, 3 * t2 + s2);
            corner_ds.union(3 * t1 + e1, 3 * t2 + e2);
        }
    }
    // Corners within one triangle that are endpoints of the same slot are
    // already distinct corners; just count classes.
    let mut reps = std::collections::BTreeSet::new();
    for c in 0..3 * s {
        reps.insert(corner_ds.find(c));
    }
    let p = reps.len();
    let genus = if connected && surface.boundary_edges.len() == 1 && s > 0 {
        // χ = p − e + s = 1 − 2g
        let chi = p as i64 - e as i64 + s as i64;
        let g2 = 1 - chi;
        if g2 % 2 != 0 || g2 < 0 {
            return Err(Error::MalformedComplex(format!(
                "Euler characteristic {chi} is not of the form 1 − 2g"
            )));
        }
        Some(g2 / 2)
    } else {
        None
    };
    Ok(SurfaceReport {
        connected,
        orientable,
        boundary_edge_count: surface.boundary_edges.len(),
        vertices: p,
        edge_count: e,
        triangle_count: s,
        genus,
        gn_labelled,
    })
}

/// A surface assembled from an integral chain, with a note of how many
/// closed (boundary-free) triangles were pruned away.
#[derive(Debug, Clone)]
pub struct ChainSurface {
    pub surface: DeltaSurface,
    pub pruned_triangles: usize,
}

/// Glues one triangle per unit of coefficient mass of `c`, matching
/// opposite-orientation face slots with equal labels in lexicographic
/// (triangle, face) order. Exactly one slot, labelled x, stays unmatched
/// and becomes the boundary. Components not containing the boundary are
/// closed and are pruned.
pub fn build_from_chain(ctx: &GroupContext, c: &Chain2, x: &Element) -> Result<ChainSurface> {
    if !c.is_integral() {
        return Err(Error::NonIntegral);
    }
    c.check_admissible(ctx)?;
    if boundary2(c)? != Chain1::single(x.clone()) {
        return Err(Error::BoundaryMismatch);
    }
    // Unit triangles in sorted pair order.
    struct Unit {
        sign: i8,
        labels: [Element; 3],
    }
    let mut units = Vec::new();
    for (p, coeff) in &c.terms {
        let n = coeff.to_integer();
        let sign: i8 = if n.is_negative() { -1 } else { 1 };
        let prod = p.first.mul(&p.second)?;
        let count = n.abs().min(10_000.into());
        let mut k = num_bigint::BigInt::from(0);
        while k < count {
            units.push(Unit {
                sign,
                labels: [p.second.clone(), prod.clone(), p.first.clone()],
            });
            k += 1;
        }
    }
    // Group slots by label and orientation.
    let mut pos: BTreeMap<Element, Vec<(usize, usize)>> = BTreeMap::new();
    let mut neg: BTreeMap<Element, Vec<(usize, usize)>> = BTreeMap::new();
    for (t, u) in units.iter().enumerate() {
        for i in 0..3 {
            let bucket = if slot_sign(u.sign, i) > 0 { &mut pos } else { &mut neg };
            bucket.entry(u.labels[i].clone()).or_default().push((t, i));
        }
    }
    // Deterministic matching; the single surplus positive x-slot is the
    // boundary (the chain's boundary says the counts work out this way).
    let mut face_of: Vec<[Option<usize>; 3]> = vec![[None; 3]; units.len()];
    let mut edges: Vec<EdgeInfo> = Vec::new();
    let mut boundary_edges = Vec::new();
    let empty = Vec::new();
    for (label, plist) in &pos {
        let nlist = neg.get(label).unwrap_or(&empty);
        if plist.len() != nlist.len() + usize::from(label == x) {
            return Err(Error::BoundaryMismatch);
        }
        for (k, &(t, i)) in plist.iter().enumerate() {
            let eid = edges.len();
            edges.push(EdgeInfo { label: label.clone() });
            face_of[t][i] = Some(eid);
            if let Some(&(t2, i2)) = nlist.get(k) {
                face_of[t2][i2] = Some(eid);
            } else {
                boundary_edges.push(eid);
            }
        }
    }
    for (label, nlist) in &neg {
        if !pos.contains_key(label) && !nlist.is_empty() {
            return Err(Error::BoundaryMismatch);
        }
    }
    if boundary_edges.len() != 1 {
        return Err(Error::BoundaryMismatch);
    }
    // Prune components without the boundary edge.
    let mut ds = DisjointSet::new(units.len());
    for t in 0..units.len() {
        for i in 0..3 {
            let eid = face_of[t][i].expect("all slots assigned");
            // Union with the first slot seen for this edge.
            for t2 in 0..=t {
                let top = if t2 == t { i } else { 3 };
                for i2 in 0..top {
                    if face_of[t2][i2] == Some(eid) {
                        ds.union(t, t2);
                    }
                }
            }
        }
    }
    let boundary_tri = (0..units.len())
        .find(|&t| face_of[t].contains(&Some(boundary_edges[0])))
        .expect("boundary slot exists");
    let keep_root = ds.find(boundary_tri);
    let kept: Vec<usize> = (0..units.len()).filter(|&t| ds.find(t) == keep_root).collect();
    let pruned = units.len() - kept.len();
    // Re-index edges over the kept triangles.
    let mut edge_map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut new_edges = Vec::new();
    let mut triangles = Vec::new();
    for &t in &kept {
        let mut faces = [0usize; 3];
        for i in 0..3 {
            let old = face_of[t][i].unwrap();
            let new = *edge_map.entry(old).or_insert_with(|| {
                new_edges.push(edges[old].clone());
                new_edges.len() - 1
            });
            faces[i] = new;
        }
        triangles.push(Triangle { sign: units[t].sign, faces });
    }
    let boundary_edges = vec![edge_map[&boundary_edges[0]]];
    Ok(ChainSurface {
        surface: DeltaSurface { triangles, edges: new_edges, boundary_edges },
        pruned_triangles: pruned,
    })
}

/// The decomposition chain of pairs (gᵢ, hᵢ) with ∏[gᵢ,hᵢ] = x: one
/// 3-triangle commutator block per pair plus a fan of m−1 triangles
/// −(P_{j−1}, [gⱼ,hⱼ]) over the partial products P_j = [g₁,h₁]⋯[gⱼ,hⱼ].
pub fn decomposition_chain(
    ctx: &GroupContext,
    pairs: &[(Element, Element)],
    x: &Element,
) -> Result<Chain2> {
    let mut c = Chain2::zero();
    let mut partial = ctx.group().identity();
    for (j, (g, h)) in pairs.iter().enumerate() {
        if !ctx.in_normal_subgroup(h)? {
            return Err(Error::NonNormalArgument);
        }
        let block = witness_commutator_chain(ctx, g, h)?;
        for (p, v) in block.terms {
            c.add(p, v);
        }
        let comm = g.commutator(h)?;
        if j > 0 {
            c.add(Pair2::new(partial.clone(), comm.clone()), -crate::rat(1, 1));
        }
        partial = partial.mul(&comm)?;
    }
    if &partial != x {
        return Err(Error::ProductMismatch);
    }
    Ok(c)
}

/// Builds the genus-m one-vertex surface with boundary x from a
/// decomposition of x into m mixed commutators. Counts come out as
/// s = 4m−1, e = 6m−1, p = 1.
pub fn build_from_decomposition(
    ctx: &GroupContext,
    pairs: &[(Element, Element)],
    x: &Element,
) -> Result<ChainSurface> {
    if pairs.is_empty() {
        return Err(Error::PreconditionViolated("need at least one commutator pair".into()));
    }
    let c = decomposition_chain(ctx, pairs, x)?;
    build_from_chain(ctx, &c, x)
}

/// Bracketing report tying genus to commutator length.
#[derive(Debug, Clone)]
pub struct GenusReport {
    pub cl_value: Option<usize>,
    pub decomposition_genus: Option<i64>,
    pub lower: i64,
    pub consistent: bool,
}

/// Builds a surface from the best commutator decomposition found within
/// the search budget and checks that its genus equals the decomposition
/// length and is not smaller than a supplied certified lower bound.
pub fn genus_vs_cl_check(
    ctx: &GroupContext,
    x: &Element,
    cfg: &crate::commlength::SearchConfig,
    lower: i64,
) -> Result<GenusReport> {
    if x.is_identity() {
        return Ok(GenusReport {
            cl_value: Some(0),
            decomposition_genus: Some(0),
            lower,
            consistent: lower <= 0,
        });
    }
    let cl = crate::commlength::cl_mixed(ctx, x, cfg)?;
    let Some(witness) = &cl.witness else {
        return Err(Error::ResourceLimit("no decomposition witness within budget".into()));
    };
    let witness: Vec<(Element, Element)> = witness
        .iter()
        .filter(|(g, h)| !g.commutator(h).map(|c| c.is_identity()).unwrap_or(false))
        .cloned()
        .collect();
    let built = build_from_decomposition(ctx, &witness, x)?;
    let report = validate(&built.surface, ctx)?;
    if !report.gn_labelled || !report.orientable {
        return Err(Error::MalformedComplex("decomposition surface failed validation".into()));
    }
    let genus = report.genus;
    let consistent = genus == Some(witness.len() as i64) && genus.map_or(false, |g| g >= lower);
    Ok(GenusReport { cl_value: cl.value, decomposition_genus: genus, lower, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::hom::GroupContext;

    fn f2_ctx() -> GroupContext {
        GroupContext::trivial(fixtures::free2()).unwrap()
    }

    #[test]
    fn single_commutator_block() {
        let ctx = f2_ctx();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let built = build_from_decomposition(&ctx, &[(g, h)], &ctx.group().parse("[a,b]").unwrap())
            .unwrap();
        assert_eq!(built.pruned_triangles, 0);
        let rep = validate(&built.surface, &ctx).unwrap();
        assert!(rep.connected && rep.orientable && rep.gn_labelled);
        assert_eq!(
            (rep.triangle_count, rep.edge_count, rep.vertices, rep.boundary_edge_count),
            (3, 5, 1, 1)
        );
        assert_eq!(rep.genus, Some(1));
        // Second Euler identity: 1 + 2(e − 1) = 3s.
        assert_eq!(1 + 2 * (rep.edge_count - 1), 3 * rep.triangle_count);
    }

    #[test]
    fn genus_two_and_three() {
        let g4 = fixtures::free4();
        let ctx = GroupContext::trivial(g4.clone()).unwrap();
        for m in [2usize, 3] {
            let names = ["a", "b", "c", "d", "a", "b"];
            let pairs: Vec<_> = (0..m)
                .map(|i| {
                    (
                        g4.parse(names[2 * i]).unwrap(),
                        g4.parse(names[2 * i + 1]).unwrap(),
                    )
                })
                .collect();
            let mut x = g4.identity();
            for (g, h) in &pairs {
                x = x.mul(&g.commutator(h).unwrap()).unwrap();
            }
            let built = build_from_decomposition(&ctx, &pairs, &x).unwrap();
            let rep = validate(&built.surface, &ctx).unwrap();
            assert_eq!(rep.triangle_count, 4 * m - 1);
            assert_eq!(rep.edge_count, 6 * m - 1);
            assert_eq!(rep.vertices, 1);
            assert_eq!(rep.genus, Some(m as i64));
            assert_eq!(1 + 2 * (rep.edge_count - 1), 3 * rep.triangle_count);
        }
    }

    #[test]
    fn chain_surface_from_witness_chain() {
        let ctx = f2_ctx();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let c = witness_commutator_chain(&ctx, &g, &h).unwrap();
        let x = ctx.group().parse("[a,b]").unwrap();
        let built = build_from_chain(&ctx, &c, &x).unwrap();
        let rep = validate(&built.surface, &ctx).unwrap();
        assert!(rep.connected);
        assert_eq!(rep.genus, Some(1));
        assert_eq!(rep.boundary_edge_count, 1);
        assert_eq!(built.surface.edges[built.surface.boundary_edges[0]].label, x);
    }

    #[test]
    fn mislabeled_edge_rejected() {
        let ctx = f2_ctx();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let built = build_from_decomposition(&ctx, &[(g, h)], &ctx.group().parse("[a,b]").unwrap())
            .unwrap();
        let mut bad = built.surface.clone();
        bad.edges[0].label = ctx.group().parse("a a").unwrap();
        assert!(matches!(validate(&bad, &ctx), Err(Error::MalformedComplex(_))));
    }

    #[test]
    fn boundary_mismatch_rejected() {
        let ctx = f2_ctx();
        let g = ctx.group().parse("a").unwrap();
        let h = ctx.group().parse("b").unwrap();
        let c = witness_commutator_chain(&ctx, &g, &h).unwrap();
        let wrong = ctx.group().parse("a").unwrap();
        assert!(matches!(build_from_chain(&ctx, &c, &wrong), Err(Error::BoundaryMismatch)));
    }

    #[test]
    fn d4_decomposition_surface() {
        let ctx = fixtures::d4_rotation_context().unwrap();
        let s = ctx.group().parse("s").unwrap();
        let r = ctx.group().parse("r").unwrap();
        let x = ctx.group().parse("r2").unwrap();
        let built = build_from_decomposition(&ctx, &[(s, r)], &x).unwrap();
        let rep = validate(&built.surface, &ctx).unwrap();
        assert_eq!(rep.genus, Some(1));
        assert!(rep.gn_labelled);
    }

    #[test]
    fn genus_check_free_commutator() {
        let ctx = f2_ctx();
        let x = ctx.group().parse("[a,b]").unwrap();
        let cfg = crate::commlength::SearchConfig {
            ball_radius: 1,
            max_factors: 2,
            ..Default::default()
        };
        let rep = genus_vs_cl_check(&ctx, &x, &cfg, 1).unwrap();
        assert_eq!(rep.decomposition_genus, Some(1));
        assert!(rep.consistent);
    }
}
