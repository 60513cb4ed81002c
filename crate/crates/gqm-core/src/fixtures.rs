//! Shared example groups and contexts used by tests, the verification
//! suite, and the CLI's built-in demos.

use crate::error::Result;
use crate::group::{FiniteTable, Group, GroupSpec};
use crate::hom::{GroupContext, Homomorphism};

/// Free group with the given generator names.
pub fn free(names: &[&str]) -> Group {
    Group::new(GroupSpec::Free { gens: names.iter().map(|s| s.to_string()).collect() })
        .expect("free spec is valid")
}

pub fn free2() -> Group {
    free(&["a", "b"])
}

pub fn free4() -> Group {
    free(&["a", "b", "c", "d"])
}

/// Cyclic group of order n as a table. Element names: `{p}0` for the
/// identity, `{p}` for the generator, `{p}k` for its k-th power.
pub fn cyclic_table(n: usize, p: &str) -> FiniteTable {
    let elements: Vec<String> = (0..n)
        .map(|k| if k == 1 { p.to_string() } else { format!("{p}{k}") })
        .collect();
    let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    FiniteTable::new(elements, table).expect("cyclic table is valid")
}

pub fn cyclic(n: usize, p: &str) -> Group {
    Group::new(GroupSpec::Finite(cyclic_table(n, p))).expect("cyclic group is valid")
}

/// Dihedral group of order 2n: r of order n, s of order 2, s r s = r⁻¹.
/// Element r^i s^j is named e, r, r2, …, s, rs, r2s, … and indexed i + n·j.
pub fn dihedral_table(n: usize) -> FiniteTable {
    let name = |i: usize, j: usize| -> String {
        let rot = match i {
            0 => String::new(),
            1 => "r".to_string(),
            _ => format!("r{i}"),
        };
        let flip = if j == 1 { "s" } else { "" };
        let s = format!("{rot}{flip}");
        if s.is_empty() {
            "e".to_string()
        } else {
            s
        }
    };
    let idx = |i: usize, j: usize| i + n * j;
    let mut elements = Vec::new();
    for j in 0..2 {
        for i in 0..n {
            elements.push(name(i, j));
        }
    }
    let mut table = vec![vec![0usize; 2 * n]; 2 * n];
    for j1 in 0..2usize {
        for i1 in 0..n {
            for j2 in 0..2usize {
                for i2 in 0..n {
                    // (r^i1 s^j1)(r^i2 s^j2) = r^{i1 + (-1)^{j1} i2} s^{j1+j2}
                    let i = if j1 == 0 { (i1 + i2) % n } else { (i1 + n - i2 % n) % n };
                    let j = (j1 + j2) % 2;
                    table[idx(i1, j1)][idx(i2, j2)] = idx(i, j);
                }
            }
        }
    }
    FiniteTable::new(elements, table).expect("dihedral table is valid")
}

pub fn d4() -> Group {
    Group::new(GroupSpec::Finite(dihedral_table(4))).expect("d4 is valid")
}

pub fn s3() -> Group {
    Group::new(GroupSpec::Finite(dihedral_table(3))).expect("s3 is valid")
}

/// Klein four-group as a single table: names e, u, v, uv.
pub fn klein_table() -> FiniteTable {
    let elements = vec!["e".into(), "u".into(), "v".into(), "uv".into()];
    let table = vec![
        vec![0, 1, 2, 3],
        vec![1, 0, 3, 2],
        vec![2, 3, 0, 1],
        vec![3, 2, 1, 0],
    ];
    FiniteTable::new(elements, table).expect("klein table is valid")
}

/// Dihedral context: G = dihedral(n), N = ⟨r⟩ (the rotations), Q = ℤ/2
/// detecting the reflection part.
pub fn dihedral_rotation_context(n: usize) -> Result<GroupContext> {
    let g = Group::new(GroupSpec::Finite(dihedral_table(n)))?;
    let q = cyclic(2, "t");
    let t = q.generator(1)?;
    let e = q.identity();
    // Element i + n·j has reflection part j.
    let images: Vec<_> = (0..2 * n).map(|k| if k < n { e.clone() } else { t.clone() }).collect();
    let hom = Homomorphism::new(g.clone(), q, images)?;
    GroupContext::new(g, hom)
}

/// G = D₄, N = ⟨r⟩ ≅ ℤ/4.
pub fn d4_rotation_context() -> Result<GroupContext> {
    dihedral_rotation_context(4)
}

/// G = S₃, N = A₃ = ⟨r⟩ ≅ ℤ/3.
pub fn s3_alternating_context() -> Result<GroupContext> {
    dihedral_rotation_context(3)
}

/// F₂ ⋊ ℤ/2 where the involution z swaps the free generators a and b.
/// Generators: a, b (fiber) then z0 (identity of the acting group), z.
pub fn f2_swap_semidirect() -> Group {
    let fiber = GroupSpec::Free { gens: vec!["a".into(), "b".into()] };
    let acting = cyclic_table(2, "z");
    let a = free2().parse("a").unwrap();
    let b = free2().parse("b").unwrap();
    let action = vec![
        vec![a.word().clone(), b.word().clone()],
        vec![b.word().clone(), a.word().clone()],
    ];
    Group::new(GroupSpec::SemidirectByFinite { fiber: Box::new(fiber), acting, action })
        .expect("swap semidirect is valid")
}

/// Context for the swap semidirect product: N = F₂, Q = ℤ/2.
pub fn f2_swap_context() -> Result<GroupContext> {
    let g = f2_swap_semidirect();
    let q = cyclic(2, "t");
    let t = q.generator(1)?;
    let e = q.identity();
    let images = vec![e.clone(), e.clone(), e, t];
    let hom = Homomorphism::new(g.clone(), q, images)?;
    GroupContext::new(g, hom)
}

/// G = ℤ/2 ∗ ℤ/3 with the natural quotient onto ℤ/2 × ℤ/3.
pub fn z2_star_z3_context() -> Result<GroupContext> {
    let g = Group::new(GroupSpec::FreeProduct(vec![
        GroupSpec::Finite(cyclic_table(2, "z")),
        GroupSpec::Finite(cyclic_table(3, "c")),
    ]))?;
    let q = Group::new(GroupSpec::Direct(vec![
        GroupSpec::Finite(cyclic_table(2, "z")),
        GroupSpec::Finite(cyclic_table(3, "c")),
    ]))?;
    // Generator order in both: z0, z, c0, c, c2.
    let images = vec![
        q.identity(),
        q.parse("z")?,
        q.identity(),
        q.parse("c")?,
        q.parse("c2")?,
    ];
    let hom = Homomorphism::new(g.clone(), q, images)?;
    GroupContext::new(g, hom)
}

/// The separating element x = h (zhz) h⁻¹ (z h⁻¹ z) for a chosen h ∈ F₂,
/// inside the swap semidirect product. Satisfies z x z = x⁻¹.
pub fn separation_element(ctx: &GroupContext) -> Result<crate::group::Element> {
    let g = ctx.group();
    let h = g.parse("a")?; // needs zhz ∉ {h, h⁻¹}; here x comes out as [a,b]
    let z = g.parse("z")?;
    let zhz = z.conj(&h)?;
    let x = h.mul(&zhz)?.mul(&h.inv())?.mul(&z.conj(&h.inv())?)?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_relations() {
        let g = d4();
        let r = g.parse("r").unwrap();
        let s = g.parse("s").unwrap();
        assert!(r.pow(4).is_identity());
        assert!(s.pow(2).is_identity());
        assert_eq!(s.conj(&r).unwrap(), r.inv());
        assert_eq!(s.commutator(&r).unwrap(), g.parse("r2").unwrap());
    }

    #[test]
    fn swap_semidirect_relations() {
        let g = f2_swap_semidirect();
        let a = g.parse("a").unwrap();
        let b = g.parse("b").unwrap();
        let z = g.parse("z").unwrap();
        assert!(z.pow(2).is_identity());
        assert_eq!(z.conj(&a).unwrap(), b);
        assert_eq!(z.conj(&b).unwrap(), a);
        let w = g.parse("z a b z").unwrap();
        assert_eq!(w, g.parse("b a").unwrap());
    }

    #[test]
    fn free_product_syllables() {
        let ctx = z2_star_z3_context().unwrap();
        let g = ctx.group();
        let w = g.parse("z z c c c z").unwrap();
        assert_eq!(w, g.parse("z").unwrap());
        assert!(!ctx.in_normal_subgroup(&w).unwrap());
        let comm = g.parse("[z,c]").unwrap();
        assert!(ctx.in_normal_subgroup(&comm).unwrap());
    }

    #[test]
    fn separation_element_antisymmetry() {
        let ctx = f2_swap_context().unwrap();
        let x = separation_element(&ctx).unwrap();
        let z = ctx.group().parse("z").unwrap();
        assert!(ctx.in_normal_subgroup(&x).unwrap());
        assert_eq!(z.conj(&x).unwrap(), x.inv());
        assert!(!x.is_identity());
    }

    #[test]
    fn rotation_context_membership() {
        let ctx = d4_rotation_context().unwrap();
        let g = ctx.group();
        assert!(ctx.in_normal_subgroup(&g.parse("r").unwrap()).unwrap());
        assert!(!ctx.in_normal_subgroup(&g.parse("s").unwrap()).unwrap());
        assert!(!ctx.in_normal_subgroup(&g.parse("rs").unwrap()).unwrap());
    }
}
