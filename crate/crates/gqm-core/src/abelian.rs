//! Finitely generated abelian groups: Smith normal form with unimodular
//! witnesses, abelianizations of finite groups, tensor products, and the
//! two independent computations of the free-product quotient N/[G,N].

use crate::error::{Error, Result};
use crate::group::{commutator_subgroup, FiniteTable, Group, GroupSpec};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().map(BigInt::from).collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    /// Determinant by fraction-free Gaussian elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    let a = m[(k, j)].clone();
                    let b = m[(swap, j)].clone();
                    m[(k, j)] = b;
                    m[(swap, j)] = a;
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form: returns (D, U, V) with U·M·V = D, D diagonal with
/// a divisibility chain d₁ | d₂ | …, and U, V unimodular.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let rank_bound = m.rows.min(m.cols);

    let swap_rows = |d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for j in 0..d.cols {
            d.data.swap(a * d.cols + j, b * d.cols + j);
        }
        for j in 0..u.cols {
            u.data.swap(a * u.cols + j, b * u.cols + j);
        }
    };
    let swap_cols = |d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize| {
        if a == b {
            return;
        }
        for i in 0..d.rows {
            d.data.swap(i * d.cols + a, i * d.cols + b);
        }
        for i in 0..v.rows {
            v.data.swap(i * v.cols + a, i * v.cols + b);
        }
    };
    // row_a -= q · row_b  (and mirror on U)
    let add_row = |d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize, q: &BigInt| {
        for j in 0..d.cols {
            let delta = q * &d[(b, j)];
            d[(a, j)] -= delta;
        }
        for j in 0..u.cols {
            let delta = q * &u[(b, j)];
            u[(a, j)] -= delta;
        }
    };
    let add_col = |d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize, q: &BigInt| {
        for i in 0..d.rows {
            let delta = q * &d[(i, b)];
            d[(i, a)] -= delta;
        }
        for i in 0..v.rows {
            let delta = q * &v[(i, b)];
            v[(i, a)] -= delta;
        }
    };

    for t in 0..rank_bound {
        'position: loop {
            // Smallest nonzero entry of the trailing submatrix as pivot.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if !d[(i, j)].is_zero()
                        && pivot.map_or(true, |(pi, pj)| d[(i, j)].abs() < d[(pi, pj)].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break 'position };
            swap_rows(&mut d, &mut u, t, pi);
            swap_cols(&mut d, &mut v, t, pj);

            let mut clean = true;
            for i in t + 1..d.rows {
                if !d[(i, t)].is_zero() {
                    let q = &d[(i, t)] / &d[(t, t)];
                    add_row(&mut d, &mut u, i, t, &q);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'position;
            }
            for j in t + 1..d.cols {
                if !d[(t, j)].is_zero() {
                    let q = &d[(t, j)] / &d[(t, t)];
                    add_col(&mut d, &mut v, j, t, &q);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'position;
            }
            // Divisibility: fold any non-multiple into the pivot's row.
            for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                        let minus_one = -BigInt::one();
                        add_row(&mut d, &mut u, t, i, &minus_one);
                        continue 'position;
                    }
                }
            }
            break 'position;
        }
        if d[(t, t)].is_negative() {
            for j in 0..d.cols {
                d[(t, j)] = -d[(t, j)].clone();
            }
            for j in 0..u.cols {
                u[(t, j)] = -u[(t, j)].clone();
            }
        }
    }
    (d, u, v)
}

/// Finitely generated abelian group in invariant-factor form: d₁ | d₂ | …
/// with dᵢ ≥ 2, followed by zeros for infinite cyclic summands. The
/// trivial group is the empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinAbGroup {
    pub invariant_factors: Vec<BigInt>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup { invariant_factors: Vec::new() }
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.invariant_factors.iter().any(|d| d.is_zero()) {
            return None;
        }
        Some(self.invariant_factors.iter().product())
    }
}

impl std::fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel of the relation matrix (generators = columns): the abelian
/// group on the columns modulo the row relations, read off the SNF.
pub fn cokernel(relations: &IntMatrix) -> FinAbGroup {
    let (d, _, _) = smith_normal_form(relations);
    let mut factors = Vec::new();
    let r = relations.rows.min(relations.cols);
    for t in 0..r {
        let dt = d[(t, t)].clone();
        if dt > BigInt::one() {
            factors.push(dt);
        }
    }
    // Columns untouched by any relation pivot are free.
    let rank = (0..r).filter(|&t| !d[(t, t)].is_zero()).count();
    for _ in rank..relations.cols {
        factors.push(BigInt::zero());
    }
    FinAbGroup { invariant_factors: factors }
}

/// Abelianization of a finite group from its multiplication table, with
/// an independent order check against the commutator-subgroup closure.
pub fn abelianization(table: &FiniteTable) -> Result<FinAbGroup> {
    let n = table.len();
    // One generator per element; relation e_i + e_j − e_{ij} per product.
    let mut rel = IntMatrix::zero(n * n, n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            rel[(row, i)] += BigInt::one();
            rel[(row, j)] += BigInt::one();
            rel[(row, table.table[i][j])] -= BigInt::one();
        }
    }
    let ab = cokernel(&rel);
    // Independent check: |G^ab| = |G| / |[G,G]|.
    let group = Group::new(GroupSpec::Finite(table.clone()))?;
    let elems = group.elements()?;
    let derived = commutator_subgroup(&group, &elems, &elems, crate::DEFAULT_ELEMENT_CAP)?;
    let expected = BigInt::from(n / derived.len());
    if ab.order() != Some(expected.clone()) {
        return Err(Error::PreconditionViolated(format!(
            "abelianization order {:?} disagrees with |G|/|[G,G]| = {expected}",
            ab.order()
        )));
    }
    Ok(ab)
}

/// Tensor product over ℤ: ⊕ᵢⱼ ℤ/gcd(dᵢ, d′ⱼ), renormalized to invariant
/// factors (gcd(0, n) = n keeps free factors right).
pub fn tensor(a: &FinAbGroup, b: &FinAbGroup) -> FinAbGroup {
    use num_integer::Integer;
    let mut cyclics = Vec::new();
    for da in &a.invariant_factors {
        for db in &b.invariant_factors {
            cyclics.push(da.gcd(db));
        }
    }
    normalize_cyclics(&cyclics)
}

/// Invariant factors of ⊕ ℤ/cᵢ via the SNF of the diagonal matrix.
fn normalize_cyclics(cyclics: &[BigInt]) -> FinAbGroup {
    let nontrivial: Vec<&BigInt> = cyclics.iter().filter(|c| !c.is_one()).collect();
    let n = nontrivial.len();
    if n == 0 {
        return FinAbGroup::trivial();
    }
    let mut m = IntMatrix::zero(n, n);
    for (i, c) in nontrivial.iter().enumerate() {
        m[(i, i)] = (*c).clone();
    }
    cokernel(&m)
}

/// Presentation of N/[G,N] for G = A∗B, N = ker(A∗B → A×B): generators
/// s_{a,b} over all (a,b) ∈ A×B, with bilinearity relations
/// s_{ca,b} = s_{c,b} + s_{a,b} and s_{a,db} = s_{a,d} + s_{a,b}.
pub fn mixed_quotient_presentation(a: &FiniteTable, b: &FiniteTable) -> Result<FinAbGroup> {
    let na = a.len();
    let nb = b.len();
    let gens = na * nb;
    if gens > 4096 {
        return Err(Error::ResourceLimit(format!(
            "presentation would need {gens} generators"
        )));
    }
    let idx = |x: usize, y: usize| x * nb + y;
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    for c in 0..na {
        for x in 0..na {
            for y in 0..nb {
                rows.push(vec![(idx(a.table[c][x], y), 1), (idx(c, y), -1), (idx(x, y), -1)]);
            }
        }
    }
    for x in 0..na {
        for d in 0..nb {
            for y in 0..nb {
                rows.push(vec![(idx(x, b.table[d][y]), 1), (idx(x, d), -1), (idx(x, y), -1)]);
            }
        }
    }
    let mut rel = IntMatrix::zero(rows.len(), gens);
    for (r, entries) in rows.iter().enumerate() {
        for (c, v) in entries {
            rel[(r, *c)] += BigInt::from(*v);
        }
    }
    Ok(cokernel(&rel))
}

/// Compares the presentation of N/[G,N] with A^ab ⊗ B^ab — two
/// independent computations of the same group.
pub fn check_freeindex(a: &FiniteTable, b: &FiniteTable) -> Result<(bool, FinAbGroup, FinAbGroup)> {
    let lhs = mixed_quotient_presentation(a, b)?;
    let rhs = tensor(&abelianization(a)?, &abelianization(b)?);
    Ok((lhs == rhs, lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn factors(g: &FinAbGroup) -> Vec<i64> {
        g.invariant_factors.iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn snf_examples() {
        let m = IntMatrix::identity(3);
        let (d, u, v) = smith_normal_form(&m);
        assert_eq!(d, IntMatrix::identity(3));
        assert_eq!(u.mul(&m).mul(&v), d);

        let m = IntMatrix::from_rows(vec![vec![2, 0], vec![0, 3]]);
        let (d, u, v) = smith_normal_form(&m);
        assert_eq!(d[(0, 0)], BigInt::from(1));
        assert_eq!(d[(1, 1)], BigInt::from(6));
        assert_eq!(u.mul(&m).mul(&v), d);
        assert_eq!(u.det().abs(), BigInt::from(1));
        assert_eq!(v.det().abs(), BigInt::from(1));

        let z = IntMatrix::zero(2, 3);
        let (d, _, _) = smith_normal_form(&z);
        assert_eq!(d, IntMatrix::zero(2, 3));
    }

    #[test]
    fn abelianizations() {
        assert_eq!(factors(&abelianization(&fixtures::cyclic_table(5, "z")).unwrap()), vec![5]);
        assert_eq!(factors(&abelianization(&fixtures::dihedral_table(3)).unwrap()), vec![2]);
        assert_eq!(factors(&abelianization(&fixtures::klein_table()).unwrap()), vec![2, 2]);
        // D₄ abelianizes to the Klein four-group.
        assert_eq!(factors(&abelianization(&fixtures::dihedral_table(4)).unwrap()), vec![2, 2]);
    }

    #[test]
    fn tensor_examples() {
        let z = |n: i64| FinAbGroup { invariant_factors: vec![BigInt::from(n)] };
        assert_eq!(tensor(&z(2), &z(3)), FinAbGroup::trivial());
        assert_eq!(factors(&tensor(&z(2), &z(2))), vec![2]);
        assert_eq!(factors(&tensor(&z(4), &z(6))), vec![2]);
        // Symmetry and a free factor: Z ⊗ Z/6 = Z/6.
        assert_eq!(tensor(&z(4), &z(6)), tensor(&z(6), &z(4)));
        assert_eq!(factors(&tensor(&z(0), &z(6))), vec![6]);
    }

    #[test]
    fn mixed_quotient_small_cases() {
        let (ok, lhs, _) =
            check_freeindex(&fixtures::cyclic_table(2, "x"), &fixtures::cyclic_table(2, "y"))
                .unwrap();
        assert!(ok);
        assert_eq!(factors(&lhs), vec![2]);

        let (ok, lhs, _) =
            check_freeindex(&fixtures::cyclic_table(2, "x"), &fixtures::cyclic_table(3, "y"))
                .unwrap();
        assert!(ok);
        assert_eq!(lhs, FinAbGroup::trivial());
    }
}
