//! Exact-rational linear programming by the revised simplex method.
//!
//! Solves min c·x subject to Ax = b, x ≥ 0 with `BigRational` arithmetic,
//! so optimal values and dual vectors are exact and certify each other.
//! Bland's pivoting rule is used throughout, which rules out cycling.

use crate::error::{Error, Result};
use crate::Rational;
use num_traits::{One, Signed, Zero};

/// Equality-form LP: minimize costs·x subject to Ax = rhs, x ≥ 0.
/// Columns are sparse (row index, coefficient) lists.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub costs: Vec<Rational>,
    pub columns: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: Rational,
    /// Values of the structural variables.
    pub primal: Vec<Rational>,
    /// Dual vector y with yᵀA ≤ c and yᵀb = objective at optimality.
    pub dual: Vec<Rational>,
}

struct Tableau {
    m: usize,
    /// Structural columns, then one artificial per row.
    columns: Vec<Vec<(usize, Rational)>>,
    /// Explicit basis inverse, row-major m×m.
    binv: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    xb: Vec<Rational>,
    n_structural: usize,
}

impl Tableau {
    fn column(&self, j: usize) -> &[(usize, Rational)] {
        &self.columns[j]
    }

    /// d = B⁻¹·A_j.
    fn ftran(&self, j: usize) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); self.m];
        for (r, v) in self.column(j) {
            for i in 0..self.m {
                if !self.binv[i][*r].is_zero() {
                    d[i] += &self.binv[i][*r] * v;
                }
            }
        }
        d
    }

    /// y = c_Bᵀ·B⁻¹ for the given basic costs.
    fn btran(&self, cb: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (i, ci) in cb.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for r in 0..self.m {
                if !self.binv[i][r].is_zero() {
                    y[r] += ci * &self.binv[i][r];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cj: &Rational, y: &[Rational]) -> Rational {
        let mut rc = cj.clone();
        for (r, v) in self.column(j) {
            rc -= &y[*r] * v;
        }
        rc
    }

    /// Pivot: variable j enters, basis position `row` leaves; d = B⁻¹A_j.
    fn pivot(&mut self, j: usize, row: usize, d: &[Rational], theta: &Rational) {
        let piv = d[row].clone();
        for r in 0..self.m {
            self.binv[row][r] = &self.binv[row][r] / &piv;
        }
        for i in 0..self.m {
            if i == row || d[i].is_zero() {
                continue;
            }
            let factor = d[i].clone();
            for r in 0..self.m {
                if !self.binv[row][r].is_zero() {
                    let delta = &factor * &self.binv[row][r];
                    self.binv[i][r] -= delta;
                }
            }
        }
        for i in 0..self.m {
            if i == row {
                continue;
            }
            if !d[i].is_zero() {
                self.xb[i] -= theta * &d[i];
            }
        }
        self.xb[row] = theta.clone();
        self.basis[row] = j;
    }

    /// One simplex phase over the columns allowed by `allowed`, with the
    /// given cost vector (indexed over all columns). Returns Ok(()) at
    /// optimality. Bland's rule: smallest-index entering variable,
    /// smallest-index tie-break on leaving.
    fn run_phase(
        &mut self,
        costs: &[Rational],
        allowed: impl Fn(usize) -> bool,
        max_pivots: usize,
    ) -> Result<()> {
        for _ in 0..max_pivots {
            let cb: Vec<Rational> = self.basis.iter().map(|&j| costs[j].clone()).collect();
            let y = self.btran(&cb);
            let mut entering = None;
            for j in 0..self.columns.len() {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                if self.reduced_cost(j, &costs[j], &y).is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return Ok(()) };
            let d = self.ftran(j);
            // Ratio test. Artificial basic variables must stay at zero, so
            // any artificial row touched by the column leaves at ratio 0.
            let mut best: Option<(Rational, usize)> = None;
            for i in 0..self.m {
                let is_art = self.basis[i] >= self.n_structural;
                let candidate = if is_art && !d[i].is_zero() && self.xb[i].is_zero() {
                    Some(Rational::zero())
                } else if d[i].is_positive() {
                    Some(&self.xb[i] / &d[i])
                } else {
                    None
                };
                if let Some(ratio) = candidate {
                    let better = match &best {
                        None => true,
                        Some((r, bi)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((theta, row)) = best else {
                return Err(Error::ResourceLimit("linear program is unbounded".into()));
            };
            self.pivot(j, row, &d, &theta);
        }
        Err(Error::ResourceLimit("simplex pivot budget exhausted".into()))
    }
}

/// Solves the LP to proven optimality. `Infeasible` when no feasible
/// point exists; `ResourceLimit` on an unbounded problem or pivot budget.
pub fn solve(lp: &LpProblem, max_pivots: usize) -> Result<LpSolution> {
    let m = lp.rhs.len();
    let n = lp.costs.len();
    assert_eq!(lp.columns.len(), n, "cost/column count mismatch");
    for col in &lp.columns {
        for (r, _) in col {
            assert!(*r < m, "row index out of range");
        }
    }
    // Normalize to b ≥ 0, remembering flipped rows for the dual.
    let mut flip = vec![false; m];
    let mut rhs = lp.rhs.clone();
    for i in 0..m {
        if rhs[i].is_negative() {
            flip[i] = true;
            rhs[i] = -rhs[i].clone();
        }
    }
    let mut columns: Vec<Vec<(usize, Rational)>> = lp
        .columns
        .iter()
        .map(|col| {
            col.iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(r, v)| (*r, if flip[*r] { -v.clone() } else { v.clone() }))
                .collect()
        })
        .collect();
    for i in 0..m {
        columns.push(vec![(i, Rational::one())]);
    }

    let mut t = Tableau {
        m,
        columns,
        binv: (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect(),
        basis: (n..n + m).collect(),
        xb: rhs,
        n_structural: n,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1_costs = vec![Rational::zero(); n + m];
    for c in phase1_costs.iter_mut().skip(n) {
        *c = Rational::one();
    }
    t.run_phase(&phase1_costs, |_| true, max_pivots)?;
    let art_sum: Rational = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(&j, _)| j >= n)
        .map(|(_, x)| x.clone())
        .sum();
    if !art_sum.is_zero() {
        return Err(Error::Infeasible);
    }

    // Phase 2 over structural columns only; any artificial still basic
    // sits at zero and the ratio test keeps it there.
    let mut phase2_costs = lp.costs.clone();
    phase2_costs.extend(std::iter::repeat(Rational::zero()).take(m));
    t.run_phase(&phase2_costs, |j| j < n, max_pivots)?;

    let mut primal = vec![Rational::zero(); n];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            primal[j] = t.xb[i].clone();
        }
    }
    let cb: Vec<Rational> = t.basis.iter().map(|&j| phase2_costs[j].clone()).collect();
    let mut dual = t.btran(&cb);
    for i in 0..m {
        if flip[i] {
            dual[i] = -dual[i].clone();
        }
    }
    let objective: Rational =
        lp.costs.iter().zip(&primal).map(|(c, x)| c * x).sum();
    // Strong duality must hold exactly; anything else is a solver bug.
    let dual_obj: Rational = dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
    assert_eq!(objective, dual_obj, "primal/dual objective mismatch");
    Ok(LpSolution { objective, primal, dual })
}
