//! Dense two-phase primal simplex over an exact field.
//!
//! Problems are `maximize c·x subject to rows, x >= 0`. Pivoting follows
//! Bland's rule (smallest eligible index for both the entering column and
//! ratio-test ties), so the method terminates on degenerate problems and its
//! output is a deterministic function of the input.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T: Scalar> LinearProgram<T> {
    /// A feasibility problem (zero objective) over `num_vars` nonnegative variables.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![T::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn maximize(mut self, objective: Vec<T>) -> Self {
        assert_eq!(objective.len(), self.num_vars);
        self.objective = objective;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome<T> {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    num_structural: usize,
    first_artificial: usize,
    num_cols: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        let slack_count = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let first_artificial = n + slack_count;
        let num_cols = first_artificial + m;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![T::zero(); num_cols];
            row[..n].clone_from_slice(&c.coeffs);
            let mut b = c.rhs.clone();
            match c.relation {
                Relation::Le => {
                    row[slack] = T::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -T::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            if b.is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                b = -b;
            }
            // Every row gets an artificial; phase one drives them out.
            row[first_artificial + i] = T::one();
            basis.push(first_artificial + i);
            rows.push(row);
            rhs.push(b);
        }
        Self {
            rows,
            rhs,
            basis,
            num_structural: n,
            first_artificial,
            num_cols,
        }
    }

    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut r = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (rj, aij) in r.iter_mut().zip(row) {
                *rj = rj.clone() - cb.clone() * aij.clone();
            }
        }
        r
    }

    fn pivot(&mut self, pr: usize, pc: usize, reduced: &mut [T]) {
        let inv = T::one() / self.rows[pr][pc].clone();
        for x in self.rows[pr].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        self.rhs[pr] = self.rhs[pr].clone() * inv;
        let prow = self.rows[pr].clone();
        let prhs = self.rhs[pr].clone();
        for i in 0..self.rows.len() {
            if i == pr || self.rows[i][pc].is_zero() {
                continue;
            }
            let f = self.rows[i][pc].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        let f = reduced[pc].clone();
        if !f.is_zero() {
            for (x, p) in reduced.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations over columns `< limit`. Returns `false` when unbounded.
    fn iterate(&mut self, cost: &[T], limit: usize) -> bool {
        let mut reduced = self.reduced_costs(cost);
        loop {
            let Some(pc) = (0..limit).find(|&j| reduced[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((pr, _)) = best else {
                return false;
            };
            self.pivot(pr, pc, &mut reduced);
        }
    }

    fn run(mut self, objective: &[T]) -> LpOutcome<T> {
        // Phase one: maximize minus the sum of artificials.
        let mut phase1 = vec![T::zero(); self.num_cols];
        for c in phase1.iter_mut().skip(self.first_artificial) {
            *c = -T::one();
        }
        self.iterate(&phase1, self.num_cols);
        let infeasibility = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(b, _)| **b >= self.first_artificial)
            .fold(T::zero(), |acc, (_, v)| acc + v.clone());
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }

        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(pc) => {
                        let mut dummy = vec![T::zero(); self.num_cols];
                        self.pivot(i, pc, &mut dummy);
                    }
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let mut cost = vec![T::zero(); self.num_cols];
        cost[..self.num_structural].clone_from_slice(objective);
        if !self.iterate(&cost, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![T::zero(); self.num_structural];
        for (&b, v) in self.basis.iter().zip(&self.rhs) {
            if b < self.num_structural {
                x[b] = v.clone();
            }
        }
        let value = objective
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_int(n)
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let mut lp = LinearProgram::new(2).maximize(vec![q(3), q(5)]);
        lp.constrain(vec![q(1), q(0)], Relation::Le, q(4));
        lp.constrain(vec![q(0), q(2)], Relation::Le, q(12));
        lp.constrain(vec![q(3), q(2)], Relation::Le, q(18));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal { x: vec![q(2), q(6)], value: q(36) }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<BigRational>::new(1);
        lp.constrain(vec![q(1)], Relation::Ge, q(2));
        lp.constrain(vec![q(1)], Relation::Le, q(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2).maximize(vec![q(1), q(0)]);
        lp.constrain(vec![q(1), q(-1)], Relation::Le, q(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_with_negative_rhs_and_redundancy() {
        // x + y = 1, -x - y = -1 (redundant), x - y = 0  ->  (1/2, 1/2)
        let mut lp = LinearProgram::<BigRational>::new(2);
        lp.constrain(vec![q(1), q(1)], Relation::Eq, q(1));
        lp.constrain(vec![q(-1), q(-1)], Relation::Eq, q(-1));
        lp.constrain(vec![q(1), q(-1)], Relation::Eq, q(0));
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => {
                let half = BigRational::from_ratio(1, 2);
                assert_eq!(x, vec![half.clone(), half]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling instance; Bland's rule must terminate.
        let f = |n, d| BigRational::from_ratio(n, d);
        let mut lp = LinearProgram::new(4).maximize(vec![f(3, 4), f(-150, 1), f(1, 50), f(-6, 1)]);
        lp.constrain(vec![f(1, 4), f(-60, 1), f(-1, 25), f(9, 1)], Relation::Le, q(0));
        lp.constrain(vec![f(1, 2), f(-90, 1), f(-1, 50), f(3, 1)], Relation::Le, q(0));
        lp.constrain(vec![q(0), q(0), q(1), q(0)], Relation::Le, q(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, f(1, 20)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
