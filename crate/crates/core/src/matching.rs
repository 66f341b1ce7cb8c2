//! Exact minimum-cost assignment on square cost matrices.

use crate::error::{Error, Result};

/// Square K×K matrix of finite costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    size: usize,
    costs: Vec<f64>,
}

impl CostMatrix {
    pub fn new(size: usize, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != size * size {
            return Err(Error::ContractViolation(format!(
                "cost matrix of size {size} needs {} entries, got {}",
                size * size,
                costs.len()
            )));
        }
        if let Some(pos) = costs.iter().position(|c| !c.is_finite()) {
            return Err(Error::ContractViolation(format!(
                "non-finite cost at ({}, {})",
                pos / size.max(1),
                pos % size.max(1)
            )));
        }
        Ok(Self { size, costs })
    }

    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let costs = (0..size * size).map(|idx| f(idx / size, idx % size)).collect();
        Self::new(size, costs)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.costs[r * self.size + c]
    }
}

/// Optimal permutation (`row → column`) and its total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub assignment: Vec<usize>,
    pub cost: f64,
}

/// Minimum-cost perfect matching. Among optimal permutations the
/// lexicographically smallest one is returned.
pub fn min_cost_matching(costs: &CostMatrix) -> Matching {
    let n = costs.size();
    if n == 0 {
        return Matching {
            assignment: Vec::new(),
            cost: 0.0,
        };
    }
    let all_rows: Vec<usize> = (0..n).collect();
    let optimum = hungarian(costs, &all_rows, &all_rows).1;
    let scale: f64 = costs.costs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let tol = 1e-9 * (1.0 + scale * n as f64);

    // Fix rows one at a time to the smallest column that still admits an
    // optimal completion.
    let mut assignment = Vec::with_capacity(n);
    let mut fixed_cost = 0.0;
    let mut free_cols: Vec<usize> = (0..n).collect();
    for row in 0..n {
        let rest_rows: Vec<usize> = (row + 1..n).collect();
        let mut chosen = None;
        for (pos, &col) in free_cols.iter().enumerate() {
            let rest_cols: Vec<usize> = free_cols.iter().copied().filter(|&c| c != col).collect();
            let rest = if rest_rows.is_empty() {
                0.0
            } else {
                hungarian(costs, &rest_rows, &rest_cols).1
            };
            if fixed_cost + costs.get(row, col) + rest <= optimum + tol {
                chosen = Some(pos);
                break;
            }
        }
        // The optimal column always passes the test; fall back defensively to
        // the cheapest completion if rounding rejected every candidate.
        let pos = chosen.unwrap_or(0);
        let col = free_cols.remove(pos);
        fixed_cost += costs.get(row, col);
        assignment.push(col);
    }
    let cost = assignment.iter().enumerate().map(|(r, &c)| costs.get(r, c)).sum();
    Matching { assignment, cost }
}

/// Hungarian algorithm with potentials on the sub-matrix `rows × cols`
/// (equal lengths). Returns the column chosen for each row and the total cost.
fn hungarian(costs: &CostMatrix, rows: &[usize], cols: &[usize]) -> (Vec<usize>, f64) {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    let cost = |i: usize, j: usize| costs.get(rows[i - 1], cols[j - 1]);
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j]: row matched to column j (1-based, 0 = none)
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut chosen = vec![0; n];
    for j in 1..=n {
        if p[j] != 0 {
            chosen[p[j] - 1] = cols[j - 1];
        }
    }
    let total = chosen.iter().enumerate().map(|(i, &c)| costs.get(rows[i], c)).sum();
    (chosen, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_dominant_gives_identity() {
        let m = CostMatrix::from_fn(4, |r, c| if r == c { 0.5 } else { 3.0 + (r + c) as f64 }).unwrap();
        assert_eq!(min_cost_matching(&m).assignment, vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_by_two() {
        let m = CostMatrix::new(2, vec![1.0, 2.0, 3.0, 0.0]).unwrap();
        let res = min_cost_matching(&m);
        assert_eq!(res.assignment, vec![0, 1]);
        assert_eq!(res.cost, 1.0);
    }

    #[test]
    fn ties_resolve_to_smallest_permutation() {
        let m = CostMatrix::new(3, vec![1.0; 9]).unwrap();
        assert_eq!(min_cost_matching(&m).assignment, vec![0, 1, 2]);
        // both permutations cost 2
        let m = CostMatrix::new(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(min_cost_matching(&m).assignment, vec![0, 1]);
        let m = CostMatrix::new(2, vec![2.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(min_cost_matching(&m).assignment, vec![1, 0]);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(CostMatrix::new(2, vec![0.0, f64::NAN, 1.0, 1.0]).is_err());
        assert!(CostMatrix::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn empty_and_single() {
        let m = CostMatrix::new(0, vec![]).unwrap();
        assert_eq!(min_cost_matching(&m).assignment, Vec::<usize>::new());
        let m = CostMatrix::new(1, vec![7.0]).unwrap();
        assert_eq!(min_cost_matching(&m).cost, 7.0);
    }
}
