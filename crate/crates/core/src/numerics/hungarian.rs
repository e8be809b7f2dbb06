//! Exact minimum-cost assignment via shortest augmenting paths with dual
//! potentials, O(n^3). Callers wanting a maximum-weight matching negate the
//! score matrix.

use super::matrix::DenseMatrix;

/// Returns `assign` with `assign[row] = col`, minimizing the total cost over
/// all perfect matchings of a square cost matrix. Deterministic, including
/// tie cases. Panics if the matrix is not square or is empty with nonzero
/// dimension mismatch.
pub fn hungarian_min(cost: &DenseMatrix) -> Vec<usize> {
    let n = cost.rows();
    assert_eq!(cost.cols(), n, "assignment needs a square cost matrix");
    if n == 0 {
        return vec![];
    }

    // 1-indexed potentials; p[j] = row matched to column j (0 = none).
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
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

    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Total cost of an assignment.
pub fn assignment_cost(cost: &DenseMatrix, assign: &[usize]) -> f64 {
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| cost.get(i, j))
        .sum()
}

/// All permutations of 0..n in lexicographic order. Intended for test
/// oracles and tiny alphabets; n! blows up fast.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::Rng;

    fn brute_force_min(cost: &DenseMatrix) -> f64 {
        all_permutations(cost.rows())
            .iter()
            .map(|p| assignment_cost(cost, p))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn three_by_three_known_optimum() {
        let c = DenseMatrix::from_row_major(
            3,
            3,
            vec![4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0],
        );
        let a = hungarian_min(&c);
        assert_eq!(assignment_cost(&c, &a), 5.0);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = Rng::seed_from_u64(21);
        for trial in 0..300 {
            let n = 1 + (trial % 6);
            let mut c = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    c.set(i, j, rng.normal());
                }
            }
            let a = hungarian_min(&c);
            // a is a permutation
            let mut seen = vec![false; n];
            for &j in &a {
                assert!(!seen[j]);
                seen[j] = true;
            }
            let got = assignment_cost(&c, &a);
            let want = brute_force_min(&c);
            assert!((got - want).abs() < 1e-9, "n={n} got {got} want {want}");
        }
    }

    #[test]
    fn maximization_by_negation() {
        let s = DenseMatrix::from_row_major(2, 2, vec![1.0, 9.0, 2.0, 3.0]);
        let mut neg = DenseMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                neg.set(i, j, -s.get(i, j));
            }
        }
        let a = hungarian_min(&neg);
        assert_eq!(a, vec![1, 0]); // 9 + 2 beats 1 + 3
    }

    #[test]
    fn permutation_enumeration_is_lexicographic() {
        let perms = all_permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0], vec![0, 1, 2]);
        assert_eq!(perms[5], vec![2, 1, 0]);
    }
}
