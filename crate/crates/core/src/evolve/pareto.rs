//! Fast non-dominated sorting for two minimised objectives.

/// `a` dominates `b` when it is no worse in both objectives and strictly
/// better in at least one.
#[inline]
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Front rank of every point (0 = non-dominated), computed with the
/// O(n²) bookkeeping of the NSGA-II fast non-dominated sort.
pub fn nondominated_ranks(points: &[(f64, f64)]) -> Vec<usize> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(points[p], points[q]) {
                dominated_by_me[p].push(q);
                domination_count[q] += 1;
            } else if dominates(points[q], points[p]) {
                dominated_by_me[q].push(p);
                domination_count[p] += 1;
            }
        }
    }
    let mut rank = vec![usize::MAX; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    let mut level = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            rank[p] = level;
            for &q in &dominated_by_me[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        current = next;
        level += 1;
    }
    rank
}

/// Flags the points on the first (non-dominated) front.
pub fn fast_nondominated_front(points: &[(f64, f64)]) -> Vec<bool> {
    nondominated_ranks(points).into_iter().map(|r| r == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(points: &[(f64, f64)]) -> Vec<bool> {
        points
            .iter()
            .map(|&p| !points.iter().any(|&q| q.0 <= p.0 && q.1 <= p.1 && (q.0 < p.0 || q.1 < p.1)))
            .collect()
    }

    #[test]
    fn simple_fronts() {
        assert_eq!(fast_nondominated_front(&[(1.0, 1.0), (2.0, 2.0)]), vec![true, false]);
        assert_eq!(
            fast_nondominated_front(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]),
            vec![true, true, true]
        );
        assert_eq!(fast_nondominated_front(&[]), Vec::<bool>::new());
    }

    #[test]
    fn ties_are_mutually_non_dominated() {
        assert_eq!(fast_nondominated_front(&[(1.0, 1.0), (1.0, 1.0)]), vec![true, true]);
    }

    #[test]
    fn ranks_are_layered() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (1.0, 4.0)];
        assert_eq!(nondominated_ranks(&pts), vec![0, 1, 2, 1]);
    }

    #[test]
    fn matches_pairwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let pts: Vec<(f64, f64)> = (0..64)
                .map(|_| (rng.random_range(0..20) as f64, rng.random_range(0..20) as f64))
                .collect();
            assert_eq!(fast_nondominated_front(&pts), brute_force(&pts));
        }
    }
}
