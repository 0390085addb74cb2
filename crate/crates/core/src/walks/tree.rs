use num_bigint::BigUint;
use num_traits::Zero;

/// Closed walks of length `2k` from a fixed vertex of the infinite
/// `d`-regular tree, by DP over the distance from the root: the root has `d`
/// children, every other vertex one parent and `d - 1` children.
pub fn tree_closed_walk_count(d: u64, k: usize) -> BigUint {
    assert!(d >= 2, "tree degree must be at least 2");
    let len = 2 * k;
    let mut at_depth = vec![BigUint::zero(); len + 2];
    at_depth[0] = BigUint::from(1u32);
    for _ in 0..len {
        let mut next = vec![BigUint::zero(); len + 2];
        for (depth, c) in at_depth.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let down = if depth == 0 { d } else { d - 1 };
            if depth + 1 < next.len() {
                next[depth + 1] += c * down;
            }
            if depth > 0 {
                next[depth - 1] += c;
            }
        }
        at_depth = next;
    }
    at_depth.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks on the explicit depth-`k` truncation of the tree; a closed walk
    /// of length `2k` never gets deeper than `k`.
    fn brute_force(d: usize, k: usize) -> u64 {
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut parent = vec![usize::MAX];
        let mut frontier = vec![0];
        for depth in 0..k {
            let mut next = Vec::new();
            for &v in &frontier {
                for _ in 0..(if depth == 0 { d } else { d - 1 }) {
                    let id = children.len();
                    children.push(Vec::new());
                    parent.push(v);
                    children[v].push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }
        fn walk(v: usize, left: usize, ch: &[Vec<usize>], par: &[usize]) -> u64 {
            if left == 0 {
                return u64::from(v == 0);
            }
            let mut total = 0;
            for &c in &ch[v] {
                total += walk(c, left - 1, ch, par);
            }
            if par[v] != usize::MAX {
                total += walk(par[v], left - 1, ch, par);
            }
            total
        }
        walk(0, 2 * k, &children, &parent)
    }

    #[test]
    fn cubic_tree_small_lengths() {
        assert_eq!(tree_closed_walk_count(3, 1), BigUint::from(3u32));
        assert_eq!(tree_closed_walk_count(3, 2), BigUint::from(15u32));
        assert_eq!(tree_closed_walk_count(3, 3), BigUint::from(87u32));
        assert_eq!(tree_closed_walk_count(3, 0), BigUint::from(1u32));
    }

    #[test]
    fn matches_enumeration() {
        for d in 2..=5 {
            for k in 0..=4 {
                assert_eq!(tree_closed_walk_count(d as u64, k), BigUint::from(brute_force(d, k)), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn two_regular_tree_is_the_integer_line() {
        // central binomial coefficients
        assert_eq!(tree_closed_walk_count(2, 5), BigUint::from(252u32));
    }
}
