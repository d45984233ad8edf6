//! Bipartite matching on bitmask adjacency (left side up to any size, right side up to 64).

/// Maximum matching by augmenting paths. `adj[l]` is the set of right
/// vertices adjacent to left vertex `l`. Returns the partner of each left vertex.
pub fn max_matching(adj: &[u64], right: usize) -> Vec<Option<usize>> {
    debug_assert!(right <= 64);
    let mut match_r: Vec<Option<usize>> = vec![None; right];
    let mut match_l: Vec<Option<usize>> = vec![None; adj.len()];
    for l in 0..adj.len() {
        let mut seen = 0u64;
        augment(l, adj, &mut match_l, &mut match_r, &mut seen);
    }
    match_l
}

fn augment(l: usize, adj: &[u64], match_l: &mut [Option<usize>], match_r: &mut [Option<usize>], seen: &mut u64) -> bool {
    let mut cand = adj[l] & !*seen;
    while cand != 0 {
        let r = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        *seen |= 1 << r;
        let free = match match_r[r] {
            None => true,
            Some(other) => augment(other, adj, match_l, match_r, seen),
        };
        if free {
            match_l[l] = Some(r);
            match_r[r] = Some(l);
            return true;
        }
    }
    false
}

pub fn matching_size(adj: &[u64], right: usize) -> usize {
    max_matching(adj, right).iter().flatten().count()
}

/// Whether every left vertex can be matched.
pub fn saturates_left(adj: &[u64], right: usize) -> bool {
    if adj.len() > right {
        return false;
    }
    matching_size(adj, right) == adj.len()
}

/// A set of left vertices whose joint neighbourhood is smaller than the set,
/// or `None` when a left-saturating matching exists.
pub fn hall_violator(adj: &[u64], right: usize) -> Option<Vec<usize>> {
    let match_l = max_matching(adj, right);
    let start = match_l.iter().position(|m| m.is_none())?;
    // alternating reachability from an unmatched left vertex
    let mut match_r = vec![None; right];
    for (l, m) in match_l.iter().enumerate() {
        if let Some(r) = m {
            match_r[*r] = Some(l);
        }
    }
    let mut left = vec![false; adj.len()];
    let mut stack = vec![start];
    left[start] = true;
    while let Some(l) = stack.pop() {
        let mut cand = adj[l];
        while cand != 0 {
            let r = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if let Some(l2) = match_r[r] {
                if !left[l2] {
                    left[l2] = true;
                    stack.push(l2);
                }
            }
        }
    }
    Some((0..adj.len()).filter(|&l| left[l]).collect())
}

/// Transpose of a bitmask adjacency with `left` rows.
pub fn transpose(adj: &[u64], right: usize) -> Vec<u64> {
    let mut t = vec![0u64; right];
    for (l, &row) in adj.iter().enumerate() {
        let mut m = row;
        while m != 0 {
            let r = m.trailing_zeros() as usize;
            m &= m - 1;
            t[r] |= 1 << l;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_and_deficient() {
        assert!(saturates_left(&[0b01, 0b10], 2));
        assert!(saturates_left(&[0b11, 0b01], 2));
        assert!(!saturates_left(&[0b01, 0b01], 2));
        assert_eq!(hall_violator(&[0b01, 0b01, 0b11], 2), Some(vec![0, 1]));
        assert_eq!(hall_violator(&[0b01, 0b01, 0b110], 3), Some(vec![0, 1]));
        assert_eq!(hall_violator(&[0b11, 0b11], 2), None);
    }

    fn brute(adj: &[u64], right: usize) -> usize {
        fn go(i: usize, used: u64, adj: &[u64], right: usize) -> usize {
            if i == adj.len() {
                return 0;
            }
            let mut best = go(i + 1, used, adj, right);
            for r in 0..right {
                if adj[i] >> r & 1 == 1 && used >> r & 1 == 0 {
                    best = best.max(1 + go(i + 1, used | 1 << r, adj, right));
                }
            }
            best
        }
        go(0, 0, adj, right)
    }

    proptest! {
        #[test]
        fn matches_brute_force(rows in proptest::collection::vec(0u64..64, 0..6)) {
            prop_assert_eq!(matching_size(&rows, 6), brute(&rows, 6));
            if let Some(v) = hall_violator(&rows, 6) {
                let nb = v.iter().fold(0u64, |m, &l| m | rows[l]).count_ones() as usize;
                prop_assert!(nb < v.len());
            } else {
                prop_assert_eq!(matching_size(&rows, 6), rows.len());
            }
        }
    }
}
