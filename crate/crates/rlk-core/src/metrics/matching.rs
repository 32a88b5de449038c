//! Token-sequence intersection and one-to-one sentence assignment.

/// Length of the longest common contiguous run between two sequences.
pub fn longest_common_run<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut best = 0usize;
    let mut prev = vec![0usize; b.len() + 1];
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            row[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            best = best.max(row[j + 1]);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    best
}

/// Size of a maximum one-to-one matching in a bipartite graph given as an
/// adjacency matrix (`adjacency[left][right]`). Kuhn's augmenting paths.
pub fn max_bipartite_matching(adjacency: &[Vec<bool>]) -> usize {
    let left = adjacency.len();
    let right = adjacency.first().map_or(0, Vec::len);
    let mut match_of_right: Vec<Option<usize>> = vec![None; right];
    let mut matched = 0usize;
    for l in 0..left {
        let mut visited = vec![false; right];
        if augment(adjacency, l, &mut visited, &mut match_of_right) {
            matched += 1;
        }
    }
    matched
}

fn augment(
    adjacency: &[Vec<bool>],
    l: usize,
    visited: &mut [bool],
    match_of_right: &mut [Option<usize>],
) -> bool {
    for r in 0..visited.len() {
        if !adjacency[l][r] || visited[r] {
            continue;
        }
        visited[r] = true;
        let reassignable = match match_of_right[r] {
            None => true,
            Some(prev) => augment(adjacency, prev, visited, match_of_right),
        };
        if reassignable {
            match_of_right[r] = Some(l);
            return true;
        }
    }
    false
}
