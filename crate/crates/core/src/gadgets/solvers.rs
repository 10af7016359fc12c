//! Naive exponential solvers for the source problems. They work on the raw
//! instances and share nothing with the gadget constructions.

/// Size of a smallest hitting set, or `None` if some set is empty.
pub fn min_hitting_set(universe_size: usize, sets: &[Vec<usize>]) -> Option<usize> {
    if sets.iter().any(Vec::is_empty) {
        return None;
    }
    let hits = |chosen: u64| sets.iter().all(|s| s.iter().any(|&u| chosen >> u & 1 == 1));
    (0..1u64 << universe_size)
        .filter(|&chosen| hits(chosen))
        .map(|chosen| chosen.count_ones() as usize)
        .min()
}

/// Whether `adj` has a clique on `k` vertices.
pub fn has_clique(adj: &[Vec<bool>], k: usize) -> bool {
    fn extend(adj: &[Vec<bool>], chosen: &mut Vec<usize>, next: usize, k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        for v in next..adj.len() {
            if chosen.iter().all(|&u| adj[u][v]) {
                chosen.push(v);
                if extend(adj, chosen, v + 1, k) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    extend(adj, &mut Vec::new(), 0, k)
}

/// Whether the DNF `terms` (literals as `(variable, value)`) is true under
/// every assignment of `vars` variables.
pub fn is_tautology(vars: usize, terms: &[Vec<(usize, bool)>]) -> bool {
    (0..1u64 << vars).all(|a| {
        terms
            .iter()
            .any(|t| t.iter().all(|&(v, b)| (a >> v & 1 == 1) == b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hitting_sets() {
        assert_eq!(min_hitting_set(2, &[vec![0], vec![1]]), Some(2));
        assert_eq!(min_hitting_set(3, &[vec![0, 1], vec![1, 2]]), Some(1));
        assert_eq!(min_hitting_set(1, &[vec![]]), None);
    }

    #[test]
    fn cliques() {
        let tri = vec![
            vec![false, true, true],
            vec![true, false, true],
            vec![true, true, false],
        ];
        assert!(has_clique(&tri, 3));
        let path = vec![
            vec![false, true, false],
            vec![true, false, true],
            vec![false, true, false],
        ];
        assert!(has_clique(&path, 2));
        assert!(!has_clique(&path, 3));
    }

    #[test]
    fn tautologies() {
        assert!(is_tautology(1, &[vec![(0, true)], vec![(0, false)]]));
        assert!(!is_tautology(2, &[vec![(0, true), (1, true)]]));
    }
}
