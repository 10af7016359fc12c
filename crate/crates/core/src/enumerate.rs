//! Canonical enumeration orders shared by the oracle and the search
//! algorithms: subsets by increasing size, lexicographic within a size;
//! assignments of a subset in lexicographic order of the value tuple.

/// `n choose k`, saturating.
pub fn combination_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}

/// Sorted `k`-subsets of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().expect("checked above");
        let k = c.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All subsets of `items` with at most `max_size` elements, by increasing
/// size and lexicographically (by position in `items`) within a size.
pub fn subsets_by_size(items: &[usize], max_size: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..=max_size.min(items.len())).flat_map(move |k| {
        Combinations::new(items.len(), k).map(move |c| c.iter().map(|&i| items[i]).collect())
    })
}

/// Value tuple number `index` (of `2^len`) in lexicographic order: the first
/// position is the most significant bit.
pub fn assignment(len: usize, index: u64) -> impl Iterator<Item = bool> {
    (0..len).map(move |i| (index >> (len - 1 - i)) & 1 == 1)
}
