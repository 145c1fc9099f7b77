/// `size`-subsets of `0..n` as sorted index vectors, in lexicographic order.
#[derive(Debug, Clone)]
pub struct LexSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl LexSubsets {
    pub fn new(n: usize, size: usize) -> Self {
        LexSubsets {
            n,
            current: (size <= n).then(|| (0..size).collect()),
        }
    }
}

impl Iterator for LexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let size = cur.len();
        let mut succ = cur.clone();
        // rightmost position that can still advance
        if let Some(i) = (0..size).rev().find(|&i| succ[i] < self.n - size + i) {
            succ[i] += 1;
            for t in i + 1..size {
                succ[t] = succ[t - 1] + 1;
            }
            self.current = Some(succ);
        }
        Some(cur)
    }
}
