//! Incremental mean-oscillation queries over a growing cell set.
//!
//! The sharp maximal sweep extends an interval one cell at a time and needs
//! `mean_i |f_i - mu|` after each extension. Splitting the sum at the mean,
//!
//! `sum |f_i - mu| = 2 (mu * cnt_le - sum_le) + (sum_tot - mu * m)`,
//!
//! where `cnt_le`/`sum_le` run over inserted values `<= mu`, reduces each
//! query to one prefix lookup over value ranks. Generation stamps make the
//! per-left-endpoint reset O(1) instead of O(distinct values).

pub(crate) struct RankedSums {
    /// Distinct values, ascending; rank space of the trees.
    sorted: Vec<f64>,
    /// Rank of each original cell's value.
    rank_of: Vec<usize>,
    cnt: Vec<f64>,
    sum: Vec<f64>,
    stamp: Vec<u32>,
    generation: u32,
    inserted: usize,
    total: f64,
}

impl RankedSums {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted: Vec<f64> = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        sorted.dedup();
        let rank_of = values
            .iter()
            .map(|v| sorted.partition_point(|s| s < v))
            .collect();
        let slots = sorted.len() + 1;
        Self {
            sorted,
            rank_of,
            cnt: vec![0.0; slots],
            sum: vec![0.0; slots],
            stamp: vec![0; slots],
            generation: 0,
            inserted: 0,
            total: 0.0,
        }
    }

    /// Forget all inserted cells.
    pub fn reset(&mut self) {
        self.generation += 1;
        self.inserted = 0;
        self.total = 0.0;
    }

    /// Insert the cell at `index` (an index into the original value slice).
    pub fn insert(&mut self, index: usize) {
        let value = self.sorted[self.rank_of[index]];
        let mut pos = self.rank_of[index] + 1;
        while pos < self.cnt.len() {
            if self.stamp[pos] != self.generation {
                self.stamp[pos] = self.generation;
                self.cnt[pos] = 0.0;
                self.sum[pos] = 0.0;
            }
            self.cnt[pos] += 1.0;
            self.sum[pos] += value;
            pos += pos & pos.wrapping_neg();
        }
        self.inserted += 1;
        self.total += value;
    }

    /// `(count, sum)` of inserted values `<= x`.
    fn prefix(&self, x: f64) -> (f64, f64) {
        let mut pos = self.sorted.partition_point(|s| *s <= x);
        let (mut c, mut s) = (0.0, 0.0);
        while pos > 0 {
            if self.stamp[pos] == self.generation {
                c += self.cnt[pos];
                s += self.sum[pos];
            }
            pos -= pos & pos.wrapping_neg();
        }
        (c, s)
    }

    /// `mean_i |f_i - mu|` over the inserted cells, `mu` their mean.
    pub fn mean_oscillation(&self) -> f64 {
        if self.inserted == 0 {
            return 0.0;
        }
        let m = self.inserted as f64;
        let mu = self.total / m;
        let (cnt_le, sum_le) = self.prefix(mu);
        let dev = 2.0 * (mu * cnt_le - sum_le) + (self.total - mu * m);
        dev.max(0.0) / m
    }
}
