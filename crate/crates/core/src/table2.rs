//! Printed reference data: exact collocation values on the triangle
//! `(0,0), (h,0), (0,h)` and the general sparsity pattern.
//!
//! Entries are stored as `num / (den · √2^root2) · h^(−k)`, where `k` is
//! the derivative order of the row functional.

use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    /// 1-based functional index.
    pub row: usize,
    /// 1-based basis index.
    pub col: usize,
    pub num: i64,
    pub den: i64,
    pub root2: bool,
}

impl Entry {
    pub fn value(&self, h: f64) -> f64 {
        let mut v = self.num as f64 / self.den as f64;
        if self.root2 {
            v /= std::f64::consts::SQRT_2;
        }
        v / h.powi(derivative_order(self.row) as i32)
    }
}

/// Derivative order of functional `row` (1-based).
pub fn derivative_order(row: usize) -> usize {
    match row {
        1..=3 | 28 => 0,
        4..=9 | 19..=21 => 1,
        _ => 2,
    }
}

pub const TABLE2: [Entry; 117] = [
    Entry { row: 1, col: 1, num: 1, den: 1, root2: false },
    Entry { row: 2, col: 2, num: 1, den: 1, root2: false },
    Entry { row: 3, col: 3, num: 1, den: 1, root2: false },
    Entry { row: 4, col: 1, num: -9, den: 1, root2: false },
    Entry { row: 4, col: 4, num: 9, den: 1, root2: false },
    Entry { row: 5, col: 1, num: -9, den: 1, root2: false },
    Entry { row: 5, col: 5, num: 9, den: 1, root2: false },
    Entry { row: 6, col: 2, num: 9, den: 1, root2: false },
    Entry { row: 6, col: 7, num: -9, den: 1, root2: false },
    Entry { row: 7, col: 6, num: 9, den: 1, root2: false },
    Entry { row: 7, col: 7, num: -9, den: 1, root2: false },
    Entry { row: 8, col: 8, num: -9, den: 1, root2: false },
    Entry { row: 8, col: 9, num: 9, den: 1, root2: false },
    Entry { row: 9, col: 3, num: 9, den: 1, root2: false },
    Entry { row: 9, col: 8, num: -9, den: 1, root2: false },
    Entry { row: 10, col: 1, num: 54, den: 1, root2: false },
    Entry { row: 10, col: 4, num: -81, den: 1, root2: false },
    Entry { row: 10, col: 10, num: 27, den: 1, root2: false },
    Entry { row: 11, col: 1, num: 54, den: 1, root2: false },
    Entry { row: 11, col: 5, num: -81, den: 1, root2: false },
    Entry { row: 11, col: 11, num: 27, den: 1, root2: false },
    Entry { row: 12, col: 2, num: 54, den: 1, root2: false },
    Entry { row: 12, col: 7, num: -81, den: 1, root2: false },
    Entry { row: 12, col: 13, num: 27, den: 1, root2: false },
    Entry { row: 13, col: 6, num: 27, den: 1, root2: false },
    Entry { row: 13, col: 7, num: 27, den: 1, root2: false },
    Entry { row: 13, col: 12, num: 27, den: 1, root2: false },
    Entry { row: 13, col: 13, num: 27, den: 1, root2: false },
    Entry { row: 13, col: 17, num: -108, den: 1, root2: false },
    Entry { row: 14, col: 8, num: 27, den: 1, root2: false },
    Entry { row: 14, col: 9, num: 27, den: 1, root2: false },
    Entry { row: 14, col: 14, num: 27, den: 1, root2: false },
    Entry { row: 14, col: 15, num: 27, den: 1, root2: false },
    Entry { row: 14, col: 18, num: -108, den: 1, root2: false },
    Entry { row: 15, col: 3, num: 54, den: 1, root2: false },
    Entry { row: 15, col: 8, num: -81, den: 1, root2: false },
    Entry { row: 15, col: 14, num: 27, den: 1, root2: false },
    Entry { row: 16, col: 1, num: 54, den: 1, root2: false },
    Entry { row: 16, col: 4, num: -54, den: 1, root2: false },
    Entry { row: 16, col: 5, num: -54, den: 1, root2: false },
    Entry { row: 16, col: 16, num: 54, den: 1, root2: false },
    Entry { row: 17, col: 6, num: 54, den: 1, root2: false },
    Entry { row: 17, col: 7, num: -27, den: 1, root2: false },
    Entry { row: 17, col: 13, num: 27, den: 1, root2: false },
    Entry { row: 17, col: 17, num: -54, den: 1, root2: false },
    Entry { row: 18, col: 8, num: -27, den: 1, root2: false },
    Entry { row: 18, col: 9, num: 54, den: 1, root2: false },
    Entry { row: 18, col: 14, num: 27, den: 1, root2: false },
    Entry { row: 18, col: 18, num: -54, den: 1, root2: false },
    Entry { row: 19, col: 4, num: 9, den: 8, root2: false },
    Entry { row: 19, col: 7, num: 9, den: 16, root2: false },
    Entry { row: 19, col: 10, num: 27, den: 4, root2: false },
    Entry { row: 19, col: 13, num: 81, den: 16, root2: false },
    Entry { row: 19, col: 16, num: -9, den: 8, root2: false },
    Entry { row: 19, col: 17, num: -9, den: 8, root2: false },
    Entry { row: 19, col: 19, num: -45, den: 4, root2: false },
    Entry { row: 20, col: 6, num: 27, den: 16, root2: true },
    Entry { row: 20, col: 9, num: 27, den: 16, root2: true },
    Entry { row: 20, col: 12, num: 189, den: 16, root2: true },
    Entry { row: 20, col: 15, num: 189, den: 16, root2: true },
    Entry { row: 20, col: 17, num: -9, den: 4, root2: true },
    Entry { row: 20, col: 18, num: -9, den: 4, root2: true },
    Entry { row: 20, col: 20, num: -45, den: 2, root2: true },
    Entry { row: 21, col: 5, num: 9, den: 8, root2: false },
    Entry { row: 21, col: 8, num: 9, den: 16, root2: false },
    Entry { row: 21, col: 11, num: 27, den: 4, root2: false },
    Entry { row: 21, col: 14, num: 81, den: 16, root2: false },
    Entry { row: 21, col: 16, num: -9, den: 8, root2: false },
    Entry { row: 21, col: 18, num: -9, den: 8, root2: false },
    Entry { row: 21, col: 21, num: -45, den: 4, root2: false },
    Entry { row: 22, col: 4, num: 54, den: 1, root2: false },
    Entry { row: 22, col: 13, num: 36, den: 1, root2: false },
    Entry { row: 22, col: 16, num: -81, den: 1, root2: false },
    Entry { row: 22, col: 19, num: -90, den: 1, root2: false },
    Entry { row: 22, col: 22, num: 54, den: 1, root2: false },
    Entry { row: 22, col: 23, num: 27, den: 1, root2: false },
    Entry { row: 23, col: 5, num: 54, den: 1, root2: false },
    Entry { row: 23, col: 14, num: 36, den: 1, root2: false },
    Entry { row: 23, col: 16, num: -81, den: 1, root2: false },
    Entry { row: 23, col: 21, num: -90, den: 1, root2: false },
    Entry { row: 23, col: 22, num: 27, den: 1, root2: false },
    Entry { row: 23, col: 23, num: 54, den: 1, root2: false },
    Entry { row: 24, col: 6, num: 243, den: 4, root2: false },
    Entry { row: 24, col: 12, num: 171, den: 4, root2: false },
    Entry { row: 24, col: 15, num: 225, den: 2, root2: false },
    Entry { row: 24, col: 17, num: -108, den: 1, root2: false },
    Entry { row: 24, col: 20, num: -270, den: 1, root2: false },
    Entry { row: 24, col: 24, num: 108, den: 1, root2: false },
    Entry { row: 24, col: 25, num: 54, den: 1, root2: false },
    Entry { row: 25, col: 7, num: 27, den: 2, root2: false },
    Entry { row: 25, col: 10, num: 81, den: 1, root2: false },
    Entry { row: 25, col: 13, num: 63, den: 2, root2: false },
    Entry { row: 25, col: 17, num: -27, den: 1, root2: false },
    Entry { row: 25, col: 19, num: -180, den: 1, root2: false },
    Entry { row: 25, col: 24, num: 27, den: 1, root2: false },
    Entry { row: 25, col: 25, num: 54, den: 1, root2: false },
    Entry { row: 26, col: 8, num: 27, den: 2, root2: false },
    Entry { row: 26, col: 11, num: 81, den: 1, root2: false },
    Entry { row: 26, col: 14, num: 63, den: 2, root2: false },
    Entry { row: 26, col: 18, num: -27, den: 1, root2: false },
    Entry { row: 26, col: 21, num: -180, den: 1, root2: false },
    Entry { row: 26, col: 26, num: 54, den: 1, root2: false },
    Entry { row: 26, col: 27, num: 27, den: 1, root2: false },
    Entry { row: 27, col: 9, num: 243, den: 2, root2: false },
    Entry { row: 27, col: 12, num: 225, den: 1, root2: false },
    Entry { row: 27, col: 15, num: 171, den: 2, root2: false },
    Entry { row: 27, col: 18, num: -216, den: 1, root2: false },
    Entry { row: 27, col: 20, num: -540, den: 1, root2: false },
    Entry { row: 27, col: 26, num: 108, den: 1, root2: false },
    Entry { row: 27, col: 27, num: 216, den: 1, root2: false },
    Entry { row: 28, col: 22, num: 1, den: 12, root2: false },
    Entry { row: 28, col: 23, num: 1, den: 12, root2: false },
    Entry { row: 28, col: 24, num: 1, den: 12, root2: false },
    Entry { row: 28, col: 25, num: 1, den: 12, root2: false },
    Entry { row: 28, col: 26, num: 1, den: 12, root2: false },
    Entry { row: 28, col: 27, num: 1, den: 12, root2: false },
    Entry { row: 28, col: 28, num: 1, den: 2, root2: false },
];

/// Nonzero pattern for a general triangle; row `i` column `j` is `x` when
/// `λ_i(B_j)` may be nonzero.
pub const TABLE1: [&str; 28] = [
    "x...........................",
    ".x..........................",
    "..x.........................",
    "x..xx.......................",
    "x..xx.......................",
    ".x...xx.....................",
    ".x...xx.....................",
    "..x....xx...................",
    "..x....xx...................",
    "x..xx....xx....x............",
    "x..xx....xx....x............",
    ".x...xx....xx...x...........",
    ".x...xx....xx...x...........",
    "..x....xx....xx..x..........",
    "..x....xx....xx..x..........",
    "x..xx....xx....x............",
    ".x...xx....xx...x...........",
    "..x....xx....xx..x..........",
    "...x..x..x..x..xx.x.........",
    ".....x..x..x..x.xx.x........",
    "....x..x..x..x.x.x..x.......",
    "...x.....x..x..x..x..xx.....",
    "....x.....x..x.x....xxx.....",
    ".....x.....x..x.x..x...xx...",
    "......x..x..x...x.x....xx...",
    ".......x..x..x...x..x....xx.",
    "........x..x..x..x.x.....xx.",
    ".....................xxxxxxx",
];

/// The printed matrix for edge length `h`.
pub fn table2_matrix(h: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(28, 28);
    for e in &TABLE2 {
        m[(e.row - 1, e.col - 1)] = e.value(h);
    }
    m
}

pub fn table1_marked(row: usize, col: usize) -> bool {
    TABLE1[row].as_bytes()[col] == b'x'
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table2_within_table1_pattern() {
        for e in &TABLE2 {
            assert!(table1_marked(e.row - 1, e.col - 1), "{e:?}");
        }
    }

    #[test]
    fn sample_entries() {
        let m = table2_matrix(2.0);
        assert_eq!(m[(9, 0)], 13.5);
        assert_eq!(m[(27, 21)], 1.0 / 12.0);
        let m = table2_matrix(1.0);
        assert_eq!(m[(3, 0)], -9.0);
        assert!((m[(19, 5)] - 27.0 / (16.0 * 2f64.sqrt())).abs() < 1e-15);
    }
}
