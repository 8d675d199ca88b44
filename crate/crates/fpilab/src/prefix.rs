//! Exact n-dimensional prefix tables (summed-area tables).
//!
//! Entries are [`WideAccumulator`]s rather than rounded doubles: a window sum
//! assembled by inclusion–exclusion is then the *exact* sum of the covered
//! masses, and rounding it once yields the same `f64` as adding the masses
//! directly in any order. This is what makes the accelerated maximal-function
//! paths bit-identical to their brute-force oracles.

use crate::sum::WideAccumulator;

pub struct ExactPrefixTable {
    dim: usize,
    side: usize, // N + 1 entries per axis
    stride: [usize; 3],
    data: Vec<WideAccumulator>,
}

impl ExactPrefixTable {
    /// Build from row-major cell masses on an `res^dim` lattice.
    pub fn build(dim: usize, res: usize, masses: &[f64]) -> ExactPrefixTable {
        assert_eq!(masses.len(), res.pow(dim as u32));
        let side = res + 1;
        let total = side.pow(dim as u32);
        let mut stride = [0usize; 3];
        let mut s = 1;
        for a in (0..dim).rev() {
            stride[a] = s;
            s *= side;
        }
        let mut data = vec![WideAccumulator::new(); total];
        // Place mass of cell (i0,..) at table position (i0+1,..).
        let mut cell = [0usize; 3];
        for (lin, &m) in masses.iter().enumerate() {
            let mut rem = lin;
            for a in (0..dim).rev() {
                cell[a] = rem % res;
                rem /= res;
            }
            let mut pos = 0;
            for a in 0..dim {
                pos += (cell[a] + 1) * stride[a];
            }
            data[pos].add(m);
        }
        // Running sums along each axis. Scanning in increasing linear order
        // guarantees `pos - stride[a]` is already final for this pass.
        for a in 0..dim {
            let st = stride[a];
            for pos in 0..total {
                let coord = pos / st % side;
                if coord >= 1 {
                    let (left, right) = data.split_at_mut(pos);
                    right[0].add_assign(&left[pos - st]);
                }
            }
        }
        ExactPrefixTable { dim, side, stride, data }
    }

    /// Exact sum of the cell masses over the index window `[lo, hi)`.
    pub fn window_acc(&self, lo: &[usize; 3], hi: &[usize; 3]) -> WideAccumulator {
        let mut acc = WideAccumulator::new();
        for mask in 0..1u32 << self.dim {
            let mut pos = 0;
            let mut sign = false; // parity of lo-choices
            for a in 0..self.dim {
                let take_lo = mask >> a & 1 == 1;
                let c = if take_lo { lo[a] } else { hi[a] };
                debug_assert!(c < self.side);
                pos += c * self.stride[a];
                sign ^= take_lo;
            }
            if sign {
                acc.sub_assign(&self.data[pos]);
            } else {
                acc.add_assign(&self.data[pos]);
            }
        }
        acc
    }

    /// Window sum rounded to `f64`.
    pub fn window_sum(&self, lo: &[usize; 3], hi: &[usize; 3]) -> f64 {
        self.window_acc(lo, hi).round()
    }
}
