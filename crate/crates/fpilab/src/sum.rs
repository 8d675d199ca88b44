//! Deterministic and exact floating-point summation.
//!
//! Two tools live here:
//!
//! * [`pairwise_sum`] — fixed-tree pairwise summation. The reduction tree
//!   depends only on the slice length, so a value computed from per-index
//!   partials is independent of how many worker threads produced them.
//! * [`WideAccumulator`] — a fixed-point superaccumulator wide enough to hold
//!   any sum of `f64` values exactly (a Kulisch-style accumulator). Adding the
//!   same multiset of values in any order yields the same exact integer state,
//!   and [`WideAccumulator::round`] returns the correctly rounded `f64`.
//!   Window sums derived from prefix tables of accumulators are therefore
//!   bit-identical to direct per-node summation, which is what lets the
//!   summed-area fast paths match the brute-force oracles bit for bit.

/// Number of 64-bit limbs. 34 limbs = 2176 bits, covering every bit position
/// from 2^-1088 up to 2^1087 (two's complement sign bit on top). The smallest
/// f64 bit is 2^-1074 and the largest finite sum of 2^24 values stays below
/// 2^1048, so there is ample headroom on both ends.
const LIMBS: usize = 34;

/// Exponent carried by bit 0 of limb 0.
const BIT0_EXP: i32 = -1088;

/// Exact fixed-point accumulator for `f64` sums.
#[derive(Clone)]
pub struct WideAccumulator {
    limbs: [u64; LIMBS],
}

impl Default for WideAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl WideAccumulator {
    pub fn new() -> Self {
        WideAccumulator { limbs: [0; LIMBS] }
    }

    /// Add a finite `f64` exactly.
    ///
    /// Panics in debug builds on non-finite input; the callers validate
    /// field data before it reaches an accumulator.
    pub fn add(&mut self, x: f64) {
        debug_assert!(x.is_finite(), "non-finite value in exact accumulator");
        if x == 0.0 {
            return;
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        let pos = (exp - BIT0_EXP) as usize;
        let limb = pos / 64;
        let shift = pos % 64;
        let lo = mant << shift;
        let hi = if shift == 0 { 0 } else { mant >> (64 - shift) };
        if neg {
            self.sub_at(limb, lo, hi);
        } else {
            self.add_at(limb, lo, hi);
        }
    }

    // Carries and borrows that run past the top limb are dropped: the limb
    // array is a two's-complement integer modulo 2^2176.
    fn add_at(&mut self, limb: usize, lo: u64, hi: u64) {
        let (s, mut carry) = self.limbs[limb].overflowing_add(lo);
        self.limbs[limb] = s;
        let mut i = limb + 1;
        let mut pending_hi = hi;
        while (carry || pending_hi != 0) && i < LIMBS {
            let add = pending_hi.wrapping_add(carry as u64); // hi < 2^63, no wrap
            let (s, c) = self.limbs[i].overflowing_add(add);
            self.limbs[i] = s;
            carry = c;
            pending_hi = 0;
            i += 1;
        }
    }

    fn sub_at(&mut self, limb: usize, lo: u64, hi: u64) {
        let (s, mut borrow) = self.limbs[limb].overflowing_sub(lo);
        self.limbs[limb] = s;
        let mut i = limb + 1;
        let mut pending_hi = hi;
        while (borrow || pending_hi != 0) && i < LIMBS {
            let sub = pending_hi.wrapping_add(borrow as u64);
            let (s, b) = self.limbs[i].overflowing_sub(sub);
            self.limbs[i] = s;
            borrow = b;
            pending_hi = 0;
            i += 1;
        }
    }

    /// `self += other`, exactly.
    pub fn add_assign(&mut self, other: &WideAccumulator) {
        let mut carry = 0u64;
        for i in 0..LIMBS {
            let (s1, c1) = self.limbs[i].overflowing_add(other.limbs[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            self.limbs[i] = s2;
            carry = (c1 | c2) as u64;
        }
    }

    /// `self -= other`, exactly.
    pub fn sub_assign(&mut self, other: &WideAccumulator) {
        let mut borrow = 0u64;
        for i in 0..LIMBS {
            let (s1, b1) = self.limbs[i].overflowing_sub(other.limbs[i]);
            let (s2, b2) = s1.overflowing_sub(borrow);
            self.limbs[i] = s2;
            borrow = (b1 | b2) as u64;
        }
    }

    fn is_negative(&self) -> bool {
        self.limbs[LIMBS - 1] >> 63 == 1
    }

    /// Round the exact value to the nearest `f64` (ties to even).
    ///
    /// The result depends only on the exact value held, never on the order in
    /// which it was assembled.
    pub fn round(&self) -> f64 {
        let mut mag;
        let neg = self.is_negative();
        if neg {
            mag = [0u64; LIMBS];
            let mut carry = 1u64;
            for i in 0..LIMBS {
                let (s, c) = (!self.limbs[i]).overflowing_add(carry);
                mag[i] = s;
                carry = c as u64;
            }
        } else {
            mag = self.limbs;
        }
        // Highest set bit.
        let mut top = None;
        for i in (0..LIMBS).rev() {
            if mag[i] != 0 {
                top = Some(i * 64 + 63 - mag[i].leading_zeros() as usize);
                break;
            }
        }
        let top = match top {
            Some(t) => t,
            None => return 0.0,
        };
        let lead_exp = top as i32 + BIT0_EXP;
        if lead_exp > 1023 {
            return if neg { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        // Keep 53 bits for normal results; fewer when the result lands in the
        // subnormal range (rounding position pinned at 2^-1074).
        // Every input bit sits at 2^-1074 or above, so a nonzero exact value
        // always admits at least one kept bit.
        let keep = if lead_exp >= -1022 {
            53
        } else {
            (lead_exp + 1075) as usize
        };
        let mant_lsb_pos = top + 1 - keep; // bit position of the mantissa's lsb
        let mut mant = extract_bits(&mag, mant_lsb_pos, keep);
        let (guard, sticky) = if mant_lsb_pos == 0 {
            (false, false)
        } else {
            let g = get_bit(&mag, mant_lsb_pos - 1);
            let s = mant_lsb_pos >= 2 && !bit_range_empty(&mag, 0, mant_lsb_pos - 1);
            (g, s)
        };
        let mut exp = mant_lsb_pos as i32 + BIT0_EXP;
        if guard && (sticky || mant & 1 == 1) {
            mant += 1;
            if mant == 1 << keep {
                mant >>= 1;
                exp += 1;
            }
        }
        let v = ldexp_exact(mant as f64, exp);
        if neg {
            -v
        } else {
            v
        }
    }
}

fn get_bit(mag: &[u64; LIMBS], pos: usize) -> bool {
    mag[pos / 64] >> (pos % 64) & 1 == 1
}

/// True when bits `lo..hi` (exclusive) are all zero.
fn bit_range_empty(mag: &[u64; LIMBS], lo: usize, hi: usize) -> bool {
    for pos in (lo..hi).step_by(64) {
        let limb = pos / 64;
        let start = pos % 64;
        let end = (hi - limb * 64).min(64);
        let width = end - start;
        if width == 0 {
            continue;
        }
        let mask = if width == 64 { u64::MAX } else { ((1u64 << width) - 1) << start };
        if mag[limb] & mask != 0 {
            return false;
        }
    }
    true
}

/// Extract `count <= 53` bits starting at `lsb_pos`.
fn extract_bits(mag: &[u64; LIMBS], lsb_pos: usize, count: usize) -> u64 {
    let limb = lsb_pos / 64;
    let shift = lsb_pos % 64;
    let mut v = mag[limb] >> shift;
    if shift != 0 && limb + 1 < LIMBS {
        v |= mag[limb + 1] << (64 - shift);
    }
    if count == 64 {
        v
    } else {
        v & ((1u64 << count) - 1)
    }
}

/// Multiply by 2^e exactly (stepwise so intermediates never overflow and the
/// final descent into the subnormal range happens in a single exact multiply).
fn ldexp_exact(x: f64, mut e: i32) -> f64 {
    let mut x = x;
    while e > 0 {
        let s = e.min(1000);
        x *= f64::from_bits(((1023 + s) as u64) << 52);
        e -= s;
    }
    while e < 0 {
        let s = (-e).min(1000);
        x *= f64::from_bits(((1023 - s) as u64) << 52);
        e += s;
    }
    x
}

/// Exact sum of a slice, rounded once at the end.
pub fn exact_sum(values: &[f64]) -> f64 {
    let mut acc = WideAccumulator::new();
    for &v in values {
        acc.add(v);
    }
    acc.round()
}

/// Pairwise summation with a shape fixed by the slice length.
///
/// This is the default reduction for quadrature sums: much better rounding
/// behaviour than a running sum, and byte-reproducible no matter how the
/// leaves were computed.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        let mut s = 0.0;
        for &v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
