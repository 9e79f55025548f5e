use std::fmt;

/// Maximum number of variables a [`Mono`] can carry.
pub const MAX_VARS: usize = 16;

const HIGH: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;
const LOW: u128 = !HIGH;

/// Exponent vector packed into one byte lane per variable.
///
/// Lanes hold two's-complement `i8` exponents so Laurent variables may go
/// negative. Addition and subtraction are lane-wise without carries.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub(crate) u128);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn unit(var: usize) -> Self {
        debug_assert!(var < MAX_VARS);
        Mono(1u128 << (8 * var))
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            assert!((-128..=127).contains(&e), "exponent {e} out of range");
            m |= ((e as i8 as u8) as u128) << (8 * i);
        }
        Mono(m)
    }

    #[inline]
    pub fn exp(self, var: usize) -> i32 {
        ((self.0 >> (8 * var)) as u8) as i8 as i32
    }

    pub fn exponents(self, nvars: usize) -> Vec<i32> {
        (0..nvars).map(|v| self.exp(v)).collect()
    }

    #[inline]
    pub fn mul(self, other: Mono) -> Mono {
        Mono(((self.0 & LOW).wrapping_add(other.0 & LOW)) ^ ((self.0 ^ other.0) & HIGH))
    }

    #[inline]
    pub fn div(self, other: Mono) -> Mono {
        Mono(((self.0 | HIGH).wrapping_sub(other.0 & LOW)) ^ ((self.0 ^ !other.0) & HIGH))
    }

    /// Sum of the first `series` exponents.
    #[inline]
    pub fn degree(self, series: usize) -> u32 {
        let mut d = 0i32;
        for v in 0..series {
            d += self.exp(v);
        }
        d as u32
    }

    /// The monomial with every lane from `series` onward cleared.
    #[inline]
    pub fn series_part(self, series: usize) -> Mono {
        if series >= MAX_VARS {
            self
        } else {
            Mono(self.0 & ((1u128 << (8 * series)) - 1))
        }
    }

    #[inline]
    pub fn exact_part(self, series: usize) -> Mono {
        self.div(self.series_part(series))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<i32> = (0..MAX_VARS).map(|v| self.exp(v)).collect();
        let last = e.iter().rposition(|&x| x != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &e[..last])
    }
}
