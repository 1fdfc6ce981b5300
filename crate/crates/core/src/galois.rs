//! GF(2^m) arithmetic for 3 ≤ m ≤ 16, table-based.
//!
//! Fields are built from a fixed table of primitive polynomials so that the
//! same (m) always yields the same field representation everywhere.

use crate::error::{Error, Result};

/// Primitive polynomial for each supported extension degree, as a bit
/// pattern including the leading term (index 0 ↔ m = 3).
///
/// m=3: x³+x+1            m=4: x⁴+x+1           m=5: x⁵+x²+1
/// m=6: x⁶+x+1            m=7: x⁷+x³+1          m=8: x⁸+x⁴+x³+x²+1
/// m=9: x⁹+x⁴+1           m=10: x¹⁰+x³+1        m=11: x¹¹+x²+1
/// m=12: x¹²+x⁶+x⁴+x+1    m=13: x¹³+x⁴+x³+x+1   m=14: x¹⁴+x¹⁰+x⁶+x+1
/// m=15: x¹⁵+x+1          m=16: x¹⁶+x¹²+x³+x+1
const PRIMITIVE_POLYS: [u32; 14] = [
    0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003,
    0x1100B,
];

/// A binary extension field GF(2^m) with discrete exp/log tables.
/// Immutable after construction; share freely across threads.
#[derive(Debug, Clone)]
pub struct GfField {
    m: u32,
    prim_poly: u32,
    /// alpha^i for i in 0..2(q-1), doubled to skip a modulo in mul
    exp: Vec<u16>,
    /// log[a] for a in 1..q; log[0] is a sentinel and never read
    log: Vec<u32>,
}

pub type GfElem = u16;

impl GfField {
    /// Builds GF(2^m) with this crate's fixed primitive polynomial.
    pub fn new(m: u32) -> Result<Self> {
        if !(3..=16).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "extension degree m={m} outside supported range 3..=16"
            )));
        }
        let prim_poly = PRIMITIVE_POLYS[(m - 3) as usize];
        let q = 1usize << m;
        let mut exp = vec![0u16; 2 * (q - 1)];
        let mut log = vec![u32::MAX; q];
        let mut x: u32 = 1;
        for i in 0..(q - 1) {
            exp[i] = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= prim_poly;
            }
        }
        for i in (q - 1)..2 * (q - 1) {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(GfField { m, prim_poly, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field size q = 2^m.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    #[inline]
    pub fn add(&self, a: GfElem, b: GfElem) -> GfElem {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: GfElem, b: GfElem) -> GfElem {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: GfElem) -> Result<GfElem> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let qm1 = (self.size() - 1) as u32;
        Ok(self.exp[(qm1 - self.log[a as usize]) as usize])
    }

    #[inline]
    pub fn div(&self, a: GfElem, b: GfElem) -> Result<GfElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// alpha^e for any integer exponent (reduced mod q-1).
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> GfElem {
        let qm1 = (self.size() - 1) as i64;
        let e = e.rem_euclid(qm1) as usize;
        self.exp[e]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log_of(&self, a: GfElem) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    pub fn pow(&self, a: GfElem, e: u64) -> GfElem {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let qm1 = (self.size() - 1) as u64;
        let l = (self.log[a as usize] as u64 * (e % qm1)) % qm1;
        self.exp[l as usize]
    }
}
