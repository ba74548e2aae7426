//! Fixed-window bitset lamplighter state used by the simulations.

use crate::error::{Error, Result};
use crate::generators::LampState;

/// Lamplighter state whose lamps live in the window `[-half, half]`.
///
/// Word length matches [`LampState::word_length`]; the window is checked on
/// every write so a walk that leaves it is reported instead of truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastLamp {
    pub position: i64,
    half: i64,
    bits: Vec<u64>,
}

impl FastLamp {
    pub fn new(half: i64) -> Self {
        let width = (2 * half + 1) as usize;
        Self { position: 0, half, bits: vec![0; width.div_ceil(64)] }
    }

    pub fn from_state(s: &LampState, half: i64) -> Result<Self> {
        let mut f = Self::new(half);
        f.position = s.position;
        if s.position.abs() > half {
            return Err(margin(s.position, half));
        }
        for &l in &s.lamps {
            f.set(l, true)?;
        }
        Ok(f)
    }

    pub fn to_state(&self) -> LampState {
        LampState { position: self.position, lamps: self.lit_sites().collect() }
    }

    pub fn half_width(&self) -> i64 {
        self.half
    }

    #[inline]
    pub fn set(&mut self, site: i64, on: bool) -> Result<()> {
        if site.abs() > self.half {
            return Err(margin(site, self.half));
        }
        let k = (site + self.half) as usize;
        let mask = 1u64 << (k % 64);
        if on {
            self.bits[k / 64] |= mask;
        } else {
            self.bits[k / 64] &= !mask;
        }
        Ok(())
    }

    #[inline]
    pub fn lit(&self, site: i64) -> bool {
        if site.abs() > self.half {
            return false;
        }
        let k = (site + self.half) as usize;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    /// One switch-then-walk step: lamp at the current site set to `on`, then
    /// move by `dir` (±1).
    #[inline]
    pub fn step(&mut self, on: bool, dir: i64) -> Result<()> {
        self.set(self.position, on)?;
        self.position += dir;
        if self.position.abs() > self.half {
            return Err(margin(self.position, self.half));
        }
        Ok(())
    }

    pub fn min_lit(&self) -> Option<i64> {
        self.bits
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| (i * 64 + w.trailing_zeros() as usize) as i64 - self.half)
    }

    pub fn max_lit(&self) -> Option<i64> {
        self.bits
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| (i * 64 + 63 - w.leading_zeros() as usize) as i64 - self.half)
    }

    pub fn lit_sites(&self) -> impl Iterator<Item = i64> + '_ {
        (-self.half..=self.half).filter(|&s| self.lit(s))
    }

    /// Exact word length from the base point; see [`LampState::word_length`].
    #[inline]
    pub fn word_length(&self) -> u64 {
        let pos = self.position;
        let lo = self.min_lit().unwrap_or(0).min(0).min(pos);
        let hi = self.max_lit().unwrap_or(0).max(0).max(pos);
        let lit_here = self.lit(pos);
        let left = (-lo) + (hi - lo) + (hi - pos);
        let right = hi + (hi - lo) + (pos - lo);
        let left_ok = !lit_here || pos < hi || (pos == 0 && lo < 0);
        let right_ok = !lit_here || pos > lo || (pos == 0 && hi > 0);
        let l = left + if left_ok { 0 } else { 2 };
        let r = right + if right_ok { 0 } else { 2 };
        l.min(r) as u64
    }

    /// Whether any lamp in `[lo, hi]` is lit.
    pub fn any_lit_in(&self, lo: i64, hi: i64) -> bool {
        (lo.max(-self.half)..=hi.min(self.half)).any(|s| self.lit(s))
    }
}

fn margin(site: i64, half: i64) -> Error {
    Error::Clipped(format!("lamplighter walk reached site {site} outside the simulation window [-{half}, {half}]"))
}
