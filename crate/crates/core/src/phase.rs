//! Exact phases `e^{2πir}` with `r ∈ Q/Z`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::linalg::{fmt_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactPhase(Q);

impl ExactPhase {
    pub fn new(r: Q) -> Self {
        Self(r - r.floor())
    }

    pub fn zero() -> Self {
        Self(Q::zero())
    }

    /// Representative in `[0, 1)`.
    pub fn r(&self) -> Q {
        self.0
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = *self.0.numer() as f64 / *self.0.denom() as f64;
        // Quarter turns are returned exactly.
        match (self.0.numer(), self.0.denom()) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, TAU * r),
        }
    }
}

impl std::fmt::Display for ExactPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e^(2πi·{})", fmt_q(&self.0))
    }
}

impl Add for ExactPhase {
    type Output = ExactPhase;
    fn add(self, o: ExactPhase) -> ExactPhase {
        ExactPhase::new(self.0 + o.0)
    }
}

impl Sub for ExactPhase {
    type Output = ExactPhase;
    fn sub(self, o: ExactPhase) -> ExactPhase {
        ExactPhase::new(self.0 - o.0)
    }
}

impl Neg for ExactPhase {
    type Output = ExactPhase;
    fn neg(self) -> ExactPhase {
        ExactPhase::new(-self.0)
    }
}

/// Integer combination `Σ c_r e^{2πir}`, collected by phase so that equal
/// phases cancel before any rounding happens.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseSum {
    terms: BTreeMap<ExactPhase, i64>,
}

impl PhaseSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, phase: ExactPhase, coeff: i64) {
        let e = self.terms.entry(phase).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&phase);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Compensated sum of the surviving terms.
    pub fn to_complex(&self) -> Complex64 {
        let mut acc = KahanC::default();
        for (ph, &c) in &self.terms {
            acc.add(ph.to_complex() * c as f64);
        }
        acc.value()
    }
}

/// Kahan summation on both components.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanC {
    sum: Complex64,
    comp: Complex64,
}

impl KahanC {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        if self.sum.is_zero() {
            Complex64::zero()
        } else {
            self.sum
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qr};

    #[test]
    fn reduced_mod_one() {
        assert_eq!(ExactPhase::new(qr(7, 4)).r(), qr(3, 4));
        assert_eq!(ExactPhase::new(qr(-1, 3)).r(), qr(2, 3));
        assert_eq!(ExactPhase::new(q(5)), ExactPhase::zero());
        let a = ExactPhase::new(qr(2, 3));
        let b = ExactPhase::new(qr(1, 2));
        assert_eq!((a + b).r(), qr(1, 6));
        assert_eq!((a - a), ExactPhase::zero());
        assert_eq!((-b).r(), qr(1, 2));
    }

    #[test]
    fn exact_quarter_turns() {
        assert_eq!(ExactPhase::new(qr(1, 4)).to_complex(), Complex64::new(0.0, 1.0));
        assert_eq!(ExactPhase::new(qr(-1, 2)).to_complex(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn sums_cancel_exactly() {
        let mut s = PhaseSum::new();
        s.push(ExactPhase::new(qr(1, 7)), 1);
        s.push(ExactPhase::new(qr(8, 7)), -1);
        assert!(s.is_zero());
        assert_eq!(s.to_complex(), Complex64::zero());
        s.push(ExactPhase::new(qr(1, 3)), 2);
        assert_eq!(s.len(), 1);
        assert!((s.to_complex() - Complex64::from_polar(2.0, TAU / 3.0)).norm() < 1e-15);
    }
}
