//! Parameter sequences `ψ_n`, `ν_n`, `ξ_n` and the adaptive inertial
//! coefficient bound.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real sequence indexed by the iteration counter.
#[derive(Clone)]
pub enum Rate {
    /// `c / (n+1)²`
    InverseSquare(f64),
    /// `c / (n+1)`
    Harmonic(f64),
    Constant(f64),
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl Rate {
    pub fn at(&self, n: usize) -> f64 {
        let k = (n + 1) as f64;
        match self {
            Rate::InverseSquare(c) => c / (k * k),
            Rate::Harmonic(c) => c / k,
            Rate::Constant(c) => *c,
            Rate::Custom(f) => f(n),
        }
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::InverseSquare(c) => write!(f, "{c}/(n+1)^2"),
            Rate::Harmonic(c) => write!(f, "{c}/(n+1)"),
            Rate::Constant(c) => write!(f, "{c}"),
            Rate::Custom(_) => f.write_str("<custom>"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaMode {
    /// `δ_n = δ̄_n`, the largest coefficient the adaptive bound allows.
    Adaptive,
    Constant(f64),
    /// No inertia; recovers the non-inertial Halpern/viscosity schemes.
    Zero,
}

#[derive(Debug, Clone)]
pub struct Schedules {
    pub psi: Rate,
    pub nu: Rate,
    pub xi: Rate,
    eta: f64,
    pub delta: DeltaMode,
    /// Added to `n` before evaluating `psi`, `nu` and `xi`. A value of 1
    /// keeps `ν_n` strictly inside `(0, 1)`.
    pub index_offset: usize,
}

impl Default for Schedules {
    fn default() -> Self {
        Schedules {
            psi: Rate::InverseSquare(0.01),
            nu: Rate::Harmonic(1.0),
            xi: Rate::InverseSquare(10.0),
            eta: 4.0,
            delta: DeltaMode::Adaptive,
            index_offset: 0,
        }
    }
}

impl Schedules {
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta >= 3.0) {
            return Err(Error::Config(format!("eta must be at least 3, got {eta}")));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn with_delta(mut self, delta: DeltaMode) -> Result<Self> {
        if let DeltaMode::Constant(v) = delta {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "constant delta must be nonnegative, got {v}"
                )));
            }
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn with_psi(mut self, psi: Rate) -> Self {
        self.psi = psi;
        self
    }

    pub fn psi(&self, n: usize) -> f64 {
        self.psi.at(n + self.index_offset)
    }

    pub fn nu(&self, n: usize) -> f64 {
        self.nu.at(n + self.index_offset)
    }

    pub fn xi(&self, n: usize) -> f64 {
        self.xi.at(n + self.index_offset)
    }

    pub fn delta_bar(&self, n: usize, diff_norm: f64) -> f64 {
        delta_bar(n, diff_norm, self.xi(n), self.eta)
    }

    /// Inertial coefficient for step `n` given `‖x_n − x_{n−1}‖`.
    pub fn delta(&self, n: usize, diff_norm: f64) -> f64 {
        match self.delta {
            DeltaMode::Adaptive => self.delta_bar(n, diff_norm),
            DeltaMode::Constant(v) => v,
            DeltaMode::Zero => 0.0,
        }
    }
}

/// Upper bound on the inertial coefficient:
/// `min{ξ_n/‖x_n − x_{n−1}‖, (n−1)/(n+η−1)}`, or just the second term when
/// the iterates coincide. Negative values (only at `n = 0`) clamp to zero.
pub fn delta_bar(n: usize, diff_norm: f64, xi_n: f64, eta: f64) -> f64 {
    let n = n as f64;
    let momentum = (n - 1.0) / (n + eta - 1.0);
    let bound = if diff_norm > 0.0 {
        let mut ratio = xi_n / diff_norm;
        // keep δ̄_n·‖x_n − x_{n−1}‖ ≤ ξ_n exact in floating point
        while ratio > 0.0 && ratio * diff_norm > xi_n {
            ratio = f64::from_bits(ratio.to_bits() - 1);
        }
        ratio.min(momentum)
    } else {
        momentum
    };
    bound.max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct D2Report {
    /// `δ_n‖x_n − x_{n−1}‖/ν_n` per iteration.
    pub ratios: Vec<f64>,
    pub trending_to_zero: bool,
}

/// Diagnostic for the condition `δ_n‖x_n − x_{n−1}‖/ν_n → 0` over a finite
/// trace of `(δ_n, ν_n, ‖x_n − x_{n−1}‖)` triples.
///
/// The verdict holds when the last ratio is below `tolerance` and either
/// every ratio is zero or the last one is below the first nonzero one.
/// Leading zeros are skipped because the adaptive rule forces `δ_0 = δ_1 = 0`.
pub fn check_d2(trace: &[(f64, f64, f64)], tolerance: f64) -> Result<D2Report> {
    if trace.is_empty() {
        return Err(Error::Config("D2 check needs a nonempty trace".into()));
    }
    let ratios: Vec<f64> = trace
        .iter()
        .map(|&(delta, nu, diff)| if delta == 0.0 { 0.0 } else { delta * diff / nu })
        .collect();
    let last = ratios[ratios.len() - 1];
    let trending_to_zero = last < tolerance
        && match ratios.iter().find(|r| **r != 0.0) {
            Some(first) => last < *first,
            None => true,
        };
    Ok(D2Report {
        ratios,
        trending_to_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_sequences() {
        let s = Schedules::default();
        assert_eq!(s.psi(0), 0.01);
        assert_eq!(s.psi(9), 1.0 / 10000.0);
        assert_eq!(s.psi(1), 0.0025);
        assert_eq!(s.nu(0), 1.0);
        assert_eq!(s.nu(1), 0.5);
        assert_eq!(s.nu(99), 0.01);
        assert_eq!(s.xi(0), 10.0);
        assert_eq!(s.xi(9), 0.1);
        assert_eq!(s.eta(), 4.0);
    }

    #[test]
    fn index_offset_shifts_sequences() {
        let s = Schedules {
            index_offset: 1,
            ..Schedules::default()
        };
        assert_eq!(s.nu(0), 0.5);
        assert!(s.nu(0) < 1.0);
    }

    #[test]
    fn delta_bar_examples() {
        let s = Schedules::default();
        assert_eq!(s.delta_bar(1, 0.7), 0.0);
        assert_eq!(s.delta_bar(1, 0.0), 0.0);
        assert!((s.delta_bar(9, 0.3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.delta_bar(9, 0.0) - 8.0 / 12.0).abs() < 1e-15);
        // n = 0 gives a negative momentum term
        assert_eq!(s.delta_bar(0, 0.0), 0.0);
        assert_eq!(s.delta_bar(0, 2.0), 0.0);
    }

    #[test]
    fn delta_modes() {
        let s = Schedules::default().with_delta(DeltaMode::Zero).unwrap();
        assert_eq!(s.delta(50, 1.0), 0.0);
        let s = s.with_delta(DeltaMode::Constant(0.5)).unwrap();
        assert_eq!(s.delta(50, 1.0), 0.5);
        assert!(Schedules::default()
            .with_delta(DeltaMode::Constant(-0.1))
            .is_err());
    }

    #[test]
    fn eta_must_be_at_least_three() {
        assert!(Schedules::default().with_eta(2.0).is_err());
        assert!(Schedules::default().with_eta(f64::NAN).is_err());
        assert_eq!(Schedules::default().with_eta(3.0).unwrap().eta(), 3.0);
    }

    #[test]
    fn xi_over_nu_decreases() {
        let s = Schedules::default();
        let ratios: Vec<f64> = (0..1000).map(|n| s.xi(n) / s.nu(n)).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn d2_all_zero_is_trending() {
        let trace: Vec<_> = (0..10).map(|n| (0.0, 1.0 / (n + 1) as f64, 1.0)).collect();
        let report = check_d2(&trace, 1e-6).unwrap();
        assert!(report.ratios.iter().all(|&r| r == 0.0));
        assert!(report.trending_to_zero);
    }

    #[test]
    fn d2_adaptive_bound() {
        let s = Schedules::default();
        let trace: Vec<_> = (0..2000)
            .map(|n| {
                let diff = 1.0 / (1.0 + n as f64).sqrt();
                (s.delta(n, diff), s.nu(n), diff)
            })
            .collect();
        let report = check_d2(&trace, 0.01).unwrap();
        for (n, r) in report.ratios.iter().enumerate() {
            assert!(*r <= 10.0 / (n + 1) as f64 * (1.0 + 1e-12));
        }
        assert!(report.trending_to_zero);
    }

    #[test]
    fn d2_constant_delta_fails() {
        let trace: Vec<_> = (0..200).map(|n| (0.5, 1.0 / (n + 1) as f64, 0.3)).collect();
        let report = check_d2(&trace, 0.01).unwrap();
        assert!(!report.trending_to_zero);
        assert!(report.ratios.last().unwrap() > report.ratios.first().unwrap());
    }

    #[test]
    fn d2_rejects_empty() {
        assert!(check_d2(&[], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn delta_bar_times_diff_bounded_by_xi(n in 1usize..10_000, d in 1e-12f64..1e6) {
            let s = Schedules::default();
            let db = s.delta_bar(n, d);
            prop_assert!(db * d <= s.xi(n));
            prop_assert!(db >= 0.0);
            prop_assert!(db <= (n as f64 - 1.0) / (n as f64 + s.eta() - 1.0));
            prop_assert!(db < 1.0);
        }

        #[test]
        fn delta_bar_nonincreasing_in_diff(n in 0usize..10_000, a in 0f64..1e3, b in 0f64..1e3) {
            let s = Schedules::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(s.delta_bar(n, hi) <= s.delta_bar(n, lo));
        }
    }
}
