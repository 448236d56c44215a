//! Barnes G at integers, `zeta'(-1)`, and the regularized determinant of
//! the weight-`n` hyperbolic Laplacian assembled from Selberg zeta values.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, NeumaierSum};
use crate::zeta::{ZetaEvaluation, ZetaPrimeAtOne};

/// `log m!` by direct summation.
fn log_factorial(m: u64) -> f64 {
    compensated_sum((2..=m).map(|j| (j as f64).ln()))
}

/// `log G(m) = sum_{j=1}^{m-2} log j!`.
pub fn log_barnes_g_int(m: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::Domain("Barnes G is only provided at positive integers".into()));
    }
    Ok(compensated_sum((1..m.saturating_sub(1)).map(log_factorial)))
}

/// Glaisher's constant `log A` by Euler–Maclaurin summation of `k log k`.
fn log_glaisher() -> f64 {
    // B_4 .. B_16
    const BERNOULLI: [f64; 7] = [
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let n = 16.0_f64;
    let mut acc = NeumaierSum::default();
    for k in 2..=16 {
        let k = f64::from(k);
        acc.add(k * k.ln());
    }
    acc.add(-(0.5 * n * n + 0.5 * n + 1.0 / 12.0) * n.ln());
    acc.add(0.25 * n * n);
    for (i, b) in BERNOULLI.iter().enumerate() {
        let j = 2 * (i as i32 + 2);
        let jf = f64::from(j);
        acc.add(b / (jf * (jf - 1.0) * (jf - 2.0) * n.powi(j - 2)));
    }
    acc.total()
}

/// `zeta'(-1) = 1/12 - log A`.
pub fn zeta_prime_minus_one() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| 1.0 / 12.0 - log_glaisher())
}

/// The constant `c_n` with `log C_{g,n} = -c_n vol(X)`.
pub fn c_n_constant(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("weight n must be at least 1".into()));
    }
    let m = 2 * u64::from(n) - 1;
    let mf = m as f64;
    let terms = [
        log_barnes_g_int(m)? / (2.0 * PI),
        -(mf - 2.0) / (4.0 * PI) * log_factorial(m - 1),
        mf * mf / (8.0 * PI),
        -mf * (2.0 * PI).ln() / (8.0 * PI),
        -zeta_prime_minus_one() / PI,
    ];
    Ok(compensated_sum(terms))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub g: u32,
    pub n: u32,
    pub c_n: f64,
    pub log_c_gn: f64,
    pub vol: f64,
}

impl SpectralConstants {
    pub fn new(g: u32, n: u32) -> Result<Self> {
        if g < 2 {
            return Err(Error::Domain(format!("genus must be at least 2, got {g}")));
        }
        let c_n = c_n_constant(n)?;
        let vol = 4.0 * PI * f64::from(g - 1);
        Ok(Self {
            g,
            n,
            c_n,
            log_c_gn: -c_n * vol,
            vol,
        })
    }
}

/// Selberg zeta input for [`log_det_laplacian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaInput<'a> {
    /// `log Z(n)` for `n >= 2`.
    Value(&'a ZetaEvaluation),
    /// An estimate of `log Z'(1)`, accepted only with `experimental` set.
    DerivativeAtOne(&'a ZetaPrimeAtOne),
}

/// `log det* Delta_n` from `log Z(n)` (or `log Z'(1)` when `n = 1`).
pub fn log_det_laplacian(g: u32, n: u32, zeta: ZetaInput<'_>) -> Result<f64> {
    let k = SpectralConstants::new(g, n)?;
    let gm1 = f64::from(g - 1);
    match (n, zeta) {
        (1, ZetaInput::DerivativeAtOne(z)) => {
            if !z.experimental {
                return Err(Error::Experimental("n = 1 needs an experimental Z'(1) estimate".into()));
            }
            Ok(k.log_c_gn + z.log_value + (2.0 * gm1 / 3.0 + 2.0) * LN_2)
        }
        (1, ZetaInput::Value(_)) => Err(Error::Mismatch("n = 1 needs Z'(1), not Z(1)".into())),
        (_, ZetaInput::Value(z)) => {
            if z.s != f64::from(n) {
                return Err(Error::Mismatch(format!("zeta evaluated at s = {}, expected {n}", z.s)));
            }
            let nf = f64::from(n);
            Ok(k.log_c_gn + z.log_value + 2.0 * (nf + 1.0 / 3.0) * gm1 * LN_2)
        }
        (_, ZetaInput::DerivativeAtOne(_)) => Err(Error::Mismatch(format!("n = {n} needs Z({n}), not Z'(1)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended_log::ExtendedLog;
    use approx::assert_relative_eq;

    const ZETA_PRIME_M1: f64 = -0.165_421_143_700_450_929_213_919_660_242_780_642_764;
    const C1: f64 = 0.019_317_116_218_087_119_150_393_675_805_822_097_93;
    const C2: f64 = 0.136_214_492_406_575_429_727_536_053_912_811_373_03;
    const C3: f64 = 0.318_520_266_522_850_772_295_735_814_146_648_081_05;
    const C4: f64 = 0.535_855_851_685_619_278_541_289_753_497_701_841_83;

    #[test]
    fn barnes_small_values() {
        for m in 1..=3 {
            assert_eq!(log_barnes_g_int(m).unwrap(), 0.0);
        }
        assert_relative_eq!(log_barnes_g_int(5).unwrap(), 12f64.ln(), max_relative = 1e-15);
        let direct: f64 = (1..=7u64).map(|j| ((1..=j).product::<u64>() as f64).ln()).sum();
        assert_relative_eq!(log_barnes_g_int(9).unwrap(), direct, max_relative = 1e-14);
        assert!(log_barnes_g_int(0).is_err());
    }

    #[test]
    fn zeta_prime_reference() {
        let v = zeta_prime_minus_one();
        assert!((v - ZETA_PRIME_M1).abs() < 1e-14);
        assert!((1.0 / 12.0 - v - log_glaisher()).abs() == 0.0);
    }

    #[test]
    fn c_n_reference() {
        for (n, c) in [(1, C1), (2, C2), (3, C3), (4, C4)] {
            assert!((c_n_constant(n).unwrap() - c).abs() < 1e-13, "n = {n}");
        }
        let by_hand = -(2f64.ln()) / (4.0 * PI) + 9.0 / (8.0 * PI) - 3.0 * (2.0 * PI).ln() / (8.0 * PI)
            - zeta_prime_minus_one() / PI;
        assert_relative_eq!(c_n_constant(2).unwrap(), by_hand, max_relative = 1e-14);
    }

    fn evaluation(s: f64, log_value: f64) -> ZetaEvaluation {
        ZetaEvaluation {
            s,
            log_value,
            k_terms: 1,
            spectrum_cutoff: 1.0,
            tail_log_bound: ExtendedLog::finite(0.0),
        }
    }

    #[test]
    fn determinant_assembly() {
        let z = -0.3;
        let v = log_det_laplacian(2, 2, ZetaInput::Value(&evaluation(2.0, z))).unwrap();
        assert_relative_eq!(v, -4.0 * PI * C2 + z + 14.0 / 3.0 * LN_2, max_relative = 1e-13);
        let w = log_det_laplacian(2, 2, ZetaInput::Value(&evaluation(2.0, z + 1.5))).unwrap();
        assert_relative_eq!(w - v, 1.5, max_relative = 1e-12);
        assert!(matches!(
            log_det_laplacian(2, 3, ZetaInput::Value(&evaluation(2.0, z))),
            Err(Error::Mismatch(_))
        ));
        let est = ZetaPrimeAtOne { log_value: 0.1, abscissae: [1.1, 1.05, 1.025], experimental: false };
        assert!(matches!(
            log_det_laplacian(2, 1, ZetaInput::DerivativeAtOne(&est)),
            Err(Error::Experimental(_))
        ));
        let est = ZetaPrimeAtOne { experimental: true, ..est };
        let v1 = log_det_laplacian(2, 1, ZetaInput::DerivativeAtOne(&est)).unwrap();
        assert_relative_eq!(v1, -4.0 * PI * C1 + 0.1 + (2.0 / 3.0 + 2.0) * LN_2, max_relative = 1e-13);
    }
}
