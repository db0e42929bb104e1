//! Asymptotic formulas evaluated in natural-log space.
//!
//! Every `log_*` function returns the natural logarithm of the quantity,
//! so values stay finite far beyond the range of `f64` itself.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::combinatorics::{bell, involution_count, preorder_count};
use crate::counting::{f1111_mobius, klazar_f0111, s11_exact};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Gamma(x)|` by the Lanczos approximation (about 15 significant
/// digits), with reflection below `1/2`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series = LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Natural log of a positive big integer, from its leading 64 bits.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64 bits");
    top.ln() + shift as f64 * LN_2
}

fn ln_ln2() -> f64 {
    LN_2.ln()
}

/// `ln[ n! e^{-(ln 2)^2/2} / (4 (ln 2)^{2n+2}) ]`, the leading asymptotic
/// of `F_1111(n)`.
pub fn log_asym_f1111(n: u64) -> f64 {
    ln_factorial(n) - LN_2 * LN_2 / 2.0 - 4f64.ln() - (2 * n + 2) as f64 * ln_ln2()
}

/// `ln[ n! (1/ln 2)^{n+1} / 2 ]`, the leading asymptotic of the number of
/// preorders.
pub fn log_asym_preorders(n: u64) -> f64 {
    ln_factorial(n) - (n + 1) as f64 * ln_ln2() - LN_2
}

/// `ln[ n^{n/2} / (sqrt 2 e^{n/2 - sqrt n + 1/4}) ]`, the leading
/// asymptotic of the number of involutions.
pub fn log_asym_involutions(n: u64) -> f64 {
    let x = n as f64;
    let lead = if n == 0 { 0.0 } else { x / 2.0 * x.ln() };
    lead - x / 2.0 + x.sqrt() - 0.25 - 0.5 * LN_2
}

/// `ln[ C_s I(n) P(n) / n! ]` with exact involution and preorder counts:
/// the leading asymptotic of `S_11(n)`.
pub fn log_asym_s11(n: u64) -> f64 {
    constants().c_s.ln() + ln_big(&involution_count(n)) + ln_big(&preorder_count(n))
        - ln_factorial(n)
}

/// Limit constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    /// `e^{-(ln 2)^2/4} / 2`, the constant in the `S_11` asymptotic.
    pub c_s: f64,
    /// `e^{-(ln 2)^2/2}`, the limiting probability that two uniform
    /// preorders have no pair sharing a block in both.
    pub limit_w0: f64,
    /// `1 / (2 ln 2)`, so that `P(n)/n! ~ A (1/ln 2)^n`.
    pub a: f64,
}

pub fn constants() -> Constants {
    Constants {
        c_s: 0.5 * (-LN_2 * LN_2 / 4.0).exp(),
        limit_w0: (-LN_2 * LN_2 / 2.0).exp(),
        a: 1.0 / (2.0 * LN_2),
    }
}

/// `n [ln n - (2 + eps) ln ln n]`, the log of the lower bound on
/// `F_0001(n)` for large `n`. Requires `n >= 3` (so that `ln ln n > 0`)
/// and `eps > 0`.
pub fn log_lower_bound_f0001(n: u64, eps: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::OutOfRange(format!(
            "the F0001 lower bound needs n >= 3, got {n}"
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::OutOfRange(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let x = n as f64;
    Ok(x * (x.ln() - (2.0 + eps) * x.ln().ln()))
}

/// `n ln(1/ln 2) + ln b(n)` with the exact Bell number `b(n)`: Klazar's
/// growth rate for `F_0111` with the `o(1)` term dropped.
pub fn log_klazar_growth(n: u64) -> f64 {
    -(n as f64) * ln_ln2() + ln_big(&bell(n))
}

/// Sequences with an exact-versus-asymptotic comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AsymClass {
    F1111,
    Preorders,
    Involutions,
    S11,
    F0111,
}

impl AsymClass {
    pub fn all() -> [AsymClass; 5] {
        [
            AsymClass::F1111,
            AsymClass::Preorders,
            AsymClass::Involutions,
            AsymClass::S11,
            AsymClass::F0111,
        ]
    }

    pub fn log_asymptotic(self, n: u64) -> f64 {
        match self {
            AsymClass::F1111 => log_asym_f1111(n),
            AsymClass::Preorders => log_asym_preorders(n),
            AsymClass::Involutions => log_asym_involutions(n),
            AsymClass::S11 => log_asym_s11(n),
            AsymClass::F0111 => log_klazar_growth(n),
        }
    }

    pub fn exact(self, n: u64) -> Result<BigUint> {
        match self {
            AsymClass::F1111 => Ok(f1111_mobius(n)),
            AsymClass::Preorders => Ok(preorder_count(n)),
            AsymClass::Involutions => Ok(involution_count(n)),
            AsymClass::S11 => s11_exact(n),
            AsymClass::F0111 => klazar_f0111(n),
        }
    }
}

impl fmt::Display for AsymClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AsymClass::F1111 => "F1111",
            AsymClass::Preorders => "P",
            AsymClass::Involutions => "I",
            AsymClass::S11 => "S11",
            AsymClass::F0111 => "F0111",
        })
    }
}

impl FromStr for AsymClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "f1111" => Ok(AsymClass::F1111),
            "p" | "preorders" => Ok(AsymClass::Preorders),
            "i" | "involutions" => Ok(AsymClass::Involutions),
            "s11" => Ok(AsymClass::S11),
            "f0111" => Ok(AsymClass::F0111),
            _ => Err(Error::OutOfRange(format!(
                "no asymptotic formula for `{s}` (expected one of: F1111, P, I, S11, F0111)"
            ))),
        }
    }
}

/// One line of an exact-versus-asymptotic comparison. `ratio` is
/// asymptotic / exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymRow {
    pub n: u64,
    pub exact: String,
    pub asymptotic: f64,
    pub ratio: f64,
}

pub fn asym_table(class: AsymClass, max_n: u64) -> Result<Vec<AsymRow>> {
    (1..=max_n)
        .map(|n| {
            let exact = class.exact(n)?;
            let log_asym = class.log_asymptotic(n);
            Ok(AsymRow {
                n,
                asymptotic: log_asym.exp(),
                ratio: (log_asym - ln_big(&exact)).exp(),
                exact: exact.to_string(),
            })
        })
        .collect()
}
