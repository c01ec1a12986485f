//! Discount functions and the discounted stream `x ↦ x^(α)`.
//!
//! A discount function maps each time to a strictly positive factor with
//! factor 1 at time 0. Factors above 1 are allowed (negative rates).
//!
//! Tabulated and identity discounting are exact. Exponential discounting
//! `(1 + rate)^(-t)` is exact at integer times; at fractional times the factor
//! is a truncated decimal with `precision` digits and is flagged inexact.
//! Payback on an inexact discounted stream decides signs with
//! [`default_sign_tolerance`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::project::Project;
use crate::rational::{self, Rational};

pub const DEFAULT_PRECISION: u32 = 30;

/// Balances within this distance below zero count as nonnegative when the
/// discounted stream was built from inexact factors. 10^-12.
pub fn default_sign_tolerance() -> Rational {
    Rational::new(BigInt::one(), rational::ten_pow(12))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Form {
    Identity,
    Table(BTreeMap<Rational, Rational>),
    Exponential { rate: Rational, precision: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscountFunction {
    form: Form,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub value: Rational,
    pub exact: bool,
}

/// A discounted project together with whether every factor used was exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discounted {
    pub project: Project,
    pub exact: bool,
}

impl DiscountFunction {
    pub fn identity() -> Self {
        DiscountFunction { form: Form::Identity }
    }

    /// A partial table of factors. A missing `0` entry is filled with 1; an
    /// explicit `0` entry must equal 1.
    pub fn table<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut table = BTreeMap::new();
        for (time, factor) in pairs {
            if time.is_negative() {
                return Err(Error::NegativeTime(time));
            }
            if !factor.is_positive() {
                return Err(Error::InvalidDiscount(format!("factor at time {time} is {factor}, must be > 0")));
            }
            if let Some(prev) = table.get(&time) {
                if prev != &factor {
                    return Err(Error::InvalidDiscount(format!(
                        "conflicting factors {prev} and {factor} at time {time}"
                    )));
                }
            }
            table.insert(time, factor);
        }
        match table.get(&Rational::zero()) {
            Some(f) if !f.is_one() => {
                return Err(Error::InvalidDiscount(format!("factor at time 0 is {f}, must be 1")));
            }
            Some(_) => {}
            None => {
                table.insert(Rational::zero(), Rational::one());
            }
        }
        Ok(DiscountFunction { form: Form::Table(table) })
    }

    /// `(1 + rate)^(-t)`; requires `rate > -1` and `precision > 0` digits.
    pub fn exponential(rate: Rational, precision: u32) -> Result<Self> {
        if rate <= -Rational::one() {
            return Err(Error::InvalidDiscount(format!("rate {rate} must be > -1")));
        }
        if precision == 0 {
            return Err(Error::InvalidDiscount("precision must be at least one digit".into()));
        }
        Ok(DiscountFunction { form: Form::Exponential { rate, precision } })
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.form, Form::Identity)
    }

    pub fn table_entries(&self) -> Option<&BTreeMap<Rational, Rational>> {
        match &self.form {
            Form::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn rate(&self) -> Option<&Rational> {
        match &self.form {
            Form::Exponential { rate, .. } => Some(rate),
            _ => None,
        }
    }

    /// Identity and tables are exact everywhere they are defined.
    pub fn is_exact_form(&self) -> bool {
        !matches!(self.form, Form::Exponential { .. })
    }

    pub fn describe(&self) -> String {
        match &self.form {
            Form::Identity => "identity".to_string(),
            Form::Table(t) => format!("table({} entries)", t.len()),
            Form::Exponential { rate, precision } => format!("exponential(rate={rate}, precision={precision})"),
        }
    }

    pub fn factor(&self, t: &Rational) -> Result<Factor> {
        if t.is_negative() {
            return Err(Error::NegativeTime(t.clone()));
        }
        match &self.form {
            Form::Identity => Ok(Factor { value: Rational::one(), exact: true }),
            Form::Table(table) => table
                .get(t)
                .map(|v| Factor { value: v.clone(), exact: true })
                .ok_or_else(|| Error::MissingFactor(t.clone())),
            Form::Exponential { rate, precision } => exponential_factor(rate, *precision, t),
        }
    }

    /// `x^(α)`: each amount scaled by the factor at its own time.
    pub fn apply(&self, x: &Project) -> Result<Discounted> {
        let mut exact = true;
        let mut raw = Vec::with_capacity(x.len());
        for e in x.events() {
            let f = self.factor(&e.time)?;
            exact &= f.exact;
            raw.push((e.time.clone(), &e.amount * f.value));
        }
        Ok(Discounted { project: Project::new(raw)?, exact })
    }

    /// The pointwise reciprocal `1/α`.
    pub fn invert(&self) -> DiscountFunction {
        let form = match &self.form {
            Form::Identity => Form::Identity,
            Form::Table(t) => Form::Table(t.iter().map(|(k, v)| (k.clone(), v.recip())).collect()),
            Form::Exponential { rate, precision } => Form::Exponential {
                rate: (Rational::one() + rate).recip() - Rational::one(),
                precision: *precision,
            },
        };
        DiscountFunction { form }
    }
}

fn exponential_factor(rate: &Rational, precision: u32, t: &Rational) -> Result<Factor> {
    let inv_base = (Rational::one() + rate).recip();
    let too_large = || Error::InvalidDiscount(format!("time {t} too large for exponential discounting"));
    let numer = t.numer().to_usize().ok_or_else(too_large)?;
    let powered = num_traits::pow(inv_base, numer);
    if rational::is_integer(t) {
        return Ok(Factor { value: powered, exact: true });
    }
    let root = t.denom().to_u32().ok_or_else(too_large)?;
    let mut digits = rational::nth_root_floor(&powered, root, precision);
    if digits.is_zero() {
        // keep factors strictly positive
        digits = BigInt::one();
    }
    Ok(Factor {
        value: Rational::new(digits, rational::ten_pow(precision)),
        exact: false,
    })
}

/// `x^(α)` as a plain project.
pub fn discount_stream(x: &Project, alpha: &DiscountFunction) -> Result<Project> {
    alpha.apply(x).map(|d| d.project)
}
