use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::discount::DiscountFunction;
use crate::error::{Error, Result};
use crate::metrics;
use crate::project::Project;
use crate::time::ExtendedTime;

use super::Axiom;

/// The payback candidates shipped with the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Last break-even point; the axiomatically unique payback period.
    LastBe,
    /// End of the initial negative stretch. Breaks aggregation consistency.
    FirstBe,
    /// Cumulative inflow reaching total outflow. Breaks monotonicity.
    Modified,
    /// Always 0. Breaks compliance.
    ConstZero,
    /// Last break-even on negative-start nondecreasing projects, `inf`
    /// elsewhere. Breaks monotonicity.
    Obs3Restricted,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::LastBe,
        Builtin::FirstBe,
        Builtin::Modified,
        Builtin::ConstZero,
        Builtin::Obs3Restricted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::LastBe => "LAST_BE",
            Builtin::FirstBe => "FIRST_BE",
            Builtin::Modified => "MODIFIED",
            Builtin::ConstZero => "CONST_ZERO",
            Builtin::Obs3Restricted => "OBS3_RESTRICTED",
        }
    }

    fn eval(self, x: &Project) -> ExtendedTime {
        match self {
            Builtin::LastBe => metrics::payback(x),
            Builtin::FirstBe => metrics::first_breakeven(x),
            Builtin::Modified => metrics::modified_payback(x),
            Builtin::ConstZero => ExtendedTime::zero(),
            Builtin::Obs3Restricted => {
                if x.in_p1() {
                    metrics::payback(x)
                } else {
                    ExtendedTime::Infinite
                }
            }
        }
    }

    /// What the theory says about this functional and `axiom`. The
    /// discounted axioms are only predicted for the identity discount, where
    /// they coincide with their undiscounted forms.
    pub fn expectation(self, axiom: Axiom, alpha_is_identity: bool) -> Expectation {
        use Axiom::*;
        use Expectation::*;
        let axiom = match axiom {
            AlphaComp if alpha_is_identity => Comp,
            AlphaMon if alpha_is_identity => Mon,
            AlphaComp | AlphaMon => {
                return Unknown;
            }
            other => other,
        };
        match (self, axiom) {
            (Builtin::LastBe, _) => Satisfies,
            (Builtin::FirstBe, Comp | Mon) => Satisfies,
            (Builtin::FirstBe, Acons) => Violates,
            (Builtin::ConstZero, Acons | Mon) => Satisfies,
            (Builtin::ConstZero, Comp) => Violates,
            (Builtin::Obs3Restricted, Comp | Acons) => Satisfies,
            (Builtin::Obs3Restricted, Mon) => Violates,
            (Builtin::Modified, Comp) => Satisfies,
            (Builtin::Modified, Mon) => Violates,
            _ => Unknown,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == norm)
            .ok_or_else(|| Error::UnknownFunctional(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Satisfies,
    Violates,
    Unknown,
}

/// A black-box map from projects to extended times.
///
/// With a discount function attached the functional evaluates the base map
/// on `x^(α)`, i.e. it is `x ↦ D(x^(α))`.
#[derive(Clone)]
pub struct PaybackFunctional {
    name: String,
    builtin: Option<Builtin>,
    map: Arc<dyn Fn(&Project) -> ExtendedTime + Send + Sync>,
    alpha: Option<DiscountFunction>,
}

impl fmt::Debug for PaybackFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PaybackFunctional")
            .field("name", &self.name)
            .field("alpha", &self.alpha.as_ref().map(|a| a.describe()))
            .finish()
    }
}

impl PaybackFunctional {
    pub fn new<F>(name: impl Into<String>, map: F) -> Self
    where
        F: Fn(&Project) -> ExtendedTime + Send + Sync + 'static,
    {
        PaybackFunctional { name: name.into(), builtin: None, map: Arc::new(map), alpha: None }
    }

    pub fn from_builtin(b: Builtin) -> Self {
        PaybackFunctional {
            name: b.name().to_string(),
            builtin: Some(b),
            map: Arc::new(move |x| b.eval(x)),
            alpha: None,
        }
    }

    pub fn discounted(mut self, alpha: DiscountFunction) -> Self {
        self.name = format!("DISCOUNTED_{}", self.name);
        self.alpha = Some(alpha);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn builtin(&self) -> Option<Builtin> {
        self.builtin
    }

    pub fn alpha(&self) -> Option<&DiscountFunction> {
        self.alpha.as_ref()
    }

    /// Fails only when the attached discount function is undefined at one of
    /// `x`'s event times.
    pub fn apply(&self, x: &Project) -> Result<ExtendedTime> {
        match (&self.alpha, self.builtin) {
            (None, _) => Ok((self.map)(x)),
            (Some(alpha), Some(Builtin::LastBe)) => metrics::discounted_payback(x, alpha),
            (Some(alpha), _) => Ok((self.map)(&alpha.apply(x)?.project)),
        }
    }

    /// Expected verdict for `axiom`, when the theory makes one.
    /// `check_alpha` is the discount function the discounted axioms are
    /// checked against; it is ignored for the undiscounted ones.
    pub fn expectation(&self, axiom: Axiom, check_alpha: &DiscountFunction) -> Expectation {
        let Some(b) = self.builtin else {
            return Expectation::Unknown;
        };
        match &self.alpha {
            Some(own) if !own.is_identity() => {
                // x ↦ D(x^(α)) is a discounted payback period for α exactly
                // when D is a payback period.
                if b != Builtin::LastBe {
                    return Expectation::Unknown;
                }
                match axiom {
                    Axiom::Acons | Axiom::Lsc => Expectation::Satisfies,
                    Axiom::AlphaComp | Axiom::AlphaMon if own == check_alpha => Expectation::Satisfies,
                    _ => Expectation::Unknown,
                }
            }
            _ => b.expectation(axiom, check_alpha.is_identity()),
        }
    }
}

/// Looks up a builtin functional by name (`LAST_BE`, `FIRST_BE`, `MODIFIED`,
/// `CONST_ZERO`, `OBS3_RESTRICTED`).
pub fn builtin(name: &str) -> Result<PaybackFunctional> {
    Ok(PaybackFunctional::from_builtin(name.parse()?))
}
