//! Exact payback-period analytics for nonconventional cash flows.
//!
//! A [`Project`] is a finite list of dated net cash flows, viewed through its
//! cumulative balance. [`metrics::payback`] returns the last break-even point
//! of that balance. The [`axioms`] module checks payback candidates against
//! compliance, aggregation consistency, monotonicity and lower
//! semicontinuity, and ships counterexamples for the rival definitions.
//!
//! ```
//! use payback_core::metrics::{discounted_payback, first_breakeven, payback};
//! use payback_core::{parse_rational, DiscountFunction, ExtendedTime, Project};
//!
//! let r = |s: &str| parse_rational(s).unwrap();
//! let x = Project::new([(r("0"), r("-100")), (r("1"), r("150")), (r("2"), r("-100")), (r("3"), r("60"))])?;
//! assert_eq!(payback(&x), ExtendedTime::Finite(r("3")));
//! assert_eq!(first_breakeven(&x), ExtendedTime::Finite(r("1")));
//!
//! let alpha = DiscountFunction::table([(r("1"), r("9/10")), (r("2"), r("4/5")), (r("3"), r("7/10"))])?;
//! assert_eq!(alpha.apply(&x)?.project.terminal_value(), r("-3"));
//! assert_eq!(discounted_payback(&x, &alpha)?, ExtendedTime::Infinite);
//! # Ok::<(), payback_core::Error>(())
//! ```

pub mod axioms;
pub mod discount;
pub mod error;
pub mod metrics;
pub mod project;
pub mod rational;
pub mod time;

pub use discount::{discount_stream, DiscountFunction};
pub use error::{Error, Result};
pub use metrics::{MetricKind, MetricReport};
pub use project::{ClassTag, Event, Interval, Project, ProjectClass};
pub use rational::{parse_rational, Rational};
pub use time::ExtendedTime;
