//! The nine univariate test problems.

use std::f64::consts::PI;

use crate::bo::Objective;
use crate::error::{Error, Result};

/// Self-check tolerance on the known minimum.
pub const MINIMUM_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
pub struct TestProblem {
    pub name: &'static str,
    pub formula: fn(f64) -> f64,
    /// Original search interval `[a, b]`.
    pub domain: (f64, f64),
    pub known_minimizer: f64,
    pub known_minimum: f64,
}

impl TestProblem {
    /// Maps `u` in `[0, 1]` affinely onto the original domain.
    pub fn to_domain(&self, u: f64) -> f64 {
        let (a, b) = self.domain;
        a + u * (b - a)
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        let (a, b) = self.domain;
        (x - a) / (b - a)
    }

    /// `formula(a + u (b - a))`; errors for `u` outside `[0, 1]`.
    pub fn rescaled_eval(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::OutOfUnitInterval(u));
        }
        Ok((self.formula)(self.to_domain(u)))
    }

    /// `|formula(known_minimizer) - known_minimum|`.
    pub fn self_check_error(&self) -> f64 {
        ((self.formula)(self.known_minimizer) - self.known_minimum).abs()
    }
}

impl Objective for TestProblem {
    fn evaluate(&self, u: f64) -> f64 {
        (self.formula)(self.to_domain(u.clamp(0.0, 1.0)))
    }
}

fn problem02(x: f64) -> f64 {
    x.sin() + (10.0 / 3.0 * x).sin()
}

// the i = 0 term vanishes; kept to match the usual statement of the sum
fn problem03(x: f64) -> f64 {
    -(0..=5).map(|i| i as f64 * ((i as f64 + 1.0) * x + i as f64).sin()).sum::<f64>()
}

fn problem05(x: f64) -> f64 {
    -(1.4 - 3.0 * x) * (18.0 * x).sin()
}

fn problem06(x: f64) -> f64 {
    -(x + x.sin()) * (-x * x).exp()
}

fn problem07(x: f64) -> f64 {
    x.sin() + (10.0 / 3.0 * x).sin() + x.ln() - 0.84 * x + 3.0
}

fn problem11(x: f64) -> f64 {
    2.0 * x.cos() + (2.0 * x).cos()
}

fn problem14(x: f64) -> f64 {
    -(-x).exp() * (2.0 * PI * x).sin()
}

fn problem15(x: f64) -> f64 {
    (x * x - 5.0 * x + 6.0) / (x * x + 1.0)
}

fn problem22(x: f64) -> f64 {
    (-3.0 * x).exp() - x.sin().powi(3)
}

pub fn problem_suite() -> Vec<TestProblem> {
    vec![
        TestProblem {
            name: "problem02",
            formula: problem02,
            domain: (2.7, 7.5),
            known_minimizer: 5.1457,
            known_minimum: -1.8996,
        },
        TestProblem {
            name: "problem03",
            formula: problem03,
            domain: (-10.0, 10.0),
            known_minimizer: -6.7746,
            known_minimum: -12.0312,
        },
        TestProblem {
            name: "problem05",
            formula: problem05,
            domain: (0.0, 1.2),
            known_minimizer: 0.9661,
            known_minimum: -1.4891,
        },
        TestProblem {
            name: "problem06",
            formula: problem06,
            domain: (-10.0, 10.0),
            known_minimizer: 0.6796,
            known_minimum: -0.8242,
        },
        TestProblem {
            name: "problem07",
            formula: problem07,
            domain: (2.7, 7.5),
            known_minimizer: 5.1998,
            known_minimum: -1.6013,
        },
        // commonly listed minimizer 2.0667 evaluates to -1.4988; 2pi/3 is exact
        TestProblem {
            name: "problem11",
            formula: problem11,
            domain: (-PI / 2.0, 2.0 * PI),
            known_minimizer: 2.0 * PI / 3.0,
            known_minimum: -1.5,
        },
        TestProblem {
            name: "problem14",
            formula: problem14,
            domain: (0.0, 4.0),
            known_minimizer: 0.2249,
            known_minimum: -0.7887,
        },
        TestProblem {
            name: "problem15",
            formula: problem15,
            domain: (-5.0, 5.0),
            known_minimizer: 2.4142,
            known_minimum: -0.0355,
        },
        TestProblem {
            name: "problem22",
            formula: problem22,
            domain: (0.0, 20.0),
            known_minimizer: 9.0 * PI / 2.0,
            known_minimum: (-27.0 * PI / 2.0).exp() - 1.0,
        },
    ]
}

/// Looks a problem up by name; accepts `problem02`, `02` or `2`.
pub fn find_problem(name: &str) -> Result<TestProblem> {
    let key = name.trim().trim_start_matches("problem");
    let key = key.parse::<u32>().map(|n| format!("problem{n:02}")).unwrap_or_else(|_| name.trim().to_string());
    problem_suite()
        .into_iter()
        .find(|p| p.name == key)
        .ok_or_else(|| Error::Unknown { kind: "problem", name: name.to_string() })
}
