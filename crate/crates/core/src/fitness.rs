//! Fitness functions and the name registry.
//!
//! Engines maximize, so every benchmark that is conventionally minimized is
//! registered negated. All sums run in ascending axis order.
//!
//! | name         | value (maximized)                                                   | box            |
//! |--------------|---------------------------------------------------------------------|----------------|
//! | `cubic`      | `sum x^3 - 0.8 x^2 - 1000 x + 8000`                                  | `[-100, 100]`  |
//! | `sphere`     | `-sum x^2`                                                          | `[-5.12, 5.12]`|
//! | `rosenbrock` | `-sum_{i<d-1} 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2`                | `[-2.048, 2.048]` |
//! | `griewank`   | `-(1 + sum x^2 / 4000 - prod cos(x_i / sqrt(i + 1)))`               | `[-600, 600]`  |

use alloc::borrow::Cow;
use alloc::string::ToString;
use alloc::sync::Arc;
use core::fmt;

use crate::error::DomainError;

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A named objective over the box `[lower, upper]^dims`.
#[derive(Clone)]
pub struct FitnessFn {
    name: Cow<'static, str>,
    lower: f64,
    upper: f64,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for FitnessFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FitnessFn")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

impl FitnessFn {
    /// An objective to maximize. `evaluator` must be deterministic on the box.
    pub fn new<F>(name: impl Into<Cow<'static, str>>, lower: f64, upper: f64, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            lower,
            upper,
            evaluator: Arc::new(evaluator),
        }
    }

    /// An objective to minimize, registered as its negation.
    pub fn minimize<F>(name: impl Into<Cow<'static, str>>, lower: f64, upper: f64, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, lower, upper, move |x| -evaluator(x))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Evaluates after checking every component lies in the box.
    pub fn evaluate(&self, pos: &[f64]) -> Result<f64, DomainError> {
        check_box(&self.name, pos, self.lower, self.upper)?;
        Ok(self.evaluate_unchecked(pos))
    }

    /// Evaluates without the box check. Engines call this on clamped positions.
    #[inline]
    pub fn evaluate_unchecked(&self, pos: &[f64]) -> f64 {
        (self.evaluator)(pos)
    }
}

/// Registered names, in registry order.
pub const NAMES: [&str; 4] = ["cubic", "sphere", "rosenbrock", "griewank"];

/// Looks up a registered fitness function by name.
pub fn lookup(name: &str) -> Option<FitnessFn> {
    let f = match name {
        "cubic" => FitnessFn::new("cubic", CUBIC_BOX.0, CUBIC_BOX.1, cubic_value),
        "sphere" => FitnessFn::new("sphere", SPHERE_BOX.0, SPHERE_BOX.1, sphere_value),
        "rosenbrock" => FitnessFn::new(
            "rosenbrock",
            ROSENBROCK_BOX.0,
            ROSENBROCK_BOX.1,
            rosenbrock_value,
        ),
        "griewank" => FitnessFn::new("griewank", GRIEWANK_BOX.0, GRIEWANK_BOX.1, griewank_value),
        _ => return None,
    };
    Some(f)
}

const CUBIC_BOX: (f64, f64) = (-100.0, 100.0);
const SPHERE_BOX: (f64, f64) = (-5.12, 5.12);
const ROSENBROCK_BOX: (f64, f64) = (-2.048, 2.048);
const GRIEWANK_BOX: (f64, f64) = (-600.0, 600.0);

pub fn cubic(pos: &[f64]) -> Result<f64, DomainError> {
    check_box("cubic", pos, CUBIC_BOX.0, CUBIC_BOX.1)?;
    Ok(cubic_value(pos))
}

pub fn sphere(pos: &[f64]) -> Result<f64, DomainError> {
    check_box("sphere", pos, SPHERE_BOX.0, SPHERE_BOX.1)?;
    Ok(sphere_value(pos))
}

pub fn rosenbrock(pos: &[f64]) -> Result<f64, DomainError> {
    check_box("rosenbrock", pos, ROSENBROCK_BOX.0, ROSENBROCK_BOX.1)?;
    Ok(rosenbrock_value(pos))
}

pub fn griewank(pos: &[f64]) -> Result<f64, DomainError> {
    check_box("griewank", pos, GRIEWANK_BOX.0, GRIEWANK_BOX.1)?;
    Ok(griewank_value(pos))
}

fn cubic_value(pos: &[f64]) -> f64 {
    let mut sum = 0.0;
    for &x in pos {
        sum += x * x * x - 0.8 * x * x - 1000.0 * x + 8000.0;
    }
    sum
}

fn sphere_value(pos: &[f64]) -> f64 {
    let mut sum = 0.0;
    for &x in pos {
        sum += x * x;
    }
    -sum
}

fn rosenbrock_value(pos: &[f64]) -> f64 {
    let mut sum = 0.0;
    for w in pos.windows(2) {
        let (x, y) = (w[0], w[1]);
        let a = y - x * x;
        let b = 1.0 - x;
        sum += 100.0 * a * a + b * b;
    }
    -sum
}

fn griewank_value(pos: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, &x) in pos.iter().enumerate() {
        sum += x * x;
        prod *= libm::cos(x / libm::sqrt((i + 1) as f64));
    }
    -(1.0 + sum / 4000.0 - prod)
}

fn check_box(name: &str, pos: &[f64], lower: f64, upper: f64) -> Result<(), DomainError> {
    match pos.iter().position(|x| !(lower..=upper).contains(x)) {
        None => Ok(()),
        Some(axis) => Err(DomainError {
            fitness: name.to_string(),
            axis,
            value: pos[axis],
            lower,
            upper,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn cubic_reference_values() {
        for d in [1, 2, 7, 120] {
            assert_eq!(cubic(&vec![0.0; d]).unwrap(), 8000.0 * d as f64);
        }
        assert_eq!(cubic(&[100.0]).unwrap(), 900_000.0);
        assert_eq!(cubic(&[-100.0]).unwrap(), -900_000.0);
    }

    #[test]
    fn cubic_grid_scan_finds_the_endpoint_maximum() {
        // Independent grid oracle over [-100, 100] at 2e-4 spacing (10^6 + 1 points).
        let n = 1_000_000;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..=n {
            let x = -100.0 + 200.0 * k as f64 / n as f64;
            let f = x * x * x - 0.8 * x * x - 1000.0 * x + 8000.0;
            if f > best.0 {
                best = (f, x);
            }
        }
        assert_eq!(best, (900_000.0, 100.0));
        assert_eq!(cubic(&[best.1]).unwrap(), best.0);
    }

    #[test]
    fn benchmark_optima_are_zero() {
        assert_eq!(sphere(&[0.0; 5]).unwrap(), 0.0);
        assert_eq!(griewank(&[0.0; 5]).unwrap(), 0.0);
        assert_eq!(rosenbrock(&[1.0; 5]).unwrap(), 0.0);
        assert!(sphere(&[1.0, 0.0]).unwrap() < 0.0);
        assert!(griewank(&[3.0, 1.0]).unwrap() < 0.0);
        assert!(rosenbrock(&[0.0, 0.0]).unwrap() < 0.0);
    }

    #[test]
    fn out_of_box_is_a_domain_error() {
        let e = cubic(&[0.0, 100.5]).unwrap_err();
        assert_eq!(e.axis, 1);
        assert_eq!(e.value, 100.5);
        assert!(sphere(&[6.0]).is_err());
        assert!(lookup("cubic").unwrap().evaluate(&[-101.0]).is_err());
    }

    #[test]
    fn permutation_symmetry() {
        let x = [1.5, -30.25, 99.0, 0.125];
        let mut y = x;
        y.reverse();
        // Axis-separable sums of the same terms; order fixed, so compare values loosely
        // only where the accumulation order differs.
        let a = cubic(&x).unwrap();
        let b = cubic(&y).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.abs());
        let xs: Vec<f64> = x.iter().map(|v| v / 20.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| v / 20.0).collect();
        let a = sphere(&xs).unwrap();
        let b = sphere(&ys).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn registry() {
        for name in NAMES {
            assert_eq!(lookup(name).unwrap().name(), name);
        }
        assert!(lookup("ackley").is_none());
        let f = lookup("cubic").unwrap();
        assert_eq!((f.lower(), f.upper()), (-100.0, 100.0));
    }

    #[test]
    fn minimize_negates() {
        let f = FitnessFn::minimize("abs", -1.0, 1.0, |x| x[0].abs());
        assert_eq!(f.evaluate(&[0.5]).unwrap(), -0.5);
    }
}
