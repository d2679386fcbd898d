use crate::error::ConfigError;

/// Default worker-group size.
pub const DEFAULT_GROUP_SIZE: usize = 128;

/// Immutable run parameters shared read-only by every lane.
///
/// Construct through [`PsoParams::builder`]; the fields cannot change afterwards.
/// Defaults are inertia `w = 1`, learning factors `c1 = c2 = 2`, the box
/// `[-100, 100]`, velocity bound `max_v = (max_pos - min_pos) / 2` with
/// `min_v = -max_v`, 1024 particles, one axis, 1000 iterations and groups of 128.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    inertia: f64,
    cognitive: f64,
    social: f64,
    min_pos: f64,
    max_pos: f64,
    min_v: f64,
    max_v: f64,
    particles: usize,
    dims: usize,
    iterations: usize,
    group_size: usize,
}

impl PsoParams {
    pub fn builder() -> PsoParamsBuilder {
        PsoParamsBuilder::default()
    }

    /// Inertia weight `w`.
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// Cognitive coefficient `c1`.
    pub fn cognitive(&self) -> f64 {
        self.cognitive
    }

    /// Social coefficient `c2`.
    pub fn social(&self) -> f64 {
        self.social
    }

    pub fn min_pos(&self) -> f64 {
        self.min_pos
    }

    pub fn max_pos(&self) -> f64 {
        self.max_pos
    }

    pub fn min_v(&self) -> f64 {
        self.min_v
    }

    pub fn max_v(&self) -> f64 {
        self.max_v
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Number of worker groups, `ceil(particles / group_size)`.
    pub fn groups(&self) -> usize {
        self.particles.div_ceil(self.group_size)
    }

    /// A copy with a different iteration budget, revalidated.
    pub fn with_iterations(&self, iterations: usize) -> Result<Self, ConfigError> {
        self.to_builder().iterations(iterations).build()
    }

    /// A copy with a different group size, revalidated.
    pub fn with_group_size(&self, group_size: usize) -> Result<Self, ConfigError> {
        self.to_builder().group_size(group_size).build()
    }

    fn to_builder(&self) -> PsoParamsBuilder {
        PsoParamsBuilder {
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            position: (self.min_pos, self.max_pos),
            velocity: Some((self.min_v, self.max_v)),
            particles: self.particles,
            dims: self.dims,
            iterations: self.iterations,
            group_size: self.group_size,
        }
    }
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParamsBuilder::default()
            .build()
            .expect("default parameters are valid")
    }
}

#[derive(Debug, Clone)]
pub struct PsoParamsBuilder {
    inertia: f64,
    cognitive: f64,
    social: f64,
    position: (f64, f64),
    velocity: Option<(f64, f64)>,
    particles: usize,
    dims: usize,
    iterations: usize,
    group_size: usize,
}

impl Default for PsoParamsBuilder {
    fn default() -> Self {
        Self {
            inertia: 1.0,
            cognitive: 2.0,
            social: 2.0,
            position: (-100.0, 100.0),
            velocity: None,
            particles: 1024,
            dims: 1,
            iterations: 1000,
            group_size: DEFAULT_GROUP_SIZE,
        }
    }
}

impl PsoParamsBuilder {
    pub fn inertia(mut self, w: f64) -> Self {
        self.inertia = w;
        self
    }

    pub fn cognitive(mut self, c1: f64) -> Self {
        self.cognitive = c1;
        self
    }

    pub fn social(mut self, c2: f64) -> Self {
        self.social = c2;
        self
    }

    pub fn position_bounds(mut self, min: f64, max: f64) -> Self {
        self.position = (min, max);
        self
    }

    /// Explicit velocity bounds. When unset, they are derived from the
    /// position box as `±(max_pos - min_pos) / 2`.
    pub fn velocity_bounds(mut self, min: f64, max: f64) -> Self {
        self.velocity = Some((min, max));
        self
    }

    pub fn particles(mut self, n: usize) -> Self {
        self.particles = n;
        self
    }

    pub fn dims(mut self, d: usize) -> Self {
        self.dims = d;
        self
    }

    pub fn iterations(mut self, t: usize) -> Self {
        self.iterations = t;
        self
    }

    pub fn group_size(mut self, g: usize) -> Self {
        self.group_size = g;
        self
    }

    pub fn build(self) -> Result<PsoParams, ConfigError> {
        for (field, value) in [
            ("w", self.inertia),
            ("c1", self.cognitive),
            ("c2", self.social),
            ("min_pos", self.position.0),
            ("max_pos", self.position.1),
        ] {
            check_finite(field, value)?;
        }
        let (min_pos, max_pos) = self.position;
        if min_pos >= max_pos {
            return Err(ConfigError::PositionBounds {
                min: min_pos,
                max: max_pos,
            });
        }
        let (min_v, max_v) = self.velocity.unwrap_or_else(|| {
            let half = (max_pos - min_pos) / 2.0;
            (-half, half)
        });
        check_finite("min_v", min_v)?;
        check_finite("max_v", max_v)?;
        if min_v > max_v {
            return Err(ConfigError::VelocityBounds {
                min: min_v,
                max: max_v,
            });
        }
        for (field, value) in [
            ("particle_cnt", self.particles),
            ("dims", self.dims),
            ("max_iter", self.iterations),
        ] {
            if value == 0 {
                return Err(ConfigError::Zero { field });
            }
            // Random-stream coordinates are 32-bit.
            if value as u64 > u32::MAX as u64 {
                return Err(ConfigError::TooLarge {
                    field,
                    value: value as u64,
                    max: u32::MAX as u64,
                });
            }
        }
        if self.group_size == 0 {
            return Err(ConfigError::Zero {
                field: "group_size",
            });
        }
        Ok(PsoParams {
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            min_pos,
            max_pos,
            min_v,
            max_v,
            particles: self.particles,
            dims: self.dims,
            iterations: self.iterations,
            group_size: self.group_size,
        })
    }
}

fn check_finite(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::NonFinite { field, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reference_settings() {
        let p = PsoParams::default();
        assert_eq!((p.inertia(), p.cognitive(), p.social()), (1.0, 2.0, 2.0));
        assert_eq!((p.min_pos(), p.max_pos()), (-100.0, 100.0));
        assert_eq!((p.min_v(), p.max_v()), (-100.0, 100.0));
        assert_eq!(p.group_size(), 128);
    }

    #[test]
    fn derived_velocity_bound_is_half_the_box() {
        let p = PsoParams::builder().position_bounds(0.0, 10.0).build().unwrap();
        assert_eq!((p.min_v(), p.max_v()), (-5.0, 5.0));
    }

    #[test]
    fn rejects_each_violated_bound() {
        let e = PsoParams::builder().position_bounds(1.0, 1.0).build();
        assert!(matches!(e, Err(ConfigError::PositionBounds { .. })));
        let e = PsoParams::builder().velocity_bounds(2.0, 1.0).build();
        assert!(matches!(e, Err(ConfigError::VelocityBounds { .. })));
        let e = PsoParams::builder().particles(0).build();
        assert_eq!(e, Err(ConfigError::Zero { field: "particle_cnt" }));
        let e = PsoParams::builder().dims(0).build();
        assert_eq!(e, Err(ConfigError::Zero { field: "dims" }));
        let e = PsoParams::builder().iterations(0).build();
        assert_eq!(e, Err(ConfigError::Zero { field: "max_iter" }));
        let e = PsoParams::builder().group_size(0).build();
        assert_eq!(e, Err(ConfigError::Zero { field: "group_size" }));
        let e = PsoParams::builder().inertia(f64::NAN).build();
        assert!(matches!(e, Err(ConfigError::NonFinite { field: "w", .. })));
    }

    #[test]
    fn zero_width_velocity_range_is_allowed() {
        let p = PsoParams::builder().velocity_bounds(0.0, 0.0).build().unwrap();
        assert_eq!((p.min_v(), p.max_v()), (0.0, 0.0));
    }

    #[test]
    fn group_count_is_ceiling_division() {
        let p = PsoParams::builder().particles(5).group_size(4).build().unwrap();
        assert_eq!(p.groups(), 2);
        let p = PsoParams::builder().particles(33).group_size(128).build().unwrap();
        assert_eq!(p.groups(), 1);
    }
}
