use alloc::string::String;
use core::fmt;

/// A run parameter violates its declared bound.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// `min_pos < max_pos` does not hold.
    PositionBounds { min: f64, max: f64 },
    /// `min_v <= max_v` does not hold.
    VelocityBounds { min: f64, max: f64 },
    /// A parameter that must be finite is NaN or infinite.
    NonFinite { field: &'static str, value: f64 },
    /// A count that must be at least one is zero.
    Zero { field: &'static str },
    /// A count exceeds the random-stream coordinate range.
    TooLarge { field: &'static str, value: u64, max: u64 },
    /// The position box does not fit inside the fitness function's domain.
    OutsideDomain {
        fitness: String,
        min_pos: f64,
        max_pos: f64,
        lower: f64,
        upper: f64,
    },
    /// A lower bound above its upper bound in a sampling request.
    InvertedRange { lo: f64, hi: f64 },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PositionBounds { min, max } => {
                write!(f, "position bounds require min_pos < max_pos, got [{min}, {max}]")
            }
            Self::VelocityBounds { min, max } => {
                write!(f, "velocity bounds require min_v <= max_v, got [{min}, {max}]")
            }
            Self::NonFinite { field, value } => write!(f, "{field} must be finite, got {value}"),
            Self::Zero { field } => write!(f, "{field} must be at least 1"),
            Self::TooLarge { field, value, max } => {
                write!(f, "{field} = {value} exceeds the supported maximum {max}")
            }
            Self::OutsideDomain {
                fitness,
                min_pos,
                max_pos,
                lower,
                upper,
            } => write!(
                f,
                "position box [{min_pos}, {max_pos}] exceeds the domain [{lower}, {upper}] of fitness `{fitness}`"
            ),
            Self::InvertedRange { lo, hi } => write!(f, "range requires lo <= hi, got [{lo}, {hi}]"),
        }
    }
}

impl core::error::Error for ConfigError {}

/// A fitness function was evaluated outside its declared box.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainError {
    pub fitness: String,
    pub axis: usize,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: axis {} = {} lies outside [{}, {}]",
            self.fitness, self.axis, self.value, self.lower, self.upper
        )
    }
}

impl core::error::Error for DomainError {}

/// A worker-group execution failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    /// A lane body panicked.
    LanePanicked {
        group: usize,
        lane: usize,
        phase: usize,
        message: String,
    },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LanePanicked {
                group,
                lane,
                phase,
                message,
            } => write!(f, "lane {lane} of group {group} panicked in phase {phase}: {message}"),
        }
    }
}

impl core::error::Error for RunError {}

/// Any failure surfaced by an engine run.
#[derive(Debug, Clone, PartialEq)]
pub enum PsoError {
    Config(ConfigError),
    Domain(DomainError),
    Run(RunError),
}

impl fmt::Display for PsoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "configuration error: {e}"),
            Self::Domain(e) => write!(f, "domain error: {e}"),
            Self::Run(e) => write!(f, "execution error: {e}"),
        }
    }
}

impl core::error::Error for PsoError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Self::Config(e) => Some(e),
            Self::Domain(e) => Some(e),
            Self::Run(e) => Some(e),
        }
    }
}

impl From<ConfigError> for PsoError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<DomainError> for PsoError {
    fn from(e: DomainError) -> Self {
        Self::Domain(e)
    }
}

impl From<RunError> for PsoError {
    fn from(e: RunError) -> Self {
        Self::Run(e)
    }
}
