use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Requirement family whose occurrences a fault violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultTarget {
    /// Trigger of R1 (camera), R2 (sign), R3 (obstacle), R4 (speed) is late.
    Periodic(u8),
    /// Stage of R5 (sign recognition), R6 (camera), R7 (controller),
    /// R8 (vehicle dynamics) overruns its upper bound.
    Exec(u8),
    /// Emergency is left before the dwell elapses.
    Sporadic,
    /// `turnLeft` and `rightOn` fire together.
    Exclusion,
}

impl fmt::Display for FaultTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultTarget::Periodic(n) => write!(f, "periodic-R{n}"),
            FaultTarget::Exec(n) => write!(f, "exec-R{n}"),
            FaultTarget::Sporadic => f.write_str("sporadic-R9"),
            FaultTarget::Exclusion => f.write_str("exclusion-R27"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FaultError {
    #[error("unknown fault target {0:?}; expected periodic-R1..R4, exec-R5..R8, sporadic-R9 or exclusion-R27")]
    UnknownTarget(String),
    #[error("fault must be TARGET:RATE, got {0:?}")]
    Syntax(String),
    #[error("fault rate {0:?} must be a number in [0, 1]")]
    Rate(String),
}

impl FromStr for FaultTarget {
    type Err = FaultError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || FaultError::UnknownTarget(s.to_string());
        let (family, req) = s.split_once("-R").ok_or_else(unknown)?;
        let n: u8 = req.parse().map_err(|_| unknown())?;
        match (family, n) {
            ("periodic", 1..=4) => Ok(FaultTarget::Periodic(n)),
            ("exec", 5..=8) => Ok(FaultTarget::Exec(n)),
            ("sporadic", 9) => Ok(FaultTarget::Sporadic),
            ("exclusion", 27) => Ok(FaultTarget::Exclusion),
            _ => Err(unknown()),
        }
    }
}

/// Each occurrence of the target is violated independently with
/// probability `rate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultSpec {
    pub target: FaultTarget,
    pub rate: f64,
}

impl FaultSpec {
    pub fn new(target: FaultTarget, rate: f64) -> Result<Self, FaultError> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(FaultError::Rate(rate.to_string()));
        }
        Ok(FaultSpec { target, rate })
    }
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.target, self.rate)
    }
}

impl FromStr for FaultSpec {
    type Err = FaultError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (target, rate) = s
            .split_once(':')
            .ok_or_else(|| FaultError::Syntax(s.to_string()))?;
        let rate: f64 = rate
            .parse()
            .map_err(|_| FaultError::Rate(rate.to_string()))?;
        FaultSpec::new(target.parse()?, rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_targets() {
        let f: FaultSpec = "periodic-R1:0.10".parse().unwrap();
        assert_eq!(f.target, FaultTarget::Periodic(1));
        assert_eq!(f.rate, 0.10);
        assert_eq!(
            "exec-R5:0.02".parse::<FaultSpec>().unwrap().target,
            FaultTarget::Exec(5)
        );
        assert_eq!(
            "sporadic-R9:1".parse::<FaultSpec>().unwrap().target,
            FaultTarget::Sporadic
        );
        assert_eq!(
            "exclusion-R27:0".parse::<FaultSpec>().unwrap().target,
            FaultTarget::Exclusion
        );
    }

    #[test]
    fn rejects_bad_faults() {
        assert!(matches!(
            "periodic-R5:0.1".parse::<FaultSpec>(),
            Err(FaultError::UnknownTarget(_))
        ));
        assert!(matches!(
            "bogus:0.1".parse::<FaultSpec>(),
            Err(FaultError::UnknownTarget(_))
        ));
        assert!(matches!(
            "exec-R5".parse::<FaultSpec>(),
            Err(FaultError::Syntax(_))
        ));
        assert!(matches!(
            "exec-R5:1.5".parse::<FaultSpec>(),
            Err(FaultError::Rate(_))
        ));
        assert!(matches!(
            "exec-R5:x".parse::<FaultSpec>(),
            Err(FaultError::Rate(_))
        ));
    }

    #[test]
    fn display_round_trips() {
        let f: FaultSpec = "exec-R7:0.25".parse().unwrap();
        assert_eq!(f.to_string().parse::<FaultSpec>().unwrap(), f);
    }
}
