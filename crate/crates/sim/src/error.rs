use std::path::PathBuf;

use recoil_core::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VALIDITY: i32 = 2;
pub const EXIT_BREACH: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// An oracle metric outside its tolerance; the message names it.
    #[error("oracle tolerance breached: {0}")]
    Breach(String),
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Io { .. } => EXIT_CONFIG,
            SimError::Core(CoreError::Validity(_)) => EXIT_VALIDITY,
            SimError::Core(CoreError::NormDrift { .. } | CoreError::Stiffness { .. }) => EXIT_BREACH,
            SimError::Core(_) => EXIT_CONFIG,
            SimError::Breach(_) => EXIT_BREACH,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use recoil_core::ModelParams;

    #[test]
    fn codes_follow_the_failure_kind() {
        let p = ModelParams::new(1.0, 1e-3, 250.0).unwrap();
        let gate = recoil_core::density::validity(0.5 / p.gamma(), true, &p).unwrap_err();
        assert_eq!(SimError::from(gate).exit_code(), EXIT_VALIDITY);
        let bad = ModelParams::new(-1.0, 1e-3, 250.0).unwrap_err();
        assert_eq!(SimError::from(bad).exit_code(), EXIT_CONFIG);
        assert_eq!(SimError::Breach("norm".into()).exit_code(), EXIT_BREACH);
        let io = SimError::io("x", std::io::Error::other("disk"));
        assert_eq!(io.exit_code(), EXIT_CONFIG);
    }
}
