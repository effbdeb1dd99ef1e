//! Hard limits on table sizes and power-set enumeration.
//!
//! Limits are errors when exceeded, never silent truncation. The CLI reads
//! overrides from `EQUIDEG_CAPS`, e.g. `mode=512,index=2048,powerset=20`.

use crate::error::{Error, Result};

pub const DEFAULT_MODE_CAP: u32 = 256;
pub const DEFAULT_INDEX_CAP: u32 = 1024;
pub const DEFAULT_POWERSET_CAP: usize = 22;

pub const CAPS_ENV: &str = "EQUIDEG_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest Fourier mode `m` the Bessel table will evaluate.
    pub mode: u32,
    /// Largest radial index `n` the Bessel table will locate.
    pub index: u32,
    /// Largest number of distinct modes fed to a power-set sum.
    pub powerset: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            mode: DEFAULT_MODE_CAP,
            index: DEFAULT_INDEX_CAP,
            powerset: DEFAULT_POWERSET_CAP,
        }
    }
}

impl Caps {
    /// Parses a comma separated `key=value` list on top of the defaults.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Schema(format!("cap override `{item}` is not key=value")))?;
            let parsed: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Schema(format!("cap `{key}` has non-integer value `{value}`")))?;
            match key.trim() {
                "mode" => caps.mode = to_u32(key, parsed)?,
                "index" => caps.index = to_u32(key, parsed)?,
                "powerset" => caps.powerset = parsed,
                other => return Err(Error::Schema(format!("unknown cap `{other}`"))),
            }
        }
        Ok(caps)
    }

    /// Defaults, overridden by `EQUIDEG_CAPS` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Self::parse(&spec),
            Err(_) => Ok(Self::default()),
        }
    }
}

fn to_u32(key: &str, value: usize) -> Result<u32> {
    u32::try_from(value).map_err(|_| Error::Schema(format!("cap `{key}` out of range")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides_selected_caps() {
        let caps = Caps::parse("mode=10, powerset=5").unwrap();
        assert_eq!(caps.mode, 10);
        assert_eq!(caps.index, DEFAULT_INDEX_CAP);
        assert_eq!(caps.powerset, 5);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Caps::parse("mode").is_err());
        assert!(Caps::parse("mode=x").is_err());
        assert!(Caps::parse("depth=3").is_err());
        assert_eq!(Caps::parse("").unwrap(), Caps::default());
    }
}
