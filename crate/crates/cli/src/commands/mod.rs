pub mod empirical;
pub mod fit;
pub mod simulate;
pub mod sweep;

use crate::config::Config;
use crate::{CommonArgs, Failure, ResultExt};

/// Loads the config file and applies the shared flag overrides.
pub fn load_config(common: &CommonArgs) -> Result<Config, Failure> {
    let mut config = Config::load(common.config.as_deref()).usage()?;
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    if let Some(format) = common.format {
        config.format = format;
    }
    Ok(config)
}
