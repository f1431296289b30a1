#![no_main]

use hpsym_cli::config::{merge, parse_config_json, ConfigMap, RunConfig};
use hpsym_cli::Command;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_config_json(s) else { return };
    let Ok(map) = merge(file, ConfigMap::new()) else { return };
    for command in [Command::Bounds, Command::Delay, Command::Clipping, Command::Validate] {
        if let Ok(cfg) = RunConfig::resolve(command, &map) {
            let _ = cfg.echo();
        }
    }
});
