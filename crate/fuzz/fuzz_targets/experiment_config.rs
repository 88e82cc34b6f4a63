#![no_main]

use hpbem_cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = ExperimentConfig::from_json(text) {
            config.validate().expect("accepted configs validate");
        }
    }
});
