#![no_main]

use evoenhance::harness::OptimizerSettings;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(settings) = OptimizerSettings::from_json(text) {
            settings
                .validate()
                .expect("from_json returns validated settings");
        }
    }
});
