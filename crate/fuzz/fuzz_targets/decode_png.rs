#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = evoenhance::codec::decode_png(data) {
        assert_eq!(img.len(), img.width() * img.height());
        assert_eq!(
            evoenhance::codec::decode(&evoenhance::codec::encode_pgm(&img)).unwrap(),
            img
        );
    }
});
