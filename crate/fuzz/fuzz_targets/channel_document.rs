#![no_main]

use cvbench::ChannelDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = ChannelDocument::parse(text) {
        // Anything accepted must survive a save/load cycle unchanged.
        let again = ChannelDocument::parse(&doc.to_json()).expect("re-parse of emitted document");
        assert_eq!(again, doc);
    }
});
