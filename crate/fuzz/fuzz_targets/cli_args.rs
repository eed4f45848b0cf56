#![no_main]

use clap::Parser;
use cvbench_cli::Cli;
use libfuzzer_sys::fuzz_target;

// Arguments are NUL-separated. Only parsing is exercised; commands are not run.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("cvbench").chain(text.split('\0'));
    if let Ok(cli) = Cli::try_parse_from(args) {
        let _ = cli.command.name();
    }
});
