//! Converts a `.csm` model to the JSON interchange format on stdout.
//!
//! ```text
//! cargo run --example to_json -- fixtures/atm.csm > fixtures/atm.csm.json
//! ```

use std::path::Path;

use compocheck::ingest::{load, serialize_json, Format};

fn main() {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: to_json FILE.csm");
        std::process::exit(2);
    };
    match load(Path::new(&path), Format::Auto) {
        Ok(model) => print!("{}", serialize_json(&model)),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
