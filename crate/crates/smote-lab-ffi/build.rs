//! Generates the C header for this crate with cbindgen.
//!
//! The header is written to `OUT_DIR` and mirrored into `include/smote_lab.h`
//! so that C consumers can use the checked-in copy without running cargo. The
//! mirror is only rewritten when the generated text differs, which keeps
//! rebuilds from touching the source tree needlessly.

use std::env;
use std::fs;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_path = PathBuf::from(env::var("OUT_DIR").unwrap()).join("smote_lab.h");

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml is malformed");
    let bindings = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation failed");
    bindings.write_to_file(&out_path);

    let generated = fs::read(&out_path).expect("generated header is unreadable");
    let mirror = crate_dir.join("include").join("smote_lab.h");
    let stale = fs::read(&mirror).map(|current| current != generated).unwrap_or(true);
    if stale {
        fs::create_dir_all(mirror.parent().unwrap()).expect("include/ cannot be created");
        fs::write(&mirror, &generated).expect("include/smote_lab.h cannot be written");
    }
}
