//! Runs the command-line front end in-process on a bundled map file.
use std::path::Path;

fn main() {
    let map = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/maps/translation.json");
    let args = ["kobdyn", "orbit", "--map", map.to_str().unwrap(), "--steps", "5", "--format", "csv"];
    let code = kobdyn::cli::run_from(args.iter().map(|s| s.to_string()));
    std::process::exit(code);
}
