//! Regenerate the synthetic fixture: `cargo run --example write_synthetic -- data`.

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    let path = fairtree_cli::synthetic::write_fixture(std::path::Path::new(&dir)).expect("write fixture");
    println!("{}", path.display());
}
