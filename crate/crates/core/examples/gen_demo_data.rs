//! Regenerates the bundled demo inputs: codebook, original and public CSVs.
//!
//! Usage: cargo run --example gen_demo_data -- <dir> [seed] [rows] [public_rows]

use std::path::Path;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let dir = args.get(1).map(String::as_str).unwrap_or("data/demo");
    let seed: u64 = args.get(2).map(|s| s.parse().expect("seed")).unwrap_or(42);
    let rows: usize = args.get(3).map(|s| s.parse().expect("rows")).unwrap_or(5000);
    let public: usize = args.get(4).map(|s| s.parse().expect("public rows")).unwrap_or(2000);
    privsynth::datagen::write_demo_inputs(Path::new(dir), seed, rows, public).unwrap();
    println!("wrote codebook.txt, original.csv ({rows} rows), public.csv ({public} rows) to {dir}");
}
