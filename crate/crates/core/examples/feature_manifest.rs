//! Prints the canonical feature manifest (the contents of
//! `data/feature_manifest.json`) and its hash on stderr.

fn main() {
    let m = cutfunque::binning::Manifest::canonical();
    eprintln!("{} features, sha256 {}", m.len(), m.hash());
    println!("{}", m.to_json());
}
