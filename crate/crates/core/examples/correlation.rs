//! Adjacent-pixel correlation before and after encryption.
//!
//! `cargo run --example correlation [pairs.csv]` writes the sampled
//! horizontal pairs of the ciphertext for a scatter plot.

use std::path::PathBuf;

use ca_imgcrypt::analysis::{adjacent_correlation, Direction, DEFAULT_PAIRS};
use ca_imgcrypt::cipher::{ciphertext_footprint, encrypt_image, CipherKey, CipherMode};
use ca_imgcrypt::imagecodec::read_image;

fn main() -> ca_imgcrypt::Result<()> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", "camera256.pgm"]
        .iter()
        .collect();
    let img = read_image(path)?;
    let key = CipherKey::generate_for(CipherMode::W6, 11, &img);
    let enc = ciphertext_footprint(&encrypt_image(&img, &key)?, &key)?;

    println!("{:<11} {:>9} {:>9}", "direction", "plain", "encrypted");
    for d in Direction::ALL {
        let p = adjacent_correlation(&img, d, DEFAULT_PAIRS, 1)?;
        let c = adjacent_correlation(&enc, d, DEFAULT_PAIRS, 1)?;
        println!("{:<11} {:>9.4} {:>9.4}", d.to_string(), p.gamma, c.gamma);
        if let (Direction::Horizontal, Some(out)) = (d, std::env::args().nth(1)) {
            let f = std::fs::File::create(&out).expect("create csv");
            c.write_pairs_csv(f).expect("write csv");
        }
    }
    Ok(())
}
