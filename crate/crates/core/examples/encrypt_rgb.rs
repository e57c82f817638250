//! Color images: each channel is encrypted with the same key.

use std::path::PathBuf;

use ca_imgcrypt::analysis::histogram;
use ca_imgcrypt::cipher::{
    ciphertext_footprint, decrypt_image, encrypt_image, CipherKey, CipherMode,
};
use ca_imgcrypt::imagecodec::read_image;

fn main() -> ca_imgcrypt::Result<()> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", "astronaut128.ppm"]
        .iter()
        .collect();
    let img = read_image(path)?;
    let key = CipherKey::generate_for(CipherMode::W5, 7, &img);
    let cipher = encrypt_image(&img, &key)?;
    assert_eq!(decrypt_image(&cipher, &key)?, img);

    let enc = ciphertext_footprint(&cipher, &key)?;
    let (before, after) = (histogram(&img), histogram(&enc));
    for (ch, name) in ["red", "green", "blue"].iter().enumerate() {
        let peak = |bins: &[u64; 256]| *bins.iter().max().unwrap();
        println!(
            "{name:>5}: tallest bin {} before, {} after",
            peak(&before.bins[ch]),
            peak(&after.bins[ch])
        );
    }
    Ok(())
}
