//! Runs-test scores for a plain image, a half-encrypted image, its full
//! encryption, and uniform noise.

use std::path::PathBuf;

use ca_imgcrypt::cipher::{ciphertext_footprint, encrypt_image, CipherKey, CipherMode};
use ca_imgcrypt::imagecodec::{read_image, PixelImage};
use ca_imgcrypt::keystream::SplitMix64;
use ca_imgcrypt::randtest::{score_image, Direction, RandTestConfig};

fn main() -> ca_imgcrypt::Result<()> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", "camera256.pgm"]
        .iter()
        .collect();
    let img = read_image(path)?;
    let (w, h) = (img.width(), img.height());
    let key = CipherKey::generate_for(CipherMode::W3, 3, &img);
    let enc = ciphertext_footprint(&encrypt_image(&img, &key)?, &key)?;
    let half = PixelImage::from_fn(w, h, |x, y| {
        if x < w / 2 {
            img.get(x, y, 0)
        } else {
            enc.get(x, y, 0)
        }
    });
    let mut g = SplitMix64::new(1);
    let noise = PixelImage::from_fn(w, h, |_, _| g.next_u64() as u8);

    println!(
        "{:<12} {:>10} {:>10} {:>10}",
        "image", "horizontal", "vertical", "diagonal"
    );
    for (name, im) in [
        ("original", &img),
        ("half", &half),
        ("encrypted", &enc),
        ("noise", &noise),
    ] {
        let scores: Vec<String> = Direction::ALL
            .iter()
            .map(|&direction| {
                let cfg = RandTestConfig {
                    direction,
                    seed: 5,
                    ..Default::default()
                };
                score_image(im, &cfg).map(|r| format!("{:>10.1}", r.score))
            })
            .collect::<ca_imgcrypt::Result<_>>()?;
        println!("{name:<12} {}", scores.join(" "));
    }
    Ok(())
}
