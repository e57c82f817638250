//! Encrypts the bundled 256x256 camera image in every mode.
//!
//! `cargo run --release --example encrypt_gray [out_dir]` also writes the
//! ciphertexts and key files.

use std::path::PathBuf;

use ca_imgcrypt::cipher::{decrypt_image, encrypt_image, CipherKey, CipherMode};
use ca_imgcrypt::imagecodec::{read_image, write_image};

fn main() -> ca_imgcrypt::Result<()> {
    let data: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data"].iter().collect();
    let out = std::env::args().nth(1).map(PathBuf::from);
    let img = read_image(data.join("camera256.pgm"))?;

    for mode in CipherMode::ALL {
        let key = CipherKey::generate_for(mode, 481, &img);
        let cipher = encrypt_image(&img, &key)?;
        let back = decrypt_image(&cipher, &key)?;
        println!(
            "{mode}: ciphertext {}x{}, round trip {}",
            cipher.width(),
            cipher.height(),
            if back == img { "ok" } else { "FAILED" }
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).ok();
            write_image(&cipher, dir.join(format!("camera_{mode}.pgm")))?;
            key.save(dir.join(format!("camera_{mode}.key")))?;
        }
    }

    let key = CipherKey::generate_for(CipherMode::W3, 481, &img);
    println!("\nW3 key file:\n{key}");
    Ok(())
}
