//! Chi-square uniformity of plain and encrypted histograms.

use std::path::PathBuf;

use ca_imgcrypt::analysis::{chi_square_critical, chi_square_uniform, histogram};
use ca_imgcrypt::cipher::{ciphertext_footprint, encrypt_image, CipherKey, CipherMode};
use ca_imgcrypt::imagecodec::read_image;

fn main() -> ca_imgcrypt::Result<()> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", "camera256.pgm"]
        .iter()
        .collect();
    let img = read_image(path)?;
    let crit = chi_square_critical(255, 0.01);
    println!("chi-square, 255 dof, 1% critical value {crit:.1}");
    println!(
        "plain      {:>10.1}",
        chi_square_uniform(&histogram(&img).bins[0])
    );
    for mode in CipherMode::ALL {
        let key = CipherKey::generate_for(mode, 21, &img);
        let enc = ciphertext_footprint(&encrypt_image(&img, &key)?, &key)?;
        println!(
            "{mode:<10} {:>10.1}",
            chi_square_uniform(&histogram(&enc).bins[0])
        );
    }
    Ok(())
}
