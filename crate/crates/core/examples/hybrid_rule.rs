//! Hybrid rules: an arbitrary nonsingular matrix acting on a block.

use ca_imgcrypt::ca_rules::{build_hybrid_rule, vectorize, Geometry};
use ca_imgcrypt::gf2::BitMatrix;

fn main() -> ca_imgcrypt::Result<()> {
    let geometry = Geometry::new(5, 5)?;
    let hybrid = build_hybrid_rule(geometry, 2024);
    let m = hybrid.matrix();
    println!(
        "25x25 hybrid matrix: rank {}, {} ones",
        m.rank(),
        m.count_ones()
    );

    let block = BitMatrix::from_fn(5, 5, |i, j| (i + 2 * j) % 3 == 0);
    let v = vectorize(&block);
    let mut state = v.clone();
    for step in 1..=4 {
        state = m.multiply_vec(&state)?;
        println!("step {step}: {:?}", state.to_bits());
    }
    let inv = m.invert()?.pow(4)?;
    assert_eq!(inv.multiply_vec(&state)?, v);
    println!("four inverse steps restore the block");
    Ok(())
}
