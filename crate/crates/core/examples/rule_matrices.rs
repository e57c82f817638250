//! Uniform CA rules as GF(2) matrices.
//!
//! Run with `cargo run --example rule_matrices`.

use ca_imgcrypt::ca_rules::{
    build_fundamental_matrix, build_rule_matrix, devectorize, enumerate_invertible_uniform_rules,
    evolve_direct, vectorize, RuleId,
};
use ca_imgcrypt::gf2::BitMatrix;

fn show(label: &str, m: &BitMatrix) {
    println!("{label}:");
    for i in 0..m.rows() {
        let row: String = (0..m.cols())
            .map(|j| if m.get(i, j) { '1' } else { '0' })
            .collect();
        println!("  {row}");
    }
}

fn main() -> ca_imgcrypt::Result<()> {
    let rule = RuleId::new(15)?;
    let state = BitMatrix::from_rows(&[[1u8, 0, 0], [0, 1, 0]])?;
    let r = build_rule_matrix(rule, 2, 3)?;
    show("state", &state);
    show("rule 15 matrix (6x6)", &r.matrix);
    let next = devectorize(&r.matrix.multiply_vec(&vectorize(&state))?, 2, 3)?;
    show("one step via matrix", &next);
    assert_eq!(next, evolve_direct(&state, rule));

    // The left/right and up/down neighbor matrices are transposes of each other.
    for (a, b) in [(32, 2), (128, 8)] {
        let same =
            build_fundamental_matrix(a, 5, 5)? == build_fundamental_matrix(b, 5, 5)?.transpose();
        println!("R{a} == R{b}^T on 5x5: {same}");
    }

    for (m, n) in [(1, 1), (2, 2), (3, 3), (4, 4), (5, 5)] {
        let list = enumerate_invertible_uniform_rules(m, n)?;
        let head: Vec<String> = list.iter().take(12).map(ToString::to_string).collect();
        println!(
            "{m}x{n}: {} invertible rules, first: {}",
            list.len(),
            head.join(" ")
        );
    }
    Ok(())
}
