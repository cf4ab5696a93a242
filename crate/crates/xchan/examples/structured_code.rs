//! Packing two integer symbols into one real integer, and recovering them
//! from a noisy estimate.

use xchan::structcode::{
    codebook, decode, encode, nearest_codeword, power_constraint, ConstellationParam,
    ConstellationPoint,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for q in [1, 2, 3] {
        let param = ConstellationParam::with_q(q)?;
        let book = codebook(&param);
        println!(
            "Q={q} c={} codewords={} peak power={}",
            param.c(),
            book.len(),
            power_constraint(&param)
        );
        for pt in param.points() {
            let s = encode(pt, &param)?;
            if decode(s, &param)? != pt {
                return Err(format!("round trip failed at {pt:?}").into());
            }
        }
    }

    let param = ConstellationParam::with_q(2)?;
    let pt = ConstellationPoint { u: -1, v: 2 };
    let s = encode(pt, &param)?;
    let book = codebook(&param);
    for noisy in [s as f64 + 0.4, s as f64 - 0.45] {
        let back = decode(nearest_codeword(noisy, &book), &param)?;
        println!("{pt:?} -> {s} -> {noisy:.2} -> {back:?}");
    }
    // A zero coordinate is outside the alphabet.
    println!(
        "encode(u=0) = {:?}",
        encode(ConstellationPoint { u: 0, v: 1 }, &param).err()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
