//! Complex matrices as real block matrices: products commute with the map,
//! rank doubles, and multiplication by j becomes a fixed rotation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xchan::realmap::{jrotate, numeric_rank, realify_matrix, realify_vector, CMatrix, CVector};
use xchan::synth::complex_gaussian;
use xchan::TolerancePolicy;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pol = TolerancePolicy::default();

    let a = CMatrix::from_fn(3, 4, |_, _| complex_gaussian(&mut rng));
    let b = CMatrix::from_fn(4, 2, |_, _| complex_gaussian(&mut rng));
    let lhs = realify_matrix(&(&a * &b));
    let rhs = realify_matrix(&a) * realify_matrix(&b);
    let err = (&lhs - &rhs).norm() / lhs.norm();
    println!("realify(AB) vs realify(A)realify(B): relative error {err:.2e}");
    if err > 1e-12 {
        return Err("realification is not multiplicative".into());
    }

    // A rank-2 complex matrix becomes a rank-4 real one.
    let low: CMatrix = &a.columns(0, 2).into_owned() * &b.rows(0, 2).into_owned();
    let (rc, rr) = (
        numeric_rank(&low, &pol),
        numeric_rank(&realify_matrix(&low), &pol),
    );
    println!("rank: complex {rc}, real {rr}");
    if rr != 2 * rc {
        return Err("real rank must double the complex rank".into());
    }

    let v = CVector::from_fn(4, |_, _| complex_gaussian(&mut rng));
    let jv = realify_vector(&(&v * Complex64::i()));
    let rot = jrotate(&realify_vector(&v))?;
    println!(
        "j·v vs rotation of realified v: max diff {:.2e}",
        (jv - rot).amax()
    );

    println!(
        "{}",
        realify_matrix(&DMatrix::from_element(1, 1, Complex64::new(1.0, 2.0)))
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
