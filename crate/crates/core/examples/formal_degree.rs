use num_rational::BigRational;
use tame_tori::measures::{formal_degree, formal_degree_motivic, MotivicConstant};

fn main() -> tame_tori::Result<()> {
    let vol = BigRational::new(4.into(), 5.into());
    println!("deg 2, vol 4/5: {}", formal_degree(2, &vol)?);

    // vol = 1 - L^-1, the split torus
    let m = MotivicConstant::one().sub(&MotivicConstant::monomial(1, -1));
    let d = formal_degree_motivic(&MotivicConstant::one(), 3, &m)?;
    println!("deg 3 over 1 - L^-1: {d}");
    for q in [5, 7] {
        println!("  at q = {q}: {}", d.specialize(q));
    }
    Ok(())
}
