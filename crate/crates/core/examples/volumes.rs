//! Volumes of `T°(O_F)` over several residue fields and the rational
//! function in `L` they come from.

use tame_tori::localfield::LocalFieldSpec;
use tame_tori::measures::{fit_rational_function, stabilized_volume, Sample, DEFAULT_CLASS_BOUND};
use tame_tori::torus::fixtures;

fn main() -> tame_tori::Result<()> {
    let mut samples = vec![];
    for q in [5u32, 7, 11, 13, 17] {
        let ctx = fixtures::norm_one_ramified(LocalFieldSpec::padic(q, 6));
        let v = stabilized_volume(&ctx, 1, 3, DEFAULT_CLASS_BOUND)?;
        println!("q = {q:2}  level {}  volume {}", v.level, v.volume);
        samples.push(Sample::new(q as u64, v.volume));
    }
    let (holdout, train) = samples.split_last().unwrap();
    let c = fit_rational_function(train, holdout, 2)?;
    println!("fit: {c}");
    Ok(())
}
