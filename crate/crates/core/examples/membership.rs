//! Decides `t in T°(O_F)` by the Kottwitz map and by lifting to the
//! induced torus, for a few fixed and random points.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tame_tori::localfield::LocalFieldSpec;
use tame_tori::torus::{fixtures, parse_point_literals, PointRecipe};

fn main() -> tame_tori::Result<()> {
    let ctx = fixtures::norm_one_ramified(LocalFieldSpec::padic(5, 12));
    for lit in ["[1,0]", "[-1,0]", "[-3/2,-1/2]"] {
        let lits = parse_point_literals(lit)?;
        let report = ctx.membership_report(|c| c.point_from_literals(&lits))?;
        let witness = report
            .lift
            .and_then(|l| l.witness)
            .map(|r| ctx.format_induced(&r))
            .unwrap_or_else(|| "-".into());
        println!("{lit:14} member {:5} class {:?} witness {witness}", report.member, report.class);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut total) = (0, 0);
    for _ in 0..50 {
        let t = PointRecipe::random(&ctx, &mut rng).realize(&ctx)?;
        let direct = ctx.neron_membership_direct(&t)?;
        let lift = ctx.neron_membership_lift(&t)?;
        total += 1;
        agree += (direct == lift.member) as usize;
    }
    println!("random points: {agree}/{total} agree");
    Ok(())
}
