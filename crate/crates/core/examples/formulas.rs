//! Emits the membership formula for the norm-one torus and evaluates it at
//! points, next to the direct answer.

use tame_tori::dpas::{context_evaluator, emit_neron_formula, emit_tower_conditions, point_assignment, Budget};
use tame_tori::localfield::LocalFieldSpec;
use tame_tori::torus::{fixtures, parse_point_literals};

fn main() -> tame_tori::Result<()> {
    let ctx = fixtures::norm_one_ramified(LocalFieldSpec::padic(5, 10));
    let tower = emit_tower_conditions(ctx.group());
    let phi = emit_neron_formula(&ctx);
    println!("tower conditions: {} characters", tower.to_string().len());
    println!("membership formula: {} characters", phi.to_string().len());

    let ev = context_evaluator(&ctx, Budget::default());
    for lit in ["[1,0]", "[-1,0]", "[-3/2,-1/2]"] {
        let t = ctx.point_from_literals(&parse_point_literals(lit)?)?;
        let answer = ev.evaluate(&phi, &point_assignment(&ctx, &t));
        println!("{lit:14} formula {answer:7} direct {}", ctx.neron_membership_direct(&t)?);
    }
    Ok(())
}
