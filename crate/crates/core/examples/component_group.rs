//! Component groups `X_*(T)_I` for the bundled tori.

use tame_tori::localfield::LocalFieldSpec;
use tame_tori::torus::fixtures;
use tame_tori::zlattice::check_y_i_torsion_free;

fn main() {
    let field = LocalFieldSpec::padic(5, 10);
    for (name, ctx) in [
        ("split", fixtures::split(field.clone())),
        ("norm-one", fixtures::norm_one_ramified(field.clone())),
        ("unramified induced", fixtures::unramified_induced(field.clone(), "2")),
        ("Klein four", fixtures::klein_four(field.clone(), "2")),
        ("quartic rotation", fixtures::quartic_rotation(field.clone())),
    ] {
        let y_free = check_y_i_torsion_free(ctx.resolution(), &ctx.group().inertia());
        println!("{name:20} X_I = {:8} Y_I torsion free: {y_free}", ctx.component_group().to_string());
    }
}
