//! The Kottwitz map `w_T : T(L) -> X_I` and the two membership tests for
//! the identity component of the Néron model.
//!
//! Both routes first write `t` as a norm `N_I(rho)` from `T(E)` to `T(L)` on
//! the level of valuations and angular components. The direct route stops
//! there and reads off `[ord rho]`. The lift route builds `rho` numerically,
//! pushes it to an `L`-point `r` of the induced torus with `alpha(r) = t`, and
//! reads the answer off `beta(r)`, the image of `w_R(r) = ord(r)` in `X_I`.

use num_integer::Integer;

use super::context::TorusContext;
use super::point::{InducedPoint, TorusPoint};
use crate::error::{Error, Result};
use crate::localfield::{EElem, EOrd};
use crate::zlattice::{smith_normal_form, snf::solve_integer, IntMatrix};

/// Largest modulus `|k_L|^r - 1` tried when searching unramified extensions.
const MAX_MODULUS: u128 = 1 << 62;
/// Bound on `e^{rank ker N}` kernel translates examined.
const MAX_TRANSLATES: u64 = 1 << 20;
const NEWTON_STEPS: usize = 64;

/// Valuation and angular-component data of a solution of `N_I(rho) = t`
/// over the unramified extension of degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSolution {
    pub degree: u32,
    /// `ord_E rho`.
    pub mu: Vec<i64>,
    /// Logs of `ac(rho) / ac(y)^mu` against the fixed generator of `k_L^x`;
    /// only available when `degree == 1`.
    pub alpha: Option<Vec<i64>>,
    /// `[mu]` in canonical coordinates of `X_I`.
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftOutcome {
    pub member: bool,
    /// `beta(r)`: the image of `w_R(r)` in `X_I`.
    pub class: Vec<i64>,
    /// `w_R(r)` in canonical coordinates of `Y_I`.
    pub w_r: Vec<i64>,
    /// An `r` with `alpha(r) = t` and `beta(r) = 0`, when `t` is a member.
    pub witness: Option<InducedPoint>,
}

/// Both answers for one point, checked at two precisions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub member: bool,
    pub class: Vec<i64>,
    /// `None` when the lift route hit an obstruction.
    pub lift: Option<LiftOutcome>,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

fn inv_mod(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let g = a.extended_gcd(&m);
    (g.gcd == 1).then(|| g.x.rem_euclid(m))
}

impl TorusContext {
    fn require_rational(&self, t: &TorusPoint) -> Result<()> {
        if self.is_rational_point(t)? {
            Ok(())
        } else {
            Err(Error::NotRational(self.format_point(t)))
        }
    }

    /// `(ord_E t_1, .., ord_E t_n)`.
    pub fn ord_vector(&self, t: &TorusPoint) -> Result<Vec<i64>> {
        t.coords
            .iter()
            .map(|c| {
                self.tower()
                    .ord(c)
                    .finite()
                    .ok_or_else(|| Error::InsufficientPrecision("coordinate vanishes".into()))
            })
            .collect()
    }

    /// Discrete logs of `ac(t_i)` in `k_L^x`.
    pub fn ac_logs(&self, t: &TorusPoint) -> Result<Vec<u64>> {
        let kl = self.tower().residue_field();
        t.coords
            .iter()
            .map(|c| {
                let a = self.tower().ac(c)?;
                kl.log(&a)
                    .ok_or_else(|| Error::InsufficientPrecision("angular component vanishes".into()))
            })
            .collect()
    }

    /// Solves `N_I(rho) = t` on valuations and angular components, trying
    /// unramified extensions of increasing degree until it is solvable.
    pub fn solve_norm(&self, t: &TorusPoint) -> Result<NormSolution> {
        let inert = self.inertia();
        let n = self.rank();
        let e = inert.order() as i64;
        let nu = self.ord_vector(t)?;
        let a = self.ac_logs(t)?;
        let (mu0, kernel) = solve_integer(&inert.norm, &nu).ok_or_else(|| {
            Error::LiftingObstruction(format!("valuation vector {nu:?} is not a norm"))
        })?;
        let translates = (e as u64).checked_pow(kernel.len() as u32).unwrap_or(u64::MAX);
        if translates > MAX_TRANSLATES {
            return Err(Error::EnumerationTooLarge(format!("{translates} kernel translates")));
        }
        let snf = smith_normal_form(&inert.norm);
        let q = inert.residue_size as u128;
        let mut qr: u128 = q;
        let mut r = 1u32;
        while qr - 1 < MAX_MODULUS {
            let m = (qr - 1) as i128;
            let s = ((qr - 1) / (q - 1)) as i128;
            let ar: Vec<i128> = a.iter().map(|&x| (x as i128 * s).rem_euclid(m)).collect();
            let z = (inert.zeta_log as i128 * s).rem_euclid(m);
            let g: Vec<i128> = (0..n)
                .map(|i| match snf.diag(i) as i128 {
                    0 => m,
                    d => gcd_i128(d, m),
                })
                .collect();
            let mut found: Option<NormSolution> = None;
            for idx in 0..translates {
                let mut mu = mu0.clone();
                let mut rest = idx;
                for kv in &kernel {
                    let c = (rest % e as u64) as i64;
                    rest /= e as u64;
                    for (x, k) in mu.iter_mut().zip(kv) {
                        *x += c * k;
                    }
                }
                let dmu = inert.twisted_norm.apply(&mu);
                let v: Vec<i128> = (0..n)
                    .map(|j| (ar[j] - z * dmu[j] as i128).rem_euclid(m))
                    .collect();
                let uv: Vec<i128> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| snf.u[(i, j)] as i128 * v[j])
                            .sum::<i128>()
                            .rem_euclid(m)
                    })
                    .collect();
                if (0..n).any(|i| uv[i] % g[i] != 0) {
                    continue;
                }
                let class = inert.coinvariants.project(&mu);
                if let Some(prev) = &found {
                    if prev.class != class {
                        return Err(Error::Disagreement(format!(
                            "norm solutions give classes {:?} and {class:?}",
                            prev.class
                        )));
                    }
                    continue;
                }
                let alpha = (r == 1).then(|| {
                    let y: Vec<i64> = (0..n)
                        .map(|i| {
                            let d = snf.diag(i) as i128;
                            if d == 0 {
                                return 0;
                            }
                            let mg = m / g[i];
                            let inv = inv_mod((d / g[i]).rem_euclid(mg), mg).expect("coprime");
                            ((uv[i] / g[i]) * inv).rem_euclid(mg) as i64
                        })
                        .collect();
                    snf.v.apply(&y)
                });
                found = Some(NormSolution {
                    degree: r,
                    mu,
                    alpha,
                    class,
                });
            }
            if let Some(sol) = found {
                return Ok(sol);
            }
            qr *= q;
            r += 1;
        }
        Err(Error::LiftingObstruction(
            "angular components are not norms in any small unramified extension".into(),
        ))
    }

    /// `w_T(t)` in canonical coordinates of `X_I`.
    pub fn kottwitz_image(&self, t: &TorusPoint) -> Result<Vec<i64>> {
        self.require_rational(t)?;
        Ok(self.solve_norm(t)?.class)
    }

    pub fn neron_membership_direct(&self, t: &TorusPoint) -> Result<bool> {
        Ok(self.kottwitz_image(t)?.iter().all(|&c| c == 0))
    }

    /// Membership computed over `L`. The norm equation above already lives
    /// over `L`, so for `f = 1` this is the direct route verbatim.
    pub fn neron_membership_descent(&self, t: &TorusPoint) -> Result<bool> {
        self.neron_membership_direct(t)
    }

    /// `N_I(rho) = prod_k tau^k . rho`.
    pub fn inertia_norm(&self, rho: &TorusPoint) -> Result<TorusPoint> {
        let tw = self.tower();
        let mut acc = vec![tw.one(); self.rank()];
        for &g in &self.inertia().elements {
            let gs = self.act(g, rho)?;
            for (a, c) in acc.iter_mut().zip(&gs.coords) {
                *a = tw.mul(a, c);
            }
        }
        Ok(TorusPoint { coords: acc })
    }

    /// The `e`-th root of a principal unit.
    fn principal_root(&self, u: &EElem, e: i64) -> Result<EElem> {
        let tw = self.tower();
        if e == 1 {
            return Ok(u.clone());
        }
        let ef = tw.from_f(&self.field().from_int(e));
        let mut x = tw.one();
        for _ in 0..NEWTON_STEPS {
            let err = tw.sub(u, &tw.pow(&x, e)?);
            if tw.is_zero(&err) {
                return Ok(x);
            }
            let d = tw.mul(&ef, &tw.pow(&x, e - 1)?);
            x = tw.add(&x, &tw.mul(&err, &tw.unit_inverse(&d)?));
        }
        Err(Error::InsufficientPrecision("principal root did not converge".into()))
    }

    fn expect_same(&self, a: &EElem, b: &EElem, what: &str) -> Result<()> {
        match self.same(a, b, self.precision()) {
            Some(true) => Ok(()),
            Some(false) => Err(Error::Disagreement(format!("{what} does not reproduce t"))),
            None => Err(Error::InsufficientPrecision(format!("{what} is undetermined"))),
        }
    }

    /// Builds `rho` in `T(E)` with `N_I(rho) = t`, and `ord rho = 0` when
    /// `w_T(t) = 0`.
    fn norm_preimage(&self, t: &TorusPoint, sol: &NormSolution) -> Result<TorusPoint> {
        let tw = self.tower();
        let inert = self.inertia();
        let alpha = sol.alpha.as_ref().ok_or_else(|| {
            Error::LiftingObstruction(format!(
                "t is a norm only after an unramified extension of degree {}",
                sol.degree
            ))
        })?;
        let omega = tw.lift(&tw.residue_field().generator());
        let y = tw.y();
        let rho0 = TorusPoint {
            coords: (0..self.rank())
                .map(|i| Ok(tw.mul(&tw.pow(&y, sol.mu[i])?, &tw.pow(&omega, alpha[i])?)))
                .collect::<Result<Vec<_>>>()?,
        };
        let n0 = self.inertia_norm(&rho0)?;
        let e = inert.order() as i64;
        let mut rho = rho0;
        for j in 0..self.rank() {
            let tj = tw.div(&t.coords[j], &n0.coords[j])?;
            match tw.ord(&tw.sub(&tj, &tw.one())) {
                EOrd::Finite(v) if v < 1 => {
                    return Err(Error::Disagreement("norm data does not match t".into()))
                }
                _ => {}
            }
            let u1 = self.principal_root(&tj, e)?;
            rho.coords[j] = tw.mul(&rho.coords[j], &u1);
        }
        if sol.class.iter().all(|&c| c == 0) {
            let shift = inert.theta.sub(&IntMatrix::identity(self.rank()));
            let (w, _) = solve_integer(&shift, &sol.mu)
                .ok_or_else(|| Error::Disagreement("trivial class is not a coboundary".into()))?;
            let chi = TorusPoint {
                coords: w.iter().map(|&k| tw.pow(&y, -k)).collect::<Result<Vec<_>>>()?,
            };
            let tchi = self.act(inert.tau(), &chi)?;
            for j in 0..self.rank() {
                rho.coords[j] = tw.mul(&rho.coords[j], &tw.div(&tchi.coords[j], &chi.coords[j])?);
            }
        }
        Ok(rho)
    }

    /// Finds `r` in `R(L)` with `alpha(r) = t` and evaluates `beta(r)`.
    pub fn neron_membership_lift(&self, t: &TorusPoint) -> Result<LiftOutcome> {
        self.require_rational(t)?;
        let tw = self.tower();
        let inert = self.inertia();
        let res = self.resolution();
        let a = res.surjection();
        let sol = self.solve_norm(t)?;
        let rho = self.norm_preimage(t, &sol)?;

        let orbits = res.orbits(&inert.elements);
        if !res.is_free_over(&inert.elements) {
            return Err(Error::LiftingObstruction("inertia does not act freely on Y".into()));
        }
        let n = self.rank();
        let sm = IntMatrix::from_rows(
            &(0..n)
                .map(|i| orbits.iter().map(|o| a[(i, o.rep)]).collect())
                .collect::<Vec<Vec<i64>>>(),
        );
        let mut sr = IntMatrix::zeros(orbits.len(), n);
        for i in 0..n {
            let mut unit = vec![0; n];
            unit[i] = 1;
            let (x, _) = solve_integer(&sm, &unit).ok_or_else(|| {
                Error::LiftingObstruction("orbit representatives do not span X".into())
            })?;
            for (o, v) in x.iter().enumerate() {
                sr[(o, i)] = *v;
            }
        }

        let mut coords = vec![tw.one(); res.rank()];
        let mut beta_ambient = vec![0i64; res.rank()];
        for (o, orbit) in orbits.iter().enumerate() {
            let r_o = self.monomial(&rho.coords, sr.row(o))?;
            beta_ambient[orbit.rep] = tw
                .ord(&r_o)
                .finite()
                .ok_or_else(|| Error::InsufficientPrecision("lift coordinate vanishes".into()))?;
            for (k, &b) in orbit.members.iter().enumerate() {
                coords[b] = self.galois().apply(tw, inert.elements[k], &r_o);
            }
        }
        for j in 0..n {
            let img = self.monomial(&coords, a.row(j))?;
            self.expect_same(&img, &t.coords[j], "alpha(r)")?;
        }

        let yi = res.coinvariants(&inert.elements);
        let w_r = yi.project(&beta_ambient);
        let class = inert.coinvariants.project(&a.apply(&beta_ambient));
        let member = class.iter().all(|&c| c == 0);
        let witness = member.then(|| InducedPoint { coords });
        Ok(LiftOutcome {
            member,
            class,
            w_r,
            witness,
        })
    }

    /// Runs both routes at the certified precision and at four more digits.
    /// `make` rebuilds the point in a given context.
    pub fn membership_report<F>(&self, make: F) -> Result<MembershipReport>
    where
        F: Fn(&TorusContext) -> Result<TorusPoint>,
    {
        let fine = self.with_precision(self.precision() + 4)?;
        let here = self.report_once(&make(self)?)?;
        let there = fine.report_once(&make(&fine)?)?;
        if here.member != there.member || here.class != there.class {
            return Err(Error::Unstable(format!(
                "class {:?} at precision {} but {:?} at {}",
                here.class,
                self.precision(),
                there.class,
                fine.precision()
            )));
        }
        if let (Some(a), Some(b)) = (&here.lift, &there.lift) {
            if a.member != b.member {
                return Err(Error::Unstable("lift answer depends on precision".into()));
            }
        }
        Ok(here)
    }

    fn report_once(&self, t: &TorusPoint) -> Result<MembershipReport> {
        let class = self.kottwitz_image(t)?;
        let member = class.iter().all(|&c| c == 0);
        let lift = match self.neron_membership_lift(t) {
            Ok(l) => Some(l),
            Err(Error::LiftingObstruction(_)) => None,
            Err(err) => return Err(err),
        };
        if let Some(l) = &lift {
            if l.member != member || l.class != class {
                return Err(Error::Disagreement(format!(
                    "direct class {class:?}, lift class {:?}",
                    l.class
                )));
            }
        }
        Ok(MembershipReport {
            member,
            class,
            lift,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::context::tests::norm_one;
    use super::*;

    fn lit(ctx: &TorusContext, s: &str) -> TorusPoint {
        ctx.point_from_literals(&crate::torus::parse_point_literals(s).unwrap())
            .unwrap()
    }

    #[test]
    fn minus_one_is_outside() {
        let ctx = norm_one(8);
        let t = lit(&ctx, "[-1, 0]");
        assert_eq!(ctx.kottwitz_image(&t).unwrap(), vec![1]);
        assert!(!ctx.neron_membership_direct(&t).unwrap());
        let l = ctx.neron_membership_lift(&t).unwrap();
        assert!(!l.member);
        assert!(l.witness.is_none());
    }

    #[test]
    fn hilbert_90_unit_is_inside_with_witness() {
        let ctx = norm_one(8);
        let t = lit(&ctx, "[-3/2, -1/2]");
        assert!(ctx.neron_membership_direct(&t).unwrap());
        let l = ctx.neron_membership_lift(&t).unwrap();
        assert!(l.member);
        assert!(l.witness.is_some());
        assert_eq!(l.w_r, vec![0]);
    }

    #[test]
    fn one_is_inside() {
        let ctx = norm_one(8);
        let t = lit(&ctx, "[1, 0]");
        assert!(ctx.membership_report(|c| Ok(lit(c, "[1, 0]"))).unwrap().member);
        assert_eq!(ctx.kottwitz_image(&t).unwrap(), vec![0]);
    }

    #[test]
    fn irrational_points_are_rejected() {
        let ctx = norm_one(8);
        let t = lit(&ctx, "[0, 1]");
        assert!(matches!(ctx.kottwitz_image(&t), Err(Error::NotRational(_))));
    }

    fn agreement(ctx: &TorusContext, samples: usize, seed: u64) -> (usize, usize) {
        use crate::torus::PointRecipe;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (mut inside, mut outside) = (0, 0);
        for _ in 0..samples {
            let recipe = PointRecipe::random(ctx, &mut rng);
            let rep = ctx.membership_report(|c| recipe.realize(c)).unwrap();
            assert!(rep.lift.is_some(), "lift obstructed for {recipe:?}");
            if rep.member {
                inside += 1;
            } else {
                outside += 1;
            }
        }
        (inside, outside)
    }

    #[test]
    fn routes_agree_on_fixtures() {
        use crate::localfield::LocalFieldSpec;
        use crate::torus::fixtures::*;
        let f = LocalFieldSpec::padic(5, 8);
        for ctx in [
            split(f.clone()),
            norm_one_ramified(f.clone()),
            unramified_induced(f.clone(), "2"),
            klein_four(LocalFieldSpec::padic(5, 10), "2"),
            quartic_rotation(f.clone()),
        ] {
            let (i, o) = agreement(&ctx, 12, 3);
            assert!(i + o == 12);
        }
    }
}
