use crate::error::{invalid, Error, Result};
use crate::localfield::{compute_automorphisms, GaloisData, LocalField, LocalFieldSpec, Tower, TowerSpec};
use crate::zlattice::{coinvariants_of, FinAbGroup, FiniteGroup, GammaLattice, IntMatrix, Resolution};

/// Extra base-field digits carried internally beyond the requested precision.
pub const GUARD_DIGITS: i64 = 8;

/// Data attached to the cyclic inertia group `I = <tau>`.
#[derive(Clone, Debug)]
pub struct InertiaData {
    /// `tau^0, tau^1, .., tau^{e-1}` as group indices.
    pub elements: Vec<usize>,
    pub theta: IntMatrix,
    /// `sum_k theta^k`.
    pub norm: IntMatrix,
    /// `sum_k k theta^k`.
    pub twisted_norm: IntMatrix,
    /// `X_I`.
    pub coinvariants: FinAbGroup,
    /// `|k_L|`.
    pub residue_size: u64,
    /// Discrete log of the residue of `tau(y) / y`.
    pub zeta_log: u64,
}

impl InertiaData {
    pub fn tau(&self) -> usize {
        self.elements[1 % self.elements.len()]
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Everything needed to work with the torus attached to the fixed choices
/// and a tower, at a fixed precision.
#[derive(Clone, Debug)]
pub struct TorusContext {
    group: FiniteGroup,
    lattice: GammaLattice,
    resolution: Resolution,
    explicit_resolution: bool,
    tower_spec: TowerSpec,
    field_spec: LocalFieldSpec,
    tower: Tower,
    galois: GaloisData,
    inertia: InertiaData,
}

impl TorusContext {
    /// Builds the context. `field_spec.precision` is the precision answers
    /// are certified to; arithmetic runs with [`GUARD_DIGITS`] more.
    pub fn new(
        group: FiniteGroup,
        lattice: GammaLattice,
        resolution: Option<Resolution>,
        tower_spec: TowerSpec,
        field_spec: LocalFieldSpec,
    ) -> Result<Self> {
        if lattice.thetas().len() != group.order() {
            return invalid("lattice action and group have different orders");
        }
        let (e, f) = (tower_spec.e(), tower_spec.f());
        if e * f != group.order() || e != group.inertia_order() {
            return invalid(format!(
                "tower has e = {e}, f = {f} but the group has order {} with inertia of order {}",
                group.order(),
                group.inertia_order()
            ));
        }
        let p = field_spec.residue_characteristic() as usize;
        if e % p == 0 {
            return invalid(format!("p = {p} divides e = {e}: the extension is not tame"));
        }
        if p <= group.order() {
            return invalid(format!(
                "residue characteristic {p} must exceed the group order {}",
                group.order()
            ));
        }
        if field_spec.precision < 2 {
            return invalid("precision must be at least 2");
        }
        let Some(tau) = group.inertia_generator() else {
            return invalid("inertia subgroup is not cyclic");
        };
        let explicit_resolution = resolution.is_some();
        let resolution = resolution.unwrap_or_else(|| Resolution::induced(&lattice, &group));
        if !resolution.is_equivariant(&lattice) || !resolution.is_surjective() {
            return invalid("resolution is not an equivariant surjection");
        }
        let field = LocalField::new(field_spec.with_precision(field_spec.precision + GUARD_DIGITS))?;
        let tower = tower_spec.build(&field)?;
        let galois = compute_automorphisms(&tower, &group)?;
        let elements: Vec<usize> = (0..e).map(|k| group.pow(tau, k)).collect();
        let theta = lattice.theta(tau).clone();
        let n = lattice.rank();
        let mut norm = IntMatrix::zeros(n, n);
        let mut twisted_norm = IntMatrix::zeros(n, n);
        for (k, &g) in elements.iter().enumerate() {
            norm = norm.add(lattice.theta(g));
            twisted_norm = twisted_norm.add(&lattice.theta(g).scale(k as i64));
        }
        let coinvariants = coinvariants_of(n, &lattice.restrict(&elements));
        let zeta = tower.ac(galois.y_image(tau))?;
        let kl = tower.residue_field();
        let zeta_log = kl
            .log(&zeta)
            .ok_or_else(|| Error::InsufficientPrecision("residue of tau(y)/y".into()))?;
        let inertia = InertiaData {
            elements,
            theta,
            norm,
            twisted_norm,
            coinvariants,
            residue_size: kl.size(),
            zeta_log,
        };
        Ok(TorusContext {
            group,
            lattice,
            resolution,
            explicit_resolution,
            tower_spec,
            field_spec,
            tower,
            galois,
            inertia,
        })
    }

    /// The same torus at another certified precision.
    pub fn with_precision(&self, precision: i64) -> Result<Self> {
        TorusContext::new(
            self.group.clone(),
            self.lattice.clone(),
            self.explicit_resolution.then(|| self.resolution.clone()),
            self.tower_spec.clone(),
            self.field_spec.with_precision(precision),
        )
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn lattice(&self) -> &GammaLattice {
        &self.lattice
    }

    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }

    pub fn tower_spec(&self) -> &TowerSpec {
        &self.tower_spec
    }

    pub fn field_spec(&self) -> &LocalFieldSpec {
        &self.field_spec
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn field(&self) -> &LocalField {
        self.tower.field()
    }

    pub fn galois(&self) -> &GaloisData {
        &self.galois
    }

    pub fn inertia(&self) -> &InertiaData {
        &self.inertia
    }

    /// Certified precision `N`.
    pub fn precision(&self) -> i64 {
        self.field_spec.precision
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// `X_I`, the component group of the Néron model over the maximal
    /// unramified extension.
    pub fn component_group(&self) -> FinAbGroup {
        self.inertia.coinvariants.clone()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn norm_one(precision: i64) -> TorusContext {
        let g = FiniteGroup::cyclic(2, 2).unwrap();
        let x = GammaLattice::new(&g, 1, vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])])
            .unwrap();
        let spec = TowerSpec {
            b: vec!["0".into()],
            c: vec![vec!["-pi".into()], vec!["0".into()]],
        };
        TorusContext::new(g, x, None, spec, LocalFieldSpec::padic(5, precision)).unwrap()
    }

    #[test]
    fn norm_one_component_group() {
        let ctx = norm_one(8);
        assert_eq!(ctx.component_group().to_string(), "Z/2");
        // tau(y) = -y, and -1 = 2^2 in F_5
        assert_eq!(ctx.inertia().zeta_log, 2);
        assert_eq!(ctx.inertia().norm, IntMatrix::zeros(1, 1));
    }

    #[test]
    fn rejects_wild_or_small_p() {
        let g = FiniteGroup::cyclic(2, 2).unwrap();
        let x = GammaLattice::trivial(&g, 1);
        let spec = TowerSpec {
            b: vec!["0".into()],
            c: vec![vec!["-pi".into()], vec!["0".into()]],
        };
        let err = TorusContext::new(g, x, None, spec, LocalFieldSpec::padic(2, 6));
        assert!(err.is_err());
    }
}
