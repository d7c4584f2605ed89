use k3glue_core::k3_config::{enumerate_configs, moduli_dims, validate, FiberConfig, FiberType, FINITE_TYPES};
use proptest::prelude::*;

#[test]
fn every_valid_small_config_has_twenty_moduli() {
    let all = enumerate_configs(6);
    assert!(!all.is_empty());
    for c in all.iter().filter(|c| validate(c).pass) {
        assert_eq!(c.euler_sum(), 24);
        assert_eq!(moduli_dims(c).unwrap().total, 20, "{:?}", c.fibers);
    }
}

#[test]
fn reference_configurations() {
    let generic = moduli_dims(&FiberConfig::parse("24xI1").unwrap()).unwrap();
    assert_eq!((generic.dim_b, generic.total), (19, 20));
    let iso = moduli_dims(&FiberConfig::parse("4xI0*").unwrap()).unwrap();
    assert_eq!((iso.dim_b, iso.total), (3, 20));
    assert!(!validate(&FiberConfig::parse("23xI1").unwrap()).pass);
    assert!(moduli_dims(&FiberConfig::parse("23xI1").unwrap()).is_err());
}

#[test]
fn finite_types_have_orders() {
    for f in FINITE_TYPES {
        assert!(f.is_finite_monodromy());
        assert!(f.distortion_order().is_some() && f.beta().is_some());
    }
}

proptest! {
    #[test]
    fn parse_display_round_trip(n in 0u32..20, star in any::<bool>()) {
        let f = if star { FiberType::IStar(n) } else { FiberType::I(n.max(1)) };
        prop_assert_eq!(FiberType::parse(&f.to_string()).unwrap(), f);
    }
}
