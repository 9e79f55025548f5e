mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring((a, b, c) in jet_triple()) {
        ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn product_rule((a, b, _) in jet_triple()) {
        leibniz(&a, &b)?;
    }

    #[test]
    fn partials_commute((a, _, _) in jet_triple()) {
        mixed_partials(&a)?;
    }

    #[test]
    fn inverse(a in unit_jet()) {
        inverse_multiplies_back(&a)?;
    }
}
