mod common;

use std::f64::consts::PI;

use common::{aniso, boxed, c, point, tau_i};
use lattice_lab::rmatrix::*;
use lattice_lab::theta::ThetaSeries;
use lattice_lab::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn lambda() -> impl Strategy<Value = Complex64> {
    (0.05..0.95f64, -0.25..0.25f64).prop_map(|(re, im)| c(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ice_rule_and_weight_conservation(u in point(), v in point(), l in lambda(), k in boxed(0.5, 1.5)) {
        let an = aniso();
        let ts = tau_i();
        let d = DynamicalParam::new(l).unwrap();
        let mats = [
            r_rational(u, v, k).ok(),
            Some(r_sixvertex(u, v, &an)),
            r_felder(u - v, &d, &an, &ts).ok(),
            r_trig_sos(u, v, &d, &an).ok(),
        ];
        for (idx, m) in mats.iter().enumerate() {
            if let Some(m) = m {
                prop_assert!(m.satisfies_ice_rule());
                if idx >= 2 {
                    prop_assert!(m.weight_commutator() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn ybe_rational(z in prop::array::uniform3(boxed(-2.0, 2.0)), k in boxed(0.2, 1.0)) {
        let r = ybe_residual(|a, b| r_rational(a, b, k), z[0], z[1], z[2]);
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-12);
    }

    #[test]
    fn ybe_sixvertex(z in prop::array::uniform3(boxed(-1.0, 1.0))) {
        let an = aniso();
        let r = ybe_residual(|a, b| Ok(r_sixvertex(a, b, &an)), z[0], z[1], z[2]).unwrap();
        prop_assert!(r <= 1e-12);
    }

    #[test]
    fn dybe_felder(u in prop::array::uniform3(point()), l in lambda()) {
        let an = aniso();
        let d = DynamicalParam::new(l).unwrap();
        let r = dybe_residual(u[0], u[1], u[2], &d, &an, &tau_i());
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-10);
    }

    #[test]
    fn gauge_commutes_with_scaling(u in point(), v in point(), rho in boxed(0.5, 1.5)) {
        let m = r_sixvertex(u, v, &aniso());
        let g = m.gauge(rho).gauge(rho.inv());
        prop_assert!((g.0 - m.0).iter().all(|z| z.norm() <= 1e-14 * m.max_abs().max(1.0)));
    }

    #[test]
    fn felder_prefactor_gives_trigonometric(u in point(), v in point(), l in lambda()) {
        let ts = ThetaSeries::new(c(0.0, 30.0)).unwrap();
        let an = aniso();
        let d = DynamicalParam::new(l).unwrap();
        let (z, w) = ((2.0 * PI * I * u).exp(), (2.0 * PI * I * v).exp());
        let el = r_felder(u - v, &d, &an, &ts);
        prop_assume!(el.is_ok());
        let el = el.unwrap().scale(2.0 * PI * I * (PI * I * (u + v)).exp());
        let tr = r_trig_sos(z, w, &d, &an).unwrap();
        for (x, y) in el.0.iter().zip(tr.0.iter()) {
            prop_assert!((x - y).norm() <= 1e-8);
        }
    }
}
