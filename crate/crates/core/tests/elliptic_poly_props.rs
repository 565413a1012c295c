mod common;

use common::{c, point, points, tau_i};
use lattice_lab::elliptic_poly::*;
use lattice_lab::residual::rel_residual;
use lattice_lab::Complex64;
use proptest::prelude::*;

/// `Π_k θ(u − z_k)` lies in `Θ_n(χ)` with `α = Σ z_k`.
fn product(zeros: &[Complex64]) -> impl Fn(Complex64) -> Complex64 + '_ {
    let ts = tau_i();
    move |u| zeros.iter().map(|&z| ts.theta(u - z).unwrap()).product()
}

fn degree_and_zeros() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    (1usize..=6).prop_flat_map(|n| (points(n), points(n), points(50)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn interpolation_reconstructs_members((zeros, nodes, probes) in degree_and_zeros()) {
        let ts = tau_i();
        let n = zeros.len();
        let alpha: Complex64 = zeros.iter().sum();
        let ns = NodeSet::new(nodes, alpha, &ts);
        prop_assume!(ns.is_ok());
        let ns = ns.unwrap();
        let f = product(&zeros);
        let vals: Vec<Complex64> = ns.nodes.iter().map(|&u| f(u)).collect();
        let p = interpolate(&vals, &ns, &Character::from_alpha(n, alpha).unwrap(), &ts);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        for u in probes {
            prop_assert!(rel_residual(p.eval(u).unwrap(), f(u)) <= 1e-8);
        }
    }

    #[test]
    fn members_agreeing_on_nodes_coincide(a in points(3), nodes in points(3), probe in point()) {
        // Interpolating from one member's nodal values reproduces it, so two
        // members with equal nodal data are the same function.
        let ts = tau_i();
        let alpha: Complex64 = a.iter().sum();
        let ns = NodeSet::new(nodes, alpha, &ts);
        prop_assume!(ns.is_ok());
        let ns = ns.unwrap();
        let f = product(&a);
        let ch = Character::from_alpha(3, alpha).unwrap();
        let vals: Vec<Complex64> = ns.nodes.iter().map(|&u| f(u)).collect();
        let p = interpolate(&vals, &ns, &ch, &ts).unwrap();
        let again: Vec<Complex64> = ns.nodes.iter().map(|&u| p.eval(u).unwrap()).collect();
        let q = interpolate(&again, &ns, &ch, &ts).unwrap();
        prop_assert!(rel_residual(p.eval(probe).unwrap(), q.eval(probe).unwrap()) <= 1e-9);
    }

    #[test]
    fn character_of_products(zeros in points(4), u in point()) {
        let ts = tau_i();
        let alpha: Complex64 = zeros.iter().sum();
        let f = product(&zeros);
        let (r1, rt) = character_residuals(|x| Ok(f(x)), &Character::from_alpha(4, alpha).unwrap(), u, &ts).unwrap();
        prop_assert!(r1 <= 1e-10 && rt <= 1e-10);
    }

    #[test]
    fn vandermonde_ratio_is_node_independent(a in points(5), b in points(5)) {
        let ts = tau_i();
        let alpha = c(0.3, 0.1);
        let shifts = [(c(0.1, 0.0), c(0.47, 0.2)), (c(0.35, 0.1), c(0.81, 0.03)), (c(0.6, 0.05), c(0.02, 0.29))];
        let basis: Vec<_> = shifts
            .iter()
            .map(|&(p, q)| {
                let ts = &ts;
                move |u: Complex64| Ok(ts.theta(u - p)? * ts.theta(u - q)? * ts.theta(u - (alpha - p - q))?)
            })
            .collect();
        let na = NodeSet::new(a[..3].to_vec(), alpha, &ts);
        let nb = NodeSet::new(b[..3].to_vec(), alpha, &ts);
        prop_assume!(na.is_ok() && nb.is_ok());
        let ra = elliptic_vandermonde_ratio(&basis, &na.unwrap(), &ts);
        let rb = elliptic_vandermonde_ratio(&basis, &nb.unwrap(), &ts);
        prop_assume!(ra.is_ok() && rb.is_ok());
        prop_assert!(rel_residual(ra.unwrap(), rb.unwrap()) <= 1e-7);
    }

    #[test]
    fn fay(u in point(), z in point(), l in (0.05..0.95f64, -0.25..0.25f64)) {
        let r = fay_residual(u, z, c(l.0, l.1), &tau_i());
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-9);
    }

    #[test]
    fn addition(pts in points(4), lams in points(4), v in point(), n in 1usize..=4) {
        let r = addition_formula_residual(&pts[..n], &lams[..n], v, &tau_i());
        prop_assume!(r.is_ok());
        prop_assert!(r.unwrap() <= 1e-9);
    }
}
