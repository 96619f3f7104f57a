use epsilon_witness::moment::*;
use epsilon_witness::witness::builtin_spec;

fn main() {
    for name in ["pauli2", "pauli3"] {
        let t0 = std::time::Instant::now();
        let spec = builtin_spec(name, 2, 1, 0.0).unwrap();
        let ops = OperatorList::from_spec(&spec);
        let ml = build_monomials(&ops, 2, WordPolicy::Reduced, SamplePolicy::Projective).unwrap();
        let basis = build_basis(&ops, &ml, 7, 8000).unwrap();
        println!("{name}: n = {}, m = {}, complete = {}, t = {:?}", ml.len(), basis.m, basis.complete, t0.elapsed());
        for eps in [0.0f64, 0.01, 0.03, 0.05, 0.07, 0.10] {
            let spec = builtin_spec(name, 2, 1, eps).unwrap();
            let ops = OperatorList { spec, extra_targets: vec![] };
            let t1 = std::time::Instant::now();
            match upper_bound(&ops, &ml, &basis, MomentMode::Separable,
                &[IdealWitnessConstraint { target_group: 0, bound: 1.0 }]) {
                Ok(out) => println!("  eps {eps:.2}: bound {:.6} rank {} t {:.1?}",
                    out.upper_bound, out.reduced_rank, t1.elapsed()),
                Err(e) => println!("  eps {eps:.2}: ERROR {e}"),
            }
        }
    }
}
