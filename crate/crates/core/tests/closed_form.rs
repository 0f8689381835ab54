//! The successive recursion for `S` against propagation of the `S` flow, on
//! a Jordan generator with non-real eigenvalue so that `a − ā ≠ 0`.

use darboux_core::branchsqrt::JordanSpec;
use darboux_core::gbdt::{
    explicit_a, explicit_pi, j_matrix, propagate, s_recursion_jordan2, AField, Background, GbdtTriple, JSelector,
    Profile, RootBranches,
};
use darboux_core::ode::PathSpec;
use darboux_core::{CMatrix, C64};

#[test]
fn recursion_matches_propagated_s() {
    let bg = Background::exp_diag(Profile::affine(1.0, -1.0), Profile::affine(0.0, 1.0), 1).unwrap();
    let spec = JordanSpec::single_block(C64::new(2.0, 1.0), 2).unwrap();
    let br = RootBranches::principal(1);
    let j = j_matrix(JSelector::OffDiag, 2).unwrap();
    let pi0 = CMatrix::from_real_rows(&[&[1.0, 0.2], &[0.3, 1.0]]).unwrap();

    let s_at = |x: f64, y: f64| {
        let a = explicit_a(x, y, &spec, &bg, &br).unwrap();
        let pi = explicit_pi(x, y, &spec, &bg, &br, &pi0).unwrap();
        s_recursion_jordan2((x, y), &a, &pi, &j).unwrap()
    };
    let a0 = explicit_a(0.0, 0.0, &spec, &bg, &br).unwrap();
    let triple = GbdtTriple::new(a0, s_at(0.0, 0.0), pi0.clone(), j.clone()).unwrap();
    let field = AField::Explicit {
        generator: spec.clone(),
        branches: br.clone(),
    };
    for &(x, y) in &[(0.3, 0.3), (-0.3, 0.1), (0.2, -0.3), (-0.25, -0.25), (0.05, 0.2)] {
        let s = propagate(&triple, &bg, &field, &PathSpec::l_path((x, y), 0.01).unwrap())
            .unwrap()
            .state
            .s;
        let err = s.rel_diff(&s_at(x, y));
        assert!(err <= 1e-7, "({x}, {y}): {err:e}");
    }
}
