#[test]
fn eig_runs() {
    assert!((qdimer::probe() - 2.0).abs() < 1e-12);
}
