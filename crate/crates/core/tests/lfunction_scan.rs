use iwasawa_core::lfunction::{branch_series, minus_invariants, scan_lambda, BranchConfig};

#[test]
fn p157_has_two_branches_of_lambda_one() {
    let inv = minus_invariants(157, &BranchConfig::default()).unwrap();
    let ks: Vec<u64> = inv.branches.iter().map(|b| b.k).collect();
    assert_eq!(ks, vec![62, 110]);
    assert!(inv.branches.iter().all(|b| b.lambda == 1 && b.mu == 0 && b.certified));
    assert_eq!(inv.lambda_minus, 2);
    assert!(!inv.mu_anomaly);
}

#[test]
fn scan_to_500_flags_expected_primes() {
    let scan = scan_lambda(500, &BranchConfig::default()).unwrap();
    assert!(scan.iter().all(|e| e.certified && e.error.is_none()), "{scan:?}");
    let big: Vec<u64> = scan.iter().filter(|e| e.lambda_minus.unwrap() >= 2).map(|e| e.p).collect();
    assert_eq!(big, vec![157, 353, 379, 467, 491]);
    for e in &scan {
        assert_eq!(e.lambda_minus.unwrap(), e.irregular_indices.len(), "p = {}", e.p);
        assert_eq!(e.mu_minus, Some(0));
    }
}

#[test]
fn reading_stable_under_level_and_precision() {
    for (p, k) in [(37u64, 32u64), (59, 44), (67, 58), (101, 68)] {
        let base = branch_series(p, k, 2, 2, 16).unwrap();
        for (n, m) in [(3, 2), (2, 3)] {
            let b = branch_series(p, k, n, m, 16).unwrap();
            assert_eq!((b.lambda, b.mu), (base.lambda, base.mu), "p = {p}, k = {k}, n = {n}, m = {m}");
            for i in 0..=16.min(p as usize - 1) {
                assert_eq!(b.series.coeff(i) % p, base.series.coeff(i) % p);
            }
        }
    }
}
