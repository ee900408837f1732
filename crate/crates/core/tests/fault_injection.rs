use qpmut::quiver::ExchangeMatrix;
use qpmut::verify::Verifier;
use qpmut::Result;

/// Fomin-Zelevinsky rule with the sign condition shifted by one.
fn off_by_one(m: &ExchangeMatrix, k: usize) -> Result<ExchangeMatrix> {
    let n = m.n();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (bij, bik, bkj) = (m.get(i, j), m.get(i, k), m.get(k, j));
                    if i == k || j == k {
                        -bij
                    } else if bik * bkj > 1 {
                        bij + bik.signum() * bik * bkj
                    } else {
                        bij
                    }
                })
                .collect()
        })
        .collect();
    ExchangeMatrix::from_rows(rows)
}

#[test]
fn honest_rule_passes_the_consistency_check() {
    let mut v = Verifier::new(Some(2));
    v.cases = 200;
    let r = v.run(10);
    assert!(r.details[0].starts_with("exchange-matrix consistency"), "{:?}", r.details);
    assert!(!r.details[0].starts_with("MISMATCH"));
}

#[test]
fn off_by_one_rule_is_caught() {
    let mut v = Verifier::new(Some(2));
    v.cases = 200;
    v.mutator = off_by_one;
    let r = v.run(10);
    assert!(!r.passed);
    assert!(
        r.details[0].starts_with("MISMATCH: exchange-matrix consistency"),
        "{:?}",
        r.details
    );
}
