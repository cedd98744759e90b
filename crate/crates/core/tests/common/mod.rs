#![allow(dead_code)]

use hubo_gas::boolpoly::{FactoredTerm, Literal, Polynomial};
use proptest::prelude::*;

/// Random factored polynomial over `n` variables with small coefficients.
pub fn polynomial(n: usize, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let term = (
        -4i64..=4,
        proptest::collection::btree_map(0..n as u32, any::<bool>(), 1..=n.min(4)),
    );
    (proptest::collection::vec(term, 0..=max_terms), -3i64..=3).prop_map(move |(terms, c)| {
        let terms = terms.into_iter().map(|(coef, lits)| {
            let lits = lits
                .into_iter()
                .map(|(v, neg)| if neg { Literal::negated(v) } else { Literal::positive(v) })
                .collect();
            FactoredTerm::new(coef, lits).unwrap()
        });
        Polynomial::new(n, terms, c).unwrap()
    })
}

/// Plain evaluator that only uses the public term data.
pub fn naive_eval(p: &Polynomial, x: u64) -> i64 {
    let mut total = p.constant();
    for t in p.terms() {
        let on = t.literals().iter().all(|l| {
            let bit = x >> l.var.0 & 1 == 1;
            bit != l.is_negated()
        });
        if on {
            total += t.coefficient();
        }
    }
    total
}
