use std::str::FromStr;

use crate::boolpoly::{Literal, PolynomialBuilder, VarId};
use crate::encoding::{CodeKind, IndexCode};
use crate::error::{Error, Result};

use super::{add_scaled_square_deficit, Formulation, Problem, Strategy, VarLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TspPenalties {
    /// Each city visited once (one-hot QUBO).
    pub city_once: i64,
    /// One city per visit slot (one-hot QUBO).
    pub slot_once: i64,
    /// One city per visit slot (binary encodings).
    pub hubo_slot_once: i64,
    /// Unused codewords (binary encodings).
    pub hubo_unused: i64,
}

impl TspPenalties {
    pub fn unit() -> Self {
        Self {
            city_once: 1,
            slot_once: 1,
            hubo_slot_once: 1,
            hubo_unused: 1,
        }
    }

    /// Every penalty above the largest possible tour, so no infeasible
    /// assignment can undercut a tour.
    pub fn dominating(inst: &TspInstance) -> Self {
        let w = 2 * inst.total_weight() + 1;
        Self {
            city_once: w,
            slot_once: w,
            hubo_slot_once: w,
            hubo_unused: w,
        }
    }
}

/// Symmetric traveling-salesman instance with integer distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspInstance {
    num_cities: usize,
    weights: Vec<Vec<i64>>,
    pub penalties: TspPenalties,
}

impl TspInstance {
    pub fn new(weights: Vec<Vec<i64>>) -> Result<Self> {
        let n = weights.len();
        if n < 2 {
            return Err(Error::InvalidInstance("need at least two cities".into()));
        }
        for (u, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {u} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[u] != 0 {
                return Err(Error::InvalidInstance(format!("W[{u}][{u}] is not zero")));
            }
            for (v, &w) in row.iter().enumerate() {
                if w < 0 {
                    return Err(Error::InvalidInstance(format!("W[{u}][{v}] is negative")));
                }
                if w != weights[v][u] {
                    return Err(Error::InvalidInstance(format!("W is not symmetric at ({u}, {v})")));
                }
            }
        }
        Ok(Self {
            num_cities: n,
            weights,
            penalties: TspPenalties::unit(),
        })
    }

    pub fn with_penalties(mut self, penalties: TspPenalties) -> Self {
        self.penalties = penalties;
        self
    }

    pub fn num_cities(&self) -> usize {
        self.num_cities
    }

    pub fn weight(&self, u: usize, v: usize) -> i64 {
        self.weights[u][v]
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    /// Sum of `W_uv` over unordered pairs.
    pub fn total_weight(&self) -> i64 {
        (0..self.num_cities)
            .flat_map(|u| (u + 1..self.num_cities).map(move |v| (u, v)))
            .map(|(u, v)| self.weights[u][v])
            .sum()
    }

    /// Length of the closed tour visiting `order[0], order[1], …` and back.
    pub fn tour_length(&self, order: &[usize]) -> i64 {
        let n = order.len();
        (0..n)
            .map(|p| self.weights[order[p]][order[(p + 1) % n]])
            .sum()
    }

    /// Shortest closed tour over all permutations.
    pub fn optimum(&self) -> i64 {
        let mut order: Vec<usize> = (0..self.num_cities).collect();
        let mut best = self.tour_length(&order);
        // Heap's algorithm
        let n = order.len();
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    order.swap(0, i);
                } else {
                    order.swap(c[i], i);
                }
                best = best.min(self.tour_length(&order));
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        best
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.num_cities);
        for u in 0..self.num_cities - 1 {
            let row: Vec<String> = self.weights[u][u + 1..].iter().map(|w| w.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

impl FromStr for TspInstance {
    type Err = Error;

    /// `N` header, then row `u` lists `W[u][u+1..N]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = rows.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty distance file".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected city count, got `{header}`"),
        })?;
        let mut w = vec![vec![0i64; n]; n];
        let mut u = 0;
        for (line, l) in rows {
            if u + 1 >= n {
                return Err(Error::Parse {
                    line,
                    msg: "too many rows".into(),
                });
            }
            let vals: Vec<i64> = l
                .split_whitespace()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    line,
                    msg: format!("expected integers, got `{l}`"),
                })?;
            if vals.len() != n - 1 - u {
                return Err(Error::Parse {
                    line,
                    msg: format!("row {u} needs {} entries, got {}", n - 1 - u, vals.len()),
                });
            }
            for (k, val) in vals.into_iter().enumerate() {
                let v = u + 1 + k;
                w[u][v] = val;
                w[v][u] = val;
            }
            u += 1;
        }
        if n >= 2 && u != n - 1 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("expected {} rows, got {u}", n - 1),
            });
        }
        TspInstance::new(w)
    }
}

/// One-hot QUBO over `x_vi` (city `v` at visit `i`):
/// `Σ_{u≠v} W_uv Σ_i x_ui x_v,i+1 + λ₁ Σ_v (1 - Σ_i x_vi)² + λ₂ Σ_i (1 - Σ_v x_vi)²`,
/// with visit `N+1` wrapping to visit 1 so the cost is the closed-tour length.
pub fn tsp_qubo(inst: &TspInstance) -> Result<Formulation> {
    let n = inst.num_cities;
    let layout = VarLayout {
        entities: n,
        bits: n,
    };
    let x = |v: usize, i: usize| Literal::positive(layout.var(v, i).0);
    let mut b = PolynomialBuilder::new(layout.num_vars());
    for i in 0..n {
        b.group();
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    b.add_product(inst.weights[u][v], vec![x(u, i), x(v, (i + 1) % n)]);
                }
            }
        }
    }
    for v in 0..n {
        b.group();
        let f: Vec<Vec<Literal>> = (0..n).map(|i| vec![x(v, i)]).collect();
        add_scaled_square_deficit(&mut b, inst.penalties.city_once, &f)?;
    }
    for i in 0..n {
        b.group();
        let f: Vec<Vec<Literal>> = (0..n).map(|v| vec![x(v, i)]).collect();
        add_scaled_square_deficit(&mut b, inst.penalties.slot_once, &f)?;
    }
    Ok(Formulation {
        problem: Problem::Tsp(inst.clone()),
        strategy: Strategy::Qubo,
        scheduled: b.build()?,
        code: IndexCode::new(CodeKind::OneHot, n)?,
        layout,
        factored_circuit: false,
    })
}

/// Binary-encoded visit index: each city holds `⌈log2 N⌉` bits naming its
/// visit slot. Objective `E1 + λ'₁ E2 + λ'₂ E3` with the travel cost `E1`,
/// one-city-per-slot `E2` and unused-slot `E3`.
pub fn tsp_hubo(inst: &TspInstance, strategy: Strategy) -> Result<Formulation> {
    if !matches!(strategy, Strategy::Asc | Strategy::Dsc | Strategy::Pf) {
        return Err(Error::InvalidConfig(format!(
            "tsp_hubo takes asc, dsc or pf, not {strategy}"
        )));
    }
    let n = inst.num_cities;
    let code = IndexCode::new(strategy.code_kind(), n)?;
    let layout = VarLayout {
        entities: n,
        bits: code.width(),
    };
    let vars: Vec<Vec<VarId>> = (0..n).map(|v| layout.vars(v)).collect();
    let delta = |v: usize, i: usize| -> Result<Vec<Literal>> {
        Ok(code.delta(i, &vars[v])?.literals().to_vec())
    };
    let mut b = PolynomialBuilder::new(layout.num_vars());
    for i in 1..=n {
        b.group();
        let next = i % n + 1;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let mut lits = delta(u, i)?;
                    lits.extend(delta(v, next)?);
                    b.add_product(inst.weights[u][v], lits);
                }
            }
        }
    }
    for i in 1..=n {
        b.group();
        let f = (0..n).map(|v| delta(v, i)).collect::<Result<Vec<_>>>()?;
        add_scaled_square_deficit(&mut b, inst.penalties.hubo_slot_once, &f)?;
    }
    for i in code.unused_codewords() {
        b.group();
        for v in 0..n {
            b.add_product(inst.penalties.hubo_unused, delta(v, i)?);
        }
    }
    Ok(Formulation {
        problem: Problem::Tsp(inst.clone()),
        strategy,
        scheduled: b.build()?,
        code,
        layout,
        factored_circuit: strategy == Strategy::Pf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::brute_force_min;

    fn ones(n: usize) -> TspInstance {
        let w = (0..n)
            .map(|u| (0..n).map(|v| i64::from(u != v)).collect())
            .collect();
        TspInstance::new(w).unwrap()
    }

    fn four() -> TspInstance {
        "4\n3 7 2\n4 9\n5\n".parse().unwrap()
    }

    #[test]
    fn validation() {
        assert!(TspInstance::new(vec![vec![0]]).is_err());
        assert!(TspInstance::new(vec![vec![0, 1], vec![2, 0]]).is_err());
        assert!(TspInstance::new(vec![vec![1, 1], vec![1, 0]]).is_err());
        assert!("3\n1 2\n".parse::<TspInstance>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = four();
        assert_eq!(t.weight(1, 3), 9);
        assert_eq!(t.to_text().parse::<TspInstance>().unwrap(), t);
    }

    #[test]
    fn optimum_of_four_cities() {
        // tours: 0-1-2-3 = 3+4+5+2, 0-1-3-2 = 3+9+5+7, 0-2-1-3 = 7+4+9+2
        assert_eq!(four().optimum(), 14);
    }

    #[test]
    fn qubo_three_cities_unit_weights() {
        let t = ones(3).with_penalties(TspPenalties {
            city_once: 9,
            slot_once: 9,
            ..TspPenalties::unit()
        });
        let f = tsp_qubo(&t).unwrap();
        assert_eq!(f.num_vars(), 9);
        assert_eq!(brute_force_min(f.polynomial()).unwrap().1, 3);
        let c = f.polynomial().compile().unwrap();
        assert_eq!((0..1u64 << 9).filter(|&x| c.eval(x) == 3).count(), 6);
    }

    #[test]
    fn two_cities_have_four_vars() {
        assert_eq!(tsp_qubo(&ones(2)).unwrap().num_vars(), 4);
    }

    #[test]
    fn hubo_sizes() {
        let f = tsp_hubo(&four(), Strategy::Asc).unwrap();
        assert_eq!(f.num_vars(), 8);
        let f3 = tsp_hubo(&ones(3), Strategy::Dsc).unwrap();
        assert_eq!(f3.code().unused_codewords(), [4]);
    }

    #[test]
    fn hubo_optimum_matches_permutations() {
        let t = four();
        let t = t.clone().with_penalties(TspPenalties::dominating(&t));
        for s in [Strategy::Asc, Strategy::Dsc, Strategy::Pf] {
            let f = tsp_hubo(&t, s).unwrap();
            let (x, v) = f.brute_force_min().unwrap();
            assert_eq!(v, 14, "{s}");
            let bits = crate::problems::assignment_bits(x, f.num_vars());
            let tour = f.decode_solution(&bits).unwrap().unwrap();
            assert_eq!(t.tour_length(&tour), 14);
        }
    }

    #[test]
    fn encoded_tour_scores_its_length() {
        let t = four();
        let f = tsp_hubo(&t, Strategy::Pf).unwrap();
        // city 0 first, city 2 second, city 1 third, city 3 fourth
        let bits = f.encode(&[1, 3, 2, 4]).unwrap();
        assert_eq!(f.evaluate(&bits).unwrap(), t.tour_length(&[0, 2, 1, 3]));
    }
}
