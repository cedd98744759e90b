use std::str::FromStr;

use crate::boolpoly::{Literal, PolynomialBuilder, VarId};
use crate::encoding::{indicator, BitVector, CodeKind, IndexCode};
use crate::error::{Error, Result};

use super::{add_scaled_square_deficit, Formulation, Problem, Strategy, VarLayout};

/// Penalty weights for the coloring objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcpPenalties {
    /// One color per vertex (one-hot QUBO).
    pub qubo: i64,
    /// Unused codewords (binary encodings).
    pub unused: i64,
    /// Odd-weight vectors (even-weight code).
    pub or_parity: i64,
    /// Unused even-weight codewords.
    pub or_unused: i64,
}

impl GcpPenalties {
    /// Unit weights, except the odd-parity weight which must exceed half the
    /// maximum degree for the even-weight objective to stay positive off the
    /// feasible set.
    pub fn defaults(max_degree: usize) -> Self {
        Self {
            qubo: 1,
            unused: 1,
            or_parity: (max_degree / 2 + 1) as i64,
            or_unused: 1,
        }
    }

    pub fn unit() -> Self {
        Self {
            qubo: 1,
            unused: 1,
            or_parity: 1,
            or_unused: 1,
        }
    }

    /// Weights above the maximum degree: recoloring any infeasible vertex then
    /// strictly lowers the objective, so every minimizer is a valid coloring.
    pub fn dominating(max_degree: usize) -> Self {
        let w = max_degree as i64 + 1;
        Self {
            qubo: w,
            unused: w,
            or_parity: w,
            or_unused: w,
        }
    }
}

/// Vertex coloring: `num_colors` colors, adjacent vertices must differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcpInstance {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    num_colors: usize,
    pub penalties: GcpPenalties,
}

impl GcpInstance {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>, num_colors: usize) -> Result<Self> {
        if num_colors < 1 {
            return Err(Error::InvalidInstance("need at least one color".into()));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) outside 0..{num_vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop at {u}")));
            }
            let e = (u.min(v), u.max(v));
            if normalized.contains(&e) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({u}, {v})")));
            }
            normalized.push(e);
        }
        let mut inst = Self {
            num_vertices,
            edges: normalized,
            num_colors,
            penalties: GcpPenalties::unit(),
        };
        inst.penalties = GcpPenalties::defaults(inst.max_degree());
        Ok(inst)
    }

    pub fn with_penalties(mut self, penalties: GcpPenalties) -> Self {
        self.penalties = penalties;
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Monochromatic edges of a coloring given as 1-based colors.
    pub fn conflicts(&self, coloring: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| coloring[u] == coloring[v])
            .count()
    }

    /// Fewest monochromatic edges over all `I^V` colorings.
    pub fn optimum(&self) -> usize {
        let mut coloring = vec![1usize; self.num_vertices];
        let mut best = self.conflicts(&coloring);
        loop {
            let mut k = 0;
            while k < self.num_vertices && coloring[k] == self.num_colors {
                coloring[k] = 1;
                k += 1;
            }
            if k == self.num_vertices {
                return best;
            }
            coloring[k] += 1;
            best = best.min(self.conflicts(&coloring));
        }
    }

    /// Circulant graph over offsets, edges listed offset by offset and
    /// truncated to `max_edges`.
    pub fn circulant(
        num_vertices: usize,
        offsets: &[usize],
        max_edges: Option<usize>,
        num_colors: usize,
    ) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        'outer: for &d in offsets {
            for u in 0..num_vertices {
                let v = (u + d) % num_vertices;
                let e = (u.min(v), u.max(v));
                if u != v && !edges.contains(&e) {
                    if max_edges.is_some_and(|m| edges.len() >= m) {
                        break 'outer;
                    }
                    edges.push(e);
                }
            }
        }
        Self::new(num_vertices, edges, num_colors)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.num_vertices, self.num_colors);
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl FromStr for GcpInstance {
    type Err = Error;

    /// `V I` header, then one `u v` edge per line (0-based vertices).
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let pair = |line: usize, l: &str| -> Result<(usize, usize)> {
            let nums: Vec<usize> = l
                .split_whitespace()
                .map(|w| w.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    line,
                    msg: format!("expected two integers, got `{l}`"),
                })?;
            match nums[..] {
                [a, b] => Ok((a, b)),
                _ => Err(Error::Parse {
                    line,
                    msg: format!("expected two integers, got `{l}`"),
                }),
            }
        };
        let (line, header) = rows.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty graph file".into(),
        })?;
        let (v, i) = pair(line, header)?;
        let edges = rows.map(|(line, l)| pair(line, l)).collect::<Result<_>>()?;
        GcpInstance::new(v, edges, i)
    }
}

fn product(a: &[Literal], b: &[Literal]) -> Vec<Literal> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

fn literals(code: &IndexCode, i: usize, vars: &[VarId]) -> Result<Vec<Literal>> {
    Ok(code.delta(i, vars)?.literals().to_vec())
}

/// One-hot QUBO: `Σ_E Σ_i x_ui x_vi + λ Σ_v (1 - Σ_i x_vi)²`, expanded.
pub fn gcp_qubo(inst: &GcpInstance) -> Result<Formulation> {
    let colors = inst.num_colors;
    let layout = VarLayout {
        entities: inst.num_vertices,
        bits: colors,
    };
    let mut b = PolynomialBuilder::new(layout.num_vars());
    for i in 0..colors {
        b.group();
        for &(u, v) in &inst.edges {
            b.add_product(
                1,
                vec![
                    Literal::positive(layout.var(u, i).0),
                    Literal::positive(layout.var(v, i).0),
                ],
            );
        }
    }
    for v in 0..inst.num_vertices {
        b.group();
        let singles: Vec<Vec<Literal>> = (0..colors)
            .map(|i| vec![Literal::positive(layout.var(v, i).0)])
            .collect();
        add_scaled_square_deficit(&mut b, inst.penalties.qubo, &singles)?;
    }
    Ok(Formulation {
        problem: Problem::Gcp(inst.clone()),
        strategy: Strategy::Qubo,
        scheduled: b.build()?,
        code: IndexCode::new(CodeKind::OneHot, colors)?,
        layout,
        factored_circuit: false,
    })
}

/// Binary-encoded objective
/// `Σ_E Σ_{i≤I} δ_ui δ_vi + λ' Σ_v Σ_{i>I} δ_vi` with the code of `strategy`
/// (ascending, descending or Gray). Terms are emitted color by color.
pub fn gcp_hubo(inst: &GcpInstance, strategy: Strategy) -> Result<Formulation> {
    if !matches!(strategy, Strategy::Asc | Strategy::Dsc | Strategy::Pf) {
        return Err(Error::InvalidConfig(format!(
            "gcp_hubo takes asc, dsc or pf, not {strategy}"
        )));
    }
    if inst.num_colors < 2 {
        return Err(Error::InvalidInstance(
            "binary encodings need at least two colors".into(),
        ));
    }
    let code = IndexCode::new(strategy.code_kind(), inst.num_colors)?;
    let layout = VarLayout {
        entities: inst.num_vertices,
        bits: code.width(),
    };
    let vars: Vec<Vec<VarId>> = (0..inst.num_vertices).map(|v| layout.vars(v)).collect();
    let mut b = PolynomialBuilder::new(layout.num_vars());
    for i in 1..=code.num_slots() {
        b.group();
        if i <= inst.num_colors {
            for &(u, v) in &inst.edges {
                let lits = product(&literals(&code, i, &vars[u])?, &literals(&code, i, &vars[v])?);
                b.add_product(1, lits);
            }
        } else {
            for vv in &vars {
                b.add_product(inst.penalties.unused, literals(&code, i, vv)?);
            }
        }
    }
    Ok(Formulation {
        problem: Problem::Gcp(inst.clone()),
        strategy,
        scheduled: b.build()?,
        code,
        layout,
        factored_circuit: strategy == Strategy::Pf,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OrOptions {
    /// Keep the constraint indicators factored and map them to gates directly.
    pub factored_constraints: bool,
}

pub fn gcp_hubo_or(inst: &GcpInstance) -> Result<Formulation> {
    gcp_hubo_or_with(inst, OrOptions::default())
}

/// Even-weight objective:
/// `Σ_E Π_r (1 - x_ur - x_vr) + λ''₁ Σ_v Σ_{odd b} δ_v(b) + λ''₂ Σ_v Σ_{i>I} δ_vi`.
///
/// On two even-weight codewords the edge product is 1 when they are equal and
/// 0 otherwise; odd-weight vectors are excluded by the parity penalty.
pub fn gcp_hubo_or_with(inst: &GcpInstance, opts: OrOptions) -> Result<Formulation> {
    if inst.num_colors < 2 {
        return Err(Error::InvalidInstance(
            "binary encodings need at least two colors".into(),
        ));
    }
    let code = IndexCode::new(CodeKind::EvenOr, inst.num_colors)?;
    let width = code.width();
    let layout = VarLayout {
        entities: inst.num_vertices,
        bits: width,
    };
    let vars: Vec<Vec<VarId>> = (0..inst.num_vertices).map(|v| layout.vars(v)).collect();
    let mut b = PolynomialBuilder::new(layout.num_vars());

    for &(u, v) in &inst.edges {
        b.group();
        // each factor picks 1, -x_ur or -x_vr
        let choices = 3usize.pow(width as u32);
        for mut c in 0..choices {
            let mut lits = Vec::new();
            for (xu, xv) in vars[u].iter().zip(&vars[v]) {
                match c % 3 {
                    1 => lits.push(Literal::positive(xu.0)),
                    2 => lits.push(Literal::positive(xv.0)),
                    _ => {}
                }
                c /= 3;
            }
            let sign = if lits.len() % 2 == 0 { 1 } else { -1 };
            if lits.is_empty() {
                b.add_constant(sign);
            } else {
                b.add_product(sign, lits);
            }
        }
    }
    for word in (0..1u64 << width).filter(|w| w.count_ones() % 2 == 1) {
        b.group();
        let bits = BitVector::from_value(word, width);
        for vv in &vars {
            b.add_product(
                inst.penalties.or_parity,
                indicator(&bits, vv)?.literals().to_vec(),
            );
        }
    }
    for i in code.unused_codewords() {
        b.group();
        for vv in &vars {
            b.add_product(inst.penalties.or_unused, literals(&code, i, vv)?);
        }
    }
    let built = b.build()?;
    let scheduled = if opts.factored_constraints {
        built
    } else {
        built.expand()?
    };
    Ok(Formulation {
        problem: Problem::Gcp(inst.clone()),
        strategy: Strategy::Or,
        scheduled,
        code,
        layout,
        factored_circuit: opts.factored_constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::brute_force_min;

    fn triangle(colors: usize) -> GcpInstance {
        GcpInstance::new(3, vec![(0, 1), (1, 2), (0, 2)], colors).unwrap()
    }

    fn house() -> GcpInstance {
        GcpInstance::circulant(5, &[1, 2, 3], Some(6), 4).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(GcpInstance::new(2, vec![(0, 0)], 2).is_err());
        assert!(GcpInstance::new(2, vec![(0, 1), (1, 0)], 2).is_err());
        assert!(GcpInstance::new(2, vec![(0, 2)], 2).is_err());
        assert!(GcpInstance::new(2, vec![], 0).is_err());
    }

    #[test]
    fn house_graph_is_truncated_circulant() {
        let g = house();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)]);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.penalties.or_parity, 2);
    }

    #[test]
    fn variable_counts() {
        let g = house();
        assert_eq!(gcp_qubo(&g).unwrap().num_vars(), 20);
        assert_eq!(gcp_hubo(&g, Strategy::Pf).unwrap().num_vars(), 10);
        assert_eq!(gcp_hubo_or(&g).unwrap().num_vars(), 15);
    }

    #[test]
    fn triangle_qubo_minimum_and_count() {
        let f = gcp_qubo(&triangle(3)).unwrap();
        let (_, min) = brute_force_min(f.polynomial()).unwrap();
        assert_eq!(min, 0);
        let compiled = f.polynomial().compile().unwrap();
        let zeros = (0..1u64 << 9).filter(|&x| compiled.eval(x) == 0).count();
        assert_eq!(zeros, 6);
    }

    #[test]
    fn single_edge_one_color() {
        let g = GcpInstance::new(2, vec![(0, 1)], 1).unwrap();
        let f = gcp_qubo(&g).unwrap();
        assert_eq!(brute_force_min(f.polynomial()).unwrap().1, 1);
    }

    #[test]
    fn hubo_max_is_edge_count_on_power_of_two() {
        let g = house();
        for s in [Strategy::Asc, Strategy::Dsc, Strategy::Pf] {
            let f = gcp_hubo(&g, s).unwrap();
            assert_eq!(f.polynomial().bounds().unwrap(), (0, 6), "{s}");
        }
    }

    #[test]
    fn or_degree_is_width() {
        let g = house();
        let or = gcp_hubo_or(&g).unwrap();
        assert_eq!(or.polynomial().degree(), 3);
        let asc = gcp_hubo(&g, Strategy::Asc).unwrap();
        assert_eq!(asc.polynomial().expand().unwrap().degree(), 4);
    }

    #[test]
    fn or_interference_on_equal_zero_codewords() {
        let g = GcpInstance::new(2, vec![(0, 1)], 4).unwrap();
        let f = gcp_hubo_or(&g).unwrap();
        assert_eq!(f.evaluate(&[false; 6]).unwrap(), 1);
    }

    #[test]
    fn triangle_penalizes_unused_slot() {
        let g = triangle(3);
        let f = gcp_hubo(&g, Strategy::Dsc).unwrap();
        // vertex 0 on the unused codeword 00, others properly colored
        let mut bits = f.encode(&[1, 2, 3]).unwrap();
        bits[0] = false;
        bits[1] = false;
        assert_eq!(f.evaluate(&bits).unwrap(), 1);
        let decoded = f.decode(&bits).unwrap();
        assert_eq!(decoded.entities[0], Err(super::super::InvalidEntity::UnusedCodeword));
    }

    #[test]
    fn parse_graph_file() {
        let g: GcpInstance = "# triangle\n3 2\n0 1\n1 2\n0 2\n".parse().unwrap();
        assert_eq!(g, triangle(2));
        assert_eq!(g.to_text().parse::<GcpInstance>().unwrap(), g);
        assert!("3\n".parse::<GcpInstance>().is_err());
    }

    #[test]
    fn optimum_by_enumeration() {
        assert_eq!(triangle(3).optimum(), 0);
        assert_eq!(triangle(2).optimum(), 1);
        assert_eq!(house().optimum(), 0);
    }
}
