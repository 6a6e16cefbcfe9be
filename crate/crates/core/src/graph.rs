//! The invertible-difference graph `Γ_m` on `C(m)`: `A ~ B` iff `A - B` is
//! invertible.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classes::{enumerate_class, ClassInventory};
use crate::error::{bad_input, violation, Error, Result};
use crate::field::UPoly;
use crate::linalg::FMat;
use crate::vandermonde::idp_check;

/// Default upper bound on `q` for [`build_gamma`].
pub const DEFAULT_MAX_Q: u32 = 5;

pub struct GammaGraph {
    inventory: Arc<ClassInventory>,
    adjacency: Vec<Vec<usize>>,
}

impl fmt::Debug for GammaGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GammaGraph({} vertices, {} edges)", self.vertex_count(), self.edge_count())
    }
}

pub fn build_gamma(m: &UPoly) -> Result<GammaGraph> {
    build_gamma_with_limit(m, DEFAULT_MAX_Q)
}

pub fn build_gamma_with_limit(m: &UPoly, max_q: u32) -> Result<GammaGraph> {
    if m.spec().order() > max_q {
        return Err(Error::SizeGuard(format!("q = {} exceeds the graph limit {max_q}", m.spec().order())));
    }
    Ok(GammaGraph::from_inventory(Arc::new(enumerate_class(m)?)))
}

impl GammaGraph {
    pub fn from_inventory(inventory: Arc<ClassInventory>) -> Self {
        let ms = inventory.members();
        let adjacency = (0..ms.len())
            .into_par_iter()
            .map(|i| (0..ms.len()).filter(|&j| j != i && (&ms[j] - &ms[i]).det() != 0).collect())
            .collect();
        GammaGraph { inventory, adjacency }
    }

    pub fn inventory(&self) -> &Arc<ClassInventory> {
        &self.inventory
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn vertex(&self, i: usize) -> &FMat {
        &self.inventory.members()[i]
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(k, &i)| vs[k + 1..].iter().all(|&j| self.adjacent(i, j)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub regular_degree: Option<usize>,
    pub expected_degree: u64,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub components: usize,
    pub component_sizes: Vec<usize>,
    /// Vertex indices of `S_base`.
    pub clique: Vec<usize>,
    pub clique_verified: bool,
    pub clique_bound: u64,
    pub clique_within_bound: bool,
    /// The clique read as an independent set of the complement.
    pub complement_independent_set: Vec<usize>,
    /// `|V| - 1 - degree` when the graph is regular.
    pub complement_degree: Option<usize>,
    /// `q^5 - 2q^2 - q - 1`, recorded for comparison.
    pub complement_degree_closed_form: u64,
}

impl GraphSummary {
    pub fn regular_with_expected_degree(&self) -> bool {
        self.regular_degree == Some(self.expected_degree as usize)
    }
}

pub fn expected_degree(q: u64) -> u64 {
    let r = q.pow(3) - q * q - q;
    r * (r - 1)
}

pub fn summarize(g: &GammaGraph, base: &FMat) -> Result<GraphSummary> {
    let inv = g.inventory();
    let q = inv.q();
    let sets = inv.derived_sets(base)?;
    let mut clique: Vec<usize> = sets
        .s
        .iter()
        .map(|x| inv.position(x).ok_or_else(|| violation("S_A member outside C(m)")))
        .collect::<Result<_>>()?;
    clique.sort_unstable();
    let clique_verified = g.is_clique(&clique) && idp_check(&sets.s);
    let mut degree_histogram = BTreeMap::new();
    for i in 0..g.vertex_count() {
        *degree_histogram.entry(g.degree(i)).or_insert(0) += 1;
    }
    let regular_degree = if degree_histogram.len() == 1 { degree_histogram.keys().next().copied() } else { None };
    let mut component_sizes: Vec<usize> = g.components().iter().map(Vec::len).collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let clique_bound = q.pow(3) - 1;
    Ok(GraphSummary {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        regular_degree,
        expected_degree: expected_degree(q),
        degree_histogram,
        components: component_sizes.len(),
        component_sizes,
        clique_within_bound: clique.len() as u64 <= clique_bound,
        complement_independent_set: clique.clone(),
        clique,
        clique_verified,
        clique_bound,
        complement_degree: regular_degree.map(|d| g.vertex_count() - 1 - d),
        complement_degree_closed_form: q.pow(5) - 2 * q * q - q - 1,
    })
}

/// Rows `e1, e1 A, e1 A^2`: `K_A A K_A^{-1}` depends only on the minimal
/// polynomial of `A`.
fn cyclic_basis(a: &FMat) -> FMat {
    let spec = a.spec();
    let e1 = [1, 0, 0];
    let r1 = a.left_apply(&e1);
    let r2 = a.left_apply(&r1);
    let data = e1.iter().chain(&r1).chain(&r2).copied().collect();
    FMat::new(spec, 3, 3, data).expect("3x3")
}

/// `U` with `U A U^{-1} = B` for `A, B` in one class.
pub fn conjugator(a: &FMat, b: &FMat) -> Result<FMat> {
    let ka = cyclic_basis(a);
    let kb_inv = cyclic_basis(b).inverse().ok_or_else(|| bad_input("e1 is not cyclic for B"))?;
    let u = &kb_inv * &ka;
    let ui = u.inverse().ok_or_else(|| bad_input("e1 is not cyclic for A"))?;
    if &(&u * a) * &ui != *b {
        return Err(bad_input("matrices are not conjugate"));
    }
    Ok(u)
}

/// For sampled vertex pairs `(A, B)` finds `U` with `U A U^{-1} = B` and checks
/// that conjugation by `U` maps `C(m)` into itself and preserves sampled
/// adjacencies.
pub fn vertex_transitivity_probe(g: &GammaGraph, samples: usize, seed: u64) -> Result<bool> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(true);
    }
    let inv = g.inventory();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (a, b) = (g.vertex(i), g.vertex(j));
        let u = conjugator(a, b)?;
        let ui = u.inverse().expect("conjugator is invertible");
        let image = |k: usize| inv.position(&(&(&u * g.vertex(k)) * &ui));
        if image(i) != Some(j) {
            return Ok(false);
        }
        for _ in 0..16 {
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (Some(fx), Some(fy)) = (image(x), image(y)) else {
                return Ok(false);
            };
            if x != y && g.adjacent(x, y) != g.adjacent(fx, fy) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    EdgeCsv,
    Dot,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-csv" => Ok(ExportFormat::EdgeCsv),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(bad_input(format!("unknown export format {other:?}"))),
        }
    }
}

fn edges(g: &GammaGraph) -> impl Iterator<Item = (usize, usize)> + '_ {
    g.adjacency.iter().enumerate().flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
}

/// Edges `i,j` with `i < j` in lexicographic order, by canonical vertex index.
pub fn export_graph(g: &GammaGraph, format: ExportFormat) -> Vec<u8> {
    let mut out = String::new();
    match format {
        ExportFormat::EdgeCsv => {
            for (i, j) in edges(g) {
                out.push_str(&format!("{i},{j}\n"));
            }
        }
        ExportFormat::Dot => {
            out.push_str("graph gamma {\n");
            for (i, j) in edges(g) {
                out.push_str(&format!("  {i} -- {j};\n"));
            }
            out.push_str("}\n");
        }
    }
    out.into_bytes()
}

/// Adjacency lists of `n` vertices from edge-csv bytes.
pub fn parse_edge_csv(bytes: &[u8], n: usize) -> Result<Vec<Vec<usize>>> {
    let text = std::str::from_utf8(bytes).map_err(|_| bad_input("edge list is not UTF-8"))?;
    let mut adj = vec![Vec::new(); n];
    for (lineno, line) in text.lines().enumerate() {
        let parse = |s: Option<&str>| -> Result<usize> {
            s.and_then(|t| t.trim().parse().ok())
                .filter(|&v: &usize| v < n)
                .ok_or_else(|| bad_input(format!("bad edge on line {}", lineno + 1)))
        };
        let mut parts = line.split(',');
        let (i, j) = (parse(parts.next())?, parse(parts.next())?);
        if parts.next().is_some() || i == j {
            return Err(bad_input(format!("bad edge on line {}", lineno + 1)));
        }
        adj[i].push(j);
        adj[j].push(i);
    }
    for ns in &mut adj {
        ns.sort_unstable();
        ns.dedup();
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{irreducible_cubics, FieldSpec};

    fn gamma(q: u32) -> GammaGraph {
        let f = FieldSpec::gf(q).unwrap();
        build_gamma(&irreducible_cubics(&f)[0]).unwrap()
    }

    #[test]
    fn q2_structure() {
        let g = gamma(2);
        assert_eq!(g.vertex_count(), 24);
        assert_eq!(g.edge_count(), 24);
        let comps = g.components();
        assert_eq!(comps.len(), 8);
        for c in &comps {
            assert_eq!(c.len(), 3);
            assert!(g.is_clique(c));
            // {A, A^2, A^4}
            let a = g.vertex(c[0]);
            let a2 = a * a;
            let mut expect = vec![a.clone(), a2.clone(), &a2 * &a2];
            expect.sort();
            let got: Vec<FMat> = c.iter().map(|&i| g.vertex(i).clone()).collect();
            assert_eq!(got, expect);
        }
        let s = summarize(&g, &g.inventory().companion()).unwrap();
        assert_eq!(s.regular_degree, Some(2));
        assert_eq!(s.clique.len(), 2);
        assert!(s.clique_verified && s.clique_within_bound);
        assert_eq!(s.complement_degree, Some(21));
        assert_eq!(s.complement_degree_closed_form, 21);
    }

    #[test]
    fn adjacency_symmetric_and_matches_d_sets() {
        let g = gamma(2);
        let inv = g.inventory();
        for i in 0..g.vertex_count() {
            for j in 0..g.vertex_count() {
                assert_eq!(g.adjacent(i, j), g.adjacent(j, i));
            }
            assert_eq!(g.degree(i), inv.d_set(g.vertex(i)).unwrap().len());
        }
    }

    #[test]
    fn exports_round_trip() {
        let g = gamma(2);
        let csv = export_graph(&g, ExportFormat::EdgeCsv);
        assert_eq!(csv.iter().filter(|&&b| b == b'\n').count(), 24);
        assert_eq!(parse_edge_csv(&csv, 24).unwrap(), g.adjacency());
        let dot = String::from_utf8(export_graph(&g, ExportFormat::Dot)).unwrap();
        assert!(dot.starts_with("graph gamma {\n  0 -- "));
        assert!(dot.ends_with(";\n}\n"));
        assert!("svg".parse::<ExportFormat>().is_err());
        assert!(parse_edge_csv(b"0,99\n", 24).is_err());
    }

    #[test]
    fn transitivity_and_guard() {
        let g = gamma(2);
        assert!(vertex_transitivity_probe(&g, 50, 1).unwrap());
        let f = FieldSpec::gf(7).unwrap();
        assert!(matches!(build_gamma(&irreducible_cubics(&f)[0]), Err(Error::SizeGuard(_))));
    }
}
