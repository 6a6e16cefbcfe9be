use std::time::Instant;

use clap::ValueEnum;
use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Mode, RunArgs};
use crate::classes::{algebra_elements, class_size, gl_order, projective_points, ClassInventory};
use crate::error::{Error, Result};
use crate::graph::{export_graph, parse_edge_csv, summarize, vertex_transitivity_probe, ExportFormat, GammaGraph};
use crate::linalg::FMat;
use crate::matpoly::{core_verdict, low_degree_null_basis, right_evaluate, MatPoly};
use crate::vandermonde::{
    canonical_form, classify_triple_unchecked, commutator_det_check, extension_context, idp_check, inv_diff_equivalence,
    mixed_m, pair_analysis, q_of, sdiff_det, xentries_check, TripleCase,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    Counts,
    Triples,
    InvDiff,
    Idp,
    Extension,
    MainTheorem,
    UaLemma,
    Graph,
    NullPoly,
    All,
}

const SINGLE: [Campaign; 9] = [
    Campaign::Counts,
    Campaign::Triples,
    Campaign::InvDiff,
    Campaign::Idp,
    Campaign::Extension,
    Campaign::MainTheorem,
    Campaign::UaLemma,
    Campaign::Graph,
    Campaign::NullPoly,
];

/// One named claim with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub campaign: Campaign,
    pub name: String,
    pub pass: bool,
    pub checked: u64,
    pub detail: Value,
}

fn claim(campaign: Campaign, name: &str, pass: bool, checked: u64, detail: Value) -> Claim {
    Claim { campaign, name: name.to_string(), pass, checked, detail }
}

/// A failed claim recording an error raised while checking it.
fn errored(campaign: Campaign, name: &str, e: &Error) -> Claim {
    claim(campaign, name, false, 0, json!({ "error": e.to_string() }))
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128).min(u64::MAX as u128) as u64
}

/// Rough count of elementary checks an exhaustive run performs.
pub fn exhaustive_cost(campaign: Campaign, q: u64) -> u64 {
    let n = class_size(q);
    let gl = gl_order(q);
    let r = q.pow(3) - q * q - q;
    let sat = |a: u64, b: u64| a.saturating_mul(b);
    match campaign {
        Campaign::Counts => q.pow(9) + sat(gl, 3),
        Campaign::Triples => sat(sat(n, n), n),
        Campaign::InvDiff => sat(sat(n, n), q + q.pow(3)),
        Campaign::Idp => sat(n, gl),
        Campaign::Extension => {
            let u = (q.pow(3) - 1) * r * (r - 1);
            q.pow(9) + gl + sat(u, u)
        }
        Campaign::MainTheorem => {
            let t = q.pow(3) - q * q + 1;
            let e = q.pow(3) - q * q;
            binom(n, t)
                .saturating_add(binom(n, t + 1))
                .saturating_add(binom(n, 2))
                .saturating_add(1u64.checked_shl(e as u32).unwrap_or(u64::MAX))
        }
        Campaign::UaLemma => sat(q.pow(3), gl),
        Campaign::Graph => sat(n, n),
        Campaign::NullPoly => sat(binom(n, 3).saturating_add(binom(n, 2)), 10),
        Campaign::All => SINGLE.iter().map(|&c| exhaustive_cost(c, q)).fold(0, u64::saturating_add),
    }
}

/// Runs `campaign`; in exhaustive mode every selected campaign must fit the budget.
pub fn run_campaign(inv: &ClassInventory, campaign: Campaign, run: &RunArgs, budget: u64) -> Result<Vec<Claim>> {
    let list: Vec<Campaign> = if campaign == Campaign::All { SINGLE.to_vec() } else { vec![campaign] };
    let rand = match run.mode {
        Mode::Exhaustive => {
            for &c in &list {
                let cost = exhaustive_cost(c, inv.q());
                if cost > budget {
                    return Err(Error::SizeGuard(format!(
                        "exhaustive {c:?} at q = {} needs about {cost} checks, budget is {budget}",
                        inv.q()
                    )));
                }
            }
            None
        }
        Mode::Randomized => Some(run.randomized(1000)?),
    };
    let mut claims = Vec::new();
    for c in list {
        let start = Instant::now();
        let ctx = Ctx { inv, campaign: c, rand: rand.map(|(seed, samples)| (seed, samples as usize)) };
        claims.extend(match c {
            Campaign::Counts => counts(&ctx),
            Campaign::Triples => triples(&ctx),
            Campaign::InvDiff => inv_diff(&ctx),
            Campaign::Idp => idp(&ctx)?,
            Campaign::Extension => extension(&ctx)?,
            Campaign::MainTheorem => main_theorem(&ctx)?,
            Campaign::UaLemma => ua_lemma(&ctx)?,
            Campaign::Graph => graph(&ctx)?,
            Campaign::NullPoly => null_poly(&ctx)?,
            Campaign::All => unreachable!(),
        });
        eprintln!("[{c:?}] {:.2?}", start.elapsed());
    }
    Ok(claims)
}

struct Ctx<'a> {
    inv: &'a ClassInventory,
    campaign: Campaign,
    /// `(seed, samples)` in randomized mode.
    rand: Option<(u64, usize)>,
}

impl Ctx<'_> {
    fn rng(&self, salt: u64) -> Option<(ChaCha8Rng, usize)> {
        self.rand.map(|(seed, n)| (ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)), n))
    }

    fn claim(&self, name: &str, pass: bool, checked: u64, detail: Value) -> Claim {
        claim(self.campaign, name, pass, checked, detail)
    }

    fn n(&self) -> usize {
        self.inv.len()
    }

    fn m(&self, i: usize) -> &FMat {
        &self.inv.members()[i]
    }

    /// All ordered `k`-tuples of distinct indices, or `samples` random ones.
    fn tuples(&self, k: usize, salt: u64) -> Vec<Vec<usize>> {
        let n = self.n();
        match self.rng(salt) {
            None => (0..k).map(|_| 0..n).multi_cartesian_product().filter(|t| t.iter().all_unique()).collect(),
            Some((mut rng, samples)) => (0..samples).map(|_| sample(&mut rng, n, k).into_vec()).collect(),
        }
    }
}

/// First few failures, in order.
fn examples<T: Serialize>(mut v: Vec<T>) -> Value {
    v.truncate(5);
    json!(v)
}

fn counts(ctx: &Ctx) -> Vec<Claim> {
    match ctx.inv.verify_counts() {
        Ok(report) => report
            .entries
            .iter()
            .map(|e| {
                ctx.claim(
                    &format!("count {}", e.name),
                    e.matches,
                    1,
                    json!({ "enumerated": e.enumerated, "formula": e.formula }),
                )
            })
            .collect(),
        Err(e) => vec![errored(ctx.campaign, "counts", &e)],
    }
}

fn triples(ctx: &Ctx) -> Vec<Claim> {
    let ts = ctx.tuples(3, 1);
    let results: Vec<std::result::Result<(usize, bool), String>> = ts
        .par_iter()
        .map(|t| match classify_triple_unchecked(ctx.m(t[0]), ctx.m(t[1]), ctx.m(t[2])) {
            Ok(c) => Ok((
                match c.case {
                    TripleCase::BothSingular { .. } => 0,
                    TripleCase::Mixed => 1,
                    TripleCase::BothInvertible { .. } => 2,
                },
                c.direct,
            )),
            Err(e) => Err(format!("{t:?}: {e}")),
        })
        .collect();
    let mut cases = [[0u64; 2]; 3];
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((case, inv)) => cases[case][inv as usize] += 1,
            Err(e) => failures.push(e),
        }
    }
    let tally = |c: [u64; 2]| json!({ "invertible": c[1], "singular": c[0] });
    let mixed = ctx.inv_mixed_m();
    vec![
        ctx.claim(
            "triple-classification",
            failures.is_empty(),
            ts.len() as u64,
            json!({
                "both-singular": tally(cases[0]),
                "mixed": tally(cases[1]),
                "both-invertible": tally(cases[2]),
                "violations": failures.len(),
                "examples": examples(failures),
            }),
        ),
        mixed,
    ]
}

impl Ctx<'_> {
    /// `M` is invertible or zero for pairs with `B - A` invertible.
    fn inv_mixed_m(&self) -> Claim {
        let q = self.inv.q() as u32;
        let pairs: Vec<(usize, usize, [u32; 3])> = match self.rng(2) {
            None => {
                let coeffs: Vec<[u32; 3]> = (0..q.pow(3)).map(|c| [c % q, c / q % q, c / (q * q)]).collect();
                let first = (0..self.n()).filter(|&j| (self.m(j) - self.m(0)).det() != 0).collect::<Vec<_>>();
                first.into_iter().flat_map(|j| coeffs.iter().map(move |&c| (0, j, c))).collect()
            }
            Some((mut rng, samples)) => (0..samples)
                .map(|_| {
                    let t = sample(&mut rng, self.n(), 2);
                    (t.index(0), t.index(1), [rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q)])
                })
                .collect(),
        };
        let fails: Vec<String> = pairs
            .par_iter()
            .filter(|(i, j, _)| (self.m(*j) - self.m(*i)).det() != 0)
            .filter_map(|&(i, j, [a1, a2, a3])| mixed_m(self.m(i), self.m(j), a1, a2, a3).err().map(|e| format!("({i}, {j}): {e}")))
            .collect();
        self.claim("mixed-m-dichotomy", fails.is_empty(), pairs.len() as u64, json!({ "examples": examples(fails) }))
    }
}

fn inv_diff(ctx: &Ctx) -> Vec<Claim> {
    let pairs: Vec<Vec<usize>> = match ctx.rng(3) {
        None => (0..ctx.n()).cartesian_product(0..ctx.n()).map(|(i, j)| vec![i, j]).collect(),
        Some(_) => ctx.tuples(2, 3),
    };
    let equiv: Vec<String> = pairs
        .par_iter()
        .filter(|p| !matches!(inv_diff_equivalence(ctx.m(p[0]), ctx.m(p[1])), Ok(true)))
        .map(|p| format!("{p:?}"))
        .collect();
    let structure: Vec<String> = pairs
        .par_iter()
        .filter(|p| p[0] != p[1])
        .filter_map(|p| pair_analysis(ctx.m(p[0]), ctx.m(p[1])).err().map(|e| format!("{p:?}: {e}")))
        .collect();
    vec![
        ctx.claim("inv-diff-equivalence", equiv.is_empty(), pairs.len() as u64, json!({ "violations": equiv.len(), "examples": examples(equiv) })),
        ctx.claim(
            "singular-pair-structure",
            structure.is_empty(),
            pairs.len() as u64,
            json!({ "violations": structure.len(), "examples": examples(structure) }),
        ),
    ]
}

fn idp(ctx: &Ctx) -> Result<Vec<Claim>> {
    let q = ctx.inv.q();
    let r = q.pow(3) - q * q - q;
    let bases: Vec<usize> = match ctx.rng(4) {
        None => (0..ctx.n()).collect(),
        Some((mut rng, samples)) => {
            let mut v: Vec<usize> = (0..samples.min(ctx.n())).map(|_| rng.gen_range(0..ctx.n())).collect();
            v.push(ctx.inv.position(&ctx.inv.companion()).expect("companion is a member"));
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    ctx.inv.general_linear()?;
    let per_base: Vec<(usize, bool, bool, bool)> = bases
        .par_iter()
        .map(|&i| {
            let a = ctx.m(i);
            let sets = ctx.inv.derived_sets(a)?;
            let idp_ok = idp_check(&sets.s);
            let size_ok = sets.s.len() as u64 == r && (sets.s.len() as u64) < q.pow(3);
            let mut fibres = std::collections::BTreeMap::<FMat, u64>::new();
            for b in &sets.d {
                *fibres.entry(q_of(a, b)?).or_insert(0) += 1;
            }
            let fibre_ok = fibres.keys().cloned().collect::<Vec<_>>() == sets.s && fibres.values().all(|&c| c == r - 1);
            Ok((i, idp_ok, size_ok, fibre_ok))
        })
        .collect::<Result<_>>()?;
    let fail = |k: usize| -> Vec<usize> {
        per_base.iter().filter(|t| !([t.1, t.2, t.3][k])).map(|t| t.0).collect()
    };
    let checked = bases.len() as u64;
    let (f0, f1, f2) = (fail(0), fail(1), fail(2));
    Ok(vec![
        ctx.claim("S_A-idp", f0.is_empty(), checked, json!({ "failing_bases": examples(f0) })),
        ctx.claim("S_A-size", f1.is_empty(), checked, json!({ "expected": r, "bound": q.pow(3) - 1, "failing_bases": examples(f1) })),
        ctx.claim("Q_B-fibres", f2.is_empty(), checked, json!({ "fibre_size": r - 1, "failing_bases": examples(f2) })),
    ])
}

fn extension(ctx: &Ctx) -> Result<Vec<Claim>> {
    let ext = extension_context(ctx.inv.m())?;
    let base = &ext.base;
    let q = base.order();
    let all: Vec<FMat> = match ctx.rng(5) {
        None => crate::classes::all_matrices(base, 3).collect(),
        Some((mut rng, samples)) => {
            (0..samples).map(|_| FMat::new(base, 3, 3, (0..9).map(|_| rng.gen_range(0..q)).collect()).expect("3x3")).collect()
        }
    };
    let xent: Vec<String> =
        all.par_iter().filter(|u| !matches!(xentries_check(u, &ext), Ok(true))).map(|u| u.to_string()).collect();

    let ko = ext.k.order();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.rand.map_or(0, |r| r.0) ^ 6);
    let kmats: Vec<FMat> =
        (0..1000).map(|_| FMat::new(&ext.k, 3, 3, (0..9).map(|_| rng.gen_range(0..ko)).collect()).expect("3x3")).collect();
    let cdet: Vec<String> =
        kmats.par_iter().filter(|x| !matches!(commutator_det_check(x, &ext), Ok(true))).map(|x| x.to_string()).collect();

    let gl = ctx.inv.general_linear()?;
    let us: Vec<&FMat> = match ctx.rng(7) {
        None => gl.iter().collect(),
        Some((mut rng, samples)) => (0..samples).map(|_| &gl[rng.gen_range(0..gl.len())]).collect(),
    };
    let c = ctx.inv.companion();
    let valid: Vec<&FMat> = us.into_iter().filter(|u| u.commutator(&c).det() != 0).collect();
    let forms: Vec<_> = valid.par_iter().map(|u| canonical_form(u, &ext)).collect();
    let form_errors: Vec<String> = forms.iter().filter_map(|f| f.as_ref().err().map(|e| e.to_string())).collect();
    let forms: Vec<_> = forms.into_iter().filter_map(|f| f.ok()).collect();
    let mut tags = [0u64; 3];
    for f in &forms {
        tags[f.form as usize] += 1;
    }

    let pairs: Vec<(usize, usize)> = match ctx.rng(8) {
        None => (0..forms.len()).cartesian_product(0..forms.len()).collect(),
        Some((mut rng, samples)) if !forms.is_empty() => {
            (0..samples).map(|_| (rng.gen_range(0..forms.len()), rng.gen_range(0..forms.len()))).collect()
        }
        Some(_) => Vec::new(),
    };
    let sdiff: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (x, y) = (&forms[i], &forms[j]);
            match sdiff_det(&x.x, &y.x, &ext) {
                Ok(d) if (d == 0) == (x.q == y.q) => None,
                Ok(d) => Some(format!("({i}, {j}): determinant {d} with Q equality {}", x.q == y.q)),
                Err(e) => Some(format!("({i}, {j}): {e}")),
            }
        })
        .collect();
    Ok(vec![
        ctx.claim("xentries-symmetry", xent.is_empty(), all.len() as u64, json!({ "examples": examples(xent) })),
        ctx.claim("commutator-determinant", cdet.is_empty(), kmats.len() as u64, json!({ "examples": examples(cdet) })),
        ctx.claim(
            "canonical-form",
            form_errors.is_empty() && !forms.is_empty(),
            valid.len() as u64,
            json!({ "form-I": tags[0], "form-II": tags[1], "form-III": tags[2], "examples": examples(form_errors) }),
        ),
        ctx.claim("sdiff-closed-form", sdiff.is_empty() && !pairs.is_empty(), pairs.len() as u64, json!({ "examples": examples(sdiff) })),
    ])
}

/// Checks every index set in `sets` and returns those whose verdict differs from `want`.
fn verdict_mismatches(ctx: &Ctx, sets: &[Vec<usize>], want: bool) -> Vec<Vec<usize>> {
    let mut bad: Vec<Vec<usize>> = sets
        .par_iter()
        .filter(|s| {
            let ms: Vec<FMat> = s.iter().map(|&i| ctx.m(i).clone()).collect();
            !core_verdict(&ms).is_ok_and(|v| v == want)
        })
        .cloned()
        .collect();
    bad.sort();
    bad
}

fn subsets_of(n: usize, k: usize, rng: Option<(ChaCha8Rng, usize)>) -> Vec<Vec<usize>> {
    match rng {
        None => (0..n).combinations(k).collect(),
        Some((mut rng, samples)) => (0..samples)
            .map(|_| {
                let mut v = sample(&mut rng, n, k).into_vec();
                v.sort_unstable();
                v
            })
            .collect(),
    }
}

fn main_theorem(ctx: &Ctx) -> Result<Vec<Claim>> {
    let q = ctx.inv.q();
    let n = ctx.n();
    let t = (q.pow(3) - q * q + 1) as usize;
    let mut claims = Vec::new();

    let mut sizes = vec![t];
    if ctx.rand.is_none() {
        sizes.push(t + 1);
    }
    for (k, &size) in sizes.iter().enumerate() {
        let sets = subsets_of(n, size, ctx.rng(10 + k as u64));
        let bad = verdict_mismatches(ctx, &sets, true);
        claims.push(ctx.claim(&format!("size-{size}-subsets-core"), bad.is_empty(), sets.len() as u64, json!({ "examples": examples(bad) })));
    }

    let pairs = subsets_of(n, 2, ctx.rng(12));
    let bad = verdict_mismatches(ctx, &pairs, false);
    claims.push(ctx.claim("pairs-non-core", bad.is_empty(), pairs.len() as u64, json!({ "examples": examples(bad) })));

    let c = ctx.inv.companion();
    let e: Vec<usize> = ctx.inv.e_set(&c, &[1, 0, 0])?.iter().map(|b| ctx.inv.position(b).expect("member")).collect();
    let e_subsets: Vec<Vec<usize>> = match ctx.rng(13) {
        None => (1..=e.len()).flat_map(|k| e.iter().copied().combinations(k)).collect(),
        Some((mut rng, samples)) => {
            let mut v = vec![e.clone()];
            v.extend((0..samples).map(|_| {
                let k = rng.gen_range(1..=e.len());
                let mut s: Vec<usize> = sample(&mut rng, e.len(), k).into_iter().map(|i| e[i]).collect();
                s.sort_unstable();
                s
            }));
            v
        }
    };
    let bad = verdict_mismatches(ctx, &e_subsets, false);
    claims.push(ctx.claim(
        "E-family-subsets-non-core",
        bad.is_empty(),
        e_subsets.len() as u64,
        json!({ "family_size": e.len(), "examples": examples(bad) }),
    ));

    let extended: Vec<Vec<usize>> = (0..n)
        .filter(|i| !e.contains(i))
        .map(|i| {
            let mut s = e.clone();
            s.push(i);
            s.sort_unstable();
            s
        })
        .collect();
    let bad = verdict_mismatches(ctx, &extended, true);
    claims.push(ctx.claim("E-family-maximal", bad.is_empty(), extended.len() as u64, json!({ "examples": examples(bad) })));

    let a = ctx.inv.position(&c).expect("member");
    let d: Vec<usize> = ctx.inv.d_set(&c)?.iter().map(|b| ctx.inv.position(b).expect("member")).collect();
    let k = (q.pow(3) - q * q - q) as usize;
    let d_sets: Vec<Vec<usize>> = match ctx.rng(14) {
        None if binom(d.len() as u64, k as u64) <= 100_000 => d.iter().copied().combinations(k).collect(),
        None => Vec::new(),
        Some((mut rng, samples)) => {
            (0..samples).map(|_| sample(&mut rng, d.len(), k).into_iter().map(|i| d[i]).collect()).collect()
        }
    };
    let d_sets: Vec<Vec<usize>> = d_sets
        .into_iter()
        .map(|mut s| {
            s.push(a);
            s.sort_unstable();
            s
        })
        .collect();
    if !d_sets.is_empty() {
        let bad = verdict_mismatches(ctx, &d_sets, true);
        claims.push(ctx.claim("D_A-core-bound", bad.is_empty(), d_sets.len() as u64, json!({ "size": k + 1, "examples": examples(bad) })));
    }
    Ok(claims)
}

fn ua_lemma(ctx: &Ctx) -> Result<Vec<Claim>> {
    let c = ctx.inv.companion();
    let mut cands: Vec<FMat> = algebra_elements(&c).into_iter().filter(|b| !b.is_scalar()).collect();
    if let Some((mut rng, samples)) = ctx.rng(20) {
        cands = (0..samples.min(cands.len())).map(|_| cands[rng.gen_range(0..cands.len())].clone()).collect();
    }
    let fails: Vec<String> = cands
        .iter()
        .filter_map(|b| match ctx.inv.ua_equals_ub(&c, b) {
            Ok(true) => None,
            Ok(false) => Some(b.to_string()),
            Err(e) => Some(format!("{b}: {e}")),
        })
        .collect();
    Ok(vec![ctx.claim("U_A-equals-U_B", fails.is_empty(), cands.len() as u64, json!({ "examples": examples(fails) }))])
}

fn graph(ctx: &Ctx) -> Result<Vec<Claim>> {
    let q = ctx.inv.q();
    let g = GammaGraph::from_inventory(std::sync::Arc::new(ctx.inv.clone()));
    let s = summarize(&g, &ctx.inv.companion())?;
    let n = g.vertex_count();
    let mut claims = vec![
        ctx.claim("vertex-count", n as u64 == class_size(q), 1, json!({ "vertices": n, "formula": class_size(q) })),
        ctx.claim(
            "regular-degree",
            s.regular_with_expected_degree(),
            n as u64,
            json!({ "histogram": s.degree_histogram, "expected": s.expected_degree, "components": s.components, "component_sizes": s.component_sizes }),
        ),
        ctx.claim("S_A-clique", s.clique_verified, 1, json!({ "size": s.clique.len(), "clique": s.clique })),
        ctx.claim("clique-bound", s.clique_within_bound, 1, json!({ "size": s.clique.len(), "bound": s.clique_bound })),
        ctx.claim(
            "complement-degree",
            s.complement_degree.map(|d| d as u64) == s.regular_degree.map(|r| (n - 1 - r) as u64),
            1,
            json!({ "complement_degree": s.complement_degree, "closed_form": s.complement_degree_closed_form }),
        ),
    ];
    let vs: Vec<usize> = match ctx.rng(30) {
        None => (0..n).collect(),
        Some((mut rng, samples)) => (0..samples.min(n)).map(|_| rng.gen_range(0..n)).collect(),
    };
    let bad: Vec<usize> = vs
        .par_iter()
        .copied()
        .filter(|&i| {
            let symmetric = g.neighbors(i).iter().all(|&j| g.adjacent(j, i));
            !symmetric || ctx.inv.d_set(g.vertex(i)).map_or(true, |d| d.len() != g.degree(i))
        })
        .collect();
    claims.push(ctx.claim("degree-equals-D_A", bad.is_empty(), vs.len() as u64, json!({ "examples": examples(bad) })));
    let seed = ctx.rand.map_or(0, |r| r.0);
    let ok = vertex_transitivity_probe(&g, 50, seed)?;
    claims.push(ctx.claim("vertex-transitivity", ok, 50, json!({ "seed": seed })));
    let csv = export_graph(&g, ExportFormat::EdgeCsv);
    let round = parse_edge_csv(&csv, n)? == g.adjacency();
    claims.push(ctx.claim("export-round-trip", round, g.edge_count() as u64, json!({ "bytes": csv.len() })));
    Ok(claims)
}

/// A nonzero random combination of `basis`.
pub(crate) fn random_combination(basis: &[MatPoly], rng: &mut ChaCha8Rng) -> Result<MatPoly> {
    let spec = basis[0].spec().clone();
    let n = basis[0].dim();
    let len = basis.iter().map(|f| f.coeffs().len()).max().unwrap_or(0);
    let q = spec.order();
    loop {
        let mut coeffs = vec![FMat::zeros(&spec, n, n); len];
        for f in basis {
            let c = rng.gen_range(0..q);
            for (acc, x) in coeffs.iter_mut().zip(f.coeffs()) {
                *acc = &*acc + &x.scale(c);
            }
        }
        let f = MatPoly::new(&spec, n, coeffs)?;
        if !f.is_zero() {
            return Ok(f);
        }
    }
}

fn null_poly(ctx: &Ctx) -> Result<Vec<Claim>> {
    let n = ctx.n();
    let sets: Vec<Vec<usize>> = match ctx.rng(40) {
        None => (1..=3).flat_map(|k| (0..n).combinations(k)).collect(),
        // nonempty subsets of random E families, which are never core
        Some((mut rng, samples)) => {
            let points = projective_points(ctx.inv.spec());
            (0..samples)
                .map(|_| {
                    let a = ctx.m(rng.gen_range(0..n));
                    let v = &points[rng.gen_range(0..points.len())];
                    let e = ctx.inv.e_set(a, v)?;
                    let k = rng.gen_range(1..=e.len());
                    Ok(sample(&mut rng, e.len(), k).into_iter().map(|i| ctx.inv.position(&e[i]).expect("member")).collect())
                })
                .collect::<Result<_>>()?
        }
    };
    let seed = ctx.rand.map_or(0, |r| r.0);
    let outcome: Vec<std::result::Result<bool, String>> = sets
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let ms: Vec<FMat> = s.iter().map(|&k| ctx.m(k).clone()).collect();
            let basis = low_degree_null_basis(&ms).map_err(|e| format!("{s:?}: {e}"))?;
            if basis.is_empty() {
                return Ok(false);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            let f = random_combination(&basis, &mut rng).map_err(|e| e.to_string())?;
            for a in &ms {
                if !right_evaluate(&f, a).map_err(|e| e.to_string())?.is_zero() {
                    return Err(format!("{s:?}: combination does not vanish at {a}"));
                }
            }
            Ok(true)
        })
        .collect();
    let tested = outcome.iter().filter(|r| matches!(r, Ok(true))).count();
    let fails: Vec<String> = outcome.into_iter().filter_map(|r| r.err()).collect();
    Ok(vec![ctx.claim(
        "null-polynomial-soundness",
        fails.is_empty(),
        sets.len() as u64,
        json!({ "non_core_sets_tested": tested, "examples": examples(fails) }),
    )])
}
