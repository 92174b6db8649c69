use iwasawa_core::bernoulli::irregular_pairs;
use iwasawa_core::growth::{gv_bound, howson_rank, index_growth, FiniteQuotientGroup, GroupRingElement, GroupRingModule};
use iwasawa_core::kida::{evaluate, TowerData};
use iwasawa_core::lab::{
    default_family, default_levels, remark_herbrand, verify_basiclemma, verify_finite_herbrand, verify_fptrivial,
    verify_mptrivial, verify_psi, verify_remark, LabReport,
};
use iwasawa_core::lfunction::{minus_invariants, scan_lambda, BranchConfig};
use iwasawa_core::rank::{
    class_group_rank, class_group_rank_from_terms, cyclotomic_rank, kummer_count, selmer_rank, EllipticLocalData,
    Hypotheses,
};
use serde_json::{json, Value};

use crate::args::{Assume, GroupChoice, GrowthArgs, GrowthKind, LabArgs, Lemma, RankArgs, SelmerArgs};
use crate::error::CliError;
use crate::fetch::Fetcher;
use crate::input::read_versioned;
use crate::table::Table;

/// A computed result: JSON for machines, a table for people.
pub struct Outcome {
    pub result: Value,
    pub table: Table,
    pub ok: bool,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn need_odd_prime(p: u64) -> Result<(), CliError> {
    if p == 2 {
        return Err(CliError::Usage("p must be an odd prime".into()));
    }
    Ok(())
}

impl Assume {
    fn hypotheses(&self) -> Hypotheses {
        Hypotheses {
            mu_zero: self.assume_mu_zero,
            strongly_admissible: self.assume_strongly_admissible,
            good_ordinary: self.assume_good_ordinary,
        }
    }
}

pub fn irregular(p: u64) -> Result<Outcome, CliError> {
    need_odd_prime(p)?;
    let ks: Vec<u64> = irregular_pairs(p)?.iter().map(|x| x.k).collect();
    let mut table = Table::new(&["p", "irregular k"]);
    table.row(vec![p.to_string(), format!("{ks:?}")]);
    Ok(Outcome { result: json!({ "p": p, "irregular_indices": ks }), table, ok: true })
}

pub fn scan(max: u64, config: &BranchConfig) -> Result<Outcome, CliError> {
    let entries = scan_lambda(max, config)?;
    let mut table = Table::new(&["p", "k", "lambda-", "mu-", "certified"]);
    for e in &entries {
        let show = |x: Option<String>| x.unwrap_or_else(|| "?".into());
        table.row(vec![
            e.p.to_string(),
            format!("{:?}", e.irregular_indices),
            show(e.lambda_minus.map(|v| v.to_string())),
            show(e.mu_minus.map(|v| v.to_string())),
            e.certified.to_string(),
        ]);
    }
    let at_least_two: Vec<u64> = entries.iter().filter(|e| e.lambda_minus.is_some_and(|l| l >= 2)).map(|e| e.p).collect();
    let ok = entries.iter().all(|e| e.certified);
    Ok(Outcome { result: json!({ "entries": entries, "lambda_at_least_2": at_least_two }), table, ok })
}

pub fn kida(input: &std::path::Path) -> Result<Outcome, CliError> {
    let tower: TowerData = read_versioned(input, "tower data")?;
    let r = evaluate(&tower)?;
    let mut table = Table::new(&["lambda_L", "mu_L", "|Q|", "theta_ok"]);
    table.row(vec![r.lambda_l.to_string(), r.mu_l.to_string(), r.q_set.len().to_string(), r.theta_ok.to_string()]);
    for m in &r.q_set.members {
        table.note(format!("Q member {} with g_v = {}", m.prime.id, m.g_v));
    }
    if !r.theta_ok {
        table.note("theta <= 1 is not asserted; the formula does not apply".into());
    }
    Ok(Outcome { ok: r.theta_ok, result: to_value(&r), table })
}

fn verdict_table(v: &iwasawa_core::rank::RankVerdict) -> Table {
    let mut table = Table::new(&["rank", "pseudo-null", "mu_zero", "strongly_admissible", "good_ordinary"]);
    let h = v.hypotheses;
    table.row(vec![
        v.rank.to_string(),
        v.pseudo_null.to_string(),
        h.mu_zero.to_string(),
        h.strongly_admissible.to_string(),
        h.good_ordinary.to_string(),
    ]);
    table
}

pub fn rank(a: &RankArgs, config: &BranchConfig) -> Result<Outcome, CliError> {
    if let Some(path) = &a.input {
        let tower: TowerData = read_versioned(path, "tower data")?;
        let v = class_group_rank(&tower, a.assume.hypotheses())?;
        return Ok(Outcome { table: verdict_table(&v), result: json!({ "verdict": v }), ok: true });
    }
    if let Some(p) = a.cyclotomic {
        need_odd_prime(p)?;
        let inv = minus_invariants(p, config)?;
        let certified = inv.branches.iter().all(|b| b.certified) && !inv.mu_anomaly;
        let v = cyclotomic_rank(&inv, a.assume.assume_strongly_admissible)?;
        let kummer = kummer_count(inv.lambda_minus as u64);
        let branches: Vec<Value> = inv
            .branches
            .iter()
            .map(|b| json!({ "k": b.k, "lambda": b.lambda, "mu": b.mu, "level": b.level, "precision": b.precision, "certified": b.certified }))
            .collect();
        let mut table = verdict_table(&v);
        table.note(format!("lambda- = {}, mu- = {}, delta = {}", inv.lambda_minus, inv.mu_minus, inv.delta));
        table.note(format!("at least {} CM Z_p-extensions", kummer.at_least));
        let result = json!({
            "p": p,
            "lambda_minus": inv.lambda_minus,
            "mu_minus": inv.mu_minus,
            "branches": branches,
            "verdict": v,
            "kummer": kummer,
        });
        return Ok(Outcome { result, table, ok: certified });
    }
    match (a.lambda, a.delta, a.q_size) {
        (Some(l), Some(d), Some(q)) => {
            let v = class_group_rank_from_terms(l, d, q, a.assume.hypotheses())?;
            Ok(Outcome { table: verdict_table(&v), result: json!({ "verdict": v }), ok: true })
        }
        _ => Err(CliError::Usage("rank needs --input, --cyclotomic or --lambda with --delta and --q-size".into())),
    }
}

pub fn selmer(a: &SelmerArgs, fetcher: &Fetcher) -> Result<Outcome, CliError> {
    let data: EllipticLocalData = match (&a.input, &a.label, a.p) {
        (Some(path), _, _) => read_versioned(path, "elliptic local data")?,
        (None, Some(label), Some(p)) => {
            need_odd_prime(p)?;
            fetcher.fetch(label)?.local_data(p, &a.ramified, &a.torsion, a.corank)
        }
        _ => return Err(CliError::Usage("selmer needs --input or --label with --p".into())),
    };
    let v = selmer_rank(&data, a.assume.hypotheses())?;
    Ok(Outcome { table: verdict_table(&v), result: json!({ "label": data.label, "verdict": v }), ok: true })
}

fn lab_table(r: &LabReport) -> Table {
    let mut table = Table::new(&["lemma", "p", "trials", "passed", "failed", "inconclusive", "n/a", "inconclusive rate"]);
    table.row(vec![
        r.lemma.clone(),
        r.p.to_string(),
        r.trials.to_string(),
        r.passed.to_string(),
        r.failed.to_string(),
        r.inconclusive.to_string(),
        r.not_applicable.to_string(),
        format!("{:.4}", r.inconclusive_rate()),
    ]);
    for f in r.failures.iter().take(5) {
        table.note(format!("failure: {}", f.reason));
    }
    table
}

pub const REMARK_DEGREES: [usize; 4] = [1, 2, 3, 4];

pub fn lab(a: &LabArgs, seed: u64) -> Result<Outcome, CliError> {
    need_odd_prime(a.p)?;
    let report = match a.lemma {
        Lemma::Fptrivial => verify_fptrivial(a.p, a.trials, seed, a.max_dim)?,
        Lemma::Herbrand => verify_finite_herbrand(a.p, a.trials, seed, a.max_dim, 3)?,
        Lemma::Basiclemma => verify_basiclemma(&default_family(a.p), &default_levels(a.p))?,
        Lemma::Mptrivial => verify_mptrivial(&default_family(a.p), &default_levels(a.p))?,
        Lemma::Remark => verify_remark(a.p, &REMARK_DEGREES)?,
        Lemma::Psi => verify_psi(a.p, a.trials, seed)?,
    };
    let mut table = lab_table(&report);
    let mut result = json!({ "report": report, "inconclusive_rate": report.inconclusive_rate() });
    if a.lemma == Lemma::Remark {
        let r = remark_herbrand(a.p, &REMARK_DEGREES)?;
        table.note(format!("log_p h by degree: {:?}, stabilized: {:?}", r.herbrand_logs, r.stabilized));
        result["remark"] = to_value(&r);
    }
    Ok(Outcome { ok: report.ok(), result, table })
}

fn parse_gens(s: &str, dim: usize) -> Result<Vec<Vec<u64>>, CliError> {
    s.split(';')
        .map(|row| {
            let v: Vec<u64> = row
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|e| CliError::Usage(format!("generator entry {x:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            if v.len() != dim {
                return Err(CliError::Usage(format!("generator {row:?} needs {dim} coordinates")));
            }
            Ok(v)
        })
        .collect()
}

fn unit(dim: usize, i: usize) -> Vec<u64> {
    (0..dim).map(|j| (i == j) as u64).collect()
}

/// Free of rank 2, torsion, and a free summand plus torsion.
pub fn howson_samples(p: u64) -> Result<Vec<(&'static str, GroupRingModule)>, CliError> {
    let z = GroupRingElement::zero;
    let xm1 = GroupRingElement { terms: vec![(1, 1, 0), (-1, 0, 0)] };
    let ym1 = GroupRingElement { terms: vec![(1, 0, 1), (-1, 0, 0)] };
    Ok(vec![
        ("free", GroupRingModule::free(p, 2)?),
        ("torsion", GroupRingModule::new(p, 1, vec![vec![xm1.clone()], vec![ym1.clone()]])?),
        ("mixed", GroupRingModule::new(p, 3, vec![vec![z(), z(), xm1], vec![z(), z(), ym1]])?),
    ])
}

pub fn growth(a: &GrowthArgs) -> Result<Outcome, CliError> {
    need_odd_prime(a.p)?;
    let levels = a.levels.unwrap_or(if a.kind == GrowthKind::Howson { 3 } else { 5 });
    let dim_of = |g: &FiniteQuotientGroup| g.dim();
    match a.kind {
        GrowthKind::Abelian | GrowthKind::Heisenberg => {
            let g = match a.kind {
                GrowthKind::Abelian => FiniteQuotientGroup::abelian(a.p, a.dim, levels)?,
                _ => FiniteQuotientGroup::heisenberg(a.p, levels)?,
            };
            let d = dim_of(&g);
            let h = match &a.gens {
                Some(s) => parse_gens(s, d)?,
                None if a.kind == GrowthKind::Abelian => vec![unit(d, 0)],
                None => vec![unit(d, 2)],
            };
            let t = index_growth(&g, &h, 0..=levels)?;
            let mut table = Table::new(&["n", "[G_n : H cap G_n]"]);
            for (n, v) in &t.rows {
                table.row(vec![n.to_string(), v.to_string()]);
            }
            match &t.fit {
                Some(f) => table.note(format!("fit from n = {}: C = {}, e = {}", t.window_start, f.c(), f.e)),
                None => table.note("no exact fit C p^(e n) on the tail".into()),
            }
            Ok(Outcome { ok: t.fit.is_some(), result: json!({ "generators": h, "growth": t }), table })
        }
        GrowthKind::Gv => {
            let g = match a.group {
                GroupChoice::Abelian => FiniteQuotientGroup::abelian(a.p, a.dim, levels)?,
                GroupChoice::Heisenberg => FiniteQuotientGroup::heisenberg(a.p, levels)?,
            };
            let d = dim_of(&g);
            let h = match &a.gens {
                Some(s) => parse_gens(s, d)?,
                None => vec![unit(d, d - 1)],
            };
            let b = gv_bound(&g, &h, 1..=levels)?;
            let mut table = Table::new(&["n", "|G_n : G_v,n|"]);
            for (n, v) in &b.rows {
                table.row(vec![n.to_string(), v.to_string()]);
            }
            table.note(format!("exponent {:?}, bounded by p^(d n): {}", b.exponent, b.bounded));
            Ok(Outcome { ok: b.exponent.is_some() && b.bounded, result: json!({ "generators": h, "bound": b }), table })
        }
        GrowthKind::Howson => {
            let modules = match &a.input {
                Some(path) => vec![("input", read_versioned::<GroupRingModule>(path, "group ring module")?)],
                None => howson_samples(a.p)?,
            };
            let mut table = Table::new(&["module", "n", "rank M_{G_n}", "residual", "r"]);
            let mut results = Vec::new();
            let mut ok = true;
            for (name, m) in &modules {
                let h = howson_rank(m, levels)?;
                for &(n, rank, residual) in &h.rows {
                    table.row(vec![name.to_string(), n.to_string(), rank.to_string(), residual.to_string(), h.r.to_string()]);
                }
                ok &= h.confident;
                results.push(json!({ "module": name, "howson": h }));
            }
            Ok(Outcome { result: json!({ "modules": results }), table, ok })
        }
    }
}
