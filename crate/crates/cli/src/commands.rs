use arithdyn::classifier::{classify_zero_orbit, verify_classification_exhaustive, ZeroOrbitClass};
use arithdyn::coprime::{self, CoprimeSeq, DivisorData};
use arithdyn::divisibility::{self, DivSeqReport};
use arithdyn::factorint::{self, Effort, PrimeStatus, PrivatePrime, PrimitiveReport};
use arithdyn::growth::interval::Interval;
use arithdyn::growth::{self, SeriesCoeff, TauEstimate};
use arithdyn::orbit::{self, CycleOutcome, Orbit};
use arithdyn::{serde_str, Error, IntPoly};
use num_bigint::BigInt;
use serde::Serialize;

use crate::args::*;
use crate::output::{join, Report};

pub struct Ctx {
    pub precision: u32,
    pub effort: Effort,
}

pub fn run(cmd: &Command, ctx: &Ctx) -> Result<Report, Error> {
    match cmd {
        Command::Orbit(a) => orbit_cmd(a),
        Command::Classify(a) => classify_cmd(&a.poly),
        Command::Coprime(a) => coprime_cmd(a),
        Command::Primes(a) => primes_cmd(a, ctx),
        Command::Divseq(a) => divseq_cmd(a, ctx),
        Command::Tau(a) => tau_cmd(a, ctx),
        Command::Series(a) => series_cmd(a, ctx),
        Command::Mills(a) => mills_cmd(a),
        Command::SearchExceptions(a) => search_cmd(a),
        Command::VerifyClassification(a) => verify_cmd(a),
    }
}

fn interval_decimal(iv: &Interval, digits: usize) -> [String; 2] {
    [iv.lo.to_decimal(digits), iv.hi.to_decimal(digits)]
}

#[derive(Serialize)]
struct OrbitOut<'a> {
    #[serde(with = "serde_str::poly")]
    poly: &'a IntPoly,
    #[serde(with = "serde_str")]
    start: &'a BigInt,
    #[serde(with = "serde_str::vec")]
    terms: &'a [BigInt],
    wandering: bool,
    cycle: CycleOutcome,
}

fn orbit_cmd(a: &OrbitArgs) -> Result<Report, Error> {
    let poly = &a.poly.poly;
    let mut o = Orbit::new(poly.clone(), a.start.clone());
    o.extend(a.count.saturating_sub(1))?;
    let terms = &o.terms()[..a.count.min(o.terms().len())];
    let cycle = orbit::detect_cycle(poly, &a.start, a.horizon)?;
    let wandering = if poly.is_constant() {
        false
    } else {
        orbit::is_wandering(poly, &a.start)?
    };
    let mut r = Report::new(
        &OrbitOut {
            poly,
            start: &a.start,
            terms,
            wandering,
            cycle: cycle.clone(),
        },
        vec!["n", "x_n"],
    );
    r.line("poly", poly).line("start", &a.start).line("wandering", wandering);
    if let CycleOutcome::Cycle(c) = &cycle {
        r.line("preperiod", c.preperiod)
            .line("period", c.period)
            .line("cycle", join(&c.cycle, " -> "));
    }
    for (n, x) in terms.iter().enumerate() {
        r.row(vec![n.to_string(), x.to_string()]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct ClassifyOut<'a> {
    #[serde(with = "serde_str::poly")]
    poly: &'a IntPoly,
    class: &'a ZeroOrbitClass,
    #[serde(with = "serde_str::vec")]
    zero_orbit: &'a [BigInt],
    #[serde(with = "serde_str::opt")]
    ell: Option<BigInt>,
}

fn classify_cmd(poly: &IntPoly) -> Result<Report, Error> {
    let class = classify_zero_orbit(poly)?;
    let zero_orbit = orbit::prefix(poly, &BigInt::from(0), 4);
    let ell = match class {
        ZeroOrbitClass::StrictlyPreperiodic { .. } => coprime::ell(poly).ok(),
        _ => None,
    };
    let mut r = Report::new(
        &ClassifyOut {
            poly,
            class: &class,
            zero_orbit: &zero_orbit,
            ell: ell.clone(),
        },
        vec!["n", "f^n(0)"],
    );
    r.line("poly", poly);
    match &class {
        ZeroOrbitClass::StrictlyPreperiodic {
            family,
            a,
            mirrored,
        } => {
            r.line("class", "strictly_preperiodic")
                .line("family", family)
                .line("a", a)
                .line("mirrored", mirrored);
        }
        ZeroOrbitClass::Periodic { period, degenerate } => {
            r.line("class", "periodic")
                .line("period", period)
                .line("degenerate", degenerate);
        }
        ZeroOrbitClass::Wandering => {
            r.line("class", "wandering");
        }
    }
    if let Some(e) = &ell {
        r.line("ell", e);
    }
    for (n, x) in zero_orbit.iter().enumerate() {
        r.row(vec![n.to_string(), x.to_string()]);
    }
    Ok(r)
}

fn build_seq(a: &SeqArgs) -> Result<CoprimeSeq, Error> {
    let poly = &a.poly.poly;
    Ok(match a.rule {
        Some(rule) => coprime::coprime_with_rule(rule.into(), poly, &a.start, a.count)?,
        None => coprime::coprime_auto(poly, &a.start, a.count)?,
    })
}

fn seq_summary(r: &mut Report, s: &CoprimeSeq) {
    r.line("poly", &s.poly).line("start", &s.start).line("rule", s.rule);
    match &s.divisor_data {
        DivisorData::Preperiodic { ell } => {
            r.line("ell", ell);
        }
        DivisorData::Period1 { r: k, g, g0 } => {
            r.line("r", k).line("g", g).line("g(0)", g0);
        }
        DivisorData::Period2 { r: k, big_g, modulus } => {
            r.line("r", k).line("G", big_g).line("modulus", modulus);
        }
    }
    if !s.unit_indices.is_empty() {
        r.line("unit_indices", join(&s.unit_indices, " "));
    }
    if let Some(roots) = &s.exceptional_roots {
        r.line("exceptional_roots", join(roots, " "));
    }
    if !s.flagged_indices.is_empty() {
        r.line("flagged_indices", join(&s.flagged_indices, " "));
    }
}

#[derive(Serialize)]
struct CoprimeOut<'a> {
    #[serde(flatten)]
    seq: &'a CoprimeSeq,
    pairwise_coprime: bool,
}

fn coprime_cmd(a: &SeqArgs) -> Result<Report, Error> {
    let seq = build_seq(a)?;
    let pairwise_coprime = seq.is_pairwise_coprime();
    let mut r = Report::new(
        &CoprimeOut {
            seq: &seq,
            pairwise_coprime,
        },
        vec!["n", "a_n"],
    );
    seq_summary(&mut r, &seq);
    r.line("pairwise_coprime", pairwise_coprime);
    for (n, x) in seq.indexed() {
        r.row(vec![n.to_string(), x.to_string()]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct PrimesOut<'a> {
    #[serde(flatten)]
    seq: &'a CoprimeSeq,
    primes: &'a [PrivatePrime],
    distinct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    primitive: Option<Vec<PrimitiveReport>>,
}

fn status_cells(s: &PrimeStatus) -> [String; 2] {
    match s {
        PrimeStatus::Skipped => ["skipped".into(), String::new()],
        PrimeStatus::Prime { prime } => ["prime".into(), prime.to_string()],
        PrimeStatus::Unresolved { cofactor } => ["unresolved".into(), cofactor.to_string()],
    }
}

fn primes_cmd(a: &PrimesArgs, ctx: &Ctx) -> Result<Report, Error> {
    let seq = build_seq(&a.seq)?;
    let primes = seq.private_primes(ctx.effort);
    let found: Vec<_> = primes
        .iter()
        .filter_map(|p| match &p.status {
            PrimeStatus::Prime { prime } => Some(prime),
            _ => None,
        })
        .collect();
    let mut sorted = found.clone();
    sorted.sort();
    sorted.dedup();
    let distinct = sorted.len() == found.len();
    let primitive = if a.primitive {
        let mut o = Orbit::new(a.seq.poly.poly.clone(), a.seq.start.clone());
        let terms = o.extend(a.seq.count)?.to_vec();
        Some(
            (1..=a.seq.count)
                .map(|n| factorint::primitive_primes(&terms, n, ctx.effort))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let mut r = Report::new(
        &PrimesOut {
            seq: &seq,
            primes: &primes,
            distinct,
            primitive: primitive.clone(),
        },
        vec!["n", "a_n", "status", "value"],
    );
    seq_summary(&mut r, &seq);
    r.line("distinct", distinct);
    if let Some(reports) = &primitive {
        for p in reports {
            let v = match p.has_primitive() {
                Some(true) => join(&p.primitive, " "),
                Some(false) => "none".to_string(),
                None => "unknown".to_string(),
            };
            r.line(&format!("primitive x_{}", p.index), v);
        }
    }
    for ((n, x), p) in seq.indexed().zip(&primes) {
        let [status, value] = status_cells(&p.status);
        r.row(vec![n.to_string(), x.to_string(), status, value]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct DivseqOut<'a> {
    #[serde(flatten)]
    report: &'a DivSeqReport,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduction: Option<divisibility::GcdTrace>,
}

fn divseq_cmd(a: &DivseqArgs, ctx: &Ctx) -> Result<Report, Error> {
    let report = match (&a.poly, &a.terms, &a.gcd_bound) {
        (Some(poly), _, Some(start)) => {
            let zero = BigInt::from(0);
            let zero_wanders = orbit::is_wandering(poly, &zero)?;
            // enough bits to reconstruct the bracketing terms themselves
            let mut bits = orbit::prefix(poly, start, a.n_max)[a.n_max].bits();
            if zero_wanders {
                bits = bits.max(orbit::prefix(poly, &zero, a.n_max)[a.n_max].bits());
            }
            let prec = ctx.precision.max(bits as u32 + 2 * a.n_max as u32 + 64);
            let tau = growth::estimate_tau(poly, start, a.n_max, prec)?;
            let tau0 = if zero_wanders {
                Some(growth::estimate_tau(poly, &zero, a.n_max, prec)?)
            } else {
                None
            };
            divisibility::check_gcd_bound(poly, start, a.upto, &tau, tau0.as_ref())?
        }
        (Some(poly), _, None) => divisibility::check_strong_divisibility(poly, a.upto)?,
        (None, Some(terms), _) => divisibility::check_strong_divisibility_terms(terms),
        (None, None, _) => unreachable!("clap requires --poly or --terms"),
    };
    let reduction = match (&a.poly, &a.reduce) {
        (Some(poly), Some(mn)) => Some(divisibility::gcd_reduce(poly, mn[0], mn[1])?),
        _ => None,
    };
    let passed = report.passed();
    let bound_mode = a.gcd_bound.is_some();
    let header = if bound_mode {
        vec!["m", "n", "gcd", "bound", "verdict"]
    } else {
        vec!["m", "n", "gcd", "expected"]
    };
    let mut r = Report::new(
        &DivseqOut {
            report: &report,
            passed,
            reduction: reduction.clone(),
        },
        header,
    );
    r.line("checked_pairs", report.checked_pairs)
        .line("violations", report.violations.len())
        .line("passed", passed);
    if !report.unchecked.is_empty() {
        r.line("unchecked", report.unchecked.len());
    }
    if let Some(t) = &reduction {
        let chain = join(t.steps.iter().map(|s| format!("({},{})", s.i, s.j)), " -> ");
        r.line("reduction", chain)
            .line("final_index", t.final_index)
            .line("final_value", &t.final_value);
    }
    if bound_mode {
        for b in &report.bound_checks {
            let verdict = serde_json::to_value(b.verdict).expect("verdict");
            r.row(vec![
                b.m.to_string(),
                b.n.to_string(),
                b.gcd.to_string(),
                b.bound.to_string(),
                verdict.as_str().unwrap_or_default().to_string(),
            ]);
        }
    } else {
        for v in &report.violations {
            r.row(vec![
                v.m.to_string(),
                v.n.to_string(),
                v.gcd.to_string(),
                v.expected.to_string(),
            ]);
        }
    }
    Ok(r)
}

#[derive(Serialize)]
struct Reconstruction {
    n: usize,
    #[serde(with = "serde_str")]
    x: BigInt,
    #[serde(with = "serde_str::opt")]
    reconstructed: Option<BigInt>,
}

#[derive(Serialize)]
struct TauOut<'a> {
    #[serde(flatten)]
    estimate: &'a TauEstimate,
    decimal: [String; 2],
    reconstruction: Vec<Reconstruction>,
}

fn tau_cmd(a: &TauArgs, ctx: &Ctx) -> Result<Report, Error> {
    let poly = &a.poly.poly;
    let est = growth::estimate_tau(poly, &a.start, a.n_max, ctx.precision)?;
    let terms = orbit::prefix(poly, &a.start, a.n_max);
    let reconstruction: Vec<_> = terms
        .iter()
        .enumerate()
        .map(|(n, x)| Reconstruction {
            n,
            x: x.clone(),
            reconstructed: growth::reconstruct(poly, &est, n).ok(),
        })
        .collect();
    let decimal = interval_decimal(&est.interval(), a.digits);
    let mut r = Report::new(
        &TauOut {
            estimate: &est,
            decimal: decimal.clone(),
            reconstruction,
        },
        vec!["n", "x_n", "reconstructed"],
    );
    r.line("poly", poly)
        .line("start", &a.start)
        .line("tau_lo", &decimal[0])
        .line("tau_hi", &decimal[1])
        .line("width", est.width().to_sci(3))
        .line("horizon", est.horizon)
        .line(
            "certified_from",
            est.certified_from.map_or("none".to_string(), |n| n.to_string()),
        );
    for (n, x) in terms.iter().enumerate() {
        let rec = growth::reconstruct(poly, &est, n).map_or(String::new(), |v| v.to_string());
        r.row(vec![n.to_string(), x.to_string(), rec]);
    }
    Ok(r)
}

fn coeff_text(c: &SeriesCoeff) -> String {
    match c {
        SeriesCoeff::Exact(q) => q.to_string(),
        SeriesCoeff::Enclosed(iv) => {
            let [lo, hi] = interval_decimal(iv, 30);
            format!("[{lo}, {hi}]")
        }
    }
}

/// Doubles the precision until every residual is bounded away from zero.
fn residuals_adaptive(
    poly: &IntPoly,
    start: &BigInt,
    trunc: &growth::SeriesTruncation,
    a: &SeriesArgs,
    precision: u32,
) -> Result<growth::ResidualReport, Error> {
    let mut prec = precision;
    loop {
        let est = growth::estimate_tau(poly, start, a.n_to + 2, prec)?;
        match growth::series_residual_check(poly, &est, trunc, a.n_from..=a.n_to) {
            Err(growth::GrowthError::IntervalTooWide(_)) if prec < MAX_SERIES_PRECISION => {
                prec *= 2
            }
            other => return Ok(other?),
        }
    }
}

const MAX_SERIES_PRECISION: u32 = 1 << 14;

#[derive(Serialize)]
struct SeriesOut<'a> {
    #[serde(flatten)]
    truncation: &'a growth::SeriesTruncation,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<growth::ResidualReport>,
}

fn series_cmd(a: &SeriesArgs, ctx: &Ctx) -> Result<Report, Error> {
    let poly = &a.poly.poly;
    let trunc = growth::series_coefficients_with(poly, a.k, ctx.precision)?;
    let residuals = match &a.start {
        Some(start) => Some(residuals_adaptive(poly, start, &trunc, a, ctx.precision)?),
        None => None,
    };
    let mut r = Report::new(
        &SeriesOut {
            truncation: &trunc,
            residuals: residuals.clone(),
        },
        vec!["j", "c_j"],
    );
    r.line("poly", poly).line("k", a.k).line("exact", trunc.exact).line(
        "discrepancy_top",
        trunc
            .discrepancy_top
            .map_or("none".to_string(), |e| e.to_string()),
    );
    if let Some(res) = &residuals {
        r.line("exact_zero", res.exact_zero)
            .line("strictly_decreasing", res.strictly_decreasing)
            .line("decay_ok", res.decay_ok)
            .line("fitted_c", res.fitted_c.to_sci(6));
        for row in &res.rows {
            r.line(&format!("residual n={}", row.n), row.residual.hi.to_sci(6));
        }
    }
    for (i, c) in trunc.coeffs.iter().enumerate() {
        r.row(vec![(1 - i as i64).to_string(), coeff_text(c)]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct MillsOut<'a> {
    #[serde(flatten)]
    result: &'a growth::MillsResult,
    decimal: [String; 2],
}

fn mills_cmd(a: &MillsArgs) -> Result<Report, Error> {
    let res = growth::mills_sequence(&a.start, a.count)?;
    let decimal = interval_decimal(&res.tau, a.digits);
    let mut r = Report::new(
        &MillsOut {
            result: &res,
            decimal: decimal.clone(),
        },
        vec!["n", "p_n"],
    );
    r.line("tau_lo", &decimal[0])
        .line("tau_hi", &decimal[1])
        .line("precision_bits", res.precision_bits);
    for (n, p) in res.primes.iter().enumerate() {
        r.row(vec![n.to_string(), p.to_string()]);
    }
    Ok(r)
}

#[derive(Serialize)]
struct SearchOut {
    a_bound: i64,
    x_bound: i64,
    orbits: Vec<coprime::ExceptionalOrbit>,
}

fn search_cmd(a: &SearchArgs) -> Result<Report, Error> {
    let orbits = coprime::search_exceptional_orbits(a.a_bound, a.x_bound);
    let mut r = Report::new(
        &SearchOut {
            a_bound: a.a_bound,
            x_bound: a.x_bound,
            orbits: orbits.clone(),
        },
        vec!["a", "x", "y", "d"],
    );
    r.line("found", orbits.len());
    for o in &orbits {
        r.row(vec![o.a.to_string(), o.x.to_string(), o.y.to_string(), o.d.to_string()]);
    }
    Ok(r)
}

fn verify_cmd(a: &VerifyArgs) -> Result<Report, Error> {
    let rep = verify_classification_exhaustive(a.coeff_bound, a.degree_bound);
    let mut r = Report::new(&rep, vec!["family", "plain", "mirrored"]);
    r.line("enumerated", rep.enumerated)
        .line("wandering", rep.wandering)
        .line("periodic_1", rep.periodic_1)
        .line("periodic_2", rep.periodic_2)
        .line("strictly_preperiodic", rep.strictly_preperiodic())
        .line("violations", rep.violations.len())
        .line("every_family_seen", rep.every_family_seen());
    for (f, c) in &rep.families {
        r.row(vec![f.to_string(), c.plain.to_string(), c.mirrored.to_string()]);
    }
    Ok(r)
}
