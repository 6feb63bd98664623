//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A criterion fails hard when a counterexample or mismatch is found, or a
//! pinned time limit is exceeded; the binary then exits nonzero. It fails
//! soft when the check could not be completed (a window left undecided by
//! the search, an enumeration stopped by its budget); the line still reads
//! FAIL but the run is not aborted. Set `OLCODES_ACCEPTANCE_FULL=1` to lift
//! the enumeration budgets.
//!
//! Run a subset with `cargo test --test acceptance -- 3 5`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use overlap_codes::bounds::{bound_report, upper_bounds};
use overlap_codes::constructions::{
    non_overlapping, overlap_free_1k, Construction, ConstructionError, MaterializeOptions,
};
use overlap_codes::exec::Execution;
use overlap_codes::family::{all_families, count_families, random_family, FamilyEnumerator, PartitionFamily};
use overlap_codes::search::{
    all_maximal_from_construction, binary_edge_check, check_upper_bound, is_maximal, max_code, maximality_certificate,
    BoundCheck, Budget, Certificate, SearchOptions, Strategy,
};
use overlap_codes::sync::{exhaustive_latency, ExhaustiveConfig};
use overlap_codes::tables::{table_row, Table, TableOptions};
use overlap_codes::word::{verify_overlap_free, Alphabet};

const LIMIT_EXACT_SMALL: Duration = Duration::from_secs(5);
const LIMIT_REDUCTION: Duration = Duration::from_secs(60);
const LIMIT_TABLE1: Duration = Duration::from_secs(600);
const LIMIT_TABLE2: Duration = Duration::from_secs(900);
const LIMIT_CONSTRUCTIONS: Duration = Duration::from_secs(600);
/// Clique expansions per window in the sandwich suite.
const SANDWICH_NODES: u64 = 4_000_000;
/// Time for proving a best upper bound on a window the search left open
/// (lifted to an hour by a full run).
const UPPER_CHECK_TIME: Duration = Duration::from_secs(60);
/// Time per `(q, n, k)` for the maximal-code round trip.
const ROUND_TRIP_TIME: Duration = Duration::from_secs(120);
/// Families checked exhaustively up to this count, sampled above it.
const CERTIFICATE_FAMILY_CAP: u64 = 20_000;
const CERTIFICATE_SAMPLE: usize = 3_000;
const DELETION_LIMIT: usize = 8;
const INSERTION_LIMIT: usize = 12;

enum Status {
    Pass,
    /// Check incomplete; no counterexample.
    Soft,
    Hard,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn judge(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { status: if ok { Status::Pass } else { Status::Hard }, detail: detail.into() }
}

fn full_run() -> bool {
    std::env::var("OLCODES_ACCEPTANCE_FULL").is_ok_and(|v| v != "0" && !v.is_empty())
}

fn clique_opts() -> SearchOptions {
    SearchOptions::default().with_strategy(Strategy::Clique)
}

fn exact_size(q: usize, n: usize, t1: usize, t2: usize, opts: &SearchOptions) -> Option<usize> {
    let out = max_code(q, n, t1, t2, opts).ok()?;
    let verified = verify_overlap_free(&out.witness, t1, t2).ok()?.is_ok();
    (out.exact && verified && out.witness.len() == out.size).then_some(out.size)
}

/// Nearest integer to `q/3`; never a tie since `q/3` has denominator 3.
fn round_third(q: usize) -> usize {
    (2 * q + 3) / 6
}

fn c1_exact_pair_window() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for q in [2usize, 3] {
        let start = Instant::now();
        let got = exact_size(q, 4, 1, 2, &clique_opts());
        let elapsed = start.elapsed();
        let r = round_third(q);
        let want = r * (q - r) * (q - r) * q;
        ok &= got == Some(want) && elapsed < LIMIT_EXACT_SMALL;
        notes.push(format!("q={q}: {got:?} vs {want} in {elapsed:.2?}"));
    }
    judge(ok, notes.join(", "))
}

fn c2_length_reduction() -> Outcome {
    let start = Instant::now();
    let long = exact_size(2, 6, 1, 2, &clique_opts());
    let short = exact_size(2, 4, 1, 2, &clique_opts());
    let elapsed = start.elapsed();
    let ok = long == Some(8) && short.map(|s| 4 * s) == long && elapsed < LIMIT_REDUCTION;
    judge(ok, format!("S(2,6)={long:?}, 4*S(2,4)={:?}, {elapsed:.2?}", short.map(|s| 4 * s)))
}

fn table_check(table: Table, rows: &[(usize, usize, u64, bool)], limit: Duration) -> Outcome {
    let start = Instant::now();
    let opts = TableOptions::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for &(n, q, want, bold) in rows {
        match table_row(table, q, n, &opts) {
            Ok(row) => {
                let hit = row.value == Some(BigUint::from(want)) && row.bold == bold && !row.truncated;
                ok &= hit;
                let value = row.value.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
                notes.push(format!("({n},{q})={value}{}", if row.bold { "*" } else { "" }));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("({n},{q}) error: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < limit;
    judge(ok, format!("{} (* bold), {elapsed:.2?}", notes.join(" ")))
}

fn c3_table1() -> Outcome {
    table_check(Table::One, &[(5, 2, 3, true), (6, 2, 5, true), (7, 2, 8, true), (5, 3, 24, false)], LIMIT_TABLE1)
}

fn c4_table2() -> Outcome {
    table_check(Table::Two, &[(6, 2, 6, true), (7, 2, 10, true), (6, 3, 72, false)], LIMIT_TABLE2)
}

/// Best search interval per window: `[found, upper]`, with upper bounds
/// tightened through sub-windows (a code avoiding a window avoids every
/// sub-window, so the maximum is monotone).
fn sandwich_intervals(q: usize, n: usize) -> BTreeMap<(usize, usize), (u64, u64)> {
    let opts = SearchOptions::default().with_nodes(SANDWICH_NODES);
    let mut out: BTreeMap<(usize, usize), (u64, u64)> = BTreeMap::new();
    for width in 0..n - 1 {
        for t1 in 1..n - width {
            let t2 = t1 + width;
            let (found, mut upper) = match max_code(q, n, t1, t2, &opts) {
                Ok(o) if verify_overlap_free(&o.witness, t1, t2).is_ok_and(|v| v.is_ok()) => {
                    (o.size as u64, o.upper_bound)
                }
                _ => (0, u64::MAX),
            };
            if width > 0 {
                upper = upper.min(out[&(t1 + 1, t2)].1).min(out[&(t1, t2 - 1)].1);
            }
            out.insert((t1, t2), (found, upper));
        }
    }
    out
}

fn c5_sandwich() -> Outcome {
    let mut windows = 0;
    let mut certified = 0;
    let mut violations = Vec::new();
    let mut unresolved = Vec::new();
    for q in [2usize, 3] {
        for n in 3..=6 {
            for ((t1, t2), (found, upper)) in sandwich_intervals(q, n) {
                windows += 1;
                let report = match bound_report(q, n, t1, t2, None) {
                    Ok(r) => r,
                    Err(e) => {
                        violations.push(format!("({q},{n},{t1},{t2}) bounds error: {e}"));
                        continue;
                    }
                };
                let lower = report.best_lower;
                let best_upper = report.best_upper;
                let tag = format!("({q},{n},{t1},{t2})");
                if BigUint::from(found) > best_upper {
                    violations.push(format!("{tag}: code of size {found} > upper {best_upper}"));
                } else if BigUint::from(upper) < lower {
                    violations.push(format!("{tag}: maximum <= {upper} < lower {lower}"));
                } else if BigUint::from(found) >= lower && BigUint::from(upper) <= best_upper {
                    certified += 1;
                } else if BigUint::from(found) >= lower {
                    // The search bound is too weak; decide `max <= best_upper` directly.
                    let bound = u64::try_from(&best_upper).expect("desk-scale bound") as usize;
                    let time = if full_run() { Duration::from_secs(3600) } else { UPPER_CHECK_TIME };
                    match check_upper_bound(q, n, t1, t2, bound, &SearchOptions::default().with_time(time)) {
                        Ok(BoundCheck::Holds) => certified += 1,
                        Ok(BoundCheck::Exceeded { witness }) => {
                            let valid = verify_overlap_free(&witness, t1, t2).is_ok_and(|v| v.is_ok());
                            violations.push(format!("{tag}: code of size {} > upper {best_upper} (verified: {valid})", witness.len()));
                        }
                        Ok(BoundCheck::Unknown) | Err(_) => unresolved.push(format!(
                            "{tag}: max in [{found},{upper}], bounds [{lower},{best_upper}]; max <= {best_upper} undecided after {}s",
                            time.as_secs()
                        )),
                    }
                } else {
                    unresolved.push(format!("{tag}: max in [{found},{upper}], bounds [{lower},{best_upper}]"));
                }
            }
        }
    }
    let mut detail = format!("{windows} windows, {certified} certified, {} violations", violations.len());
    for v in violations.iter().chain(&unresolved) {
        detail.push_str("; ");
        detail.push_str(v);
    }
    let status = if !violations.is_empty() {
        Status::Hard
    } else if !unresolved.is_empty() {
        Status::Soft
    } else {
        Status::Pass
    };
    Outcome { status, detail }
}

/// Every construction whose output has length at most `max_len`.
fn constructions_up_to(max_len: usize) -> Vec<Construction> {
    let mut out = Vec::new();
    for n in 2..=max_len {
        out.push(Construction::NonOverlapping { n });
        for k in 1..n {
            out.push(Construction::OneK { n, k });
            if n + k <= max_len {
                out.push(Construction::Wmu { n, k });
            }
            if 2 * k < n {
                out.push(Construction::Simultaneous { n, k });
            }
        }
        for t1 in 1..n {
            for t2 in t1..n {
                out.push(Construction::PadT1T2 { n, t1, t2 });
                out.push(Construction::ExpandedT1T2 { n, t1, t2 });
            }
        }
    }
    out
}

#[derive(Default)]
struct SweepStats {
    families: u64,
    built: u64,
    skipped: u64,
    verify_failures: Vec<String>,
    size_mismatches: Vec<String>,
    errors: Vec<String>,
    formula_checked: BTreeMap<&'static str, u64>,
    /// Built codes whose union terms may repeat words (no size formula).
    overlapping_terms: u64,
    elapsed: Duration,
}

/// Materializes every construction over every family with `q <= 3`,
/// depth <= 4, block length <= 7, in strict mode (a repeated word across
/// union terms is an error).
fn construction_sweep() -> SweepStats {
    let start = Instant::now();
    let mut stats = SweepStats::default();
    let opts = MaterializeOptions { exec: Execution::Sequential, ..MaterializeOptions::strict() };
    let all = constructions_up_to(7);
    for q in [2usize, 3] {
        let alphabet = Alphabet::new(q).expect("alphabet");
        for depth in 1..=4 {
            for f in FamilyEnumerator::new(alphabet, depth) {
                stats.families += 1;
                for c in &all {
                    let code = match c.materialize(&f, &opts) {
                        Ok(code) => code,
                        Err(ConstructionError::Depth { .. } | ConstructionError::Params(_)) => {
                            stats.skipped += 1;
                            continue;
                        }
                        Err(e) => {
                            stats.errors.push(format!("{c} on {f}: {e}"));
                            continue;
                        }
                    };
                    stats.built += 1;
                    for w in c.windows().expect("windows of a built construction") {
                        if !verify_overlap_free(&code, w.t1(), w.t2()).is_ok_and(|v| v.is_ok()) {
                            stats.verify_failures.push(format!("{c} on {f} window {w}"));
                        }
                    }
                    if !c.disjoint_terms() {
                        stats.overlapping_terms += 1;
                        continue;
                    }
                    match c.term_size_sum(&f) {
                        Ok(size) if size == BigUint::from(code.len()) => {
                            let kind = match c {
                                Construction::OneK { .. } => "1k",
                                Construction::Wmu { .. } => "wmu",
                                _ => "other",
                            };
                            *stats.formula_checked.entry(kind).or_default() += 1;
                        }
                        Ok(size) => {
                            stats.size_mismatches.push(format!("{c} on {f}: formula {size}, built {}", code.len()))
                        }
                        Err(e) => stats.errors.push(format!("{c} on {f}: {e}")),
                    }
                }
            }
        }
    }
    stats.elapsed = start.elapsed();
    stats
}

fn first_few(items: &[String]) -> String {
    items.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

fn c6_constructions(s: &SweepStats) -> Outcome {
    let ok = s.verify_failures.is_empty() && s.errors.is_empty() && s.elapsed < LIMIT_CONSTRUCTIONS;
    judge(
        ok,
        format!(
            "{} families, {} codes built, {} skipped, {} window failures, {} errors, {:.2?} {}{}",
            s.families,
            s.built,
            s.skipped,
            s.verify_failures.len(),
            s.errors.len(),
            s.elapsed,
            first_few(&s.verify_failures),
            first_few(&s.errors)
        ),
    )
}

fn c7_size_formulas(s: &SweepStats) -> Outcome {
    let one_k = s.formula_checked.get("1k").copied().unwrap_or(0);
    let wmu = s.formula_checked.get("wmu").copied().unwrap_or(0);
    let ok = s.size_mismatches.is_empty() && one_k > 0 && wmu > 0 && s.errors.is_empty();
    judge(
        ok,
        format!(
            "{one_k} (1,k) and {wmu} WMU sizes match, {} formulas checked, {} codes without a formula, {} mismatches {}",
            s.formula_checked.values().sum::<u64>(),
            s.overlapping_terms,
            s.size_mismatches.len(),
            first_few(&s.size_mismatches)
        ),
    )
}

fn families_for(alphabet: Alphabet, k: usize, rng: &mut ChaCha8Rng) -> (Vec<PartitionFamily>, bool) {
    match all_families(alphabet, k, CERTIFICATE_FAMILY_CAP) {
        Some(all) => (all, false),
        None => ((0..CERTIFICATE_SAMPLE).map(|_| random_family(alphabet, k, rng)).collect(), true),
    }
}

fn c8_maximality() -> Outcome {
    let full = full_run();
    let budget = if full { Budget::unlimited() } else { Budget { nodes: None, time: Some(ROUND_TRIP_TIME) } };
    let mut hard = Vec::new();
    let mut incomplete = Vec::new();
    let mut codes = 0u64;
    let mut agreed = 0u64;
    let mut inconclusive = 0u64;
    let mut edge_checked = 0u64;
    let mut sampled = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for q in [2usize, 3] {
        let alphabet = Alphabet::new(q).expect("alphabet");
        for n in 4..=6usize {
            for k in n.div_ceil(2)..n {
                let tag = format!("({q},{n},{k})");
                match all_maximal_from_construction(q, n, k, &budget, 1 << 20) {
                    Ok(rt) => {
                        codes += rt.maximal_codes;
                        if let Some(c) = rt.counterexample {
                            hard.push(format!(
                                "{tag}: maximal code not rebuilt: {:?}",
                                c.iter().map(|w| w.to_string()).collect::<Vec<_>>()
                            ));
                        } else if !rt.complete {
                            incomplete
                                .push(format!("{tag}: round trip stopped after {} maximal codes", rt.maximal_codes));
                        }
                    }
                    Err(e) => hard.push(format!("{tag}: {e}")),
                }
                let (families, was_sampled) = families_for(alphabet, k, &mut rng);
                if was_sampled {
                    sampled.push(format!("{tag} {} of {}", families.len(), count_families(q, k)));
                }
                for f in &families {
                    let verdict = maximality_certificate(f, n, k);
                    let code = overlap_free_1k(f, n, k);
                    let (Ok(verdict), Ok(code)) = (verdict, code) else {
                        hard.push(format!("{tag}: certificate or construction failed on {f}"));
                        continue;
                    };
                    let Ok(maximal) = is_maximal(&code, 1, k).map(|m| m.is_maximal()) else {
                        hard.push(format!("{tag}: maximality test failed on {f}"));
                        continue;
                    };
                    match verdict {
                        Certificate::CertifiedMaximal | Certificate::ConditionFailure { .. } => {
                            let claimed = matches!(verdict, Certificate::CertifiedMaximal);
                            if claimed == maximal {
                                agreed += 1;
                            } else {
                                hard.push(format!("{tag}: certificate {verdict:?} but maximal={maximal} for {f}"));
                            }
                        }
                        Certificate::Inconclusive => {
                            inconclusive += 1;
                            if q == 2 && maximal {
                                match binary_edge_check(f, n, k) {
                                    Ok(r) if r.all_hold() => edge_checked += 1,
                                    Ok(r) => hard.push(format!("{tag}: edge clauses fail for {f}: {:?}", r.clauses)),
                                    Err(e) => hard.push(format!("{tag}: edge check error for {f}: {e}")),
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut detail = format!(
        "{codes} maximal codes rebuilt, {agreed} certificates agree, {inconclusive} inconclusive ({edge_checked} binary edge cases hold)"
    );
    if !sampled.is_empty() {
        detail.push_str(&format!(", sampled families: {}", sampled.join(", ")));
    }
    for m in hard.iter().take(3).chain(&incomplete) {
        detail.push_str("; ");
        detail.push_str(m);
    }
    let status = if !hard.is_empty() {
        Status::Hard
    } else if !incomplete.is_empty() {
        Status::Soft
    } else {
        Status::Pass
    };
    Outcome { status, detail }
}

fn c9_d1_d2() -> Outcome {
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for q in [2usize, 3] {
        let alphabet = Alphabet::new(q).expect("alphabet");
        for k in 2..=4 {
            for f in FamilyEnumerator::new(alphabet, k) {
                let sizes = (non_overlapping(&f, k + 1), overlap_free_1k(&f, k + 2, k), overlap_free_1k(&f, k + 3, k));
                let (Ok(c), Ok(d1), Ok(d2)) = sizes else {
                    failures.push(format!("q={q} k={k}: construction error on {f}"));
                    continue;
                };
                checked += 1;
                if d1.len() < q * c.len() {
                    failures.push(format!("q={q} k={k}: |D1|={} < q|C|={} for {f}", d1.len(), q * c.len()));
                }
                if d2.len() < q * q * c.len() {
                    failures.push(format!("q={q} k={k}: |D2|={} < q^2|C|={} for {f}", d2.len(), q * q * c.len()));
                }
            }
        }
    }
    judge(failures.is_empty(), format!("{checked} families, {} failures {}", failures.len(), first_few(&failures)))
}

fn c10_sync_latency() -> Outcome {
    let alphabet = Alphabet::new(2).expect("alphabet");
    let pad = Construction::PadT1T2 { n: 4, t1: 2, t2: 3 };
    let opts = MaterializeOptions { exec: Execution::Sequential, ..Default::default() };
    let mut notes = Vec::new();
    let mut ok = true;
    let mut seen = Vec::new();
    for f in FamilyEnumerator::new(alphabet, 2) {
        let Ok(code) = pad.materialize(&f, &opts) else {
            continue;
        };
        if code.is_empty() || seen.contains(&code) {
            continue;
        }
        let report = match exhaustive_latency(&code, 2, 3, &ExhaustiveConfig::default(), Execution::default()) {
            Ok(r) => r,
            Err(e) => {
                ok = false;
                notes.push(format!("error: {e}"));
                continue;
            }
        };
        let words: Vec<String> = code.iter().map(|w| w.to_string()).collect();
        let del = &report.deletion;
        let ins = &report.insertion;
        // an over-limit run is a finding; it fails only if the widened re-run also misses
        let del_ok =
            (del.undetected == 0 && del.max_latency.is_some_and(|m| m <= DELETION_LIMIT)) || del.confirmed_misses == 0;
        let ins_ok =
            (ins.undetected == 0 && ins.max_latency.is_some_and(|m| m <= INSERTION_LIMIT)) || ins.confirmed_misses == 0;
        ok &= del_ok && ins_ok;
        notes.push(format!(
            "{{{}}}: deletion max {:?} over {} runs ({} over {DELETION_LIMIT}, {} confirmed), insertion max {:?} over {} runs ({} over {INSERTION_LIMIT}, {} confirmed)",
            words.join(","),
            del.max_latency,
            del.runs,
            del.over_bound.len(),
            del.confirmed_misses,
            ins.max_latency,
            ins.runs,
            ins.over_bound.len(),
            ins.confirmed_misses
        ));
        seen.push(code);
    }
    ok &= !seen.is_empty();
    judge(ok, notes.join("; "))
}

fn c11_primitive() -> Outcome {
    let primitive =
        upper_bounds(2, 5, 1, 3).ok().and_then(|u| u.into_iter().find(|e| e.rule == "primitive").map(|e| e.value));
    let max = exact_size(2, 5, 1, 3, &clique_opts());
    let ok = primitive == Some(BigUint::from(6u32)) && max.is_some_and(|m| m <= 6);
    judge(ok, format!("primitive rule {primitive:?}, S(2,5,1,3)={max:?}"))
}

fn main() {
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: u32| filter.is_empty() || filter.contains(&id);
    let mut sweep: Option<SweepStats> = None;
    let mut hard = 0;
    let mut soft = 0;
    let criteria: [(u32, &str); 11] = [
        (1, "exact (1,2) values at n=4"),
        (2, "length reduction at n=6"),
        (3, "table 1 rows"),
        (4, "table 2 rows"),
        (5, "bound sandwich"),
        (6, "construction verification"),
        (7, "size formulas"),
        (8, "maximality characterization"),
        (9, "D1/D2 inequalities"),
        (10, "synchronization latency"),
        (11, "primitive bound"),
    ];
    for (id, name) in criteria {
        if !wanted(id) {
            continue;
        }
        let outcome = match id {
            1 => c1_exact_pair_window(),
            2 => c2_length_reduction(),
            3 => c3_table1(),
            4 => c4_table2(),
            5 => c5_sandwich(),
            6 => c6_constructions(sweep.get_or_insert_with(construction_sweep)),
            7 => c7_size_formulas(sweep.get_or_insert_with(construction_sweep)),
            8 => c8_maximality(),
            9 => c9_d1_d2(),
            10 => c10_sync_latency(),
            _ => c11_primitive(),
        };
        let word = match outcome.status {
            Status::Pass => "PASS",
            Status::Soft => {
                soft += 1;
                "FAIL (incomplete)"
            }
            Status::Hard => {
                hard += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2} {word}: {name}: {}", outcome.detail);
    }
    println!("acceptance: {hard} failed, {soft} incomplete");
    if hard > 0 {
        std::process::exit(1);
    }
}
