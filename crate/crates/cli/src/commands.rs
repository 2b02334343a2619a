//! Dispatch from parsed arguments to the library, producing report bodies.

use std::path::Path;

use idealforge::adversary::{
    check_hnr_conditions, check_rnh_conditions, defeat_h_summable, defeat_r_hindman, defeat_r_summable,
    defeat_w_summable, replay_final_contradiction, Point, RnhBundle, SearchBudget, Strategy, Transcript, Witness,
};
use idealforge::canonical::{
    classify_fs_on, classify_pairs_on, find_block_basis, find_canonical_subset, BlockBasis, CanonicalCase,
    NatColoring, PairColoring,
};
use idealforge::ideal::{find_ap, find_clique, heavy_columns, is_positive, longest_ap, reciprocal_sum, tall_witness};
use idealforge::rational::to_text;
use idealforge::search::{
    search_reduction, verify_reduction, FiniteIdealSpec, Ground, ReductionCandidate, SearchLimits, SearchOutcome,
};
use idealforge::sparse::{self, SparseBasis};
use idealforge::{Carrier, EdgeSet, Error, GridSet, IdealId, NatSet, Report, ScaleParams};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::coloring::{load_coloring, parse_gamma_table, Coloring, Domain, Kind};
use crate::error::CliError;
use crate::literal::{parse_edge_literal, parse_grid_literal, parse_ratio, parse_set_literal, parse_u64, ParseError};
use crate::{CanonOp, Command, FsOp, GlobalOpts, Outcome, StrategyArg, VerifyKind};

type Res<T> = Result<T, CliError>;

fn ok(body: Value) -> Res<Outcome> {
    Ok(Outcome { body, exhausted: false })
}

fn need<'a, T>(value: &'a Option<T>, flag: &str) -> Res<&'a T> {
    value.as_ref().ok_or_else(|| CliError::Usage(format!("--{flag} is required here")))
}

fn params(o: &GlobalOpts) -> Res<ScaleParams> {
    let d = ScaleParams::default();
    let p = ScaleParams {
        ap_len: o.ap_len.unwrap_or(d.ap_len),
        clique_size: o.clique_size.unwrap_or(d.clique_size),
        fs_size: o.fs_size.unwrap_or(d.fs_size),
        tau: match &o.tau {
            Some(t) => parse_ratio(t)?,
            None => d.tau,
        },
        window: o.window.unwrap_or(d.window),
    };
    p.validate()?;
    Ok(p)
}

fn budget(o: &GlobalOpts) -> Res<SearchBudget> {
    let d = SearchBudget::default();
    Ok(SearchBudget::new(
        o.budget_max_element.unwrap_or(d.max_element),
        o.nmax.unwrap_or(d.n_max),
        o.candidate_cap.unwrap_or(d.candidate_cap),
    )?)
}

fn domain(o: &GlobalOpts, fallback: u64) -> Domain {
    Domain { window: o.window, fallback, seed: o.seed }
}

fn nat_coloring(spec: &str, dom: Domain) -> Res<NatColoring> {
    match load_coloring(spec, Kind::Nat, dom)? {
        Coloring::Nat(c) => Ok(c),
        Coloring::Pair(_) => unreachable!("loader honours the requested kind"),
    }
}

fn pair_coloring(spec: &str, dom: Domain) -> Res<PairColoring> {
    match load_coloring(spec, Kind::Pair, dom)? {
        Coloring::Pair(c) => Ok(c),
        Coloring::Nat(_) => unreachable!("loader honours the requested kind"),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Res<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(e.to_string()))
}

pub fn run(o: &GlobalOpts, cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::Oracle { ideal, set, edges, vertices, grid, tall } => {
            oracle(o, ideal, set.as_deref(), edges.as_deref(), *vertices, grid.as_deref(), *tall)
        }
        Command::Fs { op, set, pool, x, y, k } => fs(*op, set, pool, *x, *y, *k),
        Command::Canonize { op, phi, set, basis, m } => canonize(o, *op, phi, set, basis, *m),
        Command::Adversary { strategy, phi, case, set, basis, replay } => {
            adversary(o, *strategy, phi, case.as_deref(), set, basis, replay.as_deref())
        }
        Command::Search { src_ideal, src_ground, dst_ideal, dst_ground, node_limit } => {
            search(o, src_ideal, src_ground, dst_ideal, dst_ground, *node_limit)
        }
        Command::Verify { kind, input, phi, gamma, basis, set } => verify(o, *kind, input, phi, gamma, basis, set),
    }
}

fn oracle(
    o: &GlobalOpts,
    ideal: &str,
    set: Option<&str>,
    edges: Option<&str>,
    vertices: Option<u64>,
    grid: Option<&str>,
    tall: Option<usize>,
) -> Res<Outcome> {
    let id: IdealId = ideal.parse()?;
    let mut p = params(o)?;
    let mut body = json!({ "status": "ok", "ideal": id, "params": to_json(&p) });
    let nat;
    let graph;
    let cells;
    let carrier = match id {
        IdealId::Ramsey => {
            let list = parse_edge_literal(need(&edges, "edges")?)?;
            let n = vertices.unwrap_or_else(|| list.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
            graph = EdgeSet::from_edges(n, list)?;
            body["clique"] = to_json(&find_clique(&graph, p.clique_size));
            Carrier::Edges(&graph)
        }
        IdealId::Fin2 => {
            cells = parse_grid_literal(need(&grid, "grid")?)?.into_iter().collect::<GridSet>();
            body["heavy_columns"] = to_json(&heavy_columns(&cells, p.fs_size));
            Carrier::Grid(&cells)
        }
        _ => {
            nat = parse_set_literal(need(&set, "set")?)?;
            match id {
                IdealId::Vdw => {
                    body["longest_ap"] = json!(longest_ap(&nat));
                    body["ap"] = to_json(&find_ap(&nat, p.ap_len).map(|(a, d)| json!({ "start": a, "step": d })));
                }
                IdealId::Summable => body["reciprocal_sum"] = json!(to_text(&reciprocal_sum(&nat))),
                IdealId::Hindman => body["fs_basis"] = to_json(&sparse::find_fs_subset(&nat, p.fs_size)),
                _ => body["size"] = json!(nat.len()),
            }
            Carrier::Nat(&nat)
        }
    };
    if o.window.is_none() {
        // without an explicit window the proxy is evaluated on one that covers the input
        let top = match carrier {
            Carrier::Nat(s) => s.last(),
            Carrier::Edges(g) => g.ground().checked_sub(1),
            Carrier::Grid(g) => g.iter().map(|(c, i)| c.max(i)).max(),
        };
        p.window = p.window.max(top.map_or(0, |t| t + 1));
        body["params"] = to_json(&p);
    }
    body["positive"] = json!(is_positive(carrier, id, &p)?);
    if let Some(t) = tall {
        body["tall_witness"] = to_json(&tall_witness(carrier, id, &p, t)?);
    }
    ok(body)
}

fn fs(
    op: FsOp,
    set: &Option<String>,
    pool: &Option<String>,
    x: Option<u64>,
    y: Option<u64>,
    k: Option<usize>,
) -> Res<Outcome> {
    let set = || -> Res<NatSet> { Ok(parse_set_literal(need(set, "set")?)?) };
    let basis = || -> Res<SparseBasis> { Ok(SparseBasis::new(&set()?)?) };
    let body = match op {
        FsOp::Fs => json!({ "fs": to_json(&sparse::fs(&set()?)?) }),
        FsOp::IsSparse => json!({ "sparse": sparse::is_sparse(&set()?)? }),
        FsOp::Alpha => {
            let x = *need(&x, "x")?;
            json!({ "x": x, "alpha": to_json(&sparse::alpha(&basis()?, x)?) })
        }
        FsOp::VerySparse => json!({ "very_sparse": to_json(&sparse::is_very_sparse(&set()?)?) }),
        FsOp::VerySparseSubset => {
            let pool = parse_set_literal(need(pool, "pool")?)?;
            json!({ "subset": to_json(&sparse::very_sparse_subset(&pool, *need(&k, "k")?)?.to_natset()) })
        }
        FsOp::FindFsSubset => json!({ "basis": to_json(&sparse::find_fs_subset(&set()?, *need(&k, "k")?)) }),
        FsOp::ConflictSet => {
            let y = *need(&y, "y")?;
            json!({ "y": y, "conflicts": to_json(&sparse::conflict_set(&basis()?, y)?) })
        }
    };
    let mut body = body;
    body["status"] = json!("ok");
    ok(body)
}

fn canonize(
    o: &GlobalOpts,
    op: CanonOp,
    phi: &str,
    set: &Option<String>,
    basis: &Option<String>,
    m: Option<usize>,
) -> Res<Outcome> {
    let p = params(o)?;
    let dom = domain(o, p.window);
    let block = |b: &Option<String>| -> Res<BlockBasis> {
        Ok(BlockBasis::new(parse_set_literal(need(b, "basis")?)?.into_vec())?)
    };
    let body = match op {
        CanonOp::ClassifyPairs => {
            let phi = pair_coloring(phi, dom)?;
            let t = parse_set_literal(need(set, "set")?)?;
            json!({ "set": to_json(&t), "case": to_json(&classify_pairs_on(&phi, &t)?) })
        }
        CanonOp::FindSubset => {
            let phi = pair_coloring(phi, dom)?;
            let found = find_canonical_subset(&phi, *need(&m, "m")?);
            json!({ "found": to_json(&found.map(|(t, c)| json!({ "set": to_json(&t), "case": c }))) })
        }
        CanonOp::ClassifyFs => {
            let phi = nat_coloring(phi, dom)?;
            let c = block(basis)?;
            json!({ "basis": to_json(&c), "case": to_json(&classify_fs_on(&phi, &c)?) })
        }
        CanonOp::FindBlockBasis => {
            let phi = nat_coloring(phi, dom)?;
            let found = find_block_basis(&phi, &block(basis)?, *need(&m, "m")?);
            json!({ "found": to_json(&found.map(|(c, case)| json!({ "basis": to_json(&c), "case": case }))) })
        }
    };
    let mut body = body;
    body["status"] = json!("ok");
    ok(body)
}

fn nat_eval(phi: &NatColoring) -> impl Fn(Point) -> idealforge::Result<u64> + '_ {
    move |pt| match pt {
        Point::Nat(x) => phi.eval(x),
        Point::Pair(a, b) => Err(Error::InvalidParams(format!("pair point {{{a}, {b}}} for a coloring of naturals"))),
    }
}

fn pair_eval(phi: &PairColoring) -> impl Fn(Point) -> idealforge::Result<u64> + '_ {
    move |pt| match pt {
        Point::Pair(a, b) => phi.eval(a, b),
        Point::Nat(x) => Err(Error::InvalidParams(format!("point {x} for a coloring of pairs"))),
    }
}

fn resolve_case(given: Option<&str>, classify: impl FnOnce() -> Res<Option<CanonicalCase>>) -> Res<CanonicalCase> {
    match given {
        Some(c) => Ok(c.parse()?),
        None => classify()?.ok_or_else(|| {
            CliError::Core(Error::CaseMismatch { expected: "some canonical case".into(), found: "none".into() })
        }),
    }
}

fn transcript_body(tr: &Transcript, checks: Vec<Report>) -> Value {
    let passed = checks.iter().all(Report::passed);
    json!({ "status": "ok", "transcript": to_json(tr), "checks": to_json(&checks), "passed": passed })
}

fn adversary(
    o: &GlobalOpts,
    strategy: StrategyArg,
    phi: &str,
    case: Option<&str>,
    set: &Option<String>,
    basis: &Option<String>,
    replay: Option<&str>,
) -> Res<Outcome> {
    let p = params(o)?;
    let b = budget(o)?;
    let dom = domain(o, b.max_element);
    match strategy {
        StrategyArg::WSummable => {
            let phi = nat_coloring(phi, dom)?;
            let tr = defeat_w_summable(&phi, &b)?;
            let check = tr.reverify(&nat_eval(&phi));
            ok(transcript_body(&tr, vec![check]))
        }
        StrategyArg::HSummable => {
            let phi = nat_coloring(phi, dom)?;
            let c = BlockBasis::new(parse_set_literal(need(basis, "basis")?)?.into_vec())?;
            let case = resolve_case(case, || Ok(classify_fs_on(&phi, &c)?))?;
            let tr = defeat_h_summable(&phi, &c, case, &b)?;
            let check = tr.reverify(&nat_eval(&phi));
            ok(transcript_body(&tr, vec![check]))
        }
        StrategyArg::RSummable => {
            let phi = pair_coloring(phi, dom)?;
            let t = parse_set_literal(need(set, "set")?)?;
            let case = resolve_case(case, || Ok(classify_pairs_on(&phi, &t)?))?;
            let tr = defeat_r_summable(&phi, &t, case, &b)?;
            let check = tr.reverify(&pair_eval(&phi));
            ok(transcript_body(&tr, vec![check]))
        }
        StrategyArg::RHindman => {
            let phi = pair_coloring(phi, dom)?;
            let d = SparseBasis::new(&parse_set_literal(need(basis, "basis")?)?)?;
            let tr = defeat_r_hindman(&phi, &d, p.fs_size, &b)?;
            let mut checks = vec![tr.reverify(&pair_eval(&phi))];
            if let Witness::Nested { b: bs, sets } = &tr.witness {
                checks.push(check_hnr_conditions(bs, sets, &phi, &d, p.fs_size));
            }
            if let Some(c) = replay {
                let c = parse_set_literal(c)?;
                checks.push(replay_final_contradiction(&tr, &phi, &d, &c)?);
            }
            ok(transcript_body(&tr, checks))
        }
    }
}

fn parse_ground(text: &str) -> Res<Ground> {
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| ParseError::at(0, format!("expected 'kind:argument', found '{text}'")))?;
    let off = kind.len() + 1;
    Ok(match kind {
        "segment" => {
            let (a, b) = arg
                .split_once("..")
                .ok_or_else(|| ParseError::at(off, "expected an inclusive range 'a..b'"))?;
            let lo = parse_u64(a, off)?;
            let hi = parse_u64(b, off + a.len() + 2)?;
            if lo > hi {
                return Err(ParseError::at(off, format!("empty range {lo}..{hi}")).into());
            }
            Ground::Segment { start: lo, end: hi + 1 }
        }
        "pairs" => Ground::PairGrid { n: parse_u64(arg, off)? },
        "grid" => {
            let (c, r) = arg
                .split_once('x')
                .ok_or_else(|| ParseError::at(off, "expected 'COLUMNSxROWS'"))?;
            Ground::Grid { columns: parse_u64(c, off)?, rows: parse_u64(r, off + c.len() + 1)? }
        }
        "fs" => Ground::FsFragment { basis: parse_set_literal(arg)?.into_vec() },
        _ => return Err(ParseError::at(0, format!("unknown ground kind '{kind}'")).into()),
    })
}

fn search(
    o: &GlobalOpts,
    src_ideal: &str,
    src_ground: &str,
    dst_ideal: &str,
    dst_ground: &str,
    node_limit: Option<u64>,
) -> Res<Outcome> {
    let p = params(o)?;
    let src = FiniteIdealSpec::new(src_ideal.parse()?, p.clone(), parse_ground(src_ground)?)?;
    let dst = FiniteIdealSpec::new(dst_ideal.parse()?, p, parse_ground(dst_ground)?)?;
    let limits = SearchLimits { node_limit: node_limit.unwrap_or(SearchLimits::default().node_limit) };
    let outcome = search_reduction(&src, &dst, &limits)?;
    let mut body = json!({
        "src": to_json(&src),
        "dst": to_json(&dst),
        "outcome": to_json(&outcome),
        "caveat": idealforge::search::CAVEAT,
    });
    let exhausted = match &outcome {
        SearchOutcome::Found { map } => {
            let pairs = map.pairs(&src.elements()?, &dst.elements()?);
            body["pairs"] = to_json(&pairs);
            body["verification"] = to_json(&verify_reduction(map, &src, &dst)?);
            false
        }
        SearchOutcome::Exhausted { .. } | SearchOutcome::BudgetExceeded { .. } => true,
    };
    body["status"] = json!(if exhausted { "exhausted" } else { "ok" });
    Ok(Outcome { body, exhausted })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReductionInput {
    src: FiniteIdealSpec,
    dst: FiniteIdealSpec,
    map: Vec<usize>,
}

/// Accepts a full report (`{header, body}`), a report body, or a bare transcript.
fn load_transcript(path: &Path) -> Res<Transcript> {
    let v: Value = read_json(path)?;
    let inner = v.get("body").unwrap_or(&v);
    let tr = inner.get("transcript").unwrap_or(inner);
    serde_json::from_value(tr.clone()).map_err(|e| CliError::Json(e.to_string()))
}

fn verify(
    o: &GlobalOpts,
    kind: VerifyKind,
    input: &Path,
    phi: &Option<String>,
    gamma: &Option<String>,
    basis: &Option<String>,
    set: &Option<String>,
) -> Res<Outcome> {
    let p = params(o)?;
    let b = budget(o)?;
    let dom = domain(o, b.max_element);
    let sparse_basis = || -> Res<SparseBasis> { Ok(SparseBasis::new(&parse_set_literal(need(basis, "basis")?)?)?) };
    let report = match kind {
        VerifyKind::Reduction => {
            let r: ReductionInput = read_json(input)?;
            let src = FiniteIdealSpec::new(r.src.id, r.src.params, r.src.ground)?;
            let dst = FiniteIdealSpec::new(r.dst.id, r.dst.params, r.dst.ground)?;
            verify_reduction(&ReductionCandidate { map: r.map }, &src, &dst)?
        }
        VerifyKind::Transcript => {
            let tr = load_transcript(input)?;
            let phi = need(phi, "phi")?;
            match tr.strategy {
                Strategy::WSummable | Strategy::HSummable => tr.reverify(&nat_eval(&nat_coloring(phi, dom)?)),
                Strategy::RSummable | Strategy::RHindman => tr.reverify(&pair_eval(&pair_coloring(phi, dom)?)),
            }
        }
        VerifyKind::Hnr => {
            let tr = load_transcript(input)?;
            let Witness::Nested { b: bs, sets } = &tr.witness else {
                return Err(CliError::Usage("hnr checks need an r-hindman transcript".into()));
            };
            let phi = pair_coloring(need(phi, "phi")?, dom)?;
            check_hnr_conditions(bs, sets, &phi, &sparse_basis()?, p.fs_size)
        }
        VerifyKind::Replay => {
            let tr = load_transcript(input)?;
            let phi = pair_coloring(need(phi, "phi")?, dom)?;
            let c = parse_set_literal(need(set, "set")?)?;
            replay_final_contradiction(&tr, &phi, &sparse_basis()?, &c)?
        }
        VerifyKind::Rnh => {
            let bundle: RnhBundle = read_json(input)?;
            let path = need(gamma, "gamma")?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io { path: path.clone(), message: e.to_string() })?;
            check_rnh_conditions(&bundle, &parse_gamma_table(&text)?, &sparse_basis()?)?
        }
    };
    ok(json!({ "status": "ok", "passed": report.passed(), "report": to_json(&report) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grounds() {
        assert_eq!(parse_ground("segment:0..4").unwrap(), Ground::Segment { start: 0, end: 5 });
        assert_eq!(parse_ground("pairs:4").unwrap(), Ground::PairGrid { n: 4 });
        assert_eq!(parse_ground("grid:3x4").unwrap(), Ground::Grid { columns: 3, rows: 4 });
        assert_eq!(parse_ground("fs:1,4").unwrap(), Ground::FsFragment { basis: vec![1, 4] });
        assert!(parse_ground("segment:4..1").is_err());
        assert!(parse_ground("ball:3").is_err());
    }
}
