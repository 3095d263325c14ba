//! JSON and CSV artifacts shared by the command-line tools: contexts,
//! populations, protocols, reach sets, membership decisions, trajectories,
//! and plottable tables.
//!
//! Writers are deterministic. Object keys serialize in sorted order, floats
//! use round-trippable shortest decimals, and exact values serialize as
//! `num/den` strings, so identical inputs produce byte-identical files.
//! Timing never enters an artifact; callers report wall time on stderr.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::context::{GibbsContext, Population};
use crate::error::{Error, Result};
use crate::majorization::ThermoCurve;
use crate::reach::{ReachSet, Reachability};
use crate::scalar::{parse_exact_rational, parse_scalar, ArithmeticMode, Scalar};
use crate::thermalization::{ControlSequence, ElementaryControl, Trajectory};

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| schema(format!("missing field '{key}'")))
}

fn entry_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(schema(format!(
            "expected a number or numeric string, got {other}"
        ))),
    }
}

/// One exact weight from the context schema: a `[num, den]` pair of
/// integer strings, a single `"num/den"` or decimal string, or a number.
/// JSON numbers are read through their decimal text, so `0.5` means
/// exactly one half.
fn exact_weight(label: &str, v: &Value) -> Result<BigRational> {
    let parse = |s: &str| {
        parse_exact_rational(s).map_err(|_| schema(format!("{label}: unparsable entry '{s}'")))
    };
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let n = parse(&entry_string(&pair[0])?)?;
            let d = parse(&entry_string(&pair[1])?)?;
            if d.is_zero() {
                return Err(schema(format!("{label}: zero denominator")));
            }
            Ok(n / d)
        }
        Value::String(s) => parse(s),
        Value::Number(n) => parse(&n.to_string()),
        _ => Err(schema(format!(
            "{label} must be [num, den], a string, or a number"
        ))),
    }
}

fn float_array(v: &Value, label: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(format!("field '{label}' must be an array")))?;
    arr.iter()
        .enumerate()
        .map(|(k, e)| {
            e.as_f64()
                .ok_or_else(|| schema(format!("{label}[{k}] must be a number")))
        })
        .collect()
}

/// Serializes a context: always the stationary weights, plus the energy
/// ladder and inverse temperature when the context still knows them.
pub fn context_to_json(ctx: &GibbsContext) -> Value {
    let gamma: Vec<Value> = ctx
        .gamma()
        .iter()
        .map(|g| match g {
            Scalar::Rational(r) => json!([r.numer().to_string(), r.denom().to_string()]),
            Scalar::Float(x) => json!(x),
        })
        .collect();
    let mut obj = Map::new();
    obj.insert("mode".into(), json!(ctx.mode().to_string()));
    obj.insert("gamma".into(), Value::Array(gamma));
    if let Some(e) = ctx.energies() {
        obj.insert("energies".into(), json!(e));
    }
    if let Some(b) = ctx.beta() {
        obj.insert("beta".into(), json!(b));
    }
    Value::Object(obj)
}

/// Parses a context from `{"mode", "gamma"}` or `{"mode", "energies",
/// "beta"}`. A missing mode falls back to the caller's choice, then to
/// rational.
pub fn context_from_json(v: &Value, fallback_mode: Option<ArithmeticMode>) -> Result<GibbsContext> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema("context must be a JSON object"))?;
    let mode = match obj.get("mode") {
        Some(Value::String(s)) => s.parse()?,
        Some(_) => return Err(schema("field 'mode' must be \"rational\" or \"float\"")),
        None => fallback_mode.unwrap_or(ArithmeticMode::Rational),
    };
    // An energy ladder carries more information than bare weights, so it
    // wins when a file states both.
    if let (Some(e), Some(b)) = (obj.get("energies"), obj.get("beta")) {
        let energies = float_array(e, "energies")?;
        let beta = b
            .as_f64()
            .ok_or_else(|| schema("field 'beta' must be a number"))?;
        GibbsContext::from_energies(&energies, beta, mode)
    } else if let Some(g) = obj.get("gamma") {
        let arr = g
            .as_array()
            .ok_or_else(|| schema("field 'gamma' must be an array"))?;
        let weights: Vec<BigRational> = arr
            .iter()
            .enumerate()
            .map(|(k, e)| exact_weight(&format!("gamma[{k}]"), e))
            .collect::<Result<_>>()?;
        match mode {
            ArithmeticMode::Rational => GibbsContext::from_gamma_exact(weights),
            ArithmeticMode::Float => {
                let floats: Vec<f64> = weights
                    .iter()
                    .map(crate::scalar::rational_to_f64)
                    .collect();
                GibbsContext::from_gamma_f64(&floats, mode)
            }
        }
    } else {
        Err(schema(
            "context needs either 'gamma' or 'energies' plus 'beta'",
        ))
    }
}

pub fn read_context(path: &Path, fallback_mode: Option<ArithmeticMode>) -> Result<GibbsContext> {
    context_from_json(&read_json_file(path)?, fallback_mode)
}

/// A population serializes as an array of entry strings: exact `num/den`
/// in rational mode, shortest round-trippable decimals in float mode.
pub fn population_to_json(p: &Population) -> Value {
    Value::Array(p.iter().map(|s| Value::String(s.to_string())).collect())
}

/// Accepts a bare array of entries or an object with a `population` field.
pub fn population_from_json(ctx: &GibbsContext, v: &Value) -> Result<Population> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(m) => m
            .get("population")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("population file needs a 'population' array"))?,
        _ => return Err(schema("population must be a JSON array of entries")),
    };
    let entries: Vec<String> = arr.iter().map(entry_string).collect::<Result<_>>()?;
    ctx.population_from_strs(&entries)
}

pub fn read_population(path: &Path, ctx: &GibbsContext) -> Result<Population> {
    population_from_json(ctx, &read_json_file(path)?)
}

pub fn write_population(path: &Path, p: &Population) -> Result<()> {
    write_json_file(path, &population_to_json(p))
}

/// Serializes a protocol as `{"steps": [{"i", "j", "lambda", "tau_rel"}]}`
/// with zero-based level indices. The move fraction is an exact string;
/// the dwell time is a plain number, or the string `"inf"` for a full
/// thermalization.
pub fn protocol_to_json(seq: &ControlSequence) -> Value {
    let steps: Vec<Value> = seq
        .iter()
        .map(|step| {
            let (i, j) = step.levels();
            let tau = step.tau_rel();
            let tau_v = if tau.is_finite() {
                json!(tau)
            } else {
                json!("inf")
            };
            json!({
                "i": i,
                "j": j,
                "lambda": step.lambda().to_string(),
                "tau_rel": tau_v,
            })
        })
        .collect();
    json!({ "steps": steps })
}

/// Parses a protocol; dwell times in the file are ignored in favor of the
/// exact move fractions.
pub fn protocol_from_json(v: &Value, mode: ArithmeticMode) -> Result<ControlSequence> {
    let steps = field(v, "steps")?
        .as_array()
        .ok_or_else(|| schema("'steps' must be an array"))?;
    let mut seq = ControlSequence::default();
    for (k, sv) in steps.iter().enumerate() {
        let index = |key: &str| -> Result<usize> {
            field(sv, key)
                .map_err(|_| schema(format!("steps[{k}]: missing '{key}'")))?
                .as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| schema(format!("steps[{k}]: '{key}' must be a level index")))
        };
        let i = index("i")?;
        let j = index("j")?;
        let lam = field(sv, "lambda").map_err(|_| schema(format!("steps[{k}]: missing 'lambda'")))?;
        let lambda = parse_scalar(&entry_string(lam)?, mode)
            .map_err(|e| schema(format!("steps[{k}]: bad lambda: {e}")))?;
        seq.push(ElementaryControl::new(i, j, lambda)?);
    }
    Ok(seq)
}

pub fn write_protocol(path: &Path, seq: &ControlSequence) -> Result<()> {
    write_json_file(path, &protocol_to_json(seq))
}

pub fn read_protocol(path: &Path, mode: ArithmeticMode) -> Result<ControlSequence> {
    protocol_from_json(&read_json_file(path)?, mode)
}

/// Serializes a membership answer; the caller may attach a certificate
/// block (monotone-family checks of the replayed trajectory).
pub fn reachability_to_json(r: &Reachability, certificate: Option<Value>) -> Value {
    let mut obj = Map::new();
    obj.insert("decision".into(), json!(r.decision.to_string()));
    if let Some(p) = &r.protocol {
        obj.insert("protocol".into(), protocol_to_json(p));
    }
    if let Some(a) = &r.achieved {
        obj.insert("achieved".into(), population_to_json(a));
    }
    if let Some(res) = r.residual {
        obj.insert("residual".into(), json!(res));
    }
    if let Some(o) = &r.via_order {
        obj.insert("via_order".into(), json!(o.as_slice()));
    }
    if let Some(c) = certificate {
        obj.insert("certificate".into(), c);
    }
    Value::Object(obj)
}

/// Serializes a closure: the context, the source, every frontier order
/// with its members and their construction paths, and search diagnostics.
pub fn reach_set_to_json(rs: &ReachSet) -> Value {
    let orders: Vec<Value> = rs
        .frontier()
        .map(|(order, members)| {
            let ms: Vec<Value> = members
                .iter()
                .map(|m| {
                    json!({
                        "state": population_to_json(m.state()),
                        "path": protocol_to_json(m.path()),
                    })
                })
                .collect();
            json!({ "order": order.as_slice(), "members": ms })
        })
        .collect();
    let d = rs.diagnostics();
    json!({
        "context": context_to_json(rs.context()),
        "source": population_to_json(rs.source()),
        "orders": orders,
        "order_count": rs.order_count(),
        "member_count": rs.member_count(),
        "depth_bound": rs.options().depth_bound,
        "diagnostics": {
            "expansions": d.expansions,
            "states_enqueued": d.states_enqueued,
            "inserts": d.inserts,
            "discards": d.discards,
            "max_depth": d.max_depth,
            "bound_hit": d.bound_hit,
        },
    })
}

/// Renders a CSV table; every row must match the header width.
pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for (k, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(schema(format!(
                "row {} has {} fields, header has {}",
                k + 1,
                row.len(),
                header.len()
            )));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

pub fn write_csv_file(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    fs::write(path, csv_bytes(header, rows)?)?;
    Ok(())
}

/// Column headers for a trajectory table over `d` levels: `t, p_1..p_d`.
pub fn trajectory_header(d: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("p_{i}")));
    header
}

/// Renders a trajectory as CSV. Cells use the exact scalar text, so a
/// rational-mode table survives a round trip bit for bit.
pub fn trajectory_csv_bytes(traj: &Trajectory) -> Result<Vec<u8>> {
    let d = traj.states().first().map(Vec::len).unwrap_or(0);
    let rows: Vec<Vec<String>> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(t, p)| {
            let mut row = vec![t.to_string()];
            row.extend(p.iter().map(Scalar::to_string));
            row
        })
        .collect();
    csv_bytes(&trajectory_header(d), &rows)
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    fs::write(path, trajectory_csv_bytes(traj)?)?;
    Ok(())
}

/// Parses a trajectory table in the context's arithmetic; malformed rows
/// report their line number.
pub fn parse_trajectory_csv(text: &str, ctx: &GibbsContext) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| schema("empty trajectory table"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") || cols.len() != ctx.dim() + 1 {
        return Err(schema(format!(
            "header must be t,p_1..p_{} (got '{header}')",
            ctx.dim()
        )));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(schema(format!(
                "line {}: {} fields, expected {}",
                lineno + 1,
                cells.len(),
                cols.len()
            )));
        }
        let t = parse_scalar(cells[0], ctx.mode())
            .map_err(|e| schema(format!("line {}: bad time: {e}", lineno + 1)))?;
        let p = ctx
            .population_from_strs(&cells[1..])
            .map_err(|e| schema(format!("line {}: {e}", lineno + 1)))?;
        times.push(t);
        states.push(p);
    }
    Trajectory::from_parts(times, states)
}

pub fn read_trajectory_csv(path: &Path, ctx: &GibbsContext) -> Result<Trajectory> {
    parse_trajectory_csv(&fs::read_to_string(path)?, ctx)
}

/// Renders a comparison curve as an `x,y` table with exact cells.
pub fn curve_csv_bytes(curve: &ThermoCurve) -> Result<Vec<u8>> {
    let header = vec!["x".to_string(), "y".to_string()];
    let rows: Vec<Vec<String>> = curve
        .xs()
        .iter()
        .zip(curve.ys())
        .map(|(x, y)| vec![x.to_string(), y.to_string()])
        .collect();
    csv_bytes(&header, &rows)
}

/// Pretty-printed JSON with a trailing newline; keys come out sorted.
pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("JSON tree is always serializable");
    bytes.push(b'\n');
    bytes
}

pub fn write_json_file(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, json_bytes(v))?;
    Ok(())
}

pub fn read_json_file(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
}

/// Writes to the path when given one, otherwise to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::GibbsContext;
    use crate::reach::{build_reach_set, is_reachable, ReachOptions};

    fn ladder_ctx(mode: ArithmeticMode) -> GibbsContext {
        GibbsContext::from_energies(&[0.0, 1.0, 2.0], std::f64::consts::LN_2, mode).unwrap()
    }

    #[test]
    fn context_round_trip_is_exact() {
        let ctx = ladder_ctx(ArithmeticMode::Rational);
        let v = context_to_json(&ctx);
        let back = context_from_json(&v, None).unwrap();
        assert_eq!(back.gamma(), ctx.gamma());
        assert_eq!(back.mode(), ctx.mode());
        assert_eq!(back.energies(), ctx.energies());

        let ctx = ladder_ctx(ArithmeticMode::Float);
        let v = context_to_json(&ctx);
        let back = context_from_json(&v, None).unwrap();
        assert_eq!(back.gamma(), ctx.gamma());
    }

    #[test]
    fn context_accepts_weights_or_a_ladder() {
        let v = json!({"mode": "rational", "gamma": [["2", "3"], ["1", "3"]]});
        let ctx = context_from_json(&v, None).unwrap();
        assert_eq!(ctx.gamma()[0], Scalar::ratio(2, 3, ArithmeticMode::Rational));

        let v = json!({"gamma": [2, 1]});
        let ctx = context_from_json(&v, None).unwrap();
        assert_eq!(ctx.gamma()[0], Scalar::ratio(2, 3, ArithmeticMode::Rational));

        let v = json!({"mode": "float"});
        let err = context_from_json(&v, None).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn population_strings_survive_round_trip() {
        let ctx = GibbsContext::from_gamma_f64(&[2.0, 1.0], ArithmeticMode::Rational).unwrap();
        let p = ctx.population_from_strs(&["1/3", "2/3"]).unwrap();
        let v = population_to_json(&p);
        assert_eq!(v, json!(["1/3", "2/3"]));
        let back = population_from_json(&ctx, &v).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn protocol_round_trip_is_identity() {
        let mode = ArithmeticMode::Rational;
        let mut seq = ControlSequence::default();
        seq.push(ElementaryControl::new(0, 1, Scalar::ratio(9, 10, mode)).unwrap());
        seq.push(ElementaryControl::full(1, 2, mode).unwrap());
        let v = protocol_to_json(&seq);
        let back = protocol_from_json(&v, mode).unwrap();
        assert_eq!(back, seq);
        // The full move's dwell time is the string sentinel.
        assert_eq!(v["steps"][1]["tau_rel"], json!("inf"));
        assert_eq!(v["steps"][0]["lambda"], json!("9/10"));
    }

    #[test]
    fn float_protocols_round_trip_bit_for_bit() {
        let mode = ArithmeticMode::Float;
        let mut seq = ControlSequence::default();
        let lambda = Scalar::Float(0.1 + 0.2);
        seq.push(ElementaryControl::new(0, 1, lambda).unwrap());
        let back = protocol_from_json(&protocol_to_json(&seq), mode).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn identical_inputs_produce_identical_bytes() {
        let ctx = ladder_ctx(ArithmeticMode::Rational);
        let source = ctx
            .population_from_strs(&["4/7", "2/7", "1/7"])
            .unwrap();
        let rs = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        let a = json_bytes(&reach_set_to_json(&rs));
        let rs2 = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        let b = json_bytes(&reach_set_to_json(&rs2));
        assert_eq!(a, b);

        let target = ctx.thermal_population();
        let r1 = is_reachable(&rs, &target).unwrap();
        let r2 = is_reachable(&rs2, &target).unwrap();
        assert_eq!(
            json_bytes(&reachability_to_json(&r1, None)),
            json_bytes(&reachability_to_json(&r2, None))
        );
    }

    #[test]
    fn trajectory_table_round_trips_exactly() {
        let ctx = ladder_ctx(ArithmeticMode::Rational);
        let p0 = ctx.population_from_strs(&["4/7", "2/7", "1/7"]).unwrap();
        let mut seq = ControlSequence::default();
        seq.push(ElementaryControl::new(0, 1, Scalar::ratio(1, 3, ctx.mode())).unwrap());
        seq.push(ElementaryControl::full(0, 2, ctx.mode()).unwrap());
        let traj = Trajectory::sample(&ctx, &p0, &seq, 3).unwrap();
        let bytes = trajectory_csv_bytes(&traj).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("t,p_1,p_2,p_3\n"));
        let back = parse_trajectory_csv(&text, &ctx).unwrap();
        assert_eq!(back.states(), traj.states());
        assert_eq!(back.times(), traj.times());
        assert_eq!(trajectory_csv_bytes(&back).unwrap(), bytes);
    }

    #[test]
    fn malformed_tables_report_the_line() {
        let ctx = ladder_ctx(ArithmeticMode::Rational);
        let text = "t,p_1,p_2,p_3\n0,4/7,2/7,1/7\n1,4/7,2/7\n";
        let err = parse_trajectory_csv(text, &ctx).unwrap_err();
        match err {
            Error::Schema(msg) => assert!(msg.contains("line 3"), "got: {msg}"),
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn curve_table_has_exact_cells() {
        let ctx = ladder_ctx(ArithmeticMode::Rational);
        let p = ctx.population_from_strs(&["4/7", "2/7", "1/7"]).unwrap();
        let order = crate::majorization::canonical_beta_order(&ctx, &p).unwrap();
        let curve = ThermoCurve::from_order(&ctx, &p, &order).unwrap();
        let text = String::from_utf8(curve_csv_bytes(&curve).unwrap()).unwrap();
        assert!(text.starts_with("x,y\n0,0\n"));
        assert!(text.trim_end().ends_with("1,1"));
    }
}
