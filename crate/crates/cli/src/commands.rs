use std::process::ExitCode;
use std::time::Duration;

use serde_json::{json, Value};
use viswalk::constants::{
    b_poly, c_value, level_constant, run_exact_limit, visibility_change_limit, MAX_K,
};
use viswalk::numtheory::ExactRational;
use viswalk::rational_walks::{limit_density, parse_periodic_binary, verify_empirically};
use viswalk::simulator::{
    empirical_report, simulate, ExpectedConstants, WalkConfig, MAX_STEPS, RNG_ALGORITHM,
};
use viswalk::verification::{run_suite_with, Outcome, Suite};

use crate::output::{decimal, interval_json, rational_json, Envelope};
use crate::{Command, OutputArgs};

/// Largest level accepted by `--level`; the exact constant's denominator grows
/// like the square of the primorial.
pub const MAX_LEVEL: u64 = 100_000;

pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl From<viswalk::Error> for Failure {
    fn from(e: viswalk::Error) -> Self {
        // every library error stems from the arguments the user supplied
        Failure {
            status: 2,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            status: 1,
            message: format!("writing output: {e}"),
        }
    }
}

pub fn parse_k(s: &str) -> Result<u32, String> {
    let k: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if k == 0 || k > MAX_K {
        return Err(format!("k must be in 1..={MAX_K}"));
    }
    Ok(k)
}

pub fn parse_kmax(s: &str) -> Result<usize, String> {
    parse_k(s).map(|k| k as usize)
}

pub fn parse_level(s: &str) -> Result<u64, String> {
    let m: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(2..=MAX_LEVEL).contains(&m) {
        return Err(format!("level must be in 2..={MAX_LEVEL}"));
    }
    Ok(m)
}

pub fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Constants {
            k,
            alpha,
            tolerance,
            level,
            runs_exact,
            changes,
            out,
        } => constants(k, alpha, tolerance, level, runs_exact, changes, out),
        Command::Simulate {
            alpha,
            steps,
            kmax,
            seed,
            streams,
            level,
            flag_multiple,
            out,
        } => {
            let mut config = WalkConfig::new(alpha, steps, kmax, seed);
            config.streams = streams;
            config.level = level;
            simulate_cmd(config, flag_multiple, out)
        }
        Command::Rational {
            x,
            check_steps,
            out,
        } => rational(&x, check_steps, out),
        Command::Verify { suite, budget, out } => verify(&suite, budget, out),
    }
}

fn finish(env: Envelope, out: OutputArgs) -> Result<ExitCode, Failure> {
    env.emit(out.format, out.output)?;
    Ok(ExitCode::SUCCESS)
}

fn constants(
    k_top: u32,
    alpha: ExactRational,
    tolerance: f64,
    level: Option<u64>,
    runs_exact: bool,
    changes: bool,
    out: OutputArgs,
) -> Result<ExitCode, Failure> {
    let mut env = Envelope::new("constants");
    env.param("k", k_top);
    env.param("alpha", &alpha);
    env.param("tolerance", decimal(tolerance));
    if let Some(m) = level {
        env.param("level", m);
    }
    env.param("runs_exact", runs_exact);
    env.param("changes", changes);

    let mut header = vec!["k", "b_poly", "b_value", "c_value", "c_half_width"];
    if level.is_some() {
        header.push("level_value");
    }
    if runs_exact {
        header.extend(["runs_exact_value", "runs_exact_half_width"]);
    }
    env.table
        .push(header.into_iter().map(String::from).collect());

    let mut rows = Vec::new();
    for k in 1..=k_top {
        let report = c_value(k, &alpha, tolerance)?;
        let poly = b_poly(k)?;
        let mut row = json!({
            "k": k,
            "b_poly": poly.to_string(),
            "b_coefficients": poly.coefficients().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "b_value": report.b_value.to_string(),
            "c": interval_json(&report.c_interval),
            "euler_product": interval_json(&report.euler_interval),
            "prime_cutoff": report.prime_cutoff_used,
        });
        let mut csv = vec![
            k.to_string(),
            poly.to_string(),
            report.b_value.to_string(),
            decimal(report.c_interval.midpoint()),
            decimal(report.c_interval.half_width()),
        ];
        if let Some(m) = level {
            let exact = level_constant(k, m, &alpha)?;
            csv.push(exact.to_string());
            row["level"] = rational_json(&exact);
        }
        if runs_exact {
            if k + 2 <= MAX_K {
                let i = run_exact_limit(k, &alpha, tolerance)?;
                csv.extend([decimal(i.midpoint()), decimal(i.half_width())]);
                row["runs_exact"] = interval_json(&i);
            } else {
                csv.extend([String::new(), String::new()]);
                row["runs_exact"] = Value::Null;
            }
        }
        env.table.push(csv);
        rows.push(row);
    }
    let mut results = json!({ "alpha": alpha.to_string(), "rows": rows });
    if changes {
        let i = visibility_change_limit(&alpha, tolerance)?;
        results["changes"] = interval_json(&i);
        env.table[0].extend([
            "changes_value".to_string(),
            "changes_half_width".to_string(),
        ]);
        for row in env.table.iter_mut().skip(1) {
            row.extend([decimal(i.midpoint()), decimal(i.half_width())]);
        }
    }
    env.results = results;
    finish(env, out)
}

fn exact_share(count: u64, n: u64) -> Value {
    match ExactRational::new(count, n) {
        Ok(r) => rational_json(&r),
        Err(_) => Value::Null,
    }
}

fn simulate_cmd(
    config: WalkConfig,
    flag_multiple: f64,
    out: OutputArgs,
) -> Result<ExitCode, Failure> {
    config.validate()?;
    let mut env = Envelope::new("simulate");
    env.param("alpha", &config.alpha);
    env.param("steps", config.steps);
    env.param("kmax", config.k_max);
    env.param("seed", config.seed);
    env.param("streams", config.streams);
    if let Some(m) = config.level {
        env.param("level", m);
    }
    env.param("flag_multiple", decimal(flag_multiple));
    env.seed = Some(config.seed);
    env.extra_metadata
        .insert("rng".into(), json!(RNG_ALGORITHM));

    let stats = simulate(&config)?;
    let expected = ExpectedConstants::compute(&config.alpha, config.k_max, config.level, 1e-9)?;
    let report = empirical_report(&stats, &expected, flag_multiple);
    let n = stats.steps_counted;

    env.table.push(
        [
            "quantity",
            "k",
            "count",
            "proportion",
            "expected",
            "expected_half_width",
            "deviation",
            "threshold",
            "flagged",
        ]
        .map(String::from)
        .to_vec(),
    );
    let rows: Vec<Value> = report
        .iter()
        .map(|r| {
            env.table.push(vec![
                r.quantity.name().to_string(),
                r.k.to_string(),
                r.count.to_string(),
                decimal(r.proportion),
                decimal(r.expected.midpoint()),
                decimal(r.expected.half_width()),
                decimal(r.deviation),
                decimal(r.threshold),
                r.flagged.to_string(),
            ]);
            json!({
                "quantity": r.quantity.name(),
                "k": r.k,
                "count": r.count,
                "proportion": exact_share(r.count, n),
                "expected": interval_json(&r.expected),
                "deviation": decimal(r.deviation),
                "threshold": decimal(r.threshold),
                "flagged": r.flagged,
            })
        })
        .collect();
    env.results = json!({
        "steps": n,
        "counts": {
            "consecutive_visible": stats.consecutive_visible,
            "exact_runs": stats.exact_run_counts,
            "long_run_visible": stats.long_run_visible,
            "changes": stats.change_count,
            "level_consecutive": stats.level_consecutive,
        },
        "report": rows,
    });
    finish(env, out)
}

fn rational(x: &str, check_steps: Option<u64>, out: OutputArgs) -> Result<ExitCode, Failure> {
    let pb = parse_periodic_binary(x)?;
    let mut env = Envelope::new("rational");
    env.param("x", &pb);
    if let Some(n) = check_steps {
        if n > MAX_STEPS {
            return Err(Failure {
                status: 2,
                message: format!("--check-steps {n} exceeds the cap of {MAX_STEPS}"),
            });
        }
        env.param("check_steps", n);
    }
    let report = limit_density(&pb)?;
    env.table.push(
        ["i", "r_i", "t_i", "m_i", "delta_i", "limit"]
            .map(String::from)
            .to_vec(),
    );
    let columns: Vec<Value> = (0..pb.period_len())
        .map(|i| {
            let (r, t) = report.column_offsets[i];
            env.table.push(vec![
                (i + 1).to_string(),
                r.to_string(),
                t.to_string(),
                report.m_values[i].to_string(),
                report.deltas[i].to_string(),
                report.limit.to_string(),
            ]);
            json!({
                "i": i + 1,
                "offset": [r, t],
                "m": report.m_values[i].to_string(),
                "delta": report.deltas[i].to_string(),
            })
        })
        .collect();
    let mut results = json!({
        "expansion": pb.to_string(),
        "start": [report.x0y0.x, report.x0y0.y],
        "period_vector": [report.period_vector.0, report.period_vector.1],
        "columns": columns,
        "limit": rational_json(&report.limit),
    });
    if let Some(n) = check_steps {
        let c = verify_empirically(&pb, n)?;
        results["check"] = json!({
            "steps": c.steps,
            "visible": c.visible,
            "empirical": rational_json(&c.empirical),
            "deviation": decimal(c.deviation),
            "bound": rational_json(&c.bound),
            "within_bound": c.within_bound,
        });
    }
    env.results = results;
    finish(env, out)
}

fn outcome_json(o: &Outcome) -> Value {
    json!({
        "id": o.id,
        "title": o.title,
        "suite": o.suite.name(),
        "status": if o.passed { "PASS" } else if o.skipped { "SKIPPED" } else { "FAIL" },
        "elapsed_seconds": format!("{:.3}", o.elapsed.as_secs_f64()),
        "error": o.error,
        "measurements": o.measurements.iter().map(|m| json!({
            "name": m.name,
            "value": m.value,
            "requirement": m.requirement,
            "ok": m.ok,
        })).collect::<Vec<_>>(),
    })
}

fn verify(suite: &str, budget: Option<f64>, out: OutputArgs) -> Result<ExitCode, Failure> {
    let suite: Suite = suite.parse()?;
    let budget = budget
        .map(|b| {
            Duration::try_from_secs_f64(b).map_err(|_| Failure {
                status: 2,
                message: format!("--budget {b} is not a valid number of seconds"),
            })
        })
        .transpose()?;
    let mut env = Envelope::new("verify");
    env.param("suite", suite);
    if let Some(b) = budget {
        env.param("budget", decimal(b.as_secs_f64()));
    }
    let outcomes = run_suite_with(suite, budget, |o| eprintln!("{}", o.summary_line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();

    env.table.push(
        [
            "id",
            "title",
            "suite",
            "status",
            "elapsed_seconds",
            "failing",
        ]
        .map(String::from)
        .to_vec(),
    );
    for o in &outcomes {
        let failing: Vec<_> = o
            .measurements
            .iter()
            .filter(|m| !m.ok)
            .map(|m| m.name.clone())
            .collect();
        env.table.push(vec![
            o.id.to_string(),
            o.title.to_string(),
            o.suite.name().to_string(),
            if o.passed {
                "PASS"
            } else if o.skipped {
                "SKIPPED"
            } else {
                "FAIL"
            }
            .to_string(),
            format!("{:.3}", o.elapsed.as_secs_f64()),
            failing.join("; "),
        ]);
    }
    env.results = json!({
        "suite": suite.name(),
        "passed": outcomes.len() - failed,
        "failed": failed,
        "criteria": outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
    });
    env.emit(out.format, out.output)?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
