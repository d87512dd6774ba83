use breaklab::{
    build_conjugacy, dynamical_partition, fit_decay, fit_fractional_linear, fit_line, holder_estimate, ledger_for,
    mobius_conjugacy_probe, partition_stats, renormalize, rigidity_experiment, rotation_cf, tune_delta_with, xi,
    xi_orbit, BreakMap, ExperimentConfig, Interval, MobiusPairParams, Qd, Real, TuneOptions,
};
use serde_json::{json, Value};

use crate::output::{num, Artifacts, CliError, CliResult, Table};
use crate::{Cli, Command, MapArgs, TargetArgs, SCHEMA_VERSION};

/// Binary64 carries just under 16 significant digits.
const BINARY64_DIGITS: u32 = 16;

pub fn dispatch(cli: &Cli) -> CliResult<Artifacts> {
    let digits = cli.precision_digits;
    if digits == 0 || digits > <Qd as Real>::DIGITS {
        return Err(CliError::Validation(format!(
            "precision must be between 1 and {} digits, got {}",
            <Qd as Real>::DIGITS,
            digits
        )));
    }
    if digits <= BINARY64_DIGITS {
        run::<f64>(&cli.command, digits)
    } else {
        run::<Qd>(&cli.command, digits)
    }
}

fn real<T: Real>(s: &str, name: &str) -> CliResult<T> {
    let x = T::from_str_radix(s.trim(), 10)
        .map_err(|_| CliError::Validation(format!("--{} expects a number, got '{}'", name, s)))?;
    if !x.is_finite() {
        return Err(CliError::Validation(format!("--{} must be finite", name)));
    }
    Ok(x)
}

fn map_params<T: Real>(m: &MapArgs) -> CliResult<(T, T)> {
    let c: T = real(&m.c, "c")?;
    if c <= T::zero() {
        return Err(CliError::Validation(format!("--c must be positive, got {}", m.c)));
    }
    Ok((c, real(&m.eps, "eps")?))
}

fn ledger(c: f64) -> Value {
    ledger_for(c, None, None).map_or(Value::Null, |l| json!(l))
}

fn report(command: &str, config: Value, ledger: Value, body: Value) -> Value {
    let mut out = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "ledger": ledger,
    });
    if let (Some(o), Value::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    out
}

/// Map tuned to the target, or with the given shift.
fn tuned_map<T: Real>(c: T, eps: T, target: &TargetArgs, delta: Option<&str>, depth: usize) -> CliResult<BreakMap<T>> {
    let delta = match delta {
        Some(d) => real(d, "delta")?,
        None => {
            let t = target.spec().target::<T>()?;
            tune_delta_with(c, eps, &t, depth, TuneOptions::default())?.delta
        }
    };
    Ok(BreakMap::new(c, eps, delta)?)
}

fn run<T: Real>(cmd: &Command, digits: u32) -> CliResult<Artifacts> {
    match cmd {
        Command::Rotnum { map, delta, depth } => {
            let (c, eps) = map_params::<T>(map)?;
            if *depth == 0 {
                return Err(CliError::Validation("--depth must be positive".into()));
            }
            let f = BreakMap::new(c, eps, real(delta, "delta")?)?;
            let cf = rotation_cf(&f, *depth)?;
            let mut t = Table::new("rotnum", vec!["n", "a_n", "p_n", "q_n", "mu_n"]);
            for n in 1..=cf.depth() {
                let i = n as i64;
                t.rows.push(vec![
                    n.to_string(),
                    cf.a(n).to_string(),
                    cf.p(i).to_string(),
                    cf.q(i).to_string(),
                    num(cf.mu(i).as_f64()),
                ]);
            }
            Ok(Artifacts {
                name: "rotnum".into(),
                report: None,
                tables: vec![t],
            })
        }
        Command::Tune { map, target, depth } => {
            let (c, eps) = map_params::<T>(map)?;
            let spec = target.spec();
            let tuned = tune_delta_with(c, eps, &spec.target::<T>()?, *depth, TuneOptions::default())?;
            let f = BreakMap::new(c, eps, tuned.delta)?;
            let cf = rotation_cf(&f, *depth)?;
            let config = json!({
                "c": c.as_f64(), "eps": eps.as_f64(), "target": spec, "depth": depth, "precisionDigits": digits,
            });
            let body = json!({
                "delta": tuned.delta.as_f64(),
                "deltaDigits": tuned.delta.to_string(),
                "matchedDepth": tuned.matched_depth,
                "iterations": tuned.iterations,
                "quotients": cf.quotients(),
            });
            Ok(Artifacts {
                name: "tune".into(),
                report: Some(report("tune", config, ledger(c.as_f64()), body)),
                tables: vec![],
            })
        }
        Command::Partition {
            map,
            target,
            delta,
            levels,
        } => {
            let (c, eps) = map_params::<T>(map)?;
            let (lo, hi) = *levels;
            let depth = hi + 2;
            let f = tuned_map(c, eps, target, delta.as_deref(), depth)?;
            let cf = rotation_cf(&f, depth)?;
            let mut t = Table::new(
                "partition",
                vec!["n", "q_n", "maxLen", "minLen", "mu", "minOverMu", "coverError", "invariantsHold"],
            );
            let mut stats = Vec::new();
            for n in lo.max(1)..=hi {
                let p = dynamical_partition(&f, &cf, n)?;
                let chk = p.check();
                let s = partition_stats(&p, &cf);
                t.rows.push(vec![
                    n.to_string(),
                    s.q.to_string(),
                    num(s.max_length),
                    num(s.min_old_length),
                    num(s.mu),
                    num(s.min_over_mu),
                    num(chk.cover_error),
                    chk.passed().to_string(),
                ]);
                stats.push(s);
            }
            let fit = fit_decay(&stats, (lo, hi)).ok();
            let led = ledger_for(c.as_f64(), fit.as_ref(), None).map_or(Value::Null, |l| json!(l));
            let config = json!({
                "c": c.as_f64(), "eps": eps.as_f64(), "target": target.spec(), "delta": f.delta().as_f64(),
                "levels": [lo, hi], "precisionDigits": digits,
            });
            Ok(Artifacts {
                name: "partition".into(),
                report: Some(report("partition", config, led, json!({ "decay": fit, "levels": stats }))),
                tables: vec![t],
            })
        }
        Command::Renorm {
            map,
            target,
            delta,
            levels,
        } => {
            let (c, eps) = map_params::<T>(map)?;
            let (lo, hi) = *levels;
            let depth = hi + 2;
            let f = tuned_map(c, eps, target, delta.as_deref(), depth)?;
            let cf = rotation_cf(&f, depth)?;
            let mut t = Table::new(
                "renorm",
                vec!["n", "alpha_n", "c_n", "vHat", "distC0", "distC2", "inUc", "breakProductResidual"],
            );
            let (mut ns, mut logs) = (Vec::new(), Vec::new());
            for n in lo.max(1)..=hi {
                let pair = renormalize(&f, &cf, n)?;
                let fit = fit_fractional_linear(&pair)?;
                let bpr = pair.break_product_residual()?;
                t.rows.push(vec![
                    n.to_string(),
                    num(pair.alpha.as_f64()),
                    num(pair.c_n.as_f64()),
                    num(fit.v.as_f64()),
                    num(fit.dist_c0.as_f64()),
                    num(fit.dist_c2.as_f64()),
                    fit.in_uc.to_string(),
                    num(bpr.as_f64()),
                ]);
                ns.push(n as f64);
                logs.push(fit.dist_c2.as_f64().ln());
            }
            let line = fit_line(&ns, &logs);
            let config = json!({
                "c": c.as_f64(), "eps": eps.as_f64(), "target": target.spec(), "delta": f.delta().as_f64(),
                "levels": [lo, hi], "precisionDigits": digits,
            });
            let body = json!({
                "lambdaHat": line.map(|l| l.slope.exp()),
                "r2": line.map(|l| l.r2),
            });
            Ok(Artifacts {
                name: "renorm".into(),
                report: Some(report("renorm", config, ledger(c.as_f64()), body)),
                tables: vec![t],
            })
        }
        Command::Xi {
            map,
            delta,
            a,
            b,
            iterates,
        } => {
            let (c, eps) = map_params::<T>(map)?;
            let f = BreakMap::new(c, eps, real(delta, "delta")?)?;
            let j = Interval::new(real::<T>(a, "a")?, real::<T>(b, "b")?)?;
            let value = xi(&f, &j)?;
            let s = xi_orbit(&f, &j, *iterates)?;
            let config = json!({
                "c": c.as_f64(), "eps": eps.as_f64(), "delta": f.delta().as_f64(),
                "a": j.a.as_f64(), "b": j.b.as_f64(), "iterates": iterates, "precisionDigits": digits,
            });
            let body = json!({
                "xi": value.as_f64(),
                "xiPower": s.xi_power.as_f64(),
                "xiDirect": s.xi_direct.as_f64(),
                "compositionResidual": s.composition_residual().as_f64(),
                "sumSquares": s.sum_squares.as_f64(),
                "finalLength": s.final_len.as_f64(),
                "sHat": s.s_hat.as_f64(),
            });
            Ok(Artifacts {
                name: "xi".into(),
                report: Some(report("xi", config, ledger(c.as_f64()), body)),
                tables: vec![],
            })
        }
        Command::Conjugacy {
            map,
            eps_g,
            target,
            levels,
        } => {
            let (c, eps) = map_params::<T>(map)?;
            let eps_g: T = real(eps_g, "eps-g")?;
            let (lo, hi) = *levels;
            let depth = hi + 2;
            let f = tuned_map(c, eps, target, None, depth)?;
            let g = tuned_map(c, eps_g, target, None, depth)?;
            let table = build_conjugacy(&f, &g, depth)?;
            let est = holder_estimate(&table, &f, &g, (lo, hi))?;
            let mut points = Table::new("conjugacy_points", vec!["k", "fPoint", "gPoint"]);
            for i in 0..table.len() {
                points.rows.push(vec![
                    table.orbit_index[i].to_string(),
                    num(table.f_points[i].as_f64()),
                    num(table.g_points[i].as_f64()),
                ]);
            }
            let lv = level_table("conjugacy_levels", &est.levels);
            let config = json!({
                "c": c.as_f64(), "eps": eps.as_f64(), "epsG": eps_g.as_f64(), "target": target.spec(),
                "levels": [lo, hi], "precisionDigits": digits,
            });
            let body = json!({
                "orderIsomorphic": table.is_order_isomorphic(),
                "tableSize": table.len(),
                "f": table.f_spec,
                "g": table.g_spec,
                "holder": est,
            });
            Ok(Artifacts {
                name: "conjugacy".into(),
                report: Some(report("conjugacy", config, ledger(c.as_f64()), body)),
                tables: vec![lv, points],
            })
        }
        Command::Experiment {
            c,
            eps,
            target,
            levels,
            n_min,
            n_max,
            alpha_gate,
            n0,
        } => {
            let (n_min, n_max) = levels.unwrap_or((*n_min, *n_max));
            let config = ExperimentConfig {
                c: *c,
                eps: *eps,
                target: target.spec(),
                n_min,
                n_max,
                precision_digits: digits,
                alpha_gate: *alpha_gate,
                n0: *n0,
            };
            config.validate()?;
            let r = rigidity_experiment::<T>(&config)?;
            let mut t = level_table("experiment_levels", &r.holder.levels);
            t.header.extend(["qTimesSumSq", "lowerBound", "splitRatio", "refinementRatio"]);
            for (row, l) in t.rows.iter_mut().zip(&r.lower_chain) {
                row.extend([num(l.q_times_sum), num(l.bound), num(l.split_ratio), num(l.refinement_ratio)]);
            }
            let mut value = json!(r);
            if let Some(o) = value.as_object_mut() {
                o.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
                o.insert("command".into(), json!("experiment"));
            }
            Ok(Artifacts {
                name: "experiment".into(),
                report: Some(value),
                tables: vec![t],
            })
        }
        Command::MobiusProbe { pairs } => {
            if pairs.len() != 2 {
                return Err(CliError::Validation(format!("--pair must be given twice, got {}", pairs.len())));
            }
            let mk = |&(a, v, c): &(f64, f64, f64)| -> CliResult<MobiusPairParams<T>> {
                let p = MobiusPairParams::new(T::cst(a), T::cst(v), T::cst(c));
                if !(c > 0.0 && p.is_homeomorphism_pair()) {
                    return Err(CliError::Validation(format!(
                        "pair ({}, {}, {}) does not define a circle homeomorphism",
                        a, v, c
                    )));
                }
                Ok(p)
            };
            let (p1, p2) = (mk(&pairs[0])?, mk(&pairs[1])?);
            let probe = mobius_conjugacy_probe(&p1, &p2);
            let matrix = probe.matrix.map(|m| {
                let e = m.m;
                json!([[e[0][0].as_f64(), e[0][1].as_f64()], [e[1][0].as_f64(), e[1][1].as_f64()]])
            });
            let config = json!({
                "pairs": pairs.iter().map(|p| json!({"alpha": p.0, "v": p.1, "c": p.2})).collect::<Vec<_>>(),
                "precisionDigits": digits,
            });
            let body = json!({
                "conjugate": probe.conjugate,
                "residual": probe.residual.as_f64(),
                "u": probe.u.as_f64(),
                "matrix": matrix,
                "inUc": [p1.in_uc(), p2.in_uc()],
            });
            Ok(Artifacts {
                name: "mobius_probe".into(),
                report: Some(report("mobius-probe", config, ledger(pairs[0].2), body)),
                tables: vec![],
            })
        }
    }
}

fn level_table(name: &str, levels: &[breaklab::LevelObstruction]) -> Table {
    let mut t = Table::new(
        name,
        vec!["n", "q_n", "l_n", "jLen", "jImageLen", "d", "xiF", "xiGFloor", "dMax", "lenMax", "dP90", "lenP90"],
    );
    for l in levels {
        t.rows.push(vec![
            l.level.to_string(),
            l.q.to_string(),
            l.l_n.to_string(),
            num(l.j_len),
            num(l.j_image_len),
            num(l.d),
            num(l.xi_f),
            num(l.xi_g_direct),
            num(l.d_max),
            num(l.len_max),
            num(l.d_p90),
            num(l.len_p90),
        ]);
    }
    t
}
