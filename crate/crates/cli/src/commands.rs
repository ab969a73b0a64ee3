use c3s::catalog::{self, named_system, NAMED_SYSTEMS};
use c3s::criterion::{
    deep_check, instability_test, stability_region_sweep, DeepSettings, GridScheme, GridSpec, StabilityReport,
};
use c3s::potential::{veff_envelope, EffectivePotential, EvalMode};
use c3s::verify::{run_all, CheckStatus, VerifyOptions};
use c3s::{Charge, Error, Mass, ParticleSystem, QuadSettings, Warning};
use serde_json::{json, Value};

use crate::record::{csv_num, csv_preamble, emit, inputs, OutputRecord};
use crate::{AnalyzeArgs, CatalogArgs, RegionArgs, SchemeArg, VeffArgs, VeffMode, VerifyArgs};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_numerical() { 2 } else { 1 }, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, message: msg.into() }
}

type Outcome = Result<u8, Failure>;

fn warning_text(w: &Warning) -> String {
    match w {
        Warning::EqualThreshold => "equal_threshold: the two pair thresholds coincide".into(),
    }
}

fn report_record(command: &str, inputs: Value, report: &StabilityReport<f64>) -> OutputRecord {
    let mut warnings: Vec<String> = report.warnings.iter().map(warning_text).collect();
    if let Some(t) = &report.thirring {
        if !t.applies {
            warnings.push("thirring baseline assumes an infinite m1; shown for comparison only".into());
        }
    }
    if let Some(d) = &report.deep {
        if !d.agrees {
            warnings.push("numeric V_eff path disagrees with the envelope verdict".into());
        }
    }
    OutputRecord::new(command, inputs, serde_json::to_value(report).expect("reports serialize"), warnings)
}

fn print_record(r: &OutputRecord, as_json: bool) {
    if as_json {
        emit(&(r.render_json() + "\n"));
    } else {
        emit(&r.render_human());
    }
}

pub fn analyze(args: &AnalyzeArgs, echo: &str) -> Outcome {
    let parse = |s: &str| s.parse::<Mass<f64>>();
    let masses = [parse(&args.m1)?, parse(&args.m2)?, parse(&args.m3)?];
    let charges = Charge::parse_triple(&args.charges)?;
    let sys = ParticleSystem::new(masses, charges)?;
    let mut report = instability_test(&sys)?;
    if args.deep {
        deep_check(&mut report, &DeepSettings::default())?;
    }
    let rec = report_record(
        echo,
        json!({"masses": inputs(masses), "charges": args.charges, "deep": args.deep}),
        &report,
    );
    print_record(&rec, args.json);
    Ok(0)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

pub fn veff(args: &VeffArgs, echo: &str) -> Outcome {
    if !(0.0..=1.0).contains(&args.a) {
        return Err(usage("--a must lie in [0, 1]"));
    }
    if !(args.y_min > 0.0 && args.y_max >= args.y_min && args.y_max.is_finite()) {
        return Err(usage("need 0 < --y-min <= --y-max"));
    }
    if args.points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    let modes: &[EvalMode] = match args.mode {
        VeffMode::Numeric => &[EvalMode::Numeric],
        VeffMode::Semianalytic => &[EvalMode::SemiAnalytic],
        VeffMode::Both => &[EvalMode::Numeric, EvalMode::SemiAnalytic],
    };
    let pots = modes
        .iter()
        .map(|&m| EffectivePotential::new(args.a, m).map(|p| p.with_quad(QuadSettings::default())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = csv_preamble(echo, &["y", "veff", "y2_veff", "envelope", "mode"]);
    for y in log_grid(args.y_min, args.y_max, args.points) {
        let envelope = veff_envelope(y)?;
        for pot in &pots {
            let s = pot.scaled_estimate(y)?.value;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_num(y),
                csv_num(s / (y * y)),
                csv_num(s),
                csv_num(envelope),
                pot.mode.name()
            ));
        }
    }
    emit(&out);
    Ok(0)
}

fn mass_cell(m: &Mass<f64>) -> String {
    match m {
        Mass::Finite(v) => csv_num(*v),
        Mass::Infinite => "inf".into(),
    }
}

pub fn region(args: &RegionArgs, echo: &str) -> Outcome {
    if args.grid == 0 || args.grid > 2000 {
        return Err(usage("--grid must be between 1 and 2000"));
    }
    let scheme = match args.scheme {
        SchemeArg::Ratios => GridScheme::Ratios,
        SchemeArg::Barycentric => GridScheme::Barycentric,
        SchemeArg::InfiniteNucleus => GridScheme::InfiniteNucleus,
    };
    let rows = stability_region_sweep::<f64>(&GridSpec { n: args.grid, scheme })?;
    let columns = [
        "i",
        "j",
        "m1",
        "m2",
        "m3",
        "a",
        "mass_ratio",
        "verdict",
        "thirring_verdict",
        "margin",
        "equal_threshold",
    ];
    let mut out = csv_preamble(echo, &columns);
    out.insert_str(
        out.find("# command").unwrap_or(0),
        &format!(
            "# scheme={}; margin = (11-2*sqrt(10))/27 - mass_ratio; thirring_verdict only where m1 is infinite\n",
            scheme.name()
        ),
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.i,
            r.j,
            mass_cell(&r.masses[0]),
            mass_cell(&r.masses[1]),
            mass_cell(&r.masses[2]),
            csv_num(r.a),
            csv_num(r.mass_ratio),
            r.verdict,
            r.thirring.map(|v| v.name()).unwrap_or(""),
            csv_num(r.margin),
            r.equal_threshold
        ));
    }
    emit(&out);
    Ok(0)
}

pub fn catalog(args: &CatalogArgs, echo: &str) -> Outcome {
    let table = catalog::load()?;
    let rec = match &args.classify {
        Some(label) => {
            let named = named_system(label)?;
            let report = catalog::classify_named_in(&table, label)?;
            report_record(echo, json!({"system": label, "particles": named.particles}), &report)
        }
        None => {
            let systems: Vec<Value> = NAMED_SYSTEMS
                .iter()
                .map(|s| json!({"label": s.label, "particles": s.particles, "description": s.description}))
                .collect();
            let source = std::env::var(catalog::TABLE_ENV).unwrap_or_else(|_| "shipped".into());
            OutputRecord::new(
                echo,
                json!({"table": source}),
                json!({"particles": table.entries(), "systems": systems}),
                vec![],
            )
        }
    };
    print_record(&rec, args.json);
    Ok(0)
}

pub fn verify(args: &VerifyArgs, echo: &str) -> Outcome {
    let opts = VerifyOptions {
        deep: args.deep,
        mc_samples: args.mc_samples,
        seed: args.seed,
        threshold_override: args.tamper_threshold,
    };
    let outcomes = run_all(&opts);
    let all_ok = outcomes.iter().all(|o| o.passed());
    if args.json {
        let rec = OutputRecord::new(
            echo,
            json!({"deep": args.deep, "mc_samples": args.mc_samples, "seed": args.seed}),
            json!({"checks": outcomes, "passed": all_ok}),
            vec![],
        );
        emit(&(rec.render_json() + "\n"));
    } else {
        let mut out = String::new();
        for o in &outcomes {
            let tag = match o.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skip => "SKIP",
            };
            out.push_str(&format!(
                "[{tag}] {:>2} {:<26} {:>8.3}s  {}\n",
                o.id, o.name, o.elapsed_s, o.detail
            ));
        }
        out.push_str(if all_ok { "all checks passed\n" } else { "verification FAILED\n" });
        emit(&out);
    }
    Ok(if all_ok { 0 } else { 3 })
}
