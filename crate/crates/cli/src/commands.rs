use clap::{Args, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use z2memory::eigensolve::{adiabatic_time_estimate, chain_state, gap_scan, ChainState};
use z2memory::macroscopicity::{build_vcm, fit_exponential_gap, fit_index_p, mz_distribution};
use z2memory::model::stabilizer_check;
use z2memory::pauli::additive_variance;
use z2memory::rvb::identity_checks;
use z2memory::thermal::{log_grid, pure_state_limit, thermal_scan, DEFAULT_KT_MAX, DEFAULT_KT_MIN, DEFAULT_KT_POINTS};
use z2memory::{AdditiveOperator, Result};

use crate::output::{fmt_f64, Table};

/// Rendered output and whether every check it contains passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    fn table(t: Table) -> Self {
        Self {
            text: t.render(),
            passed: true,
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateChoice {
    Ground,
    Excited,
    Superposed,
}

impl From<StateChoice> for ChainState {
    fn from(s: StateChoice) -> Self {
        match s {
            StateChoice::Ground => ChainState::Ground,
            StateChoice::Excited => ChainState::Excited,
            StateChoice::Superposed => ChainState::Superposed,
        }
    }
}

impl StateChoice {
    fn name(self) -> &'static str {
        match self {
            StateChoice::Ground => "ground",
            StateChoice::Excited => "excited",
            StateChoice::Superposed => "superposed",
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanE1Args {
    #[arg(long, default_value_t = 6)]
    pub n_min: usize,
    #[arg(long, default_value_t = 13)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2,1.3,1.4,1.5")]
    pub lambdas: Vec<f64>,
    /// Random additive operators sampled per point to probe the bound Var(A) <= e1*N.
    #[arg(long, default_value_t = 0)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

struct E1Row {
    n: usize,
    lambda: f64,
    e1: f64,
    e2: f64,
    probe_ratio: Option<f64>,
}

pub fn scan_e1(args: &ScanE1Args, tol: f64) -> Result<Outcome> {
    let jobs: Vec<(usize, f64, usize)> = args
        .lambdas
        .iter()
        .enumerate()
        .flat_map(|(li, &lambda)| (args.n_min..=args.n_max).map(move |n| (li, lambda, n)))
        .collect();
    let mut rows: Vec<(usize, E1Row)> = jobs
        .par_iter()
        .map(|&(li, lambda, n)| {
            let state = chain_state(n, lambda, ChainState::Ground, tol)?;
            let vcm = build_vcm(&state)?;
            let probe_ratio = if args.probes > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                rng.set_stream((li * 64 + n) as u64);
                let mut worst: f64 = 0.0;
                for _ in 0..args.probes {
                    let op = AdditiveOperator::random(n, &mut rng)?;
                    worst = worst.max(additive_variance(&state, &op)? / (vcm.e1() * n as f64));
                }
                Some(worst)
            } else {
                None
            };
            Ok((
                li,
                E1Row {
                    n,
                    lambda,
                    e1: vcm.e1(),
                    e2: vcm.e2(),
                    probe_ratio,
                },
            ))
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|(li, r)| (*li, r.n));

    let mut flags = format!("--n-min {} --n-max {} --lambdas {}", args.n_min, args.n_max, join(&args.lambdas));
    let mut columns = vec!["scan_kind", "n", "lambda", "kt", "e1", "e2"];
    if args.probes > 0 {
        flags += &format!(" --probes {} --seed {}", args.probes, args.seed);
        columns.push("probe_ratio");
    }
    let mut t = Table::new("scan-e1", &flags, &columns);
    t.comment("state: ground state |E0(lambda)>; probe_ratio = max sampled Var(A)/(e1*N), at most 1");
    for (_, r) in &rows {
        let mut cells = vec!["e1".into(), r.n.to_string(), fmt_f64(r.lambda), String::new(), fmt_f64(r.e1), fmt_f64(r.e2)];
        if let Some(p) = r.probe_ratio {
            cells.push(fmt_f64(p));
        }
        t.row(cells);
    }
    for (li, &lambda) in args.lambdas.iter().enumerate() {
        let points: Vec<(usize, f64)> = rows.iter().filter(|(l, _)| *l == li).map(|(_, r)| (r.n, r.e1)).collect();
        if let Ok(fit) = fit_index_p(&points) {
            t.summary(format!(
                "fit lambda={} ln(e1) = slope*ln(N) + intercept: p={} slope={} intercept={} r2={}",
                fmt_f64(lambda),
                fmt_f64(fit.index_p()),
                fmt_f64(fit.slope),
                fmt_f64(fit.intercept),
                fmt_f64(fit.r_squared)
            ));
        }
    }
    Ok(Outcome::table(t))
}

#[derive(Debug, Args)]
pub struct PzArgs {
    #[arg(long, default_value_t = 13)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = StateChoice::Ground)]
    pub state: StateChoice,
}

pub fn pz(args: &PzArgs, tol: f64) -> Result<Outcome> {
    let state = chain_state(args.n, args.lambda, args.state.into(), tol)?;
    let dist = mz_distribution(&state);
    let flags = format!("--n {} --lambda {} --state {}", args.n, args.lambda, args.state.name());
    let mut t = Table::new("pz", &flags, &["scan_kind", "n", "lambda", "kt", "state", "mz", "probability"]);
    for (m, p) in dist.support.iter().zip(&dist.probabilities) {
        t.row(vec![
            "pz".into(),
            args.n.to_string(),
            fmt_f64(args.lambda),
            String::new(),
            args.state.name().into(),
            m.to_string(),
            fmt_f64(*p),
        ]);
    }
    t.summary(format!(
        "total={} asymmetry={} positive_weight={}",
        fmt_f64(dist.total()),
        fmt_f64(dist.asymmetry()),
        fmt_f64(dist.positive_weight())
    ));
    Ok(Outcome::table(t))
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long, default_value_t = 13)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
}

struct StatePoint {
    n: usize,
    e1: f64,
    e2: f64,
    positive_weight: f64,
}

fn state_scan(n_min: usize, n_max: usize, lambda: f64, which: ChainState, tol: f64) -> Result<Vec<StatePoint>> {
    let mut pts: Vec<StatePoint> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let s = chain_state(n, lambda, which, tol)?;
            let vcm = build_vcm(&s)?;
            Ok(StatePoint {
                n,
                e1: vcm.e1(),
                e2: vcm.e2(),
                positive_weight: mz_distribution(&s).positive_weight(),
            })
        })
        .collect::<Result<_>>()?;
    pts.sort_by_key(|p| p.n);
    Ok(pts)
}

fn power_fit_summary(t: &mut Table, label: &str, points: &[(usize, f64)]) {
    if let Ok(fit) = fit_index_p(points) {
        t.summary(format!(
            "fit ln({label}) = slope*ln(N) + intercept: slope={} intercept={} r2={}",
            fmt_f64(fit.slope),
            fmt_f64(fit.intercept),
            fmt_f64(fit.r_squared)
        ));
    }
}

pub fn e2(args: &RangeArgs, tol: f64) -> Result<Outcome> {
    let n_min = args.n_min.unwrap_or(6);
    let pts = state_scan(n_min, args.n_max, args.lambda, ChainState::Ground, tol)?;
    let flags = format!("--n-min {n_min} --n-max {} --lambda {}", args.n_max, args.lambda);
    let mut t = Table::new("e2", &flags, &["scan_kind", "n", "lambda", "kt", "e1", "e2"]);
    t.comment("state: ground state |E0(lambda)>");
    for p in &pts {
        t.row(vec!["e2".into(), p.n.to_string(), fmt_f64(args.lambda), String::new(), fmt_f64(p.e1), fmt_f64(p.e2)]);
    }
    power_fit_summary(&mut t, "e2", &pts.iter().map(|p| (p.n, p.e2)).collect::<Vec<_>>());
    Ok(Outcome::table(t))
}

pub fn superpose(args: &RangeArgs, tol: f64) -> Result<Outcome> {
    let n_min = args.n_min.unwrap_or(6);
    let pts = state_scan(n_min, args.n_max, args.lambda, ChainState::Superposed, tol)?;
    let flags = format!("--n-min {n_min} --n-max {} --lambda {}", args.n_max, args.lambda);
    let mut t = Table::new(
        "superpose",
        &flags,
        &["scan_kind", "n", "lambda", "kt", "e1", "e2", "positive_mz_weight"],
    );
    t.comment("state: (|E0> + s|E1>)/sqrt(2), s = +-1 maximizing |<Mz>|, positive branch on ties");
    for p in &pts {
        t.row(vec![
            "superpose".into(),
            p.n.to_string(),
            fmt_f64(args.lambda),
            String::new(),
            fmt_f64(p.e1),
            fmt_f64(p.e2),
            fmt_f64(p.positive_weight),
        ]);
    }
    power_fit_summary(&mut t, "e1", &pts.iter().map(|p| (p.n, p.e1)).collect::<Vec<_>>());
    Ok(Outcome::table(t))
}

pub fn gap(args: &RangeArgs, tol: f64) -> Result<Outcome> {
    let n_min = args.n_min.unwrap_or(4);
    let pts = gap_scan(args.lambda, n_min, args.n_max, tol)?;
    let times = adiabatic_time_estimate(&pts)?;
    let flags = format!("--n-min {n_min} --n-max {} --lambda {}", args.n_max, args.lambda);
    let mut t = Table::new(
        "gap",
        &flags,
        &["scan_kind", "n", "lambda", "kt", "e0", "e1", "gap", "ln_gap", "adiabatic_time"],
    );
    t.comment("adiabatic_time = 1/gap^2");
    for (p, (_, time)) in pts.iter().zip(&times) {
        t.row(vec![
            "gap".into(),
            p.n.to_string(),
            fmt_f64(args.lambda),
            String::new(),
            fmt_f64(p.e0),
            fmt_f64(p.e1),
            fmt_f64(p.gap),
            fmt_f64(p.gap.ln()),
            fmt_f64(*time),
        ]);
    }
    if let Ok(fit) = fit_exponential_gap(&pts.iter().map(|p| (p.n, p.gap)).collect::<Vec<_>>()) {
        t.summary(format!(
            "fit ln(gap) = slope*N + intercept: slope={} intercept={} r2={}",
            fmt_f64(fit.slope),
            fmt_f64(fit.intercept),
            fmt_f64(fit.r_squared)
        ));
    }
    Ok(Outcome::table(t))
}

#[derive(Debug, Args)]
pub struct ThermalArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = DEFAULT_KT_MIN)]
    pub kt_min: f64,
    #[arg(long, default_value_t = DEFAULT_KT_MAX)]
    pub kt_max: f64,
    #[arg(long, default_value_t = DEFAULT_KT_POINTS)]
    pub kt_points: usize,
}

pub fn thermal(args: &ThermalArgs, tol: f64) -> Result<Outcome> {
    let grid = log_grid(args.kt_min, args.kt_max, args.kt_points)?;
    let pts = thermal_scan(args.lambda, args.n, &grid)?;
    let flags = format!(
        "--n {} --lambda {} --kt-min {} --kt-max {} --kt-points {}",
        args.n, args.lambda, args.kt_min, args.kt_max, args.kt_points
    );
    let mut t = Table::new("thermal", &flags, &["scan_kind", "n", "lambda", "kt", "e1_w"]);
    t.comment("e1_w: largest eigenvalue of W = Tr([rho,s_a][s_b,rho]) for the Gibbs state; raw, not rescaled by N");
    for p in &pts {
        t.row(vec!["thermal".into(), args.n.to_string(), fmt_f64(args.lambda), fmt_f64(p.kt), fmt_f64(p.e1)]);
    }
    let pure = pure_state_limit(args.lambda, args.n, tol)?;
    let lowest = pts[0].e1;
    t.summary(format!(
        "pure ground state 2*Re(V) e1={} lowest-kT relative difference={}",
        fmt_f64(pure),
        fmt_f64((lowest - pure).abs() / pure)
    ));
    Ok(Outcome::table(t))
}

#[derive(Debug, Args)]
pub struct RvbArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
}

pub fn rvb(args: &RvbArgs) -> Result<Outcome> {
    let checks = identity_checks(args.n)?;
    let mut text = format!("# z2mem {} rvb --n {}\n", env!("CARGO_PKG_VERSION"), args.n);
    for c in &checks {
        text += &format!(
            "{} {} value={} range=[{}, {}]\n",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            fmt_f64(c.value),
            fmt_f64(c.lower),
            fmt_f64(c.upper)
        );
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    text += &format!("# {} of {} checks passed\n", checks.len() - failed, checks.len());
    Ok(Outcome {
        text,
        passed: failed == 0,
    })
}

#[derive(Debug, Args)]
pub struct StabilizerArgs {
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
}

pub const STABILIZER_TOLERANCE: f64 = 1e-12;

pub fn stabilizer(args: &StabilizerArgs) -> Result<Outcome> {
    let reports = (args.n_min..=args.n_max)
        .into_par_iter()
        .map(stabilizer_check)
        .collect::<Result<Vec<_>>>()?;
    let mut text = format!(
        "# z2mem {} stabilizer --n-min {} --n-max {}\n",
        env!("CARGO_PKG_VERSION"),
        args.n_min,
        args.n_max
    );
    let mut passed = true;
    for r in &reports {
        let ok = r.code_dimension == 2 && r.max_residual() < STABILIZER_TOLERANCE;
        passed &= ok;
        text += &format!(
            "{} n={} code_dimension={} product_identity={} logical_x_commutator={} logical_z_commutator={} logical_anticommutator={}\n",
            if ok { "PASS" } else { "FAIL" },
            r.n_sites,
            r.code_dimension,
            fmt_f64(r.product_identity_residual),
            fmt_f64(r.logical_x_commutator),
            fmt_f64(r.logical_z_commutator),
            fmt_f64(r.logical_anticommutator)
        );
    }
    Ok(Outcome { text, passed })
}
