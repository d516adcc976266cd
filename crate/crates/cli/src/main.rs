//! Batch front end for the heegner-core library: reproducible class-group,
//! isogeny and Heegner-tower computations with machine-readable output.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 mathematical
//! precondition violation, 3 search budget exceeded.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use heegner_core::algebra::{Fq, PolyA};
use heegner_core::classgroup::{
    annihilator_bound, generator_lower_bound, hn_group, maximal_class_number, PicGroup,
};
use heegner_core::error::Error;
use heegner_core::heegner::{
    choose_theta, geometric_group, heegner_point, lifted_point_coherence, verify_geometric_level,
    GaloisElement, HeegnerConfig, HeegnerConfigJson,
};
use heegner_core::isogeny::{canonical_factorization, sublattices_prime};
use heegner_core::lattice::{Lattice, LatticeJson, Order};
use heegner_core::quadratic::{make_field, splitting_type, QuadField};
use heegner_core::verify::{render_reports, run as run_suites, VerifyConfig};

#[derive(Parser)]
#[command(name = "heegner", version, about = "Exact arithmetic in imaginary quadratic extensions of F_q(T): class groups of orders, CM lattices, cyclic isogenies, and Heegner point towers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Prime field size q (the CLI supports prime fields only)
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Square-free non-constant D defining K = k(sqrt(D))
    #[arg(long, global = true)]
    disc: Option<String>,
    /// Tower prime p (monic irreducible, coprime to the level)
    #[arg(long, global = true)]
    tower_prime: Option<String>,
    /// Level ideal n of X_0(n): a square-free product of split primes
    #[arg(long, global = true)]
    n_ideal: Option<String>,
    /// Seed for every randomized routine (mandatory)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration budget for searches
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Degree bound for geometric-certificate searches
    #[arg(long, global = true)]
    degree_bound: Option<i64>,
    /// Output format
    #[arg(long, global = true, value_parser = ["table", "json"])]
    format: Option<String>,
    /// JSON config file supplying defaults for the flags above
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Report the field data: type of infinity, genus, class number
    Field,
    /// Structure of Pic(O_c) for a conductor c
    Classgroup {
        #[arg(long)]
        cond: String,
    },
    /// Table of the tower: n, |Pic(O_n)|, factors, |H_n|, bounds
    Tower {
        #[arg(long, default_value_t = 3)]
        levels: u32,
    },
    /// All prime-index sublattices of a lattice with their conductors
    Sublattices {
        /// Lattice as JSON {"den":..,"a":..,"b":..,"c":..}
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        prime: String,
    },
    /// Canonical factorization of a cyclic inclusion a ⊂ b
    Factor {
        /// Smaller lattice as JSON
        #[arg(long)]
        a: String,
        /// Larger lattice as JSON
        #[arg(long)]
        b: String,
    },
    /// Heegner point at a tower level, with verifications
    Heegner {
        #[arg(long)]
        level: u32,
    },
    /// Geometric subgroup data and the Hecke checks at a level
    Geometric {
        #[arg(long)]
        level: u32,
    },
    /// Search for a theta element below the horizon
    Theta {
        #[arg(long)]
        m_level: u32,
        #[arg(long)]
        horizon: u32,
    },
    /// Run a named property suite (or "all")
    Verify {
        #[arg(long)]
        suite: String,
    },
}

/// Fully resolved run configuration; echoed into every report.
#[derive(Clone, Serialize)]
struct RunConfig {
    q: u64,
    disc: String,
    tower_prime: String,
    n_ideal: String,
    seed: u64,
    budget: usize,
    degree_bound: i64,
    format: String,
}

struct Context {
    cfg: RunConfig,
    fq: Fq,
    k: QuadField,
    p: PolyA,
    n_level: PolyA,
}

fn resolve(common: &Common) -> Result<RunConfig, Error> {
    let file: Option<HeegnerConfigJson> = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read config {path}: {e}")))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("invalid config {path}: {e}")))?,
            )
        }
        None => None,
    };
    let q = common
        .q
        .or(file.as_ref().map(|f| f.q))
        .unwrap_or(3);
    let disc = common
        .disc
        .clone()
        .or(file.as_ref().map(|f| f.d.clone()))
        .unwrap_or_else(|| "T^3+2*T+1".to_string());
    let tower_prime = common
        .tower_prime
        .clone()
        .or(file.as_ref().map(|f| f.p.clone()))
        .unwrap_or_else(|| "T".to_string());
    let n_ideal = common
        .n_ideal
        .clone()
        .or(file.as_ref().map(|f| f.n_level.clone()))
        .unwrap_or_else(|| "T+1".to_string());
    let seed = common
        .seed
        .or(file.as_ref().map(|f| f.seed))
        .ok_or_else(|| Error::Parse("--seed is mandatory (reproducibility contract)".into()))?;
    let budget = common
        .budget
        .or(file.as_ref().map(|f| f.budget))
        .unwrap_or(1 << 26);
    Ok(RunConfig {
        q,
        disc,
        tower_prime,
        n_ideal,
        seed,
        budget,
        degree_bound: common.degree_bound.unwrap_or(4),
        format: common.format.clone().unwrap_or_else(|| "table".into()),
    })
}

fn context(cfg: RunConfig) -> Result<Context, Error> {
    let fq = Fq::prime(cfg.q)?;
    let d = PolyA::parse(&fq, &cfg.disc)?;
    let k = make_field(&fq, &d)?;
    let p = PolyA::parse(&fq, &cfg.tower_prime)?;
    let n_level = PolyA::parse(&fq, &cfg.n_ideal)?;
    Ok(Context {
        cfg,
        fq,
        k,
        p,
        n_level,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are successes, not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match resolve(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cfg, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) | Error::InvalidField(_) => 1,
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

/// Header lines embedded in every report for provenance.
fn header(cfg: &RunConfig, command: &str) -> String {
    format!(
        "heegner {} :: {command}\nconfig q={} D={} p={} n={} seed={} budget={} degree_bound={}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.q,
        cfg.disc,
        cfg.tower_prime,
        cfg.n_ideal,
        cfg.seed,
        cfg.budget,
        cfg.degree_bound,
    )
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    version: &'static str,
    command: String,
    config: RunConfig,
    result: T,
}

fn emit<T: Serialize>(ctx: &Context, command: &str, result: T, table: String) -> Result<(), Error> {
    if ctx.cfg.format == "json" {
        let report = Report {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config: ctx.cfg.clone(),
            result,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Internal(format!("serialization: {e}")))?
        );
    } else {
        print!("{}", header(&ctx.cfg, command));
        print!("{table}");
    }
    Ok(())
}

fn dispatch(cfg: RunConfig, command: &Command) -> Result<(), Error> {
    let ctx = context(cfg)?;
    match command {
        Command::Field => cmd_field(&ctx),
        Command::Classgroup { cond } => cmd_classgroup(&ctx, cond),
        Command::Tower { levels } => cmd_tower(&ctx, *levels),
        Command::Sublattices { lattice, prime } => cmd_sublattices(&ctx, lattice, prime),
        Command::Factor { a, b } => cmd_factor(&ctx, a, b),
        Command::Heegner { level } => cmd_heegner(&ctx, *level),
        Command::Geometric { level } => cmd_geometric(&ctx, *level),
        Command::Theta { m_level, horizon } => cmd_theta(&ctx, *m_level, *horizon),
        Command::Verify { suite } => cmd_verify(&ctx, suite),
    }
}

#[derive(Serialize)]
struct FieldReport {
    q: u64,
    d: String,
    infinity_type: String,
    genus: u32,
    class_number: u64,
    splitting: Vec<(String, i32)>,
}

fn cmd_field(ctx: &Context) -> Result<(), Error> {
    let h = maximal_class_number(&ctx.k, ctx.cfg.budget)?;
    let mut splitting = Vec::new();
    for q0 in heegner_core::algebra::irreducibles_up_to(&ctx.fq, 2) {
        let st = splitting_type(&ctx.k, &q0)?;
        splitting.push((q0.to_string(), st.chi));
    }
    let infinity = match ctx.k.infinity_type() {
        heegner_core::quadratic::InfinityType::Ramified => "ramified",
        heegner_core::quadratic::InfinityType::Inert => "inert",
    };
    let mut table = format!(
        "infinity type: {infinity}\ngenus: {}\n|Pic(O_K)|: {h}\nsplitting (chi) of primes of degree <= 2:\n",
        ctx.k.genus()
    );
    for (q0, chi) in &splitting {
        table.push_str(&format!("  {q0}: {chi}\n"));
    }
    let report = FieldReport {
        q: ctx.cfg.q,
        d: ctx.cfg.disc.clone(),
        infinity_type: infinity.to_string(),
        genus: ctx.k.genus(),
        class_number: h,
        splitting,
    };
    emit(ctx, "field", report, table)
}

#[derive(Serialize)]
struct ClassgroupReport {
    conductor: String,
    order: u64,
    invariant_factors: Vec<u64>,
    basis_representatives: Vec<LatticeJson>,
}

fn cmd_classgroup(ctx: &Context, cond: &str) -> Result<(), Error> {
    let c = PolyA::parse(&ctx.fq, cond)?;
    let order = Order::new(&ctx.k, &c)?;
    let g = PicGroup::compute(&order, ctx.cfg.budget)?;
    let report = ClassgroupReport {
        conductor: c.monic().to_string(),
        order: g.group_order(),
        invariant_factors: g.shape.invariant_factors.clone(),
        basis_representatives: g.basis.iter().map(|l| l.to_json()).collect(),
    };
    let mut table = format!(
        "Pic(O_c), c = {}\norder: {}\ninvariant factors: {:?}\nbasis representatives:\n",
        report.conductor, report.order, report.invariant_factors
    );
    for b in &g.basis {
        table.push_str(&format!("  {}\n", lattice_line(b)));
    }
    emit(ctx, "classgroup", report, table)
}

fn lattice_line(l: &Lattice) -> String {
    let j = l.to_json();
    format!("den={} a={} b={} c={}", j.den, j.a, j.b, j.c)
}

#[derive(Serialize)]
struct TowerRow {
    n: u32,
    pic_order: u64,
    invariant_factors: Vec<u64>,
    hn_order: Option<u64>,
    s_bound: Option<u32>,
    gen_bound: Option<u32>,
}

fn cmd_tower(ctx: &Context, levels: u32) -> Result<(), Error> {
    let mut rows = Vec::new();
    for n in 0..=levels {
        let order = Order::new(&ctx.k, &ctx.p.pow(n as u64))?;
        let g = PicGroup::compute(&order, ctx.cfg.budget)?;
        let (hn_order, s_bound, gen_bound) = if n >= 1 {
            let h = hn_group(&ctx.k, &ctx.p, n, ctx.cfg.budget)?;
            (
                Some(h.order),
                Some(annihilator_bound(ctx.fq.p(), n)),
                Some(generator_lower_bound(&ctx.k, &ctx.p, n)),
            )
        } else {
            (None, None, None)
        };
        rows.push(TowerRow {
            n,
            pic_order: g.group_order(),
            invariant_factors: g.shape.invariant_factors.clone(),
            hn_order,
            s_bound,
            gen_bound,
        });
    }
    let mut table = String::from("n,pic,factors,hn,s_bound,gen_bound\n");
    for r in &rows {
        let factors = r
            .invariant_factors
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("*");
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.pic_order,
            factors,
            r.hn_order.map(|v| v.to_string()).unwrap_or_default(),
            r.s_bound.map(|v| v.to_string()).unwrap_or_default(),
            r.gen_bound.map(|v| v.to_string()).unwrap_or_default(),
        ));
    }
    emit(ctx, "tower", rows, table)
}

fn parse_lattice(ctx: &Context, text: &str) -> Result<Lattice, Error> {
    let j: LatticeJson = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("invalid lattice JSON: {e}")))?;
    Lattice::from_json(&ctx.k, &j)
}

fn cmd_sublattices(ctx: &Context, lattice: &str, prime: &str) -> Result<(), Error> {
    let lb = parse_lattice(ctx, lattice)?;
    let q0 = PolyA::parse(&ctx.fq, prime)?;
    let report = sublattices_prime(&lb, &q0)?;
    let mut table = format!(
        "sublattices of index {} in {}\n",
        report.prime,
        lattice_line(&lb)
    );
    for (i, (la, cond)) in report.entries.iter().enumerate() {
        let mark = if report.distinguished == Some(i) {
            " <- conductor drop"
        } else {
            ""
        };
        table.push_str(&format!(
            "  {} conductor={cond}{mark}\n",
            lattice_line(la)
        ));
    }
    emit(ctx, "sublattices", report.to_json(), table)
}

fn cmd_factor(ctx: &Context, a: &str, b: &str) -> Result<(), Error> {
    let la = parse_lattice(ctx, a)?;
    let lb = parse_lattice(ctx, b)?;
    let f = canonical_factorization(&la, &lb)?;
    let table = format!(
        "cyclic inclusion of index d = {}\nconductors c1 = {}, c2 = {}, meeting order c = {}\nfactorization d = d1*d2*d' with d1 = {}, d2 = {}, d' = {}\nD ideal: {}\nO_c a: {}\nd2 O_c b: {}\n",
        f.d,
        f.c1,
        f.c2,
        f.c,
        f.d1,
        f.d2,
        f.dprime,
        lattice_line(&f.d_ideal),
        lattice_line(&f.mid1),
        lattice_line(&f.mid2),
    );
    emit(ctx, "factor", f.to_json(), table)
}

#[derive(Serialize)]
struct HeegnerReport {
    level: u32,
    conductor: String,
    small: LatticeJson,
    big: LatticeJson,
    level_structure_cyclic: bool,
    level_index: String,
    slot_conductors: (String, String),
}

fn heegner_config(ctx: &Context) -> Result<HeegnerConfig, Error> {
    HeegnerConfig::new(&ctx.k, &ctx.n_level, &ctx.p, ctx.cfg.budget)
}

fn cmd_heegner(ctx: &Context, level: u32) -> Result<(), Error> {
    let hcfg = heegner_config(ctx)?;
    let x = heegner_point(&hcfg, level)?;
    let shape = x.pt.small().quotient_shape(x.pt.big())?;
    let (c1, c2) = x.pt.conductors();
    let report = HeegnerReport {
        level,
        conductor: hcfg.order_at(level).conductor().to_string(),
        small: x.pt.small().to_json(),
        big: x.pt.big().to_json(),
        level_structure_cyclic: shape.cyclic,
        level_index: shape.index_ideal.to_string(),
        slot_conductors: (c1.to_string(), c2.to_string()),
    };
    let table = format!(
        "Heegner point x_{level} (conductor {})\n  slot O_n:      {}\n  slot N_n^-1:   {}\n  level structure: cyclic={} index={}\n  slot conductors: {}, {}\n",
        report.conductor,
        lattice_line(x.pt.small()),
        lattice_line(x.pt.big()),
        report.level_structure_cyclic,
        report.level_index,
        report.slot_conductors.0,
        report.slot_conductors.1,
    );
    emit(ctx, "heegner", report, table)
}

#[derive(Serialize)]
struct GeometricReport {
    ramified: Vec<String>,
    m: String,
    g1_size: usize,
    checks: Vec<GeometricCheck>,
}

#[derive(Serialize)]
struct GeometricCheck {
    divisor: String,
    hecke_witness_level: Option<String>,
    degeneracy_matches: bool,
}

fn cmd_geometric(ctx: &Context, level: u32) -> Result<(), Error> {
    let hcfg = heegner_config(ctx)?;
    let geo = geometric_group(&hcfg)?;
    let coherence = lifted_point_coherence(&hcfg, &geo, level)?;
    let mut checks = Vec::new();
    for ((d, _), (d2, ok)) in geo.divisor_map.iter().zip(&coherence) {
        debug_assert_eq!(d, d2);
        let witness = verify_geometric_level(&hcfg, &geo, d, level)?;
        checks.push(GeometricCheck {
            divisor: d.to_string(),
            hecke_witness_level: witness.map(|w| w.level().to_string()),
            degeneracy_matches: *ok,
        });
    }
    let report = GeometricReport {
        ramified: geo.ramified.iter().map(|p| p.to_string()).collect(),
        m: geo.m.to_string(),
        g1_size: geo.g1_size_at_level(&hcfg, level)?,
        checks,
    };
    let mut table = format!(
        "ramified primes: {}\nm = {}\n|G1| at level {level}: {}\n",
        report.ramified.join(", "),
        report.m,
        report.g1_size
    );
    for c in &report.checks {
        table.push_str(&format!(
            "  d = {}: hecke {} | degeneracy {}\n",
            c.divisor,
            match &c.hecke_witness_level {
                Some(l) => format!("witness at level {l}"),
                None => "NO WITNESS".to_string(),
            },
            if c.degeneracy_matches { "ok" } else { "MISMATCH" }
        ));
    }
    emit(ctx, "geometric", report, table)
}

#[derive(Serialize)]
struct ThetaReport {
    m_level: u32,
    horizon: u32,
    degree_bound: i64,
    theta_ideal: LatticeJson,
    order_at_horizon: u64,
}

fn cmd_theta(ctx: &Context, m_level: u32, horizon: u32) -> Result<(), Error> {
    if horizon <= m_level {
        return Err(Error::Parse("--horizon must exceed --m-level".into()));
    }
    let hcfg = heegner_config(ctx)?;
    let reps = vec![GaloisElement::identity(&hcfg)];
    let theta = choose_theta(&hcfg, m_level, &reps, ctx.cfg.degree_bound, horizon)?;
    let upper = PicGroup::compute(&hcfg.order_at(horizon), ctx.cfg.budget)?;
    let cls = upper.class_of(&theta.contracted(&hcfg, horizon)?)?;
    let report = ThetaReport {
        m_level,
        horizon,
        degree_bound: ctx.cfg.degree_bound,
        theta_ideal: theta.ideal.to_json(),
        order_at_horizon: upper.order_of(cls),
    };
    let table = format!(
        "theta in ker(Pic(O_{horizon}) -> Pic(O_{m_level})), non-geometric with R = {{1}} up to degree {}\n  ideal: {}\n  class order at horizon: {}\n",
        report.degree_bound,
        lattice_line(&theta.ideal),
        report.order_at_horizon,
    );
    emit(ctx, "theta", report, table)
}

fn cmd_verify(ctx: &Context, suite: &str) -> Result<(), Error> {
    let vcfg = VerifyConfig {
        k: ctx.k.clone(),
        n_level: ctx.n_level.clone(),
        p: ctx.p.clone(),
        seed: ctx.cfg.seed,
        budget: ctx.cfg.budget,
    };
    let reports = run_suites(suite, &vcfg)?;
    let table = render_reports(&reports);
    let all_passed = reports.iter().all(|r| r.passed());
    emit(ctx, "verify", &reports, table)?;
    if !all_passed {
        return Err(Error::Internal("verification suite reported failures".into()));
    }
    Ok(())
}
