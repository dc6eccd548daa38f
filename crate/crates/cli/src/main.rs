use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use extsym::algebra::AlgebraPresentation;
use extsym::ext::ext_dim;
use extsym::field::Rationals;
use extsym::format::{parse_algebra, parse_catalog, parse_module, Catalog};
use extsym::forms::{PrimePolicy, SignatureMode};
use extsym::hom::hom_dim;
use extsym::instances::{a2_instance, Named};
use extsym::module::RepModule;
use extsym::series::{composition_series, ext_symmetry_audit, Membership};
use extsym::verify::{run_audit_suite, AuditConfig, Instance, Verifier, VerifyOptions};

mod render;

#[derive(Parser)]
#[command(name = "extsym", version, about = "Module calculus over quivers with relations and multiplication-formula checks")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// Algebra definition file (TOML).
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,
    /// Module file, or the name of a catalog member. Repeat for M and N.
    #[arg(long = "module", global = true)]
    modules: Vec<String>,
    /// Catalog file (TOML) naming the modules that may occur as middle terms.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Comma-separated simples: catalog names or vertex ids.
    #[arg(long, global = true, value_delimiter = ',')]
    simples: Vec<String>,
    /// Comma-separated primes to sample at, in order of preference.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Vec<u64>,
    /// Override the degree bound used for interpolation.
    #[arg(long, global = true)]
    degree_bound: Option<usize>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Try seeded random isomorphisms before the deterministic search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Verify even when the Ext-symmetry audit fails.
    #[arg(long, global = true)]
    allow_asymmetric: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra file.
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
    /// Hom and Ext¹ dimensions in both directions.
    Ext {
        #[command(subcommand)]
        action: ExtAction,
    },
    /// Euler characteristics of quiver Grassmannians of a module.
    Grassmann {
        #[command(subcommand)]
        action: ChiAction,
    },
    /// Euler characteristics of composition-series flag varieties of a module.
    Flag {
        #[command(subcommand)]
        action: ChiAction,
    },
    /// Evaluation-form signature of one module, or the multiplicativity check for two.
    Delta,
    /// Stratify the projectivized Ext¹(X,Y) by middle term.
    Stratify,
    /// Ext-symmetry audit over a catalog, or the built-in suite without --algebra.
    Audit,
    /// Check a multiplication formula for the pair (M, N).
    Verify {
        #[command(subcommand)]
        formula: FormulaArg,
    },
    /// Run the built-in audit suite and the worked A₂ instance.
    Selftest,
}

#[derive(Subcommand)]
enum AlgebraAction {
    Check,
}

#[derive(Subcommand)]
enum ExtAction {
    Dim,
}

#[derive(Subcommand)]
enum ChiAction {
    Chi,
}

#[derive(Subcommand, Clone, Copy)]
enum FormulaArg {
    /// Grassmannian form with the EF^g term.
    F1,
    /// Flag form.
    F2,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    command: &'static str,
    pass: bool,
    report: T,
}

/// Everything a command may need, loaded on demand from the flags.
struct Session {
    opts: Opts,
    algebra: Option<Arc<AlgebraPresentation>>,
    catalog: Option<Catalog>,
}

impl Session {
    fn load(opts: Opts) -> Result<Self> {
        let algebra = match &opts.algebra {
            Some(p) => Some(Arc::new(parse_algebra(&read(p)?).with_context(|| format!("reading {}", p.display()))?)),
            None => None,
        };
        let catalog = match (&opts.catalog, &algebra) {
            (Some(p), Some(a)) => Some(parse_catalog(a, &read(p)?).with_context(|| format!("reading {}", p.display()))?),
            (Some(_), None) => bail!("--catalog needs --algebra"),
            _ => None,
        };
        Ok(Session { opts, algebra, catalog })
    }

    fn algebra(&self) -> Result<&Arc<AlgebraPresentation>> {
        self.algebra.as_ref().ok_or_else(|| anyhow!("this command needs --algebra"))
    }

    fn module(&self, spec: &str) -> Result<Named> {
        let alg = self.algebra()?;
        let path = Path::new(spec);
        if path.is_file() {
            return parse_module(alg, &read(path)?).with_context(|| format!("reading {spec}"));
        }
        if let Some(m) = self.catalog.as_ref().and_then(|c| c.get(spec)) {
            return Ok(m.clone());
        }
        bail!("{spec:?} is neither a module file nor a catalog member")
    }

    fn modules(&self, want: usize) -> Result<Vec<Named>> {
        if self.opts.modules.len() != want {
            bail!("expected {want} --module argument(s), got {}", self.opts.modules.len());
        }
        self.opts.modules.iter().map(|s| self.module(s)).collect()
    }

    fn simples(&self) -> Result<Vec<Named>> {
        let alg = self.algebra()?;
        let vertex_simple = |v: &str| -> Result<Named> {
            let i = alg.quiver().vertex_index(v)?;
            Ok((format!("S{v}"), RepModule::vertex_simple(alg.clone(), Rationals, i)?))
        };
        if !self.opts.simples.is_empty() {
            return self
                .opts
                .simples
                .iter()
                .map(|s| match self.catalog.as_ref().and_then(|c| c.get(s)) {
                    Some(m) => Ok(m.clone()),
                    None => vertex_simple(s).with_context(|| format!("simple {s:?} is neither a catalog member nor a vertex")),
                })
                .collect();
        }
        if let Some(c) = &self.catalog {
            if !c.simples.is_empty() {
                return Ok(c.simples.clone());
            }
        }
        alg.quiver().vertices().iter().map(|v| vertex_simple(v)).collect()
    }

    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            policy: PrimePolicy {
                primes: (!self.opts.primes.is_empty()).then(|| self.opts.primes.clone()),
                degree_bound: self.opts.degree_bound,
            },
            allow_asymmetric: self.opts.allow_asymmetric,
            iso_seed: self.opts.seed,
        }
    }

    fn verifier(&self) -> Result<Verifier> {
        let instance = Instance {
            algebra: self.algebra()?.clone(),
            simples: self.simples()?,
            catalog: self.catalog.as_ref().map(|c| c.members.clone()).unwrap_or_default(),
        };
        Ok(Verifier::new(instance, self.options())?)
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn emit<T: Serialize>(json: bool, command: &'static str, pass: bool, report: T, human: impl FnOnce(&T) -> String) -> Result<bool> {
    if json {
        println!("{}", serde_json::to_string_pretty(&Envelope { command, pass, report })?);
    } else {
        print!("{}", human(&report));
        println!("verdict: {}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}

#[derive(Serialize)]
struct ExtReport {
    m: String,
    n: String,
    hom_mn: usize,
    hom_nm: usize,
    ext_mn: usize,
    ext_nm: usize,
    symmetric: bool,
}

#[derive(Serialize)]
struct SelftestReport {
    suite: extsym::verify::SuiteReport,
    worked_f1: bool,
    worked_f2: bool,
}

fn run(cli: Cli) -> Result<bool> {
    let json = cli.opts.json;
    let cx = Session::load(cli.opts)?;
    match cli.command {
        Command::Algebra { action: AlgebraAction::Check } => {
            let report = render::AlgebraReport::new(cx.algebra()?);
            emit(json, "algebra check", true, report, render::algebra)
        }
        Command::Ext { action: ExtAction::Dim } => {
            let mut ms = cx.modules(cx.opts.modules.len().clamp(1, 2))?;
            if ms.len() == 1 {
                ms.push(ms[0].clone());
            }
            let (m, n) = (&ms[0], &ms[1]);
            let ext_mn = ext_dim(&m.1, &n.1)?;
            let ext_nm = ext_dim(&n.1, &m.1)?;
            let report = ExtReport {
                m: m.0.clone(),
                n: n.0.clone(),
                hom_mn: hom_dim(&m.1, &n.1)?,
                hom_nm: hom_dim(&n.1, &m.1)?,
                ext_mn,
                ext_nm,
                symmetric: ext_mn == ext_nm,
            };
            emit(json, "ext dim", true, report, |r| {
                format!(
                    "dim Hom({m},{n}) = {}\ndim Hom({n},{m}) = {}\ndim Ext1({m},{n}) = {}\ndim Ext1({n},{m}) = {}\n",
                    r.hom_mn,
                    r.hom_nm,
                    r.ext_mn,
                    r.ext_nm,
                    m = r.m,
                    n = r.n
                )
            })
        }
        Command::Grassmann { action: ChiAction::Chi } | Command::Flag { action: ChiAction::Chi } => {
            let (mode, name) = match cli.command {
                Command::Grassmann { .. } => (SignatureMode::Grassmann, "grassmann chi"),
                _ => (SignatureMode::Flag, "flag chi"),
            };
            let m = cx.modules(1)?.remove(0);
            let sig = cx.verifier()?.signature(&m.0, &m.1, mode)?;
            let pass = sig.values.iter().all(|v| v.is_verified());
            emit(json, name, pass, sig, render::signature)
        }
        Command::Delta => {
            let v = cx.verifier()?;
            if cx.opts.modules.len() == 2 {
                let ms = cx.modules(2)?;
                let report = v.multiplicativity(&ms[0], &ms[1])?;
                let pass = report.pass;
                emit(json, "delta", pass, report, render::multiplicativity)
            } else {
                let m = cx.modules(1)?.remove(0);
                let sig = v.signature(&m.0, &m.1, SignatureMode::Flag)?;
                let pass = sig.values.iter().all(|v| v.is_verified());
                emit(json, "delta", pass, sig, render::signature)
            }
        }
        Command::Stratify => {
            if cx.catalog.is_none() {
                bail!("stratify needs --catalog");
            }
            let ms = cx.modules(2)?;
            let table = cx.verifier()?.strata(&ms[0], &ms[1])?;
            let pass = table.totals_ok && table.values.iter().all(|v| v.is_verified());
            emit(json, "stratify", pass, table, render::strata)
        }
        Command::Audit => {
            if cx.algebra.is_none() {
                let mut config = AuditConfig::builtin();
                config.options = cx.options();
                let report = run_audit_suite(&config)?;
                let pass = report.pass;
                return emit(json, "audit", pass, report, render::suite);
            }
            let simples = cx.simples()?;
            let mut modules: Vec<Named> = if cx.opts.modules.is_empty() {
                cx.catalog.as_ref().map(|c| c.members.clone()).unwrap_or_default()
            } else {
                cx.opts.modules.iter().map(|s| cx.module(s)).collect::<Result<_>>()?
            };
            if modules.is_empty() {
                modules = simples.clone();
            }
            let bare: Vec<_> = simples.iter().map(|(_, s)| s.clone()).collect();
            let mut skipped = Vec::new();
            if cx.opts.modules.is_empty() {
                let mut kept = Vec::new();
                for m in modules {
                    match composition_series(&m.1, &bare)? {
                        Membership::Series(_) => kept.push(m),
                        Membership::NotInCategory => skipped.push(m.0),
                    }
                }
                modules = kept;
            }
            let mut pairs = Vec::new();
            for i in 0..modules.len() {
                for j in i..modules.len() {
                    pairs.push((modules[i].clone(), modules[j].clone()));
                }
            }
            let audit = ext_symmetry_audit(&simples, &pairs)?;
            let pass = audit.pass;
            emit(json, "audit", pass, render::CatalogAudit { audit, skipped }, render::catalog_audit)
        }
        Command::Verify { formula } => {
            if cx.catalog.is_none() {
                bail!("verify needs --catalog");
            }
            let ms = cx.modules(2)?;
            let v = cx.verifier()?;
            let (name, report) = match formula {
                FormulaArg::F1 => ("verify f1", v.verify_formula1(&ms[0], &ms[1])?),
                FormulaArg::F2 => ("verify f2", v.verify_formula2(&ms[0], &ms[1])?),
            };
            let pass = report.pass;
            emit(json, name, pass, report, render::verification)
        }
        Command::Selftest => {
            let mut config = AuditConfig::builtin();
            config.options = cx.options();
            let suite = run_audit_suite(&config)?;
            let a2 = a2_instance();
            let catalog = extsym::instances::direct_sums_up_to(&a2.indecomposables, 2)?;
            let v = Verifier::new(
                Instance {
                    algebra: a2.algebra.clone(),
                    simples: a2.simples.clone(),
                    catalog,
                },
                cx.options(),
            )?;
            let (s1, s2) = (&a2.simples[0], &a2.simples[1]);
            let report = SelftestReport {
                worked_f1: v.verify_formula1(s1, s2)?.pass,
                worked_f2: v.verify_formula2(s1, s2)?.pass,
                suite,
            };
            let pass = report.suite.pass && report.worked_f1 && report.worked_f2;
            emit(json, "selftest", pass, report, |r| {
                format!(
                    "{}worked instance (S1, S2): f1 {}, f2 {}\n",
                    render::suite(&r.suite),
                    render::mark(r.worked_f1),
                    render::mark(r.worked_f2)
                )
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
