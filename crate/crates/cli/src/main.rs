use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffqlat_cli::enumerate::enumerate_reduced_forms;
use ffqlat_cli::harness::{findings_jsonl, search_isospectral, verify_theorems};
use ffqlat_cli::{HarnessError, SearchConfig};
use ffqlat_core::algebra::{Field, FieldConfig, Laurent, Poly};
use ffqlat_core::fieldsums::{brute_force_isospectral, carlitz_isospectral, gauss_sum, gauss_sum_closed_form, FqQuadSpace, QFSystem, SystemFile};
use ffqlat_core::isometry::{automorphism_group, isometric};
use ffqlat_core::localdata::{audibility_experiment, genus_symbol, same_genus, Place};
use ffqlat_core::qform::{reduce, successive_minima, GramLattice, LatticeFile};
use ffqlat_core::spectrum::{enumerate_spectrum, SpectrumCache};
use ffqlat_core::theta::{functional_equation, theta_eval, ThetaPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ffqlat", version, about = "Definite quadratic lattices over F_q[t]")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Field order for commands that do not read a form file.
    #[arg(long, global = true, default_value_t = 3)]
    q: u32,
    /// Defining polynomial of F_q over F_p, ascending coefficients, e.g. "1,0,1".
    #[arg(long, global = true)]
    field_modulus: Option<String>,
    /// Largest lattice enumeration (vectors) for one spectrum.
    #[arg(long, global = true, default_value_t = 1 << 26)]
    budget: u128,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    rank: usize,
    #[arg(long, default_value_t = 2)]
    max_mu: u32,
    /// Only these patterns, e.g. "0,1,2;1,2,3".
    #[arg(long)]
    patterns: Option<String>,
    #[arg(long)]
    initial_bound: Option<u32>,
    #[arg(long)]
    cap: Option<u32>,
    /// Raw forms per stratum before switching to sampled diagonals.
    #[arg(long, default_value_t = 1 << 21)]
    form_budget: u128,
    #[arg(long, default_value_t = 48)]
    samples: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduced Gram and change of basis.
    Reduce {
        #[arg(long)]
        form: PathBuf,
    },
    Minima {
        #[arg(long)]
        form: PathBuf,
    },
    /// Representation numbers R(L, a) for deg a <= bound.
    Spectrum {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        bound: u32,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Exits 0 when isometric, 1 otherwise.
    Isometric {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        witness: bool,
    },
    /// Constant automorphisms of the reduced form.
    Auto {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        list: bool,
    },
    Genus {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Character averages at a prime and the Jordan symbol read back from them.
    Local {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        prime: String,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
    },
    /// theta_L at y = t^{-m}, x = t^shift * X.
    Theta {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
    },
    /// Functional equation at random points x = t^{1-2m} c.
    CheckFe {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Gauss sum of an F_q quadratic space, directly and in closed form.
    Gauss {
        /// Symmetric matrix of element indices, e.g. "[[1,0],[0,2]]".
        #[arg(long)]
        matrix: String,
    },
    /// Compares two systems of quadratic forms: Carlitz criterion and fiber counts.
    Carlitz {
        /// JSON list of two systems, each a list of symmetric index matrices.
        #[arg(long)]
        systems: PathBuf,
    },
    /// Definite reduced forms as JSON lines.
    Enumerate {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Case-by-case sweep of the classification claim.
    Verify {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Non-isometric pairs with equal spectra up to the cap.
    Search {
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

type Res<T> = Result<T, HarnessError>;

fn input(msg: impl Into<String>) -> HarnessError {
    HarnessError::Core(ffqlat_core::Error::InvalidInput(msg.into()))
}

fn load_form(path: &Path) -> Res<(Field, GramLattice)> {
    let text = std::fs::read_to_string(path)?;
    Ok(LatticeFile::from_json(&text)?.load()?)
}

fn reduced(path: &Path) -> Res<(Field, GramLattice)> {
    let (f, l) = load_form(path)?;
    let r = reduce(&l, &f)?.0;
    Ok((f, r))
}

impl Global {
    fn field_config(&self) -> Res<FieldConfig> {
        let mut cfg = FieldConfig::for_order(self.q)?;
        if let Some(m) = &self.field_modulus {
            let coeffs = m
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| input(format!("bad modulus coefficient {s:?}"))))
                .collect::<Res<Vec<_>>>()?;
            cfg.modulus = Some(coeffs);
        }
        Ok(cfg)
    }

    fn field(&self) -> Res<Field> {
        Ok(Field::from_config(&self.field_config()?)?)
    }

    fn emit(&self, text: &str) -> Res<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_json(&self, v: &serde_json::Value) -> Res<()> {
        self.emit(&format!("{}\n", serde_json::to_string_pretty(v)?))
    }

    fn search_config(&self, s: &SweepArgs) -> Res<SearchConfig> {
        let mut c = SearchConfig::new(self.q, s.rank, s.max_mu)?;
        c.field = self.field_config()?;
        c.initial_bound = s.initial_bound;
        c.escalation_cap = s.cap;
        c.spectrum_budget = self.budget;
        c.form_budget = s.form_budget;
        c.samples = s.samples;
        c.seed = self.seed;
        c.checkpoint = self.checkpoint.clone();
        c.output = self.out.clone();
        if let Some(p) = &s.patterns {
            let ps = p
                .split(';')
                .map(|pat| {
                    pat.split(',')
                        .map(|x| x.trim().parse::<u32>().map_err(|_| input(format!("bad pattern {pat:?}"))))
                        .collect::<Res<Vec<u32>>>()
                })
                .collect::<Res<Vec<_>>>()?;
            c.patterns = Some(ps);
        }
        c.validate()?;
        Ok(c)
    }
}

fn gram_rows(l: &GramLattice) -> Vec<Vec<String>> {
    l.gram().to_rows().iter().map(|r| r.iter().map(Poly::render).collect()).collect()
}

fn run(cli: &Cli) -> Res<i32> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Reduce { form } => {
            let (f, l) = load_form(form)?;
            let (r, u) = reduce(&l, &f)?;
            let u_rows: Vec<Vec<String>> = u.to_rows().iter().map(|r| r.iter().map(Poly::render).collect()).collect();
            g.emit_json(&json!({ "reduced": r.to_file(&f), "gram": gram_rows(&r), "minima": r.minima(), "u": u_rows }))?;
        }
        Cmd::Minima { form } => {
            let (f, l) = load_form(form)?;
            g.emit_json(&json!(successive_minima(&l, &f)?))?;
        }
        Cmd::Spectrum { form, bound, cache } => {
            let (f, l) = reduced(form)?;
            let s = match cache {
                Some(dir) => SpectrumCache::open(dir)?.get_or_compute(&l, *bound, g.budget, &f)?,
                None => enumerate_spectrum(&l, *bound, g.budget, &f)?,
            };
            let counts: Vec<(String, u64)> = s.counts.iter().map(|(a, c)| (a.render(), *c)).collect();
            g.emit_json(&json!({ "bound": s.bound, "dims": s.dims, "counts": counts }))?;
        }
        Cmd::Isometric { a, b, witness } => {
            let (fa, la) = load_form(a)?;
            let (fb, lb) = load_form(b)?;
            if fa.config() != fb.config() {
                return Err(input("forms are over different fields"));
            }
            let iso = isometric(&la, &lb, &fa)?;
            let mut out = json!({ "isometric": iso.is_some() });
            if let (Some(iso), true) = (&iso, witness) {
                let w: Vec<Vec<String>> = iso.full.to_rows().iter().map(|r| r.iter().map(Poly::render).collect()).collect();
                out["witness"] = json!(w);
            }
            g.emit_json(&out)?;
            return Ok(if iso.is_some() { 0 } else { 1 });
        }
        Cmd::Auto { form, list } => {
            let (f, l) = load_form(form)?;
            let group = automorphism_group(&l, &f)?;
            let mut out = json!({ "order": group.len() });
            if *list {
                out["elements"] = json!(group.iter().map(|w| w.to_indices()).collect::<Vec<_>>());
            }
            g.emit_json(&out)?;
        }
        Cmd::Genus { a, b } => {
            let (f, la) = load_form(a)?;
            let (_, lb) = load_form(b)?;
            let same = same_genus(&la, &lb, &f)?;
            g.emit_json(&json!({ "same_genus": same, "a": genus_symbol(&la, &f)?, "b": genus_symbol(&lb, &f)? }))?;
        }
        Cmd::Local { form, prime, kmax } => {
            let (f, l) = load_form(form)?;
            let place = Place::parse(prime, &f)?;
            g.emit_json(&serde_json::to_value(audibility_experiment(&l, &place, *kmax, &f)?)?)?;
        }
        Cmd::Theta { form, m, x, shift } => {
            let (f, l) = load_form(form)?;
            let xp = Laurent::from_poly_shifted(&Poly::parse(x, &f)?, *shift);
            let v = theta_eval(&l, &ThetaPoint::canonical(*m, xp), &f)?;
            let c = v.to_complex();
            g.emit_json(&json!({ "exact": v.render(), "complex": [c.re, c.im] }))?;
        }
        Cmd::CheckFe { form, trials } => {
            let (f, l) = reduced(form)?;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let mut worst = 0f64;
            let mut rows = Vec::new();
            for _ in 0..*trials {
                let m = rng.gen_range(1..=3i64);
                let deg = rng.gen_range(0..=3usize);
                let idx: Vec<u32> = (0..=deg).map(|_| rng.gen_range(0..f.q())).collect();
                let c = Poly::from_indices(&f, &idx)?;
                if c.is_zero() {
                    continue;
                }
                let fe = functional_equation(&l, &ThetaPoint::in_chart(m, &c), &f)?;
                worst = worst.max(fe.residual);
                rows.push(json!({ "m": m, "c": c.render(), "lhs": fe.lhs, "rhs": fe.rhs, "residual": fe.residual }));
            }
            g.emit_json(&json!({ "samples": rows, "max_residual": worst }))?;
            return Ok(if worst < 1e-6 { 0 } else { 1 });
        }
        Cmd::Gauss { matrix } => {
            let f = g.field()?;
            let rows: Vec<Vec<u32>> = serde_json::from_str(matrix)?;
            let w = FqQuadSpace::from_indices(&rows, &f)?;
            let (direct, closed) = (gauss_sum(&w, &f), gauss_sum_closed_form(&w, &f));
            let c = direct.to_complex();
            g.emit_json(&json!({
                "class": w.classify(&f),
                "direct": direct.render(),
                "closed_form": closed.render(),
                "equal": direct == closed,
                "complex": [c.re, c.im],
            }))?;
            return Ok(if direct == closed { 0 } else { 1 });
        }
        Cmd::Carlitz { systems } => {
            let f = g.field()?;
            let pair: Vec<SystemFile> = serde_json::from_str(&std::fs::read_to_string(systems)?)?;
            let [a, b] = &pair[..] else { return Err(input("expected a list of two systems")) };
            let (a, b) = (QFSystem::from_file(a, &f)?, QFSystem::from_file(b, &f)?);
            let criterion = carlitz_isospectral(&a, &b, g.budget, &f)?;
            let counted = brute_force_isospectral(&a, &b, &f);
            g.emit_json(&json!({ "carlitz": criterion, "fiber_counts": counted }))?;
            return Ok(if criterion == counted { 0 } else { 1 });
        }
        Cmd::Enumerate { sweep } => {
            let cfg = g.search_config(sweep)?;
            let f = cfg.field()?;
            let forms = enumerate_reduced_forms(&cfg)?;
            let mut s = String::new();
            for l in &forms {
                s.push_str(&l.to_json(&f));
                s.push('\n');
            }
            g.emit(&s)?;
            eprintln!("{} forms", forms.len());
        }
        Cmd::Verify { sweep } => {
            let cfg = g.search_config(sweep)?;
            let start = std::time::Instant::now();
            let report = verify_theorems(&cfg)?;
            print!("{}", report.summary_table());
            if let Some(p) = &g.out {
                std::fs::write(p, serde_json::to_string_pretty(&report)?)?;
                std::fs::write(p.with_extension("findings.jsonl"), findings_jsonl(report.findings())?)?;
            }
            eprintln!("wall time {:.1}s", start.elapsed().as_secs_f64());
            return Ok(report.exit_code());
        }
        Cmd::Search { sweep } => {
            let cfg = g.search_config(sweep)?;
            let findings = search_isospectral(&cfg)?;
            g.emit(&findings_jsonl(&findings)?)?;
            eprintln!("{} findings", findings.len());
            return Ok(if findings.is_empty() { 0 } else { 1 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 2 } else { 3 })
        }
    }
}
