//! The `goe` command line. Each subcommand parses its flags, calls library
//! operations and prints a short report.
//!
//! Exit codes: 0 success, 1 checked and negative, 2 usage or input error,
//! 3 resource cap.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ca::{LinearCA, Pattern};
use crate::codec::{self, Artifact, GoeWitness, MepWitness, RunManifest};
use crate::eden::{self, MATRIX_CAP};
use crate::error::{Error, Result};
use crate::exact::parse_rational;
use crate::ff::ext::ExtField;
use crate::group::{self, ElementSet, GroupCtx, SearchSpace, EXHAUSTIVE_CAP};
use crate::lemma1;
use crate::ore;
use crate::synth::{self, Mode, SynthesisSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Default worker count for caller-level parallelism when `--threads` is absent.
pub const THREADS_ENV: &str = "GOE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "goe", version, about = "Gardens of Eden and pre-injectivity for linear cellular automata on groups")]
pub struct Cli {
    /// Worker threads for family checks and sweeps (default: $GOE_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write a run manifest (command, seed, output digests, wall times) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the cycle system for n and check its size identities.
    Lemma1(Lemma1Args),
    /// Synthesize a certified linear automaton from an expansion preset.
    Synth(SynthArgs),
    /// Searches and certificates for an automaton file.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// The two-generator-pair example on the free product of three involutions.
    Muller(MullerArgs),
    /// Group-ring Ore solver and failure witnesses.
    #[command(subcommand)]
    Ore(OreCmd),
    /// Exhaustive check of an affine expansion claim.
    Expansion(ExpansionArgs),
    /// Write a preset automaton to a file.
    MakeCa(MakeCaArgs),
    /// Rerun a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct Lemma1Args {
    #[arg(long)]
    pub n: usize,
    /// Check every size identity.
    #[arg(long)]
    pub verify: bool,
    /// Replicate and add the extra point for this expansion constant.
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Certified,
    Sampled,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value = "w5")]
    pub group: String,
    /// Expansion preset; without one, S0 is the generating set of --group and --c is required.
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma separated primes, tried in order.
    #[arg(long, value_delimiter = ',')]
    pub p_ladder: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "certified")]
    pub mode: ModeArg,
    /// Random families per draw in sampled mode.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long)]
    pub retries: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum AnalyzeCmd {
    /// Garden-of-Eden search on ball(w).
    Goe {
        #[arg(long)]
        ca: PathBuf,
        #[arg(long, default_value_t = 0)]
        window_radius: usize,
        #[arg(long, default_value_t = MATRIX_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel search for configurations supported in ball(r).
    Mep {
        #[arg(long)]
        ca: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = MATRIX_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pre-injectivity certificate for configurations with support exactly F.
    Cert {
        #[arg(long)]
        ca: PathBuf,
        /// JSON list of words, e.g. '["1","x1"]', or a comma separated list.
        #[arg(long)]
        support: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded comparison of the two searches on a free abelian group.
    Mmprobe {
        #[arg(long)]
        ca: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct MullerArgs {
    /// Print the matrix, a Garden of Eden and the kernel searches.
    #[arg(long)]
    pub demo: bool,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum OreCmd {
    /// Find b, t != 0 with a t = b s.
    Solve {
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group-ring matrix, zero rows and bounded kernel search.
    Witness {
        /// `muller` or a path to an automaton file.
        #[arg(long, default_value = "muller")]
        source: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct ExpansionArgs {
    #[arg(long, default_value = "tree5")]
    pub preset: String,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// Only sets with at most this many elements.
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long, default_value_t = EXHAUSTIVE_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CaPreset {
    Muller,
    Identity,
    Zero,
    Shift,
}

#[derive(Args, Debug)]
pub struct MakeCaArgs {
    #[arg(long, value_enum)]
    pub preset: CaPreset,
    /// Group for identity and zero.
    #[arg(long, default_value = "z")]
    pub group: String,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub path: PathBuf,
}

/// Per-run bookkeeping for the manifest.
#[derive(Default)]
struct Session {
    out: String,
    outputs: BTreeMap<String, String>,
    wall: BTreeMap<String, u64>,
    seed: Option<u64>,
    presets: Vec<String>,
}

impl Session {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn save<T: Artifact>(&mut self, path: &Option<PathBuf>, x: &T) -> Result<()> {
        if let Some(path) = path {
            let digest = codec::write(path, x)?;
            self.line(format!("wrote {} ({})", path.display(), &digest[..16]));
            self.outputs.insert(path.display().to_string(), digest);
        }
        Ok(())
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let r = f();
        self.wall.insert(phase.to_string(), t.elapsed().as_millis() as u64);
        r
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded(_) => EXIT_CAP,
        Error::LadderExhausted(_) => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

/// Output text and exit code of one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK { (text, String::new(), code) } else { (String::new(), text, code) };
        }
    };
    let threads = cli.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => return (String::new(), format!("error: thread pool: {e}\n"), EXIT_USAGE),
    };
    let command: Vec<String> = strip_manifest_flag(&argv[1.min(argv.len())..]);
    let manifest_path = cli.manifest.clone();
    let mut session = Session::default();
    let started = Instant::now();
    let result = pool.install(|| execute(&cli.command, &mut session));
    session.wall.insert("total".into(), started.elapsed().as_millis() as u64);
    match result {
        Ok(code) => {
            if let Some(path) = manifest_path {
                let m = RunManifest {
                    command,
                    seed: session.seed,
                    presets: session.presets.clone(),
                    tool_version: env!("CARGO_PKG_VERSION").to_string(),
                    outputs: session.outputs.clone(),
                    wall_time_ms: session.wall.clone(),
                };
                if let Err(e) = codec::encode_manifest(&m).and_then(|t| Ok(std::fs::write(&path, t)?)) {
                    return (session.out, format!("error: {e}\n"), exit_code(&e));
                }
                session.line(format!("manifest {}", path.display()));
            }
            (session.out, String::new(), code)
        }
        Err(e) => (session.out, format!("error: {e}\n"), exit_code(&e)),
    }
}

/// Runs with process arguments, prints, returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (out, err, code) = run(argv);
    print!("{out}");
    eprint!("{err}");
    code
}

fn strip_manifest_flag(args: &[std::ffi::OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        let a = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
        } else if a == "--manifest" {
            skip = true;
        } else if !a.starts_with("--manifest=") {
            out.push(a);
        }
    }
    out
}

fn execute(cmd: &Command, s: &mut Session) -> Result<i32> {
    match cmd {
        Command::Lemma1(a) => cmd_lemma1(a, s),
        Command::Synth(a) => cmd_synth(a, s),
        Command::Analyze(a) => cmd_analyze(a, s),
        Command::Muller(a) => cmd_muller(a, s),
        Command::Ore(a) => cmd_ore(a, s),
        Command::Expansion(a) => cmd_expansion(a, s),
        Command::MakeCa(a) => cmd_make_ca(a, s),
        Command::Replay(a) => cmd_replay(a, s),
    }
}

fn cmd_lemma1(a: &Lemma1Args, s: &mut Session) -> Result<i32> {
    let mut sys = lemma1::build(a.n)?;
    if let Some(c) = &a.c {
        sys = lemma1::augment(&sys, &parse_rational(c)?)?;
    }
    s.line(format!("n={} k={} sizeY={} extra_point={}", sys.n(), sys.k(), sys.size_y(), sys.extra_point().is_some()));
    let mut code = EXIT_OK;
    if a.verify {
        let report = s.time("verify", || lemma1::verify_counts(&sys))?;
        if report.passed() {
            s.line(format!(
                "all-counts-pass ({} pairs, {}, ln n >= {})",
                report.pairs_checked,
                if report.exhaustive { "exhaustive" } else { "sampled" },
                report.ln_lower_bound
            ));
        } else {
            for v in &report.violations {
                s.line(format!("violation: {v}"));
            }
            code = EXIT_NEGATIVE;
        }
    }
    s.save(&a.out, &sys)?;
    Ok(code)
}

fn cmd_synth(a: &SynthArgs, s: &mut Session) -> Result<i32> {
    let ctx = GroupCtx::from_name(&a.group)?;
    let mode = match a.mode {
        ModeArg::Certified => Mode::Certified,
        ModeArg::Sampled => Mode::Sampled(a.samples),
    };
    let mut spec = match &a.preset {
        Some(name) => {
            let spec = SynthesisSpec::preset(name, a.seed, mode)?;
            if spec.ctx != ctx {
                return Err(Error::Mismatch(format!("preset {name} lives on {}, not {}", group_label(&spec.ctx), a.group)));
            }
            s.presets.push(name.clone());
            spec
        }
        None => {
            let c = a.c.as_deref().ok_or_else(|| Error::Precondition("--c is required without --preset".into()))?;
            SynthesisSpec {
                s0: ctx.generators(),
                ctx,
                epsilon: parse_rational(a.epsilon.as_deref().unwrap_or("2"))?,
                c: parse_rational(c)?,
                p_ladder: vec![2, 3, 5, 7, 11, 13],
                max_prime: synth::DEFAULT_MAX_PRIME,
                seed: a.seed,
                mode,
                retries: synth::DEFAULT_RETRIES,
            }
        }
    };
    if let Some(e) = &a.epsilon {
        spec.epsilon = parse_rational(e)?;
    }
    if let Some(c) = &a.c {
        spec.c = parse_rational(c)?;
    }
    if let Some(l) = &a.p_ladder {
        spec.p_ladder = l.clone();
    }
    if let Some(r) = a.retries {
        spec.retries = r;
    }
    s.seed = Some(a.seed);
    let plan = synth::plan(&spec)?;
    s.line(format!("plan: k={} #S={} n={}", plan.k, plan.s.len(), plan.n));
    let out = match s.time("synthesize", || synth::synthesize(&spec)) {
        Ok(out) => out,
        Err(Error::LadderExhausted(msg)) => {
            s.line(format!("no certified draw: {msg}"));
            return Ok(EXIT_NEGATIVE);
        }
        Err(e) => return Err(e),
    };
    let failed = out.attempts.iter().filter(|t| t.failure.is_some()).count();
    s.line(format!("draws: {} ({failed} failed)", out.attempts.len()));
    let cert = &out.certificate;
    s.line(format!(
        "certified: p={} seed={} sizeY={} m={} families_checked={} maximal_vectors={} mode={}",
        cert.p,
        cert.seed,
        cert.size_y,
        out.ca.m(),
        cert.families_checked,
        cert.maximal_family_descriptors.len(),
        if cert.probabilistic { "sampled (probabilistic)" } else { "certified" }
    ));
    s.save(&a.out, &out.ca)?;
    s.save(&a.cert, cert)?;
    Ok(if cert.is_valid() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn group_label(ctx: &GroupCtx) -> String {
    serde_json::to_string(ctx).unwrap_or_default()
}

fn show_vec(v: &[u64]) -> String {
    if v.len() <= 8 {
        let items: Vec<String> = v.iter().map(u64::to_string).collect();
        return format!("({})", items.join(","));
    }
    let items: Vec<String> = v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, x)| format!("e{j}*{x}")).collect();
    if items.is_empty() {
        "0".into()
    } else {
        items.join(" + ")
    }
}

fn show_pattern(ctx: &GroupCtx, p: &Pattern) -> String {
    let items: Vec<String> = p
        .window()
        .iter()
        .zip(p.values())
        .filter(|(_, v)| p.window().len() == 1 || v.iter().any(|&x| x != 0))
        .map(|(g, v)| format!("{} -> {}", ctx.pretty(g), show_vec(v)))
        .collect();
    format!("{{{}}}", items.join("; "))
}

fn parse_support(ctx: &GroupCtx, text: &str) -> Result<ElementSet> {
    let items: Vec<String> = if text.trim_start().starts_with('[') && !ctx.is_abelian()
        || text.trim_start().starts_with("[\"")
    {
        serde_json::from_str(text).map_err(|e| Error::Decode(format!("--support: {e}")))?
    } else {
        split_top_level(text)
    };
    let words = items.iter().map(|w| ctx.parse_word(w)).collect::<Result<Vec<_>>>()?;
    Ok(ElementSet::new(words))
}

/// Splits on commas outside brackets, so `[1,0], [0,1]` gives two items.
fn split_top_level(text: &str) -> Vec<String> {
    let text = text.trim();
    let inner = if text.starts_with("[[") && text.ends_with("]]") { &text[1..text.len() - 1] } else { text };
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn cmd_analyze(a: &AnalyzeCmd, s: &mut Session) -> Result<i32> {
    match a {
        AnalyzeCmd::Goe { ca, window_radius, cap, out } => {
            let ca: LinearCA = codec::read(ca)?;
            let window = ca.ctx().ball(*window_radius);
            let found = s.time("goe", || eden::goe_window(&ca, &window, *cap))?;
            match found {
                Some(pattern) => {
                    s.line(format!("goe: found on ball({window_radius}) ({} cells)", window.len()));
                    s.line(format!("pattern: {}", show_pattern(ca.ctx(), &pattern)));
                    s.save(out, &GoeWitness { ctx: ca.ctx().clone(), p: ca.p(), pattern })?;
                    Ok(EXIT_OK)
                }
                None => {
                    s.line(format!("goe: none on ball({window_radius}) (image map has full rank)"));
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        AnalyzeCmd::Mep { ca, radius, cap, out } => {
            let ca: LinearCA = codec::read(ca)?;
            let found = s.time("mep", || eden::mep_search_capped(&ca, *radius, *cap))?;
            match found {
                Some(pair) => {
                    s.line(format!("mep: found at radius {radius}"));
                    s.line(format!("phi1: {}", show_pattern(ca.ctx(), &pair.phi1)));
                    s.line(format!("phi2: {}", show_pattern(ca.ctx(), &pair.phi2)));
                    s.save(out, &MepWitness { ctx: ca.ctx().clone(), p: ca.p(), radius: *radius, pair })?;
                    Ok(EXIT_OK)
                }
                None => {
                    s.line(format!("mep: none with support in ball({radius})"));
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        AnalyzeCmd::Cert { ca, support, out } => {
            let ca: LinearCA = codec::read(ca)?;
            let f = parse_support(ca.ctx(), support)?;
            match s.time("cert", || eden::preinj_certificate(&ca, &f))? {
                Some(cert) => {
                    s.line(format!(
                        "certificate: #F={} f={} sumX={} sizeY={} kernel_dim={}",
                        cert.support.len(),
                        cert.f,
                        cert.sum_x,
                        cert.size_y,
                        cert.kernel_dim
                    ));
                    s.save(out, &cert)?;
                    Ok(EXIT_OK)
                }
                None => {
                    s.line(format!("certificate: no f in F passes (#F={})", f.len()));
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        AnalyzeCmd::Mmprobe { ca, radius, window, out } => {
            let ca: LinearCA = codec::read(ca)?;
            let probe = s.time("mmprobe", || eden::mm_probe(&ca, *radius, *window))?;
            s.line(format!(
                "mmprobe: mep_found={} goe_found={} conclusive={} (radius {}, windows of at most {} cells)",
                probe.mep_found, probe.goe_found, probe.conclusive, probe.radius, probe.window
            ));
            s.save(out, &probe)?;
            Ok(if probe.conclusive { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn cmd_muller(a: &MullerArgs, s: &mut Session) -> Result<i32> {
    let ca = LinearCA::muller(a.p)?;
    s.presets.push("muller".into());
    if a.demo {
        let m = ca.to_groupring_matrix();
        s.line(format!("matrix: {}", m.pretty()));
        match eden::goe_unit_witness(&ca)? {
            Some(p) => s.line(format!("goe witness on {{1}}: {}", show_pattern(ca.ctx(), &p))),
            None => s.line("goe witness on {1}: none"),
        }
        for r in 0..=a.radius {
            match s.time(&format!("mep_r{r}"), || eden::mep_search(&ca, r))? {
                None => s.line(format!("mep r={r} over GF({}): none", a.p)),
                Some(pair) => {
                    let phi = pair.phi1.to_config(ca.field())?;
                    let verified = ca.apply(&phi)?.is_zero();
                    s.line(format!(
                        "mep r={r} over GF({}): kernel element {} (image zero: {verified})",
                        a.p,
                        show_pattern(ca.ctx(), &pair.phi1)
                    ));
                }
            }
        }
    }
    s.save(&a.out, &ca)?;
    Ok(EXIT_OK)
}

fn cmd_ore(a: &OreCmd, s: &mut Session) -> Result<i32> {
    match a {
        OreCmd::Solve { group, p, d, a, s: s_text, out } => {
            let ctx = GroupCtx::from_name(group)?;
            let field = ExtField::new(*p, *d)?;
            let a_el = ore::parse_elem(&ctx, &field, a)?;
            let s_el = ore::parse_elem(&ctx, &field, s_text)?;
            let sol = s.time("ore_solve", || ore::ore_solve(&a_el, &s_el))?;
            let holds = ore::gr_mul(&a_el, &sol.t)? == ore::gr_mul(&sol.b, &s_el)?;
            s.line(format!("b = {}", sol.b.pretty()));
            s.line(format!("t = {}", sol.t.pretty()));
            s.line(format!("a*t == b*s: {holds} (box side {})", sol.box_side));
            s.save(out, &sol)?;
            Ok(if holds && !sol.t.is_zero() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        OreCmd::Witness { source, radius, p, out } => {
            let ca = if source == "muller" {
                s.presets.push("muller".into());
                LinearCA::muller(*p)?
            } else {
                codec::read(Path::new(source))?
            };
            let w = s.time("witness", || ore::failure_witness(&ca, *radius))?;
            s.line(format!("matrix: {}", w.matrix.pretty()));
            let rows: Vec<String> = w.zero_rows.iter().map(|i| format!("{i} (row {})", i + 1)).collect();
            s.line(format!("zero rows: [{}]", rows.join(", ")));
            match &w.kernel {
                Some(k) => s.line(format!("kernel at radius {radius}: {}", show_pattern(ca.ctx(), &k.phi1))),
                None => s.line(format!("kernel at radius {radius}: none")),
            }
            s.line(format!("witness: {}", w.is_witness()));
            s.save(out, &w)?;
            Ok(if w.is_witness() { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn cmd_expansion(a: &ExpansionArgs, s: &mut Session) -> Result<i32> {
    let (ctx, set, c, b) = group::preset_expansion(&a.preset)?;
    s.presets.push(a.preset.clone());
    let space = match a.max_size {
        Some(max_size) => SearchSpace::BoundedSize { radius: a.radius, max_size },
        None => SearchSpace::Exhaustive { radius: a.radius },
    };
    let report = s.time("expansion", || group::expansion_report(&ctx, &set, &c, &b, &space, a.cap))?;
    s.line(format!("claim: #(SF) >= {} #F + {} over {}", report.claim_c, report.claim_b, report.search));
    s.line(format!("sets checked: {}", report.sets_checked));
    let witness: Vec<String> = report.witness.iter().map(|g| ctx.pretty(g)).collect();
    s.line(format!("min slack: {} at F = {{{}}}", report.min_slack, witness.join(", ")));
    Ok(if report.min_slack >= num_rational::BigRational::from_integer(0.into()) { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_make_ca(a: &MakeCaArgs, s: &mut Session) -> Result<i32> {
    let ca = match a.preset {
        CaPreset::Muller => LinearCA::muller(a.p)?,
        CaPreset::Identity => LinearCA::identity(GroupCtx::from_name(&a.group)?, a.p, a.m)?,
        CaPreset::Zero => LinearCA::zero(GroupCtx::from_name(&a.group)?, a.p, a.m)?,
        CaPreset::Shift => LinearCA::z_shift(a.p, a.m)?,
    };
    s.save(&Some(a.out.clone()), &ca)?;
    Ok(EXIT_OK)
}

fn cmd_replay(a: &ReplayArgs, s: &mut Session) -> Result<i32> {
    let text = std::fs::read_to_string(&a.path)?;
    let manifest = codec::decode_manifest(&text)?;
    let mut argv = vec!["goe".to_string()];
    argv.extend(manifest.command.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| Error::Decode(format!("manifest command: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Error::Precondition("a manifest cannot replay another manifest".into()));
    }
    let mut inner = Session::default();
    let code = execute(&cli.command, &mut inner)?;
    s.out.push_str(&inner.out);
    let mut same = inner.outputs == manifest.outputs;
    for (path, digest) in &manifest.outputs {
        let now = inner.outputs.get(path).map(String::as_str).unwrap_or("missing");
        let ok = now == digest;
        same &= ok;
        let _ = writeln!(s.out, "{path}: {}", if ok { "identical" } else { "DIFFERS" });
    }
    s.line(format!("replay: {}", if same { "reproduced" } else { "not reproduced" }));
    Ok(if same { code } else { EXIT_NEGATIVE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (String, String, i32) {
        run(std::iter::once("goe").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(go(&[]).2, EXIT_USAGE);
        assert_eq!(go(&["lemma1"]).2, EXIT_USAGE);
        assert_eq!(go(&["frobnicate"]).2, EXIT_USAGE);
        assert_eq!(go(&["--help"]).2, EXIT_OK);
        assert_eq!(go(&["lemma1", "--n", "0"]).2, EXIT_USAGE);
        assert_eq!(go(&["synth", "--group", "w3", "--preset", "tree5"]).2, EXIT_USAGE);
    }

    #[test]
    fn lemma1_reports_size() {
        let (out, _, code) = go(&["lemma1", "--n", "5", "--verify"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("sizeY=274"), "{out}");
        assert!(out.contains("all-counts-pass"), "{out}");
    }

    #[test]
    fn muller_demo() {
        let (out, _, code) = go(&["muller", "--demo", "--radius", "1"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("matrix: [[x, y + z], [0, 0]]") || out.contains("matrix: [[x, y + z],[0, 0]]"), "{out}");
        assert!(out.contains("goe witness on {1}: {1 -> (0,1)}"), "{out}");
        assert!(out.contains("mep r=1 over GF(2): none"), "{out}");
    }

    #[test]
    fn expansion_preset() {
        let (out, _, code) = go(&["expansion", "--preset", "tree5"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("sets checked: 63"), "{out}");
    }

    #[test]
    fn ore_solve_prints_identity() {
        let (out, err, code) = go(&["ore", "solve", "--group", "z", "--p", "3", "--a", "1 + u", "--s", "1 - u^2"]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(out.contains("a*t == b*s: true"), "{out}");
    }

    #[test]
    fn support_parsing() {
        let w3 = GroupCtx::w3();
        let a = parse_support(&w3, r#"["1","x1 x2"]"#).unwrap();
        let b = parse_support(&w3, "x1 x2, 1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        let z2 = GroupCtx::free_abelian(2).unwrap();
        assert_eq!(parse_support(&z2, "[[1,0],[0,1]]").unwrap().len(), 2);
        assert_eq!(parse_support(&z2, "[1,0], [0,1], [0,0]").unwrap().len(), 3);
    }

    #[test]
    fn manifest_flag_is_stripped() {
        let args: Vec<std::ffi::OsString> = ["lemma1", "--manifest", "m.json", "--n", "3", "--manifest=x"].iter().map(Into::into).collect();
        assert_eq!(strip_manifest_flag(&args), vec!["lemma1", "--n", "3"]);
    }
}
