use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use segmap_core::automaton::{run_with_frames, AutomatonParams};
use segmap_core::grid::{compute_stats, save_grid, Encoding};
use segmap_core::layout::ortho::orthogonal_draw;
use segmap_core::layout::svg::ortho_svg;
use segmap_core::metrics::{emit_report, validate_topology, QualityReport};
use segmap_core::pipeline::{
    analyze, embed, load_source, profile_for, run_pipeline, write_label_map, Generator, Input, PipelineConfig, Source,
};
use segmap_core::raster::CellState;
use segmap_core::render::render_image;

#[derive(Parser)]
#[command(name = "segmap", version, about = "Topology-preserving 2D maps of n-D segmentations")]
struct Cli {
    /// Worker threads (default: all cores). 1 reproduces multi-threaded output exactly.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic segmentation as out/grid.ndseg.
    Gen {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        /// Binary ndseg instead of ascii.
        #[arg(long)]
        binary: bool,
    },
    /// Graph, planarization and initial raster: out/initial.castate, out/ortho.svg.
    Embed {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the automaton from a state dump (default: out/initial.castate).
    Optimize {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        auto: AutoArgs,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Shade a state dump into out/embedding.png.
    Render {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        look: RenderArgs,
        #[arg(long)]
        state: PathBuf,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Quality report of a state dump; no automaton run.
    Eval {
        #[command(flatten)]
        src: SourceArgs,
        #[arg(long)]
        state: PathBuf,
        /// Also write the JSON report here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Every stage.
    All {
        #[command(flatten)]
        src: SourceArgs,
        #[command(flatten)]
        auto: AutoArgs,
        #[command(flatten)]
        look: RenderArgs,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Gen {
    D1,
    D2,
}

#[derive(Args)]
struct SourceArgs {
    /// Segmentation file (.ndseg).
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    gen: Option<Gen>,
    #[arg(long, num_args = 1.., default_values_t = [50usize, 50])]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    segments: usize,
    /// Seed of the generator and of the automaton.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Split disconnected labels into separate segments.
    #[arg(long)]
    relabel: bool,
}

impl SourceArgs {
    fn source(&self) -> Result<Source> {
        Ok(match (&self.input, self.gen) {
            (Some(p), None) => Source::File(p.clone()),
            (None, Some(Gen::D2)) => Source::Generate(Generator::D2),
            (None, Some(Gen::D1)) => Source::Generate(Generator::D1 {
                dims: self.dims.clone(),
                segments: self.segments,
                seed: self.seed,
            }),
            _ => bail!("give exactly one of --input or --gen"),
        })
    }

    fn load(&self) -> Result<Input> {
        Ok(load_source(&self.source()?, self.relabel).context("stage load")?)
    }
}

#[derive(Args)]
struct AutoArgs {
    #[arg(long, default_value_t = 5000)]
    iterations: usize,
    #[arg(long, default_value_t = 7.0)]
    damping: f64,
    #[arg(long, default_value_t = 11)]
    security: u32,
    #[arg(long, default_value_t = 300)]
    removal_interval: usize,
    #[arg(long)]
    no_boundary_opt: bool,
    /// Dump a state every N iterations into out/frames/ (0 = off).
    #[arg(long, default_value_t = 0)]
    frames_every: usize,
}

impl AutoArgs {
    fn params(&self, seed: u64) -> AutomatonParams {
        AutomatonParams {
            max_iterations: self.iterations,
            damping: self.damping,
            security_threshold: self.security,
            removal_interval: self.removal_interval,
            optimize_boundaries: !self.no_boundary_opt,
            rng_seed: seed,
            ..AutomatonParams::default()
        }
    }
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, default_value_t = 8)]
    pixels_per_cell: usize,
    /// Lines of `label #rrggbb`.
    #[arg(long)]
    palette: Option<PathBuf>,
    /// Binary PPM instead of PNG.
    #[arg(long)]
    ppm: bool,
}

fn render_config(look: &RenderArgs, out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::new(Source::Generate(Generator::D2), out);
    cfg.pixels_per_cell = look.pixels_per_cell;
    cfg.palette = look.palette.clone();
    cfg.ppm = look.ppm;
    cfg
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).with_context(|| format!("creating {}", p.display()))
}

fn label_map(out: &Path, input: &Input) -> Result<()> {
    if !input.is_identity() {
        write_label_map(&out.join("label_map.json"), input)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen { src, out, binary } => {
            let input = src.load()?;
            mkdir(&out)?;
            let enc = if binary { Encoding::Binary } else { Encoding::Ascii };
            save_grid(&input.grid, out.join("grid.ndseg"), enc)?;
            label_map(&out, &input)?;
        }
        Cmd::Embed { src, out } => {
            let input = src.load()?;
            mkdir(&out)?;
            label_map(&out, &input)?;
            let emb = embed(&input.grid)?;
            info!("candidate {} of {}", emb.candidate, emb.candidates.len());
            emb.initial.save(out.join("initial.castate"))?;
            let check = validate_topology(&emb.initial, &emb.graph);
            println!(
                "initial {}x{}, {} crossings, topology {}",
                emb.initial.width(),
                emb.initial.height(),
                emb.initial.num_crossings(),
                if check.ok() { "ok" } else { "BROKEN" }
            );
            let drawing = orthogonal_draw(&emb.candidates[emb.candidate]).context("stage layout")?;
            fs::write(out.join("ortho.svg"), ortho_svg(&drawing))?;
        }
        Cmd::Optimize { src, auto, state, out } => {
            let input = src.load()?;
            let (stats, graph) = analyze(&input.grid);
            let path = state.unwrap_or_else(|| out.join("initial.castate"));
            let cs = CellState::load(&path, graph.clone()).context("stage load")?;
            let frames = out.join("frames");
            if auto.frames_every > 0 {
                mkdir(&frames)?;
            }
            let mut err = None;
            let r = run_with_frames(&cs, &stats, &auto.params(src.seed), auto.frames_every, |it, cs| {
                if err.is_none() {
                    err = cs.save(frames.join(format!("frame_{it:06}.castate"))).err();
                }
            });
            if let Some(e) = err {
                return Err(e).context("stage automaton");
            }
            mkdir(&out)?;
            r.state.save(out.join("state.castate"))?;
            print!("{}", QualityReport::new(&r.state, &stats, r.iterations_used).table());
        }
        Cmd::Render { src, look, state, out } => {
            let input = src.load()?;
            let (_, graph) = analyze(&input.grid);
            let cs = CellState::load(&state, graph.clone()).context("stage load")?;
            let cfg = render_config(&look, &out);
            let img = render_image(&cs, &profile_for(&cfg, &graph)?).context("stage render")?;
            mkdir(&out)?;
            let name = if look.ppm { "embedding.ppm" } else { "embedding.png" };
            img.save(out.join(name), look.ppm)?;
        }
        Cmd::Eval { src, state, out } => {
            let input = src.load()?;
            let stats = compute_stats(&input.grid);
            let (_, graph) = analyze(&input.grid);
            let cs = CellState::load(&state, graph.clone()).context("stage load")?;
            let check = validate_topology(&cs, &graph);
            let report = QualityReport::new(&cs, &stats, 0);
            match out {
                Some(dir) => {
                    mkdir(&dir)?;
                    emit_report(&report, dir.join("report.json"))?;
                }
                None => print!("{}", report.table()),
            }
            if !check.ok() {
                bail!("stage eval: state does not preserve the topology: {check}");
            }
        }
        Cmd::All { src, auto, look, out } => {
            let mut cfg = render_config(&look, &out);
            cfg.source = src.source()?;
            cfg.relabel = src.relabel;
            cfg.params = auto.params(src.seed);
            cfg.frames_every = auto.frames_every;
            run_pipeline(&cfg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SEGMAP_LOG", "warn")).init();
    let cli = Cli::parse();
    let threads = cli.threads;
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(e.into()),
        },
        None => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("segmap: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
