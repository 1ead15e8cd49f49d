//! End-to-end driver: input → graph → layout → raster → automaton → render
//! → report, with per-stage timings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::automaton::{run_with_frames, AutomatonParams};
use crate::error::{Error, Result};
use crate::graph::{build_graph, SegGraph};
use crate::grid::{compute_stats, generate_d1, generate_d2, load_grid, relabel_connected_components, LabeledGrid, SegmentStats};
use crate::layout::planarize::{choose_external_face, planarize, PlanarizedGraph};
use crate::metrics::{emit_report, validate_topology, write_timings, QualityReport};
use crate::raster::{select_initial_config, CellState};
use crate::render::{load_palette, render_image, ShadingProfile};

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    D1 { dims: Vec<usize>, segments: usize, seed: u64 },
    D2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Generate(Generator),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub source: Source,
    pub params: AutomatonParams,
    pub pixels_per_cell: usize,
    pub palette: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// 0 disables frame dumps.
    pub frames_every: usize,
    pub relabel: bool,
    pub ppm: bool,
}

impl PipelineConfig {
    pub fn new(source: Source, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            source,
            params: AutomatonParams::default(),
            pixels_per_cell: 8,
            palette: None,
            out_dir: out_dir.into(),
            frames_every: 0,
            relabel: false,
            ppm: false,
        }
    }
}

/// Input grid with contiguous labels, plus the original id of each label.
#[derive(Debug, Clone)]
pub struct Input {
    pub grid: LabeledGrid,
    pub original_ids: Vec<u32>,
}

impl Input {
    /// True unless labels were renumbered or split.
    pub fn is_identity(&self) -> bool {
        self.original_ids.iter().enumerate().all(|(i, &o)| i as u32 == o)
    }
}

/// Loads or generates the grid, normalizing labels to `0..k` and splitting
/// disconnected labels when `relabel` is set.
pub fn load_source(source: &Source, relabel: bool) -> Result<Input> {
    let raw = match source {
        Source::File(p) => load_grid(p)?,
        Source::Generate(Generator::D1 { dims, segments, seed }) => generate_d1(dims, *segments, *seed)?,
        Source::Generate(Generator::D2) => generate_d2(),
    };
    let (grid, originals) = raw.normalized();
    if !relabel {
        return Ok(Input {
            grid,
            original_ids: originals,
        });
    }
    let split = relabel_connected_components(&grid);
    let mut ids = vec![0u32; split.num_labels()];
    for (&new, &old) in split.labels().iter().zip(grid.labels()) {
        ids[new as usize] = originals[old as usize];
    }
    Ok(Input {
        grid: split,
        original_ids: ids,
    })
}

/// Graph and chosen initial configuration of a grid.
#[derive(Debug, Clone)]
pub struct Embedded {
    pub stats: SegmentStats,
    pub graph: Arc<SegGraph>,
    pub initial: CellState,
    pub candidate: usize,
    /// Planarized graph per external-face candidate.
    pub candidates: Vec<PlanarizedGraph>,
    /// Stage name → seconds.
    pub timings: BTreeMap<String, f64>,
}

pub fn analyze(grid: &LabeledGrid) -> (SegmentStats, Arc<SegGraph>) {
    let stats = compute_stats(grid);
    let graph = Arc::new(build_graph(&stats));
    (stats, graph)
}

fn stage<T>(name: &str, timings: &mut BTreeMap<String, f64>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let out = f().map_err(|e| Error::Stage {
        stage: name.to_string(),
        source: Box::new(e),
    })?;
    timings.insert(name.to_string(), t.elapsed().as_secs_f64());
    Ok(out)
}

pub fn embed(grid: &LabeledGrid) -> Result<Embedded> {
    let mut timings = BTreeMap::new();
    let (stats, graph) = stage("graph", &mut timings, || Ok(analyze(grid)))?;
    let candidates = stage("planarize", &mut timings, || Ok(choose_external_face(&planarize(&graph))))?;
    let (initial, candidate) = stage("raster", &mut timings, || select_initial_config(&candidates, &graph))?;
    Ok(Embedded {
        stats,
        graph,
        initial,
        candidate,
        candidates,
        timings,
    })
}

/// Profile for `graph` with the configured pixel size and palette.
pub fn profile_for(cfg: &PipelineConfig, graph: &SegGraph) -> Result<ShadingProfile> {
    let mut p = ShadingProfile::new(cfg.pixels_per_cell.max(1), graph.num_segments());
    if let Some(path) = &cfg.palette {
        p.palette.extend(load_palette(path)?);
    }
    Ok(p)
}

pub fn write_label_map(path: &Path, input: &Input) -> Result<()> {
    let map: BTreeMap<usize, u32> = input.original_ids.iter().copied().enumerate().collect();
    let text = serde_json::to_string_pretty(&map).expect("map serializes") + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs every stage and writes `embedding.png` (or `.ppm`), `state.castate`,
/// `report.json`, `timings.json`, `label_map.json` when labels were renumbered, and frame
/// dumps under `frames/`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<QualityReport> {
    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut timings = BTreeMap::new();
    let input = stage("load", &mut timings, || load_source(&cfg.source, cfg.relabel))?;
    if !input.is_identity() {
        write_label_map(&out.join("label_map.json"), &input)?;
    }
    let emb = embed(&input.grid)?;
    timings.extend(emb.timings.clone());
    let frames_dir = out.join("frames");
    if cfg.frames_every > 0 {
        fs::create_dir_all(&frames_dir).map_err(|e| Error::io(&frames_dir, e))?;
    }
    let result = stage("automaton", &mut timings, || {
        let mut frame_err = None;
        let r = run_with_frames(&emb.initial, &emb.stats, &cfg.params, cfg.frames_every, |it, cs| {
            if frame_err.is_none() {
                frame_err = cs.save(frames_dir.join(format!("frame_{it:06}.castate"))).err();
            }
        });
        match frame_err {
            Some(e) => Err(e),
            None => Ok(r),
        }
    })?;
    let check = validate_topology(&result.state, &emb.graph);
    if !check.ok() {
        return Err(Error::Stage {
            stage: "automaton".into(),
            source: Box::new(Error::Layout(format!("final state broke the topology: {check}"))),
        });
    }
    stage("render", &mut timings, || {
        let profile = profile_for(cfg, &emb.graph)?;
        let img = render_image(&result.state, &profile)?;
        let name = if cfg.ppm { "embedding.ppm" } else { "embedding.png" };
        img.save(out.join(name), cfg.ppm)
    })?;
    result.state.save(out.join("state.castate"))?;
    let mut report = QualityReport::new(&result.state, &emb.stats, result.iterations_used);
    report.timings = timings;
    emit_report(&report, out.join("report.json"))?;
    write_timings(&report, out.join("timings.json"))?;
    Ok(report)
}
