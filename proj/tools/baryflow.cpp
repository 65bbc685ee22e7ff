// baryflow: render control passes, composite them, or run the whole pipeline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "baryflow/baryflow.hpp"

namespace fs = std::filesystem;
using namespace baryflow;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kIo = 3, kValidation = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Lookup:
      return kConfig;
    case ErrorKind::Io:
    case ErrorKind::Format:
      return kIo;
    case ErrorKind::Validation:
    case ErrorKind::Shape:
    case ErrorKind::DegenerateInput:
      return kValidation;
  }
  return kInternal;
}

struct ChainFlags {
  std::optional<double> hue;
  std::optional<double> saturation;
  std::optional<double> blur_sigma;
  std::optional<std::string> dither;
  std::string formula = "barycentric";

  void attach(CLI::App* cmd) {
    cmd->add_option("--hue", hue, "Rotate the hue of W by this many degrees");
    cmd->add_option("--saturation", saturation, "Scale the saturation of W")->check(CLI::NonNegativeNumber);
    cmd->add_option("--blur-sigma", blur_sigma, "Gaussian blur of W, in pixels")->check(CLI::PositiveNumber);
    cmd->add_option("--dither", dither, "Dither W: levels[:fs|bayer]");
    cmd->add_option("--formula", formula, "Compositing formula")
        ->check(CLI::IsMember({"barycentric", "classical"}));
  }

  // Steps always run in the order hue, saturation, blur, dither.
  ManipulatorChain chain() const {
    ManipulatorChain c;
    if (hue) c.steps.emplace_back(HueShiftStep{*hue});
    if (saturation) c.steps.emplace_back(SaturateStep{*saturation});
    if (blur_sigma) c.steps.emplace_back(BlurStep{*blur_sigma});
    if (dither) {
      DitherStep step;
      const auto colon = dither->find(':');
      const std::string levels = dither->substr(0, colon);
      try {
        std::size_t used = 0;
        step.spec.levels = std::stoi(levels, &used);
        if (used != levels.size()) throw std::invalid_argument(levels);
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidArgument, "--dither expects levels[:method], got '" + *dither + "'");
      }
      if (colon != std::string::npos) step.spec.method = parse_dither_method(dither->substr(colon + 1));
      c.steps.emplace_back(step);
    }
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barycentric compositing of rendered control-painting passes"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::optional<int> samples;
  int jobs = default_jobs();
  std::optional<fs::path> out;
  std::optional<std::string> frames;

  const auto common = [&](CLI::App* cmd, bool rendering) {
    cmd->add_option("--out", out, "Output directory (default: passes.output_dir, then $BARYFLOW_OUT)");
    cmd->add_option("--jobs", jobs, "Worker threads; never changes output bytes")->check(CLI::PositiveNumber);
    if (rendering) {
      cmd->add_option("--frames", frames, "Frame range a..b (default: whole timeline)");
      cmd->add_option("--seed", seed, "Base seed for light sampling");
      cmd->add_option("--samples", samples, "Area-light samples per shading point")->check(CLI::PositiveNumber);
    }
  };

  // render
  auto* render = app.add_subcommand("render", "Render one pass (t0, t1 or w) to PNG frames");
  fs::path render_scene;
  std::string pass;
  render->add_option("scene", render_scene, "Scene config (JSON)")->required();
  render->add_option("--pass", pass, "Pass to render")->required()->check(CLI::IsMember({"t0", "t1", "w"}));
  common(render, true);

  // composite
  auto* composite = app.add_subcommand("composite", "Composite T0/T1/W sequences into C frames");
  fs::path t0_manifest, t1_manifest, w_manifest;
  int bitdepth = 16;
  composite->add_option("t0", t0_manifest, "T0 manifest")->required();
  composite->add_option("t1", t1_manifest, "T1 manifest")->required();
  composite->add_option("w", w_manifest, "W manifest")->required();
  composite->add_option("--bitdepth", bitdepth, "Output PNG bit depth")->check(CLI::IsMember({8, 16}));
  ChainFlags composite_chain;
  composite_chain.attach(composite);
  common(composite, false);

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Render T0, T1, W (cached) and composite");
  fs::path pipeline_scene;
  pipeline->add_option("scene", pipeline_scene, "Scene config (JSON)")->required();
  ChainFlags pipeline_chain;
  pipeline_chain.attach(pipeline);
  common(pipeline, true);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic test scene");
  std::string gen_name;
  int gen_size = 0;
  gen->add_option("name", gen_name, "pond, mirrorbox or registration")->required();
  gen->add_option("--size", gen_size, "Square render size in pixels")->check(CLI::PositiveNumber);
  gen->add_option("--out", out, "Directory to write into")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*render) {
      const Scene scene = load_scene(render_scene);
      RenderRequest req;
      req.pass = parse_pass(pass);
      req.frames = frames ? parse_frame_range(*frames) : FrameRange{0, scene.timeline.frame_count - 1};
      req.seed = seed;
      req.light_samples = samples.value_or(scene.render.light_samples);
      req.jobs = jobs;
      const fs::path dir = resolve_output_root(out, &scene);
      const Manifest m = render_sequence(scene, req, dir);
      std::cout << pass_tag(m.pass) << ": " << m.frames.count() << " frame(s) -> "
                << (dir / manifest_file_name(m.pass)).string() << '\n';
    } else if (*composite) {
      CompositeJob job;
      job.t0_manifest = t0_manifest;
      job.t1_manifest = t1_manifest;
      job.w_manifest = w_manifest;
      job.chain = composite_chain.chain();
      job.formula = parse_formula(composite_chain.formula);
      job.output_dir = resolve_output_root(out, nullptr);
      job.bitdepth = bitdepth == 8 ? BitDepth::Eight : BitDepth::Sixteen;
      job.jobs = jobs;
      const Manifest m = composite_sequence(job);
      std::cout << "c: " << m.frames.count() << " frame(s) -> "
                << (job.output_dir / manifest_file_name(PassKind::Composite)).string() << '\n';
    } else if (*pipeline) {
      PipelineRun run;
      run.scene_path = pipeline_scene;
      if (frames) run.frames = parse_frame_range(*frames);
      run.seed = seed;
      run.light_samples = samples;
      run.jobs = jobs;
      run.chain = pipeline_chain.chain();
      run.formula = parse_formula(pipeline_chain.formula);
      run.output_root = out;
      const PipelineReport report = run_pipeline(run);
      for (const PassOutcome& p : report.passes) {
        std::cout << pass_tag(p.pass) << ": " << (p.rendered ? "rendered " : "cached ")
                  << p.manifest.frames.count() << " frame(s)\n";
      }
      std::cout << "c: composited " << report.composite.frames.count() << " frame(s) -> "
                << report.output_root.string() << '\n';
    } else if (*gen) {
      const fs::path config = testscenes::generate(gen_name, *out, gen_size);
      std::cout << config.string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "baryflow: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "baryflow: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
