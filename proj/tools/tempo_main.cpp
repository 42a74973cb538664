// tempo: non-reference temporal evaluation, online refinement and SOT-by-detection
// for per-frame detector output.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tempo/commands.hpp"

namespace
{

using namespace tempo;

void add_settings(CLI::App* app, cli::Settings& s)
{
  app->add_option("--score-threshold", s.assoc.score_threshold, "confidence threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--assoc-iou", s.assoc.iou_threshold, "association IoU threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--s-lost-max", s.assoc.max_lost, "frames a lost tracklet survives")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--s-obj-max", s.assoc.max_objects, "recent-box window length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--s-esde", s.thresholds.extremely_short, "extremely-short duration threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--s-sde", s.thresholds.short_duration, "short duration / reliability threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--omega", s.refiner.omega, "temporal fusion base")
      ->check(CLI::Range(1.0, 1e300))
      ->capture_default_str();
  app->add_option("--nms-threshold", s.sot.nms_threshold, "NMS IoU threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app->add_option("--sos-threshold", s.sot.sos_threshold, "small-overlap suppression threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

// --s-sde drives both the metric and the refiner; the score threshold is shared with SOT.
void sync(cli::Settings& s)
{
  s.refiner.reliable_after = s.thresholds.short_duration;
  s.sot.score_threshold = s.assoc.score_threshold;
}

struct Streams
{
  std::unique_ptr<std::ifstream> in_file;
  std::unique_ptr<std::ofstream> out_file;
  std::istream* in = &std::cin;
  std::ostream* out = &std::cout;
};

bool open_in(const std::string& path, std::unique_ptr<std::ifstream>& holder, std::istream*& stream)
{
  if (path.empty() || path == "-") {
    stream = &std::cin;
    return true;
  }
  holder = std::make_unique<std::ifstream>(path);
  if (!*holder) {
    std::cerr << "error: cannot open " << path << '\n';
    return false;
  }
  stream = holder.get();
  return true;
}

bool open_out(const std::string& path, std::unique_ptr<std::ofstream>& holder, std::ostream*& stream)
{
  if (path.empty() || path == "-") {
    stream = &std::cout;
    return true;
  }
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) {
    std::cerr << "error: cannot write " << path << '\n';
    return false;
  }
  stream = holder.get();
  return true;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Temporal continuity/stability analytics for video object detection streams"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output = "-";

  cli::EvalOptions eval_opt;
  bool no_log = false;
  bool no_tracklets = false;
  auto* eval = app.add_subcommand("eval", "continuity and stability report for a detection file");
  eval->add_option("input", input, "JSON-Lines detections ('-' for stdin)");
  eval->add_option("-o,--output", output, "report path ('-' for stdout)");
  eval->add_flag("--no-log", no_log, "report raw values without the log contrast transform");
  eval->add_flag("--no-tracklets", no_tracklets, "omit the per-tracklet breakdown");
  add_settings(eval, eval_opt.settings);

  cli::RefineOptions refine_opt;
  std::string emit_mode = "online-drop";
  std::string tracklet_path;
  auto* refine = app.add_subcommand("refine", "online tracklet refinement");
  refine->add_option("input", input, "JSON-Lines detections ('-' for stdin)");
  refine->add_option("-o,--output", output, "refined detections path ('-' for stdout)");
  refine->add_option("--emit-mode", emit_mode, "online-drop | offline-retroemit")
      ->check(CLI::IsMember({"online-drop", "offline-retroemit"}))
      ->capture_default_str();
  refine->add_option("--tracklets", tracklet_path, "also write tracklet records here");
  add_settings(refine, refine_opt.settings);

  cli::TrackOptions track_opt;
  std::string track_mode = "mot";
  auto* track = app.add_subcommand("track", "multi-object tracklets or SOT-by-detection trajectory");
  track->add_option("input", input, "JSON-Lines detections ('-' for stdin)");
  track->add_option("-o,--output", output, "output path ('-' for stdout)");
  track->add_option("--mode", track_mode, "mot | sot-by-detection")
      ->check(CLI::IsMember({"mot", "sot-by-detection"}))
      ->capture_default_str();
  track->add_flag("--refine", track_opt.refine, "mot mode: emit refined boxes");
  add_settings(track, track_opt.settings);

  std::optional<std::uint64_t> synth_seed;
  std::string ledger_path;
  auto* synth = app.add_subcommand("synth", "generate a synthetic detection stream from a JSON spec");
  synth->add_option("spec", input, "spec file ('-' for stdin)")->required();
  synth->add_option("-o,--output", output, "detections path ('-' for stdout)");
  synth->add_option("--ledger", ledger_path, "write the injected-defect ledger here");
  synth->add_option("--seed", synth_seed, "override the document's perturbation seed");

  cli::BenchOptions bench_opt;
  std::string profile = "clustered";
  auto* bench = app.add_subcommand("bench", "time NMS against SOS-NMS on synthetic candidates");
  bench->add_option("--candidates", bench_opt.candidates, "candidates per frame")->capture_default_str();
  bench->add_option("--profile", profile, "clustered | uniform | far")
      ->check(CLI::IsMember({"clustered", "uniform", "far", "uniform-far"}))
      ->capture_default_str();
  bench->add_option("--seed", bench_opt.seed, "candidate generator seed")->capture_default_str();
  bench->add_option("--reps", bench_opt.repetitions, "repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--sos-threshold", bench_opt.sot.sos_threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  bench->add_option("--nms-threshold", bench_opt.sot.nms_threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  bench->add_flag("--json", bench_opt.json, "machine-readable output");

  cli::PlotOptions plot_opt;
  std::string spectrum_path;
  auto* plot = app.add_subcommand("plotdata", "per-tracklet channel curves and amplitude spectra (CSV)");
  plot->add_option("input", input, "detections or tracklet records ('-' for stdin)");
  plot->add_option("-o,--output", output, "curves CSV path ('-' for stdout)");
  plot->add_option("--spectrum", spectrum_path, "spectrum CSV path")->required();
  plot->add_flag("--tracklets", plot_opt.tracklet_input, "input holds tracklet records");
  plot->add_option("--high-freq", plot_opt.high_frequency_cut, "high-frequency cut in cycles/frame")
      ->capture_default_str();
  add_settings(plot, plot_opt.settings);

  CLI11_PARSE(app, argc, argv);

  Streams io;
  if (!open_out(output, io.out_file, io.out)) {
    return cli::io_error;
  }

  if (eval->parsed()) {
    if (!open_in(input, io.in_file, io.in)) {
      return cli::io_error;
    }
    sync(eval_opt.settings);
    eval_opt.log_transform = !no_log;
    eval_opt.per_tracklet = !no_tracklets;
    return cli::cmd_eval(*io.in, *io.out, std::cerr, eval_opt);
  }
  if (refine->parsed()) {
    if (!open_in(input, io.in_file, io.in)) {
      return cli::io_error;
    }
    sync(refine_opt.settings);
    refine_opt.settings.refiner.emit_mode =
        emit_mode == "offline-retroemit" ? EmitMode::offline_retroemit : EmitMode::online_drop;
    std::unique_ptr<std::ofstream> tracklets;
    if (!tracklet_path.empty()) {
      tracklets = std::make_unique<std::ofstream>(tracklet_path);
      if (!*tracklets) {
        std::cerr << "error: cannot write " << tracklet_path << '\n';
        return cli::io_error;
      }
    }
    return cli::cmd_refine(*io.in, *io.out, tracklets.get(), std::cerr, refine_opt);
  }
  if (track->parsed()) {
    if (!open_in(input, io.in_file, io.in)) {
      return cli::io_error;
    }
    sync(track_opt.settings);
    track_opt.mode = track_mode == "mot" ? cli::TrackCommandMode::mot : cli::TrackCommandMode::sot_by_detection;
    return cli::cmd_track(*io.in, *io.out, std::cerr, track_opt);
  }
  if (synth->parsed()) {
    if (!open_in(input, io.in_file, io.in)) {
      return cli::io_error;
    }
    std::unique_ptr<std::ofstream> ledger;
    if (!ledger_path.empty()) {
      ledger = std::make_unique<std::ofstream>(ledger_path);
      if (!*ledger) {
        std::cerr << "error: cannot write " << ledger_path << '\n';
        return cli::io_error;
      }
    }
    return cli::cmd_synth(*io.in, *io.out, ledger.get(), std::cerr, synth_seed);
  }
  if (bench->parsed()) {
    bench_opt.profile = *parse_profile(profile);
    return cli::cmd_bench(*io.out, std::cerr, bench_opt);
  }
  if (plot->parsed()) {
    if (!open_in(input, io.in_file, io.in)) {
      return cli::io_error;
    }
    std::ofstream spectrum(spectrum_path);
    if (!spectrum) {
      std::cerr << "error: cannot write " << spectrum_path << '\n';
      return cli::io_error;
    }
    sync(plot_opt.settings);
    return cli::cmd_plotdata(*io.in, *io.out, spectrum, std::cerr, plot_opt);
  }
  return cli::ok;
}
