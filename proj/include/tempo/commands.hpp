#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tempo/io.hpp"
#include "tempo/metrics.hpp"
#include "tempo/refine.hpp"
#include "tempo/sot.hpp"
#include "tempo/synth.hpp"

namespace tempo::cli
{

/// Process exit codes.
enum ExitCode : int
{
  ok = 0,
  io_error = 1,        ///< unreadable input, parse or schema errors
  invalid_input = 2    ///< input parsed but violates an invariant
};

struct Settings
{
  AssociatorConfig assoc;
  RefinerConfig refiner;
  MetricThresholds thresholds;
  SotConfig sot;
};

struct EvalOptions
{
  Settings settings;
  bool log_transform = true;
  bool per_tracklet = true;
};

/// Writes a JSON report (per video plus duration-weighted aggregate).
int cmd_eval(std::istream& in, std::ostream& report, std::ostream& log, const EvalOptions& opt);

struct RefineOptions
{
  Settings settings;
};

/// Refined detections to `out`; optional tracklet records (with interpolated flags) to `tracklets`.
int cmd_refine(std::istream& in, std::ostream& out, std::ostream* tracklets, std::ostream& log,
               const RefineOptions& opt);

enum class TrackCommandMode
{
  mot,
  sot_by_detection
};

struct TrackOptions
{
  Settings settings;
  TrackCommandMode mode = TrackCommandMode::mot;
  bool refine = false;  ///< mot mode: emit OTR boxes instead of raw associated tracklets
};

/**
 * mot: tracklet records. sot-by-detection: one JSON line per frame with the
 * processing mode, switch event, and tracked box (null when none).
 */
int cmd_track(std::istream& in, std::ostream& out, std::ostream& log, const TrackOptions& opt);

/**
 * Synthetic stream from a JSON spec document; see README for the schema.
 * `seed` overrides the document's perturbation seed.
 */
int cmd_synth(std::istream& spec, std::ostream& detections, std::ostream* ledger, std::ostream& log,
              std::optional<std::uint64_t> seed);

struct BenchOptions
{
  int candidates = 1000;
  OverlapProfile profile = OverlapProfile::clustered;
  std::uint64_t seed = 0;
  int repetitions = 1000;
  SotConfig sot;
  bool json = false;
};

int cmd_bench(std::ostream& out, std::ostream& log, const BenchOptions& opt);

struct PlotOptions
{
  Settings settings;
  bool tracklet_input = false;
  double high_frequency_cut = 0.1;  ///< cycles per frame
};

/// Channel curves and amplitude spectra as CSV.
int cmd_plotdata(std::istream& in, std::ostream& curves, std::ostream& spectrum, std::ostream& log,
                 const PlotOptions& opt);

struct SynthDocument
{
  std::string video_id = "synth";
  int t_v = 0;
  std::vector<TrackSpec> tracks;
  PerturbationSpec perturbation;
};

/// Throws SchemaError carrying the JSON path of the offending value.
SynthDocument parse_synth_document(std::istream& in);

} // namespace tempo::cli
