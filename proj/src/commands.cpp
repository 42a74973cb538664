#include "tempo/commands.hpp"

#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace tempo::cli
{

using json = nlohmann::json;

namespace
{

// Maps the library's exception types onto exit codes.
int guarded(std::ostream& log, const std::function<void()>& body)
{
  try {
    body();
    return ok;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return io_error;
  } catch (const SchemaError& e) {
    log << "error: " << e.what() << '\n';
    return io_error;
  } catch (const InvariantError& e) {
    log << "error: " << e.what() << '\n';
    return invalid_input;
  } catch (const ConsistencyError& e) {
    log << "error: " << e.what() << '\n';
    return invalid_input;
  } catch (const SequencingError& e) {
    log << "error: " << e.what() << '\n';
    return invalid_input;
  }
}

void validate(const Settings& s)
{
  s.assoc.validate();
  s.refiner.validate();
  s.sot.validate();
}

json continuity_json(const ContinuityValues& v)
{
  return {{"ESDE", v.esde}, {"SDE", v.sde}, {"TFE", v.tfe}, {"FTR", v.ftr}};
}

json report_json(const SequenceReport& r, bool log_transform, bool per_tracklet)
{
  json j;
  j["video_id"] = r.video_id;
  j["t_v"] = r.t_v;
  j["N"] = r.tracklet_count;
  const ContinuityValues& shown = log_transform ? r.logged : r.raw;
  j["ESDE"] = shown.esde;
  j["SDE"] = shown.sde;
  j["TFE"] = shown.tfe;
  j["FTR"] = shown.ftr;
  j["RCE"] = log_transform ? r.rce : r.raw.sum();
  j["CJE"] = r.cje;
  j["SJE"] = r.sje;
  j["LJE"] = r.lje;
  if (log_transform) {
    j["raw"] = continuity_json(r.raw);
  }
  if (per_tracklet) {
    json list = json::array();
    for (const auto& t : r.tracklets) {
      list.push_back({{"track_id", t.id},
                      {"class_id", t.class_id},
                      {"first_frame", t.first_frame},
                      {"last_frame", t.last_frame},
                      {"t_n", t.length},
                      {"om", t.misses},
                      {"center_jitter", t.center_jitter},
                      {"size_jitter", t.size_jitter}});
    }
    j["tracklets"] = std::move(list);
  }
  return j;
}

} // namespace

int cmd_eval(std::istream& in, std::ostream& report, std::ostream& log, const EvalOptions& opt)
{
  return guarded(log, [&] {
    validate(opt.settings);
    const auto videos = read_detections(in);
    json doc;
    doc["log_transform"] = opt.log_transform;
    doc["config"] = {{"score_threshold", opt.settings.assoc.score_threshold},
                     {"assoc_iou_threshold", opt.settings.assoc.iou_threshold},
                     {"s_lost_max", opt.settings.assoc.max_lost},
                     {"s_obj_max", opt.settings.assoc.max_objects},
                     {"s_esde", opt.settings.thresholds.extremely_short},
                     {"s_sde", opt.settings.thresholds.short_duration}};
    json warnings = json::array();
    if (videos.empty()) {
      warnings.push_back("empty input: no videos");
      log << "warning: empty input, reporting zeros\n";
    }

    std::vector<SequenceReport> reports;
    json list = json::array();
    for (const auto& seq : videos) {
      const auto tracklets = associate(seq, opt.settings.assoc);
      reports.push_back(evaluate(tracklets, seq.t_v, seq.video_id, opt.settings.thresholds));
      list.push_back(report_json(reports.back(), opt.log_transform, opt.per_tracklet));
    }
    doc["videos"] = std::move(list);
    doc["aggregate"] = report_json(aggregate(reports), opt.log_transform, false);
    doc["warnings"] = std::move(warnings);
    report << doc.dump(2) << '\n';
  });
}

int cmd_refine(std::istream& in, std::ostream& out, std::ostream* tracklets, std::ostream& log,
               const RefineOptions& opt)
{
  return guarded(log, [&] {
    validate(opt.settings);
    const auto videos = read_detections(in);
    if (videos.empty()) {
      log << "warning: empty input\n";
    }
    for (const auto& seq : videos) {
      const RefinedStream refined = refine_stream(seq, opt.settings.assoc, opt.settings.refiner);
      write_detections(out, refined.sequence());
      if (tracklets) {
        write_tracklet_records(*tracklets, refined.video_id, refined.t_v, tracklet_records(refined));
      }
    }
  });
}

namespace
{

json box_json(const EmittedBox& b)
{
  return {{"track_id", b.track_id},
          {"class_id", b.detection.class_id},
          {"score", b.detection.score},
          {"cx", b.detection.box.cx},
          {"cy", b.detection.box.cy},
          {"w", b.detection.box.w},
          {"h", b.detection.box.h},
          {"interpolated", b.interpolated}};
}

} // namespace

int cmd_track(std::istream& in, std::ostream& out, std::ostream& log, const TrackOptions& opt)
{
  return guarded(log, [&] {
    validate(opt.settings);
    const auto videos = read_detections(in);
    for (const auto& seq : videos) {
      if (opt.mode == TrackCommandMode::mot) {
        std::vector<TrackletRecord> records;
        if (opt.refine) {
          records = tracklet_records(refine_stream(seq, opt.settings.assoc, opt.settings.refiner));
        } else {
          for (const auto& t : associate(seq, opt.settings.assoc)) {
            auto r = tracklet_records(seq.video_id, t);
            records.insert(records.end(), r.begin(), r.end());
          }
        }
        write_tracklet_records(out, seq.video_id, seq.t_v, records);
        continue;
      }

      const auto frames = track_sequence(seq, opt.settings.sot, opt.settings.assoc, opt.settings.refiner);
      for (const auto& fr : frames) {
        json j;
        j["video_id"] = seq.video_id;
        j["frame"] = fr.frame;
        j["mode"] = mode_name(fr.mode);
        j["event"] = fr.event == SwitchEvent::none ? json(nullptr) : json(event_name(fr.event));
        j["tracked"] = fr.tracked ? box_json(*fr.tracked) : json(nullptr);
        json boxes = json::array();
        for (const auto& b : fr.boxes) {
          boxes.push_back(box_json(b));
        }
        j["mot_boxes"] = std::move(boxes);
        out << j.dump() << '\n';
      }
    }
  });
}

namespace
{

// Cursor into the synth spec document that remembers its JSON path.
struct Node
{
  const json& value;
  std::string path;

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path + ": " + what); }

  bool has(const char* key) const { return value.is_object() && value.contains(key); }

  Node at(const char* key) const
  {
    if (!value.is_object()) {
      fail("expected an object");
    }
    auto it = value.find(key);
    if (it == value.end()) {
      throw SchemaError(path + "." + key + ": required field missing");
    }
    return {*it, path + "." + key};
  }

  Node at(std::size_t i) const { return {value.at(i), path + "[" + std::to_string(i) + "]"}; }

  double number() const
  {
    if (!value.is_number()) {
      fail("expected a number");
    }
    return value.get<double>();
  }

  int integer() const
  {
    if (!value.is_number_integer()) {
      fail("expected an integer");
    }
    return value.get<int>();
  }

  std::string string() const
  {
    if (!value.is_string()) {
      fail("expected a string");
    }
    return value.get<std::string>();
  }

  std::size_t array(std::size_t expected = 0) const
  {
    if (!value.is_array()) {
      fail("expected an array");
    }
    if (expected != 0 && value.size() != expected) {
      fail("expected an array of " + std::to_string(expected) + " elements");
    }
    return value.size();
  }

  double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  int integer_or(const char* key, int fallback) const { return has(key) ? at(key).integer() : fallback; }
};

BBox box4(const Node& n)
{
  n.array(4);
  return {n.at(std::size_t{0}).number(), n.at(1).number(), n.at(2).number(), n.at(3).number()};
}

Motion parse_motion(const Node& n)
{
  const std::string type = n.at("type").string();
  if (type == "stationary") {
    return Motion::stationary();
  }
  if (type == "constant_velocity") {
    return Motion::constant_velocity(box4(n.at("velocity")));
  }
  if (type == "sinusoidal") {
    return Motion::sinusoidal(n.at("amplitude").number(), n.at("period").number());
  }
  Node{n.at("type")}.fail("unknown motion type \"" + type + "\"");
}

} // namespace

SynthDocument parse_synth_document(std::istream& in)
{
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: invalid JSON: ") + e.what());
  }
  const Node root{doc, "$"};
  if (!doc.is_object()) {
    root.fail("expected an object");
  }
  SynthDocument out;
  if (root.has("video_id")) {
    out.video_id = root.at("video_id").string();
  }
  out.t_v = root.at("t_v").integer();

  const Node tracks = root.at("tracks");
  for (std::size_t i = 0; i < tracks.array(); ++i) {
    const Node t = tracks.at(i);
    TrackSpec spec;
    spec.base_box = box4(t.at("box"));
    const Node span = t.at("span");
    span.array(2);
    spec.first_frame = span.at(std::size_t{0}).integer();
    spec.last_frame = span.at(1).integer();
    spec.class_id = t.integer_or("class_id", 0);
    spec.base_score = t.number_or("score", 0.9);
    spec.motion = t.has("motion") ? parse_motion(t.at("motion")) : Motion::stationary();
    out.tracks.push_back(spec);
  }

  if (root.has("perturbation")) {
    const Node p = root.at("perturbation");
    PerturbationSpec& ps = out.perturbation;
    ps.jitter_sigma_center = p.number_or("jitter_sigma_center", 0.0);
    ps.jitter_sigma_size = p.number_or("jitter_sigma_size", 0.0);
    ps.dropout_rate = p.number_or("dropout_rate", 0.0);
    if (p.has("seed")) {
      const Node s = p.at("seed");
      if (!s.value.is_number_unsigned()) {
        s.fail("expected a non-negative integer");
      }
      ps.seed = s.value.get<std::uint64_t>();
    }
    if (p.has("burst_dropout")) {
      const Node list = p.at("burst_dropout");
      for (std::size_t i = 0; i < list.array(); ++i) {
        const Node g = list.at(i);
        ps.burst_dropout.push_back({g.at("start").integer(), g.at("length").integer(), g.integer_or("track", -1)});
      }
    }
    if (p.has("ghost_tracks")) {
      const Node g = p.at("ghost_tracks");
      ps.ghosts.count = g.integer_or("count", 0);
      ps.ghosts.length = g.integer_or("length", 2);
    }
  }
  return out;
}

int cmd_synth(std::istream& spec, std::ostream& detections, std::ostream* ledger, std::ostream& log,
              std::optional<std::uint64_t> seed)
{
  return guarded(log, [&] {
    SynthDocument doc = parse_synth_document(spec);
    if (seed) {
      doc.perturbation.seed = *seed;
    }
    const auto gen = generate(doc.tracks, doc.perturbation, doc.t_v, doc.video_id);
    write_detections(detections, gen.sequence);
    if (!ledger) {
      return;
    }
    const DefectLedger& l = gen.ledger;
    json j;
    j["video_id"] = doc.video_id;
    j["t_v"] = doc.t_v;
    j["seed"] = doc.perturbation.seed;
    j["detection_count"] = l.detection_count;
    j["interior_misses"] = l.interior_misses;
    j["longest_interior_gap"] = l.longest_interior_gap;
    j["jitter_sigma_center"] = l.jitter_sigma_center;
    j["jitter_sigma_size"] = l.jitter_sigma_size;
    j["ghost_count"] = l.ghosts.size();
    json ghosts = json::array();
    for (const auto& g : l.ghosts) {
      ghosts.push_back({{"first_frame", g.first_frame},
                        {"last_frame", g.last_frame},
                        {"class_id", g.class_id},
                        {"box", {g.box.cx, g.box.cy, g.box.w, g.box.h}}});
    }
    j["ghosts"] = std::move(ghosts);
    json tracks = json::array();
    for (const auto& t : l.tracks) {
      json missing = json::array();
      for (std::size_t i = 0; i < t.present.size(); ++i) {
        if (!t.present[i]) {
          missing.push_back(t.first_frame + static_cast<int>(i));
        }
      }
      tracks.push_back({{"first_frame", t.first_frame},
                        {"last_frame", t.last_frame},
                        {"interior_misses", t.interior_misses},
                        {"longest_interior_gap", t.longest_interior_gap},
                        {"missing_frames", std::move(missing)}});
    }
    j["tracks"] = std::move(tracks);
    *ledger << j.dump(2) << '\n';
  });
}

int cmd_bench(std::ostream& out, std::ostream& log, const BenchOptions& opt)
{
  return guarded(log, [&] {
    opt.sot.validate();
    if (opt.candidates < 0 || opt.repetitions < 1) {
      throw InvariantError("bench: candidates must be >= 0 and repetitions >= 1");
    }
    const BenchRecord r = bench_candidate_selection(opt.candidates, opt.profile, opt.sot, opt.seed, opt.repetitions);
    if (opt.json) {
      json j{{"profile", profile_name(opt.profile)},
             {"candidates", r.candidate_count},
             {"repetitions", r.repetitions},
             {"seed", opt.seed},
             {"sos_threshold", opt.sot.sos_threshold},
             {"nms_threshold", opt.sot.nms_threshold},
             {"nms_ms", r.nms_ms_per_frame},
             {"sos_nms_ms", r.sos_nms_ms_per_frame},
             {"ratio", r.ratio},
             {"survivors_after_sos", r.survivors_after_sos},
             {"nms_kept", r.nms_kept}};
      out << j.dump(2) << '\n';
      return;
    }
    out << "profile              " << profile_name(opt.profile) << '\n'
        << "candidates           " << r.candidate_count << '\n'
        << "repetitions          " << r.repetitions << '\n'
        << std::fixed << std::setprecision(6)
        << "nms_ms               " << r.nms_ms_per_frame << '\n'
        << "sos_nms_ms           " << r.sos_nms_ms_per_frame << '\n'
        << std::setprecision(4)
        << "ratio                " << r.ratio << '\n'
        << "survivors_after_sos  " << r.survivors_after_sos << '\n'
        << "nms_kept             " << r.nms_kept << '\n';
  });
}

namespace
{

struct PlotTrack
{
  std::string video_id;
  Tracklet tracklet;
};

std::string fmt(double v)
{
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

} // namespace

int cmd_plotdata(std::istream& in, std::ostream& curves, std::ostream& spectrum, std::ostream& log,
                 const PlotOptions& opt)
{
  return guarded(log, [&] {
    validate(opt.settings);
    std::vector<PlotTrack> tracks;
    if (opt.tracklet_input) {
      for (const auto& v : read_tracklet_records(in).videos) {
        for (auto& t : tracklets_from_records(v.records)) {
          tracks.push_back({v.video_id, std::move(t)});
        }
      }
    } else {
      for (const auto& seq : read_detections(in)) {
        for (auto& t : associate(seq, opt.settings.assoc)) {
          tracks.push_back({seq.video_id, std::move(t)});
        }
      }
    }

    curves << "video_id,track_id,frame,channel,value,miss\n";
    spectrum << "video_id,track_id,channel,q,A,high_freq\n";
    for (const auto& [vid, t] : tracks) {
      const auto series = channel_series(t);
      for (std::size_t c = 0; c < 4; ++c) {
        const char* ch = channel_name(all_channels[c]);
        for (std::size_t i = 0; i < t.history.size(); ++i) {
          curves << vid << ',' << t.id << ',' << t.first_frame + static_cast<int>(i) << ',' << ch << ',';
          if (t.history[i]) {
            curves << fmt(series[c][i]) << ",0\n";
          } else {
            curves << ",1\n";
          }
        }
        for (const auto& p : dft_amplitudes(series[c])) {
          spectrum << vid << ',' << t.id << ',' << ch << ',' << fmt(p.q) << ',' << fmt(p.amplitude) << ','
                   << (p.q > opt.high_frequency_cut ? 1 : 0) << '\n';
        }
      }
    }
  });
}

} // namespace tempo::cli
