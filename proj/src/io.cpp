#include "tempo/io.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include <json.hpp>

namespace tempo
{

using json = nlohmann::json;

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

namespace
{

int get_int(const json& j, const char* key, std::size_t line)
{
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  if (!it->is_number_integer()) {
    throw ParseError(line, std::string("field \"") + key + "\" must be an integer");
  }
  return it->get<int>();
}

double get_number(const json& j, const char* key, std::size_t line)
{
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  if (!it->is_number()) {
    throw ParseError(line, std::string("field \"") + key + "\" must be a number");
  }
  return it->get<double>();
}

std::string get_video_id(const json& j, std::size_t line)
{
  auto it = j.find("video_id");
  if (it == j.end()) {
    throw ParseError(line, "missing field \"video_id\"");
  }
  if (it->is_string()) {
    return it->get<std::string>();
  }
  if (it->is_number_integer()) {
    return std::to_string(it->get<long long>());
  }
  throw ParseError(line, "field \"video_id\" must be a string");
}

Detection parse_detection(const json& j, std::size_t line)
{
  Detection d;
  d.frame = get_int(j, "frame", line);
  d.class_id = get_int(j, "class_id", line);
  d.score = get_number(j, "score", line);
  d.box = {get_number(j, "cx", line), get_number(j, "cy", line), get_number(j, "w", line), get_number(j, "h", line)};
  try {
    validate_detection(d);
  } catch (const InvariantError& e) {
    throw InvariantError("line " + std::to_string(line) + ": " + e.what());
  }
  return d;
}

json detection_json(const std::string& video_id, const Detection& d)
{
  json j;
  j["video_id"] = video_id;
  j["frame"] = d.frame;
  j["class_id"] = d.class_id;
  j["score"] = d.score;
  j["cx"] = d.box.cx;
  j["cy"] = d.box.cy;
  j["w"] = d.box.w;
  j["h"] = d.box.h;
  return j;
}

json header_json(const std::string& video_id, int t_v)
{
  json j;
  j["video_id"] = video_id;
  j["t_v"] = t_v;
  return j;
}

// Shared line loop: calls on_header(video, t_v, line) or on_record(video, json, line).
template <typename Header, typename Record>
void for_each_line(std::istream& in, Header on_header, Record on_record)
{
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) {
      throw ParseError(line, "record must be a JSON object");
    }
    const std::string vid = get_video_id(j, line);
    if (!j.contains("frame")) {
      if (!j.contains("t_v")) {
        throw ParseError(line, "missing field \"frame\"");
      }
      const int t_v = get_int(j, "t_v", line);
      if (t_v < 0) {
        throw InvariantError("line " + std::to_string(line) + ": t_v must be non-negative");
      }
      on_header(vid, t_v, line);
      continue;
    }
    on_record(vid, j, line);
  }
  if (in.bad()) {
    throw ParseError(line, "read failure");
  }
}

struct Pending
{
  int declared = -1;
  int max_frame = -1;
};

int resolve_duration(const std::string& vid, const Pending& p)
{
  if (p.declared >= 0 && p.max_frame >= p.declared) {
    throw InvariantError(vid + ": frame " + std::to_string(p.max_frame) + " outside declared duration t_v=" +
                         std::to_string(p.declared));
  }
  return p.declared >= 0 ? p.declared : p.max_frame + 1;
}

} // namespace

std::vector<VideoSequence> read_detections(std::istream& in)
{
  std::vector<std::string> order;
  std::map<std::string, Pending> meta;
  std::map<std::string, std::vector<Detection>> dets;
  auto touch = [&](const std::string& vid) {
    if (meta.emplace(vid, Pending{}).second) {
      order.push_back(vid);
    }
    return &meta[vid];
  };

  for_each_line(
      in,
      [&](const std::string& vid, int t_v, std::size_t) {
        Pending* p = touch(vid);
        p->declared = std::max(p->declared, t_v);
      },
      [&](const std::string& vid, const json& j, std::size_t line) {
        Pending* p = touch(vid);
        Detection d = parse_detection(j, line);
        p->max_frame = std::max(p->max_frame, d.frame);
        dets[vid].push_back(d);
      });

  std::vector<VideoSequence> out;
  for (const auto& vid : order) {
    auto& list = dets[vid];
    std::stable_sort(list.begin(), list.end(), [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    out.push_back(VideoSequence::from_detections(vid, resolve_duration(vid, meta[vid]), std::move(list)));
  }
  return out;
}

void write_detections(std::ostream& out, const VideoSequence& seq)
{
  out << header_json(seq.video_id, seq.t_v).dump() << '\n';
  for (const auto& fr : seq.frames) {
    for (const auto& d : fr.detections) {
      out << detection_json(seq.video_id, d).dump() << '\n';
    }
  }
}

TrackletFile read_tracklet_records(std::istream& in)
{
  std::vector<std::string> order;
  std::map<std::string, Pending> meta;
  std::map<std::string, std::vector<TrackletRecord>> recs;
  std::set<std::tuple<std::string, int, int>> seen;
  auto touch = [&](const std::string& vid) {
    if (meta.emplace(vid, Pending{}).second) {
      order.push_back(vid);
    }
    return &meta[vid];
  };

  for_each_line(
      in,
      [&](const std::string& vid, int t_v, std::size_t) {
        Pending* p = touch(vid);
        p->declared = std::max(p->declared, t_v);
      },
      [&](const std::string& vid, const json& j, std::size_t line) {
        Pending* p = touch(vid);
        TrackletRecord r;
        r.video_id = vid;
        r.track_id = get_int(j, "track_id", line);
        r.detection = parse_detection(j, line);
        if (auto it = j.find("interpolated"); it != j.end()) {
          if (!it->is_boolean()) {
            throw ParseError(line, "field \"interpolated\" must be a boolean");
          }
          r.interpolated = it->get<bool>();
        }
        if (!seen.emplace(vid, r.track_id, r.detection.frame).second) {
          throw InvariantError("line " + std::to_string(line) + ": duplicate (video_id, track_id, frame)");
        }
        p->max_frame = std::max(p->max_frame, r.detection.frame);
        recs[vid].push_back(std::move(r));
      });

  TrackletFile file;
  for (const auto& vid : order) {
    auto& list = recs[vid];
    std::stable_sort(list.begin(), list.end(), [](const TrackletRecord& a, const TrackletRecord& b) {
      return std::tie(a.detection.frame, a.track_id) < std::tie(b.detection.frame, b.track_id);
    });
    file.videos.push_back({vid, resolve_duration(vid, meta[vid]), std::move(list)});
  }
  return file;
}

void write_tracklet_records(std::ostream& out, const std::string& video_id, int t_v,
                            const std::vector<TrackletRecord>& records)
{
  out << header_json(video_id, t_v).dump() << '\n';
  for (const auto& r : records) {
    json j = detection_json(video_id, r.detection);
    j["track_id"] = r.track_id;
    j["interpolated"] = r.interpolated;
    out << j.dump() << '\n';
  }
}

std::vector<TrackletRecord> tracklet_records(const std::string& video_id, const Tracklet& t)
{
  std::vector<TrackletRecord> out;
  for (const auto& h : t.history) {
    if (h) {
      out.push_back({video_id, t.id, *h, false});
    }
  }
  return out;
}

std::vector<TrackletRecord> tracklet_records(const RefinedStream& stream)
{
  std::vector<TrackletRecord> out;
  for (const auto& frame : stream.frames) {
    for (const auto& b : frame) {
      out.push_back({stream.video_id, b.track_id, b.detection, b.interpolated});
    }
  }
  return out;
}

std::vector<Tracklet> tracklets_from_records(const std::vector<TrackletRecord>& records)
{
  std::map<int, std::vector<const TrackletRecord*>> by_track;
  for (const auto& r : records) {
    by_track[r.track_id].push_back(&r);
  }
  std::vector<Tracklet> out;
  for (auto& [id, list] : by_track) {
    std::sort(list.begin(), list.end(),
              [](const TrackletRecord* a, const TrackletRecord* b) { return a->detection.frame < b->detection.frame; });
    Tracklet t;
    t.id = id;
    t.class_id = list.front()->detection.class_id;
    t.first_frame = list.front()->detection.frame;
    t.last_matched_frame = list.back()->detection.frame;
    t.history.assign(static_cast<std::size_t>(t.length()), std::nullopt);
    for (const auto* r : list) {
      t.history[static_cast<std::size_t>(r->detection.frame - t.first_frame)] = r->detection;
    }
    t.misses = static_cast<int>(std::count(t.history.begin(), t.history.end(), std::nullopt));
    t.duration = t.length();
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace tempo
