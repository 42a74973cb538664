#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempo/metrics.hpp"
#include "tempo/refine.hpp"

namespace tempo
{

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Structurally wrong configuration document; the message carries a JSON path.
class SchemaError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/**
 * @brief Reads JSON-Lines detection records.
 *
 * Each line is {"video_id", "frame", "class_id", "score", "cx", "cy", "w", "h"}.
 * A line without "frame" but with "t_v" declares a video's duration (needed
 * for trailing empty frames and for videos with no detections); otherwise
 * t_v is one past the largest frame seen. Unknown fields are ignored, blank
 * lines skipped, records may be in any order. Videos keep first-appearance
 * order.
 */
std::vector<VideoSequence> read_detections(std::istream& in);

/// Duration header followed by one record per detection, frame-ordered.
void write_detections(std::ostream& out, const VideoSequence& seq);

struct TrackletRecord
{
  std::string video_id;
  int track_id = 0;
  Detection detection;
  bool interpolated = false;

  bool operator==(const TrackletRecord&) const = default;
};

/// Same header convention as read_detections(); throws InvariantError on duplicate (video, track, frame).
struct TrackletFile
{
  struct Video
  {
    std::string video_id;
    int t_v = 0;
    std::vector<TrackletRecord> records;
  };
  std::vector<Video> videos;
};

TrackletFile read_tracklet_records(std::istream& in);
void write_tracklet_records(std::ostream& out, const std::string& video_id, int t_v,
                            const std::vector<TrackletRecord>& records);

/// Records of one associator tracklet (matched frames only).
std::vector<TrackletRecord> tracklet_records(const std::string& video_id, const Tracklet& t);
std::vector<TrackletRecord> tracklet_records(const RefinedStream& stream);

/**
 * Rebuilds tracklets from records: one tracklet per track id, history spanning
 * its first to last recorded frame with absent frames as misses.
 */
std::vector<Tracklet> tracklets_from_records(const std::vector<TrackletRecord>& records);

} // namespace tempo
