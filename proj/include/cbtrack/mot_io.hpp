#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <cbtrack/detection.hpp>
#include <cbtrack/embedding.hpp>
#include <cbtrack/metrics.hpp>
#include <cbtrack/tracker.hpp>
#include <cbtrack/tracklet.hpp>

namespace cbtrack {

/// One line of the comma-separated interchange format:
///   frame,id,left,top,width,height,conf,-1,-1,-1
/// Frames are 1-based on disk and 0-based in memory; the conversion lives
/// in this module only. Readers accept 6..10 fields (conf defaults to 1);
/// the writer always emits the canonical 10-field form with shortest
/// round-trip decimals.
struct MotRecord {
  int frame = 0;  // 0-based
  int id = -1;
  Box box;
  double conf = 1.0;
  std::int64_t line = -1;  // 0-based record ordinal in the file
};

std::vector<MotRecord> read_mot_records(const std::filesystem::path& path);

/// Detections grouped by frame, in file order; each detection's `row` is
/// its record ordinal (the embedding row index).
std::map<int, std::vector<Detection>> read_detections(const std::filesystem::path& path);

/// Identity-labelled boxes grouped by frame (ground truth or tracker
/// output), in file order.
FrameAnnotations read_annotations(const std::filesystem::path& path);

void write_detections(const std::filesystem::path& path,
                      const std::map<int, std::vector<Detection>>& detections);
void write_annotations(const std::filesystem::path& path, const FrameAnnotations& annotations);
void write_tracklets(const std::filesystem::path& path, const std::vector<Tracklet>& tracklets);

/// Regroups tracker-output annotations into tracklets by id, entries
/// frame-sorted. Duplicate (frame, id) pairs are an error.
std::vector<Tracklet> tracklets_from_annotations(const FrameAnnotations& annotations);

/// Binary embedding file: magic "EMB1", uint32 LE row count, uint32 LE
/// dimension, then rows*dim little-endian IEEE-754 float32, row-major.
/// Row i belongs to record i of the companion detection file.
EmbeddingTable read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

/// Flat key-value run configuration ("key = value" lines, '#' comments).
/// Unknown or duplicate keys are errors. Keys: buffer_small, buffer_large,
/// match_threshold, max_age, affinity, cut, embedding_path, jobs.
struct RunConfig {
  TrackerConfig tracker;
  double cut = 0.15;
  std::string embedding_path;
  int jobs = 1;
};

RunConfig read_run_config(const std::filesystem::path& path);
void write_run_config(const std::filesystem::path& path, const RunConfig& config);

/// Canonical shortest round-trip decimal rendering used by every writer.
std::string format_number(double value);

}  // namespace cbtrack
