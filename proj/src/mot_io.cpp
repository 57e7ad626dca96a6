#include <cbtrack/mot_io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cbtrack {

namespace {

std::string location(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, const std::filesystem::path& path,
                    std::size_t line_no) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error(location(path, line_no) + ": malformed numeric field '" +
                             std::string(field) + "'");
  }
  return value;
}

int parse_int(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
  const double value = parse_double(field, path, line_no);
  if (value != std::floor(value) || std::abs(value) > 2e9) {
    throw std::runtime_error(location(path, line_no) + ": expected integer field, got '" +
                             std::string(field) + "'");
  }
  return static_cast<int>(value);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  return out;
}

void write_record_lines(const std::filesystem::path& path,
                        std::vector<MotRecord> records) {
  // Stable: detection rows must keep their in-frame order (all ids -1).
  std::stable_sort(records.begin(), records.end(), [](const MotRecord& a, const MotRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::ofstream out = open_for_write(path);
  for (const auto& r : records) {
    out << (r.frame + 1) << ',' << r.id << ',' << format_number(r.box.left) << ','
        << format_number(r.box.top) << ',' << format_number(r.box.width) << ','
        << format_number(r.box.height) << ',' << format_number(r.conf) << ",-1,-1,-1\n";
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) {
    throw std::runtime_error("number formatting failed");
  }
  return std::string(buf, ptr);
}

std::vector<MotRecord> read_mot_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  std::vector<MotRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::int64_t ordinal = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() < 6 || fields.size() > 10) {
      throw std::runtime_error(location(path, line_no) + ": expected 6..10 comma-separated fields, got " +
                               std::to_string(fields.size()));
    }
    MotRecord r;
    const int disk_frame = parse_int(fields[0], path, line_no);
    if (disk_frame < 1) {
      throw std::runtime_error(location(path, line_no) + ": frame index must be >= 1");
    }
    r.frame = disk_frame - 1;
    r.id = parse_int(fields[1], path, line_no);
    r.box.left = parse_double(fields[2], path, line_no);
    r.box.top = parse_double(fields[3], path, line_no);
    r.box.width = parse_double(fields[4], path, line_no);
    r.box.height = parse_double(fields[5], path, line_no);
    r.conf = fields.size() > 6 ? parse_double(fields[6], path, line_no) : 1.0;
    for (std::size_t k = 7; k < fields.size(); ++k) {
      parse_double(fields[k], path, line_no);  // trailing fields must still be numeric
    }
    if (!r.box.valid()) {
      throw std::runtime_error(location(path, line_no) + ": box extents must be positive and finite");
    }
    if (!std::isfinite(r.conf)) {
      throw std::runtime_error(location(path, line_no) + ": confidence must be finite");
    }
    r.line = ordinal++;
    records.push_back(r);
  }
  return records;
}

std::map<int, std::vector<Detection>> read_detections(const std::filesystem::path& path) {
  std::map<int, std::vector<Detection>> by_frame;
  for (const auto& r : read_mot_records(path)) {
    by_frame[r.frame].push_back(Detection{r.box, r.conf, r.line});
  }
  return by_frame;
}

FrameAnnotations read_annotations(const std::filesystem::path& path) {
  FrameAnnotations ann;
  for (const auto& r : read_mot_records(path)) {
    ann[r.frame].push_back(IdBox{r.id, r.box});
  }
  return ann;
}

void write_detections(const std::filesystem::path& path,
                      const std::map<int, std::vector<Detection>>& detections) {
  std::vector<MotRecord> records;
  for (const auto& [frame, dets] : detections) {
    for (const auto& d : dets) {
      records.push_back(MotRecord{frame, -1, d.box, d.conf, d.row});
    }
  }
  // Detection files keep file order == row order; they are already
  // frame-sorted and ids are constant, so the shared sort is stable here.
  write_record_lines(path, std::move(records));
}

void write_annotations(const std::filesystem::path& path, const FrameAnnotations& annotations) {
  std::vector<MotRecord> records;
  for (const auto& [frame, boxes] : annotations) {
    for (const auto& ib : boxes) {
      records.push_back(MotRecord{frame, ib.id, ib.box, 1.0, -1});
    }
  }
  write_record_lines(path, std::move(records));
}

void write_tracklets(const std::filesystem::path& path, const std::vector<Tracklet>& tracklets) {
  std::vector<MotRecord> records;
  for (const auto& t : tracklets) {
    for (const auto& e : t.entries) {
      records.push_back(MotRecord{e.frame, t.id, e.box, 1.0, e.row});
    }
  }
  write_record_lines(path, std::move(records));
}

std::vector<Tracklet> tracklets_from_annotations(const FrameAnnotations& annotations) {
  std::map<int, Tracklet> by_id;
  for (const auto& [frame, boxes] : annotations) {
    for (const auto& ib : boxes) {
      Tracklet& t = by_id[ib.id];
      t.id = ib.id;
      if (!t.entries.empty() && t.entries.back().frame == frame) {
        throw std::invalid_argument("track id " + std::to_string(ib.id) +
                                    " has two boxes in frame " + std::to_string(frame + 1));
      }
      t.entries.push_back(TrackletEntry{frame, ib.box, -1});
    }
  }
  std::vector<Tracklet> out;
  out.reserve(by_id.size());
  for (auto& [id, t] : by_id) {
    require_strictly_increasing(t);
    out.push_back(std::move(t));
  }
  return out;
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "EMB1", 4) != 0) {
    throw std::runtime_error(path.string() + ": bad magic, expected EMB1");
  }
  std::uint8_t header[8];
  if (!in.read(reinterpret_cast<char*>(header), 8)) {
    throw std::runtime_error(path.string() + ": truncated header");
  }
  auto read_u32 = [](const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  };
  const std::uint32_t rows = read_u32(header);
  const std::uint32_t dim = read_u32(header + 4);

  const std::uintmax_t expected = 12 + static_cast<std::uintmax_t>(rows) * dim * 4;
  std::error_code ec;
  const std::uintmax_t actual = std::filesystem::file_size(path, ec);
  if (ec || actual != expected) {
    throw std::runtime_error(path.string() + ": size mismatch, header implies " +
                             std::to_string(expected) + " bytes, file has " +
                             std::to_string(actual));
  }

  EmbeddingTable table;
  table.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
  if (rows > 0 && dim > 0) {
    static_assert(sizeof(float) == 4);
    if (!in.read(reinterpret_cast<char*>(table.features.data()),
                 static_cast<std::streamsize>(sizeof(float) * rows * dim))) {
      throw std::runtime_error(path.string() + ": truncated payload");
    }
    if (!table.features.allFinite()) {
      throw std::runtime_error(path.string() + ": non-finite feature values");
    }
  }
  return table;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out = open_for_write(path);
  out.write("EMB1", 4);
  const std::uint32_t rows = static_cast<std::uint32_t>(table.rows());
  const std::uint32_t dim = static_cast<std::uint32_t>(table.dim());
  std::uint8_t header[8] = {
      static_cast<std::uint8_t>(rows), static_cast<std::uint8_t>(rows >> 8),
      static_cast<std::uint8_t>(rows >> 16), static_cast<std::uint8_t>(rows >> 24),
      static_cast<std::uint8_t>(dim), static_cast<std::uint8_t>(dim >> 8),
      static_cast<std::uint8_t>(dim >> 16), static_cast<std::uint8_t>(dim >> 24)};
  out.write(reinterpret_cast<const char*>(header), 8);
  if (rows > 0 && dim > 0) {
    out.write(reinterpret_cast<const char*>(table.features.data()),
              static_cast<std::streamsize>(sizeof(float) * rows * dim));
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  RunConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(location(path, line_no) + ": expected 'key = value'");
    }
    const std::string key{trim(stripped.substr(0, eq))};
    const std::string value{trim(stripped.substr(eq + 1))};
    if (!seen.insert(key).second) {
      throw std::runtime_error(location(path, line_no) + ": duplicate key '" + key + "'");
    }
    if (key == "buffer_small") {
      config.tracker.buffer_small = BufferScale(parse_double(value, path, line_no));
    } else if (key == "buffer_large") {
      config.tracker.buffer_large = BufferScale(parse_double(value, path, line_no));
    } else if (key == "match_threshold") {
      config.tracker.match_threshold = parse_double(value, path, line_no);
    } else if (key == "max_age") {
      config.tracker.max_age = parse_int(value, path, line_no);
    } else if (key == "affinity") {
      config.tracker.affinity = affinity_from_string(value);
    } else if (key == "cut") {
      config.cut = parse_double(value, path, line_no);
    } else if (key == "embedding_path") {
      config.embedding_path = value;
    } else if (key == "jobs") {
      config.jobs = parse_int(value, path, line_no);
    } else {
      throw std::runtime_error(location(path, line_no) + ": unknown key '" + key + "'");
    }
  }
  config.tracker.validate();
  if (config.jobs < 1) {
    throw std::runtime_error(path.string() + ": jobs must be >= 1");
  }
  return config;
}

void write_run_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out = open_for_write(path);
  out << "buffer_small = " << format_number(config.tracker.buffer_small.value()) << '\n'
      << "buffer_large = " << format_number(config.tracker.buffer_large.value()) << '\n'
      << "match_threshold = " << format_number(config.tracker.match_threshold) << '\n'
      << "max_age = " << config.tracker.max_age << '\n'
      << "affinity = " << to_string(config.tracker.affinity) << '\n'
      << "cut = " << format_number(config.cut) << '\n';
  if (!config.embedding_path.empty()) {
    out << "embedding_path = " << config.embedding_path << '\n';
  }
  out << "jobs = " << config.jobs << '\n';
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace cbtrack
