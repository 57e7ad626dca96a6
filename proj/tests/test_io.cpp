#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <cbtrack/mot_io.hpp>
#include <cbtrack/synth.hpp>

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "cbtrack_io_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("detection lines parse into frame groups with row ordinals") {
  const auto path = write_text("dets.txt",
                               "1,-1,10,20,30,40,1,-1,-1,-1\n"
                               "2,-1,11,21,30,40,0.5,-1,-1,-1\n"
                               "2,-1,50,60,5,5,1,-1,-1,-1\n");
  const auto dets = cbtrack::read_detections(path);
  REQUIRE(dets.size() == 2);
  REQUIRE(dets.at(0).size() == 1);
  CHECK(dets.at(0)[0].box == cbtrack::Box{10, 20, 30, 40});
  CHECK(dets.at(0)[0].conf == 1.0);
  CHECK(dets.at(0)[0].row == 0);
  REQUIRE(dets.at(1).size() == 2);
  CHECK(dets.at(1)[0].row == 1);
  CHECK(dets.at(1)[1].row == 2);

  const auto empty = cbtrack::read_detections(write_text("empty.txt", ""));
  CHECK(empty.empty());
}

TEST_CASE("short annotation flavors parse too") {
  const auto path = write_text("gt9.txt", "1,7,10,20,30,40,1,-1,0.5\n1,8,1,2,3,4,1\n2,7,10,20,30,40\n");
  const auto ann = cbtrack::read_annotations(path);
  REQUIRE(ann.at(0).size() == 2);
  CHECK(ann.at(0)[0].id == 7);
  CHECK(ann.at(0)[1].id == 8);
  CHECK(ann.at(1)[0].box == cbtrack::Box{10, 20, 30, 40});
}

TEST_CASE("malformed lines name the line number") {
  const auto bad_field = write_text("bad1.txt", "1,-1,10,20,30,40,1,-1,-1,-1\n1,-1,xx,20,30,40,1,-1,-1,-1\n");
  CHECK_THROWS_WITH_AS(cbtrack::read_detections(bad_field),
                       doctest::Contains(":2:"), std::runtime_error);
  const auto bad_count = write_text("bad2.txt", "1,-1,10\n");
  CHECK_THROWS_WITH_AS(cbtrack::read_detections(bad_count),
                       doctest::Contains(":1:"), std::runtime_error);
  const auto bad_extent = write_text("bad3.txt", "1,-1,10,20,0,40,1,-1,-1,-1\n");
  CHECK_THROWS_AS(cbtrack::read_detections(bad_extent), std::runtime_error);
  const auto bad_frame = write_text("bad4.txt", "0,-1,10,20,30,40,1,-1,-1,-1\n");
  CHECK_THROWS_AS(cbtrack::read_detections(bad_frame), std::runtime_error);
}

TEST_CASE("tracklet round trip is byte-identical for canonical files") {
  std::vector<cbtrack::Tracklet> tracklets(2);
  tracklets[0].id = 1;
  tracklets[1].id = 2;
  cbtrack::SplitMix64 rng(909);
  for (int f = 0; f < 25; ++f) {
    tracklets[0].entries.push_back(
        {f, cbtrack::Box{rng.next_in(0, 500), rng.next_in(0, 500), rng.next_in(1, 60),
                         rng.next_in(1, 60)},
         -1});
    if (f % 3 == 0) {
      tracklets[1].entries.push_back(
          {f, cbtrack::Box{rng.next_in(0, 500), rng.next_in(0, 500), rng.next_in(1, 60),
                           rng.next_in(1, 60)},
           -1});
    }
  }
  const fs::path first = scratch_dir() / "tracks_a.txt";
  const fs::path second = scratch_dir() / "tracks_b.txt";
  cbtrack::write_tracklets(first, tracklets);

  const auto reread = cbtrack::tracklets_from_annotations(cbtrack::read_annotations(first));
  REQUIRE(reread.size() == 2);
  CHECK(reread[0].entries.size() == 25);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(reread[0].entries[i].box == tracklets[0].entries[i].box);
  }
  cbtrack::write_tracklets(second, reread);
  CHECK(slurp(first) == slurp(second));
}

TEST_CASE("detection round trip preserves rows and bytes") {
  cbtrack::SceneSpec spec;
  spec.seed = 31;
  spec.n_objects = 3;
  spec.n_frames = 20;
  const auto scene = cbtrack::generate(spec);
  const fs::path first = scratch_dir() / "dets_a.txt";
  const fs::path second = scratch_dir() / "dets_b.txt";
  cbtrack::write_detections(first, scene.detections);
  const auto reread = cbtrack::read_detections(first);
  CHECK(reread == scene.detections);
  cbtrack::write_detections(second, reread);
  CHECK(slurp(first) == slurp(second));
}

TEST_CASE("embedding files validate their framing") {
  const fs::path path = scratch_dir() / "emb.bin";
  cbtrack::EmbeddingTable table;
  table.features.resize(2, 2);
  table.features << 1, 0, 0, 1;
  cbtrack::write_embeddings(path, table);
  const auto reread = cbtrack::read_embeddings(path);
  REQUIRE(reread.rows() == 2);
  REQUIRE(reread.dim() == 2);
  CHECK(reread.features == table.features);

  cbtrack::EmbeddingTable empty;
  empty.features.resize(0, 8);
  const fs::path empty_path = scratch_dir() / "emb_empty.bin";
  cbtrack::write_embeddings(empty_path, empty);
  const auto empty_reread = cbtrack::read_embeddings(empty_path);
  CHECK(empty_reread.rows() == 0);
  CHECK(empty_reread.dim() == 8);

  // bad magic
  auto bytes = slurp(path);
  auto corrupt = bytes;
  corrupt[0] = 'X';
  const auto bad_magic = write_text("emb_bad_magic.bin", corrupt);
  CHECK_THROWS_WITH_AS(cbtrack::read_embeddings(bad_magic), doctest::Contains("magic"),
                       std::runtime_error);

  // truncated payload
  const auto truncated = write_text("emb_trunc.bin", bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_WITH_AS(cbtrack::read_embeddings(truncated), doctest::Contains("size mismatch"),
                       std::runtime_error);

  // non-finite payload
  cbtrack::EmbeddingTable nan_table;
  nan_table.features.resize(1, 2);
  nan_table.features << 1.0f, std::numeric_limits<float>::quiet_NaN();
  const fs::path nan_path = scratch_dir() / "emb_nan.bin";
  cbtrack::write_embeddings(nan_path, nan_table);
  CHECK_THROWS_WITH_AS(cbtrack::read_embeddings(nan_path), doctest::Contains("non-finite"),
                       std::runtime_error);
}

TEST_CASE("run config documents round trip and typos are fatal") {
  cbtrack::RunConfig config;
  config.tracker.buffer_small = cbtrack::BufferScale(0.3);
  config.tracker.buffer_large = cbtrack::BufferScale(0.9);
  config.tracker.match_threshold = 0.02;
  config.tracker.max_age = 7;
  config.tracker.affinity = cbtrack::AffinityKind::diou;
  config.cut = 0.2;
  config.embedding_path = "emb.bin";
  config.jobs = 3;
  const fs::path path = scratch_dir() / "run.cfg";
  cbtrack::write_run_config(path, config);
  const auto reread = cbtrack::read_run_config(path);
  CHECK(reread.tracker.buffer_small.value() == 0.3);
  CHECK(reread.tracker.buffer_large.value() == 0.9);
  CHECK(reread.tracker.match_threshold == 0.02);
  CHECK(reread.tracker.max_age == 7);
  CHECK(reread.tracker.affinity == cbtrack::AffinityKind::diou);
  CHECK(reread.cut == 0.2);
  CHECK(reread.embedding_path == "emb.bin");
  CHECK(reread.jobs == 3);

  const auto unknown = write_text("bad.cfg", "buffer_small = 0.5\nbufer_large = 1.0\n");
  CHECK_THROWS_WITH_AS(cbtrack::read_run_config(unknown), doctest::Contains("unknown key"),
                       std::runtime_error);
  const auto duplicate = write_text("dup.cfg", "max_age = 5\nmax_age = 6\n");
  CHECK_THROWS_WITH_AS(cbtrack::read_run_config(duplicate), doctest::Contains("duplicate"),
                       std::runtime_error);
  const auto comments = write_text("ok.cfg", "# comment\n\nmax_age = 9\n");
  CHECK(cbtrack::read_run_config(comments).tracker.max_age == 9);
}
