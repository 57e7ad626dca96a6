#include <doctest.h>

#include <cbtrack/grid_search.hpp>
#include <cbtrack/synth.hpp>

using cbtrack::GridSearchResult;
using cbtrack::SequenceData;

namespace {

SequenceData dash_sequence(std::uint64_t seed) {
  cbtrack::SceneSpec spec;
  spec.seed = seed;
  spec.n_objects = 5;
  spec.n_frames = 40;
  spec.field_width = 4200.0;
  spec.field_height = 1000.0;
  spec.profile = cbtrack::MotionProfile::fast_dash;
  auto scene = cbtrack::generate(spec);
  return SequenceData{std::move(scene.ground_truth), std::move(scene.detections)};
}

}  // namespace

TEST_CASE("a single-cell grid returns that cell") {
  const std::vector<SequenceData> sequences = {dash_sequence(1)};
  const GridSearchResult result = cbtrack::grid_search(sequences, {{0.7, 1.0}}, 0.01);
  REQUIRE(result.cells.size() == 1);
  CHECK(result.best_index == 0);
  CHECK(result.cells[0].buffer_small == 0.7);
  CHECK(result.cells[0].buffer_large == 1.0);
}

TEST_CASE("fast motion makes buffered cells strictly beat (0,0)") {
  const std::vector<SequenceData> sequences = {dash_sequence(2), dash_sequence(3)};
  const std::vector<std::pair<double, double>> grid = {{0.0, 0.0}, {0.7, 1.0}};
  const GridSearchResult result = cbtrack::grid_search(sequences, grid, 0.01);
  REQUIRE(result.cells.size() == 2);
  CHECK(result.cells[1].report.hota > result.cells[0].report.hota);
  CHECK(result.best_index == 1);
  CHECK(result.cells[1].report.hota == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("grid results are independent of the job count") {
  const std::vector<SequenceData> sequences = {dash_sequence(4)};
  std::vector<std::pair<double, double>> grid;
  for (const double s : {0.0, 0.4, 0.8}) {
    for (const double l : {0.0, 0.4, 0.8}) {
      if (s <= l) grid.emplace_back(s, l);
    }
  }
  const GridSearchResult serial = cbtrack::grid_search(sequences, grid, 0.01, 60, 1);
  const GridSearchResult parallel = cbtrack::grid_search(sequences, grid, 0.01, 60, 4);
  REQUIRE(serial.cells.size() == parallel.cells.size());
  CHECK(serial.best_index == parallel.best_index);
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].report.hota == parallel.cells[i].report.hota);
  }
}

TEST_CASE("invalid grids are rejected") {
  const std::vector<SequenceData> sequences = {dash_sequence(5)};
  CHECK_THROWS_AS(cbtrack::grid_search(sequences, {}, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(cbtrack::grid_search(sequences, {{1.0, 0.5}}, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(cbtrack::grid_search({}, {{0.5, 1.0}}, 0.01), std::invalid_argument);
}
