#include <filesystem>

#include "doctest.h"
#include "properties.hpp"

namespace {

void require(const masharp::props::Outcome& o, int count) {
  INFO(o.name << ": " << o.failures << " failures, worst " << o.worst << "; " << o.first_failure);
  CHECK(o.instances == count);
  CHECK(o.ok());
}

}  // namespace

TEST_CASE("property: centred Hessian is exact on quadratics") {
  require(masharp::props::quadratic_exactness(11, 200), 200);
}

TEST_CASE("property: monotone scheme obeys the comparison principle") {
  require(masharp::props::comparison_principle(12, 100), 100);
}

TEST_CASE("property: solutions scale like c^(1/n)") {
  require(masharp::props::scaling_law(13, 100), 100);
}

TEST_CASE("property: sublevel sets and shrunk domains are nested") {
  require(masharp::props::nested_families(14, 100), 100);
}

TEST_CASE("property: artifacts are reproducible byte for byte") {
  const auto dir = std::filesystem::temp_directory_path() / "masharp_property_artifacts";
  std::filesystem::create_directories(dir);
  require(masharp::props::artifact_determinism(15, 100, dir.string()), 100);
  std::filesystem::remove_all(dir);
}
