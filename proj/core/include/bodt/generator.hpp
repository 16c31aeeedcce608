#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bodt/model.hpp"

namespace bodt {

// Synthetic geo-clustered workload. Locations and sources are dealt
// round-robin into `clusters`; a (source, location) pair inside one cluster
// gets an intra-cluster rate, any other pair an inter-cluster rate. Each
// task picks its source with Zipf weight 1/(rank+1)^source_skew, so a
// positive skew concentrates data on a few sources.
struct GenParams {
  std::size_t n_locations = 8;
  std::size_t n_sources = 38;
  std::size_t n_tasks = 200;
  std::size_t clusters = 4;
  double size_min = 20.0;
  double size_max = 80.0;
  double intra_min = 0.4;
  double intra_max = 1.0;
  double inter_min = 3.0;
  double inter_max = 6.0;
  double source_skew = 1.0;
  double comp = 0.05;
  double startup = 60.0;
  double block_seconds = 3600.0;
  double block_price = 1.0;
  std::uint64_t seed = 1;

  void validate() const;  // throws ModelError
};

Scenario gen_scenario(const GenParams& params);

GenParams parse_gen_params(std::string_view json_text);
std::string gen_params_to_json(const GenParams& params);

}  // namespace bodt
