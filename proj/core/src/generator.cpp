#include "bodt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <json.hpp>

namespace bodt {

using nlohmann::json;

namespace {

std::string padded(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

int width_for(std::size_t n) {
  int w = 1;
  for (std::size_t x = n > 0 ? n - 1 : 0; x >= 10; x /= 10) ++w;
  return std::max(w, 2);
}

}  // namespace

void GenParams::validate() const {
  if (n_locations < 1 || n_sources < 1 || n_tasks < 1 || clusters < 1) {
    throw ModelError("generator counts must all be >= 1");
  }
  if (clusters > n_locations) throw ModelError("clusters cannot exceed n_locations");
  if (!(size_min > 0.0) || size_max < size_min) throw ModelError("need 0 < size_min <= size_max");
  if (intra_min < 0.0 || intra_max < intra_min || inter_max < inter_min) {
    throw ModelError("rate ranges must be ordered and non-negative");
  }
  if (!(intra_max < inter_min)) {
    throw ModelError("intra-cluster rates must lie strictly below inter-cluster rates");
  }
  if (source_skew < 0.0) throw ModelError("source_skew must be >= 0");
  if (comp < 0.0 || startup < 0.0 || !(block_seconds > 0.0) || !(block_price > 0.0)) {
    throw ModelError("cost model scalars out of range");
  }
}

Scenario gen_scenario(const GenParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);

  std::vector<Location> locations;
  const int lw = width_for(p.n_locations);
  for (std::size_t l = 0; l < p.n_locations; ++l) {
    locations.push_back({padded('L', l, lw), "region-" + std::to_string(l) + "/cluster-" +
                                                 std::to_string(l % p.clusters)});
  }
  std::vector<std::string> sources;
  const int sw = width_for(p.n_sources);
  for (std::size_t s = 0; s < p.n_sources; ++s) sources.push_back(padded('S', s, sw));

  CostModel cm;
  cm.comp = p.comp;
  cm.startup = p.startup;
  cm.block_seconds = p.block_seconds;
  cm.block_price = p.block_price;
  std::uniform_real_distribution<double> intra(p.intra_min, p.intra_max);
  std::uniform_real_distribution<double> inter(p.inter_min, p.inter_max);
  for (std::size_t s = 0; s < p.n_sources; ++s) {
    for (std::size_t l = 0; l < p.n_locations; ++l) {
      const bool same = s % p.clusters == l % p.clusters;
      cm.transfer[sources[s]][locations[l].id] = same ? intra(rng) : inter(rng);
    }
  }

  // Source popularity follows the shuffled Zipf ranks so that heavy sources
  // land in different clusters from one seed to the next.
  std::vector<std::size_t> rank(p.n_sources);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<double> weight(p.n_sources);
  for (std::size_t s = 0; s < p.n_sources; ++s) {
    weight[s] = 1.0 / std::pow(static_cast<double>(rank[s] + 1), p.source_skew);
  }
  std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
  std::uniform_int_distribution<long long> size(static_cast<long long>(std::ceil(p.size_min)),
                                                static_cast<long long>(std::floor(p.size_max)));
  const bool integral = std::ceil(p.size_min) <= std::floor(p.size_max);
  std::uniform_real_distribution<double> size_real(p.size_min, p.size_max);

  std::vector<Task> tasks;
  const int tw = width_for(p.n_tasks);
  for (std::size_t t = 0; t < p.n_tasks; ++t) {
    const std::size_t s = pick(rng);
    const double sz = integral ? static_cast<double>(size(rng)) : size_real(rng);
    tasks.emplace_back(padded('t', t, tw), sz, sources[s]);
  }
  return Scenario(std::move(locations), std::move(sources), std::move(tasks), std::move(cm));
}

GenParams parse_gen_params(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("malformed generator params: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("generator params must be a JSON object");
  GenParams p;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "n_locations") p.n_locations = v.get<std::size_t>();
      else if (key == "n_sources") p.n_sources = v.get<std::size_t>();
      else if (key == "n_tasks") p.n_tasks = v.get<std::size_t>();
      else if (key == "clusters") p.clusters = v.get<std::size_t>();
      else if (key == "size_min") p.size_min = v.get<double>();
      else if (key == "size_max") p.size_max = v.get<double>();
      else if (key == "intra_min") p.intra_min = v.get<double>();
      else if (key == "intra_max") p.intra_max = v.get<double>();
      else if (key == "inter_min") p.inter_min = v.get<double>();
      else if (key == "inter_max") p.inter_max = v.get<double>();
      else if (key == "source_skew") p.source_skew = v.get<double>();
      else if (key == "comp") p.comp = v.get<double>();
      else if (key == "startup") p.startup = v.get<double>();
      else if (key == "block_seconds") p.block_seconds = v.get<double>();
      else if (key == "block_price") p.block_price = v.get<double>();
      else if (key == "seed") p.seed = v.get<std::uint64_t>();
      else throw ModelError("unknown key '" + key + "' in generator params");
    }
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid generator params: ") + e.what());
  }
  p.validate();
  return p;
}

std::string gen_params_to_json(const GenParams& p) {
  json doc = {{"n_locations", p.n_locations}, {"n_sources", p.n_sources},
              {"n_tasks", p.n_tasks},         {"clusters", p.clusters},
              {"size_min", p.size_min},       {"size_max", p.size_max},
              {"intra_min", p.intra_min},     {"intra_max", p.intra_max},
              {"inter_min", p.inter_min},     {"inter_max", p.inter_max},
              {"source_skew", p.source_skew}, {"comp", p.comp},
              {"startup", p.startup},         {"block_seconds", p.block_seconds},
              {"block_price", p.block_price}, {"seed", p.seed}};
  return doc.dump(2) + "\n";
}

}  // namespace bodt
