#include <sstream>

#include <json.hpp>

#include "bodt/simulator.hpp"
#include "format.hpp"

namespace bodt {

using nlohmann::json;

namespace {

std::string_view kind_name(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::kNone:
      return "none";
    case PerturbationKind::kLognormal:
      return "lognormal";
    case PerturbationKind::kUniform:
      return "uniform";
    case PerturbationKind::kVmSlowdown:
      return "vm_slowdown";
  }
  return "none";
}

PerturbationKind parse_kind(const std::string& s) {
  if (s == "none") return PerturbationKind::kNone;
  if (s == "lognormal") return PerturbationKind::kLognormal;
  if (s == "uniform") return PerturbationKind::kUniform;
  if (s == "vm_slowdown") return PerturbationKind::kVmSlowdown;
  throw ModelError("unknown perturbation kind '" + s + "'");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const char* where) {
  if (!obj.is_object()) throw ModelError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ModelError("unknown key '" + key + "' in " + where);
    }
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

SimConfig parse_sim_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("malformed sim config: ") + e.what());
  }
  check_keys(doc, {"seed", "perturbation", "thr1", "thr2", "terminate_time", "reassignment_enabled"},
             "sim config");
  SimConfig c;
  try {
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("thr1")) c.thr1 = doc["thr1"].get<double>();
    if (doc.contains("thr2")) {
      const auto v = doc["thr2"].get<std::int64_t>();
      if (v < 0) throw ModelError("thr2 must be >= 0");
      c.thr2 = static_cast<std::size_t>(v);
    }
    if (doc.contains("terminate_time")) c.terminate_time = doc["terminate_time"].get<double>();
    if (doc.contains("reassignment_enabled")) {
      c.reassignment_enabled = doc["reassignment_enabled"].get<bool>();
    }
    if (doc.contains("perturbation")) {
      const json& p = doc["perturbation"];
      check_keys(p, {"kind", "sigma", "low", "high", "factors"}, "perturbation");
      c.perturbation.kind = parse_kind(p.value("kind", std::string("none")));
      c.perturbation.sigma = p.value("sigma", 0.0);
      c.perturbation.low = p.value("low", 1.0);
      c.perturbation.high = p.value("high", 1.0);
      if (p.contains("factors")) {
        for (const auto& [vm, f] : p["factors"].items()) c.perturbation.vm_factors[vm] = f.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw ModelError(std::string("invalid sim config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string sim_config_to_json(const SimConfig& c) {
  json p = {{"kind", kind_name(c.perturbation.kind)}};
  switch (c.perturbation.kind) {
    case PerturbationKind::kLognormal:
      p["sigma"] = c.perturbation.sigma;
      break;
    case PerturbationKind::kUniform:
      p["low"] = c.perturbation.low;
      p["high"] = c.perturbation.high;
      break;
    case PerturbationKind::kVmSlowdown: {
      json f = json::object();
      for (const auto& [vm, v] : c.perturbation.vm_factors) f[vm] = v;
      p["factors"] = f;
      break;
    }
    case PerturbationKind::kNone:
      break;
  }
  json doc = {{"seed", c.seed},
              {"perturbation", p},
              {"thr1", c.thr1},
              {"thr2", c.thr2},
              {"terminate_time", c.terminate_time},
              {"reassignment_enabled", c.reassignment_enabled}};
  return doc.dump(2) + "\n";
}

std::string sim_result_to_json(const SimResult& r) {
  json vms = json::array();
  for (const auto& v : r.per_vm) {
    json spans = json::array();
    for (const auto& s : v.spans) {
      spans.push_back({{"task", s.task}, {"start_s", s.start}, {"end_s", s.end}});
    }
    vms.push_back({{"vm_id", v.vm.id},
                   {"location", v.vm.location},
                   {"finish_s", v.finish},
                   {"blocks", v.blocks},
                   {"timed_out", v.timed_out},
                   {"received_work", v.received_work},
                   {"tasks", v.executed},
                   {"timeline", spans}});
  }
  json doc = {{"makespan", r.makespan}, {"total_blocks", r.total_blocks}, {"vms", vms}};
  return doc.dump(2) + "\n";
}

std::string events_to_csv(const SimResult& r) {
  std::ostringstream os;
  os << "time_s,vm_id,event,task_id,detail\n";
  for (const auto& e : r.events) {
    os << detail::format_double(e.time) << ',' << csv_field(e.vm_id) << ',' << to_string(e.type)
       << ',' << csv_field(e.task_id) << ',' << csv_field(e.detail) << '\n';
  }
  return os.str();
}

}  // namespace bodt
