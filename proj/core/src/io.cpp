#include "bodt/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bodt {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!obj.is_object()) throw ModelError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ModelError("unknown key '" + key + "' in " + std::string(where));
  }
}

const json& require(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ModelError("missing key '" + std::string(key) + "' in " + std::string(where));
  }
  return *it;
}

double number(const json& j, std::string_view what) {
  if (!j.is_number()) throw ModelError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string string(const json& j, std::string_view what) {
  if (!j.is_string()) throw ModelError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  const json doc = parse_json(json_text);
  reject_unknown_keys(doc, {"locations", "sources", "tasks", "cost_model"}, "scenario");

  std::vector<Location> locations;
  for (const auto& l : require(doc, "locations", "scenario")) {
    reject_unknown_keys(l, {"id", "label"}, "location");
    locations.push_back({string(require(l, "id", "location"), "location id"),
                         l.contains("label") ? string(l["label"], "location label") : ""});
  }

  std::vector<std::string> sources;
  for (const auto& s : require(doc, "sources", "scenario")) sources.push_back(string(s, "source id"));

  std::vector<Task> tasks;
  for (const auto& t : require(doc, "tasks", "scenario")) {
    reject_unknown_keys(t, {"id", "size", "source"}, "task");
    tasks.emplace_back(string(require(t, "id", "task"), "task id"),
                       number(require(t, "size", "task"), "task size"),
                       string(require(t, "source", "task"), "task source"));
  }

  const json& cmj = require(doc, "cost_model", "scenario");
  reject_unknown_keys(cmj, {"comp", "startup", "block_seconds", "block_price", "transfer"},
                      "cost_model");
  CostModel cm;
  cm.comp = number(require(cmj, "comp", "cost_model"), "comp");
  cm.startup = number(require(cmj, "startup", "cost_model"), "startup");
  if (cmj.contains("block_seconds")) cm.block_seconds = number(cmj["block_seconds"], "block_seconds");
  if (cmj.contains("block_price")) cm.block_price = number(cmj["block_price"], "block_price");
  const json& transfer = require(cmj, "transfer", "cost_model");
  if (!transfer.is_object()) throw ModelError("transfer must be an object");
  for (const auto& [source, row] : transfer.items()) {
    if (!row.is_object()) throw ModelError("transfer row must be an object");
    for (const auto& [loc, rate] : row.items()) {
      cm.transfer[source][loc] = number(rate, "transfer rate");
    }
  }
  return Scenario(std::move(locations), std::move(sources), std::move(tasks), std::move(cm));
}

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["locations"] = json::array();
  for (const auto& l : scenario.locations()) {
    doc["locations"].push_back({{"id", l.id}, {"label", l.label}});
  }
  doc["sources"] = scenario.sources();
  doc["tasks"] = json::array();
  for (const auto& t : scenario.tasks()) {
    doc["tasks"].push_back({{"id", t.id}, {"size", t.size}, {"source", t.source}});
  }
  const CostModel& cm = scenario.cost_model();
  json transfer = json::object();
  for (const auto& [source, row] : cm.transfer) {
    for (const auto& [loc, rate] : row) transfer[source][loc] = rate;
  }
  doc["cost_model"] = {{"comp", cm.comp},
                       {"startup", cm.startup},
                       {"block_seconds", cm.block_seconds},
                       {"block_price", cm.block_price},
                       {"transfer", transfer}};
  return doc.dump(2) + "\n";
}

std::string plan_to_json(const Plan& plan, const Scenario& scenario, std::optional<Budget> budget) {
  const PlanMetrics m = plan_metrics(plan, scenario);
  json vms = json::object();
  for (std::size_t i = 0; i < plan.entries().size(); ++i) {
    const auto& e = plan.entries()[i];
    vms[e.vm.id] = {{"location", e.vm.location},
                    {"tasks", e.tasks},
                    {"exec_seconds", m.per_vm[i].exec_seconds},
                    {"blocks", m.per_vm[i].blocks}};
  }
  json doc = {{"vms", vms},
              {"makespan", m.makespan},
              {"total_blocks", m.total_blocks},
              {"feasible", !budget || m.total_blocks <= budget->tb_b},
              {"scenario_ref", scenario.fingerprint()}};
  return doc.dump(2) + "\n";
}

std::string infeasible_plan_json(std::string_view reason) {
  json doc = {{"vms", json::object()},
              {"makespan", nullptr},
              {"total_blocks", nullptr},
              {"feasible", false},
              {"reason", std::string(reason)}};
  return doc.dump(2) + "\n";
}

Plan parse_plan(std::string_view json_text, const Scenario& scenario) {
  const json doc = parse_json(json_text);
  reject_unknown_keys(doc, {"vms", "makespan", "total_blocks", "feasible", "scenario_ref", "reason"},
                      "plan");
  const json& vms = require(doc, "vms", "plan");
  if (vms.empty() && doc.contains("feasible") && doc["feasible"] == false) {
    throw ModelError("plan document records an infeasible outcome");
  }
  if (doc.contains("scenario_ref") && doc["scenario_ref"] != scenario.fingerprint()) {
    throw ModelError("plan was produced for a different scenario");
  }
  std::vector<VmAssignment> entries;
  for (const auto& [vm_id, body] : vms.items()) {
    reject_unknown_keys(body, {"location", "tasks", "exec_seconds", "blocks"}, "plan vm");
    VmAssignment a{{vm_id, string(require(body, "location", "plan vm"), "vm location")}, {}};
    for (const auto& t : require(body, "tasks", "plan vm")) a.tasks.push_back(string(t, "task id"));
    entries.push_back(std::move(a));
  }
  Plan plan(std::move(entries), scenario.fingerprint());
  if (auto v = validate_plan(plan, scenario); !v.ok()) throw PlanValidationError(std::move(v));
  return plan;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace bodt
