// Copyright 2026 The Fragalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fragalloc/scenario.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <tuple>

#include "fragalloc/error.h"

namespace fragalloc::sim {
namespace {

using nlohmann::json;
using rules::Value;

// A JSON value together with its path from the document root, so every
// diagnostic can name the field it is about.
class Field {
 public:
  Field(const json& value, std::string path)
      : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void Fail(const std::string& message) const {
    throw InputError((path_.empty() ? "document" : path_) + ": " + message);
  }

  bool Has(const std::string& key) const {
    return value_.is_object() && value_.contains(key);
  }

  Field operator[](const std::string& key) const {
    if (!Has(key)) Fail("missing field '" + key + "'");
    return Field(value_.at(key), Join(key));
  }

  Field operator[](size_t index) const {
    return Field(value_.at(index), path_ + "[" + std::to_string(index) + "]");
  }

  std::string Join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& Object() const {
    if (!value_.is_object()) Fail("expected an object");
    return value_;
  }

  size_t ArraySize() const {
    if (!value_.is_array()) Fail("expected an array");
    return value_.size();
  }

  double Number() const {
    if (!value_.is_number()) Fail("expected a number");
    double v = value_.get<double>();
    if (!std::isfinite(v)) Fail("expected a finite number");
    return v;
  }

  double NonNegative() const {
    double v = Number();
    if (v < 0) Fail("must be >= 0");
    return v;
  }

  double Positive() const {
    double v = Number();
    if (!(v > 0)) Fail("must be > 0");
    return v;
  }

  int64_t Integer(int64_t minimum) const {
    double v = Number();
    if (v != std::trunc(v) || std::fabs(v) > 9e15) Fail("expected an integer");
    if (v < static_cast<double>(minimum)) {
      Fail("must be >= " + std::to_string(minimum));
    }
    return static_cast<int64_t>(v);
  }

  std::string String() const {
    if (!value_.is_string()) Fail("expected a string");
    return value_.get<std::string>();
  }

  Value Id() const {
    if (value_.is_number()) return Value::Number(Number());
    if (value_.is_string()) return ParseId(String());
    Fail("expected an id (number or identifier)");
  }

  Value ParseId(const std::string& text) const {
    Value v;
    if (!rules::ParseValue(text, &v)) {
      Fail("'" + text + "' is not a valid id");
    }
    return v;
  }

  void RejectUnknownKeys(std::initializer_list<std::string_view> known) const {
    for (const auto& [key, unused] : Object().items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        Fail("unknown field '" + key + "'");
      }
    }
  }

 private:
  const json& value_;
  std::string path_;
};

double Bandwidth(const Field& f) {
  if (f.value().is_string()) {
    if (f.String() != "inf") f.Fail("expected a number or \"inf\"");
    return net::kInfiniteBandwidth;
  }
  return f.Positive();
}

net::NetworkElement ParseElement(const Field& f) {
  if (!f.value().is_object()) return net::NetworkElement{f.Id()};
  f.RejectUnknownKeys({"id", "delay", "bandwidth"});
  net::NetworkElement e{f["id"].Id()};
  if (f.Has("delay")) e.delay = f["delay"].NonNegative();
  if (f.Has("bandwidth")) e.bandwidth = Bandwidth(f["bandwidth"]);
  return e;
}

net::TopologySpec ParseTopology(const Field& f) {
  f.RejectUnknownKeys({"sites", "routers", "edges"});
  net::TopologySpec spec;
  Field sites = f["sites"];
  for (size_t i = 0; i < sites.ArraySize(); ++i) {
    spec.sites.push_back(ParseElement(sites[i]));
  }
  if (f.Has("routers")) {
    Field routers = f["routers"];
    for (size_t i = 0; i < routers.ArraySize(); ++i) {
      spec.routers.push_back(ParseElement(routers[i]));
    }
  }
  if (f.Has("edges")) {
    Field edges = f["edges"];
    for (size_t i = 0; i < edges.ArraySize(); ++i) {
      Field e = edges[i];
      e.RejectUnknownKeys({"from", "to", "delay", "bandwidth"});
      net::Edge edge{e["from"].Id(), e["to"].Id()};
      if (e.Has("delay")) edge.delay = e["delay"].NonNegative();
      if (e.Has("bandwidth")) edge.bandwidth = Bandwidth(e["bandwidth"]);
      spec.edges.push_back(edge);
    }
  }
  return spec;
}

cost::QueryType ParseType(const Field& f) {
  auto type = cost::ParseQueryType(f.String());
  if (!type) f.Fail("unknown query type '" + f.String() + "'");
  return *type;
}

// Splits "a,b,c" object keys used by the compact factor notation.
std::vector<std::string> SplitKey(const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream in(key);
  std::string part;
  while (std::getline(in, part, ',')) parts.push_back(part);
  return parts;
}

class ScenarioParser {
 public:
  ScenarioParser(const json& doc, std::string base_dir)
      : root_(doc, ""), base_dir_(std::move(base_dir)) {}

  Scenario Parse() {
    root_.RejectUnknownKeys({"topology", "fragments", "placement", "capacities",
                             "factors", "workload", "policy", "rounds",
                             "sync_period", "adjacency", "initial_stats",
                             "requirements"});
    Field topology = root_["topology"];
    s_.topology = ParseTopology(topology);
    try {
      graph_ = net::BuildGraph(s_.topology);
    } catch (const InputError& e) {
      topology.Fail(e.what());
    }
    for (const net::NetworkElement& site : graph_.sites()) {
      s_.model.nodes.push_back(site.id);
    }
    std::sort(s_.model.nodes.begin(), s_.model.nodes.end());
    s_.model.links = net::ContractRouters(graph_);

    ParseFragments(root_["fragments"]);
    ParsePlacement(root_["placement"]);
    if (root_.Has("capacities")) ParseCapacities(root_["capacities"]);
    if (root_.Has("factors")) ParseFactors(root_["factors"]);
    if (root_.Has("workload")) ParseWorkload(root_["workload"]);
    if (root_.Has("initial_stats")) ParseInitialStats(root_["initial_stats"]);
    if (root_.Has("requirements")) ParseRequirements(root_["requirements"]);
    ParsePolicy();
    s_.rounds = root_["rounds"].Integer(1);
    if (root_.Has("sync_period")) {
      s_.sync_period = root_["sync_period"].Integer(1);
    }
    ParseAdjacency();
    CheckFeasible();
    return std::move(s_);
  }

 private:
  Value Node(const Field& f) const {
    Value id = f.Id();
    if (!s_.model.has_node(id)) f.Fail("unknown node " + id.ToString());
    return id;
  }

  Value NodeKey(const Field& f, const std::string& key) const {
    Value id = f.ParseId(key);
    if (!s_.model.has_node(id)) {
      Field(f.value(), f.Join(key)).Fail("unknown node " + id.ToString());
    }
    return id;
  }

  Value Fragment(const Field& f) const {
    Value id = f.Id();
    if (!s_.model.has_fragment(id)) f.Fail("unknown fragment " + id.ToString());
    return id;
  }

  void ParseFragments(const Field& f) {
    std::set<Value> seen;
    for (size_t i = 0; i < f.ArraySize(); ++i) {
      Field e = f[i];
      e.RejectUnknownKeys({"id", "size", "units"});
      cost::FragmentSpec spec{e["id"].Id()};
      if (!seen.insert(spec.id).second) {
        e["id"].Fail("duplicate fragment " + spec.id.ToString());
      }
      if (e.Has("size")) spec.size = e["size"].Positive();
      if (e.Has("units")) spec.units = e["units"].Positive();
      s_.model.fragments.push_back(spec);
    }
    std::sort(s_.model.fragments.begin(), s_.model.fragments.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
  }

  void ParsePlacement(const Field& f) {
    for (const auto& [key, unused] : f.Object().items()) {
      Field entry = f[key];
      Value fragment = f.ParseId(key);
      if (!s_.model.has_fragment(fragment)) {
        entry.Fail("unknown fragment " + fragment.ToString());
      }
      if (!s_.placement.emplace(fragment, Node(entry)).second) {
        entry.Fail("fragment placed twice");
      }
    }
    for (const cost::FragmentSpec& spec : s_.model.fragments) {
      if (!s_.placement.count(spec.id)) {
        f.Fail("fragment " + spec.id.ToString() + " has no placement");
      }
    }
  }

  void ParseCapacities(const Field& f) {
    for (const auto& [key, unused] : f.Object().items()) {
      s_.model.capacity[NodeKey(f, key)] = f[key].Positive();
    }
  }

  void ParsePairFactor(const Field& f,
                       std::map<std::pair<Value, Value>, double>* out) {
    if (f.value().is_object()) {
      for (const auto& [key, unused] : f.value().items()) {
        std::vector<std::string> parts = SplitKey(key);
        if (parts.size() != 2) f[key].Fail("key must read \"i,j\"");
        (*out)[{NodeKey(f, parts[0]), NodeKey(f, parts[1])}] =
            f[key].NonNegative();
      }
      return;
    }
    for (size_t i = 0; i < f.ArraySize(); ++i) {
      Field e = f[i];
      e.RejectUnknownKeys({"i", "j", "value"});
      (*out)[{Node(e["i"]), Node(e["j"])}] = e["value"].NonNegative();
    }
  }

  void ParseFactors(const Field& f) {
    f.RejectUnknownKeys({"gamma", "other", "exec_weight"});
    if (f.Has("gamma")) ParsePairFactor(f["gamma"], &s_.model.factors.gamma);
    if (f.Has("other")) ParsePairFactor(f["other"], &s_.model.factors.other);
    if (!f.Has("exec_weight")) return;
    Field e = f["exec_weight"];
    auto& weights = s_.model.factors.exec_weight;
    if (e.value().is_object()) {
      for (const auto& [key, unused] : e.value().items()) {
        std::vector<std::string> parts = SplitKey(key);
        Field entry = e[key];
        if (parts.size() != 3) entry.Fail("key must read \"i,j,k\"");
        Value fragment = e.ParseId(parts[1]);
        if (!s_.model.has_fragment(fragment)) {
          entry.Fail("unknown fragment " + fragment.ToString());
        }
        auto type = cost::ParseQueryType(parts[2]);
        if (!type) entry.Fail("unknown query type '" + parts[2] + "'");
        weights[{NodeKey(e, parts[0]), fragment, *type}] = entry.NonNegative();
      }
      return;
    }
    for (size_t i = 0; i < e.ArraySize(); ++i) {
      Field w = e[i];
      w.RejectUnknownKeys({"node", "fragment", "type", "value"});
      weights[{Node(w["node"]), Fragment(w["fragment"]),
               ParseType(w["type"])}] = w["value"].NonNegative();
    }
  }

  void ParseWorkload(const Field& f) {
    for (size_t i = 0; i < f.ArraySize(); ++i) {
      Field w = f[i];
      w.RejectUnknownKeys({"node", "fragment", "type", "rate"});
      s_.workload.push_back({Node(w["node"]), Fragment(w["fragment"]),
                             ParseType(w["type"]), w["rate"].NonNegative()});
    }
    std::stable_sort(s_.workload.begin(), s_.workload.end(),
                     [](const WorkloadEntry& a, const WorkloadEntry& b) {
                       return std::tie(a.node, a.fragment, a.type) <
                              std::tie(b.node, b.fragment, b.type);
                     });
  }

  void ParseInitialStats(const Field& f) {
    for (size_t i = 0; i < f.ArraySize(); ++i) {
      Field e = f[i];
      e.RejectUnknownKeys({"node", "fragment", "type", "count"});
      s_.initial_stats.SetFrequency(Node(e["node"]), Fragment(e["fragment"]),
                                    ParseType(e["type"]),
                                    e["count"].NonNegative());
    }
  }

  void ParseRequirements(const Field& f) {
    for (size_t i = 0; i < f.ArraySize(); ++i) {
      Field e = f[i];
      e.RejectUnknownKeys({"node", "fragment", "value"});
      s_.initial_stats.SetRequirement(Node(e["node"]), Fragment(e["fragment"]),
                                      e["value"].NonNegative());
    }
  }

  void ParsePolicy() {
    if (!root_.Has("policy")) {
      s_.policy.name = "threshold";
      return;
    }
    Field f = root_["policy"];
    if (f.value().is_string()) {
      std::string name = f.String();
      auto names = policy::BuiltinPolicyNames();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        f.Fail("unknown policy '" + name + "'");
      }
      s_.policy.name = name;
      return;
    }
    f.RejectUnknownKeys({"file"});
    std::filesystem::path file = f["file"].String();
    if (file.is_relative()) file = std::filesystem::path(base_dir_) / file;
    s_.policy.file = file.lexically_normal().string();
  }

  void ParseAdjacency() {
    if (!root_.Has("adjacency") || (root_["adjacency"].value().is_string() &&
                                    root_["adjacency"].String() == "derive")) {
      for (const auto& pair : net::DirectSitePairs(graph_)) {
        s_.model.adjacency.insert(pair);
      }
      return;
    }
    Field f = root_["adjacency"];
    if (f.value().is_string()) f.Fail("expected \"derive\" or a list of pairs");
    for (size_t i = 0; i < f.ArraySize(); ++i) {
      Field pair = f[i];
      if (pair.ArraySize() != 2) pair.Fail("expected a pair of node ids");
      Value a = Node(pair[0]);
      Value b = Node(pair[1]);
      if (a == b) pair.Fail("a node is not adjacent to itself");
      s_.model.adjacency.emplace(a, b);
      s_.model.adjacency.emplace(b, a);
    }
  }

  void CheckFeasible() {
    auto violations = cost::CheckCapacity(s_.placement, s_.model.fragments,
                                          s_.model.capacity);
    if (!violations.empty()) {
      const cost::CapacityViolation& v = violations.front();
      throw InputError("infeasible initial placement at node " +
                       v.node.ToString() + ": load " +
                       rules::FormatNumber(v.load) + " exceeds capacity " +
                       rules::FormatNumber(v.limit));
    }
  }

  Field root_;
  std::string base_dir_;
  Scenario s_;
  net::NetworkGraph graph_;
};

}  // namespace

Scenario ParseScenario(std::string_view json_text,
                       const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("document: expected an object");
  return ScenarioParser(doc, base_dir).Parse();
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return ParseScenario(buffer.str(), dir.empty() ? "." : dir);
}

policy::PolicyRuleSet ResolvePolicy(const PolicyRef& ref) {
  if (!ref.file.empty()) return policy::LoadPolicyFile(ref.file);
  return policy::BuiltinPolicy(ref.name);
}

std::vector<QueryEvent> GenerateWorkload(const Scenario& scenario,
                                         int64_t round) {
  std::vector<QueryEvent> events;
  for (const WorkloadEntry& w : scenario.workload) {
    double acc = static_cast<double>(round) * w.rate;
    double next = static_cast<double>(round + 1) * w.rate;
    auto count = static_cast<int64_t>(std::floor(next) - std::floor(acc));
    for (int64_t n = 0; n < count; ++n) {
      events.push_back({round, w.node, w.fragment, w.type});
    }
  }
  return events;
}

}  // namespace fragalloc::sim
