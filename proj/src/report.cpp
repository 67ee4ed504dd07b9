#include <json.hpp>

#include "cft/harness.hpp"

namespace cft {

void write_trace(std::ostream& os, const HealingPhase& phase) {
  for (const auto& m : phase.messages) {
    os << m.round << '\t' << m.from << '\t' << m.to << '\t' << to_string(m.kind) << '\t'
       << m.refs << '\n';
  }
}

void write_metrics_json(std::ostream& os, const Metrics& m) {
  nlohmann::ordered_json j;
  j["n"] = m.n;
  j["b"] = m.b;
  j["root"] = m.root;
  j["diameterT0"] = m.diameter_t0;
  j["deltaT0"] = m.delta_t0;
  j["maxHeavyChildren"] = m.max_heavy_children;
  j["deletions"] = m.rows.size();
  j["nonLeafDeletions"] = m.y;
  j["maxDegreeIncrease"] = m.max_degree_increase;
  j["degreeWitness"] = {{"t", m.degree_witness_t}, {"node", m.degree_witness_node}};
  j["maxDiameter"] = m.max_diameter;
  j["diameterStretch"] =
      m.diameter_t0 == 0 ? 1.0 : static_cast<double>(m.max_diameter) / m.diameter_t0;
  j["maxRounds"] = m.max_rounds;
  j["maxMessagesPerNode"] = m.max_msgs;
  j["maxMessageRefs"] = m.max_msg_refs;
  j["maxStoredRefs"] = m.max_refs;
  j["roundViolations"] = m.round_violations;
  j["messageBudgetViolations"] = m.budget_violations;
  j["probes"] = {{"total", m.probes},
                 {"delivered", m.delivered},
                 {"returnedToSender", m.returned},
                 {"discarded", m.discarded},
                 {"pathBoundViolations", m.path_bound_violations},
                 {"stretchViolations", m.stretch_violations},
                 {"worstSlack", m.worst_slack},
                 {"maxStretchG0", m.max_stretch_g0}};
  nlohmann::ordered_json checks = nlohmann::ordered_json::object();
  for (std::size_t i = 1; i < m.checks_run.size(); ++i) {
    checks[to_string(static_cast<CheckId>(i))] = {{"run", m.checks_run[i]},
                                                   {"failed", m.check_failures[i]}};
  }
  j["checks"] = checks;
  nlohmann::ordered_json viol = nlohmann::ordered_json::array();
  for (const auto& v : m.violations) {
    viol.push_back({{"t", v.t}, {"check", to_string(v.check)}, {"counterexample", v.counterexample}});
  }
  j["violations"] = viol;
  nlohmann::ordered_json ids = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.id_of.size(); ++i) ids.push_back({{"index", i + 1}, {"id", m.id_of[i]}});
  j["idMapping"] = ids;
  os << j.dump(2) << '\n';
}

void write_rows_csv(std::ostream& os, const Metrics& m) {
  os << "t,deleted,isLeaf,rounds,maxMsgs,maxRefs,degIncrease,diameter\n";
  for (const auto& r : m.rows) {
    os << r.t << ',' << r.deleted << ',' << (r.is_leaf ? 1 : 0) << ',' << r.rounds << ','
       << r.max_msgs << ',' << r.max_refs << ',' << r.deg_increase << ',' << r.diameter << '\n';
  }
}

void write_probes_csv(std::ostream& os, const Metrics& m) {
  os << "t,s,w,status,logical,physical,forward,back,delta,y,bound,treeDist,g0Dist\n";
  for (const auto& p : m.probe_log) {
    os << p.t << ',' << p.s << ',' << p.w << ',' << to_string(p.status) << ',' << p.logical
       << ',' << p.physical << ',' << p.forward << ',' << p.back << ',' << p.delta << ','
       << p.y << ',' << p.bound << ',' << p.tree_dist << ',' << p.g0_dist << '\n';
  }
}

namespace {

std::string dot_name(const Vertex& v) { return (v.helper ? "h" : "r") + std::to_string(v.id); }

}  // namespace

void write_dot(std::ostream& os, const Topology& t) {
  os << "digraph T {\n";
  for (const auto& [v, tv] : t.vertices()) {
    if (v.helper) {
      os << "  " << dot_name(v) << " [shape=box, label=\"h:" << v.id << '@' << v.host()
         << "\"];\n";
    } else {
      os << "  " << dot_name(v) << " [shape=circle, label=\"" << v.id << "\"];\n";
    }
  }
  for (const auto& [v, tv] : t.vertices()) {
    for (const Vertex& c : t.children(v)) {
      os << "  " << dot_name(v) << " -> " << dot_name(c) << ";\n";
    }
  }
  for (const auto& [v, tv] : t.vertices()) {
    if (v.helper) {
      os << "  " << dot_name(v) << " -> " << dot_name(Vertex::real(v.host()))
         << " [style=dashed, dir=none];\n";
    }
  }
  os << "}\n";
}

}  // namespace cft
