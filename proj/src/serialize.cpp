#include "qss/serialize.hpp"

#include <ostream>

namespace qss {

namespace {

Json interval_json(const security::Interval& ci) { return Json::array({ci.low, ci.high}); }

}  // namespace

Json to_json(const cavity::ValidationReport& report) {
  Json ladder = Json::array();
  for (const auto& p : report.ladder) {
    ladder.push_back({{"delta_over_g", p.delta_over_g},
                      {"omega_over_delta", p.omega_over_delta},
                      {"fock_cutoff", p.fock_cutoff},
                      {"deviation", p.deviation},
                      {"leak", p.leak}});
  }
  return {{"ladder", ladder}, {"samples", report.samples}, {"seed", report.seed}};
}

Json to_json(const protocol::CorrectionTable& table) {
  Json entries = Json::array();
  for (const auto& [key, correction] : table.entries()) {
    entries.push_back({{"alice", key.alice}, {"x", key.x}, {"pauli", to_string(correction)}});
  }
  return {{"n_users", table.users()}, {"receiver", table.receiver()}, {"entries", entries}};
}

protocol::CorrectionTable correction_table_from_json(const Json& doc) {
  std::map<protocol::BranchKey, Correction> entries;
  for (const auto& e : doc.at("entries")) {
    const auto label = e.at("pauli").get<std::string>();
    const auto c = parse_correction(label);
    if (!c) throw Error("unknown correction label '" + label + "'");
    entries.emplace(protocol::BranchKey{e.at("alice").get<std::string>(), e.at("x").get<std::string>()}, *c);
  }
  const int users = doc.at("n_users").get<int>();
  const protocol::PartyLayout layout(users);
  const SiteLabel receiver = doc.contains("receiver") ? doc.at("receiver").get<SiteLabel>() : layout.distributed().back();
  return protocol::CorrectionTable(users, receiver, std::move(entries));
}

Json to_json(const security::SecurityReport& report) {
  const auto& s = report.scenario;
  Json doc = {{"scenario", security::to_string(s.kind)},
              {"n_users", s.users},
              {"adversary", s.adversary},
              {"receiver", s.resolved_receiver()}};
  if (s.kind == security::ScenarioKind::InterceptResend) doc["substitute"] = security::to_string(s.substitute);
  doc["trials"] = report.trials;
  doc["successes"] = report.successes;
  doc["success_rate"] = report.success_rate;
  doc["ci"] = interval_json(report.success_ci);
  doc["mean_fidelity"] = report.mean_fidelity;
  doc["adversary_success_rate"] = report.adversary_success_rate;
  doc["check_rounds"] = report.check_rounds;
  doc["flagged"] = report.flagged;
  doc["detection_rate"] = report.detection_rate;
  doc["detection_ci"] = interval_json(report.detection_ci);
  doc["seed"] = report.seed;
  return doc;
}

Json to_json(const protocol::TranscriptEvent& event, std::size_t trial) {
  using protocol::EventKind;
  Json doc = {{"trial", trial}, {"event", protocol::to_string(event.kind)}, {"branch", event.branch}};
  switch (event.kind) {
    case EventKind::Prepare:
    case EventKind::Interact:
      doc["sites"] = event.sites;
      break;
    case EventKind::AliceMeasure:
      doc["sites"] = event.sites;
      doc["outcome"] = event.outcome;
      doc["prob"] = event.probability;
      break;
    case EventKind::Announce:
      doc["user"] = event.user;
      doc["message"] = event.message;
      break;
    case EventKind::XMeasure:
      doc["user"] = event.user;
      doc["sites"] = event.sites;
      doc["outcome"] = event.outcome;
      doc["prob"] = event.probability;
      break;
    case EventKind::Correct:
      doc["user"] = event.user;
      doc["sites"] = event.sites;
      doc["pauli"] = event.outcome;
      break;
    case EventKind::Recover:
      doc["user"] = event.user;
      doc["sites"] = event.sites;
      doc["fidelity"] = event.fidelity;
      break;
  }
  return doc;
}

void write_jsonl(std::ostream& out, const protocol::ProtocolTranscript& transcript, std::size_t trial) {
  for (const auto& e : transcript.events) out << to_json(e, trial).dump() << '\n';
}

void write_csv_header(std::ostream& out) { out << "trial,branch,alice_outcome,x_outcomes,pauli,fidelity\n"; }

void write_csv_rows(std::ostream& out, const protocol::ProtocolTranscript& transcript, std::size_t trial) {
  std::size_t branch = 0;
  for (const auto& b : transcript.branches) {
    out << trial << ',' << ++branch << ',' << b.alice_outcome << ',' << b.x_outcome << ',' << to_string(b.correction)
        << ',' << Json(b.fidelity).dump() << '\n';
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace qss
