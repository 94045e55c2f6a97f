#pragma once

#include "qss/cavity.hpp"
#include "qss/protocol.hpp"
#include "qss/security.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace qss {

inline constexpr const char* kVersion = "0.3.1";

using Json = nlohmann::ordered_json;

Json to_json(const cavity::ValidationReport& report);

/// {"n_users":2,"receiver":6,"entries":[{"alice":"eeee","x":"+","pauli":"Z"}, ...]}
Json to_json(const protocol::CorrectionTable& table);
protocol::CorrectionTable correction_table_from_json(const Json& doc);

Json to_json(const security::SecurityReport& report);

/// One JSON object per event, tagged with the trial index.
Json to_json(const protocol::TranscriptEvent& event, std::size_t trial);

/// Writes every event of `transcript` as one line each.
void write_jsonl(std::ostream& out, const protocol::ProtocolTranscript& transcript, std::size_t trial);

/// trial,branch,alice_outcome,x_outcomes,pauli,fidelity
void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const protocol::ProtocolTranscript& transcript, std::size_t trial);

/// Compact dump with fixed key order, terminated by a newline.
std::string dump(const Json& doc);

}  // namespace qss
