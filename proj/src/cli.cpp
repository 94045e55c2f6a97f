#include "qss/cli.hpp"

#include "qss/protocol.hpp"
#include "qss/security.hpp"
#include "qss/serialize.hpp"
#include "parallel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace qss::cli {

namespace {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Fully resolved settings for one invocation. Flags override the config
/// file, which overrides the defaults below.
struct RunConfig {
  std::string subcommand;
  bool haar_secret = true;
  double alpha_re = 1.0;
  double alpha_im = 0.0;
  double beta_re = 0.0;
  double beta_im = 0.0;
  int n_users = 2;
  std::optional<int> receiver;
  double lambda_t = std::numbers::pi / 4;
  double omega_t = std::numbers::pi;
  std::optional<double> delta_over_g;
  std::optional<double> omega_over_delta;
  std::string ladder;
  int fock_cutoff = 8;
  int samples = 50;
  int detuning_sign = 1;
  std::size_t trials = 1;
  std::optional<std::uint64_t> seed;
  std::string mode = "exhaustive";
  std::string scenario;
  std::string policy = "ground";
  int adversary = 1;
  std::string out;
  std::string csv;
  unsigned threads = 1;
};

/// Optional mirrors of every flag; only the ones given on the command line
/// are set.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> secret;
  std::optional<double> alpha_re, alpha_im, beta_re, beta_im;
  std::optional<int> n_users, receiver;
  std::optional<double> lambda_t, omega_t, delta_over_g, omega_over_delta;
  std::optional<std::string> ladder;
  std::optional<int> fock_cutoff, samples, detuning_sign;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode, scenario, policy;
  std::optional<int> adversary;
  std::optional<std::string> out, csv;
  std::optional<unsigned> threads;
};

template <typename T>
void take(T& target, const std::optional<T>& value) {
  if (value) target = *value;
}

template <typename T>
void take(std::optional<T>& target, const std::optional<T>& value) {
  if (value) target = value;
}

void apply_secret_keyword(RunConfig& cfg, const std::string& value) {
  if (value == "haar-random") {
    cfg.haar_secret = true;
  } else if (value == "explicit") {
    cfg.haar_secret = false;
  } else {
    throw ConfigError("secret must be 'haar-random' or given as alpha/beta re/im pairs");
  }
}

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "secret") apply_secret_keyword(cfg, value.get<std::string>());
      else if (key == "alpha_re") { cfg.alpha_re = value.get<double>(); cfg.haar_secret = false; }
      else if (key == "alpha_im") { cfg.alpha_im = value.get<double>(); cfg.haar_secret = false; }
      else if (key == "beta_re") { cfg.beta_re = value.get<double>(); cfg.haar_secret = false; }
      else if (key == "beta_im") { cfg.beta_im = value.get<double>(); cfg.haar_secret = false; }
      else if (key == "n_users") cfg.n_users = value.get<int>();
      else if (key == "receiver") cfg.receiver = value.get<int>();
      else if (key == "lambda_t") cfg.lambda_t = value.get<double>();
      else if (key == "omega_t") cfg.omega_t = value.get<double>();
      else if (key == "delta_over_g") cfg.delta_over_g = value.get<double>();
      else if (key == "omega_over_delta") cfg.omega_over_delta = value.get<double>();
      else if (key == "ladder") cfg.ladder = value.get<std::string>();
      else if (key == "fock_cutoff") cfg.fock_cutoff = value.get<int>();
      else if (key == "samples") cfg.samples = value.get<int>();
      else if (key == "detuning_sign") cfg.detuning_sign = value.get<int>();
      else if (key == "trials") cfg.trials = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "mode") cfg.mode = value.get<std::string>();
      else if (key == "scenario") cfg.scenario = value.get<std::string>();
      else if (key == "policy") cfg.policy = value.get<std::string>();
      else if (key == "adversary") cfg.adversary = value.get<int>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "csv") cfg.csv = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
}

RunConfig resolve(const std::string& subcommand, const Flags& f) {
  RunConfig cfg;
  cfg.subcommand = subcommand;
  if (subcommand == "security") cfg.trials = 1000;
  if (f.config) apply_file(cfg, *f.config);

  if (f.secret) apply_secret_keyword(cfg, *f.secret);
  if (f.alpha_re || f.alpha_im || f.beta_re || f.beta_im) {
    if (f.secret && *f.secret == "haar-random") throw ConfigError("--secret haar-random conflicts with explicit amplitudes");
    cfg.haar_secret = false;
  }
  take(cfg.alpha_re, f.alpha_re);
  take(cfg.alpha_im, f.alpha_im);
  take(cfg.beta_re, f.beta_re);
  take(cfg.beta_im, f.beta_im);
  take(cfg.n_users, f.n_users);
  take(cfg.receiver, f.receiver);
  take(cfg.lambda_t, f.lambda_t);
  take(cfg.omega_t, f.omega_t);
  take(cfg.delta_over_g, f.delta_over_g);
  take(cfg.omega_over_delta, f.omega_over_delta);
  take(cfg.ladder, f.ladder);
  take(cfg.fock_cutoff, f.fock_cutoff);
  take(cfg.samples, f.samples);
  take(cfg.detuning_sign, f.detuning_sign);
  take(cfg.trials, f.trials);
  take(cfg.seed, f.seed);
  take(cfg.mode, f.mode);
  take(cfg.scenario, f.scenario);
  take(cfg.policy, f.policy);
  take(cfg.adversary, f.adversary);
  take(cfg.out, f.out);
  take(cfg.csv, f.csv);
  take(cfg.threads, f.threads);

  if (!cfg.seed) {
    if (const char* env = std::getenv("QSS_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("QSS_SEED is not an unsigned integer: ") + env);
      }
    }
  }

  if (cfg.n_users < 2 || cfg.n_users > 6) throw ConfigError("n_users must be between 2 and 6");
  if (cfg.receiver && (*cfg.receiver < 1 || *cfg.receiver > cfg.n_users)) {
    throw ConfigError("receiver must be a user index in 1..n_users");
  }
  if (cfg.mode != "exhaustive" && cfg.mode != "sampled") throw ConfigError("mode must be exhaustive or sampled");
  if (cfg.trials == 0) throw ConfigError("trials must be positive");
  if (cfg.threads == 0) throw ConfigError("threads must be positive");

  if (!cfg.haar_secret) {
    const double n2 = cfg.alpha_re * cfg.alpha_re + cfg.alpha_im * cfg.alpha_im + cfg.beta_re * cfg.beta_re +
                      cfg.beta_im * cfg.beta_im;
    if (std::abs(n2 - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "secret violates |alpha|^2 + |beta|^2 = 1 (got " << n2 << ")";
      throw ConfigError(msg.str());
    }
    if (n2 != 1.0) {
      const double s = 1.0 / std::sqrt(n2);
      cfg.alpha_re *= s;
      cfg.alpha_im *= s;
      cfg.beta_re *= s;
      cfg.beta_im *= s;
      std::cerr << "warning: secret renormalized (|alpha|^2 + |beta|^2 was " << n2 << ")\n";
    }
  }

  const bool needs_seed = (subcommand == "run" && (cfg.mode == "sampled" || cfg.haar_secret)) ||
                          subcommand == "validate" || subcommand == "security";
  if (needs_seed && !cfg.seed) throw ConfigError("a seed is required (--seed or QSS_SEED)");
  return cfg;
}

// Provenance block embedded in every output. Output paths and the thread
// count are left out so they never change the bytes written.
Json provenance(const RunConfig& cfg) {
  Json c;
  c["subcommand"] = cfg.subcommand;
  c["n_users"] = cfg.n_users;
  if (cfg.subcommand == "run" || cfg.subcommand == "security") {
    if (cfg.haar_secret) {
      c["secret"] = "haar-random";
    } else {
      c["alpha_re"] = cfg.alpha_re;
      c["alpha_im"] = cfg.alpha_im;
      c["beta_re"] = cfg.beta_re;
      c["beta_im"] = cfg.beta_im;
    }
  }
  if (cfg.receiver) c["receiver"] = *cfg.receiver;
  if (cfg.subcommand == "run") {
    c["mode"] = cfg.mode;
    c["lambda_t"] = cfg.lambda_t;
    c["omega_t"] = cfg.omega_t;
    c["trials"] = cfg.trials;
  }
  if (cfg.subcommand == "validate") {
    c["ladder"] = cfg.ladder;
    if (cfg.delta_over_g) c["delta_over_g"] = *cfg.delta_over_g;
    if (cfg.omega_over_delta) c["omega_over_delta"] = *cfg.omega_over_delta;
    c["fock_cutoff"] = cfg.fock_cutoff;
    c["samples"] = cfg.samples;
    c["detuning_sign"] = cfg.detuning_sign;
  }
  if (cfg.subcommand == "security") {
    c["scenario"] = cfg.scenario;
    c["policy"] = cfg.policy;
    c["adversary"] = cfg.adversary;
    c["trials"] = cfg.trials;
  }
  if (cfg.seed) c["seed"] = *cfg.seed;
  return {{"version", kVersion}, {"config", c}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file " + path);
  return out;
}

void write_document(const std::string& path, Json doc, const RunConfig& cfg) {
  const Json prov = provenance(cfg);
  doc["version"] = prov["version"];
  doc["config"] = prov["config"];
  auto out = open_output(path);
  out << dump(doc);
}

protocol::SecretAmplitudes explicit_secret(const RunConfig& cfg) {
  return {Complex(cfg.alpha_re, cfg.alpha_im), Complex(cfg.beta_re, cfg.beta_im)};
}

// ---------------------------------------------------------------- commands

int cmd_run(const RunConfig& cfg) {
  const protocol::PartyLayout layout(cfg.n_users);
  const SiteLabel receiver = layout.user_atom(cfg.receiver.value_or(cfg.n_users));
  const cavity::InteractionSchedule schedule{0.0, cfg.lambda_t, cfg.omega_t};
  const protocol::CorrectionTable table = protocol::derive_correction_table(layout, receiver);
  const SplitRng root(cfg.seed.value_or(0));
  const std::string out_path = cfg.out.empty() ? "transcript.jsonl" : cfg.out;

  std::vector<protocol::ProtocolTranscript> transcripts;
  if (cfg.mode == "exhaustive") {
    SplitRng secret_stream = root.split("secret");
    const auto secret = cfg.haar_secret ? protocol::SecretAmplitudes::haar(secret_stream) : explicit_secret(cfg);
    transcripts.push_back(protocol::run_exhaustive(secret, layout, receiver, table, schedule));
  } else {
    transcripts.resize(cfg.trials);
    detail::parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
      SplitRng secret_stream = root.split("secret", i);
      const auto secret = cfg.haar_secret ? protocol::SecretAmplitudes::haar(secret_stream) : explicit_secret(cfg);
      transcripts[i] = protocol::run_full_trial(secret, layout, receiver, root.split("trial", i).key(), table, schedule);
    });
  }

  double min_fidelity = 1.0;
  double fidelity_sum = 0.0;
  std::size_t branches = 0;
  std::map<std::string, double> histogram;
  for (const auto& t : transcripts) {
    for (const auto& b : t.branches) {
      min_fidelity = std::min(min_fidelity, b.fidelity);
      ++branches;
      if (cfg.mode == "exhaustive") {
        fidelity_sum += b.fidelity * b.probability;
        histogram[b.alice_outcome] += b.probability;
      } else {
        fidelity_sum += b.fidelity;
        histogram[b.alice_outcome] += 1.0;
      }
    }
  }
  const double mean_fidelity = cfg.mode == "exhaustive" ? fidelity_sum : fidelity_sum / static_cast<double>(branches);

  {
    auto out = open_output(out_path);
    Json header = {{"trial", -1}, {"event", "header"}};
    const Json prov = provenance(cfg);
    header["version"] = prov["version"];
    header["config"] = prov["config"];
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < transcripts.size(); ++i) write_jsonl(out, transcripts[i], i);
  }
  if (!cfg.csv.empty()) {
    auto out = open_output(cfg.csv);
    out << "# qss " << kVersion << " config=" << provenance(cfg)["config"].dump() << '\n';
    write_csv_header(out);
    for (std::size_t i = 0; i < transcripts.size(); ++i) write_csv_rows(out, transcripts[i], i);
  }

  Json summary = {{"mode", cfg.mode},
                  {"trials", transcripts.size()},
                  {"branches", branches},
                  {"min_fidelity", min_fidelity},
                  {"mean_fidelity", mean_fidelity},
                  {"outcome_histogram", histogram}};
  std::cout << summary.dump() << '\n';

  if (min_fidelity < 1.0 - tol::kRecovery) {
    std::cerr << "assertion failed: min fidelity " << min_fidelity << " below 1 - 1e-9\n";
    return kAssertionFailure;
  }
  return kSuccess;
}

int cmd_table(const RunConfig& cfg) {
  const protocol::PartyLayout layout(cfg.n_users);
  const SiteLabel receiver = layout.user_atom(cfg.receiver.value_or(cfg.n_users));
  const protocol::CorrectionTable table = protocol::derive_correction_table(layout, receiver);
  write_document(cfg.out.empty() ? "correction_table.json" : cfg.out, to_json(table), cfg);

  const protocol::BranchKey spot{std::string(layout.measured().size(), 'e'),
                                 std::string(layout.users() - 1, '+')};
  std::cout << table.size() << " entries; spot check alice=" << spot.alice << " x=" << spot.x << " -> "
            << to_string(table.lookup(spot)) << '\n';
  return kSuccess;
}

std::vector<cavity::LadderPoint> parse_ladder(const RunConfig& cfg) {
  if (!cfg.ladder.empty()) {
    std::vector<cavity::LadderPoint> ladder;
    std::stringstream ss(cfg.ladder);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("ladder entries must look like delta_over_g:omega_over_delta");
      try {
        ladder.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
      } catch (const std::exception&) {
        throw ConfigError("ladder entry '" + item + "' is not numeric");
      }
    }
    if (ladder.empty()) throw ConfigError("ladder is empty");
    return ladder;
  }
  if (cfg.delta_over_g || cfg.omega_over_delta) {
    return {{cfg.delta_over_g.value_or(20.0), cfg.omega_over_delta.value_or(20.0)}};
  }
  return cavity::default_ladder();
}

int cmd_validate(const RunConfig& cfg) {
  const auto ladder = parse_ladder(cfg);
  for (const auto& p : ladder) {
    if (!(p.delta_over_g > 0.0) || !(p.omega_over_delta > 0.0)) throw ConfigError("ladder ratios must be positive");
  }
  if (cfg.fock_cutoff < 2) throw ConfigError("fock_cutoff must be at least 2");
  if (cfg.samples < 10) throw ConfigError("samples must be at least 10");
  if (cfg.detuning_sign != 1 && cfg.detuning_sign != -1) throw ConfigError("detuning_sign must be 1 or -1");

  const auto seed = *cfg.seed;
  const auto report = cavity::validate_effective(ladder, cfg.fock_cutoff, cfg.samples, seed, cfg.threads, cfg.detuning_sign);
  const auto finer =
      cavity::validate_effective(ladder, cfg.fock_cutoff + 2, cfg.samples, seed, cfg.threads, cfg.detuning_sign);

  double max_change = 0.0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    max_change = std::max(max_change, std::abs(report.ladder[i].deviation - finer.ladder[i].deviation));
  }
  const bool converged = max_change < 1e-3;

  Json doc = to_json(report);
  Json trend;
  bool trend_ok = true;
  if (ladder.size() < 2) {
    trend["checked"] = false;
    trend["notice"] = "single-point ladder: trend check skipped";
    std::cout << "notice: single-point ladder, trend check skipped\n";
  } else {
    trend_ok = report.ladder.back().deviation < report.ladder.front().deviation;
    trend["checked"] = true;
    trend["passed"] = trend_ok;
  }
  doc["trend"] = trend;
  doc["fock_convergence"] = {{"fock_cutoff", cfg.fock_cutoff + 2}, {"max_change", max_change}, {"passed", converged}};

  Json warnings = Json::array();
  for (const auto& p : report.ladder) {
    if (p.leak > cavity::kLeakThreshold) {
      std::ostringstream w;
      w << "truncation leak " << p.leak << " at delta_over_g=" << p.delta_over_g
        << " omega_over_delta=" << p.omega_over_delta << " exceeds 1e-6; raise fock_cutoff";
      warnings.push_back(w.str());
      std::cerr << "warning: " << w.str() << '\n';
    }
  }
  doc["warnings"] = warnings;
  write_document(cfg.out.empty() ? "validation_report.json" : cfg.out, doc, cfg);

  for (const auto& p : report.ladder) {
    std::cout << "delta/g=" << p.delta_over_g << " omega/delta=" << p.omega_over_delta << " F=" << p.fock_cutoff
              << " deviation=" << p.deviation << " leak=" << p.leak << '\n';
  }
  if (!trend_ok || !converged) {
    std::cerr << "assertion failed:" << (trend_ok ? "" : " deviation does not decrease along the ladder")
              << (converged ? "" : " Fock truncation not converged") << '\n';
    return kAssertionFailure;
  }
  return kSuccess;
}

int cmd_security(const RunConfig& cfg) {
  const auto kind = security::parse_scenario(cfg.scenario);
  if (!kind) throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  const auto policy = security::parse_policy(cfg.policy);
  if (!policy) throw ConfigError("unknown substitute policy '" + cfg.policy + "'");

  security::SecurityScenario scenario;
  scenario.kind = *kind;
  scenario.users = cfg.n_users;
  scenario.adversary = cfg.adversary;
  scenario.receiver = cfg.receiver;
  scenario.substitute = *policy;
  try {
    scenario.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  const auto sampler = cfg.haar_secret ? security::haar_sampler() : security::fixed_sampler(explicit_secret(cfg));
  const auto report = security::simulate_scenario(scenario, sampler, cfg.trials, *cfg.seed, cfg.threads);

  Json doc = to_json(report);
  Json warnings = Json::array();
  bool ok = true;
  std::string assertion = "report-only";
  if (*kind == security::ScenarioKind::AssignedWithCooperation) {
    assertion = "success_rate == 1";
    ok = report.success_rate == 1.0;
  } else if (*kind == security::ScenarioKind::AssignedWithoutCooperation) {
    assertion = "0.5 inside the 95% Wilson interval";
    ok = report.success_ci.low <= 0.5 && 0.5 <= report.success_ci.high;
    const double half_width = (report.success_ci.high - report.success_ci.low) / 2.0;
    if (half_width > 0.015) {
      std::ostringstream w;
      w << "confidence half-width " << half_width << " exceeds 0.015; use more trials";
      warnings.push_back(w.str());
      std::cerr << "warning: " << w.str() << '\n';
    }
  }
  doc["assertion"] = {{"check", assertion}, {"passed", ok}};
  doc["warnings"] = warnings;
  write_document(cfg.out.empty() ? "security_report.json" : cfg.out, doc, cfg);

  std::cout << security::to_string(*kind) << ": success_rate=" << report.success_rate << " ci=[" << report.success_ci.low
            << ", " << report.success_ci.high << "] mean_fidelity=" << report.mean_fidelity
            << " detection_rate=" << report.detection_rate << '\n';
  if (!ok) {
    std::cerr << "assertion failed: " << assertion << '\n';
    return kAssertionFailure;
  }
  return kSuccess;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file with flat keys mirroring the flags");
  sub->add_option("--n-users", f.n_users, "number of users receiving atoms (2 = Bob and Charlie)");
  sub->add_option("--receiver", f.receiver, "user index that recovers the secret (default: last user)");
  sub->add_option("--seed", f.seed, "root seed (falls back to QSS_SEED)");
  sub->add_option("--out", f.out, "output path");
  sub->add_option("--threads", f.threads, "worker threads (never changes output bytes)");
}

void add_secret(CLI::App* sub, Flags& f) {
  sub->add_option("--secret", f.secret, "'haar-random' or omit and give the amplitudes");
  sub->add_option("--alpha-re", f.alpha_re);
  sub->add_option("--alpha-im", f.alpha_im);
  sub->add_option("--beta-re", f.beta_re);
  sub->add_option("--beta-im", f.beta_im);
}

}  // namespace

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Cavity-QED quantum secret sharing simulator", "qss"};
  app.require_subcommand(1);
  Flags f;

  auto* run_cmd = app.add_subcommand("run", "run the protocol and write a JSON-lines transcript");
  add_common(run_cmd, f);
  add_secret(run_cmd, f);
  run_cmd->add_option("--mode", f.mode, "exhaustive | sampled");
  run_cmd->add_option("--trials", f.trials, "trials in sampled mode");
  run_cmd->add_option("--lambda-t", f.lambda_t, "override lambda*t (canonical pi/4)");
  run_cmd->add_option("--omega-t", f.omega_t, "override Omega*t (canonical pi)");
  run_cmd->add_option("--csv", f.csv, "optional CSV summary path");

  auto* table_cmd = app.add_subcommand("table", "derive and export the correction table");
  add_common(table_cmd, f);

  auto* validate_cmd = app.add_subcommand("validate", "compare the effective model against the full cavity model");
  add_common(validate_cmd, f);
  validate_cmd->add_option("--ladder", f.ladder, "comma list of delta_over_g:omega_over_delta");
  validate_cmd->add_option("--delta-over-g", f.delta_over_g);
  validate_cmd->add_option("--omega-over-delta", f.omega_over_delta);
  validate_cmd->add_option("--fock-cutoff", f.fock_cutoff);
  validate_cmd->add_option("--samples", f.samples);
  validate_cmd->add_option("--detuning-sign", f.detuning_sign, "+1 (default) or -1");

  auto* security_cmd = app.add_subcommand("security", "simulate an adversary scenario");
  add_common(security_cmd, f);
  add_secret(security_cmd, f);
  security_cmd->add_option("--scenario", f.scenario,
                           "a | b | lie_about_x | intercept_resend | honest (long names accepted)");
  security_cmd->add_option("--trials", f.trials);
  security_cmd->add_option("--policy", f.policy, "intercept substitute: ground | mixed | random-pure");
  security_cmd->add_option("--adversary", f.adversary, "adversary user index (default 1)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = resolve(name, f);
    if (name == "security" && cfg.scenario.empty()) throw ConfigError("--scenario is required");
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (name == "run") return cmd_run(cfg);
    if (name == "table") return cmd_table(cfg);
    if (name == "validate") return cmd_validate(cfg);
    return cmd_security(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAssertionFailure;
  }
}

}  // namespace qss::cli
