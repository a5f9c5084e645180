#include "divergelab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "divergelab/error.hpp"
#include "divergelab/harness.hpp"

namespace divergelab::cli {
namespace {

using qdiv::QuantifierId;
using Tag = QuantifierId::Tag;

struct RunConfig {
  std::string suite;
  std::vector<std::string> quantifiers;
  std::string dims;
  int trials = 0;
  std::optional<std::uint64_t> seed;
  double mu = 0.3;
  std::string out_path;
  std::string format = "json";
  std::string log_base = "nat";
  std::string channels = "standard";
  int env = 2;
  int restarts = 12;
  int budget = 20000;
  std::string tau = "pure";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DIVERGELAB_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const std::uint64_t seed = std::stoull(env, &used);
      if (used == std::string(env).size()) return seed;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("DIVERGELAB_SEED is not an unsigned integer: ") + env);
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::pair<int, int> parse_dims(const std::string& text, int lo, int hi) {
  if (text.empty()) return {lo, hi};
  try {
    const auto dash = text.find('-');
    if (dash == std::string::npos) {
      const int d = std::stoi(text);
      return {d, d};
    }
    return {std::stoi(text.substr(0, dash)), std::stoi(text.substr(dash + 1))};
  } catch (const std::exception&) {
    throw UsageError("--dim expects N or LO-HI, got '" + text + "'");
  }
}

DensityMatrix load_state(const std::string& source) {
  if (std::filesystem::is_regular_file(source)) {
    std::ifstream in(source);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, source + ": " + e.what());
    }
    return state_from_json(j);
  }
  return state_from_spec(source);
}

std::vector<QuantifierId> quantifiers_or(const RunConfig& c, std::vector<QuantifierId> fallback) {
  if (c.quantifiers.empty()) return fallback;
  std::vector<QuantifierId> out;
  for (const auto& text : c.quantifiers) out.push_back(QuantifierId::parse(text, c.mu));
  return out;
}

void to_bits(harness::PropertyReport& r) {
  const double k = 1.0 / std::log(2.0);
  r.worst_margin *= k;
  for (auto& t : r.details) {
    t.before *= k;
    t.after *= k;
    t.margin *= k;
  }
}

harness::PropertyReport optimal_pair_report(const QuantifierId& q, int dim, const RunConfig& c,
                                            std::uint64_t seed) {
  harness::OptimizerOptions options;
  options.restarts = c.restarts;
  options.budget = c.budget;
  const harness::OptimizationResult r = harness::optimal_pair_search(q, dim, options, seed);
  harness::PropertyReport report;
  report.suite = "optimal-pair";
  report.quantifier = q.name();
  report.seed = seed;
  report.tolerance = harness::kOptimizerTol;
  report.expectation = harness::expectation_for("optimal-pair", q);
  const double plateau = q.orthogonal_plateau();
  double margin = std::min(r.value - plateau, -r.orthogonality_overlap);
  // D_HS only reaches its maximum on orthogonal pure pairs.
  if (q.tag == Tag::kHsDist) margin = std::min({margin, r.purity_first - 1.0, r.purity_second - 1.0});
  report.record({0, harness::digest({&r.pair.first().matrix(), &r.pair.second().matrix()}), plateau, r.value,
                 margin});
  report.metrics = {{"dim", dim},
                    {"value", r.value},
                    {"orthogonality_overlap", r.orthogonality_overlap},
                    {"purity_first", r.purity_first},
                    {"purity_second", r.purity_second},
                    {"restarts_used", r.restarts_used},
                    {"evaluations", static_cast<double>(r.evaluations)},
                    {"converged", r.converged ? 1.0 : 0.0}};
  return report;
}

std::vector<harness::PropertyReport> run_suite(const RunConfig& c, std::uint64_t seed) {
  std::vector<harness::PropertyReport> reports;
  const auto per_q = [&](const std::vector<QuantifierId>& fallback, auto&& fn) {
    for (const auto& q : quantifiers_or(c, fallback)) fn(q);
  };
  auto trials_or = [&](int fallback) {
    if (c.trials < 0) throw UsageError("--trials must be nonnegative");
    return c.trials > 0 ? c.trials : fallback;
  };

  if (c.suite == "dpi") {
    harness::DpiOptions o;
    o.trials = trials_or(500);
    std::tie(o.dim_lo, o.dim_hi) = parse_dims(c.dims, 2, 6);
    if (c.channels == "partial-trace") {
      o.mix = harness::ChannelMix::kPartialTrace;
      o.partial_trace_env = c.env;
    } else if (c.channels != "standard") {
      throw UsageError("--channels must be standard or partial-trace");
    }
    per_q(qdiv::all_quantifiers(c.mu), [&](const QuantifierId& q) { reports.push_back(harness::dpi_suite(q, o, seed)); });
  } else if (c.suite == "invariance") {
    per_q(qdiv::all_quantifiers(c.mu), [&](const QuantifierId& q) {
      const auto inv = harness::invariance_suite(q, trials_or(100), seed);
      for (const auto* part : inv.parts()) reports.push_back(*part);
    });
  } else if (c.suite == "optimal-pair") {
    const auto [lo, hi] = parse_dims(c.dims, 3, 3);
    per_q({QuantifierId::trace_dist(), QuantifierId::holevo_skew(c.mu)}, [&](const QuantifierId& q) {
      for (int d = lo; d <= hi; ++d) reports.push_back(optimal_pair_report(q, d, c, seed));
    });
  } else if (c.suite == "plateau") {
    const auto [lo, hi] = parse_dims(c.dims, 2, 6);
    std::vector<QuantifierId> fallback;
    for (const auto& q : qdiv::all_quantifiers(c.mu))
      if (q.bounded()) fallback.push_back(q);
    per_q(fallback, [&](const QuantifierId& q) {
      reports.push_back(harness::orthogonal_plateau_check(q, trials_or(100), lo, hi, seed));
    });
  } else if (c.suite == "joint-convexity") {
    per_q({QuantifierId::rel_entropy(), QuantifierId::hs_dist(), QuantifierId::d_inf(), QuantifierId::qsd(c.mu),
           QuantifierId::holevo_skew(c.mu), QuantifierId::qjs()},
          [&](const QuantifierId& q) { reports.push_back(harness::joint_convexity_suite(q, trials_or(300), seed)); });
  } else if (c.suite == "kadison") {
    reports.push_back(harness::kadison_bound_check(trials_or(300), seed));
  } else if (c.suite == "purity-bound") {
    reports.push_back(harness::purity_bound_check(trials_or(300), seed));
  } else if (c.suite == "stinespring") {
    if (c.tau != "pure" && c.tau != "mixed") throw UsageError("--tau must be pure or mixed");
    const auto tau = c.tau == "pure" ? harness::TauKind::kPure : harness::TauKind::kMixed;
    per_q(qdiv::all_quantifiers(c.mu), [&](const QuantifierId& q) {
      reports.push_back(harness::stinespring_dpi_equivalence(q, trials_or(50), seed, tau));
    });
  } else {
    throw UsageError("unknown suite '" + c.suite +
                     "' (expected dpi, invariance, optimal-pair, plateau, joint-convexity, kadison, "
                     "purity-bound or stinespring)");
  }

  if (c.log_base == "bits") {
    for (auto& r : reports) {
      const bool entropic = r.quantifier == "rel_entropy" || r.quantifier == "qjs";
      if (entropic) to_bits(r);
    }
  }
  return reports;
}

void emit(const RunConfig& c, std::uint64_t seed, const std::vector<harness::PropertyReport>& reports,
          std::ostream& out) {
  for (const auto& r : reports) out << r.summary_line() << '\n';
  if (c.out_path.empty()) return;

  std::ofstream file(c.out_path);
  if (!file) throw UsageError("cannot open --out path '" + c.out_path + "'");
  if (c.format == "csv") {
    file << harness::csv_header() << '\n';
    for (const auto& r : reports) file << harness::csv_row(r) << '\n';
    return;
  }
  nlohmann::json j;
  j["command"] = "suite";
  j["suite"] = c.suite;
  j["seed"] = seed;
  j["log_base"] = c.log_base;
  j["timestamp"] = utc_timestamp();
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(harness::to_json(r));
  file << j.dump(2) << '\n';
}

}  // namespace

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  std::string text = s.str();
  if (text.find_first_of(".en") == std::string::npos) text += ".0";
  return text;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for quantum distinguishability quantifiers", "divergelab"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mu", c.mu, "Skew parameter for qsd and holevo_skew")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--log-base", c.log_base, "Units for entropic values")->check(CLI::IsMember({"nat", "bits"}));
  };

  std::string q_eval;
  std::string source_a;
  std::string source_b;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a quantifier on two states (files or generator specs)");
  eval->add_option("--q", q_eval, "Quantifier, e.g. trace_dist or qsd:mu=0.3")->required();
  eval->add_option("a", source_a, "First state")->required();
  eval->add_option("b", source_b, "Second state")->required();
  add_common(eval);

  std::uint64_t seed_flag = 0;
  CLI::App* suite = app.add_subcommand("suite", "Run a property suite and write a report");
  suite->add_option("name", c.suite, "Suite name")->required();
  suite->add_option("--q", c.quantifiers, "Quantifier (repeatable); defaults depend on the suite");
  suite->add_option("--dim", c.dims, "Dimension N or range LO-HI");
  suite->add_option("--trials", c.trials, "Trial count");
  auto* seed_opt = suite->add_option("--seed", seed_flag, "Seed (falls back to DIVERGELAB_SEED)");
  suite->add_option("--out", c.out_path, "Report path");
  suite->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  suite->add_option("--channels", c.channels, "dpi channel mix: standard or partial-trace");
  suite->add_option("--env", c.env, "Environment dimension for --channels partial-trace")->check(CLI::Range(2, 16));
  suite->add_option("--restarts", c.restarts, "optimal-pair restarts")->check(CLI::PositiveNumber);
  suite->add_option("--budget", c.budget, "optimal-pair evaluations per restart")->check(CLI::PositiveNumber);
  suite->add_option("--tau", c.tau, "stinespring environment state: pure or mixed");
  add_common(suite);

  std::string cex_name;
  int cex_n = 0;
  CLI::App* cex = app.add_subcommand("counterexample", "Reproduce the partial-trace counterexamples");
  cex->add_option("name", cex_name, "hs or dinf")->required()->check(CLI::IsMember({"hs", "dinf"}));
  cex->add_option("n", cex_n, "Environment dimension (n >= 2)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (eval->parsed()) {
      const QuantifierId q = QuantifierId::parse(q_eval, c.mu);
      const DensityMatrix a = load_state(source_a);
      const DensityMatrix b = load_state(source_b);
      double v = qdiv::evaluate(q, a, b).value;
      if (c.log_base == "bits" && q.entropic()) v /= std::log(2.0);
      out << format_value(v) << '\n';
      return kExitOk;
    }
    if (suite->parsed()) {
      if (seed_opt->count() > 0) c.seed = seed_flag;
      const std::uint64_t seed = resolve_seed(c.seed);
      const auto reports = run_suite(c, seed);
      emit(c, seed, reports, out);
      for (const auto& r : reports)
        if (!r.passed()) return kExitViolation;
      return kExitOk;
    }
    if (cex_n < 2) throw UsageError("counterexample needs n >= 2");
    const harness::CounterexampleRecord r =
        cex_name == "hs" ? harness::hs_counterexample(cex_n) : harness::dinf_counterexample(cex_n);
    out << format_value(r.before) << ' ' << format_value(r.after) << ' ' << format_value(r.ratio) << '\n';
    if (!r.matches(harness::kClosedFormTol)) {
      err << "counterexample deviates from the closed form by " << r.max_error() << '\n';
      return kExitViolation;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace divergelab::cli
