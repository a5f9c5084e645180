#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "divergelab/harness.hpp"

namespace divergelab::harness {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
  return h;
}

// JSON has no infinities; non-finite values are written as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

}  // namespace

void PropertyReport::record(TrialRecord trial) {
  if (trials == 0 || trial.margin < worst_margin) worst_margin = trial.margin;
  if (trial.margin < -tolerance) ++violations;
  ++trials;
  details.push_back(std::move(trial));
}

std::string PropertyReport::summary_line() const {
  return "suite=" + suite + " q=" + quantifier + " trials=" + std::to_string(trials) +
         " violations=" + std::to_string(violations) + " worst=" + format_double(worst_margin);
}

nlohmann::json to_json(const PropertyReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["quantifier"] = report.quantifier;
  j["trials"] = report.trials;
  j["violations"] = report.violations;
  j["worst_margin"] = number(report.worst_margin);
  j["seed"] = report.seed;
  j["tolerance"] = report.tolerance;
  j["expectation"] = report.expectation == Expectation::kMustHold ? "must_hold" : "may_violate";
  j["tolerance_ladder"] = {{"closed_form", kClosedFormTol}, {"dpi", kDpiTol}, {"optimizer", kOptimizerTol}};
  j["passed"] = report.passed();
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [key, value] : report.metrics) metrics[key] = number(value);
  j["metrics"] = std::move(metrics);
  nlohmann::json details = nlohmann::json::array();
  for (const auto& t : report.details) {
    details.push_back({{"index", t.index},
                       {"digest", t.digest},
                       {"before", number(t.before)},
                       {"after", number(t.after)},
                       {"margin", number(t.margin)}});
  }
  j["details"] = std::move(details);
  return j;
}

std::string csv_header() { return "suite,quantifier,trials,violations,worst_margin,seed"; }

std::string csv_row(const PropertyReport& report) {
  std::ostringstream out;
  out << report.suite << ',' << report.quantifier << ',' << report.trials << ',' << report.violations << ','
      << std::setprecision(17) << report.worst_margin << ',' << report.seed;
  return out.str();
}

std::string digest(std::initializer_list<const ComplexMatrix*> matrices) {
  std::uint64_t h = kFnvOffset;
  for (const ComplexMatrix* m : matrices) {
    const Eigen::Index shape[2] = {m->rows(), m->cols()};
    h = fnv1a_bytes(h, shape, sizeof(shape));
    h = fnv1a_bytes(h, m->data(), sizeof(Complex) * static_cast<std::size_t>(m->size()));
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) { return fnv1a_bytes(kFnvOffset, text.data(), text.size()); }

Expectation expectation_for(const std::string& suite, const qdiv::QuantifierId& q) {
  using Tag = qdiv::QuantifierId::Tag;
  const bool non_contractive = q.tag == Tag::kHsDist || q.tag == Tag::kDInf;
  // Contractive under CPTP maps: DPI, equal plateau and the Stinespring stage chain all hold.
  // D_HS and D_inf lose contractivity under the partial trace and need purity to reach the maximum.
  if (non_contractive && (suite == "dpi" || suite == "plateau" || suite == "stinespring")) {
    return Expectation::kMayViolate;
  }
  return Expectation::kMustHold;
}

bool InvarianceReport::passed() const {
  for (const auto* part : parts())
    if (!part->passed()) return false;
  return true;
}

std::vector<const PropertyReport*> InvarianceReport::parts() const {
  std::vector<const PropertyReport*> out{&unitary, &assignment};
  if (transpose) out.push_back(&*transpose);
  return out;
}

}  // namespace divergelab::harness
