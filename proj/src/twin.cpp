#include "dprh/twin.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dprh/numerics.hpp"

namespace dprh {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

bool parse_int(const std::string& text, int& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

TwinLoadResult load_twin_csv(const std::string& path,
                             std::optional<int> category) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_twin_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_twin_csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv_line(line) !=
      std::vector<std::string>{"pair_id", "zygosity", "sex", "age1", "status1",
                               "age2", "status2"})
    throw std::runtime_error(
        "load_twin_csv: expected header "
        "pair_id,zygosity,sex,age1,status1,age2,status2 in " + path);

  TwinLoadResult result;
  std::vector<std::string> row_errors;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++result.total_rows;
    const auto fields = split_csv_line(line);
    TwinRecord rec;
    bool ok = fields.size() == 7;
    if (ok) {
      ok = parse_int(fields[0], rec.pair_id) && parse_int(fields[1], rec.zygosity) &&
           parse_double(fields[3], rec.t1) && parse_int(fields[4], rec.c1) &&
           parse_double(fields[5], rec.t2) && parse_int(fields[6], rec.c2);
      rec.sex = fields.size() > 2 ? fields[2] : "";
    }
    if (ok)
      ok = rec.t1 > 0.0 && rec.t2 > 0.0 && (rec.c1 == 0 || rec.c1 == 1) &&
           (rec.c2 == 0 || rec.c2 == 1);
    if (!ok) {
      row_errors.push_back("line " + std::to_string(line_number) + ": " + line);
      continue;
    }
    if (category && rec.zygosity != *category) {
      ++result.filtered_out;
      continue;
    }
    if (rec.t1 == rec.t2) {
      ++result.excluded_simultaneous;
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  if (!row_errors.empty()) {
    std::string message = "load_twin_csv: " + std::to_string(row_errors.size()) +
                          " malformed row(s) in " + path + ":";
    for (const auto& err : row_errors) message += "\n  " + err;
    throw std::runtime_error(message);
  }
  if (result.records.empty())
    throw std::runtime_error("load_twin_csv: no usable records in " + path);
  return result;
}

std::vector<CensoredPair> to_censored_pairs(std::span<const TwinRecord> records,
                                            double b) {
  std::vector<CensoredPair> pairs;
  pairs.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.t1 >= b || rec.t2 >= b)
      throw std::invalid_argument(
          "to_censored_pairs: age at or above the horizon b = " +
          std::to_string(b) + " for pair " + std::to_string(rec.pair_id));
    pairs.push_back({b - rec.t1, rec.c1 == 1, b - rec.t2, rec.c2 == 1});
  }
  return pairs;
}

std::vector<double> default_twin_init(std::span<const TwinRecord> records,
                                      BaselineFamily family, double b) {
  std::vector<double> ys;
  for (const auto& rec : records) {
    ys.push_back(b - rec.t1);
    ys.push_back(b - rec.t2);
  }
  const double mean = sample_mean(ys);
  std::vector<double> init{1.0, 1.0};  // theta, theta_prime
  switch (family) {
    case BaselineFamily::kExponentiatedGumbel:
    case BaselineFamily::kGeneralizedExponential:
      init.push_back(1.0 / mean);
      break;
    case BaselineFamily::kGeneralizedInverseRayleigh:
      init.push_back(1.0);
      init.push_back(mean * mean / 2.0);
      init.push_back(0.0);
      break;
    case BaselineFamily::kGeneralizedRayleigh:
      init.push_back(1.0);
      init.push_back(1.0 / mean);
      break;
    case BaselineFamily::kInverseExponential:
      init.push_back(mean * std::log(2.0));
      break;
    case BaselineFamily::kBurrIII:
    case BaselineFamily::kInverseWeibull:
      init.push_back(1.0);
      break;
  }
  return init;
}

FitResult analyze(std::span<const TwinRecord> records, BaselineFamily family,
                  const TwinOptions& opts) {
  if (records.size() < 10)
    throw std::invalid_argument("analyze: need at least 10 records");
  const std::vector<CensoredPair> pairs = to_censored_pairs(records, opts.b);
  const std::vector<double> init =
      opts.init ? *opts.init : default_twin_init(records, family, opts.b);
  TieSpec spec;
  spec.tie_theta = true;
  spec.tie_theta_prime = true;
  const std::size_t theta_count = 2;
  std::vector<double> eta_init(init.begin() + theta_count, init.end());
  const ParamLayout layout(family, eta_init, spec);
  if (static_cast<int>(init.size()) != layout.size())
    throw std::invalid_argument("analyze: init must hold (theta, theta_prime, eta...)");
  return fit_mle(pairs, layout, init, opts.fit);
}

PairProbability potential_appendectomy_prob(const DprhParams& fitted,
                                            const TwinRecord& record, double b) {
  if (record.t1 == record.t2)
    throw std::domain_error(
        "potential_appendectomy_prob: simultaneous pair (discard before "
        "analysis)");
  PairProbability out;
  out.record = record;
  // Condition on the earlier onset age (the larger risk-free time).
  const bool condition_on_second = record.t2 < record.t1;
  out.predicted_twin = condition_on_second ? 1 : 2;
  out.y_pred = b - (condition_on_second ? record.t1 : record.t2);
  out.y_cond = b - (condition_on_second ? record.t2 : record.t1);
  out.ambiguous_conditioning =
      (condition_on_second ? record.c2 : record.c1) == 0;
  out.probability =
      conditional_cdf(fitted, out.predicted_twin, out.y_pred, out.y_cond);
  return out;
}

std::vector<PairProbability> pair_probabilities(
    const DprhParams& fitted, std::span<const TwinRecord> records, double b) {
  std::vector<PairProbability> out;
  out.reserve(records.size());
  for (const auto& rec : records)
    out.push_back(potential_appendectomy_prob(fitted, rec, b));
  return out;
}

ValidationSummary summarize_validation(std::span<const PairProbability> probs,
                                       double threshold) {
  ValidationSummary summary;
  summary.threshold = threshold;
  for (const auto& pp : probs) {
    ++summary.pairs;
    if (pp.ambiguous_conditioning) ++summary.ambiguous;
    const int pred_status =
        pp.predicted_twin == 1 ? pp.record.c1 : pp.record.c2;
    const bool consistent = pred_status == 0 ? pp.probability >= threshold
                                             : pp.probability < threshold;
    if (consistent) ++summary.consistent;
  }
  summary.fraction =
      summary.pairs > 0
          ? static_cast<double>(summary.consistent) / summary.pairs
          : 0.0;
  return summary;
}

ValidationSummary validation_report(const DprhParams& fitted,
                                    std::span<const TwinRecord> records,
                                    double b, double threshold) {
  const std::vector<PairProbability> probs =
      pair_probabilities(fitted, records, b);
  return summarize_validation(probs, threshold);
}

}  // namespace dprh
