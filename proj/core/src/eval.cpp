#include "fgs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/distributions/students_t.hpp>

#include "fgs/error.hpp"

namespace fgs {

namespace {

double safe_ratio(long num, long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool has_element(const Tag& tag, Element element) {
  return !tag.is_outside() && tag.element == element;
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

int class_index(Polarity p) {
  switch (p) {
    case Polarity::Positive: return 0;
    case Polarity::Neutral: return 1;
    case Polarity::Negative: return 2;
    case Polarity::Conflict: return -1;
  }
  return -1;
}

}  // namespace

double PrfCounts::precision() const {
  return safe_ratio(true_positives, true_positives + false_positives);
}

double PrfCounts::recall() const {
  return safe_ratio(true_positives, true_positives + false_negatives);
}

double PrfCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

PrfCounts& PrfCounts::operator+=(const PrfCounts& other) {
  true_positives += other.true_positives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  return *this;
}

PrfCounts token_f1(const TagSequence& gold, const TagSequence& pred, Element element) {
  check_lengths(gold.size(), pred.size(), "token_f1");
  PrfCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = has_element(gold[i], element);
    const bool p = has_element(pred[i], element);
    if (g && p) {
      ++counts.true_positives;
    } else if (p) {
      ++counts.false_positives;
    } else if (g) {
      ++counts.false_negatives;
    }
  }
  return counts;
}

PrfCounts token_f1(std::span<const TagSequence> gold, std::span<const TagSequence> pred,
                   Element element) {
  check_lengths(gold.size(), pred.size(), "token_f1 (sentences)");
  PrfCounts total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += token_f1(gold[i], pred[i], element);
  return total;
}

const PrfCounts& TokenF1Report::at(Element element) const {
  for (const auto& [e, counts] : elements) {
    if (e == element) return counts;
  }
  throw ValidationError("element " + std::string(to_string(element)) + " not in report");
}

TokenF1Report token_f1_report(std::span<const TagSequence> gold,
                              std::span<const TagSequence> pred,
                              std::span<const Element> elements) {
  TokenF1Report report;
  for (const Element e : elements) report.elements.emplace_back(e, token_f1(gold, pred, e));
  return report;
}

MacroF1Report macro_f1(std::span<const Polarity> gold, std::span<const Polarity> pred,
                       bool discard_conflict) {
  check_lengths(gold.size(), pred.size(), "macro_f1");
  MacroF1Report report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = class_index(gold[i]);
    if (g < 0) {
      if (!discard_conflict) {
        throw ValidationError("macro_f1: gold item " + std::to_string(i) + " is conflict");
      }
      ++report.discarded;
      continue;
    }
    ++report.scored;
    const int p = class_index(pred[i]);
    if (g == p) {
      ++report.classes[g].true_positives;
      continue;
    }
    ++report.classes[g].false_negatives;
    if (p >= 0) ++report.classes[p].false_positives;
  }
  double sum = 0.0;
  for (const PrfCounts& c : report.classes) sum += c.f1();
  report.macro_f1 = sum / 3.0;
  return report;
}

RunAggregate aggregate_runs(std::span<const double> values) {
  if (values.empty()) throw ValidationError("aggregate_runs: no runs");
  RunAggregate agg;
  agg.runs = values.size();
  double sum = 0.0;
  for (const double v : values) sum += v;
  agg.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - agg.mean) * (v - agg.mean);
    agg.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return agg;
}

Correlation pearson(std::span<const double> xs, std::span<const double> ys) {
  check_lengths(xs.size(), ys.size(), "pearson");
  const std::size_t n = xs.size();
  if (n < 3) throw ValidationError("pearson: need at least 3 points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson: zero variance");
  Correlation c;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  if (std::abs(c.r) == 1.0) {
    c.p = 0.0;
  } else {
    const double t = c.r * std::sqrt(df / (1.0 - c.r * c.r));
    const boost::math::students_t dist(df);
    c.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return c;
}

SwapCheck significance_swap(std::span<const TagSequence> gold,
                            std::span<const TagSequence> pred, Element element) {
  return {token_f1(gold, pred, element), token_f1(pred, gold, element)};
}

Json to_json(const PrfCounts& c) {
  return {{"tp", c.true_positives}, {"fp", c.false_positives}, {"fn", c.false_negatives},
          {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}};
}

Json to_json(const TokenF1Report& report) {
  Json out = Json::object();
  for (const auto& [e, counts] : report.elements) {
    out[std::string(to_string(e))] = to_json(counts);
  }
  return out;
}

Json to_json(const MacroF1Report& report) {
  Json classes = Json::object();
  for (std::size_t i = 0; i < kPolarityClasses.size(); ++i) {
    classes[std::string(to_string(kPolarityClasses[i]))] = to_json(report.classes[i]);
  }
  return {{"note", kMacroF1Note},
          {"macro_f1", report.macro_f1},
          {"scored", report.scored},
          {"discarded_conflict", report.discarded},
          {"classes", classes}};
}

Json to_json(const RunAggregate& a) {
  return {{"mean", a.mean}, {"std", a.std}, {"runs", a.runs}};
}

std::string format_mean_std(const RunAggregate& a) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.1f (%.1f)", 100.0 * a.mean, 100.0 * a.std);
  return buffer;
}

}  // namespace fgs
