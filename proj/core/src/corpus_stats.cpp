#include "fgs/corpus_stats.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace fgs {

namespace {

void add_element(ElementStats& stats, const std::vector<Span>& spans) {
  if (spans.empty()) return;
  const long length = span_length(spans);
  ++stats.count;
  stats.total_length += length;
  stats.max_length = std::max(stats.max_length, length);
}

void finish(ElementStats& stats) {
  stats.average_length = ratio_one_decimal(stats.total_length, stats.count);
}

std::set<std::string> target_forms(const Corpus& corpus) {
  std::set<std::string> forms;
  for (const Sentence& s : corpus.sentences) {
    for (const Opinion& o : s.opinions) forms.insert(surface_form(s, o.target));
  }
  return forms;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) /
                                static_cast<double>(whole);
}

double unique_percent(const std::set<std::string>& split,
                      const std::set<std::string>& other_a,
                      const std::set<std::string>& other_b) {
  const auto unique = std::count_if(split.begin(), split.end(), [&](const auto& f) {
    return !other_a.contains(f) && !other_b.contains(f);
  });
  return percent(static_cast<std::size_t>(unique), split.size());
}

double overlap_percent(const std::set<std::string>& split,
                       const std::set<std::string>& train) {
  const auto shared = std::count_if(split.begin(), split.end(),
                                    [&](const auto& f) { return train.contains(f); });
  return percent(static_cast<std::size_t>(shared), split.size());
}

Json element_json(const ElementStats& e) {
  return {{"count", e.count},
          {"total_length", e.total_length},
          {"average_length", e.average_length},
          {"max_length", e.max_length}};
}

std::string fixed1(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.1f", value);
  return buffer;
}

}  // namespace

double ratio_one_decimal(long numerator, long denominator) {
  if (denominator <= 0) return 0.0;
  // tenths = floor(10 * num / den + 1/2), exact in integers.
  const long tenths = (20 * numerator + denominator) / (2 * denominator);
  return static_cast<double>(tenths) / 10.0;
}

StatsReport compute_stats(const Corpus& corpus) {
  StatsReport report;
  for (const Sentence& s : corpus.sentences) {
    ++report.sentences;
    report.tokens += s.size();
    for (const Opinion& o : s.opinions) {
      add_element(report.holders, o.holder);
      add_element(report.targets, o.target);
      add_element(report.expressions, o.expression);
      switch (o.polarity) {
        case Polarity::Positive: ++report.positive; break;
        case Polarity::Neutral: ++report.neutral; break;
        case Polarity::Negative: ++report.negative; break;
        case Polarity::Conflict: break;
      }
    }
  }
  report.average_sentence_length = ratio_one_decimal(report.tokens, report.sentences);
  finish(report.holders);
  finish(report.targets);
  finish(report.expressions);
  return report;
}

OverlapReport compute_overlap(const Corpus& train, const Corpus& dev,
                              const Corpus& test) {
  const auto train_forms = target_forms(train);
  const auto dev_forms = target_forms(dev);
  const auto test_forms = target_forms(test);
  OverlapReport report;
  report.unique_train = unique_percent(train_forms, dev_forms, test_forms);
  report.unique_dev = unique_percent(dev_forms, train_forms, test_forms);
  report.unique_test = unique_percent(test_forms, train_forms, dev_forms);
  report.overlap_dev = overlap_percent(dev_forms, train_forms);
  report.overlap_test = overlap_percent(test_forms, train_forms);
  return report;
}

Json to_json(const StatsReport& report) {
  return {{"sentences", report.sentences},
          {"average_sentence_length", report.average_sentence_length},
          {"holders", element_json(report.holders)},
          {"targets", element_json(report.targets)},
          {"expressions", element_json(report.expressions)},
          {"polarity",
           {{"positive", report.positive},
            {"neutral", report.neutral},
            {"negative", report.negative}}}};
}

Json to_json(const OverlapReport& report) {
  return {{"unique", {{"train", report.unique_train},
                      {"dev", report.unique_dev},
                      {"test", report.unique_test}}},
          {"overlap", {{"train-dev", report.overlap_dev},
                       {"train-test", report.overlap_test}}}};
}

std::string stats_table(const std::string& name, const StatsReport& r) {
  char line[512];
  std::snprintf(line, sizeof line,
                "%-16s %8s %6s | %7s %5s %4s | %7s %5s %4s | %7s %5s %4s | %6s %6s %6s\n",
                "", "sents", "avg", "holders", "avg", "max", "targets", "avg",
                "max", "exprs", "avg", "max", "+", "neu", "-");
  std::string out = line;
  std::snprintf(line, sizeof line,
                "%-16s %8ld %6s | %7ld %5s %4ld | %7ld %5s %4ld | %7ld %5s %4ld | %6ld %6ld %6ld\n",
                name.c_str(), r.sentences, fixed1(r.average_sentence_length).c_str(),
                r.holders.count, fixed1(r.holders.average_length).c_str(),
                r.holders.max_length, r.targets.count,
                fixed1(r.targets.average_length).c_str(), r.targets.max_length,
                r.expressions.count, fixed1(r.expressions.average_length).c_str(),
                r.expressions.max_length, r.positive, r.neutral, r.negative);
  return out + line;
}

std::string overlap_table(const std::string& name, const OverlapReport& r) {
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %7s %7s %7s | %9s %10s\n", "",
                "%uniq-tr", "%uniq-dv", "%uniq-te", "train-dev", "train-test");
  std::string out = line;
  std::snprintf(line, sizeof line, "%-16s %7s %7s %7s | %9s %10s\n", name.c_str(),
                fixed1(r.unique_train).c_str(), fixed1(r.unique_dev).c_str(),
                fixed1(r.unique_test).c_str(), fixed1(r.overlap_dev).c_str(),
                fixed1(r.overlap_test).c_str());
  return out + line;
}

}  // namespace fgs
