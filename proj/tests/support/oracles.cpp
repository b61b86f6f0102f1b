#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

namespace fgs::testing {

namespace {

std::string element_of(const std::string& tag) {
  if (tag == "O") return "";
  const std::size_t first = tag.find('-');
  const std::size_t second = tag.find('-', first + 1);
  return tag.substr(first + 1, second == std::string::npos ? std::string::npos
                                                            : second - first - 1);
}

std::string chunk_of(const std::string& tag) { return tag == "O" ? "" : tag.substr(2); }

std::string join(const Sentence& s, const std::vector<Span>& spans) {
  std::string out;
  for (const Span& span : spans) {
    for (int i = span.start; i < span.end; ++i) {
      if (!out.empty()) out += ' ';
      out += s.tokens[i];
    }
  }
  return out;
}

double round_tenth(long num, long den) {
  if (den == 0) return 0.0;
  // Exact decimal rounding through the printed representation of the
  // integer quotient and remainder.
  const long whole = num * 10 / den;
  const long rem = num * 10 % den;
  const long tenths = whole + (2 * rem >= den ? 1 : 0);
  return static_cast<double>(tenths) / 10.0;
}

}  // namespace

ViterbiResult brute_force_viterbi(const Matrix& emissions, const Matrix& transitions,
                                  const TransitionMask& mask) {
  const std::size_t n = emissions.rows();
  const std::size_t labels = emissions.cols();
  std::vector<int> path(n, 0);
  ViterbiResult best;
  bool found = false;
  while (true) {
    bool legal = mask.can_start(static_cast<std::size_t>(path[0]));
    for (std::size_t i = 1; legal && i < n; ++i) {
      legal = mask.can_follow(static_cast<std::size_t>(path[i - 1]),
                              static_cast<std::size_t>(path[i]));
    }
    if (legal) {
      double score = emissions(0, static_cast<std::size_t>(path[0]));
      for (std::size_t i = 1; i < n; ++i) {
        score += transitions(static_cast<std::size_t>(path[i - 1]),
                             static_cast<std::size_t>(path[i]));
        score += emissions(i, static_cast<std::size_t>(path[i]));
      }
      if (!found || score > best.score) {
        best = {path, score};
        found = true;
      }
    }
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (static_cast<std::size_t>(++path[pos]) < labels) break;
      path[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

std::vector<LabeledSpan> expected_spans(const Sentence& sentence, const TagScheme& scheme) {
  const bool polar = scheme.strategy == Strategy::JointPolarity;
  const bool others = scheme.strategy != Strategy::Target && scheme.mode == TaskMode::Full;
  std::set<LabeledSpan> spans;
  for (const Opinion& o : sentence.opinions) {
    if (polar && o.polarity == Polarity::Conflict) continue;
    std::optional<Polarity> p;
    if (polar) p = o.polarity;
    for (const Span& s : o.target) spans.insert({Element::Target, s, p});
    if (!others) continue;
    for (const Span& s : o.holder) spans.insert({Element::Holder, s, p});
    for (const Span& s : o.expression) spans.insert({Element::Expression, s, p});
  }
  std::vector<LabeledSpan> out(spans.begin(), spans.end());
  std::stable_sort(out.begin(), out.end(), [](const LabeledSpan& a, const LabeledSpan& b) {
    return a.span.start < b.span.start;
  });
  return out;
}

Counts token_counts(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                    const std::string& element) {
  Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = element_of(gold[i]) == element;
    const bool p = element_of(pred[i]) == element;
    if (g && p) ++c.tp;
    if (!g && p) ++c.fp;
    if (g && !p) ++c.fn;
  }
  return c;
}

double f1_from_counts(const Counts& c) {
  const long denominator = 2 * c.tp + c.fp + c.fn;
  return denominator == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denominator);
}

double macro_f1_oracle(const std::vector<Polarity>& gold, const std::vector<Polarity>& pred) {
  // confusion[g][p] over positive, neutral, negative, conflict.
  auto index = [](Polarity p) {
    switch (p) {
      case Polarity::Positive: return 0;
      case Polarity::Neutral: return 1;
      case Polarity::Negative: return 2;
      default: return 3;
    }
  };
  long confusion[4][4] = {};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == Polarity::Conflict) continue;
    ++confusion[index(gold[i])][index(pred[i])];
  }
  long double total = 0;
  for (int k = 0; k < 3; ++k) {
    long tp = confusion[k][k];
    long gold_k = 0;
    long pred_k = 0;
    for (int j = 0; j < 4; ++j) {
      gold_k += confusion[k][j];
      pred_k += confusion[j][k];
    }
    if (gold_k + pred_k > 0) total += 2.0L * tp / static_cast<long double>(gold_k + pred_k);
  }
  return static_cast<double>(total / 3.0L);
}

MeanStd mean_std_oracle(const std::vector<double>& values) {
  MeanStd m;
  for (const double v : values) m.mean += v;
  m.mean /= static_cast<long double>(values.size());
  if (values.size() < 2) return m;
  long double ss = 0;
  for (const double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(ss / static_cast<long double>(values.size() - 1));
  return m;
}

long double pearson_r_oracle(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<long double>(xs.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long double x = xs[i];
    const long double y = ys[i];
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

long double student_t_two_sided(long double t, int df) {
  const long double theta = std::atan(std::fabs(t) / std::sqrt(static_cast<long double>(df)));
  const long double s = std::sin(theta);
  const long double c = std::cos(theta);
  long double a = 0;  // P(|T| < |t|)
  if (df % 2 == 1) {
    long double sum = 0;
    if (df > 1) {
      long double term = c;
      sum = term;
      for (int k = 3; k <= df - 2; k += 2) {
        term *= c * c * static_cast<long double>(k - 1) / static_cast<long double>(k);
        sum += term;
      }
    }
    a = 2.0L / std::numbers::pi_v<long double> * (theta + s * sum);
  } else {
    long double term = 1;
    long double sum = 1;
    for (int k = 2; k <= df - 2; k += 2) {
      term *= c * c * static_cast<long double>(k - 1) / static_cast<long double>(k);
      sum += term;
    }
    a = s * sum;
  }
  return 1.0L - a;
}

StatsReport stats_oracle(const Corpus& corpus) {
  StatsReport r;
  auto add = [](ElementStats& e, const std::vector<Span>& spans) {
    if (spans.empty()) return;
    long length = 0;
    for (const Span& s : spans) length += s.end - s.start;
    ++e.count;
    e.total_length += length;
    e.max_length = std::max(e.max_length, length);
  };
  for (const Sentence& s : corpus.sentences) {
    ++r.sentences;
    r.tokens += static_cast<long>(s.tokens.size());
    for (const Opinion& o : s.opinions) {
      add(r.holders, o.holder);
      add(r.targets, o.target);
      add(r.expressions, o.expression);
      if (o.polarity == Polarity::Positive) ++r.positive;
      if (o.polarity == Polarity::Neutral) ++r.neutral;
      if (o.polarity == Polarity::Negative) ++r.negative;
    }
  }
  r.average_sentence_length = round_tenth(r.tokens, r.sentences);
  for (ElementStats* e : {&r.holders, &r.targets, &r.expressions}) {
    e->average_length = round_tenth(e->total_length, e->count);
  }
  return r;
}

OverlapReport overlap_oracle(const Corpus& train, const Corpus& dev, const Corpus& test) {
  auto forms = [](const Corpus& c) {
    std::vector<std::string> out;
    for (const Sentence& s : c.sentences) {
      for (const Opinion& o : s.opinions) {
        const std::string f = join(s, o.target);
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
      }
    }
    return out;
  };
  auto contains = [](const std::vector<std::string>& list, const std::string& f) {
    for (const std::string& x : list) {
      if (x == f) return true;
    }
    return false;
  };
  const auto tr = forms(train);
  const auto dv = forms(dev);
  const auto te = forms(test);
  auto unique = [&](const std::vector<std::string>& mine, const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
    if (mine.empty()) return 0.0;
    long count = 0;
    for (const std::string& f : mine) {
      if (!contains(a, f) && !contains(b, f)) ++count;
    }
    return 100.0 * static_cast<double>(count) / static_cast<double>(mine.size());
  };
  auto overlap = [&](const std::vector<std::string>& mine) {
    if (mine.empty()) return 0.0;
    long count = 0;
    for (const std::string& f : mine) {
      if (contains(tr, f)) ++count;
    }
    return 100.0 * static_cast<double>(count) / static_cast<double>(mine.size());
  };
  OverlapReport r;
  r.unique_train = unique(tr, dv, te);
  r.unique_dev = unique(dv, tr, te);
  r.unique_test = unique(te, tr, dv);
  r.overlap_dev = overlap(dv);
  r.overlap_test = overlap(te);
  return r;
}

std::vector<LabeledSpan> mark_oracle(const Sentence& sentence,
                                     const std::vector<std::string>& terms) {
  std::vector<LabeledSpan> out;
  for (int i = 0; i < sentence.size(); ++i) {
    std::string lower = sentence.tokens[i];
    for (char& c : lower) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    for (const std::string& term : terms) {
      if (term == lower) {
        out.push_back({Element::Expression, {i, i + 1}, std::nullopt});
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> union_oracle(const std::vector<std::vector<std::string>>& members) {
  const std::size_t n = members.front().size();
  std::vector<std::string> out(n, "O");
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> labels;
    std::string chunk;
    for (const auto& m : members) {
      if (m[i] == "O") continue;
      labels.insert(m[i]);
      if (chunk.empty()) chunk = chunk_of(m[i]);
    }
    if (labels.empty()) continue;
    const bool any_b = std::any_of(labels.begin(), labels.end(),
                                   [](const std::string& l) { return l[0] == 'B'; });
    out[i] = (any_b ? "B-" : "I-") + chunk;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i][0] != 'I') continue;
    if (i == 0 || out[i - 1] == "O" || chunk_of(out[i - 1]) != chunk_of(out[i])) {
      out[i][0] = 'B';
    }
  }
  return out;
}

}  // namespace fgs::testing
