#include "fgs/viterbi.hpp"

#include <algorithm>
#include <limits>

#include "fgs/error.hpp"

namespace fgs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

TransitionMask TransitionMask::all_allowed(std::size_t labels) {
  return {labels, std::vector<char>(labels * labels, 1), std::vector<char>(labels, 1)};
}

TransitionMask TransitionMask::bio(const std::vector<Tag>& labels) {
  const std::size_t n = labels.size();
  TransitionMask mask{n, std::vector<char>(n * n, 0), std::vector<char>(n, 0)};
  for (std::size_t cur = 0; cur < n; ++cur) {
    mask.start[cur] = fgs::can_start(labels[cur]) ? 1 : 0;
    for (std::size_t prev = 0; prev < n; ++prev) {
      mask.allowed[prev * n + cur] = fgs::can_follow(labels[prev], labels[cur]) ? 1 : 0;
    }
  }
  return mask;
}

double path_score(const Matrix& emissions, const Matrix& transitions,
                  const std::vector<int>& path) {
  double score = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    score += emissions(i, path[i]);
    if (i > 0) score += transitions(path[i - 1], path[i]);
  }
  return score;
}

// The table is filled right to left (best suffix score per label) and the
// path is read off left to right, taking the lowest label among ties at each
// position. That yields the lexicographically smallest optimal path.
ViterbiResult viterbi(const Matrix& emissions, const Matrix& transitions,
                      const TransitionMask& mask) {
  const std::size_t n = emissions.rows();
  const std::size_t labels = emissions.cols();
  if (n == 0) throw ValidationError("viterbi: empty emission matrix");
  if (transitions.rows() != labels || transitions.cols() != labels ||
      mask.labels != labels) {
    throw ValidationError("viterbi: emission, transition and mask sizes disagree");
  }

  Matrix suffix(n, labels, kNegInf);
  for (std::size_t y = 0; y < labels; ++y) suffix(n - 1, y) = emissions(n - 1, y);
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t y = 0; y < labels; ++y) {
      double best = kNegInf;
      for (std::size_t next = 0; next < labels; ++next) {
        if (!mask.can_follow(y, next) || suffix(i + 1, next) == kNegInf) continue;
        best = std::max(best, transitions(y, next) + suffix(i + 1, next));
      }
      if (best != kNegInf) suffix(i, y) = emissions(i, y) + best;
    }
  }

  ViterbiResult result;
  result.path.reserve(n);
  double best = kNegInf;
  int choice = -1;
  for (std::size_t y = 0; y < labels; ++y) {
    if (mask.can_start(y) && suffix(0, y) > best) {
      best = suffix(0, y);
      choice = static_cast<int>(y);
    }
  }
  if (choice < 0) throw Error("viterbi: every path is masked");
  result.path.push_back(choice);
  for (std::size_t i = 1; i < n; ++i) {
    const auto prev = static_cast<std::size_t>(result.path.back());
    double step_best = kNegInf;
    int step_choice = -1;
    for (std::size_t y = 0; y < labels; ++y) {
      if (!mask.can_follow(prev, y) || suffix(i, y) == kNegInf) continue;
      const double s = transitions(prev, y) + suffix(i, y);
      if (s > step_best) {
        step_best = s;
        step_choice = static_cast<int>(y);
      }
    }
    result.path.push_back(step_choice);
  }
  result.score = path_score(emissions, transitions, result.path);
  return result;
}

}  // namespace fgs
