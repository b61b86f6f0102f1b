#pragma once

#include <vector>

#include "fgs/matrix.hpp"
#include "fgs/tagscheme.hpp"

namespace fgs {

// Legal transitions between label indices, plus which labels may open a
// sequence.
struct TransitionMask {
  std::size_t labels = 0;
  std::vector<char> allowed;  // labels x labels, [previous][current]
  std::vector<char> start;    // labels

  static TransitionMask all_allowed(std::size_t labels);
  // Forbids exactly the BIO-invalid moves: I-x after O or after a tag with
  // a different element/polarity, and I-x at the first position.
  static TransitionMask bio(const std::vector<Tag>& labels);

  bool can_follow(std::size_t previous, std::size_t current) const {
    return allowed[previous * labels + current] != 0;
  }
  bool can_start(std::size_t label) const { return start[label] != 0; }
};

struct ViterbiResult {
  std::vector<int> path;
  double score = 0.0;
};

// Sum of emissions[i][y_i] plus transitions[y_{i-1}][y_i], accumulated left
// to right.
double path_score(const Matrix& emissions, const Matrix& transitions,
                  const std::vector<int>& path);

// Best mask-legal path. Among equal-scoring paths the one with the lowest
// label at the leftmost differing position wins. emissions is n x L,
// transitions L x L; n >= 1.
ViterbiResult viterbi(const Matrix& emissions, const Matrix& transitions,
                      const TransitionMask& mask);

}  // namespace fgs
