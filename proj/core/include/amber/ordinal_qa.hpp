#pragma once

#include <string>
#include <vector>

#include "amber/aggregation.hpp"
#include "amber/ambiguity.hpp"

namespace amber {

/// Pairwise trend between segments i and j: RISE means segment j is higher
/// than segment i.
enum class Trend { Rise, Fall, Same, NoAgreement, Undefined };

std::string_view to_string(Trend trend) noexcept;
Trend trend_from_string(std::string_view text);
[[nodiscard]] Trend transpose(Trend trend) noexcept;

enum class MatrixKind { Individual, Consensus };

class TrendMatrix {
 public:
  TrendMatrix(std::size_t size, MatrixKind kind);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] MatrixKind kind() const noexcept { return kind_; }
  [[nodiscard]] Trend at(std::size_t i, std::size_t j) const;

  /// Sets (i, j) and its transpose (j, i) together.
  void set_pair(std::size_t i, std::size_t j, Trend trend);

  friend bool operator==(const TrendMatrix&, const TrendMatrix&) = default;

 private:
  std::size_t size_;
  MatrixKind kind_;
  std::vector<Trend> entries_;
};

/// Anti-symmetry, SAME diagonal, no NO_AGREEMENT in individual matrices.
ValidationReport validate_trend_matrix(const TrendMatrix& m);

struct Segment {
  std::string id;
  double start_s = 0.0;
  double end_s = 0.0;  // exclusive
};

/// Mean of the samples with start <= t < end for each segment.
std::vector<double> segment_means(const AnnotationTrace& trace, const std::vector<Segment>& segments);

/// RISE when mean(j) - mean(i) > threshold, FALL when < -threshold, else SAME.
TrendMatrix individual_matrix(const AnnotationTrace& trace, const std::vector<Segment>& segments, double threshold);

/// Keeps the trend reached by at least `agreement` of the annotators;
/// everything else becomes NO_AGREEMENT. agreement must lie in (0.5, 1].
TrendMatrix consensus_matrix(const std::vector<TrendMatrix>& ims, double agreement);

struct RankedSegment {
  std::size_t segment = 0;
  std::size_t rank = 0;  // 1 = highest
  int score = 0;         // Copeland: wins - losses over decided pairs
};

struct Ranking {
  std::vector<RankedSegment> order;
  double coverage = 0.0;
};

/// Copeland ranking of a consensus matrix; coverage is the fraction of
/// off-diagonal entries that are decided.
Ranking rank_from_consensus(const TrendMatrix& consensus);

enum class Outcome { Higher, Lower, Same };

struct PairwiseOutcomeDistribution {
  std::size_t i = 0;
  std::size_t j = 0;
  double higher = 0.0;  // segment j higher than segment i
  double lower = 0.0;
  double same = 0.0;
  std::size_t annotator_count = 0;

  [[nodiscard]] double weight(Outcome o) const noexcept;
};

/// Relative counts of each outcome for the pair (i, j) across annotators.
PairwiseOutcomeDistribution pairwise_ambiguity(const std::vector<TrendMatrix>& ims, std::size_t i, std::size_t j);

/// The two-outcome Bernoulli view of a pairwise distribution over a
/// comparison descriptor; Error(UnsupportedPair) when any annotator saw SAME.
AmbiguityFunction to_bernoulli(const PairwiseOutcomeDistribution& dist, const std::string& descriptor_ref);

/// Relative frequencies of absolute ordinal labels. All-identical labels
/// give a point mass.
AmbiguityFunction absolute_ordinal_distribution(const std::vector<Element>& labels, const AttributeDescriptor& d);

}  // namespace amber
