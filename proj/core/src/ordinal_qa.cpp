#include "amber/ordinal_qa.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "amber/error.hpp"

namespace amber {

std::string_view to_string(Trend trend) noexcept {
  switch (trend) {
    case Trend::Rise: return "RISE";
    case Trend::Fall: return "FALL";
    case Trend::Same: return "SAME";
    case Trend::NoAgreement: return "NO_AGREEMENT";
    case Trend::Undefined: return "UNDEFINED";
  }
  return "?";
}

Trend trend_from_string(std::string_view text) {
  for (Trend t : {Trend::Rise, Trend::Fall, Trend::Same, Trend::NoAgreement, Trend::Undefined})
    if (to_string(t) == text) return t;
  throw Error(ErrorCode::FormatError, "unknown trend '" + std::string(text) + "'");
}

Trend transpose(Trend trend) noexcept {
  if (trend == Trend::Rise) return Trend::Fall;
  if (trend == Trend::Fall) return Trend::Rise;
  return trend;
}

TrendMatrix::TrendMatrix(std::size_t size, MatrixKind kind)
    : size_(size), kind_(kind), entries_(size * size, Trend::Undefined) {
  for (std::size_t i = 0; i < size; ++i) entries_[i * size + i] = Trend::Same;
}

Trend TrendMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= size_ || j >= size_) throw Error(ErrorCode::IndexOutOfRange, "trend matrix index out of range");
  return entries_[i * size_ + j];
}

void TrendMatrix::set_pair(std::size_t i, std::size_t j, Trend trend) {
  if (i >= size_ || j >= size_) throw Error(ErrorCode::IndexOutOfRange, "trend matrix index out of range");
  if (i == j && trend != Trend::Same) throw Error(ErrorCode::InvalidArgument, "diagonal entries are SAME");
  entries_[i * size_ + j] = trend;
  entries_[j * size_ + i] = transpose(trend);
}

ValidationReport validate_trend_matrix(const TrendMatrix& m) {
  ValidationReport report;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.at(i, i) != Trend::Same) report.violations.push_back("diagonal entry " + std::to_string(i) + " is not SAME");
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m.at(i, j) != transpose(m.at(j, i)))
        report.violations.push_back("entries (" + std::to_string(i) + "," + std::to_string(j) + ") break anti-symmetry");
      if (m.kind() == MatrixKind::Individual && m.at(i, j) == Trend::NoAgreement)
        report.violations.push_back("individual matrix contains NO_AGREEMENT");
    }
  }
  return report;
}

std::vector<double> segment_means(const AnnotationTrace& trace, const std::vector<Segment>& segments) {
  std::vector<Segment> sorted = segments;
  std::sort(sorted.begin(), sorted.end(), [](const Segment& a, const Segment& b) { return a.start_s < b.start_s; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!(sorted[k].end_s > sorted[k].start_s))
      throw Error(ErrorCode::InvalidArgument, "segment '" + sorted[k].id + "' does not satisfy start < end");
    if (k > 0 && sorted[k].start_s < sorted[k - 1].end_s)
      throw Error(ErrorCode::InvalidArgument, "segments '" + sorted[k - 1].id + "' and '" + sorted[k].id + "' overlap");
  }
  const auto values = trace_values(trace);
  std::vector<double> means;
  means.reserve(segments.size());
  for (const auto& seg : segments) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double t = trace.samples[i].time_s;
      if (t >= seg.start_s && t < seg.end_s) {
        sum += values[i];
        ++count;
      }
    }
    if (count == 0)
      throw Error(ErrorCode::EmptySegment,
                  "segment '" + seg.id + "' holds no samples of annotator '" + trace.annotator + "'");
    means.push_back(sum / static_cast<double>(count));
  }
  return means;
}

TrendMatrix individual_matrix(const AnnotationTrace& trace, const std::vector<Segment>& segments, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "trend threshold must be positive");
  const auto means = segment_means(trace, segments);
  TrendMatrix m(segments.size(), MatrixKind::Individual);
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      const double diff = means[j] - means[i];
      m.set_pair(i, j, diff > threshold ? Trend::Rise : diff < -threshold ? Trend::Fall : Trend::Same);
    }
  }
  return m;
}

TrendMatrix consensus_matrix(const std::vector<TrendMatrix>& ims, double agreement) {
  if (!(agreement > 0.5 && agreement <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "agreement must lie in (0.5, 1]");
  if (ims.size() < 2) throw Error(ErrorCode::InsufficientData, "consensus needs at least 2 annotators");
  const std::size_t size = ims.front().size();
  for (const auto& im : ims) {
    if (im.size() != size) throw Error(ErrorCode::SizeMismatch, "individual matrices differ in size");
    if (im.kind() != MatrixKind::Individual)
      throw Error(ErrorCode::InvalidArgument, "consensus is formed from individual matrices");
  }
  const double n = static_cast<double>(ims.size());
  TrendMatrix c(size, MatrixKind::Consensus);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) {
      std::array<std::size_t, 3> counts{};
      for (const auto& im : ims) {
        const Trend t = im.at(i, j);
        if (t == Trend::Rise || t == Trend::Fall || t == Trend::Same) ++counts[static_cast<std::size_t>(t)];
      }
      Trend decided = Trend::NoAgreement;
      for (Trend t : {Trend::Rise, Trend::Fall, Trend::Same})
        if (static_cast<double>(counts[static_cast<std::size_t>(t)]) >= agreement * n - kTolerance) decided = t;
      c.set_pair(i, j, decided);
    }
  }
  return c;
}

Ranking rank_from_consensus(const TrendMatrix& consensus) {
  if (consensus.kind() != MatrixKind::Consensus)
    throw Error(ErrorCode::InvalidArgument, "ranking needs a consensus matrix");
  const std::size_t size = consensus.size();
  std::vector<int> score(size, 0);
  std::size_t decided = 0;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (i == j) continue;
      const Trend t = consensus.at(i, j);
      if (t != Trend::NoAgreement && t != Trend::Undefined) ++decided;
      // Each unordered pair is scored once, from its (i < j) entry.
      if (i < j && t == Trend::Rise) {
        ++score[j];
        --score[i];
      } else if (i < j && t == Trend::Fall) {
        ++score[i];
        --score[j];
      }
    }
  }
  Ranking ranking;
  ranking.coverage = size < 2 ? 1.0 : static_cast<double>(decided) / static_cast<double>(size * (size - 1));
  for (std::size_t s = 0; s < size; ++s) ranking.order.push_back(RankedSegment{s, 0, score[s]});
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [](const RankedSegment& a, const RankedSegment& b) { return a.score > b.score; });
  for (std::size_t r = 0; r < ranking.order.size(); ++r) ranking.order[r].rank = r + 1;
  return ranking;
}

double PairwiseOutcomeDistribution::weight(Outcome o) const noexcept {
  switch (o) {
    case Outcome::Higher: return higher;
    case Outcome::Lower: return lower;
    case Outcome::Same: return same;
  }
  return 0.0;
}

PairwiseOutcomeDistribution pairwise_ambiguity(const std::vector<TrendMatrix>& ims, std::size_t i, std::size_t j) {
  if (ims.empty()) throw Error(ErrorCode::InsufficientData, "pairwise ambiguity needs at least one annotator");
  std::size_t higher = 0;
  std::size_t lower = 0;
  std::size_t same = 0;
  for (const auto& im : ims) {
    if (i >= im.size() || j >= im.size())
      throw Error(ErrorCode::IndexOutOfRange, "segment pair (" + std::to_string(i) + "," + std::to_string(j) +
                                                  ") outside a " + std::to_string(im.size()) + "-segment matrix");
    if (im.kind() != MatrixKind::Individual)
      throw Error(ErrorCode::InvalidArgument, "pairwise ambiguity counts individual matrices");
    switch (im.at(i, j)) {
      case Trend::Rise: ++higher; break;
      case Trend::Fall: ++lower; break;
      default: ++same; break;
    }
  }
  const double n = static_cast<double>(ims.size());
  return PairwiseOutcomeDistribution{i,
                                     j,
                                     static_cast<double>(higher) / n,
                                     static_cast<double>(lower) / n,
                                     static_cast<double>(same) / n,
                                     ims.size()};
}

AmbiguityFunction to_bernoulli(const PairwiseOutcomeDistribution& dist, const std::string& descriptor_ref) {
  if (dist.same > 0.0)
    throw Error(ErrorCode::UnsupportedPair, "a pair with SAME outcomes has three outcomes, not two");
  return AmbiguityFunction{BernoulliPair{dist.higher}, descriptor_ref};
}

AmbiguityFunction absolute_ordinal_distribution(const std::vector<Element>& labels, const AttributeDescriptor& d) {
  if (d.kind != DescriptorKind::Ordinal)
    throw Error(ErrorCode::DomainMismatch, "'" + d.name + "' is not an ordinal descriptor");
  if (labels.empty()) throw Error(ErrorCode::InsufficientData, "no ordinal labels");
  std::vector<std::size_t> counts(d.levels.size(), 0);
  for (const auto& x : labels) {
    if (!contains(d, x))
      throw Error(ErrorCode::DomainMismatch, x.to_string() + " is not a level of '" + d.name + "'");
    ++counts[level_index(d, x.as_level())];
  }
  const double n = static_cast<double>(labels.size());
  FiniteSupport fs;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k] > 0) fs.weights.emplace_back(Element::level(d.levels[k]), static_cast<double>(counts[k]) / n);
  if (fs.weights.size() == 1) return AmbiguityFunction{PointMass{fs.weights.front().first}, d.name};
  return AmbiguityFunction{std::move(fs), d.name};
}

}  // namespace amber
