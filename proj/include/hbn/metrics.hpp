#ifndef HBN_METRICS_HPP
#define HBN_METRICS_HPP

#include <hbn/graph.hpp>
#include <hbn/sampler.hpp>

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hbn::metrics {

using graph::Dag;

class MetricsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Confusion {
    int tp = 0, fp = 0, fn = 0;
    double tpr = 0.0;  // 0 when the truth has no edges
};

// Skeleton-level counts: an estimated edge is a true positive whatever its direction.
Confusion confusion(const Dag& estimate, const Dag& truth);

// Most visited DAG; ties go to the higher stored score, then the smaller edge list.
Dag map_dag(const sampler::PosteriorSamples& samples);

// (c1, c0): samples in the truth's equivalence class, samples equal to the empty graph.
using ClassCounts = std::pair<std::uint64_t, std::uint64_t>;
ClassCounts class_counts(const sampler::PosteriorSamples& samples, const Dag& truth);

// Pooled sum c1 / sum c0; +inf when only c1 is positive. Throws when both sums are zero.
double frequency_ratio(const std::vector<ClassCounts>& per_replicate);

// Averages over replicates; integer counts become means.
struct EvalReport {
    double tp = 0, fp = 0, fn = 0;
    double tpr = 0;
    double shd = 0;
    double fr = 0;  // NaN when neither class was visited
    std::size_t replicates = 0;
};

struct ReplicateResult {
    const sampler::PosteriorSamples* samples;
    Dag truth;
};

EvalReport evaluate_replicates(const std::vector<ReplicateResult>& replicates);

// Per-replicate summary so callers can discard samples before pooling.
struct ReplicateSummary {
    Confusion confusion;
    int shd = 0;
    ClassCounts counts{0, 0};
};
ReplicateSummary summarize_replicate(const sampler::PosteriorSamples& samples, const Dag& truth);
EvalReport pool_summaries(const std::vector<ReplicateSummary>& summaries);

}  // namespace hbn::metrics

#endif  // HBN_METRICS_HPP
