#include <hbn/metrics.hpp>

#include <limits>
#include <map>

namespace hbn::metrics {

Confusion confusion(const Dag& estimate, const Dag& truth) {
    if (estimate.node_count() != truth.node_count()) throw MetricsError("graphs have different node counts");
    const auto est = graph::skeleton(estimate);
    const auto tru = graph::skeleton(truth);
    Confusion c;
    for (const auto& e : est) {
        if (tru.count(e)) ++c.tp;
        else ++c.fp;
    }
    c.fn = static_cast<int>(tru.size()) - c.tp;
    if (c.tp + c.fn > 0) c.tpr = static_cast<double>(c.tp) / (c.tp + c.fn);
    return c;
}

Dag map_dag(const sampler::PosteriorSamples& samples) {
    if (samples.samples.empty()) throw MetricsError("no posterior samples");
    struct Tally {
        std::uint64_t visits = 0;
        double best_score = -std::numeric_limits<double>::infinity();
    };
    std::map<std::vector<graph::Edge>, std::pair<Tally, const Dag*>> tally;
    for (const auto& s : samples.samples) {
        auto& slot = tally[s.dag.edges()];
        slot.first.visits++;
        slot.first.best_score = std::max(slot.first.best_score, s.log_score);
        slot.second = &s.dag;
    }
    // map iteration is in edge-list order, so strict comparisons keep the smallest on ties
    const Dag* best = nullptr;
    Tally best_tally;
    for (const auto& [edges, slot] : tally) {
        const auto& t = slot.first;
        if (!best || t.visits > best_tally.visits ||
            (t.visits == best_tally.visits && t.best_score > best_tally.best_score)) {
            best = slot.second;
            best_tally = t;
        }
    }
    return *best;
}

ClassCounts class_counts(const sampler::PosteriorSamples& samples, const Dag& truth) {
    const auto target = graph::cpdag(truth);
    ClassCounts out{0, 0};
    std::map<std::vector<graph::NodeMask>, bool> in_class;
    for (const auto& s : samples.samples) {
        if (s.dag.edge_count() == 0) ++out.second;
        auto it = in_class.find(s.dag.parent_masks());
        if (it == in_class.end()) it = in_class.emplace(s.dag.parent_masks(), graph::cpdag(s.dag) == target).first;
        if (it->second) ++out.first;
    }
    return out;
}

double frequency_ratio(const std::vector<ClassCounts>& per_replicate) {
    std::uint64_t c1 = 0, c0 = 0;
    for (const auto& [a, b] : per_replicate) {
        c1 += a;
        c0 += b;
    }
    if (c1 == 0 && c0 == 0) throw MetricsError("frequency ratio undefined: no samples in either class");
    if (c0 == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(c1) / static_cast<double>(c0);
}

ReplicateSummary summarize_replicate(const sampler::PosteriorSamples& samples, const Dag& truth) {
    const Dag est = map_dag(samples);
    ReplicateSummary s;
    s.confusion = confusion(est, truth);
    s.shd = graph::shd(est, truth);
    s.counts = class_counts(samples, truth);
    return s;
}

EvalReport pool_summaries(const std::vector<ReplicateSummary>& summaries) {
    if (summaries.empty()) throw MetricsError("no replicates to evaluate");
    EvalReport r;
    std::vector<ClassCounts> counts;
    for (const auto& s : summaries) {
        r.tp += s.confusion.tp;
        r.fp += s.confusion.fp;
        r.fn += s.confusion.fn;
        r.tpr += s.confusion.tpr;
        r.shd += s.shd;
        counts.push_back(s.counts);
    }
    const double k = static_cast<double>(summaries.size());
    r.tp /= k;
    r.fp /= k;
    r.fn /= k;
    r.tpr /= k;
    r.shd /= k;
    // an undefined ratio should not sink the other columns of the row
    try {
        r.fr = frequency_ratio(counts);
    } catch (const MetricsError&) {
        r.fr = std::numeric_limits<double>::quiet_NaN();
    }
    r.replicates = summaries.size();
    return r;
}

EvalReport evaluate_replicates(const std::vector<ReplicateResult>& replicates) {
    std::vector<ReplicateSummary> summaries;
    summaries.reserve(replicates.size());
    for (const auto& r : replicates) summaries.push_back(summarize_replicate(*r.samples, r.truth));
    return pool_summaries(summaries);
}

}  // namespace hbn::metrics
