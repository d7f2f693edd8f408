#ifndef HBN_IO_HPP
#define HBN_IO_HPP

#include <hbn/dataset.hpp>
#include <hbn/graph.hpp>
#include <hbn/metrics.hpp>
#include <hbn/sampler.hpp>
#include <hbn/scores.hpp>
#include <hbn/theory.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbn::io {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Writes to a sibling temp file and renames it into place.
void atomic_write(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

// Shortest text that parses back to the same double; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& text);

std::vector<std::string> split_csv_line(const std::string& line);

// Dataset as a CSV with a header row plus a JSON schema sidecar.
std::string schema_json(const datagen::Dataset& data);
// CSV readers skip lines starting with '#'; writers put `comment` there (e.g. the seed).
void write_dataset(const datagen::Dataset& data, const fs::path& csv, const fs::path& schema,
                   const std::string& comment = {});
datagen::Dataset read_dataset(const fs::path& csv, const fs::path& schema);
fs::path default_schema_path(const fs::path& csv);  // data.csv -> data.schema.json

// DAG as `from,to` edge list (stem.csv) plus a one-line comma-separated node list (stem.nodes).
void write_dag(const graph::Dag& dag, const std::vector<std::string>& names, const fs::path& csv,
               const std::string& comment = {});
graph::Dag read_dag(const fs::path& csv, std::vector<std::string>* names_out = nullptr);
fs::path nodes_path(const fs::path& csv);

// Forbidden edges by node name; blank lines are skipped and duplicates collapse.
scores::Blacklist load_blacklist(const fs::path& path, const std::vector<std::string>& names);

// One JSON object per sample, then a {"summary": ...} footer.
void write_samples(const sampler::PosteriorSamples& samples, const std::vector<std::string>& names,
                   const fs::path& path, std::uint64_t seed);
sampler::PosteriorSamples read_samples(const fs::path& path, const std::vector<std::string>& names);

struct MetricsRow {
    std::string scenario;
    double beta = 0;
    std::string strategy;
    metrics::EvalReport report;
    std::string status = "ok";  // "error: ..." for a failed cell
};

std::string metrics_csv(const std::vector<MetricsRow>& rows, std::uint64_t seed);
std::string curves_csv(const std::vector<theory::CurveRow>& rows, const std::string& comment);

}  // namespace hbn::io

#endif  // HBN_IO_HPP
