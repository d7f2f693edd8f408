#include <hbn/io.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unistd.h>

namespace hbn::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

// Lines of a CSV-like file with `#` comment lines dropped.
std::vector<std::string> content_lines(const std::string& text) {
    std::vector<std::string> out;
    for (auto& l : lines_of(text))
        if (l.empty() || l[0] != '#') out.push_back(std::move(l));
    return out;
}

std::string comment_line(const std::string& comment) { return comment.empty() ? "" : "# " + comment + "\n"; }

int name_index(const std::vector<std::string>& names, const std::string& name, const std::string& where) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw IoError(where + ": unknown node '" + name + "'");
}

}  // namespace

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw IoError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw IoError("not a number: '" + t + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string schema_json(const datagen::Dataset& data) {
    json j = json::object();
    for (const auto& c : data.columns()) {
        if (c.kind == datagen::ColumnKind::continuous) j[c.name] = {{"kind", "continuous"}};
        else j[c.name] = {{"kind", "categorical"}, {"levels", c.levels}};
    }
    return j.dump(2) + "\n";
}

fs::path default_schema_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".schema.json");
    return p;
}

void write_dataset(const datagen::Dataset& data, const fs::path& csv, const fs::path& schema,
                   const std::string& comment) {
    std::string out = comment_line(comment);
    const auto names = data.names();
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    out += "\n";
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (int c = 0; c < data.cols(); ++c) {
            if (c) out += ",";
            if (data.column(c).kind == datagen::ColumnKind::categorical) out += std::to_string(data.code(r, c));
            else out += format_double(data.at(r, c));
        }
        out += "\n";
    }
    atomic_write(schema, schema_json(data));
    atomic_write(csv, out);
}

datagen::Dataset read_dataset(const fs::path& csv, const fs::path& schema) {
    json j;
    try {
        j = json::parse(read_file(schema));
    } catch (const json::exception& e) {
        throw IoError(schema.string() + ": " + e.what());
    }
    const auto lines = content_lines(read_file(csv));
    if (lines.empty()) throw IoError(csv.string() + ": missing header");
    const auto header = split_csv_line(lines[0]);
    std::vector<datagen::Column> cols;
    for (const auto& name : header) {
        if (!j.contains(name)) throw IoError(schema.string() + ": no entry for column '" + name + "'");
        const auto& e = j.at(name);
        const std::string kind = e.value("kind", "");
        if (kind == "continuous") {
            cols.push_back({name, datagen::ColumnKind::continuous, 0});
        } else if (kind == "categorical") {
            const int levels = e.value("levels", 0);
            if (levels < 2) throw IoError(schema.string() + ": column '" + name + "' needs levels >= 2");
            cols.push_back({name, datagen::ColumnKind::categorical, levels});
        } else {
            throw IoError(schema.string() + ": column '" + name + "' has unknown kind '" + kind + "'");
        }
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto fields = split_csv_line(lines[i]);
        if (fields.size() != header.size())
            throw IoError(csv.string() + ":" + std::to_string(i + 1) + ": expected " + std::to_string(header.size()) +
                          " fields");
        rows.push_back(std::move(fields));
    }
    datagen::Dataset data(cols, rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < data.cols(); ++c) {
            try {
                data.at(r, c) = parse_double(rows[r][c]);
            } catch (const IoError& e) {
                throw IoError(csv.string() + ":" + std::to_string(r + 2) + ": " + e.what());
            }
        }
    data.validate();
    return data;
}

fs::path nodes_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".nodes");
    return p;
}

void write_dag(const graph::Dag& dag, const std::vector<std::string>& names, const fs::path& csv,
               const std::string& comment) {
    if (static_cast<int>(names.size()) != dag.node_count()) throw IoError("node names do not match the graph");
    std::string edges = comment_line(comment) + "from,to\n";
    for (const auto& [a, b] : dag.edges()) edges += names[a] + "," + names[b] + "\n";
    std::string nodes;
    for (std::size_t i = 0; i < names.size(); ++i) nodes += (i ? "," : "") + names[i];
    atomic_write(nodes_path(csv), nodes + "\n");
    atomic_write(csv, edges);
}

graph::Dag read_dag(const fs::path& csv, std::vector<std::string>* names_out) {
    const auto node_lines = lines_of(read_file(nodes_path(csv)));
    if (node_lines.empty()) throw IoError(nodes_path(csv).string() + ": empty node list");
    const auto names = split_csv_line(node_lines[0]);
    graph::Dag dag(static_cast<int>(names.size()));
    const auto lines = content_lines(read_file(csv));
    if (lines.empty() || split_csv_line(lines[0]) != std::vector<std::string>{"from", "to"})
        throw IoError(csv.string() + ": expected header 'from,to'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 2) throw IoError(csv.string() + ":" + std::to_string(i + 1) + ": malformed edge");
        dag.add_edge(name_index(names, f[0], csv.string()), name_index(names, f[1], csv.string()));
    }
    if (names_out) *names_out = names;
    return dag;
}

scores::Blacklist load_blacklist(const fs::path& path, const std::vector<std::string>& names) {
    scores::Blacklist out;
    const auto lines = content_lines(read_file(path));
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) return out;
    if (split_csv_line(lines[first]) != std::vector<std::string>{"from", "to"})
        throw IoError(path.string() + ": expected header 'from,to'");
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto f = split_csv_line(lines[i]);
        const std::string where = path.string() + ":" + std::to_string(i + 1);
        if (f.size() != 2 || f[0].empty() || f[1].empty()) throw IoError(where + ": malformed row");
        const int a = name_index(names, f[0], where), b = name_index(names, f[1], where);
        if (a == b) throw IoError(where + ": self edge");
        out.insert({a, b});
    }
    return out;
}

void write_samples(const sampler::PosteriorSamples& samples, const std::vector<std::string>& names,
                   const fs::path& path, std::uint64_t seed) {
    std::string out;
    for (const auto& s : samples.samples) {
        json edges = json::array();
        for (const auto& [a, b] : s.dag.edges()) edges.push_back({names.at(a), names.at(b)});
        json rec = {{"iteration", s.iteration}, {"edges", std::move(edges)}, {"log_score", s.log_score}};
        out += rec.dump() + "\n";
    }
    json summary = {{"summary",
                     {{"samples", samples.samples.size()},
                      {"proposals", samples.proposals},
                      {"accepted", samples.accepted},
                      {"acceptance_rate", samples.acceptance_rate()},
                      {"seed", seed},
                      {"nodes", names}}}};
    out += summary.dump() + "\n";
    atomic_write(path, out);
}

sampler::PosteriorSamples read_samples(const fs::path& path, const std::vector<std::string>& names) {
    sampler::PosteriorSamples out;
    const auto lines = lines_of(read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(i + 1);
        try {
            const json rec = json::parse(lines[i]);
            if (rec.contains("summary")) {
                const auto& s = rec.at("summary");
                out.proposals = s.value("proposals", std::uint64_t{0});
                out.accepted = s.value("accepted", std::uint64_t{0});
                continue;
            }
            sampler::Sample s;
            s.iteration = rec.at("iteration").get<std::uint64_t>();
            s.log_score = rec.at("log_score").get<double>();
            s.dag = graph::Dag(static_cast<int>(names.size()));
            for (const auto& e : rec.at("edges"))
                s.dag.add_edge(name_index(names, e.at(0).get<std::string>(), where),
                               name_index(names, e.at(1).get<std::string>(), where));
            out.samples.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw IoError(where + ": " + e.what());
        } catch (const graph::GraphError& e) {
            throw IoError(where + ": " + e.what());
        }
    }
    return out;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows, std::uint64_t seed) {
    std::string out = "# seed=" + std::to_string(seed) + "\n";
    out += "scenario,beta,strategy,replicates,shd,tp,fp,fn,tpr,fr,status\n";
    for (const auto& r : rows) {
        const auto& m = r.report;
        std::string status = r.status;
        for (char& c : status)
            if (c == ',' || c == '\n') c = ';';
        out += r.scenario + "," + format_double(r.beta) + "," + r.strategy + "," + std::to_string(m.replicates) + "," +
               format_double(m.shd) + "," + format_double(m.tp) + "," + format_double(m.fp) + "," +
               format_double(m.fn) + "," + format_double(m.tpr) + "," + format_double(m.fr) + "," + status + "\n";
    }
    return out;
}

std::string curves_csv(const std::vector<theory::CurveRow>& rows, const std::string& comment) {
    std::string out = comment_line(comment) + "beta,r10,rtilde10\n";
    for (const auto& r : rows)
        out += format_double(r.beta) + "," + format_double(r.r10) + "," + format_double(r.rtilde10) + "\n";
    return out;
}

}  // namespace hbn::io
