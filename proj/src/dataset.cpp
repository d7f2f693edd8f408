#include <hbn/dataset.hpp>

#include <cmath>

namespace hbn::datagen {

Dataset::Dataset(std::vector<Column> columns, std::size_t rows)
    : m_columns(std::move(columns)), m_rows(rows), m_values(rows * m_columns.size(), 0.0) {
    for (const auto& col : m_columns)
        if (col.kind == ColumnKind::categorical && col.levels < 1)
            throw DataError("categorical column '" + col.name + "' needs at least one level");
}

std::vector<std::string> Dataset::names() const {
    std::vector<std::string> out;
    for (const auto& col : m_columns) out.push_back(col.name);
    return out;
}

int Dataset::index_of(const std::string& name) const {
    for (int c = 0; c < cols(); ++c)
        if (m_columns[c].name == name) return c;
    return -1;
}

std::vector<double> Dataset::column_values(int c) const {
    std::vector<double> out(m_rows);
    for (std::size_t r = 0; r < m_rows; ++r) out[r] = at(r, c);
    return out;
}

void Dataset::set_column(int c, Column descriptor, const std::vector<double>& values) {
    if (values.size() != m_rows) throw DataError("column length mismatch");
    m_columns[c] = std::move(descriptor);
    for (std::size_t r = 0; r < m_rows; ++r) at(r, c) = values[r];
}

bool Dataset::all_continuous() const {
    for (const auto& col : m_columns)
        if (col.kind != ColumnKind::continuous) return false;
    return true;
}

bool Dataset::all_categorical() const {
    for (const auto& col : m_columns)
        if (col.kind != ColumnKind::categorical) return false;
    return true;
}

void Dataset::validate() const {
    for (int c = 0; c < cols(); ++c) {
        const auto& col = m_columns[c];
        for (std::size_t r = 0; r < m_rows; ++r) {
            const double v = at(r, c);
            if (col.kind == ColumnKind::categorical) {
                if (v != std::floor(v) || v < 0 || v >= col.levels)
                    throw DataError("column '" + col.name + "': level code " + std::to_string(v) +
                                    " outside [0, " + std::to_string(col.levels) + ")");
            } else if (!std::isfinite(v)) {
                throw DataError("column '" + col.name + "' has a non-finite value");
            }
        }
    }
}

}  // namespace hbn::datagen
