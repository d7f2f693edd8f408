#ifndef HBN_DATASET_HPP
#define HBN_DATASET_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbn::datagen {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ColumnKind { continuous, categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    int levels = 0;  // categorical only

    bool operator==(const Column&) const = default;
};

// Column-typed data matrix. Values are stored row-major as doubles; categorical cells hold
// integer level codes in [0, levels).
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Column> columns, std::size_t rows);

    std::size_t rows() const { return m_rows; }
    int cols() const { return static_cast<int>(m_columns.size()); }

    const std::vector<Column>& columns() const { return m_columns; }
    const Column& column(int c) const { return m_columns[c]; }
    std::vector<std::string> names() const;
    int index_of(const std::string& name) const;  // -1 when absent

    double at(std::size_t r, int c) const { return m_values[r * m_columns.size() + c]; }
    double& at(std::size_t r, int c) { return m_values[r * m_columns.size() + c]; }
    int code(std::size_t r, int c) const { return static_cast<int>(at(r, c)); }

    std::vector<double> column_values(int c) const;
    void set_column(int c, Column descriptor, const std::vector<double>& values);

    bool all_continuous() const;
    bool all_categorical() const;

    // Throws DataError when a categorical cell is not an integer code in range.
    void validate() const;

    bool operator==(const Dataset&) const = default;

private:
    std::vector<Column> m_columns;
    std::size_t m_rows = 0;
    std::vector<double> m_values;
};

}  // namespace hbn::datagen

#endif  // HBN_DATASET_HPP
