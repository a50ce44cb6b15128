#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stringvec {

struct Column {
    std::string header;
    std::vector<std::string> values;
};

/// In-memory delimited table. Immutable after load; every column holds
/// n_rows cells and headers are unique.
struct Table {
    std::string name;
    std::vector<Column> columns;
    std::size_t n_rows = 0;

    const Column* find(std::string_view header) const noexcept;
    int column_index(std::string_view header) const noexcept;  // -1 when absent

    Table select_rows(const std::vector<int>& rows) const;
    Table drop_column(std::string_view header) const;
};

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RFC-4180 parse: quoted fields, doubled quotes, embedded delimiters and
/// newlines, CRLF or LF row ends. Ragged rows and duplicate headers are
/// rejected; empty cells are preserved as empty strings.
Table parse_csv(std::string_view text, char delimiter = ',', bool has_header = true,
                std::string name = {});

Table load_csv(const std::string& path, char delimiter = ',', bool has_header = true);

std::string csv_to_string(const Table& table, char delimiter = ',');

void write_csv(const Table& table, const std::string& path, char delimiter = ',');

enum class ColumnKind { Numeric, Datetime, LowCardCategorical, MidCardCategorical, Text };

const char* column_kind_name(ColumnKind k) noexcept;

/// Finite-number parse of a cell; full-cell match required, surrounding
/// whitespace tolerated.
std::optional<double> parse_number(std::string_view cell);

struct DateTimeParts {
    int year = 0;
    int month = 0;    // 1-12
    int day = 0;      // 1-31
    int weekday = 0;  // 0 = Monday
    int hour = 0;     // 0-23, 0 for date-only
};

/// Accepts ISO-style dates: YYYY-MM-DD or YYYY/MM/DD with an optional
/// "T"/" " time part HH:MM[:SS[.frac]][Z].
std::optional<DateTimeParts> parse_datetime(std::string_view cell);

/// Kind of a single column: Numeric if >= 99% of non-empty cells parse as
/// finite numbers, else Datetime under the same rule, else by the distinct
/// count d of non-empty values: d <= 10 low card, 10 < d <= 30 mid card,
/// d > 30 text.
ColumnKind infer_kind(const std::vector<std::string>& values);

std::vector<std::pair<std::string, ColumnKind>> infer_column_kinds(const Table& table);

struct SupervisedDataset {
    Table features;
    std::vector<int> labels;                 // 0/1, balanced
    std::vector<std::string> group_keys;     // empty when ungrouped
    std::vector<int> source_rows;            // retained row indices in the input
};

/// Turns a target column into balanced binary labels. Continuous targets are
/// split at the median (ties to class 0); binary categorical targets are kept
/// with the lexicographically smaller value as class 0. The majority class is
/// downsampled without replacement under the seed. Rows with an empty target
/// cell are dropped.
SupervisedDataset binarize_and_balance(const Table& table, const std::string& target_header,
                                       std::uint64_t seed,
                                       const std::string& group_header = {},
                                       bool drop_group_from_features = false);

} // namespace stringvec
