#pragma once
// Output plumbing for the CLI: unit conversion, CSV tables and JSON records.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "condent/estimate.hpp"

namespace condent::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

enum class Units { nats, bits };

std::string to_string(Units u);
// Entropies, rates and log quantities are converted; variances are not.
double info(double nats, Units u);

enum class Kind { text, plain, info };

// CSV-shaped result. Numeric columns added with est() get a <name>_abs_error sibling.
class Table {
public:
    using Cell = std::variant<std::monostate, double, std::string>;

    void col(std::string name, Kind kind);
    void est(const std::string& name, Kind kind);

    Table& add(Cell c);
    Table& add(double v) { return add(Cell(v)); }
    Table& add(std::optional<double> v);
    Table& add(const EstimateWithError& e);
    // value and error as two cells; both empty when absent
    Table& add(std::optional<double> v, std::optional<double> err);
    void end_row();

    std::size_t rows() const { return rows_.size(); }
    std::string csv(Units u) const;
    Json json(Units u) const;

private:
    struct Column {
        std::string name;
        Kind kind;
    };
    std::vector<Column> cols_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<Cell> cur_;
};

// {"value", "abs_error", "method"} in the requested units
Json estimate(const EstimateWithError& e, Kind kind, Units u);

// quantity,value,abs_error,method lines for a flat JSON record
std::string record_csv(const Json& record);

// Header fields shared by every JSON record.
Json record_header(const std::string& command, Units u);

// Writes to path, or stdout when path is empty or "-".
void emit(const std::string& text, const std::string& path);

}  // namespace condent::cli
