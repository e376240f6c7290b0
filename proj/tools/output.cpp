#include "output.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "condent/errors.hpp"
#include "condent/format.hpp"

namespace condent::cli {

std::string to_string(Units u) { return u == Units::bits ? "bits" : "nats"; }

double info(double nats, Units u) { return u == Units::bits ? nats / std::log(2.0) : nats; }

namespace {

double convert(double v, Kind k, Units u) { return k == Kind::info ? info(v, u) : v; }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void flatten(const std::string& key, const Json& j, std::string& out) {
    if (j.is_object() && j.contains("value") && j.contains("abs_error")) {
        out += csv_escape(key) + "," + shortest(j["value"].get<double>()) + "," + shortest(j["abs_error"].get<double>()) +
               "," + (j.contains("method") ? j["method"].get<std::string>() : std::string()) + "\n";
    } else if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(key.empty() ? k : key + "." + k, v, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(key + "[" + std::to_string(i) + "]", j[i], out);
    } else if (j.is_number_float()) {
        out += csv_escape(key) + "," + shortest(j.get<double>()) + ",,\n";
    } else if (j.is_null()) {
        out += csv_escape(key) + ",,,\n";
    } else {
        out += csv_escape(key) + "," + csv_escape(j.is_string() ? j.get<std::string>() : j.dump()) + ",,\n";
    }
}

}  // namespace

void Table::col(std::string name, Kind kind) { cols_.push_back({std::move(name), kind}); }

void Table::est(const std::string& name, Kind kind) {
    col(name, kind);
    col(name + "_abs_error", kind);
}

Table& Table::add(Cell c) {
    cur_.push_back(std::move(c));
    return *this;
}

Table& Table::add(std::optional<double> v) { return add(v ? Cell(*v) : Cell()); }

Table& Table::add(const EstimateWithError& e) {
    add(Cell(e.value));
    return add(Cell(e.abs_error));
}

Table& Table::add(std::optional<double> v, std::optional<double> err) {
    add(v);
    return add(v ? err : std::nullopt);
}

void Table::end_row() {
    if (cur_.size() != cols_.size())
        throw std::logic_error("table row has " + std::to_string(cur_.size()) + " cells for " +
                               std::to_string(cols_.size()) + " columns");
    rows_.push_back(std::move(cur_));
    cur_.clear();
}

std::string Table::csv(Units u) const {
    std::string out;
    for (std::size_t i = 0; i < cols_.size(); ++i) out += (i ? "," : "") + cols_[i].name;
    out += "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ",";
            if (const auto* d = std::get_if<double>(&r[i])) out += shortest(convert(*d, cols_[i].kind, u));
            if (const auto* s = std::get_if<std::string>(&r[i])) out += csv_escape(*s);
        }
        out += "\n";
    }
    return out;
}

Json Table::json(Units u) const {
    Json arr = Json::array();
    for (const auto& r : rows_) {
        Json o = Json::object();
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (const auto* d = std::get_if<double>(&r[i]))
                o[cols_[i].name] = convert(*d, cols_[i].kind, u);
            else if (const auto* s = std::get_if<std::string>(&r[i]))
                o[cols_[i].name] = *s;
            else
                o[cols_[i].name] = nullptr;
        }
        arr.push_back(std::move(o));
    }
    return arr;
}

Json estimate(const EstimateWithError& e, Kind kind, Units u) {
    Json j;
    j["value"] = convert(e.value, kind, u);
    j["abs_error"] = convert(e.abs_error, kind, u);
    j["method"] = std::string(to_string(e.method));
    return j;
}

std::string record_csv(const Json& record) {
    std::string out = "quantity,value,abs_error,method\n";
    flatten("", record, out);
    return out;
}

Json record_header(const std::string& command, Units u) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["units"] = to_string(u);
    return j;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw ParameterError("failed writing output file '" + path + "'");
}

}  // namespace condent::cli
