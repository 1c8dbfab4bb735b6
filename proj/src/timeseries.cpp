#include "predmdp/envs.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace predmdp {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delimiter)) fields.push_back(field);
    if (!line.empty() && line.back() == delimiter) fields.push_back("");
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    if (begin == end) return false;
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc{} && result.ptr == end;
}

}  // namespace

IngestReport ingest_timeseries(const std::string& path, const IngestFormat& format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open time series file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("time series file is empty: " + path);

    const auto header = split_line(line, format.delimiter);
    int col_ts = -1, col_actual = -1, col_forecast = -1, col_price = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name = header[i];
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
        if (name == "timestamp") col_ts = static_cast<int>(i);
        else if (name == "actual_wind") col_actual = static_cast<int>(i);
        else if (name == "forecast_wind") col_forecast = static_cast<int>(i);
        else if (name == "price") col_price = static_cast<int>(i);
    }
    if (col_ts < 0 || col_actual < 0 || col_forecast < 0 || col_price < 0)
        throw std::runtime_error(
            "missing required columns (timestamp, actual_wind, forecast_wind, price) in " + path);

    IngestReport report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_line(line, format.delimiter);
        const int needed = std::max({col_ts, col_actual, col_forecast, col_price});
        double ts, actual, forecast, price;
        const bool ok = static_cast<int>(fields.size()) > needed &&
                        parse_double(fields[col_ts], ts) &&
                        parse_double(fields[col_actual], actual) &&
                        parse_double(fields[col_forecast], forecast) &&
                        parse_double(fields[col_price], price);
        if (!ok) {
            if (format.lenient) {
                report.excluded.push_back("line " + std::to_string(line_no) +
                                          ": unparseable row");
                continue;
            }
            throw std::runtime_error("unparseable row at line " + std::to_string(line_no) +
                                     " of " + path);
        }
        if (!report.dataset.timestamp.empty() && ts <= report.dataset.timestamp.back())
            throw std::runtime_error("timestamps not strictly increasing at line " +
                                     std::to_string(line_no) + " of " + path);
        report.dataset.timestamp.push_back(ts);
        report.dataset.actual_wind.push_back(actual);
        report.dataset.forecast_wind.push_back(forecast);
        report.dataset.price.push_back(price);
    }
    return report;
}

void write_timeseries(const std::string& path, const TimeSeriesDataset& dataset,
                      char delimiter) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write time series file: " + path);
    out << "timestamp" << delimiter << "actual_wind" << delimiter << "forecast_wind" << delimiter
        << "price\n";
    char buf[128];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g%c%.12g%c%.12g%c%.12g\n", dataset.timestamp[i],
                      delimiter, dataset.actual_wind[i], delimiter, dataset.forecast_wind[i],
                      delimiter, dataset.price[i]);
        out << buf;
    }
}

TimeSeriesDataset generate_synthetic_timeseries(std::size_t rows, std::uint64_t seed) {
    if (rows == 0) throw std::invalid_argument("need at least one row");
    Rng rng(derive_seed(seed, "synthetic-timeseries"));

    TimeSeriesDataset dataset;
    dataset.timestamp.reserve(rows);
    dataset.actual_wind.reserve(rows);
    dataset.forecast_wind.reserve(rows);
    dataset.price.reserve(rows);

    // 5-minute resolution; wind follows a persistent AR(1) around a slow
    // diurnal swing, forecasts track wind with a noisy lag, prices mix a
    // daily cycle with AR noise.
    const double two_pi = 2.0 * M_PI;
    const std::size_t steps_per_day = 288;
    double wind_dev = 0.0;
    double price_dev = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const double phase = two_pi * static_cast<double>(i % steps_per_day) / steps_per_day;
        wind_dev = 0.95 * wind_dev + 0.6 * rng.normal();
        const double wind = std::max(0.0, 8.0 + 3.0 * std::sin(phase) + wind_dev);
        const double forecast = std::max(0.0, wind - 0.8 * wind_dev + 0.5 * rng.normal());
        price_dev = 0.9 * price_dev + 0.8 * rng.normal();
        const double price = std::max(0.5, 30.0 + 10.0 * std::sin(phase + 1.0) + price_dev);

        dataset.timestamp.push_back(300.0 * static_cast<double>(i));
        dataset.actual_wind.push_back(wind);
        dataset.forecast_wind.push_back(forecast);
        dataset.price.push_back(price);
    }
    return dataset;
}

}  // namespace predmdp
