#include "coxsvrg/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coxsvrg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

double parse_double(const std::string& cell, std::size_t line_no, const char* what) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail("dataset csv line " + std::to_string(line_no) + ": bad " + what + " value '" +
         cell + "'");
  }
  return value;
}

void format_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

SurvivalDataset::SurvivalDataset(std::vector<double> features, std::size_t n_features,
                                 std::vector<double> times,
                                 std::vector<std::uint8_t> events,
                                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      n_features_(n_features),
      times_(std::move(times)),
      events_(std::move(events)),
      feature_names_(std::move(feature_names)) {
  const std::size_t n = times_.size();
  if (n == 0) fail("dataset: no patients");
  if (n_features_ == 0) fail("dataset: no feature columns");
  if (events_.size() != n) fail("dataset: times and events disagree in length");
  if (features_.size() != n * n_features_) fail("dataset: feature matrix size mismatch");
  if (!feature_names_.empty() && feature_names_.size() != n_features_)
    fail("dataset: feature name count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(times_[i]) || times_[i] <= 0.0)
      fail("dataset: observed times must be finite and > 0 (patient " +
           std::to_string(i) + ")");
    if (events_[i] > 1)
      fail("dataset: event flags must be 0 or 1 (patient " + std::to_string(i) + ")");
  }
  for (double x : features_)
    if (!std::isfinite(x)) fail("dataset: features must be finite");
  for (std::uint8_t e : events_) n_events_ += e;
  if (n_events_ == 0) fail("dataset: at least one event is required");
}

SurvivalDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open dataset csv: " + path.string());

  std::string line;
  if (!std::getline(in, line)) fail("dataset csv is empty: " + path.string());
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "time" || header[1] != "event")
    fail("dataset csv header must start with 'time,event' followed by feature columns");
  const std::size_t d = header.size() - 2;
  std::vector<std::string> names(header.begin() + 2, header.end());

  std::vector<double> features;
  std::vector<double> times;
  std::vector<std::uint8_t> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != d + 2)
      fail("dataset csv line " + std::to_string(line_no) + ": expected " +
           std::to_string(d + 2) + " columns, got " + std::to_string(cells.size()));
    times.push_back(parse_double(cells[0], line_no, "time"));
    const double ev = parse_double(cells[1], line_no, "event");
    if (ev != 0.0 && ev != 1.0)
      fail("dataset csv line " + std::to_string(line_no) + ": event must be 0 or 1");
    events.push_back(static_cast<std::uint8_t>(ev));
    for (std::size_t j = 0; j < d; ++j)
      features.push_back(parse_double(cells[2 + j], line_no, "feature"));
  }
  return SurvivalDataset(std::move(features), d, std::move(times), std::move(events),
                         std::move(names));
}

void write_dataset_csv(const SurvivalDataset& data, const std::filesystem::path& path) {
  std::string out = "time,event";
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    out += ',';
    if (!data.feature_names().empty()) {
      out += data.feature_names()[j];
    } else {
      out += 'x';
      out += std::to_string(j + 1);
    }
  }
  out += '\n';
  for (std::size_t i = 0; i < data.n_patients(); ++i) {
    format_double(out, data.time(i));
    out += ',';
    out += data.event(i) ? '1' : '0';
    for (double x : data.row(i)) {
      out += ',';
      format_double(out, x);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("cannot write dataset csv: " + path.string());
  f << out;
}

}  // namespace coxsvrg
