#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace coxsvrg {

// Right-censored survival sample: one covariate row per patient, an observed
// time, and an event flag (1 = failure observed, 0 = censored). Immutable
// after construction; safe to share across threads.
class SurvivalDataset {
 public:
  // features is row-major with n_features columns. Throws std::invalid_argument
  // unless all times are finite and > 0, all features are finite, every event
  // flag is 0 or 1, and at least one event is present.
  SurvivalDataset(std::vector<double> features, std::size_t n_features,
                  std::vector<double> times, std::vector<std::uint8_t> events,
                  std::vector<std::string> feature_names = {});

  std::size_t n_patients() const { return times_.size(); }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_events() const { return n_events_; }

  std::span<const double> row(std::size_t patient) const {
    return {features_.data() + patient * n_features_, n_features_};
  }
  double time(std::size_t patient) const { return times_[patient]; }
  bool event(std::size_t patient) const { return events_[patient] != 0; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::uint8_t>& events() const { return events_; }
  const std::vector<double>& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

 private:
  std::vector<double> features_;
  std::size_t n_features_ = 0;
  std::vector<double> times_;
  std::vector<std::uint8_t> events_;
  std::vector<std::string> feature_names_;
  std::size_t n_events_ = 0;
};

// CSV with header `time,event,<feature columns...>`. Accepts LF and CRLF.
// Values round-trip exactly (doubles are written with 17 significant digits).
SurvivalDataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const SurvivalDataset& data, const std::filesystem::path& path);

}  // namespace coxsvrg
