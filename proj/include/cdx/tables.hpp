#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdx/detect.hpp"
#include "cdx/mc.hpp"
#include "cdx/model.hpp"

namespace cdx::tables {

/// Which parameter a recalibration pass is allowed to move.
enum class FreeParameter { Threshold, Slack, None };

struct TableTest {
  std::string name;
  detect::DetectorSpec spec;
  FreeParameter free = FreeParameter::None;
};

/// Reference comparison line-ups with their fixed constants.
std::vector<TableTest> table1_tests(const model::GaussianChangeSpec& model);
std::vector<TableTest> table2_tests(const model::GaussianChangeSpec& model);

inline const std::vector<double> kTable1Shifts{0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 3.0};
inline const std::vector<double> kTable2Shifts{0.1, 1.0};
inline const std::vector<std::uint64_t> kTable2Taus{1, 10, 50, 100, 150, 200};

enum class Format { Csv, Markdown };

struct TableConfig {
  std::uint64_t reps = 100'000;
  std::uint64_t seed = 42;
  std::uint64_t max_steps = mc::kDefaultMaxSteps;
  Format format = Format::Csv;
  bool recalibrate = false;
  std::uint64_t calibration_reps = 200'000;
  double calibration_rel_tol = 0.01;
  model::GaussianChangeSpec model;
  mc::EngineOptions engine;
};

/// CSV column list shared by simulate, table1 and table2.
inline constexpr const char* kCsvHeader =
    "test,kind,u,r,c,window,shift,tau,reps,mean,sd,stderr,censored,conditional_kept";

std::string csv_row(const std::string& name, const detect::DetectorSpec& spec, double shift,
                    const std::string& tau, std::uint64_t reps,
                    const mc::RunLengthSummary& s);

/// Replaces the free parameter of each test with one calibrated to target_arl0.
void recalibrate(std::vector<TableTest>& tests, double target_arl0, const TableConfig& config);

void write_table1(const TableConfig& config, std::ostream& out);
void write_table2(const TableConfig& config, std::ostream& out);

std::string format_number(double x);

}  // namespace cdx::tables
