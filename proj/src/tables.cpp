#include "cdx/tables.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#include "cdx/calib.hpp"

namespace cdx::tables {

using detect::DetectorKind;
using detect::DetectorSpec;
using limits::ControlLimit;

namespace {

std::string fixed(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

const DetectorSpec* first_of(const DetectorSpec& spec, DetectorKind kind) {
  if (spec.kind == kind) return &spec;
  for (const auto& part : spec.components) {
    if (const auto* hit = first_of(part, kind)) return hit;
  }
  return nullptr;
}

std::string md_cell(const mc::RunLengthSummary& s) {
  std::string mean = fixed(s.mean, 2);
  if (s.lower_bound()) mean = ">=" + mean + "*";
  return mean + " (" + fixed(s.sd, 2) + ")";
}

std::string param_text(const TableTest& t) {
  const auto& s = t.spec;
  switch (s.kind) {
    case DetectorKind::Cusum: return "c=" + format_number(s.c);
    case DetectorKind::CusumOal: return "u=" + format_number(s.g.u) + ", c=" + format_number(s.c);
    case DetectorKind::Slr: return "r=" + format_number(s.r);
    case DetectorKind::MinCombo: {
      const auto* cu = first_of(s, DetectorKind::Cusum);
      const auto* sl = first_of(s, DetectorKind::Slr);
      return "c=" + format_number(cu ? cu->c : 0.0) + ", r=" + format_number(sl ? sl->r : 0.0);
    }
  }
  return "";
}

void write_config_line(const char* which, const TableConfig& cfg, std::ostream& out) {
  const bool md = cfg.format == Format::Markdown;
  out << (md ? "<!-- " : "# ") << "cdx " << which << " seed=" << cfg.seed
      << " reps=" << cfg.reps << " max_steps=" << cfg.max_steps
      << " v0=" << format_number(cfg.model.v0) << " v1=" << format_number(cfg.model.v1)
      << " sigma=" << format_number(cfg.model.sigma) << " recalibrate=" << cfg.recalibrate;
  if (cfg.recalibrate) {
    out << " calibration_reps=" << cfg.calibration_reps
        << " calibration_rel_tol=" << format_number(cfg.calibration_rel_tol);
  }
  out << " format=" << (md ? "md" : "csv") << (md ? " -->" : "") << "\n";
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<TableTest> table1_tests(const model::GaussianChangeSpec& model) {
  const double mu0 = model::drift(model, model.v0);
  std::vector<TableTest> tests;
  tests.push_back({"T_C(c)", DetectorSpec::cusum(5.0742), FreeParameter::Threshold});
  const std::pair<double, double> ladder[] = {
      {1.0, 5.6125}, {10.0, 7.7790}, {100.0, 9.97}, {1000.0, 11.38}, {10000.0, 11.84}};
  for (auto [u, c] : ladder) {
    tests.push_back({"T_C(c*gtilde_" + format_number(u) + ")",
                     DetectorSpec::cusum_oal(c, ControlLimit::g_tilde(u, mu0)),
                     FreeParameter::Threshold});
  }
  tests.push_back({"T*(r)", DetectorSpec::slr(0.0007, mu0), FreeParameter::Slack});
  tests.push_back({"T_C(c)^T*(0)",
                   DetectorSpec::min_combo({DetectorSpec::cusum(11.9271), DetectorSpec::slr(0.0, mu0)}),
                   FreeParameter::Threshold});
  tests.push_back({"T*(0)", DetectorSpec::slr(0.0, mu0), FreeParameter::None});
  return tests;
}

std::vector<TableTest> table2_tests(const model::GaussianChangeSpec& model) {
  const double mu0 = model::drift(model, model.v0);
  return {
      {"T_C(c)", DetectorSpec::cusum(4.3867), FreeParameter::Threshold},
      {"T_C(c*gtilde_100)", DetectorSpec::cusum_oal(6.5839, ControlLimit::g_tilde(100.0, mu0)),
       FreeParameter::Threshold},
      {"T*(r)", DetectorSpec::slr(0.00137, mu0), FreeParameter::Slack},
      {"T_C(c)^T*(0)",
       DetectorSpec::min_combo({DetectorSpec::cusum(10.4889), DetectorSpec::slr(0.0, mu0)}),
       FreeParameter::Threshold},
      {"T*(0)", DetectorSpec::slr(0.0, mu0), FreeParameter::None},
  };
}

std::string csv_row(const std::string& name, const DetectorSpec& spec, double shift,
                    const std::string& tau, std::uint64_t reps, const mc::RunLengthSummary& s) {
  std::string u, r, c, window;
  switch (spec.kind) {
    case DetectorKind::Cusum: c = format_number(spec.c); break;
    case DetectorKind::CusumOal:
      c = format_number(spec.c);
      u = format_number(spec.g.u);
      if (spec.g.kind == limits::LimitKind::GUr) r = format_number(spec.g.r);
      window = spec.window ? std::to_string(*spec.window) : "full";
      break;
    case DetectorKind::Slr: r = format_number(spec.r); break;
    case DetectorKind::MinCombo:
      if (const auto* cu = first_of(spec, DetectorKind::Cusum)) c = format_number(cu->c);
      if (const auto* sl = first_of(spec, DetectorKind::Slr)) r = format_number(sl->r);
      break;
  }
  std::string kind = detect::to_string(spec.kind);
  if (spec.kind == DetectorKind::CusumOal) kind += std::string("-") + limits::to_string(spec.g.kind);
  return name + "," + kind + "," + u + "," + r + "," + c + "," + window + "," +
         format_number(shift) + "," + tau + "," + std::to_string(reps) + "," +
         fixed(s.mean, 6) + "," + fixed(s.sd, 6) + "," + fixed(s.std_error, 6) + "," +
         std::to_string(s.censored) + "," + std::to_string(s.conditional_kept);
}

void recalibrate(std::vector<TableTest>& tests, double target_arl0, const TableConfig& config) {
  calib::CalibrationConfig cc;
  cc.target_arl0 = target_arl0;
  cc.rel_tol = config.calibration_rel_tol;
  cc.reps = config.calibration_reps;
  cc.seed = config.seed;
  cc.max_steps = config.max_steps;
  cc.engine = config.engine;
  for (auto& t : tests) {
    switch (t.free) {
      case FreeParameter::None: break;
      case FreeParameter::Slack:
        t.spec.r = calib::calibrate_slack(config.model, cc).parameter;
        break;
      case FreeParameter::Threshold: {
        DetectorSpec base = t.spec;
        auto family = [base](double c) {
          DetectorSpec s = base;
          if (s.kind == DetectorKind::MinCombo) {
            for (auto& part : s.components) {
              if (part.kind == DetectorKind::Cusum) part.c = c;
            }
          } else {
            s.c = c;
          }
          return s;
        };
        t.spec = family(calib::calibrate_threshold(family, config.model, cc).parameter);
        break;
      }
    }
  }
}

void write_table1(const TableConfig& config, std::ostream& out) {
  auto tests = table1_tests(config.model);
  if (config.recalibrate) recalibrate(tests, 1000.0, config);
  write_config_line("table1", config, out);

  // One row per test; every cell uses the same replication seeds.
  const std::vector<std::uint64_t> taus{1};
  std::vector<std::vector<mc::RunLengthSummary>> cells;
  for (const auto& t : tests) {
    auto grid = mc::compare_grid(std::span(&t.spec, 1), config.model, kTable1Shifts, taus,
                                 {config.reps, config.seed, config.max_steps}, config.engine);
    std::vector<mc::RunLengthSummary> row;
    for (const auto& cell : grid) row.push_back(cell.summary);
    cells.push_back(std::move(row));
  }

  if (config.format == Format::Csv) {
    out << kCsvHeader << "\n";
    for (std::size_t i = 0; i < tests.size(); ++i) {
      for (std::size_t j = 0; j < kTable1Shifts.size(); ++j) {
        out << csv_row(tests[i].name, tests[i].spec, kTable1Shifts[j], "1", config.reps,
                        cells[i][j]) << "\n";
      }
    }
    return;
  }
  out << "| test | parameters |";
  for (double s : kTable1Shifts) out << " " << fixed(s, 2) << " |";
  out << "\n|---|---|";
  for (std::size_t j = 0; j < kTable1Shifts.size(); ++j) out << "---|";
  out << "\n";
  for (std::size_t i = 0; i < tests.size(); ++i) {
    out << "| " << tests[i].name << " | " << param_text(tests[i]) << " |";
    for (const auto& s : cells[i]) out << " " << md_cell(s) << " |";
    out << "\n";
  }
  out << "\nARL (SD) at tau = 1; * = censored at the horizon, mean is a lower bound.\n";
}

void write_table2(const TableConfig& config, std::ostream& out) {
  auto tests = table2_tests(config.model);
  if (config.recalibrate) recalibrate(tests, 500.0, config);
  write_config_line("table2", config, out);

  struct Row {
    mc::RunLengthSummary in_control;
    std::map<double, mc::JAceResult> by_shift;
  };
  std::vector<Row> rows;
  for (const auto& t : tests) {
    Row row;
    auto grid = mc::compare_grid(std::span(&t.spec, 1), config.model,
                                 std::vector<double>{config.model.v0},
                                 std::vector<std::uint64_t>{0},
                                 {config.reps, config.seed, config.max_steps}, config.engine);
    row.in_control = grid.front().summary;
    for (double v : kTable2Shifts) {
      mc::Scenario base{1, v, config.reps, config.seed, config.max_steps};
      row.by_shift[v] = mc::j_ace(t.spec, config.model, kTable2Taus, base, config.engine);
    }
    rows.push_back(std::move(row));
  }

  if (config.format == Format::Csv) {
    out << kCsvHeader << "\n";
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto& t = tests[i];
      out << csv_row(t.name, t.spec, config.model.v0, "0", config.reps, rows[i].in_control) << "\n";
      for (double v : kTable2Shifts) {
        const auto& ja = rows[i].by_shift.at(v);
        for (std::size_t k = 0; k < kTable2Taus.size(); ++k) {
          out << csv_row(t.name, t.spec, v, std::to_string(kTable2Taus[k]), config.reps,
                         ja.delays[k]) << "\n";
        }
        mc::RunLengthSummary jrow;
        jrow.mean = ja.value;
        jrow.conditional_kept = 0;
        for (const auto& d : ja.delays) jrow.conditional_kept += d.conditional_kept;
        out << csv_row(t.name, t.spec, v, "jace", config.reps, jrow) << "\n";
      }
    }
    return;
  }
  out << "| test | parameters | v | tau=0 |";
  for (auto tau : kTable2Taus) out << " tau=" << tau << " |";
  out << " J_ACE |\n|---|---|---|---|";
  for (std::size_t k = 0; k < kTable2Taus.size(); ++k) out << "---|";
  out << "---|\n";
  for (std::size_t i = 0; i < tests.size(); ++i) {
    for (double v : kTable2Shifts) {
      const auto& ja = rows[i].by_shift.at(v);
      out << "| " << tests[i].name << " | " << param_text(tests[i]) << " | " << format_number(v)
          << " | " << md_cell(rows[i].in_control) << " |";
      for (const auto& d : ja.delays) out << " " << md_cell(d) << " |";
      out << " " << fixed(ja.value, 2) << " |\n";
    }
  }
  out << "\nConditional delay E(T - tau + 1 | T >= tau) (SD); tau = 0 is the in-control ARL;"
         " * = censored at the horizon, mean is a lower bound.\n";
}

}  // namespace cdx::tables
