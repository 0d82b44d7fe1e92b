#include "cdx/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cdx/calib.hpp"
#include "cdx/detect.hpp"
#include "cdx/mc.hpp"
#include "cdx/model.hpp"
#include "cdx/tables.hpp"
#include "cdx/theory.hpp"

namespace cdx::cli {

using detect::DetectorSpec;
using tables::format_number;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CDX_SEED")) {
    std::uint64_t value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument("CDX_SEED is not an integer");
    return value;
  }
  return 42;
}

struct Common {
  std::uint64_t seed = 42;
  std::uint64_t reps = 0;
  std::uint64_t max_steps = mc::kDefaultMaxSteps;
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  double v0 = 0.0;
  double v1 = 1.0;
  double sigma = 1.0;

  model::GaussianChangeSpec model() const {
    model::GaussianChangeSpec m{v0, v1, sigma};
    m.validate();
    return m;
  }

  std::string describe() const {
    std::ostringstream os;
    os << "seed=" << seed << " max_steps=" << max_steps << " v0=" << format_number(v0)
       << " v1=" << format_number(v1) << " sigma=" << format_number(sigma);
    return os.str();
  }
};

struct TestFlags {
  std::string test = "cusum";
  double c = 5.0742;
  std::string g = "const";
  double u = 0.0;
  double r = 0.0;
  std::string window = "full";
  std::optional<double> a;

  DetectorSpec build(const model::GaussianChangeSpec& m) const {
    const double mu0 = model::drift(m, m.v0);
    if (test == "cusum") return DetectorSpec::cusum(c);
    if (test == "slr") return DetectorSpec::slr(r, mu0);
    if (test == "combo") return DetectorSpec::min_combo({DetectorSpec::cusum(c), DetectorSpec::slr(r, mu0)});
    if (test == "oal") {
      limits::ControlLimit lim;
      switch (limits::parse_limit_kind(g)) {
        case limits::LimitKind::Constant: lim = limits::ControlLimit::constant(); break;
        case limits::LimitKind::GUr: lim = limits::ControlLimit::g_ur(u, r, mu0); break;
        case limits::LimitKind::GTilde: lim = limits::ControlLimit::g_tilde(u, mu0); break;
      }
      lim.mu0 = mu0;
      std::optional<std::size_t> w;
      if (a) {
        w = detect::window_from_scale(*a, c);
      } else if (window != "full") {
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(window.data(), window.data() + window.size(), value);
        if (ec != std::errc() || ptr != window.data() + window.size() || value == 0) {
          throw std::invalid_argument("--window must be a positive integer or 'full'");
        }
        w = value;
      }
      return DetectorSpec::cusum_oal(c, lim, w);
    }
    throw std::invalid_argument("unknown test '" + test + "'");
  }

  std::string describe() const {
    std::ostringstream os;
    os << "test=" << test << " c=" << format_number(c) << " g=" << g
       << " u=" << format_number(u) << " r=" << format_number(r) << " window=" << window;
    if (a) os << " a=" << format_number(*a);
    return os.str();
  }
};

void add_common(CLI::App* sub, Common& c, std::uint64_t default_reps) {
  c.reps = default_reps;
  sub->add_option("--seed", c.seed, "RNG seed (default: $CDX_SEED or 42)");
  sub->add_option("--reps", c.reps, "Monte Carlo replications")->capture_default_str();
  sub->add_option("--max-steps", c.max_steps, "censoring horizon")->capture_default_str();
  sub->add_option("--format", c.format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  sub->add_option("--out", c.out, "output path (default stdout)");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  sub->add_option("--v0", c.v0, "pre-change mean");
  sub->add_option("--v1", c.v1, "reference post-change mean");
  sub->add_option("--sigma", c.sigma, "observation standard deviation");
}

void add_test_flags(CLI::App* sub, TestFlags& t) {
  sub->add_option("--test", t.test, "cusum | oal | slr | combo")
      ->check(CLI::IsMember({"cusum", "oal", "slr", "combo"}));
  sub->add_option("--c", t.c, "threshold");
  sub->add_option("--g", t.g, "control limit: const | gur | gtilde")
      ->check(CLI::IsMember({"const", "gur", "gtilde"}));
  sub->add_option("--u", t.u, "control limit steepness");
  sub->add_option("--r", t.r, "slack (SLR, combo, or g_ur)");
  sub->add_option("--window", t.window, "sliding window length or 'full'");
  sub->add_option("--a", t.a, "window scale; window = ceil(a*c)");
}

// Writes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::vector<double> read_observations(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<double> xs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && has_header) continue;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto cell_end = line.find(',', first);
    std::string cell = line.substr(first, cell_end == std::string::npos ? std::string::npos
                                                                         : cell_end - first);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.pop_back();
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    xs.push_back(x);
  }
  if (xs.empty()) throw std::runtime_error("no observations in '" + path + "'");
  return xs;
}

std::string opt_number(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cdx: CUSUM, observation-adjusted CUSUM and SLR change detection toolkit"};
  app.require_subcommand(1);

  // Each subcommand owns its option storage so defaults do not leak between them.
  Common cal_common, sim_common, t1_common, t2_common, det_common, th_common;
  TestFlags cal_test, sim_test, det_test;
  std::uint64_t seed_default = 42;
  try {
    seed_default = default_seed();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "calibrate c (or r for slr) to a target ARL0");
  add_common(calibrate, cal_common, 200'000);
  add_test_flags(calibrate, cal_test);
  double target = 1000.0;
  double rel_tol = 0.01;
  calibrate->add_option("--target-arl0", target, "target in-control ARL");
  calibrate->add_option("--rel-tol", rel_tol, "relative tolerance on ARL0");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "estimate ARL / conditional delay of one test");
  add_common(simulate, sim_common, 100'000);
  add_test_flags(simulate, sim_test);
  double shift = 1.0;
  std::uint64_t tau = 1;
  simulate->add_option("--shift", shift, "post-change mean v");
  simulate->add_option("--tau", tau, "change-point (0 = no change)");

  // table1 / table2
  bool full = false;
  bool recal = false;
  auto* table1 = app.add_subcommand("table1", "ARL comparison at tau = 1, ARL0 ~ 1000");
  add_common(table1, t1_common, 100'000);
  table1->add_flag("--full", full, "use 1e6 replications");
  table1->add_flag("--recalibrate", recal, "calibrate every free parameter first");
  auto* table2 = app.add_subcommand("table2", "conditional delays and J_ACE, ARL0 ~ 500");
  add_common(table2, t2_common, 100'000);
  table2->add_flag("--full", full, "use 1e6 replications");
  table2->add_flag("--recalibrate", recal, "calibrate every free parameter first");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "run one detector over a CSV of observations");
  add_common(detect_cmd, det_common, 1);
  add_test_flags(detect_cmd, det_test);
  std::string input;
  bool has_header = false;
  detect_cmd->add_option("--input", input, "CSV file, one observation per row")->required();
  detect_cmd->add_flag("--has-header", has_header, "skip the first row");

  // theory
  auto* theory_cmd = app.add_subcommand("theory", "regime, theta*, b and ARL orders");
  add_common(theory_cmd, th_common, 1);
  double tv = 0.0;
  double tc = 5.0;
  std::string tg = "const";
  double tu = 0.0;
  double tr = 0.0;
  double ta = 1.0;
  theory_cmd->add_option("--v", tv, "post-change mean");
  theory_cmd->add_option("--c", tc, "threshold");
  theory_cmd->add_option("--g", tg, "const | gur | gtilde")->check(CLI::IsMember({"const", "gur", "gtilde"}));
  theory_cmd->add_option("--u", tu, "control limit steepness");
  theory_cmd->add_option("--r", tr, "g_ur slack");
  theory_cmd->add_option("--a", ta, "window scale");

  for (Common* c : {&cal_common, &sim_common, &t1_common, &t2_common, &det_common, &th_common}) {
    c->seed = seed_default;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  Common& common = calibrate->parsed()  ? cal_common
                   : simulate->parsed()  ? sim_common
                   : table1->parsed()    ? t1_common
                   : table2->parsed()    ? t2_common
                   : detect_cmd->parsed() ? det_common
                                          : th_common;
  const TestFlags& test = calibrate->parsed() ? cal_test : simulate->parsed() ? sim_test : det_test;

  try {
    const auto m = common.model();
    Sink sink(common.out, out);
    std::ostream& os = sink.get();
    mc::EngineOptions engine{common.threads};

    if (calibrate->parsed()) {
      calib::CalibrationConfig cfg;
      cfg.target_arl0 = target;
      cfg.rel_tol = rel_tol;
      cfg.reps = common.reps;
      cfg.seed = common.seed;
      cfg.max_steps = common.max_steps;
      cfg.engine = engine;
      os << "# cdx calibrate " << common.describe() << " reps=" << common.reps << " "
         << test.describe() << " target_arl0=" << format_number(target)
         << " rel_tol=" << format_number(rel_tol) << "\n";
      calib::CalibrationResult res;
      if (test.test == "slr") {
        res = calib::calibrate_slack(m, cfg);
      } else {
        TestFlags base = test;
        auto family = [base, m](double c) {
          TestFlags t = base;
          t.c = c;
          return t.build(m);
        };
        res = calib::calibrate_threshold(family, m, cfg);
      }
      os << "test,parameter,achieved_arl0,achieved_stderr,iterations,lo,hi,converged,boundary\n"
         << test.test << "," << format_number(res.parameter) << ","
         << format_number(res.achieved_arl0) << "," << format_number(res.achieved_stderr) << ","
         << res.iterations << "," << format_number(res.lo) << "," << format_number(res.hi) << ","
         << res.converged << "," << res.boundary << "\n";
      return 0;
    }

    if (simulate->parsed()) {
      const auto spec = test.build(m);
      os << "# cdx simulate " << common.describe() << " reps=" << common.reps << " "
         << test.describe() << " shift=" << format_number(shift) << " tau=" << tau << "\n";
      mc::Scenario sc{tau, shift, common.reps, common.seed, common.max_steps};
      const auto summary = tau == 0 ? mc::estimate_arl(spec, m, sc, engine)
                                    : mc::conditional_delay(spec, m, sc, engine);
      os << tables::kCsvHeader << "\n"
         << tables::csv_row(spec.label(), spec, shift, std::to_string(tau), common.reps, summary)
         << "\n";
      return 0;
    }

    if (table1->parsed() || table2->parsed()) {
      tables::TableConfig cfg;
      cfg.reps = full ? 1'000'000 : common.reps;
      if (cfg.reps < 10'000) throw std::invalid_argument("tables need --reps >= 10000");
      cfg.seed = common.seed;
      cfg.max_steps = common.max_steps;
      cfg.format = common.format == "md" ? tables::Format::Markdown : tables::Format::Csv;
      cfg.recalibrate = recal;
      cfg.model = m;
      cfg.engine = engine;
      if (table1->parsed()) tables::write_table1(cfg, os); else tables::write_table2(cfg, os);
      os.flush();
      if (!os) throw std::runtime_error("write failed");
      return 0;
    }

    if (detect_cmd->parsed()) {
      const auto spec = test.build(m);
      const auto xs = read_observations(input, has_header);
      os << "# cdx detect " << common.describe() << " " << test.describe() << " input=" << input
         << " has_header=" << has_header << "\n";
      detect::Detector det(spec);
      for (double x : xs) {
        if (auto hit = det.step(model::llr_transform(m, x))) {
          os << *hit << "\n";
          return kExitAlarm;
        }
      }
      os << "NONE\n";
      return kExitNoAlarm;
    }

    if (theory_cmd->parsed()) {
      const double mu0 = model::drift(m, m.v0);
      limits::ControlLimit g;
      switch (limits::parse_limit_kind(tg)) {
        case limits::LimitKind::Constant: g = limits::ControlLimit::constant(); break;
        case limits::LimitKind::GUr: g = limits::ControlLimit::g_ur(tu, tr, mu0); break;
        case limits::LimitKind::GTilde: g = limits::ControlLimit::g_tilde(tu, mu0); break;
      }
      g.mu0 = mu0;
      os << "# cdx theory " << common.describe() << " v=" << format_number(tv)
         << " c=" << format_number(tc) << " g=" << tg << " u=" << format_number(tu)
         << " r=" << format_number(tr) << " a=" << format_number(ta) << "\n";
      const auto regime = model::classify_regime(m, tv);
      std::optional<double> theta_star, theta0, rate, b;
      std::string window_ok;
      if (regime == model::Regime::VMinus) {
        theory::ThetaCurve curve(m, tv, g, ta);
        theta_star = curve.solution().theta_star;
        rate = curve.solution().rate;
        window_ok = curve.solution().window_ok ? "1" : "0";
        theta0 = theory::theta_zero(m, tv);
        b = curve.find_b();
      }
      const auto approx = theory::arl_approx(m, tv, tc, g, ta);
      os << "regime,drift,theta_star,theta_zero,u,b,window_ok,lower,upper,point\n"
         << model::to_string(regime) << "," << format_number(model::drift(m, tv)) << ","
         << opt_number(theta_star) << "," << opt_number(theta0) << "," << opt_number(rate) << ","
         << opt_number(b) << "," << window_ok << "," << format_number(approx.lower) << ","
         << format_number(approx.upper) << "," << opt_number(approx.point) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace cdx::cli
