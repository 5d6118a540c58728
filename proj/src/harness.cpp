#include "invopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace invopt {

SimplexSpec ExperimentConfig::simplex() const {
  return SimplexSpec{d, family == Family::Scheduling ? kSchedulingShift : 0.0};
}

void ExperimentConfig::validate() const {
  if (family == Family::PointSet) {
    throw std::invalid_argument("experiments support the lp and scheduling families");
  }
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (K < 1) throw std::invalid_argument("iterations must be >= 1");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (methods.empty()) throw std::invalid_argument("no methods selected");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& m = methods[i];
    if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end()) {
      throw std::invalid_argument("unknown method '" + m + "'");
    }
    if (std::find(methods.begin(), methods.begin() + static_cast<std::ptrdiff_t>(i), m) !=
        methods.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw std::invalid_argument("method '" + m + "' listed twice");
    }
    if (m == "chan" && family != Family::Lp) {
      throw std::invalid_argument("CHAN requires LP family");
    }
  }
  if (family == Family::Lp) {
    if (J < 1) throw std::invalid_argument("J must be >= 1");
    if (!(r_max > 1.0)) throw std::invalid_argument("r_max must be > 1");
  } else {
    if (d > 10) throw std::invalid_argument("scheduling supports d <= 10");
    if (d > 6 && !allow_large) {
      throw std::invalid_argument("scheduling with d > 6 requires --allow-large");
    }
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

LpInstance gen_lp_instance(std::size_t d, std::size_t J, double r_max,
                           Rng& rng) {
  if (d < 2 || J < 1 || !(r_max > 1.0)) {
    throw std::invalid_argument("gen_lp_instance: need d >= 2, J >= 1, r_max > 1");
  }
  // log_{0.1} r_i ~ U[0, log_{0.1}(1/r_max)], i.e. r_i in [1/r_max, 1].
  const double upper = std::log(1.0 / r_max) / std::log(0.1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> r(d);
  for (double& ri : r) ri = std::pow(0.1, upper * unit(rng));

  std::vector<std::vector<double>> B(J, std::vector<double>(d));
  for (auto& row : B) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        row[i] = unit(rng);
        norm2 += r[i] * r[i] * row[i] * row[i];
      }
    } while (!(norm2 > 0.0));
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& b : row) b *= scale;
  }
  return LpInstance(std::move(r), std::move(B));
}

SchedulingInstance gen_scheduling_instance(std::size_t d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("gen_scheduling_instance: need d >= 2");
  std::uniform_real_distribution<double> release(0.0, 10.0);
  std::uniform_real_distribution<double> processing(1.0, 5.0);
  std::vector<double> r(d), p(d);
  for (std::size_t j = 0; j < d; ++j) {
    r[j] = release(rng);
    p[j] = processing(rng);
  }
  return SchedulingInstance(std::move(r), std::move(p));
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg,
                                   std::size_t trial) {
  cfg.validate();
  const SimplexSpec spec = cfg.simplex();
  const std::uint64_t base = trial_seed(cfg.seed, trial);
  Rng rng(base);

  const Weights phi_star = sample_uniform_simplex(spec, rng);
  std::vector<Instance> instances;
  instances.reserve(cfg.N);
  std::uint64_t digest = 0;
  for (std::size_t n = 0; n < cfg.N; ++n) {
    if (cfg.family == Family::Lp) {
      instances.emplace_back(gen_lp_instance(cfg.d, cfg.J, cfg.r_max, rng));
    } else {
      instances.emplace_back(gen_scheduling_instance(cfg.d, rng));
    }
    digest = digest * 0x100000001b3ULL ^ instance_digest(instances.back());
  }
  const Dataset data = make_dataset(std::move(instances), phi_star, spec);

  std::vector<TrialRecord> out;
  for (const auto& method : cfg.methods) {
    SolverResult res;
    if (method == "psgd2" || method == "psgdp") {
      const StepPolicy policy =
          method == "psgd2" ? StepPolicy::SqrtDecay : StepPolicy::Polyak;
      res = psgd(data, policy, cfg.K, barycenter(spec), &phi_star);
    } else if (method == "upa") {
      res = upa_solve(data, cfg.K, &phi_star);
    } else if (method == "rpa") {
      Rng rpa_rng(splitmix64(base ^ 0x5250415f73747265ULL));
      res = rpa_solve(data, cfg.K, rpa_rng, &phi_star);
    } else {
      res = chan_solve(data, upa_levels(spec, cfg.K), cfg.chan, &phi_star);
    }
    if (!cfg.timing) {
      for (auto& row : res.trace.rows) row.elapsed_ms = 0.0;
    }
    TrialRecord rec;
    rec.trial = trial;
    rec.method = method;
    rec.trace = std::move(res.trace);
    rec.phi_star = phi_star;
    rec.digest = digest;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg,
                                        std::size_t threads) {
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.trials);

  std::vector<std::vector<TrialRecord>> per_trial(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < cfg.trials; t = next++) {
      try {
        per_trial[t] = run_trial(cfg, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<TrialRecord> out;
  for (auto& v : per_trial) {
    for (auto& r : v) out.push_back(std::move(r));
  }
  return out;
}

double interpolate_checkpoints(const std::vector<double>& xs,
                               const std::vector<double>& ys, double x) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("interpolate_checkpoints: bad checkpoint data");
  }
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

DenseCurve densify(const Trace& trace, std::size_t K) {
  if (trace.rows.empty()) throw std::invalid_argument("densify: empty trace");
  DenseCurve c;
  c.sl.resize(K);
  c.pls.resize(K);
  c.plw.resize(K);
  const auto plw_of = [](const TraceRow& r) {
    return r.plw.value_or(std::numeric_limits<double>::quiet_NaN());
  };
  if (trace.checkpoints) {
    std::vector<double> xs, sl, pls, plw;
    for (const auto& r : trace.rows) {
      xs.push_back(static_cast<double>(r.k));
      sl.push_back(r.sl);
      pls.push_back(r.pls);
      plw.push_back(plw_of(r));
    }
    for (std::size_t k = 1; k <= K; ++k) {
      const double x = static_cast<double>(k);
      c.sl[k - 1] = interpolate_checkpoints(xs, sl, x);
      c.pls[k - 1] = interpolate_checkpoints(xs, pls, x);
      c.plw[k - 1] = interpolate_checkpoints(xs, plw, x);
    }
    return c;
  }
  std::size_t idx = 0;
  for (std::size_t k = 1; k <= K; ++k) {
    while (idx + 1 < trace.rows.size() && trace.rows[idx + 1].k <= k) ++idx;
    const TraceRow& r = trace.rows[idx];
    c.sl[k - 1] = r.sl;
    c.pls[k - 1] = r.pls;
    c.plw[k - 1] = plw_of(r);
  }
  return c;
}

WorstCaseTable aggregate_worst_case(const ExperimentConfig& cfg,
                                    const std::vector<TrialRecord>& records) {
  WorstCaseTable table;
  table.family = cfg.family;
  table.d = cfg.d;
  std::map<std::string, DenseCurve> worst;
  for (const auto& rec : records) {
    if (std::find(cfg.methods.begin(), cfg.methods.end(), rec.method) ==
        cfg.methods.end()) {
      throw std::invalid_argument("aggregate: record method '" + rec.method +
                                  "' not in config");
    }
    if (rec.phi_star.dim() != cfg.d) {
      throw std::invalid_argument("aggregate: record dimension does not match config");
    }
    for (const auto& row : rec.trace.rows) {
      if (row.k > cfg.K) {
        throw std::invalid_argument("aggregate: trace row beyond configured K");
      }
    }
    const DenseCurve c = densify(rec.trace, cfg.K);
    auto [it, fresh] = worst.try_emplace(rec.method, c);
    if (fresh) continue;
    DenseCurve& w = it->second;
    for (std::size_t i = 0; i < cfg.K; ++i) {
      w.sl[i] = std::max(w.sl[i], c.sl[i]);
      w.pls[i] = std::max(w.pls[i], c.pls[i]);
      w.plw[i] = std::max(w.plw[i], c.plw[i]);
    }
  }
  for (const auto& m : cfg.methods) {
    const auto it = worst.find(m);
    if (it == worst.end()) continue;
    for (std::size_t i = 0; i < cfg.K; ++i) {
      table.rows.push_back(
          WorstCaseRow{m, i + 1, it->second.sl[i], it->second.pls[i], it->second.plw[i]});
    }
  }
  return table;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing: " +
                             std::strerror(errno));
  }
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed: " + std::strerror(errno));
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_raw_csv(const ExperimentConfig& cfg,
                   const std::vector<TrialRecord>& records,
                   const std::string& path) {
  std::ofstream out = open_out(path);
  out << kRawCsvHeader << '\n';
  const std::string fam = family_name(cfg.family);
  const auto opt = [](const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("nan");
  };
  for (const auto& rec : records) {
    for (const auto& row : rec.trace.rows) {
      out << cfg.experiment << ',' << fam << ',' << cfg.d << ',' << rec.method
          << ',' << rec.trial << ',' << row.k << ',' << fmt(row.sl) << ','
          << fmt(row.pls) << ',' << opt(row.plw) << ',' << opt(row.spo) << ','
          << fmt(row.elapsed_ms) << '\n';
    }
  }
  close_out(out, path);
}

void write_csv(const WorstCaseTable& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kWorstCaseCsvHeader << '\n';
  const std::string fam = family_name(table.family);
  for (const auto& r : table.rows) {
    out << fam << ',' << table.d << ',' << r.method << ',' << r.k << ','
        << fmt(r.worst_sl) << ',' << fmt(r.worst_pls) << ',' << fmt(r.worst_plw)
        << '\n';
  }
  close_out(out, path);
}

WorstCaseTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  }
  std::string line;
  if (!std::getline(in, line) || line != kWorstCaseCsvHeader) {
    throw std::runtime_error("'" + path + "': unexpected worst-case CSV header");
  }
  WorstCaseTable table;
  bool first = true;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7) {
      throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) +
                               ": expected 7 fields");
    }
    try {
      if (first) {
        table.family = parse_family(cells[0]);
        table.d = std::stoul(cells[1]);
        first = false;
      }
      table.rows.push_back(WorstCaseRow{cells[2], std::stoul(cells[3]),
                                        std::stod(cells[4]), std::stod(cells[5]),
                                        std::stod(cells[6])});
    } catch (const std::logic_error& e) {
      throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return table;
}

}  // namespace invopt
