#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hardylab/runner.hpp"
#include "hardylab/semilinear.hpp"

using namespace hardylab;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column " + name);
    const auto k = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.at(k));
    return out;
  }
};

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    t.rows.push_back(row);
  }
  return t;
}

struct Run {
  RunConfig config;
  RunOutput output;
  double seconds = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }

  Table csv(const std::string& name) const {
    for (const auto& f : output.files) {
      if (f.name == name) return parse_csv(f.content);
    }
    throw std::runtime_error("missing artifact " + name);
  }

  double check(const std::string& name, const char* field = "residual") const {
    for (const auto& c : output.summary["checks"]) {
      if (c["check"] == name) return c[field].get<double>();
    }
    throw std::runtime_error("missing check " + name);
  }
};

std::filesystem::path config_dir() {
  if (const char* env = std::getenv("HARDYLAB_CONFIG_DIR")) return env;
#ifdef HARDYLAB_CONFIG_DIR
  return HARDYLAB_CONFIG_DIR;
#else
  return "configs/acceptance";
#endif
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run execute_file(const std::string& name) {
  Run r;
  try {
    r.config = parse_config(read_file(config_dir() / (name + ".cfg")));
    const auto t0 = std::chrono::steady_clock::now();
    r.output = execute(r.config);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return v.size() >= 2;
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

class Report {
 public:
  void criterion(int id, const std::string& title, const std::vector<Run*>& runs, auto&& body) {
    std::string detail;
    bool pass = true;
    for (const Run* r : runs) {
      if (!r->ok()) {
        pass = false;
        detail += " " + r->config.command + " error: " + r->error + ";";
      }
    }
    if (pass) {
      try {
        pass = body(detail);
      } catch (const std::exception& e) {
        pass = false;
        detail += std::string(" exception: ") + e.what();
      }
    }
    failures_ += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "):" << detail << std::endl;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

// Series of constants from a hardy run.
std::vector<double> series(const Run& r) { return r.output.summary["values"]["series"].get<std::vector<double>>(); }

}  // namespace

int main() {
  const std::vector<std::string> names{
      "c01_hardy_interval",  "c01_hardy_disk",          "c02_improved_interval",  "c02_improved_disk",
      "c03_pohozaev_interval", "c04_pohozaev_disk",     "c05_trace_interval",     "c05_trace_disk",
      "c06_continuation",    "c07_08_wave",             "c09_hum_wave",           "c10_scan_disk",
      "c10_scan_interval",   "c11_gramian",             "c12_schrodinger",        "c12_hum_schrodinger",
      "c13_semilinear_interval", "c13_semilinear_disk", "c14_tu8_interval",       "c14_tu8_disk",
      "c14_tuu8_interval",   "c14_tuu8_disk"};
  std::map<std::string, Run> runs;
  for (const auto& n : names) {
    runs[n] = execute_file(n);
    std::cout << "ran " << n << " in " << fmt(runs[n].seconds) << " s" << (runs[n].ok() ? "" : " (error)")
              << std::endl;
  }
  auto R = [&](const std::string& n) { return &runs.at(n); };
  Report rep;

  rep.criterion(1, "Hardy constants", {R("c01_hardy_interval"), R("c01_hardy_disk")}, [&](std::string& d) {
    bool ok = true;
    for (const auto& [n, lN] : {std::pair{"c01_hardy_interval", 0.25}, std::pair{"c01_hardy_disk", 1.0}}) {
      const Run& r = runs.at(n);
      const auto s = series(r);
      const double lo = *std::min_element(s.begin(), s.end());
      ok = ok && s.size() == 3 && lo > lN && strictly_decreasing(s) && r.seconds <= 60.0;
      d += " " + std::string(n) + " min=" + fmt(lo) + " finest=" + fmt(s.back()) + " t=" + fmt(r.seconds) + "s;";
    }
    const auto h = runs.at("c01_hardy_interval").csv("constants.csv").column("h");
    ok = ok && std::abs(h[0] - 0.01) < 1e-12 && std::abs(h[2] - 0.0025) < 1e-12;
    return ok;
  });

  rep.criterion(2, "improved Hardy remainder", {R("c02_improved_interval"), R("c02_improved_disk")},
                [&](std::string& d) {
                  bool ok = true;
                  for (const char* n : {"c02_improved_interval", "c02_improved_disk"}) {
                    const auto s = series(runs.at(n));
                    const double lo = *std::min_element(s.begin(), s.end());
                    ok = ok && lo >= 0.25 - 1e-8;
                    d += " " + std::string(n) + " min=" + fmt(lo) + ";";
                  }
                  return ok;
                });

  rep.criterion(3, "1D Pohozaev closed form", {R("c03_pohozaev_interval")}, [&](std::string& d) {
    const Table t = runs.at("c03_pohozaev_interval").csv("convergence.csv");
    const auto h = t.column("h"), lhs = t.column("lhs"), rhs = t.column("rhs");
    std::vector<double> err;
    for (std::size_t i = 0; i < h.size(); ++i) err.push_back(std::max(std::abs(lhs[i] - 0.125), std::abs(rhs[i] - 0.125)));
    bool ok = h.size() == 3 && std::abs(h.back() - 1e-3) < 1e-12 && err.back() <= 1e-3;
    d += " |lhs-1/8|=" + fmt(std::abs(lhs.back() - 0.125)) + " |rhs-1/8|=" + fmt(std::abs(rhs.back() - 0.125));
    for (std::size_t i = 1; i < err.size(); ++i) {
      const double order = std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]);
      ok = ok && order >= 0.8;
      d += " order=" + fmt(order);
    }
    return ok;
  });

  rep.criterion(4, "2D Pohozaev", {R("c04_pohozaev_disk")}, [&](std::string& d) {
    const auto res = runs.at("c04_pohozaev_disk").csv("convergence.csv").column("rel_residual");
    d += " finest=" + fmt(res.back());
    return res.back() <= 0.05 && strictly_decreasing(res);
  });

  rep.criterion(5, "trace ratio growth", {R("c05_trace_interval"), R("c05_trace_disk")}, [&](std::string& d) {
    bool ok = true;
    for (const auto& [n, lN] : {std::pair{"c05_trace_interval", 0.25}, std::pair{"c05_trace_disk", 1.0}}) {
      const Table t = runs.at(n).csv("convergence.csv");
      const auto lam = t.column("lambda"), ratio = t.column("max_ratio");
      std::map<double, std::vector<double>> by_lambda;
      for (std::size_t i = 0; i < lam.size(); ++i) by_lambda[lam[i]].push_back(ratio[i]);
      double g = 0.0;
      for (const auto& [l, v] : by_lambda) {
        for (std::size_t i = 1; i < v.size(); ++i) g = std::max(g, v[i] / v[i - 1]);
      }
      ok = ok && g <= 1.5 && by_lambda.count(lN) == 1;
      d += " " + std::string(n) + " growth=" + fmt(g) + ";";
    }
    return ok;
  });

  rep.criterion(6, "lambda continuation", {R("c06_continuation")}, [&](std::string& d) {
    const Table t = runs.at("c06_continuation").csv("continuation.csv");
    const auto eps = t.column("eps"), dist = t.column("distance"), w = t.column("weighted");
    d += " distance=" + fmt(dist.front()) + ".." + fmt(dist.back()) + " weighted=" + fmt(w.front()) + ".." +
         fmt(w.back());
    return eps.size() == 3 && strictly_decreasing(eps) && strictly_decreasing(dist) && strictly_decreasing(w);
  });

  rep.criterion(7, "wave energy conservation", {R("c07_08_wave")}, [&](std::string& d) {
    const Run& r = runs.at("c07_08_wave");
    const auto drift = r.csv("convergence.csv").column("energy_drift");
    const double m = *std::max_element(drift.begin(), drift.end());
    d += " max drift=" + fmt(m);
    return m <= 1e-10 && r.config.T == 4.5 && r.config.lambda == 0.9;
  });

  rep.criterion(8, "wave multiplier identity", {R("c07_08_wave")}, [&](std::string& d) {
    const Table t = runs.at("c07_08_wave").csv("convergence.csv");
    const auto h = t.column("h_param"), dt = t.column("dt"), res = t.column("rel_residual"),
               eq = t.column("equipartition");
    d += " (h,dt)=(" + fmt(h.back()) + "," + fmt(dt.back()) + ") residual=" + fmt(res.back()) +
         " equipartition=" + fmt(eq.back());
    return std::abs(h.back() - 0.02) < 1e-12 && std::abs(dt.back() - 0.01) < 1e-12 && res.back() <= 0.05 &&
           strictly_decreasing(res) && eq.back() <= 0.05;
  });

  rep.criterion(9, "HUM wave control", {R("c09_hum_wave")}, [&](std::string& d) {
    const Run& r = runs.at("c09_hum_wave");
    const auto res = r.csv("cg.csv").column("relative_residual");
    const double ratio = r.check("energy_reduction");
    d += " iterations=" + std::to_string(res.size() - 1) + " residual=" + fmt(res.back()) +
         " energy ratio=" + fmt(ratio) + " t=" + fmt(r.seconds) + "s";
    return res.back() <= 1e-6 && res.size() - 1 <= 200 && ratio <= 1e-4 && r.seconds <= 600.0 &&
           r.config.T > 4.0 && r.config.rho == 0.3;
  });

  rep.criterion(10, "observability scan", {R("c10_scan_disk"), R("c10_scan_interval")}, [&](std::string& d) {
    bool ok = true;
    for (const auto& [n, T] : {std::pair{"c10_scan_disk", 4.5}, std::pair{"c10_scan_interval", 2.5}}) {
      const Run& r = runs.at(n);
      const Table t = r.csv("scan.csv");
      const auto Ts = t.column("T"), q = t.column("min_quotient");
      ok = ok && non_decreasing(q) && q.back() > 0.0 && std::abs(Ts.back() - T) < 1e-12 && r.config.samples == 64;
      d += " " + std::string(n) + " min quotient at T=" + fmt(Ts.back()) + ": " + fmt(q.back()) + ";";
    }
    return ok;
  });

  rep.criterion(11, "Gramian algebra", {R("c11_gramian")}, [&](std::string& d) {
    const Table t = runs.at("c11_gramian").csv("gramian.csv");
    const auto sym = t.column("symmetry"), pa = t.column("positivity_a"), pb = t.column("positivity_b"),
               lin = t.column("linearity");
    const double s = *std::max_element(sym.begin(), sym.end());
    const double l = *std::max_element(lin.begin(), lin.end());
    const double p = std::min(*std::min_element(pa.begin(), pa.end()), *std::min_element(pb.begin(), pb.end()));
    d += " pairs=" + std::to_string(sym.size()) + " symmetry=" + fmt(s) + " min positivity=" + fmt(p) +
         " linearity=" + fmt(l);
    return sym.size() == 16 && s <= 1e-8 && p > 1e-8 && l <= 1e-8;
  });

  rep.criterion(12, "Schrodinger", {R("c12_schrodinger"), R("c12_hum_schrodinger")}, [&](std::string& d) {
    const Run& r = runs.at("c12_schrodinger");
    const Table t = r.csv("schrodinger.csv");
    const auto mass = t.column("mass"), energy = t.column("energy");
    double dm = 0.0, de = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      dm = std::max(dm, std::abs(mass[i] - mass[0]) / mass[0]);
      de = std::max(de, std::abs(energy[i] - energy[0]) / energy[0]);
    }
    const double smult = r.check("smult");
    const Run& h = runs.at("c12_hum_schrodinger");
    const double red = h.check("norm_reduction");
    d += " steps=" + std::to_string(mass.size() - 1) + " mass drift=" + fmt(dm) + " energy drift=" + fmt(de) +
         " smult=" + fmt(smult) + " HUM reduction=" + fmt(red);
    return mass.size() - 1 >= 1000 && dm <= 1e-12 && de <= 1e-12 && smult <= 0.05 && red <= 1e-4 &&
           h.config.T == 0.5;
  });

  rep.criterion(13, "semilinear", {R("c13_semilinear_interval"), R("c13_semilinear_disk")}, [&](std::string& d) {
    bool ok = true;
    for (const char* n : {"c13_semilinear_interval", "c13_semilinear_disk"}) {
      const Run& r = runs.at(n);
      const double el = r.check("euler_lagrange"), en = r.check("energy_identity"), pz = r.check("pohozaev_defect");
      ok = ok && el <= 1e-6 && en <= 1e-6 && pz <= 0.05 && r.config.alpha == 3.0;
      d += " " + std::string(n) + " EL=" + fmt(el) + " energy=" + fmt(en) + " pohozaev=" + fmt(pz) + ";";
    }
    const double c35 = criticality_coefficient(3, 5.0), c43 = criticality_coefficient(4, 3.0);
    d += " coefficient(3,5)=" + fmt(c35) + " coefficient(4,3)=" + fmt(c43);
    return ok && c35 == 0.0 && c43 == 0.0;
  });

  rep.criterion(14, "tu8 and tuu8 constants",
                {R("c14_tu8_interval"), R("c14_tu8_disk"), R("c14_tuu8_interval"), R("c14_tuu8_disk")},
                [&](std::string& d) {
                  bool ok = true;
                  for (const char* n : {"c14_tu8_interval", "c14_tu8_disk", "c14_tuu8_interval", "c14_tuu8_disk"}) {
                    const auto s = series(runs.at(n));
                    double g = 0.0;
                    bool finite = s.size() == 3;
                    for (std::size_t i = 0; i < s.size(); ++i) {
                      finite = finite && std::isfinite(s[i]);
                      if (i > 0) g = std::max(g, std::abs(s[i] - s[i - 1]) / std::abs(s[i - 1]));
                    }
                    ok = ok && finite && g <= 0.2;
                    d += " " + std::string(n) + " change=" + fmt(g) + ";";
                  }
                  return ok;
                });

  std::vector<Run*> all;
  for (auto& [n, r] : runs) all.push_back(&r);
  rep.criterion(15, "determinism", all, [&](std::string& d) {
    int differing = 0;
    for (const auto& n : names) {
      const Run again = execute_file(n);
      const auto& a = runs.at(n).output.files;
      const auto& b = again.output.files;
      bool same = again.ok() && a.size() == b.size();
      for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].name == b[i].name && a[i].content == b[i].content;
      if (!same) {
        ++differing;
        d += " " + n + " differs;";
      }
    }
    d += " " + std::to_string(names.size() - differing) + "/" + std::to_string(names.size()) + " byte-identical";
    return differing == 0;
  });

  return rep.failures() == 0 ? 0 : 1;
}
