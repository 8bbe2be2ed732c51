#include "hardylab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace hardylab {

namespace {

std::string join(const std::vector<ConfigIssue>& list) {
  std::ostringstream os;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) os << '\n';
    if (list[i].line > 0) os << "line " << list[i].line << ": ";
    os << list[i].message;
  }
  return os.str();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool to_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

bool to_list(std::string_view s, std::vector<double>& out) {
  out.clear();
  while (true) {
    const auto comma = s.find(',');
    double v = 0.0;
    if (!to_double(s.substr(0, comma), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    s.remove_prefix(comma + 1);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

const std::set<std::string, std::less<>> kCommands{"hardy", "elliptic", "wave", "schrodinger", "hum", "semilinear",
                                                   "study"};

struct Entry {
  std::string value;
  int line = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) { scan(text); }

  RunConfig build() {
    RunConfig c;
    text("command", c.command, {"hardy", "elliptic", "wave", "schrodinger", "hum", "semilinear", "study"});
    std::string domain;
    if (text("domain", domain, {"interval", "tangent_disk", "half_disk"})) c.domain = parse_domain_kind(domain);
    number("size", c.size, [](double v) { return v > 0.0; }, "must be positive");
    number("h", c.h, [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0, 1)");
    list("h_list", c.h_list, [](double v) { return v > 0.0 && v < 1.0; }, "entries must lie in (0, 1)");
    integer("levels", c.levels, 1, 6);
    number("grading", c.grading, [](double v) { return v >= 0.0 && v < 2.0; }, "must lie in [0, 2)");
    integer("quad_order", c.quad_order, 2, 12);
    number("lambda", c.lambda, [](double) { return true; }, "");
    list("lambda_list", c.lambda_list, [](double) { return true; }, "");
    number("T", c.T, [](double v) { return v > 0.0; }, "must be positive");
    number("dt", c.dt, [](double v) { return v > 0.0; }, "must be positive");
    number("dt_ratio", c.dt_ratio, [](double v) { return v > 0.0; }, "must be positive");
    number("alpha", c.alpha, [](double v) { return v > 1.0; }, "must exceed 1");
    number("rho", c.rho, [](double v) { return v > 0.0 && v <= 1.0; }, "must lie in (0, 1]");
    number("tol", c.tol, [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0, 1)");
    integer("max_iter", c.max_iter, 1, 100000);
    int seed = 1;
    if (integer("seed", seed, 0, 2147483647)) c.seed = static_cast<std::uint64_t>(seed);
    integer("samples", c.samples, 1, 100000);
    list("T_list", c.T_list, [](double v) { return v > 0.0; }, "entries must be positive");
    list("eps_list", c.eps_list, [](double v) { return v >= 0.0; }, "entries must be non-negative");
    text("constant", c.constant, {"hardy", "improved", "tu8", "tuu8"});
    number("eps", c.eps, [](double v) { return v > 0.0; }, "must be positive");
    text("load", c.load, {"one", "xN", "sin"});
    text("task", c.task, {"pohozaev", "trace", "continuation", "control", "scan", "gramian"});
    text("system", c.system, {"wave", "schrodinger"});
    text("check", c.check, {"pohozaev", "trace", "multiplier", "hardy", "improved", "tu8", "semilinear"});
    text("output", c.output, {});
    for (const auto& [key, e] : entries_) {
      if (!known_.contains(key)) issue(e.line, "unknown key '" + key + "'");
    }
    if (!has("command")) issue(0, "missing required key 'command'");
    if (!has("domain")) issue(0, "missing required key 'domain'");
    if (c.output.empty()) issue(line("output"), "output must not be empty");
    if (kCommands.contains(c.command)) requirements(c);
    if (!issues_.empty()) throw ConfigError(issues_);
    std::ostringstream canon;
    for (const auto& [key, e] : entries_) {
      if (key != "output") canon << key << " = " << e.value << '\n';
    }
    c.canonical = canon.str();
    return c;
  }

 private:
  void scan(std::string_view text) {
    int no = 0;
    while (!text.empty()) {
      ++no;
      const auto nl = text.find('\n');
      std::string_view raw = text.substr(0, nl);
      text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (raw.empty()) continue;
      const auto eq = raw.find('=');
      if (eq == std::string_view::npos) {
        issue(no, "expected 'key = value'");
        continue;
      }
      const std::string key(trim(raw.substr(0, eq)));
      const std::string value(trim(raw.substr(eq + 1)));
      if (key.empty()) {
        issue(no, "missing key before '='");
        continue;
      }
      if (value.empty()) {
        issue(no, "missing value for '" + key + "'");
        continue;
      }
      if (const auto it = entries_.find(key); it != entries_.end()) {
        issue(no, "duplicate key '" + key + "' on lines " + std::to_string(it->second.line) + " and " +
                      std::to_string(no));
        continue;
      }
      entries_[key] = {value, no};
    }
  }

  void issue(int line, std::string message) { issues_.push_back({line, std::move(message)}); }
  bool has(const std::string& key) const { return entries_.contains(key); }
  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const Entry* get(const std::string& key) {
    known_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool text(const std::string& key, std::string& out, std::initializer_list<const char*> allowed) {
    const Entry* e = get(key);
    if (!e) return false;
    if (allowed.size() && std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return e->value == a; })) {
      std::string msg = key + " must be one of";
      for (const char* a : allowed) msg += std::string(" ") + a;
      issue(e->line, msg);
      return false;
    }
    out = e->value;
    return true;
  }

  bool number(const std::string& key, double& out, const std::function<bool(double)>& ok, const std::string& why) {
    const Entry* e = get(key);
    if (!e) return false;
    double v = 0.0;
    if (!to_double(e->value, v)) {
      issue(e->line, key + " is not a number");
      return false;
    }
    if (!ok(v)) {
      issue(e->line, key + " " + why);
      return false;
    }
    out = v;
    return true;
  }

  bool integer(const std::string& key, int& out, int lo, int hi) {
    const Entry* e = get(key);
    if (!e) return false;
    int v = 0;
    const auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (ec != std::errc() || p != e->value.data() + e->value.size()) {
      issue(e->line, key + " is not an integer");
      return false;
    }
    if (v < lo || v > hi) {
      issue(e->line, key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return false;
    }
    out = v;
    return true;
  }

  bool list(const std::string& key, std::vector<double>& out, const std::function<bool(double)>& ok,
            const std::string& why) {
    const Entry* e = get(key);
    if (!e) return false;
    if (!to_list(e->value, out)) {
      issue(e->line, key + " is not a comma separated list of numbers");
      return false;
    }
    if (!std::all_of(out.begin(), out.end(), ok)) {
      issue(e->line, key + " " + why);
      return false;
    }
    return true;
  }

  void require(const std::string& key, const std::string& command) {
    if (!has(key)) issue(0, "missing required key '" + key + "' for " + command);
  }

  void lambda_bound(const RunConfig& c) {
    const double lN = c.dim() * c.dim() / 4.0;
    if (has("lambda") && c.lambda > lN) issue(line("lambda"), "lambda exceeds lambda(N)=" + fmt(lN));
    for (double l : c.lambda_list) {
      if (l > lN) {
        issue(line("lambda_list"), "lambda_list entry " + fmt(l) + " exceeds lambda(N)=" + fmt(lN));
        break;
      }
    }
  }

  void time_grid(const RunConfig& c, double T) {
    if (!(c.dt > 0.0) || !(T > 0.0)) return;
    const double n = std::round(T / c.dt);
    if (n < 1.0 || std::abs(n * c.dt - T) > 1e-9 * T) {
      issue(line("dt"), "T = " + fmt(T) + " is not a multiple of dt");
    }
  }

  void requirements(RunConfig& c) {
    const std::string& cmd = c.command;
    lambda_bound(c);
    if (cmd == "study") {
      require("check", cmd);
      require("h_list", cmd);
      for (std::size_t i = 1; i < c.h_list.size(); ++i) {
        if (!(c.h_list[i] < c.h_list[i - 1])) {
          issue(line("h_list"), "h_list must be strictly decreasing");
          break;
        }
      }
      const bool timed = c.check == "multiplier";
      if (timed) require("T", cmd);
      if (c.check == "pohozaev" || c.check == "multiplier" || c.check == "semilinear") require("lambda", cmd);
      if (c.check == "trace") require("lambda_list", cmd);
      if (c.check == "semilinear") require("alpha", cmd);
      return;
    }
    require("h", cmd);
    if (cmd == "elliptic") {
      if (c.task.empty()) c.task = "pohozaev";
      if (c.task != "pohozaev" && c.task != "trace" && c.task != "continuation") {
        issue(line("task"), "task for elliptic must be pohozaev, trace or continuation");
      }
      if (c.task == "trace") require("lambda_list", cmd);
      else if (c.task == "continuation") require("eps_list", cmd);
      else require("lambda", cmd);
      if (c.task == "continuation") {
        for (std::size_t i = 1; i < c.eps_list.size(); ++i) {
          if (!(c.eps_list[i] < c.eps_list[i - 1])) {
            issue(line("eps_list"), "eps_list must be strictly decreasing");
            break;
          }
        }
      }
    } else if (cmd == "wave" || cmd == "schrodinger") {
      require("lambda", cmd);
      require("T", cmd);
      require("dt", cmd);
      time_grid(c, c.T);
    } else if (cmd == "hum") {
      if (c.task.empty()) c.task = "control";
      if (c.task != "control" && c.task != "scan" && c.task != "gramian") {
        issue(line("task"), "task for hum must be control, scan or gramian");
      }
      require("lambda", cmd);
      require("dt", cmd);
      if (c.task == "scan") {
        require("T_list", cmd);
        for (double T : c.T_list) time_grid(c, T);
        if (c.system != "wave") issue(line("system"), "the observability scan is defined for system = wave");
      } else {
        require("T", cmd);
        time_grid(c, c.T);
      }
      if (c.task == "gramian" && c.system != "wave") {
        issue(line("system"), "the gramian checks are defined for system = wave");
      }
    } else if (cmd == "semilinear") {
      require("lambda", cmd);
      require("alpha", cmd);
    }
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> known_;
  std::vector<ConfigIssue> issues_;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> list) : std::runtime_error(join(list)), issues(std::move(list)) {}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical); }

RunConfig parse_config(std::string_view text) { return Parser(text).build(); }

}  // namespace hardylab
