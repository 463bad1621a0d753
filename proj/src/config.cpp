#include "psrsel/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "psrsel/errors.hpp"

namespace psrsel {

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& file, int line,
                       const std::string& msg) {
  throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
}

long long parse_ll(const std::string& file, int line, const std::string& key,
                   const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(file, line, key + ": expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& file, int line,
                        const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(file, line, key + ": expected a non-negative integer, got '" +
                          value + "'");
  }
}

double parse_real(const std::string& file, int line, const std::string& key,
                  const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(file, line, key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& file, int line, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(file, line, key + ": expected true/false, got '" + value + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double threshold_for_size(const ExperimentConfig& cfg, int basis_size) {
  if (cfg.entropy_threshold_by_size.empty()) return cfg.entropy_threshold;
  const auto it = cfg.entropy_threshold_by_size.find(basis_size);
  if (it == cfg.entropy_threshold_by_size.end())
    throw ConfigError("entropy_threshold schedule has no entry for basis size " +
                      std::to_string(basis_size));
  return it->second;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& filename) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos
                                      ? raw
                                      : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(filename, line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(filename, line_no, "empty key");
    if (value.empty()) fail(filename, line_no, key + ": empty value");

    if (key == "environment") {
      cfg.environment = value;
    } else if (key == "env_seed") {
      cfg.env_seed = parse_u64(filename, line_no, key, value);
    } else if (key == "strategy") {
      cfg.strategies.clear();
      for (const std::string& part : split(value, ',')) {
        if (part.empty()) fail(filename, line_no, key + ": empty list entry");
        cfg.strategies.push_back(part);
      }
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "training_length") {
      cfg.training_length = parse_ll(filename, line_no, key, value);
    } else if (key == "probe_length") {
      cfg.probe_length =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "rollouts") {
      cfg.rollouts = static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "basis_size") {
      cfg.basis_sizes.clear();
      for (const std::string& part : split(value, ',')) {
        if (part.empty()) fail(filename, line_no, key + ": empty list entry");
        cfg.basis_sizes.push_back(
            static_cast<int>(parse_ll(filename, line_no, key, part)));
      }
    } else if (key == "rounds") {
      cfg.rounds = static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "iter_num") {
      cfg.iter_num = static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "replace_n") {
      cfg.replace_n =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "entropy_threshold") {
      if (value.find(':') != std::string::npos) {
        cfg.entropy_threshold_by_size.clear();
        for (const std::string& part : split(value, ',')) {
          const std::size_t colon = part.find(':');
          if (colon == std::string::npos)
            fail(filename, line_no,
                 key + ": schedule entries look like size:value");
          const int size = static_cast<int>(
              parse_ll(filename, line_no, key, trim(part.substr(0, colon))));
          const double th = parse_real(filename, line_no, key,
                                       trim(part.substr(colon + 1)));
          cfg.entropy_threshold_by_size[size] = th;
        }
      } else {
        cfg.entropy_threshold = parse_real(filename, line_no, key, value);
      }
    } else if (key == "candidate_max_len") {
      cfg.candidate_max_len =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "min_support") {
      cfg.min_support =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "history_max_len") {
      cfg.history_max_len =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "history_max_count") {
      cfg.history_max_count =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "rank") {
      cfg.rank = static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "eval_length") {
      cfg.eval_length = parse_ll(filename, line_no, key, value);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_real(filename, line_no, key, value);
    } else if (key == "exact_entropy") {
      cfg.exact_entropy = parse_bool(filename, line_no, key, value);
    } else if (key == "exact_eval") {
      cfg.exact_eval = parse_bool(filename, line_no, key, value);
    } else if (key == "eval_rollouts") {
      cfg.eval_rollouts =
          static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "bound_margin") {
      cfg.bound_margin = parse_real(filename, line_no, key, value);
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(filename, line_no, key, value);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_ll(filename, line_no, key, value));
    } else if (key == "output") {
      cfg.output = value;
    } else {
      fail(filename, line_no, "unknown key '" + key + "'");
    }
  }

  // Cross-field validation (reported against the whole file).
  const auto check = [&](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(filename + ": " + msg);
  };
  check(!cfg.strategies.empty(), "strategy must list at least one strategy");
  for (const std::string& s : cfg.strategies)
    check(s == "entropy" || s == "bound" || s == "initial",
          "strategy entries must be entropy, bound, or initial");
  {
    std::vector<std::string> sorted = cfg.strategies;
    std::sort(sorted.begin(), sorted.end());
    check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "strategy entries must be distinct");
  }
  check(cfg.trials >= 1, "trials must be >= 1");
  check(cfg.training_length >= 1, "training_length must be >= 1");
  check(cfg.probe_length >= 2, "probe_length must be >= 2");
  check(cfg.rollouts >= 1, "rollouts must be >= 1");
  check(!cfg.basis_sizes.empty(), "basis_size must list at least one size");
  for (const int k : cfg.basis_sizes)
    check(k >= 2, "every basis size must be >= 2");
  check(cfg.rounds >= 1, "rounds must be >= 1");
  check(cfg.iter_num >= 1, "iter_num must be >= 1");
  check(cfg.replace_n >= 1, "replace_n must be >= 1");
  for (const int k : cfg.basis_sizes)
    check(cfg.replace_n < k, "replace_n must be smaller than every basis size");
  if (cfg.entropy_threshold_by_size.empty())
    check(cfg.entropy_threshold > 0.0, "entropy_threshold must be > 0");
  else
    for (const auto& [size, th] : cfg.entropy_threshold_by_size) {
      check(th > 0.0, "entropy_threshold schedule values must be > 0");
      (void)size;
    }
  for (const int k : cfg.basis_sizes)
    (void)threshold_for_size(cfg, k);  // schedule must cover every size
  check(cfg.candidate_max_len >= 1, "candidate_max_len must be >= 1");
  check(cfg.min_support >= 1, "min_support must be >= 1");
  check(cfg.history_max_len >= 0, "history_max_len must be >= 0");
  check(cfg.history_max_count >= 1, "history_max_count must be >= 1");
  check(cfg.rank >= 1, "rank must be >= 1");
  check(cfg.eval_length >= 5, "eval_length must be >= 5 (four-step horizon)");
  check(cfg.exact_eval || cfg.eval_rollouts >= 1,
        "eval_rollouts must be >= 1");
  check(cfg.bound_margin > 0.0, "bound_margin must be > 0");
  check(cfg.workers >= 1, "workers must be >= 1");
  check(!cfg.output.empty(), "output must be non-empty");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "environment = " << cfg.environment << "\n";
  out << "env_seed = " << cfg.env_seed << "\n";
  out << "strategy = ";
  for (std::size_t i = 0; i < cfg.strategies.size(); ++i) {
    if (i) out << ",";
    out << cfg.strategies[i];
  }
  out << "\n";
  out << "trials = " << cfg.trials << "\n";
  out << "training_length = " << cfg.training_length << "\n";
  out << "probe_length = " << cfg.probe_length << "\n";
  out << "rollouts = " << cfg.rollouts << "\n";
  out << "basis_size = ";
  for (std::size_t i = 0; i < cfg.basis_sizes.size(); ++i) {
    if (i) out << ",";
    out << cfg.basis_sizes[i];
  }
  out << "\n";
  out << "rounds = " << cfg.rounds << "\n";
  out << "iter_num = " << cfg.iter_num << "\n";
  out << "replace_n = " << cfg.replace_n << "\n";
  if (cfg.entropy_threshold_by_size.empty()) {
    out << "entropy_threshold = " << fmt_real(cfg.entropy_threshold) << "\n";
  } else {
    out << "entropy_threshold = ";
    bool first = true;
    for (const auto& [size, th] : cfg.entropy_threshold_by_size) {
      if (!first) out << ",";
      first = false;
      out << size << ":" << fmt_real(th);
    }
    out << "\n";
  }
  out << "candidate_max_len = " << cfg.candidate_max_len << "\n";
  out << "min_support = " << cfg.min_support << "\n";
  out << "history_max_len = " << cfg.history_max_len << "\n";
  out << "history_max_count = " << cfg.history_max_count << "\n";
  out << "rank = " << cfg.rank << "\n";
  out << "eval_length = " << cfg.eval_length << "\n";
  out << "epsilon = " << fmt_real(cfg.epsilon) << "\n";
  out << "exact_entropy = " << (cfg.exact_entropy ? "true" : "false") << "\n";
  out << "exact_eval = " << (cfg.exact_eval ? "true" : "false") << "\n";
  out << "eval_rollouts = " << cfg.eval_rollouts << "\n";
  out << "bound_margin = " << fmt_real(cfg.bound_margin) << "\n";
  out << "master_seed = " << cfg.master_seed << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "output = " << cfg.output << "\n";
  return out.str();
}

}  // namespace psrsel
