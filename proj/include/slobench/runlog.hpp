#pragma once

#include <map>
#include <string>
#include <vector>

#include "slobench/io_util.hpp"
#include "slobench/resources.hpp"
#include "slobench/stats.hpp"

namespace slobench {

// Minimal TOML-style key/value sections, enough for run metadata and config
// files: `[section]` headers, `key = value` entries, `#` comments, quoted
// strings.
using KvSections = std::map<std::string, std::map<std::string, std::string>>;

inline std::string kv_quote(const std::string& s) { return "\"" + s + "\""; }

inline std::string kv_serialize(const KvSections& sections) {
  std::string out;
  for (const auto& [name, entries] : sections) {
    out += "[" + name + "]\n";
    for (const auto& [key, value] : entries) {
      out += key;
      out += " = ";
      out += value;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

inline std::string kv_strip(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t");
  return s.substr(lo, hi - lo + 1);
}

inline KvSections kv_parse(const std::string& text, const std::string& origin = "<config>") {
  KvSections out;
  std::string section;
  std::size_t line_no = 0;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = kv_strip(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw config_error(origin + ":" + std::to_string(line_no) + ": malformed section header");
      section = kv_strip(stripped.substr(1, stripped.size() - 2));
      out[section];
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error(origin + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = kv_strip(stripped.substr(0, eq));
    std::string value = kv_strip(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw config_error(origin + ":" + std::to_string(line_no) + ": empty key or value");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    out[section][key] = value;
  }
  return out;
}

struct RunMeta {
  std::string scenario;
  std::string agent;
  std::uint64_t seed = 0;
  long budget = 0;
  long cadence = 0;
  std::string mode;  // "synthetic" or the dataset path
  double noise_sigma = 0.1;
  int oracle_action = 0;
  double oracle_value = 0.0;
  double oracle_stddev = 0.0;
  long oracle_samples = 0;
  std::string checkpoint_hash;
  std::string parent_checkpoint_hash;  // empty for base runs
};

// One evaluation point: per-batch statistics over the eight corner-seeded
// sequences, plus the raw reward streams (in-memory only).
struct EvalBlock {
  BatchStats stats;
  std::vector<std::vector<double>> raw;
};

// Complete record of one training run. Persisted as a directory of CSV files
// plus metadata; the smoothed series runs over the concatenated evaluation
// batches.
struct RunLog {
  RunMeta meta;
  std::vector<double> train_rewards;
  std::vector<EvalBlock> evals;
  std::vector<double> mu_all;
  std::vector<double> sigma_all;
  std::vector<double> mu_smoothed;
  std::vector<ResourceSample> resources;

  void append_eval(EvalBlock block) {
    for (std::size_t i = 0; i < block.stats.mu.size(); ++i) {
      mu_all.push_back(block.stats.mu[i]);
      sigma_all.push_back(block.stats.sigma[i]);
    }
    mu_smoothed = smooth(mu_all);
    evals.push_back(std::move(block));
  }

  void save(const fs::path& dir) const {
    fs::create_directories(dir);

    KvSections meta_kv;
    auto& run = meta_kv["run"];
    run["scenario"] = kv_quote(meta.scenario);
    run["agent"] = kv_quote(meta.agent);
    run["seed"] = std::to_string(meta.seed);
    run["budget"] = std::to_string(meta.budget);
    run["cadence"] = std::to_string(meta.cadence);
    run["mode"] = kv_quote(meta.mode);
    run["noise_sigma"] = fmt_double(meta.noise_sigma);
    auto& oracle = meta_kv["oracle"];
    oracle["action"] = std::to_string(meta.oracle_action);
    oracle["value"] = fmt_double(meta.oracle_value);
    oracle["stddev"] = fmt_double(meta.oracle_stddev);
    oracle["samples"] = std::to_string(meta.oracle_samples);
    auto& ckpt = meta_kv["checkpoint"];
    ckpt["hash"] = kv_quote(meta.checkpoint_hash);
    if (!meta.parent_checkpoint_hash.empty())
      ckpt["parent_hash"] = kv_quote(meta.parent_checkpoint_hash);
    write_file(dir / "meta.toml", kv_serialize(meta_kv));

    std::string rewards = "step,reward\n";
    for (std::size_t i = 0; i < train_rewards.size(); ++i) {
      rewards += std::to_string(i);
      rewards += ',';
      rewards += fmt_double(train_rewards[i]);
      rewards += '\n';
    }
    write_file(dir / "train_rewards.csv", rewards);

    std::string eval_csv = "eval_index,batch_index,mu,sigma,mu_smoothed\n";
    std::size_t flat = 0;
    for (std::size_t e = 0; e < evals.size(); ++e) {
      for (std::size_t b = 0; b < evals[e].stats.mu.size(); ++b, ++flat) {
        eval_csv += std::to_string(e);
        eval_csv += ',';
        eval_csv += std::to_string(flat);
        eval_csv += ',';
        eval_csv += fmt_double(mu_all[flat]);
        eval_csv += ',';
        eval_csv += fmt_double(sigma_all[flat]);
        eval_csv += ',';
        eval_csv += fmt_double(mu_smoothed[flat]);
        eval_csv += '\n';
      }
    }
    write_file(dir / "eval_stats.csv", eval_csv);

    std::string res = "batch_index,cpu_ms,rss_bytes\n";
    for (std::size_t i = 0; i < resources.size(); ++i) {
      res += std::to_string(i);
      res += ',';
      if (resources[i].cpu_ms_delta) res += fmt_double(*resources[i].cpu_ms_delta);
      res += ',';
      if (resources[i].rss_bytes) res += std::to_string(*resources[i].rss_bytes);
      res += '\n';
    }
    write_file(dir / "resources.csv", res);
  }

  // Reloads the persisted portion of a run directory. Raw evaluation streams
  // are not part of the on-disk schema; eval blocks carry the statistics.
  static RunLog load(const fs::path& dir) {
    RunLog log;
    const KvSections meta_kv = kv_parse(read_file(dir / "meta.toml"), (dir / "meta.toml").string());
    auto section = [&](const std::string& name) -> const std::map<std::string, std::string>& {
      auto it = meta_kv.find(name);
      if (it == meta_kv.end())
        throw io_error("meta.toml missing [" + name + "] in " + dir.string());
      return it->second;
    };
    auto get = [&](const std::string& sec, const std::string& key) {
      const auto& s = section(sec);
      auto it = s.find(key);
      if (it == s.end()) throw io_error("meta.toml missing " + sec + "." + key);
      return it->second;
    };
    log.meta.scenario = get("run", "scenario");
    log.meta.agent = get("run", "agent");
    log.meta.seed = static_cast<std::uint64_t>(std::stoull(get("run", "seed")));
    log.meta.budget = parse_long(get("run", "budget"));
    log.meta.cadence = parse_long(get("run", "cadence"));
    log.meta.mode = get("run", "mode");
    log.meta.noise_sigma = parse_double(get("run", "noise_sigma"));
    log.meta.oracle_action = static_cast<int>(parse_long(get("oracle", "action")));
    log.meta.oracle_value = parse_double(get("oracle", "value"));
    log.meta.oracle_stddev = parse_double(get("oracle", "stddev"));
    log.meta.oracle_samples = parse_long(get("oracle", "samples"));
    log.meta.checkpoint_hash = get("checkpoint", "hash");
    if (section("checkpoint").count("parent_hash"))
      log.meta.parent_checkpoint_hash = get("checkpoint", "parent_hash");

    {
      auto lines = read_lines(dir / "train_rewards.csv");
      if (lines.empty() || lines[0] != "step,reward")
        throw io_error("bad train_rewards.csv header in " + dir.string());
      for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split(lines[i], ',');
        if (f.size() != 2) throw io_error("bad train_rewards.csv row in " + dir.string());
        log.train_rewards.push_back(parse_double(f[1]));
      }
    }
    {
      auto lines = read_lines(dir / "eval_stats.csv");
      if (lines.empty() || lines[0] != "eval_index,batch_index,mu,sigma,mu_smoothed")
        throw io_error("bad eval_stats.csv header in " + dir.string());
      long current_eval = -1;
      for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split(lines[i], ',');
        if (f.size() != 5) throw io_error("bad eval_stats.csv row in " + dir.string());
        const long e = parse_long(f[0]);
        if (e != current_eval) {
          log.evals.emplace_back();
          current_eval = e;
        }
        log.evals.back().stats.mu.push_back(parse_double(f[2]));
        log.evals.back().stats.sigma.push_back(parse_double(f[3]));
        log.mu_all.push_back(parse_double(f[2]));
        log.sigma_all.push_back(parse_double(f[3]));
        log.mu_smoothed.push_back(parse_double(f[4]));
      }
    }
    {
      auto lines = read_lines(dir / "resources.csv");
      if (lines.empty() || lines[0] != "batch_index,cpu_ms,rss_bytes")
        throw io_error("bad resources.csv header in " + dir.string());
      for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split(lines[i], ',');
        if (f.size() != 3) throw io_error("bad resources.csv row in " + dir.string());
        ResourceSample s;
        if (!f[1].empty()) s.cpu_ms_delta = parse_double(f[1]);
        if (!f[2].empty()) s.rss_bytes = static_cast<long long>(std::stoll(f[2]));
        log.resources.push_back(s);
      }
    }
    return log;
  }
};

}  // namespace slobench
