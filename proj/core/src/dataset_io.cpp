#include "socdiff/dataset_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "socdiff/errors.hpp"

namespace socdiff {

using nlohmann::json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw DataError("write failed for " + path.string());
}

// Splits on tabs; returns false for comment and blank lines.
bool data_fields(std::string line, std::vector<std::string>& fields) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty() || line.front() == '#') return false;
  fields.clear();
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return true;
}

[[noreturn]] void malformed(const std::string& source, std::size_t line_no, const char* what) {
  throw DataError(source + ":" + std::to_string(line_no) + ": " + what);
}

std::string user_label(const IdMap* ids, UserId u) {
  return ids && u < ids->n_users() ? ids->user_labels()[u] : "u" + std::to_string(u);
}

std::string item_label(const IdMap* ids, ItemId a) {
  return ids && a < ids->n_items() ? ids->item_labels()[a] : "i" + std::to_string(a);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json metrics_json(const MetricsReport& r) {
  return json{{"rs", r.rs},
              {"precision", r.precision},
              {"inter_diversity", optional_json(r.inter_diversity)},
              {"intra_diversity", optional_json(r.intra_diversity)},
              {"coverage", r.coverage},
              {"novelty", r.novelty},
              {"congestion", r.congestion},
              {"l", r.l},
              {"users_evaluated", r.users_evaluated},
              {"lists_evaluated", r.lists_evaluated}};
}

MetricsReport metrics_from(const json& j) {
  MetricsReport r;
  r.rs = j.at("rs").get<double>();
  r.precision = j.at("precision").get<double>();
  r.inter_diversity = optional_from(j.at("inter_diversity"));
  r.intra_diversity = optional_from(j.at("intra_diversity"));
  r.coverage = j.at("coverage").get<double>();
  r.novelty = j.at("novelty").get<double>();
  r.congestion = j.at("congestion").get<double>();
  r.l = j.at("l").get<std::size_t>();
  r.users_evaluated = j.at("users_evaluated").get<std::size_t>();
  r.lists_evaluated = j.at("lists_evaluated").get<std::size_t>();
  return r;
}

json kernel_json(const KernelSpec& k) {
  return json{{"method", std::string(to_string(k.method))},
              {"lambda", optional_json(k.lambda)},
              {"p", optional_json(k.p)},
              {"social_steps", k.social_steps},
              {"friendless_rule", std::string(to_string(k.friendless_rule))}};
}

KernelSpec kernel_from(const json& j) {
  KernelSpec k;
  k.method = parse_method(j.at("method").get<std::string>());
  k.lambda = optional_from(j.at("lambda"));
  k.p = optional_from(j.at("p"));
  k.social_steps = j.at("social_steps").get<int>();
  k.friendless_rule = parse_friendless_rule(j.at("friendless_rule").get<std::string>());
  return k;
}

// Worker count is deliberately absent: reports must not depend on it.
json config_json(const ExperimentConfig& c) {
  json buckets = json::array();
  for (const auto& b : c.degree_buckets) buckets.push_back({b.min_degree, b.max_degree});
  return json{{"probe_fraction", c.probe_fraction},
              {"runs", c.runs},
              {"master_seed", c.master_seed},
              {"l", c.l},
              {"kernel", kernel_json(c.kernel)},
              {"parameter_grid", c.parameter_grid},
              {"degree_buckets", buckets},
              {"inter_diversity_sample_above_pairs", c.diversity.sample_above_pairs},
              {"inter_diversity_sample_pairs", c.diversity.sample_pairs},
              {"inter_diversity_seed", c.diversity.seed}};
}

json runs_json(const std::vector<RunReport>& runs) {
  json out = json::array();
  for (const auto& r : runs)
    out.push_back({{"run", r.run}, {"seed", r.seed}, {"metrics", metrics_json(r.report)}});
  return out;
}

std::vector<RunReport> runs_from(const json& j) {
  std::vector<RunReport> out;
  for (const auto& r : j)
    out.push_back({r.at("run").get<std::size_t>(), r.at("seed").get<std::uint64_t>(),
                   metrics_from(r.at("metrics"))});
  return out;
}

std::string optional_csv(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string csv_row(const KernelSpec& kernel, std::optional<double> parameter,
                    const RunReport& run) {
  const auto& r = run.report;
  std::string row;
  row += std::string(to_string(kernel.method)) + ",";
  row += optional_csv(parameter) + ",";
  row += std::to_string(run.run) + ",";
  row += std::to_string(run.seed) + ",";
  row += format_double(r.rs) + ",";
  row += format_double(r.precision) + ",";
  row += optional_csv(r.inter_diversity) + ",";
  row += optional_csv(r.intra_diversity) + ",";
  row += format_double(r.coverage) + ",";
  row += format_double(r.novelty) + ",";
  row += format_double(r.congestion) + ",";
  row += std::to_string(r.l) + ",";
  row += std::to_string(r.users_evaluated) + ",";
  row += std::to_string(r.lists_evaluated) + "\n";
  return row;
}

std::optional<double> kernel_parameter(const KernelSpec& k) {
  if (k.method == Method::Hybrid) return k.lambda;
  if (k.method == Method::SMD) return k.p;
  return std::nullopt;
}

}  // namespace

UserId IdMap::intern_user(const std::string& label) {
  auto [it, inserted] = user_index_.try_emplace(label, static_cast<UserId>(user_labels_.size()));
  if (inserted) user_labels_.push_back(label);
  return it->second;
}

ItemId IdMap::intern_item(const std::string& label) {
  auto [it, inserted] = item_index_.try_emplace(label, static_cast<ItemId>(item_labels_.size()));
  if (inserted) item_labels_.push_back(label);
  return it->second;
}

std::optional<UserId> IdMap::find_user(const std::string& label) const {
  auto it = user_index_.find(label);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemId> IdMap::find_item(const std::string& label) const {
  auto it = item_index_.find(label);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

BipartiteParse parse_bipartite(std::istream& in, const std::string& source) {
  BipartiteParse out;
  std::vector<std::string> fields;
  std::vector<UserItemEdge> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!data_fields(line, fields)) continue;
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      malformed(source, line_no, "expected user<TAB>item");
    }
    ++out.data_lines;
    out.edges.push_back({out.ids.intern_user(fields[0]), out.ids.intern_item(fields[1])});
  }
  if (in.bad()) throw DataError("read failed for " + source);
  // Keep the first occurrence of each pair, preserving file order.
  seen = out.edges;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    std::vector<UserItemEdge> unique;
    std::vector<UserItemEdge> taken;
    unique.reserve(out.edges.size());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    std::vector<char> used(seen.size(), 0);
    for (const auto& e : out.edges) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(seen.begin(), seen.end(), e) - seen.begin());
      if (used[pos]) {
        ++out.duplicates;
        continue;
      }
      used[pos] = 1;
      unique.push_back(e);
    }
    out.edges = std::move(unique);
  }
  return out;
}

BipartiteParse parse_bipartite_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_bipartite(in, path.string());
}

SocialParse parse_social(std::istream& in, IdMap& ids, UnknownUserRule rule,
                         const std::string& source) {
  SocialParse out;
  std::vector<std::string> fields;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!data_fields(line, fields)) continue;
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      malformed(source, line_no, "expected user<TAB>user");
    }
    ++out.data_lines;
    if (rule == UnknownUserRule::Skip) {
      const auto a = ids.find_user(fields[0]);
      const auto b = ids.find_user(fields[1]);
      if (!a || !b) {
        ++out.skipped_unknown;
        continue;
      }
      out.edges.push_back({*a, *b});
    } else {
      const auto before = ids.n_users();
      const auto a = ids.intern_user(fields[0]);
      const auto b = ids.intern_user(fields[1]);
      out.users_added += ids.n_users() - before;
      out.edges.push_back({a, b});
    }
  }
  if (in.bad()) throw DataError("read failed for " + source);
  return out;
}

SocialParse parse_social_file(const std::filesystem::path& path, IdMap& ids,
                              UnknownUserRule rule) {
  auto in = open_input(path);
  return parse_social(in, ids, rule, path.string());
}

Dataset load_dataset(const std::filesystem::path& items, const std::filesystem::path& social,
                     UnknownUserRule rule) {
  auto bip = parse_bipartite_file(items);
  Dataset out;
  out.ids = std::move(bip.ids);
  auto soc = parse_social_file(social, out.ids, rule);
  out.unknown_social_users = rule == UnknownUserRule::Add ? soc.users_added : soc.skipped_unknown;
  out.bipartite_stats.duplicates_collapsed = bip.duplicates;
  auto b = build_bipartite(bip.edges, out.ids.n_users(), out.ids.n_items(), &out.bipartite_stats);
  auto s = build_social(soc.edges, out.ids.n_users(), &out.social_stats);
  out.network = combine(std::move(b), std::move(s));
  return out;
}

void write_bipartite_file(const BipartiteNetwork& net, const IdMap* ids,
                          const std::filesystem::path& path) {
  std::string text;
  for (const auto& e : net.edges())
    text += user_label(ids, e.user) + "\t" + item_label(ids, e.item) + "\n";
  write_text(path, text);
}

void write_social_file(const SocialNetwork& net, const IdMap* ids,
                       const std::filesystem::path& path) {
  std::string text;
  for (const auto& e : net.edges()) text += user_label(ids, e.a) + "\t" + user_label(ids, e.b) + "\n";
  write_text(path, text);
}

void write_id_map(const IdMap& ids, const std::filesystem::path& path) {
  std::string text = "# kind\tindex\tlabel\n";
  for (std::size_t u = 0; u < ids.n_users(); ++u)
    text += "user\t" + std::to_string(u) + "\t" + ids.user_labels()[u] + "\n";
  for (std::size_t a = 0; a < ids.n_items(); ++a)
    text += "item\t" + std::to_string(a) + "\t" + ids.item_labels()[a] + "\n";
  write_text(path, text);
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw ParameterError("unknown report format '" + name + "' (expected csv or json)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string report_json(const EvaluationResult& result, const ExperimentConfig& config) {
  json j{{"kind", "evaluation"},
         {"kernel", kernel_json(result.kernel)},
         {"config", config_json(config)},
         {"mean", metrics_json(result.mean)},
         {"runs", runs_json(result.runs)}};
  return j.dump(2) + "\n";
}

std::string report_json(const SweepResult& result, const ExperimentConfig& config) {
  json points = json::array();
  for (const auto& p : result.points)
    points.push_back(
        {{"parameter", p.parameter}, {"mean", metrics_json(p.mean)}, {"runs", runs_json(p.runs)}});
  json j{{"kind", "sweep"},
         {"kernel", kernel_json(result.kernel)},
         {"config", config_json(config)},
         {"optimal_parameter", result.optimal_parameter},
         {"points", points}};
  return j.dump(2) + "\n";
}

ParsedReport parse_report_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "evaluation") {
      EvaluationResult r;
      r.kernel = kernel_from(j.at("kernel"));
      r.mean = metrics_from(j.at("mean"));
      r.runs = runs_from(j.at("runs"));
      return r;
    }
    if (kind == "sweep") {
      SweepResult r;
      r.kernel = kernel_from(j.at("kernel"));
      r.optimal_parameter = j.at("optimal_parameter").get<double>();
      for (const auto& p : j.at("points"))
        r.points.push_back(
            {p.at("parameter").get<double>(), metrics_from(p.at("mean")), runs_from(p.at("runs"))});
      return r;
    }
    throw DataError("unknown report kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

ParsedReport read_report_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_report_json(buffer.str());
}

void write_report(const EvaluationResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    write_text(path, report_json(result, config));
    return;
  }
  std::string text = std::string(kReportCsvHeader) + "\n";
  for (const auto& run : result.runs) text += csv_row(result.kernel, kernel_parameter(result.kernel), run);
  write_text(path, text);
}

void write_report(const SweepResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    write_text(path, report_json(result, config));
    return;
  }
  std::vector<const SweepPoint*> order;
  for (const auto& p : result.points) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* x, const auto* y) { return x->parameter < y->parameter; });
  std::string text = std::string(kReportCsvHeader) + "\n";
  for (const auto* p : order)
    for (const auto& run : p->runs) text += csv_row(result.kernel, p->parameter, run);
  write_text(path, text);
}

void write_report(const ColdstartResult& result, const ExperimentConfig& config,
                  std::size_t max_degree, const std::filesystem::path& path,
                  ReportFormat format) {
  const auto& c = result.challenger;
  const auto& b = result.baseline;
  const auto& g = result.improvement;
  struct Row {
    const char* name;
    std::optional<double> challenger, baseline, gain;
  };
  const Row rows[] = {
      {"rs", c.rs, b.rs, g.rs},
      {"precision", c.precision, b.precision, g.precision},
      {"inter_diversity", c.inter_diversity, b.inter_diversity, g.inter_diversity},
      {"intra_diversity", c.intra_diversity, b.intra_diversity, g.intra_diversity},
      {"coverage", c.coverage, b.coverage, g.coverage},
      {"novelty", c.novelty, b.novelty, g.novelty},
      {"congestion", c.congestion, b.congestion, g.congestion},
  };
  if (format == ReportFormat::Json) {
    json metrics = json::object();
    for (const auto& row : rows)
      metrics[row.name] = {{"challenger", optional_json(row.challenger)},
                           {"baseline", optional_json(row.baseline)},
                           {"improvement", optional_json(row.gain)}};
    json j{{"kind", "coldstart"},
           {"max_degree", max_degree},
           {"challenger_kernel", kernel_json(result.challenger_kernel)},
           {"baseline_kernel", kernel_json(result.baseline_kernel)},
           {"config", config_json(config)},
           {"selected_users", result.selected.size()},
           {"unreachable_users", result.unreachable.size()},
           {"lost_mass", result.lost_mass},
           {"challenger", metrics_json(c)},
           {"baseline", metrics_json(b)},
           {"metrics", metrics}};
    write_text(path, j.dump(2) + "\n");
    return;
  }
  std::string text = "metric,challenger,baseline,improvement\n";
  for (const auto& row : rows) {
    text += std::string(row.name) + "," + optional_csv(row.challenger) + "," +
            optional_csv(row.baseline) + "," + optional_csv(row.gain) + "\n";
  }
  write_text(path, text);
}

void write_degree_histogram(const std::map<std::size_t, std::size_t>& histogram,
                            const std::filesystem::path& path) {
  std::string text = "degree,count\n";
  for (const auto& [degree, count] : histogram)
    text += std::to_string(degree) + "," + std::to_string(count) + "\n";
  write_text(path, text);
}

std::uint64_t network_checksum(const BipartiteNetwork& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(net.n_users());
  mix(net.n_items());
  for (const auto& e : net.edges()) mix((static_cast<std::uint64_t>(e.user) << 32) | e.item);
  return h;
}

void persist_split(const LinkSplit& split, const BipartiteNetwork& net,
                   const std::filesystem::path& path) {
  char checksum[32];
  std::snprintf(checksum, sizeof checksum, "%016" PRIx64, network_checksum(net));
  std::string text = "# socdiff link split\n";
  text += "seed\t" + std::to_string(split.seed) + "\n";
  text += "users\t" + std::to_string(net.n_users()) + "\n";
  text += "items\t" + std::to_string(net.n_items()) + "\n";
  text += "links\t" + std::to_string(net.n_edges()) + "\n";
  text += std::string("checksum\t") + checksum + "\n";
  text += "probe\t" + std::to_string(split.probe.size()) + "\n";
  for (const auto& e : split.probe)
    text += std::to_string(e.user) + "\t" + std::to_string(e.item) + "\n";
  write_text(path, text);
}

LinkSplit load_split(const std::filesystem::path& path, const BipartiteNetwork& net) {
  auto in = open_input(path);
  const auto where = path.string();
  std::map<std::string, std::string> header;
  std::vector<std::string> fields;
  std::vector<UserItemEdge> probe;
  std::string line;
  bool in_probe = false;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!data_fields(line, fields)) continue;
    if (fields.size() != 2) malformed(where, line_no, "expected two tab-separated fields");
    if (!in_probe) {
      header[fields[0]] = fields[1];
      if (fields[0] == "probe") in_probe = true;
      continue;
    }
    try {
      probe.push_back({static_cast<UserId>(std::stoul(fields[0])),
                       static_cast<ItemId>(std::stoul(fields[1]))});
    } catch (const std::exception&) {
      malformed(where, line_no, "expected numeric user and item indices");
    }
  }
  for (const char* key : {"seed", "users", "items", "links", "checksum", "probe"})
    if (!header.count(key)) throw DataError(where + ": missing '" + key + "' header");

  char checksum[32];
  std::snprintf(checksum, sizeof checksum, "%016" PRIx64, network_checksum(net));
  if (header["users"] != std::to_string(net.n_users()) ||
      header["items"] != std::to_string(net.n_items()) ||
      header["links"] != std::to_string(net.n_edges()) || header["checksum"] != checksum) {
    throw DataError(where + ": split was written for a different network");
  }
  if (header["probe"] != std::to_string(probe.size())) {
    throw DataError(where + ": probe count does not match the listed links");
  }
  if (probe.empty()) throw DataError(where + ": split has no probe links");

  std::sort(probe.begin(), probe.end());
  if (std::adjacent_find(probe.begin(), probe.end()) != probe.end()) {
    throw DataError(where + ": duplicate probe link");
  }
  LinkSplit split;
  split.seed = std::stoull(header["seed"]);
  split.n_users = net.n_users();
  split.n_items = net.n_items();
  for (const auto& e : probe) {
    if (e.user >= net.n_users() || e.item >= net.n_items() || !net.has_edge(e.user, e.item)) {
      throw DataError(where + ": probe link (" + std::to_string(e.user) + ", " +
                      std::to_string(e.item) + ") is not in the network");
    }
  }
  const auto all = net.edges();
  std::set_difference(all.begin(), all.end(), probe.begin(), probe.end(),
                      std::back_inserter(split.training));
  split.probe = std::move(probe);
  return split;
}

}  // namespace socdiff
