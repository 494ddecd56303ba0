#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "socdiff/harness.hpp"
#include "socdiff/network.hpp"
#include "socdiff/split.hpp"

namespace socdiff {

// Dense index <-> original label, in order of first appearance.
class IdMap {
 public:
  UserId intern_user(const std::string& label);
  ItemId intern_item(const std::string& label);
  std::optional<UserId> find_user(const std::string& label) const;
  std::optional<ItemId> find_item(const std::string& label) const;

  const std::vector<std::string>& user_labels() const { return user_labels_; }
  const std::vector<std::string>& item_labels() const { return item_labels_; }
  std::size_t n_users() const { return user_labels_.size(); }
  std::size_t n_items() const { return item_labels_.size(); }

 private:
  std::vector<std::string> user_labels_, item_labels_;
  std::unordered_map<std::string, UserId> user_index_;
  std::unordered_map<std::string, ItemId> item_index_;
};

struct BipartiteParse {
  std::vector<UserItemEdge> edges;  // duplicates already removed, file order
  IdMap ids;
  std::size_t duplicates = 0;
  std::size_t data_lines = 0;
};

enum class UnknownUserRule { Add, Skip };

struct SocialParse {
  std::vector<UserUserEdge> edges;  // one entry per distinct input line pair
  std::size_t skipped_unknown = 0;
  std::size_t users_added = 0;
  std::size_t data_lines = 0;
};

// Tab-separated `user<TAB>item` lines; `#` comment lines and blank lines are
// skipped and columns after the second are ignored. Throws DataError naming
// the source and line number for lines with fewer than two columns.
BipartiteParse parse_bipartite(std::istream& in, const std::string& source = "<stream>");
BipartiteParse parse_bipartite_file(const std::filesystem::path& path);

// `user<TAB>user` lines resolved against (and possibly extending) ids.
SocialParse parse_social(std::istream& in, IdMap& ids, UnknownUserRule rule,
                         const std::string& source = "<stream>");
SocialParse parse_social_file(const std::filesystem::path& path, IdMap& ids,
                              UnknownUserRule rule);

struct Dataset {
  CombinedNetwork network;
  IdMap ids;
  BuildStats bipartite_stats;
  BuildStats social_stats;
  std::size_t unknown_social_users = 0;  // skipped or added, depending on the rule
};

Dataset load_dataset(const std::filesystem::path& items, const std::filesystem::path& social,
                     UnknownUserRule rule = UnknownUserRule::Add);

// Writes the edge lists back out using the labels in ids (or u<index>/i<index>
// when ids is null).
void write_bipartite_file(const BipartiteNetwork& net, const IdMap* ids,
                          const std::filesystem::path& path);
void write_social_file(const SocialNetwork& net, const IdMap* ids,
                       const std::filesystem::path& path);
void write_id_map(const IdMap& ids, const std::filesystem::path& path);

enum class ReportFormat { Csv, Json };
ReportFormat parse_report_format(const std::string& name);

// Column order of every per-run CSV report.
inline constexpr const char* kReportCsvHeader =
    "method,parameter,run,seed,rs,precision,inter_diversity,intra_diversity,coverage,novelty,"
    "congestion,l,users_evaluated,lists_evaluated";

// %.17g, so every double survives a text round trip.
std::string format_double(double v);

void write_report(const EvaluationResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const SweepResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const ColdstartResult& result, const ExperimentConfig& config,
                  std::size_t max_degree, const std::filesystem::path& path, ReportFormat format);

// JSON text of the reports, as written by write_report.
std::string report_json(const EvaluationResult& result, const ExperimentConfig& config);
std::string report_json(const SweepResult& result, const ExperimentConfig& config);

using ParsedReport = std::variant<EvaluationResult, SweepResult>;
ParsedReport parse_report_json(const std::string& text);
ParsedReport read_report_json(const std::filesystem::path& path);

void write_degree_histogram(const std::map<std::size_t, std::size_t>& histogram,
                            const std::filesystem::path& path);

// Stores the probe links and seed together with a fingerprint of the network
// they were drawn from.
void persist_split(const LinkSplit& split, const BipartiteNetwork& net,
                   const std::filesystem::path& path);
// Throws DataError when the file was written for a different network or holds
// no probe links.
LinkSplit load_split(const std::filesystem::path& path, const BipartiteNetwork& net);

// FNV-1a over the sorted edge list and the dimensions.
std::uint64_t network_checksum(const BipartiteNetwork& net);

}  // namespace socdiff
